# Network decomposition and scheme planning
