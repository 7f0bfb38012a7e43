# Slot-by-slot execution, certification and traces
