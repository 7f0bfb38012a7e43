# Channel model components
