# Core module initialization
__version__ = "0.4.0"
