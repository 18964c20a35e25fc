"""Corner growth model simulation toolkit."""
__version__ = "0.1.0"
