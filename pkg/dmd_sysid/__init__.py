"""Dynamic mode decomposition as a system identification tool for x' = F x"""

__version__ = "0.1.0"
