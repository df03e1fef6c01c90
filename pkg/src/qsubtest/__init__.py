"""Testing toolkit for quantum subroutines."""

__version__ = "0.1.0"
