"""Flip graphs on perfect matchings of complete graphs and signed reversal graphs."""
__version__ = "0.1.0"
