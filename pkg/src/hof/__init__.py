"""Higher-order cusp forms: dimension counts, symbolic cocycle laws and numeric checks."""

__version__ = "0.1.0"
