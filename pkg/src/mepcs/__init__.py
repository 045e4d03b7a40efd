"""Universal and Bayesian compressed sensing over b-bit quantized sequences."""

__version__ = "0.1.0"
