"""Expected zeros of random Gaussian harmonic polynomials via the Kac-Rice formula."""

__version__ = "0.1.0"
