"""Order-1/order-2 digital sequences over GF(2) and Haar-based discrepancy norms."""

__version__ = "0.1.0"
