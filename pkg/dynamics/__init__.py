"""Exact arithmetic dynamics of x^d + c over the rationals."""
