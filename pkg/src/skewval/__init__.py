"""Exact arithmetic in skew polynomial rings, skew Laurent series and Malcev-Neumann series."""
