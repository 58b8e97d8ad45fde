"""Exact Koszul complexes, difference Jacobians and their duality."""
