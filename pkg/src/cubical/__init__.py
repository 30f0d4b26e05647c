"""Finite cubical sets with connections: box category, products, lifting and homotopy groups."""
