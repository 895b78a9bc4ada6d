"""Exact string topology of highly connected manifolds."""
