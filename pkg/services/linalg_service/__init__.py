"""Hilbert-Schmidt linear algebra and operator bases."""
