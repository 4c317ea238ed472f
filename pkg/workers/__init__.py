"""Sampling and estimation workers."""
