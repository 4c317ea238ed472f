"""Shared models, configuration, logging and errors for entanglement-volume estimation."""
