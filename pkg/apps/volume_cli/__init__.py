"""Command-line interface for volume-ratio estimation."""
