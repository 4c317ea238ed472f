"""Volume-ratio estimation and scaled-parameter sweeps."""
