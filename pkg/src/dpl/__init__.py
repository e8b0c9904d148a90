"""Model checking for dynamic preference logic."""
