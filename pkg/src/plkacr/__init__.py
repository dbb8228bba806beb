"""Absolute and balanced concentration robustness for power-law kinetic systems."""
