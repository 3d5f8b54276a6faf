"""Simulation laboratory for quantum-encryption key distribution protocols and attacks on them."""

__version__ = "0.1.0"
