"""Twist groupoids over Z-transformation groupoids of the torus and the quantum Heisenberg manifold example."""

__version__ = "0.1.0"
