"""Layer-wise QAOA with phase operators rebuilt from each layer's best solution."""

__version__ = "0.1.0"
