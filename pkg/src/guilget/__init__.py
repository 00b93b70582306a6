"""GUI wireframe layout generation from arrangement graphs."""

__version__ = "0.1.0"
