"""Laboratory for online contention resolution on k-fold matroid unions."""

__version__ = "0.1.0"
