"""Point counts, q-expansions and birational maps for the Barth-Nieto quintic."""

__version__ = "0.1.0"
