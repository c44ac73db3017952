"""Mine repository history into tables, networks, and social-smell metrics."""

__version__ = "0.1.0"
