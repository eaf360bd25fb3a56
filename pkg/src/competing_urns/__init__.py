"""Competing urn schemes on graphs, two-neighbour growth on the lattice, and
the boundary coupling between them."""

__version__ = "0.1.0"
