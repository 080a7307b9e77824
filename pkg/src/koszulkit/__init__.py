"""Exact Koszul-complex homotopies for N-homogeneous algebras over Q."""

__version__ = "0.1.0"
