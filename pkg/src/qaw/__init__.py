"""Desk-scale workbench for quantitative and continuous algebras.

Finite extended metric spaces and posets, weighted colimits, terms and
equations, and finitary monads presented as Kleisli triples.
"""

__version__ = "0.1.0"
