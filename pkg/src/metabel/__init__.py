"""Metabelian associative algebras over prime fields."""
