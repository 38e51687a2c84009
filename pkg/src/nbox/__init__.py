"""Toolkit for the pure logic of necessitation N and its extensions N(+)A_{m,n}."""

__version__ = "0.1.0"
