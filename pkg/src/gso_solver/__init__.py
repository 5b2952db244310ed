"""Gumbel-softmax optimization toolkit for combinatorial problems on graphs."""

__version__ = "0.1.0"
