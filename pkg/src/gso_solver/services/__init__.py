"""Solvers, objectives and the experiment harness."""
