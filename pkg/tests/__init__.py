"""Test package for the GSO solver."""
