#!/usr/bin/env python3
"""Simple script to run the GSO solver CLI."""

if __name__ == "__main__":
    import sys

    from src.gso_solver.main import main
    sys.exit(main())
