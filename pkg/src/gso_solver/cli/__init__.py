"""Command-line surface of the solver toolkit."""

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2
