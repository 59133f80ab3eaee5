from greedy.search import (
    GreedyConfig,
    GreedyResult,
    aga,
    ega,
    least_squares_min_norm,
    support_columns,
)

__all__ = [
    "GreedyConfig",
    "GreedyResult",
    "aga",
    "ega",
    "least_squares_min_norm",
    "support_columns",
]
