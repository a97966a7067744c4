"""Named maps and metrics that scenario files can reference as ``builtin:<id>``."""

import numpy as np


def identity(x):
    return x


def jump_at_one(x):
    """``0`` on ``[0, 1)``, ``1/2`` at ``x = 1``."""
    return 0.5 if x == 1.0 else 0.0


def halve_or_kick(x):
    """``0 -> 1/2`` and ``2**-i -> 2**-(i+1)`` on the dyadic set."""
    return 0.5 if x == 0.0 else x / 2.0


def halve_fixing_zero(x):
    return 0.0 if x == 0.0 else x / 2.0


def usual(dim=1):
    def metric(x, y):
        return abs(x - y) * np.eye(dim) if dim > 1 else abs(x - y)

    return metric


def weighted_diagonal(alpha=2.0):
    """``diag(|x - y|, alpha |x - y|)`` on two-by-two matrices."""

    def metric(x, y):
        r = abs(x - y)
        return np.diag([r, alpha * r])

    return metric


MAPS = {
    "identity": identity,
    "example_3_5": jump_at_one,
    "example_3_11": halve_or_kick,
    "example_3_19_T": halve_fixing_zero,
    "example_3_19_S": halve_or_kick,
}

# metric factories keyed by id; each takes the algebra dimension
METRICS = {
    "usual": usual,
    "example_2_2": lambda dim: weighted_diagonal(2.0),
}

METRIC_DIMS = {"example_2_2": 2}
