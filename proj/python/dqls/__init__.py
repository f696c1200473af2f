"""Python bindings for the dqls simulator."""

import json

import numpy as np

from . import _core
from ._core import (
    DegenerateError,
    Error,
    MatrixStore,
    ResourceError,
    ValidationError,
    condition_number,
    eigenvalues,
    filter_h,
    generate_matrix,
    isometries,
    walk_matrix,
)

__all__ = [
    "DegenerateError",
    "Error",
    "MatrixStore",
    "ResourceError",
    "ValidationError",
    "condition_number",
    "eigenvalues",
    "filter_h",
    "generate_matrix",
    "isometries",
    "qsve",
    "solve",
    "walk_matrix",
]


def _store(matrix):
    if isinstance(matrix, MatrixStore):
        return matrix
    return MatrixStore.from_dense(np.asarray(matrix, dtype=float))


def solve(matrix, b=None, **kwargs):
    """Run the solver; returns the report as a dict with `output_state` as a complex array."""
    store = _store(matrix)
    if b is None:
        b = np.full(store.rows, 1.0 / np.sqrt(store.rows))
    report = json.loads(_core.solve(store, np.asarray(b, dtype=float), **kwargs))
    for key in ("output_state", "true_state"):
        report[key] = np.array([complex(re, im) for re, im in report[key]])
    return report


def qsve(matrix, b=None, **kwargs):
    """Singular value estimation on |b>; returns the output as a dict."""
    store = _store(matrix)
    if b is None:
        b = np.full(store.cols, 1.0 / np.sqrt(store.cols))
    return json.loads(_core.qsve(store, np.asarray(b, dtype=float), **kwargs))
