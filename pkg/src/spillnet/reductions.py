"""Order-invariant floating-point reductions.

Reordering the series of a panel permutes rows/columns of every matrix in the
pipeline. A plain ``sum`` accumulates in index order, so a permuted input can
differ from the permuted output in the last few ulps. The reductions here sort
the summands first: the sorted term multiset is identical under any input
permutation, which makes the decomposition and the connectedness measures
reproduce a relabelled panel bit for bit.
"""

from __future__ import annotations

import numpy as np


def sorted_sum(values: np.ndarray, axis: int = -1, in_place: bool = False) -> np.ndarray:
    """Sum along ``axis`` after sorting, so the result does not depend on the
    order in which the summands arrive.

    ``in_place`` sorts ``values`` itself (pass only temporaries you own); the
    default works on a copy.
    """
    arr = values if in_place else np.array(values)
    arr.sort(axis=axis)
    return arr.sum(axis=axis)


def sorted_matmul(a: np.ndarray, b: np.ndarray, work: np.ndarray | None = None) -> np.ndarray:
    """Matrix product with order-invariant inner sums.

    Builds the full term tensor ``t[i, j, m] = a[i, m] * b[m, j]`` and reduces
    it with a sorted sum. Intended for the small (N <= ~30) matrices of this
    pipeline; the tensor is N^3 and would not scale beyond that. ``work`` may
    supply a reusable (rows(a), cols(b), inner) buffer for hot loops.
    """
    bt = np.ascontiguousarray(b.T)
    shape = (a.shape[0], bt.shape[0], a.shape[1])
    if work is None or work.shape != shape:
        work = np.empty(shape)
    np.multiply(a[:, None, :], bt[None, :, :], out=work)
    work.sort(axis=2)
    return work.sum(axis=2)
