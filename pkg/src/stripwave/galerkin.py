"""Shared dense assembly of the planewave Galerkin operator -d2/dx2 + V."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import PreconditionError
from .fourier import SQRT_2PI, FourierSeries1D


def assemble_dense(V: FourierSeries1D, cutoff: int) -> np.ndarray:
    """Matrix with entries k^2 delta_{kk'} + V_{k-k'} / sqrt(2*pi), |k|,|k'| <= cutoff.

    Coefficients of V beyond its stored cutoff are exactly zero.  The
    potential coefficients are conjugate-symmetrized so the matrix is
    Hermitian by construction.
    """
    if not V.is_real_valued(tol=1e-10):
        raise PreconditionError("potential must be real-valued")
    vsym = 0.5 * (V.coeffs + np.conj(V.coeffs[::-1]))
    nv = V.cutoff
    diffs = np.arange(0, 2 * cutoff + 1)  # |k - k'| along the first column/row
    col = np.where(diffs <= nv, np.take(vsym, np.minimum(nv + diffs, 2 * nv)), 0.0)
    row = np.where(diffs <= nv, np.take(vsym, np.maximum(nv - diffs, 0)), 0.0)
    mat = scipy.linalg.toeplitz(col, row) / SQRT_2PI
    k = np.arange(-cutoff, cutoff + 1)
    mat[np.diag_indices_from(mat)] += k * k
    return mat
