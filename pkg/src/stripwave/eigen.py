"""Planewave Galerkin eigenproblem for -d2/dx2 + V and convergence studies.

Eigenpairs come from a dense Hermitian eigendecomposition of the matrix
with entries k^2 delta_{kk'} + V_{k-k'} / sqrt(2*pi).  Eigenvalues are
polished by an exactly-summed Rayleigh quotient, which removes the
O(eps * ||H||) noise of the backward-stable decomposition and matters
when eigenvalue differences near machine precision are the object of
study.  Convergence tables measure eigenvalue errors and H1 eigenvector
distances against a reference solve at a much larger cutoff and fit
exponential decay rates.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, InvalidParameterError
from .fourier import FourierSeries1D, multiplier_norm_bound, strip_norm, strip_weight
from .galerkin import assemble_dense

RATE_FIT_FLOOR = 1e-12  # errors below this are double-precision junk


@dataclass(frozen=True)
class GalerkinMatrix:
    cutoff: int
    entries: np.ndarray

    def __post_init__(self):
        n = 2 * self.cutoff + 1
        if self.entries.shape != (n, n):
            raise InvalidParameterError("matrix dimension must be 2*cutoff+1")


@dataclass(frozen=True)
class EigenResult:
    """Ascending eigenvalues with L2-normalized coefficient-space eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: list[FourierSeries1D]


@dataclass(frozen=True)
class ConvergenceTable:
    cutoffs: np.ndarray
    eigenvalue_errors: np.ndarray
    eigenvector_errors: np.ndarray  # H1 distances to the reference eigenspace
    fitted_rate_eigenvalue: float
    fitted_rate_eigenvector: float
    band: int
    reference_cutoff: int
    claimed_half_width: float


@dataclass(frozen=True)
class StripBoundCheck:
    """Strip norm of a computed eigenvector against its theoretical bound."""

    norm: float
    bound: float
    eigenvalue: float
    multiplier_norm: float

    @property
    def holds(self) -> bool:
        return self.norm <= self.bound


def assemble_hamiltonian(V: FourierSeries1D, cutoff: int) -> GalerkinMatrix:
    """Dense Hermitian Galerkin matrix of -d2/dx2 + V on modes |k| <= cutoff."""
    return GalerkinMatrix(cutoff, assemble_dense(V, cutoff))


def _rayleigh_polish(H: np.ndarray, vec: np.ndarray) -> float:
    # Exactly-summed Rayleigh quotient: quadratic in the eigenvector error.
    hv = H @ vec
    num = math.fsum((np.conj(vec) * hv).real)
    den = math.fsum(np.abs(vec) ** 2)
    return num / den


def solve_eig(V: FourierSeries1D, cutoff: int, n_pairs: int) -> EigenResult:
    """Lowest n_pairs eigenpairs of the Galerkin operator, ascending.

    Eigenvectors are L2-normalized; eigenvector phase and the basis of
    degenerate clusters are whatever the backend returns.
    """
    dim = 2 * cutoff + 1
    if n_pairs < 1 or n_pairs > dim:
        raise InvalidParameterError(
            f"n_pairs must lie in 1..{dim} for cutoff {cutoff}")
    H = assemble_dense(V, cutoff)
    _, vecs = np.linalg.eigh(H)
    polished = np.array([_rayleigh_polish(H, vecs[:, j]) for j in range(n_pairs)])
    order = np.argsort(polished, kind="stable")
    eigvals = polished[order]
    series = [FourierSeries1D(cutoff, vecs[:, j] / np.linalg.norm(vecs[:, j]))
              for j in order]
    return EigenResult(eigenvalues=eigvals, eigenvectors=series)


def h1_distance(u: FourierSeries1D, basis: list[FourierSeries1D]) -> float:
    """H1 distance from u to the span of the given series.

    The basis is orthonormalized internally (in H1), so the result only
    depends on the span.
    """
    if not basis:
        raise InvalidParameterError("basis must contain at least one series")
    n = max([u.cutoff] + [b.cutoff for b in basis])
    k = np.arange(-n, n + 1)
    w = np.sqrt(1.0 + k.astype(float) ** 2)
    mat = np.column_stack([w * b._padded(n) for b in basis])
    q, _ = np.linalg.qr(mat)
    target = w * u._padded(n)
    return float(np.linalg.norm(target - q @ (np.conj(q.T) @ target)))


def fit_log_rate(xs, errors, floor: float = RATE_FIT_FLOOR) -> float:
    """Least-squares slope of log(error) against x.

    Rows at the floating-point floor are excluded: both rows at or below
    the explicit floor and the trailing plateau where the sequence has
    stopped decaying (each kept row must undercut its predecessor by at
    least a factor 2, far slower than any exponential rate of interest).
    When at least three rows survive, the smallest-x row (pre-asymptotic)
    is dropped as well.  Returns nan when fewer than two usable rows
    remain.
    """
    xs = np.asarray(xs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = errors > floor
    xs, errors = xs[mask], errors[mask]
    keep = len(xs)
    for i in range(1, len(xs)):
        if errors[i] > 0.5 * errors[i - 1]:
            keep = i
            break
    xs, errors = xs[:keep], errors[:keep]
    if len(xs) >= 3:
        xs, errors = xs[1:], errors[1:]
    if len(xs) < 2:
        return math.nan
    slope, _ = np.polyfit(xs, np.log(errors), 1)
    return float(slope)


def convergence_study(V: FourierSeries1D, cutoffs, reference_cutoff: int,
                      band: int, claimed_half_width: float,
                      cluster_gap: float = 1e-8,
                      cluster: bool = True) -> ConvergenceTable:
    """Eigenvalue and H1 eigenvector errors against a reference solve.

    `band` is 1-based.  The reference eigenspace is the cluster of
    reference eigenpairs within cluster_gap of the target eigenvalue;
    with cluster=False an unresolved cluster raises DegeneracyError
    instead.  Requires reference_cutoff >= 2 * max(cutoffs).
    """
    cutoffs = [int(n) for n in cutoffs]
    if reference_cutoff < 2 * max(cutoffs):
        raise InvalidParameterError(
            "reference cutoff must be at least twice the largest study cutoff")
    if band < 1:
        raise InvalidParameterError("band index is 1-based")
    n_ref = min(2 * reference_cutoff + 1, band + 8)
    ref = solve_eig(V, reference_cutoff, n_ref)
    lam_ref = ref.eigenvalues[band - 1]
    in_cluster = np.abs(ref.eigenvalues - lam_ref) <= cluster_gap
    if np.sum(in_cluster) > 1 and not cluster:
        raise DegeneracyError(
            f"eigenvalue {band} at the reference cutoff sits in a cluster of "
            f"{int(np.sum(in_cluster))} within gap {cluster_gap:g}")
    space = [v for v, keep in zip(ref.eigenvectors, in_cluster) if keep]

    lam_err = np.empty(len(cutoffs))
    vec_err = np.empty(len(cutoffs))
    for i, n in enumerate(cutoffs):
        res = solve_eig(V, n, band)
        lam_err[i] = res.eigenvalues[band - 1] - lam_ref
        vec_err[i] = h1_distance(res.eigenvectors[band - 1], space)

    return ConvergenceTable(
        cutoffs=np.asarray(cutoffs),
        eigenvalue_errors=lam_err,
        eigenvector_errors=vec_err,
        fitted_rate_eigenvalue=fit_log_rate(cutoffs, lam_err),
        fitted_rate_eigenvector=fit_log_rate(cutoffs, vec_err),
        band=band,
        reference_cutoff=reference_cutoff,
        claimed_half_width=claimed_half_width,
    )


def eigenvector_strip_check(V: FourierSeries1D, cutoff: int, band: int,
                            half_width: float) -> StripBoundCheck:
    """Compare the strip norm of an eigenvector with its a-priori bound

        (1 + ||V||) * sqrt(cosh(2*A*sqrt(||V|| + lambda + 1))),

    where ||V|| is the multiplier-norm surrogate.  Meaningful only for
    half-widths strictly inside the potential's analyticity strip.
    """
    res = solve_eig(V, cutoff, band)
    lam = float(res.eigenvalues[band - 1])
    vnorm = multiplier_norm_bound(V, half_width)
    bound = (1.0 + vnorm) * math.sqrt(
        strip_weight(half_width, math.sqrt(vnorm + lam + 1.0)))
    return StripBoundCheck(
        norm=strip_norm(res.eigenvectors[band - 1], half_width),
        bound=float(bound),
        eigenvalue=lam,
        multiplier_norm=vnorm,
    )


def write_convergence_csv(table: ConvergenceTable, csv_path, sidecar_path=None) -> None:
    """CSV rows (N, lambda_err, h1_dist) plus an optional JSON sidecar."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "lambda_err", "h1_dist"])
        for n, le, ve in zip(table.cutoffs, table.eigenvalue_errors,
                             table.eigenvector_errors):
            writer.writerow([int(n), repr(float(le)), repr(float(ve))])
    if sidecar_path is not None:
        sidecar = {
            "j": table.band,
            "N_ref": table.reference_cutoff,
            "A_claim": table.claimed_half_width,
            "fitted_rate_eigenvalue": table.fitted_rate_eigenvalue,
            "fitted_rate_eigenvector": table.fitted_rate_eigenvector,
        }
        with open(sidecar_path, "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
