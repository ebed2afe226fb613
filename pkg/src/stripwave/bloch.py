"""Bravais lattices, planewave bases and Bloch band structures in d dimensions.

The Bloch fiber at quasimomentum k is the operator (-i*grad + k)^2 + V
on lattice-periodic functions; its Galerkin matrix on the planewave set
{G in the reciprocal lattice : |G + k| <= N} has entries

    |G + k|^2 delta_{GG'} + V_{G-G'} / sqrt(|cell|),

so the d = 1 pipeline on the lattice 2*pi*Z at k = 0 reproduces the
one-dimensional eigensolver exactly.  Band structures sample a k path;
the Brillouin-zone convergence table measures the worst eigenvalue error
over sampled k against a reference cutoff and fits its exponential rate.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, PreconditionError
from .eigen import _rayleigh_polish, fit_log_rate
from .fourier import FourierSeries1D


@dataclass(frozen=True)
class Lattice:
    """Bravais lattice spanned by the rows of `basis` (d x d, invertible)."""

    basis: np.ndarray

    def __post_init__(self):
        arr = np.array(self.basis, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidParameterError("basis must be a square matrix of row vectors")
        d = arr.shape[0]
        if not 1 <= d <= 3:
            raise InvalidParameterError("dimension must be 1, 2 or 3")
        if abs(np.linalg.det(arr)) < 1e-12 * max(1.0, np.max(np.abs(arr)) ** d):
            raise InvalidParameterError("basis vectors must be linearly independent")
        arr.flags.writeable = False
        object.__setattr__(self, "basis", arr)

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    @property
    def unit_cell_volume(self) -> float:
        return float(abs(np.linalg.det(self.basis)))


def reciprocal(lattice: Lattice) -> Lattice:
    """Reciprocal lattice: rows b_n with a_m . b_n = 2*pi*delta_{mn}."""
    return Lattice(2.0 * np.pi * np.linalg.inv(lattice.basis).T)


def weight_multid(half_width: float, lattice: Lattice, G) -> float:
    """Strip weight sum_n cosh(2*A * (G . a_n) / (2*pi)) of a reciprocal vector."""
    if half_width <= 0:
        raise InvalidParameterError("strip half-width must be positive")
    G = np.asarray(G, dtype=float)
    projections = lattice.basis @ G / (2.0 * np.pi)
    with np.errstate(over="ignore"):
        return float(np.sum(np.cosh(2.0 * half_width * projections)))


@dataclass(frozen=True)
class PlanewaveBasis:
    """Wavevector set {G : |G + k| <= cutoff}, ordered lexicographically by
    integer coordinates for reproducible matrices."""

    lattice: Lattice
    k_point: np.ndarray
    cutoff: float
    int_coords: np.ndarray   # (n, d) integer coordinates in the reciprocal basis
    wavevectors: np.ndarray  # (n, d) cartesian G vectors

    @property
    def dimension(self) -> int:
        return self.int_coords.shape[0]


def basis_set(lattice: Lattice, k_point, cutoff: float) -> PlanewaveBasis:
    """Enumerate the reciprocal-lattice vectors with |G + k| <= cutoff."""
    if cutoff <= 0:
        raise InvalidParameterError("cutoff must be positive")
    k = np.asarray(k_point, dtype=float)
    d = lattice.dimension
    if k.shape != (d,):
        raise InvalidParameterError(f"k point must have {d} components")
    recip = reciprocal(lattice)
    reach = cutoff + float(np.linalg.norm(k))
    # |m_n| = |(G . a_n)|/(2*pi) <= |G| |a_n| / (2*pi) bounds the integer box.
    box = [int(math.floor(reach * np.linalg.norm(lattice.basis[n]) / (2.0 * np.pi))) + 1
           for n in range(d)]
    coords = []
    for tup in itertools.product(*[range(-b, b + 1) for b in box]):
        G = np.asarray(tup, dtype=float) @ recip.basis
        if np.linalg.norm(G + k) <= cutoff:
            coords.append(tup)
    coords.sort()
    ints = np.asarray(coords, dtype=int).reshape(len(coords), d)
    return PlanewaveBasis(
        lattice=lattice,
        k_point=k,
        cutoff=float(cutoff),
        int_coords=ints,
        wavevectors=ints.astype(float) @ recip.basis,
    )


class FourierSeriesD:
    """Lattice-periodic function as a map {integer tuple: coefficient} over
    the reciprocal lattice, with the cell-normalized planewaves
    e_G = exp(i G.x)/sqrt(|cell|).  Missing coefficients are exactly zero."""

    def __init__(self, lattice: Lattice, coeffs: dict):
        self.lattice = lattice
        self.coeffs = {tuple(int(i) for i in key): complex(val)
                       for key, val in coeffs.items()}
        for key in self.coeffs:
            if len(key) != lattice.dimension:
                raise InvalidParameterError(
                    f"coefficient key {key} does not match dimension")

    def coefficient(self, key) -> complex:
        return self.coeffs.get(tuple(int(i) for i in key), 0.0 + 0.0j)

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        scale = 1.0 + max((abs(v) for v in self.coeffs.values()), default=0.0)
        for key, val in self.coeffs.items():
            mirrored = self.coefficient(tuple(-i for i in key))
            if abs(val - np.conj(mirrored)) > tol * scale:
                return False
        return True


def series1d_to_lattice(u: FourierSeries1D) -> tuple[Lattice, FourierSeriesD]:
    """Embed a 2*pi-periodic 1D series on the lattice 2*pi*Z (identical
    normalization, so coefficients carry over unchanged)."""
    lattice = Lattice(np.array([[2.0 * np.pi]]))
    coeffs = {(int(k),): c for k, c in zip(u.wavenumbers(), u.coeffs) if c != 0.0}
    return lattice, FourierSeriesD(lattice, coeffs)


def assemble_bloch(V: FourierSeriesD, basis: PlanewaveBasis) -> np.ndarray:
    """Hermitian fiber matrix |G+k|^2 delta + V_{G-G'}/sqrt(|cell|)."""
    if not V.is_real_valued():
        raise PreconditionError("potential must be real-valued")
    n = basis.dimension
    scale = 1.0 / math.sqrt(basis.lattice.unit_cell_volume)
    H = np.zeros((n, n), dtype=complex)
    ints = basis.int_coords
    for a in range(n):
        for b in range(a, n):
            diff = tuple(ints[a] - ints[b])
            H[a, b] = scale * V.coefficient(diff)
    H = H + np.conj(H.T)
    shifted = basis.wavevectors + basis.k_point
    H[np.diag_indices_from(H)] = np.sum(shifted * shifted, axis=1) \
        + scale * np.real(V.coefficient((0,) * basis.lattice.dimension))
    return H


def _fiber_eigenvalues(V: FourierSeriesD, basis: PlanewaveBasis, n_bands: int,
                       polish: bool = True) -> np.ndarray:
    H = assemble_bloch(V, basis)
    vals, vecs = np.linalg.eigh(H)
    if not polish:
        return vals[:n_bands]
    out = np.array([_rayleigh_polish(H, vecs[:, j]) for j in range(n_bands)])
    return np.sort(out)


@dataclass(frozen=True)
class BandStructure:
    k_path: np.ndarray       # (n_k, d)
    path_parameter: np.ndarray
    bands: np.ndarray        # (n_k, n_bands), ascending along each row
    cutoff: float


def band_structure(V: FourierSeriesD, k_path, cutoff: float,
                   n_bands: int) -> BandStructure:
    """Lowest n_bands Bloch eigenvalues at each k of the path."""
    k_path = np.atleast_2d(np.asarray(k_path, dtype=float))
    rows = []
    for k in k_path:
        basis = basis_set(V.lattice, k, cutoff)
        if basis.dimension < n_bands:
            raise InvalidParameterError(
                f"basis at k = {k.tolist()} has only {basis.dimension} planewaves; "
                f"cannot produce {n_bands} bands")
        rows.append(_fiber_eigenvalues(V, basis, n_bands))
    deltas = np.linalg.norm(np.diff(k_path, axis=0), axis=1)
    param = np.concatenate([[0.0], np.cumsum(deltas)])
    return BandStructure(k_path=k_path, path_parameter=param,
                         bands=np.asarray(rows), cutoff=float(cutoff))


@dataclass(frozen=True)
class BZConvergenceTable:
    cutoffs: np.ndarray
    max_errors: np.ndarray      # worst error over the k samples, per cutoff
    per_k_errors: np.ndarray    # (n_cutoffs, n_k)
    fitted_rate: float
    band: int
    reference_cutoff: float
    claimed_half_width: float
    k_samples: np.ndarray


def bz_convergence(V: FourierSeriesD, k_samples, cutoffs, reference_cutoff: float,
                   band: int, claimed_half_width: float) -> BZConvergenceTable:
    """Worst-over-k eigenvalue error of band `band` (1-based) per cutoff."""
    cutoffs = [float(n) for n in cutoffs]
    if reference_cutoff < 2 * max(cutoffs):
        raise InvalidParameterError(
            "reference cutoff must be at least twice the largest study cutoff")
    k_samples = np.atleast_2d(np.asarray(k_samples, dtype=float))
    refs = []
    for k in k_samples:
        basis = basis_set(V.lattice, k, reference_cutoff)
        refs.append(_fiber_eigenvalues(V, basis, band)[band - 1])
    errors = np.empty((len(cutoffs), len(k_samples)))
    for i, n in enumerate(cutoffs):
        for j, k in enumerate(k_samples):
            basis = basis_set(V.lattice, k, n)
            if basis.dimension < band:
                raise InvalidParameterError(
                    f"basis at k = {k.tolist()}, cutoff {n} too small for band {band}")
            errors[i, j] = _fiber_eigenvalues(V, basis, band)[band - 1] - refs[j]
    worst = errors.max(axis=1)
    return BZConvergenceTable(
        cutoffs=np.asarray(cutoffs),
        max_errors=worst,
        per_k_errors=errors,
        fitted_rate=fit_log_rate(cutoffs, worst),
        band=band,
        reference_cutoff=float(reference_cutoff),
        claimed_half_width=claimed_half_width,
        k_samples=k_samples,
    )


def gaussian_potential(lattice: Lattice, centers, widths, amplitudes,
                       cutoff: float) -> FourierSeriesD:
    """Periodic sum of Gaussians amplitude*exp(-|x - center - R|^2/(2*width^2)).

    Coefficients come from the closed-form transform of the periodized
    Gaussian: amplitude * (2*pi*width^2)^(d/2) / sqrt(|cell|)
    * exp(-width^2 |G|^2 / 2) * exp(-i G.center), truncated at |G| <= cutoff.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    widths = np.atleast_1d(np.asarray(widths, dtype=float))
    amplitudes = np.atleast_1d(np.asarray(amplitudes, dtype=float))
    if np.any(widths <= 0):
        raise InvalidParameterError("widths must be positive")
    if not (len(centers) == len(widths) == len(amplitudes)):
        raise InvalidParameterError("centers, widths, amplitudes must align")
    d = lattice.dimension
    basis = basis_set(lattice, np.zeros(d), cutoff)
    vol = lattice.unit_cell_volume
    coeffs = {}
    for ints, G in zip(basis.int_coords, basis.wavevectors):
        total = 0.0 + 0.0j
        g2 = float(G @ G)
        for x0, sigma, amp in zip(centers, widths, amplitudes):
            total += (amp * (2.0 * np.pi * sigma**2) ** (d / 2.0) / math.sqrt(vol)
                      * math.exp(-0.5 * sigma**2 * g2)
                      * np.exp(-1j * float(G @ x0)))
        coeffs[tuple(ints)] = total
    return FourierSeriesD(lattice, coeffs)


def bz_sample_grid(lattice: Lattice, n_per_dim: int) -> np.ndarray:
    """Uniform Monkhorst-Pack-style grid mapped into the first Brillouin
    zone (the Voronoi cell of the reciprocal lattice around the origin)."""
    if n_per_dim < 1:
        raise InvalidParameterError("n_per_dim must be positive")
    recip = reciprocal(lattice)
    d = lattice.dimension
    fractions = [(2.0 * r - n_per_dim + 1.0) / (2.0 * n_per_dim)
                 for r in range(n_per_dim)]
    shells = np.array(list(itertools.product([-1, 0, 1], repeat=d)), dtype=float)
    shifts = shells @ recip.basis
    points = []
    for frac in itertools.product(fractions, repeat=d):
        k = np.asarray(frac) @ recip.basis
        # reduce into the Voronoi cell: subtract the nearest lattice point
        dists = np.linalg.norm(k - shifts, axis=1)
        k = k - shifts[int(np.argmin(dists))]
        points.append(k)
    return np.asarray(points)


def write_bands_csv(bs: BandStructure, path) -> None:
    d = bs.k_path.shape[1]
    n_bands = bs.bands.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["path_parameter"] + [f"k{i + 1}" for i in range(d)] \
            + [f"band{j + 1}" for j in range(n_bands)]
        writer.writerow(header)
        for t, k, row in zip(bs.path_parameter, bs.k_path, bs.bands):
            writer.writerow([repr(float(t))] + [repr(float(c)) for c in k]
                            + [repr(float(v)) for v in row])


def write_bz_csv(table: BZConvergenceTable, csv_path, sidecar_path=None) -> None:
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "max_lambda_err"])
        for n, e in zip(table.cutoffs, table.max_errors):
            writer.writerow([repr(float(n)), repr(float(e))])
    if sidecar_path is not None:
        sidecar = {
            "n": table.band,
            "N_ref": table.reference_cutoff,
            "A_claim": table.claimed_half_width,
            "fitted_rate": table.fitted_rate,
            "k_samples": table.k_samples.tolist(),
        }
        with open(sidecar_path, "w") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")
