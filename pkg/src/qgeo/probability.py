"""Quantum logic, probability measures given by density operators, and the
metric form of transition probabilities.

For a ray ``x`` and a projective subspace ``M = P(range Q)`` the distance to
``M`` is ``sqrt(2 hbar) arccos ||Q phi||``, so ``Tr(Q P_x) = ||Q phi||^2``
is ``cos^2(d(x, M) / sqrt(2 hbar))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, EmptySubmanifoldError, InvalidDensityError, QGeoError
from .geodesics import GeodesicSubmanifold
from .hermitian import as_matrix, eig_hermitian, is_hermitian, max_abs
from .projective import Ray

__all__ = [
    "DensityOperator",
    "PureDecomposition",
    "as_projector",
    "born",
    "born_report",
    "decompose",
    "distance_to_submanifold",
    "geometric_born",
    "is_pure",
    "logic_join",
    "logic_leq",
    "logic_meet",
    "logic_not",
    "measure_eval",
    "normalize_intervals",
    "spectral_projector_union",
    "transition_prob",
]

LOGIC_TOL = 1e-9

Interval = tuple[float, float]


def as_projector(p) -> np.ndarray:
    """Validate a Hermitian idempotent (entrywise tolerance 1e-10)."""
    if isinstance(p, GeodesicSubmanifold):
        return p.projector
    m = as_matrix(p)
    if max_abs(m - m.conj().T) > 1e-10 or max_abs(m @ m - m) > 1e-10:
        raise QGeoError("not an orthogonal projector")
    return m


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p, q = as_projector(p), as_projector(q)
    if p.shape != q.shape:
        raise DimensionMismatch("projectors of different dimension")
    return p, q


def _sym(m: np.ndarray) -> np.ndarray:
    # sums of validated projectors can cancel to pure rounding noise
    return 0.5 * (m + m.conj().T)


def _range_projector(vectors: np.ndarray) -> np.ndarray:
    q = vectors @ vectors.conj().T
    return 0.5 * (q + q.conj().T)


def logic_not(p) -> np.ndarray:
    p = as_projector(p)
    return np.eye(p.shape[0]) - p


def logic_meet(p, q, tol: float = LOGIC_TOL) -> np.ndarray:
    """Projector onto ``range P ∩ range Q``: null space of ``(1-P) + (1-Q)``."""
    p, q = _pair(p, q)
    n = p.shape[0]
    eig = eig_hermitian(_sym(2.0 * np.eye(n) - p - q))
    return _range_projector(eig.eigenvectors[:, eig.eigenvalues <= tol])


def logic_join(p, q, tol: float = LOGIC_TOL) -> np.ndarray:
    """Projector onto ``span(range P, range Q)``: range of ``P + Q``."""
    p, q = _pair(p, q)
    eig = eig_hermitian(_sym(p + q))
    return _range_projector(eig.eigenvectors[:, eig.eigenvalues > tol])


def logic_leq(p, q, tol: float = 1e-10) -> bool:
    """``P <= Q`` in the lattice order, i.e. ``QP = P``."""
    p, q = _pair(p, q)
    return max_abs(q @ p - p) <= tol


class DensityOperator:
    """Positive semidefinite, unit-trace Hermitian matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, *, check: bool = True):
        m = as_matrix(matrix)
        if check:
            if not is_hermitian(m):
                raise InvalidDensityError("density operator must be Hermitian")
            if abs(np.trace(m).real - 1.0) > 1e-10:
                raise InvalidDensityError("density operator must have unit trace")
            if eig_hermitian(m).eigenvalues[0] < -1e-12:
                raise InvalidDensityError("density operator must be positive semidefinite")
        m = 0.5 * (m + m.conj().T)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def pure(cls, x: Ray) -> "DensityOperator":
        return cls(x.projector(), check=False)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityOperator":
        return cls(np.eye(dim) / dim, check=False)

    @classmethod
    def mixture(cls, weights: Sequence[float], rays: Sequence[Ray]) -> "DensityOperator":
        w = np.asarray(weights, dtype=float)
        if len(w) != len(rays) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-10:
            raise InvalidDensityError("mixture weights must be nonnegative and sum to 1")
        m = sum(wi * r.projector() for wi, r in zip(w, rays))
        return cls(m)


def _density(w) -> DensityOperator:
    return w if isinstance(w, DensityOperator) else DensityOperator(w)


def measure_eval(mu, q) -> float:
    """``mu(Q) = Tr(W Q)``, clamped to [0, 1]."""
    w = _density(mu).matrix
    q = as_projector(q)
    if w.shape != q.shape:
        raise DimensionMismatch("measure_eval: dimension mismatch")
    val = float(np.einsum("ij,ji->", w, q).real)
    return min(max(val, 0.0), 1.0)


def transition_prob(x: Ray, y: Ray) -> float:
    if x.dim != y.dim:
        raise DimensionMismatch("transition_prob: dimension mismatch")
    return float(abs(np.vdot(x.rep, y.rep)) ** 2)


def _submanifold(m) -> GeodesicSubmanifold:
    if not isinstance(m, GeodesicSubmanifold):
        m = GeodesicSubmanifold.from_projector(m)
    if m.rank == 0:
        raise EmptySubmanifoldError("empty submanifold")
    return m


def distance_to_submanifold(x: Ray, m, hbar: float = 1.0) -> float:
    """``d(x, M)``, attained at the ray of ``Q phi``."""
    m = _submanifold(m)
    if m.dim != x.dim:
        raise DimensionMismatch("distance_to_submanifold: dimension mismatch")
    inside = m.projector @ x.rep
    outside = x.rep - inside
    return float(np.sqrt(2.0 * hbar) * np.arctan2(np.linalg.norm(outside), np.linalg.norm(inside)))


def geometric_born(x: Ray, m, hbar: float = 1.0) -> float:
    """``cos^2(d(x, M) / sqrt(2 hbar))``; equals ``Tr(Q_M P_x)`` for every rank."""
    d = distance_to_submanifold(x, m, hbar)
    return float(np.cos(d / np.sqrt(2.0 * hbar)) ** 2)


def normalize_intervals(x: Union[Interval, Iterable[Interval]]) -> list[Interval]:
    """Sorted, merged list of closed intervals."""
    if len(x) == 2 and np.isscalar(x[0]):
        x = [x]
    ivs = sorted((float(a), float(b)) for a, b in x)
    for a, b in ivs:
        if a > b:
            raise QGeoError(f"interval [{a}, {b}] has endpoints out of order")
    merged: list[Interval] = []
    for a, b in ivs:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def spectral_projector_union(a, x) -> np.ndarray:
    """Spectral projector of ``A`` on a finite union of closed intervals."""
    from .observables import Observable

    eig = a.eig() if isinstance(a, Observable) else eig_hermitian(as_matrix(a))
    inside = np.zeros(eig.dim, dtype=bool)
    for lo, hi in normalize_intervals(x):
        inside |= (eig.eigenvalues >= lo) & (eig.eigenvalues <= hi)
    return _range_projector(eig.eigenvectors[:, inside])


def born(a, w, x) -> float:
    """``P(A, W, X) = Tr(W Q^A(X))``."""
    w = _density(w)
    q = spectral_projector_union(a, x)
    if q.shape != w.matrix.shape:
        raise DimensionMismatch("born: dimension mismatch")
    return measure_eval(w, q)


@dataclass(frozen=True)
class PureDecomposition:
    weights: np.ndarray
    rays: tuple[Ray, ...]

    def reconstruct(self) -> np.ndarray:
        return sum(wi * r.projector() for wi, r in zip(self.weights, self.rays))


def decompose(w, drop: float = 1e-12) -> PureDecomposition:
    """Spectral decomposition of ``W`` into weighted pure states."""
    w = _density(w)
    eig = eig_hermitian(w.matrix)
    keep = eig.eigenvalues > drop
    weights = eig.eigenvalues[keep][::-1].copy()
    vecs = eig.eigenvectors[:, keep][:, ::-1]
    return PureDecomposition(weights, tuple(Ray(vecs[:, i]) for i in range(vecs.shape[1])))


def is_pure(w, tol: float = 1e-10) -> bool:
    m = _density(w).matrix
    purity = float(np.einsum("ij,ji->", m, m).real)
    return abs(purity - 1.0) <= tol


def born_report(a, w, x, hbar: float = 1.0) -> dict:
    """``{prob, rank, distance_per_component}`` for the CLI."""
    q = spectral_projector_union(a, x)
    m = GeodesicSubmanifold.from_projector(q)
    prob = born(a, w, x)
    dec = decompose(w)
    if m.rank == 0:
        dists = [None] * len(dec.rays)
    else:
        dists = [distance_to_submanifold(r, m, hbar) for r in dec.rays]
    return {
        "prob": prob,
        "rank": m.rank,
        "distance_per_component": [
            {"weight": float(wi), "distance": d} for wi, d in zip(dec.weights, dists)
        ],
    }
