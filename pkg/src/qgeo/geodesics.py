"""Closed-form geodesics, exponential/log maps, totally geodesic
submanifolds and the geometric form of superposition.

A geodesic through ``phi`` with unit chart direction ``xi`` (``xi`` orthogonal
to ``phi``) and metric speed ``rho`` is the ray of

    phi cos(rho t / sqrt(2 hbar)) + xi sin(rho t / sqrt(2 hbar)).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable, NamedTuple, Sequence, TextIO

import numpy as np

from .errors import CutLocusError, DimensionMismatch, EmptySubmanifoldError, QGeoError
from .hermitian import Rng, as_matrix, eig_hermitian, max_abs
from .projective import Ray, TangentVector, _canonicalize_rows, fs_distance, is_antipodal, tangent

__all__ = [
    "FitResult",
    "Geodesic",
    "GeodesicSubmanifold",
    "SuperpositionCoefficients",
    "acceleration_residual",
    "contains",
    "curve_acceleration_residual",
    "exp_map",
    "geodesic_eval",
    "geodesic_lift",
    "geodesic_through",
    "geolinear_fit",
    "in_cut_locus",
    "is_totally_geodesic_closed",
    "log_map",
    "on_geodesic_test",
    "random_point_in",
    "span_submanifold",
    "superposition_point",
    "write_geodesic_csv",
]

PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class Geodesic:
    base: Ray
    direction: TangentVector
    speed: float = 1.0
    hbar: float = 1.0

    def __post_init__(self) -> None:
        xi = self.direction.rep
        if abs(np.linalg.norm(xi) - 1.0) > 1e-12:
            raise QGeoError("geodesic direction must have a unit chart representative")
        if abs(np.vdot(self.base.rep, xi)) > 1e-12:
            raise QGeoError("geodesic direction must be orthogonal to the base")
        if self.speed < 0:
            raise QGeoError("geodesic speed must be nonnegative")

    def angle(self, t: float) -> float:
        return self.speed * t / np.sqrt(2.0 * self.hbar)

    @property
    def period(self) -> float:
        return float(np.inf if self.speed == 0 else 2 * np.pi * np.sqrt(2 * self.hbar) / self.speed)


def geodesic_through(base: Ray, v, speed: float = 1.0, hbar: float = 1.0) -> Geodesic:
    """Geodesic at ``base`` heading along ``v`` (any nonzero tangent or ambient vector)."""
    if isinstance(v, TangentVector):
        v = v.rep
    w = tangent(base, v).rep
    n = np.linalg.norm(w)
    if not n > 1e-12 * np.linalg.norm(v):
        raise QGeoError("geodesic direction has no component orthogonal to the base")
    return Geodesic(base, TangentVector(base, w / n), speed, hbar)


def geodesic_lift(c: Geodesic, t: float) -> np.ndarray:
    """Horizontal unit-sphere lift of the geodesic at parameter ``t``."""
    th = c.angle(t)
    return c.base.rep * np.cos(th) + c.direction.rep * np.sin(th)


def geodesic_eval(c: Geodesic, t: float) -> Ray:
    return Ray(geodesic_lift(c, t))


def exp_map(base: Ray, v: TangentVector, hbar: float = 1.0) -> Ray:
    """Riemannian exponential: ``p(phi cos|v| + v/|v| sin|v|)``.

    The chart norm ``|v.rep|`` is the angle travelled, so the metric length of
    ``v`` is the distance from ``base`` to the image.
    """
    r = float(np.linalg.norm(v.rep))
    if r == 0.0:
        return base
    c = Geodesic(base, TangentVector(base, v.rep / r), np.sqrt(2.0 * hbar) * r, hbar)
    return geodesic_eval(c, 1.0)


def log_map(base: Ray, y: Ray, hbar: float = 1.0, tol: float = 1e-12) -> TangentVector:
    """Inverse of :func:`exp_map` off the cut locus of ``base``."""
    if base.dim != y.dim:
        raise DimensionMismatch("log_map: dimension mismatch")
    phi = base.rep
    c = np.vdot(phi, y.rep)
    if abs(c) <= tol:
        raise CutLocusError("cut locus: minimal geodesic not unique")
    psi = y.rep * (np.conj(c) / abs(c))
    perp = psi - phi * np.vdot(phi, psi)
    s = np.linalg.norm(perp)
    if s == 0.0:
        return TangentVector(base, np.zeros_like(phi))
    angle = np.arctan2(s, abs(c))
    return TangentVector(base, perp * (angle / s))


def in_cut_locus(x: Ray, y: Ray, tol: float = 1e-10) -> bool:
    """The cut locus of ``x`` is its antipodal manifold."""
    return is_antipodal(x, y, tol)


@dataclass(frozen=True)
class GeodesicSubmanifold:
    """Projective subspace ``P(range Q)`` for an orthogonal projector ``Q``."""

    projector: np.ndarray
    rank: int

    def __post_init__(self) -> None:
        q = as_matrix(self.projector)
        if max_abs(q @ q - q) > 1e-10 or max_abs(q - q.conj().T) > 1e-10:
            raise QGeoError("submanifold projector must be a Hermitian idempotent")
        if int(self.rank) != int(round(np.trace(q).real)):
            raise QGeoError("rank disagrees with trace of projector")
        q = q.copy()
        q.flags.writeable = False
        object.__setattr__(self, "projector", q)

    @classmethod
    def from_projector(cls, q) -> "GeodesicSubmanifold":
        q = as_matrix(q)
        return cls(q, int(round(np.trace(q).real)))

    @property
    def dim(self) -> int:
        return self.projector.shape[0]

    @cached_property
    def basis(self) -> np.ndarray:
        """Orthonormal basis of the range, as columns."""
        eig = eig_hermitian(self.projector)
        return eig.eigenvectors[:, eig.eigenvalues > 0.5]


def _orthonormalize(vectors: Iterable[np.ndarray], pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    basis: list[np.ndarray] = []
    for v in vectors:
        w = np.array(v, dtype=np.complex128)
        w = w / np.linalg.norm(w)
        for _ in range(2):
            for b in basis:
                w = w - b * np.vdot(b, w)
        n = np.linalg.norm(w)
        if n > pivot_tol:
            basis.append(w / n)
    return np.array(basis).T


def span_submanifold(points: Sequence[Ray]) -> GeodesicSubmanifold:
    """Smallest totally geodesic submanifold containing the given rays."""
    if len(points) == 0:
        raise EmptySubmanifoldError("span_submanifold: no points given")
    dim = points[0].dim
    if any(p.dim != dim for p in points):
        raise DimensionMismatch("span_submanifold: rays of different dimension")
    u = _orthonormalize(p.rep for p in points)
    q = u @ u.conj().T
    q = 0.5 * (q + q.conj().T)
    return GeodesicSubmanifold(q, u.shape[1])


def contains(m: GeodesicSubmanifold, x: Ray, tol: float = 1e-10) -> bool:
    if m.dim != x.dim:
        raise DimensionMismatch("contains: dimension mismatch")
    return float(np.linalg.norm(m.projector @ x.rep - x.rep)) <= tol


def random_point_in(m: GeodesicSubmanifold, rng: Rng) -> Ray:
    if m.rank == 0:
        raise EmptySubmanifoldError("random_point_in: rank-0 submanifold")
    return Ray(m.basis @ rng.complex_normal(m.rank))


def is_totally_geodesic_closed(
    m: GeodesicSubmanifold, trials: int, rng: Rng, hbar: float = 1.0, tol: float = 1e-9
) -> bool:
    """Sample geodesics tangent to ``m`` and check they never leave it.

    Each trial picks ``x`` in ``m`` and a direction ``(1 - P_x) Q z``, then
    tests a few points along the full period.
    """
    if m.rank < 2:
        return True
    for k in range(trials):
        r = rng.split(k)
        x = random_point_in(m, r)
        z = m.basis @ r.complex_normal(m.rank)
        c = geodesic_through(x, z, hbar=hbar)
        for t in r.uniform(0.0, c.period, size=4):
            if not contains(m, geodesic_eval(c, t), tol):
                return False
    return True


@dataclass(frozen=True)
class SuperpositionCoefficients:
    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        if abs(self.alpha) == 0 or abs(self.beta) == 0:
            raise QGeoError("superposition coefficients must be nonzero")

    @property
    def theta(self) -> float:
        """Relative phase ``arg(beta / alpha)``."""
        return float(np.angle(self.beta / self.alpha))


def superposition_point(x: Ray, y: Ray, c: SuperpositionCoefficients, hbar: float = 1.0) -> Ray:
    """Ray of ``alpha phi + beta psi`` for orthogonal ``phi``, ``psi``, built
    from the unit-speed geodesic leaving ``x`` along ``e^{i theta} psi``.
    """
    if not isinstance(c, SuperpositionCoefficients):
        c = SuperpositionCoefficients(*c)
    if not is_antipodal(x, y):
        raise QGeoError("superposition_point: rays must be antipodal (orthogonal)")
    xi = np.exp(1j * c.theta) * y.rep
    xi = xi - x.rep * np.vdot(x.rep, xi)
    xi = xi / np.linalg.norm(xi)
    g = Geodesic(x, TangentVector(x, xi), 1.0, hbar)
    t = np.sqrt(2.0 * hbar) * np.arctan(abs(c.beta / c.alpha))
    return geodesic_eval(g, t)


def on_geodesic_test(x: Ray, xi: Ray, chi: Ray, tol: float = 1e-10) -> bool:
    """Whether ``chi`` lies on the geodesic from ``x`` through its antipode ``xi``.

    Both representatives are used as given (the geodesic depends on the
    relative phase of ``xi``).
    """
    if not is_antipodal(x, xi):
        raise QGeoError("on_geodesic_test: x and xi must be antipodal")
    if not contains(span_submanifold([x, xi]), chi, tol):
        return False
    a = np.vdot(x.rep, chi.rep)
    b = np.vdot(xi.rep, chi.rep)
    if abs(a) <= tol:
        return True
    ratio = b / a
    return abs(ratio.imag) <= tol * max(abs(ratio), 1.0)


class FitResult(NamedTuple):
    a0: float
    a1: float
    a2: float
    residual: float


@lru_cache(maxsize=8)
def _fit_design(samples: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    th = np.arange(samples) * (np.pi / 2.0) / samples
    s, co = np.sin(th), np.cos(th)
    design = np.column_stack([np.ones_like(th), s * co, s * s])
    return s, co, design, np.linalg.pinv(design)


def geolinear_fit(
    f: Callable[[Ray], float], x: Ray, v, samples: int = 16, hbar: float = 1.0
) -> FitResult:
    """Least-squares fit of ``f`` along the geodesic from ``x`` along ``v``.

    Model: ``a0 + a1 sin(th) cos(th) + a2 sin(th)^2`` with
    ``th = t / sqrt(2 hbar)`` sampled uniformly over a half period.
    ``residual`` is the largest absolute deviation from the fit.
    """
    if samples < 5:
        raise QGeoError("geolinear_fit needs at least 5 samples")
    c = geodesic_through(x, v, 1.0, hbar)
    s, co, design, pinv = _fit_design(samples)
    lifts = _canonicalize_rows(np.outer(co, c.base.rep) + np.outer(s, c.direction.rep))
    vals = np.array([f(Ray(row, _canonical=True)) for row in lifts], dtype=float)
    coef = pinv @ vals
    resid = float(np.max(np.abs(design @ coef - vals)))
    return FitResult(float(coef[0]), float(coef[1]), float(coef[2]), resid)


def acceleration_residual(c: Geodesic, t: float, h: float = 1e-4) -> float:
    """Horizontal part of the central second difference of the curve.

    Neighbouring samples are phase-aligned to the centre sample, which gives
    the horizontal lift; for a geodesic the sphere acceleration is purely
    radial and the horizontal residual vanishes.
    """
    return curve_acceleration_residual(lambda s: geodesic_eval(c, s), t, h)


def curve_acceleration_residual(curve: Callable[[float], Ray], t: float, h: float = 1e-4) -> float:
    mid = curve(t).rep
    pts = []
    for s in (t - h, t + h):
        r = curve(s).rep
        ov = np.vdot(r, mid)
        pts.append(r * (ov / abs(ov)))
    acc = (pts[0] - 2.0 * mid + pts[1]) / (h * h)
    horiz = acc - mid * np.vdot(mid, acc)
    return float(np.linalg.norm(horiz))


def write_geodesic_csv(c: Geodesic, ts: Sequence[float], out: TextIO) -> None:
    """Columns: ``t``, interleaved ``re_k, im_k`` of the canonical representative, distance from base."""
    w = csv.writer(out, lineterminator="\n")
    n = c.base.dim
    header = ["t"]
    for k in range(n):
        header += [f"re_{k}", f"im_{k}"]
    w.writerow(header + ["distance"])
    for t in ts:
        r = geodesic_eval(c, t)
        row = [repr(float(t))]
        for z in r.rep:
            row += [repr(float(z.real)), repr(float(z.imag))]
        row.append(repr(fs_distance(c.base, r, c.hbar)))
        w.writerow(row)
