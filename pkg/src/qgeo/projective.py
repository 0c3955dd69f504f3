"""Complex projective space with its Fubini-Study Kahler structure.

A ray is stored as a unit vector whose first non-negligible entry is real and
positive. Tangent vectors at a ray are stored through the affine chart
``b_phi(psi) = psi / (phi|psi) - phi``, i.e. as vectors orthogonal to the
base representative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChartDomainError, DimensionMismatch, QGeoError
from .hermitian import as_vector, inner, vector_from_json, vector_to_json

__all__ = [
    "Config",
    "Ray",
    "TangentVector",
    "J",
    "chart_to",
    "diameter",
    "equator_of",
    "equator_point",
    "fs_angle",
    "fs_distance",
    "is_antipodal",
    "metric_g",
    "omega",
    "overlap",
    "ray_from",
    "ray_from_json",
    "ray_to_json",
    "symmetry_at",
    "tangent",
    "tangent_from_json",
    "tangent_to_json",
]

PHASE_TOL = 1e-12
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class Config:
    hbar: float = 1.0
    tol: float = 1e-10

    def __post_init__(self) -> None:
        if not self.hbar > 0:
            raise QGeoError("hbar must be positive")


def _frozen(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=np.complex128)
    x.flags.writeable = False
    return x


class Ray:
    """Point of projective space, represented by a canonical unit vector."""

    __slots__ = ("rep",)

    def __init__(self, rep: np.ndarray, *, _canonical: bool = False):
        if not _canonical:
            rep = _canonicalize(as_vector(rep))
        object.__setattr__(self, "rep", _frozen(rep))

    def __setattr__(self, name, value):
        raise AttributeError("Ray is immutable")

    @property
    def dim(self) -> int:
        return self.rep.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.rep, self.rep.conj())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ray):
            return NotImplemented
        return self.rep.shape == other.rep.shape and bool(np.array_equal(self.rep, other.rep))

    def __hash__(self) -> int:
        return hash(self.rep.tobytes())

    def __repr__(self) -> str:
        return f"Ray({np.array2string(self.rep, precision=6)})"


def _canonicalize(v: np.ndarray) -> np.ndarray:
    norm = float(np.sqrt(np.vdot(v, v).real))
    if not norm > ZERO_TOL:
        raise QGeoError("cannot form a ray from a (near-)zero vector")
    k = int((np.abs(v) > PHASE_TOL * norm).argmax())
    pivot = v[k]
    if abs(norm - 1.0) <= 4e-16 and pivot.imag == 0.0 and pivot.real > 0.0:
        # already canonical; keep the bits so Ray(x.rep) == x
        return v.copy()
    u = v * (abs(pivot) / (pivot * norm))
    u[k] = abs(pivot) / norm
    return u


def _canonicalize_rows(vs: np.ndarray) -> np.ndarray:
    """Row-wise :func:`_canonicalize` for a stack of nonzero vectors."""
    norms = np.sqrt(np.einsum("ij,ij->i", vs.conj(), vs).real)
    if not np.all(norms > ZERO_TOL):
        raise QGeoError("cannot form a ray from a (near-)zero vector")
    rows = np.arange(vs.shape[0])
    k = (np.abs(vs) > PHASE_TOL * norms[:, None]).argmax(axis=1)
    pivot = vs[rows, k]
    u = vs * (np.abs(pivot) / (pivot * norms))[:, None]
    u[rows, k] = np.abs(pivot) / norms
    return u


def ray_from(v) -> Ray:
    """Project a nonzero vector onto its ray."""
    return Ray(v)


@dataclass(frozen=True)
class TangentVector:
    base: Ray
    rep: np.ndarray

    def __post_init__(self) -> None:
        rep = as_vector(self.rep)
        if rep.shape != self.base.rep.shape:
            raise DimensionMismatch("tangent rep and base ray differ in dimension")
        object.__setattr__(self, "rep", _frozen(rep))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        _same_base(self, other)
        return TangentVector(self.base, self.rep + other.rep)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        _same_base(self, other)
        return TangentVector(self.base, self.rep - other.rep)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(self.base, self.rep * c)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, -self.rep)

    def norm(self, hbar: float = 1.0) -> float:
        """Length in the Fubini-Study metric."""
        return float(np.sqrt(2.0 * hbar) * np.linalg.norm(self.rep))


def tangent(base: Ray, v) -> TangentVector:
    """Tangent vector at ``base`` from an ambient vector (projected onto base-perp)."""
    v = as_vector(v)
    phi = base.rep
    return TangentVector(base, v - phi * np.vdot(phi, v))


def _same_base(v: TangentVector, w: TangentVector) -> None:
    if v.base.rep.shape != w.base.rep.shape or not np.allclose(v.base.rep, w.base.rep, atol=1e-12, rtol=0):
        raise QGeoError("tangent vectors live at different base rays")


def _same_dim(x: Ray, y: Ray) -> None:
    if x.dim != y.dim:
        raise DimensionMismatch(f"rays of dimension {x.dim} and {y.dim}")


def chart_to(base: Ray, y: Ray, *, tol: float = ZERO_TOL) -> TangentVector:
    """Image of ``y`` in the affine chart centred at ``base``."""
    _same_dim(base, y)
    phi, psi = base.rep, y.rep
    c = np.vdot(phi, psi)
    if abs(c) <= tol:
        raise ChartDomainError("outside chart domain: ray is antipodal to the chart center")
    rep = psi / c - phi
    # remove the rounding residue along phi
    rep = rep - phi * np.vdot(phi, rep)
    return TangentVector(base, rep)


def equator_point(base: Ray, y: Ray) -> Ray:
    """The ray ``p(phi + b_phi(psi))`` where the chart image has unit length."""
    v = chart_to(base, y)
    n = np.linalg.norm(v.rep)
    if n == 0.0:
        raise QGeoError("equator_point: y coincides with base")
    return Ray(base.rep + v.rep / n)


def metric_g(v: TangentVector, w: TangentVector, hbar: float = 1.0) -> float:
    _same_base(v, w)
    return float(2.0 * hbar * np.vdot(v.rep, w.rep).real)


def omega(v: TangentVector, w: TangentVector, hbar: float = 1.0) -> float:
    _same_base(v, w)
    return float(2.0 * hbar * np.vdot(v.rep, w.rep).imag)


def J(v: TangentVector) -> TangentVector:
    return TangentVector(v.base, 1j * v.rep)


def overlap(x: Ray, y: Ray) -> float:
    """``|(x|y)|`` clamped to [0, 1]."""
    _same_dim(x, y)
    return float(min(abs(np.vdot(x.rep, y.rep)), 1.0))


def fs_angle(x: Ray, y: Ray) -> float:
    """``arccos |(x|y)|`` evaluated as ``atan2(sin, cos)``.

    The sine is the norm of the component of ``y`` orthogonal to ``x``; this
    keeps full relative accuracy for nearby rays where arccos loses half the
    digits.
    """
    _same_dim(x, y)
    phi, psi = x.rep, y.rep
    c = np.vdot(phi, psi)
    s = np.linalg.norm(psi - phi * c)
    return float(np.arctan2(s, abs(c)))


def fs_distance(x: Ray, y: Ray, hbar: float = 1.0) -> float:
    return float(np.sqrt(2.0 * hbar) * fs_angle(x, y))


def diameter(hbar: "float | Config" = 1.0) -> float:
    """Supremum of :func:`fs_distance`, attained on orthogonal rays."""
    if isinstance(hbar, Config):
        hbar = hbar.hbar
    return float(np.sqrt(2.0 * hbar) * np.pi / 2.0)


def is_antipodal(x: Ray, y: Ray, tol: float = 1e-10) -> bool:
    _same_dim(x, y)
    return abs(inner(x.rep, y.rep)) <= tol


def equator_of(x: Ray, y: Ray, tol: float = 1e-10, hbar: float = 1.0) -> bool:
    return abs(fs_distance(x, y, hbar) - diameter(hbar) / 2.0) <= tol


def symmetry_at(x: Ray, y: Ray) -> Ray:
    """Geodesic symmetry ``1 - 2 P_x`` at ``x`` applied to ``y``."""
    _same_dim(x, y)
    phi = x.rep
    return Ray(y.rep - 2.0 * phi * np.vdot(phi, y.rep))


def ray_to_json(x: Ray) -> dict:
    return vector_to_json(x.rep)


def ray_from_json(obj: dict) -> Ray:
    return Ray(vector_from_json(obj))


def tangent_to_json(v: TangentVector) -> dict:
    return {**vector_to_json(v.rep), "base": ray_to_json(v.base)}


def tangent_from_json(obj: dict) -> TangentVector:
    return tangent(ray_from_json(obj["base"]), vector_from_json(obj))
