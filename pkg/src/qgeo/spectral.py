"""Spectral theory on projective space.

Spectral values are classified through the variance functional
``<(A - lambda)^2>``; eigenrays are the zeros of the Hamiltonian field of
``<A>``. Both are found numerically by a Riemannian minimizer of expectation
functions over projective space.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import RegularityDomainError
from .geodesics import GeodesicSubmanifold, exp_map
from .hermitian import Rng, as_matrix, eig_hermitian, max_abs, random_ray
from .observables import Observable, hamiltonian_field
from .projective import J, Ray, TangentVector

__all__ = [
    "SolverOptions",
    "SolverResult",
    "SpectralClass",
    "SpectralTag",
    "classify",
    "default_eps",
    "extremal_eigen",
    "is_regular_value",
    "iters_per_restart",
    "minimize_expectation",
    "quotient_apply",
    "regularity_domain_contains",
    "spectral_projector",
    "spectral_submanifold",
    "variance_minimize",
]


class SpectralTag(enum.Enum):
    REGULAR = "Regular"
    EIGENVALUE = "Eigenvalue"
    CONTINUOUS_SPECTRUM = "ContinuousSpectrum"


@dataclass(frozen=True)
class SpectralClass:
    tag: SpectralTag
    margin: float
    witness: Optional[Ray] = None


@dataclass(frozen=True)
class SolverOptions:
    """Settings for :func:`minimize_expectation`.

    ``direction`` is ``"cg"`` (Polak-Ribiere+ conjugate gradient with
    directions carried along the geodesic) or ``"sd"`` (steepest descent).
    Each iteration tries the closed-form minimizer along the search geodesic
    first, then backtracks by ``shrink`` until the Armijo condition with
    constant ``sufficient_decrease`` holds.
    """

    max_iters: int = 4000
    grad_tol: float = 1e-10
    shrink: float = 0.5
    sufficient_decrease: float = 1e-4
    restarts: int = 8
    seed: int = 0
    direction: str = "cg"
    exact_initial_step: bool = True
    max_backtracks: int = 60

    def __post_init__(self) -> None:
        if self.max_iters <= 0 or self.grad_tol <= 0 or self.restarts < 0:
            raise ValueError("solver options must be positive")
        if not 0 < self.shrink < 1 or not 0 < self.sufficient_decrease < 0.5:
            raise ValueError("backtracking constants out of range")
        if self.direction not in ("cg", "sd"):
            raise ValueError("direction must be 'cg' or 'sd'")


class SolverResult(NamedTuple):
    value: float
    argmin: Ray
    iters: int


def default_eps(a) -> float:
    """Classification tolerance ``1e-10 ||A||_max^2``."""
    return 1e-10 * max_abs(_matrix(a)) ** 2


def _matrix(a) -> np.ndarray:
    return a.matrix if isinstance(a, Observable) else as_matrix(a)


def _eig(a):
    return a.eig() if isinstance(a, Observable) else eig_hermitian(as_matrix(a))


def _geodesic_coefficients(b: np.ndarray, phi: np.ndarray, xi: np.ndarray, f: float) -> tuple[float, float]:
    """``<B>`` along ``phi cos th + xi sin th`` is ``f + a1 sin cos + a2 sin^2``."""
    bxi = b @ xi
    a1 = 2.0 * np.vdot(phi, bxi).real
    a2 = np.vdot(xi, bxi).real - f
    return float(a1), float(a2)


def _best_angle(a1: float, a2: float) -> float:
    """Minimizer in ``(0, pi/2]``-ish of ``a1 sin cos + a2 sin^2`` for ``a1 < 0``."""
    th = 0.5 * np.arctan2(-a1, a2)
    return th + np.pi if th < 0 else th


def minimize_expectation(
    b,
    x0: Ray,
    opts: SolverOptions = SolverOptions(),
    hbar: float = 1.0,
    callback: Optional[Callable[[int, Ray, float], None]] = None,
) -> SolverResult:
    """Minimize ``<B>`` over projective space from a single start.

    The metric gradient is ``J v_B``, the complex-structure rotation of the
    Hamiltonian field; iterates move along geodesics via :func:`exp_map`.
    Stops when ``||grad||_g <= grad_tol``, when no step decreases the value,
    or after ``max_iters`` iterations.
    """
    obs = b if isinstance(b, Observable) else Observable(b)
    bm = obs.matrix
    x = x0
    f = float(np.vdot(x.rep, bm @ x.rep).real)
    d_prev = g_prev = None
    it = 0
    while it < opts.max_iters:
        if callback is not None:
            callback(it, x, f)
        grad = J(hamiltonian_field(obs, x, hbar))
        if grad.norm(hbar) <= opts.grad_tol:
            break
        phi = x.rep
        g = grad.rep
        d = -g
        if opts.direction == "cg" and d_prev is not None:
            dp = d_prev - phi * np.vdot(phi, d_prev)
            gp = g_prev - phi * np.vdot(phi, g_prev)
            beta = max(0.0, np.vdot(g, g - gp).real / np.vdot(g_prev, g_prev).real)
            d = -g + beta * dp
            if np.vdot(d, g).real >= 0.0:
                d = -g
        d = d - phi * np.vdot(phi, d)
        dn = np.linalg.norm(d)
        xi = d / dn
        a1, a2 = _geodesic_coefficients(bm, phi, xi, f)
        if a1 >= 0.0:
            break
        th = _best_angle(a1, a2) if opts.exact_initial_step else 1.0
        # <B> along the search geodesic is exactly f + a1 sin cos + a2 sin^2, so
        # the decrease is evaluated without cancellation against f
        for _ in range(opts.max_backtracks):
            sn, cs = np.sin(th), np.cos(th)
            decrease = a1 * sn * cs + a2 * sn * sn
            if decrease <= opts.sufficient_decrease * th * a1:
                break
            th *= opts.shrink
        else:
            break
        if th * dn == 0.0:
            break
        y = exp_map(x, TangentVector(x, th * xi), hbar)
        fy = float(np.vdot(y.rep, bm @ y.rep).real)
        # velocity of the search geodesic at its endpoint, i.e. d carried along it
        d_prev = (xi * np.cos(th) - phi * np.sin(th)) * dn
        g_prev = g
        x, f = y, fy
        it += 1
    return SolverResult(f, x, it)


def _starts(x0: Optional[Ray], dim: int, opts: SolverOptions) -> list[Ray]:
    rng = Rng(opts.seed)
    starts = [] if x0 is None else [x0]
    starts += [Ray(random_ray(rng.split(k), dim)) for k in range(opts.restarts)]
    return starts


def _best(results: list[SolverResult]) -> tuple[int, SolverResult]:
    # lowest value, then lowest restart index
    k = min(range(len(results)), key=lambda i: (results[i].value, i))
    return k, results[k]


def variance_minimize(
    a, lam: float, x0: Optional[Ray] = None, opts: SolverOptions = SolverOptions(), hbar: float = 1.0
) -> SolverResult:
    """Minimize ``<(A - lam)^2>`` over rays, best of ``x0`` plus random restarts."""
    m = _matrix(a)
    shifted = m - lam * np.eye(m.shape[0])
    b = Observable(shifted @ shifted)
    results = [minimize_expectation(b, s, opts, hbar) for s in _starts(x0, m.shape[0], opts)]
    return _best(results)[1]


def extremal_eigen(
    a, x0: Optional[Ray] = None, opts: SolverOptions = SolverOptions(), sense: str = "min", hbar: float = 1.0
) -> tuple[float, Ray]:
    """Least (``sense="min"``) or greatest eigenvalue with an eigenray."""
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    m = _matrix(a)
    b = Observable(m if sense == "min" else -m)
    results = [minimize_expectation(b, s, opts, hbar) for s in _starts(x0, m.shape[0], opts)]
    _, best = _best(results)
    ray = best.argmin
    return float(np.vdot(ray.rep, m @ ray.rep).real), ray


def iters_per_restart(a, opts: SolverOptions, sense: str = "min", hbar: float = 1.0) -> list[int]:
    m = _matrix(a)
    b = Observable(m if sense == "min" else -m)
    return [minimize_expectation(b, s, opts, hbar).iters for s in _starts(None, m.shape[0], opts)]


def classify(a, lam: float, eps: Optional[float] = None) -> SpectralClass:
    """Regular value or eigenvalue, from ``inf <(A - lam)^2> = min (mu_i - lam)^2``.

    Continuous spectrum cannot occur in finite dimension.
    """
    m = _matrix(a)
    if eps is None:
        eps = default_eps(m)
    if not eps > 0:
        raise ValueError("eps must be positive")
    eig = _eig(a)
    gaps = (eig.eigenvalues - lam) ** 2
    k = int(np.argmin(gaps))
    margin = float(gaps[k])
    if margin <= eps:
        return SpectralClass(SpectralTag.EIGENVALUE, margin, Ray(eig.vector(k)))
    return SpectralClass(SpectralTag.REGULAR, margin)


def is_regular_value(a, lam: float) -> bool:
    """``A - lam`` has trivial kernel (equivalently a bounded inverse)."""
    m = _matrix(a)
    eig = _eig(a)
    return bool(np.min(np.abs(eig.eigenvalues - lam)) > 1e-10 * max_abs(m))


def regularity_domain_contains(a, x: Ray) -> bool:
    """``A phi != 0``; ``A`` need not be Hermitian."""
    m = as_matrix(a)
    return float(np.linalg.norm(m @ x.rep)) > 1e-12 * max_abs(m)


def quotient_apply(a, x: Ray) -> Ray:
    """Projectivized operator ``A^(x) = p(A phi)``."""
    m = as_matrix(a)
    if not regularity_domain_contains(m, x):
        raise RegularityDomainError("outside regularity domain")
    return Ray(m @ x.rep)


def spectral_projector(a, lo: float, hi: float) -> np.ndarray:
    if lo > hi:
        raise ValueError("interval endpoints out of order")
    eig = _eig(a)
    inside = (eig.eigenvalues >= lo) & (eig.eigenvalues <= hi)
    v = eig.eigenvectors[:, inside]
    q = v @ v.conj().T
    return 0.5 * (q + q.conj().T)


def spectral_submanifold(a, lo: float, hi: float) -> GeodesicSubmanifold:
    """Projective space of the range of the spectral projector on ``[lo, hi]``.

    An interval missing the spectrum gives the rank-0 (empty) submanifold.
    """
    return GeodesicSubmanifold.from_projector(spectral_projector(a, lo, hi))
