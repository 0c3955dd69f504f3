"""Seeded invariant suites behind ``qgeo verify``.

Each suite draws one independent random instance per trial from
``Rng(seed).split(suite_index).split(trial)`` and returns a nonnegative
violation for it. A suite mixing checks of different tolerances rescales every
error to the suite tolerance, so ``pass`` is always ``max_violation <= tol``.
Trials may run on several threads (``QGEO_THREADS``); the per-trial streams and
the order-free max reduction make the report independent of scheduling.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CutLocusError, QGeoError
from .geodesics import (
    SuperpositionCoefficients,
    acceleration_residual,
    exp_map,
    geodesic_eval,
    geodesic_through,
    geolinear_fit,
    log_map,
    span_submanifold,
    superposition_point,
)
from .hermitian import Rng, eig_hermitian, random_hermitian, random_ray, random_unitary
from .observables import (
    Observable,
    expectation,
    dispersion,
    hamiltonian_field,
    heisenberg_check,
    killing_flow,
    poisson,
    strong_hup_partner,
)
from .probability import (
    DensityOperator,
    born,
    geometric_born,
    logic_join,
    logic_meet,
    logic_not,
    transition_prob,
)
from .projective import J, Ray, chart_to, diameter, fs_distance, metric_g, omega, tangent
from .spectral import SolverOptions, SpectralTag, classify, extremal_eigen, variance_minimize

__all__ = ["SUITES", "SuiteReport", "run_suite", "run_all", "thread_count"]

Check = Callable[[Rng, int, float], float]


@dataclass
class SuiteReport:
    suite: str
    dim: int
    trials: int
    seed: int
    hbar: float
    max_violation: float
    tolerance: float
    passed: bool
    wall_time_ms: int = 0
    reports: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        if not self.suite == "all":
            d.pop("reports")
        else:
            d["reports"] = [r.to_dict() for r in self.reports]
        return d


def _ray(r: Rng, n: int) -> Ray:
    return Ray(random_ray(r, n))


def _obs(r: Rng, n: int) -> np.ndarray:
    return random_hermitian(r, n)


def _orthogonal_pair(r: Rng, n: int) -> tuple[Ray, Ray]:
    x = _ray(r, n)
    z = r.complex_normal(n)
    return x, Ray(z - x.rep * np.vdot(x.rep, z))


def _random_projector(r: Rng, n: int, rank: int) -> np.ndarray:
    q, _ = np.linalg.qr(r.complex_normal((n, n)))
    v = q[:, :rank]
    return v @ v.conj().T


# -- suites ---------------------------------------------------------------


def _metric(r: Rng, n: int, hbar: float) -> float:
    x = _ray(r, n)
    v = tangent(x, r.complex_normal(n))
    w = tangent(x, r.complex_normal(n))
    errs = [
        abs(omega(v, w, hbar) - metric_g(J(v), w, hbar)),
        abs(omega(v, J(v), hbar) - metric_g(v, v, hbar)),
        abs(metric_g(v, w, hbar) - metric_g(w, v, hbar)),
        abs(omega(v, w, hbar) + omega(w, v, hbar)),
        abs(metric_g(J(v), J(w), hbar) - metric_g(v, w, hbar)),
    ]
    y, z = _ray(r, n), _ray(r, n)
    u = random_unitary(r, n)
    dxy, dyz, dxz = fs_distance(x, y, hbar), fs_distance(y, z, hbar), fs_distance(x, z, hbar)
    errs += [
        abs(dxy - fs_distance(y, x, hbar)),
        max(0.0, dxz - dxy - dyz),
        max(0.0, dxy - diameter(hbar)),
        abs(fs_distance(Ray(u @ x.rep), Ray(u @ y.rep), hbar) - dxy),
    ]
    return max(errs)


def _geodesic(r: Rng, n: int, hbar: float) -> float:
    x = _ray(r, n)
    c = geodesic_through(x, r.complex_normal(n), 1.0, hbar)
    errs = []
    for t in r.uniform(0.0, diameter(hbar), size=4):
        errs.append(abs(fs_distance(x, geodesic_eval(c, t), hbar) - t))
    errs.append(acceleration_residual(c, float(r.uniform(0.0, c.period))) * 1e-4)
    y = _ray(r, n)
    v = log_map(x, y, hbar)
    errs.append(fs_distance(exp_map(x, v, hbar), y, hbar))
    errs.append(abs(v.norm(hbar) - fs_distance(x, y, hbar)))
    errs.append(max(0.0, v.norm(hbar) - diameter(hbar)))
    # antipodal targets must be rejected
    z = r.complex_normal(n)
    try:
        log_map(x, Ray(z - x.rep * np.vdot(x.rep, z)), hbar)
        errs.append(1.0)
    except CutLocusError:
        pass
    return max(errs)


def _superposition(r: Rng, n: int, hbar: float) -> float:
    x, y = _orthogonal_pair(r, n)
    a, b = r.complex_normal(2)
    p = superposition_point(x, y, SuperpositionCoefficients(a, b), hbar)
    q = Ray(a * x.rep + b * y.rep)
    errs = [fs_distance(p, q, hbar)]
    m = span_submanifold([x, y])
    c = geodesic_through(x, p.rep, 1.0, hbar)
    for t in r.uniform(0.0, c.period, size=4):
        z = geodesic_eval(c, t)
        errs.append(np.linalg.norm(m.projector @ z.rep - z.rep) * 1e-3)
    return max(errs)


def _geolinear(r: Rng, n: int, hbar: float) -> float:
    a = Observable(_obs(r, n))
    x = _ray(r, n)
    fit = geolinear_fit(lambda z: expectation(a, z), x, r.complex_normal(n), hbar=hbar)
    errs = [fit.residual]
    # a product of non-commuting expectations is not geolinear
    b = Observable(_obs(r, n))
    worst = max(
        geolinear_fit(lambda z: expectation(a, z) * expectation(b, z), x, r.complex_normal(n), hbar=hbar).residual
        for _ in range(5)
    )
    if worst <= 1e-4:
        errs.append(1.0)
    return max(errs)


def _killing(r: Rng, n: int, hbar: float) -> float:
    a = Observable(_obs(r, n))
    x, y = _ray(r, n), _ray(r, n)
    t = float(r.uniform(-10.0, 10.0))
    d0 = fs_distance(x, y, hbar)
    errs = [abs(fs_distance(killing_flow(a, x, t, hbar), killing_flow(a, y, t, hbar), hbar) - d0)]
    # the flow is generated by the Hamiltonian field
    h = 1e-5
    fwd = chart_to(x, killing_flow(a, x, h, hbar)).rep
    bwd = chart_to(x, killing_flow(a, x, -h, hbar)).rep
    fd = (fwd - bwd) / (2 * h)
    scale = 1.0 + np.linalg.norm(a.matrix, 2) ** 3 / hbar ** 3
    errs.append(np.linalg.norm(fd - hamiltonian_field(a, x, hbar).rep) / scale * 1e-2)
    return max(errs)


def _heisenberg(r: Rng, n: int, hbar: float) -> float:
    a, b = _obs(r, n), _obs(r, n)
    x = _ray(r, n)
    hc = heisenberg_check(a, b, x)
    geo = abs(np.sqrt(hbar / 2.0) * hamiltonian_field(a, x, hbar).norm(hbar) - dispersion(a, x))
    return max(0.0, -hc.slack, geo * 1e-2)


def _strong_hup(r: Rng, n: int, hbar: float) -> float:
    a = _obs(r, n)
    x = _ray(r, n)
    k = strong_hup_partner(a, x)
    va, vk = hamiltonian_field(a, x, hbar), hamiltonian_field(k, x, hbar)
    return abs(va.norm(hbar) * vk.norm(hbar) - abs(omega(va, vk, hbar)))


def _poisson(r: Rng, n: int, hbar: float) -> float:
    a, b = _obs(r, n), _obs(r, n)
    x = _ray(r, n)
    comm = a @ b - b @ a
    rhs = (np.vdot(x.rep, comm @ x.rep) * (-1j / hbar)).real
    return abs(poisson(a, b, x, hbar) - rhs)


def _spectral(r: Rng, n: int, hbar: float) -> float:
    a = _obs(r, n)
    mu = eig_hermitian(a).eigenvalues
    opts = SolverOptions(restarts=2, seed=int(r.integers(0, 2 ** 31)))
    lo, _ = extremal_eigen(a, opts=opts, sense="min", hbar=hbar)
    hi, _ = extremal_eigen(a, opts=opts, sense="max", hbar=hbar)
    lam = float(r.uniform(mu[0] - 1.0, mu[-1] + 1.0))
    var = variance_minimize(a, lam, opts=opts, hbar=hbar).value
    errs = [abs(lo - mu[0]), abs(hi - mu[-1]), abs(var - np.min((mu - lam) ** 2))]
    k = int(r.integers(0, n))
    if classify(a, float(mu[k])).tag is not SpectralTag.EIGENVALUE:
        errs.append(1.0)
    return max(errs) * 1e-2


def _born(r: Rng, n: int, hbar: float) -> float:
    x, y = _ray(r, n), _ray(r, n)
    errs = [abs(transition_prob(x, y) - np.cos(fs_distance(x, y, hbar) / np.sqrt(2 * hbar)) ** 2)]
    a = Observable(_obs(r, n))
    mu = a.eig().eigenvalues
    weights = r.uniform(0.0, 1.0, size=3)
    w = DensityOperator.mixture(weights / weights.sum(), [_ray(r, n) for _ in range(3)])
    # partition the spectrum at random midpoints between eigenvalues
    mids = 0.5 * (mu[1:] + mu[:-1])
    cuts = np.sort(r.generator.choice(mids, size=min(2, len(mids)), replace=False))
    edges = [mu[0] - 1.0, *cuts.tolist(), mu[-1] + 1.0]
    parts = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    total = sum(born(a, w, iv) for iv in parts)
    errs.append(abs(total - 1.0) * 1e-2)
    u = random_unitary(r, n)
    a2 = Observable(u @ a.matrix @ u.conj().T)
    w2 = DensityOperator(u @ w.matrix @ u.conj().T)
    errs += [abs(born(a2, w2, iv) - born(a, w, iv)) * 1e-2 for iv in parts]
    rank = int(r.integers(1, n + 1))
    q = _random_projector(r, n, rank)
    errs.append(abs(geometric_born(x, q, hbar) - float(np.vdot(x.rep, q @ x.rep).real)))
    return max(errs)


def _logic(r: Rng, n: int, hbar: float) -> float:
    # orthomodularity on a constructed pair P <= Q
    kq = int(r.integers(1, n + 1))
    q, _ = np.linalg.qr(r.complex_normal((n, n)))
    vq = q[:, :kq]
    kp = int(r.integers(0, kq + 1))
    if kp:
        c, _ = np.linalg.qr(r.complex_normal((kq, kp)))
        vp = vq @ c
    else:
        vp = np.zeros((n, 0))
    pm = vp @ vp.conj().T
    qm = vq @ vq.conj().T
    rhs = logic_join(pm, logic_meet(qm, logic_not(pm)))
    errs = [np.max(np.abs(rhs - qm))]
    # De Morgan and absorption on a pair sharing a random subspace
    p2 = _random_projector(r, n, int(r.integers(1, n + 1)))
    q2 = _random_projector(r, n, int(r.integers(1, n + 1)))
    errs.append(np.max(np.abs(logic_not(logic_meet(p2, q2)) - logic_join(logic_not(p2), logic_not(q2)))))
    errs.append(np.max(np.abs(logic_meet(p2, logic_join(p2, q2)) - p2)))
    return max(errs)


SUITES: dict[str, tuple[int, Check, float]] = {
    "metric": (0, _metric, 1e-10),
    "geodesic": (1, _geodesic, 1e-10),
    "superposition": (2, _superposition, 1e-12),
    "geolinear": (3, _geolinear, 1e-10),
    "killing": (4, _killing, 1e-10),
    "heisenberg": (5, _heisenberg, 1e-12),
    "strong-hup": (6, _strong_hup, 1e-10),
    "poisson": (7, _poisson, 1e-12),
    "spectral": (8, _spectral, 1e-10),
    "born": (9, _born, 1e-12),
    "logic": (10, _logic, 1e-10),
}


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QGEO_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(
    name: str, dim: int, trials: int, seed: int, hbar: float = 1.0, tol: Optional[float] = None, threads: Optional[int] = None
) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    if dim < 2:
        raise QGeoError("dim must be at least 2")
    if trials < 1:
        raise QGeoError("trials must be positive")
    if not hbar > 0:
        raise QGeoError("hbar must be positive")
    index, check, default_tol = SUITES[name]
    tol = default_tol if tol is None else tol
    root = Rng(seed).split(index)
    start = time.perf_counter()
    threads = thread_count() if threads is None else threads
    job = lambda k: float(check(root.split(k), dim, hbar))  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            violations = list(pool.map(job, range(trials)))
    else:
        violations = [job(k) for k in range(trials)]
    worst = max(violations)
    ms = int(round(1000 * (time.perf_counter() - start)))
    return SuiteReport(name, dim, trials, seed, hbar, worst, tol, bool(worst <= tol), ms)


def run_all(dim: int, trials: int, seed: int, hbar: float = 1.0, tol: Optional[float] = None) -> SuiteReport:
    start = time.perf_counter()
    reports = [run_suite(name, dim, trials, seed, hbar, tol) for name in SUITES]
    ms = int(round(1000 * (time.perf_counter() - start)))
    worst = max(r.max_violation / r.tolerance for r in reports)
    return SuiteReport(
        "all", dim, trials, seed, hbar, worst, 1.0, all(r.passed for r in reports), ms, reports
    )
