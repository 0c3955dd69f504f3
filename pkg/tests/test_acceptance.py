"""Acceptance suite: ten seeded, property-based criteria.

Every test prints one ``[PASS]`` or ``[FAIL]`` line before asserting; the
lines are repeated in the pytest terminal summary.
"""

import json
import os
import re
import subprocess
import sys
import time

import numpy as np

from qgeo import (
    CutLocusError,
    DensityOperator,
    FlexibleObservable,
    Observable,
    Ray,
    Rng,
    SolverOptions,
    SuperpositionCoefficients,
    acceleration_residual,
    born,
    diameter,
    eig_hermitian,
    exp_map,
    expectation,
    extremal_eigen,
    flexible_flow,
    fs_distance,
    geodesic_eval,
    geodesic_through,
    geolinear_fit,
    hamiltonian_field,
    heisenberg_check,
    in_cut_locus,
    killing_flow,
    log_map,
    logic_join,
    logic_meet,
    logic_not,
    omega,
    poisson,
    random_hermitian,
    random_ray,
    random_unitary,
    span_submanifold,
    strong_hup_partner,
    superposition_point,
    transition_prob,
    variance_minimize,
)

RESULTS = []


def report(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    return ok


def _ray(r, n):
    return Ray(random_ray(r, n))


def _orthogonal(r, x):
    z = r.complex_normal(x.dim)
    return Ray(z - x.rep * np.vdot(x.rep, z))


def test_criterion_01_heisenberg():
    start = time.perf_counter()
    dims = (2, 4, 8, 16, 32, 64)
    per_dim = 100_000 // len(dims) + 1
    worst = np.inf
    trials = 0
    for i, n in enumerate(dims):
        r = Rng(101).split(i)
        for _ in range(per_dim):
            a, b = random_hermitian(r, n), random_hermitian(r, n)
            worst = min(worst, heisenberg_check(a, b, _ray(r, n)).slack)
            trials += 1
    elapsed = time.perf_counter() - start
    ok = trials >= 100_000 and worst >= -1e-12 and elapsed < 60
    report(1, "uncertainty relation", ok, f"{trials} trials, min slack {worst:.3e}, {elapsed:.1f} s")
    assert ok


def test_criterion_02_strong_hup():
    start = time.perf_counter()
    r = Rng(102)
    worst = 0.0
    for k in range(1000):
        n = (2, 3, 4, 8, 16)[k % 5]
        a = random_hermitian(r, n)
        x = _ray(r, n)
        kk = strong_hup_partner(a, x)
        va, vk = hamiltonian_field(a, x), hamiltonian_field(kk, x)
        worst = max(worst, abs(va.norm() * vk.norm() - abs(omega(va, vk))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10
    report(2, "strong uncertainty saturation", ok, f"max gap {worst:.3e}, {elapsed:.1f} s")
    assert ok


def test_criterion_03_geolinear_characterization():
    start = time.perf_counter()
    r = Rng(103)
    dims = list(range(2, 17))
    worst_linear = 0.0
    failed_pairs = 0
    pairs = 0
    for k in range(50):
        n = dims[k % len(dims)]
        a = Observable(random_hermitian(r, n))
        for _ in range(200):
            x = _ray(r, n)
            fit = geolinear_fit(lambda z: expectation(a, z), x, r.complex_normal(n))
            worst_linear = max(worst_linear, fit.residual)
        b = Observable(random_hermitian(r, n))
        if np.linalg.norm(a.matrix @ b.matrix - b.matrix @ a.matrix, 2) <= 0.1:
            continue
        pairs += 1
        best = 0.0
        for _ in range(200):
            x = _ray(r, n)
            fit = geolinear_fit(lambda z: expectation(a, z) * expectation(b, z), x, r.complex_normal(n))
            best = max(best, fit.residual)
            if best > 1e-4:
                break
        failed_pairs += best > 1e-4
    elapsed = time.perf_counter() - start
    ok = worst_linear <= 1e-10 and pairs > 0 and failed_pairs == pairs and elapsed < 60
    detail = f"max residual {worst_linear:.3e}, {failed_pairs}/{pairs} products rejected, {elapsed:.1f} s"
    report(3, "geolinear iff expectation", ok, detail)
    assert ok


def _distances(rays):
    return np.array([fs_distance(rays[i], rays[j]) for i in range(len(rays)) for j in range(i + 1, len(rays))])


def test_criterion_04_killing_isometry():
    start = time.perf_counter()
    r = Rng(104)
    dims = (2, 4, 8, 16, 32)
    worst = 0.0
    for k in range(20):
        n = dims[k % len(dims)]
        a = Observable(random_hermitian(r, n))
        rays = [_ray(r, n) for _ in range(50)]
        d0 = _distances(rays)
        for t in (0.1, 1.0, 10.0):
            dt = _distances([killing_flow(a, x, t) for x in rays])
            worst = max(worst, float(np.max(np.abs(dt - d0))))
    # the flow of <A><B> for a non-commuting pair is not an isometry
    f = FlexibleObservable(random_hermitian(r, 4), random_hermitian(r, 4))
    rays = [_ray(r, 4) for _ in range(10)]
    d0 = _distances(rays)
    moved = [flexible_flow(f, x, 1.0, 1e-3).final for x in rays]
    flexible_gap = float(np.max(np.abs(_distances(moved) - d0)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and flexible_gap > 1e-3 and elapsed < 120
    detail = f"unitary drift {worst:.3e}, flexible drift {flexible_gap:.3e}, {elapsed:.1f} s"
    report(4, "Killing flows are isometries", ok, detail)
    assert ok


def test_criterion_05_poisson():
    worst = 0.0
    probes = 0
    for i, hbar in enumerate((0.5, 1.0, 2.0)):
        r = Rng(105).split(i)
        for k in range(10_000):
            n = 2 + k % 15
            a, b = random_hermitian(r, n), random_hermitian(r, n)
            x = _ray(r, n)
            comm = a @ b - b @ a
            rhs = (np.vdot(x.rep, comm @ x.rep) * (-1j / hbar)).real
            worst = max(worst, abs(poisson(a, b, x, hbar) - rhs))
            probes += 1
    ok = worst <= 1e-12
    report(5, "Poisson bracket of expectations", ok, f"{probes} probes, max error {worst:.3e}")
    assert ok


def test_criterion_06_superposition():
    r = Rng(106)
    worst = 0.0
    worst_member = 0.0
    for k in range(10_000):
        n = 2 + k % 15
        hbar = (0.5, 1.0, 2.0)[k % 3]
        x = _ray(r, n)
        y = _orthogonal(r, x)
        alpha, beta = r.complex_normal(2)
        p = superposition_point(x, y, SuperpositionCoefficients(alpha, beta), hbar)
        q = Ray(alpha * x.rep + beta * y.rep)
        worst = max(worst, float(np.max(np.abs(p.rep - q.rep))))
        m = span_submanifold([x, y])
        c = geodesic_through(x, p.rep, 1.0, hbar)
        for t in np.linspace(0.0, c.period, 5):
            z = geodesic_eval(c, t)
            worst_member = max(worst_member, float(np.linalg.norm(m.projector @ z.rep - z.rep)))
    ok = worst <= 1e-12 and worst_member <= 1e-9
    report(6, "geometric superposition", ok, f"max rep error {worst:.3e}, max membership error {worst_member:.3e}")
    assert ok


def test_criterion_07_spectral_solver():
    start = time.perf_counter()
    worst = 0.0
    for i, n in enumerate((2, 4, 8, 16, 32, 64)):
        r = Rng(107).split(i)
        for k in range(100):
            a = Observable(random_hermitian(r, n))
            mu = eig_hermitian(a.matrix).eigenvalues
            opts = SolverOptions(restarts=2, seed=1000 * i + k)
            lo, _ = extremal_eigen(a, opts=opts, sense="min")
            hi, _ = extremal_eigen(a, opts=opts, sense="max")
            lam = float(r.uniform(mu[0] - 1.0, mu[-1] + 1.0))
            var = variance_minimize(a, lam, opts=opts).value
            worst = max(worst, abs(lo - mu[0]), abs(hi - mu[-1]), abs(var - np.min((mu - lam) ** 2)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 300
    report(7, "Riemannian solvers vs Jacobi", ok, f"max error {worst:.3e}, {elapsed:.1f} s")
    assert ok


def _projector(vectors):
    return vectors @ vectors.conj().T


def test_criterion_08_probability():
    r = Rng(108)
    trans = 0.0
    for k in range(10_000):
        n = 2 + k % 15
        hbar = (0.5, 1.0, 2.0)[k % 3]
        x, y = _ray(r, n), _ray(r, n)
        trans = max(trans, abs(transition_prob(x, y) - np.cos(fs_distance(x, y, hbar) / np.sqrt(2 * hbar)) ** 2))

    additivity = covariance = 0.0
    for k in range(500):
        n = 2 + k % 11
        a = Observable(random_hermitian(r, n))
        mu = a.eig().eigenvalues
        w = r.uniform(0.0, 1.0, size=3)
        rho = DensityOperator.mixture(w / w.sum(), [_ray(r, n) for _ in range(3)])
        cuts = 0.5 * (mu[1:] + mu[:-1])
        edges = [mu[0] - 1.0, *cuts.tolist(), mu[-1] + 1.0]
        parts = [(edges[j], edges[j + 1]) for j in range(len(edges) - 1)]
        probs = [born(a, rho, iv) for iv in parts]
        additivity = max(additivity, abs(sum(probs) - 1.0))
        u = random_unitary(r, n)
        a2 = Observable(u @ a.matrix @ u.conj().T)
        rho2 = DensityOperator(u @ rho.matrix @ u.conj().T)
        iv = (float(r.uniform(mu[0] - 1.0, mu[-1])), float(mu[-1]) + 1.0)
        covariance = max(covariance, abs(born(a2, rho2, iv) - born(a, rho, iv)))

    ortho = 0.0
    for k in range(1000):
        n = 2 + k % 11
        q, _ = np.linalg.qr(r.complex_normal((n, n)))
        kq = int(r.integers(1, n + 1))
        kp = int(r.integers(0, kq + 1))
        vq = q[:, :kq]
        c, _ = np.linalg.qr(r.complex_normal((kq, kq)))
        pm, qm = _projector(vq @ c[:, :kp]), _projector(vq)
        ortho = max(ortho, float(np.max(np.abs(logic_join(pm, logic_meet(qm, logic_not(pm))) - qm))))

    ok = trans <= 1e-12 and additivity <= 1e-10 and covariance <= 1e-10 and ortho <= 1e-10
    detail = f"transition {trans:.3e}, additivity {additivity:.3e}, covariance {covariance:.3e}, orthomodularity {ortho:.3e}"
    report(8, "probability and quantum logic", ok, detail)
    assert ok


def test_criterion_09_geodesic_geometry():
    start = time.perf_counter()
    r = Rng(109)
    speed = roundtrip = ode = 0.0
    cut_ok = True
    over_radius = False
    for n in range(2, 33):
        for k in range(10):
            hbar = (0.5, 1.0, 2.0)[k % 3]
            x = _ray(r, n)
            c = geodesic_through(x, r.complex_normal(n), 1.0, hbar)
            for t in np.linspace(0.0, diameter(hbar), 9):
                speed = max(speed, abs(fs_distance(x, geodesic_eval(c, t), hbar) - t))
            ode = max(ode, acceleration_residual(c, float(r.uniform(0.0, c.period)), 1e-4))
            y = _ray(r, n)
            v = log_map(x, y, hbar)
            roundtrip = max(roundtrip, float(np.max(np.abs(exp_map(x, v, hbar).rep - y.rep))))
            over_radius |= v.norm(hbar) >= diameter(hbar)
            z = _orthogonal(r, x)
            cut_ok &= in_cut_locus(x, z)
            try:
                log_map(x, z, hbar)
                cut_ok = False
            except CutLocusError as exc:
                cut_ok &= str(exc) == "cut locus: minimal geodesic not unique"
    elapsed = time.perf_counter() - start
    ok = speed <= 1e-10 and roundtrip <= 1e-10 and ode <= 1e-6 and cut_ok and not over_radius and elapsed < 60
    detail = f"speed {speed:.3e}, exp/log {roundtrip:.3e}, ODE {ode:.3e}, cut locus {'ok' if cut_ok else 'bad'}, {elapsed:.1f} s"
    report(9, "geodesic geometry", ok, detail)
    assert ok


def _verify_all():
    cmd = [sys.executable, "-m", "qgeo.cli", "verify", "all", "--dim", "4", "--trials", "1000", "--seed", "7"]
    proc = subprocess.run(cmd, capture_output=True, text=True, env={**os.environ, "QGEO_THREADS": "1"})
    passed = json.loads(proc.stdout)["pass"]
    return proc.returncode, passed, re.sub(r'"wall_time_ms": \d+', '"wall_time_ms": 0', proc.stdout).encode()


def test_criterion_10_determinism():
    code1, passed, first = _verify_all()
    code2, _, second = _verify_all()
    ok = first == second and passed and code1 == code2 == 0
    report(10, "deterministic verify all", ok, f"{len(first)} bytes, identical={first == second}, exit {code1}")
    assert ok
