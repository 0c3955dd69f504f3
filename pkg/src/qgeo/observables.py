"""Expectation functions, their Hamiltonian (Killing) fields, uncertainty
relations and product ("flexible") observables with their nonlinear flows.

Field convention: the Hamiltonian field of ``<A>`` at ``phi`` has chart
representative ``-(i/hbar) (1 - P_phi) A phi``. With this sign its flow is the
projectivized Schrodinger group ``exp(-i t A / hbar)`` and
``d<A>(w) = omega(v_A, w)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple, TextIO

import numpy as np

from .errors import DimensionMismatch, NotHermitianError, QGeoError, ZeroDispersionError
from .hermitian import EigenDecomposition, as_matrix, eig_hermitian, is_hermitian
from .projective import Ray, TangentVector, omega

__all__ = [
    "FlexibleObservable",
    "FlowResult",
    "HeisenbergCheck",
    "Observable",
    "dispersion",
    "expectation",
    "flexible_dispersion",
    "flexible_expectation",
    "flexible_field",
    "flexible_flow",
    "hamiltonian_field",
    "heisenberg_check",
    "killing_field_through",
    "killing_flow",
    "poisson",
    "strong_hup_partner",
    "write_flow_csv",
]


class Observable:
    """Bounded self-adjoint operator, i.e. a Hermitian matrix."""

    __slots__ = ("matrix", "_eig")

    def __init__(self, matrix):
        m = as_matrix(matrix)
        if not is_hermitian(m):
            raise NotHermitianError("observable matrix must be Hermitian")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "_eig", None)

    def eig(self) -> EigenDecomposition:
        """Spectral decomposition, computed once."""
        if self._eig is None:
            object.__setattr__(self, "_eig", eig_hermitian(self.matrix))
        return self._eig

    def __setattr__(self, name, value):
        raise AttributeError("Observable is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"Observable(dim={self.dim})"


def _obs(a) -> Observable:
    return a if isinstance(a, Observable) else Observable(a)


def _check(a: Observable, x: Ray) -> None:
    if a.dim != x.dim:
        raise DimensionMismatch(f"observable of dim {a.dim} applied to ray of dim {x.dim}")


def expectation(a, x: Ray) -> float:
    a = _obs(a)
    _check(a, x)
    return float(np.vdot(x.rep, a.matrix @ x.rep).real)


def _eta(a: Observable, x: Ray) -> np.ndarray:
    """``(1 - P_phi) A phi``."""
    phi = x.rep
    aphi = a.matrix @ phi
    return aphi - phi * np.vdot(phi, aphi)


def hamiltonian_field(a, x: Ray, hbar: float = 1.0) -> TangentVector:
    a = _obs(a)
    _check(a, x)
    return TangentVector(x, (-1j / hbar) * _eta(a, x))


def poisson(a, b, x: Ray, hbar: float = 1.0) -> float:
    """``{<A>, <B>}(x) = omega(v_A, v_B)``."""
    return omega(hamiltonian_field(a, x, hbar), hamiltonian_field(b, x, hbar), hbar)


def dispersion(a, x: Ray) -> float:
    """``||A phi - <A> phi||``, the standard deviation of ``A`` in ``x``."""
    a = _obs(a)
    _check(a, x)
    return float(np.linalg.norm(_eta(a, x)))


class HeisenbergCheck(NamedTuple):
    lhs: float
    rhs: float
    slack: float


def heisenberg_check(a, b, x: Ray) -> HeisenbergCheck:
    """``Delta A Delta B`` against ``|(phi|[A,B] phi)| / 2``."""
    a, b = _obs(a), _obs(b)
    _check(a, x)
    _check(b, x)
    lhs = dispersion(a, x) * dispersion(b, x)
    comm = a.matrix @ b.matrix - b.matrix @ a.matrix
    rhs = 0.5 * abs(np.vdot(x.rep, comm @ x.rep))
    return HeisenbergCheck(lhs, rhs, lhs - rhs)


def _partner_matrix(phi: np.ndarray, eta: np.ndarray) -> np.ndarray:
    """Hermitian ``i(|eta><phi| - |phi><eta|)``; maps ``phi`` to ``i eta`` when ``eta`` is orthogonal to ``phi``."""
    m = 1j * (np.outer(eta, phi.conj()) - np.outer(phi, eta.conj()))
    return 0.5 * (m + m.conj().T)


def strong_hup_partner(a, x: Ray, tol: float = 1e-12) -> Observable:
    """Observable whose field at ``x`` is ``J v_A(x)``.

    The pair then saturates ``|omega(v_A, v_B)| <= ||v_A||_g ||v_B||_g``.
    """
    a = _obs(a)
    _check(a, x)
    eta = _eta(a, x)
    if np.linalg.norm(eta) <= tol:
        raise ZeroDispersionError("zero dispersion: no partner needed")
    return Observable(_partner_matrix(x.rep, eta))


def killing_field_through(v: TangentVector, hbar: float = 1.0) -> Observable:
    """An observable whose Hamiltonian field takes the value ``v`` at ``v.base``."""
    phi = v.base.rep
    eta = hbar * (v.rep - phi * np.vdot(phi, v.rep))
    # v_B = -(i/hbar) i eta = eta / hbar
    return Observable(_partner_matrix(phi, eta))


def killing_flow(a, x: Ray, t: float, hbar: float = 1.0) -> Ray:
    """``p(exp(-i t A / hbar) phi)`` through the spectral decomposition."""
    a = _obs(a)
    _check(a, x)
    eig = a.eig()
    v = eig.eigenvectors
    coeff = v.conj().T @ x.rep
    return Ray(v @ (np.exp(-1j * t * eig.eigenvalues / hbar) * coeff))


@dataclass(frozen=True)
class FlexibleObservable:
    """Product observable ``F = <A><B>``."""

    a: Observable
    b: Observable

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _obs(self.a))
        object.__setattr__(self, "b", _obs(self.b))
        if self.a.dim != self.b.dim:
            raise DimensionMismatch("flexible observable factors differ in dimension")

    @property
    def dim(self) -> int:
        return self.a.dim


def flexible_expectation(f: FlexibleObservable, x: Ray) -> float:
    return expectation(f.a, x) * expectation(f.b, x)


def _flexible_eta(f: FlexibleObservable, x: Ray) -> np.ndarray:
    _check(f.a, x)
    return expectation(f.a, x) * _eta(f.b, x) + expectation(f.b, x) * _eta(f.a, x)


def flexible_field(f: FlexibleObservable, x: Ray, hbar: float = 1.0) -> TangentVector:
    """``v_F = <A> v_B + <B> v_A``."""
    return TangentVector(x, (-1j / hbar) * _flexible_eta(f, x))


def flexible_dispersion(f: FlexibleObservable, x: Ray, hbar: float = 1.0) -> float:
    """``sqrt(hbar / 2) ||v_F||_g``; reduces to :func:`dispersion` for ``B = 1``."""
    return float(np.sqrt(hbar / 2.0) * flexible_field(f, x, hbar).norm(hbar))


@dataclass(frozen=True)
class FlowResult:
    times: np.ndarray
    states: tuple[Ray, ...]
    conserved_drift: float

    @property
    def trajectory(self) -> list[tuple[float, Ray]]:
        return list(zip(self.times.tolist(), self.states))

    @property
    def final(self) -> Ray:
        return self.states[-1]


def _flexible_velocity(f: FlexibleObservable, psi: np.ndarray, hbar: float) -> np.ndarray:
    """Horizontal lift of ``v_F`` at the unit vector ``psi``."""
    a, b = f.a.matrix, f.b.matrix
    ap, bp = a @ psi, b @ psi
    ea = np.vdot(psi, ap).real
    eb = np.vdot(psi, bp).real
    eta = ea * (bp - eb * psi) + eb * (ap - ea * psi)
    return (-1j / hbar) * eta


def flexible_flow(
    f: FlexibleObservable, x0: Ray, t_end: float, step: float, hbar: float = 1.0, record_every: int = 1
) -> FlowResult:
    """Integrate the Hamiltonian flow of ``<A><B>`` with classical RK4.

    The state is carried as a unit vector and renormalized after every step.
    ``conserved_drift`` is ``max |F(x_t) - F(x_0)|`` over recorded states.
    """
    if not step > 0:
        raise QGeoError("flexible_flow: step must be positive")
    if t_end < 0:
        raise QGeoError("flexible_flow: t_end must be nonnegative")
    _check(f.a, x0)
    n_steps = int(np.ceil(t_end / step - 1e-9)) if t_end > 0 else 0
    h = t_end / n_steps if n_steps else 0.0
    psi = x0.rep.copy()
    times = [0.0]
    states = [x0]
    f0 = flexible_expectation(f, x0)
    drift = 0.0
    for k in range(1, n_steps + 1):
        k1 = _flexible_velocity(f, psi, hbar)
        k2 = _flexible_velocity(f, psi + 0.5 * h * k1, hbar)
        k3 = _flexible_velocity(f, psi + 0.5 * h * k2, hbar)
        k4 = _flexible_velocity(f, psi + h * k3, hbar)
        psi = psi + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        psi = psi / np.linalg.norm(psi)
        if k % record_every == 0 or k == n_steps:
            r = Ray(psi)
            times.append(k * h)
            states.append(r)
            drift = max(drift, abs(flexible_expectation(f, r) - f0))
    return FlowResult(np.array(times), tuple(states), float(drift))


def write_flow_csv(f: FlexibleObservable, result: FlowResult, out: TextIO, hbar: float = 1.0) -> None:
    """Columns: ``t``, ``re_k, im_k`` per component, ``<A>``, ``<B>``, ``<F>``, flexible dispersion."""
    w = csv.writer(out, lineterminator="\n")
    n = f.dim
    header = ["t"]
    for k in range(n):
        header += [f"re_{k}", f"im_{k}"]
    w.writerow(header + ["exp_a", "exp_b", "exp_f", "dispersion_f"])
    for t, r in zip(result.times, result.states):
        ea, eb = expectation(f.a, r), expectation(f.b, r)
        row = [repr(float(t))]
        for z in r.rep:
            row += [repr(float(z.real)), repr(float(z.imag))]
        row += [repr(ea), repr(eb), repr(ea * eb), repr(flexible_dispersion(f, r, hbar))]
        w.writerow(row)
