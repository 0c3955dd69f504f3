"""Dense complex linear algebra: inner products, a Jacobi Hermitian
eigensolver, seeded random generation and JSON forms.

Vectors are 1-D and matrices 2-D ``complex128`` numpy arrays. The inner
product is conjugate-linear in its first argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch, NotHermitianError, QGeoError

__all__ = [
    "EigenDecomposition",
    "Rng",
    "as_matrix",
    "as_vector",
    "eig_hermitian",
    "inner",
    "is_hermitian",
    "matrix_from_json",
    "matrix_to_json",
    "max_abs",
    "random_hermitian",
    "random_ray",
    "random_unitary",
    "vector_from_json",
    "vector_to_json",
]

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60
HERMITIAN_RTOL = 1e-10


def as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1:
        raise QGeoError(f"expected a vector, got shape {v.shape}")
    return v


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise QGeoError(f"expected a square matrix, got shape {m.shape}")
    return m


def max_abs(a) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def inner(x, y) -> complex:
    """Return ``(x|y) = sum conj(x_i) y_i``.

    Examples
    --------
    >>> inner([1j, 0], [1, 0])
    -1j
    """
    x = as_vector(x)
    y = as_vector(y)
    if x.shape != y.shape:
        raise DimensionMismatch(f"inner: dims {x.shape[0]} and {y.shape[0]}")
    return complex(np.vdot(x, y))


def is_hermitian(a, rtol: float = HERMITIAN_RTOL) -> bool:
    a = as_matrix(a)
    scale = max_abs(a)
    return max_abs(a - a.conj().T) <= rtol * scale


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues with eigenvectors stored as matrix columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Sweep schedule: n-1 (or n) rounds of disjoint index pairs covering
    every pair exactly once (circle method)."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p >= n or q >= n:
                continue
            ps.append(min(p, q))
            qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _jacobi_round(a: np.ndarray, v: np.ndarray, p: np.ndarray, q: np.ndarray, skip: float) -> None:
    b = a[p, q]
    absb = np.abs(b)
    live = absb > skip
    if not np.any(live):
        return
    p, q, b, absb = p[live], q[live], b[live], absb[live]
    app = a[p, p].real
    aqq = a[q, q].real
    phase = b / absb
    tau = (aqq - app) / (2.0 * absb)
    t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    cph = np.conj(phase)

    # A <- A U, with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q)
    ap, aq = a[:, p], a[:, q]
    a[:, p] = ap * c - aq * (s * cph)
    a[:, q] = ap * s + aq * (c * cph)
    # A <- U^dagger A
    ap, aq = a[p, :], a[q, :]
    a[p, :] = c[:, None] * ap - (s * phase)[:, None] * aq
    a[q, :] = s[:, None] * ap + (c * phase)[:, None] * aq
    a[p, q] = 0.0
    a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real

    vp, vq = v[:, p], v[:, q]
    v[:, p] = vp * c - vq * (s * cph)
    v[:, q] = vp * s + vq * (c * cph)


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def eig_hermitian(a, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Sweeps visit every off-diagonal pair once, in a fixed round-robin order
    whose rounds consist of disjoint pairs (applied together). Iteration stops
    once the off-diagonal Frobenius mass drops below ``tol * ||A||_F``.

    Parameters
    ----------
    a : array_like
        Square Hermitian matrix.
    tol : float
        Relative off-diagonal stopping threshold.
    max_sweeps : int
        Upper bound on full sweeps.

    Returns
    -------
    EigenDecomposition
        Eigenvalues ascending, orthonormal eigenvectors in columns.

    Raises
    ------
    NotHermitianError
        If ``max|A - A^dagger| > 1e-10 max|A|``.
    """
    a = as_matrix(a)
    if not is_hermitian(a):
        raise NotHermitianError("eig_hermitian: matrix is not Hermitian")
    n = a.shape[0]
    work = 0.5 * (a + a.conj().T)
    vecs = np.eye(n, dtype=np.complex128)
    scale = float(np.linalg.norm(work))
    rounds = _round_robin(n)
    # entries this small are below the stopping threshold by many orders
    skip = max(1e-22 * scale, np.finfo(float).tiny)
    for _ in range(max_sweeps):
        if _off_norm(work) <= tol * scale:
            break
        for p, q in rounds:
            _jacobi_round(work, vecs, p, q, skip)
    else:
        if _off_norm(work) > 100 * tol * scale:
            raise QGeoError("eig_hermitian: Jacobi sweeps did not converge")
    vals = np.diagonal(work).real.copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], np.ascontiguousarray(vecs[:, order]))


def hermitian_function(a, fn) -> np.ndarray:
    """Apply a scalar function through the spectral decomposition."""
    eig = eig_hermitian(a)
    v = eig.eigenvectors
    return (v * fn(eig.eigenvalues)) @ v.conj().T


@dataclass
class Rng:
    """Seeded, splittable random stream.

    ``Rng(seed).split(k)`` yields a stream that depends only on ``(seed, k)``
    so per-trial streams are independent of execution order.
    """

    seed: int
    key: tuple[int, ...] = ()
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2 ** 64:
            raise QGeoError("seed must be a 64-bit unsigned integer")
        ss = np.random.SeedSequence(int(self.seed), spawn_key=tuple(self.key))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def split(self, index: int) -> "Rng":
        return Rng(self.seed, (*self.key, int(index)))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def complex_normal(self, shape) -> np.ndarray:
        """Standard complex Gaussian: E|z|^2 = 1."""
        g = self._gen.standard_normal((2, *np.atleast_1d(shape)))
        return (g[0] + 1j * g[1]) / np.sqrt(2.0)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size)


def _check_dim(dim: int) -> None:
    if int(dim) < 2:
        raise QGeoError(f"dimension must be >= 2, got {dim}")


def random_ray(rng: Rng, dim: int) -> np.ndarray:
    """Haar-distributed unit vector (normalized complex Gaussian)."""
    _check_dim(dim)
    z = rng.complex_normal(dim)
    return z / np.linalg.norm(z)


def random_hermitian(rng: Rng, dim: int) -> np.ndarray:
    _check_dim(dim)
    g = rng.complex_normal((dim, dim))
    return 0.5 * (g + g.conj().T)


def random_unitary(rng: Rng, dim: int) -> np.ndarray:
    """``exp(iH)`` for a random Hermitian ``H``, via :func:`eig_hermitian`."""
    return hermitian_function(random_hermitian(rng, dim), lambda w: np.exp(1j * w))


def vector_to_json(x) -> dict:
    x = as_vector(x)
    return {"re": x.real.tolist(), "im": x.imag.tolist()}


def vector_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 1:
        raise QGeoError("vector JSON: 're' and 'im' must be equal-length lists")
    return re + 1j * im


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {"dim": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise QGeoError("matrix JSON: 're' and 'im' must be square and equal-shaped")
    if "dim" in obj and int(obj["dim"]) != re.shape[0]:
        raise QGeoError("matrix JSON: 'dim' disagrees with entries")
    return re + 1j * im
