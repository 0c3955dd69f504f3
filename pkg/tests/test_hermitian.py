import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgeo import (
    DimensionMismatch,
    NotHermitianError,
    QGeoError,
    Rng,
    eig_hermitian,
    inner,
    matrix_from_json,
    matrix_to_json,
    random_hermitian,
    random_ray,
    random_unitary,
    vector_from_json,
    vector_to_json,
)

from conftest import SX


def test_inner_examples():
    assert inner([1, 0], [1, 0]) == 1
    assert inner([1, 0], [0, 1]) == 0
    assert inner([1j, 0], [1, 0]) == -1j


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        inner([1, 0], [1, 0, 0])


@given(st.integers(0, 2**32 - 1), st.integers(2, 12))
def test_inner_conjugate_symmetry(seed, n):
    r = Rng(seed)
    x, y = r.complex_normal(n), r.complex_normal(n)
    assert inner(x, y) == pytest.approx(np.conj(inner(y, x)), abs=1e-14)
    assert inner(x, x).imag == 0 and inner(x, x).real >= 0


def test_eig_diagonal_examples():
    e = eig_hermitian(np.diag([1.0, -1.0]))
    assert e.eigenvalues.tolist() == [-1.0, 1.0]
    assert np.allclose(np.abs(e.vector(0)), [0, 1]) and np.allclose(np.abs(e.vector(1)), [1, 0])

    e = eig_hermitian(SX)
    assert np.allclose(e.eigenvalues, [-1, 1], atol=1e-15)

    e = eig_hermitian(np.zeros((3, 3)))
    assert e.eigenvalues.tolist() == [0.0, 0.0, 0.0]
    assert np.allclose(e.eigenvectors.conj().T @ e.eigenvectors, np.eye(3))


def test_eig_real_diagonal_sorted_exactly():
    d = np.array([3.5, -2.0, 0.25, 7.0, -2.0])
    assert eig_hermitian(np.diag(d)).eigenvalues.tolist() == sorted(d.tolist())


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


@pytest.mark.parametrize("n", [2, 3, 5, 8, 16, 33, 64])
def test_eig_reconstruction_and_orthonormality(n):
    r = Rng(n)
    for k in range(10 if n < 32 else 3):
        a = random_hermitian(r.split(k), n)
        e = eig_hermitian(a)
        scale = np.max(np.abs(a))
        assert np.max(np.abs(e.reconstruct() - a)) <= 1e-10 * scale
        v = e.eigenvectors
        assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-12
        assert np.all(np.diff(e.eigenvalues) >= 0)
        # independent oracle
        assert np.allclose(e.eigenvalues, np.linalg.eigvalsh(a), atol=1e-11 * scale * n)


def test_eig_deterministic_on_degenerate_input():
    r = Rng(5)
    u = random_unitary(r, 6)
    a = u @ np.diag([1.0, 1.0, 1.0, 2.0, 2.0, 3.0]) @ u.conj().T
    a = 0.5 * (a + a.conj().T)
    e1, e2 = eig_hermitian(a), eig_hermitian(a.copy())
    assert np.array_equal(e1.eigenvalues, e2.eigenvalues)
    assert np.array_equal(e1.eigenvectors, e2.eigenvectors)
    assert np.max(np.abs(e1.reconstruct() - a)) <= 1e-12


def test_random_generators():
    assert np.array_equal(random_ray(Rng(42), 4), random_ray(Rng(42), 4))
    assert not np.array_equal(random_ray(Rng(42), 4), random_ray(Rng(43), 4))
    for k in range(20):
        assert abs(np.linalg.norm(random_ray(Rng(k), 2 + k)) - 1) <= 1e-14
        h = random_hermitian(Rng(k), 2 + k)
        assert np.max(np.abs(h - h.conj().T)) == 0.0
    with pytest.raises(QGeoError):
        random_ray(Rng(0), 1)
    with pytest.raises(QGeoError):
        random_hermitian(Rng(0), 1)


def test_rng_split_is_order_independent():
    root = Rng(9)
    a = root.split(3).complex_normal(4)
    root.split(1).complex_normal(4)
    assert np.array_equal(a, Rng(9).split(3).complex_normal(4))
    assert not np.array_equal(a, root.split(2).complex_normal(4))


def test_random_unitary_is_unitary():
    u = random_unitary(Rng(1), 8)
    assert np.max(np.abs(u.conj().T @ u - np.eye(8))) <= 1e-12


def test_json_round_trip():
    r = Rng(3)
    a = random_hermitian(r, 3)
    obj = json.loads(json.dumps(matrix_to_json(a)))
    assert obj["dim"] == 3
    assert np.array_equal(matrix_from_json(obj), a)
    x = r.complex_normal(4)
    assert np.array_equal(vector_from_json(json.loads(json.dumps(vector_to_json(x)))), x)
    with pytest.raises(QGeoError):
        matrix_from_json({"dim": 3, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]})
