import numpy as np
import pytest

from mepcs.errors import InvalidInputError, NumericError, ShapeError
from mepcs.sensing import (
    SensingSystem,
    generate_matrix,
    max_singular_value,
    measure,
    read_matrix,
    residual_norm_sq,
    spectral_event_bound,
    write_matrix,
)


def test_generate_deterministic_and_seed_sensitive():
    assert np.array_equal(generate_matrix(5, 7, 3), generate_matrix(5, 7, 3))
    assert not np.array_equal(generate_matrix(5, 7, 3), generate_matrix(5, 7, 4))


def test_generate_rows_are_nested():
    big = generate_matrix(10, 6, 12)
    assert np.array_equal(generate_matrix(4, 6, 12), big[:4])


def test_generate_moments():
    A = generate_matrix(200, 200, 0)
    assert abs(A.mean()) < 0.02
    assert abs(A.var() - 1) < 0.05


def test_generate_validation():
    with pytest.raises(InvalidInputError):
        generate_matrix(0, 3, 1)
    with pytest.raises(InvalidInputError):
        SensingSystem(np.eye(2), lam=0.0)


def test_measure():
    A = generate_matrix(4, 6, 1)
    assert np.array_equal(measure(A, np.zeros(6)), np.zeros(4))
    x = np.arange(6.0)
    assert np.array_equal(measure(np.eye(6), x), x)
    assert np.linalg.norm(measure(A, 2 * x) - 2 * measure(A, x)) == 0
    with pytest.raises(ShapeError):
        measure(A, np.zeros(5))


def residual_oracle(A, u, y):
    total = 0.0
    for i in range(A.shape[0]):
        s = 0.0
        for j in range(A.shape[1]):
            s += A[i, j] * u[j]
        total += (s - y[i]) ** 2
    return total


def test_residual_norm_sq():
    rng = np.random.default_rng(4)
    A = generate_matrix(5, 8, 2)
    u = rng.normal(size=8)
    assert residual_norm_sq(A, u, A @ u) == 0.0
    e = np.zeros(8)
    e[3] = 1
    assert residual_norm_sq(A, e, np.zeros(5)) == pytest.approx(np.sum(A[:, 3] ** 2))
    y = rng.normal(size=5)
    assert abs(residual_norm_sq(A, u, y) - residual_oracle(A, u, y)) < 1e-10
    with pytest.raises(ShapeError):
        residual_norm_sq(A, u, np.zeros(4))


def test_max_singular_value_small():
    assert max_singular_value(np.eye(4)) == pytest.approx(1.0, rel=1e-12)
    assert max_singular_value(np.diag([3.0, 1.0])) == pytest.approx(3.0, rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_max_singular_value_matches_svd(seed):
    A = generate_matrix(30, 60, seed)
    assert max_singular_value(A) == pytest.approx(np.linalg.svd(A, compute_uv=False)[0], rel=1e-8)


def test_power_iteration_cap():
    A = np.diag([1.0, 0.999999, 0.5])
    with pytest.raises(NumericError):
        max_singular_value(A, tol=1e-15, max_iter=3)


def test_operator_norm_inequality():
    rng = np.random.default_rng(8)
    A = generate_matrix(20, 40, 9)
    s = max_singular_value(A)
    for _ in range(100):
        u = rng.normal(size=40)
        assert np.linalg.norm(A @ u) <= s * np.linalg.norm(u) * (1 + 1e-8)


def test_matrix_dump_round_trip(tmp_path):
    A = generate_matrix(3, 4, 5)
    write_matrix(tmp_path / "A.csv", A)
    assert np.array_equal(read_matrix(tmp_path / "A.csv"), A)


def test_spectral_bound_value():
    assert spectral_event_bound(50, 100) == pytest.approx(10 + 2 * np.sqrt(50))
