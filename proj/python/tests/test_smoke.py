import numpy as np
import pytest

import dqls


def test_store_round_trip():
    a = np.array([[1.0, -2.0], [0.0, 3.0]])
    store = dqls.MatrixStore.from_dense(a)
    assert np.allclose(store.to_dense(), a)
    assert store.frobenius_norm == pytest.approx(np.linalg.norm(a))
    assert np.allclose(store.row_state(0), a[0] / np.linalg.norm(a[0]))


def test_isometries_factor_matrix():
    a = np.array([[0.3, 0.7, -0.1], [0.7, -0.2, 0.4], [-0.1, 0.4, 0.9]])
    m, n = dqls.isometries(dqls.MatrixStore.from_dense(a))
    assert np.allclose(m.T @ n, a / np.linalg.norm(a), atol=1e-12)


def test_solve_signed_fixture():
    report = dqls.solve(np.diag([0.5, -0.5]), [1.0, 1.0], epsilon=0.05, seed=1)
    expected = np.array([1.0, -1.0]) / np.sqrt(2.0)
    assert np.linalg.norm(report["output_state"] - expected) <= 0.05
    assert [s["flag"] for s in report["signs"]] == [0, 1]
    assert report["walk_applications"] == 2 * (2 ** report["parameters"]["t_bits"] - 1)


def test_solve_matches_numpy():
    a = dqls.generate_matrix("random-symmetric", 5, 4.0, seed=3)
    b = np.arange(1.0, 6.0)
    report = dqls.solve(a, b, seed=3)
    x = np.linalg.solve(a, b)
    assert abs(np.vdot(x / np.linalg.norm(x), report["output_state"])) ** 2 > 0.99


def test_identity_post_selection():
    report = dqls.solve(np.eye(2), [1.0, 0.0])
    assert report["post_selection_probability"] == pytest.approx(0.25)
    assert report["distance"] == pytest.approx(0.0, abs=1e-12)


def test_errors_map_to_exceptions():
    with pytest.raises(dqls.ValidationError):
        dqls.solve(np.array([[1.0, 2.0], [0.0, 1.0]]), [1.0, 1.0])
    with pytest.raises(dqls.DegenerateError):
        dqls.solve(np.diag([1.0, 0.0]), [1.0, 1.0])
    with pytest.raises(dqls.ResourceError):
        dqls.solve(dqls.generate_matrix("random-symmetric", 8, 8.0), epsilon=1e-4)


def test_qsve_sampled_shots():
    out = dqls.qsve(np.diag([1.0, 0.5]), t_bits=7, shots=200, seed=5)
    assert len(out["shots"]) == 200
    sigmas = {0: 1.0, 1: 0.5}
    tol = 2 * np.pi / 2 ** 7 * out["frobenius_norm"]
    assert all(abs(s["sigma_bar"] - sigmas[s["component"]]) <= tol for s in out["shots"])
