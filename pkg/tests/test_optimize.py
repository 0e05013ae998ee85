import numpy as np
import pytest
from hypothesis import given, strategies as st

from corrwork import fermions as fm
from corrwork.optimize import SearchBox, maximize


def test_search_box_validation():
    with pytest.raises(ValueError):
        SearchBox(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        SearchBox(np.zeros(2), np.ones(3))
    b = SearchBox([0.0], [1.0], 3)
    assert np.allclose(b.grid().ravel(), [0, 0.5, 1])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_negative_square_norm_peaks_at_origin(n):
    box = SearchBox(-np.ones(n), np.ones(n), 4)  # origin is not a grid point
    res = maximize(lambda x: -float(np.sum(x**2)), box=box)
    assert res.feasible
    assert np.allclose(res.point, 0, atol=1e-5)
    assert res.objective == pytest.approx(0, abs=1e-10)


def test_linear_program_vertex():
    # max x + 2y  s.t.  x + y <= 1 on [0,1]^2 -> vertex (0, 1)
    res = maximize(lambda x: x[0] + 2 * x[1], lambda x: x[0] + x[1], 1.0,
                   SearchBox(np.zeros(2), np.ones(2), 5))
    assert np.allclose(res.point, [0, 1], atol=1e-5)
    # max x + y s.t. 2x + y <= 1.2 -> vertex (0.1, 1) beats (0.6, 0)
    res = maximize(lambda x: x[0] + x[1], lambda x: 2 * x[0] + x[1], 1.2,
                   SearchBox(np.zeros(2), np.ones(2), 5))
    assert np.allclose(res.point, [0.1, 1], atol=1e-5)
    assert res.constraint <= 1.2 + 1e-12


def test_infeasible_reports_violation():
    res = maximize(lambda x: x[0], lambda x: x[0], -1.0, SearchBox([0.0], [1.0], 5))
    assert not res.feasible
    assert res.constraint == pytest.approx(0.0)


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(0.1, 2.0))
def test_refinement_not_worse_than_grid(cx, cy, width):
    def f(x):
        return -((x[0] - cx) ** 2) / width - (x[1] - cy) ** 2 + 0.3 * np.sin(5 * x[0])

    res = maximize(f, lambda x: x[0] + x[1], 0.5, SearchBox(-np.ones(2), np.ones(2), 5))
    assert res.feasible
    assert res.objective >= res.grid_best
    assert res.point[0] + res.point[1] <= 0.5 + 1e-12


def test_vectorized_matches_scalar():
    def f(x):
        return -np.sum((x - 0.3) ** 2, axis=-1)

    box = SearchBox(-np.ones(2), np.ones(2), 5)
    a = maximize(lambda x: float(f(x)), box=box)
    b = maximize(f, box=box, vectorized=True)
    assert np.array_equal(a.point, b.point) and a.objective == b.objective


def test_deterministic():
    def f(x):
        return np.cos(3 * x[0]) * np.sin(2 * x[1]) - 0.1 * x[2] ** 2

    box = SearchBox(-np.ones(3), np.ones(3), 5)
    a = maximize(f, lambda x: x @ x, 0.8, box)
    b = maximize(f, lambda x: x @ x, 0.8, box)
    assert np.array_equal(a.point, b.point) and a.objective == b.objective
    assert a.evaluations == b.evaluations


def test_monotone_in_budget():
    def f(x):
        return x[0] + 0.5 * x[1]

    box = SearchBox(np.zeros(2), np.ones(2), 5)
    vals = [maximize(f, lambda x: x @ x, b, box).objective for b in np.linspace(0.05, 2, 15)]
    assert np.all(np.diff(vals) >= -1e-9)


def test_fermion_noninteracting_bound_example():
    m = fm.FermionModel(1.0, 0.0, 0.0, 0.2)
    r = fm.maximize_correlations(m, 0.1)
    assert 0.2 * r.delta_I <= 0.1
    assert r.delta_I > 0
