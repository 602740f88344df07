import math

import numpy as np
import pytest

from dqsim import dq, fock, squeezing
from dqsim.errors import IndexOutOfRange


def _dense_moment(state, l, s, dim=45):
    """Oracle: expectation on the expanded vector with explicit matrices."""
    t = fock.Truncation(dim)
    v = dq.to_fock(state, t).amps
    a = fock.annihilation_matrix(t)
    op = np.linalg.matrix_power(a.conj().T, l) @ np.linalg.matrix_power(a, s)
    return complex(np.vdot(v, op @ v))


def _random_states(count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        size = int(rng.integers(1, 6))
        c = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        beta = complex(rng.normal(scale=0.8), rng.normal(scale=0.8))
        out.append(dq.DQState.from_coeffs(c, displacement=beta))
    return out


def test_moment_displaced_vacuum_mean():
    st = dq.DQState.from_coeffs([1.0], displacement=0.4 - 0.9j)
    assert squeezing.moment(st, 0, 1) == pytest.approx(0.4 - 0.9j, abs=1e-14)


def test_moment_fock_one_number():
    st = dq.DQState.from_coeffs([0.0, 1.0], displacement=0.0)
    assert squeezing.moment(st, 1, 1) == pytest.approx(1.0, abs=1e-14)


def test_moment_against_dense_oracle():
    for st in _random_states(10, seed=5):
        for l, s in [(0, 1), (1, 0), (0, 2), (1, 1), (2, 1), (2, 2), (0, 4)]:
            got = squeezing.moment(st, l, s)
            want = _dense_moment(st, l, s)
            assert got == pytest.approx(want, abs=1e-9)


def test_moment_order_cap():
    st = dq.DQState.from_coeffs([1.0])
    with pytest.raises(IndexOutOfRange):
        squeezing.moment(st, 3, 2)


def test_quadratures_reference_states():
    coh = dq.DQState.from_coeffs([1.0], displacement=1.1 + 0.3j)
    rep = squeezing.quadratures(coh)
    assert rep.var_x == pytest.approx(0.5, abs=1e-12)
    assert rep.var_p == pytest.approx(0.5, abs=1e-12)
    assert rep.mean_x == pytest.approx(math.sqrt(2) * 1.1, abs=1e-12)

    one = dq.DQState.from_coeffs([0.0, 1.0], displacement=-0.7j)
    rep = squeezing.quadratures(one)
    assert rep.var_x == pytest.approx(1.5, abs=1e-12)
    assert rep.var_p == pytest.approx(1.5, abs=1e-12)


def test_quadratures_optimal_qubit():
    st = dq.DQState.from_coeffs([math.sqrt(3) / 2, 0.5], displacement=0.9)
    rep = squeezing.quadratures(st)
    assert rep.var_x == pytest.approx(0.3750, abs=5e-4)
    assert rep.min_var == rep.var_x


def test_displacement_invariance_of_variances():
    rng = np.random.default_rng(31)
    for st in _random_states(8, seed=13):
        extra = complex(rng.normal(), rng.normal())
        shifted = dq.DQState(st.displacement + extra, st.coeffs.copy(), st.config)
        a = squeezing.quadratures(st)
        b = squeezing.quadratures(shifted)
        assert abs(a.var_x - b.var_x) < 1e-10
        assert abs(a.var_p - b.var_p) < 1e-10


def test_uncertainty_product():
    for st in _random_states(12, seed=23):
        rep = squeezing.quadratures(st)
        assert rep.var_x * rep.var_p >= 0.25 - 1e-9


def test_variance_map_matches_quadratures():
    n, m, a2, R = 2, 1, 5.45, 0.8175
    state, _ = dq.build_dq(dq.CMConfig(n, m, complex(math.sqrt(a2)), R))
    rep = squeezing.quadratures(state)
    grid_val = float(squeezing.variance_x_map(n, m, a2, R))
    assert grid_val == pytest.approx(rep.var_x, abs=1e-12)


def test_optimizer_reproduces_qutrit_cell():
    rec = squeezing.optimize_cm_squeezing(2, 1)
    assert rec.min_var == pytest.approx(0.2753, abs=5e-4)
    assert rec.alpha_sq == pytest.approx(5.45, abs=0.06)
    assert rec.R == pytest.approx(0.8175, abs=0.0025)
    assert not rec.boundary_hit


def test_optimizer_not_above_coarse_grid():
    rec = squeezing.optimize_cm_squeezing(1, 1)
    a_vals = np.arange(0.05, 30.0, 0.5)
    r_vals = np.arange(0.05, 0.99, 0.02)
    V = squeezing.variance_x_map(1, 1, a_vals[:, None], r_vals[None, :])
    assert rec.min_var <= np.nanmin(V) + 1e-9


def test_fock_superposition_known_optima():
    v1, c1 = squeezing.optimize_fock_superposition(1, starts=20)
    assert v1 == pytest.approx(0.3750, abs=1e-4)
    assert abs(c1[0]) ** 2 == pytest.approx(0.75, abs=1e-3)

    v2, c2 = squeezing.optimize_fock_superposition(2, starts=20)
    assert v2 == pytest.approx(0.2753, abs=1e-4)
    assert abs(c2[0]) == pytest.approx(0.9530, abs=2e-3)
    assert abs(c2[1]) < 1e-4
    assert abs(c2[2]) == pytest.approx(0.3030, abs=2e-3)
    assert c2[0] * c2[2] < 0


def test_fock_superposition_lower_bounds_heralded():
    # the unconstrained optimum can never be worse than the heralded one
    for n in (1, 2, 3):
        fv, _ = squeezing.optimize_fock_superposition(n, starts=15)
        rec = squeezing.optimize_cm_squeezing(n, 1)
        assert fv <= rec.min_var + 1e-6


def test_single_photon_locus_formulas_m123():
    # printed loci for m = 1..3 pin the variance at exactly 3/8
    for m in (1, 2, 3):
        for R in (0.15, 0.4, 0.65, 0.9):
            for a2 in squeezing.n1_optimal_alpha_sq(m, R):
                if a2 <= 0:
                    continue
                v = float(squeezing.variance_x_map(1, m, a2, R))
                assert v == pytest.approx(0.375, abs=1e-9)


def test_single_photon_locus_formula_values():
    # plain arithmetic check of the evaluator, including the m = 4 slope
    R = 0.5
    plus, minus = squeezing.n1_optimal_alpha_sq(4, R)
    d = math.sqrt((3 + 11 * R) / (1 - R))
    assert plus == pytest.approx((math.sqrt(3) + d) ** 2 / (4 * R), rel=1e-12)
    assert minus == pytest.approx((math.sqrt(3) - d) ** 2 / (4 * R), rel=1e-12)
    a, b = squeezing.n1_optimal_alpha_sq(0, 0.25)
    assert a == b == pytest.approx(12.0)


def test_vacuum_detection_locus_variances():
    for n, expected in [(1, 0.3750), (2, 0.3223), (3, 0.2913), (4, 0.2700)]:
        vals = [squeezing.m0_locus_variance(n, R) for R in (0.2, 0.5, 0.8)]
        assert max(vals) - min(vals) < 1e-10  # depends only on |alpha|^2 R
        assert vals[0] == pytest.approx(expected, abs=5e-4)
