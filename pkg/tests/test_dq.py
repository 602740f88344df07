import math

import numpy as np
import pytest

from dqsim import dq, fock
from dqsim.errors import NoRootInBracket, ZeroProbability


def _cfg(n, m, alpha, R):
    return dq.CMConfig(n, m, complex(alpha), R)


def test_config_validation():
    with pytest.raises(ValueError):
        _cfg(-1, 0, 1.0, 0.5)
    with pytest.raises(ValueError):
        _cfg(0, 0, 1.0, 1.0)
    with pytest.raises(ValueError):
        _cfg(0, 0, 1.0, 0.0)


def test_classify_and_chi():
    assert dq.classify(2, 1).kind is dq.DQKind.PHOTON_ADDED
    assert dq.classify(2, 1).k == 1
    assert dq.classify(1, 3).kind is dq.DQKind.PHOTON_SUBTRACTED
    assert dq.classify(3, 3).kind is dq.DQKind.CATALYZED
    assert dq.classify(2, 1).label == "DQ+1"
    assert dq.chi(_cfg(0, 0, 2.0, 0.75)) == pytest.approx(1.0)


def test_single_photon_vacuum_detection_ratio():
    # coefficients proportional to (alpha sqrt(1-R), sqrt((1-R)/R))
    cfg = _cfg(1, 0, 1.3, 0.58)
    ratio = dq.coefficient(cfg, 0) / dq.coefficient(cfg, 1)
    assert ratio == pytest.approx(1.3 * math.sqrt(0.58), rel=1e-12)


def test_known_coefficient_roots():
    # zero of the vacuum coefficient of the (1,2) state at chi = 2
    R = 0.45
    alpha = math.sqrt(2.0 / (1 - R))
    assert abs(dq.coefficient(_cfg(1, 2, alpha, R), 0)) < 1e-10
    # zero of the middle coefficient of the (2,1) state at chi = 1
    alpha = math.sqrt(1.0 / (1 - R))
    assert abs(dq.coefficient(_cfg(2, 1, alpha, R), 1)) < 1e-10


def test_two_photon_herald_three_roots():
    # vacuum coefficient of the (2,3) state vanishes at chi = 3 +/- sqrt(3)
    R = 0.6
    for chi_root in (3 - math.sqrt(3), 3 + math.sqrt(3)):
        alpha = math.sqrt(chi_root / (1 - R))
        assert abs(dq.coefficient(_cfg(2, 3, alpha, R), 0)) < 1e-10


def test_hermite_and_laguerre_routes_agree():
    rng = np.random.default_rng(11)
    for _ in range(20):
        alpha = float(rng.uniform(0.2, 2.5))
        R = float(rng.uniform(0.05, 0.95))
        for n in range(6):
            for m in range(8):
                cfg = _cfg(n, m, alpha, R)
                for q in range(n + 1):
                    h = dq.coefficient(cfg, q)
                    l = dq.coefficient_laguerre(cfg, q)
                    scale = max(abs(h), abs(l), 1e-30)
                    assert abs(h - l) / scale < 1e-10


def test_build_dq_reference_cases():
    state, prob = dq.build_dq(_cfg(0, 0, 1.5, 0.5))
    assert state.coeffs.shape == (1,)
    assert abs(state.coeffs[0]) == pytest.approx(1.0)
    assert prob == pytest.approx(math.exp(-1.5**2 * 0.5), rel=1e-12)

    state, prob = dq.build_dq(_cfg(1, 1, 0.0, 0.37))
    assert abs(state.coeffs[0]) == pytest.approx(1.0)
    assert abs(state.coeffs[1]) == pytest.approx(0.0, abs=1e-15)
    assert prob == pytest.approx(0.37, rel=1e-12)

    with pytest.raises(ZeroProbability):
        dq.build_dq(_cfg(0, 2, 0.0, 0.5))


def test_oracle_equivalence_small_grid():
    # closed form against the two-mode evolution, moderate parameter grid
    t = fock.Truncation.auto(1.8, 4, 6)
    for n in range(5):
        for m in range(7):
            for alpha, R in [(0.7, 0.3), (1.8, 0.62)]:
                if n == 0 and m > 0 and alpha == 0:
                    continue
                cfg = _cfg(n, m, alpha, R)
                state, p_closed = dq.build_dq(cfg)
                oracle, p_brute = fock.brute_force_cm(n, m, complex(alpha), R, t)
                v = dq.to_fock(state, t)
                assert abs(abs(fock.overlap(v, oracle)) - 1.0) < 1e-8
                assert p_closed == pytest.approx(p_brute, abs=1e-8)


def test_herald_sum_matches_total_probability():
    cfg_alpha, R = 1.1, 0.52
    total = 0.0
    for m in range(25):
        total += dq.success_probability(_cfg(2, m, cfg_alpha, R))
    assert total == pytest.approx(1.0, abs=1e-8)


def test_superposition_levels_capped_by_input():
    # after undoing the displacement, the heralded state has no support
    # above the input photon number
    n, m, alpha, R = 3, 5, 1.4, 0.47
    t = fock.Truncation.auto(alpha, n, m)
    oracle, _ = fock.brute_force_cm(n, m, alpha, R, t)
    undo = fock.displacement_matrix(-alpha * math.sqrt(R), t)
    bare = undo @ oracle.amps
    assert float(np.sum(np.abs(bare[n + 1 :]) ** 2)) < 1e-8


def test_to_fock_matches_displaced_levels():
    cfg = _cfg(1, 2, math.sqrt(2.0 / 0.55), 0.45)  # chi = 2: pure displaced |1>
    state, _ = dq.build_dq(cfg)
    assert abs(state.coeffs[0]) < 1e-10
    t = fock.Truncation.auto(cfg.alpha, 1, 2)
    v = dq.to_fock(state, t)
    target = fock.FockVector(
        fock.displacement_matrix(state.displacement, t) @ fock.fock_state(1, t).amps
    )
    assert abs(fock.overlap(v, target)) == pytest.approx(1.0, abs=1e-8)


def test_locus_solve_equal_superposition():
    R = 0.64
    roots = dq.locus_solve(1, 0, 0, dq.LocusTarget.EQUAL_SUPERPOSITION, R)
    assert min(abs(r - 1 / math.sqrt(R)) for r in roots) < 1e-8


def test_locus_solve_equal_superposition_subtracted():
    # both branches of (1 / 2 sqrt(R)) [1 +/- sqrt((1+7R)/(1-R))] with alpha > 0
    R = 0.3
    roots = dq.locus_solve(1, 2, 0, dq.LocusTarget.EQUAL_SUPERPOSITION, R)
    plus = (1 + math.sqrt((1 + 7 * R) / (1 - R))) / (2 * math.sqrt(R))
    minus = abs(1 - math.sqrt((1 + 7 * R) / (1 - R))) / (2 * math.sqrt(R))
    for target in (plus, minus):
        assert min(abs(r - target) for r in roots) < 1e-8


def test_locus_solve_coefficient_zeros():
    R = 0.5
    roots = dq.locus_solve(2, 3, 0, dq.LocusTarget.COEFFICIENT_ZERO, R)
    expected = sorted(math.sqrt(c / (1 - R)) for c in (3 - math.sqrt(3), 3 + math.sqrt(3)))
    assert len(roots) >= 2
    for e in expected:
        assert min(abs(r - e) for r in roots) < 1e-8
    # displacement-stripped single photon: alpha sqrt(1-R) = sqrt(3 - sqrt(3))
    alpha = math.sqrt((3 - math.sqrt(3)) / (1 - R))
    state, _ = dq.build_dq(_cfg(2, 3, alpha, R))
    assert alpha * math.sqrt(1 - R) == pytest.approx(1.1260, abs=5e-5)
    assert abs(state.coeffs[1]) ** 2 > 0.5  # |1> dominates once |0> drops out


def test_locus_solve_no_root():
    with pytest.raises(NoRootInBracket):
        dq.locus_solve(1, 0, 1, dq.LocusTarget.COEFFICIENT_ZERO, 0.5, alpha_max=5.0)


def test_dqstate_normalization_contract():
    with pytest.raises(ValueError):
        dq.DQState(0j, np.array([0.8, 0.5]))
    st = dq.DQState.from_coeffs([0.8, 0.5], displacement=1j)
    assert np.vdot(st.coeffs, st.coeffs).real == pytest.approx(1.0, abs=1e-12)
