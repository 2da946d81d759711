import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import expm

from adaptive_pi.discretization import (Boundary, FluctuationScheme, Grid1D, RelaxationProfile, SplitOperator,
                                        ViscosityScheme, assemble_semi_discrete, split_blocks)
from adaptive_pi.integrators import (AFE, APFE, APPFE, FE, PFE, LinearSplitSystem, NonlinearSplitSystem,
                                     amplification_factor, fe_step, pfe_step, step, transition_afe,
                                     transition_apfe, transition_by_probing, transition_fe, transition_pfe)
from adaptive_pi.models import EquilibriumState, hme_linearized, hme_model, hsm_model

from conftest import random_split


def rel_err(a, b):
    return np.abs(a - b).max() / np.abs(b).max()


@given(seed=st.integers(0, 10**6), k=st.integers(1, 3))
def test_afe_closed_form_equals_stepping(seed, k):
    split = random_split(seed)
    dt = 0.05
    t = transition_afe(split, dt / (k + 1), dt).matrix
    assert rel_err(t, transition_by_probing(split, AFE(dt / (k + 1), dt)).matrix) <= 1e-12


@given(seed=st.integers(0, 10**6), k=st.integers(1, 3), ratio=st.floats(1.0, 5.0))
def test_apfe_closed_form_equals_stepping(seed, k, ratio):
    split = random_split(seed)
    delta_t = 0.01
    dt = (k + 1) * delta_t * ratio
    t = transition_apfe(split, delta_t, k, dt).matrix
    assert rel_err(t, transition_by_probing(split, APFE(delta_t, k, dt)).matrix) <= 1e-12


@given(seed=st.integers(0, 10**6), k=st.integers(1, 3))
def test_global_schemes_equal_stepping(seed, k):
    split = random_split(seed)
    a = split.dense()
    assert rel_err(transition_fe(a, 0.03).matrix, transition_by_probing(split, FE(0.03)).matrix) <= 1e-12
    t = transition_pfe(a, 0.01, k, 0.1).matrix
    assert rel_err(t, transition_by_probing(split, PFE(0.01, k, 0.1)).matrix) <= 1e-12


def _k1_blocks(split):
    return split.ll, split.lr, split.rl, split.rr


def test_afe_k1_matches_printed_expansion(hme_split):
    ll, lr, rl, rr = _k1_blocks(hme_split)
    dt = 2e-3
    d = dt / 2
    il, ir = np.eye(len(ll)), np.eye(len(rr))
    printed = np.block([[(il + d * ll) @ (il + d * ll) + d * d * lr @ rl, 2 * d * lr + d * d * (lr @ rr + ll @ lr)],
                        [dt * rl, ir + dt * rr]])
    t = transition_afe(hme_split, d, dt).matrix
    np.testing.assert_allclose(t, printed, rtol=0, atol=1e-13 * np.abs(printed).max())
    # same thing in Taylor form, with A_LR A_RR in the upper right block
    a = hme_split.dense()
    second = np.block([[ll @ ll + lr @ rl, ll @ lr + lr @ rr], [np.zeros_like(rl), np.zeros_like(rr)]])
    taylor = np.eye(len(a)) + dt * a + dt * dt / 4 * second
    np.testing.assert_allclose(t, taylor, rtol=0, atol=1e-13 * np.abs(taylor).max())


def test_apfe_k1_differs_from_printed_expansion_by_one_term(hme_split):
    ll, lr, rl, rr = _k1_blocks(hme_split)
    d, dt = 1e-4, 1e-3
    h = dt - d
    il, ir = np.eye(len(ll)), np.eye(len(rr))
    printed = np.block([[(il + h * ll) @ (il + d * ll) + d * h * lr @ rl, h * (lr + d * lr @ rr)],
                        [dt * rl, ir + dt * rr]])
    t = transition_apfe(hme_split, d, 1, dt).matrix
    missing = np.zeros_like(t)
    missing[:len(ll), len(ll):] = (il + h * ll) @ (d * lr)
    np.testing.assert_allclose(t, printed + missing, rtol=0, atol=1e-13 * np.abs(t).max())


def test_decoupled_afe_is_power_of_inner_step(hme_split):
    s = hme_split
    dec = SplitOperator(s.ll, 0 * s.lr, 0 * s.rl, s.rr, s.split_index, s.n_vars)
    t = transition_afe(dec, 1e-4, 3e-4)
    ll = t.blocks()[0]
    np.testing.assert_allclose(ll, np.linalg.matrix_power(np.eye(len(s.ll)) + 1e-4 * s.ll, 3), atol=1e-14)


@given(seed=st.integers(0, 10**6), k=st.integers(1, 3))
def test_apfe_without_extrapolation_is_afe(seed, k):
    split = random_split(seed)
    dt = 0.04
    np.testing.assert_allclose(transition_apfe(split, dt / (k + 1), k, dt).matrix,
                               transition_afe(split, dt / (k + 1), dt).matrix, atol=1e-13)


def test_halo_cells_are_interface_neighbours(hme_split):
    sys_ = LinearSplitSystem(hme_split)
    np.testing.assert_array_equal(sys_.halo_right, [0, 4])
    np.testing.assert_array_equal(sys_.halo_left, [0, 4])


def _order(config_of_dt, a, w):
    errs, dts = [], []
    for i in range(5):
        dt = 0.02 / 2 ** i
        cfg = config_of_dt(dt)
        split = split_blocks_dense(a)
        if isinstance(cfg, (AFE, APFE, APPFE)):
            w1 = step(cfg, None, LinearSplitSystem(split), w, split.split_index)
        else:
            w1 = step(cfg, lambda v: (a @ v.ravel()).reshape(v.shape), None, w, 0)
        errs.append(np.linalg.norm(w1.ravel() - expm(dt * a) @ w.ravel()))
        dts.append(dt)
    return np.polyfit(np.log(dts), np.log(errs), 1)[0]


def split_blocks_dense(a, n_vars=2):
    k = (a.shape[0] // n_vars // 2) * n_vars
    return SplitOperator(a[:k, :k], a[:k, k:], a[k:, :k], a[k:, k:], k // n_vars, n_vars)


@pytest.mark.parametrize("name,make", [
    ("fe", lambda dt: FE(dt)),
    ("pfe", lambda dt: PFE(dt / 4, 1, dt)),
    ("afe", lambda dt: AFE(dt / 3, dt)),
    ("apfe", lambda dt: APFE(dt / 4, 1, dt)),
    ("appfe", lambda dt: APPFE(dt / 8, 1, dt / 4, 1, dt)),
])
def test_local_error_is_second_order(name, make):
    rng = np.random.default_rng(7)
    a = rng.normal(size=(12, 12)) - 3 * np.eye(12)
    w = rng.normal(size=(6, 2))
    slope = _order(make, a, w)
    assert 1.8 <= slope <= 2.2, slope


def _conservation_setup():
    model = hme_linearized(EquilibriumState(1, 0.5, 1), 5)
    grid = Grid1D(-1, 1, 12)
    op = assemble_semi_discrete(model, grid, RelaxationProfile(1e-3, 1e-2, 0.0), ViscosityScheme("force", 0.5))
    w = np.random.default_rng(3).normal(size=(12, 6))
    return op, LinearSplitSystem(split_blocks(op, 6)), w


def _mass_defect(cfg):
    op, system, w = _conservation_setup()
    w1 = step(cfg, op.apply, system, w, 6)
    return np.abs(w1.sum(axis=0)[:3] - w.sum(axis=0)[:3]).max() / np.abs(w).sum()


@pytest.mark.parametrize("cfg", [FE(2e-4), PFE(2e-4, 1, 1e-3), PFE(1e-4, 3, 2e-3)])
def test_global_schemes_conserve_first_three_components(cfg):
    assert _mass_defect(cfg) <= 1e-12


@pytest.mark.parametrize("make", [lambda h: AFE(h / 3, h), lambda h: APFE(h / 5, 2, h),
                                  lambda h: APPFE(h / 10, 1, h / 5, 1, h)])
def test_adaptive_conservation_defect_is_second_order(make):
    # the interface halo is read at different times on the two sides, so the
    # conserved sums drift by O(dt^2) per step instead of staying fixed
    d1, d2 = _mass_defect(make(4e-4)), _mass_defect(make(2e-4))
    assert d1 > 1e-12
    assert 3.0 < d1 / d2 < 5.0


def test_amplification_examples():
    assert amplification_factor(FE(0.1), 0.0) == 1
    assert abs(amplification_factor(PFE(0.01, 1, 0.1), -100.0)) == 0
    assert abs(amplification_factor(FE(0.1), -20.0)) == pytest.approx(1.0)
    sig_l, sig_r = amplification_factor(AFE(0.01, 0.02), -100.0, -10.0)
    assert sig_l == 0 and sig_r == pytest.approx(0.8)


@given(lams=st.lists(st.floats(-300, 0), min_size=1, max_size=6), k=st.integers(1, 3))
def test_amplification_matches_transition_on_diagonal_system(lams, k):
    a = np.diag(lams)
    for cfg, t in ((FE(0.004), transition_fe(a, 0.004)), (PFE(0.002, k, 0.02), transition_pfe(a, 0.002, k, 0.02))):
        np.testing.assert_allclose(np.diag(t.matrix), amplification_factor(cfg, np.array(lams)).real,
                                   atol=1e-13 * max(1, np.abs(t.matrix).max()))


def test_config_validation():
    with pytest.raises(ValueError):
        AFE(0.3, 1.0)
    with pytest.raises(ValueError):
        PFE(0.4, 2, 1.0)
    with pytest.raises(ValueError):
        APPFE(0.2, 1, 0.1, 1, 1.0)
    with pytest.raises(ValueError):
        FE(0.0)
    with pytest.raises(ValueError):
        APFE(0.1, -1, 1.0)
    assert AFE(0.25, 1.0).k == 3


def test_pfe_step_matches_transition():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(6, 6)) - 2 * np.eye(6)
    w = rng.normal(size=(3, 2))
    rhs = lambda v: (a @ v.ravel()).reshape(v.shape)
    np.testing.assert_allclose(pfe_step(rhs, w, 0.01, 2, 0.1).ravel(), transition_pfe(a, 0.01, 2, 0.1).matrix @ w.ravel(),
                               atol=1e-14)


def test_step_rejects_non_finite():
    with pytest.raises(FloatingPointError):
        fe_step(lambda v: np.full_like(v, np.inf), np.zeros((2, 1)), 0.1)


def _two_beam_problem(bc):
    m, nc = 5, 40
    grid = Grid1D(-1, 1, nc)
    w = np.zeros((nc, m + 1))
    w[:, 0] = 1.0
    w[:, 2] = 1.0
    w[:, 1] = np.where(grid.centers < 0, 0.3, -0.3)
    prob = FluctuationScheme(hme_model(m), grid, RelaxationProfile(1e-3, 1e-2, 0.0), ViscosityScheme("force", 0.5),
                             bc, lambda_max=4.0)
    return prob, w


@pytest.mark.parametrize("bc", list(Boundary))
def test_nonlinear_afe_single_substep_equals_fe(bc):
    prob, w = _two_beam_problem(bc)
    system = NonlinearSplitSystem(prob, 20)
    np.testing.assert_allclose(step(AFE(1e-3, 1e-3), prob.rhs, system, w, 20), fe_step(prob.rhs, w, 1e-3),
                               atol=1e-14)


@pytest.mark.parametrize("bc", list(Boundary))
def test_nonlinear_split_rhs_matches_global(bc):
    prob, w = _two_beam_problem(bc)
    w = w + 0.01 * np.random.default_rng(0).normal(size=w.shape)
    system = NonlinearSplitSystem(prob, 17)
    full = prob.rhs(w)
    np.testing.assert_allclose(system.left_rhs(w[:17], w[17:][system.halo_right]), full[:17], atol=1e-13)
    np.testing.assert_allclose(system.right_rhs(w[:17][system.halo_left], w[17:]), full[17:], atol=1e-13)


def test_appfe_decoupled_blocks_are_projective():
    split = random_split(5, n_cells=6, n_vars=2)
    dec = SplitOperator(split.ll, 0 * split.lr, 0 * split.rl, split.rr, split.split_index, split.n_vars)
    cfg = APPFE(0.01, 2, 0.02, 1, 0.1)
    t = transition_by_probing(dec, cfg)
    ll, lr, rl, rr = t.blocks()
    np.testing.assert_allclose(ll, transition_pfe(split.ll, 0.01, 2, 0.1).matrix, atol=1e-13)
    np.testing.assert_allclose(rr, transition_pfe(split.rr, 0.02, 1, 0.1).matrix, atol=1e-13)
    assert not lr.any() and not rl.any()
