import numpy as np
import pytest

from conftest import BELL_VERTICES, bd
from fidmin.errors import DimensionError, ValidationError
from fidmin.measure import ProjectiveMeasurement, apply_two_sided
from fidmin.nonlocality import (
    MEASURE_IDS,
    ancilla_scaling_check,
    bell_diagonal_params_of,
    bound_gamma,
    bound_S,
    closed_2xn,
    closed_bell_diagonal,
    closed_pure,
    compute,
    fidelity,
    fmin_one_sided,
    fmin_two_sided,
    geometric_discord,
    hs_min,
    sine_metric_sq,
    theorem3_value,
    trace_min_pure_2xn,
)
from fidmin.opbasis import decompose
from fidmin.searchopt import OptimizerConfig
from fidmin.states import (
    BellDiagonalParams,
    DensityMatrix,
    SchmidtForm,
    apply_local_unitary,
    classical_quantum,
    haar_unitary,
    product_state,
    pure_from_amplitudes,
    random_density,
    random_pure,
    schmidt_decompose,
    werner,
)


def schmidt(*s):
    eye = np.eye(len(s))
    return SchmidtForm(np.array(s, dtype=float), eye, eye)


def test_fidelity_examples(bell_state):
    rho = random_density(2, 2, 0)
    assert np.isclose(fidelity(rho, rho), 1)
    comp = ProjectiveMeasurement.computational(2)
    dephased = apply_two_sided(bell_state, comp, comp)
    assert np.isclose(fidelity(bell_state, dephased), 0.5)
    assert np.isclose(sine_metric_sq(bell_state, dephased), 0.5)
    assert np.isclose(fidelity(np.eye(2) / 2, np.diag([1.0, 0.0])), 0.5)
    other = random_density(2, 2, 1)
    assert np.isclose(fidelity(rho, other), fidelity(other, rho))
    with pytest.raises(DimensionError):
        fidelity(rho, np.eye(2))


def test_sine_metric_monotone():
    a, b, c = (random_density(2, 2, s) for s in (3, 4, 5))
    fb, fc = fidelity(a, b), fidelity(a, c)
    assert (fb - fc) * (sine_metric_sq(a, b) - sine_metric_sq(a, c)) <= 0


def test_bell_state_values(bell_state, fast_cfg):
    assert abs(fmin_one_sided(bell_state, "A", fast_cfg).value - 0.5) <= 1e-8
    assert abs(hs_min(bell_state, fast_cfg).value - 0.5) <= 1e-8
    assert abs(geometric_discord(bell_state, fast_cfg).value - 0.5) <= 1e-8
    # measuring z on a and x on b leaves I/4, so the two-sided value is 1 - 1/4
    assert abs(fmin_two_sided(bell_state, fast_cfg).value - 0.75) <= 1e-8


def test_product_and_classical_zero(fast_cfg):
    prod = product_state(random_density(2, 1, 1).mat, random_density(3, 1, 2).mat)
    for fn in (hs_min, lambda r, c: fmin_one_sided(r, "A", c), fmin_two_sided):
        assert abs(fn(prod, fast_cfg).value) <= 1e-10
    cq = classical_quantum([0.7, 0.3], [random_density(2, 1, 3).mat, random_density(2, 1, 4).mat])
    assert abs(fmin_one_sided(cq, "A", fast_cfg).value) <= 1e-10
    assert abs(geometric_discord(cq, fast_cfg).value) <= 1e-10


def test_bell_diagonal_one_sided_matches_closed_form(fast_cfg):
    for c in [(0.3, -0.2, 0.1), (1 / 3, 1 / 3, 1 / 3), (0.0, 0.0, 0.0), (-0.5, 0.4, 0.1)]:
        hs, fm = closed_bell_diagonal(BellDiagonalParams(*c))
        rho = bd(*c)
        assert abs(hs_min(rho, fast_cfg).value - hs) <= 1e-8
        assert abs(fmin_one_sided(rho, "A", fast_cfg).value - fm) <= 1e-8
        assert abs(fmin_one_sided(rho, "B", fast_cfg).value - fm) <= 1e-8


def test_bell_diagonal_two_sided_derived_form(fast_cfg):
    for c in [(0.3, -0.2, 0.1), (1 / 3, 1 / 3, 1 / 3), (1, 1, -1)]:
        total = sum(x * x for x in c)
        assert abs(fmin_two_sided(bd(*c), fast_cfg).value - total / (1 + total)) <= 1e-8


def test_closed_bell_diagonal_examples():
    assert np.allclose(closed_bell_diagonal(BellDiagonalParams(1, 1, -1)), (0.5, 0.5))
    assert np.allclose(closed_bell_diagonal(BellDiagonalParams(0, 0, 0)), (0, 0))
    assert np.allclose(closed_bell_diagonal(BellDiagonalParams(1 / 3, 1 / 3, 1 / 3)), (1 / 18, 1 / 6))
    for c1 in np.linspace(0, 1 / 3, 7):
        hs, fm = closed_bell_diagonal(BellDiagonalParams(c1, c1, c1))
        assert np.isclose(hs, c1**2 / 2) and np.isclose(fm, 2 * c1**2 / (1 + 3 * c1**2))


def test_closed_pure_and_trace_min():
    assert closed_pure(schmidt(0.5, 0.5)) == pytest.approx(0.5)
    assert closed_pure(schmidt(1.0, 0.0)) == pytest.approx(0.0)
    assert closed_pure(schmidt(0.8, 0.2)) == pytest.approx(0.32)
    assert trace_min_pure_2xn(schmidt(0.5, 0.5)) == pytest.approx(1.0)
    assert trace_min_pure_2xn(schmidt(1.0, 0.0)) == pytest.approx(0.0)
    assert trace_min_pure_2xn(schmidt(0.8, 0.2)) == pytest.approx(0.8)
    for s in ([0.5, 0.5], [0.8, 0.2], [0.9, 0.1, 0.0]):
        form = schmidt(*s)
        assert abs(trace_min_pure_2xn(form) ** 2 - 2 * closed_pure(form)) <= 1e-12
    with pytest.raises(ValidationError):
        trace_min_pure_2xn(schmidt(0.5, 0.3, 0.2))


def test_pure_nondegenerate_collapse(fast_cfg):
    amps = np.diag([np.sqrt(0.8), np.sqrt(0.2)])
    rho = pure_from_amplitudes(amps)
    assert abs(fmin_two_sided(rho, fast_cfg).value - 0.32) <= 1e-10
    assert abs(fmin_one_sided(rho, "A", fast_cfg).value - 0.32) <= 1e-10
    for seed in range(5):
        rho = random_pure(2, 3, seed)
        target = closed_pure(schmidt_decompose(rho))
        assert abs(fmin_two_sided(rho, fast_cfg).value - target) <= 1e-8
        assert abs(fmin_one_sided(rho, "B", fast_cfg).value - target) <= 1e-8


def test_closed_2xn_examples():
    assert closed_2xn(decompose(bd(1, 1, -1))) == pytest.approx(0.5)
    assert closed_2xn(decompose(bd(0, 0, 0))) == pytest.approx(0.0)
    c = (0.3, -0.2, 0.1)
    assert closed_2xn(decompose(bd(*c))) == pytest.approx(closed_bell_diagonal(BellDiagonalParams(*c))[1])
    with pytest.raises(DimensionError):
        closed_2xn(decompose(random_density(3, 2, 0)))


def test_closed_2xn_exact_for_maximally_mixed_a(fast_cfg):
    # random 2x3 states with rho_a = I/2: partial transposes of Bell-like mixtures
    rng = np.random.default_rng(0)
    for _ in range(3):
        v = rng.normal(size=(2, 3)) + 1j * rng.normal(size=(2, 3))
        u, _, wh = np.linalg.svd(v, full_matrices=False)
        amps = (u @ wh) / np.sqrt(2)  # flat Schmidt spectrum on A
        rho = pure_from_amplitudes(amps)
        mix = (rho.mat + np.kron(np.eye(2) / 2, random_density(3, 1, 1).mat)) / 2
        state = DensityMatrix(2, 3, mix)
        assert np.allclose(state.marginal("A"), np.eye(2) / 2)
        exact = closed_2xn(decompose(state))
        assert abs(fmin_one_sided(state, "A", fast_cfg).value - exact) <= 1e-8


def test_bounds_examples():
    assert bound_gamma(decompose(bd(0, 0, 0))) == pytest.approx(1.0)
    assert bound_S(decompose(bd(0, 0, 0))) == pytest.approx(0.0)
    assert bound_S(decompose(bd(1 / 3, 1 / 3, 1 / 3))) == pytest.approx(1 / 6)
    assert bound_gamma(decompose(bd(1, 1, -1))) >= 0.5
    for seed in range(100):
        dec = decompose(random_density(2, 3, seed))
        assert bound_S(dec) <= bound_gamma(dec) + 1e-12


def test_theorem3_value():
    assert theorem3_value(2) == 0.5
    assert theorem3_value(3) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        theorem3_value(1)


def test_ancilla_scaling(bell_state, fast_cfg):
    hs, fm = ancilla_scaling_check(bell_state, np.diag([1.0, 0.0]), fast_cfg)
    assert hs == pytest.approx(1, abs=1e-8) and fm == pytest.approx(1, abs=1e-8)
    hs, fm = ancilla_scaling_check(bell_state, np.diag([0.5, 0.5]), fast_cfg)
    assert hs == pytest.approx(0.5, abs=1e-8) and fm == pytest.approx(1, abs=1e-8)
    hs, _ = ancilla_scaling_check(bell_state, np.diag([0.9, 0.1]), fast_cfg)
    assert hs == pytest.approx(0.82, abs=1e-8)
    prod = product_state(np.diag([0.6, 0.4]), np.diag([0.5, 0.5]))
    assert all(np.isnan(r) for r in ancilla_scaling_check(prod, np.diag([0.5, 0.5]), fast_cfg))


def test_gd_equals_hs_for_nondegenerate_marginal(fast_cfg):
    for seed in range(3):
        rho = random_density(2, 3, seed)
        assert abs(geometric_discord(rho, fast_cfg).value - hs_min(rho, fast_cfg).value) <= 1e-12


def test_local_unitary_invariance(fast_cfg):
    rho = bd(0.4, -0.3, 0.2)
    moved = apply_local_unitary(rho, haar_unitary(2, 1), haar_unitary(2, 2))
    for fn in (hs_min, fmin_two_sided):
        assert abs(fn(rho, fast_cfg).value - fn(moved, fast_cfg).value) <= 1e-8
    assert abs(bound_S(decompose(rho)) - bound_S(decompose(moved))) <= 1e-10


def test_werner_one_sided_symmetry(fast_cfg):
    rho = werner(2, 0.4)
    a = fmin_one_sided(rho, "A", fast_cfg).value
    b = fmin_one_sided(rho, "B", fast_cfg).value
    assert abs(a - b) <= 1e-8


def test_near_degenerate_notes(fast_cfg):
    rho = product_state(np.diag([0.5 + 2e-9, 0.5 - 2e-9]), np.eye(2) / 2)
    rep = fmin_one_sided(rho, "A", fast_cfg)
    assert rep.notes["near_degenerate"] is True
    assert "strict_value" in rep.notes
    assert fmin_one_sided(bd(0.2, 0.1, 0.0), "A", fast_cfg).notes == {}


def test_report_and_dispatch(bell_state, fast_cfg):
    rep = compute("FMIN_A", bell_state, fast_cfg)
    d = rep.as_dict()
    assert d["method"] == "optimizer" and len(d["state_fingerprint"]) == 16
    assert d["diagnostics"]["starts"] == fast_cfg.starts
    assert compute("CLOSED_PURE", bell_state).value == pytest.approx(0.5)
    assert compute("N1_PURE", bell_state).value == pytest.approx(1.0)
    assert compute("CLOSED_BD", bd(1, 1, -1)).value == pytest.approx(0.5)
    assert compute("THM3", bell_state).value == 0.5
    with pytest.raises(KeyError):
        compute("NOPE", bell_state)
    assert set(MEASURE_IDS) >= {"HS_MIN", "FMIN_AB", "BOUND_S"}


def test_bell_diagonal_params_of():
    for c in BELL_VERTICES + [(0.1, 0.2, -0.3)]:
        assert np.allclose(bell_diagonal_params_of(bd(*c)).c, c)
    with pytest.raises(ValidationError):
        bell_diagonal_params_of(random_density(2, 2, 0))


def test_default_config_reaches_bell_vertex():
    assert abs(hs_min(bd(1, -1, 1), OptimizerConfig(starts=2)).value - 0.5) <= 1e-8
