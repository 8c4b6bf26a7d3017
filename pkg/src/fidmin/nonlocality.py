"""Measurement-induced nonlocality measures, closed forms and bounds.

Numerical measures search the admissible (marginal-preserving) local
measurements with :func:`fidmin.searchopt.optimize_measurement`. The
closed forms and bounds work on Schmidt coefficients or on the real
coefficient matrix from :mod:`fidmin.opbasis`. Purities are taken as
``Tr(rho^2) = ||gamma||^2`` everywhere.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ValidationError
from .measure import (
    DEGENERACY_TOL,
    admissible_parameterization,
    dephase_one_sided,
)
from .opbasis import decompose
from .searchopt import MAX, MIN, OptimizerConfig, optimize_measurement
from .states import PAULIS, BellDiagonalParams, append_ancilla, bell_diagonal, schmidt_decompose

MEASURE_IDS = (
    "HS_MIN",
    "FMIN_A",
    "FMIN_B",
    "FMIN_AB",
    "GD",
    "N1_PURE",
    "BOUND_GAMMA",
    "BOUND_S",
    "CLOSED_PURE",
    "CLOSED_2XN",
    "CLOSED_BD",
    "THM3",
)
FIDELITY_MEASURES = ("FMIN_A", "FMIN_B", "FMIN_AB", "CLOSED_PURE", "CLOSED_2XN", "BOUND_GAMMA", "BOUND_S")
NEAR_DEGENERATE_FACTOR = 10.0


@dataclass(frozen=True)
class MeasureReport:
    measure_id: str
    value: float
    method: str
    state_fingerprint: str = ""
    diagnostics: object = None
    notes: dict = field(default_factory=dict)

    def as_dict(self):
        out = {
            "measure_id": self.measure_id,
            "value": self.value,
            "method": self.method,
            "state_fingerprint": self.state_fingerprint,
        }
        if self.diagnostics is not None:
            out["diagnostics"] = self.diagnostics.as_dict()
        out.update(self.notes)
        return out


def _purity(mat):
    return float(np.vdot(mat, mat).real)


def fidelity(rho, sigma):
    """(Tr rho sigma)^2 / (Tr rho^2 Tr sigma^2)."""
    a, b = _mat(rho), _mat(sigma)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    overlap = np.vdot(a, b).real  # Tr(a^dagger b) = Tr(a b) for Hermitian a
    pa, pb = _purity(a), _purity(b)
    if pa <= 0 or pb <= 0:
        raise ValidationError("nonzero", "fidelity is undefined for the zero operator")
    return float(min(max(overlap**2 / (pa * pb), 0.0), 1.0))


def sine_metric_sq(rho, sigma):
    return 1.0 - fidelity(rho, sigma)


def _mat(x):
    return x.mat if hasattr(x, "mat") else np.asarray(x, dtype=np.complex128)


# objectives ---------------------------------------------------------------


def one_sided_fidelity_objective(rho, side):
    mat, m, n = rho.mat, rho.dim_a, rho.dim_b
    purity = rho.purity()

    def objective(meas):
        post = dephase_one_sided(mat, m, n, meas.basis, side)
        # Tr(rho Pi(rho)) = Tr(Pi(rho)^2), so F = Tr(Pi(rho)^2) / Tr(rho^2)
        return _purity(post) / purity

    return objective


def two_sided_fidelity_objective(rho):
    mat = rho.mat
    purity = rho.purity()

    m, n = rho.dim_a, rho.dim_b

    def objective(meas_a, meas_b):
        u, v = meas_a.basis, meas_b.basis
        w = (u[:, None, :, None] * v[None, :, None, :]).reshape(m * n, m * n)
        p = np.einsum("ij,ik,kj->j", w.conj(), mat, w).real
        return float(p @ p) / purity

    return objective


def hs_distance_objective(rho, side="A"):
    mat, m, n = rho.mat, rho.dim_a, rho.dim_b

    def objective(meas):
        post = dephase_one_sided(mat, m, n, meas.basis, side)
        return _purity(mat - post)

    return objective


# numerical measures -------------------------------------------------------


def _params(rho, side, tol):
    return admissible_parameterization(rho.marginal(side), tol)


def _near_degenerate(params, tol):
    return any(p.min_gap <= NEAR_DEGENERATE_FACTOR * tol for p in params)


def _optimize(rho, objective, sides, mode, cfg, tol, transform):
    """Run the search; when a marginal gap is close to ``tol`` also run the strict version."""
    cfg = cfg or OptimizerConfig()
    params = [_params(rho, s, tol) for s in sides]
    res = optimize_measurement(objective, params, mode, cfg)
    notes = {}
    if _near_degenerate(params, tol):
        strict = [_params(rho, s, 0.0) for s in sides]
        strict_res = optimize_measurement(objective, strict, mode, cfg)
        notes = {"near_degenerate": True, "strict_value": transform(strict_res.value)}
    return res, notes


def fmin_one_sided(rho, side="A", cfg=None, tol=DEGENERACY_TOL):
    """Largest 1 - F(rho, Pi(rho)) over admissible measurements on one side."""
    res, notes = _optimize(
        rho, one_sided_fidelity_objective(rho, side), [side], MIN, cfg, tol, lambda f: 1.0 - f
    )
    return MeasureReport(f"FMIN_{side}", 1.0 - res.value, "optimizer", rho.fingerprint(), res, notes)


def fmin_two_sided(rho, cfg=None, tol=DEGENERACY_TOL):
    """Largest 1 - F(rho, Pi_ab(rho)) over admissible pairs of local measurements."""
    res, notes = _optimize(
        rho, two_sided_fidelity_objective(rho), ["A", "B"], MIN, cfg, tol, lambda f: 1.0 - f
    )
    return MeasureReport("FMIN_AB", 1.0 - res.value, "optimizer", rho.fingerprint(), res, notes)


def hs_min(rho, cfg=None, tol=DEGENERACY_TOL):
    res, notes = _optimize(rho, hs_distance_objective(rho), ["A"], MAX, cfg, tol, float)
    return MeasureReport("HS_MIN", res.value, "optimizer", rho.fingerprint(), res, notes)


def geometric_discord(rho, cfg=None, tol=DEGENERACY_TOL):
    res, notes = _optimize(rho, hs_distance_objective(rho), ["A"], MIN, cfg, tol, float)
    return MeasureReport("GD", res.value, "optimizer", rho.fingerprint(), res, notes)


def ancilla_scaling_check(rho, ancilla, cfg=None):
    """Ratios measure(rho (x) ancilla) / measure(rho) for HS-MIN and one-sided F-MIN on A.

    The ancilla joins the unmeasured party b. A ratio is ``nan`` when the
    baseline measure vanishes.
    """
    big = append_ancilla(rho, ancilla)
    ratios = []
    for measure in (hs_min, lambda r, c: fmin_one_sided(r, "A", c)):
        base = measure(rho, cfg).value
        new = measure(big, cfg).value
        ratios.append(new / base if abs(base) > 1e-12 else float("nan"))
    return tuple(ratios)


# closed forms -------------------------------------------------------------


def closed_pure(schmidt):
    s = np.asarray(schmidt.coefficients)
    return float(1.0 - np.sum(s**2))


def trace_min_pure_2xn(schmidt):
    s = np.asarray(schmidt.coefficients)
    nonzero = s[s > 1e-12]
    if nonzero.size > 2:
        raise ValidationError("schmidt_rank", f"expected at most two nonzero coefficients, got {nonzero.size}")
    s1, s2 = (list(s) + [0.0, 0.0])[:2]
    return float(2.0 * np.sqrt(max(s1 * s2, 0.0)))


def _ascending_eigvals(sym):
    return np.linalg.eigvalsh((sym + sym.T) / 2)


def closed_2xn(bd):
    """(lambda_2 + lambda_3) / ||gamma||^2 with lambda the ascending eigenvalues of x x^T + T T^T.

    Exact for unconstrained qubit measurements on side A, i.e. when the A
    marginal is maximally mixed.
    """
    if bd.dim_a != 2:
        raise DimensionError(f"measured side must be a qubit, got dim {bd.dim_a}")
    lam = _ascending_eigvals(bd.s_matrix)
    return float((lam[1] + lam[2]) / bd.gamma_norm_sq)


def bound_gamma(bd, m=None, n=None):
    m = bd.dim_a if m is None else m
    n = bd.dim_b if n is None else n
    g = bd.gamma
    mu = _ascending_eigvals(g @ g.T)
    k = min(m - 1, n - 1)
    return float((np.trace(g @ g.T) - mu[:k].sum()) / bd.gamma_norm_sq)


def bound_S(bd, m=None, n=None):
    m = bd.dim_a if m is None else m
    n = bd.dim_b if n is None else n
    s = bd.s_matrix
    lam = _ascending_eigvals(s)
    k = min(m - 1, n - 1)
    return float((np.trace(s) - lam[:k].sum()) / bd.gamma_norm_sq)


def closed_bell_diagonal(params):
    """(HS-MIN, F-MIN) of a Bell-diagonal state from its correlation coefficients.

    The F-MIN entry is ``(sum c^2 - c0^2) / (1 + sum c^2)``; the grid oracle
    confirms it for one-sided measurements.
    """
    c = params.c
    total = float(np.sum(c**2))
    c0 = float(np.min(np.abs(c)))
    return (total - c0**2) / 4.0, (total - c0**2) / (1.0 + total)


def theorem3_value(m):
    if m < 2:
        raise ValueError("m must be >= 2")
    return (m - 1) / m


def closed_form_report(measure_id, rho):
    """Closed-form measures evaluated straight from a state, as a report."""
    if measure_id in ("BOUND_GAMMA", "BOUND_S", "CLOSED_2XN"):
        bd = decompose(rho)
        fn = {"BOUND_GAMMA": bound_gamma, "BOUND_S": bound_S, "CLOSED_2XN": closed_2xn}[measure_id]
        value = fn(bd)
    elif measure_id in ("CLOSED_PURE", "N1_PURE"):
        form = schmidt_decompose(rho)
        value = closed_pure(form) if measure_id == "CLOSED_PURE" else trace_min_pure_2xn(form)
    elif measure_id == "CLOSED_BD":
        value = closed_bell_diagonal(bell_diagonal_params_of(rho))[1]
    elif measure_id == "THM3":
        value = theorem3_value(rho.dim_a)
    else:
        raise KeyError(measure_id)
    return MeasureReport(measure_id, value, "closed_form", rho.fingerprint())


def bell_diagonal_params_of(rho):
    """Recover (c1, c2, c3) from a two-qubit state that is Bell diagonal."""
    if rho.dims != (2, 2):
        raise DimensionError("Bell-diagonal states are two-qubit states")
    c = [float(np.trace(rho.mat @ np.kron(s, s)).real) for s in PAULIS]
    params = BellDiagonalParams(*c)
    if np.max(np.abs(bell_diagonal(params).mat - rho.mat)) > 1e-8:
        raise ValidationError("bell_diagonal", "state is not Bell diagonal")
    return params


def compute(measure_id, rho, cfg=None):
    """Dispatch a measure id to its implementation."""
    numeric = {
        "HS_MIN": lambda: hs_min(rho, cfg),
        "GD": lambda: geometric_discord(rho, cfg),
        "FMIN_A": lambda: fmin_one_sided(rho, "A", cfg),
        "FMIN_B": lambda: fmin_one_sided(rho, "B", cfg),
        "FMIN_AB": lambda: fmin_two_sided(rho, cfg),
    }
    if measure_id in numeric:
        return numeric[measure_id]()
    if measure_id in MEASURE_IDS:
        return closed_form_report(measure_id, rho)
    raise KeyError(f"unknown measure {measure_id!r}")
