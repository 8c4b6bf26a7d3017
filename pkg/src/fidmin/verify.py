"""Randomized property suites backing ``fidmin verify``.

Each check returns a :class:`PropertyResult` with the worst violation
magnitude seen over its trials. Trials are seeded from ``(seed, index)`` so a
run is reproducible.
"""

from dataclasses import dataclass

import numpy as np

from . import nonlocality as nl
from .matkernel import expm_hermitian_generator, hermitian_eig, kron, partial_trace
from .measure import (
    ProjectiveMeasurement,
    admissible_parameterization,
    apply_one_sided,
    apply_two_sided,
    marginal_invariant,
    realize_admissible,
)
from .opbasis import decompose, fidelity_two_sided_gamma, reconstruct
from .searchopt import OptimizerConfig
from .states import (
    BellDiagonalParams,
    append_ancilla,
    apply_local_unitary,
    bell_diagonal,
    classical_quantum,
    haar_unitary,
    max_entangled_mixed,
    product_state,
    random_density,
    random_pure,
    schmidt_decompose,
    schmidt_reconstruct,
)

DIMS = ((2, 2), (2, 3), (3, 3), (2, 4), (3, 2), (3, 4))
SUITES = ("all", "invariants", "bounds", "closed_forms", "ancilla")


@dataclass(frozen=True)
class PropertyResult:
    name: str
    passed: bool
    worst: float
    tol: float
    trials: int

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: worst={self.worst:.3e} tol={self.tol:.0e} trials={self.trials}"


def _rng(seed, *key):
    return np.random.default_rng([seed, *key])


def _dims(i):
    return DIMS[i % len(DIMS)]


def random_tetrahedron_point(rng):
    """Uniform point of the Bell-diagonal tetrahedron (Dirichlet weights on the vertices)."""
    vertices = np.array([(1, 1, -1), (-1, -1, -1), (1, -1, 1), (-1, 1, 1)], dtype=float)
    c = rng.dirichlet(np.ones(4)) @ vertices
    return BellDiagonalParams(*c)


def random_measurement(d, rng):
    return ProjectiveMeasurement(haar_unitary(d, rng))


class _Check:
    def __init__(self, name, tol):
        self.name, self.tol = name, tol
        self.worst, self.trials = 0.0, 0

    def add(self, violation):
        """``violation`` is an error magnitude; the check passes while it stays <= tol."""
        self.worst = max(self.worst, float(violation))
        self.trials += 1

    def result(self):
        return PropertyResult(self.name, self.worst <= self.tol, self.worst, self.tol, self.trials)


def shared_basis_mixture(m, probs):
    """Mixture of maximally entangled m x m states sharing the product basis.

    Component k is ``m^{-1/2} sum_i w^{ki} |i>|i>`` with ``w = exp(2 pi i/m)``.
    """
    bases = [(np.eye(m), np.diag(np.exp(2j * np.pi * k * np.arange(m) / m))) for k in range(m)]
    return max_entangled_mixed(m, m, probs, bases)


def _cfg(seed, *key, starts=8):
    return OptimizerConfig(starts=starts, seed=int(np.random.SeedSequence([seed, *key]).generate_state(1)[0]))


# suites ---------------------------------------------------------------------


def invariants(trials, seed):
    eig = _Check("eig_reconstruction", 1e-10)
    kron_tr = _Check("kron_trace_multiplicative", 1e-10)
    ptrace = _Check("partial_trace_product", 1e-12)
    expm = _Check("expm_unitarity", 1e-10)
    valid = _Check("constructors_valid", 1e-10)
    bdeig = _Check("bell_diagonal_eigenvalues", 1e-12)
    schmidt = _Check("schmidt_round_trip", 1e-8)
    anc = _Check("ancilla_purity_multiplicative", 1e-12)
    gamma_rt = _Check("gamma_round_trip", 1e-10)
    gamma_pur = _Check("gamma_norm_equals_purity", 1e-10)
    gamma_fid = _Check("gamma_fidelity_matches_direct", 1e-9)
    idem = _Check("measurement_idempotence", 1e-12)
    ident = _Check("overlap_equals_post_purity", 1e-12)
    adm = _Check("admissible_marginal_invariance", 0.0)
    commute = _Check("two_sided_commutes_with_projectors", 1e-12)
    nonneg = _Check("nonnegativity", 1e-12)
    lui = _Check("local_unitary_invariance", 1e-6)
    zeros = _Check("product_classical_zero_one_sided", 1e-6)
    zeros_ab = _Check("product_classical_zero_two_sided", 1e-6)
    cap = _Check("fidelity_cap_two_sided", 1e-6)
    cap_one = _Check("fidelity_cap_one_sided", 1e-6)
    gd_eq = _Check("gd_equals_hs_min_nondegenerate", 1e-10)

    for i in range(trials):
        rng = _rng(seed, 0, i)
        m, n = _dims(i)
        rho = random_density(m, n, rng)
        h = rho.mat + rng.standard_normal(rho.mat.shape)
        h = h + h.conj().T
        w, v = hermitian_eig(h)
        eig.add(np.max(np.abs((v * w) @ v.conj().T - h)))
        a, b = random_density(m, 1, rng).mat, random_density(n, 1, rng).mat
        kron_tr.add(abs(np.trace(kron(a, b)) - np.trace(a) * np.trace(b)))
        ptrace.add(max(np.max(np.abs(partial_trace(kron(a, b), m, n, "A") - a)),
                       np.max(np.abs(partial_trace(kron(a, b), m, n, "B") - b))))
        u = expm_hermitian_generator(h)
        expm.add(np.max(np.abs(u.conj().T @ u - np.eye(m * n))))
        ev = np.linalg.eigvalsh(rho.mat)
        valid.add(max(abs(np.trace(rho.mat).real - 1), max(0.0, -ev[0])))

        bdp = random_tetrahedron_point(rng)
        bdeig.add(np.max(np.abs(np.sort(np.linalg.eigvalsh(bell_diagonal(bdp).mat)) - np.sort(bdp.eigenvalues()))))

        pure = random_pure(m, n, rng)
        schmidt.add(np.max(np.abs(schmidt_reconstruct(schmidt_decompose(pure)).mat - pure.mat)))
        ancilla = random_density(2, 1, rng)
        big = append_ancilla(rho, ancilla.mat)
        anc.add(abs(big.purity() - rho.purity() * ancilla.purity()))

        bd = decompose(rho)
        gamma_rt.add(np.max(np.abs(reconstruct(bd).mat - rho.mat)))
        gamma_pur.add(abs(bd.gamma_norm_sq - rho.purity()))
        ma, mb = random_measurement(m, rng), random_measurement(n, rng)
        post = apply_two_sided(rho, ma, mb)
        gamma_fid.add(abs(fidelity_two_sided_gamma(bd, ma, mb) - nl.fidelity(rho, post)))

        one = apply_one_sided(rho, ma, "A")
        idem.add(max(np.max(np.abs(apply_one_sided(one, ma, "A").mat - one.mat)),
                     np.max(np.abs(apply_two_sided(post, ma, mb).mat - post.mat))))
        ident.add(max(abs(np.vdot(rho.mat, post.mat).real - post.purity()),
                      abs(np.vdot(rho.mat, one.mat).real - one.purity())))
        for p in ma.projectors():
            for q in mb.projectors():
                pq = np.kron(p, q)
                commute.add(np.max(np.abs(pq @ post.mat - post.mat @ pq)))

        # a fully degenerate marginal exercises the free coordinates
        marg = np.diag(np.r_[0.3, 0.3, np.full(m - 2, 0.4 / max(m - 2, 1))][:m])
        marg = marg / np.trace(marg)
        param = admissible_parameterization(marg)
        meas = realize_admissible(param, rng.standard_normal(param.free_parameter_count))
        adm.add(0.0 if marginal_invariant(marg, meas, 1e-8) else 1.0)

        cfg = _cfg(seed, 0, i)
        reports = [nl.hs_min(rho, cfg), nl.geometric_discord(rho, cfg), nl.fmin_one_sided(rho, "A", cfg),
                   nl.fmin_one_sided(rho, "B", cfg), nl.fmin_two_sided(rho, cfg)]
        for r in reports:
            nonneg.add(max(0.0, -r.value))
        gd_eq.add(abs(reports[0].value - reports[1].value))
        if m <= n:
            cap.add(max(0.0, 1.0 / m - (1.0 - reports[4].value)))
            cap_one.add(max(0.0, 1.0 / m - (1.0 - reports[2].value)))

        rotated = apply_local_unitary(rho, haar_unitary(m, rng), haar_unitary(n, rng))
        rot = [nl.hs_min(rotated, cfg), nl.geometric_discord(rotated, cfg), nl.fmin_one_sided(rotated, "A", cfg),
               nl.fmin_one_sided(rotated, "B", cfg), nl.fmin_two_sided(rotated, cfg)]
        lui.add(max(abs(r.value - q.value) for r, q in zip(reports, rot)))

        prod = product_state(random_density(m, 1, rng).mat, random_density(n, 1, rng).mat)
        probs = rng.dirichlet(np.ones(m))
        cq = classical_quantum(probs, [random_density(n, 1, rng).mat for _ in range(m)], haar_unitary(m, rng))
        for state in (prod, cq):
            zeros.add(max(abs(nl.hs_min(state, cfg).value), abs(nl.fmin_one_sided(state, "A", cfg).value)))
            zeros_ab.add(abs(nl.fmin_two_sided(state, cfg).value))

    checks = [eig, kron_tr, ptrace, expm, valid, bdeig, schmidt, anc, gamma_rt, gamma_pur, gamma_fid,
              idem, ident, adm, commute, nonneg, lui, zeros, zeros_ab, cap, cap_one, gd_eq]
    return [c.result() for c in checks]


def bounds(trials, seed):
    dominance = _Check("two_sided_le_max_one_sided", 1e-6)
    below_s = _Check("two_sided_le_bound_S", 1e-6)
    s_below_gamma = _Check("bound_S_le_bound_gamma", 2e-6)
    one_below_s = _Check("one_sided_A_le_bound_S", 1e-6)
    for i in range(trials):
        rng = _rng(seed, 1, i)
        m, n = _dims(i)
        rho = random_density(m, n, rng)
        cfg = _cfg(seed, 1, i)
        ab = nl.fmin_two_sided(rho, cfg).value
        fa = nl.fmin_one_sided(rho, "A", cfg).value
        fb = nl.fmin_one_sided(rho, "B", cfg).value
        bd = decompose(rho)
        bs, bg = nl.bound_S(bd), nl.bound_gamma(bd)
        dominance.add(max(0.0, ab - max(fa, fb)))
        below_s.add(max(0.0, ab - bs))
        s_below_gamma.add(max(0.0, bs - bg))
        if m == 2:
            one_below_s.add(max(0.0, fa - bs))
    return [c.result() for c in (dominance, below_s, s_below_gamma, one_below_s)]


def closed_forms(trials, seed):
    bd_hs = _Check("bell_diagonal_hs_min", 1e-6)
    bd_fa = _Check("bell_diagonal_fmin_one_sided", 1e-6)
    bd_fab = _Check("bell_diagonal_fmin_two_sided", 1e-6)
    pure = _Check("pure_two_sided_equals_closed", 1e-6)
    pure_one = _Check("pure_one_sided_equals_closed", 1e-6)
    trace_rel = _Check("trace_min_relation", 1e-12)
    mix_two = _Check("shared_basis_mixture_two_sided", 1e-5)
    mix_one = _Check("shared_basis_mixture_one_sided", 1e-5)
    for i in range(trials):
        rng = _rng(seed, 2, i)
        cfg = _cfg(seed, 2, i, starts=4)
        params = random_tetrahedron_point(rng)
        rho = bell_diagonal(params)
        hs, fm = nl.closed_bell_diagonal(params)
        bd_hs.add(abs(nl.hs_min(rho, cfg).value - hs))
        bd_fa.add(abs(nl.fmin_one_sided(rho, "A", cfg).value - fm))
        bd_fab.add(abs(nl.fmin_two_sided(rho, cfg).value - fm))

        m, n = _dims(i)
        state = random_pure(m, n, rng)
        form = schmidt_decompose(state)
        closed = nl.closed_pure(form)
        pure.add(abs(nl.fmin_two_sided(state, cfg).value - closed))
        pure_one.add(abs(nl.fmin_one_sided(state, "A", cfg).value - closed))
        if m == 2:
            trace_rel.add(abs(nl.trace_min_pure_2xn(form) - np.sqrt(2 * closed)))

        if i < 4:
            k = 2 + i % 2
            probs = rng.dirichlet(np.ones(k))
            mix = shared_basis_mixture(k, probs)
            mix_two.add(abs(nl.fmin_two_sided(mix, cfg).value - nl.theorem3_value(k)))
            mix_one.add(abs(nl.fmin_one_sided(mix, "A", cfg).value - nl.theorem3_value(k)))
    return [c.result() for c in (bd_hs, bd_fa, bd_fab, pure, pure_one, trace_rel, mix_two, mix_one)]


ANCILLAS = {
    "pure": np.diag([1.0, 0.0]),
    "half": np.diag([0.5, 0.5]),
    "biased": np.diag([0.9, 0.1]),
}


def ancilla(trials, seed):
    hs = _Check("hs_min_scales_with_ancilla_purity", 1e-5)
    fm = _Check("fmin_ancilla_invariant", 1e-5)
    for i in range(trials):
        rng = _rng(seed, 3, i)
        rho = random_density(2, 2, rng)
        cfg = _cfg(seed, 3, i)
        for anc in ANCILLAS.values():
            r_hs, r_f = nl.ancilla_scaling_check(rho, anc, cfg)
            hs.add(abs(r_hs - np.sum(anc**2)))
            fm.add(abs(r_f - 1.0))
    return [hs.result(), fm.result()]


def run_suite(suite, trials, seed):
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    runners = {"invariants": invariants, "bounds": bounds, "closed_forms": closed_forms, "ancilla": ancilla}
    names = list(runners) if suite == "all" else [suite]
    results = []
    for name in names:
        results.extend(runners[name](trials, seed))
    return results
