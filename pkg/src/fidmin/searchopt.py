"""Multistart simplex search over admissible measurements, and a grid oracle.

Objectives are plain callables taking one ``ProjectiveMeasurement`` per
searched side, ``objective(meas_a)`` or ``objective(meas_a, meas_b)``, and
returning a float.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionError, NumericalError
from .measure import ProjectiveMeasurement, realize_admissible
from .states import haar_unitary

MIN, MAX = "MIN", "MAX"
AGREE_TOL = 1e-8
INITIAL_STEP = 0.6
POLISH_STEP = 0.05
MAX_POLISH = 4


@dataclass(frozen=True)
class OptimizerConfig:
    starts: int = 64
    max_iters: int = 500
    ftol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        if not self.ftol > 0:
            raise ValueError("ftol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class OptResult:
    value: float
    argmeas: tuple
    starts_agreeing: int
    evaluations: int
    start_values: tuple = field(default=(), repr=False)

    def as_dict(self):
        return {
            "value": self.value,
            "starts_agreeing": int(self.starts_agreeing),
            "starts": len(self.start_values),
            "evaluations": int(self.evaluations),
            # bases as nested [re, im] pairs so the record stays plain JSON
            "argmeas": [np.stack([m.basis.real, m.basis.imag], axis=-1).round(12).tolist() for m in self.argmeas],
        }


def _sign(mode):
    if mode == MIN:
        return 1.0
    if mode == MAX:
        return -1.0
    raise ValueError(f"mode must be MIN or MAX, got {mode!r}")


def _checked(value):
    value = float(value)
    if not np.isfinite(value):
        raise NumericalError(f"objective returned non-finite value {value!r}")
    return value


def _split(x, params):
    out, pos = [], 0
    for p in params:
        out.append(x[pos : pos + p.free_parameter_count])
        pos += p.free_parameter_count
    return out


def _anchors(params, rng):
    return [[haar_unitary(len(idx), rng) for idx in p.free_blocks] for p in params]


def _simplex(x0, step):
    k = x0.size
    return np.vstack([x0, x0 + step * np.eye(k)])


def optimize_measurement(objective, params, mode, cfg=None):
    """Optimize ``objective`` over admissible measurements on one or two sides.

    Each start draws Haar-random block unitaries as an anchor and runs
    Nelder-Mead on the generator coordinates around it, followed by a few
    shrinking-simplex restarts from the incumbent. Starts use independent
    RNG streams seeded by ``(cfg.seed, start_index)``.
    """
    cfg = cfg or OptimizerConfig()
    sign = _sign(mode)
    params = tuple(params)
    total = sum(p.free_parameter_count for p in params)

    if total == 0:
        meas = tuple(realize_admissible(p, []) for p in params)
        value = _checked(objective(*meas))
        return OptResult(value, meas, 1, 1, (value,))

    evaluations = 0
    best = None
    start_values = []
    for start in range(cfg.starts):
        rng = np.random.default_rng([cfg.seed, start])
        anchors = _anchors(params, rng)

        def measurements(x, anchors=anchors):
            return tuple(realize_admissible(p, c, a) for p, c, a in zip(params, _split(x, params), anchors))

        def f(x):
            return sign * _checked(objective(*measurements(x)))

        x = np.zeros(total)
        fx = f(x)
        evaluations += 1
        step = INITIAL_STEP
        for _ in range(MAX_POLISH):
            res = minimize(
                f,
                x,
                method="Nelder-Mead",
                options={
                    "maxiter": cfg.max_iters,
                    "xatol": np.inf,  # generator phases are flat directions; stop on f spread
                    "fatol": cfg.ftol,
                    "initial_simplex": _simplex(x, step),
                    "adaptive": total > 6,
                },
            )
            evaluations += res.nfev
            improved = fx - res.fun
            if res.fun < fx:
                x, fx = res.x, res.fun
            step = POLISH_STEP if step == INITIAL_STEP else step / 4
            if improved <= cfg.ftol:
                break
        start_values.append(sign * fx)
        if best is None or fx < best[0]:
            best = (fx, measurements(x))

    meas = best[1]
    value = _checked(objective(*meas))
    evaluations += 1
    agreeing = int(sum(abs(v - value) <= AGREE_TOL for v in start_values))
    return OptResult(value, meas, agreeing, evaluations, tuple(start_values))


def qubit_measurement(theta, phi):
    """Qubit basis {|n>, |-n>} for the Bloch direction (theta, phi)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    u = np.array([[c, -s * np.conj(e)], [s * e, c]], dtype=np.complex128)
    return ProjectiveMeasurement(u)


def hemisphere_grid(resolution):
    """Measurements on a polar/azimuthal grid covering each qubit basis once up to sign."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    thetas = np.linspace(0.0, np.pi / 2, resolution // 2 + 1)
    phis = np.linspace(0.0, 2 * np.pi, resolution, endpoint=False)
    grid = [qubit_measurement(0.0, 0.0)]
    grid += [qubit_measurement(t, p) for t in thetas[1:] for p in phis]
    return grid


def oracle_exhaustive_2d(objective, mode, resolution, params):
    """Best objective value over a Bloch-sphere grid on each searched qubit side.

    Every side in ``params`` must be a qubit with a maximally mixed marginal,
    so that every basis is admissible.
    """
    for p in params:
        if p.dim != 2:
            raise DimensionError(f"grid oracle only covers qubit sides, got dim {p.dim}")
        if p.free_parameter_count != 4:
            raise DimensionError("grid oracle needs a maximally mixed qubit marginal")
    sign = _sign(mode)
    grid = hemisphere_grid(resolution)
    if len(params) == 1:
        values = [objective(m) for m in grid]
    elif len(params) == 2:
        values = [objective(a, b) for a in grid for b in grid]
    else:
        raise ValueError("one or two sides only")
    values = np.array([_checked(v) for v in values])
    return float(values.min() if sign > 0 else values.max())
