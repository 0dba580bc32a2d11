"""Independent spreading-speed estimates from the Weinberger recursion.

For a direction e the linearized operator acts on profiles of s = x.e
through the projected measure (mass, mean, variance). With c the candidate
speed the recursion is

    a_{m+1}(s) = max{ phi(s), mass * E[a_m(s + c - Y)] },   Y ~ N(mean, var),

started from a_0 = phi. The speed is the supremum of the c for which the
profile climbs above phi(-inf) at a fixed probe point s0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from impulse_front.analytic import GaussianMeasure, as_direction, golden_minimum, log_mgf_measure, mgf_measure
from impulse_front.exceptions import ExtinctionRegime, GridExhausted

OVERFLOW_CAP = 1e250


@dataclass(frozen=True)
class OracleConfig:
    """Settings of the recursion.

    phi(s) = phi_inf * clamp(-s, 0, 1) with phi_inf = pi1 / 2. ``radius`` is
    the quadrature truncation in standard deviations of the projected
    measure; ``h``, ``left`` and ``right`` default to values derived from it.
    Profiles are capped at ``pi_plus`` (if finite) to keep the linear
    recursion from overflowing.
    """

    M: int = 600
    tol: float = 1e-3
    radius: float = 8.0
    pi1: float = 1.0
    pi_plus: float = math.inf
    h: float | None = None
    left: float | None = None
    right: float | None = None
    probe: float | None = None
    margin: float = 1e-6
    edge_level: float = 1e-8

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if not self.pi1 > 0:
            raise ValueError("pi1 must be positive")
        if self.pi_plus < self.pi1:
            raise ValueError("pi_plus must be >= pi1")

    @property
    def phi_inf(self) -> float:
        return 0.5 * self.pi1

    def phi(self, s):
        return self.phi_inf * np.clip(-np.asarray(s, dtype=float), 0.0, 1.0)


@dataclass
class OracleState:
    s: np.ndarray
    a: np.ndarray
    m: int
    c: float
    probe: float
    spread: bool

    def value_at(self, s: float) -> float:
        return float(np.interp(s, self.s, self.a))


def _grid(sigma: float, config: OracleConfig, drift: float = 0.0):
    """s-grid; the right end leaves room for M steps of the profile moving at ``drift``."""
    h = config.h or min(0.05, sigma / 10.0)
    s0 = 5.0 * sigma if config.probe is None else config.probe
    left = config.left if config.left is not None else 40.0 * sigma + 1.0
    right = config.right if config.right is not None else s0 + 40.0 * sigma + config.M * max(drift, 0.0)
    s = np.arange(-math.ceil(left / h), math.ceil(right / h) + 1) * h
    return s, h, s0


def _weights(mean: float, sigma: float, c: float, h: float, radius: float):
    """p_k ~ pdf(c + k h) for offsets within ``radius`` sigma, normalized to 1."""
    kmin = math.ceil((mean - c - radius * sigma) / h)
    kmax = math.floor((mean - c + radius * sigma) / h)
    if kmax < kmin:
        raise GridExhausted("s-grid too coarse for the measure")
    y = c + np.arange(kmin, kmax + 1) * h
    p = np.exp(-0.5 * ((y - mean) / sigma) ** 2)
    return p / p.sum(), kmin, kmax


def weinberger_iterate(measure: GaussianMeasure, config: OracleConfig, c: float, e=None,
                       stop_on_spread: bool = False) -> OracleState:
    """Run the recursion for M steps (or until the probe rises, if asked).

    Monotonicity in m and in s is asserted every step, never repaired.
    """
    e = as_direction(np.ones(1) if e is None else e, measure.n)
    mass, mean, var = measure.projected(e)
    sigma = math.sqrt(var)
    drift = mgf_speed_bound(measure, e) - c if mass > 1.0 else 0.0
    s, h, s0 = _grid(sigma, config, drift)
    p, kmin, kmax = _weights(mean, sigma, c, h, config.radius)
    phi = config.phi(s)
    cap = min(config.pi_plus, OVERFLOW_CAP)
    level = config.phi_inf * (1.0 + config.margin)
    i0 = int(np.searchsorted(s, s0))
    # a_new[i] = mass * sum_k p_k a[i - k]; constant extension on the left, zero on the right
    j = np.arange(-kmax, s.size - kmin)
    take = np.clip(j, 0, s.size - 1)
    beyond = j >= s.size
    a = phi.copy()
    m = 0
    spread = False
    for m in range(1, config.M + 1):
        ext = a[take]
        ext[beyond] = 0.0
        full = np.convolve(ext, p, mode="valid")
        new = np.maximum(phi, np.minimum(mass * full, cap))
        scale = max(1.0, float(new.max()))
        if np.any(new < a - 1e-12 * scale):
            raise AssertionError("oracle profile decreased between iterations")
        if np.any(np.diff(new) > 1e-12 * scale):
            raise AssertionError("oracle profile increased in s")
        a = new
        if a[-1] > config.edge_level * config.phi_inf:
            raise GridExhausted(f"profile reached the right end of the s-grid at iteration {m}")
        if a[i0] > level:
            spread = True
            if stop_on_spread:
                break
    return OracleState(s, a, m, c, float(s[i0]), spread)


def mgf_speed_bound(measure: GaussianMeasure, e=None) -> float:
    """min over s > 0 of ln(MGF(s)) / s, found numerically (needs mass > 1)."""
    if measure.mass <= 1.0:
        raise ExtinctionRegime(f"measure mass {measure.mass:.6g} <= 1")
    e = as_direction(np.ones(1) if e is None else e, measure.n)
    _, _, var = measure.projected(e)
    hi = 50.0 * max(1.0, 1.0 / math.sqrt(var))
    _, val = golden_minimum(lambda t: log_mgf_measure(measure, e, t) / t, 1e-4, hi)
    return val


@dataclass
class OracleSpeed:
    c_hat: float
    bracket: tuple
    bound: float
    probes: list


def weinberger_speed(measure: GaussianMeasure, config: OracleConfig = OracleConfig(), e=None) -> OracleSpeed:
    """Bisect c between a spreading and a pinned profile.

    The initial bracket is centred on the MGF bound; it is widened until the
    lower end spreads and the upper end stays pinned.
    """
    if measure.mass <= 1.0:
        raise ExtinctionRegime(f"measure mass {measure.mass:.6g} <= 1")
    e = as_direction(np.ones(1) if e is None else e, measure.n)
    bound = mgf_speed_bound(measure, e)
    width = max(abs(bound), 1.0)
    probes = []

    def spreads(c):
        st = weinberger_iterate(measure, config, c, e, stop_on_spread=True)
        probes.append((c, st.spread, st.m))
        return st.spread

    lo, hi = bound - width, bound + width
    for _ in range(20):
        if spreads(lo):
            break
        lo -= width
    for _ in range(20):
        if not spreads(hi):
            break
        hi += width
    while hi - lo > config.tol * max(1.0, abs(bound)):
        mid = 0.5 * (lo + hi)
        if spreads(mid):
            lo = mid
        else:
            hi = mid
    return OracleSpeed(0.5 * (lo + hi), (lo, hi), bound, probes)


def with_radius(config: OracleConfig, radius: float) -> OracleConfig:
    return replace(config, radius=radius)


def crosscheck_mgf(measure: GaussianMeasure, e, s_list, epsrel: float = 1e-12) -> float:
    """Largest relative gap between quadrature of exp(s x.e) d(measure) and the closed form."""
    e = as_direction(e, measure.n)
    sd = np.sqrt(np.diag(measure.spread))
    worst = 0.0
    for s in s_list:
        s = float(s)
        # centre the window where the tilted integrand lives
        centre = measure.mean + s * measure.spread @ e
        R = 14.0 * sd
        if measure.n == 1:
            val, _ = integrate.quad(
                lambda x: math.exp(s * x * e[0]) * float(measure.density(x)),
                centre[0] - R[0], centre[0] + R[0], epsabs=0.0, epsrel=epsrel, limit=200,
            )
        else:
            def integrand(*x):
                x = np.asarray(x)
                return math.exp(s * float(x @ e)) * float(measure.density(x))

            val, _ = integrate.nquad(
                integrand, [(ci - ri, ci + ri) for ci, ri in zip(centre, R)],
                opts={"epsabs": 0.0, "epsrel": epsrel, "limit": 200},
            )
        ref = mgf_measure(measure, e, s)
        worst = max(worst, abs(val - ref) / ref)
    return worst
