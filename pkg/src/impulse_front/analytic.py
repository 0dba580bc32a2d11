"""Closed-form spreading speeds, ray speeds, critical sizes and nonspatial equilibria."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from impulse_front.core import (
    BevertonHoltMap,
    GaussianKernel,
    LinearGrowth,
    LinearMap,
    LogisticGrowth,
    ModelParams,
    PointMass,
    StageMapSpec,
    GrowthSpec,
    is_identity_map,
    net_growth,
)
from impulse_front.exceptions import (
    AnisotropyUnsupported,
    ExtinctionRegime,
    KernelUnsupported,
    NoPersistenceWindow,
    QuadratureSingularity,
)

# ---------------------------------------------------------------------------
# directions
# ---------------------------------------------------------------------------


def as_direction(e, n: int) -> np.ndarray:
    """Return ``e`` as a unit vector of length ``n``; raise if it is not unit."""
    e = np.atleast_1d(np.asarray(e, dtype=float))
    if e.shape != (n,):
        raise ValueError(f"direction must have length {n}, got shape {e.shape}")
    if abs(np.linalg.norm(e) - 1.0) > 1e-12:
        raise ValueError(f"direction {e} is not a unit vector")
    return e


def direction_from_angle(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def _rho_or_raise(params: ModelParams) -> float:
    rho, extinct = net_growth(params)
    if extinct:
        raise ExtinctionRegime(
            f"extinction regime: g'(0) exp(f'(0)) = {math.exp(rho):.6g} <= 1"
        )
    return rho


# ---------------------------------------------------------------------------
# linearized measures and their moment generating functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GaussianMeasure:
    """Total mass times a normal density with the given mean and covariance ``spread``."""

    mass: float
    mean: np.ndarray
    spread: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", np.atleast_1d(np.asarray(self.mean, dtype=float)))
        object.__setattr__(self, "spread", np.atleast_2d(np.asarray(self.spread, dtype=float)))
        if not self.mass > 0:
            raise ValueError("measure mass must be positive")
        if np.min(np.linalg.eigvalsh(self.spread)) <= 0:
            raise ValueError("measure spread must be positive definite")

    @property
    def n(self) -> int:
        return self.mean.size

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        d = x - self.mean
        P = np.linalg.inv(self.spread)
        quad = np.einsum("...i,ij,...j->...", d, P, d)
        norm = (2.0 * math.pi) ** (self.n / 2) * math.sqrt(np.linalg.det(self.spread))
        return self.mass * np.exp(-0.5 * quad) / norm

    def projected(self, e) -> tuple[float, float, float]:
        """Mass, mean and variance of the push-forward under x -> x.e."""
        e = as_direction(e, self.n)
        return self.mass, float(e @ self.mean), float(e @ self.spread @ e)


def measure_m(params: ModelParams) -> GaussianMeasure:
    """Kernel of the linearized local operator: mass g'(0)e^{f'(0)}, mean q, covariance 2A."""
    mass = params.map.gp0 * math.exp(params.growth.fp0)
    return GaussianMeasure(mass, params.q, 2.0 * params.A)


def measure_l(params: ModelParams) -> GaussianMeasure:
    """Kernel of the linearized nonlocal operator: mean q - mu, covariance 2(A + B)."""
    K = params.kernel
    if K is None:
        raise KernelUnsupported("the local model has no dispersal kernel")
    mass = params.map.gp0 * math.exp(params.growth.fp0)
    if isinstance(K, PointMass):
        return GaussianMeasure(mass, params.q, 2.0 * params.A)
    if not isinstance(K, GaussianKernel):
        raise KernelUnsupported(f"no closed form for kernel {K!r}")
    return GaussianMeasure(mass, params.q - K.mu, 2.0 * (params.A + K.B))


def mgf_measure(meas: GaussianMeasure, e, s: float) -> float:
    """Integral of exp(s x.e) against the measure."""
    mass, mean, var = meas.projected(e)
    return mass * math.exp(s * mean + 0.5 * s * s * var)


def log_mgf_measure(meas: GaussianMeasure, e, s: float) -> float:
    mass, mean, var = meas.projected(e)
    return math.log(mass) + s * mean + 0.5 * s * s * var


def kernel_mgf(kernel, e, s: float) -> float:
    """k(s) = integral of K(x) exp(-s x.e) dx."""
    if isinstance(kernel, PointMass):
        return 1.0
    e = as_direction(e, kernel.n)
    return math.exp(-s * float(kernel.mu @ e) + s * s * float(e @ kernel.B @ e))


# ---------------------------------------------------------------------------
# spreading speeds
# ---------------------------------------------------------------------------


def speed_local(params: ModelParams, e) -> float:
    """c*(e) = 2 sqrt(<Ae,e>) sqrt(f'(0) + ln g'(0)) + e.q."""
    rho = _rho_or_raise(params)
    e = as_direction(e, params.n)
    return 2.0 * math.sqrt(float(e @ params.A @ e)) * math.sqrt(rho) + float(e @ params.q)


def speed_nonlocal(params: ModelParams, e) -> float:
    """Speed with a Gaussian kernel: 2 sqrt(<(A+B)e,e>) sqrt(rho) + e.(q - mu)."""
    rho = _rho_or_raise(params)
    e = as_direction(e, params.n)
    K = params.kernel
    if isinstance(K, PointMass):
        return speed_local(params.replace(kernel=None), e)
    if not isinstance(K, GaussianKernel):
        raise KernelUnsupported(f"no closed-form speed for kernel {K!r}")
    AB = params.A + K.B
    return 2.0 * math.sqrt(float(e @ AB @ e)) * math.sqrt(rho) + float(e @ (params.q - K.mu))


def speed(params: ModelParams, e) -> float:
    """Closed-form speed for whichever model ``params`` describes."""
    if params.kernel is None:
        return speed_local(params, e)
    return speed_nonlocal(params, e)


@dataclass(frozen=True)
class SpeedProfile:
    W: Callable[[float], float]
    s_star: float
    c_star: float


def speed_profile(params: ModelParams, e) -> SpeedProfile:
    """W(s) = ln(mass)/s + e.mean + s <Ae,e>, its minimizer and minimum."""
    rho = _rho_or_raise(params)
    meas = measure_m(params) if params.kernel is None else measure_l(params)
    _, mean, var = meas.projected(e)
    a = 0.5 * var

    def W(s):
        s = np.asarray(s, dtype=float)
        return rho / s + mean + s * a

    s_star = math.sqrt(rho / a)
    return SpeedProfile(W=W, s_star=s_star, c_star=float(W(s_star)))


def golden_minimum(fun, lo: float, hi: float, n_scan: int = 400, log: bool = True, tol: float = 1e-10):
    """Scan ``fun`` on [lo, hi] and refine the best cell by golden-section search."""
    xs = np.geomspace(lo, hi, n_scan) if log else np.linspace(lo, hi, n_scan)
    vals = np.array([fun(x) for x in xs])
    k = int(np.argmin(vals))
    k = min(max(k, 1), n_scan - 2)
    x = optimize.golden(fun, brack=(xs[k - 1], xs[k], xs[k + 1]), tol=tol)
    return float(x), float(fun(x))


# ---------------------------------------------------------------------------
# critical domain size
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticalDomainReport:
    size: float
    regime: str
    blowup_advection: float


def _isotropic_d(params: ModelParams) -> float:
    d = float(params.A[0, 0])
    if np.max(np.abs(params.A - d * np.eye(params.n))) > 1e-12 * max(1.0, abs(d)):
        raise AnisotropyUnsupported("critical domain size needs A = d I")
    return d


def critical_size(params: ModelParams, shape: str = "hypercube") -> CriticalDomainReport:
    """Side length of the smallest hostile-boundary hypercube (or interval) that sustains growth.

    Lambda* = 2 pi d sqrt(n / (4 d rho - |q|^2)); infinite when the
    denominator is not positive, including the equality case.
    """
    if shape not in ("interval", "hypercube"):
        raise ValueError(f"unknown shape {shape!r}")
    d = _isotropic_d(params)
    n = 1 if shape == "interval" else params.n
    if shape == "interval" and params.n != 1:
        raise ValueError("interval shape needs a one-dimensional model")
    rho = net_growth(params).rho
    qn = float(np.linalg.norm(params.q))
    blowup = 2.0 * math.sqrt(d * rho) if rho > 0 else 0.0
    # compare |q| with the blow-up value directly so both agree to the last bit
    if qn >= blowup:
        return CriticalDomainReport(math.inf, "infinite", blowup)
    den = (blowup - qn) * (blowup + qn)
    return CriticalDomainReport(2.0 * math.pi * d * math.sqrt(n / den), "finite", blowup)


def box_persists(params: ModelParams, lengths) -> bool:
    """Principal-eigenvalue test on a hostile-boundary box of side lengths ``lengths``.

    Growth beats loss when rho - d pi^2 sum 1/L_i^2 - |q|^2/(4d) > 0.
    """
    d = _isotropic_d(params)
    L = np.atleast_1d(np.asarray(lengths, dtype=float))
    if L.size != params.n:
        raise ValueError("one length per dimension")
    rho = net_growth(params).rho
    return rho - d * math.pi**2 * float(np.sum(1.0 / L**2)) - float(params.q @ params.q) / (4.0 * d) > 0


def critical_length_fisher(d: float, fp0: float, q: float = 0.0) -> float:
    """Classical Fisher critical length on (0, L) without a stage map."""
    den = 4.0 * d * fp0 - q * q
    return 2.0 * math.pi * d / math.sqrt(den) if den > 0 else math.inf


# ---------------------------------------------------------------------------
# ray speed
# ---------------------------------------------------------------------------


def ray_speed(params: ModelParams, e, n_scan: int = 720, tol: float = 1e-10) -> float:
    """Minimum over unit e~ with e.e~ > 0 of c*(e~) / (e.e~).

    Coarse scan of the open half circle, then bounded Brent refinement around
    the best scan point.
    Returns -inf when negative speeds make the ratio unbounded below.
    """
    _rho_or_raise(params)
    e = as_direction(e, params.n)
    if params.n == 1:
        return speed(params, e)

    theta = math.atan2(e[1], e[0])

    def ratio(psi):
        return speed(params, direction_from_angle(theta + psi)) / math.cos(psi)

    half = 0.5 * math.pi
    psis = -half + (np.arange(n_scan) + 0.5) * (math.pi / n_scan)
    vals = np.array([ratio(p) for p in psis])
    k = int(np.argmin(vals))
    if vals[k] < 0 and k in (0, n_scan - 1):
        return -math.inf
    lo = psis[k - 1] if k > 0 else -half + 1e-15
    hi = psis[k + 1] if k < n_scan - 1 else half - 1e-15
    res = optimize.minimize_scalar(ratio, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    return float(min(res.fun, vals[k]))


def ray_speed_diagonal(a11: float, a22: float, rho: float, theta: float) -> float:
    """Closed-form ray speed for A = diag(a11^2, a22^2), q = 0, e = (cos, sin)."""
    s, c = math.sin(theta), math.cos(theta)
    return 2.0 * math.sqrt(a11**2 * a22**2 / (a11**2 * s * s + a22**2 * c * c)) * math.sqrt(rho)


# ---------------------------------------------------------------------------
# nonspatial dynamics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EquilibriumInfo:
    pi0: float
    pi1: float
    pi_plus: float
    extinct: bool


def season_integral(f: GrowthSpec, a: float, b: float) -> float:
    """Integral of 1/f from a to b; raises if f vanishes on the closed interval."""
    lo, hi = min(a, b), max(a, b)
    if lo <= 0.0:
        raise QuadratureSingularity("integration interval touches zero")
    z = f.positive_zero()
    if lo <= z <= hi:
        raise QuadratureSingularity(f"f vanishes at {z} inside [{lo}, {hi}]")
    if a == b:
        return 0.0
    val, _ = integrate.quad(lambda w: 1.0 / float(f(w)), a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def _equilibrium_candidates(z: float, top: float, eps: float) -> np.ndarray:
    pts = [eps * 2.0**k for k in range(200) if eps * 2.0**k <= top]
    if math.isfinite(z):
        for k in range(1, 15):
            pts.append(z * (1.0 - 10.0**-k))
            pts.append(z * (1.0 + 10.0**-k))
    return np.unique(np.array(pts))


def equilibrium_nonspatial(params: ModelParams, eps: float = 1e-12) -> EquilibriumInfo:
    """Positive constant equilibrium N* with integral_{g(N)}^{N} dw / f(w) = 1.

    Root-finds the residual by Brent's method inside the first sign-changing
    bracket of an upward doubling search from ``eps``.
    """
    rho = _rho_or_raise(params)
    f, g = params.growth, params.map
    z = f.positive_zero()
    pi_plus = g.pi_plus
    if is_identity_map(g):
        return EquilibriumInfo(0.0, z, pi_plus, False)
    # the integral degenerates when the season zero is itself a fixed point of g
    if math.isfinite(z) and abs(float(g(z)) - z) <= 1e-13 * z:
        return EquilibriumInfo(0.0, z, pi_plus, False)

    def residual(N):
        return season_integral(f, float(g(N)), N) - 1.0

    def region(x):
        return 0 if x < z else 1

    top = max(1e6, 4.0 * z if math.isfinite(z) else 0.0)
    prev = None
    for N in _equilibrium_candidates(z, top, eps):
        gN = float(g(N))
        if region(N) != region(gN) or N == z or gN == z:
            prev = None
            continue
        r = residual(N)
        if prev is not None and region(prev[0]) == region(N) and np.sign(r) != np.sign(prev[1]):
            root = optimize.brentq(residual, prev[0], N, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            return EquilibriumInfo(0.0, root, pi_plus, False)
        if r == 0.0:
            return EquilibriumInfo(0.0, N, pi_plus, False)
        prev = (N, r)
    raise QuadratureSingularity(f"no equilibrium bracket found (rho={rho:.4g})")


def season_flow(params: ModelParams, u0, t: float = 1.0):
    """Exact solution of u' = f(u) after time ``t``."""
    return params.growth.flow(u0, t)


def nonspatial_iterate(params: ModelParams, U0: float, m: int) -> np.ndarray:
    """U_1..U_m of U -> season(g(U)); every growth family here has an exact season map."""
    if U0 < 0:
        raise ValueError("U0 must be nonnegative")
    out = np.empty(m)
    U = float(U0)
    for k in range(m):
        U = float(season_flow(params, params.map(U)))
        out[k] = U
    return out


def quadratic_closed_form_step(fp0: float, gamma: float, gU: float) -> float:
    """Lewis-Li one-season update with f(u) = fp0 u + gamma u^2, starting from g(U)."""
    return fp0 * gU / ((math.exp(-fp0) - 1.0) * gamma * gU + fp0 * math.exp(-fp0))


# ---------------------------------------------------------------------------
# application scenarios
# ---------------------------------------------------------------------------


@dataclass
class ClimateReport:
    c_max: float
    speed_bound_sq: float
    c: float | None = None
    persists: bool | None = None
    speeds: tuple | None = None
    speeds_positive: bool | None = None


def climate_bounds(d: float, log_gain: float, gamma: float, L1: float, L2: float,
                   c: float | None = None) -> ClimateReport:
    """Largest climate-shift speed a moving L1 x L2 patch can sustain.

    ``log_gain`` is ln(1 + lambda) of the Beverton-Holt map and ``gamma`` the
    mortality rate.
    """
    rad = 4.0 * d * (log_gain - gamma) - 4.0 * d * d * math.pi**2 * (L1**2 + L2**2) / (L1**2 * L2**2)
    if rad <= 0:
        raise NoPersistenceWindow(f"no persistence window: radicand {rad:.6g} <= 0")
    rep = ClimateReport(c_max=math.sqrt(rad), speed_bound_sq=rad)
    if c is not None:
        base = 2.0 * math.sqrt(d * (log_gain - gamma))
        rep.c = c
        rep.persists = c * c < rad
        rep.speeds = (base + c, base - c)
        rep.speeds_positive = min(rep.speeds) > 0
    return rep


def climate_persists(d: float, log_gain: float, gamma: float, c: float, L1: float, L2: float) -> bool:
    """Persistence inequality for the moving L1 x L2 patch (strict)."""
    rhs = (log_gain - gamma - c * c / (4.0 * d)) / (d * math.pi**2)
    return 1.0 / L1**2 + 1.0 / L2**2 < rhs


def climate_params(d: float, log_gain: float, gamma: float, c: float = 0.0, n: int = 2) -> ModelParams:
    q = np.zeros(n)
    q[0] = c
    return ModelParams(d * np.eye(n), q, LinearGrowth(-gamma), BevertonHoltMap(math.expm1(log_gain)))


@dataclass
class StreamReport:
    persists: bool
    spreads_both: bool
    threshold: float
    speeds: tuple | None


def stream_bounds(d: float, sigma2: float, r: float, q: float, mu: float, lam: float) -> StreamReport:
    persists = (1.0 + lam) * math.exp(-r) > 1.0
    threshold = math.exp(r + (q - mu) ** 2 / (4.0 * (d + sigma2)))
    speeds = None
    if persists:
        base = 2.0 * math.sqrt(d + sigma2) * math.sqrt(math.log1p(lam) - r)
        speeds = (base + (q - mu), base - (q - mu))
    return StreamReport(persists, lam + 1.0 > threshold, threshold, speeds)


def stream_params(d: float, sigma2: float, r: float, q: float, mu: float, lam: float) -> ModelParams:
    return ModelParams(
        [[d]], [q], LinearGrowth(-r), BevertonHoltMap(lam),
        kernel=GaussianKernel([mu], [[sigma2]]),
    )


@dataclass
class SavannahReport:
    persists: bool
    N_star: float | None
    theta: np.ndarray = field(default_factory=lambda: np.empty(0))
    c_star: np.ndarray = field(default_factory=lambda: np.empty(0))
    C: np.ndarray = field(default_factory=lambda: np.empty(0))
    C_closed: np.ndarray | None = None


def savannah_params(r: float, s: float, a11: float, a22: float, q=(0.0, 0.0)) -> ModelParams:
    """Logistic grass with survival fraction 1 - s after fire; A = diag(a11^2, a22^2)."""
    return ModelParams(np.diag([a11**2, a22**2]), np.asarray(q, float), LogisticGrowth(r), LinearMap(1.0 - s))


def savannah_N_star(r: float, s: float) -> float:
    return ((1.0 - s) * math.exp(r) - 1.0) / ((1.0 - s) * math.expm1(r))


def savannah_bounds(r: float, s: float, a11: float, a22: float, q=(0.0, 0.0),
                    step_deg: float = 1.0) -> SavannahReport:
    persists = math.exp(r) * (1.0 - s) > 1.0
    if not persists:
        return SavannahReport(False, None)
    params = savannah_params(r, s, a11, a22, q)
    theta = np.deg2rad(np.arange(0.0, 90.0 + 0.5 * step_deg, step_deg))
    cs = np.array([speed_local(params, direction_from_angle(t)) for t in theta])
    C = np.array([ray_speed(params, direction_from_angle(t)) for t in theta])
    closed = None
    if not np.any(np.asarray(q, float)):
        rho = net_growth(params).rho
        closed = np.array([ray_speed_diagonal(a11, a22, rho, t) for t in theta])
    return SavannahReport(True, savannah_N_star(r, s), theta, cs, C, closed)
