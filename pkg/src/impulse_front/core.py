"""Model parameters, growth laws, stage maps, dispersal kernels and grid fields.

A model couples one continuous season

    u_t = div(A grad u - q u) + f(u),    t in (0, 1],

with a discrete stage map g applied once per generation, either locally
(N -> season(g(N))) or after a nonlocal redistribution by a kernel K
(u -> g(K-average of season(u))).

Kernel convention: a Gaussian kernel stores the matrix B of the density

    K(x) = exp(-<B^{-1}(x - mu), x - mu> / 4) / ((4 pi)^{n/2} sqrt(det B)),

so its statistical covariance is 2B, and its mean is mu.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy import integrate

from impulse_front.exceptions import MonotoneRangeWarning, ValidationError

# ---------------------------------------------------------------------------
# growth laws f
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearGrowth:
    """f(s) = fp0 * s."""

    fp0: float

    def __call__(self, s):
        return self.fp0 * np.asarray(s, dtype=float)

    @property
    def gamma(self) -> float:
        return 0.0

    def flow(self, u0, t: float):
        return np.asarray(u0, dtype=float) * math.exp(self.fp0 * t)

    def positive_zero(self) -> float:
        return math.inf


@dataclass(frozen=True)
class QuadraticGrowth:
    """f(s) = fp0 * s + gamma * s**2 with gamma <= 0."""

    fp0: float
    gamma: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.fp0 * s + self.gamma * s * s

    def flow(self, u0, t: float):
        return _bernoulli_flow(self.fp0, self.gamma, u0, t)

    def positive_zero(self) -> float:
        if self.gamma < 0 and self.fp0 > 0:
            return -self.fp0 / self.gamma
        return math.inf


@dataclass(frozen=True)
class LogisticGrowth:
    """f(s) = r * s * (1 - s)."""

    r: float

    @property
    def fp0(self) -> float:
        return self.r

    @property
    def gamma(self) -> float:
        return -self.r

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.r * s * (1.0 - s)

    def flow(self, u0, t: float):
        return _bernoulli_flow(self.r, -self.r, u0, t)

    def positive_zero(self) -> float:
        return 1.0 if self.r > 0 else math.inf


GrowthSpec = Union[LinearGrowth, QuadraticGrowth, LogisticGrowth]


def _bernoulli_flow(a: float, gamma: float, u0, t: float):
    """Exact time-t solution of u' = a u + gamma u^2 from u0 >= 0."""
    u0 = np.asarray(u0, dtype=float)
    if gamma == 0.0:
        return u0 * math.exp(a * t)
    if a == 0.0:
        return u0 / (1.0 - gamma * u0 * t)
    eat = math.exp(-a * t)
    return a * u0 / ((a + gamma * u0) * eat - gamma * u0)


# ---------------------------------------------------------------------------
# stage maps g
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearMap:
    """g(s) = alpha * s."""

    alpha: float

    def __call__(self, s):
        return self.alpha * np.asarray(s, dtype=float)

    @property
    def gp0(self) -> float:
        return self.alpha

    @property
    def monotone_bound(self) -> float:
        return math.inf

    @property
    def pi_plus(self) -> float:
        return math.inf


@dataclass(frozen=True)
class RickerMap:
    """g(s) = s * exp(beta * (1 - s)); nondecreasing only for s <= 1/beta."""

    beta: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return s * np.exp(self.beta * (1.0 - s))

    @property
    def gp0(self) -> float:
        return math.exp(self.beta)

    @property
    def monotone_bound(self) -> float:
        return 1.0 / self.beta

    @property
    def pi_plus(self) -> float:
        return math.exp(self.beta - 1.0) / self.beta


@dataclass(frozen=True)
class BevertonHoltMap:
    """g(s) = (1 + lam) s / (1 + lam s)."""

    lam: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return (1.0 + self.lam) * s / (1.0 + self.lam * s)

    @property
    def gp0(self) -> float:
        return 1.0 + self.lam

    @property
    def monotone_bound(self) -> float:
        return math.inf

    @property
    def pi_plus(self) -> float:
        return (1.0 + self.lam) / self.lam


@dataclass(frozen=True)
class SkellamMap:
    """g(s) = alpha * (1 - exp(-beta s))."""

    alpha: float
    beta: float

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.alpha * -np.expm1(-self.beta * s)

    @property
    def gp0(self) -> float:
        return self.alpha * self.beta

    @property
    def monotone_bound(self) -> float:
        return math.inf

    @property
    def pi_plus(self) -> float:
        return self.alpha


StageMapSpec = Union[LinearMap, RickerMap, BevertonHoltMap, SkellamMap]


def is_identity_map(g: StageMapSpec) -> bool:
    return isinstance(g, LinearMap) and g.alpha == 1.0


# ---------------------------------------------------------------------------
# dispersal kernels K
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GaussianKernel:
    """Gaussian dispersal density with mean ``mu`` and matrix ``B`` (covariance 2B)."""

    mu: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "B", B)

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def covariance(self) -> np.ndarray:
        return 2.0 * self.B

    def density(self, x) -> np.ndarray:
        """Evaluate K at points ``x`` of shape (..., n)."""
        x = np.asarray(x, dtype=float)
        if self.n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        d = x - self.mu
        Binv = np.linalg.inv(self.B)
        quad = np.einsum("...i,ij,...j->...", d, Binv, d)
        norm = (4.0 * math.pi) ** (self.n / 2) * math.sqrt(np.linalg.det(self.B))
        return np.exp(-0.25 * quad) / norm


@dataclass(frozen=True)
class PointMass:
    """Dirac kernel: the redistribution step is the identity."""


KernelSpec = Union[GaussianKernel, PointMass]


def kernel_mass(kernel: GaussianKernel, radius: float = 10.0) -> float:
    """Adaptive quadrature of the kernel density over mean +- radius standard deviations."""
    sd = np.sqrt(np.diag(kernel.covariance))
    lo = kernel.mu - radius * sd
    hi = kernel.mu + radius * sd
    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
    if kernel.n == 1:
        val, _ = integrate.quad(lambda x: float(kernel.density(x)), lo[0], hi[0], **opts)
        return val
    val, _ = integrate.nquad(
        lambda x, y: float(kernel.density(np.array([x, y]))),
        [(lo[0], hi[0]), (lo[1], hi[1])],
        opts=[opts, opts],
    )
    return val


# ---------------------------------------------------------------------------
# model parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Diffusion matrix, advection, growth law, stage map and optional kernel.

    ``kernel=None`` selects the local model (map before the season);
    a kernel selects the nonlocal model (season, redistribution, map).
    """

    A: np.ndarray
    q: np.ndarray
    growth: GrowthSpec
    map: StageMapSpec
    kernel: KernelSpec | None = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "q", q)

    @classmethod
    def isotropic(cls, d: float, growth, g, q=0.0, n: int = 1, kernel=None) -> "ModelParams":
        q = np.broadcast_to(np.asarray(q, dtype=float), (n,)).copy()
        return cls(A=d * np.eye(n), q=q, growth=growth, map=g, kernel=kernel)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def replace(self, **changes) -> "ModelParams":
        kw = dict(A=self.A, q=self.q, growth=self.growth, map=self.map, kernel=self.kernel)
        kw.update(changes)
        return ModelParams(**kw)


class NetGrowth(NamedTuple):
    rho: float
    extinct: bool


def net_growth(params: ModelParams) -> NetGrowth:
    """rho = f'(0) + ln g'(0); the population dies out when rho <= 0."""
    rho = params.growth.fp0 + math.log(params.map.gp0)
    return NetGrowth(rho, rho <= 0.0)


def eval_map(g: StageMapSpec, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("stage map evaluated at negative density")
    return g(s)


def eval_growth(f: GrowthSpec, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("growth law evaluated at negative density")
    return f(s)


def default_pi_plus(g: StageMapSpec) -> float:
    return g.pi_plus


def clamp_pi1(g: StageMapSpec, pi1: float) -> float:
    """Cap an equilibrium level at the monotone range of ``g`` and warn if capped."""
    s_star = g.monotone_bound
    if pi1 > s_star:
        warnings.warn(
            f"pi1={pi1:.6g} exceeds the monotone range s*={s_star:.6g} of {g!r}; clamped",
            MonotoneRangeWarning,
            stacklevel=2,
        )
        return s_star
    return pi1


def validate(params: ModelParams, pi1: float | None = None, check_kernel_mass: bool = True) -> list[str]:
    """Check the standing assumptions; return one message per violation.

    ``pi1`` is an optional requested equilibrium level, checked against the
    monotone range of the stage map.
    """
    out: list[str] = []
    A, q = params.A, params.q
    n = A.shape[0]

    if A.ndim != 2 or A.shape != (n, n) or n not in (1, 2):
        out.append(f"dimension: A must be 1x1 or 2x2, got shape {A.shape}")
        return out
    if q.shape != (n,):
        out.append(f"dimension: q must have length {n}, got {q.shape}")
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(q))):
        out.append("finite: A and q must be finite")
        return out
    if np.max(np.abs(A - A.T)) > 1e-12:
        out.append("symmetry: diffusion matrix A is not symmetric")
    elif np.min(np.linalg.eigvalsh(A)) <= 0:
        out.append("positive-definite: diffusion matrix A has a nonpositive eigenvalue")

    out.extend(_check_growth(params.growth, params.map))
    out.extend(_check_map(params.map))
    if pi1 is not None and pi1 > params.map.monotone_bound:
        out.append(
            f"monotone-range: requested pi1={pi1:g} exceeds s*={params.map.monotone_bound:g} "
            "where g stops being nondecreasing"
        )

    K = params.kernel
    if isinstance(K, GaussianKernel):
        if K.mu.shape != (n,) or K.B.shape != (n, n):
            out.append("kernel: mu/B dimensions do not match A")
        elif np.max(np.abs(K.B - K.B.T)) > 1e-12 or np.min(np.linalg.eigvalsh(K.B)) <= 0:
            out.append("kernel: B must be symmetric positive definite")
        elif check_kernel_mass and abs(kernel_mass(K) - 1.0) > 1e-10:
            out.append("kernel: density does not integrate to one")
    elif K is not None and not isinstance(K, PointMass):
        out.append(f"kernel: unsupported kernel {K!r}")
    return out


def _check_growth(f: GrowthSpec, g: StageMapSpec) -> list[str]:
    out = []
    if not math.isfinite(f.fp0) or f.fp0 == 0.0:
        out.append("F0: f'(0) must be finite and nonzero")
    if isinstance(f, QuadraticGrowth) and f.gamma > 0:
        out.append("F0: quadratic coefficient gamma must be <= 0")
    if isinstance(f, LogisticGrowth) and f.r <= 0:
        out.append("F0: logistic rate r must be positive")
    top = g.pi_plus if math.isfinite(g.pi_plus) else 2.0
    s = np.linspace(0.0, top, 401)
    f1 = f(s) - f.fp0 * s
    if abs(f1[0]) > 0 or np.any(f1 > 1e-12 * (1.0 + np.abs(f.fp0 * s))):
        out.append("F0: f1(s) = f(s) - f'(0)s must vanish at 0 and be <= 0")
    return out


def _check_map(g: StageMapSpec) -> list[str]:
    out = []
    if not all(math.isfinite(v) and v > 0 for v in vars(g).values()):
        out.append(f"G0: map parameters must be positive, got {g!r}")
        return out
    if float(g(0.0)) != 0.0:
        out.append("G0: g(0) must be 0")
    if not g.gp0 > 0:
        out.append("G0: g'(0) must be positive")
    s_star = g.monotone_bound
    top = s_star if math.isfinite(s_star) else 100.0
    s = np.logspace(-6, math.log10(top), 1000)
    gs = g(s)
    if np.any(np.diff(gs) < -1e-12 * np.abs(gs[1:])):
        out.append("G0: g is not nondecreasing on (0, s*]")
    ratio = gs / s
    if np.any(np.diff(ratio) > 1e-12 * np.abs(ratio[1:])):
        out.append("G0: g(s)/s is not nonincreasing")
    return out


def require_valid(params: ModelParams, **kw) -> None:
    problems = validate(params, **kw)
    if problems:
        raise ValidationError("; ".join(problems))


# ---------------------------------------------------------------------------
# fields on uniform grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Field:
    """Nonnegative density sampled on a uniform grid.

    ``origin[k]`` is the coordinate of the first node along axis k and
    ``spacing[k]`` the node distance.
    """

    values: np.ndarray
    origin: tuple
    spacing: tuple

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        spacing = tuple(float(h) for h in np.atleast_1d(self.spacing))
        if len(origin) != v.ndim or len(spacing) != v.ndim:
            raise ValueError("origin/spacing length must match the array dimension")
        if any(not (h > 0) for h in spacing):
            raise ValueError("grid spacing must be positive")
        if v.size and np.min(v) < 0:
            raise ValueError(f"field has negative values (min {np.min(v):.3g})")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def on_interval(cls, lo, hi, h, fn=None) -> "Field":
        """Grid with nodes lo, lo+h, ..., covering [lo, hi] in every axis."""
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        hi = np.atleast_1d(np.asarray(hi, dtype=float))
        h = np.broadcast_to(np.asarray(h, dtype=float), lo.shape)
        counts = [int(round((b - a) / s)) + 1 for a, b, s in zip(lo, hi, h)]
        f = cls(np.zeros(counts), tuple(lo), tuple(h))
        if fn is not None:
            f = f.with_values(fn(*f.mesh()) if f.ndim > 1 else fn(f.axes()[0]))
        return f

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def axes(self) -> list[np.ndarray]:
        return [o + h * np.arange(m) for o, h, m in zip(self.origin, self.spacing, self.shape)]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def points(self) -> np.ndarray:
        """Node coordinates with shape (*shape, ndim)."""
        return np.stack(self.mesh(), axis=-1)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def mass(self) -> float:
        return float(self.values.sum() * self.cell_volume)

    def with_values(self, values) -> "Field":
        return Field(values, self.origin, self.spacing)

    def same_grid(self, other: "Field") -> bool:
        return (
            self.shape == other.shape
            and np.allclose(self.origin, other.origin)
            and np.allclose(self.spacing, other.spacing)
        )
