"""One continuous season u_t = div(A grad u - q u) + f(u) for t in (0, 1].

Free space is approximated by a periodic box and integrated with Strang
splitting: exact reaction half steps around an exact Fourier step for the
advection-diffusion part. Bounded habitats with hostile boundaries use
a sine-spectral step when A is diagonal and Crank-Nicolson on central
differences otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import fft as sfft
from scipy import sparse
from scipy.sparse.linalg import splu

from impulse_front.core import Field, ModelParams, net_growth
from impulse_front.exceptions import BoundaryContamination, CFLAdvisory

NEG_TOL = 1e-13
EDGE_FRACTION = 0.10
EDGE_LEVEL = 1e-8


@dataclass(frozen=True)
class SeasonConfig:
    """Numerical settings for one season.

    ``half_width`` overrides the automatic free-space box size used when
    building initial data (None: see free_space_half_width).
    ``dirichlet_method`` picks the hostile-boundary scheme: "spectral"
    (diagonal A only), "cn", or "auto", which uses the spectral step
    whenever it is available and well conditioned.
    ``smoothing_steps`` backward-Euler sub-steps replace the first
    Crank-Nicolson step of each hostile-boundary season (Rannacher start);
    zero gives pure Crank-Nicolson. Values below ``noise_floor`` are zeroed
    after each free-space season: round-off in empty regions would otherwise
    grow by g'(0)e^{f'(0)} every generation and seed spurious fronts.
    """

    substeps: int = 16
    half_width: float | None = None
    dirichlet_h: float = 0.05
    splitting: str = "strang"
    smoothing_steps: int = 2
    guard: bool = True
    noise_floor: float = 1e-14
    dirichlet_method: str = "auto"

    def __post_init__(self):
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")
        if self.splitting != "strang":
            raise ValueError("only Strang splitting is implemented")
        if self.dirichlet_method not in ("auto", "spectral", "cn"):
            raise ValueError("dirichlet_method must be auto, spectral or cn")


DEFAULT_CONFIG = SeasonConfig()


# ---------------------------------------------------------------------------
# Green's function of the linear problem
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GreenKernel:
    """Fundamental solution of u_t = div(A grad u) - q.grad u + f'(0) u."""

    A: np.ndarray
    q: np.ndarray
    fp0: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "GreenKernel":
        return cls(params.A, params.q, params.growth.fp0)

    def __call__(self, x, t: float):
        if t <= 0:
            raise ValueError("t must be positive")
        A = np.atleast_2d(self.A)
        n = A.shape[0]
        x = np.asarray(x, dtype=float)
        if n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        z = (x - t * self.q) / math.sqrt(t)
        quad = np.einsum("...i,ij,...j->...", z, np.linalg.inv(A), z)
        pref = math.exp(t * self.fp0) * (2 * math.pi) ** (-n) * t ** (-n / 2)
        pref *= math.pi ** (n / 2) / math.sqrt(np.linalg.det(A))
        return pref * np.exp(-0.25 * quad)

    def mass(self, t: float) -> float:
        return math.exp(t * self.fp0)


def green_eval(params: ModelParams, x, t: float):
    return GreenKernel.from_params(params)(x, t)


# ---------------------------------------------------------------------------
# free space (periodic truncation)
# ---------------------------------------------------------------------------


def check_boundary(field: Field) -> None:
    """Raise if a nonuniform field carries mass near the edge of its periodic box."""
    v = field.values
    peak = float(v.max()) if v.size else 0.0
    if peak == 0.0 or peak - float(v.min()) <= 1e-12 * peak:
        return
    for axis, m in enumerate(v.shape):
        band = max(1, int(math.ceil(EDGE_FRACTION * m)))
        edge = np.concatenate(
            [np.take(v, range(band), axis=axis).ravel(), np.take(v, range(m - band, m), axis=axis).ravel()]
        )
        if edge.max() > EDGE_LEVEL * peak:
            raise BoundaryContamination(
                f"value {edge.max():.3g} within {EDGE_FRACTION:.0%} of the edge along axis {axis} "
                f"exceeds {EDGE_LEVEL:g} x max"
            )


def _clamp(values: np.ndarray, tol: float = NEG_TOL) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 1.0)
    low = float(values.min()) if values.size else 0.0
    if low < -tol * scale:
        raise FloatingPointError(f"season produced a negative density {low:.3g}")
    return np.maximum(values, 0.0)


def _spectral_multiplier(params: ModelParams, field: Field, dt: float) -> np.ndarray:
    shape = field.shape
    freqs = []
    for k, (m, h) in enumerate(zip(shape, field.spacing)):
        if k == len(shape) - 1:
            freqs.append(2 * math.pi * np.fft.rfftfreq(m, d=h))
        else:
            freqs.append(2 * math.pi * np.fft.fftfreq(m, d=h))
    Z = np.meshgrid(*freqs, indexing="ij")
    A, q = params.A, params.q
    quad = sum(A[i, j] * Z[i] * Z[j] for i in range(len(Z)) for j in range(len(Z)))
    drift = sum(q[i] * Z[i] for i in range(len(Z)))
    return np.exp(-dt * (1j * drift + quad))


def advance_free(params: ModelParams, field: Field, config: SeasonConfig = DEFAULT_CONFIG) -> Field:
    """Advance a field on free space (periodic box) from t=0 to t=1."""
    if field.ndim != params.n:
        raise ValueError("field dimension does not match the model")
    if config.guard:
        check_boundary(field)
    u = field.values
    if not u.any():
        return field.with_values(np.zeros_like(u))
    dt = 1.0 / config.substeps
    mult = _spectral_multiplier(params, field, dt)
    flow = params.growth.flow
    axes = tuple(range(u.ndim))
    u = flow(u, 0.5 * dt)
    for k in range(config.substeps):
        u = np.fft.irfftn(mult * np.fft.rfftn(u, axes=axes), s=field.shape, axes=axes)
        u = flow(u, dt if k < config.substeps - 1 else 0.5 * dt)
    u = _clamp(u)
    u[u < config.noise_floor] = 0.0
    out = field.with_values(u)
    if config.guard:
        check_boundary(out)
    return out


def free_space_half_width(params: ModelParams, generations: int, support_radius: float = 0.0,
                          level: float = 1e-9) -> float:
    """Half-width of a periodic box that keeps a run's tails off the edge band.

    Takes the larger of 50 sqrt(2 max eig A), 1.5 x (support + drift over all
    generations), and the radius where a linearized Gaussian upper bound of
    the solution falls below ``level``, pushed outside the edge band.
    """
    lam = float(np.max(np.linalg.eigvalsh(params.A)))
    rho = max(net_growth(params).rho, 0.0)
    D = lam
    drift = float(np.linalg.norm(params.q))
    K = params.kernel
    if K is not None and hasattr(K, "B"):
        D += float(np.max(np.linalg.eigvalsh(K.B)))
        drift += float(np.linalg.norm(K.mu))
    speed = 2.0 * math.sqrt(D * rho) + drift
    m = max(generations, 1)
    base = max(50.0 * math.sqrt(2.0 * lam), 1.5 * (support_radius + speed * m))
    # linear upper bound: exp(rho m) * gaussian(var 2 D m), drifting by drift * m
    var = 2.0 * D * m
    log_amp = rho * m - 0.5 * params.n * math.log(2 * math.pi * var)
    r = math.sqrt(max(2.0 * var * (log_amp - math.log(level)), 0.0))
    tail = support_radius + drift * m + r
    # the edge band spans EDGE_FRACTION of the full width, i.e. twice that of W
    return max(base, tail / (1.0 - 2.0 * EDGE_FRACTION - 0.02))


def free_field(n: int, half_width: float, h: float, fn=None) -> Field:
    """Periodic grid on [-W, W)^n with spacing ``h``; ``fn`` maps coordinates to values."""
    m = int(math.ceil(2 * half_width / h))
    m += m % 2
    W = 0.5 * m * h
    f = Field(np.zeros((m,) * n), (-W,) * n, (h,) * n)
    if fn is not None:
        f = f.with_values(fn(*f.mesh()))
    return f


# ---------------------------------------------------------------------------
# bounded habitat with hostile boundary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned habitat [lower, upper] with u = 0 on its boundary."""

    lower: tuple
    upper: tuple

    @classmethod
    def cube(cls, length: float, n: int = 1) -> "Box":
        return cls((0.0,) * n, (float(length),) * n)

    @property
    def lengths(self) -> tuple:
        return tuple(b - a for a, b in zip(self.lower, self.upper))

    def field(self, h: float, fn=None) -> Field:
        """Grid including boundary nodes; spacing adjusted to divide each side exactly."""
        counts = [max(2, int(round(L / h))) for L in self.lengths]
        spacing = [L / c for L, c in zip(self.lengths, counts)]
        f = Field(np.zeros([c + 1 for c in counts]), self.lower, spacing)
        if fn is not None:
            vals = fn(*f.mesh())
            f = f.with_values(_zero_boundary(np.asarray(vals, dtype=float)))
        return f


def _zero_boundary(v: np.ndarray) -> np.ndarray:
    v = v.copy()
    for axis in range(v.ndim):
        idx = [slice(None)] * v.ndim
        idx[axis] = 0
        v[tuple(idx)] = 0.0
        idx[axis] = -1
        v[tuple(idx)] = 0.0
    return v


def _interior(v: np.ndarray) -> tuple:
    return tuple(slice(1, -1) for _ in range(v.ndim))


def _operator(A: np.ndarray, q: np.ndarray, shape: tuple, spacing: tuple) -> sparse.csc_matrix:
    """Central-difference matrix of div(A grad u) - q.grad u on interior nodes."""
    n = len(shape)
    eyes = [sparse.identity(m, format="csr") for m in shape]
    d1, d2 = [], []
    for m, h in zip(shape, spacing):
        d2.append(sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(m, m)) / h**2)
        d1.append(sparse.diags([-1.0, 1.0], [-1, 1], shape=(m, m)) / (2 * h))

    def along(axis, mat):
        ops = [eyes[k] for k in range(n)]
        ops[axis] = mat
        out = ops[0]
        for op in ops[1:]:
            out = sparse.kron(out, op)
        return out

    L = sparse.csr_matrix((int(np.prod(shape)),) * 2)
    for i in range(n):
        L = L + A[i, i] * along(i, d2[i]) - q[i] * along(i, d1[i])
        for j in range(n):
            if j != i and A[i, j] != 0.0:
                L = L + A[i, j] * (along(i, d1[i]) @ along(j, d1[j]))
    return sparse.csc_matrix(L)


@lru_cache(maxsize=32)
def _stepper(A_key: bytes, q_key: bytes, n: int, shape: tuple, spacing: tuple, dt: float, smooth: int):
    A = np.frombuffer(A_key).reshape(n, n)
    q = np.frombuffer(q_key)
    L = _operator(A, q, shape, spacing)
    I = sparse.identity(L.shape[0], format="csc")
    cn_lhs = splu(sparse.csc_matrix(I - 0.5 * dt * L))
    cn_rhs = sparse.csr_matrix(I + 0.5 * dt * L)
    be = splu(sparse.csc_matrix(I - (dt / smooth) * L)) if smooth else None
    return cn_lhs, cn_rhs, be


# largest range of the exponential weight exp(c.x) we accept in the spectral step
MAX_WEIGHT_RANGE = 10.0


def _spectral_dirichlet_ok(params: ModelParams, field: Field) -> bool:
    A = params.A
    if np.any(A - np.diag(np.diag(A))):
        return False
    c = params.q / (2.0 * np.diag(A))
    span = np.array([h * (m - 1) for h, m in zip(field.spacing, field.shape)])
    return float(np.sum(np.abs(c) * span)) <= MAX_WEIGHT_RANGE


def _dirichlet_spectral(params: ModelParams, field: Field, config: SeasonConfig) -> np.ndarray:
    """Exact advection-diffusion on the box for diagonal A.

    With u = exp(c.x) w and c_i = q_i / (2 A_ii) the drift disappears:
    w_t = sum A_ii w_{x_i x_i} - (sum q_i^2 / (4 A_ii)) w, diagonal in the
    sine basis of the box.
    """
    v = field.values
    inner = _interior(v)
    a = np.diag(params.A)
    c = params.q / (2.0 * a)
    axes = [field.axes()[k][1:-1] - 0.5 * (field.axes()[k][0] + field.axes()[k][-1]) for k in range(field.ndim)]
    grids = np.meshgrid(*axes, indexing="ij")
    weight = np.exp(sum(ci * g for ci, g in zip(c, grids)))
    lam = float(np.sum(params.q**2 / (4.0 * a)))
    waves = []
    for k, (m, h) in enumerate(zip(field.shape, field.spacing)):
        L = h * (m - 1)
        waves.append(a[k] * (math.pi * np.arange(1, m - 1) / L) ** 2)
    rate = sum(np.meshgrid(*waves, indexing="ij")) + lam
    dt = 1.0 / config.substeps
    mult = np.exp(-dt * rate)
    flow = params.growth.flow
    u = v[inner]
    for k in range(config.substeps):
        u = flow(u, 0.5 * dt)
        w = sfft.dstn(u / weight, type=1)
        u = weight * sfft.idstn(mult * w, type=1)
        u = flow(_clamp(u, 1e-9), 0.5 * dt)
    out = np.zeros_like(v)
    out[inner] = _clamp(u, 1e-9)
    return out


def advance_dirichlet(params: ModelParams, field: Field, box: Box | None = None,
                      config: SeasonConfig = DEFAULT_CONFIG) -> Field:
    """Advance a field vanishing on the boundary of its box from t=0 to t=1."""
    v = field.values
    if box is not None:
        far = [o + h * (m - 1) for o, h, m in zip(field.origin, field.spacing, field.shape)]
        if not (np.allclose(field.origin, box.lower) and np.allclose(far, box.upper)):
            raise ValueError("field grid does not span the box")
    if field.ndim != params.n:
        raise ValueError("field dimension does not match the model")
    if not v.any():
        return field.with_values(np.zeros_like(v))
    for k in range(params.n):
        pe = abs(params.q[k]) * field.spacing[k] / (2.0 * params.A[k, k])
        if pe > 1.0:
            warnings.warn(f"cell Peclet number {pe:.3g} > 1 along axis {k}", CFLAdvisory, stacklevel=2)

    method = config.dirichlet_method
    if method == "spectral" or (method == "auto" and _spectral_dirichlet_ok(params, field)):
        if np.any(params.A - np.diag(np.diag(params.A))):
            raise ValueError("the spectral box step needs a diagonal A")
        return field.with_values(_dirichlet_spectral(params, field, config))

    inner = _interior(v)
    shape = v[inner].shape
    dt = 1.0 / config.substeps
    smooth = config.smoothing_steps
    cn_lhs, cn_rhs, be = _stepper(
        np.ascontiguousarray(params.A).tobytes(), np.ascontiguousarray(params.q).tobytes(),
        params.n, shape, tuple(field.spacing), dt, smooth,
    )
    flow = params.growth.flow
    u = v[inner].ravel()
    for k in range(config.substeps):
        u = flow(u, 0.5 * dt)
        if k == 0 and smooth:
            for _ in range(smooth):
                u = be.solve(u)
        else:
            u = cn_lhs.solve(cn_rhs @ u)
        # Crank-Nicolson is not positivity preserving at high cell Peclet numbers
        u = flow(np.maximum(u, 0.0), 0.5 * dt)
    out = np.zeros_like(v)
    out[inner] = np.maximum(u, 0.0).reshape(shape)
    return field.with_values(out)
