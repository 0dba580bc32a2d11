"""Full generation operators, multi-generation runs, front tracking and persistence.

Local model:    N_{m+1} = Q[N_m],  Q[N] = season(g(N)).
Nonlocal model: u_{m+1} = P[u_m],  P[u](x) = g( integral K(y - x) season(u)(y) dy ).

The nonlocal redistribution pairs the kernel with y - x, so a kernel with mean
mu moves mass by -mu; together with the season drift q this matches the
speed formula built from the mean q - mu.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import ndimage

from impulse_front import analytic
from impulse_front.core import Field, GaussianKernel, ModelParams, PointMass
from impulse_front.exceptions import (
    BoundaryContamination,
    BracketInvalid,
    ExtinctionRegime,
    FrontNotFound,
    InsufficientGenerations,
    KernelGridMismatch,
)
from impulse_front.season import (
    DEFAULT_CONFIG,
    Box,
    SeasonConfig,
    advance_dirichlet,
    advance_free,
    free_field,
    free_space_half_width,
)

KERNEL_TAIL = 1e-14


# ---------------------------------------------------------------------------
# one generation
# ---------------------------------------------------------------------------


def _season(params: ModelParams, field: Field, config: SeasonConfig, box: Box | None) -> Field:
    if box is None:
        return advance_free(params, field, config)
    return advance_dirichlet(params, field, box, config)


def generation_Q(params: ModelParams, N: Field, config: SeasonConfig = DEFAULT_CONFIG,
                 box: Box | None = None) -> Field:
    """Local generation: stage map pointwise, then one season."""
    if params.kernel is not None and not isinstance(params.kernel, PointMass):
        raise ValueError("generation_Q is the local model; params carry a dispersal kernel")
    return _season(params, N.with_values(params.map(N.values)), config, box)


def kernel_weights(kernel: GaussianKernel, field: Field) -> np.ndarray:
    """Discrete weights w[j] ~ K(-z_j) on the periodic offsets z_j of the grid, summing to 1.

    Index 0 is the zero offset (FFT layout), so circular convolution with
    ``w`` evaluates sum_y K(y - x) u(y).
    """
    if kernel.n != field.ndim:
        raise KernelGridMismatch("kernel and field dimensions differ")
    offs = []
    for m, h in zip(field.shape, field.spacing):
        k = np.arange(m)
        offs.append(np.where(k < m // 2, k, k - m) * h)
    Z = np.stack(np.meshgrid(*offs, indexing="ij"), axis=-1)
    w = kernel.density(-Z)
    peak = float(w.max())
    if peak <= 0:
        raise KernelGridMismatch("kernel is not resolved by the grid")
    # mass on the outermost offsets means the kernel wraps around the box
    for axis in range(field.ndim):
        m = field.shape[axis]
        rim = np.take(w, [m // 2, (m // 2) - 1 if m > 1 else 0], axis=axis)
        if rim.max() > KERNEL_TAIL * peak:
            raise KernelGridMismatch(f"kernel support exceeds the grid half-width along axis {axis}")
    return w / w.sum()


def convolve_kernel(kernel, field: Field) -> Field:
    """Redistribute a field by the kernel; the grid sum is preserved."""
    if kernel is None or isinstance(kernel, PointMass):
        return field
    w = kernel_weights(kernel, field)
    axes = tuple(range(field.ndim))
    v = np.fft.irfftn(np.fft.rfftn(field.values, axes=axes) * np.fft.rfftn(w, axes=axes),
                      s=field.shape, axes=axes)
    scale = max(1.0, float(np.abs(field.values).max()))
    if v.min() < -1e-12 * scale:
        raise FloatingPointError(f"kernel convolution produced {v.min():.3g}")
    return field.with_values(np.maximum(v, 0.0))


def generation_P(params: ModelParams, u: Field, config: SeasonConfig = DEFAULT_CONFIG) -> Field:
    """Nonlocal generation: season, redistribution by the kernel, stage map."""
    if params.kernel is None:
        raise ValueError("generation_P needs a dispersal kernel (PointMass for none)")
    after = advance_free(params, u, config)
    moved = convolve_kernel(params.kernel, after)
    return moved.with_values(params.map(moved.values))


def generation(params: ModelParams, field: Field, config: SeasonConfig = DEFAULT_CONFIG,
               box: Box | None = None) -> Field:
    """P when the model carries a kernel, Q otherwise."""
    if params.kernel is None:
        return generation_Q(params, field, config, box)
    if box is not None:
        raise ValueError("the nonlocal model is defined on free space only")
    return generation_P(params, field, config)


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


@dataclass
class Trajectory:
    """Fields for generations 0..M (index 0 is the initial data)."""

    fields: list
    params: ModelParams
    aborted: bool = False
    reason: str = ""

    @property
    def generations(self) -> np.ndarray:
        return np.arange(len(self.fields))

    def __len__(self) -> int:
        return len(self.fields)

    def __getitem__(self, m: int) -> Field:
        return self.fields[m]

    def maxima(self) -> np.ndarray:
        return np.array([float(f.values.max()) for f in self.fields])


def run(params: ModelParams, initial: Field, M: int, config: SeasonConfig = DEFAULT_CONFIG,
        box: Box | None = None, callback=None) -> Trajectory:
    """Iterate the generation operator M times.

    Stops early, keeping the partial trajectory, if mass reaches the edge of
    a periodic box. ``callback(m, field)`` may return True to stop.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    traj = Trajectory([initial], params)
    f = initial
    for m in range(1, M + 1):
        try:
            f = generation(params, f, config, box)
        except BoundaryContamination as exc:
            traj.aborted = True
            traj.reason = str(exc)
            break
        traj.fields.append(f)
        if callback is not None and callback(m, f):
            break
    return traj


def equilibrium_level(params: ModelParams) -> float:
    """Positive constant state of the recursion: N* for Q, g(N*) for P."""
    info = analytic.equilibrium_nonspatial(params)
    if params.kernel is None:
        return info.pi1
    return float(params.map(info.pi1))


def initial_ball(params: ModelParams, h: float = 0.05, generations: int = 30, radius: float | None = None,
                 level: float | None = None, half_width: float | None = None) -> Field:
    """Ball of radius 5h (default) at half the equilibrium level, mollified over two cells."""
    R = 5 * h if radius is None else radius
    amp = 0.5 * equilibrium_level(params) if level is None else level
    W = half_width or free_space_half_width(params, generations, support_radius=R + h)

    def fn(*xs):
        r = np.sqrt(sum(x**2 for x in xs))
        return amp * np.clip((R + h - r) / (2 * h), 0.0, 1.0)

    return free_field(params.n, W, h, fn)


# ---------------------------------------------------------------------------
# front tracking and speed estimates
# ---------------------------------------------------------------------------


def _crossing_1d(x: np.ndarray, v: np.ndarray, threshold: float, forward: bool) -> float:
    above = np.nonzero(v >= threshold)[0]
    if above.size == 0:
        raise FrontNotFound(f"field never reaches {threshold:.3g}")
    if forward:
        i = above[-1]
        if i == v.size - 1:
            raise FrontNotFound("field stays above threshold up to the grid edge")
        j = i + 1
    else:
        i = above[0]
        if i == 0:
            raise FrontNotFound("field stays above threshold up to the grid edge")
        j = i - 1
    return float(x[i] + (v[i] - threshold) / (v[i] - v[j]) * (x[j] - x[i]))


def front_position(field: Field, threshold: float, e, origin=None, step: float | None = None) -> float:
    """Projection x.e of the outermost threshold crossing along direction e.

    In 1D e is +1 or -1. In 2D the field is sampled (bilinearly) along the
    ray origin + t e; ``origin`` defaults to 0 and must lie in the populated set.
    """
    e = analytic.as_direction(e, field.ndim)
    if field.ndim == 1:
        x = field.axes()[0]
        pos = _crossing_1d(x, field.values, threshold, e[0] > 0)
        return pos * float(e[0])
    o = np.zeros(field.ndim) if origin is None else np.asarray(origin, dtype=float)
    h = min(field.spacing)
    dt = h / 4 if step is None else step
    lo = np.asarray(field.origin)
    hi = lo + (np.asarray(field.shape) - 1) * np.asarray(field.spacing)
    with np.errstate(divide="ignore"):
        tmax = np.min(np.where(e > 0, (hi - o) / e, np.where(e < 0, (lo - o) / e, np.inf)))
    t = np.arange(0.0, tmax, dt)
    pts = o[None, :] + t[:, None] * e[None, :]
    idx = ((pts - lo) / np.asarray(field.spacing)).T
    v = ndimage.map_coordinates(field.values, idx, order=1, mode="nearest")
    if v[0] < threshold:
        raise FrontNotFound("ray origin is not in the populated region")
    return float(o @ e) + _crossing_1d(t, v, threshold, True)


@dataclass
class SpeedReport:
    e: np.ndarray
    analytic: float
    slope: float
    residual: float
    generations_used: int
    threshold: float
    slope_alt: float = math.nan
    threshold_alt: float = math.nan
    log_corrected: float = math.nan
    positions: np.ndarray = dc_field(default_factory=lambda: np.empty(0))

    @property
    def relative_error(self) -> float:
        return abs(self.slope - self.analytic) / abs(self.analytic)


def _positions(traj: Trajectory, gens, threshold, e, origin):
    return np.array([front_position(traj[m], threshold, e, origin) for m in gens])


def _fit(gens, pos):
    coef = np.polyfit(gens, pos, 1)
    res = pos - np.polyval(coef, gens)
    return float(coef[0]), float(np.sqrt(np.mean(res**2)))


def _log_corrected(gens, pos):
    # pulled fronts from compact data lag like -k ln m; fit a + c m - k ln m
    keep = gens >= 1
    g = gens[keep].astype(float)
    if g.size < 4:
        return math.nan
    X = np.column_stack([np.ones_like(g), g, np.log(g)])
    return float(np.linalg.lstsq(X, pos[keep], rcond=None)[0][1])


def estimate_speed(traj: Trajectory, e, threshold: float | None = None, burn_in_fraction: float = 0.4,
                   origin=None) -> SpeedReport:
    """Least-squares slope of the front position over the post-burn-in generations.

    Also refits at a tenth of the equilibrium level (a front-shape check) and
    reports a slope corrected for the logarithmic lag of pulled fronts.
    """
    params = traj.params
    e = analytic.as_direction(e, params.n)
    M = len(traj) - 1
    k0 = int(math.ceil(burn_in_fraction * M))
    gens = np.arange(k0, M + 1)
    if gens.size < 5:
        raise InsufficientGenerations(f"{gens.size} generations after burn-in, need >= 5")
    try:
        level = equilibrium_level(params)
    except ExtinctionRegime:
        level = float(traj[0].values.max())
    thr = 0.5 * level if threshold is None else threshold
    pos = _positions(traj, gens, thr, e, origin)
    slope, resid = _fit(gens, pos)
    try:
        c = analytic.speed(params, e)
    except ExtinctionRegime:
        c = math.nan
    report = SpeedReport(e, c, slope, resid, int(gens.size), thr, positions=pos)
    report.log_corrected = _log_corrected(gens, pos)
    alt = 0.1 * level if threshold is None else 0.2 * threshold
    try:
        report.slope_alt = _fit(gens, _positions(traj, gens, alt, e, origin))[0]
        report.threshold_alt = alt
    except FrontNotFound:
        pass
    return report


def shifted_profile_difference(prev: Field, nxt: Field, shift: float, e: float = 1.0) -> float:
    """Max-norm of nxt(x + shift e) - prev(x) over the half-line x e >= 0 of a 1D grid.

    Only the front moving in direction e is compared; the opposite front
    moves the other way and is left out.
    """
    if prev.ndim != 1 or not prev.same_grid(nxt):
        raise ValueError("needs two 1D fields on one grid")
    sgn = 1.0 if float(np.ravel(e)[0]) > 0 else -1.0
    x = prev.axes()[0]
    keep = x * sgn >= 0
    back = np.interp(x[keep] + sgn * shift, x, nxt.values, left=0.0, right=0.0)
    return float(np.max(np.abs(back - prev.values[keep])))


# ---------------------------------------------------------------------------
# persistence on bounded habitats
# ---------------------------------------------------------------------------


class Persistence(enum.Enum):
    PERSISTENT = "Persistent"
    EXTINCT = "Extinct"
    UNDECIDED = "Undecided"


@dataclass
class PersistenceResult:
    verdict: Persistence
    maxima: np.ndarray
    generations: int

    @property
    def trend(self) -> float:
        """Log-ratio of the last maximum to the one ten generations earlier."""
        a = self.maxima
        k = min(10, a.size - 1)
        if k < 1 or a[-1 - k] <= 0:
            return -math.inf
        return math.log(max(a[-1], 1e-300) / a[-1 - k])


def box_initial(params: ModelParams, box: Box, h: float, level: float | None = None) -> Field:
    """Product of first Dirichlet modes scaled to 1e-3 of the equilibrium level.

    A small multiple of the principal mode sits below any positive steady
    state, so on a habitat that supports one the maximum rises monotonically.
    """
    amp = 1e-3 * _level_or_one(params) if level is None else level

    def fn(*xs):
        out = np.full(np.shape(xs[0]), amp)
        for x, a, L in zip(xs, box.lower, box.lengths):
            out = out * np.sin(math.pi * (x - a) / L)
        return np.maximum(out, 0.0)

    return box.field(h, fn)


def _level_or_one(params: ModelParams) -> float:
    try:
        return analytic.equilibrium_nonspatial(params).pi1
    except ExtinctionRegime:
        return 1.0


def classify_persistence(params: ModelParams, box: Box, M: int = 200, tol: float | None = None,
                         config: SeasonConfig = DEFAULT_CONFIG, h: float | None = None) -> PersistenceResult:
    """Run the local model on a hostile-boundary box and classify the outcome.

    Extinct as soon as the maximum drops below ``tol`` (default 1e-6 pi1).
    Persistent if over the last 10 generations the maximum is nondecreasing
    and above ``tol``; the run stops early once it has settled on a positive
    state. Anything else is Undecided.
    """
    pi1 = _level_or_one(params)
    tol = 1e-6 * pi1 if tol is None else tol
    f = box_initial(params, box, config.dirichlet_h if h is None else h)
    maxima = [float(f.values.max())]
    for m in range(1, M + 1):
        f = generation_Q(params, f, config, box)
        peak = float(f.values.max())
        maxima.append(peak)
        if peak < tol:
            return PersistenceResult(Persistence.EXTINCT, np.array(maxima), m)
        if m >= 10:
            last = np.array(maxima[-11:])
            if np.all(np.diff(last) >= -1e-12 * last[-1]) and last[-1] - last[-2] <= 1e-10 * last[-1]:
                return PersistenceResult(Persistence.PERSISTENT, np.array(maxima), m)
    last = np.array(maxima[-11:])
    settled = last.size == 11 and np.all(np.diff(last) >= -1e-12 * last[-1]) and last[-1] > tol
    verdict = Persistence.PERSISTENT if settled else Persistence.UNDECIDED
    return PersistenceResult(verdict, np.array(maxima), M)


def _persists(result: PersistenceResult) -> bool:
    if result.verdict is Persistence.UNDECIDED:
        return result.trend > 0
    return result.verdict is Persistence.PERSISTENT


@dataclass
class CriticalLengthEstimate:
    estimate: float
    bracket: tuple
    probes: list


def critical_length_search(params: ModelParams, bracket: tuple, M: int = 200, tol: float | None = None,
                           config: SeasonConfig = DEFAULT_CONFIG, h: float | None = None,
                           rel_width: float = 0.02) -> CriticalLengthEstimate:
    """Bisect the 1D habitat length between extinction and persistence.

    Stops when the bracket is narrower than ``rel_width`` of its midpoint.
    Undecided probes are resolved by the trend of their last ten maxima.
    """
    if params.n != 1:
        raise ValueError("critical_length_search works on intervals")
    lo, hi = map(float, bracket)
    if not 0 < lo < hi:
        raise BracketInvalid("bracket must satisfy 0 < lo < hi")
    probes = []

    def probe(L):
        r = classify_persistence(params, Box.cube(L, 1), M, tol, config, h)
        probes.append((L, r.verdict.value))
        return _persists(r)

    p_lo, p_hi = probe(lo), probe(hi)
    if p_lo == p_hi:
        raise BracketInvalid(f"both ends classify as {'persistent' if p_lo else 'extinct'}")
    if p_lo:
        raise BracketInvalid("population persists on the short end but not the long one")
    while hi - lo >= rel_width * 0.5 * (lo + hi):
        mid = 0.5 * (lo + hi)
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return CriticalLengthEstimate(0.5 * (lo + hi), (lo, hi), probes)
