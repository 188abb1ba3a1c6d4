"""Synthetic dynamical systems and trajectory generators.

Provides stochastic differential equation integration (Euler-Maruyama), the
two-dimensional double-well diffusion, an asymmetric one-dimensional
four-well random walk, the periodically perturbed planar jet flow used for
coherent-set studies, a two-state hidden-Markov sampler with a square-root
warped output space, and a chaotic three-dimensional attractor integrator.

All generators are deterministic per seed. The double-well and four-well
generators have a compiled fast path; its arithmetic is kept operation-for-
operation identical to the plain-Python reference path so both produce
bit-identical trajectories from the same seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import NDArray

from .errors import DivergenceError, InvalidArgument

try:  # pragma: no cover - exercised implicitly by the chosen backend
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    _HAVE_NUMBA = False

__all__ = [
    "SdeSystem",
    "Trajectory",
    "euler_maruyama",
    "double_well_system",
    "double_well_2d",
    "quadwell_system",
    "quadwell_drift",
    "quadwell_potential",
    "quadwell_1d",
    "QUADWELL_MINIMA",
    "JetConfig",
    "jet_stream_function",
    "jet_velocity",
    "bickley_flow",
    "sample_sqrt_model",
    "sqrt_transform",
    "sqrt_backtransform",
    "SQRT_MODEL_TRANSITION_MATRIX",
    "rossler",
    "benchmark_steps_per_second",
    "write_trajectory",
    "read_trajectory",
]

# Steps of pre-generated Gaussian noise per block. Both integration paths
# draw noise in these exact block shapes so their random streams agree.
_NOISE_BLOCK_STEPS = 65536


# ---------------------------------------------------------------------------
# Core types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SdeSystem:
    """Time-homogeneous SDE ``dx = drift(t, x) dt + diffusion dW``.

    ``drift`` maps ``(t, x)`` to a vector; ``diffusion`` is a constant square
    matrix; ``step`` is the integrator step; ``n_substeps`` integrator steps
    are taken per emitted frame.
    """

    dimension: int
    drift: Callable[[float, NDArray], NDArray]
    diffusion: NDArray
    step: float
    n_substeps: int = 1

    def __post_init__(self):
        sigma = np.asarray(self.diffusion, dtype=np.float64)
        if sigma.shape != (self.dimension, self.dimension):
            raise InvalidArgument(
                f"diffusion must be {self.dimension}x{self.dimension}, got {sigma.shape}"
            )
        object.__setattr__(self, "diffusion", sigma)
        if self.step <= 0:
            raise InvalidArgument(f"step must be positive, got {self.step}")
        if self.n_substeps < 1:
            raise InvalidArgument(f"n_substeps must be >= 1, got {self.n_substeps}")


@dataclass(frozen=True)
class Trajectory:
    """Frames in time order plus the metadata needed to regenerate them."""

    frames: NDArray
    dt_effective: float
    seed: Optional[int] = None

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim == 1:
            frames = frames[:, None]
        if not np.all(np.isfinite(frames)):
            raise DivergenceError("trajectory contains non-finite frames")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return self.frames.shape[0]


# ---------------------------------------------------------------------------
# Euler-Maruyama integration
# ---------------------------------------------------------------------------


def euler_maruyama(system: SdeSystem, x0: NDArray, n_frames: int,
                   seed: Optional[int] = None, t0: float = 0.0) -> Trajectory:
    """Integrate an SDE, emitting every ``n_substeps``-th state.

    The first frame is the initial condition; each subsequent frame advances
    ``n_substeps`` steps of ``x <- x + drift(t, x) h + diffusion sqrt(h) xi``
    with independent standard-normal ``xi``. Reproducible per seed.

    Raises
    ------
    DivergenceError
        If the state leaves the finite floating-point range; the error
        carries the index of the first bad integrator step.
    """
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    if x0.size != system.dimension:
        raise InvalidArgument(
            f"x0 has dimension {x0.size}, system expects {system.dimension}"
        )
    if n_frames < 1:
        raise InvalidArgument(f"n_frames must be >= 1, got {n_frames}")
    h = system.step
    n_sub = system.n_substeps
    sig_sqrt_h = system.diffusion * math.sqrt(h)
    noiseless = not np.any(system.diffusion)
    rng = np.random.default_rng(seed)
    frames = np.empty((n_frames, system.dimension))
    frames[0] = x0
    x = x0.copy()
    t = t0
    frames_per_block = max(1, _NOISE_BLOCK_STEPS // n_sub)
    emitted = 1
    step_index = 0
    while emitted < n_frames:
        m = min(frames_per_block, n_frames - emitted)
        if noiseless:
            noise = None
        else:
            noise = rng.standard_normal((m * n_sub, system.dimension))
        row = 0
        for _ in range(m):
            for _ in range(n_sub):
                fx = system.drift(t, x)
                if noiseless:
                    x = x + fx * h
                else:
                    x = x + fx * h + sig_sqrt_h @ noise[row]
                row += 1
                t += h
                step_index += 1
                if not np.all(np.isfinite(x)):
                    raise DivergenceError(
                        f"state diverged at integrator step {step_index}",
                        step=step_index,
                    )
            frames[emitted] = x
            emitted += 1
    return Trajectory(frames=frames, dt_effective=h * n_sub, seed=seed)


def _run_compiled_sde(kernel, x: NDArray, h: float, scale: float,
                      n_substeps: int, frames: NDArray, rng, dim: int) -> None:
    """Drive a compiled per-frame stepping kernel with blockwise noise."""
    frames_per_block = max(1, _NOISE_BLOCK_STEPS // n_substeps)
    written = 1
    total = frames.shape[0]
    while written < total:
        m = min(frames_per_block, total - written)
        noise = rng.standard_normal((m * n_substeps, dim))
        bad = kernel(x, noise, h, scale, n_substeps, frames[written:written + m])
        if bad >= 0:
            step = (written - 1) * n_substeps + bad + 1
            raise DivergenceError(
                f"state diverged at integrator step {step}", step=step
            )
        written += m


# ---------------------------------------------------------------------------
# Double well in two dimensions
# ---------------------------------------------------------------------------

_DOUBLE_WELL_SIGMA = 0.7


def _double_well_drift(t: float, x: NDArray) -> NDArray:
    return np.array([-4.0 * x[0] * (x[0] * x[0] - 1.0), -2.0 * x[1]])


def double_well_system(h: float = 1e-3, n_substeps: int = 100) -> SdeSystem:
    """Overdamped diffusion in ``V(x) = (x1^2 - 1)^2 + x2^2``.

    Drift is the negative potential gradient ``(-4 x1 (x1^2 - 1), -2 x2)``
    with isotropic diffusion of strength 0.7.
    """
    return SdeSystem(
        dimension=2,
        drift=_double_well_drift,
        diffusion=_DOUBLE_WELL_SIGMA * np.eye(2),
        step=h,
        n_substeps=n_substeps,
    )


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _double_well_kernel(x, noise, h, s, n_substeps, out):  # pragma: no cover
        x0 = x[0]
        x1 = x[1]
        row = 0
        for f in range(out.shape[0]):
            for _ in range(n_substeps):
                f0 = -4.0 * x0 * (x0 * x0 - 1.0)
                f1 = -2.0 * x1
                x0 = x0 + f0 * h + s * noise[row, 0]
                x1 = x1 + f1 * h + s * noise[row, 1]
                row += 1
            if not (math.isfinite(x0) and math.isfinite(x1)):
                return f * n_substeps
            out[f, 0] = x0
            out[f, 1] = x1
        x[0] = x0
        x[1] = x1
        return -1


def double_well_2d(seed: Optional[int] = None, n_frames: int = 10000,
                   h: float = 1e-3, n_substeps: int = 100,
                   x0: Optional[NDArray] = None) -> Trajectory:
    """Sample the two-dimensional double-well diffusion.

    Starts at the saddle ``(0, 0)`` unless ``x0`` is given. Uses the
    compiled stepping kernel when available; the result is bit-identical to
    :func:`euler_maruyama` on :func:`double_well_system` with the same seed.
    """
    system = double_well_system(h=h, n_substeps=n_substeps)
    if x0 is None:
        x0 = np.zeros(2)
    if not _HAVE_NUMBA:
        return euler_maruyama(system, x0, n_frames, seed=seed)
    x0 = np.asarray(x0, dtype=np.float64).ravel()
    if x0.size != 2:
        raise InvalidArgument(f"x0 must have dimension 2, got {x0.size}")
    if n_frames < 1:
        raise InvalidArgument(f"n_frames must be >= 1, got {n_frames}")
    frames = np.empty((n_frames, 2))
    frames[0] = x0
    state = x0.copy()
    rng = np.random.default_rng(seed)
    scale = _DOUBLE_WELL_SIGMA * math.sqrt(h)
    _run_compiled_sde(_double_well_kernel, state, h, scale, n_substeps,
                      frames, rng, 2)
    return Trajectory(frames=frames, dt_effective=h * n_substeps, seed=seed)


# ---------------------------------------------------------------------------
# Asymmetric four-well random walk in one dimension
# ---------------------------------------------------------------------------

# The stationary points of the shipped potential. The potential is the
# squared root-product  V(x) = amp * [(x-m1)(x-m2)(x-m3)(x-m4)]^2,
# so every listed point is an exact zero of the drift and a minimum of V;
# the asymmetric spacing gives the three barriers different heights.
QUADWELL_MINIMA = (-2.0, -0.7, 0.8, 2.1)
_QUADWELL_AMP = 0.25
_QUADWELL_SIGMA = 1.0


def quadwell_potential(x) -> NDArray:
    """Four-well potential ``amp * prod_i (x - m_i)^2`` (documented default)."""
    x = np.asarray(x, dtype=np.float64)
    m1, m2, m3, m4 = QUADWELL_MINIMA
    p = (x - m1) * (x - m2) * (x - m3) * (x - m4)
    return _QUADWELL_AMP * p * p


def quadwell_drift(x) -> NDArray:
    """Negative gradient of :func:`quadwell_potential`, exact zeros at minima."""
    x = np.asarray(x, dtype=np.float64)
    m1, m2, m3, m4 = QUADWELL_MINIMA
    d1 = x - m1
    d2 = x - m2
    d3 = x - m3
    d4 = x - m4
    p = d1 * d2 * d3 * d4
    dp = d2 * d3 * d4 + d1 * d3 * d4 + d1 * d2 * d4 + d1 * d2 * d3
    return (-2.0 * _QUADWELL_AMP) * (p * dp)


def _quadwell_drift_tx(t: float, x: NDArray) -> NDArray:
    return quadwell_drift(x)


def quadwell_system(h: float = 1e-3, n_substeps: int = 10) -> SdeSystem:
    """One-dimensional diffusion in the asymmetric four-well potential."""
    return SdeSystem(
        dimension=1,
        drift=_quadwell_drift_tx,
        diffusion=np.array([[_QUADWELL_SIGMA]]),
        step=h,
        n_substeps=n_substeps,
    )


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _quadwell_kernel(x, noise, h, s, n_substeps, out):  # pragma: no cover
        m1 = -2.0
        m2 = -0.7
        m3 = 0.8
        m4 = 2.1
        coeff = -2.0 * 0.25
        x0 = x[0]
        row = 0
        for f in range(out.shape[0]):
            for _ in range(n_substeps):
                d1 = x0 - m1
                d2 = x0 - m2
                d3 = x0 - m3
                d4 = x0 - m4
                p = d1 * d2 * d3 * d4
                dp = d2 * d3 * d4 + d1 * d3 * d4 + d1 * d2 * d4 + d1 * d2 * d3
                f0 = coeff * (p * dp)
                x0 = x0 + f0 * h + s * noise[row, 0]
                row += 1
            if not math.isfinite(x0):
                return f * n_substeps
            out[f, 0] = x0
        x[0] = x0
        return -1


def quadwell_1d(seed: Optional[int] = None, n_frames: int = 100000,
                h: float = 1e-3, n_substeps: int = 10,
                x0: float = 0.0) -> Trajectory:
    """Sample the one-dimensional four-well diffusion.

    The shipped potential is ``0.25 * [(x+2)(x+0.7)(x-0.8)(x-2.1)]^2`` with
    unit diffusion: four minima at :data:`QUADWELL_MINIMA`, slightly
    asymmetric barrier heights, and three slow exchange processes.
    """
    system = quadwell_system(h=h, n_substeps=n_substeps)
    start = np.array([float(x0)])
    if not _HAVE_NUMBA:
        return euler_maruyama(system, start, n_frames, seed=seed)
    if n_frames < 1:
        raise InvalidArgument(f"n_frames must be >= 1, got {n_frames}")
    frames = np.empty((n_frames, 1))
    frames[0] = start
    state = start.copy()
    rng = np.random.default_rng(seed)
    scale = _QUADWELL_SIGMA * math.sqrt(h)
    _run_compiled_sde(_quadwell_kernel, state, h, scale, n_substeps,
                      frames, rng, 1)
    return Trajectory(frames=frames, dt_effective=h * n_substeps, seed=seed)


# ---------------------------------------------------------------------------
# Periodically perturbed planar jet (coherent-set benchmark flow)
# ---------------------------------------------------------------------------


def _default_wavenumbers(period: float) -> tuple:
    return tuple(2.0 * math.pi * n / period for n in (1, 2, 3))


@dataclass(frozen=True)
class JetConfig:
    """Named parameter record for the perturbed jet stream function.

    The stream function, in a frame co-moving with the third wave, is::

        psi(x, y, t) = c3*y - U0*L*tanh(y/L)
                       + U0*L*sech(y/L)^2 * sum_i A_i*cos(k_i*x - rho_i*t)

    with phase rates ``rho_i = k_i*(c_i - c3)`` (so the third wave is
    stationary) and wave speeds ``c3 = 0.461*U0``, ``c2 = 0.205*U0``,
    ``c1 = c3 + ((sqrt(5)-1)/2)*(k2/k1)*(c2-c3)``. Units are Mm and days.
    The wavenumbers are integer multiples of ``2*pi/period`` so the field
    is exactly periodic on the cylinder of circumference ``period``.
    """

    u0: float = 5.4138893066379419
    length_scale: float = 1.77
    amplitudes: tuple = (0.0075, 0.15, 0.3)
    period: float = 20.0
    wavenumbers: tuple = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.wavenumbers is None:
            object.__setattr__(self, "wavenumbers", _default_wavenumbers(self.period))

    @property
    def wave_speeds(self) -> tuple:
        c3 = 0.461 * self.u0
        c2 = 0.205 * self.u0
        k1, k2, _ = self.wavenumbers
        c1 = c3 + ((math.sqrt(5.0) - 1.0) / 2.0) * (k2 / k1) * (c2 - c3)
        return (c1, c2, c3)

    @property
    def phase_rates(self) -> tuple:
        c1, c2, c3 = self.wave_speeds
        k1, k2, k3 = self.wavenumbers
        return (k1 * (c1 - c3), k2 * (c2 - c3), k3 * (c3 - c3))


_DEFAULT_JET = JetConfig()


def jet_stream_function(t: float, points: NDArray,
                        config: JetConfig = _DEFAULT_JET) -> NDArray:
    """Evaluate the jet stream function at (n, 2) points."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    x = points[:, 0]
    y = points[:, 1]
    u0 = config.u0
    L = config.length_scale
    c3 = config.wave_speeds[2]
    sech2 = 1.0 / np.cosh(y / L) ** 2
    wave = np.zeros_like(x)
    for amp, k, rho in zip(config.amplitudes, config.wavenumbers, config.phase_rates):
        wave += amp * np.cos(k * x - rho * t)
    return c3 * y - u0 * L * np.tanh(y / L) + u0 * L * sech2 * wave


def jet_velocity(t: float, points: NDArray,
                 config: JetConfig = _DEFAULT_JET) -> NDArray:
    """Velocity field ``(-d(psi)/dy, d(psi)/dx)`` at (n, 2) points."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    x = points[:, 0]
    y = points[:, 1]
    u0 = config.u0
    L = config.length_scale
    c3 = config.wave_speeds[2]
    ysc = y / L
    sech2 = 1.0 / np.cosh(ysc) ** 2
    tanh = np.tanh(ysc)
    wave_cos = np.zeros_like(x)
    wave_ksin = np.zeros_like(x)
    for amp, k, rho in zip(config.amplitudes, config.wavenumbers, config.phase_rates):
        theta = k * x - rho * t
        wave_cos += amp * np.cos(theta)
        wave_ksin += amp * k * np.sin(theta)
    u = -c3 + u0 * sech2 * (1.0 + 2.0 * tanh * wave_cos)
    v = -u0 * L * sech2 * wave_ksin
    return np.column_stack([u, v])


def bickley_flow(x0_batch: NDArray, t0: float, t1: float, dt: float = 1e-2,
                 config: JetConfig = _DEFAULT_JET) -> NDArray:
    """Advect a batch of particles under the jet flow from ``t0`` to ``t1``.

    Fixed-step classical Runge-Kutta integration of the non-autonomous
    velocity field; the horizontal coordinate is wrapped into
    ``[0, period)`` after every step, the vertical one is unconstrained.
    ``t1 < t0`` integrates backward in time. The time span must be an
    integer number of steps.
    """
    if dt <= 0:
        raise InvalidArgument(f"dt must be positive, got {dt}")
    X = np.atleast_2d(np.asarray(x0_batch, dtype=np.float64)).copy()
    if X.shape[1] != 2:
        raise InvalidArgument(f"particles must be (n, 2), got {X.shape}")
    span = t1 - t0
    n_steps = int(round(abs(span) / dt))
    if abs(n_steps * dt - abs(span)) > 1e-9:
        raise InvalidArgument(
            f"time span {span} is not an integer multiple of dt={dt}"
        )
    if n_steps == 0:
        return X
    h = math.copysign(dt, span)
    period = config.period
    t = t0
    for step in range(n_steps):
        k1 = jet_velocity(t, X, config)
        k2 = jet_velocity(t + 0.5 * h, X + (0.5 * h) * k1, config)
        k3 = jet_velocity(t + 0.5 * h, X + (0.5 * h) * k2, config)
        k4 = jet_velocity(t + h, X + h * k3, config)
        X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        X[:, 0] %= period
        t = t0 + (step + 1) * h
        if not np.all(np.isfinite(X)):
            raise DivergenceError(
                f"particle state diverged at integrator step {step + 1}",
                step=step + 1,
            )
    return X


# ---------------------------------------------------------------------------
# Two-state hidden Markov sampler with square-root warped outputs
# ---------------------------------------------------------------------------

SQRT_MODEL_TRANSITION_MATRIX = np.array([[0.95, 0.05], [0.05, 0.95]])


# Emission design: pre-transform the states sit at y = +1 and y = -1 with a
# broad x-spread and a thin y-spread, so a horizontal line separates them
# cleanly. The warp lifts y by sqrt(|x|), bending both blobs into nested
# wedges that interlock along x: the outer arms of the lower wedge rise above
# the tip of the upper wedge, so no line separates the warped states and
# linear methods must misclassify one region or the other.
_SQRT_MODEL_MEANS = np.array([[0.0, 1.0], [0.0, -1.0]])
_SQRT_MODEL_COVS = np.stack([
    np.diag([4.0, 0.01]),
    np.diag([4.0, 0.01]),
])


def sqrt_transform(X: NDArray) -> NDArray:
    """Warp ``(x, y) -> (x, y + sqrt(|x|))``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out = X.copy()
    out[:, 1] += np.sqrt(np.abs(out[:, 0]))
    return out


def sqrt_backtransform(X: NDArray) -> NDArray:
    """Exact inverse of :func:`sqrt_transform`: ``(x, y) -> (x, y - sqrt(|x|))``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    out = X.copy()
    out[:, 1] -= np.sqrt(np.abs(out[:, 0]))
    return out


def sample_sqrt_model(n_frames: int, seed: Optional[int] = None):
    """Sample the two-state chain and emit warped two-dimensional Gaussians.

    The hidden chain follows the transition matrix
    ``[[0.95, 0.05], [0.05, 0.95]]`` from a uniform initial state. Each
    hidden state emits an anisotropic Gaussian (documented module defaults),
    and emissions are warped by :func:`sqrt_transform`, which hides the
    linear separability of the two states.

    Returns
    -------
    (observations, hidden)
        Warped observations of shape (n_frames, 2) and the integer hidden
        sequence of length n_frames.
    """
    from .markov import sample_markov_chain

    if n_frames < 1:
        raise InvalidArgument(f"n_frames must be >= 1, got {n_frames}")
    hidden = sample_markov_chain(
        SQRT_MODEL_TRANSITION_MATRIX, n_frames, seed=seed,
        initial_distribution=np.array([0.5, 0.5]),
    )
    rng = np.random.default_rng(None if seed is None else seed + 1)
    eps = rng.standard_normal((n_frames, 2))
    chol = np.linalg.cholesky(_SQRT_MODEL_COVS)
    pre = _SQRT_MODEL_MEANS[hidden] + np.einsum("tij,tj->ti", chol[hidden], eps)
    return sqrt_transform(pre), hidden


# ---------------------------------------------------------------------------
# Chaotic attractor in three dimensions
# ---------------------------------------------------------------------------


def rossler(x0: NDArray = (0.0, -6.78, 0.02), t1: float = 100.0,
            dt: float = 1e-3, a: float = 0.1, b: float = 0.1,
            c: float = 14.0) -> Trajectory:
    """Integrate ``(dx1, dx2, dx3) = (-x2 - x3, x1 + a x2, b + x3 (x1 - c))``.

    Fixed-step classical Runge-Kutta; the first frame is the initial state.
    """
    if dt <= 0:
        raise InvalidArgument(f"dt must be positive, got {dt}")
    if t1 <= 0:
        raise InvalidArgument(f"t1 must be positive, got {t1}")
    start = np.asarray(x0, dtype=np.float64).ravel()
    if start.size != 3:
        raise InvalidArgument(f"x0 must have dimension 3, got {start.size}")

    n_steps = int(round(t1 / dt))
    frames = np.empty((n_steps + 1, 3))
    frames[0] = start
    x1, x2, x3 = start
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(1, n_steps + 1):
        a1 = -x2 - x3
        a2 = x1 + a * x2
        a3 = b + x3 * (x1 - c)
        y1, y2, y3 = x1 + half * a1, x2 + half * a2, x3 + half * a3
        b1 = -y2 - y3
        b2 = y1 + a * y2
        b3 = b + y3 * (y1 - c)
        y1, y2, y3 = x1 + half * b1, x2 + half * b2, x3 + half * b3
        c1 = -y2 - y3
        c2 = y1 + a * y2
        c3 = b + y3 * (y1 - c)
        y1, y2, y3 = x1 + dt * c1, x2 + dt * c2, x3 + dt * c3
        d1 = -y2 - y3
        d2 = y1 + a * y2
        d3 = b + y3 * (y1 - c)
        x1 += sixth * (a1 + 2.0 * (b1 + c1) + d1)
        x2 += sixth * (a2 + 2.0 * (b2 + c2) + d2)
        x3 += sixth * (a3 + 2.0 * (b3 + c3) + d3)
        if not (math.isfinite(x1) and math.isfinite(x2) and math.isfinite(x3)):
            raise DivergenceError(f"state diverged at step {k}", step=k)
        frames[k, 0] = x1
        frames[k, 1] = x2
        frames[k, 2] = x3
    return Trajectory(frames=frames, dt_effective=dt, seed=None)


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------


def benchmark_steps_per_second(n_steps: int = 1_000_000,
                               seed: int = 0) -> dict:
    """Time the double-well generator end to end.

    Runs one warm-up call (so one-time compilation is excluded), then times
    a generation of ``n_steps`` integrator steps including noise generation.
    """
    import time

    n_substeps = 100
    n_frames = max(2, n_steps // n_substeps + 1)
    actual_steps = (n_frames - 1) * n_substeps
    double_well_2d(seed=seed, n_frames=2, n_substeps=n_substeps)
    start = time.perf_counter()
    double_well_2d(seed=seed, n_frames=n_frames, n_substeps=n_substeps)
    elapsed = time.perf_counter() - start
    return {
        "system": "double_well_2d",
        "backend": "numba" if _HAVE_NUMBA else "python",
        "n_steps": actual_steps,
        "elapsed_seconds": elapsed,
        "steps_per_second": actual_steps / elapsed,
    }


# ---------------------------------------------------------------------------
# Trajectory persistence: CSV frames + JSON sidecar
# ---------------------------------------------------------------------------


def write_trajectory(trajectory: Trajectory, path, system: str = "",
                     parameters: Optional[dict] = None) -> None:
    """Write frames as CSV (one frame per row) plus a ``.json`` sidecar.

    The sidecar records the system name, parameters, seed, and effective
    time step, so the file pair is self-describing.
    """
    import json
    from pathlib import Path

    path = Path(path)
    np.savetxt(path, trajectory.frames, delimiter=",")
    sidecar = {
        "system": system,
        "parameters": parameters or {},
        "seed": trajectory.seed,
        "dt_effective": trajectory.dt_effective,
        "n_frames": int(trajectory.frames.shape[0]),
        "dimension": int(trajectory.frames.shape[1]),
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2) + "\n"
    )


def read_trajectory(path) -> tuple:
    """Read a CSV-plus-sidecar trajectory written by :func:`write_trajectory`.

    Returns ``(trajectory, metadata)``; metadata is the sidecar dictionary.
    """
    import json
    from pathlib import Path

    path = Path(path)
    frames = np.loadtxt(path, delimiter=",", ndmin=2)
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if sidecar_path.exists():
        meta = json.loads(sidecar_path.read_text())
    else:
        meta = {}
    trajectory = Trajectory(
        frames=frames,
        dt_effective=float(meta.get("dt_effective", 1.0)),
        seed=meta.get("seed"),
    )
    return trajectory, meta
