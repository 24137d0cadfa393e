"""Forward simulation: the state SDE, its zero-noise limit, and gap metrics.

The state follows

    X_s = x + int_t^s b(r, X_r) dr + eps int_t^s sigma(r) dW_r

discretized by Euler-Maruyama; with eps = 0 the drift-only Euler recursion is
exactly the Euler integration of the limit ODE phi' = b(s, phi), which keeps
the eps -> 0 reduction an identity rather than an approximation.  The limit
ODE itself is integrated with classical RK4 where accuracy matters.

Gap estimators use common random numbers: the compared paths share one
Brownian batch, realizing the pathwise coupling behind the C eps^2 and
C (|t-t'| + |eps-eps'|^2 + |x-x'|^2) perturbation estimates.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from qbsde.errors import ConfigurationError, EvaluationError
from qbsde.model import CoefficientSet
from qbsde.util import jackknife_mean, write_binary_dump, write_csv


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    T: float
    N: int

    def __post_init__(self):
        if not (0.0 <= self.t0 < self.T):
            raise ConfigurationError(f"need 0 <= t0 < T, got ({self.t0}, {self.T})")
        if self.N < 1:
            raise ConfigurationError("N must be >= 1")

    @property
    def delta(self) -> float:
        return (self.T - self.t0) / self.N

    def nodes(self) -> np.ndarray:
        # linspace pins the last node to T exactly
        return np.linspace(self.t0, self.T, self.N + 1)

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Index of the node equal to t; configuration error when off-grid."""
        pos = (t - self.t0) / self.delta
        i = int(round(pos))
        if i < 0 or i > self.N or abs(pos - i) > tol:
            raise ConfigurationError(f"time {t} is not a node of {self}")
        return i


@dataclass(frozen=True)
class BrownianBatch:
    grid: TimeGrid
    paths: int
    dims: int
    seed: int
    increments: np.ndarray  # (M, N, d), i.i.d. N(0, delta) entries

    @staticmethod
    def generate(grid: TimeGrid, paths: int, dims: int, seed: int) -> "BrownianBatch":
        if paths < 1 or dims < 1:
            raise ConfigurationError("paths and dims must be positive")
        rng = np.random.default_rng(seed)
        inc = rng.normal(0.0, np.sqrt(grid.delta), size=(paths, grid.N, dims))
        return BrownianBatch(grid, paths, dims, seed, inc)

    def cumulative(self) -> np.ndarray:
        """Brownian path values at the nodes, (M, N+1, d), starting at 0."""
        w = np.zeros((self.paths, self.grid.N + 1, self.dims))
        np.cumsum(self.increments, axis=1, out=w[:, 1:, :])
        return w

    def shifted(self, vdot: np.ndarray, scale: float) -> "BrownianBatch":
        """Batch with scale * vdot_i * delta added to every increment row."""
        vdot = np.asarray(vdot, dtype=float).reshape(self.grid.N, self.dims)
        inc = self.increments + scale * vdot[None, :, :] * self.grid.delta
        return BrownianBatch(self.grid, self.paths, self.dims, self.seed, inc)


@dataclass(frozen=True)
class SamplePathBatch:
    grid: TimeGrid
    values: np.ndarray  # (M, N+1, k)
    label: str

    def __post_init__(self):
        v = self.values
        if v.ndim != 3 or v.shape[1] != self.grid.N + 1:
            raise ConfigurationError(
                f"values shape {v.shape} inconsistent with grid N={self.grid.N}")
        if not np.all(np.isfinite(v)):
            raise EvaluationError(f"non-finite entries in batch {self.label!r}")

    @property
    def paths(self) -> int:
        return self.values.shape[0]

    def to_csv(self, path) -> Path:
        k = self.values.shape[2]
        nodes = self.grid.nodes()
        header = ["path", "node", "time"] + [f"v{j}" for j in range(k)]
        rows = (
            [p, i, nodes[i]] + list(self.values[p, i])
            for p in range(self.paths) for i in range(self.grid.N + 1)
        )
        return write_csv(path, header, rows)

    def to_binary(self, path, seed: int = 0) -> Path:
        return write_binary_dump(path, self.values, seed)


def simulate_sde(
    coeffs: CoefficientSet,
    t: float,
    x,
    epsilon: float,
    grid: TimeGrid,
    noise: BrownianBatch,
) -> SamplePathBatch:
    """Euler-Maruyama batch for the state equation started at (t, x)."""
    if abs(grid.t0 - t) > 1e-12:
        raise ConfigurationError(f"grid starts at {grid.t0}, not at t={t}")
    if noise.grid != grid:
        raise ConfigurationError("noise batch lives on a different grid")
    if noise.dims != coeffs.d:
        raise ConfigurationError(
            f"noise dims {noise.dims} != model d={coeffs.d}")
    if not (0.0 <= epsilon <= 1.0):
        raise ConfigurationError("epsilon must lie in [0, 1]")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (coeffs.m,):
        raise ConfigurationError(f"x must have length m={coeffs.m}")

    m = coeffs.m
    nodes = grid.nodes()
    delta = grid.delta
    out = np.empty((noise.paths, grid.N + 1, m))
    out[:, 0, :] = x
    cur = np.broadcast_to(x, (noise.paths, m)).copy()
    for i in range(grid.N):
        drift = coeffs.b_at(nodes[i], cur)
        if not np.all(np.isfinite(drift)):
            raise EvaluationError(f"drift non-finite at t={nodes[i]}")
        step = cur + drift * delta
        if epsilon != 0.0:
            sig = coeffs.sigma_at(nodes[i])
            step = step + epsilon * noise.increments[:, i, :] @ sig.T
        cur = step
        out[:, i + 1, :] = cur
    return SamplePathBatch(grid, out, label=f"X_eps={epsilon}")


def solve_ode(
    coeffs: CoefficientSet,
    t: float,
    x,
    grid: TimeGrid,
    method: str = "rk4",
) -> SamplePathBatch:
    """Zero-noise limit path phi' = b(s, phi), phi_t = x; single path.

    ``method='euler'`` matches the drift nodes of simulate_sde exactly and is
    the reference for eps -> 0 reduction tests; RK4 is the accurate default.
    """
    if abs(grid.t0 - t) > 1e-12:
        raise ConfigurationError(f"grid starts at {grid.t0}, not at t={t}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (coeffs.m,):
        raise ConfigurationError(f"x must have length m={coeffs.m}")
    phi = _integrate_drift(coeffs.b_at, x[None, :], grid, method)
    return SamplePathBatch(grid, phi, label="phi")


def _integrate_drift(vector_field, x0: np.ndarray, grid: TimeGrid, method: str) -> np.ndarray:
    """Shared forward integrator; x0 is (B, m), result (B, N+1, m)."""
    nodes = grid.nodes()
    h = grid.delta
    b_n, m = x0.shape
    out = np.empty((b_n, grid.N + 1, m))
    out[:, 0, :] = x0
    cur = x0.copy()
    if method == "euler":
        for i in range(grid.N):
            cur = cur + vector_field(nodes[i], cur) * h
            out[:, i + 1, :] = cur
    elif method == "rk4":
        for i in range(grid.N):
            s = nodes[i]
            k1 = vector_field(s, cur)
            k2 = vector_field(s + h / 2, cur + h / 2 * k1)
            k3 = vector_field(s + h / 2, cur + h / 2 * k2)
            k4 = vector_field(s + h, cur + h * k3)
            cur = cur + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            out[:, i + 1, :] = cur
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    if not np.all(np.isfinite(out)):
        raise EvaluationError("drift integration produced non-finite values")
    return out


def sup_gap_squared(a: SamplePathBatch, b: SamplePathBatch) -> np.ndarray:
    """Pathwise sup-norm-squared differences; b may hold a single path."""
    if a.grid != b.grid:
        raise ConfigurationError("batches live on different grids")
    diff = a.values - b.values  # broadcasting covers the single-path case
    return np.max(np.linalg.norm(diff, axis=-1), axis=-1) ** 2


def perturbation_gap(x_batch: SamplePathBatch, phi: SamplePathBatch) -> tuple[float, float]:
    """Monte Carlo estimate of E[sup_s |X - phi|^2] with jackknife stderr."""
    return jackknife_mean(sup_gap_squared(x_batch, phi))


def small_noise_slope(
    coeffs: CoefficientSet,
    t: float,
    x,
    epsilons,
    grid: TimeGrid,
    paths: int,
    seed: int,
) -> dict:
    """Gap table over epsilon plus the log-log slope (the claim is slope ~ 2).

    The same Brownian batch drives every epsilon and the gap reference is the
    Euler-integrated limit path, so the only epsilon-dependence left is the
    perturbation itself.
    """
    noise = BrownianBatch.generate(grid, paths, coeffs.d, seed)
    phi = solve_ode(coeffs, t, x, grid, method="euler")
    rows = []
    for eps in epsilons:
        xb = simulate_sde(coeffs, t, x, eps, grid, noise)
        gap, se = perturbation_gap(xb, phi)
        rows.append({"epsilon": float(eps), "gap": gap, "stderr": se})
    from qbsde.util import loglog_slope
    slope = loglog_slope([r["epsilon"] for r in rows], [r["gap"] for r in rows])
    return {"rows": rows, "slope": slope}


def flow_continuity_gap(
    coeffs: CoefficientSet,
    start_a: tuple[float, np.ndarray, float],
    start_b: tuple[float, np.ndarray, float],
    grid: TimeGrid,
    noise: BrownianBatch,
) -> tuple[float, float]:
    """E[sup_s |X^{eps,t,x} - X^{eps',t',x'}|^2] under common random numbers.

    Each start is (t, x, eps); both times must be grid nodes.  A path is held
    at its initial point before its start time, and the sup runs over the
    overlap [max(t, t'), T].
    """
    if noise.grid != grid:
        raise ConfigurationError("noise batch lives on a different grid")

    def run(start):
        t, x, eps = start
        i0 = grid.index_of(t)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        nodes = grid.nodes()
        out = np.empty((noise.paths, grid.N + 1, coeffs.m))
        out[:, :i0 + 1, :] = x
        cur = np.broadcast_to(x, (noise.paths, coeffs.m)).copy()
        for i in range(i0, grid.N):
            step = cur + coeffs.b_at(nodes[i], cur) * grid.delta
            if eps != 0.0:
                step = step + eps * noise.increments[:, i, :] @ coeffs.sigma_at(nodes[i]).T
            cur = step
            out[:, i + 1, :] = cur
        return out, i0

    pa, ia = run(start_a)
    pb, ib = run(start_b)
    i_from = max(ia, ib)
    diff = np.linalg.norm(pa[:, i_from:, :] - pb[:, i_from:, :], axis=-1)
    return jackknife_mean(np.max(diff, axis=-1) ** 2)


def pathwise_bound_check(
    coeffs: CoefficientSet,
    x_batch: SamplePathBatch,
    noise: BrownianBatch,
    epsilon: float,
    x,
) -> dict:
    """Check sup_s |X_s| <= |x| + L T + eps sup_s |int sigma dW| path by path.

    Uses the simulated stochastic integral itself, so the inequality is exact
    for the Euler recursion up to floating error.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nodes = x_batch.grid.nodes()
    stoch = np.zeros((noise.paths, x_batch.grid.N + 1, coeffs.m))
    acc = np.zeros((noise.paths, coeffs.m))
    for i in range(x_batch.grid.N):
        acc = acc + noise.increments[:, i, :] @ coeffs.sigma_at(nodes[i]).T
        stoch[:, i + 1, :] = acc
    sup_x = np.max(np.linalg.norm(x_batch.values, axis=-1), axis=-1)
    sup_i = np.max(np.linalg.norm(stoch, axis=-1), axis=-1)
    allowance = (np.linalg.norm(x) + coeffs.const_L * x_batch.grid.T
                 + epsilon * sup_i + 1e-10)
    worst = float(np.max(sup_x - allowance))
    return {"passed": bool(worst <= 0.0), "worst_margin": worst}
