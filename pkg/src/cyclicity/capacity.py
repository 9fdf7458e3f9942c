"""Boundary zero sets and their potential-theoretic size.

Finite point clouds on the unit sphere of C^d stand in for boundary zero
sets. Three size measurements are provided and deliberately kept distinct:

* `riesz_equilibrium`: discrete equilibrium measure minimizing the pairwise
  Riesz (alpha > 0) or logarithmic (alpha = 0) energy over the probability
  simplex, solved by away-step conditional gradient with a reported
  optimality gap. Capacity is 1/energy for alpha > 0 and exp(-energy) for
  alpha = 0, which normalizes the full unit circle to capacity 1.
* `neighborhood_capacity`: normalized surface measure of a metric
  neighborhood of the cloud. For a closed set the infimum of integrals of
  continuous majorants of its indicator collapses to the measure of the set
  itself, so the neighborhood measure is the honest outer estimate. This is
  a different functional from the Riesz capacity and the two are never
  conflated.
* `box_dimension`: box-counting slope, a computable proxy for Hausdorff
  dimension (exact Hausdorff measure is out of scope).

`obstruction_report` bundles these with a degree sweep of the cyclicity
index and an interior zero probe, and emits a labeled heuristic verdict;
thresholds are configuration, not theorems.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.stats.qmc

from .errors import ArgumentError, DegenerateInputError, DimensionMismatchError
from .indices import (
    VERDICT_CYCLIC,
    VERDICT_PLATEAU,
    SweepReport,
    index_sweep,
)
from .poly import Polynomial
from .spaces import SpaceSpec

OBSTRUCTION = "obstruction detected"
CONSISTENT = "consistent with cyclicity"
TENSION = "tension"

DEFAULT_CAPACITY_THRESHOLD = 1e-3


@dataclass
class BoundaryCloud:
    """Finite set of unit vectors in C^d sampled from a boundary zero set."""

    points: np.ndarray
    source_tol: float = 0.0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        if pts.size == 0:
            pts = pts.reshape(0, pts.shape[1] if pts.ndim == 2 else 1)
        if pts.ndim != 2:
            raise ArgumentError("points must form a 2-d array (count, d)")
        if len(pts):
            norms = np.linalg.norm(pts, axis=1)
            if np.any(np.abs(norms - 1.0) > 1e-6):
                raise ArgumentError("cloud points must lie on the unit sphere")
            pts = pts / norms[:, None]
        self.points = pts

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def as_real(self) -> np.ndarray:
        """View in R^(2d): interleaved real and imaginary parts."""
        out = np.empty((self.size, 2 * self.dimension), dtype=float)
        out[:, 0::2] = self.points.real
        out[:, 1::2] = self.points.imag
        return out

    def union(self, other: "BoundaryCloud") -> "BoundaryCloud":
        if self.dimension != other.dimension:
            raise DimensionMismatchError("clouds live on spheres of different dimension")
        return BoundaryCloud(
            np.vstack([self.points, other.points]),
            max(self.source_tol, other.source_tol),
        )

    def to_json(self) -> list[list[float]]:
        return [
            [v for x in row for v in (x.real, x.imag)] for row in self.points
        ]

    @classmethod
    def from_json(cls, rows: Sequence[Sequence[float]], d: int) -> "BoundaryCloud":
        if not rows:
            return cls(np.zeros((0, d), dtype=complex))
        pts = []
        for row in rows:
            if len(row) != 2 * d:
                raise ArgumentError(f"point rows need {2 * d} real coordinates")
            vals = np.asarray(row, dtype=float)
            pts.append(vals[0::2] + 1j * vals[1::2])
        return cls(np.asarray(pts))


def circle_cloud(count: int) -> BoundaryCloud:
    """count equispaced points on the unit circle (d = 1)."""
    if count < 1:
        raise ArgumentError("count must be >= 1")
    theta = 2.0 * np.pi * np.arange(count) / count
    return BoundaryCloud(np.exp(1j * theta)[:, None])


def arc_cloud(angle: float, count: int) -> BoundaryCloud:
    """count equispaced points on the circular arc of total opening `angle`."""
    if count < 1:
        raise ArgumentError("count must be >= 1")
    if not 0 < angle <= 2 * np.pi:
        raise ArgumentError("angle must lie in (0, 2*pi]")
    theta = np.linspace(-angle / 2.0, angle / 2.0, count)
    return BoundaryCloud(np.exp(1j * theta)[:, None])


def sphere_cap_cloud(count: int, polar_angle: float) -> BoundaryCloud:
    """Quasi-uniform samples of a real 2-sphere cap embedded in the unit
    sphere of C^2 via (sin t * e^(i phi), cos t), t <= polar_angle.

    Fibonacci spiral in the cap's area coordinate; deterministic.
    """
    if count < 1:
        raise ArgumentError("count must be >= 1")
    if not 0 < polar_angle <= np.pi:
        raise ArgumentError("polar_angle must lie in (0, pi]")
    k = np.arange(count)
    u = (k + 0.5) / count
    cos_t = 1.0 - u * (1.0 - np.cos(polar_angle))
    sin_t = np.sqrt(np.clip(1.0 - cos_t**2, 0.0, None))
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = golden * k
    z1 = sin_t * np.exp(1j * phi)
    z2 = cos_t.astype(complex)
    return BoundaryCloud(np.column_stack([z1, z2]))


def _golden_minimize(fun, lo: float, hi: float, iterations: int = 80):
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iterations):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    x = (a + b) / 2.0
    return x, fun(x)


def _gauss_newton_polish(f: Polynomial, pts: np.ndarray, steps: int, project: bool):
    """Least-squares Newton steps toward f = 0; optionally reproject to the sphere."""
    grads = [f.partial_derivative(j) for j in range(f.d)]
    z = pts.copy()
    for _ in range(steps):
        vals = f.evaluate_grid(z)
        grad = np.stack([g.evaluate_grid(z) for g in grads], axis=-1)
        denom = np.sum(np.abs(grad) ** 2, axis=-1)
        denom = np.where(denom > 0, denom, 1.0)
        z = z - grad.conj() * (vals / denom)[..., None]
        if project:
            norms = np.linalg.norm(z, axis=-1, keepdims=True)
            norms = np.where(norms > 0, norms, 1.0)
            z = z / norms
    return z


def sample_zero_set(
    f: Polynomial,
    resolution: int = 2048,
    tol: float | None = None,
    seed: int = 0,
) -> BoundaryCloud:
    """Sample the boundary zero set {|z| = 1 : f(z) = 0}.

    d = 1: scan a theta grid, refine every local minimum of |f(e^(i theta))|
    by golden-section search to ~1e-12 in angle, and keep refined points
    with |f| <= tol (default 1e-9).

    d >= 2: rejection sampling on the sphere keeping |f| < tol (default
    1e-4), then 10 projected least-squares descent steps on |f|^2. The
    acceptance band of a hypersurface zero set scales like tol, so
    `resolution` must grow as tol shrinks. Deterministic for a fixed seed.
    """
    if f.is_zero:
        raise DegenerateInputError("f must be nonzero")
    if resolution < 8:
        raise ArgumentError("resolution must be >= 8")
    d = f.d
    if tol is None:
        tol = 1e-9 if d == 1 else 1e-4
    if d == 1:
        theta = 2.0 * np.pi * np.arange(resolution) / resolution
        vals = np.abs(f.evaluate_grid(np.exp(1j * theta)[:, None])).ravel()
        step = 2.0 * np.pi / resolution

        def absf(t: float) -> float:
            return abs(f.evaluate((np.exp(1j * t),)))

        # a zero within one grid step forces |f| at the nearest node below a
        # few times the largest adjacent variation, so flat minima far from
        # tol need no refinement
        max_jump = float(np.max(np.abs(np.diff(vals, append=vals[0]))))
        candidate_cut = tol + 4.0 * max_jump
        roots: list[float] = []
        for i in range(resolution):
            left = vals[(i - 1) % resolution]
            right = vals[(i + 1) % resolution]
            if vals[i] <= left and vals[i] <= right and vals[i] <= candidate_cut:
                t_star, v_star = _golden_minimize(
                    absf, theta[i] - step, theta[i] + step
                )
                if v_star <= tol:
                    roots.append(t_star % (2.0 * np.pi))
        points = np.exp(1j * np.array(sorted(roots)))[:, None]
        if len(points) > 1:
            keep = [0]
            for i in range(1, len(points)):
                if np.linalg.norm(points[i] - points[keep[-1]]) > 1e-8:
                    keep.append(i)
            # the grid wraps; the last root can duplicate the first
            if (
                len(keep) > 1
                and np.linalg.norm(points[keep[-1]] - points[keep[0]]) <= 1e-8
            ):
                keep.pop()
            points = points[keep]
        return BoundaryCloud(points, source_tol=tol)

    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((resolution, d)) + 1j * rng.standard_normal(
        (resolution, d)
    )
    sphere = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    keep = np.abs(f.evaluate_grid(sphere)) < tol
    accepted = sphere[keep]
    if len(accepted) == 0:
        return BoundaryCloud(np.zeros((0, d), dtype=complex), source_tol=tol)
    polished = _gauss_newton_polish(f, accepted, steps=10, project=True)
    final_keep = np.abs(f.evaluate_grid(polished)) < tol
    polished = polished[final_keep]
    # dedup points that collapsed onto the same zero
    unique: list[np.ndarray] = []
    for row in polished:
        if not any(np.linalg.norm(row - u) < 1e-8 for u in unique):
            unique.append(row)
    pts = np.asarray(unique) if unique else np.zeros((0, d), dtype=complex)
    return BoundaryCloud(pts, source_tol=tol)


@dataclass
class EquilibriumResult:
    """Energy-minimizing weights over a cloud with optimality certificate."""

    weights: np.ndarray
    energy: float
    capacity: float
    alpha: float
    iterations: int
    kkt_gap: float
    note: str = ""

    def to_json(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "energy": None if math.isinf(self.energy) else self.energy,
            "capacity": self.capacity,
            "alpha": self.alpha,
            "iterations": self.iterations,
            "kktGap": self.kkt_gap,
            "note": self.note,
        }


def _dedup_rows(pts: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if len(pts) < 2:
        return pts
    seen: dict[tuple, int] = {}
    keep = []
    for i, row in enumerate(pts):
        key = tuple(np.round(row / tol) * tol)
        if key not in seen:
            seen[key] = i
            keep.append(i)
    return pts[keep]


def riesz_equilibrium(
    cloud: BoundaryCloud,
    alpha: float,
    max_iter: int = 20000,
    tol: float = 1e-7,
) -> EquilibriumResult:
    """Minimize the pairwise interaction energy over probability weights.

    Kernel ||x - y||^(-alpha) for alpha > 0, -log ||x - y|| for alpha = 0.
    Each atom also carries the self-energy of a mass smeared at half its
    nearest-neighbor spacing (the kernel evaluated at that local scale);
    without this term the bare pairwise objective is minimized by piling
    everything onto two far-apart points, whereas with it the discrete
    minimum tracks the continuum equilibrium measure of the sampled set.
    Away-step conditional gradient from the uniform start with exact line
    search; the returned kkt_gap bounds the energy suboptimality, so every
    vertex directional derivative at the returned weights is >= -kkt_gap.
    Duplicate points are merged; clouds with fewer than two distinct points
    get capacity 0 by convention (their energy is infinite) and are flagged
    in the note.
    """
    if alpha < 0:
        raise ArgumentError("alpha must be >= 0")
    if max_iter < 1:
        raise ArgumentError("max_iter must be >= 1")
    pts = _dedup_rows(cloud.as_real())
    n = len(pts)
    if n == 0:
        return EquilibriumResult(
            np.zeros(0), math.inf, 0.0, alpha, 0, 0.0,
            note="empty cloud: capacity 0 by convention",
        )
    if n == 1:
        return EquilibriumResult(
            np.ones(1), math.inf, 0.0, alpha, 0, 0.0,
            note="singleton cloud: infinite energy, capacity 0 by convention",
        )
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff**2, axis=-1))
    np.fill_diagonal(dist, np.inf)
    local_scale = dist.min(axis=1) / 2.0
    np.fill_diagonal(dist, 1.0)
    if alpha > 0:
        kernel = dist ** (-alpha)
        np.fill_diagonal(kernel, local_scale ** (-alpha))
    else:
        kernel = -np.log(dist)
        np.fill_diagonal(kernel, -np.log(local_scale))

    w = np.full(n, 1.0 / n)
    grad = 2.0 * (kernel @ w)
    gap = 0.0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        i_fw = int(np.argmin(grad))
        mean_grad = float(grad @ w)
        gap = mean_grad - float(grad[i_fw])
        if gap <= tol:
            break
        support = np.flatnonzero(w > 1e-15)
        i_aw = int(support[np.argmax(grad[support])])
        away_gap = float(grad[i_aw]) - mean_grad
        if gap >= away_gap:
            # toward vertex i_fw: direction e - w
            kd = kernel[:, i_fw] - grad / 2.0
            a = float(kd[i_fw] - kd @ w)
            b = float(grad[i_fw]) - mean_grad
            gamma_max = 1.0
            toward = i_fw
        else:
            # away from vertex i_aw: direction w - e
            kd = grad / 2.0 - kernel[:, i_aw]
            a = float(kd @ w - kd[i_aw])
            b = mean_grad - float(grad[i_aw])
            w_a = float(w[i_aw])
            gamma_max = w_a / (1.0 - w_a) if w_a < 1.0 else 1.0
            toward = None
        if a > 0:
            gamma = min(max(-b / (2.0 * a), 0.0), gamma_max)
        else:
            gamma = gamma_max if b < 0 else 0.0
        if gamma <= 0:
            break
        if toward is not None:
            w *= 1.0 - gamma
            w[toward] += gamma
            grad = (1.0 - gamma) * grad + 2.0 * gamma * kernel[:, toward]
        else:
            w *= 1.0 + gamma
            w[i_aw] -= gamma
            grad = (1.0 + gamma) * grad - 2.0 * gamma * kernel[:, i_aw]
        np.clip(w, 0.0, None, out=w)
        if iterations % 256 == 0:
            w /= w.sum()
            grad = 2.0 * (kernel @ w)
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    grad = 2.0 * (kernel @ w)
    gap = float(grad @ w) - float(grad.min())
    energy = float(w @ kernel @ w)
    if alpha > 0:
        capacity = 1.0 / energy if energy > 0 else math.inf
    else:
        capacity = math.exp(-energy)
    return EquilibriumResult(w, energy, capacity, alpha, iterations, gap)


def _quasi_uniform_sphere(real_dim: int, count: int) -> np.ndarray:
    """Deterministic quasi-uniform samples of the unit sphere in R^real_dim."""
    if real_dim == 2:
        theta = 2.0 * np.pi * np.arange(count) / count
        return np.column_stack([np.cos(theta), np.sin(theta)])
    sampler = scipy.stats.qmc.Halton(d=real_dim, scramble=False, seed=0)
    u = sampler.random(count + 1)[1:]  # skip the origin-heavy first point
    g = scipy.stats.norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def neighborhood_capacity(
    cloud: BoundaryCloud,
    alpha: float,
    eps_nbhd: float,
    samples: int = 8192,
) -> float:
    """Normalized surface measure of the eps-neighborhood of the cloud.

    Estimated on a fixed quasi-uniform sphere sample, so the value is
    monotone in eps_nbhd and in cloud inclusion. The exponent alpha of the
    defining family of continuous majorants does not change the collapsed
    value (any alpha > 0 gives the measure of the set); it is carried only
    to label reports.
    """
    if eps_nbhd <= 0:
        raise ArgumentError("eps_nbhd must be positive")
    if alpha < 0:
        raise ArgumentError("alpha must be >= 0")
    if cloud.size == 0:
        return 0.0
    grid = _quasi_uniform_sphere(2 * cloud.dimension, samples)
    pts = cloud.as_real()
    hits = 0
    chunk = max(1, (1 << 22) // max(len(pts), 1))
    eps_sq = eps_nbhd * eps_nbhd
    for start in range(0, len(grid), chunk):
        block = grid[start : start + chunk]
        d2 = (
            np.sum(block**2, axis=1)[:, None]
            - 2.0 * block @ pts.T
            + np.sum(pts**2, axis=1)[None, :]
        )
        hits += int(np.count_nonzero(d2.min(axis=1) <= eps_sq))
    return hits / len(grid)


@dataclass
class DimensionEstimate:
    """Box-counting slope with fit diagnostics."""

    dimension: float
    r_squared: float
    scales: list[int]
    counts: list[int]

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "rSquared": self.r_squared,
            "scales": self.scales,
            "counts": self.counts,
        }


def box_dimension(
    cloud: BoundaryCloud, j_min: int = 2, j_max: int = 7
) -> DimensionEstimate:
    """Slope of log(occupied boxes) against log(1/scale) at scales 2^-j.

    j_max should stay small enough that boxes hold several samples each;
    once counts saturate at the sample count the slope flattens.
    """
    if cloud.size == 0:
        raise DegenerateInputError("cannot estimate the dimension of an empty cloud")
    if not 1 <= j_min < j_max:
        raise ArgumentError("need 1 <= j_min < j_max")
    pts = cloud.as_real()
    scales = list(range(j_min, j_max + 1))
    counts = []
    for j in scales:
        boxes = np.unique(np.floor(pts * (2.0**j)).astype(np.int64), axis=0)
        counts.append(int(len(boxes)))
    x = np.array(scales, dtype=float) * math.log(2.0)
    y = np.log(np.array(counts, dtype=float))
    if np.allclose(y, y[0]):
        return DimensionEstimate(0.0, 1.0, scales, counts)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return DimensionEstimate(float(slope), r2, scales, counts)


def interior_zero_probe(
    f: Polynomial,
    radius: float = 0.95,
    tol: float = 1e-6,
    resolution: int = 4096,
    seed: int = 0,
) -> dict | None:
    """Grid-plus-polish search for a zero of f inside the ball of `radius`.

    Returns {"point": ..., "value": ...} when the polished minimum of |f|
    falls below tol strictly inside the ball, else None. Points that drift
    to the boundary are clipped back, so boundary zeros do not register.
    """
    if f.is_zero:
        raise DegenerateInputError("f must be nonzero")
    if not 0 < radius < 1:
        raise ArgumentError("radius must lie in (0, 1)")
    d = f.d
    if d == 1:
        r = np.linspace(0.0, radius, 48)
        theta = 2.0 * np.pi * np.arange(96) / 96
        grid = (r[:, None] * np.exp(1j * theta)[None, :]).reshape(-1, 1)
    else:
        rng = np.random.default_rng(seed)
        raw = rng.standard_normal((resolution, d)) + 1j * rng.standard_normal(
            (resolution, d)
        )
        sphere = raw / np.linalg.norm(raw, axis=1, keepdims=True)
        radii = radius * rng.random(resolution) ** (1.0 / (2 * d))
        grid = np.vstack([sphere * radii[:, None], np.zeros((1, d), dtype=complex)])
    vals = np.abs(f.evaluate_grid(grid))
    order = np.argsort(vals)[:8]
    candidates = grid[order]
    polished = _gauss_newton_polish(f, candidates, steps=12, project=False)
    norms = np.linalg.norm(polished, axis=1)
    over = norms > radius
    polished[over] = polished[over] * (radius / norms[over])[:, None]
    final = np.abs(f.evaluate_grid(polished))
    best = int(np.argmin(final))
    if final[best] <= tol:
        point = polished[best]
        return {
            "point": [v for x in point for v in (x.real, x.imag)],
            "value": float(final[best]),
        }
    return None


@dataclass
class ObstructionReport:
    """Geometric obstructions versus sweep behavior, with a heuristic verdict."""

    verdict: str
    sweep: SweepReport
    cloud_size: int
    riesz: EquilibriumResult
    neighborhood_measure: float
    dimension: DimensionEstimate | None
    interior_zero: dict | None
    capacity_threshold: float

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "sweep": self.sweep.to_json(),
            "cloudSize": self.cloud_size,
            "riesz": self.riesz.to_json(),
            "neighborhoodMeasure": self.neighborhood_measure,
            "dimension": self.dimension.to_json() if self.dimension else None,
            "interiorZero": self.interior_zero,
            "capacityThreshold": self.capacity_threshold,
        }


def obstruction_report(
    spec: SpaceSpec,
    f: Polynomial,
    n_max: int,
    alpha: float,
    tol: float = 1e-3,
    capacity_threshold: float = DEFAULT_CAPACITY_THRESHOLD,
    resolution: int = 2048,
    zero_tol: float | None = None,
    eps_nbhd: float = 0.01,
    seed: int = 0,
    probe_radius: float = 0.95,
    probe_tol: float = 1e-6,
) -> ObstructionReport:
    """Bundle sweep, capacity, dimension, and interior-zero evidence.

    Verdict policy (heuristic, thresholds configurable):
    * obstruction detected: the sweep plateaus above tol while the zero set
      carries capacity above the threshold or an interior zero exists;
    * consistent with cyclicity: capacity at or below the threshold, no
      interior zero, and residuals that reached tol or keep decreasing;
    * tension: anything else.
    """
    sweep = index_sweep(spec, f, n_max, tol)
    cloud = sample_zero_set(f, resolution, zero_tol, seed)
    riesz = riesz_equilibrium(cloud, alpha)
    nbhd = neighborhood_capacity(cloud, alpha, eps_nbhd) if cloud.size else 0.0
    dim = box_dimension(cloud) if cloud.size >= 1 else None
    interior = interior_zero_probe(f, probe_radius, probe_tol, seed=seed)
    plateau = sweep.verdict == VERDICT_PLATEAU
    decreasing = (
        sweep.verdict == VERDICT_CYCLIC
        or sweep.residuals[-1] < sweep.residuals[0] - 1e-9
    )
    capacity_large = riesz.capacity > capacity_threshold
    if plateau and (capacity_large or interior is not None):
        verdict = OBSTRUCTION
    elif not capacity_large and interior is None and decreasing:
        verdict = CONSISTENT
    else:
        verdict = TENSION
    return ObstructionReport(
        verdict=verdict,
        sweep=sweep,
        cloud_size=cloud.size,
        riesz=riesz,
        neighborhood_measure=nbhd,
        dimension=dim,
        interior_zero=interior,
        capacity_threshold=capacity_threshold,
    )
