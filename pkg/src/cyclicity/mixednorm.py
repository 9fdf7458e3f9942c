"""Mixed-norm and variable-exponent norms by quadrature, with convex
minimization of the finite-degree index outside the Hilbert case.

The radial measure enters through an explicit quadrature rule (nodes and
positive weights on [0, 1]); the angular integral uses the equispaced rule
on the circle for d = 1 (spectrally exact for trigonometric polynomials of
bounded degree) and seeded Monte Carlo sphere sampling for d >= 2. With
p = q = 2 and an exact radial rule every quantity here reduces to the
diagonal Hilbert norms of `spaces`, which is both the consistency oracle
and the warm start for the iteratively reweighted least-squares index
solver.

A positive derivative order N kills constants, so the Hilbert-space norm
adds a mass * |f(0)|^2 term. The quadrature norms mirror that convention
behind the `include_constant_term` flag (default on) so the p = q = 2
reduction is exact; disable it for the bare double-integral norm.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateInputError,
    DimensionMismatchError,
    NumericFailureError,
)
from .indices import subspace_distance
from .poly import Polynomial, multi_indices
from .spaces import KIND_DIAGONAL_BESOV, MomentSequence, SpaceSpec

RADIAL_POINT_MASS = "point_mass"
RADIAL_AREA = "area"


def radial_rule(measure: str, count: int = 40) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights for a named radial measure on [0, 1].

    "point_mass": unit mass at r = 1 (boundary measure, exact).
    "area": d(mu) = 2r dr via Gauss-Legendre, exact for radial polynomials
    of degree <= 2*count - 2.
    """
    if measure == RADIAL_POINT_MASS:
        return np.array([1.0]), np.array([1.0])
    if measure == RADIAL_AREA:
        if count < 2:
            raise ArgumentError("area rule needs at least 2 nodes")
        t, v = np.polynomial.legendre.leggauss(count)
        nodes = (t + 1.0) / 2.0
        weights = (v / 2.0) * 2.0 * nodes
        return nodes, weights
    raise ArgumentError(f"unknown radial measure {measure!r}")


class _QuadratureSpec:
    """Shared radial-times-angular evaluation grid."""

    def __init__(
        self,
        d: int,
        N: int,
        radial_nodes,
        radial_weights,
        angular_count: int = 256,
        seed: int = 0,
        include_constant_term: bool = True,
        descriptor: Mapping | None = None,
    ):
        if d < 1:
            raise ArgumentError("d must be >= 1")
        if N < 0:
            raise ArgumentError("N must be >= 0")
        nodes = np.asarray(radial_nodes, dtype=float)
        weights = np.asarray(radial_weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise ArgumentError("radial nodes and weights must be equal-length vectors")
        if np.any(nodes < 0) or np.any(nodes > 1):
            raise ArgumentError("radial nodes must lie in [0, 1]")
        if np.any(weights <= 0):
            raise ArgumentError("radial weights must be positive")
        if angular_count < 8:
            raise ArgumentError("angular_count must be >= 8")
        self.d = int(d)
        self.N = int(N)
        self.radial_nodes = nodes
        self.radial_weights = weights
        self.angular_count = int(angular_count)
        self.seed = int(seed)
        self.include_constant_term = bool(include_constant_term)
        self.descriptor = dict(descriptor) if descriptor else None
        self._angular = self._build_angular()

    def _build_angular(self) -> np.ndarray:
        m = self.angular_count
        if self.d == 1:
            theta = 2.0 * np.pi * np.arange(m) / m
            return np.exp(1j * theta)[:, None]
        rng = np.random.default_rng(self.seed)
        raw = rng.standard_normal((m, self.d)) + 1j * rng.standard_normal((m, self.d))
        return raw / np.linalg.norm(raw, axis=1, keepdims=True)

    @property
    def mass(self) -> float:
        """Total mass of the radial measure (= measure of the whole ball)."""
        return float(self.radial_weights.sum())

    def grid_values(self, h: Polynomial) -> np.ndarray:
        """Values of h on the (radial node) x (angular point) grid."""
        if h.d != self.d:
            raise DimensionMismatchError("polynomial does not match the spec dimension")
        if self.d == 1 and self.angular_count < 8 * max(h.degree, 1):
            warnings.warn(
                "angular resolution below 8x polynomial degree; "
                "the circle rule may lose exactness",
                stacklevel=3,
            )
        grid = self.radial_nodes[:, None, None] * self._angular[None, :, :]
        return h.evaluate_grid(grid)

    def differentiated(self, f: Polynomial) -> Polynomial:
        return f.radial_derivative(self.N) if self.N > 0 else f

    def _radial_json(self) -> dict:
        if self.descriptor:
            return dict(self.descriptor)
        return {
            "nodes": [float(x) for x in self.radial_nodes],
            "weights": [float(x) for x in self.radial_weights],
        }


class MixedSpec(_QuadratureSpec):
    """Mixed-norm space: inner angular exponent p, outer radial exponent q."""

    def __init__(self, d, N, p, q, radial_nodes, radial_weights, **kwargs):
        if p < 1 or q < 1:
            raise ArgumentError("exponents p, q must be >= 1")
        super().__init__(d, N, radial_nodes, radial_weights, **kwargs)
        self.p = float(p)
        self.q = float(q)

    @classmethod
    def with_measure(
        cls, measure: str, d: int, N: int, p: float, q: float,
        radial_count: int = 40, **kwargs,
    ) -> "MixedSpec":
        nodes, weights = radial_rule(measure, radial_count)
        descriptor = {"measure": measure, "count": radial_count}
        return cls(d, N, p, q, nodes, weights, descriptor=descriptor, **kwargs)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.N,
            "p": self.p,
            "q": self.q,
            "radial": self._radial_json(),
            "angular": {"count": self.angular_count, "seed": self.seed},
            "includeConstantTerm": self.include_constant_term,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "MixedSpec":
        radial = obj["radial"]
        angular = obj.get("angular", {})
        kwargs = {
            "angular_count": int(angular.get("count", 256)),
            "seed": int(angular.get("seed", 0)),
            "include_constant_term": bool(obj.get("includeConstantTerm", True)),
        }
        if "measure" in radial:
            return cls.with_measure(
                radial["measure"], int(obj["d"]), int(obj.get("N", 0)),
                float(obj["p"]), float(obj["q"]),
                radial_count=int(radial.get("count", 40)), **kwargs,
            )
        return cls(
            int(obj["d"]), int(obj.get("N", 0)), float(obj["p"]), float(obj["q"]),
            radial["nodes"], radial["weights"], **kwargs,
        )


class VarExpSpec(_QuadratureSpec):
    """Variable-exponent space with a radial exponent profile p(r) = a + b r^c.

    A Lipschitz radial profile is automatically log-Holder continuous, which
    is the regularity the Luxemburg-norm theory expects.
    """

    def __init__(
        self, d, N, a, b, c, radial_nodes, radial_weights,
        bisection_tol: float = 1e-12, **kwargs,
    ):
        if a < 1:
            raise ArgumentError("exponent offset a must be >= 1")
        if a + min(b, 0.0) < 1:
            raise ArgumentError("exponent profile must stay >= 1 on [0, 1]")
        if c <= 0:
            raise ArgumentError("exponent shape c must be positive")
        if bisection_tol <= 0:
            raise ArgumentError("bisection tolerance must be positive")
        super().__init__(d, N, radial_nodes, radial_weights, **kwargs)
        self.a = float(a)
        self.b = float(b)
        self.c = float(c)
        self.bisection_tol = float(bisection_tol)

    @classmethod
    def with_measure(
        cls, measure: str, d: int, N: int, a: float, b: float, c: float,
        radial_count: int = 40, **kwargs,
    ) -> "VarExpSpec":
        nodes, weights = radial_rule(measure, radial_count)
        descriptor = {"measure": measure, "count": radial_count}
        return cls(d, N, a, b, c, nodes, weights, descriptor=descriptor, **kwargs)

    def exponents(self) -> np.ndarray:
        """p evaluated at the radial nodes."""
        return self.a + self.b * self.radial_nodes**self.c

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.N,
            "exponent": {"a": self.a, "b": self.b, "c": self.c},
            "bisectionTol": self.bisection_tol,
            "radial": self._radial_json(),
            "angular": {"count": self.angular_count, "seed": self.seed},
            "includeConstantTerm": self.include_constant_term,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "VarExpSpec":
        radial = obj["radial"]
        angular = obj.get("angular", {})
        exp = obj["exponent"]
        kwargs = {
            "angular_count": int(angular.get("count", 256)),
            "seed": int(angular.get("seed", 0)),
            "include_constant_term": bool(obj.get("includeConstantTerm", True)),
            "bisection_tol": float(obj.get("bisectionTol", 1e-12)),
        }
        if "measure" in radial:
            return cls.with_measure(
                radial["measure"], int(obj["d"]), int(obj.get("N", 0)),
                float(exp["a"]), float(exp.get("b", 0.0)), float(exp.get("c", 1.0)),
                radial_count=int(radial.get("count", 40)), **kwargs,
            )
        return cls(
            int(obj["d"]), int(obj.get("N", 0)),
            float(exp["a"]), float(exp.get("b", 0.0)), float(exp.get("c", 1.0)),
            radial["nodes"], radial["weights"], **kwargs,
        )


def mixed_norm(spec: MixedSpec, f: Polynomial) -> float:
    """(integral of (angular p-mean of |R^N f|)^(q/p) d(mu))^(1/q), plus the
    constant-term contribution when N > 0 and the flag is on."""
    h = spec.differentiated(f)
    values = spec.grid_values(h)
    inner = np.mean(np.abs(values) ** spec.p, axis=1)
    total = float(spec.radial_weights @ inner ** (spec.q / spec.p))
    if spec.N > 0 and spec.include_constant_term:
        total += spec.mass * abs(f.constant_term) ** spec.q
    return total ** (1.0 / spec.q)


def _modular_from_values(spec: VarExpSpec, values: np.ndarray, lam: float) -> float:
    pexp = spec.exponents()[:, None]
    return float(
        spec.radial_weights @ np.mean((np.abs(values) / lam) ** pexp, axis=1)
    )


def modular(spec: VarExpSpec, f: Polynomial, lam: float) -> float:
    """Integral of |R^N f / lam|^(p(r)) against the radial-angular measure.

    Strictly decreasing and continuous in lam whenever R^N f is not
    identically zero.
    """
    if lam <= 0:
        raise ArgumentError("lam must be positive")
    h = spec.differentiated(f)
    if h.is_zero:
        return 0.0
    return _modular_from_values(spec, spec.grid_values(h), lam)


def _luxemburg_from_values(spec: VarExpSpec, values: np.ndarray) -> float:
    if not np.any(values):
        return 0.0
    lam = 1.0
    m = _modular_from_values(spec, values, lam)
    if m > 1.0:
        lo = lam
        for _ in range(200):
            lam *= 2.0
            m = _modular_from_values(spec, values, lam)
            if m <= 1.0:
                break
            lo = lam
        else:
            raise NumericFailureError("Luxemburg bracket expansion failed upward")
        hi = lam
    else:
        hi = lam
        for _ in range(200):
            lam /= 2.0
            if lam < 1e-300:
                return 0.0
            m = _modular_from_values(spec, values, lam)
            if m > 1.0:
                break
            hi = lam
        else:
            raise NumericFailureError("Luxemburg bracket expansion failed downward")
        lo = lam
    for _ in range(200):
        if hi - lo <= spec.bisection_tol * hi:
            break
        mid = (lo + hi) / 2.0
        if _modular_from_values(spec, values, mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    else:
        raise NumericFailureError("Luxemburg bisection did not converge")
    return hi


def luxemburg_norm(spec: VarExpSpec, f: Polynomial) -> float:
    """inf{lam > 0 : modular(f, lam) <= 1}, by bracketed bisection.

    When N > 0 the constant term joins as sqrt(mass |f(0)|^2 + lam^2)
    (Hilbert-compatible convention, see module docstring).
    """
    h = spec.differentiated(f)
    lam = 0.0 if h.is_zero else _luxemburg_from_values(spec, spec.grid_values(h))
    if spec.N > 0 and spec.include_constant_term:
        return math.sqrt(spec.mass * abs(f.constant_term) ** 2 + lam * lam)
    return lam


@dataclass
class MixedIndexResult:
    """Finite-degree index value in a quadrature norm, with IRLS diagnostics."""

    n: int
    value: float
    phi: Polynomial
    iterations: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "value": self.value,
            "phi": self.phi.to_json(),
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _hilbert_twin(spec: _QuadratureSpec, max_degree: int) -> SpaceSpec:
    """Diagonal Hilbert space whose moments are the radial rule's moments."""
    powers = np.arange(2 * max_degree + 1)[:, None]
    moments = (spec.radial_weights[None, :] * spec.radial_nodes[None, :] ** powers).sum(
        axis=1
    )
    # guard against roundoff bumps in what is mathematically nonincreasing
    moments = np.minimum.accumulate(moments)
    return SpaceSpec(
        KIND_DIAGONAL_BESOV, spec.d, spec.N, max_degree,
        moments=MomentSequence(tuple(moments)),
    )


_FLOOR = 1e-12


def mixed_index(
    spec: MixedSpec | VarExpSpec,
    f: Polynomial,
    n: int,
    max_iter: int = 60,
    decrease_tol: float = 1e-10,
) -> MixedIndexResult:
    """Minimize ||1 - phi f|| over deg(phi) <= n in the quadrature norm.

    Iteratively reweighted least squares warm-started from the p = q = 2
    diagonal solution, with damped steps accepted only on true objective
    decrease; a stall away from a fixed point is reported as
    converged=False rather than silently accepted.
    """
    if f.is_zero:
        raise DegenerateInputError("f must be nonzero")
    if f.d != spec.d:
        raise DimensionMismatchError("f does not match the spec dimension")
    if n < 0:
        raise ArgumentError("n must be >= 0")
    cols = multi_indices(spec.d, n)
    shifted = [Polynomial.monomial(gamma) * f for gamma in cols]
    k_nodes = len(spec.radial_nodes)
    m_ang = spec.angular_count

    one = Polynomial.one(spec.d)
    if spec.N > 0:
        v0 = np.zeros(k_nodes * m_ang, dtype=complex)
    else:
        v0 = spec.grid_values(one).ravel()
    columns = np.column_stack(
        [spec.grid_values(spec.differentiated(p)).ravel() for p in shifted]
    )
    use_constant = spec.N > 0 and spec.include_constant_term
    if use_constant:
        vc0 = 1.0 + 0j
        cc = np.array([p.constant_term for p in shifted], dtype=complex)

    is_mixed = isinstance(spec, MixedSpec)
    if is_mixed:
        qp = spec.q / spec.p

    def objective(x: np.ndarray) -> float:
        v = (v0 - columns @ x).reshape(k_nodes, m_ang)
        if is_mixed:
            inner = np.mean(np.abs(v) ** spec.p, axis=1)
            total = float(spec.radial_weights @ inner**qp)
            if use_constant:
                total += spec.mass * abs(vc0 - cc @ x) ** spec.q
            return total ** (1.0 / spec.q)
        lam = _luxemburg_from_values(spec, v)
        if use_constant:
            return math.sqrt(spec.mass * abs(vc0 - cc @ x) ** 2 + lam * lam)
        return lam

    def irls_weights(x: np.ndarray):
        v = (v0 - columns @ x).reshape(k_nodes, m_ang)
        mags = np.maximum(np.abs(v), _FLOOR)
        if is_mixed:
            inner = np.maximum(np.mean(np.abs(v) ** spec.p, axis=1), _FLOOR)
            u = (
                spec.radial_weights[:, None]
                / m_ang
                * inner[:, None] ** (qp - 1.0)
                * mags ** (spec.p - 2.0)
            )
        else:
            lam = max(_luxemburg_from_values(spec, v), _FLOOR)
            pexp = spec.exponents()[:, None]
            u = (
                spec.radial_weights[:, None]
                / m_ang
                * pexp
                * mags ** (pexp - 2.0)
                * lam ** (-pexp)
            )
        u = u.ravel()
        if use_constant:
            u = np.concatenate([u, [spec.mass * max(abs(vc0 - cc @ x), _FLOOR)
                                    ** ((spec.q if is_mixed else 2.0) - 2.0)]])
        return u

    full_columns = columns
    full_v0 = v0
    if use_constant:
        full_columns = np.vstack([columns, cc[None, :]])
        full_v0 = np.concatenate([v0, [vc0]])

    twin = _hilbert_twin(spec, n + f.degree)
    x = np.asarray(
        [subspace_distance(twin, one, f, n).phi.coefficient(gamma) for gamma in cols],
        dtype=complex,
    )
    best_value = objective(x)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        u = irls_weights(x)
        sqrt_u = np.sqrt(u)
        proposal = np.linalg.lstsq(
            full_columns * sqrt_u[:, None], full_v0 * sqrt_u, rcond=None
        )[0]
        improved = False
        tau = 1.0
        candidate = x
        candidate_value = best_value
        for _ in range(30):
            trial = x + tau * (proposal - x)
            trial_value = objective(trial)
            if trial_value < best_value - 1e-15 * max(best_value, 1.0):
                candidate, candidate_value, improved = trial, trial_value, True
                break
            tau *= 0.5
        if not improved:
            converged = np.linalg.norm(proposal - x) <= 1e-8 * (
                1.0 + np.linalg.norm(x)
            )
            break
        decrease = best_value - candidate_value
        x, best_value = candidate, candidate_value
        if decrease < decrease_tol:
            converged = True
            break
    phi = Polynomial(spec.d, dict(zip(cols, x)))
    return MixedIndexResult(
        n=n, value=best_value, phi=phi, iterations=iterations, converged=converged
    )
