"""Sparse commutative polynomial algebra over multi-indices.

Exponent tuples ("multi-indices") index monomials z^alpha. The canonical
basis order used by every matrix-producing routine in this package is
graded lexicographic: total degree first, ties broken by plain tuple
comparison. Coefficients are double-precision complex; exact zeros are
never stored.
"""

from __future__ import annotations

import math
from typing import TYPE_CHECKING, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    ArgumentError,
    DegreeRangeError,
    DimensionMismatchError,
    SingularInversionError,
)

if TYPE_CHECKING:
    from .spaces import SpaceSpec


def compositions(total: int, d: int) -> Iterator[tuple[int, ...]]:
    """Exponent tuples of length d summing to total, lexicographically ascending."""
    if d == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, d - 1):
            yield (head,) + tail


def multi_indices(d: int, max_degree: int) -> list[tuple[int, ...]]:
    """All multi-indices with |alpha| <= max_degree, in graded-lex order."""
    if d < 1:
        raise ArgumentError("d must be >= 1")
    if max_degree < 0:
        raise ArgumentError("max_degree must be >= 0")
    out: list[tuple[int, ...]] = []
    for k in range(max_degree + 1):
        out.extend(compositions(k, d))
    return out


class Polynomial:
    """Polynomial in d complex variables with sparse coefficient storage.

    Instances are treated as immutable: arithmetic returns new objects.
    """

    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: Mapping[tuple[int, ...], complex] | None = None):
        if d < 1:
            raise ArgumentError("d must be >= 1")
        self.d = int(d)
        cleaned: dict[tuple[int, ...], complex] = {}
        for alpha, value in (coeffs or {}).items():
            key = tuple(int(a) for a in alpha)
            if len(key) != self.d:
                raise DimensionMismatchError(
                    f"exponent tuple {key} does not have {self.d} entries"
                )
            if any(a < 0 for a in key):
                raise ArgumentError(f"negative exponent in {key}")
            c = complex(value)
            if c != 0:
                cleaned[key] = cleaned.get(key, 0j) + c
        self.coeffs = {k: v for k, v in cleaned.items() if v != 0}

    @classmethod
    def zero(cls, d: int) -> "Polynomial":
        return cls(d, {})

    @classmethod
    def one(cls, d: int) -> "Polynomial":
        return cls(d, {(0,) * d: 1.0})

    @classmethod
    def monomial(cls, alpha: Sequence[int], coefficient: complex = 1.0) -> "Polynomial":
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: coefficient})

    @classmethod
    def variable(cls, j: int, d: int) -> "Polynomial":
        """The coordinate function z_{j+1} (0-based j)."""
        if not 0 <= j < d:
            raise ArgumentError(f"variable index {j} out of range for d={d}")
        e = [0] * d
        e[j] = 1
        return cls(d, {tuple(e): 1.0})

    @classmethod
    def from_coeffs1d(cls, coefficients: Sequence[complex]) -> "Polynomial":
        """Univariate polynomial from an ascending coefficient list."""
        return cls(1, {(k,): c for k, c in enumerate(coefficients)})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def constant_term(self) -> complex:
        return self.coeffs.get((0,) * self.d, 0j)

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(alpha), 0j)

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        return Polynomial(self.d, {(0,) * self.d: complex(other)})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.d == other.d and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, frozenset(self.coeffs.items())))

    def __add__(self, other: "Polynomial | complex") -> "Polynomial":
        other = self._coerce(other)
        merged = dict(self.coeffs)
        for alpha, c in other.coeffs.items():
            merged[alpha] = merged.get(alpha, 0j) + c
        return Polynomial(self.d, merged)

    def __radd__(self, other: complex) -> "Polynomial":
        return self + other

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.d, {a: -c for a, c in self.coeffs.items()})

    def __sub__(self, other: "Polynomial | complex") -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other: complex) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other: "Polynomial | complex") -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.d != self.d:
                raise DimensionMismatchError(
                    f"cannot multiply polynomials in {self.d} and {other.d} variables"
                )
            prod: dict[tuple[int, ...], complex] = {}
            for a, ca in self.coeffs.items():
                for b, cb in other.coeffs.items():
                    key = tuple(x + y for x, y in zip(a, b))
                    prod[key] = prod.get(key, 0j) + ca * cb
            return Polynomial(self.d, prod)
        return Polynomial(self.d, {a: c * other for a, c in self.coeffs.items()})

    def __rmul__(self, other: complex) -> "Polynomial":
        return self * other

    def __truediv__(self, scalar: complex) -> "Polynomial":
        return self * (1.0 / scalar)

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ArgumentError("polynomial powers must be nonnegative integers")
        result = Polynomial.one(self.d)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def evaluate(self, z: Sequence[complex]) -> complex:
        """Value at a single point z in C^d."""
        if len(z) != self.d:
            raise DimensionMismatchError(f"point has {len(z)} entries, expected {self.d}")
        total = 0j
        for alpha, c in self.coeffs.items():
            term = c
            for zi, ai in zip(z, alpha):
                if ai:
                    term *= zi**ai
            total += term
        return total

    def __call__(self, z: Sequence[complex]) -> complex:
        return self.evaluate(z)

    def evaluate_grid(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation; points has shape (..., d)."""
        pts = np.asarray(points, dtype=complex)
        if pts.shape[-1] != self.d:
            raise DimensionMismatchError(
                f"grid has last axis {pts.shape[-1]}, expected {self.d}"
            )
        out = np.zeros(pts.shape[:-1], dtype=complex)
        for alpha, c in self.coeffs.items():
            term = np.full(pts.shape[:-1], c, dtype=complex)
            for i, ai in enumerate(alpha):
                if ai:
                    term = term * pts[..., i] ** ai
            out += term
        return out

    def radial_derivative(self, order: int = 1) -> "Polynomial":
        """Apply (sum_j z_j d/dz_j)^order; scales each term by |alpha|^order."""
        if order < 0:
            raise ArgumentError("derivative order must be >= 0")
        if order == 0:
            return self
        return Polynomial(
            self.d, {a: c * (sum(a) ** order) for a, c in self.coeffs.items()}
        )

    def partial_derivative(self, j: int) -> "Polynomial":
        """d/dz_{j+1} (0-based j)."""
        if not 0 <= j < self.d:
            raise ArgumentError(f"variable index {j} out of range for d={self.d}")
        out: dict[tuple[int, ...], complex] = {}
        for alpha, c in self.coeffs.items():
            if alpha[j] == 0:
                continue
            key = tuple(a - (1 if i == j else 0) for i, a in enumerate(alpha))
            out[key] = out.get(key, 0j) + c * alpha[j]
        return Polynomial(self.d, out)

    def truncate(self, max_degree: int) -> "Polynomial":
        return Polynomial(
            self.d, {a: c for a, c in self.coeffs.items() if sum(a) <= max_degree}
        )

    def to_json(self) -> list[dict]:
        terms = []
        for alpha in sorted(self.coeffs, key=lambda a: (sum(a), a)):
            c = self.coeffs[alpha]
            terms.append({"exponents": list(alpha), "re": c.real, "im": c.imag})
        return terms

    @classmethod
    def from_json(cls, terms: Sequence[Mapping], d: int | None = None) -> "Polynomial":
        if not terms and d is None:
            raise ArgumentError("zero polynomial needs an explicit dimension d")
        coeffs = {}
        for t in terms:
            alpha = tuple(int(a) for a in t["exponents"])
            coeffs[alpha] = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        dim = d if d is not None else len(next(iter(coeffs)))
        return cls(dim, coeffs)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"Polynomial(d={self.d}, 0)"
        parts = []
        for alpha in sorted(self.coeffs, key=lambda a: (sum(a), a))[:6]:
            parts.append(f"{self.coeffs[alpha]:.4g}*z^{alpha}")
        tail = " + ..." if len(self.coeffs) > 6 else ""
        return f"Polynomial(d={self.d}, {' + '.join(parts)}{tail})"


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def radial_derivative(p: Polynomial, order: int) -> Polynomial:
    return p.radial_derivative(order)


def evaluate(p: Polynomial, z: Sequence[complex]) -> complex:
    return p.evaluate(z)


def invert_power_series(p: Polynomial, length: int) -> Polynomial:
    """Truncated multiplicative inverse of p.

    The result q has degree <= length and p*q - 1 carries no term of total
    degree <= length; coefficients are produced by recursion on the graded
    terms. Requires p(0) != 0.
    """
    if length < 0:
        raise ArgumentError("truncation length must be >= 0")
    c0 = p.constant_term
    if c0 == 0:
        raise SingularInversionError("cannot invert a series with vanishing constant term")
    d = p.d
    inv0 = 1.0 / c0
    out: dict[tuple[int, ...], complex] = {(0,) * d: inv0}
    lower = {a: c for a, c in p.coeffs.items() if 0 < sum(a) <= length}
    for k in range(1, length + 1):
        for alpha in compositions(k, d):
            acc = 0j
            for beta, pb in lower.items():
                if all(b <= a for b, a in zip(beta, alpha)):
                    qg = out.get(tuple(a - b for a, b in zip(alpha, beta)))
                    if qg is not None:
                        acc += pb * qg
            if acc != 0:
                out[alpha] = -inv0 * acc
    return Polynomial(d, out)


def mult_operator_section(
    spec: "SpaceSpec", phi: Polynomial, n_in: int, n_out: int
) -> np.ndarray:
    """Finite section of multiplication by phi in the orthonormalized monomial basis.

    Rows run over |alpha| <= n_out and columns over |beta| <= n_in, both in
    graded-lex order; the entry at (alpha, beta) is
    <phi z^beta, z^alpha> / (||z^alpha|| ||z^beta||). Because n_out covers
    n_in + deg(phi), the section represents multiplication exactly on its
    column space, so its top singular value is a certified lower bound for
    the multiplier norm of phi and is nondecreasing in n_in.
    """
    if phi.d != spec.d:
        raise DimensionMismatchError(
            f"phi has d={phi.d} but the space has d={spec.d}"
        )
    if n_in < 0:
        raise ArgumentError("n_in must be >= 0")
    deg = phi.degree
    if n_in + deg > n_out:
        raise DegreeRangeError("n_out must be at least n_in + deg(phi)")
    if n_out > spec.max_degree:
        raise DegreeRangeError(
            f"n_out={n_out} exceeds precomputed max_degree={spec.max_degree}"
        )
    rows = multi_indices(spec.d, n_out)
    cols = multi_indices(spec.d, n_in)
    pos = {a: i for i, a in enumerate(rows)}
    section = np.zeros((len(rows), len(cols)), dtype=complex)
    for j, beta in enumerate(cols):
        nb = math.sqrt(spec.monomial_norm_sq(beta))
        for tau, c in phi.coeffs.items():
            alpha = tuple(b + t for b, t in zip(beta, tau))
            na = math.sqrt(spec.monomial_norm_sq(alpha))
            section[pos[alpha], j] += c * na / nb
    return section
