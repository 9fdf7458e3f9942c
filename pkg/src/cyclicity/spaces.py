"""Radially weighted Besov spaces and the Drury-Arveson space in diagonal form.

Every space is represented by one strictly positive weight per monomial,
c_alpha = ||z^alpha||^2. For a moment-based space with radial derivative
order N these factor as

    c_alpha = |alpha|^(2N) * m[2|alpha|] * s(d, alpha)   for alpha != 0,
    c_0     = m[0],

where m[j] is the j-th moment of the radial measure on [0, 1] and
s(d, alpha) is the sphere moment of |w^alpha|^2 under the rotation-invariant
surface measure, normalized so the sphere has measure 1 throughout the
package. The separate c_0 rule realizes the extra modulus-at-zero term that
a positive derivative order requires. Norms and inner products are then
weighted l2 sums over power-series coefficients, which keeps every
least-squares problem downstream closed-form.

The Drury-Arveson space is the special diagonal family
c_alpha = alpha!/|alpha|!, matching the kernel 1/(1 - <z, w>); this is also
exactly the weight that makes full-Fock-to-symmetric-Fock compression
contractive (see `freespace.abelianize`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import (
    ArgumentError,
    DegreeRangeError,
    DimensionMismatchError,
)
from .poly import Polynomial, multi_indices

KIND_DIAGONAL_BESOV = "diagonal_besov"
KIND_DRURY_ARVESON = "drury_arveson"
KIND_CUSTOM_DIAGONAL = "custom_diagonal"

_KINDS = (KIND_DIAGONAL_BESOV, KIND_DRURY_ARVESON, KIND_CUSTOM_DIAGONAL)


def default_max_degree(d: int) -> int:
    # Bounded memory with predictable ranges: 64 monomials in one variable,
    # total degree 20 otherwise.
    return 64 if d == 1 else 20


@dataclass(frozen=True)
class MomentSequence:
    """Moments m[j] = integral of r^j over [0, 1] against a radial measure.

    Any genuine measure with mass near r = 1 yields a positive, nonincreasing
    sequence; both properties are validated because the monomial weights
    inherit them.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ArgumentError("moment sequence is empty")
        if vals[0] <= 0:
            raise ArgumentError("m[0] must be positive")
        for j in range(1, len(vals)):
            if vals[j] <= 0:
                raise ArgumentError(f"moment m[{j}] must be positive")
            if vals[j] > vals[j - 1] * (1 + 1e-12):
                raise ArgumentError(
                    f"moments must be nonincreasing (m[{j}] > m[{j - 1}])"
                )

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> float:
        return self.values[j]


def sphere_moment(d: int, alpha: Sequence[int]) -> float:
    """Integral of |w^alpha|^2 over the unit sphere of C^d (measure normalized to 1).

    Classical identity: (d-1)! * alpha! / (d-1+|alpha|)!. Symmetric under
    permutations of alpha; identically 1 when d = 1.
    """
    if d < 1:
        raise ArgumentError("d must be >= 1")
    key = tuple(int(a) for a in alpha)
    if len(key) != d:
        raise DimensionMismatchError(f"alpha has {len(key)} entries, expected {d}")
    if any(a < 0 for a in key):
        raise ArgumentError(f"negative exponent in {key}")
    num = math.factorial(d - 1)
    for a in key:
        num *= math.factorial(a)
    den = math.factorial(d - 1 + sum(key))
    return float(Fraction(num, den))


class SpaceSpec:
    """Immutable diagonal description of a function space.

    All operations are pure; construction eagerly tabulates every monomial
    weight up to max_degree.
    """

    __slots__ = ("kind", "d", "N", "max_degree", "moments", "_weights")

    def __init__(
        self,
        kind: str,
        d: int,
        N: int = 0,
        max_degree: int | None = None,
        moments: MomentSequence | None = None,
        custom_weights: Mapping[tuple[int, ...], float] | None = None,
    ):
        if kind not in _KINDS:
            raise ArgumentError(f"unknown space kind {kind!r}")
        if d < 1:
            raise ArgumentError("d must be >= 1")
        if N < 0:
            raise ArgumentError("N must be >= 0")
        self.kind = kind
        self.d = int(d)
        self.N = int(N)
        self.max_degree = int(max_degree if max_degree is not None else default_max_degree(d))
        if self.max_degree < 0:
            raise ArgumentError("max_degree must be >= 0")
        self.moments = moments
        self._weights = self._build_weights(custom_weights)

    def _build_weights(self, custom) -> dict[tuple[int, ...], float]:
        indices = multi_indices(self.d, self.max_degree)
        table: dict[tuple[int, ...], float] = {}
        if self.kind == KIND_DRURY_ARVESON:
            for alpha in indices:
                num = 1
                for a in alpha:
                    num *= math.factorial(a)
                table[alpha] = float(Fraction(num, math.factorial(sum(alpha))))
        elif self.kind == KIND_DIAGONAL_BESOV:
            if self.moments is None:
                raise ArgumentError("diagonal Besov spaces require a moment sequence")
            needed = 2 * self.max_degree + 1
            if len(self.moments) < needed:
                raise ArgumentError(
                    f"moment sequence has {len(self.moments)} entries, "
                    f"needs {needed} for max_degree={self.max_degree}"
                )
            for alpha in indices:
                k = sum(alpha)
                if k == 0:
                    table[alpha] = self.moments[0]
                else:
                    table[alpha] = (
                        float(k) ** (2 * self.N)
                        * self.moments[2 * k]
                        * sphere_moment(self.d, alpha)
                    )
        else:
            if custom is None:
                raise ArgumentError("custom diagonal spaces require a weight table")
            for alpha in indices:
                key = tuple(alpha)
                if key not in custom:
                    raise ArgumentError(f"custom weights missing entry for {key}")
                w = float(custom[key])
                if w <= 0:
                    raise ArgumentError(f"weight for {key} must be positive")
                table[key] = w
        for alpha, w in table.items():
            if not (w > 0) or not math.isfinite(w):
                raise ArgumentError(f"monomial weight for {alpha} is not positive finite")
        return table

    def monomial_norm_sq(self, alpha: Sequence[int]) -> float:
        """c_alpha = ||z^alpha||^2 for |alpha| <= max_degree."""
        key = tuple(int(a) for a in alpha)
        if len(key) != self.d:
            raise DimensionMismatchError(f"alpha has {len(key)} entries, expected {self.d}")
        try:
            return self._weights[key]
        except KeyError:
            raise DegreeRangeError(
                f"|alpha|={sum(key)} beyond precomputed max_degree={self.max_degree}"
            ) from None

    def inner_product(self, f: Polynomial, g: Polynomial) -> complex:
        """<f, g> = sum_alpha c_alpha fhat(alpha) conj(ghat(alpha))."""
        if f.d != self.d or g.d != self.d:
            raise DimensionMismatchError("polynomials do not match the space dimension")
        if f.degree > self.max_degree or g.degree > self.max_degree:
            raise DegreeRangeError(
                f"degree exceeds precomputed max_degree={self.max_degree}"
            )
        acc = 0j
        small, large = (f, g) if len(f.coeffs) <= len(g.coeffs) else (g, f)
        for alpha, cs in small.coeffs.items():
            cl = large.coeffs.get(alpha)
            if cl is not None:
                if small is f:
                    acc += self._weights[alpha] * cs * cl.conjugate()
                else:
                    acc += self._weights[alpha] * cl * cs.conjugate()
        return acc

    def norm(self, f: Polynomial) -> float:
        return math.sqrt(max(self.inner_product(f, f).real, 0.0))

    def with_moments(self, moments: MomentSequence) -> "SpaceSpec":
        """Same geometry over a different radial measure."""
        return SpaceSpec(
            KIND_DIAGONAL_BESOV, self.d, self.N, self.max_degree, moments=moments
        )

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "d": self.d,
            "N": self.N,
            "maxDegree": self.max_degree,
        }
        if self.kind == KIND_DIAGONAL_BESOV:
            out["moments"] = list(self.moments.values)
        elif self.kind == KIND_CUSTOM_DIAGONAL:
            out["weights"] = [
                {"exponents": list(a), "value": self._weights[a]}
                for a in sorted(self._weights, key=lambda a: (sum(a), a))
            ]
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "SpaceSpec":
        kind = obj.get("kind")
        d = int(obj.get("d", 0))
        N = int(obj.get("N", 0))
        max_degree = obj.get("maxDegree")
        if kind == KIND_DIAGONAL_BESOV:
            return cls(
                kind, d, N, max_degree, moments=MomentSequence(tuple(obj["moments"]))
            )
        if kind == KIND_DRURY_ARVESON:
            return cls(kind, d, 0, max_degree)
        if kind == KIND_CUSTOM_DIAGONAL:
            table = {
                tuple(int(a) for a in t["exponents"]): float(t["value"])
                for t in obj["weights"]
            }
            return cls(kind, d, N, max_degree, custom_weights=table)
        raise ArgumentError(f"unknown space kind {kind!r}")

    def __repr__(self) -> str:
        return (
            f"SpaceSpec(kind={self.kind!r}, d={self.d}, N={self.N}, "
            f"max_degree={self.max_degree})"
        )


def monomial_norm_sq(spec: SpaceSpec, alpha: Sequence[int]) -> float:
    return spec.monomial_norm_sq(alpha)


def inner_product(spec: SpaceSpec, f: Polynomial, g: Polynomial) -> complex:
    return spec.inner_product(f, g)


def norm(spec: SpaceSpec, f: Polynomial) -> float:
    return spec.norm(f)


def _lebesgue_area_moments(count: int) -> MomentSequence:
    # Moments of d(mu) = 2r dr on [0, 1]: m[j] = 2/(j+2).
    return MomentSequence(tuple(2.0 / (j + 2) for j in range(count)))


def hardy(d: int, max_degree: int | None = None) -> SpaceSpec:
    """Boundary L2 space: radial measure is the unit point mass at r = 1."""
    md = max_degree if max_degree is not None else default_max_degree(d)
    moments = MomentSequence((1.0,) * (2 * md + 1))
    return SpaceSpec(KIND_DIAGONAL_BESOV, d, 0, md, moments=moments)


def bergman(d: int, max_degree: int | None = None) -> SpaceSpec:
    """Volume L2 space: radial measure 2r dr, no derivative."""
    md = max_degree if max_degree is not None else default_max_degree(d)
    return SpaceSpec(
        KIND_DIAGONAL_BESOV, d, 0, md, moments=_lebesgue_area_moments(2 * md + 1)
    )


def dirichlet_type(d: int, max_degree: int | None = None) -> SpaceSpec:
    """One radial derivative against the measure 2r dr."""
    md = max_degree if max_degree is not None else default_max_degree(d)
    return SpaceSpec(
        KIND_DIAGONAL_BESOV, d, 1, md, moments=_lebesgue_area_moments(2 * md + 1)
    )


def drury_arveson(d: int, max_degree: int | None = None) -> SpaceSpec:
    """Monomial weights alpha!/|alpha|! (kernel 1/(1 - <z, w>))."""
    return SpaceSpec(KIND_DRURY_ARVESON, d, 0, max_degree)


PRESET_BUILDERS = {
    "hardy": hardy,
    "bergman": bergman,
    "dirichlet_type": dirichlet_type,
    "drury_arveson": drury_arveson,
}


def preset(name: str, d: int, max_degree: int | None = None) -> SpaceSpec:
    """Build a preset space by string name, e.g. preset("hardy", 1)."""
    try:
        builder = PRESET_BUILDERS[name]
    except KeyError:
        raise ArgumentError(
            f"unknown preset {name!r}; choose from {sorted(PRESET_BUILDERS)}"
        ) from None
    return builder(d, max_degree)
