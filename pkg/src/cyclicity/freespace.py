"""Word-indexed free (non-commutative) power series and their diagonal norms.

Words over the letters 1..d index coefficients; multiplication concatenates
words, so the algebra is associative but not commutative. The canonical
word order is length first, then lexicographic. Norms are weighted l2 sums
over word coefficients with a weight depending on word length only, which
makes the free least-squares problems the exact analogue of the commutative
ones.

The letter-counting map (`abelianize`) sends a word to the multi-index of
its letter multiplicities. Against the Drury-Arveson weights
alpha!/|alpha|! it is a unital multiplicative contraction, because each
multi-index alpha collects exactly |alpha|!/alpha! words and Cauchy-Schwarz
absorbs that multiplicity. That contraction is what makes the free index
dominate the commutative index of the abelianization at matched budgets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    ArgumentError,
    DegenerateInputError,
    DegreeRangeError,
    DimensionMismatchError,
    SingularInversionError,
)
from .indices import ApproximantResult, subspace_distance
from .poly import Polynomial
from .solver import DEFAULT_COND_THRESHOLD, solve_least_squares
from .spaces import KIND_DRURY_ARVESON, SpaceSpec

KIND_FREE_HARDY = "free_hardy"
KIND_FREE_BESOV = "free_besov"

Word = tuple[int, ...]


def words(d: int, max_length: int) -> list[Word]:
    """All words over letters 1..d with length <= max_length, length-then-lex."""
    if d < 1:
        raise ArgumentError("d must be >= 1")
    if max_length < 0:
        raise ArgumentError("max_length must be >= 0")
    out: list[Word] = []
    for length in range(max_length + 1):
        out.extend(itertools.product(range(1, d + 1), repeat=length))
    return out


class FreePolynomial:
    """Finite free power series: sparse map from words to complex coefficients."""

    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: Mapping[Word, complex] | None = None):
        if d < 1:
            raise ArgumentError("d must be >= 1")
        self.d = int(d)
        cleaned: dict[Word, complex] = {}
        for word, value in (coeffs or {}).items():
            key = tuple(int(a) for a in word)
            if any(not 1 <= a <= self.d for a in key):
                raise ArgumentError(f"word {key} has letters outside 1..{self.d}")
            c = complex(value)
            if c != 0:
                cleaned[key] = cleaned.get(key, 0j) + c
        self.coeffs = {k: v for k, v in cleaned.items() if v != 0}

    @classmethod
    def zero(cls, d: int) -> "FreePolynomial":
        return cls(d, {})

    @classmethod
    def identity(cls, d: int) -> "FreePolynomial":
        return cls(d, {(): 1.0})

    @classmethod
    def letter(cls, j: int, d: int) -> "FreePolynomial":
        """The generator Z_j (1-based j)."""
        if not 1 <= j <= d:
            raise ArgumentError(f"letter {j} out of range 1..{d}")
        return cls(d, {(j,): 1.0})

    @classmethod
    def word_monomial(cls, word: Sequence[int], d: int, coefficient: complex = 1.0):
        return cls(d, {tuple(word): coefficient})

    @property
    def degree(self) -> int:
        """Largest word length carrying a coefficient."""
        return max((len(w) for w in self.coeffs), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def constant_term(self) -> complex:
        return self.coeffs.get((), 0j)

    def coefficient(self, word: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(word), 0j)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreePolynomial):
            return NotImplemented
        return self.d == other.d and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.d, frozenset(self.coeffs.items())))

    def __add__(self, other: "FreePolynomial") -> "FreePolynomial":
        other = self._coerce(other)
        merged = dict(self.coeffs)
        for w, c in other.coeffs.items():
            merged[w] = merged.get(w, 0j) + c
        return FreePolynomial(self.d, merged)

    def __radd__(self, other: complex) -> "FreePolynomial":
        return self + other

    def __neg__(self) -> "FreePolynomial":
        return FreePolynomial(self.d, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other: "FreePolynomial") -> "FreePolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other: complex) -> "FreePolynomial":
        return (-self) + other

    def __mul__(self, other: "FreePolynomial | complex") -> "FreePolynomial":
        if isinstance(other, FreePolynomial):
            if other.d != self.d:
                raise DimensionMismatchError(
                    f"cannot multiply free polynomials over {self.d} and {other.d} letters"
                )
            prod: dict[Word, complex] = {}
            for u, cu in self.coeffs.items():
                for v, cv in other.coeffs.items():
                    key = u + v
                    prod[key] = prod.get(key, 0j) + cu * cv
            return FreePolynomial(self.d, prod)
        return FreePolynomial(self.d, {w: c * other for w, c in self.coeffs.items()})

    def __rmul__(self, other: complex) -> "FreePolynomial":
        # scalar only; free multiplication is order-sensitive
        return FreePolynomial(self.d, {w: other * c for w, c in self.coeffs.items()})

    def _coerce(self, other) -> "FreePolynomial":
        if isinstance(other, FreePolynomial):
            return other
        return FreePolynomial(self.d, {(): complex(other)})

    def to_json(self) -> list[dict]:
        terms = []
        for word in sorted(self.coeffs, key=lambda w: (len(w), w)):
            c = self.coeffs[word]
            terms.append({"letters": list(word), "re": c.real, "im": c.imag})
        return terms

    @classmethod
    def from_json(cls, terms: Sequence[Mapping], d: int) -> "FreePolynomial":
        coeffs = {}
        for t in terms:
            word = tuple(int(a) for a in t["letters"])
            coeffs[word] = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        return cls(d, coeffs)

    def __repr__(self) -> str:
        if self.is_zero:
            return f"FreePolynomial(d={self.d}, 0)"
        parts = []
        for word in sorted(self.coeffs, key=lambda w: (len(w), w))[:6]:
            parts.append(f"{self.coeffs[word]:.4g}*Z{list(word)}")
        tail = " + ..." if len(self.coeffs) > 6 else ""
        return f"FreePolynomial(d={self.d}, {' + '.join(parts)}{tail})"


class FreeSpaceSpec:
    """Diagonal free function space: one positive weight per word length."""

    __slots__ = ("kind", "d", "max_length", "smoothness", "_weights")

    def __init__(
        self,
        kind: str,
        d: int,
        max_length: int,
        smoothness: float = 0.0,
        weights: Sequence[float] | None = None,
    ):
        if kind not in (KIND_FREE_HARDY, KIND_FREE_BESOV):
            raise ArgumentError(f"unknown free space kind {kind!r}")
        if d < 1:
            raise ArgumentError("d must be >= 1")
        if max_length < 0:
            raise ArgumentError("max_length must be >= 0")
        self.kind = kind
        self.d = int(d)
        self.max_length = int(max_length)
        self.smoothness = float(smoothness)
        if weights is not None:
            table = tuple(float(w) for w in weights)
        elif kind == KIND_FREE_HARDY:
            table = (1.0,) * (max_length + 1)
        else:
            table = tuple(
                float(k + 1) ** (2.0 * self.smoothness) for k in range(max_length + 1)
            )
        if len(table) < max_length + 1:
            raise ArgumentError("weight table shorter than max_length + 1")
        if any(w <= 0 or not math.isfinite(w) for w in table):
            raise ArgumentError("word-length weights must be positive finite")
        self._weights = table

    def weight(self, length: int) -> float:
        if not 0 <= length <= self.max_length:
            raise DegreeRangeError(
                f"word length {length} beyond precomputed max_length={self.max_length}"
            )
        return self._weights[length]

    def inner_product(self, F: FreePolynomial, G: FreePolynomial) -> complex:
        if F.d != self.d or G.d != self.d:
            raise DimensionMismatchError("free polynomials do not match the space")
        if F.degree > self.max_length or G.degree > self.max_length:
            raise DegreeRangeError(
                f"word length exceeds precomputed max_length={self.max_length}"
            )
        acc = 0j
        small, large = (F, G) if len(F.coeffs) <= len(G.coeffs) else (G, F)
        for word, cs in small.coeffs.items():
            cl = large.coeffs.get(word)
            if cl is not None:
                w = self._weights[len(word)]
                if small is F:
                    acc += w * cs * cl.conjugate()
                else:
                    acc += w * cl * cs.conjugate()
        return acc

    def norm(self, F: FreePolynomial) -> float:
        return math.sqrt(max(self.inner_product(F, F).real, 0.0))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "d": self.d, "maxLength": self.max_length}
        if self.kind == KIND_FREE_BESOV:
            out["s"] = self.smoothness
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "FreeSpaceSpec":
        kind = obj.get("kind")
        if kind == KIND_FREE_HARDY:
            return free_hardy(int(obj["d"]), int(obj.get("maxLength", 12)))
        if kind == KIND_FREE_BESOV:
            return free_besov(
                int(obj["d"]), float(obj.get("s", 0.0)), int(obj.get("maxLength", 12))
            )
        raise ArgumentError(f"unknown free space kind {kind!r}")

    def __repr__(self) -> str:
        return (
            f"FreeSpaceSpec(kind={self.kind!r}, d={self.d}, "
            f"max_length={self.max_length})"
        )


def free_hardy(d: int, max_length: int = 12) -> FreeSpaceSpec:
    """Unit weights: square-summable word coefficients."""
    return FreeSpaceSpec(KIND_FREE_HARDY, d, max_length)


def free_besov(d: int, s: float, max_length: int = 12) -> FreeSpaceSpec:
    """Length weights (k+1)^(2s), mirroring commutative radial-derivative scaling."""
    if s < 0:
        raise ArgumentError("smoothness s must be >= 0")
    return FreeSpaceSpec(KIND_FREE_BESOV, d, max_length, smoothness=s)


def free_multiply(F: FreePolynomial, G: FreePolynomial) -> FreePolynomial:
    return F * G


def free_norm(spec: FreeSpaceSpec, F: FreePolynomial) -> float:
    return spec.norm(F)


def free_subspace_distance(
    spec: FreeSpaceSpec,
    g: FreePolynomial,
    G: FreePolynomial,
    n: int,
    cond_threshold: float = DEFAULT_COND_THRESHOLD,
) -> ApproximantResult:
    """Distance from g to {Phi G : words of Phi of length <= n} with minimizer.

    Same normal-equations machinery as the commutative solver, over the
    word basis {Z^w G : |w| <= n}.
    """
    if G.d != spec.d or g.d != spec.d:
        raise ArgumentError("free polynomial dimension does not match the space")
    if G.is_zero:
        raise DegenerateInputError("G must be nonzero")
    if n < 0:
        raise ArgumentError("length budget n must be >= 0")
    if n + G.degree > spec.max_length:
        raise DegreeRangeError(
            f"n + deg G = {n + G.degree} exceeds max_length={spec.max_length}"
        )
    if g.degree > spec.max_length:
        raise DegreeRangeError(
            f"deg g = {g.degree} exceeds max_length={spec.max_length}"
        )
    cols = words(spec.d, n)
    row_length = max(n + G.degree, g.degree)
    rows = words(spec.d, row_length)
    pos = {w: i for i, w in enumerate(rows)}
    sqrt_w = np.array([math.sqrt(spec.weight(len(w))) for w in rows])
    design = np.zeros((len(rows), len(cols)), dtype=complex)
    for j, u in enumerate(cols):
        shifted = FreePolynomial.word_monomial(u, spec.d) * G
        for word, c in shifted.coeffs.items():
            i = pos[word]
            design[i, j] = c * sqrt_w[i]
    target = np.zeros(len(rows), dtype=complex)
    for word, c in g.coeffs.items():
        i = pos[word]
        target[i] = c * sqrt_w[i]
    out = solve_least_squares(design, target, cond_threshold)
    phi = FreePolynomial(spec.d, dict(zip(cols, out.coefficients)))
    return ApproximantResult(n, phi, out.residual, out.gram_condition, out.method)


def abelianize(F: FreePolynomial) -> Polynomial:
    """Letter-counting quotient: Z^w maps to z^(multiplicity vector of w).

    Unital and multiplicative; contracts free Hardy norms into
    Drury-Arveson norms.
    """
    coeffs: dict[tuple[int, ...], complex] = {}
    for word, c in F.coeffs.items():
        alpha = [0] * F.d
        for letter in word:
            alpha[letter - 1] += 1
        key = tuple(alpha)
        coeffs[key] = coeffs.get(key, 0j) + c
    return Polynomial(F.d, coeffs)


def free_invert(Psi: FreePolynomial, length: int) -> FreePolynomial:
    """Truncated two-sided-inverse candidate: Psi * Theta - I has no words
    of length <= length. Recursion on word length; requires a nonzero
    coefficient at the empty word."""
    if length < 0:
        raise ArgumentError("truncation length must be >= 0")
    c0 = Psi.constant_term
    if c0 == 0:
        raise SingularInversionError(
            "cannot invert a free series whose identity coefficient vanishes"
        )
    inv0 = 1.0 / c0
    out: dict[Word, complex] = {(): inv0}
    lower = {w: c for w, c in Psi.coeffs.items() if 0 < len(w) <= length}
    for k in range(1, length + 1):
        for word in itertools.product(range(1, Psi.d + 1), repeat=k):
            acc = 0j
            for u, cu in lower.items():
                if len(u) <= k and word[: len(u)] == u:
                    tv = out.get(word[len(u) :])
                    if tv is not None:
                        acc += cu * tv
            if acc != 0:
                out[word] = -inv0 * acc
    return FreePolynomial(Psi.d, out)


def evaluate_on_tuple(F: FreePolynomial, mats: Sequence[np.ndarray]) -> np.ndarray:
    """Substitute square matrices for the letters; the empty word becomes I."""
    if len(mats) != F.d:
        raise DimensionMismatchError(f"expected {F.d} matrices, got {len(mats)}")
    arrays = [np.asarray(m, dtype=complex) for m in mats]
    size = arrays[0].shape[0]
    for m in arrays:
        if m.ndim != 2 or m.shape != (size, size):
            raise ArgumentError("all matrices must be square and of equal size")
    out = np.zeros((size, size), dtype=complex)
    eye = np.eye(size, dtype=complex)
    # sorted accumulation keeps evaluation deterministic regardless of
    # coefficient insertion order
    for word in sorted(F.coeffs, key=lambda w: (len(w), w)):
        prod = eye
        for letter in word:
            prod = prod @ arrays[letter - 1]
        out += F.coeffs[word] * prod
    return out


def _row_contraction_from_rng(
    rng: np.random.Generator, d: int, size: int, rho: float
) -> tuple[np.ndarray, ...]:
    blocks = [
        (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size)))
        / math.sqrt(2.0)
        for _ in range(d)
    ]
    if rho == 0:
        return tuple(np.zeros((size, size), dtype=complex) for _ in range(d))
    row = np.hstack(blocks)
    scale = rho / np.linalg.svd(row, compute_uv=False)[0]
    return tuple(b * scale for b in blocks)


def sample_row_contraction(
    d: int, size: int, rho: float, seed: int
) -> tuple[np.ndarray, ...]:
    """Random matrix tuple whose row block [Z_1 ... Z_d] has operator norm rho.

    Gaussian blocks rescaled exactly; reproducible for a fixed seed.
    """
    if d < 1 or size < 1:
        raise ArgumentError("d and size must be >= 1")
    if not 0 <= rho < 1:
        raise ArgumentError("rho must lie in [0, 1)")
    return _row_contraction_from_rng(np.random.default_rng(seed), d, size, rho)


def tuple_to_json(mats: Sequence[np.ndarray]) -> list[dict]:
    """Serialize a matrix tuple for replay: one {re, im} matrix pair per letter."""
    out = []
    for m in mats:
        arr = np.asarray(m, dtype=complex)
        out.append({"re": arr.real.tolist(), "im": arr.imag.tolist()})
    return out


def tuple_from_json(data: Sequence[Mapping]) -> tuple[np.ndarray, ...]:
    return tuple(
        np.asarray(entry["re"], dtype=float) + 1j * np.asarray(entry["im"], dtype=float)
        for entry in data
    )


@dataclass
class CompressionReport:
    """Free index against the commutative index of the abelianization."""

    n: int
    free_residual: float
    commutative_residual: float
    gap: float
    holds: bool

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "freeResidual": self.free_residual,
            "commutativeResidual": self.commutative_residual,
            "gap": self.gap,
            "holds": self.holds,
        }


def compression_check(
    spec_free: FreeSpaceSpec,
    spec_comm: SpaceSpec,
    G: FreePolynomial,
    n: int,
) -> CompressionReport:
    """Verify the free residual dominates the commutative residual of the
    abelianization at the same budget.

    Requires the symmetric-Fock pairing: unit word weights on the free side
    and Drury-Arveson weights on the commutative side, same d.
    """
    if spec_free.kind != KIND_FREE_HARDY:
        raise ArgumentError("compression pairing requires unit free weights")
    if spec_comm.kind != KIND_DRURY_ARVESON:
        raise ArgumentError("compression pairing requires Drury-Arveson weights")
    if spec_free.d != spec_comm.d:
        raise DimensionMismatchError("free and commutative sides must share d")
    free_res = free_subspace_distance(
        spec_free, FreePolynomial.identity(spec_free.d), G, n
    ).residual
    comm_res = subspace_distance(
        spec_comm, Polynomial.one(spec_comm.d), abelianize(G), n
    ).residual
    return CompressionReport(
        n=n,
        free_residual=free_res,
        commutative_residual=comm_res,
        gap=free_res - comm_res,
        holds=free_res >= comm_res - 1e-10,
    )


@dataclass
class RowContractionInversionReport:
    """Spectral floor of 2I - Z_1 on sampled tuples plus inverse-truncation data."""

    d: int
    rho: float
    samples: int
    size: int
    min_singular_values: list[float]
    min_over_samples: float
    theta_lengths: list[int]
    theta_norms: list[float]
    theta_stabilized: bool
    max_tuple_norm: float
    tuple_norm_envelope: float | None

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "rho": self.rho,
            "samples": self.samples,
            "size": self.size,
            "minSingularValues": self.min_singular_values,
            "minOverSamples": self.min_over_samples,
            "thetaLengths": self.theta_lengths,
            "thetaNorms": self.theta_norms,
            "thetaStabilized": self.theta_stabilized,
            "maxTupleNorm": self.max_tuple_norm,
            "tupleNormEnvelope": self.tuple_norm_envelope,
        }


def row_contraction_inversion_report(
    d: int,
    rho: float,
    samples: int,
    size: int,
    seed: int,
    l_max: int = 10,
) -> RowContractionInversionReport:
    """Check that Psi = 2I - Z_1 stays bounded below on sampled row
    contractions and that its truncated inverse series stabilizes.

    The modulus bound |Psi(Z)| >= c is read as a floor on the smallest
    singular value of Psi(Z). Bounded below forces invertibility; the
    numerical witness is that the truncation norms of the inverse series
    settle (last two lengths within 1e-3).
    """
    if samples < 1:
        raise ArgumentError("samples must be >= 1")
    if l_max < 1:
        raise ArgumentError("l_max must be >= 1")
    psi = 2.0 * FreePolynomial.identity(d) - FreePolynomial.letter(1, d)
    norm_space = free_hardy(d, max_length=l_max)
    theta_norms = [
        norm_space.norm(free_invert(psi, length)) for length in range(l_max + 1)
    ]
    stabilized = abs(theta_norms[-1] - theta_norms[-2]) < 1e-3
    theta = free_invert(psi, l_max)
    rng = np.random.default_rng(seed)
    min_svs = []
    max_tuple_norm = 0.0
    for _ in range(samples):
        mats = _row_contraction_from_rng(rng, d, size, rho)
        psi_eval = evaluate_on_tuple(psi, mats)
        min_svs.append(float(np.linalg.svd(psi_eval, compute_uv=False)[-1]))
        theta_eval = evaluate_on_tuple(theta, mats)
        max_tuple_norm = max(
            max_tuple_norm, float(np.linalg.svd(theta_eval, compute_uv=False)[0])
        )
    envelope = None
    denom = 2.0 - rho * math.sqrt(d)
    if denom > 0:
        envelope = 1.0 / denom
    return RowContractionInversionReport(
        d=d,
        rho=rho,
        samples=samples,
        size=size,
        min_singular_values=min_svs,
        min_over_samples=min(min_svs),
        theta_lengths=list(range(l_max + 1)),
        theta_norms=theta_norms,
        theta_stabilized=stabilized,
        max_tuple_norm=max_tuple_norm,
        tuple_norm_envelope=envelope,
    )
