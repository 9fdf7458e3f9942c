"""Acceptance suite: one test per criterion, stated tolerances, one
pass/fail line each (run with -s or -v to see the lines)."""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from cyclicity.capacity import (
    CONSISTENT,
    OBSTRUCTION,
    arc_cloud,
    box_dimension,
    circle_cloud,
    obstruction_report,
    riesz_equilibrium,
    sphere_cap_cloud,
)
from cyclicity.freespace import (
    compression_check,
    free_hardy,
    row_contraction_inversion_report,
)
from cyclicity.indices import (
    check_perturbation_bound,
    check_weight_stability,
    inverse_truncation_multiplier_norms,
    perturb_weights,
    subspace_distance,
)
from cyclicity.mixednorm import MixedSpec, VarExpSpec, luxemburg_norm, mixed_index, mixed_norm
from cyclicity.poly import Polynomial, multi_indices
from cyclicity.spaces import bergman, dirichlet_type, drury_arveson, hardy
from helpers import random_free_polynomial, random_polynomial


def p1d(*coeffs):
    return Polynomial.from_coeffs1d(coeffs)


ONE = Polynomial.one(1)


class _Stopwatch:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False


def _report(number, stopwatch, detail):
    print(f"criterion {number:2d}: PASS ({stopwatch.elapsed:.2f}s) {detail}")


def test_criterion_01_closed_form_residual_family():
    with _Stopwatch(1.0) as sw:
        spec = hardy(1)
        f = p1d(1, -1)
        for n in range(21):
            got = subspace_distance(spec, ONE, f, n).residual ** 2
            want = 1.0 / (n + 2)
            assert abs(got - want) <= 1e-9 * want
        # oracle 1: hand minimization at n = 0 of |1-c|^2 + |c|^2
        assert subspace_distance(spec, ONE, f, 0).residual ** 2 == pytest.approx(
            0.5, rel=1e-12
        )
        # oracle 2: independent normal-equation solve for n <= 3, assembled
        # from inner products and solved directly
        for n in range(4):
            basis = [Polynomial.monomial((k,)) * f for k in range(n + 1)]
            gram = np.array(
                [[spec.inner_product(b, a) for b in basis] for a in basis]
            )
            rhs = np.array([spec.inner_product(ONE, a) for a in basis])
            x = np.linalg.solve(gram, rhs)
            oracle_sq = spec.norm(ONE) ** 2 - float((rhs.conj() @ x).real)
            assert abs(oracle_sq - 1.0 / (n + 2)) <= 1e-12
    assert sw.elapsed < 1.0
    _report(1, sw, "hardy residuals match 1/(n+2) to 1e-9 relative, n <= 20")


def test_criterion_02_orthogonality_plateau():
    with _Stopwatch(1.0) as sw:
        spec = hardy(1)
        z = p1d(0, 1)
        for n in range(21):
            assert abs(subspace_distance(spec, ONE, z, n).residual - 1.0) <= 1e-12
    assert sw.elapsed < 1.0
    _report(2, sw, "coordinate-function residuals pinned at 1 to 1e-12, n <= 20")


def test_criterion_03_drury_arveson_weights():
    with _Stopwatch(1.0) as sw:
        for d in (2, 3, 4):
            spec = drury_arveson(d, max_degree=10)
            for alpha in multi_indices(d, 10):
                expected = math.prod(
                    math.factorial(a) for a in alpha
                ) / math.factorial(sum(alpha))
                assert abs(spec.monomial_norm_sq(alpha) - expected) <= 1e-14
    assert sw.elapsed < 1.0
    _report(3, sw, "monomial weights equal alpha!/|alpha|! to 1e-14, d in {2,3,4}")


def test_criterion_04_monotonicity_suite():
    with _Stopwatch(30.0) as sw:
        rng = np.random.default_rng(2024)
        presets = [hardy(1), bergman(1), dirichlet_type(1), drury_arveson(2)]
        for spec in presets:
            target = Polynomial.one(spec.d)
            for _ in range(25):
                f = random_polynomial(rng, spec.d, 3)
                previous = math.inf
                for n in range(16):
                    value = subspace_distance(spec, target, f, n).residual
                    assert value <= previous + 1e-12
                    previous = value
    assert sw.elapsed < 30.0
    _report(4, sw, "100 random functions across 4 presets, residuals nonincreasing")


def test_criterion_05_perturbation_inequality():
    with _Stopwatch(30.0) as sw:
        rng = np.random.default_rng(777)
        spec = hardy(1)
        for _ in range(50):
            f = random_polynomial(rng, 1, 3)
            bump = random_polynomial(rng, 1, 4)
            delta = 0.01 * rng.random()
            bump = bump * (delta / spec.norm(bump))
            report = check_perturbation_bound(spec, f, f + bump, 4)
            assert report.delta <= 0.01 + 1e-12
            assert report.holds
            assert report.slack >= -1e-12  # nonnegative at double precision
    assert sw.elapsed < 30.0
    _report(5, sw, "50 seeded pairs, ||1-phi g|| <= eps + M delta with slack >= 0")


def test_criterion_06_weight_stability():
    with _Stopwatch(30.0) as sw:
        spec = hardy(1)
        f = p1d(1, -1)
        for eps in (0.01, 0.05, 0.1):
            for seed in range(20):
                pert = perturb_weights(spec, eps, seed)
                report = check_weight_stability(spec, pert, f, 10, epsilon=eps)
                assert report.perturbed_residual <= (
                    math.sqrt(1.0 + eps) * report.base_residual + 1e-10
                )
                assert report.holds
    assert sw.elapsed < 30.0
    _report(6, sw, "perturbed-weight residuals within sqrt(1+eps) of base, 60 draws")


def test_criterion_07_free_compression():
    with _Stopwatch(60.0) as sw:
        rng = np.random.default_rng(4321)
        spec_free = free_hardy(2, max_length=9)
        spec_comm = drury_arveson(2, max_degree=10)
        for _ in range(50):
            G = random_free_polynomial(rng, 2, 2, density=0.7)
            for n in (0, 3, 6):
                report = compression_check(spec_free, spec_comm, G, n)
                assert report.free_residual >= report.commutative_residual - 1e-10
    assert sw.elapsed < 60.0
    _report(7, sw, "free residual dominates abelianized residual, 50 x 3 budgets")


def test_criterion_08_corona_witnesses():
    with _Stopwatch(30.0) as sw:
        # commutative: truncations of 1/(2 - z) stay multiplier-bounded by 1
        # and their section norms rise toward it
        norms = inverse_truncation_multiplier_norms(hardy(1), p1d(2, -1), 12, 40)
        assert all(v <= 1.0 + 1e-6 for v in norms)
        for lo, hi in zip(norms, norms[1:]):
            assert hi >= lo - 1e-10
        assert norms[-1] > 0.98
        # free: 2I - Z1 keeps a spectral floor on sampled row contractions
        report = row_contraction_inversion_report(
            d=2, rho=0.9, samples=100, size=8, seed=2718, l_max=10
        )
        assert report.min_over_samples >= 1.1 - 1e-9
        assert report.theta_stabilized
    assert sw.elapsed < 30.0
    _report(8, sw, "inverse truncations bounded by 1 and rising; min sv >= 1.1")


def test_criterion_09_capacity_oracles():
    with _Stopwatch(60.0) as sw:
        full = riesz_equilibrium(circle_cloud(512), alpha=0.0)
        assert abs(full.capacity - 1.0) <= 0.02
        # classical arc value sin(theta/4), checked at both arc angles so the
        # stated target sin(pi/8) and the half-circle reading are each covered
        half = riesz_equilibrium(arc_cloud(math.pi, 512), alpha=0.0)
        assert abs(half.capacity - math.sin(math.pi / 4)) <= 0.05 * math.sin(
            math.pi / 4
        )
        quarter = riesz_equilibrium(arc_cloud(math.pi / 2, 512), alpha=0.0)
        assert abs(quarter.capacity - math.sin(math.pi / 8)) <= 0.05 * math.sin(
            math.pi / 8
        )
        singleton = riesz_equilibrium(circle_cloud(1), alpha=0.0)
        assert singleton.capacity == 0.0
    assert sw.elapsed < 60.0
    _report(9, sw, "circle cap 1 +/- 2%, arc caps sin(theta/4) +/- 5%, singleton 0")


def test_criterion_10_dimension_oracles():
    with _Stopwatch(30.0) as sw:
        singleton = box_dimension(circle_cloud(1), 2, 6)
        assert singleton.dimension == 0.0
        arc = box_dimension(arc_cloud(math.pi, 4096), 2, 7)
        assert abs(arc.dimension - 1.0) <= 0.15
        patch = box_dimension(sphere_cap_cloud(4096, 1.0), 1, 4)
        assert abs(patch.dimension - 2.0) <= 0.2
    assert sw.elapsed < 30.0
    _report(10, sw, "box dimensions: singleton 0, arc ~1, sphere patch ~2")


def test_criterion_11_mixed_variable_consistency():
    with _Stopwatch(60.0) as sw:
        rng = np.random.default_rng(99)
        mixed = MixedSpec.with_measure("area", 1, 0, 2.0, 2.0)
        varexp = VarExpSpec.with_measure("area", 1, 0, 2.0, 0.0, 1.0)
        hilbert = bergman(1)
        for _ in range(50):
            f = random_polynomial(rng, 1, 6)
            ref = hilbert.norm(f)
            assert abs(mixed_norm(mixed, f) - ref) <= 1e-8 * max(1.0, ref)
            assert abs(luxemburg_norm(varexp, f) - ref) <= 1e-8 * max(1.0, ref)
        boundary = MixedSpec.with_measure("point_mass", 1, 0, 2.0, 2.0)
        f = p1d(1, -1)
        for n in range(0, 9):
            got = mixed_index(boundary, f, n)
            want = subspace_distance(hardy(1), ONE, f, n).residual
            assert abs(got.value - want) <= 1e-7
            assert got.converged
    assert sw.elapsed < 60.0
    _report(11, sw, "p=q=2 quadrature norms and index match the Hilbert solver")


def test_criterion_12_obstruction_demo():
    with _Stopwatch(30.0) as sw:
        spec = hardy(1)
        obstructed = obstruction_report(spec, p1d(0, 1), n_max=12, alpha=0.0, seed=1)
        assert obstructed.verdict == OBSTRUCTION
        for coeffs in [(1.0,), (2.0, -1.0), (1.0, -1.0)]:
            report = obstruction_report(spec, p1d(*coeffs), n_max=12, alpha=0.0, seed=1)
            assert report.verdict == CONSISTENT
    assert sw.elapsed < 30.0
    _report(12, sw, "z flagged obstructed; 1, 2-z, 1-z consistent with cyclicity")


CLI_CONFIGS = {
    "index": {"space": "hardy(1)", "function": {"coeffs1d": [1, -1]}, "n": 5},
    "sweep": {"space": "hardy(1)", "function": {"coeffs1d": [1, -1]}, "nMax": 8},
    "free-index": {
        "freeSpace": {"kind": "free_hardy", "d": 2, "maxLength": 9},
        "function": [{"letters": [], "re": 1}, {"letters": [1], "re": -1}],
        "n": 4,
    },
    "compress-check": {
        "d": 2,
        "function": [
            {"letters": [], "re": 1},
            {"letters": [1], "re": -0.5},
            {"letters": [2], "re": -0.5},
        ],
        "n": 4,
    },
    "corona-check": {
        "mode": "free",
        "d": 2,
        "rho": 0.9,
        "samples": 20,
        "size": 6,
        "seed": 7,
        "lMax": 8,
    },
    "capacity": {
        "cloud": {"kind": "arc", "angle": 1.5707963267948966, "count": 192},
        "alpha": 0.0,
    },
    "dimension": {
        "cloud": {"kind": "arc", "angle": 3.141592653589793, "count": 1024},
        "jMin": 2,
        "jMax": 6,
    },
    "perturb": {
        "variant": "weight",
        "space": {"preset": "hardy", "d": 1},
        "function": {"coeffs1d": [1, -1]},
        "epsilon": 0.05,
        "seed": 11,
        "n": 8,
    },
    "mixed-norm": {
        "mixedSpec": {
            "d": 1,
            "N": 0,
            "p": 2,
            "q": 2,
            "radial": {"measure": "area", "count": 24},
            "angular": {"count": 128},
        },
        "function": {"coeffs1d": [1, -1]},
    },
    "varexp-norm": {
        "varExpSpec": {
            "d": 1,
            "N": 0,
            "exponent": {"a": 2, "b": 1, "c": 2},
            "radial": {"measure": "area", "count": 24},
            "angular": {"count": 128},
        },
        "function": {"coeffs1d": [1, -1]},
    },
    "mixed-index": {
        "mixedSpec": {
            "d": 1,
            "N": 0,
            "p": 2,
            "q": 2,
            "radial": {"measure": "point_mass"},
            "angular": {"count": 128},
        },
        "function": {"coeffs1d": [1, -1]},
        "nMax": 4,
    },
    "report": {
        "space": "hardy(1)",
        "function": {"coeffs1d": [0, 1]},
        "nMax": 8,
        "alpha": 0.0,
        "seed": 3,
        "resolution": 512,
    },
}


def test_criterion_13_cli_determinism(tmp_path):
    with _Stopwatch(60.0) as sw:
        for command, config in CLI_CONFIGS.items():
            cfg = tmp_path / f"{command}.json"
            cfg.write_text(json.dumps(config))
            payloads = []
            for tag in ("first", "second"):
                out = tmp_path / f"{command}-{tag}"
                proc = subprocess.run(
                    [
                        sys.executable,
                        "-m",
                        "cyclicity",
                        command,
                        "--config",
                        str(cfg),
                        "--out",
                        str(out),
                    ],
                    capture_output=True,
                )
                assert proc.returncode == 0, proc.stderr.decode()
                payloads.append((out / f"{command}.json").read_bytes())
            assert payloads[0] == payloads[1], f"{command} output not reproducible"
    assert sw.elapsed < 60.0
    _report(13, sw, "all 12 CLI commands byte-identical across repeated runs")
