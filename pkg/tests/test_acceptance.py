"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Every criterion runs at its stated tolerance and wall-clock budget.  The
brute-force oracles here are deliberately independent of the library's
scanners: dense fractional-part grids with hand-derived closed-form kernels.
"""

import math
import time

import numpy as np
import pytest

import expsampling as es
from expsampling import ExpSamples, LogGrid, SamplingConfig
from expsampling.analysis import (
    convergence_experiment,
    max_product_lattice_checks,
    tail_decay_check,
    verify_operator_norm,
    verify_quantitative_rate,
    verify_weighted_image_bound,
    voronovskaja_check,
)
from expsampling.operators import default_half_width, max_product_series_on_grid
from expsampling.spaces import get_function, weighted_log_modulus

GRID257 = LogGrid(-2.0, 2.0, 257)
GRID251 = LogGrid(-2.0, 2.0, 251)  # spacing incommensurate with the w-lattices


class _Budget:
    def __init__(self, seconds):
        self.limit = seconds
        self.start = time.perf_counter()

    def done(self, label, detail=""):
        elapsed = time.perf_counter() - self.start
        assert elapsed < self.limit, f"{label}: {elapsed:.2f}s over budget {self.limit}s"
        suffix = f" -- {detail}" if detail else ""
        print(f"[PASS] {label}{suffix} ({elapsed:.2f}s < {self.limit:g}s)")


def _constant_samples(kernel, w, grid, c):
    half = default_half_width(kernel, w)
    lo = math.ceil(w * grid.log_min - half)
    hi = math.floor(w * grid.log_max + half)
    return ExpSamples(w, {k: c for k in range(lo, hi + 1)})


def test_criterion_01_constant_reproduction():
    budget = _Budget(1.0)
    passing = [k for k in es.KERNELS.values() if es.eta_lower_bound(k) > 0.0]
    assert {"bspline3", "gauss1"} <= {k.name for k in passing}
    worst = 0.0
    for kernel in passing:
        for w in (1.0, 8.0, 64.0):
            config = SamplingConfig(w=w)
            for c in (1.0, 2.5):
                samples = _constant_samples(kernel, w, GRID257, c)
                values = max_product_series_on_grid(kernel, samples, GRID257, config)
                worst = max(worst, float(np.max(np.abs(values - c))) / c)
    assert worst <= 1e-14
    budget.done("criterion 01: constant reproduction", f"worst rel err {worst:.2e}")


def test_criterion_02_lattice_properties():
    budget = _Budget(5.0)
    config = SamplingConfig(w=8.0, interval=(1.0, math.e))
    checks = max_product_lattice_checks(
        es.get_kernel("bspline3"), config, LogGrid(0.0, 1.0, 257), n_vectors=1000, seed=20240817
    )
    assert len(checks) == 4
    for c in checks:
        assert c.holds, c.bound_name
        assert c.lhs <= 1e-12, (c.bound_name, c.lhs)  # slack >= -1e-12
    budget.done(
        "criterion 02: max-product lattice properties",
        f"worst violation {max(c.lhs for c in checks):.2e} over 1000 vectors",
    )


def _hat(t):
    return np.maximum(0.0, 1.0 - np.abs(t))


def _quad_spline(t):
    t = np.abs(t)
    return np.where(t <= 0.5, 0.75 - t * t, np.where(t <= 1.5, 0.5 * (1.5 - t) ** 2, 0.0))


def _oracle_moment(profile, nu, points=1_000_000, half_width=4):
    vs = np.arange(points, dtype=float) / points
    best = np.zeros(points)
    for k in range(-half_width, half_width + 2):
        t = vs - k
        np.maximum(best, np.abs(profile(t)) * np.abs(t) ** nu, out=best)
    return float(best.max())


def _oracle_eta(profile, points=1_000_001):
    return float(np.min(profile(np.linspace(0.0, 1.0, points))))


def test_criterion_03_moment_oracles():
    budget = _Budget(10.0)
    b2, b3 = es.get_kernel("bspline2"), es.get_kernel("bspline3")
    cases = [
        ("m0(bspline2)", es.discrete_absolute_moment(b2, 0.0), _oracle_moment(_hat, 0.0), 1.0),
        ("m1(bspline2)", es.discrete_absolute_moment(b2, 1.0), _oracle_moment(_hat, 1.0), 0.25),
        ("m0(bspline3)", es.discrete_absolute_moment(b3, 0.0), _oracle_moment(_quad_spline, 0.0), 0.75),
        ("eta(bspline3)", es.eta_lower_bound(b3), _oracle_eta(_quad_spline), 0.125),
        ("eta(bspline2)", es.eta_lower_bound(b2), _oracle_eta(_hat), 0.0),
    ]
    for label, scanned, oracle, frozen in cases:
        assert abs(scanned - oracle) <= 1e-6, (label, scanned, oracle)
        assert abs(scanned - frozen) <= 1e-6, (label, scanned, frozen)
    budget.done("criterion 03: moment scanner vs dense brute-force oracle")


def test_criterion_04_tail_decay():
    budget = _Budget(20.0)
    count = 0
    for name in ("bspline3", "gauss1"):
        kernel = es.get_kernel(name)
        for nu in (1.0, 2.0, 5.0):
            for delta in (0.25, 0.5):
                for w in (4.0, 8.0, 16.0, 32.0, 64.0, 128.0):
                    c = tail_decay_check(kernel, nu, delta, w)
                    assert c.hypothesis_met and c.holds, (name, nu, delta, w, c.lhs, c.rhs)
                    count += 1
    budget.done("criterion 04: lattice tail decay", f"{count} (kernel, nu, delta, w) cells")


def test_criterion_05_image_and_norm_bounds():
    budget = _Budget(20.0)
    for name in ("bspline3", "gauss1"):
        kernel = es.get_kernel(name)
        for w in (4.0, 16.0, 64.0):
            config = SamplingConfig(w=w)
            c1 = verify_weighted_image_bound(kernel, config, GRID257)
            c2 = verify_operator_norm(kernel, config, GRID257)
            assert c1.holds, (name, w, c1.lhs, c1.rhs)
            assert c2.holds, (name, w, c2.lhs, c2.rhs)
    budget.done("criterion 05: weighted image and operator-norm bounds")


def test_criterion_06_convergence_decay():
    budget = _Budget(30.0)
    kernel = es.get_kernel("bspline3")
    details = []
    for name in ("weight", "damped_log2", "damped_sin_log"):
        table = convergence_experiment(get_function(name), kernel, (4, 8, 16, 32, 64), GRID257)
        errs = [r.weighted_sup_error for r in table.rows]
        assert all(errs[i + 1] < errs[i] for i in range(len(errs) - 1)), (name, errs)
        assert errs[-1] <= 0.25 * errs[0], (name, errs)
        details.append(f"{name}: {errs[0]:.2e}->{errs[-1]:.2e}")
    budget.done("criterion 06: weighted error decay", "; ".join(details))


def test_criterion_07_quantitative_rate():
    budget = _Budget(60.0)
    kernel = es.get_kernel("bspline3")
    orders = []
    for name in ("weight", "damped_log_clip", "tent_log"):
        f = get_function(name)
        checks = verify_quantitative_rate(f, kernel, (8.0, 16.0, 32.0), GRID251, slack=0.05)
        assert all(c.holds for c in checks), name
        table = convergence_experiment(f, kernel, (8, 16, 32, 64, 128, 256), GRID251)
        assert table.fitted_order is not None and table.fitted_order >= 0.8, (
            name,
            table.fitted_order,
        )
        orders.append(f"{name}: order {table.fitted_order:.2f}")
    budget.done("criterion 07: modulus rate bound and empirical order", "; ".join(orders))


def test_criterion_08_asymptotic_expansion():
    budget = _Budget(60.0)
    checks = voronovskaja_check(
        get_function("damped_log2"),
        es.get_kernel("bspline3"),
        r=1,
        w_list=(8.0, 64.0),
        x_grid=GRID257,
        slack=0.05,
        require_constant_moments=False,  # variation report attached instead
    )
    by_w = {c.details["w"]: c for c in checks}
    assert by_w[8.0].holds and by_w[64.0].holds
    assert by_w[64.0].details["left_max"] <= by_w[8.0].details["left_max"]
    for c in checks:
        assert c.details["moment_variation"], "variation report must be attached"
        assert not c.details["moment_constancy_holds"]
    budget.done(
        "criterion 08: asymptotic expansion",
        f"left(8)={by_w[8.0].details['left_max']:.3g} left(64)={by_w[64.0].details['left_max']:.3g}",
    )


def test_criterion_09_log_modulus_properties():
    budget = _Budget(30.0)
    grid = LogGrid(-12.0, 12.0, 1025)
    # monotonicity, exact via nested feasible shift sets
    for name in ("log", "weight", "damped_log2", "tent_log"):
        f = get_function(name)
        vals = [weighted_log_modulus(f, 2.0 ** (-j), grid, 2 ** (8 - j) + 1) for j in range(6)]
        assert all(vals[i + 1] <= vals[i] for i in range(len(vals) - 1)), name
    # scaling bound with factor 2 (1+lambda)^3 (1+delta^2)
    for name in ("log", "weight", "damped_log2", "psi", "tent_log"):
        f = get_function(name)
        for delta in (0.1, 0.5):
            base = weighted_log_modulus(f, delta, grid, 257)
            for lam in (0.5, 1.0, 2.0, 5.0):
                lhs = weighted_log_modulus(f, lam * delta, grid, 257)
                assert lhs <= 2.0 * (1.0 + lam) ** 3 * (1.0 + delta**2) * base + 1e-12, (
                    name,
                    delta,
                    lam,
                )
    # vanishing modulus along delta = 2^-j, j = 1..10
    for name in ("log", "weight", "damped_log2", "damped_sin_log", "tent_log"):
        f = get_function(name)
        omega_1 = weighted_log_modulus(f, 1.0, grid, 2049)
        vals = [weighted_log_modulus(f, 2.0 ** (-j), grid, 2 ** (11 - j) + 1) for j in range(1, 11)]
        assert all(vals[i + 1] <= vals[i] for i in range(len(vals) - 1)), name
        assert vals[-1] <= 1e-2 * omega_1, (name, vals[-1], omega_1)
    budget.done("criterion 09: log-modulus property suite")


def test_criterion_10_classical_interpolation():
    budget = _Budget(1.0)
    for fname in ("damped_log2", "weight", "log"):
        f = get_function(fname)
        for T in (1.0, 2.0):
            for m in range(-3, 4):
                x = math.exp(m / T)
                got = es.classical_exponential_formula(f, 0.0, T, x, 50)
                assert got == float(f.evaluate(x)), (fname, T, m)
    budget.done("criterion 10: classical series lattice interpolation", "exact equality")
