"""Numerical validation suite: closed forms against independent oracles.

Every closed form in the analytics layer is re-derived here by numerical
integration (scipy quadrature, midpoint rules) or by round-tripping, on
seeded random parameter grids. The suite backs the `validate` CLI command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate

from .analytics import (
    DecayParams,
    GaussianRate,
    TxCountParams,
    energy_decay,
    energy_decay_at_rates,
    energy_decay_synchronized,
    estimate_synchronized_rate,
    invert_rate,
    peak_frequency,
    rate_frequency,
    transaction_count,
)
from .mobility import ConnectivityParams, MobilityModel, in_range_probability


@dataclass(frozen=True)
class CheckResult:
    name: str
    total: int
    failures: int
    worst_error: float
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class ValidationReport:
    checks: list[CheckResult]

    @property
    def failures(self) -> int:
        return sum(c.failures for c in self.checks)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = (
                f"[{status}] {c.name}: {c.total - c.failures}/{c.total} within "
                f"tolerance (worst error {c.worst_error:.3e})"
            )
            if c.note:
                line += f" - {c.note}"
            out.append(line)
        return out


def _random_decay_params(rng: np.random.Generator) -> DecayParams:
    def rate() -> GaussianRate:
        mean = rng.uniform(0.0, 5.0)
        stddev = rng.uniform(0.1, 3.0)
        f = rng.uniform(1e-6, 1.0) * peak_frequency(stddev)
        return GaussianRate(mean, stddev, f)

    return DecayParams(
        rate1=rate(),
        rate2=rate(),
        initial_energy=rng.uniform(1.0, 1e6),
        app_count=int(rng.integers(1, 21)),
        horizon=rng.uniform(0.01, 50.0),
    )


def check_decay_against_quadrature(
    tolerance: float, grid: int, rng: np.random.Generator
) -> CheckResult:
    """Closed-form decay vs adaptive quadrature of its defining integral."""
    failures = 0
    worst = 0.0
    for _ in range(grid):
        p = _random_decay_params(rng)
        lam = invert_rate(p.rate1) + invert_rate(p.rate2)
        closed = energy_decay(p)
        oracle, _ = integrate.quad(
            lambda t: math.exp(-lam * t), 0.0, p.horizon, epsabs=1e-14, epsrel=1e-13
        )
        oracle *= p.initial_energy / p.app_count
        rel = abs(closed - oracle) / max(abs(oracle), 1e-300)
        worst = max(worst, rel)
        if rel > tolerance:
            failures += 1
    return CheckResult("energy decay vs quadrature", grid, failures, worst)


def check_synchronized_consistency(
    tolerance: float, grid: int, rng: np.random.Generator
) -> CheckResult:
    """Synchronized decay vs the general closed form at the estimated rate."""
    failures = 0
    worst = 0.0
    done = 0
    while done < grid:
        s1 = rng.uniform(0.2, 3.0)
        s2 = rng.uniform(0.2, 3.0)
        mean1 = rng.uniform(0.0, 3.0)
        lam1 = mean1 + rng.uniform(0.0, 2.0 * s1)
        bound = math.exp(-0.5 * ((lam1 - mean1) / s1) ** 2) / (2.0 * math.pi * s1 * s2)
        f1 = rng.uniform(1e-6, 1.0) * bound
        p = DecayParams(
            rate1=GaussianRate(mean1, s1, rate_frequency(mean1, s1, lam1)),
            rate2=GaussianRate(mean1, s2, peak_frequency(s2)),
            initial_energy=rng.uniform(1.0, 1e6),
            app_count=int(rng.integers(1, 21)),
            horizon=rng.uniform(0.01, 20.0),
        )
        lam2 = estimate_synchronized_rate(p, lam1, f1)
        closed = energy_decay_synchronized(p, lam1, f1)
        # Under synchronization both rate families collapse to the estimate.
        substituted = energy_decay_at_rates(p, lam2, lam2)
        rel = abs(closed - substituted) / max(abs(substituted), 1e-300)
        worst = max(worst, rel)
        if rel > tolerance:
            failures += 1
        done += 1
    return CheckResult("synchronized decay vs substituted rate", grid, failures, worst)


def check_rate_roundtrip(
    tolerance: float, grid: int, rng: np.random.Generator
) -> CheckResult:
    """density -> invert_rate recovers the rate on the upper branch."""
    failures = 0
    worst = 0.0
    for _ in range(grid):
        mean = rng.uniform(0.0, 10.0)
        stddev = rng.uniform(0.05, 5.0)
        lam = mean + rng.uniform(0.0, 5.0 * stddev)
        g = GaussianRate.at_rate(mean, stddev, lam)
        err = abs(invert_rate(g) - lam)
        worst = max(worst, err)
        if err > tolerance:
            failures += 1
    return CheckResult("rate inversion round-trip", grid, failures, worst)


def check_tx_ceiling(grid: int, rng: np.random.Generator) -> CheckResult:
    """Transaction ceiling vs the numerically integrated load model."""
    failures = 0
    worst = 0.0
    printed_diverged = 0
    for _ in range(grid):
        p = TxCountParams(
            cluster_count=int(rng.integers(1, 7)),
            links_per_ledger=int(rng.integers(1, 5)),
            request_rate=rng.uniform(0.1, 5.0),
            presence=rng.uniform(0.1, 1.0),
            horizon=rng.uniform(1.0, 100.0),
            parallel_links=int(rng.integers(1, 5)),
            mean_range=rng.uniform(10.0, 500.0),
            radio_range=rng.uniform(10.0, 500.0),
            range_stddev=rng.uniform(1.0, 200.0),
        )
        total_rate = p.total_rate()

        def integrand(x, t):
            z = (x - p.mean_range) / p.range_stddev
            f = math.exp(-0.5 * z * z) / (p.range_stddev * math.sqrt(2.0 * math.pi))
            return f * p.presence * total_rate * t / p.parallel_links

        oracle, _ = integrate.dblquad(
            integrand, 0.0, p.horizon, 0.0, p.radio_range, epsabs=1e-11, epsrel=1e-12
        )
        derived = transaction_count(p)
        err = abs(derived - math.ceil(oracle))
        worst = max(worst, float(err))
        if derived != math.ceil(oracle):
            failures += 1
        printed = transaction_count(replace(p, variant="as-printed"))
        if printed != derived:
            printed_diverged += 1
    note = f"as-printed variant diverges on {printed_diverged}/{grid} points (expected)"
    return CheckResult("transaction ceiling vs double integral", grid, failures, worst, note)


def check_in_range_probability(grid: int, rng: np.random.Generator) -> CheckResult:
    """Adaptive-Simpson range integral vs a dense midpoint rule."""
    failures = 0
    worst = 0.0
    n_mid = 1_000_000
    for _ in range(max(1, grid // 20)):
        m = MobilityModel(
            connect_range=rng.uniform(10.0, 500.0),
            radio_range=rng.uniform(10.0, 500.0),
            mean_range=rng.uniform(10.0, 500.0),
            range_stddev=rng.uniform(1.0, 200.0),
        )
        c = ConnectivityParams(presence_prob=rng.uniform(0.0, 1.0))
        value = in_range_probability(m, c)
        xs = (np.arange(n_mid) + 0.5) * (m.connect_range / n_mid)
        z = (xs - m.mean_range) / m.range_stddev
        pdf = np.exp(-0.5 * z * z) / (m.range_stddev * math.sqrt(2.0 * math.pi))
        mid = 1.0 - c.presence_prob * float(pdf.sum() * m.connect_range / n_mid)
        err = abs(value - mid)
        worst = max(worst, err)
        if err > 1e-6:
            failures += 1
    return CheckResult(
        "in-range probability vs midpoint rule", max(1, grid // 20), failures, worst
    )


def run_validation(
    tolerance: float = 1e-9, grid: int = 100, seed: int = 20240
) -> ValidationReport:
    rng = np.random.default_rng(seed)
    checks = [
        check_decay_against_quadrature(tolerance, grid, rng),
        check_synchronized_consistency(tolerance, grid, rng),
        check_rate_roundtrip(tolerance, 10 * grid, rng),
        check_tx_ceiling(2 * grid, rng),
        check_in_range_probability(grid, rng),
    ]
    return ValidationReport(checks=checks)
