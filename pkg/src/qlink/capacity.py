"""Capacity functionals for the propagated channel output.

Three detection scenarios are supported: shot-noise-limited single-quadrature
detection (the conventional Shannon rate), simultaneous two-quadrature
detection (each quadrature pays an extra half unit of vacuum noise), and the
quantum-optimal Gordon-Holevo rate of the induced phase-sensitive Gaussian
channel, maximized over Gaussian input ensembles under the photon budget.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linkchain import LinkPlan, POWER_TOL, channel_checkpoints, check_power_constraint, propagate
from .quadmodel import (
    HEISENBERG_LIMIT,
    HEISENBERG_TOL,
    QuadState,
    conventional_input,
    symmetric_coherent_input,
)
from .search import golden_section_maximize

_LN2 = math.log(2.0)


class Scenario(str, Enum):
    CONVENTIONAL = "ConventionalSNL"
    TWO_QUADRATURE = "TwoQuadratureSNL"
    GORDON_HOLEVO = "GordonHolevo"


@dataclass(frozen=True)
class CapacityResult:
    bits_per_mode: float
    scenario: Scenario
    achieving_input: QuadState | None = None


class GHSearchError(RuntimeError):
    """Raised when no Gordon-Holevo search start converges; carries the best
    value found so far."""

    def __init__(self, message: str, best_value: float):
        super().__init__(message)
        self.best_value = best_value


def shannon_single_quadrature(state: QuadState) -> float:
    """Shannon rate of ideal homodyne detection of the I quadrature."""
    return 0.5 * math.log1p(state.sig_i / state.noise_i) / _LN2


def shannon_two_quadrature(state: QuadState) -> float:
    """Shannon rate of simultaneous detection of both quadratures; the
    measurement adds half a vacuum unit of noise to each."""
    rate_i = math.log1p(state.sig_i / (state.noise_i + 0.5))
    rate_q = math.log1p(state.sig_q / (state.noise_q + 0.5))
    return 0.5 * (rate_i + rate_q) / _LN2


def entropy_g(x: float) -> float:
    """Entropy in bits of a thermal state with mean photon number ``x``."""
    if x < 0:
        raise ValueError(f"thermal photon number must be non-negative, got {x}")
    if x == 0.0:
        return 0.0
    return ((x + 1.0) * math.log1p(x) - x * math.log(x)) / _LN2


def gaussian_state_entropy(var_i: float, var_q: float) -> float:
    """Von Neumann entropy of a single-mode Gaussian state with diagonal
    covariance (var_i, var_q) in vacuum-=1/2 units."""
    if var_i <= 0 or var_q <= 0:
        raise ValueError(f"variances must be positive, got ({var_i}, {var_q})")
    product = var_i * var_q
    if product < HEISENBERG_LIMIT - HEISENBERG_TOL:
        raise ValueError(
            f"covariance product {product} lies below the Heisenberg limit"
        )
    # The symplectic eigenvalue of a pure state may dip below 1/2 by rounding.
    return entropy_g(max(math.sqrt(product) - 0.5, 0.0))


def holevo_chi(
    out_total: tuple[float, float], out_noise: tuple[float, float]
) -> float:
    """Holevo information of a Gaussian displacement ensemble.

    ``out_total`` holds the per-quadrature variances of the ensemble-average
    output state, ``out_noise`` those of a single (unmodulated) output.
    """
    if out_total[0] < out_noise[0] - 1e-12 or out_total[1] < out_noise[1] - 1e-12:
        raise ValueError(
            f"ensemble variances {out_total} must dominate noise variances {out_noise}"
        )
    return gaussian_state_entropy(*out_total) - gaussian_state_entropy(*out_noise)


def scenario_input(scenario: Scenario, nbar: float) -> QuadState:
    """Reference input carrying the full budget for a fixed-input scenario."""
    if scenario is Scenario.TWO_QUADRATURE:
        return symmetric_coherent_input(nbar)
    return conventional_input(nbar)


# Canonical Gordon-Holevo starting points: conventional single-quadrature,
# even coherent split, and two squeezed-floor variants.
_GH_BASE_STARTS = ((1.0, 0.0), (0.5, 0.0), (1.0, 0.3), (0.75, 0.3))


class _GhChannel:
    """Affine channel data for the Gordon-Holevo maximization.

    The arrays hold the per-checkpoint multipliers and added noise so that
    the photon budget can be audited for a candidate input in one vector
    operation; the final checkpoint is the channel output.
    """

    def __init__(self, mult_i, add_i, mult_q, add_q):
        self.mult_i = np.asarray(mult_i, dtype=float)
        self.mult_q = np.asarray(mult_q, dtype=float)
        self.add_sum = np.asarray(add_i, dtype=float) + np.asarray(add_q, dtype=float)
        self.out = (float(mult_i[-1]), float(add_i[-1]),
                    float(mult_q[-1]), float(add_q[-1]))

    def max_excess(self, power_i: float, power_q: float, nbar: float) -> float:
        photons = 0.5 * (self.mult_i * power_i + self.mult_q * power_q + self.add_sum) - 0.5
        return float(photons.max()) - nbar

    def chi(self, sig_i, sig_q, noise_i, noise_q) -> float:
        mi, ai, mq, aq = self.out
        total = (mi * (sig_i + noise_i) + ai, mq * (sig_q + noise_q) + aq)
        noise = (mi * noise_i + ai, mq * noise_q + aq)
        return holevo_chi(total, noise)


def _gh_input(p: float, r: float, nbar: float) -> tuple[float, float, float, float]:
    """Input moments for split fraction ``p`` and squeezing exponent ``r``.

    The noise floor is a pure squeezed vacuum (product exactly 1/4) and the
    signal powers saturate the photon budget.
    """
    noise_i = 0.5 * math.exp(-2.0 * r)
    noise_q = 0.5 * math.exp(2.0 * r)
    budget = max(2.0 * nbar + 1.0 - math.cosh(2.0 * r), 0.0)
    return p * budget, (1.0 - p) * budget, noise_i, noise_q


def _gh_search(
    channel: _GhChannel,
    nbar: float,
    seed: int,
    n_starts: int,
    param_tol: float,
    warm_starts: tuple[tuple[float, float], ...],
    max_rounds: int = 100,
) -> tuple[float, float, float]:
    """Multistart coordinate descent over (split fraction, squeezing).

    Returns (chi, p, r) of the best converged start; deterministic for a
    fixed seed (ordered reduction over the start list).
    """
    r_cap = 0.5 * math.acosh(2.0 * nbar + 1.0)
    # The optimum often sits on the budget boundary, where line-search
    # midpoints may fall a hair onto the penalized side; keep the best
    # feasible point seen anywhere during the search, not the final iterate.
    best = {"value": -math.inf, "p": 1.0, "r": 0.0}

    def objective(p: float, r: float) -> float:
        sig_i, sig_q, noise_i, noise_q = _gh_input(p, r, nbar)
        excess = channel.max_excess(sig_i + noise_i, sig_q + noise_q, nbar)
        # Search with half the audit tolerance so recorded boundary optima
        # survive the exact re-propagation audit with margin to spare.
        if excess > 0.5 * POWER_TOL:
            # Steer infeasible iterates back toward the budget boundary.
            return -1000.0 * excess - 1.0
        value = channel.chi(sig_i, sig_q, noise_i, noise_q)
        if value > best["value"]:
            best.update(value=value, p=p, r=r)
        return value

    rng = random.Random(seed)
    starts = list(_GH_BASE_STARTS)
    while len(starts) < n_starts:
        starts.append((rng.uniform(0.0, 1.0), rng.uniform(-0.25, 0.75) * r_cap))
    starts = starts[:n_starts] + list(warm_starts)

    any_converged = False
    for p0, r0 in starts:
        p = min(max(p0, 0.0), 1.0)
        r = min(max(r0, -r_cap), r_cap)
        objective(p, r)
        converged = False
        previous = -math.inf
        for _ in range(max_rounds):
            p_new, _ = golden_section_maximize(lambda x: objective(x, r), 0.0, 1.0, param_tol)
            r_new, value = golden_section_maximize(lambda x: objective(p_new, x), -r_cap, r_cap, param_tol)
            moved = max(abs(p_new - p), abs(r_new - r))
            p, r = p_new, r_new
            # Degenerate ridges (e.g. the identity channel) never settle in
            # parameters; value stagnation is convergence there.
            if moved < param_tol or abs(value - previous) <= 1e-12 * max(1.0, abs(value)):
                converged = True
                break
            previous = value
        any_converged = any_converged or converged
    if not any_converged:
        raise GHSearchError(
            f"no Gordon-Holevo start converged within {max_rounds} rounds "
            f"(best value {best['value']})",
            best["value"],
        )
    return best["value"], best["p"], best["r"]


def gh_capacity_for_channel(
    mult_i,
    add_i,
    mult_q,
    add_q,
    nbar: float,
    *,
    seed: int = 0,
    n_starts: int = 8,
    param_tol: float = 1e-9,
    warm_starts: tuple[tuple[float, float], ...] = (),
) -> CapacityResult:
    """Gordon-Holevo capacity of an affine Gaussian channel given its
    per-checkpoint coefficient arrays (last checkpoint = output)."""
    if nbar <= 0:
        return CapacityResult(0.0, Scenario.GORDON_HOLEVO, QuadState(0, 0, 0.5, 0.5))
    channel = _GhChannel(mult_i, add_i, mult_q, add_q)
    chi, p, r = _gh_search(channel, nbar, seed, n_starts, param_tol, warm_starts)
    # Only the -inf sentinel lives below zero by more than rounding noise;
    # a genuinely feasible channel may evaluate to chi = -1e-16.
    if chi < -0.5:
        raise GHSearchError(
            f"no feasible Gordon-Holevo input found (best value {chi})", chi
        )
    achieving = QuadState(*_gh_input(p, r, nbar))
    return CapacityResult(max(chi, 0.0), Scenario.GORDON_HOLEVO, achieving)


def gh_capacity(
    plan: LinkPlan,
    *,
    seed: int = 0,
    n_starts: int = 8,
    param_tol: float = 1e-9,
    warm_starts: tuple[tuple[float, float], ...] = (),
) -> CapacityResult:
    """Gordon-Holevo capacity of a link plan.

    Maximizes the Holevo information of the propagated output over the input
    power split and squeezed noise floor, subject to the photon budget both
    at the input and at every point along the chain.  The winning input is
    re-propagated and audited before being returned.
    """
    points = channel_checkpoints(plan)
    result = gh_capacity_for_channel(
        [cm.mult_i for _, cm in points],
        [cm.add_i for _, cm in points],
        [cm.mult_q for _, cm in points],
        [cm.add_q for _, cm in points],
        plan.nbar,
        seed=seed,
        n_starts=n_starts,
        param_tol=param_tol,
        warm_starts=warm_starts,
    )
    _, trace = propagate(plan, result.achieving_input)
    violations = check_power_constraint(trace, plan.nbar)
    if violations:
        raise GHSearchError(
            f"achieving input violates the photon budget at {violations[0]}",
            result.bits_per_mode,
        )
    return result


def plan_capacity(plan: LinkPlan, scenario: Scenario, *, seed: int = 0) -> CapacityResult:
    """Capacity of a plan under the requested detection scenario."""
    if scenario is Scenario.GORDON_HOLEVO:
        return gh_capacity(plan, seed=seed)
    state = scenario_input(scenario, plan.nbar)
    out, _ = propagate(plan, state)
    if scenario is Scenario.CONVENTIONAL:
        bits = shannon_single_quadrature(out)
    else:
        bits = shannon_two_quadrature(out)
    return CapacityResult(bits, scenario, state)
