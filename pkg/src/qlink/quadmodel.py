"""Single-mode quadrature statistics in vacuum units.

A field mode is described by the signal (modulation) power and the quantum
noise variance of each quadrature.  Units are chosen so that the vacuum
noise variance is 1/2 per quadrature; all powers are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass

VACUUM_VARIANCE = 0.5

# Minimum allowed noise-variance product, with a small tolerance so that
# long chains of floating-point stage updates do not trip spurious errors.
# Violations beyond the tolerance raise: clamping would hide model bugs.
HEISENBERG_LIMIT = 0.25
HEISENBERG_TOL = 1e-12


@dataclass(frozen=True)
class QuadState:
    """Second moments of one optical mode: per-quadrature signal power and
    noise variance.  Immutable; every transformation returns a new state."""

    sig_i: float
    sig_q: float
    noise_i: float
    noise_q: float

    def __post_init__(self) -> None:
        if self.sig_i < 0 or self.sig_q < 0:
            raise ValueError(
                f"signal powers must be non-negative, got "
                f"sig_i={self.sig_i}, sig_q={self.sig_q}"
            )
        if self.noise_i <= 0 or self.noise_q <= 0:
            raise ValueError(
                f"noise variances must be positive, got "
                f"noise_i={self.noise_i}, noise_q={self.noise_q}"
            )
        product = self.noise_i * self.noise_q
        if product < HEISENBERG_LIMIT - HEISENBERG_TOL:
            raise ValueError(
                f"uncertainty product noise_i*noise_q = {product} "
                f"is below the Heisenberg limit {HEISENBERG_LIMIT}"
            )
        if mean_photon_number(self) < -HEISENBERG_TOL:
            raise ValueError(f"negative mean photon number for {self!r}")


def mean_photon_number(state: QuadState) -> float:
    """Mean photon number of the mode; vacuum carries zero photons."""
    total = state.sig_i + state.sig_q + state.noise_i + state.noise_q
    return total / 2.0 - 0.5


def vacuum_state() -> QuadState:
    """The empty field: no signal, vacuum noise in both quadratures."""
    return QuadState(0.0, 0.0, VACUUM_VARIANCE, VACUUM_VARIANCE)


def conventional_input(nbar: float) -> QuadState:
    """Ideal laser input carrying ``nbar`` photons, all modulation in the I
    quadrature, vacuum noise in both quadratures."""
    if nbar < 0:
        raise ValueError(f"mean photon number must be non-negative, got {nbar}")
    return QuadState(2.0 * nbar, 0.0, VACUUM_VARIANCE, VACUUM_VARIANCE)


def symmetric_coherent_input(nbar: float) -> QuadState:
    """Coherent input with the photon budget split evenly between both
    quadratures (used by two-quadrature detection scenarios)."""
    if nbar < 0:
        raise ValueError(f"mean photon number must be non-negative, got {nbar}")
    return QuadState(nbar, nbar, VACUUM_VARIANCE, VACUUM_VARIANCE)


def general_input(sig_i: float, sig_q: float, noise_i: float, noise_q: float) -> QuadState:
    """Arbitrary Gaussian input, squeezed noise floors permitted as long as
    the uncertainty product stays at or above 1/4."""
    return QuadState(sig_i, sig_q, noise_i, noise_q)
