"""Parameter selection from (xi, eps) and the approximation error estimates.

Truncation parameters follow the Kolafa-Perram style estimates
(rc = sqrt(-ln eps)/xi, k_inf = xi L sqrt(-ln eps)/pi); window support
comes from the simplified approximation estimates A e^{-c^2 pi P/2}
(Gaussian, c = 1) and A e^{-sqrt(2 pi) P} (BM/KB) with
A = sqrt(Q xi L)/L, and upsampling factors from s0 = 1 + sqrt(d) and
e^{-2 pi s} < eps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from scipy.special import erfc as _erfc

from . import windows
from .aft import next_even_smooth, padded_size
from .core import ConfigurationError, ParticleSystem, Periodicity, SEParams

P_SAFETY_MARGIN = 2


@dataclass(frozen=True)
class ErrorBudget:
    """Selected parameters with the estimate value behind each choice."""

    eps: float
    contributions: dict = field(default_factory=dict)
    params: SEParams | None = None


def select_cutoff(xi: float, eps: float, L: float | None = None) -> float:
    """rc = sqrt(-ln eps)/xi; warns (without clamping) past the half box."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if xi <= 0:
        raise ValueError("xi must be positive")
    rc = math.sqrt(-math.log(eps)) / xi
    if L is not None and rc > L / 2:
        warnings.warn(
            f"rc = {rc:.3g} exceeds L/2; real-space sum needs explicit images",
            stacklevel=2,
        )
    return rc


def select_kinf(xi: float, L: float, eps: float) -> tuple[int, int]:
    """k_inf = ceil(xi L sqrt(-ln eps)/pi) and M = 2 k_inf rounded to an even
    7-smooth integer."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    kinf = int(math.ceil(xi * L * math.sqrt(-math.log(eps)) / math.pi))
    kinf = max(kinf, 1)
    M = next_even_smooth(2 * kinf)
    return kinf, M


def select_P(window_kind: str, eps: float, A: float) -> int:
    """Smallest P with A e^{-sqrt(2 pi) P} <= eps (BM/KB) or
    A e^{-pi P/2} <= eps (Gaussian)."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    rate = math.pi / 2.0 if window_kind == windows.GAUSSIAN else math.sqrt(2.0 * math.pi)
    need = math.log(max(A, 1e-300) / eps) / rate
    return max(1, int(math.ceil(need - 1e-12)))


def select_upsampling(D: int, eps: float, M: int) -> tuple[float, float, int]:
    """(s0, s, nI): s0 = 1 + sqrt(3 - D), s from e^{-2 pi s} < eps,
    nI = ceil(0.1 M) for D in {1, 2} (M/2 on the degenerate paths)."""
    if D not in (0, 1, 2, 3):
        raise ValueError("D must be in {0,1,2,3}")
    if D == 3:
        return 1.0, 1.0, M // 2
    s0 = 1.0 + math.sqrt(3.0 - D)
    s = max(1.0, math.log(1.0 / eps) / (2.0 * math.pi))
    if D == 0:
        return s0, 1.0, M // 2
    return s0, s, int(math.ceil(0.1 * M))


def estimate_approx_error(window_kind: str, P: int, shape: float) -> float:
    """Approximation error estimate with C = 1 (shape comparison only)."""
    if shape <= 0:
        raise ValueError("shape must be positive")
    if window_kind == windows.GAUSSIAN:
        m = shape
        return math.exp(-math.pi**2 * P**2 / (2.0 * m * m)) + _erfc(m / math.sqrt(2.0))
    beta = shape
    return beta * beta * math.exp(-2.0 * math.pi * P * P / beta) + _erfc(math.sqrt(beta))


def amplitude(system: ParticleSystem, xi: float) -> float:
    """A = sqrt(Q xi L)/L with Q = sum q_n^2."""
    Q = float((system.charges**2).sum())
    return math.sqrt(Q * xi * system.L) / system.L


def auto_params(
    system: ParticleSystem,
    periodicity: Periodicity,
    xi: float,
    eps: float,
    window: str = windows.BM,
    margin: int = P_SAFETY_MARGIN,
    shape: float | None = None,
) -> tuple[SEParams, ErrorBudget]:
    """Full parameter selection from (xi, eps) for one system and periodicity.

    P carries a +margin safety on top of the heuristic estimate.  nI gets an
    accuracy-driven floor in addition to the ceil(0.1 M) recipe: the unpadded
    mode block integrates its Fourier integrals with an aliasing error of
    order e^{-2 pi (nI+1) P/M}, which must sit below eps as well.
    """
    D = periodicity.D
    L = system.L
    rc = select_cutoff(xi, eps, L=L if D >= 1 else None)
    kinf, M = select_kinf(xi, L, eps)
    A = amplitude(system, xi)
    P = select_P(window, eps, A) + margin
    if (M + P) % 2:
        P += 1
    if P > M:
        raise ConfigurationError(
            f"window needs P = {P} > M = {M}; increase M (lower xi or eps)")
    s0, s, nI = select_upsampling(D, eps, M)
    if D in (1, 2):
        floor = int(math.ceil(M * math.log(10.0 / eps) / (2.0 * math.pi * P))) - 1
        nI = min(M // 2, max(nI, floor))
    h = L / M
    if D < 3:
        # The truncated kernel must cover the sqrt(3-D)-diagonal displacement
        # plus the mollifier's reach, and its periodized images must clear the
        # same margin on the other side; rc is exactly that reach.
        d = 3.0 - D
        Lt = L + P * h
        s0 = max(s0, ((1.0 + math.sqrt(d)) * L + 2.0 * rc) / Lt)
        period = padded_size(s0, M + P) * h
        R = 0.5 * (period - L + math.sqrt(d) * L)
    else:
        R = 0.0
    shape_val = windows.default_shape(window, P) if shape is None else shape
    params = SEParams(xi=xi, rc=rc, M=M, P=P, window=window, shape=shape_val,
                      s0=s0, s=s, nI=nI, R=R, eps=eps)
    params.validate(L, periodicity)

    Mt = M + P
    budget = ErrorBudget(
        eps=eps,
        contributions={
            "real_truncation": math.exp(-(xi * rc) ** 2),
            "fourier_truncation": math.exp(-((math.pi * (M // 2)) / (xi * L)) ** 2),
            "approximation": A * math.exp(
                -(math.pi / 2 if window == windows.GAUSSIAN else math.sqrt(2 * math.pi)) * P),
            "upsampling": math.exp(-2.0 * math.pi * s) if D in (1, 2) else 0.0,
            "s0_effective": padded_size(s0, Mt) / Mt if D < 3 else 1.0,
            "s_effective": padded_size(s, Mt) / Mt if D in (1, 2) else 1.0,
        },
        params=params,
    )
    return params, budget
