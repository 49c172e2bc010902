"""Gridding window functions and their Fourier transforms.

Four windows are provided: truncated Gaussian, cardinal B-spline
(comparison/plotting only), Kaiser-Bessel, and the exponential-of-
semicircle approximation to Kaiser-Bessel due to Barnett and Magland
(BM).  All windows are even, vanish outside [-w, w] with w = P*h/2, and
act in 3-D as tensor products of the 1-D profile.

Fourier transforms follow the plain integral convention
w_hat(k) = int w(x) exp(-i k x) dx, including normalization constants:
the spreading/gathering steps contribute the true transform of the
window actually laid on the grid, so the scaling step must divide by the
same object for the window factors to cancel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import i0 as _bessel_i0

GAUSSIAN = "gaussian"
KAISER = "kb"
BM = "bm"
KINDS = (GAUSSIAN, KAISER, BM)

# series window around the removable sqrt singularity of the KB transform
_KB_SERIES_BAND = 1e-6


@dataclass(frozen=True)
class WindowSpec:
    """One-dimensional window description tied to a grid spacing.

    w = P*h/2 is the half width; `shape` is m for the Gaussian and beta
    for KB/BM.  For the Gaussian the free parameter eta = (2*w*xi/m)^2
    is derived on demand (the profile itself is xi-independent).
    """

    kind: str
    P: int
    h: float
    shape: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown window kind {self.kind!r}")
        if self.P < 1 or self.h <= 0 or self.shape <= 0:
            raise ValueError("invalid window parameters")

    @property
    def w(self) -> float:
        return 0.5 * self.P * self.h

    def eta(self, xi: float) -> float:
        if self.kind != GAUSSIAN:
            raise ValueError("eta is defined for the Gaussian window only")
        return (2.0 * self.w * xi / self.shape) ** 2


def default_shape(kind: str, P: int) -> float:
    """m = sqrt(pi P) for the Gaussian; beta = 2.5 P for BM and KB."""
    if P < 1:
        raise ValueError("P must be >= 1")
    if kind == GAUSSIAN:
        return math.sqrt(math.pi * P)
    if kind in (KAISER, BM):
        return 2.5 * P
    raise ValueError(f"unknown window kind {kind!r}")


def eval_gaussian(x, spec: WindowSpec):
    """(m^2/(2 pi w^2))^(1/2) exp(-m^2 x^2 / (2 w^2)), truncated at |x| > w.

    Equals (2 xi^2/(pi eta))^(1/2) exp(-2 xi^2 x^2/eta) with
    eta = (2 w xi / m)^2; the xi dependence cancels.
    """
    x = np.asarray(x, dtype=float)
    w, m = spec.w, spec.shape
    peak = m / (w * math.sqrt(2.0 * math.pi))
    vals = peak * np.exp(-(m * m) * (x * x) / (2.0 * w * w))
    return np.where(np.abs(x) <= w, vals, 0.0)


def gaussian_fourier(k, spec: WindowSpec):
    """exp(-(w k)^2/(2 m^2)) = exp(-eta k^2/(8 xi^2)); untruncated transform."""
    k = np.asarray(k, dtype=float)
    w, m = spec.w, spec.shape
    return np.exp(-(w * k) ** 2 / (2.0 * m * m))


def eval_bspline(x, p: int):
    """Cardinal B-spline M_p on [0, p] via the two-term recursion on M_2."""
    if p < 2:
        raise ValueError("B-spline order must be >= 2")
    x = np.asarray(x, dtype=float)
    if p == 2:
        return np.where((x >= 0.0) & (x <= 2.0), 1.0 - np.abs(x - 1.0), 0.0)
    prev = eval_bspline(x, p - 1)
    prev_shift = eval_bspline(x - 1.0, p - 1)
    return (x * prev + (p - x) * prev_shift) / (p - 1)


def eval_kaiser(x, spec: WindowSpec):
    """I0(beta sqrt(1-(x/w)^2)) / I0(beta) on [-w, w], 0 outside."""
    x = np.asarray(x, dtype=float)
    w, beta = spec.w, spec.shape
    t = np.clip(1.0 - (x / w) ** 2, 0.0, None)
    vals = _bessel_i0(beta * np.sqrt(t)) / _bessel_i0(beta)
    return np.where(np.abs(x) <= w, vals, 0.0)


def _sinhc(rho2):
    """sinh(sqrt(rho2))/sqrt(rho2), continued through rho2 <= 0.

    For rho2 < 0 this is sin(sqrt(-rho2))/sqrt(-rho2); a short series keeps
    full accuracy through the removable singularity at rho2 = 0.
    """
    rho2 = np.asarray(rho2, dtype=float)
    out = np.empty_like(rho2)
    small = np.abs(rho2) < _KB_SERIES_BAND
    pos = (rho2 >= _KB_SERIES_BAND)
    neg = (rho2 <= -_KB_SERIES_BAND)
    r = rho2[small]
    out[small] = 1.0 + r / 6.0 + r * r / 120.0 + r * r * r / 5040.0
    rp = np.sqrt(rho2[pos])
    out[pos] = np.sinh(rp) / rp
    rn = np.sqrt(-rho2[neg])
    out[neg] = np.sin(rn) / rn
    return out


def kaiser_fourier(k, spec: WindowSpec):
    """2w sinh(sqrt(beta^2-(kw)^2)) / (I0(beta) sqrt(beta^2-(kw)^2)).

    Above the cutoff kw > beta the sinh branch continues to
    2w sin(sqrt((kw)^2-beta^2)) / (I0(beta) sqrt(...)); the crossover is
    evaluated by series so the function is continuous.
    """
    k = np.asarray(k, dtype=float)
    w, beta = spec.w, spec.shape
    rho2 = beta * beta - (k * w) ** 2
    return 2.0 * w * _sinhc(rho2) / _bessel_i0(beta)


def eval_bm(x, spec: WindowSpec):
    """exp(beta (sqrt(1-(x/w)^2) - 1)) on [-w, w], 0 outside."""
    x = np.asarray(x, dtype=float)
    w, beta = spec.w, spec.shape
    t = np.clip(1.0 - (x / w) ** 2, 0.0, None)
    vals = np.exp(beta * (np.sqrt(t) - 1.0))
    return np.where(np.abs(x) <= w, vals, 0.0)


@dataclass(frozen=True)
class TabulatedTransform:
    """Numerically computed window transform sampled on one mode set."""

    kind: str
    P: int
    shape: float
    w: float
    k: np.ndarray
    values: np.ndarray


_BM_CACHE: dict[tuple, TabulatedTransform] = {}


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _legendre_pair(x: np.ndarray, n: int):
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    dp = n * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


def _leggauss_extended(n: int):
    """Gauss-Legendre nodes/weights polished to extended precision.

    Double-precision nodes would leave ~(beta + kw)*eps noise in the
    tabulated transform, an order above the doubling self-check.
    """
    hit = _GL_CACHE.get(n)
    if hit is not None:
        return hit
    x = np.polynomial.legendre.leggauss(n)[0].astype(np.longdouble)
    for _ in range(2):
        p, dp = _legendre_pair(x, n)
        x = x - p / dp
    _, dp = _legendre_pair(x, n)
    wt = 2.0 / ((1.0 - x * x) * dp * dp)
    _GL_CACHE[n] = (x, wt)
    return x, wt


def _bm_quadrature(w: float, beta: float, k: np.ndarray, nodes: int) -> np.ndarray:
    # x = w sin(theta) turns the integrand into an entire function of theta,
    # so Gauss-Legendre converges geometrically for every beta and k.
    x, wt = _leggauss_extended(nodes)
    theta = np.longdouble(0.25 * math.pi) * (x + 1.0)
    wt = wt * np.longdouble(0.25 * math.pi)
    f = np.exp(beta * (np.cos(theta) - 1.0)) * np.cos(theta) * wt
    phase = np.outer(np.asarray(k, dtype=np.longdouble) * np.longdouble(w),
                     np.sin(theta))
    return (2.0 * w * (np.cos(phase) @ f)).astype(float)


def bm_fourier_precompute(spec: WindowSpec, k) -> TabulatedTransform:
    """Tabulate the BM transform at exactly the requested modes.

    The quadrature is self-checked by doubling the node count; results are
    cached per (beta, w, mode set) and reused across calls.
    """
    if spec.kind != BM:
        raise ValueError("spec.kind must be 'bm'")
    k = np.ascontiguousarray(k, dtype=float)
    w, beta = spec.w, spec.shape
    key = (round(beta, 12), round(w, 14), k.shape[0],
           round(float(k[0]), 12), round(float(k[-1]), 12), round(float(np.ptp(k)), 12))
    hit = _BM_CACHE.get(key)
    if hit is not None and np.array_equal(hit.k, k):
        return hit

    kmax = float(np.max(np.abs(k))) if k.size else 0.0
    nodes = max(64, int(0.75 * (kmax * w + beta)) + 32)
    vals = _bm_quadrature(w, beta, k, nodes)
    check = _bm_quadrature(w, beta, k, 2 * nodes)
    scale = max(float(np.max(np.abs(check))), 1e-300)
    if np.max(np.abs(vals - check)) > 1e-13 * scale:
        raise AssertionError("BM transform quadrature did not converge")
    table = TabulatedTransform(BM, spec.P, beta, w, k, check)
    _BM_CACHE[key] = table
    return table


def evaluate(x, spec: WindowSpec):
    """Real-space window value at offsets x (vectorized)."""
    if spec.kind == GAUSSIAN:
        return eval_gaussian(x, spec)
    if spec.kind == KAISER:
        return eval_kaiser(x, spec)
    return eval_bm(x, spec)


def fourier(k, spec: WindowSpec):
    """Transform values at wavenumbers k; BM goes through the cached table."""
    if spec.kind == GAUSSIAN:
        return gaussian_fourier(k, spec)
    if spec.kind == KAISER:
        return kaiser_fourier(k, spec)
    return bm_fourier_precompute(spec, k).values
