"""Slow, independently coded reference evaluators.

Direct Ewald Fourier-space sums for every periodicity (closed forms per
mode), the naive truncated image sum, the special functions E1 and the
incomplete modified Bessel function K0, and adaptive quadrature versions
of the doubly/singly periodic Fourier integrals used to cross-check the
closed forms.  Everything here favors trustworthiness over speed; mode
and pair reductions run through exact (fsum) accumulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, erfc, erfcx, j0 as _j0

from .core import ParticleSystem, Periodicity, SingularConfigurationError

EULER_GAMMA = 0.5772156649015328606


@dataclass(frozen=True)
class OracleConfig:
    """kmax per periodic axis, image layers for the naive sum, quad tolerance."""

    kmax: int
    image_layers: int = 32
    quad_tol: float = 1e-13

    @classmethod
    def for_accuracy(cls, xi: float, L: float, eps: float) -> "OracleConfig":
        kmax = int(np.ceil(xi * L * np.sqrt(-np.log(eps)) / np.pi)) + 1
        return cls(kmax=kmax, quad_tol=min(1e-13, eps / 100.0))


def _fsum_rows(a: np.ndarray) -> np.ndarray:
    """Exact sum along the last axis (real input)."""
    flat = a.reshape(-1, a.shape[-1])
    return np.array([math.fsum(row) for row in flat]).reshape(a.shape[:-1])


def incomplete_bessel_k0(a: float, b: float, rtol: float = 1e-13) -> float:
    """K0(a, b) = int_1^inf exp(-a t - b/t) dt/t via the t = e^u substitution."""
    if a <= 0.0:
        raise ValueError("K0(a, b) requires a > 0 (integral diverges otherwise)")
    if b < 0.0:
        raise ValueError("K0(a, b) requires b >= 0")

    def f(u):
        t = -a * math.exp(min(u, 700.0)) - b * math.exp(-u)
        return math.exp(t) if t > -745.0 else 0.0

    val, _ = quad(f, 0.0, np.inf, epsabs=1e-300, epsrel=rtol, limit=200)
    return val


def exp_integral_e1(x: float) -> float:
    """E1(x) for x > 0: power series for x <= 1, Lentz continued fraction above."""
    if x <= 0.0:
        raise ValueError("E1 requires x > 0")
    if x <= 1.0:
        total = -EULER_GAMMA - math.log(x)
        term = 1.0
        for k in range(1, 40):
            term *= -x / k
            contrib = -term / k
            total += contrib
            if abs(contrib) < 1e-18 * max(abs(total), 1e-300):
                break
        return total
    # modified Lentz for the A&S continued fraction e^{-x}/(x+1-1/(x+3-4/(...)))
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    f = d
    for k in range(1, 200):
        an = -(k * k)
        b += 2.0
        d = 1.0 / (b + an * d)
        c = b + an / c
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x) * f


def _e1_array(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    flat = x.ravel()
    res = out.ravel()
    for i, v in enumerate(flat):
        res[i] = exp_integral_e1(float(v))
    return out


def _mode_vectors(kmax: int, dims: int) -> np.ndarray:
    """Integer mode tuples in [-kmax, kmax]^dims without the origin."""
    rng = np.arange(-kmax, kmax + 1)
    grids = np.meshgrid(*([rng] * dims), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=1)
    return pts[np.any(pts != 0, axis=1)]


def kspace_direct_3p(system: ParticleSystem, xi: float, kmax: int) -> np.ndarray:
    """(4 pi / L^3) sum_{k != 0} e^{-k^2/4xi^2}/k^2 sum_n q_n e^{i k.(x_m-x_n)}."""
    L, pos, q = system.L, system.positions, system.charges
    K = _mode_vectors(kmax, 3) * (2.0 * np.pi / L)
    k2 = np.sum(K * K, axis=1)
    coef = np.exp(-k2 / (4.0 * xi * xi)) / k2
    E = np.exp(1j * pos @ K.T)                      # E[m, j] = e^{i k_j . x_m}
    S = np.conj(E.T) @ q                            # S_j = sum_n q_n e^{-i k_j x_n}
    terms = (E * (coef * S)[None, :]).real
    return (4.0 * np.pi / L**3) * _fsum_rows(terms)


def _erfc_bracket(k: float, z: np.ndarray, xi: float) -> np.ndarray:
    """e^{kz} erfc(k/2xi + xi z) + e^{-kz} erfc(k/2xi - xi z), overflow safe."""
    guard = -(k * k / (4.0 * xi * xi) + (xi * z) ** 2)
    assert np.all(guard <= 1e-12), "overflow guard violated"
    out = np.zeros_like(z)
    for sign in (1.0, -1.0):
        u = k / (2.0 * xi) + sign * xi * z
        safe = u >= 0.0
        out += np.where(safe, erfcx(np.where(safe, u, 0.0)) * np.exp(guard),
                        np.exp(sign * k * np.where(safe, 0.0, z)) * erfc(u))
    return out


def kspace_direct_2p(system: ParticleSystem, xi: float, kmax: int) -> np.ndarray:
    """Closed-form doubly periodic Fourier sum (per-mode erfc form + zero mode)."""
    L, pos, q = system.L, system.positions, system.charges
    z = pos[:, None, 2] - pos[None, :, 2]
    modes = _mode_vectors(kmax, 2)
    terms = np.empty((len(modes), system.N))
    for j, (n1, n2) in enumerate(modes):
        kvec = 2.0 * np.pi * np.array([n1, n2]) / L
        k = float(np.hypot(*kvec))
        phase = np.exp(1j * (pos[:, :2] @ kvec))
        pair_phase = phase[:, None] * np.conj(phase)[None, :]
        contrib = (pair_phase * _erfc_bracket(k, z, xi)) @ q / k
        terms[j] = contrib.real
    phi = (np.pi / L**2) * _fsum_rows(terms.T)
    zero = (np.exp(-(xi * z) ** 2) / xi + np.sqrt(np.pi) * z * erf(xi * z)) @ q
    return phi - (2.0 * np.sqrt(np.pi) / L**2) * zero


def kspace_direct_1p(system: ParticleSystem, xi: float, kmax: int) -> np.ndarray:
    """Closed-form singly periodic Fourier sum (incomplete K0 + log zero mode)."""
    L, pos, q = system.L, system.positions, system.charges
    N = system.N
    x = pos[:, None, 0] - pos[None, :, 0]
    w2 = np.sum((pos[:, None, 1:] - pos[None, :, 1:]) ** 2, axis=2)
    b = (xi * xi) * w2

    offdiag = ~np.eye(N, dtype=bool)
    if np.any((w2 < 1e-28) & offdiag):
        raise SingularConfigurationError(
            "two charges share transverse coordinates; the zero-mode log diverges")

    terms = np.empty((kmax, N))
    for n in range(1, kmax + 1):
        k1 = 2.0 * np.pi * n / L
        a = k1 * k1 / (4.0 * xi * xi)
        K0 = np.empty((N, N))
        for m in range(N):
            for nn in range(m, N):
                K0[m, nn] = K0[nn, m] = incomplete_bessel_k0(a, b[m, nn])
        terms[n - 1] = (2.0 * np.cos(k1 * x) * K0) @ q
    phi = _fsum_rows(terms.T) / L

    zero_kernel = np.zeros((N, N))
    zero_kernel[offdiag] = (EULER_GAMMA + np.log(b[offdiag]) + _e1_array(b[offdiag]))
    return phi - (zero_kernel @ q) / L


def kspace_direct_0p(system: ParticleSystem, xi: float) -> np.ndarray:
    """erf(xi r)/r complement plus the q_m 2 xi/sqrt(pi) self limit."""
    pos, q = system.positions, system.charges
    d = pos[:, None, :] - pos[None, :, :]
    r = np.sqrt(np.sum(d * d, axis=2))
    offdiag = ~np.eye(system.N, dtype=bool)
    if np.any((r < 1e-14) & offdiag):
        raise SingularConfigurationError("coincident distinct particles")
    kernel = np.zeros_like(r)
    kernel[offdiag] = erf(xi * r[offdiag]) / r[offdiag]
    phi = _fsum_rows(kernel * q[None, :])
    return phi + system.charges * (2.0 * xi / np.sqrt(np.pi))


def kspace_direct(system: ParticleSystem, xi: float, periodicity: Periodicity,
                  kmax: int) -> np.ndarray:
    D = periodicity.D
    if D == 3:
        return kspace_direct_3p(system, xi, kmax)
    if D == 2:
        return kspace_direct_2p(system, xi, kmax)
    if D == 1:
        return kspace_direct_1p(system, xi, kmax)
    return kspace_direct_0p(system, xi)


def direct_image_sum(system: ParticleSystem, periodicity: Periodicity,
                     layers: int) -> np.ndarray:
    """Naive truncated sum of q_n/|x_mn + p| over image shells |alpha_i| <= layers.

    Conditionally convergent for D=3; intended for D in {0, 1} convergence
    checks.
    """
    if layers < 0:
        raise ValueError("layers must be >= 0")
    pos, q, L = system.positions, system.charges, system.L
    d0 = pos[:, None, :] - pos[None, :, :]
    axes = [np.arange(-layers, layers + 1) if periodicity.mask[a] else np.array([0])
            for a in range(3)]
    diag = np.eye(system.N, dtype=bool)
    pieces = []
    for ax in axes[0]:
        for ay in axes[1]:
            for az in axes[2]:
                d = d0 + np.array([ax, ay, az], dtype=float) * L
                r = np.sqrt(np.sum(d * d, axis=2))
                if ax == 0 and ay == 0 and az == 0:
                    r[diag] = np.inf
                pieces.append((q[None, :] / r))
    stacked = np.stack(pieces, axis=-1)
    return _fsum_rows(stacked.reshape(system.N, -1))


def kspace_quad_2p(system: ParticleSystem, xi: float, kmax: int,
                   tol: float = 1e-10) -> np.ndarray:
    """Adaptive kappa-quadrature of the doubly periodic Fourier integral."""
    L, pos, q = system.L, system.positions, system.charges
    N = system.N
    z = pos[:, None, 2] - pos[None, :, 2]
    kappa_max = 2.0 * xi * np.sqrt(-np.log(tol)) + 10.0 / L
    phi = np.zeros(N)

    modes = _mode_vectors(kmax, 2)
    pair_I = {}
    for n1, n2 in modes:
        kvec = 2.0 * np.pi * np.array([n1, n2]) / L
        k = float(np.hypot(*kvec))
        if k not in pair_I:
            cache = {}

            def I_of_z(zz, k=k, cache=cache):
                key = round(zz, 15)
                if key not in cache:
                    f = lambda kap: (np.exp(-(k * k + kap * kap) / (4 * xi * xi))
                                     * np.cos(kap * zz) / (k * k + kap * kap))
                    cache[key], _ = quad(f, 0.0, kappa_max, epsabs=tol / 100, epsrel=tol,
                                         limit=400)
                return cache[key]

            pair_I[k] = I_of_z
        I_of_z = pair_I[k]
        phase = np.exp(1j * (pos[:, :2] @ kvec))
        Ivals = np.vectorize(I_of_z)(z)
        phi += (2.0 / L**2) * ((phase[:, None] * np.conj(phase)[None, :] * 2.0 * Ivals)
                               @ q).real

    for m in range(N):
        zs = z[m]

        def f0(kap):
            return (np.exp(-kap * kap / (4 * xi * xi))
                    * np.dot(q, -2.0 * np.sin(0.5 * kap * zs) ** 2) / (kap * kap))

        val, _ = quad(f0, 0.0, kappa_max, epsabs=tol / 100, epsrel=tol, limit=400,
                      points=[1e-6 / L])
        phi[m] += (2.0 / L**2) * 2.0 * val
    return phi


def kspace_quad_1p(system: ParticleSystem, xi: float, kmax: int,
                   tol: float = 1e-10) -> np.ndarray:
    """Adaptive polar quadrature of the singly periodic Fourier integral."""
    L, pos, q = system.L, system.positions, system.charges
    N = system.N
    x = pos[:, None, 0] - pos[None, :, 0]
    w = np.sqrt(np.sum((pos[:, None, 1:] - pos[None, :, 1:]) ** 2, axis=2))
    kappa_max = 2.0 * xi * np.sqrt(-np.log(tol)) + 10.0 / L
    phi = np.zeros(N)

    for n in range(1, kmax + 1):
        k1 = 2.0 * np.pi * n / L
        vals = np.empty((N, N))
        for m in range(N):
            for nn in range(N):
                f = lambda kap: (kap * np.exp(-(k1 * k1 + kap * kap) / (4 * xi * xi))
                                 * _j0(kap * w[m, nn]) / (k1 * k1 + kap * kap))
                vals[m, nn], _ = quad(f, 0.0, kappa_max, epsabs=tol / 100, epsrel=tol,
                                      limit=400)
        phi += (2.0 / L) * ((2.0 * np.cos(k1 * x) * vals) @ q)

    for m in range(N):
        ws = w[m]

        def f0(kap):
            return (np.exp(-kap * kap / (4 * xi * xi))
                    * np.dot(q, _j0(kap * ws) - 1.0) / kap)

        val, _ = quad(f0, 0.0, kappa_max, epsabs=tol / 100, epsrel=tol, limit=400,
                      points=[1e-6 / L])
        phi[m] += (2.0 / L) * val
    return phi
