"""Modified (truncated) Fourier-space Green's functions for D = 0..3.

For modes with a nonzero periodic component the kernel is the plain
1/|k|^2.  On the zero block of the periodic directions the free-space
Poisson problem in the remaining 3-D dimensions is solved with the
kernel truncated at radius R, whose transform is smooth:

    D=3:  1/|k|^2, 0 at k=0 (tinfoil convention)
    D=2:  (1 - cos(R kappa) - R kappa sin(R kappa)) / kappa^2
    D=1:  (1 - J0(R kappa)) / kappa^2 - R log(R) J1(R kappa) / kappa
    D=0:  2 (sin(R|k|/2) / |k|)^2

The global 4*pi lives in the scaling step, not here.  Near kappa = 0 all
closed forms lose every digit to cancellation, so they switch to series.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import j0 as _j0, j1 as _j1

# switch to series once R*|kappa| drops below this; the closed forms lose
# ~eps/t^2 digits to cancellation, the series loses ~t^10 to truncation
_SERIES_BAND = 1e-2


@dataclass(frozen=True)
class GreensSpec:
    D: int
    R: float = 0.0

    def __post_init__(self):
        if self.D not in (0, 1, 2, 3):
            raise ValueError("D must be in {0,1,2,3}")
        if self.D < 3 and self.R <= 0:
            raise ValueError("R must be positive for D < 3")


def default_truncation_radius(D: int, Lt: float) -> float:
    """sqrt(3-D) * Lt, the extended-domain diagonal of the free directions."""
    if D not in (0, 1, 2, 3):
        raise ValueError("D must be in {0,1,2,3}")
    return float(np.sqrt(3.0 - D) * Lt)


def zero_mode_values(D: int, R: float, kappa):
    """Kernel on the zero periodic-mode block as a function of |kappa|."""
    kappa = np.abs(np.asarray(kappa, dtype=float))
    t = R * kappa
    small = t < _SERIES_BAND
    out = np.empty_like(kappa)

    if D == 0:
        # 2 (sin(R k /2)/k)^2 = R^2 (1 - cos t)/t^2
        ts = t[small] ** 2
        out[small] = R * R * (0.5 - ts / 24.0 + ts**2 / 720.0 - ts**3 / 40320.0
                              + ts**4 / 3628800.0)
        tl = t[~small]
        out[~small] = R * R * (1.0 - np.cos(tl)) / tl**2
    elif D == 1:
        lr = np.log(R)
        ts = t[small] ** 2
        out[small] = R * R * (
            (0.25 - 0.5 * lr)
            - ts * (1.0 / 64.0 - lr / 16.0)
            + ts**2 * (1.0 / 2304.0 - lr / 384.0)
            - ts**3 * (1.0 / 147456.0 - lr / 18432.0)
            + ts**4 * (1.0 / 14745600.0 - lr / 1474560.0)
        )
        tl = t[~small]
        kl = kappa[~small]
        out[~small] = (1.0 - _j0(tl)) / kl**2 - (R * np.log(R)) * _j1(tl) / kl
    elif D == 2:
        # transform of the truncated 1-D kernel -|z|/2; note the sign of the
        # k=0 limit, -R^2/2 (the kernel has negative total mass)
        ts = t[small] ** 2
        out[small] = R * R * (-0.5 + ts / 8.0 - ts**2 / 144.0 + ts**3 / 5760.0
                              - ts**4 / 403200.0)
        tl = t[~small]
        out[~small] = R * R * (1.0 - np.cos(tl) - tl * np.sin(tl)) / tl**2
    else:
        raise ValueError("zero-mode kernel is defined for D < 3")
    return out


def zero_point_value(D: int, R: float) -> float:
    """Exact k = 0 value of the zero-block kernel."""
    if D == 3:
        return 0.0
    if D in (0,):
        return 0.5 * R * R
    if D == 1:
        return 0.25 * R * R * (1.0 - 2.0 * np.log(R))
    return -0.5 * R * R  # D == 2


def greens_hat(kvec, spec: GreensSpec) -> float:
    """Scalar kernel value at one 3-vector wavenumber.

    The first spec.D components of kvec are the periodic part; any nonzero
    periodic component selects the 1/|k|^2 branch.
    """
    kvec = np.asarray(kvec, dtype=float)
    if kvec.shape != (3,):
        raise ValueError("kvec must be a 3-vector")
    kper = kvec[: spec.D]
    kfree = kvec[spec.D:]
    k2 = float(np.dot(kvec, kvec))
    if np.any(kper != 0.0):
        return 1.0 / k2
    if spec.D == 3:
        return 0.0
    kappa = float(np.sqrt(np.dot(kfree, kfree)))
    if kappa == 0.0:
        return zero_point_value(spec.D, spec.R)
    return float(zero_mode_values(spec.D, spec.R, np.array([kappa]))[0])
