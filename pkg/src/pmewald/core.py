"""Domain types, system generation, error metrics and potential assembly.

The total electrostatic potential at each source point is split into a
short-range real-space sum, a smooth Fourier-space part evaluated on a
grid, and a constant self correction:

    phi = phi_real + phi_fourier + phi_self

Boxes are cubic, targets coincide with sources, and the k = 0 mode in the
triply periodic case follows the infinite-dielectric (tinfoil) convention.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

NEUTRALITY_RTOL = 1e-12


class SingularConfigurationError(ValueError):
    """Two distinct particles coincide (or a transverse log diverges)."""


class ConfigurationError(ValueError):
    """Requested parameters cannot be satisfied (e.g. window wider than grid)."""


@dataclass(frozen=True)
class Periodicity:
    """Number of periodic directions D and the fixed axis convention.

    D=3 -> x,y,z periodic; D=2 -> x,y; D=1 -> x; D=0 -> free space.
    """

    D: int

    def __post_init__(self):
        if self.D not in (0, 1, 2, 3):
            raise ValueError(f"D must be in {{0,1,2,3}}, got {self.D}")

    @property
    def mask(self) -> tuple[bool, bool, bool]:
        return (self.D >= 1, self.D >= 2, self.D >= 3)

    @property
    def periodic_axes(self) -> tuple[int, ...]:
        return tuple(range(self.D))

    @property
    def free_axes(self) -> tuple[int, ...]:
        return tuple(range(self.D, 3))


@dataclass(frozen=True)
class ParticleSystem:
    """N point charges in the cubic box [0, L)^3."""

    positions: np.ndarray
    charges: np.ndarray
    L: float

    def __post_init__(self):
        pos = np.ascontiguousarray(self.positions, dtype=float)
        q = np.ascontiguousarray(self.charges, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("positions must have shape (N, 3)")
        if q.shape != (pos.shape[0],):
            raise ValueError("len(charges) must equal len(positions)")
        if self.L <= 0:
            raise ValueError("box length must be positive")
        if np.any(pos < 0.0) or np.any(pos >= self.L):
            raise ValueError("all coordinates must lie in [0, L)")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "charges", q)

    @property
    def N(self) -> int:
        return self.positions.shape[0]

    def is_neutral(self, rtol: float = NEUTRALITY_RTOL) -> bool:
        qsum = abs(float(np.sum(self.charges)))
        qabs = float(np.sum(np.abs(self.charges)))
        return qsum <= rtol * max(qabs, 1.0)


@dataclass(frozen=True)
class SEParams:
    """Parameters of one Fourier-space (and real-space) evaluation.

    xi    : Ewald splitting parameter (1/length)
    rc    : real-space cutoff (length)
    M     : grid size per periodic direction (free directions use M + P)
    P     : window support points per direction
    window: "gaussian", "kb" or "bm"
    shape : m for the Gaussian, beta for KB/BM
    s0    : upsampling of the zero mode block
    s     : upsampling of the low nonzero mode block
    nI    : number of low modes (per axis, in units of 2*pi/L) upsampled at s
    R     : truncation radius of the free-space kernel (unused for D=3)
    eps   : accuracy target this parameter set was built for
    """

    xi: float
    rc: float
    M: int
    P: int
    window: str
    shape: float
    s0: float = 1.0
    s: float = 1.0
    nI: int = 0
    R: float = 0.0
    eps: float = 1e-12

    def validate(self, L: float, periodicity: Periodicity) -> None:
        if self.xi <= 0:
            raise ValueError("xi must be positive")
        if self.rc <= 0:
            raise ValueError("rc must be positive")
        if self.M < 2 or self.M % 2:
            raise ValueError("M must be an even integer >= 2")
        if not 1 <= self.P <= self.M:
            raise ValueError("P must satisfy 1 <= P <= M")
        if self.window not in ("gaussian", "kb", "bm"):
            raise ValueError(f"unknown window {self.window!r}")
        if self.shape <= 0:
            raise ValueError("shape parameter must be positive")
        if self.s0 < 1.0 or self.s < 1.0:
            raise ValueError("upsampling factors must be >= 1")
        if not 0 <= self.nI <= self.M // 2:
            raise ValueError("nI must lie in [0, M/2]")
        if periodicity.D in (1, 2) and (self.M + self.P) % 2:
            raise ValueError("M + P must be even when 0 < D < 3")
        if periodicity.D < 3 and self.R <= 0:
            raise ValueError("R must be positive for D < 3")


def generate_random_system(N: int, L: float, seed: int) -> ParticleSystem:
    """Uniform random positions in [0, L)^3 with alternating +-1 charges.

    Charges are neutralized by a constant shift (a no-op for even N), so the
    result is charge neutral for every N.  Reproducible for a given seed.
    """
    if N < 2:
        raise ValueError("need at least two particles")
    rng = np.random.default_rng(seed)
    positions = rng.random((N, 3)) * L
    charges = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    charges = charges - charges.mean()
    return ParticleSystem(positions, charges, float(L))


def relative_rms_error(phi, phi_ref) -> float:
    """sqrt(sum |phi - phi_ref|^2 / N) / sqrt(sum |phi_ref|^2 / N)."""
    phi = np.asarray(phi, dtype=complex)
    phi_ref = np.asarray(phi_ref, dtype=complex)
    if phi.shape != phi_ref.shape:
        raise ValueError("length mismatch")
    ref = np.sqrt(np.mean(np.abs(phi_ref) ** 2))
    if ref == 0.0:
        raise ValueError("reference norm is zero")
    return float(np.sqrt(np.mean(np.abs(phi - phi_ref) ** 2)) / ref)


def energy(system: ParticleSystem, phi) -> float:
    """E = sum_m q_m phi(x_m).

    Implemented verbatim without the conventional 1/2 double-counting
    factor; callers wanting the usual pair energy should halve the result.
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (system.N,):
        raise ValueError("length mismatch")
    return float(np.dot(system.charges, phi))


def check_neutrality(system: ParticleSystem, periodicity: Periodicity) -> None:
    """Warn (D=0) or fail (D>0) on a non-neutral system."""
    if system.is_neutral():
        return
    if periodicity.D == 0:
        warnings.warn(
            "system is not charge neutral; free-space potentials are still "
            "defined but the Ewald split assumes neutrality",
            stacklevel=3,
        )
    else:
        raise ValueError("periodic Ewald summation requires a charge-neutral system")


def total_potential(
    system: ParticleSystem,
    params: SEParams,
    periodicity: Periodicity,
    threads: int = 1,
    timings: dict | None = None,
) -> np.ndarray:
    """Real-space + Fourier-space + self potential at every source point."""
    from . import realspace, sekspace

    params.validate(system.L, periodicity)
    check_neutrality(system, periodicity)

    import time

    t0 = time.perf_counter()
    phi_r = realspace.real_space_sum(system, params.xi, params.rc, periodicity, threads=threads)
    t1 = time.perf_counter()
    if timings is not None:
        timings["realspace"] = t1 - t0
    phi_f = sekspace.se_kspace(system, params, periodicity, threads=threads, timings=timings)
    phi_s = realspace.self_term(system.charges, params.xi)
    return phi_r + phi_f + phi_s


def load_particles(path) -> ParticleSystem:
    """Read "x y z q" lines; '#' starts a comment, optional "L <value>" header."""
    L = 1.0
    rows = []
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "L":
                if len(parts) != 2:
                    raise ValueError(f"malformed header line: {raw.rstrip()}")
                L = float(parts[1])
                continue
            if len(parts) != 4:
                raise ValueError(f"expected 'x y z q', got: {raw.rstrip()}")
            rows.append([float(v) for v in parts])
    if not rows:
        raise ValueError(f"no particles in {path}")
    data = np.asarray(rows)
    return ParticleSystem(data[:, :3], data[:, 3], L)


def save_particles(path, system: ParticleSystem) -> None:
    with open(path, "w") as fh:
        fh.write(f"L {system.L:.17g}\n")
        for (x, y, z), q in zip(system.positions, system.charges):
            fh.write(f"{x:.17g} {y:.17g} {z:.17g} {q:.17g}\n")
