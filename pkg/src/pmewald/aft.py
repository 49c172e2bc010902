"""Adaptive forward/inverse Fourier transforms with per-block upsampling.

Along periodic axes the transform is an ordinary FFT.  Along free axes
the Fourier integrals are discretized on zero-padded grids whose padding
factor depends on the periodic-mode block: s0 for the zero mode, s for
low modes (the I block, max |n_i| <= nI), and none for the rest (J
block).  D=3 degenerates to one plain 3-D FFT and D=0 to one globally
padded 3-D FFT.

Normalization: forward transforms are unnormalized; inverses carry
1/size of the (padded) transform length.  Quadrature weights and all
physical constants live in the scaling and gathering steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Periodicity


class NumpyFftEngine:
    """Default engine; any object with the same four methods can be swapped in."""

    @staticmethod
    def fftn(a, axes):
        return np.fft.fftn(a, axes=axes)

    @staticmethod
    def ifftn(a, axes):
        return np.fft.ifftn(a, axes=axes)

    @staticmethod
    def rfftn(a, s, axes):
        return np.fft.rfftn(a, s=s, axes=axes)

    @staticmethod
    def irfftn(a, s, axes):
        return np.fft.irfftn(a, s=s, axes=axes)


_ENGINE = NumpyFftEngine()


def set_engine(engine) -> None:
    global _ENGINE
    _ENGINE = engine


def current_engine():
    return _ENGINE


def mode_integers(M: int) -> np.ndarray:
    """Signed mode indices in FFT order: 0, 1, ..., M/2-1, -M/2, ..., -1."""
    return np.rint(np.fft.fftfreq(M) * M).astype(int)


def _is_smooth(m: int) -> bool:
    for p in (2, 3, 5, 7):
        while m % p == 0:
            m //= p
    return m == 1


def next_even_smooth(n: int) -> int:
    """Smallest even integer >= n with prime factors in {2, 3, 5, 7}."""
    m = max(2, n)
    while m % 2 or not _is_smooth(m):
        m += 1
    return m


def padded_size(s: float, n: int) -> int:
    """Zero-padded block size: even 7-smooth >= s*n, or n itself when s = 1
    (the unpadded size is physical and cannot be rounded)."""
    if s < 1.0:
        raise ValueError("upsampling factor must be >= 1")
    target = int(np.ceil(s * n - 1e-9))
    if target <= n:
        return n
    return next_even_smooth(target)


@dataclass(frozen=True)
class ModePartition:
    """Split of the periodic-direction modes into {0}, I and J blocks.

    Classification is by the max norm of the signed per-axis mode index:
    mu = 0 is the zero block, 1 <= mu <= nI the I block, mu > nI the J
    block, which covers every mode exactly once.
    """

    M: int
    D: int
    nI: int
    I_idx: np.ndarray
    J_idx: np.ndarray

    @classmethod
    def build(cls, M: int, D: int, nI: int) -> "ModePartition":
        if D not in (1, 2):
            raise ValueError("mode partitions apply to D in {1,2}")
        if not 0 <= nI <= M // 2:
            raise ValueError("nI must lie in [0, M/2]")
        absn = np.abs(mode_integers(M))
        if D == 2:
            mu = np.maximum(absn[:, None], absn[None, :])
        else:
            mu = absn
        I_idx = np.argwhere((mu >= 1) & (mu <= nI))
        J_idx = np.argwhere(mu > nI)
        part = cls(M, D, nI, I_idx, J_idx)
        assert 1 + len(I_idx) + len(J_idx) == M**D, "mode partition must be exact"
        return part

    @property
    def counts(self) -> tuple[int, int, int]:
        return 1, len(self.I_idx), len(self.J_idx)


@dataclass
class SpectralField:
    """Fourier coefficients grouped by upsampling block.

    D=3 uses `full` (M^3); D=0 uses `zero` only (g0^3).  For D in {1,2}
    `zero` has shape (g0,)*(3-D), `Iblk` (rows, gs, ...) and `Jblk`
    (rows, Mt, ...), with `I_idx`/`J_idx` giving the periodic-mode
    indices of the rows.
    """

    D: int
    M: int
    Mt: int
    g0: int
    gs: int
    zero: np.ndarray | None = None
    Iblk: np.ndarray | None = None
    Jblk: np.ndarray | None = None
    I_idx: np.ndarray | None = None
    J_idx: np.ndarray | None = None
    full: np.ndarray | None = None

    @property
    def s0_eff(self) -> float:
        return self.g0 / self.Mt

    @property
    def s_eff(self) -> float:
        return self.gs / self.Mt


def _pad_free(arr: np.ndarray, g: int, free_axes: tuple[int, ...]) -> np.ndarray:
    if all(arr.shape[a] == g for a in free_axes):
        return arr
    shape = list(arr.shape)
    for a in free_axes:
        shape[a] = g
    out = np.zeros(shape, dtype=complex)
    sl = tuple(slice(0, arr.shape[a]) if a in free_axes else slice(None)
               for a in range(arr.ndim))
    out[sl] = arr
    return out


def periodic_stage(H: np.ndarray, D: int) -> np.ndarray:
    """FFT along the periodic axes only."""
    return _ENGINE.fftn(np.asarray(H, dtype=complex), axes=tuple(range(D)))


def free_stage(Hk: np.ndarray, partition: ModePartition, g0: int, gs: int):
    """Per-block zero-padded FFTs along the free axes of the mixed case."""
    D = partition.D
    nfree = 3 - D
    free_axes = tuple(range(1, 1 + nfree))  # after row extraction

    zero_slab = Hk[(0,) * D]
    zero = _ENGINE.fftn(_pad_free(zero_slab[None], g0, free_axes), axes=free_axes)[0]

    if D == 2:
        irows = Hk[partition.I_idx[:, 0], partition.I_idx[:, 1]]
        jrows = Hk[partition.J_idx[:, 0], partition.J_idx[:, 1]]
    else:
        irows = Hk[partition.I_idx[:, 0]]
        jrows = Hk[partition.J_idx[:, 0]]
    Iblk = _ENGINE.fftn(_pad_free(irows, gs, free_axes), axes=free_axes)
    Jblk = _ENGINE.fftn(np.ascontiguousarray(jrows), axes=free_axes)
    return zero, Iblk, Jblk


def aft_forward(
    H: np.ndarray,
    partition: ModePartition | None,
    s0: float,
    s: float,
    periodicity: Periodicity,
) -> SpectralField:
    """Adaptive Fourier transform of a grid field (Mt = free-axis length)."""
    D = periodicity.D
    H = np.asarray(H)
    if D == 3:
        M = H.shape[0]
        return SpectralField(D, M, M, M, M,
                             full=_ENGINE.fftn(np.asarray(H, dtype=complex), axes=(0, 1, 2)))
    Mt = H.shape[-1]
    if D == 0:
        g0 = padded_size(s0, Mt)
        padded = _pad_free(np.asarray(H, dtype=complex), g0, (0, 1, 2))
        return SpectralField(D, 0, Mt, g0, Mt, zero=_ENGINE.fftn(padded, axes=(0, 1, 2)))

    if partition is None:
        raise ValueError("D in {1,2} requires a mode partition")
    if Mt % 2:
        raise ValueError("free-axis grid size must be even")
    M = partition.M
    g0 = padded_size(s0, Mt)
    gs = padded_size(s, Mt)
    Hk = periodic_stage(H, D)
    zero, Iblk, Jblk = free_stage(Hk, partition, g0, gs)
    return SpectralField(D, M, Mt, g0, gs, zero=zero, Iblk=Iblk, Jblk=Jblk,
                         I_idx=partition.I_idx, J_idx=partition.J_idx)


def aft_inverse(
    F: SpectralField,
    partition: ModePartition | None,
    M: int,
    periodicity: Periodicity,
) -> np.ndarray:
    """Inverse of aft_forward: per-block inverse FFTs along the free axes,
    restriction of upsampled blocks to the Mt-point grid, merge, then
    inverse FFT along the periodic axes.  Returns the complex grid field.
    """
    D = periodicity.D
    if D == 3:
        return _ENGINE.ifftn(F.full, axes=(0, 1, 2))
    Mt = F.Mt
    if D == 0:
        out = _ENGINE.ifftn(F.zero, axes=(0, 1, 2))
        return out[:Mt, :Mt, :Mt]

    if partition is None:
        raise ValueError("D in {1,2} requires a mode partition")
    nfree = 3 - D
    free_axes = tuple(range(1, 1 + nfree))
    restrict = (slice(None),) + (slice(0, Mt),) * nfree

    if F.Iblk.shape[0] != len(partition.I_idx) or F.Jblk.shape[0] != len(partition.J_idx):
        raise ValueError("spectral blocks do not match the mode partition")

    zero = _ENGINE.ifftn(F.zero[None], axes=free_axes)[restrict][0]
    Iblk = _ENGINE.ifftn(F.Iblk, axes=free_axes)[restrict]
    Jblk = _ENGINE.ifftn(F.Jblk, axes=free_axes)[restrict]

    Hk = np.zeros((M,) * D + (Mt,) * nfree, dtype=complex)
    Hk[(0,) * D] = zero
    if D == 2:
        Hk[partition.I_idx[:, 0], partition.I_idx[:, 1]] = Iblk
        Hk[partition.J_idx[:, 0], partition.J_idx[:, 1]] = Jblk
    else:
        Hk[partition.I_idx[:, 0]] = Iblk
        Hk[partition.J_idx[:, 0]] = Jblk
    return _ENGINE.ifftn(Hk, axes=tuple(range(D)))


def transformed_points(partition: ModePartition, Mt: int, g0: int, gs: int) -> dict:
    """Free-axis transform sizes of the adaptive and fully upsampled layouts."""
    nfree = 3 - partition.D
    _, ni, nj = partition.counts
    adaptive = g0**nfree + ni * gs**nfree + nj * Mt**nfree
    full = (partition.M**partition.D) * gs**nfree
    return {"zero": g0**nfree, "I": ni * gs**nfree, "J": nj * Mt**nfree,
            "adaptive": adaptive, "full_upsampled": full}
