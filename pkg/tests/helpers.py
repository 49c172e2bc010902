"""Shared test utilities: an O(n^2) DFT engine and small reference sums."""

import numpy as np


def dft_matrix(n: int, inverse: bool = False) -> np.ndarray:
    j = np.arange(n)
    sign = 1j if inverse else -1j
    W = np.exp(sign * 2.0 * np.pi * np.outer(j, j) / n)
    return W / n if inverse else W


def dft_along(a: np.ndarray, axis: int, inverse: bool = False) -> np.ndarray:
    W = dft_matrix(a.shape[axis], inverse)
    return np.moveaxis(np.tensordot(W, np.moveaxis(a, axis, 0), axes=(1, 0)), 0, axis)


class DftEngine:
    """Quadratic-cost engine with numpy.fft semantics, for oracle checks."""

    @staticmethod
    def fftn(a, axes):
        out = np.asarray(a, dtype=complex)
        for ax in axes:
            out = dft_along(out, ax)
        return out

    @staticmethod
    def ifftn(a, axes):
        out = np.asarray(a, dtype=complex)
        for ax in axes:
            out = dft_along(out, ax, inverse=True)
        return out

    @staticmethod
    def rfftn(a, s, axes):
        padded = np.zeros(s, dtype=complex)
        padded[tuple(slice(0, n) for n in np.asarray(a).shape)] = a
        full = DftEngine.fftn(padded, axes)
        return full[..., : s[-1] // 2 + 1]

    @staticmethod
    def irfftn(a, s, axes):
        n0, n1, n = s
        half = n // 2 + 1
        full = np.zeros(s, dtype=complex)
        full[..., :half] = a
        i0 = (-np.arange(n0)) % n0
        i1 = (-np.arange(n1)) % n1
        for k in range(half, n):
            full[:, :, k] = np.conj(a[np.ix_(i0, i1, [n - k])])[:, :, 0]
        return DftEngine.ifftn(full, axes).real


def naive_free_space(system) -> np.ndarray:
    """Plain sum q_n / r over distinct pairs, no images."""
    d = system.positions[:, None, :] - system.positions[None, :, :]
    r = np.sqrt((d * d).sum(axis=2))
    np.fill_diagonal(r, np.inf)
    return (system.charges[None, :] / r).sum(axis=1)
