"""Fourier-space pipeline: spreading, scaling, gathering.

The smooth part of the potential is computed in five steps: charges are
spread onto a uniform grid with a compact window (periodic wrap on
periodic axes, an extended grid of Mt = M + P points on free axes), the
grid is transformed with the adaptive FFT, every retained mode is
multiplied by

    4*pi * exp(-|k|^2/(4 xi^2)) * G_hat(k) / w_hat(k)^2,

the result is transformed back, and potentials are read off by the
adjoint of spreading with trapezoidal weight h^3 (the only two places a
physical constant appears are the 4*pi here and the h^3 in gather; the
operator prefactors of the mixed transform cancel against the inverse
FFT normalization).

For the free-space case the oscillatory kernel can be precomputed once
on a fine grid, truncated in real space, and reused on a grid padded by
only a factor of two per axis.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import aft, greens, windows
from .core import ParticleSystem, Periodicity, SEParams

_CHUNK = 2048


@dataclass(frozen=True)
class Grid:
    """Uniform grid geometry: M points per periodic axis, Mt = M + P per
    free axis, common spacing h = L/M = Lt/Mt, sources offset by P*h/2 on
    free axes so every window support fits the extension."""

    L: float
    M: int
    P: int
    D: int
    h: float
    Lt: float
    Mt: int
    R: float
    g0: int
    gs: int

    @classmethod
    def build(cls, L: float, params: SEParams, periodicity: Periodicity) -> "Grid":
        D = periodicity.D
        h = L / params.M
        Mt = params.M + params.P
        Lt = L + params.P * h
        R = params.R if D < 3 else 0.0
        g0 = aft.padded_size(params.s0, Mt) if D < 3 else params.M
        gs = aft.padded_size(params.s, Mt) if D in (1, 2) else Mt
        return cls(L, params.M, params.P, D, h, Lt, Mt, R, g0, gs)

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.M if a < self.D else self.Mt for a in range(3))

    @property
    def offsets(self) -> np.ndarray:
        return np.array([0.0 if a < self.D else 0.5 * self.P * self.h for a in range(3)])


@dataclass(frozen=True)
class GridField:
    values: np.ndarray
    grid: Grid


@dataclass(frozen=True)
class PrecomputedKernel:
    """Fourier coefficients of the truncated free-space kernel on the
    convolution grid (real half-spectrum layout).

    nconv is 2*Mt whenever the mollifier's reach fits inside the window
    extension (the usual case); tighter tolerances at small P*h enlarge
    the clip cube and hence the grid slightly.
    """

    Mt: int
    g0: int
    nconv: int
    R: float
    h: float
    ghat: np.ndarray  # shape (nconv, nconv, nconv//2 + 1), real


_KERNEL_CACHE: dict[tuple, PrecomputedKernel] = {}


def mode_values(n: int, h: float) -> np.ndarray:
    """FFT-ordered wavenumbers 2*pi*j/(n*h)."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=h)


def _stencil(system: ParticleSystem, wspec: windows.WindowSpec, grid: Grid,
             sel: slice) -> tuple[list, list]:
    """Per-axis grid indices (n, P) and window weights for a particle slice."""
    P, h = grid.P, grid.h
    t = np.arange(P)
    idxs, wts = [], []
    offs = grid.offsets
    for a in range(3):
        u = system.positions[sel, a] + offs[a]
        first = np.floor(u / h - 0.5 * P).astype(np.int64) + 1
        idx = first[:, None] + t[None, :]
        delta = idx * h - u[:, None]
        if a < grid.D:
            idx = np.mod(idx, grid.M)
        wts.append(windows.evaluate(delta, wspec))
        idxs.append(idx)
    return idxs, wts


def _chunks(n: int) -> list[slice]:
    if n == 0:
        return [slice(0, 0)]
    return [slice(i, min(i + _CHUNK, n)) for i in range(0, n, _CHUNK)]


def spread(system: ParticleSystem, wspec: windows.WindowSpec, grid: Grid,
           periodicity: Periodicity, threads: int = 1) -> GridField:
    """H(x) = sum_n q_n w(x - x_n), wrapped on periodic axes.

    Each particle touches exactly P^3 grid points (the P nearest per axis).
    """
    if grid.P > grid.M:
        raise ValueError("window support P must not exceed M")

    def partial(sel: slice) -> np.ndarray:
        out = np.zeros(grid.shape)
        (ix, iy, iz), (wx, wy, wz) = _stencil(system, wspec, grid, sel)
        W = system.charges[sel, None, None, None] \
            * wx[:, :, None, None] * wy[:, None, :, None] * wz[:, None, None, :]
        np.add.at(out, (ix[:, :, None, None], iy[:, None, :, None], iz[:, None, None, :]), W)
        return out

    chunks = _chunks(system.N)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(partial, chunks))
    else:
        parts = [partial(c) for c in chunks]
    total = parts[0]
    for p in parts[1:]:  # fixed merge order keeps the result thread-count independent
        total += p
    return GridField(total, grid)


def gather(field: GridField, system: ParticleSystem, wspec: windows.WindowSpec,
           periodicity: Periodicity, threads: int = 1) -> np.ndarray:
    """phi(x_m) = h^3 sum_grid H~ w(x_m - x); exact adjoint of spread."""
    grid = field.grid
    H = field.values
    phi = np.empty(system.N)

    def partial(sel: slice) -> None:
        (ix, iy, iz), (wx, wy, wz) = _stencil(system, wspec, grid, sel)
        vals = H[ix[:, :, None, None], iy[:, None, :, None], iz[:, None, None, :]]
        phi[sel] = np.einsum("npqr,np,nq,nr->n", vals, wx, wy, wz)

    chunks = _chunks(system.N)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            list(ex.map(partial, chunks))
    else:
        for c in chunks:
            partial(c)
    return phi * grid.h**3


def _window_table(wspec, k):
    vals = np.asarray(windows.fourier(k, wspec), dtype=float)
    if np.min(np.abs(vals)) < 1e-30:
        raise AssertionError("window transform underflow: P/M misconfigured")
    return vals


def _mollifier(k2, xi):
    return np.exp(-k2 / (4.0 * xi * xi))


def scale(F: aft.SpectralField, xi: float, wspec: windows.WindowSpec,
          gspec: greens.GreensSpec, grid: Grid, periodicity: Periodicity) -> aft.SpectralField:
    """Multiply every retained mode by 4*pi*exp(-k^2/4xi^2)*G_hat/w_hat^2."""
    D = periodicity.D
    four_pi = 4.0 * np.pi

    if D == 3:
        k1 = mode_values(grid.M, grid.h)
        w1 = _window_table(wspec, k1)
        k2 = k1[:, None, None] ** 2 + k1[None, :, None] ** 2 + k1[None, None, :] ** 2
        with np.errstate(divide="ignore"):
            ghat = np.where(k2 > 0.0, 1.0 / np.where(k2 > 0.0, k2, 1.0), 0.0)
        w3 = w1[:, None, None] * w1[None, :, None] * w1[None, None, :]
        fac = four_pi * _mollifier(k2, xi) * ghat / w3**2
        return aft.SpectralField(D, F.M, F.Mt, F.g0, F.gs, full=F.full * fac)

    if D == 0:
        kf = mode_values(F.g0, grid.h)
        wf = _window_table(wspec, kf)
        k2 = kf[:, None, None] ** 2 + kf[None, :, None] ** 2 + kf[None, None, :] ** 2
        ghat = greens.zero_mode_values(0, gspec.R, np.sqrt(k2))
        w3 = wf[:, None, None] * wf[None, :, None] * wf[None, None, :]
        fac = four_pi * _mollifier(k2, xi) * ghat / w3**2
        return aft.SpectralField(D, F.M, F.Mt, F.g0, F.gs, zero=F.zero * fac)

    kper = mode_values(grid.M, grid.h)
    wper = _window_table(wspec, kper)
    nfree = 3 - D

    # zero block: the (3-D)-dimensional truncated free-space kernel
    kf0 = mode_values(F.g0, grid.h)
    wf0 = _window_table(wspec, kf0)
    if nfree == 1:
        kap2 = kf0**2
        wfree = wf0
    else:
        kap2 = kf0[:, None] ** 2 + kf0[None, :] ** 2
        wfree = wf0[:, None] * wf0[None, :]
    g0hat = greens.zero_mode_values(D, gspec.R, np.sqrt(kap2))
    w3 = (wper[0] ** D) * wfree
    zero_out = F.zero * (four_pi * _mollifier(kap2, xi) * g0hat / w3**2)

    def block_factor(idx, glen):
        kf = mode_values(glen, grid.h)
        wf = _window_table(wspec, kf)
        if D == 2:
            k2row = kper[idx[:, 0]] ** 2 + kper[idx[:, 1]] ** 2
            wrow = wper[idx[:, 0]] * wper[idx[:, 1]]
        else:
            k2row = kper[idx[:, 0]] ** 2
            wrow = wper[idx[:, 0]]
        if nfree == 1:
            k2 = k2row[:, None] + kf[None, :] ** 2
            w3b = wrow[:, None] * wf[None, :]
        else:
            k2 = k2row[:, None, None] + kf[None, :, None] ** 2 + kf[None, None, :] ** 2
            w3b = wrow[:, None, None] * (wf[:, None] * wf[None, :])[None, :, :]
        return four_pi * _mollifier(k2, xi) / (k2 * w3b**2)

    I_out = F.Iblk * block_factor(F.I_idx, F.gs) if len(F.I_idx) else F.Iblk.copy()
    J_out = F.Jblk * block_factor(F.J_idx, F.Mt)
    return aft.SpectralField(D, F.M, F.Mt, F.g0, F.gs, zero=zero_out,
                             Iblk=I_out, Jblk=J_out, I_idx=F.I_idx, J_idx=F.J_idx)


def precompute_truncated_greens(L: float, M: int, P: int, s0: float,
                                rc: float | None = None) -> PrecomputedKernel:
    """Tabulate the truncated free-space kernel for 2x-padded convolutions.

    Evaluates G_hat on a fine (>= s0*Mt per axis) grid, inverse transforms,
    clips the real-space kernel to a cube that clears the mollifier's reach
    around every pair displacement, and transforms back on the convolution
    grid.  Cached and reused for identical geometry.
    """
    if s0 < 1.0 + np.sqrt(3.0) - 1e-12:
        raise ValueError("free-space precompute requires s0 >= 1 + sqrt(3)")
    h = L / M
    Mt = M + P
    Lt = L + P * h
    # margin the mollified kernel needs on each side of the used displacements;
    # half a grid cell of slack is below the discretization granularity
    margin = max(P * h, min(rc, L) if rc is not None else 0.0)
    nhalf = int(np.ceil((L + margin) / h - 0.5))
    nconv = aft.next_even_smooth(max(2 * nhalf, 2 * Mt))
    W = (nconv // 2) * h                # clip cube half width (grid aligned)
    R = np.sqrt(3.0) * L + margin       # sphere covering the diagonal + reach
    s0 = max(s0, (W + R) / Lt)          # fine grid must keep sphere images clear
    g0 = aft.padded_size(s0, Mt)
    key = (Mt, g0, nconv, round(R, 12), round(h, 12))
    hit = _KERNEL_CACHE.get(key)
    if hit is not None:
        return hit

    kf = mode_values(g0, h)
    k2 = kf[:, None, None] ** 2 + kf[None, :, None] ** 2 + kf[None, None, :] ** 2
    ghat_fine = greens.zero_mode_values(0, R, np.sqrt(k2))
    gfine = np.fft.ifftn(ghat_fine) / h**3
    peak = np.max(np.abs(gfine.real))
    assert np.max(np.abs(gfine.imag)) < 1e-13 * peak, "kernel must be real"
    half = nconv // 2
    idx = np.concatenate([np.arange(half), np.arange(g0 - half, g0)])
    gcube = gfine.real[np.ix_(idx, idx, idx)]
    ghat = h**3 * aft.current_engine().rfftn(gcube, s=(nconv,) * 3, axes=(0, 1, 2))
    assert np.max(np.abs(ghat.imag)) < 1e-13 * np.max(np.abs(ghat.real))
    kernel = PrecomputedKernel(Mt, g0, nconv, R, h, np.ascontiguousarray(ghat.real))
    _KERNEL_CACHE[key] = kernel
    return kernel


def _kspace_freespace_kernel(field: GridField, system, wspec, params, threads, timings):
    """D=0 pipeline through the precomputed kernel (2x padded, real FFTs).

    The forward/inverse transforms are staged per axis so the zero-padded
    input and the restricted output never transform more rows than carry
    data; the mollifier and window factors apply as separable per-axis
    broadcasts (only the kernel itself is a full 3-D multiply).
    """
    grid = field.grid
    t0 = time.perf_counter()
    kern = precompute_truncated_greens(grid.L, grid.M, grid.P, params.s0, rc=params.rc)
    t1 = time.perf_counter()
    n2 = kern.nconv
    Mt = grid.Mt
    FH = np.fft.rfft(field.values, n=n2, axis=2)
    FH = np.fft.fft(FH, n=n2, axis=1)
    FH = np.fft.fft(FH, n=n2, axis=0)
    t2 = time.perf_counter()
    kfull = mode_values(n2, grid.h)
    khalf = 2.0 * np.pi * np.fft.rfftfreq(n2, d=grid.h)
    afull = _mollifier(kfull**2, params.xi) / _window_table(wspec, kfull) ** 2
    ahalf = _mollifier(khalf**2, params.xi) / _window_table(wspec, khalf) ** 2
    FH *= kern.ghat
    FH *= (4.0 * np.pi) * afull[:, None, None]
    FH *= afull[None, :, None]
    FH *= ahalf[None, None, :]
    t3 = time.perf_counter()
    Ht = np.fft.ifft(FH, axis=0)[:Mt]
    Ht = np.fft.ifft(Ht, axis=1)[:, :Mt]
    Ht = np.fft.irfft(Ht, n=n2, axis=2)[:, :, :Mt]
    t4 = time.perf_counter()
    if timings is not None:
        timings["precompute"] = t1 - t0
        timings["aft"] = t2 - t1
        timings["scale"] = t3 - t2
        timings["aift"] = t4 - t3
    return GridField(np.ascontiguousarray(Ht), grid)


def se_kspace(
    system: ParticleSystem,
    params: SEParams,
    periodicity: Periodicity,
    threads: int = 1,
    timings: dict | None = None,
    use_kernel: bool | None = None,
) -> np.ndarray:
    """Fourier-space part of the Ewald sum at every source point.

    For D=0 a precomputed truncated kernel with 2x zero padding is the
    default; pass use_kernel=False to force the globally upsampled path.
    """
    D = periodicity.D
    params.validate(system.L, periodicity)
    grid = Grid.build(system.L, params, periodicity)
    wspec = windows.WindowSpec(params.window, params.P, grid.h, params.shape)
    gspec = greens.GreensSpec(D, grid.R if D < 3 else 0.0) if D < 3 else greens.GreensSpec(3)

    t0 = time.perf_counter()
    H = spread(system, wspec, grid, periodicity, threads=threads)
    t1 = time.perf_counter()
    if timings is not None:
        timings["spread"] = t1 - t0
        timings.setdefault("precompute", 0.0)

    if D == 0 and (use_kernel or use_kernel is None):
        Ht = _kspace_freespace_kernel(H, system, wspec, params, threads, timings)
    else:
        partition = aft.ModePartition.build(params.M, D, params.nI) if D in (1, 2) else None
        ta = time.perf_counter()
        F = aft.aft_forward(H.values, partition, params.s0, params.s, periodicity)
        tb = time.perf_counter()
        F = scale(F, params.xi, wspec, gspec, grid, periodicity)
        tc = time.perf_counter()
        Hc = aft.aft_inverse(F, partition, params.M, periodicity)
        td = time.perf_counter()
        scale_ref = np.max(np.abs(Hc.real)) + 1e-300
        assert np.max(np.abs(Hc.imag)) < 1e-10 * scale_ref, "inverse transform must be real"
        Ht = GridField(np.ascontiguousarray(Hc.real), grid)
        if timings is not None:
            timings["aft"] = tb - ta
            timings["scale"] = tc - tb
            timings["aift"] = td - tc

    t5 = time.perf_counter()
    phi = gather(Ht, system, wspec, periodicity, threads=threads)
    if timings is not None:
        timings["gather"] = time.perf_counter() - t5
    return phi


def global_upsampled_kspace(
    system: ParticleSystem,
    params: SEParams,
    periodicity: Periodicity,
) -> np.ndarray:
    """Reference pipeline: one plain 3-D FFT with every free axis padded at
    s0.  Used to validate the adaptive transform's degenerate settings."""
    D = periodicity.D
    params.validate(system.L, periodicity)
    grid = Grid.build(system.L, params, periodicity)
    wspec = windows.WindowSpec(params.window, params.P, grid.h, params.shape)

    H = spread(system, wspec, grid, periodicity)
    g0 = grid.g0 if D < 3 else grid.M
    padded_shape = tuple(grid.M if a < D else g0 for a in range(3))
    Hp = np.zeros(padded_shape, dtype=complex)
    Hp[tuple(slice(0, s) for s in H.values.shape)] = H.values
    FH = np.fft.fftn(Hp)

    kaxes = [mode_values(grid.M if a < D else g0, grid.h) for a in range(3)]
    waxes = [_window_table(wspec, k) for k in kaxes]
    k2 = (kaxes[0][:, None, None] ** 2 + kaxes[1][None, :, None] ** 2
          + kaxes[2][None, None, :] ** 2)
    w3 = waxes[0][:, None, None] * waxes[1][None, :, None] * waxes[2][None, None, :]
    if D == 3:
        with np.errstate(divide="ignore"):
            ghat = np.where(k2 > 0.0, 1.0 / np.where(k2 > 0.0, k2, 1.0), 0.0)
    else:
        kper2 = np.zeros(padded_shape)
        for a in range(D):
            shp = [1, 1, 1]
            shp[a] = grid.M
            kper2 = kper2 + (kaxes[a] ** 2).reshape(shp)
        kap2 = k2 - kper2
        zero_rows = kper2 == 0.0
        with np.errstate(divide="ignore"):
            ghat = np.where(zero_rows,
                            greens.zero_mode_values(D, grid.R, np.sqrt(kap2)),
                            1.0 / np.where(k2 > 0.0, k2, 1.0))
    FH *= 4.0 * np.pi * _mollifier(k2, params.xi) * ghat / w3**2
    Ht = np.fft.ifftn(FH)
    Ht = Ht[tuple(slice(0, s) for s in H.values.shape)]
    field = GridField(np.ascontiguousarray(Ht.real), grid)
    return gather(field, system, wspec, periodicity)
