"""Real-space Ewald sum with cell lists, plus the self correction.

phi_real(x_m) = sum over pairs and images with |x_m - x_n + p| < rc of
q_n erfc(xi r)/r, excluding the n = m, p = 0 term.  The cell list covers
the minimum-image case rc <= L/2; larger cutoffs (needed when the
accuracy target forces rc past the half box) fall back to explicit image
enumeration.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .core import ParticleSystem, Periodicity, SingularConfigurationError

_SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class CellList:
    """Particles bucketed into cells with edge >= rc.

    members[flat_cell] is an index array; every particle appears exactly
    once.  All pairs within rc are discoverable by scanning the 27
    neighboring cells, wrapping only on periodic axes.
    """

    ncells: tuple[int, int, int]
    edge: float
    members: list[np.ndarray]
    periodic_mask: tuple[bool, bool, bool]
    rc: float

    def flat(self, cx: int, cy: int, cz: int) -> int:
        nx, ny, nz = self.ncells
        return (cx * ny + cy) * nz + cz


def build_cell_list(system: ParticleSystem, rc: float, periodicity: Periodicity) -> CellList:
    if rc <= 0:
        raise ValueError("rc must be positive")
    if periodicity.D >= 1 and rc > system.L / 2 + 1e-12:
        raise ValueError("cell list requires rc <= L/2 on periodic axes (minimum image)")
    n = max(1, int(np.floor(system.L / rc)))
    ncells = (n, n, n)
    edge = system.L / n
    idx = np.minimum((system.positions / edge).astype(int), n - 1)
    flat = (idx[:, 0] * n + idx[:, 1]) * n + idx[:, 2]
    order = np.argsort(flat, kind="stable")
    members: list[np.ndarray] = [np.empty(0, dtype=int)] * (n * n * n)
    sorted_flat = flat[order]
    bounds = np.searchsorted(sorted_flat, np.arange(n * n * n + 1))
    for c in range(n * n * n):
        members[c] = order[bounds[c]:bounds[c + 1]]
    return CellList(ncells, edge, members, periodicity.mask, rc)


def _neighbor_blocks(clist: CellList, home: tuple[int, int, int]):
    """Yield (member indices, image shift vector) for the 27-neighborhood."""
    n = clist.ncells[0]
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            for dz in (-1, 0, 1):
                cell = []
                shift = np.zeros(3)
                ok = True
                for axis, (c, d) in enumerate(zip(home, (dx, dy, dz))):
                    cc = c + d
                    if clist.periodic_mask[axis]:
                        if cc < 0:
                            cc += n
                            shift[axis] = -1.0
                        elif cc >= n:
                            cc -= n
                            shift[axis] = 1.0
                        # n == 1 or 2: the same cell can be its own neighbor
                        # through the wrap; the shift still distinguishes them
                    else:
                        if cc < 0 or cc >= n:
                            ok = False
                            break
                    cell.append(cc)
                if ok:
                    yield clist.members[clist.flat(*cell)], shift


def _cell_path(system, xi, rc, periodicity, threads):
    clist = build_cell_list(system, rc, periodicity)
    pos, q, L = system.positions, system.charges, system.L
    n = clist.ncells[0]
    phi = np.zeros(system.N)
    homes = [(cx, cy, cz) for cx in range(n) for cy in range(n) for cz in range(n)]

    # with <= 2 cells per periodic axis the 27-neighborhood revisits cells;
    # deduplicate (cell, shift) pairs so no pair is counted twice
    def do_home(home):
        tidx = clist.members[clist.flat(*home)]
        if tidx.size == 0:
            return tidx, np.zeros(0)
        acc = np.zeros(tidx.size)
        seen = set()
        for sidx, shift in _neighbor_blocks(clist, home):
            key = (sidx.tobytes(), shift.tobytes())
            if key in seen:
                continue
            seen.add(key)
            if sidx.size == 0:
                continue
            d = pos[tidx][:, None, :] - (pos[sidx][None, :, :] + shift * L)
            r = np.sqrt(np.sum(d * d, axis=2))
            zero = r < 1e-14
            if np.any(zero):
                if np.all(shift == 0.0):
                    self_pair = tidx[:, None] == sidx[None, :]
                else:
                    self_pair = np.zeros_like(zero)
                if np.any(zero & ~self_pair):
                    raise SingularConfigurationError("coincident distinct particles")
            mask = (r < rc) & ~zero
            rsafe = np.where(mask, r, 1.0)
            acc += np.where(mask, erfc(xi * rsafe) / rsafe, 0.0) @ q[sidx]
        return tidx, acc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(do_home, homes))
    else:
        results = [do_home(h) for h in homes]
    for tidx, acc in results:
        phi[tidx] = acc
    return phi


def _image_path(system, xi, rc, periodicity):
    """Explicit image enumeration; exact for any rc (used when rc > L/2)."""
    pos, q, L = system.positions, system.charges, system.L
    layers = int(np.floor((rc + L / 2) / L)) + 1
    axes_range = [
        np.arange(-layers, layers + 1) if periodicity.mask[a] else np.array([0])
        for a in range(3)
    ]
    phi = np.zeros(system.N)
    d0 = pos[:, None, :] - pos[None, :, :]
    for ax in axes_range[0]:
        for ay in axes_range[1]:
            for az in axes_range[2]:
                shift = np.array([ax, ay, az], dtype=float) * L
                d = d0 + shift
                r = np.sqrt(np.sum(d * d, axis=2))
                zero = r < 1e-14
                if not (ax == 0 and ay == 0 and az == 0):
                    if np.any(zero):
                        raise SingularConfigurationError("particle coincides with an image")
                else:
                    offdiag = zero & ~np.eye(system.N, dtype=bool)
                    if np.any(offdiag):
                        raise SingularConfigurationError("coincident distinct particles")
                mask = (r < rc) & ~zero
                rsafe = np.where(mask, r, 1.0)
                phi += np.where(mask, erfc(xi * rsafe) / rsafe, 0.0) @ q
    return phi


def real_space_sum(
    system: ParticleSystem,
    xi: float,
    rc: float,
    periodicity: Periodicity,
    threads: int = 1,
) -> np.ndarray:
    """Cutoff erfc sum over pairs and their periodic images."""
    if xi <= 0 or rc <= 0:
        raise ValueError("xi and rc must be positive")
    if periodicity.D >= 1 and rc > system.L / 2 + 1e-12:
        return _image_path(system, xi, rc, periodicity)
    return _cell_path(system, xi, rc, periodicity, threads)


def self_term(q, xi: float):
    """-2 xi q / sqrt(pi), the correction for each charge's own screen."""
    return -2.0 * xi * np.asarray(q, dtype=float) / _SQRT_PI
