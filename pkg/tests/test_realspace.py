import math

import numpy as np
import pytest
from scipy.special import erfc

from pmewald import core, realspace
from pmewald.core import ParticleSystem, Periodicity, SingularConfigurationError


def brute_force_real(system, xi, rc, periodicity, layers=2):
    """O(N^2 * images) reference with explicit image enumeration."""
    pos, q, L = system.positions, system.charges, system.L
    phi = np.zeros(system.N)
    rngs = [range(-layers, layers + 1) if periodicity.mask[a] else range(1)
            for a in range(3)]
    for m in range(system.N):
        for n in range(system.N):
            for ax in rngs[0]:
                for ay in rngs[1]:
                    for az in rngs[2]:
                        if m == n and ax == ay == az == 0:
                            continue
                        d = pos[m] - pos[n] + np.array([ax, ay, az]) * L
                        r = np.linalg.norm(d)
                        if r < rc:
                            phi[m] += q[n] * erfc(xi * r) / r
    return phi


def test_cell_list_single_particle():
    s = ParticleSystem(np.array([[0.5, 0.5, 0.5]]), np.array([1.0]), 1.0)
    cl = realspace.build_cell_list(s, 0.3, Periodicity(0))
    occupied = [m for m in cl.members if m.size]
    assert len(occupied) == 1
    assert occupied[0].tolist() == [0]


def test_cell_list_every_particle_once():
    s = core.generate_random_system(50, 1.0, seed=1)
    cl = realspace.build_cell_list(s, 0.21, Periodicity(3))
    seen = np.sort(np.concatenate([m for m in cl.members if m.size]))
    assert np.array_equal(seen, np.arange(50))
    assert cl.edge >= cl.rc


def test_cell_list_rejects_large_cutoff_with_periodicity():
    s = core.generate_random_system(4, 1.0, seed=0)
    with pytest.raises(ValueError):
        realspace.build_cell_list(s, 0.51, Periodicity(3))


def test_pair_beyond_cutoff_not_counted():
    rc = 0.25
    pos = np.array([[0.1, 0.5, 0.5], [0.1 + rc + 1.0 / 28, 0.5, 0.5]])
    s = ParticleSystem(pos, np.array([1.0, -1.0]), 1.0)
    phi = realspace.real_space_sum(s, 5.0, rc, Periodicity(0))
    assert np.all(phi == 0.0)


def test_pair_set_matches_brute_force_images():
    s = core.generate_random_system(50, 1.0, seed=4)
    xi, rc = 7.0, 0.45
    peri = Periodicity(3)
    got = realspace.real_space_sum(s, xi, rc, peri)
    want = brute_force_real(s, xi, rc, peri, layers=1)
    assert np.allclose(got, want, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("D", [0, 1, 2])
def test_mixed_periodicity_matches_brute_force(D):
    s = core.generate_random_system(30, 1.0, seed=6)
    xi, rc = 6.0, 0.4
    got = realspace.real_space_sum(s, xi, rc, Periodicity(D))
    want = brute_force_real(s, xi, rc, Periodicity(D), layers=1)
    assert np.allclose(got, want, rtol=1e-13, atol=1e-15)


def test_image_path_used_beyond_half_box():
    s = core.generate_random_system(12, 1.0, seed=8)
    xi, rc = 4.0, 1.2
    got = realspace.real_space_sum(s, xi, rc, Periodicity(3))
    want = brute_force_real(s, xi, rc, Periodicity(3), layers=2)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


def test_far_pair_with_large_xi_negligible():
    pos = np.array([[0.1, 0.1, 0.1], [0.9, 0.9, 0.9]])
    s = ParticleSystem(pos, np.array([1.0, -1.0]), 1.0)
    phi = realspace.real_space_sum(s, 50.0, 0.45, Periodicity(0))
    assert np.max(np.abs(phi)) < 1e-14


def test_two_particles_single_term():
    r = 0.2
    pos = np.array([[0.3, 0.5, 0.5], [0.3 + r, 0.5, 0.5]])
    s = ParticleSystem(pos, np.array([2.0, -1.0]), 1.0)
    xi = 5.0
    phi = realspace.real_space_sum(s, xi, 0.45, Periodicity(0))
    assert phi[0] == pytest.approx(-1.0 * erfc(xi * r) / r, rel=1e-15)
    assert phi[1] == pytest.approx(2.0 * erfc(xi * r) / r, rel=1e-15)


def test_coincident_particles_rejected():
    pos = np.array([[0.5, 0.5, 0.5], [0.5, 0.5, 0.5]])
    s = ParticleSystem(pos, np.array([1.0, -1.0]), 1.0)
    with pytest.raises(SingularConfigurationError):
        realspace.real_space_sum(s, 5.0, 0.4, Periodicity(0))


def test_self_term_values():
    assert realspace.self_term(np.array([0.0]), 3.0)[0] == 0.0
    assert realspace.self_term(np.array([1.0]), math.sqrt(math.pi))[0] == pytest.approx(-2.0, rel=1e-15)
    assert realspace.self_term(np.array([-2.0]), 1.0)[0] == pytest.approx(4.0 / math.sqrt(math.pi), rel=1e-15)


def test_newton_symmetry_of_pair_kernel():
    # contribution of (m, n) to phi_m with q_n equals that of (n, m) to
    # phi_n with q_m after swapping charges (symmetric erfc kernel)
    pos = np.array([[0.2, 0.3, 0.4], [0.6, 0.7, 0.1]])
    xi, rc = 5.0, 0.45
    a = ParticleSystem(pos, np.array([0.0, 3.0]), 1.0)
    b = ParticleSystem(pos, np.array([3.0, 0.0]), 1.0)
    phi_a = realspace.real_space_sum(a, xi, rc, Periodicity(0))
    phi_b = realspace.real_space_sum(b, xi, rc, Periodicity(0))
    assert phi_a[0] == phi_b[1]


def test_threading_deterministic():
    s = core.generate_random_system(200, 1.0, seed=5)
    a = realspace.real_space_sum(s, 6.0, 0.3, Periodicity(3), threads=1)
    b = realspace.real_space_sum(s, 6.0, 0.3, Periodicity(3), threads=4)
    assert np.array_equal(a, b)


def test_cutoff_stability_at_selected_rc():
    # with rc from the accuracy estimate, growing rc by 1.2x moves the
    # result by less than eps in relative rms
    s = core.generate_random_system(64, 1.0, seed=9)
    xi, eps = 10.0, 1e-8
    rc = math.sqrt(-math.log(eps)) / xi
    peri = Periodicity(3)
    phi1 = realspace.real_space_sum(s, xi, rc, peri)
    phi2 = realspace.real_space_sum(s, xi, min(1.2 * rc, 0.5), peri)
    assert core.relative_rms_error(phi1, phi2) < eps
