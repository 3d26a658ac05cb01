import math

import numpy as np
import pytest

from padeinterp.perturb import (
    DL_POINTS,
    ProjectionError,
    beta_expansion,
    dl_corrections,
    large_beta_coeffs,
    rescale,
    small_beta_coeffs,
    universal_constants,
)
from padeinterp.radial import (
    Grid,
    RadialProblem,
    airy_zero,
    coulomb_energy_closed_form,
    linear_energy_airy,
    solve_bound_state,
)

M_C, ALPHA, LAM = 1.521, 0.4984, 0.1771
# Dalgarno-Lewis runs on the cusp-free grid, whose error is O(h^2): about 1e-5
# relative at the default resolution (see test_dl_grid_convergence)
GRID_RTOL = 2e-5
RANDOM_SETS = [(2.37, 0.61, 0.143), (4.81, 0.29, 0.262)]


def _coulomb_state(n=1, alpha=ALPHA, points=DL_POINTS):
    h0 = RadialProblem(1 / (2 * M_C), alpha)
    return h0, solve_bound_state(h0, n, Grid(60.0, points), cusp=False)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_reference_constants(n):
    uc = universal_constants(n)
    assert uc.small[0] == (-1 / (2 * n * n),)
    assert uc.large[0][0] == pytest.approx(2 ** (-1 / 3) * airy_zero(n), rel=1e-14)
    assert [len(row) for row in uc.small] == [1, 2, 3, 4]


def test_zeroth_order_matches_closed_forms():
    pair = beta_expansion(M_C, ALPHA, LAM, 2, 2)
    assert pair.small.coeffs[0] == pytest.approx(coulomb_energy_closed_form(M_C, ALPHA, 2), rel=1e-8)
    assert pair.large.coeffs[0] == pytest.approx(linear_energy_airy(M_C, LAM, 2), rel=1e-6)
    assert pair.large.leading_power == 1


def test_first_order_small_side():
    c = small_beta_coeffs(M_C, ALPHA, LAM, 1, 1).coeffs
    assert c[0] == pytest.approx(-0.188910, abs=5e-7)
    expected = M_C * ALPHA**2 / 2 + 3 * LAM / (2 * M_C * ALPHA)
    assert c[1] == pytest.approx(expected, rel=GRID_RTOL)
    assert c[1] == pytest.approx(0.539341, abs=5e-6)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_first_order_general_n(n):
    c1 = beta_expansion(M_C, ALPHA, LAM, n, 1).small.coeffs[1]
    expected = M_C * ALPHA**2 / (2 * n * n) + 3 * LAM * n * n / (2 * M_C * ALPHA)
    assert c1 == pytest.approx(expected, rel=GRID_RTOL)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("params", RANDOM_SETS)
def test_rescale_equals_direct(params, n):
    m, a, lam = params
    pair = rescale(universal_constants(n, 3), m, a, lam)
    assert pair.small.coeffs == pytest.approx(small_beta_coeffs(m, a, lam, n, 3).coeffs, rel=1e-8)
    assert pair.large.coeffs == pytest.approx(large_beta_coeffs(m, a, lam, n, 3).coeffs, rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_virial_identities(n):
    c = small_beta_coeffs(M_C, ALPHA, 0.0, n, 1).coeffs
    assert c[1] == pytest.approx(-c[0], rel=GRID_RTOL)
    e = large_beta_coeffs(M_C, 0.0, LAM, n, 1).coeffs
    assert e[1] == pytest.approx(e[0] / 3, rel=GRID_RTOL)


def test_constant_shift():
    h0, psi0 = _coulomb_state()
    res = dl_corrections(h0, psi0, lambda r: np.full_like(r, 0.37), order=3)
    assert res.E1 == pytest.approx(0.37, rel=1e-12)
    assert abs(res.E2) < 1e-12 and abs(res.E3) < 1e-12
    assert np.max(np.abs(res.psi1)) < 1e-10


def test_scaled_coulomb_is_exact():
    # H0 + g W with W = -alpha/r is Coulomb with strength alpha (1 + g):
    # E(g) = E0 (1 + g)^2, so E1 = 2 E0, E2 = E0, E3 = 0
    h0, psi0 = _coulomb_state()
    res = dl_corrections(h0, psi0, lambda r: -ALPHA / r, order=3)
    E0 = coulomb_energy_closed_form(M_C, ALPHA, 1)
    assert res.E1 == pytest.approx(2 * E0, rel=GRID_RTOL)
    assert res.E2 == pytest.approx(E0, rel=GRID_RTOL)
    assert abs(res.E3) < GRID_RTOL * abs(E0)


def _kinetic_series(points):
    # H0 + g T: Coulomb levels scale as 1/c, so E(g) = E0 / (1 + g)
    h0, psi0 = _coulomb_state(points=points)
    res = dl_corrections(h0, psi0, lambda r: np.zeros_like(r), order=3, kinetic=1.0)
    return np.array([res.E1, res.E2, res.E3])


def test_kinetic_rescaling_to_third_order():
    E0 = coulomb_energy_closed_form(M_C, ALPHA, 1)
    assert _kinetic_series(DL_POINTS) == pytest.approx([-E0, E0, -E0], rel=GRID_RTOL)


def test_dl_grid_convergence():
    E0 = coulomb_energy_closed_form(M_C, ALPHA, 1)
    exact = np.array([-E0, E0, -E0])
    coarse = np.abs(_kinetic_series(DL_POINTS // 2) / exact - 1)
    fine = np.abs(_kinetic_series(DL_POINTS) / exact - 1)
    assert np.all((coarse / fine > 3.8) & (coarse / fine < 4.2))


def test_dl_input_checks():
    h0, psi0 = _coulomb_state()
    with pytest.raises(ValueError):
        dl_corrections(h0, psi0, lambda r: r, order=4)
    with pytest.raises(ValueError):
        dl_corrections(RadialProblem(1.0, 1.0), psi0, lambda r: r)
    cusped = solve_bound_state(h0, 1)
    with pytest.raises(ValueError):
        dl_corrections(h0, cusped, lambda r: r)


def test_method_validation():
    with pytest.raises(ValueError):
        universal_constants(1, 2, "sum-over-states")
    with pytest.raises(ValueError):
        universal_constants(0)
    with pytest.raises(ValueError):
        rescale(universal_constants(1), M_C, -0.1, LAM)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bound_states_route(n):
    bs = beta_expansion(M_C, ALPHA, LAM, n, 3, "bound-states")
    dl = beta_expansion(M_C, ALPHA, LAM, n, 3, "dalgarno-lewis")
    # first order and the whole large side do not involve intermediate states of H_C
    assert bs.small.coeffs[:2] == pytest.approx(dl.small.coeffs[:2], rel=1e-12)
    assert bs.large.coeffs == pytest.approx(dl.large.coeffs, rel=1e-12)
    # the continuum pushes second order down: leaving it out gives a higher c_2
    assert dl.small.coeffs[2] < bs.small.coeffs[2] < 0


@pytest.mark.parametrize("m", [1.521, 5.046])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_sign_pattern(m, n):
    for alpha, lam in [(0.4984, 0.1771), (0.35, 0.25), (0.6, 0.12)]:
        pair = beta_expansion(m, alpha, lam, n, 1)
        assert pair.small.coeffs[1] > 0
        if n == 1:
            assert pair.large.coeffs[1] < 0


def test_large_side_first_order_against_oracle():
    # E(beta) - e_0 beta -> e_1 + e_2/beta; extrapolate in 1/beta
    from padeinterp.accel import richardson

    e = large_beta_coeffs(M_C, ALPHA, LAM, 1, 1).coeffs
    betas = (1e3, 2e3, 4e3)
    vals = []
    for b in betas:
        E = solve_bound_state(RadialProblem((1 + b) / (2 * M_C), ALPHA, b * LAM), 1).energy
        vals.append(E - e[0] * b)
    assert richardson(vals, [1 / b for b in betas], order=1) == pytest.approx(e[1], rel=1e-5)


def test_caching_returns_same_object():
    assert universal_constants(1, 3) is universal_constants(1, 3) or (
        universal_constants(1, 3) == universal_constants(1, 3)
    )
    assert universal_constants(2, 1).small == universal_constants(2, 3).small[:2]
