import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from weilzeta.context import NumContext
from weilzeta.numkernel import integrate
from weilzeta.prolate import (
    ProlateError,
    _sph_bessel_upto,
    _sph_bessel_upto_f64,
    chi,
    chi_f64,
    nu,
    nu_f64,
    phi_fn,
    prolate_coeffs_f64,
    prolate_fn,
)

CTX = NumContext(digits=40, quad_order=40, trunc_N=16)

# chi values as printed in the source tables (20 significant digits); a
# spot-check subset here, the full six-table comparison lives in acceptance
CHI_SPOT = [
    ("5.5", 5, "0.99999999999647719857"),
    ("5.5", 10, "0.95065832620623051607"),
    ("5.5", 12, "0.139174533954574303539"),
    ("6.5", 12, "0.94788066237037484836"),
    ("8.5", 17, "0.58041289343441020661"),
    ("10.5", 22, "0.16939519615152177689"),
]


# -- spherical Bessel oracle -------------------------------------------------

def test_miller_bessel_matches_mpmath():
    with CTX.precision():
        for zs in ("0.001", "1.0", "12.5", "34.5575", "103.7"):
            z = mp.mpf(zs)
            js = _sph_bessel_upto(60, z)
            for l in (0, 1, 7, 30, 60):
                ref = mp.besselj(l + mp.mpf(1) / 2, z) * mp.sqrt(
                    mp.pi / (2 * z))
                assert abs(js[l] - ref) < mp.mpf(10) ** -42, (zs, l)


def test_miller_bessel_f64_matches_mp():
    with CTX.precision():
        ref = _sph_bessel_upto(160, mp.mpf("40.84"))
    got = _sph_bessel_upto_f64(160, 40.84)
    assert max(abs(got[l] - float(ref[l])) for l in range(161)) < 1e-14


# -- eigenfunction correctness -----------------------------------------------

def test_prolate_satisfies_differential_equation():
    # independent oracle: finite differences of the built function must
    # satisfy -((1-eta^2) psi')' + c^2 eta^2 psi = helm_eig * psi
    with CTX.precision(20):
        fn = prolate_fn(mp.mpf("5.5"), 3, CTX)
        c2 = fn.c ** 2
        h = mp.mpf(10) ** -9
        for etas in ("0.13", "0.52", "0.87"):
            eta = mp.mpf(etas)
            f = [fn.eval_eta(eta + k * h) for k in (-2, -1, 0, 1, 2)]
            d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
            d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) \
                / (12 * h * h)
            lhs = -((1 - eta * eta) * d2 - 2 * eta * d1) \
                + c2 * eta * eta * f[2]
            assert abs(lhs - fn.helm_eig * f[2]) < mp.mpf(10) ** -15, etas


def test_prolate_unit_norm_and_orthogonality():
    with CTX.precision():
        mu = mp.mpf("5.5")
        lam = mp.sqrt(mu)
        f3 = prolate_fn(mu, 3, CTX)
        f5 = prolate_fn(mu, 5, CTX)
        nrm = integrate(lambda x: f3(x) ** 2, -lam, lam, CTX,
                        initial_panels=8, tol=mp.mpf(10) ** -30)
        assert abs(nrm - 1) < mp.mpf(10) ** -25
        dot = integrate(lambda x: f3(x) * f5(x), -lam, lam, CTX,
                        initial_panels=8, tol=mp.mpf(10) ** -25)
        assert abs(dot) < mp.mpf(10) ** -24


def test_prolate_even_and_zero_outside():
    with CTX.precision():
        fn = prolate_fn(mp.mpf("5.5"), 4, CTX)
        x = mp.mpf("1.3")
        assert fn(x) == fn(-x)
        assert fn(fn.lam + 1) == 0
        assert fn.at0() != 0


def test_prolate_helmholtz_eigs_increasing():
    with CTX.precision():
        eigs = [prolate_fn(mp.mpf("6.5"), m, CTX).helm_eig for m in range(6)]
        assert all(eigs[i] < eigs[i + 1] for i in range(5))


# -- characteristic values ---------------------------------------------------

def test_chi_spot_table():
    with CTX.precision():
        for mus, m, ref in CHI_SPOT:
            got = chi(mp.mpf(mus), m, CTX)
            assert abs(got - mp.mpf(ref)) < mp.mpf(10) ** -18, (mus, m)


def test_chi_decreasing_near_band_edge():
    with CTX.precision():
        mu = mp.mpf("5.5")
        vals = [chi(mu, m, CTX) for m in (9, 10, 11, 12)]
        assert all(vals[i] > vals[i + 1] for i in range(3))
        assert all(0 < v < 1 for v in vals)


def test_chi_precision_consistency():
    # same value from two different working precisions (truncation K differs)
    lo = NumContext(digits=40, quad_order=40, trunc_N=16)
    hi = NumContext(digits=60, quad_order=40, trunc_N=16)
    with hi.precision():
        a = chi(mp.mpf("7.5"), 14, lo)
        b = chi(mp.mpf("7.5"), 14, hi)
        assert abs(a - b) < mp.mpf(10) ** -35


def test_nu_values():
    assert nu(mp.mpf("5.5"), CTX) == 10
    assert nu(mp.mpf("10.5"), CTX) == 20


# -- phi combinations --------------------------------------------------------

def test_phi_vanishes_at_zero_and_is_combination():
    with CTX.precision():
        mu = mp.mpf("5.5")
        for n in (2, 3, 7):
            ph = phi_fn(mu, n, CTX)
            assert abs(ph(mp.mpf(0))) < mp.mpf(10) ** -38
            x = mp.mpf("0.77")
            pn = prolate_fn(mu, n, CTX)
            pp = prolate_fn(mu, n % 2, CTX)
            direct = pp.at0() * pn(x) - pn.at0() * pp(x)
            assert abs(ph(x) - direct) < mp.mpf(10) ** -38


def test_phi_rejects_low_index():
    with pytest.raises(ValueError):
        phi_fn(mp.mpf("5.5"), 1, CTX)


# -- f64 lane ----------------------------------------------------------------

def test_f64_coeffs_match_mp():
    with CTX.precision():
        fn = prolate_fn(mp.mpf("6.5"), 8, CTX)
        cf, eig = prolate_coeffs_f64(6.5, 8)
        n = min(len(cf), len(fn.coeffs))
        err = max(abs(cf[k] - float(fn.coeffs[k])) for k in range(n))
        assert err < 1e-11
        assert abs(eig - float(fn.helm_eig)) < 1e-8 * abs(eig)


def test_f64_chi_and_nu_match_mp():
    with CTX.precision():
        a = chi(mp.mpf("7.5"), 15, CTX)
    assert abs(chi_f64(7.5, 15) - float(a)) < 1e-9
    assert nu_f64(5.5) == 10
    assert nu_f64(6.5) == 12
    assert nu_f64(10.5) == 20


@settings(max_examples=10, deadline=None)
@given(st.floats(4.6, 13.9))
def test_f64_band_count_tracks_two_mu(mu):
    v = nu_f64(mu)
    assert abs(v - (2 * mu - 1)) <= 3.0
    # the edge is sharp: chi just past the band is well below the threshold
    assert chi_f64(mu, v + 2) < 0.75
