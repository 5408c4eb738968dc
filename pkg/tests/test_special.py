import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from weilzeta.context import NumContext
from weilzeta.special import (
    polygamma,
    primes_upto,
    theta_deriv,
    theta_deriv_asymptotic,
    von_mangoldt_range,
    zeta_critical,
)

CTX = NumContext(digits=60, quad_order=40, trunc_N=16)


# -- polygamma ---------------------------------------------------------------

def test_polygamma_matches_mpmath():
    # covers both branches: |z| already large, and recurrence-lifted small z
    with CTX.precision():
        pts = [mp.mpc("0.25", "7.0"),     # on the critical strip line used here
               mp.mpc("0.25", "0.5"),     # small, needs lifting
               mp.mpc("3.5", "-2.0"),
               mp.mpf("1.0"),
               mp.mpf("42.5")]
        for m in (0, 1, 2, 3, 5):
            for z in pts:
                mine = polygamma(m, z)
                ref = mp.digamma(z) if m == 0 else mp.polygamma(m, z)
                err = abs(mine - ref) / max(1, abs(ref))
                assert err < mp.mpf(10) ** -62, (m, z)


def test_polygamma_rejects_negative_order():
    with pytest.raises(ValueError):
        polygamma(-1, mp.mpf(2))


# -- Riemann-Siegel theta derivative -----------------------------------------

def test_theta_deriv_matches_siegeltheta():
    # mpmath's siegeltheta is an independent implementation; differentiate it
    with CTX.precision(20):
        for t in (mp.mpf(5), mp.mpf(14), mp.mpf("33.3"), mp.mpf(200)):
            h = mp.mpf(10) ** -20
            fd = (mp.siegeltheta(t + h) - mp.siegeltheta(t - h)) / (2 * h)
            assert abs(theta_deriv(t, CTX) - fd) < mp.mpf(10) ** -35


def test_theta_deriv_even_in_t():
    with CTX.precision():
        t = mp.mpf("17.25")
        assert abs(theta_deriv(t, CTX) - theta_deriv(-t, CTX)) \
            < mp.mpf(10) ** -55


def test_theta_deriv_higher_orders():
    with CTX.precision(20):
        t = mp.mpf(21)
        h = mp.mpf(10) ** -20
        for order in (1, 2, 3):
            fd = (theta_deriv(t + h, CTX, order=order - 1)
                  - theta_deriv(t - h, CTX, order=order - 1)) / (2 * h)
            assert abs(theta_deriv(t, CTX, order=order) - fd) \
                < mp.mpf(10) ** -32, order


def test_theta_deriv_asymptotic_tail():
    # next omitted term is O(t^-4), so agreement ~1e-12 at t=200
    with CTX.precision():
        t = mp.mpf(200)
        d = abs(theta_deriv(t, CTX) - theta_deriv_asymptotic(t, CTX))
        assert d < mp.mpf(10) ** -11
        assert d > 0


# -- zeta on the critical line -----------------------------------------------

def test_zeta_critical_matches_mpmath():
    with CTX.precision(20):
        for s in (mp.mpf(0), mp.mpf(2), mp.mpf("14.1347251417346937904572519835625"),
                  mp.mpf("25.0"), mp.mpf("100.5"), mp.mpf("-33.25")):
            mine = zeta_critical(s, CTX)
            ref = mp.zeta(mp.mpc(mp.mpf(1) / 2, s))
            assert abs(mine - ref) < mp.mpf(10) ** -55, s


def test_zeta_critical_first_zero():
    # |zeta(1/2 + i s)| is tiny near the first zero ordinate
    with CTX.precision():
        s = mp.mpf("14.134725141734693790457251983562470270784257115699")
        assert abs(zeta_critical(s, CTX)) < mp.mpf(10) ** -45


def test_zeta_critical_conjugate_symmetry():
    with CTX.precision():
        s = mp.mpf("7.125")
        a = zeta_critical(s, CTX)
        b = zeta_critical(-s, CTX)
        assert abs(a - mp.conj(b)) < mp.mpf(10) ** -55


# -- primes and von Mangoldt -------------------------------------------------

def test_primes_upto_small():
    assert primes_upto(1) == []
    assert primes_upto(2) == [2]
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def _is_prime_power(n):
    """(p, k) if n = p^k, else None; trial division, independent of the sieve."""
    for p in range(2, n + 1):
        if p * p > n and n > 1:
            return (n, 1)  # n itself prime
        if n % p == 0:
            k = 0
            m = n
            while m % p == 0:
                m //= p
                k += 1
            return (p, k) if m == 1 else None
    return None


def test_von_mangoldt_versus_enumeration():
    with CTX.precision():
        vm = von_mangoldt_range(100, CTX)
        expect = {}
        for n in range(2, 101):
            hit = _is_prime_power(n)
            if hit is not None:
                expect[n] = hit[0]
        assert set(vm) == set(expect)
        # 25 primes, squares 4/9/25/49, cubes 8/27, then 16, 81, 32, 64
        assert len(vm) == 35
        for n, p in expect.items():
            assert abs(vm[n] - mp.log(p)) < mp.mpf(10) ** -60


def test_von_mangoldt_boundary_inclusive():
    with CTX.precision():
        vm = von_mangoldt_range(8, CTX)
        assert 8 in vm and abs(vm[8] - mp.log(2)) < mp.mpf(10) ** -60
        assert set(vm) == {2, 3, 4, 5, 7, 8}
        # non-integer cutoff truncates down
        vm2 = von_mangoldt_range(mp.mpf("8.9"), CTX)
        assert set(vm2) == set(vm)


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 400))
def test_von_mangoldt_keys_are_prime_powers(x):
    ctx = NumContext(digits=30, quad_order=16, trunc_N=8)
    vm = von_mangoldt_range(x, ctx)
    for n in vm:
        assert n <= x
        assert _is_prime_power(n) is not None
    # every prime <= x must be present
    for p in primes_upto(x):
        assert p in vm
