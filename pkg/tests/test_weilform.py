import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from weilzeta.context import NumContext
from weilzeta.numkernel import gauss_legendre, integrate
from weilzeta.special import theta_deriv
from weilzeta.weilform import (
    WhichTerms,
    arch_constant,
    assemble_sigma,
    assemble_sigma_f64,
    clear_arch_cache,
    positivity_scan,
    theta_sym,
    theta_sym_f64,
    w02_term,
    w_archimedean,
    w_primes,
)

CTX = NumContext(digits=40, quad_order=40)

EVEN_PAIRS = [(0, 0), (0, 2), (1, 1), (2, 3)]
ODD_PAIRS = [(-1, -1), (-1, -3), (-2, -2)]


def _xi(n, L):
    # basis function on [-L/2, L/2]
    rt = mp.sqrt(2 / L)
    if n == 0:
        return lambda x: 1 / mp.sqrt(L)
    if n > 0:
        return lambda x: (-1) ** n * rt * mp.cos(2 * mp.pi * n * x / L)
    a = -n
    return lambda x: (-1) ** a * rt * mp.sin(2 * mp.pi * a * x / L)


def _theta_oracle(n, m, L, y, ctx):
    # numerical symmetrized cross-correlation over the overlap window
    fn, fm = _xi(n, L), _xi(m, L)
    lo, hi = y - L / 2, L / 2
    g1 = lambda x: fn(x) * fm(x - y)
    g2 = lambda x: fm(x) * fn(x - y)
    return (integrate(g1, lo, hi, ctx, initial_panels=4)
            + integrate(g2, lo, hi, ctx, initial_panels=4)) / 2


# -- closed-form convolution table -------------------------------------------

def test_theta_sym_diagonal_is_one_at_zero():
    with CTX.precision():
        L = mp.log(3)
        for n in (0, 1, 4, -1, -3):
            assert abs(theta_sym(n, n, L, 0) - 1) < mp.mpf(10) ** -45


def test_theta_sym_constant_pair_is_linear():
    with CTX.precision():
        L = mp.log(2)
        for ys in ("0", "0.2", "0.55"):
            y = mp.mpf(ys)
            assert abs(theta_sym(0, 0, L, y) - (L - y) / L) < mp.mpf(10) ** -45


def test_theta_sym_vanishes_at_support_edge():
    with CTX.precision():
        L = mp.log(5)
        for n, m in EVEN_PAIRS + ODD_PAIRS:
            assert abs(theta_sym(n, m, L, L)) < mp.mpf(10) ** -44


def test_theta_sym_matches_convolution_oracle():
    with CTX.precision(15):
        L = mp.log(5)
        for n, m in EVEN_PAIRS + ODD_PAIRS:
            for ys in ("0.3", "1.1"):
                y = mp.mpf(ys)
                got = theta_sym(n, m, L, y)
                ref = _theta_oracle(n, m, L, y, CTX)
                assert abs(got - ref) < mp.mpf(10) ** -30, (n, m, ys)


def test_theta_sym_mixed_parity_raises():
    with CTX.precision():
        for n, m in ((1, -1), (0, -2), (-3, 2)):
            with pytest.raises(ValueError, match="identically zero pair"):
                theta_sym(n, m, mp.log(2), 0)


def test_theta_sym_offset_clamps_and_raises():
    with CTX.precision():
        L = mp.log(2)
        # a hair past the edge clamps to the edge value
        assert abs(theta_sym(1, 1, L, L * (1 + mp.mpf(10) ** -13))) \
            < mp.mpf(10) ** -40
        with pytest.raises(ValueError, match="outside support"):
            theta_sym(1, 1, L, L * mp.mpf("1.01"))


@settings(max_examples=40, deadline=None)
@given(st.integers(-4, 4), st.integers(-4, 4),
       st.floats(-0.99, 0.99))
def test_theta_sym_symmetric_and_even(n, m, frac):
    if (n >= 0) != (m >= 0):
        return
    with CTX.precision():
        L = mp.log(4)
        y = frac * L
        a = theta_sym(n, m, L, y)
        assert a == theta_sym(m, n, L, y)
        assert abs(a - theta_sym(n, m, L, -y)) < mp.mpf(10) ** -45
        assert abs(a) < 2


# -- rank-one weight term ----------------------------------------------------

def test_w02_matches_pairing_oracle():
    # oracle: integral of the pair function against the multiplicative
    # weight, int_0^L 2*T(t) * 2*cosh(t/2) dt
    with CTX.precision(15):
        L = mp.log(3)
        for n, m in EVEN_PAIRS + ODD_PAIRS + [(0, 1), (1, 2), (-1, -2)]:
            f = lambda t: 2 * theta_sym(n, m, L, t) * 2 * mp.cosh(t / 2)
            ref = integrate(f, mp.mpf(0), L, CTX, initial_panels=4)
            assert abs(w02_term(n, m, L) - ref) < mp.mpf(10) ** -30, (n, m)


def test_w02_odd_block_closed_form():
    # the odd block admits an elementary closed form; must match exactly
    with CTX.precision():
        L = mp.log(7)
        for n, m in ODD_PAIRS:
            a, b = abs(n), abs(m)
            ref = (-256 * mp.pi ** 2 * a * b * L
                   * mp.e ** (-L / 2) * (mp.e ** (L / 2) - 1) ** 2
                   / ((L * L + 16 * mp.pi ** 2 * a * a)
                      * (L * L + 16 * mp.pi ** 2 * b * b)))
            assert abs(w02_term(n, m, L) - ref) < mp.mpf(10) ** -42


def test_w02_block_signs():
    with CTX.precision():
        L = mp.log(2)
        assert w02_term(0, 0, L) > 0
        assert w02_term(3, 3, L) > 0
        assert w02_term(-1, -1, L) < 0
        assert w02_term(-4, -4, L) < 0


def test_w02_mixed_parity_raises():
    with pytest.raises(ValueError, match="identically zero pair"):
        w02_term(2, -2, mp.log(2))


@settings(max_examples=30, deadline=None)
@given(st.integers(-5, 5), st.integers(-5, 5))
def test_w02_rank_one_identity(n, m):
    if (n >= 0) != (m >= 0):
        return
    with CTX.precision():
        L = mp.log(3)
        lhs = w02_term(n, m, L) ** 2
        rhs = w02_term(n, n, L) * w02_term(m, m, L)
        assert abs(lhs - rhs) <= mp.mpf(10) ** -40 * abs(rhs)


# -- archimedean term --------------------------------------------------------

def test_arch_constant_value_at_log2():
    with CTX.precision():
        c = arch_constant(mp.log(2))
        assert abs(c - mp.mpf("2.00963")) < mp.mpf(10) ** -5
        assert abs(c - (mp.euler + mp.log(4 * mp.pi / 3))) < mp.mpf(10) ** -38


def test_arch_diverges_for_small_interval():
    with CTX.precision():
        assert arch_constant(mp.mpf(10) ** -8) < -15
        assert w_archimedean(0, 0, mp.mpf("0.01"), CTX) < -3


def test_arch_series_branch_agrees_with_direct_form():
    # both integrand branches around the switch point, at working precision
    from weilzeta.weilform import _arch_series, _horner
    with mp.workdps(70):
        L = mp.log(2)
        for kind, k in (("V1", 0), ("V1", 7), ("V2", 7), ("V2", 31)):
            terms = max(24, int(0.35 * mp.dps) + 8)
            ser = _arch_series(kind, k, L, terms, mp.mpf(1))
            w = 2 * mp.pi * k / L
            for xs in ("0.0009", "0.0011", "0.0005"):
                x = mp.mpf(xs)
                sval = _horner(ser, x)
                if kind == "V2":
                    dval = mp.e ** (x / 2) * mp.sin(w * x) / (2 * mp.sinh(x))
                else:
                    dval = (2 * mp.e ** (x / 2) * (1 - x / L)
                            * mp.cos(w * x) - 2) / (2 * mp.sinh(x))
                assert abs(sval - dval) < mp.mpf(10) ** -45, (kind, k, xs)


def _w_arch_naive(n, m, L, dps):
    # independent route: single quadrature of the defining integral with the
    # value-at-zero subtraction, no base-integral splitting
    with mp.workdps(dps):
        L = mp.mpf(L)
        t0 = theta_sym(n, m, L, 0)
        const = t0 * arch_constant(L)
        f = lambda x: (mp.e ** (x / 2) * 2 * theta_sym(n, m, L, x)
                       - 2 * t0) / (mp.e ** x - mp.e ** -x)
        ctx = NumContext(digits=dps - 10, quad_order=48)
        return const + integrate(f, mp.mpf(0), L, ctx, initial_panels=6)


def test_arch_matches_naive_quadrature():
    with CTX.precision():
        L = mp.log(2)
        for n, m in EVEN_PAIRS + ODD_PAIRS:
            got = w_archimedean(n, m, L, CTX)
            ref = _w_arch_naive(n, m, L, 60)
            assert abs(got - ref) < mp.mpf(10) ** -32, (n, m)


def test_arch_cache_determinism():
    with CTX.precision():
        L = mp.log(3)
        a = w_archimedean(2, 2, L, CTX)
        b = w_archimedean(2, 2, L, CTX)
        assert a == b
        clear_arch_cache()
        c = w_archimedean(2, 2, L, CTX)
        assert a == c


def test_arch_mixed_parity_raises():
    with pytest.raises(ValueError, match="identically zero pair"):
        w_archimedean(1, -1, mp.log(2), CTX)


# -- archimedean spectral two-path check -------------------------------------
#
# Independent route: the archimedean term equals -(1/pi) times the integral
# over [0, inf) of the pair transform against the phase derivative of the
# completed zeta line density.  The transform is a squared sinc comb times an
# exact rational function; the integral is done on resonance-aligned panels
# to T = 2 pi K / L plus an analytic tail (exponential substitution for the
# smooth half, repeated integration by parts for the oscillatory half).

def _rho_terms(n, m, L):
    # exact partial fractions of the transform product: terms (c, pole, expo)
    w = lambda k: 2 * mp.pi * k / L
    if n == 0 and m == 0:
        return [(mp.mpf(2), mp.mpf(0), 2)]
    if n >= 0 and m >= 0 and (n == 0 or m == 0):
        wb = w(max(n, m))
        c = mp.sqrt(2) / wb
        return [(c, wb, 1), (-c, -wb, 1)]
    if n > 0 and m > 0:
        if n == m:
            wn = w(n)
            return [(1 / wn, wn, 1), (mp.mpf(1), wn, 2),
                    (-1 / wn, -wn, 1), (mp.mpf(1), -wn, 2)]
        wn, wm = w(n), w(m)
        cn = 2 * wn / (wn ** 2 - wm ** 2)
        cm = 2 * wm / (wm ** 2 - wn ** 2)
        return [(cn, wn, 1), (-cn, -wn, 1), (cm, wm, 1), (-cm, -wm, 1)]
    a, b = abs(n), abs(m)
    wa, wb = w(a), w(b)
    if a == b:
        return [(-1 / wa, wa, 1), (mp.mpf(1), wa, 2),
                (1 / wa, -wa, 1), (mp.mpf(1), -wa, 2)]
    ca = 2 * wb / (wa ** 2 - wb ** 2)
    cb = -2 * wa / (wa ** 2 - wb ** 2)
    return [(ca, wa, 1), (-ca, -wa, 1), (cb, wb, 1), (-cb, -wb, 1)]


def _rho_eval(terms, t):
    return mp.fsum(c * (t - p) ** (-e) for c, p, e in terms)


def _rho_deriv(terms, t, d):
    acc = mp.mpf(0)
    for c, p, e in terms:
        r = mp.mpf(1)
        for i in range(d):
            r *= (e + i)
        acc += c * (-1) ** d * r * (t - p) ** (-e - d)
    return acc


def _spectral_arch(pairs, L, ctx, K=160, order=48, R=8, vmax=70, npan=10):
    with ctx.precision(15):
        L = mp.mpf(L)
        h = 2 * mp.pi / L
        T = K * h
        nodes, weights = gauss_legendre(order, mp.dps)
        tvals = [j * h + (x + 1) * h / 2 for j in range(K) for x in nodes]
        thetap = [theta_deriv(t, ctx) for t in tvals]
        hv = mp.mpf(vmax) / npan
        vnodes = [j * hv + (x + 1) * hv / 2 for j in range(npan)
                  for x in nodes]
        tail_t = [T * mp.e ** v for v in vnodes]
        tail_thetap = [theta_deriv(t, ctx) for t in tail_t]
        s = mp.sin(T * L)
        cs = mp.cos(T * L)
        thd = [theta_deriv(T, ctx, order=i) for i in range(2 * R + 1)]
        out = {}
        for (n, m) in pairs:
            terms = _rho_terms(n, m, L)
            idx = 0
            main = mp.mpf(0)
            for j in range(K):
                acc = mp.mpf(0)
                for w8 in weights:
                    t = tvals[idx]
                    acc += (w8 * mp.sin(t * L / 2) ** 2
                            * _rho_eval(terms, t) * thetap[idx])
                    idx += 1
                main += acc * h / 2
            main *= 4 / L
            idx = 0
            sm = mp.mpf(0)
            for j in range(npan):
                acc = mp.mpf(0)
                for w8 in weights:
                    t = tail_t[idx]
                    acc += (w8 * _rho_eval(terms, t) * tail_thetap[idx] * t)
                    idx += 1
                sm += acc * hv / 2
            sm *= 2 / L

            def gderiv(j):
                return mp.fsum(mp.binomial(j, i)
                               * _rho_deriv(terms, T, j - i) * thd[i]
                               for i in range(j + 1))
            ibp = mp.mpf(0)
            fac = mp.mpf(1)
            for r in range(R):
                ibp += fac * (-gderiv(2 * r) * s / L
                              - gderiv(2 * r + 1) * cs / L ** 2)
                fac *= -1 / L ** 2
            osc = -(2 / L) * ibp
            out[(n, m)] = -(main + sm + osc) / mp.pi
        return out


def test_arch_spectral_two_path_agreement():
    # the headline cross-check: direct quadrature route vs spectral route,
    # entrywise to 10^(-digits+30) on the full 5x5 even block plus odd pairs
    ctx = NumContext(digits=50, quad_order=48)
    pairs = ([(n, m) for n in range(5) for m in range(n, 5)]
             + [(-1, -1), (-1, -2), (-2, -2), (-3, -5)])
    with ctx.precision():
        L = mp.log(5)
        spec = _spectral_arch(pairs, L, ctx)
        tol = mp.mpf(10) ** (-ctx.digits + 30)
        for (n, m) in pairs:
            direct = w_archimedean(n, m, L, ctx)
            assert abs(direct - spec[(n, m)]) < tol, (n, m)


# -- prime-power term --------------------------------------------------------

def test_primes_empty_below_first_prime():
    with CTX.precision():
        for n, m in ((0, 0), (1, 2), (-1, -1)):
            assert w_primes(n, m, mp.mpf("0.5"), ctx=CTX) == 0


def test_primes_single_term_window():
    # log 2 <= L < log 3: only q = 2 contributes
    with CTX.precision():
        L = mp.log("2.5")
        got = w_primes(1, 1, L, ctx=CTX)
        ref = 2 * theta_sym(1, 1, L, mp.log(2)) * mp.log(2) / mp.sqrt(2)
        assert abs(got - ref) < mp.mpf(10) ** -40
        # the real-p stand-in at p = 2 reproduces the same single term
        sub = w_primes(1, 1, L, p_real=2, ctx=CTX)
        assert abs(got - sub) < mp.mpf(10) ** -40


def test_primes_boundary_power_contributes_nothing():
    # at L = log 4 the power q = 4 sits on the edge where the pair function
    # vanishes, so excluding it changes nothing
    with CTX.precision():
        L = mp.log(4)
        a = w_primes(1, 1, L, ctx=CTX)
        b = w_primes(1, 1, L, exclude=(4,), ctx=CTX)
        assert abs(a - b) < mp.mpf(10) ** -42


def test_primes_exclusion_drops_named_power():
    with CTX.precision():
        L = mp.log(5)
        full = w_primes(2, 2, L, ctx=CTX)
        cut = w_primes(2, 2, L, exclude=(4,), ctx=CTX)
        term4 = 2 * theta_sym(2, 2, L, mp.log(4)) * mp.log(2) / 2
        assert abs((full - cut) - term4) < mp.mpf(10) ** -40


def test_primes_real_p_validation():
    with CTX.precision():
        with pytest.raises(ValueError, match="p_real"):
            w_primes(0, 0, mp.log(2), p_real=1, ctx=CTX)
        # beyond the support the stand-in contributes nothing
        assert w_primes(0, 0, mp.log(2), p_real=3, ctx=CTX) == 0


def test_primes_mixed_parity_raises():
    with pytest.raises(ValueError, match="identically zero pair"):
        w_primes(0, -1, mp.log(3), ctx=CTX)


# -- assembly ----------------------------------------------------------------

def test_assemble_entries_match_term_functions():
    with CTX.precision():
        mu = mp.mpf("2.5")
        L = mp.log(mu)
        W = assemble_sigma(mu, 4, "full", CTX)
        want_plus = (w02_term(2, 1, L) - w_archimedean(2, 1, L, CTX)
                     - w_primes(2, 1, L, ctx=CTX))
        assert abs(W.sigma_plus.get(2, 1) - want_plus) < mp.mpf(10) ** -40
        want_minus = (w02_term(-3, -1, L) - w_archimedean(-3, -1, L, CTX)
                      - w_primes(-3, -1, L, ctx=CTX))
        assert abs(W.sigma_minus.get(2, 0) - want_minus) < mp.mpf(10) ** -40


def test_assemble_landmark_archimedean_mu2():
    # smallest even-block eigenvalue without primes at mu = 2 is ~0.00133
    W = assemble_sigma(2, 24, "archimedean", CTX)
    ep, em = W.smallest_eigenvalues(CTX)
    with CTX.precision():
        assert mp.mpf("0.00130") < ep < mp.mpf("0.00137")
        assert em > 0


def test_assemble_landmark_full_mu3():
    # with primes the mu = 3 even block is barely positive: 0 < min < 6e-8
    W = assemble_sigma(3, 32, "full", CTX)
    ep, em = W.smallest_eigenvalues(CTX)
    with CTX.precision():
        assert 0 < ep < mp.mpf("6e-8")
        assert em > 0


def test_assemble_min_eig_monotone_in_truncation():
    # growing the basis can only lower the smallest eigenvalue
    with CTX.precision():
        prev = None
        for N in (8, 12, 16):
            ep, _ = assemble_sigma(2, N, "archimedean",
                                   CTX).smallest_eigenvalues(CTX)
            if prev is not None:
                assert ep <= prev + mp.mpf(10) ** -30
            prev = ep


def test_assemble_mode_additivity():
    # full = (weight - archimedean) + (- primes), entrywise
    with CTX.precision():
        mu = mp.mpf(3)
        full = assemble_sigma(mu, 5, "full", CTX)
        arch = assemble_sigma(mu, 5, "archimedean", CTX)
        prim = assemble_sigma(mu, 5, "primes", CTX)
        for i in range(6):
            for j in range(i + 1):
                s = arch.sigma_plus.get(i, j) + prim.sigma_plus.get(i, j)
                assert abs(full.sigma_plus.get(i, j) - s) < mp.mpf(10) ** -40
        for i in range(5):
            for j in range(i + 1):
                s = arch.sigma_minus.get(i, j) + prim.sigma_minus.get(i, j)
                assert abs(full.sigma_minus.get(i, j) - s) < mp.mpf(10) ** -40


def test_assemble_validation():
    with pytest.raises(ValueError, match="N must be"):
        assemble_sigma(2, 0, "full", CTX)
    with pytest.raises(ValueError, match="exceeds context"):
        assemble_sigma(2, CTX.trunc_N + 1, "full", CTX)
    with pytest.raises(ValueError, match="mu must exceed 1"):
        assemble_sigma(1, 4, "full", CTX)
    with pytest.raises(ValueError, match="unknown mode"):
        assemble_sigma(2, 4, "fulll", CTX)


def test_assemble_block_shapes_and_mode():
    W = assemble_sigma(2, 6, "archimedean", CTX)
    assert W.sigma_plus.n == 7
    assert W.sigma_minus.n == 6
    assert W.trunc_N == 6
    assert isinstance(W.mode, WhichTerms)
    assert not W.mode.primes


def test_assemble_f64_matches_mp():
    p64, m64 = assemble_sigma_f64(2.2, 10, "full")
    W = assemble_sigma(mp.mpf("2.2"), 10, "full", CTX)
    pm = np.array([[float(W.sigma_plus.get(i, j)) for j in range(11)]
                   for i in range(11)])
    mm = np.array([[float(W.sigma_minus.get(i, j)) for j in range(10)]
                   for i in range(10)])
    assert np.abs(p64 - pm).max() < 5e-13
    assert np.abs(m64 - mm).max() < 5e-13


def test_theta_sym_f64_matches_mp():
    with CTX.precision():
        L = mp.log(3)
        for n, m in EVEN_PAIRS + ODD_PAIRS:
            for ys in ("0.0", "0.4", "1.0"):
                a = theta_sym_f64(n, m, float(L), float(ys))
                b = float(theta_sym(n, m, L, mp.mpf(ys)))
                assert abs(a - b) < 1e-14


# -- positivity scans --------------------------------------------------------

def test_scan_archimedean_sign_change_window():
    # without primes the even block loses positivity between mu = 2 e^-0.2
    # and mu = 2 e^0.2
    lo = math.exp(math.log(2) - 0.2)
    hi = math.exp(math.log(2) + 0.2)
    rows = positivity_scan([lo, hi], 8, "archimedean", CTX)
    assert rows[0][1] > 0
    assert rows[1][1] < 0


def test_scan_full_mode_stays_positive():
    rows = positivity_scan([2, mp.mpf("2.2"), 3], 8, "full", CTX)
    for mu, ep, em in rows:
        assert ep > 0, mu
        assert em > 0, mu


def test_scan_prime_edge_matches_archimedean():
    # at mu = 2 the only prime power sits on the support edge, so the full
    # and primeless forms coincide
    a = positivity_scan([2], 8, "full", CTX)[0]
    b = positivity_scan([2], 8, "archimedean", CTX)[0]
    with CTX.precision():
        assert abs(a[1] - b[1]) < mp.mpf(10) ** -38


def test_scan_real_p_pinches_at_two():
    # replacing the prime by a real p: positivity survives only in a tiny
    # window around p = 2 (checked at mu = 3)
    with CTX.precision():
        outcomes = {}
        for p in ("1.9999", "2", "2.0005"):
            mode = WhichTerms(p_real=mp.mpf(p))
            W = assemble_sigma(3, 12, mode, CTX)
            ep, em = W.smallest_eigenvalues(CTX)
            outcomes[p] = min(ep, em)
        assert outcomes["1.9999"] < 0
        assert outcomes["2"] > 0
        assert outcomes["2.0005"] < 0


def test_scan_f64_backend_matches_mp():
    ctx64 = NumContext(digits=40, backend="f64")
    rows64 = positivity_scan([2.0, 2.2], 8, "archimedean", ctx64)
    rows = positivity_scan([2.0, mp.mpf("2.2")], 8, "archimedean", CTX)
    for r64, r in zip(rows64, rows):
        assert abs(r64[1] - float(r[1])) < 1e-10
        assert abs(r64[2] - float(r[2])) < 1e-10
