"""Semi-local Weil quadratic form on the multiplicative interval [1/lam, lam].

The form splits into an even block (basis indices n >= 0, cosines plus the
constant) and an odd block (n < 0, sines) over the circle of length
L = log mu = 2 log lam.  Each entry is

    sigma(n, m) = w02_term - w_archimedean - w_primes

evaluated on the symmetrized convolution of the two basis functions.  The
convolution is available in closed form (theta_sym); the polynomial-weight
term w02 factors as a rank-one product; the archimedean term reduces to a
small family of base integrals shared by all pairs; the prime term is a von
Mangoldt sum over prime powers up to mu.

mp-backed routines carry a NumContext; the *_f64 mirrors trade precision for
speed and are only trustworthy while entries are O(1) (their eigenvalue
noise floor is ~1e-13, far above the tiny spectra the mp lane resolves).
"""

import math
from dataclasses import dataclass

import numpy as np
from mpmath import mp

from .context import NumContext, DEFAULT_CONTEXT
from .numkernel import SymMatrix, integrate, sym_eigen
from .special import von_mangoldt_range

# Below this x the archimedean integrands switch to their power series: the
# direct form loses ~log10(1/x) digits to cancellation as x -> 0.
SWITCH_X = mp.mpf("0.001")


def _same_parity(n, m):
    if (n >= 0) != (m >= 0):
        raise ValueError("identically zero pair: indices %d, %d mix the even"
                         " (n >= 0) and odd (n < 0) blocks" % (n, m))
    return n < 0


def theta_sym(n, m, L, y):
    """Closed-form symmetrized convolution of basis functions n and m.

    Returns half the symmetrized convolution at offset y, the table value
    with value 1 at y = 0 on the diagonal.  Even in y; supported on
    [-L, L] (arguments a hair past an endpoint clamp to it).  Mixed-parity
    pairs vanish identically and raise instead of returning 0.
    """
    odd = _same_parity(n, m)
    L = mp.mpf(L)
    y = abs(mp.mpf(y))
    if y > L:
        if y > L * (1 + mp.mpf("1e-12")):
            raise ValueError("offset %s outside support [-L, L]" % mp.nstr(y))
        y = L
    a, b = sorted((abs(n), abs(m)))
    if a == b == 0:
        return (L - y) / L
    w_b = 2 * mp.pi * b / L
    if a == 0:
        return -mp.sin(w_b * y) / (mp.sqrt(2) * mp.pi * b)
    w_a = 2 * mp.pi * a / L
    if a == b:
        tilt = (1 - y / L) * mp.cos(w_a * y)
        ripple = mp.sin(w_a * y) / (2 * mp.pi * a)
        return tilt + ripple if odd else tilt - ripple
    if odd:
        num = b * mp.sin(w_a * y) - a * mp.sin(w_b * y)
    else:
        num = a * mp.sin(w_a * y) - b * mp.sin(w_b * y)
    return num / (mp.pi * (b * b - a * a))


# -- w02: the x^{1/2} + x^{-1/2} weight term --------------------------------
#
# Against the pair function the weight factorizes (Fubini), so each block is
# rank one: even entries are 2 A_n A_m with A_n the weighted integral of
# basis function n, odd entries are -2 X_a X_b.  The even diagonal is
# positive, the odd diagonal negative.

def _w02_even_factor(k, L):
    s = 2 * mp.sinh(L / 4)
    if k == 0:
        return 2 * s / mp.sqrt(L)
    return mp.sqrt(2 / L) * 2 * s * L * L / (L * L + 16 * mp.pi**2 * k * k)


def _w02_odd_factor(a, L):
    s = 2 * mp.sinh(L / 4)
    return mp.sqrt(2 / L) * s * 8 * mp.pi * a * L / (
        L * L + 16 * mp.pi**2 * a * a)


def w02_term(n, m, L):
    """Entry of the rank-one weight term for a same-parity pair."""
    odd = _same_parity(n, m)
    L = mp.mpf(L)
    if odd:
        return -2 * _w02_odd_factor(abs(n), L) * _w02_odd_factor(abs(m), L)
    return 2 * _w02_even_factor(abs(n), L) * _w02_even_factor(abs(m), L)


# -- truncated power series helpers (type-generic: mpf or float) ------------

def _series_mul(a, b, terms):
    out = [a[0] * 0] * terms
    for i, ai in enumerate(a[:terms]):
        if ai == 0:
            continue
        for j, bj in enumerate(b[:terms - i]):
            out[i + j] += ai * bj
    return out

def _series_div(num, den, terms):
    # den[0] must be nonzero
    out = []
    for j in range(terms):
        acc = num[j] if j < len(num) else num[0] * 0
        for i in range(j):
            acc -= out[i] * (den[j - i] if j - i < len(den) else den[0] * 0)
        out.append(acc / den[0])
    return out

def _exp_half_series(terms, one):
    out = [one]
    for j in range(1, terms):
        out.append(out[-1] / (2 * j))
    return out

def _cos_sin_series(w, terms, one):
    cos = [one * 0] * terms
    sin = [one * 0] * terms
    pw = one
    for j in range(terms):
        if j % 2 == 0:
            cos[j] = pw if j % 4 == 0 else -pw
        else:
            sin[j] = pw if j % 4 == 1 else -pw
        pw = pw * w / (j + 1)
    return cos, sin

def _sinh2_over_x_series(terms, one):
    # (2 sinh x)/x = 2 + x^2/3 + x^4/60 + ...
    out = [one * 0] * terms
    c = one * 2
    out[0] = c
    j = 2
    while j < terms:
        c = c / ((j) * (j + 1))
        out[j] = c
        j += 2
    return out


def _arch_series(kind, k, L, terms, one):
    """Series in x of the base integrand, valid below SWITCH_X."""
    w = 2 * one * math.pi if isinstance(one, float) else 2 * mp.pi
    w = w * k / L
    eh = _exp_half_series(terms + 1, one)
    cos, sin = _cos_sin_series(w, terms + 1, one)
    if kind == "V2":
        num = _series_mul(eh, sin, terms + 1)
    else:
        lin = [one, -one / L]
        num = _series_mul(_series_mul(eh, lin, terms + 1), cos, terms + 1)
        num = [2 * c for c in num]
        num[0] -= 2 * one
    # numerator vanishes at 0; divide the shifted series by (2 sinh x)/x
    return _series_div(num[1:], _sinh2_over_x_series(terms, one), terms)


def _horner(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _arch_integrand(kind, k, L, series):
    w = 2 * mp.pi * k / L
    cut = SWITCH_X

    def f(x):
        if x < cut:
            return _horner(series, x)
        if kind == "V2":
            return mp.e**(x / 2) * mp.sin(w * x) / (2 * mp.sinh(x))
        return (2 * mp.e**(x / 2) * (1 - x / L) * mp.cos(w * x) - 2) / (
            2 * mp.sinh(x))
    return f


_ARCH_CACHE = {}

def clear_arch_cache():
    _ARCH_CACHE.clear()


def _v_integral(kind, k, L, ctx):
    """Base integral over [0, L]: kind V1 pairs with cos(2 pi k x / L)
    (k = 0 covers the constant-function case), V2 with sin."""
    key = (kind, k, mp.nstr(mp.mpf(L), 30), ctx.digits, ctx.quad_order)
    hit = _ARCH_CACHE.get(key)
    if hit is not None:
        return hit
    with ctx.precision(10):
        terms = max(24, int(0.35 * mp.dps) + 8)
        series = _arch_series(kind, k, mp.mpf(L), terms, mp.mpf(1))
        f = _arch_integrand(kind, k, mp.mpf(L), series)
        val = integrate(f, mp.mpf(0), mp.mpf(L), ctx,
                        initial_panels=1 + k // 3)
    _ARCH_CACHE[key] = val
    return val


def arch_constant(L):
    """Coefficient multiplying half the pair value at 0 in the archimedean
    term; diverges to -inf as L -> 0+ and equals ~2.00963 at L = log 2."""
    L = mp.mpf(L)
    return mp.euler + mp.log(4 * mp.pi * (mp.e**L - 1) / (mp.e**L + 1))


def w_archimedean(n, m, L, ctx=DEFAULT_CONTEXT):
    """Archimedean term for a same-parity pair, via the shared base
    integrals; the integrand's removable singularity at 0 is handled by the
    series branch below SWITCH_X."""
    odd = _same_parity(n, m)
    with ctx.precision(10):
        L = mp.mpf(L)
        a, b = sorted((abs(n), abs(m)))
        if not odd:
            if a == b == 0:
                return arch_constant(L) + _v_integral("V1", 0, L, ctx)
            if a == 0:
                return -mp.sqrt(2) * _v_integral("V2", b, L, ctx) / (mp.pi * b)
            if a == b:
                return (arch_constant(L) + _v_integral("V1", a, L, ctx)
                        - _v_integral("V2", a, L, ctx) / (mp.pi * a))
            return (2 / (mp.pi * (b * b - a * a))) * (
                a * _v_integral("V2", a, L, ctx)
                - b * _v_integral("V2", b, L, ctx))
        if a == b:
            return (arch_constant(L) + _v_integral("V1", a, L, ctx)
                    + _v_integral("V2", a, L, ctx) / (mp.pi * a))
        return (2 / (mp.pi * (b * b - a * a))) * (
            b * _v_integral("V2", a, L, ctx)
            - a * _v_integral("V2", b, L, ctx))


def w_primes(n, m, L, p_real=None, exclude=(), ctx=DEFAULT_CONTEXT):
    """Prime-power sum for a same-parity pair.

    Sums Lambda(q) q^{-1/2} times the pair value at log q over prime powers
    1 < q <= exp(L); the boundary power is included (the pair value vanishes
    at L, so inclusion is harmless).  ``exclude`` drops the listed prime
    powers; ``p_real`` replaces the whole sum by the single term of a real
    variable p standing in for a prime.
    """
    _same_parity(n, m)
    with ctx.precision(10):
        L = mp.mpf(L)
        if p_real is not None:
            p = mp.mpf(p_real)
            if p <= 1:
                raise ValueError("p_real must exceed 1")
            y = mp.log(p)
            if y > L:
                return mp.mpf(0)
            return 2 * theta_sym(n, m, L, y) * mp.log(p) / mp.sqrt(p)
        acc = mp.mpf(0)
        for q, lam in sorted(von_mangoldt_range(mp.e**L, ctx).items()):
            if q in exclude:
                continue
            acc += 2 * theta_sym(n, m, L, mp.log(q)) * lam / mp.sqrt(q)
        return acc


# -- assembly ---------------------------------------------------------------

@dataclass(frozen=True)
class WhichTerms:
    """Term selection for assembly: any subset of the three contributions,
    optional prime-power exclusions, optional real-p stand-in."""
    w02: bool = True
    archimedean: bool = True
    primes: bool = True
    exclude: tuple = ()
    p_real: object = None

    @classmethod
    def full(cls):
        return cls()

    @classmethod
    def archimedean_only(cls):
        return cls(primes=False)


_MODE_STRINGS = {
    "full": WhichTerms(),
    "archimedean": WhichTerms(primes=False),
    "w02": WhichTerms(archimedean=False, primes=False),
    "primes": WhichTerms(w02=False, archimedean=False),
}


def _normalize_mode(mode):
    if isinstance(mode, WhichTerms):
        return mode
    try:
        return _MODE_STRINGS[mode]
    except (KeyError, TypeError):
        raise ValueError("unknown mode %r; expected WhichTerms or one of %s"
                         % (mode, sorted(_MODE_STRINGS))) from None


class WeilMatrix:
    """Assembled form: sigma_plus indexes 0..N, sigma_minus indexes
    -1..-N (row i of the odd block is index -(i+1))."""

    def __init__(self, mu, mode, sigma_plus, sigma_minus):
        self.mu = mu
        self.mode = mode
        self.sigma_plus = sigma_plus
        self.sigma_minus = sigma_minus

    @property
    def trunc_N(self):
        return self.sigma_minus.n

    def smallest_eigenvalues(self, ctx=DEFAULT_CONTEXT):
        ep = sym_eigen(self.sigma_plus, ctx, want_vectors=False)[0][0]
        em = sym_eigen(self.sigma_minus, ctx, want_vectors=False)[0][0]
        return ep, em


def assemble_sigma(mu, N, mode="full", ctx=DEFAULT_CONTEXT):
    """Assemble both blocks of the form at mu = exp(L) truncated to
    basis indices |n| <= N."""
    terms = _normalize_mode(mode)
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > ctx.trunc_N:
        raise ValueError("N = %d exceeds context trunc_N = %d"
                         % (N, ctx.trunc_N))
    with ctx.precision(10):
        mu = mp.mpf(mu)
        if mu <= 1:
            raise ValueError("mu must exceed 1")
        L = mp.log(mu)
        plus = SymMatrix(N + 1)
        minus = SymMatrix(N)

        if terms.w02:
            ev = [_w02_even_factor(k, L) for k in range(N + 1)]
            od = [_w02_odd_factor(a, L) for a in range(1, N + 1)]
            for i in range(N + 1):
                for j in range(i + 1):
                    plus.set(i, j, plus.get(i, j) + 2 * ev[i] * ev[j])
            for i in range(N):
                for j in range(i + 1):
                    minus.set(i, j, minus.get(i, j) - 2 * od[i] * od[j])

        if terms.archimedean:
            for i in range(N + 1):
                for j in range(i + 1):
                    plus.set(i, j, plus.get(i, j)
                             - w_archimedean(i, j, L, ctx))
            for i in range(N):
                for j in range(i + 1):
                    minus.set(i, j, minus.get(i, j)
                              - w_archimedean(-(i + 1), -(j + 1), L, ctx))

        if terms.primes or terms.p_real is not None:
            for i in range(N + 1):
                for j in range(i + 1):
                    plus.set(i, j, plus.get(i, j)
                             - w_primes(i, j, L, p_real=terms.p_real,
                                        exclude=terms.exclude, ctx=ctx))
            for i in range(N):
                for j in range(i + 1):
                    minus.set(i, j, minus.get(i, j)
                              - w_primes(-(i + 1), -(j + 1), L,
                                         p_real=terms.p_real,
                                         exclude=terms.exclude, ctx=ctx))
        return WeilMatrix(mu, terms, plus, minus)


def positivity_scan(mu_values, N, mode="full", ctx=DEFAULT_CONTEXT):
    """Smallest eigenvalue of each block over a grid of mu values.

    Returns rows (mu, smallest even eigenvalue, smallest odd eigenvalue).
    With ctx.backend == "f64" the fast float lane is used instead of mp.
    """
    rows = []
    if ctx.backend == "f64":
        for mu in mu_values:
            p, q = assemble_sigma_f64(mu, N, mode)
            rows.append((float(mu), float(np.linalg.eigvalsh(p)[0]),
                         float(np.linalg.eigvalsh(q)[0])))
        return rows
    for mu in mu_values:
        w = assemble_sigma(mu, N, mode, ctx)
        ep, em = w.smallest_eigenvalues(ctx)
        rows.append((w.mu, ep, em))
    return rows


# -- f64 mirror lane --------------------------------------------------------

_GL_F64 = {}

def _gl_f64(order):
    hit = _GL_F64.get(order)
    if hit is None:
        hit = np.polynomial.legendre.leggauss(order)
        _GL_F64[order] = hit
    return hit


def theta_sym_f64(n, m, L, y):
    odd = _same_parity(n, m)
    y = abs(y)
    if y > L:
        if y > L * (1 + 1e-12):
            raise ValueError("offset outside support")
        y = L
    a, b = sorted((abs(n), abs(m)))
    if a == b == 0:
        return (L - y) / L
    wb = 2 * math.pi * b / L
    if a == 0:
        return -math.sin(wb * y) / (math.sqrt(2) * math.pi * b)
    wa = 2 * math.pi * a / L
    if a == b:
        tilt = (1 - y / L) * math.cos(wa * y)
        ripple = math.sin(wa * y) / (2 * math.pi * a)
        return tilt + ripple if odd else tilt - ripple
    if odd:
        num = b * math.sin(wa * y) - a * math.sin(wb * y)
    else:
        num = a * math.sin(wa * y) - b * math.sin(wb * y)
    return num / (math.pi * (b * b - a * a))


def _v_integral_f64(kind, k, L):
    w = 2 * math.pi * k / L
    series = _arch_series(kind, k, L, 14, 1.0)
    nodes, weights = _gl_f64(32)
    panels = 4 + k
    h = L / panels
    acc = 0.0
    for p in range(panels):
        x = (nodes + 1) * (h / 2) + p * h
        small = x < 1e-3
        val = np.empty_like(x)
        if small.any():
            val[small] = np.polynomial.polynomial.polyval(x[small], series)
        xb = x[~small]
        if kind == "V2":
            val[~small] = np.exp(xb / 2) * np.sin(w * xb) / (2 * np.sinh(xb))
        else:
            val[~small] = (2 * np.exp(xb / 2) * (1 - xb / L) * np.cos(w * xb)
                           - 2) / (2 * np.sinh(xb))
        acc += (weights * val).sum() * h / 2
    return acc


def _w_arch_f64(n, m, L, v1, v2):
    odd = n < 0
    a, b = sorted((abs(n), abs(m)))
    const = (0.5772156649015329
             + math.log(4 * math.pi * (math.e**L - 1) / (math.e**L + 1)))
    if not odd:
        if a == b == 0:
            return const + v1[0]
        if a == 0:
            return -math.sqrt(2) * v2[b] / (math.pi * b)
        if a == b:
            return const + v1[a] - v2[a] / (math.pi * a)
        return (2 / (math.pi * (b * b - a * a))) * (a * v2[a] - b * v2[b])
    if a == b:
        return const + v1[a] + v2[a] / (math.pi * a)
    return (2 / (math.pi * (b * b - a * a))) * (b * v2[a] - a * v2[b])


def assemble_sigma_f64(mu, N, mode="full"):
    """Float mirror of assemble_sigma; returns (plus, minus) ndarrays."""
    terms = _normalize_mode(mode)
    L = math.log(mu)
    if L <= 0:
        raise ValueError("mu must exceed 1")
    plus = np.zeros((N + 1, N + 1))
    minus = np.zeros((N, N))

    if terms.w02:
        s = 2 * math.sinh(L / 4)
        ev = np.empty(N + 1)
        ev[0] = 2 * s / math.sqrt(L)
        ks = np.arange(1, N + 1)
        ev[1:] = math.sqrt(2 / L) * 2 * s * L * L / (
            L * L + 16 * math.pi**2 * ks**2)
        od = math.sqrt(2 / L) * s * 8 * math.pi * ks * L / (
            L * L + 16 * math.pi**2 * ks**2)
        plus += 2 * np.outer(ev, ev)
        minus -= 2 * np.outer(od, od)

    if terms.archimedean:
        v1 = [_v_integral_f64("V1", k, L) for k in range(N + 1)]
        v2 = [0.0] + [_v_integral_f64("V2", k, L) for k in range(1, N + 1)]
        for i in range(N + 1):
            for j in range(i + 1):
                plus[i, j] -= _w_arch_f64(i, j, L, v1, v2)
                plus[j, i] = plus[i, j]
        for i in range(N):
            for j in range(i + 1):
                minus[i, j] -= _w_arch_f64(-(i + 1), -(j + 1), L, v1, v2)
                minus[j, i] = minus[i, j]

    if terms.primes or terms.p_real is not None:
        if terms.p_real is not None:
            items = []
            p = float(terms.p_real)
            if math.log(p) <= L:
                items = [(p, math.log(p))]
        else:
            items = sorted((q, float(lam)) for q, lam in
                           von_mangoldt_range(math.exp(L),
                                              DEFAULT_CONTEXT).items()
                           if q not in terms.exclude)
        for q, lam in items:
            y = min(math.log(q), L)
            wgt = lam / math.sqrt(q)
            for i in range(N + 1):
                for j in range(i + 1):
                    plus[i, j] -= 2 * wgt * theta_sym_f64(i, j, L, y)
                    plus[j, i] = plus[i, j]
            for i in range(N):
                for j in range(i + 1):
                    minus[i, j] -= 2 * wgt * theta_sym_f64(-(i + 1), -(j + 1),
                                                           L, y)
                    minus[j, i] = minus[i, j]
    return plus, minus
