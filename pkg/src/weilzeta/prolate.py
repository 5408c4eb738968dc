"""Band-limited prolate spheroidal functions on [-lambda, lambda].

``ProlateFn`` is the m-th even eigenfunction psi_m of the positive operator

    -d/dq ((lambda^2 - q^2) d/dq) + (2 pi lambda q)^2

on [-lambda, lambda] (bandwidth parameter gamma = 2 pi lambda^2 = 2 pi mu),
normalized to unit L^2 norm.  Only even functions arise here; psi_m has
classical order 2m.  In the rescaled variable eta = x / lambda the expansion
runs over normalized even Legendre polynomials, where the operator is a
symmetric tridiagonal matrix solved by Sturm bisection.

``chi(mu, m)`` is the characteristic value: the finite Fourier transform
int_{-lam}^{lam} psi(xi) e^(2 pi i xi y) dxi equals (-1)^m chi psi(y) on the
interval, and chi stays ~1 for m up to the band count nu(mu) ~ 2 mu, then
collapses.  Evaluated by the Legendre-Bessel expansion at a probe point away
from nodes of psi, with a second probe as a consistency check.

``nu(mu)``: largest m with chi(mu, m) >= NU_THRESHOLD.

``phi_fn(mu, n)``: the combination psi_n psi_p(0) - psi_p psi_n(0), p = n
mod 2, vanishing at 0; its Fourier transform is ~ (-1)^n phi_n.

Everything exists in two lanes: mpf (contract precision) and float64 (for
parameter sweeps; ~1e-12 accuracy, far below the ~0.9 thresholding needs).
"""

import numpy as np
from mpmath import mp

from .context import NU_THRESHOLD, NumContext
from .numkernel import tridiag_eigen

__all__ = ["ProlateError", "ProlateFn", "PhiFn", "prolate_fn", "chi", "nu",
           "phi_fn", "prolate_coeffs_f64", "chi_f64", "nu_f64",
           "clear_cache"]


class ProlateError(ArithmeticError):
    pass


# ============================================================================
# tridiagonal matrix of the prolate operator, even Legendre sector
# ============================================================================


def _tridiag_entries(c, K):
    """Diagonal and off-diagonal, rows k=0..K-1 for basis P-bar_{2k}."""
    d = []
    e = []
    c2 = c * c
    for k in range(K):
        l = 2 * k
        Bl = ((l + 1) ** 2 / mp.mpf((2 * l + 1) * (2 * l + 3))
              + (l * l) / mp.mpf(max(1, (2 * l + 1) * (2 * l - 1))))
        if l == 0:
            Bl = mp.mpf(1) / 3
        d.append(l * (l + 1) + c2 * Bl)
        if k < K - 1:
            e.append(c2 * (l + 1) * (l + 2)
                     / ((2 * l + 3) * mp.sqrt(mp.mpf((2 * l + 1) * (2 * l + 5)))))
    return d, e


def _tridiag_entries_f64(c, K):
    l = 2 * np.arange(K, dtype=np.float64)
    Bl = (l + 1) ** 2 / ((2 * l + 1) * (2 * l + 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        Bl = Bl + np.where(l > 0, l * l / ((2 * l + 1) * (2 * l - 1)), 0.0)
    d = l * (l + 1) + c * c * Bl
    lo = l[:-1]
    e = c * c * (lo + 1) * (lo + 2) / ((2 * lo + 3)
                                       * np.sqrt((2 * lo + 1) * (2 * lo + 5)))
    return d, e


def _trunc_K(m, c_int, digits):
    return m + c_int + max(30, int(0.35 * digits))


# ============================================================================
# spherical Bessel j_0..j_lmax by the Miller downward recurrence
# ============================================================================


def _sph_bessel_upto(l_max, z):
    """[j_0(z), ..., j_lmax(z)] at current working precision; z >= 0."""
    if z == 0:
        return [mp.mpf(1)] + [mp.mpf(0)] * l_max
    margin = int(2.5 * mp.dps) + 20
    N = l_max + int(mp.ceil(z)) + margin
    yp = mp.mpf(0)          # y_{n+1}
    yc = mp.mpf("1e-10")    # y_n, arbitrary seed
    out = [mp.mpf(0)] * (l_max + 1)
    norm = (2 * N + 1) * yc * yc
    for n in range(N, 0, -1):
        ym = (2 * n + 1) / z * yc - yp
        yp, yc = yc, ym
        if n - 1 <= l_max:
            out[n - 1] = yc
        norm += (2 * (n - 1) + 1) * yc * yc
    # sum_l (2l+1) j_l^2 = 1 fixes the scale; j_0 or j_1 fixes the sign
    scale = 1 / mp.sqrt(norm)
    j0 = mp.sin(z) / z
    ref, mine = (j0, out[0])
    if abs(j0) < mp.mpf("0.1") / max(1, z):
        ref = mp.sin(z) / (z * z) - mp.cos(z) / z
        mine = out[1] if l_max >= 1 else yp
    if (ref < 0) != (mine < 0):
        scale = -scale
    return [y * scale for y in out]


def _sph_bessel_upto_f64(l_max, z):
    if z == 0:
        out = np.zeros(l_max + 1)
        out[0] = 1.0
        return out
    N = l_max + int(np.ceil(z)) + 40
    out = np.zeros(l_max + 1)
    yp, yc = 0.0, 1e-30
    norm = (2 * N + 1) * yc * yc
    for n in range(N, 0, -1):
        ym = (2 * n + 1) / z * yc - yp
        yp, yc = yc, ym
        if abs(yc) > 1e150:
            # rescale everything accumulated so far; norm is quadratic
            yp *= 1e-150
            yc *= 1e-150
            norm *= 1e-300
            out *= 1e-150
        if n - 1 <= l_max:
            out[n - 1] = yc
        norm += (2 * (n - 1) + 1) * yc * yc
    scale = 1.0 / np.sqrt(norm)
    j0 = np.sin(z) / z
    ref, mine = j0, out[0]
    if abs(j0) < 0.1 / max(1.0, z):
        ref = np.sin(z) / (z * z) - np.cos(z) / z
        mine = out[1] if l_max >= 1 else yp
    if (ref < 0) != (mine < 0):
        scale = -scale
    return out * scale


# ============================================================================
# ProlateFn (mp lane)
# ============================================================================


class ProlateFn:
    """psi_m at bandwidth gamma = 2 pi mu, unit L^2([-lam, lam]) norm.

    ``coeffs[k]`` multiplies the normalized Legendre polynomial
    sqrt((4k+1)/2) P_{2k}(x / lam); the coefficient vector has norm
    1/sqrt(lam).  Sign: the P_0 coefficient is positive (fallback: first
    non-negligible coefficient).
    """

    def __init__(self, mu, m, coeffs, helm_eig, ctx):
        self.mu = mu
        self.m = m
        self.lam = mp.sqrt(mu)
        self.c = 2 * mp.pi * mu
        self.coeffs = coeffs
        self.helm_eig = helm_eig
        self._digits = ctx.digits

    def eval_eta(self, eta):
        """Value at eta = x / lam, |eta| <= 1."""
        K = len(self.coeffs)
        p0, p1 = mp.mpf(1), eta
        acc = self.coeffs[0] * mp.sqrt(mp.mpf(1) / 2)
        for l in range(2, 2 * K - 1):
            p0, p1 = p1, ((2 * l - 1) * eta * p1 - (l - 1) * p0) / l
            if l % 2 == 0:
                k = l // 2
                acc += self.coeffs[k] * mp.sqrt(mp.mpf(2 * l + 1) / 2) * p1
        return acc

    def __call__(self, x):
        eta = x / self.lam
        if abs(eta) > 1:
            return mp.mpf(0)
        return self.eval_eta(eta)

    def at0(self):
        return self.eval_eta(mp.mpf(0))


_PROLATE_CACHE = {}


def clear_cache():
    _PROLATE_CACHE.clear()


def _cache_key(mu, m, digits):
    return (mp.nstr(mp.mpf(mu), 25), m, digits)


def prolate_fn(mu, m, ctx: NumContext) -> ProlateFn:
    """Construct psi_m by solving the tridiagonal eigenproblem (cached)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    key = _cache_key(mu, m, ctx.digits)
    hit = _PROLATE_CACHE.get(key)
    if hit is not None:
        return hit
    with ctx.precision(5):
        mu = mp.mpf(mu)
        if mu <= 0:
            raise ProlateError("mu must be positive")
        c = 2 * mp.pi * mu
        K = _trunc_K(m, int(c), ctx.digits)
        tail_tol = mp.mpf(10) ** (-(ctx.digits + 5))
        for _ in range(3):
            d, e = _tridiag_entries(c, K)
            vals, vecs = tridiag_eigen(d, e, ctx, indices=[m])
            vec = vecs[0]
            vmax = max(abs(x) for x in vec)
            if max(abs(vec[-1]), abs(vec[-2]), abs(vec[-3])) < tail_tol * vmax:
                break
            K = K + K // 2
        else:
            raise ProlateError("Legendre tail not converged at K=%d" % K)
        # sign: P_0 coefficient positive, else first non-negligible one
        cut = vmax * mp.mpf(10) ** (-(ctx.digits // 2))
        for x in vec:
            if abs(x) > cut:
                if x < 0:
                    vec = [-y for y in vec]
                break
        lam = mp.sqrt(mu)
        scale = 1 / mp.sqrt(lam)
        coeffs = [x * scale for x in vec]
        fn = ProlateFn(mu, m, coeffs, vals[0], ctx)
    _PROLATE_CACHE[key] = fn
    return fn


# ============================================================================
# characteristic value and band count
# ============================================================================


def _chi_at_probe(fn: ProlateFn, omega, bessels):
    num = mp.mpf(0)
    for k, dk in enumerate(fn.coeffs):
        term = dk * mp.sqrt(mp.mpf(4 * k + 1) / 2) * 2 * bessels[2 * k]
        num += term if k % 2 == 0 else -term
    den = fn.eval_eta(omega)
    if den == 0:
        raise ProlateError("probe landed on a node")
    sign = -1 if fn.m % 2 else 1
    return sign * fn.lam * num / den


def chi(mu, m, ctx: NumContext):
    """Characteristic value chi(mu, m), probe-checked."""
    with ctx.precision(5):
        fn = prolate_fn(mu, m, ctx)
        gamma = fn.c
        l_max = 2 * (len(fn.coeffs) - 1)
        for grid_n in (64, 128):
            vals = []
            for i in range(1, grid_n):
                eta = mp.mpf(i) / grid_n * mp.mpf("0.995")
                vals.append((abs(fn.eval_eta(eta)), eta))
            vals.sort(key=lambda t: t[0], reverse=True)
            best = vals[0][1]
            second = next(eta for (v, eta) in vals
                          if abs(eta - best) > mp.mpf(3) / grid_n)
            c1 = _chi_at_probe(fn, best, _sph_bessel_upto(l_max, gamma * best))
            c2 = _chi_at_probe(fn, second,
                               _sph_bessel_upto(l_max, gamma * second))
            tol = mp.mpf(10) ** (-(ctx.digits - 25))
            if abs(c1 - c2) <= tol * max(1, abs(c1)):
                return c1
        raise ProlateError(
            "probe values disagree: %s vs %s" % (mp.nstr(c1, 8),
                                                 mp.nstr(c2, 8)))


def nu(mu, ctx: NumContext) -> int:
    """Largest m with chi(mu, m) >= NU_THRESHOLD."""
    with ctx.precision():
        m_cap = int(mp.ceil(2 * mp.mpf(mu))) + 8
    last = None
    for m in range(m_cap + 1):
        if chi(mu, m, ctx) >= NU_THRESHOLD:
            last = m
        elif last is not None:
            return last
        elif m >= 2:
            # chi never reached the threshold: mu too small to carry a band
            raise ProlateError("no band: chi(mu, m) < %s for m <= %d"
                               % (NU_THRESHOLD, m))
    raise ProlateError("chi plateau did not terminate by m=%d" % m_cap)


# ============================================================================
# vanishing-at-zero combinations
# ============================================================================


class PhiFn:
    """phi_n = psi_n psi_p(0) - psi_p psi_n(0) with p = n mod 2; phi_n(0)=0."""

    def __init__(self, n, fn_n: ProlateFn, fn_p: ProlateFn):
        self.n = n
        self.mu = fn_n.mu
        self.lam = fn_n.lam
        self.fn_n = fn_n
        self.fn_p = fn_p
        self.wa = fn_p.at0()
        self.wb = -fn_n.at0()

    def eval_eta(self, eta):
        return self.wa * self.fn_n.eval_eta(eta) \
            + self.wb * self.fn_p.eval_eta(eta)

    def __call__(self, x):
        eta = x / self.lam
        if abs(eta) > 1:
            return mp.mpf(0)
        return self.eval_eta(eta)


def phi_fn(mu, n, ctx: NumContext) -> PhiFn:
    if n < 2:
        raise ValueError("phi_n needs n >= 2")
    p = n % 2
    with ctx.precision(5):
        return PhiFn(n, prolate_fn(mu, n, ctx), prolate_fn(mu, p, ctx))


# ============================================================================
# float64 lane
# ============================================================================


def prolate_coeffs_f64(mu, m):
    """(coeffs, helm_eig): coefficients of sqrt((4k+1)/2) P_{2k}(x/lam)."""
    c = 2 * np.pi * mu
    K = _trunc_K(m, int(c), 16)
    d, e = _tridiag_entries_f64(c, K)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    w, v = np.linalg.eigh(T)
    vec = v[:, m]
    vmax = np.max(np.abs(vec))
    for x in vec:
        if abs(x) > 1e-8 * vmax:
            if x < 0:
                vec = -vec
            break
    return vec / np.sqrt(np.sqrt(mu)), w[m]


def _eval_eta_f64(coeffs, eta):
    K = len(coeffs)
    full = np.zeros(2 * K - 1)
    k = np.arange(K)
    full[2 * k] = coeffs * np.sqrt((4 * k + 1) / 2.0)
    return np.polynomial.legendre.legval(eta, full)


def chi_f64(mu, m):
    coeffs, _ = prolate_coeffs_f64(mu, m)
    gamma = 2 * np.pi * mu
    l_max = 2 * (len(coeffs) - 1)
    etas = np.linspace(0.0, 0.995, 64)
    g = _eval_eta_f64(coeffs, etas)
    best = etas[np.argmax(np.abs(g))]
    bes = _sph_bessel_upto_f64(l_max, gamma * best)
    k = np.arange(len(coeffs))
    num = np.sum(coeffs * np.sqrt((4 * k + 1) / 2.0) * 2
                 * (-1.0) ** k * bes[2 * k])
    den = _eval_eta_f64(coeffs, best)
    return (-1.0) ** m * np.sqrt(mu) * num / den


def nu_f64(mu) -> int:
    m_cap = int(np.ceil(2 * mu)) + 8
    last = None
    for m in range(m_cap + 1):
        if chi_f64(mu, m) >= NU_THRESHOLD:
            last = m
        elif last is not None:
            return last
        elif m >= 2:
            raise ProlateError("no band at mu=%s (f64)" % mu)
    raise ProlateError("chi plateau did not terminate (f64)")
