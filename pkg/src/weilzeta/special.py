"""Special functions for the explicit-formula machinery.

* ``polygamma``: psi_m(z) for complex z by the Bernoulli asymptotic series,
  with upward recurrence lifting small arguments into the asymptotic region.
  The region grows with precision: the series bottoms out at ~exp(-2 pi |z|),
  so |z| must exceed ~0.37 * digits.

* ``theta_deriv``: derivative of the Riemann-Siegel angular function,
  theta'(t) = Re(psi_0(1/4 + it/2))/2 - log(pi)/2, plus higher t-derivatives
  (needed for integration-by-parts tails), via (i/2)^j psi_j.

* ``zeta_critical``: zeta(1/2 + is) by Euler-Maclaurin with an adaptive
  cutoff; each call checks its own truncation term.

* ``von_mangoldt_range``: the finite explicit-formula prime side, as a dict
  {prime power n <= x_max: log p}.
"""

from typing import Dict

from mpmath import mp

from .context import NumContext

# ============================================================================
# polygamma via asymptotic series + recurrence
# ============================================================================


def _asym_region(dps: int):
    # min |z| so the smallest asymptotic term ~ e^(-2 pi |z|) < 10^-(dps+5)
    return max(20, int(0.3665 * (dps + 12)) + 2)


def _polygamma_asym(m: int, z):
    """Asymptotic psi_m(z); caller guarantees |z| in the admissible region."""
    tol = mp.mpf(10) ** (-(mp.dps + 5))
    z2inv = 1 / (z * z)
    if m == 0:
        acc = mp.log(z) - 1 / (2 * z)
        zpow = z2inv
        k = 1
        while True:
            term = mp.bernoulli(2 * k) / (2 * k) * zpow
            acc -= term
            if abs(term) < tol * max(1, abs(acc)):
                break
            zpow *= z2inv
            k += 1
            if k > 4 * mp.dps:
                raise ArithmeticError("polygamma series did not terminate")
        return acc
    sign = mp.mpf(-1) ** (m - 1)
    fac_m1 = mp.factorial(m - 1)
    acc = fac_m1 / z ** m + fac_m1 * m / (2 * z ** (m + 1))
    zpow = 1 / z ** (m + 2)
    k = 1
    while True:
        coeff = mp.bernoulli(2 * k)
        # (2k + m - 1)! / (2k)!  ==  rising product (2k+1)...(2k+m-1)
        rise = mp.mpf(1)
        for j in range(2 * k + 1, 2 * k + m):
            rise *= j
        term = coeff * rise * zpow
        acc += term
        if abs(term) < tol * max(1, abs(acc)):
            break
        zpow /= z * z
        k += 1
        if k > 4 * mp.dps:
            raise ArithmeticError("polygamma series did not terminate")
    return sign * acc


def polygamma(m: int, z):
    """psi_m(z) for complex z off the negative real axis, m >= 0."""
    if m < 0:
        raise ValueError("m must be >= 0")
    z = mp.mpc(z)
    region = _asym_region(mp.dps)
    shift = 0
    if abs(z) < region:
        shift = int(mp.ceil(region - z.real)) + 1
        if shift < 0:
            shift = 0
    zs = z + shift
    val = _polygamma_asym(m, zs)
    if shift:
        sign = mp.mpf(-1) ** m
        fac = mp.factorial(m)
        corr = mp.fsum((z + j) ** (-(m + 1)) for j in range(shift))
        val = val - sign * fac * corr
    return val


# ============================================================================
# Riemann-Siegel theta derivative
# ============================================================================


def theta_deriv(t, ctx: NumContext, order: int = 0):
    """d^(order)/dt^(order) of theta'(t); order 0 is theta'(t) itself.

    theta'(t) = Re(psi_0(1/4 + it/2))/2 - log(pi)/2, and each t-derivative
    pulls down a factor i/2 and raises the polygamma order.
    """
    with ctx.precision(5):
        t = mp.mpf(t)
        z = mp.mpc(mp.mpf(1) / 4, t / 2)
        val = polygamma(order, z) * (mp.mpc(0, 1) / 2) ** order
        out = val.real / 2
        if order == 0:
            out -= mp.log(mp.pi) / 2
        return out


def theta_deriv_asymptotic(t, ctx: NumContext):
    """Leading asymptotic (log|t| - log 2 - log pi)/2 - 1/(48 t^2)."""
    with ctx.precision():
        t = mp.mpf(t)
        return (mp.log(abs(t)) - mp.log(2) - mp.log(mp.pi)) / 2 \
            - 1 / (48 * t * t)


# ============================================================================
# zeta on the critical line (Euler-Maclaurin)
# ============================================================================


class ZetaError(ArithmeticError):
    pass


def _zeta_em(z):
    """Euler-Maclaurin zeta(z) at current working precision."""
    dps = mp.dps
    tol = mp.mpf(10) ** (-(dps - 2))
    K = int(1.05 * dps) + 8
    M = int(3 * (abs(z) + 2 * K) / (2 * mp.pi)) + 10
    for _ in range(4):
        acc = mp.fsum(mp.power(n, -z) for n in range(1, M))
        Mz = mp.power(M, -z)
        acc += Mz / 2
        acc += Mz * M / (z - 1)
        poch = z                      # z (z+1) ... (z + 2k - 2)
        Mpow = Mz / M                 # M^(-z-2k+1)
        tail = mp.mpf(0)
        last = mp.mpf(0)
        for k in range(1, K + 1):
            term = mp.bernoulli(2 * k) / mp.factorial(2 * k) * poch * Mpow
            tail += term
            last = abs(term)
            poch *= (z + 2 * k - 1) * (z + 2 * k)
            Mpow /= M * M
        val = acc + tail
        if last <= tol * max(1, abs(val)):
            return val
        M *= 2
    raise ZetaError("Euler-Maclaurin did not reach tolerance "
                    "(last term %s)" % mp.nstr(last, 5))


def zeta_critical(s, ctx: NumContext):
    """zeta(1/2 + i s) for real s, |s| <= ~1e3."""
    with ctx.precision(8):
        s = mp.mpf(s)
        z = mp.mpc(mp.mpf(1) / 2, s)
        return _zeta_em(z)


# ============================================================================
# von Mangoldt
# ============================================================================


def primes_upto(x: int):
    """Ascending primes <= x (simple sieve)."""
    if x < 2:
        return []
    sieve = bytearray([1]) * (x + 1)
    sieve[0:2] = b"\x00\x00"
    p = 2
    while p * p <= x:
        if sieve[p]:
            sieve[p * p::p] = b"\x00" * len(sieve[p * p::p])
        p += 1
    return [i for i in range(2, x + 1) if sieve[i]]


def von_mangoldt_range(x_max, ctx: NumContext) -> Dict[int, "mp.mpf"]:
    """{n = p^m <= x_max : log p} with log at ctx precision."""
    xi = int(mp.floor(mp.mpf(x_max)))
    out = {}
    if xi < 2:
        return out
    with ctx.precision():
        for p in primes_upto(xi):
            logp = mp.log(p)
            q = p
            while q <= xi:
                out[q] = logp
                q *= p
    return out
