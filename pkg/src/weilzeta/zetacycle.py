"""Summation maps onto multiplicative circles and character vanishing tests.

Test functions live in the Gaussian-polynomial family

    f(x) = A * p(w) * exp(-w),    w = pi * (x / sigma)^2,

with p a rational polynomial without constant term (so f(0) = 0) and subject
to the linear constraint sum_j a_j * (2j)!/(4^j j!) = 0 (so integral f = 0).
The family is closed under the Fourier transform: w^j exp(-w) maps to
(-1/4)^j H_{2j}(sqrt(w)) exp(-w) with H the physicists' Hermite polynomials,
and the coefficient map is exact rational arithmetic.  The Mellin transform
has the closed Gamma-sum form

    psi(z) = A * sigma^(1/2 - iz) * (1/2) * pi^(-s'/2) * sum_j a_j * Gamma(j + s'/2)

with s' = 1/2 - iz.  Everything downstream is two-path checkable:

* ``map_E`` evaluates u^(1/2) * sum_{n>0} f(n u) by the direct series above
  the scale of f and through the Fourier transform (Poisson summation, using
  f(0) = integral f = 0) below it, where the direct series would need ~1/u
  terms.
* ``mellin_factorization`` compares the quadrature of E(f) u^{-iz} against
  the product of the critical-line zeta value at -z and psi(z).
* ``zeta_cycle_check`` folds E(f) onto the circle of length 2 pi n / s and
  pairs with the character u^{i s}.  The coefficient modulus vanishes
  exactly when 1/2 + i s is a zero; a control character on its own circle
  stays visibly nonzero, so the test is two-sided.

Circle coefficients use the plain trapezoid rule on the uniform log grid.
The folded functions are entire and their coefficient sequences decay like
exp(-pi^2 k / (2 L)), so the rule converges geometrically and the grid size
is chosen from the digit count to push aliasing below the target accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, NamedTuple, Optional, Sequence, Tuple

from mpmath import mp

from .context import NumContext, DEFAULT_CONTEXT
from .numkernel import integrate
from .special import zeta_critical
from .criteria import ZetaZerosTable, load_zeros

__all__ = [
    "TestFn", "CircleFn", "CycleReport", "LatticeHit", "ControlPoint",
    "ScanReport", "special_member", "test_family", "theta_action",
    "map_E", "sigma_mu_E", "mellin_factorization", "zeta_cycle_check",
    "hl_nonzero_scan",
]


# ---------------------------------------------------------------------------
# exact rational layer

@lru_cache(maxsize=None)
def _moment_ratio(j: int) -> Fraction:
    """integral_0^inf w^j e^{-w} dx relative to the j = 0 Gaussian integral.

    Equals (2j)!/(4^j j!); the zero-integral constraint on coefficients is
    sum_j a_j * _moment_ratio(j) = 0.
    """
    return Fraction(math.factorial(2 * j), 4 ** j * math.factorial(j))


@lru_cache(maxsize=None)
def _hermite_even(j: int) -> Tuple[int, ...]:
    """Coefficients c_m of H_{2j}(y) = sum_m c_m y^{2m}, physicists' kind."""
    # H_0 = 1, H_1 = 2y, H_{m+1} = 2 y H_m - 2 m H_{m-1}; integer throughout.
    h_prev = [1]
    h_cur = [0, 2]
    if j == 0:
        return (1,)
    for m in range(1, 2 * j):
        h_next = [0] + [2 * c for c in h_cur]
        for i, c in enumerate(h_prev):
            h_next[i] -= 2 * m * c
        h_prev, h_cur = h_cur, h_next
    return tuple(h_cur[0::2])


def _to_mp(q):
    q = Fraction(q)
    return mp.mpf(q.numerator) / q.denominator


@dataclass(frozen=True)
class TestFn:
    """Even rapidly decaying test function A * p(pi (x/sigma)^2) e^{-pi (x/sigma)^2}.

    ``coeffs`` maps monomial degree j >= 1 to the rational coefficient of
    w^j; degree 0 is forbidden so the value at 0 vanishes, and construction
    rejects coefficient sets whose integral over (0, inf) is nonzero.
    ``scale`` and ``amplitude`` stay exact rationals so the Fourier image
    and the scaling orbit keep closed forms.
    """

    __test__ = False  # the name is the analysis term, not a pytest class

    coeffs: Tuple[Tuple[int, Fraction], ...]
    scale: Fraction = Fraction(1)
    amplitude: Fraction = Fraction(1)

    def __post_init__(self):
        pairs = self.coeffs.items() if isinstance(self.coeffs, dict) else self.coeffs
        acc = {}
        for j, a in pairs:
            a = Fraction(a)
            if a == 0:
                continue
            if not isinstance(j, int) or j < 1:
                raise ValueError("monomial degrees must be integers >= 1 "
                                 "(the value at 0 must vanish)")
            acc[j] = acc.get(j, Fraction(0)) + a
        cleaned = tuple(sorted((j, a) for j, a in acc.items() if a != 0))
        if not cleaned:
            raise ValueError("test function has no nonzero coefficients")
        object.__setattr__(self, "coeffs", cleaned)
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "amplitude", Fraction(self.amplitude))
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        if sum(a * _moment_ratio(j) for j, a in cleaned) != 0:
            raise ValueError("coefficients violate the zero-integral constraint")

    @property
    def degree(self) -> int:
        return self.coeffs[-1][0]

    def coeff_map(self) -> dict:
        return dict(self.coeffs)

    def _poly(self, w):
        """p(w) by sparse Horner at the current mp precision."""
        acc = mp.mpf(0)
        prev = None
        for j, a in reversed(self.coeffs):
            if prev is not None:
                acc *= w ** (prev - j)
            acc += _to_mp(a)
            prev = j
        return acc * w ** prev

    def evaluate(self, x, ctx: NumContext = DEFAULT_CONTEXT):
        with ctx.precision(10):
            w = mp.pi * (mp.mpf(x) / _to_mp(self.scale)) ** 2
            val = +(_to_mp(self.amplitude) * self._poly(w) * mp.e ** (-w))
        return val

    def fourier(self) -> "TestFn":
        """Exact Fourier transform; stays inside the family.

        Degree by degree, the image of w^j e^{-w} is
        (-1/4)^j H_{2j}(sqrt(w)) e^{-w}.  The constant Hermite terms cancel
        by the zero-integral constraint, so the image is again a valid
        member (its own integral vanishes because f(0) = 0).
        """
        out: dict = {}
        for j, a in self.coeffs:
            fac = Fraction(-1, 4) ** j * a
            for m, c in enumerate(_hermite_even(j)):
                if c:
                    out[m] = out.get(m, Fraction(0)) + fac * c
        return TestFn(tuple(out.items()), Fraction(1) / self.scale,
                      self.amplitude * self.scale)

    def psi(self, z, ctx: NumContext = DEFAULT_CONTEXT):
        """Closed-form Mellin transform int_0^inf f(u) u^{1/2 - iz} d*u."""
        with ctx.precision(10):
            sp = mp.mpf("0.5") - mp.mpc(0, 1) * mp.mpc(z)
            tot = mp.mpc(0)
            for j, a in self.coeffs:
                tot += _to_mp(a) * mp.gamma(j + sp / 2)
            val = +(_to_mp(self.amplitude) * _to_mp(self.scale) ** sp
                    * mp.pi ** (-sp / 2) * tot / 2)
        return val

    def bv_norm(self, ctx: NumContext = DEFAULT_CONTEXT):
        """Total variation int_0^inf |f'(x)| dx.

        f'(x) = A * (2 pi x / sigma^2) e^{-w} (p'(w) - p(w)), so the
        variation is the sum of |f| jumps between consecutive critical
        points: the positive real roots of q = p' - p plus both ends,
        where f tends to 0.  Root finding replaces any quadrature across
        the |.| kinks.
        """
        deg = self.degree
        q = [Fraction(0)] * (deg + 1)
        for j, a in self.coeffs:
            q[j] -= a
            q[j - 1] += j * a
        with ctx.precision(10):
            dense = [_to_mp(c) for c in reversed(q)]
            while dense and dense[0] == 0:
                dense = dense[1:]
            roots = mp.polyroots(dense, maxsteps=200,
                                 extraprec=10 * ctx.digits) if len(dense) > 1 else []
            crit = []
            for r in roots:
                if abs(mp.im(r)) < mp.mpf(10) ** (-ctx.digits // 2) and mp.re(r) > 0:
                    w = mp.re(r)
                    crit.append(_to_mp(self.scale) * mp.sqrt(w / mp.pi))
            crit.sort()
            total = mp.mpf(0)
            prev_val = mp.mpf(0)
            for x in crit:
                cur = self.evaluate(x, ctx)
                total += abs(cur - prev_val)
                prev_val = cur
            total += abs(prev_val)
            total = +total
        return total


def special_member() -> TestFn:
    """The degree-2 member w (3 - 2 w) e^{-w}; it is its own Fourier transform."""
    return TestFn(((1, Fraction(3)), (2, Fraction(-2))))


def test_family(count: int = 10) -> Tuple[TestFn, ...]:
    """``count`` independent members: the special one plus top degrees 3, 4, ...

    Each added member is w^j - 2 r_j w with r_j the moment ratio, which
    meets the zero-integral constraint since r_1 = 1/2.  Top degrees
    increase strictly, so the span has dimension ``count``.  The
    high-degree members keep control characters well away from zero: the
    Gamma factors in psi grow with the degree, while the special member
    alone decays below 1e-3 already around character frequency 15.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    fam: List[TestFn] = [special_member()]
    j = 3
    while len(fam) < count:
        fam.append(TestFn(((1, -2 * _moment_ratio(j)), (j, Fraction(1)))))
        j += 1
    return tuple(fam)


test_family.__test__ = False  # keep pytest from collecting the builder


def theta_action(f: TestFn, lam) -> TestFn:
    """Scaling action: x -> x / lam on the argument, i.e. scale -> lam * scale.

    ``lam`` must be an exact rational so the orbit stays closed-form.
    """
    lam = Fraction(lam)
    if lam <= 0:
        raise ValueError("scaling parameter must be positive")
    return TestFn(f.coeffs, f.scale * lam, f.amplitude)


# ---------------------------------------------------------------------------
# the summation map E

_SERIES_CAP = 200000


@lru_cache(maxsize=256)
def _fourier_of(f: TestFn) -> TestFn:
    # transform route hits this once per sample; the rational map is pure
    return f.fourier()


def _series_sum(f: TestFn, u, dps: int):
    """sum_{n >= 1} f(n u) at the current precision, truncated at dead tail.

    Terms die like e^{-pi (n u / sigma)^2}; the loop stops once the exponent
    alone is past the floor with the polynomial growth budgeted on top, and
    the remaining tail is dominated by a geometric series with ratio below
    e^{-1}, hence under the floor as well.
    """
    sig = _to_mp(f.scale)
    dead = mp.log(10) * (dps + 5)
    wstop = dead + f.degree * mp.log(max(dead, mp.mpf(3)))
    n_stop = int(mp.ceil(sig * mp.sqrt(wstop / mp.pi) / u)) + 1
    if n_stop > _SERIES_CAP:
        raise ValueError("direct series needs %d terms at u = %s; "
                         "use the transform route" % (n_stop, mp.nstr(u, 8)))
    amp = _to_mp(f.amplitude)
    acc = mp.mpf(0)
    for n in range(1, n_stop + 1):
        w = mp.pi * (n * u / sig) ** 2
        acc += f._poly(w) * mp.e ** (-w)
    return amp * acc


def map_E(f: TestFn, u, ctx: NumContext = DEFAULT_CONTEXT,
          force_direct: bool = False):
    """u^(1/2) * sum_{n >= 1} f(n u), truncated when the Gaussian tail is dead.

    For u below the scale of f the direct series needs ~scale/u terms, so
    evaluation goes through the Fourier transform instead: Poisson summation
    with f(0) = integral f = 0 gives E(f)(u) = E(fhat)(1/u) exactly.
    ``force_direct`` keeps the direct series anyway, which the tests use to
    compare the two routes; it refuses u small enough to need more than
    2e5 terms.
    """
    with ctx.precision(10):
        uu = mp.mpf(u)
        if uu <= 0:
            raise ValueError("u must be positive")
        dps = mp.dps
        if force_direct or uu >= _to_mp(f.scale):
            val = +(mp.sqrt(uu) * _series_sum(f, uu, dps))
        else:
            val = +(mp.sqrt(1 / uu) * _series_sum(_fourier_of(f), 1 / uu, dps))
    return val


# ---------------------------------------------------------------------------
# circle functions

@dataclass(frozen=True)
class CircleFn:
    """Samples of a function on the circle of circumference ``length``.

    ``samples[i]`` is the value at log-coordinate t_i = i * length / M with
    M = len(samples).  Characters are indexed by the winding number k and
    evaluate to e^{2 pi i k t / length} at t.
    """

    length: object
    samples: Tuple
    digits: int

    def fourier_coefficient(self, k: int):
        """(1/M) sum_i F_i e^{-2 pi i k i / M}, the k-th character weight."""
        m_grid = len(self.samples)
        with mp.workdps(self.digits + 10):
            tot = mp.mpc(0)
            for i, val in enumerate(self.samples):
                tot += val * mp.expjpi(mp.mpf(-2 * k * i) / m_grid)
            out = +(tot / m_grid)
        return out

    def reconstruct(self, i: int):
        """Inverse character sum at grid point i; matches samples[i]."""
        m_grid = len(self.samples)
        ks = range(-(m_grid // 2) + 1, m_grid // 2 + 1)
        with mp.workdps(self.digits + 10):
            tot = mp.mpc(0)
            for k in ks:
                tot += (self.fourier_coefficient(k)
                        * mp.expjpi(mp.mpf(2 * k * i) / m_grid))
            out = +tot
        return out

    def character_coefficient(self, s, phase_tol: float = 1e-6):
        """(L/M) sum_i F_i e^{i s t_i} for a character frequency s.

        s must sit on the dual lattice 2 pi Z / L up to ``phase_tol`` (in
        winding units); the winding is then snapped to the exact integer so
        the character is exactly periodic on the grid.
        """
        m_grid = len(self.samples)
        with mp.workdps(self.digits + 10):
            winding = mp.mpf(s) * self.length / (2 * mp.pi)
            k = int(mp.nint(winding))
            if abs(winding - k) > phase_tol * max(1, abs(k)):
                raise ValueError("character frequency %s is not periodic on "
                                 "a circle of length %s (winding %s)"
                                 % (mp.nstr(mp.mpf(s), 8),
                                    mp.nstr(self.length, 8),
                                    mp.nstr(winding, 8)))
            tot = mp.mpc(0)
            for i, val in enumerate(self.samples):
                tot += val * mp.expjpi(mp.mpf(2 * k * i) / m_grid)
            out = +(tot * self.length / m_grid)
        return out


def sigma_mu_E(f: TestFn, mu, grid_size: int,
               ctx: NumContext = DEFAULT_CONTEXT,
               window_pad: int = 0) -> CircleFn:
    """Fold E(f) onto the circle R+*/mu^Z: samples of sum_k E(f)(mu^k e^t).

    The k-window keeps mu^k e^t inside the interval where E(f) exceeds the
    truncation floor; both tails die doubly exponentially (Gaussian decay on
    the large side, the transform-route image of it on the small side).
    ``window_pad`` widens the window by that many lattice steps on each
    side, for the stability checks.
    """
    if grid_size < 4:
        raise ValueError("grid_size must be at least 4")
    with ctx.precision(10):
        mu_v = mp.mpf(mu)
        if mu_v <= 1:
            raise ValueError("mu must exceed 1 (positive circle length)")
        length = mp.log(mu_v)
        sig = _to_mp(f.scale)
        dead = mp.log(10) * (ctx.digits + 20)
        log_hi = mp.log(sig * (mp.sqrt(dead / mp.pi) + 1))
        log_lo = mp.log(sig * mp.sqrt(mp.pi / dead) * mp.mpf("0.8"))
        samples = []
        for i in range(grid_size):
            t = length * i / grid_size
            k_lo = int(mp.ceil((log_lo - t) / length)) - window_pad
            k_hi = int(mp.floor((log_hi - t) / length)) + window_pad
            acc = mp.mpf(0)
            for k in range(k_lo, k_hi + 1):
                acc += map_E(f, mp.e ** (t + k * length), ctx)
            samples.append(+acc)
        out_len = +length
    return CircleFn(out_len, tuple(samples), ctx.digits)


# ---------------------------------------------------------------------------
# Mellin factorization

def mellin_factorization(f: TestFn, z, ctx: NumContext = DEFAULT_CONTEXT):
    """Both routes to int_0^inf E(f)(u) u^{-iz} d*u; returns (lhs, rhs).

    lhs is quadrature in t = log u over the window where E(f) is above the
    truncation floor (doubly exponential decay outside).  rhs is the
    critical-line zeta value at -z times the closed-form psi(z), so the two
    agree identically in z and lhs alone must vanish when 1/2 + i(-z) is a
    zero.
    """
    with ctx.precision(10):
        zz = mp.mpf(z)
        sig = _to_mp(f.scale)
        dead = mp.log(10) * (ctx.digits + 25)
        hi = mp.log(sig * (mp.sqrt(dead / mp.pi) + 1))
        lo = mp.log(sig * mp.sqrt(mp.pi / dead) * mp.mpf("0.5"))
        panels = max(10, int(abs(zz) * float(hi - lo) / 3) + 2)
        lhs = +integrate(lambda t: map_E(f, mp.e ** t, ctx) * mp.expj(-zz * t),
                         lo, hi, ctx, initial_panels=panels)
        rhs = +(zeta_critical(-zz, ctx) * f.psi(zz, ctx))
    return lhs, rhs


# ---------------------------------------------------------------------------
# cycle verification

@dataclass(frozen=True)
class CycleReport:
    """Character-coefficient moduli for one (s, n_cover) circle test."""

    s: float
    n_cover: int
    length: float
    member_moduli: Tuple[float, ...]
    max_modulus: float
    vanishes: bool
    control_s: Optional[float]
    control_moduli: Tuple[float, ...]
    control_max: Optional[float]
    control_detects: Optional[bool]
    vanish_tol: float
    control_tol: float
    grid_size: int

    def to_dict(self) -> dict:
        return {
            "s": self.s, "n_cover": self.n_cover, "length": self.length,
            "member_moduli": list(self.member_moduli),
            "max_modulus": self.max_modulus, "vanishes": self.vanishes,
            "control_s": self.control_s,
            "control_moduli": list(self.control_moduli),
            "control_max": self.control_max,
            "control_detects": self.control_detects,
            "vanish_tol": self.vanish_tol, "control_tol": self.control_tol,
            "grid_size": self.grid_size,
        }


def _grid_for(length, digits: int, windings: int) -> int:
    """Trapezoid grid size: coefficient decay exp(-pi^2 k/(2L)) must reach
    the digit floor before aliasing, plus slack for the probe winding."""
    need = 0.47 * float(length) * (digits + 15) + 16 * (windings + 2)
    size = 64
    while size < need:
        size += 64
    return size


def zeta_cycle_check(s, n_cover: int, f_family: Optional[Sequence[TestFn]] = None,
                     ctx: NumContext = DEFAULT_CONTEXT, mu=None,
                     control_s: Optional[float] = 15.0,
                     vanish_tol: float = 1e-8, control_tol: float = 1e-3,
                     grid_size: Optional[int] = None,
                     phase_tol: float = 1e-3) -> CycleReport:
    """Coefficient test on the circle of length 2 pi n_cover / s.

    Computes the pairing of Sigma_mu E(f) with the character u^{is} for
    every family member.  When 1/2 + i s is a zero every coefficient
    vanishes (the factorization carries the zeta factor); the control
    character at ``control_s`` on its own unit-cover circle stays above
    ``control_tol`` for some member, keeping the test two-sided.  Pass
    ``control_s=None`` to skip the control half.

    ``mu`` overrides the circle (e.g. a detected special point); it must
    satisfy mu^{is} = 1 to ``phase_tol`` in winding units or the call is
    rejected.
    """
    s_f = float(s)
    if s_f <= 0:
        raise ValueError("s must be positive")
    if int(n_cover) != n_cover or n_cover < 1:
        raise ValueError("n_cover must be a positive integer")
    fam = tuple(f_family) if f_family is not None else test_family(10)
    if not fam:
        raise ValueError("family must not be empty")
    with ctx.precision(10):
        if mu is None:
            length = 2 * mp.pi * n_cover / mp.mpf(s)
        else:
            length = mp.log(mp.mpf(mu))
            winding = mp.mpf(s) * length / (2 * mp.pi)
            if abs(winding - n_cover) > phase_tol:
                raise ValueError("mu^{is} is not 1 on this circle: winding "
                                 "%s against cover %d"
                                 % (mp.nstr(winding, 8), n_cover))
        mu_circle = mp.e ** length
        m_grid = grid_size if grid_size else _grid_for(length, ctx.digits, n_cover)
        moduli = []
        for f in fam:
            circ = sigma_mu_E(f, mu_circle, m_grid, ctx)
            coef = circ.character_coefficient(s, phase_tol=max(phase_tol, 1e-6))
            moduli.append(float(abs(coef)))
        ctrl_moduli: List[float] = []
        if control_s is not None:
            c_len = 2 * mp.pi / mp.mpf(control_s)
            c_mu = mp.e ** c_len
            c_grid = _grid_for(c_len, ctx.digits, 1)
            for f in fam:
                circ = sigma_mu_E(f, c_mu, c_grid, ctx)
                coef = circ.character_coefficient(control_s)
                ctrl_moduli.append(float(abs(coef)))
        out_len = float(length)
    max_mod = max(moduli)
    return CycleReport(
        s=s_f, n_cover=int(n_cover), length=out_len,
        member_moduli=tuple(moduli), max_modulus=max_mod,
        vanishes=max_mod < vanish_tol,
        control_s=None if control_s is None else float(control_s),
        control_moduli=tuple(ctrl_moduli),
        control_max=max(ctrl_moduli) if ctrl_moduli else None,
        control_detects=(max(ctrl_moduli) > control_tol) if ctrl_moduli else None,
        vanish_tol=vanish_tol, control_tol=control_tol, grid_size=m_grid)


# ---------------------------------------------------------------------------
# lattice scan

class LatticeHit(NamedTuple):
    length: float
    zero_index: int
    n_cover: int
    max_modulus: float
    vanishes: bool


class ControlPoint(NamedTuple):
    length: float
    s: float
    max_modulus: float


@dataclass(frozen=True)
class ScanReport:
    """Lattice confirmations and off-lattice non-vanishing evidence."""

    hits: Tuple[LatticeHit, ...]
    controls: Tuple[ControlPoint, ...]
    vanish_tol: float
    control_floor: float

    @property
    def all_confirmed(self) -> bool:
        return bool(self.hits) and all(h.vanishes for h in self.hits)

    @property
    def controls_clear(self) -> bool:
        return all(c.max_modulus > self.control_floor for c in self.controls)


def hl_nonzero_scan(L_grid, s_max, ctx: NumContext = DEFAULT_CONTEXT,
                    f_family: Optional[Sequence[TestFn]] = None,
                    zeros: Optional[ZetaZerosTable] = None,
                    vanish_tol: float = 1e-8,
                    control_lengths: Sequence[float] = (1.0,),
                    control_floor: float = 1e-6,
                    grid_size: Optional[int] = None) -> ScanReport:
    """Enumerate circle lengths L = 2 pi n / s_j inside ``L_grid`` and
    confirm each by the coefficient test; probe off-lattice lengths too.

    ``L_grid`` is the closed interval (lo, hi) of lengths; zeros up to
    ``s_max`` from the reference table (or ``zeros``) generate the lattice.
    Each lattice length gets a full cycle check (coefficients vanish).
    Each ``control_lengths`` entry gets every admissible character
    frequency 2 pi m / L up to ``s_max`` checked for NON-vanishing, so the
    lattice is visible from both sides.  Control lengths must be chosen
    off the lattice; the report carries the raw moduli either way.
    """
    lo, hi = float(L_grid[0]), float(L_grid[1])
    if not 0 < lo < hi:
        raise ValueError("need 0 < L_lo < L_hi")
    s_cap = float(s_max)
    fam = tuple(f_family) if f_family is not None else test_family(10)
    table = zeros if zeros is not None else load_zeros()
    two_pi = 2 * math.pi
    hits = []
    for idx, ordinate in enumerate(table, start=1):
        s_j = float(ordinate)
        if s_j > s_cap:
            break
        n_lo = max(1, int(math.ceil(lo * s_j / two_pi - 1e-12)))
        n_hi = int(math.floor(hi * s_j / two_pi + 1e-12))
        for n in range(n_lo, n_hi + 1):
            rep = zeta_cycle_check(ordinate, n, fam, ctx, control_s=None,
                                   vanish_tol=vanish_tol, grid_size=grid_size)
            hits.append(LatticeHit(two_pi * n / s_j, idx, n,
                                   rep.max_modulus, rep.vanishes))
    controls = []
    with ctx.precision(10):
        for length in control_lengths:
            len_v = mp.mpf(length)
            m_max = int(math.floor(s_cap * float(len_v) / two_pi))
            if m_max < 1:
                continue
            m_grid = _grid_for(len_v, ctx.digits, m_max)
            circles = [sigma_mu_E(f, mp.e ** len_v, m_grid, ctx) for f in fam]
            for m in range(1, m_max + 1):
                s_m = 2 * mp.pi * m / len_v
                mod = max(float(abs(c.character_coefficient(s_m)))
                          for c in circles)
                controls.append(ControlPoint(float(len_v), float(s_m), mod))
    return ScanReport(tuple(hits), tuple(controls), vanish_tol, control_floor)
