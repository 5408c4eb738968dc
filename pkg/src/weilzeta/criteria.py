"""Zero-detection criteria, spectral discrepancy statistics, and the
extraction sweep that recovers critical-line zeros from the conditioned
circle operator.

Four signals mark the special values of mu where an eigenvalue of the
conditioned operator locks onto a zero:

* coincidence gap: lambda_n computed with k and with k+1 projection
  conditions nearly agree (the gap lambda_n(k) - lambda_n(k+1) >= 0
  dips to ~0 at special points);
* geometric progression: for fixed n the special mu values form an
  approximate geometric progression of ratio exp(2*pi/zeta_n), checked
  through ``progression_ratios``;
* quantization residual: |mu^(i*lambda_n) - 1| vanishes, i.e. lambda_n
  sits on a lattice line 2*pi*j/log(mu);
* eigenvector distance: the eigenvector for lambda_n is close to a free
  rotation mode e_j of the unperturbed operator.

Everything here runs in hardware floats.  The float spectra agree with
the big-float route to ~1e-8 (see the operator tests) while detection
thresholds live at 1e-2..5e-2, so the fast lane is the right tool; mu
refinement stops at 1e-4 which is still far above float noise.

Extraction strategy: sweep eigenvalue indices m = 1..n_max+1 over a
coarse mu grid, refine each dip of the chosen criterion by golden
section with the conditioning order k frozen (k jumps at band-count
transitions create fake grid dips whose refinement runs to the bracket
edge; those are rejected).  A dip is accepted only when all three
pointwise scores are simultaneously small.  Accepted locks are then
clustered by locked eigenvalue: an index m can lock onto a neighboring
zero at some mu, so the cluster value, not the sweep index, identifies
the zero.  Each cluster is matched to the nearest reference zero and
the best-scoring event in the cluster is reported.

Discrepancy statistics compare the positive spectrum below 2*pi*mu
against the reference zeros by index: mean absolute error, root mean
square, and the normalized form dividing by the spread of the computed
eigenvalues (lambda_max - lambda_min over the compared window).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp

from .context import NumContext, DEFAULT_CONTEXT
from .dirac import b_block_f64
from .prolate import nu_f64

__all__ = [
    "ZetaZerosTable", "load_zeros", "SpecialPoint", "CriterionReport",
    "DiscrepancyResult", "DEFAULT_THRESHOLDS", "phase_residual",
    "coincidence_gap", "quantization_residual", "eigvec_distance",
    "k_coincidence", "extract_zeros", "discrepancy", "progression_ratios",
    "sweep_conditioning_order",
]

DEFAULT_TRUNC = 64
DEFAULT_ORDER = 32
DEFAULT_GRID = (5.0, 16.5, 0.1)

# accept a lock only when every pointwise signal is below its bound
DEFAULT_THRESHOLDS = {"gap": 1e-2, "quantization": 1e-2, "eigvec": 5e-2}

_CRITERIA = ("k_coincidence", "quantization", "eigvec_distance")

_COARSE_GATE = 0.15     # grid dips above this are never refined
_KERNEL_CUT = 1e-6      # singular values below this count as kernel

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# reference zeros

class ZetaZerosTable:
    """Ordered imaginary parts of the first critical-line zeros."""

    def __init__(self, values: Sequence):
        # parse above the 20 digits the shipped table carries, regardless of
        # the ambient precision at load time
        with mp.workdps(max(mp.dps, 30)):
            vals = tuple(mp.mpf(v) for v in values)
        if len(vals) < 2:
            raise ValueError("need at least two zeros")
        for a, b in zip(vals, vals[1:]):
            if not a < b:
                raise ValueError("zeros must be strictly increasing")
        if not 14.0 < float(vals[0]) < 14.3:
            raise ValueError("first entry should be near 14.13, got %s"
                             % mp.nstr(vals[0], 8))
        self.values = vals

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def zero(self, n: int):
        """n-th zero ordinate, 1-based."""
        if not 1 <= n <= len(self.values):
            raise IndexError("zero index %d outside 1..%d"
                             % (n, len(self.values)))
        return self.values[n - 1]

    def floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values])


def load_zeros(path: Optional[str] = None) -> ZetaZerosTable:
    """Load the reference zeros list (packaged file by default).

    Format: one decimal ordinate per line, ``#`` starts a comment.
    """
    if path is None:
        text = (resources.files("weilzeta") / "data" /
                "zeta_zeros_50.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    vals = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            vals.append(line)
    return ZetaZerosTable(vals)


# ---------------------------------------------------------------------------
# fast-lane spectral engine

_SVD_CACHE: dict = {}
_CACHE_LIMIT = 512


def sweep_conditioning_order(mu, ctx: NumContext = DEFAULT_CONTEXT) -> int:
    """Even conditioning order used by the sweeps at this mu.

    Largest even k with k <= nu(mu) - 2, so that the paired comparison
    at k+1 stays inside the valid range 0..nu-1 for every mu.
    """
    k = nu_f64(float(mu)) - 2
    if k % 2:
        k -= 1
    return max(k, 0)


def _svd(mu: float, k: int, trunc_n: int, order: int):
    """Positive singular values (ascending) and vectors of the B block."""
    key = (round(mu, 12), k, trunc_n, order)
    hit = _SVD_CACHE.get(key)
    if hit is None:
        B = b_block_f64(math.sqrt(mu), k, trunc_n, order=order)
        U, s, Vt = np.linalg.svd(B, full_matrices=False)
        keep = s[::-1] > _KERNEL_CUT
        hit = (s[::-1][keep].copy(), U[:, ::-1][:, keep].copy(),
               Vt[::-1][keep].copy())
        if len(_SVD_CACHE) >= _CACHE_LIMIT:
            _SVD_CACHE.pop(next(iter(_SVD_CACHE)))
        _SVD_CACHE[key] = hit
    return hit


def _eigenvalue(mu, n, k, trunc_n, order):
    s, _, _ = _svd(mu, k, trunc_n, order)
    if n > s.size:
        raise ValueError("index %d beyond the %d positive eigenvalues"
                         % (n, s.size))
    return float(s[n - 1])


def phase_residual(eigenvalue, mu) -> float:
    """|mu^(i*eigenvalue) - 1| = 2|sin(eigenvalue*log(mu)/2)|."""
    return 2.0 * abs(math.sin(float(eigenvalue) * math.log(float(mu)) / 2.0))


def coincidence_gap(mu, n: int, k: Optional[int] = None,
                    ctx: NumContext = DEFAULT_CONTEXT,
                    trunc_n: int = DEFAULT_TRUNC,
                    order: int = DEFAULT_ORDER) -> float:
    """lambda_n at conditioning order k minus lambda_n at k+1 (>= 0)."""
    if k is None:
        k = sweep_conditioning_order(mu, ctx)
    a = _eigenvalue(float(mu), n, k, trunc_n, order)
    b = _eigenvalue(float(mu), n, k + 1, trunc_n, order)
    return a - b


def quantization_residual(mu, n: int, k: Optional[int] = None,
                          ctx: NumContext = DEFAULT_CONTEXT,
                          trunc_n: int = DEFAULT_TRUNC,
                          order: int = DEFAULT_ORDER) -> float:
    """Distance of mu^(i*lambda_n) from 1 on the unit circle."""
    if k is None:
        k = sweep_conditioning_order(mu, ctx)
    lam = _eigenvalue(float(mu), n, k, trunc_n, order)
    return phase_residual(lam, mu)


def eigvec_distance(mu, n: int, k: Optional[int] = None,
                    ctx: NumContext = DEFAULT_CONTEXT,
                    trunc_n: int = DEFAULT_TRUNC,
                    order: int = DEFAULT_ORDER) -> Tuple[float, int]:
    """Hilbert distance of the n-th eigenvector to the nearest free mode.

    The eigenvector for +lambda_n is (v + i u)/sqrt(2) with (v, u) the
    singular pair of the B block; the free mode e_j is (E_j + i E_-j)/
    sqrt(2).  Minimizing the distance over a unit phase gives
    sqrt(2 - 2|c|) with c = (v[j] + u[j-1])/2.  j runs over a window
    around the rotation count lambda_n*log(mu)/(2*pi); the minimizing j
    is returned with the distance.
    """
    if k is None:
        k = sweep_conditioning_order(mu, ctx)
    mu = float(mu)
    s, U, Vt = _svd(mu, k, trunc_n, order)
    if n > s.size:
        raise ValueError("index %d beyond the %d positive eigenvalues"
                         % (n, s.size))
    lam = float(s[n - 1])
    u = U[:, n - 1]
    v = Vt[n - 1]
    jc = int(round(lam * math.log(mu) / (2.0 * math.pi)))
    best, best_j = 2.0, max(1, min(trunc_n, jc))
    for j in range(max(1, jc - 3), min(trunc_n, jc + 3) + 1):
        c = abs(v[j] + u[j - 1]) / 2.0
        d = math.sqrt(max(0.0, 2.0 - 2.0 * c))
        if d < best:
            best, best_j = d, j
    return best, best_j


def progression_ratios(mus: Sequence[float]) -> List[float]:
    """Ratios of consecutive special mu values (tests the scale law)."""
    mus = [float(m) for m in mus]
    return [b / a for a, b in zip(mus, mus[1:])]


# ---------------------------------------------------------------------------
# sweep machinery

class SpecialPoint(NamedTuple):
    mu: float
    eigenvalue: float
    score: float


class _Event(NamedTuple):
    m: int
    mu: float
    eigenvalue: float
    gap: Optional[float]
    quant: float
    dist: float

    def composite(self) -> float:
        worst = max(self.quant, self.dist)
        if self.gap is not None:
            worst = max(worst, abs(self.gap))
        return worst


def _score_fn(criterion: str, trunc_n: int, order: int):
    """Pointwise score used for dip detection; inf when undefined."""
    def gap(mu, m, k):
        try:
            return abs(coincidence_gap(mu, m, k, trunc_n=trunc_n,
                                       order=order))
        except ValueError:
            return math.inf

    def quant(mu, m, k):
        try:
            return quantization_residual(mu, m, k, trunc_n=trunc_n,
                                         order=order)
        except ValueError:
            return math.inf

    def dist(mu, m, k):
        try:
            return eigvec_distance(mu, m, k, trunc_n=trunc_n,
                                   order=order)[0]
        except ValueError:
            return math.inf

    return {"k_coincidence": gap, "quantization": quant,
            "eigvec_distance": dist}[criterion]


def _golden_min(f, a: float, b: float, tol: float) -> float:
    x1 = b - _GOLD * (b - a)
    x2 = a + _GOLD * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLD * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLD * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def _refine_dips(score, m: int, grid: np.ndarray, ks: List[int],
                 refine_tol: float, gate: float):
    """Refine grid local minima below the gate; drop edge-runaways."""
    vals = [score(mu, m, ks[i]) for i, mu in enumerate(grid)]
    out = []
    for i in range(1, len(grid) - 1):
        if vals[i] > gate or vals[i] > vals[i - 1] or vals[i] > vals[i + 1]:
            continue
        k = ks[i]
        a, b = float(grid[i - 1]), float(grid[i + 1])
        mu_star = _golden_min(lambda x: score(x, m, k), a, b, refine_tol)
        # a dip created by a k jump between grid points refines to the
        # bracket edge; a genuine dip lands in the interior
        if min(mu_star - a, b - mu_star) < 5.0 * refine_tol:
            continue
        out.append((mu_star, k))
    return out


def k_coincidence(n: int, mu_grid=None, ctx: NumContext = DEFAULT_CONTEXT,
                  trunc_n: int = DEFAULT_TRUNC, order: int = DEFAULT_ORDER,
                  threshold: float = DEFAULT_THRESHOLDS["gap"],
                  refine_tol: float = 1e-4) -> List[SpecialPoint]:
    """Special mu values where lambda_n barely moves under one more
    conditioning constraint.

    Scans the grid (default 5..16.5 step 0.1), refines every dip of the
    gap by golden section with k frozen, and keeps refined points whose
    gap is below the threshold.  The eigenvalue reported at each special
    point approximates a zero ordinate.
    """
    if mu_grid is None:
        mu_grid = np.arange(DEFAULT_GRID[0], DEFAULT_GRID[1] + 1e-9,
                            DEFAULT_GRID[2])
    grid = np.asarray([float(m) for m in mu_grid])
    ks = [sweep_conditioning_order(mu, ctx) for mu in grid]
    score = _score_fn("k_coincidence", trunc_n, order)
    points = []
    for mu_star, k in _refine_dips(score, n, grid, ks, refine_tol,
                                   _COARSE_GATE):
        g = score(mu_star, n, k)
        if g < threshold:
            lam = _eigenvalue(mu_star, n, k, trunc_n, order)
            points.append(SpecialPoint(mu_star, lam, g))
    points.sort(key=lambda p: p.mu)
    return points


# ---------------------------------------------------------------------------
# zero extraction

@dataclass(frozen=True)
class CriterionReport:
    """Extraction outcome for one zero index.

    ``special_mus`` lists every accepted lock event for this zero in
    increasing mu; ``eigenvalues`` and ``scores`` align with it, each
    score a (gap, quantization, distance) triple where gap may be None
    when the paired order k+1 left the valid range at the refined mu.
    ``error`` is |best_eigenvalue - zero|, None when nothing was found.
    """
    n: int
    zero: float
    special_mus: Tuple[float, ...]
    eigenvalues: Tuple[float, ...]
    scores: Tuple[Tuple[Optional[float], float, float], ...]
    best_mu: Optional[float]
    best_eigenvalue: Optional[float]
    error: Optional[float]

    @property
    def found(self) -> bool:
        return bool(self.special_mus)


def _gate(ev: _Event, thr: dict) -> bool:
    if ev.gap is not None and abs(ev.gap) >= thr["gap"]:
        return False
    return ev.quant < thr["quantization"] and ev.dist < thr["eigvec"]


def extract_zeros(n_max: int, mu_interval=None,
                  criterion: str = "eigvec_distance",
                  ctx: NumContext = DEFAULT_CONTEXT,
                  step: float = DEFAULT_GRID[2],
                  trunc_n: int = DEFAULT_TRUNC, order: int = DEFAULT_ORDER,
                  thresholds: Optional[dict] = None,
                  cluster_radius: float = 0.3, refine_tol: float = 1e-4,
                  zeros: Optional[ZetaZerosTable] = None
                  ) -> List[CriterionReport]:
    """Recover the first n_max zero ordinates from spectral lock events.

    Sweeps eigenvalue indices 1..n_max+1 over the mu interval, detecting
    dips of the chosen criterion and accepting only events where gap,
    quantization residual, and eigenvector distance are simultaneously
    below their thresholds.  Events are clustered by locked eigenvalue
    and each cluster is matched to the nearest reference zero; a zero
    with no surviving cluster is reported as missing (error None), never
    fabricated.
    """
    if criterion not in _CRITERIA:
        raise ValueError("criterion must be one of %s" % (_CRITERIA,))
    if mu_interval is None:
        mu_interval = (DEFAULT_GRID[0], DEFAULT_GRID[1])
    lo, hi = float(mu_interval[0]), float(mu_interval[1])
    if not lo < hi:
        raise ValueError("empty mu interval")
    thr = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        thr.update(thresholds)
    if zeros is None:
        zeros = load_zeros()
    zvals = zeros.floats()

    grid = np.arange(lo, hi + 1e-9, step)
    ks = [sweep_conditioning_order(mu, ctx) for mu in grid]
    score = _score_fn(criterion, trunc_n, order)

    events: List[_Event] = []
    for m in range(1, n_max + 2):
        for mu_star, k in _refine_dips(score, m, grid, ks, refine_tol,
                                       _COARSE_GATE):
            try:
                lam = _eigenvalue(mu_star, m, k, trunc_n, order)
            except ValueError:
                continue
            try:
                g = coincidence_gap(mu_star, m, k, trunc_n=trunc_n,
                                    order=order)
            except ValueError:
                g = None
            q = phase_residual(lam, mu_star)
            d = eigvec_distance(mu_star, m, k, trunc_n=trunc_n,
                                order=order)[0]
            ev = _Event(m, mu_star, lam, g, q, d)
            if _gate(ev, thr):
                events.append(ev)

    # cluster accepted events by locked eigenvalue
    events.sort(key=lambda e: e.eigenvalue)
    clusters: List[List[_Event]] = []
    for ev in events:
        if clusters and ev.eigenvalue - clusters[-1][-1].eigenvalue \
                < cluster_radius:
            clusters[-1].append(ev)
        else:
            clusters.append([ev])

    # match each cluster to the nearest reference zero; keep the best
    # cluster per zero index
    assigned: dict = {}
    for cl in clusters:
        best = min(cl, key=_Event.composite)
        j = int(np.argmin(np.abs(zvals - best.eigenvalue))) + 1
        err = abs(best.eigenvalue - zvals[j - 1])
        if j not in assigned or err < assigned[j][0]:
            assigned[j] = (err, best, cl)

    reports = []
    for n in range(1, n_max + 1):
        zn = float(zvals[n - 1])
        if n in assigned:
            err, best, cl = assigned[n]
            cl = sorted(cl, key=lambda e: e.mu)
            reports.append(CriterionReport(
                n=n, zero=zn,
                special_mus=tuple(e.mu for e in cl),
                eigenvalues=tuple(e.eigenvalue for e in cl),
                scores=tuple((e.gap, e.quant, e.dist) for e in cl),
                best_mu=best.mu, best_eigenvalue=best.eigenvalue,
                error=err))
        else:
            reports.append(CriterionReport(
                n=n, zero=zn, special_mus=(), eigenvalues=(), scores=(),
                best_mu=None, best_eigenvalue=None, error=None))
    return reports


# ---------------------------------------------------------------------------
# discrepancy statistics

class DiscrepancyResult(NamedTuple):
    absolute: float
    root_mean_square: float
    normalized: float


def discrepancy(mu, k: Optional[int] = None,
                ctx: NumContext = DEFAULT_CONTEXT,
                trunc_n: int = DEFAULT_TRUNC, order: int = DEFAULT_ORDER,
                zeros: Optional[ZetaZerosTable] = None) -> DiscrepancyResult:
    """Index-paired deviation of the spectrum below 2*pi*mu from zeros.

    absolute: mean |lambda_j - zeta_j|; root_mean_square: the rms of the
    same differences; normalized: rms divided by the spread
    lambda_max - lambda_min of the compared eigenvalues.
    """
    mu = float(mu)
    if mu <= 1.0:
        raise ValueError("mu must exceed 1 (positive circle length)")
    if k is None:
        k = sweep_conditioning_order(mu, ctx)
    if zeros is None:
        zeros = load_zeros()
    s, _, _ = _svd(mu, k, DEFAULT_TRUNC if trunc_n is None else trunc_n,
                   order)
    lam = s[s <= 2.0 * math.pi * mu]
    if lam.size == 0:
        raise ValueError("no eigenvalues below 2*pi*mu = %.3f" % (2 * math.pi * mu))
    if lam.size > len(zeros):
        raise ValueError("reference table too short: need %d zeros"
                         % lam.size)
    diff = lam - zeros.floats()[:lam.size]
    absolute = float(np.mean(np.abs(diff)))
    rms = float(np.sqrt(np.mean(diff * diff)))
    spread = float(lam[-1] - lam[0])
    if spread <= 0:
        raise ValueError("degenerate spectral window")
    return DiscrepancyResult(absolute, rms, rms / spread)
