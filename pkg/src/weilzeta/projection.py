"""Projection onto pushed-forward band-limited functions.

The map E sends f to u^{1/2} sum_{r>0} f(ru); applied to the vanishing-at-0
prolate combinations phi_n and restricted to [1/lam, lam] it lands in the
span of the log-periodic basis eta_j(u) = xi_j(log u).  Components follow
from the support of phi_n (only r < lam contributes) and the u -> 1/u
symmetry of E(phi_n) with sign (-1)^n, which also forces each vector into a
single grading block: n even -> cosine block (j >= 0), n odd -> sine block
(j < 0).  Gram-Schmidt within each block turns the raw vectors into the
orthonormal epsilon_n spanning the projection.

E_N coordinate layout used package-wide: a vector over eta_j, |j| <= N, is
a list of length 2N+1 with slot i holding j = i for i <= N (constant and
cosines) and j = -(i - N) for i > N (sines).
"""

import math

import numpy as np
from mpmath import mp

from .context import NumContext, DEFAULT_CONTEXT
from .numkernel import SymMatrix, gauss_legendre, sym_eigen
from .prolate import ProlateError, _eval_eta_f64, nu, nu_f64, phi_fn, \
    prolate_coeffs_f64

__all__ = ["ProjectionError", "ProlateProjection", "en_index",
           "e_phi_components", "build_projection", "build_projection_f64"]


class ProjectionError(ArithmeticError):
    pass


def en_index(j, N):
    """Slot of eta_j in the package-wide E_N layout."""
    if abs(j) > N:
        raise ValueError("|j| = %d exceeds N = %d" % (abs(j), N))
    return j if j >= 0 else N - j


_NU_CACHE = {}


def _nu_cached(mu, ctx):
    key = (mp.nstr(mp.mpf(mu), 25), ctx.digits)
    hit = _NU_CACHE.get(key)
    if hit is None:
        hit = nu(mu, ctx)
        _NU_CACHE[key] = hit
    return hit


def _raw_components(ns, lam, N, ctx):
    """Component vectors of E(phi_n) for every n in ns, sharing the
    quadrature tables across n and j.  Returns {n: full E_N vector}."""
    with ctx.precision(10):
        lam = mp.mpf(lam)
        L = 2 * mp.log(lam)
        mu = lam * lam
        phis = {n: phi_fn(mu, n, ctx) for n in ns}
        out = {n: [mp.mpf(0)] * (2 * N + 1) for n in ns}
        nodes, wts = gauss_legendre(ctx.quad_order, mp.dps)
        root = mp.sqrt(2 / L)
        r = 1
        while r < lam:
            R = mp.log(lam / r)
            panels = 2 + int(N * R / L)
            h = R / panels
            tv = []
            base = []
            for p in range(panels):
                a = p * h
                for x, w in zip(nodes, wts):
                    t = a + (x + 1) * h / 2
                    tv.append(t)
                    base.append(w * h / 2 * mp.e ** (t / 2))
            vals = {n: [phis[n](r * mp.e ** t) for t in tv] for n in ns}
            prods = {n: [b * v for b, v in zip(base, vals[n])]
                     for n in ns}
            c1 = [mp.cos(2 * mp.pi * t / L) for t in tv]
            s1 = [mp.sin(2 * mp.pi * t / L) for t in tv]
            evens = [n for n in ns if n % 2 == 0]
            odds = [n for n in ns if n % 2 == 1]
            # cosine block, j = 0..N, Chebyshev recurrence in j per node
            if evens:
                prev = [mp.mpf(1)] * len(tv)
                cur = c1[:]
                for n in evens:
                    out[n][0] += 2 * mp.fsum(prods[n]) / mp.sqrt(L)
                for j in range(1, N + 1):
                    sgn = root if j % 2 == 0 else -root
                    for n in evens:
                        acc = mp.fsum(p * c for p, c in zip(prods[n], cur))
                        out[n][j] += 2 * sgn * acc
                    prev, cur = cur, [2 * a * b - c for a, b, c
                                      in zip(c1, cur, prev)]
            # sine block, j = -1..-N
            if odds:
                prev = [mp.mpf(0)] * len(tv)
                cur = s1[:]
                for a_ in range(1, N + 1):
                    sgn = root if a_ % 2 == 0 else -root
                    for n in odds:
                        acc = mp.fsum(p * s for p, s in zip(prods[n], cur))
                        out[n][N + a_] += 2 * sgn * acc
                    prev, cur = cur, [2 * a * b - c for a, b, c
                                      in zip(c1, cur, prev)]
            r += 1
        return out


def e_phi_components(n, lam, N, ctx=DEFAULT_CONTEXT):
    """E_N component vector of E(phi_n); zero off the parity block of n."""
    with ctx.precision(5):
        mu = mp.mpf(lam) ** 2
        cap = _nu_cached(mu, ctx)
        if not 2 <= n <= cap + 1:
            raise ValueError("n = %d outside 2..nu+1 = 2..%d" % (n, cap + 1))
    return _raw_components([n], lam, N, ctx)[n]


def _block_slice(parity, N):
    return slice(0, N + 1) if parity > 0 else slice(N + 1, 2 * N + 1)


def _gram_schmidt(raw, digits):
    """Modified Gram-Schmidt with one re-orthogonalization pass over
    [(n, vector)] lists; raises on near-linear dependence."""
    floor = mp.mpf(10) ** (-(digits // 2))
    out = []
    for n, v in raw:
        scale = mp.sqrt(mp.fsum(x * x for x in v))
        w = list(v)
        for _ in range(2):
            for _, u in out:
                c = mp.fsum(a * b for a, b in zip(u, w))
                w = [a - c * b for a, b in zip(w, u)]
        norm = mp.sqrt(mp.fsum(x * x for x in w))
        if norm < floor * scale:
            raise ProjectionError(
                "component vector for n = %d is numerically dependent on "
                "its predecessors (pivot %s)" % (n, mp.nstr(norm, 5)))
        out.append((n, [x / norm for x in w]))
    return out


class ProlateProjection:
    """Orthonormal epsilon vectors and the rank-k projection they span.

    ``vectors`` maps n (2..k+1) to a full E_N coordinate vector; parity of
    the vector is the parity of n (+1 cosine block, -1 sine block).
    """

    def __init__(self, lam, k, N, vectors):
        self.lam = lam
        self.k = k
        self.N = N
        self.vectors = vectors

    def parity(self, n):
        return 1 if n % 2 == 0 else -1

    def block_vector(self, n):
        """Vector restricted to its own parity block coordinates."""
        v = self.vectors[n]
        return v[_block_slice(self.parity(n), self.N)]

    def matrix(self, ctx=DEFAULT_CONTEXT):
        """Pi as a full E_N symmetric matrix (block diagonal by parity)."""
        size = 2 * self.N + 1
        P = SymMatrix(size)
        with ctx.precision(5):
            for n, v in self.vectors.items():
                for i in range(size):
                    if v[i] == 0:
                        continue
                    for j in range(i + 1):
                        if v[j] == 0:
                            continue
                        P.set(i, j, P.get(i, j) + v[i] * v[j])
        return P

    def block_matrix(self, parity, ctx=DEFAULT_CONTEXT):
        """Pi restricted to one parity block (size N+1 even, N odd)."""
        sl = _block_slice(parity, self.N)
        size = sl.stop - sl.start
        P = SymMatrix(size)
        with ctx.precision(5):
            for n, v in self.vectors.items():
                if self.parity(n) != parity:
                    continue
                b = v[sl]
                for i in range(size):
                    for j in range(i + 1):
                        P.set(i, j, P.get(i, j) + b[i] * b[j])
        return P


def build_projection(lam, k, N, ctx=DEFAULT_CONTEXT):
    """Gram-Schmidt the raw component vectors for n = 2..k+1 into the
    rank-k projection; blocks are processed separately, increasing n."""
    with ctx.precision(5):
        lam = mp.mpf(lam)
        if lam <= 1:
            raise ValueError("lam must exceed 1")
        cap = _nu_cached(lam * lam, ctx)
        if not 0 <= k < cap:
            raise ValueError("k = %d outside 0..nu-1 = 0..%d" % (k, cap - 1))
    ns = list(range(2, k + 2))
    if not ns:
        return ProlateProjection(lam, k, N, {})
    raw = _raw_components(ns, lam, N, ctx)
    with ctx.precision(10):
        vectors = {}
        for parity in (0, 1):
            block = [(n, raw[n]) for n in ns if n % 2 == parity]
            for n, v in _gram_schmidt(block, ctx.digits):
                vectors[n] = v
    return ProlateProjection(lam, k, N, vectors)


# -- f64 mirror lane ---------------------------------------------------------

class PhiF64:
    """Float mirror of the vanishing-at-0 combination phi_n."""

    def __init__(self, mu, n):
        self.lam = math.sqrt(mu)
        cn, _ = prolate_coeffs_f64(mu, n)
        cp, _ = prolate_coeffs_f64(mu, n % 2)
        self.cn, self.cp = cn, cp
        self.wa = _eval_eta_f64(cp, 0.0)
        self.wb = -_eval_eta_f64(cn, 0.0)

    def __call__(self, x):
        eta = np.asarray(x) / self.lam
        val = (self.wa * _eval_eta_f64(self.cn, eta)
               + self.wb * _eval_eta_f64(self.cp, eta))
        return np.where(np.abs(eta) <= 1, val, 0.0)


def build_projection_f64(lam, k, N, order=32):
    """Float lane: returns {n: E_N vector} of orthonormal epsilon vectors."""
    mu = lam * lam
    cap = nu_f64(mu)
    if not 0 <= k < cap:
        raise ValueError("k = %d outside 0..nu-1 = 0..%d" % (k, cap - 1))
    ns = list(range(2, k + 2))
    if not ns:
        return {}
    L = 2 * math.log(lam)
    phis = {n: PhiF64(mu, n) for n in ns}
    raw = {n: np.zeros(2 * N + 1) for n in ns}
    nodes, wts = np.polynomial.legendre.leggauss(order)
    root = math.sqrt(2 / L)
    r = 1
    while r < lam:
        R = math.log(lam / r)
        panels = 2 + int(N * R / L)
        h = R / panels
        t = np.concatenate([(nodes + 1) * h / 2 + p * h
                            for p in range(panels)])
        base = np.tile(wts * h / 2, panels) * np.exp(t / 2)
        js = np.arange(N + 1)
        cosm = np.cos(np.outer(js, 2 * np.pi * t / L))
        sinm = np.sin(np.outer(js, 2 * np.pi * t / L))
        sgn = np.where(js % 2 == 0, root, -root)
        for n in ns:
            prod = base * phis[n](r * np.exp(t))
            if n % 2 == 0:
                comp = 2 * sgn * (cosm @ prod)
                comp[0] = 2 * (prod.sum()) / math.sqrt(L)
                raw[n][:N + 1] += comp
            else:
                raw[n][N + 1:] += 2 * sgn[1:] * (sinm[1:] @ prod)
        r += 1
    out = {}
    for parity in (0, 1):
        block = [n for n in ns if n % 2 == parity]
        basis = []
        for n in block:
            w = raw[n].copy()
            for _ in range(2):
                for u in basis:
                    w -= (u @ w) * u
            norm = np.linalg.norm(w)
            if norm < 1e-8 * np.linalg.norm(raw[n]):
                raise ProjectionError(
                    "component vector for n = %d is numerically dependent"
                    % n)
            basis.append(w / norm)
            out[n] = basis[-1]
    return out
