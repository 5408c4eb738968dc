"""Arbitrary-precision numerical kernel.

Contents:

* Gauss-Legendre nodes at arbitrary precision (Newton on the Legendre
  recurrence, cached per (order, dps)), and an adaptive panel-doubling
  integrator ``integrate`` with optional declared endpoint singularity
  (x-a)^alpha, alpha > -1, removed by the substitution x = a + u^(1/(1+alpha)).

* ``SymMatrix``: dense symmetric matrix of mpf entries with decimal-text
  serialization (round-trips to ~10^(-digits+2)).

* ``sym_eigen``: cyclic-by-rows Jacobi eigensolver.  Jacobi is used instead of
  shifted QR because the spectra handled here span ~48 orders of magnitude and
  Jacobi preserves the tiny eigenvalues to high relative accuracy; convergence
  is declared when the off-diagonal Frobenius norm falls below
  eig_tol * ||A||_F.

* ``tridiag_eigen``: Sturm-sequence bisection + inverse iteration for
  symmetric tridiagonal matrices (the prolate operator in the Legendre basis);
  O(n) per eigenvalue evaluation, so cheap even at 120 digits.

All routines are deterministic: no randomness, fixed iteration orders.
"""

from typing import List, Optional, Sequence, Tuple

from mpmath import mp

from .context import NumContext

# ============================================================================
# Gauss-Legendre nodes
# ============================================================================

_GL_CACHE = {}


def gauss_legendre(order: int, dps: int):
    """Nodes and weights on [-1, 1] at dps working digits (cached)."""
    key = (order, dps)
    hit = _GL_CACHE.get(key)
    if hit is not None:
        return hit
    with mp.workdps(dps + 10):
        n = order
        nodes = []
        weights = []
        tol = mp.mpf(10) ** (-(dps + 5))
        m = (n + 1) // 2
        for i in range(1, m + 1):
            # Chebyshev-like initial guess, then Newton
            x = mp.cos(mp.pi * (i - mp.mpf(1) / 4) / (n + mp.mpf(1) / 2))
            for _ in range(100):
                p0, p1 = mp.mpf(1), x
                for k in range(2, n + 1):
                    p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
                dp = n * (x * p1 - p0) / (x * x - 1)
                dx = p1 / dp
                x -= dx
                if abs(dx) < tol:
                    break
            p0, p1 = mp.mpf(1), x
            for k in range(2, n + 1):
                p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
            dp = n * (x * p1 - p0) / (x * x - 1)
            w = 2 / ((1 - x * x) * dp * dp)
            nodes.append(-x)
            weights.append(w)
        # mirror; odd order has a node at 0
        full_nodes = nodes[:]
        full_weights = weights[:]
        if n % 2 == 1:
            # the last computed node is the middle one (x ~ 0); make it exact
            full_nodes[-1] = mp.mpf(0)
        for i in range(m - 1, -1, -1):
            if n % 2 == 1 and i == m - 1:
                continue
            full_nodes.append(-nodes[i])
            full_weights.append(weights[i])
        result = (full_nodes, full_weights)
    _GL_CACHE[key] = result
    return result


class QuadratureError(ArithmeticError):
    pass


def _fixed_panels(f, a, b, panels: int, order: int, dps: int):
    nodes, weights = gauss_legendre(order, dps)
    h = (b - a) / panels
    total = mp.mpf(0)
    total_abs = mp.mpf(0)
    for p in range(panels):
        left = a + p * h
        mid = left + h / 2
        half = h / 2
        acc = mp.mpf(0)
        for x, w in zip(nodes, weights):
            acc += w * f(mid + half * x)
        acc *= half
        total += acc
        total_abs += abs(acc)
    return total, total_abs


def integrate(f, a, b, ctx: NumContext, alpha=None,
              initial_panels: int = 1, max_depth: int = 12, tol=None):
    """Adaptive panel-doubling Gauss-Legendre on [a, b].

    ``alpha``: declared integrable endpoint singularity (x-a)^alpha of f at a
    (alpha > -1).  ``initial_panels``: starting resolution hint for oscillatory
    integrands.  Raises QuadratureError if doubling max_depth times never
    brings the inter-level difference below tolerance.
    """
    with ctx.precision(5):
        a = mp.mpf(a)
        b = mp.mpf(b)
        if b == a:
            return mp.mpf(0)
        if alpha is not None:
            alpha = mp.mpf(alpha)
            if alpha <= -1:
                raise QuadratureError("alpha must be > -1")
            # x = a + u^p, p = 1/(1+alpha); f(x) dx = f(a + u^p) p u^(p-1) du
            p = 1 / (1 + alpha)
            ub = (b - a) ** (1 + alpha)
            g = lambda u: f(a + u ** p) * p * u ** (p - 1)
            return integrate(g, mp.mpf(0), ub, ctx,
                             initial_panels=initial_panels,
                             max_depth=max_depth, tol=tol)
        if tol is None:
            tol = ctx.quad_tol
        order = ctx.quad_order
        dps = ctx.digits
        panels = max(1, initial_panels)
        prev, prev_abs = _fixed_panels(f, a, b, panels, order, dps)
        for _ in range(max_depth):
            panels *= 2
            cur, cur_abs = _fixed_panels(f, a, b, panels, order, dps)
            scale = max(abs(cur), cur_abs)
            if scale == 0:
                scale = mp.mpf(1)
            if abs(cur - prev) <= tol * scale:
                return cur
            prev = cur
        raise QuadratureError(
            "no convergence after %d panel doublings (last delta %s)"
            % (max_depth, mp.nstr(abs(cur - prev), 5)))


# ============================================================================
# Symmetric matrices
# ============================================================================

class SymMatrix:
    """Dense symmetric matrix with mpf entries, row-major storage."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        zero = mp.mpf(0)
        self.rows: List[List] = [[zero] * n for _ in range(n)]

    @classmethod
    def from_rows(cls, rows) -> "SymMatrix":
        n = len(rows)
        m = cls(n)
        for i in range(n):
            if len(rows[i]) != n:
                raise ValueError("not square")
            for j in range(n):
                m.rows[i][j] = mp.mpf(rows[i][j]) if not isinstance(
                    rows[i][j], mp.mpf) else rows[i][j]
        for i in range(n):
            for j in range(i):
                if m.rows[i][j] != m.rows[j][i]:
                    raise ValueError("input rows not symmetric at (%d,%d)"
                                     % (i, j))
        return m

    def set(self, i: int, j: int, value):
        v = mp.mpf(value) if not isinstance(value, mp.mpf) else value
        self.rows[i][j] = v
        self.rows[j][i] = v

    def get(self, i: int, j: int):
        return self.rows[i][j]

    def copy(self) -> "SymMatrix":
        m = SymMatrix(self.n)
        m.rows = [row[:] for row in self.rows]
        return m

    def frobenius(self):
        acc = mp.mpf(0)
        for row in self.rows:
            for x in row:
                acc += x * x
        return mp.sqrt(acc)

    def matvec(self, v: Sequence):
        return [mp.fsum(a * x for a, x in zip(row, v)) for row in self.rows]

    # -- decimal-text serialization -----------------------------------------

    def to_text(self, digits: int) -> str:
        lines = ["symmatrix n=%d digits=%d" % (self.n, digits)]
        for row in self.rows:
            lines.append(" ".join(mp.nstr(x, digits + 2) for x in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SymMatrix":
        lines = [ln for ln in text.strip().split("\n")
                 if ln and not ln.startswith("#")]
        head = lines[0].split()
        if head[0] != "symmatrix":
            raise ValueError("not a symmatrix dump")
        meta = dict(tok.split("=") for tok in head[1:])
        n = int(meta["n"])
        digits = int(meta["digits"])
        with mp.workdps(digits + 10):
            m = cls(n)
            for i, ln in enumerate(lines[1:1 + n]):
                vals = ln.split()
                if len(vals) != n:
                    raise ValueError("row %d has %d entries, expected %d"
                                     % (i, len(vals), n))
                m.rows[i] = [mp.mpf(tok) for tok in vals]
            # symmetrize away the last-digit rounding of the dump
            for i in range(n):
                for j in range(i):
                    avg = (m.rows[i][j] + m.rows[j][i]) / 2
                    m.rows[i][j] = avg
                    m.rows[j][i] = avg
        return m


# ============================================================================
# Jacobi eigensolver
# ============================================================================

class EigenError(ArithmeticError):
    pass


def sym_eigen(A, ctx: NumContext, want_vectors: bool = True):
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Returns (values, vectors): values ascending; vectors[i] is the unit
    eigenvector for values[i], sign-fixed so its first non-negligible
    component is positive.  Residuals satisfy
    ||A v - lambda v|| <= eig_tol * ||A||_F.
    """
    rows = A.rows if isinstance(A, SymMatrix) else A
    n = len(rows)
    with ctx.precision(5):
        a = [[mp.mpf(x) for x in row] for row in rows]
        for i in range(n):
            for j in range(i):
                if a[i][j] != a[j][i]:
                    raise EigenError("matrix not symmetric at (%d,%d)"
                                     % (i, j))
        v = [[mp.mpf(1) if i == j else mp.mpf(0) for j in range(n)]
             for i in range(n)]
        norm_f = mp.sqrt(mp.fsum(x * x for row in a for x in row))
        tol = ctx.eig_tol_resolved * norm_f
        if norm_f == 0:
            vals = [mp.mpf(0)] * n
            vecs = [[v[i][j] for i in range(n)] for j in range(n)]
            return vals, vecs

        max_sweeps = 40 + ctx.digits // 3
        converged = False
        for _ in range(max_sweeps):
            off2 = mp.fsum(a[i][j] ** 2 for i in range(n)
                           for j in range(i + 1, n))
            off = mp.sqrt(2 * off2)
            if off <= tol:
                converged = True
                break
            skip = off / (n * n * 10)
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p][q]
                    if abs(apq) <= skip:
                        continue
                    theta = (a[q][q] - a[p][p]) / (2 * apq)
                    if theta == 0:
                        t = mp.mpf(1)
                    else:
                        t = mp.sign(theta) / (abs(theta) +
                                              mp.sqrt(1 + theta * theta))
                    c = 1 / mp.sqrt(1 + t * t)
                    s = t * c
                    app = a[p][p]
                    aqq = a[q][q]
                    a[p][p] = app - t * apq
                    a[q][q] = aqq + t * apq
                    a[p][q] = mp.mpf(0)
                    a[q][p] = mp.mpf(0)
                    rp = a[p]
                    rq = a[q]
                    for i in range(n):
                        if i == p or i == q:
                            continue
                        g = rp[i]
                        h = rq[i]
                        gp = c * g - s * h
                        hq = s * g + c * h
                        rp[i] = gp
                        rq[i] = hq
                        a[i][p] = gp
                        a[i][q] = hq
                    if want_vectors:
                        vp = v[p]
                        vq = v[q]
                        for i in range(n):
                            g = vp[i]
                            h = vq[i]
                            vp[i] = c * g - s * h
                            vq[i] = s * g + c * h
        if not converged:
            off2 = mp.fsum(a[i][j] ** 2 for i in range(n)
                           for j in range(i + 1, n))
            raise EigenError("Jacobi did not converge in %d sweeps "
                             "(off-norm %s, target %s)"
                             % (max_sweeps, mp.nstr(mp.sqrt(2 * off2), 5),
                                mp.nstr(tol, 5)))
        pairs = sorted(range(n), key=lambda i: a[i][i])
        vals = [a[i][i] for i in pairs]
        vecs = []
        if want_vectors:
            cutoff_scale = mp.mpf(10) ** (-(ctx.digits // 2))
            for i in pairs:
                vec = v[i][:]  # row i of v holds eigenvector i after our update
                vmax = max(abs(x) for x in vec)
                if vmax > 0:
                    cut = vmax * cutoff_scale
                    for x in vec:
                        if abs(x) > cut:
                            if x < 0:
                                vec = [-y for y in vec]
                            break
                vecs.append(vec)
        return vals, vecs


# ============================================================================
# Symmetric tridiagonal: bisection + inverse iteration
# ============================================================================

def _sturm_count(d, e, x):
    """Number of eigenvalues of tridiag(d, e) strictly below x."""
    n = len(d)
    count = 0
    q = d[0] - x
    if q < 0:
        count += 1
    tiny = mp.mpf(10) ** (-mp.dps * 2)
    for i in range(1, n):
        if q == 0:
            q = tiny
        q = d[i] - x - e[i - 1] * e[i - 1] / q
        if q < 0:
            count += 1
    return count


def _tridiag_solve(d, e, shift, b):
    """Solve (T - shift I) x = b, LU with partial pivoting (fill bandwidth 2).

    Row i of T - shift I spans columns (i-1, i, i+1) as (dl, dd, du); a swap
    step promotes the subdiagonal row, creating the second superdiagonal du2.
    """
    n = len(d)
    tiny = mp.mpf(10) ** (-mp.dps * 2)
    dd = [d[i] - shift for i in range(n)]
    du = [e[i] for i in range(n - 1)]
    dl = [e[i] for i in range(n - 1)]
    du2 = [mp.mpf(0)] * n
    x = list(b)
    for i in range(n - 1):
        du_i1 = du[i + 1] if i + 1 < n - 1 else mp.mpf(0)
        if abs(dd[i]) >= abs(dl[i]):
            piv = dd[i] if dd[i] != 0 else tiny
            dd[i] = piv
            fact = dl[i] / piv
            dd[i + 1] -= fact * du[i]
            x[i + 1] -= fact * x[i]
        else:
            # rows i and i+1 swap; old row i is eliminated against old row i+1
            fact = dd[i] / dl[i]
            old_dd1 = dd[i + 1]
            dd[i] = dl[i]
            old_du = du[i]
            du[i] = old_dd1
            du2[i] = du_i1
            dd[i + 1] = old_du - fact * old_dd1
            if i + 1 < n - 1:
                du[i + 1] = -fact * du_i1
            x[i], x[i + 1] = x[i + 1], x[i] - fact * x[i + 1]
    piv = dd[n - 1] if dd[n - 1] != 0 else tiny
    x[n - 1] = x[n - 1] / piv
    if n >= 2:
        piv = dd[n - 2] if dd[n - 2] != 0 else tiny
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / piv
    for i in range(n - 3, -1, -1):
        piv = dd[i] if dd[i] != 0 else tiny
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / piv
    return x


def tridiag_eigen(d: Sequence, e: Sequence, ctx: NumContext,
                  indices: Optional[Sequence[int]] = None,
                  want_vectors: bool = True):
    """Selected eigenpairs of a symmetric tridiagonal matrix.

    d: diagonal (length n); e: off-diagonal (length n-1); indices: ascending
    0-based eigenvalue indices (default: all).  Bisection on Sturm counts down
    to ~10^-(digits+5) * scale, then inverse iteration (2-4 solves).
    """
    with ctx.precision(5):
        d = [mp.mpf(x) for x in d]
        e = [mp.mpf(x) for x in e]
        n = len(d)
        if len(e) != n - 1:
            raise ValueError("off-diagonal length must be n-1")
        if indices is None:
            indices = range(n)
        rad = [mp.mpf(0)] * n
        for i in range(n):
            r = mp.mpf(0)
            if i > 0:
                r += abs(e[i - 1])
            if i < n - 1:
                r += abs(e[i])
            rad[i] = r
        lo0 = min(d[i] - rad[i] for i in range(n)) - 1
        hi0 = max(d[i] + rad[i] for i in range(n)) + 1
        scale = max(abs(lo0), abs(hi0), mp.mpf(1))
        eps = scale * mp.mpf(10) ** (-(ctx.digits + 5))
        vals = []
        vecs = []
        for m_idx in indices:
            if not 0 <= m_idx < n:
                raise ValueError("eigenvalue index %d out of range" % m_idx)
            lo, hi = lo0, hi0
            while hi - lo > eps:
                mid = (lo + hi) / 2
                if _sturm_count(d, e, mid) <= m_idx:
                    lo = mid
                else:
                    hi = mid
            lam = (lo + hi) / 2
            vals.append(lam)
            if not want_vectors:
                continue
            b = [mp.mpf(1) / (i + 1) for i in range(n)]
            nb = mp.sqrt(mp.fsum(x * x for x in b))
            b = [x / nb for x in b]
            vec = b
            for _ in range(4):
                y = _tridiag_solve(d, e, lam, vec)
                ny = mp.sqrt(mp.fsum(x * x for x in y))
                if ny == 0:
                    break
                vec = [x / ny for x in y]
            # residual check
            res = []
            for i in range(n):
                acc = (d[i] - lam) * vec[i]
                if i > 0:
                    acc += e[i - 1] * vec[i - 1]
                if i < n - 1:
                    acc += e[i] * vec[i + 1]
                res.append(acc)
            rn = mp.sqrt(mp.fsum(x * x for x in res))
            if rn > scale * mp.mpf(10) ** (-(ctx.digits - 10)):
                raise EigenError("inverse iteration residual %s too large "
                                 "for index %d" % (mp.nstr(rn, 5), m_idx))
            vmax = max(abs(x) for x in vec)
            cut = vmax * mp.mpf(10) ** (-(ctx.digits // 2))
            for x in vec:
                if abs(x) > cut:
                    if x < 0:
                        vec = [-y for y in vec]
                    break
            vecs.append(vec)
        return vals, vecs
