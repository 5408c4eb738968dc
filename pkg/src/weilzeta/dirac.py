"""Perturbed Dirac operator on the logarithmic circle.

D0 = -i u d/du acts on L^2([1/lam, lam], d*u), a circle of length
L = 2 log lam in the variable t = log u.  In the real eta basis every
operator here is D = i A with A real antisymmetric, and A anticommutes
with the grading, so A = [[0, -B^T], [B, 0]] with B its odd-by-even
block.  The spectrum of D is {+-s} over the singular values s of B plus
zeros, which we get from the symmetric eigenproblem B^T B; the block
sizes N and N+1 force at least one zero mode (graded index 1).

Eigenvector convention: for a positive eigenvalue s with right/left
singular pair (v, u), B v = s u, the Hermitian eigenvector is
(v + i u)/sqrt(2); for -s it is (v - i u)/sqrt(2).  The pairs are stored
as real block vectors.

The conditioned operator is D(lam, k) = Q D0 Q with Q = 1 - Pi(lam, k);
the compression acts on B as B -> Q_odd B0 Q_even, all real.
"""

import math

import numpy as np
from mpmath import mp

from .context import DEFAULT_CONTEXT
from .numkernel import SymMatrix, sym_eigen
from .projection import build_projection, build_projection_f64

__all__ = ["DiracError", "DiracOperator", "DiracSpectrum", "d0_matrix",
           "dirac_build", "dirac_spectrum", "count_nonzero_upto",
           "mean_counting", "default_k", "b_block_f64",
           "dirac_spectrum_f64"]


class DiracError(ArithmeticError):
    pass


def _omega(n, L):
    return 2 * mp.pi * n / L


def d0_matrix(L, N):
    """Real antisymmetric representation A0 of D0 = i A0 on E_N.

    Couples (xi_n, xi_{-n}) with magnitude 2 pi n / L; the constant xi_0
    is sent to zero.  Layout: even block (j = 0..N) first, then odd.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    size = 2 * N + 1
    L = mp.mpf(L)
    A = [[mp.mpf(0)] * size for _ in range(size)]
    for n in range(1, N + 1):
        w = _omega(n, L)
        A[N + n][n] = w        # A0 xi_n = w xi_{-n}
        A[n][N + n] = -w       # A0 xi_{-n} = -w xi_n
    return A


def _b0_rows(L, N):
    """Diagonal data of the odd-by-even block of A0: row a-1 holds
    omega_a at column a (columns indexed by j = 0..N)."""
    return [_omega(a, L) for a in range(1, N + 1)]


class DiracOperator:
    """Compressed operator D(lam, k) = Q D0 Q in the real representation.

    ``b_block`` is the odd-by-even block B (N rows, N+1 columns); the
    full Hermitian matrix is i times ``matrix()``.
    """

    def __init__(self, lam, k, N, L, b_block, projection):
        self.lam = lam
        self.k = k
        self.N = N
        self.L = L
        self.b_block = b_block
        self.projection = projection

    def matrix(self):
        """Full real antisymmetric E_N matrix A with D = i A."""
        N = self.N
        size = 2 * N + 1
        A = [[mp.mpf(0)] * size for _ in range(size)]
        for a in range(N):
            for j in range(N + 1):
                A[N + 1 + a][j] = self.b_block[a][j]
                A[j][N + 1 + a] = -self.b_block[a][j]
        return A


def dirac_build(lam, k, N, ctx=DEFAULT_CONTEXT, projection=None):
    """Build D(lam, k) on E_N; k = 0 reproduces D0 exactly."""
    if projection is None:
        projection = build_projection(lam, k, N, ctx)
    if projection.N != N or projection.k != k:
        raise ValueError("projection was built for (k=%d, N=%d), not "
                         "(k=%d, N=%d)" % (projection.k, projection.N,
                                           k, N))
    with ctx.precision(5):
        lam = mp.mpf(lam)
        L = 2 * mp.log(lam)
        w = _b0_rows(L, N)
        evens = [n for n in projection.vectors if n % 2 == 0]
        odds = [n for n in projection.vectors if n % 2 == 1]
        epl = [projection.block_vector(n) for n in evens]
        emi = [projection.block_vector(n) for n in odds]
        # X = B0 Q_even: row a-1 is omega_a * (row a of Q_even)
        X = []
        for a in range(1, N + 1):
            row = [mp.mpf(0)] * (N + 1)
            row[a] = w[a - 1]
            for e in epl:
                c = w[a - 1] * e[a]
                for j in range(N + 1):
                    row[j] -= c * e[j]
            X.append(row)
        # B = Q_odd X
        B = [row[:] for row in X]
        for o in emi:
            coef = [mp.fsum(o[a] * X[a][j] for a in range(N))
                    for j in range(N + 1)]
            for a in range(N):
                for j in range(N + 1):
                    B[a][j] -= o[a] * coef[j]
        return DiracOperator(lam, k, N, L, B, projection)


class DiracSpectrum:
    """Positive eigenvalues (ascending), kernel dimension, and the real
    singular pairs (v even block, u odd block) behind each of them."""

    def __init__(self, positive, kernel_dim, pairs, threshold):
        self.positive = positive
        self.kernel_dim = kernel_dim
        self.pairs = pairs
        self.threshold = threshold

    def count_upto(self, E):
        return sum(1 for s in self.positive if s <= E)


def dirac_spectrum(D, ctx=DEFAULT_CONTEXT):
    """Spectrum via the symmetric eigenproblem B^T B.

    Kernel threshold 10^(-digits/3); raises if a singular value sits
    suspiciously close to it on either side.
    """
    N = D.N
    with ctx.precision(10):
        B = D.b_block
        G = SymMatrix(N + 1)
        for i in range(N + 1):
            for j in range(i + 1):
                G.set(i, j, mp.fsum(B[a][i] * B[a][j] for a in range(N)))
        vals, vecs = sym_eigen(G, ctx, want_vectors=True)
        thr = mp.mpf(10) ** (-(ctx.digits // 3))
        svals = [mp.sqrt(v) if v > 0 else mp.mpf(0) for v in vals]
        for s in svals:
            if thr / 100 < s < thr * 100:
                raise DiracError(
                    "singular value %s too close to kernel threshold %s"
                    % (mp.nstr(s, 8), mp.nstr(thr, 3)))
        positive = []
        pairs = []
        for s, v in zip(svals, vecs):
            if s <= thr:
                continue
            u = [mp.fsum(B[a][j] * v[j] for j in range(N + 1)) / s
                 for a in range(N)]
            positive.append(s)
            pairs.append((v, u))
        kernel_dim = (2 * N + 1) - 2 * len(positive)
        return DiracSpectrum(positive, kernel_dim, pairs, thr)


def count_nonzero_upto(D, E, ctx=DEFAULT_CONTEXT, spectrum=None):
    """Number of positive eigenvalues of D in (0, E]."""
    with ctx.precision(5):
        horizon = mp.pi * D.N / D.L
        if E > horizon:
            raise ValueError("E = %s beyond truncation horizon pi N / L "
                             "= %s" % (mp.nstr(mp.mpf(E), 8),
                                       mp.nstr(horizon, 8)))
    if spectrum is None:
        spectrum = dirac_spectrum(D, ctx)
    return spectrum.count_upto(E)


def mean_counting(E, ctx=DEFAULT_CONTEXT):
    """Average counting function (E/2pi) log(E/2pi) - E/2pi."""
    with ctx.precision(5):
        x = mp.mpf(E) / (2 * mp.pi)
        return x * mp.log(x) - x


def default_k(mu, ctx=DEFAULT_CONTEXT):
    """Conditioning policy: the largest even k <= nu(mu) - 1."""
    from .prolate import nu
    cap = nu(mu, ctx) - 1
    return cap if cap % 2 == 0 else cap - 1


# -- f64 mirror lane ---------------------------------------------------------

def b_block_f64(lam, k, N, order=32):
    """Float lane odd-by-even block of D(lam, k)."""
    L = 2 * math.log(lam)
    w = 2 * np.pi * np.arange(1, N + 1) / L
    B = np.zeros((N, N + 1))
    B[:, 1:] = np.diag(w)
    if k > 0:
        eps = build_projection_f64(lam, k, N, order=order)
        evens = np.array([eps[n][:N + 1] for n in sorted(eps)
                          if n % 2 == 0])
        odds = np.array([eps[n][N + 1:] for n in sorted(eps)
                         if n % 2 == 1])
        if len(evens):
            B = B - (B @ evens.T) @ evens
        if len(odds):
            B = B - odds.T @ (odds @ B)
    return B


def dirac_spectrum_f64(lam, k, N, order=32):
    """Float lane: (positive eigenvalues ascending, kernel dimension)."""
    B = b_block_f64(lam, k, N, order=order)
    svals = np.linalg.svd(B, compute_uv=False)[::-1]
    positive = svals[svals > 1e-6]
    kernel_dim = (2 * N + 1) - 2 * positive.size
    return positive, kernel_dim
