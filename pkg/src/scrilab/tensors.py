"""Seven-block splitting of symmetric 2-tensors and the closed-form
endomorphisms that drive decay at null infinity.

Splitting order (block, amplitude count):

    0: (dx0)^2        1
    1: 2 dx0 dx1      1
    2: 2 dx0 (.) sph  2
    3: (dx1)^2        1
    4: 2 dx1 (.) sph  2
    5: trace sph      1
    6: tracefree sph  2

for 10 amplitudes total.  2 dx0 (x)_s dx1 is a unit basis element, so the
"01" amplitude is the tensor component u(d0, d1); spherical amplitudes are
taken in an orthonormal frame on the sphere.  One-forms use the analogous
3-block splitting (dx0, dx1, r*sph) with amplitudes (w0, w1, we, wo).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError

BLOCKS = ("00", "01", "0s", "11", "1s", "trace", "tracefree")
BLOCK_SLOTS = {
    "00": [0],
    "01": [1],
    "0s": [2, 3],
    "11": [4],
    "1s": [5, 6],
    "trace": [7],
    "tracefree": [8, 9],
}
DIM = 10

_PROJ_BLOCKS = {
    "C": ("00", "0s", "trace"),
    "Upsilon": ("01", "1s"),
    "CUpsilon": ("00", "01", "0s", "1s", "trace"),
    "slashed0": ("tracefree",),
    "oneone": ("11",),
}


@dataclass(frozen=True)
class ModPair:
    """Constraint-damping / gauge-change strengths (gammaC, gammaU) for the
    fixed covector c = dt/r = (dx0 + dx1)/(2r).

    Admissible range: gammaC in (0,1), gammaU in (-1,0), -gammaU < gammaC.
    gammaU = 0 is accepted only with allow_borderline (the control case with
    the borderline logarithmic coupling).
    """

    gammaC: float
    gammaU: float
    allow_borderline: bool = False

    def __post_init__(self):
        if not (0.0 < self.gammaC < 1.0):
            raise AdmissibilityError(f"gammaC={self.gammaC} outside (0, 1)")
        lo = -1.0
        hi = 0.0
        ok = lo < self.gammaU < hi or (self.allow_borderline and self.gammaU == 0.0)
        if not ok:
            raise AdmissibilityError(f"gammaU={self.gammaU} outside (-1, 0)")
        if not (-self.gammaU < self.gammaC):
            raise AdmissibilityError(
                f"need -gammaU < gammaC; got gammaU={self.gammaU}, gammaC={self.gammaC}")


def check_weights(ellI, ell0, gammaU):
    """Decay weights must satisfy ellI < min(-gammaU, ell0, 1/2)."""
    bound = min(-gammaU, ell0, 0.5) if gammaU != 0.0 else min(ell0, 0.5)
    if gammaU != 0.0 and not (0.0 < ellI < bound):
        raise AdmissibilityError(
            f"need 0 < ellI < min(-gammaU, ell0, 1/2) = {bound}; got ellI={ellI}")
    if gammaU == 0.0 and not (0.0 < ellI < bound):
        raise AdmissibilityError(f"need 0 < ellI < min(ell0, 1/2) = {bound}; got ellI={ellI}")


def projector(which):
    """Idempotent block selector as a 10x10 matrix."""
    if which not in _PROJ_BLOCKS:
        raise KeyError(f"unknown projection {which!r}; valid: {sorted(_PROJ_BLOCKS)}")
    P = np.zeros((DIM, DIM))
    for b in _PROJ_BLOCKS[which]:
        for i in BLOCK_SLOTS[b]:
            P[i, i] = 1.0
    return P


def project(which, u):
    u = np.asarray(u, dtype=float)
    return projector(which) @ u


def minkowski_pairing():
    """Gram matrix of the fiber pairing <u, v> = u_mn v_kl g^mk g^nl induced
    by the Minkowski metric on the 10 splitting amplitudes."""
    M = np.zeros((DIM, DIM))
    M[0, 4] = M[4, 0] = 4.0
    M[1, 1] = 8.0
    M[2, 5] = M[5, 2] = -4.0
    M[3, 6] = M[6, 3] = -4.0
    M[7, 7] = 2.0
    M[8, 8] = M[9, 9] = 2.0
    return M


def trace_reversal_matrix():
    """Trace reversal at the Minkowski leading order: identity except the
    (01, trace) pair which swaps with weights 1/2 and 2."""
    G = np.eye(DIM)
    G[1, 1] = G[7, 7] = 0.0
    G[1, 7] = 0.5
    G[7, 1] = 2.0
    return G


def trace_reversal(g, u):
    """G_g u = u - g tr_g(u) / 2 on weighted 4x4 components (any metric)."""
    g = np.asarray(g, dtype=float)
    u = np.asarray(u, dtype=float)
    g_inv = np.linalg.inv(g)
    tr = float(np.tensordot(g_inv, u, axes=2))
    return u - 0.5 * tr * g


def _spread(entries7):
    """Expand a 7x7 scalar block matrix to 10x10 (spherical blocks become
    scalar multiples of the identity)."""
    A = np.zeros((DIM, DIM))
    for bi, tag_i in enumerate(BLOCKS):
        for bj, tag_j in enumerate(BLOCKS):
            val = entries7[bi][bj]
            if val == 0.0:
                continue
            rows, cols = BLOCK_SLOTS[tag_i], BLOCK_SLOTS[tag_j]
            if len(rows) == len(cols):
                for i, j in zip(rows, cols):
                    A[i, j] = val
            else:
                raise ValueError(f"rectangular block ({tag_i},{tag_j}) needs amplitude data")
    return A


def matrix_A7(pair):
    """The h = 0 endomorphism as a literal 7x7 array of block entries."""
    gC, gU = pair.gammaC, pair.gammaU
    return np.array([
        [2 * gC, 0, 0, 0, 0, 0, 0],
        [-gU, -gU, 0, 0, 0, 0, 0],
        [0, 0, gC, 0, 0, 0, 0],
        [0, -2 * gU, 0, -2 * gU, 0, gC, 0],
        [0, 0, gC - gU, 0, -gU, 0, 0],
        [2 * gC, 0, 0, 0, 0, gC, 0],
        [0, 0, 0, 0, 0, 0, 0],
    ], dtype=float)


def build_A(pair, h=None, point=None):
    """Endomorphism A of the transport normal form, 10x10.

    With h present, the (11, tracefree) block carries -d1 h^{ab}/2 acting by
    contraction and the (tracefree, 00) block carries 2 d1 h_{ab}; all other
    entries are the h = 0 values.
    """
    A = _spread(matrix_A7(pair))
    if h is not None:
        d1 = h.split_d1(point)
        # -(1/2) d1 h^{ab} u_{ab} = -(d1 hp * up + d1 hq * uq)
        A[4, 8] = -d1[8]
        A[4, 9] = -d1[9]
        A[8, 0] = 2.0 * d1[8]
        A[9, 0] = 2.0 * d1[9]
    return A


def build_B(h, point):
    """Second endomorphism: rows (11) and (tracefree) sourced by the 00
    amplitude through 2 rho0^{-1} d1^2 h."""
    B = np.zeros((DIM, DIM))
    if h is None:
        return B
    d2 = h.split_d1d1(point)
    w = 2.0 / point.rho0
    B[4, 0] = w * d2[4]
    B[8, 0] = w * d2[8]
    B[9, 0] = w * d2[9]
    return B


def pi_c_block(pair):
    """3x3 top-left block of A in ran(pi^C), block order (00, 0s, trace)."""
    gC = pair.gammaC
    return np.array([[2 * gC, 0, 0], [0, gC, 0], [2 * gC, 0, gC]], dtype=float)


def pi_c_complement_block(pair):
    """4x4 bottom-right block in ran(1 - pi^C), order (01, 11, 1s, tracefree)."""
    gU = pair.gammaU
    return np.array([
        [-gU, 0, 0, 0],
        [-2 * gU, -2 * gU, 0, 0],
        [0, 0, -gU, 0],
        [0, 0, 0, 0],
    ], dtype=float)


# Representative amplitude slots for the block ordering (00, 0s, trace, 01, 1s)
# that makes the CUpsilon restriction literally lower triangular.
CY_ORDER = [0, 2, 7, 1, 5]


def cy_block(A):
    """5x5 restriction of A to ran(pi^C + pi^Upsilon), block-level entries."""
    A = np.asarray(A, dtype=float)
    return A[np.ix_(CY_ORDER, CY_ORDER)]


def canonical_eigenvalues(pair):
    """Block spectra in canonical order: pi^C diagonal then complement
    diagonal -> [2gC, gC, gC, -gU, -2gU, -gU, 0]."""
    gC, gU = pair.gammaC, pair.gammaU
    return [2 * gC, gC, gC, -gU, -2 * gU, -gU, 0.0]


def spectrum(M):
    """Eigenvalues of a real matrix, sorted by (real, imag)."""
    ev = np.linalg.eigvals(np.asarray(M, dtype=float))
    order = np.lexsort((ev.imag, ev.real))
    return ev[order]


def adjoint(A, gram=None):
    """Adjoint with respect to the Minkowski fiber pairing."""
    if gram is None:
        gram = minkowski_pairing()
    return np.linalg.solve(gram, np.asarray(A).T @ gram)


def duality_residual(pair):
    """Max-abs residual of G A*_{EC,EU} G + A_{EU,EC} (Minkowski frame).

    Swapping the roles of constraint damping and gauge change swaps the two
    strengths; the identity is exact for admissible pairs.
    """
    swapped = ModPair.__new__(ModPair)  # bypass admissibility for the swap
    object.__setattr__(swapped, "gammaC", pair.gammaU)
    object.__setattr__(swapped, "gammaU", pair.gammaC)
    object.__setattr__(swapped, "allow_borderline", True)
    A = _spread(matrix_A7(pair))
    A_swap = _spread(matrix_A7(swapped))
    G = trace_reversal_matrix()
    return float(np.abs(G @ adjoint(A) @ G + A_swap).max())


def comm_expand(L, Xs):
    """Both sides of the nested-adjoint commutator expansion.

    Returns (lhs, rhs) with lhs = [L, X_1 ... X_N] and rhs the sum over
    q-subsets of (-1)^(q-1) (ad_{X_i1} ... ad_{X_iq} L) * prod of the
    remaining factors in order.
    """
    L = np.asarray(L, dtype=float)
    Xs = [np.asarray(X, dtype=float) for X in Xs]
    n = L.shape[0]
    if any(X.shape != (n, n) for X in Xs):
        raise ValueError("all factors must match the dimension of L")
    N = len(Xs)

    def prod(mats):
        out = np.eye(n)
        for m in mats:
            out = out @ m
        return out

    full = prod(Xs)
    lhs = L @ full - full @ L
    rhs = np.zeros_like(L)
    for q in range(1, N + 1):
        for combo in itertools.combinations(range(N), q):
            Y = L
            for j in reversed(combo):  # innermost adjoint acts first
                Y = Y @ Xs[j] - Xs[j] @ Y
            rest = prod([Xs[j] for j in range(N) if j not in combo])
            rhs = rhs + (-1.0) ** (q - 1) * (Y @ rest)
    return lhs, rhs


def predicted_exponents(A, excited=None):
    """Generic decay exponents of solutions of (rho_I d_rho_I - A) v = 0.

    A component excited by data, or sourced through an off-diagonal entry
    by a component with finite exponent e_j, decays like rho_I^e with
    e = min(diagonal, min of sourcing exponents); components never reached
    vanish identically (exponent +inf).
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if excited is None:
        excited = list(range(n))
    e = np.full(n, np.inf)
    for i in excited:
        e[i] = A[i, i]
    for _ in range(n + 1):
        changed = False
        for i in range(n):
            src = [e[j] for j in range(n) if j != i and A[i, j] != 0.0 and np.isfinite(e[j])]
            if src:
                new = min(min(src), A[i, i])
                if new < e[i]:
                    e[i] = new
                    changed = True
        if not changed:
            break
    return e
