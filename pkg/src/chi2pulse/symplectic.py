"""Symplectic linear algebra in the ``(x_1..x_n, p_1..p_n)`` ordering.

Contains the symplectic form, Bloch-Messiah and the generalized
Bloch-Messiah decomposition (GBMD) of rectangular quadrature maps, plus
Williamson eigenvalues and the Gaussian von Neumann entropy.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.special import xlogy
from scipy.stats import unitary_group

from .errors import ContractError, DegeneracyError, ShapeError, UnphysicalStateError

GBMD_CONDITION = 1e-10
ENTROPY_CLIP = 1e-6


def symplectic_form(n):
    """Return ``[[0, I_n], [-I_n, 0]]``."""
    if n < 1:
        raise ShapeError(f"mode count must be >= 1, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _modes(M):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ShapeError(f"expected a square matrix of even dimension, got shape {M.shape}")
    return M.shape[0] // 2


def is_symplectic(M, tol=1e-10):
    """True iff ``max|M^T Omega M - Omega| < tol``."""
    n = _modes(M)
    W = symplectic_form(n)
    return bool(np.max(np.abs(M.T @ W @ M - W)) < tol)


def squeezer(r):
    """Single-mode squeezers ``diag(e^r, e^-r)`` for a vector of squeezing parameters."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    return np.diag(np.concatenate([np.exp(r), np.exp(-r)]))


def passive(U):
    """Orthogonal symplectic matrix of the unitary ``U = X + iY``."""
    U = np.asarray(U)
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def random_symplectic(n, rng=None, max_squeeze=1.0):
    """Random ``2n x 2n`` symplectic matrix: passive, squeeze, passive."""
    rng = np.random.default_rng(rng)
    U = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random((1, 1)))
    V = unitary_group.rvs(n, random_state=rng) if n > 1 else np.exp(2j * np.pi * rng.random((1, 1)))
    r = rng.uniform(-max_squeeze, max_squeeze, n)
    return passive(U) @ squeezer(r) @ passive(V)


def _symplectic_pairs(vectors, tol=1e-12):
    """Symplectic Gram-Schmidt of the rows of ``vectors``.

    Returns ``(E, F)`` with ``E Omega F^T = I`` and ``E Omega E^T = F Omega F^T = 0``.
    Pairs are chosen by maximal symplectic product for stability.
    """
    V = [np.array(v, dtype=float) for v in vectors]
    dim = V[0].shape[0] if V else 0
    W = symplectic_form(dim // 2)
    E, F = [], []
    while V:
        G = np.array(V) @ W @ np.array(V).T
        i, j = np.unravel_index(np.argmax(np.abs(G)), G.shape)
        w = G[i, j]
        if abs(w) <= tol:
            raise DegeneracyError("vectors do not span a symplectic subspace")
        e, f = V[i], V[j] / w
        t = math.sqrt(np.linalg.norm(f) / np.linalg.norm(e))
        e, f = e * t, f / t
        rest = [V[k] for k in range(len(V)) if k not in (i, j)]
        V = []
        for r in rest:
            r = r - (r @ W @ f) * e + (r @ W @ e) * f
            V.append(r)
        E.append(e)
        F.append(f)
    return np.array(E), np.array(F)


def bloch_messiah(M, tol=1e-8):
    """Factor a symplectic ``M`` as ``O @ Z @ Op``.

    ``O`` and ``Op`` are orthogonal symplectic and ``Z = diag(z, 1/z)`` with
    ``z >= 1`` sorted in decreasing order.
    """
    M = np.asarray(M, dtype=float)
    n = _modes(M)
    if not is_symplectic(M, tol):
        raise ContractError("bloch_messiah requires a symplectic matrix")
    W = symplectic_form(n)
    P = M @ M.T
    P = 0.5 * (P + P.T)
    lam, vec = np.linalg.eigh(P)
    order = np.argsort(lam)[::-1]
    lam, vec = lam[order], vec[:, order]
    # eigenvalues near 1 form an Omega-invariant subspace that needs explicit pairing
    near = np.abs(np.log(np.maximum(lam, 1e-300))) < 1e-7
    big = [k for k in range(n) if not near[k]]
    cols = [vec[:, k] for k in big]
    if np.any(near):
        sub = vec[:, near]
        Es = []
        basis = list(sub.T)
        while len(Es) < n - len(big):
            e = basis.pop(0)
            for prev in Es:
                e = e - (prev @ e) * prev - ((W.T @ prev) @ e) * (W.T @ prev)
            nrm = np.linalg.norm(e)
            if nrm < 1e-6:
                continue
            e = e / nrm
            Es.append(e)
        cols.extend(Es)
    E = np.array(cols).T
    O = np.hstack([E, W.T @ E])
    d = np.diag(O.T @ P @ O)[:n]
    z = np.sqrt(np.maximum(d, 1e-300))
    Z = np.diag(np.concatenate([z, 1.0 / z]))
    Op = np.diag(1.0 / np.diag(Z)) @ O.T @ M
    return O, Z, Op


@dataclass(frozen=True)
class GbmdResult:
    """Generalized Bloch-Messiah factors.

    ``right``: ``A = core @ P @ S`` with ``S`` 2N x 2N.
    ``left``: ``A = S.T @ P.T @ core`` with ``S`` 2M x 2M.
    ``square``: ``A = core``, ``S`` and ``P`` are identities.
    """

    side: str
    S: np.ndarray
    P: np.ndarray
    core: np.ndarray
    sign: float = 1.0

    def reconstruct(self):
        if self.side == "right":
            return self.core @ self.P @ self.S
        if self.side == "left":
            return self.S.T @ self.P.T @ self.core
        return self.core.copy()


def selector(k, n):
    """``2k x 2n`` matrix picking ``x_1..x_k`` and ``p_1..p_k`` out of ``n`` modes."""
    P = np.zeros((2 * k, 2 * n))
    for i in range(k):
        P[i, i] = 1.0
        P[k + i, n + i] = 1.0
    return P


def _householder(v):
    """Symmetric orthogonal ``H`` with ``H v`` parallel to ``e_1``."""
    n = v.shape[0]
    nrm = np.linalg.norm(v)
    if n == 1 or nrm == 0.0 or np.linalg.norm(v[1:]) == 0.0:
        return np.eye(n)
    beta = -math.copysign(nrm, v[0])
    u = v.copy()
    u[0] -= beta
    return np.eye(n) - 2.0 * np.outer(u, u) / (u @ u)


def _check_nonsingular(A):
    W = A @ symplectic_form(A.shape[1] // 2) @ A.T
    U, s, _ = np.linalg.svd(W)
    if s[0] == 0.0 or s[-1] <= GBMD_CONDITION * s[0]:
        raise DegeneracyError(
            "A Omega A^T is singular; null direction " + np.array2string(U[:, -1], precision=6),
            direction=U[:, -1],
        )


def _equalize(S, core, N, k):
    """Rescale effective mode ``k`` so its x and p rows of ``S`` have equal norm."""
    M = core.shape[0] // 2
    r = 0.5 * math.log(np.linalg.norm(S[k]) / np.linalg.norm(S[N + k]))
    S = S.copy()
    core = core.copy()
    S[k] *= math.exp(-r)
    S[N + k] *= math.exp(r)
    core[:, k] *= math.exp(r)
    core[:, M + k] *= math.exp(-r)
    return S, core


def _gbmd_single(A):
    """Right decomposition of a 2 x 2N map by Householder/Givens elimination.

    Right-multiplication by symplectic orthogonal transforms brings the
    p-row of ``A`` to ``(0,..,0 | R23, 0,..,0)``; the symplectic ``S`` and the
    2x2 core are then written down in closed form.
    """
    N = A.shape[1] // 2
    b = A[1]
    H1 = _householder(b[:N].copy())
    U = np.block([[H1, np.zeros((N, N))], [np.zeros((N, N)), H1]])
    R = A @ U
    b0, bN = R[1, 0], R[1, N]
    r = math.hypot(b0, bN)
    G = np.eye(2 * N)
    if r > 0:
        c, s = bN / r, b0 / r
        G[0, 0], G[0, N], G[N, 0], G[N, N] = c, s, -s, c
    U = U @ G
    R = A @ U
    H2 = _householder(R[1, N:].copy())
    U = U @ np.block([[H2, np.zeros((N, N))], [np.zeros((N, N)), H2]])
    R = A @ U
    if R[1, N] < 0:
        # rotate mode 0 by pi so that R23 > 0
        U[:, [0, N]] *= -1.0
        R = A @ U
    R11, R23 = R[0, 0], R[1, N]
    sign = math.copysign(1.0, R11)
    R = np.diag([sign, 1.0]) @ R
    R11 = R[0, 0]
    R12, R13, R14 = R[0, 1:N], R[0, N], R[0, N + 1:]
    sig = math.sqrt(R11 * R23)
    Sp = np.zeros((2 * N, 2 * N))
    Sp[0, 0] = math.sqrt(R11 / R23)
    Sp[0, 1:N] = R12 / sig
    Sp[0, N] = R13 / sig
    Sp[0, N + 1:] = R14 / sig
    Sp[1:N, 1:N] = np.eye(N - 1)
    Sp[1:N, N] = R14 / R11
    Sp[N, N] = math.sqrt(R23 / R11)
    Sp[N + 1:, N] = -R12 / R11
    Sp[N + 1:, N + 1:] = np.eye(N - 1)
    S = Sp @ U.T
    core = np.diag([sign * sig, sig])
    S, core = _equalize(S, core, N, 0)
    return GbmdResult("right", S, selector(1, N), core, sign)


def _gbmd_general(A):
    """Right decomposition for any ``M < N`` via symplectic Gram-Schmidt.

    The rows of ``A`` span a symplectic subspace; a symplectic basis of it
    forms the effective rows of ``S`` and its symplectic complement fills
    the remaining rows.
    """
    M = A.shape[0] // 2
    N = A.shape[1] // 2
    W = symplectic_form(N)
    E, F = _symplectic_pairs(list(A))
    comp = null_space(np.vstack([E, F]) @ W)
    Ec, Fc = _symplectic_pairs(list(comp.T)) if comp.shape[1] else (np.zeros((0, 2 * N)), np.zeros((0, 2 * N)))
    S = np.vstack([E, Ec, F, Fc])
    rows = np.vstack([E, F])
    core = np.linalg.lstsq(rows.T, A.T, rcond=None)[0].T
    for k in range(M):
        S, core = _equalize(S, core, N, k)
    return GbmdResult("right", S, selector(M, N), core, 1.0)


def gbmd_right(A, method="auto"):
    A = np.asarray(A, dtype=float)
    M, N = A.shape[0] // 2, A.shape[1] // 2
    _check_nonsingular(A)
    if method == "elimination" or (method == "auto" and M == 1):
        if M != 1:
            raise ShapeError("the elimination algorithm handles a single output mode")
        return _gbmd_single(A)
    return _gbmd_general(A)


def gbmd(A, method="auto"):
    """Generalized Bloch-Messiah decomposition of a real ``2M x 2N`` map."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] % 2 or A.shape[1] % 2:
        raise ShapeError(f"A must be 2M x 2N, got shape {A.shape}")
    M, N = A.shape[0] // 2, A.shape[1] // 2
    if M == N:
        _check_nonsingular(A)
        return GbmdResult("square", np.eye(2 * N), np.eye(2 * N), A.copy(), 1.0)
    if M < N:
        return gbmd_right(A, method)
    # more outputs than inputs: decompose the transpose from the right
    _check_nonsingular(A.T)
    r = gbmd_right(A.T, method)
    return GbmdResult("left", r.S, r.P, r.core.T, r.sign)


def symplectic_eigenvalues(cov):
    """Williamson symplectic eigenvalues (one per mode, ascending)."""
    cov = np.asarray(cov, dtype=float)
    n = _modes(cov)
    if np.max(np.abs(cov - cov.T)) > 1e-10 * max(1.0, np.max(np.abs(cov))):
        raise ContractError("covariance matrix is not symmetric")
    cov = 0.5 * (cov + cov.T)
    w, v = np.linalg.eigh(cov)
    if w[0] < 0:
        raise ContractError("covariance matrix is not positive semidefinite")
    half = (v * np.sqrt(w)) @ v.T
    K = half @ symplectic_form(n) @ half
    nu = np.linalg.eigvalsh(1j * K)
    return np.sort(nu[n:])


def von_neumann_entropy(cov, clip=ENTROPY_CLIP):
    """Von Neumann entropy in nats of the Gaussian state with covariance ``cov`` (vacuum = I)."""
    nu = symplectic_eigenvalues(cov)
    if np.any(nu < 1.0 - clip):
        raise UnphysicalStateError(f"symplectic eigenvalue {nu.min():.9g} < 1")
    nu = np.maximum(nu, 1.0)
    a = 0.5 * (nu + 1.0)
    b = 0.5 * (nu - 1.0)
    return float(np.sum(xlogy(a, a) - xlogy(b, b)))
