"""Quadrature input-output maps, Gaussian propagation and Wigner functions.

Conventions: quadrature vectors are ordered ``(x_1..x_n, p_1..p_n)`` with
``x = (a + a^dagger)/sqrt(2)``; the vacuum covariance is the identity and a
single-mode Wigner function is normalized as
``W(gamma) = exp(-gamma^T cov^-1 gamma) / (pi sqrt(det cov))``.
"""

import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import RectBivariateSpline
from scipy.special import eval_genlaguerre

from .chi2 import FirstOrderMap
from .errors import ContractError, DegeneracyError, ShapeError, UnphysicalStateError, WindowError
from .laguerre import scaled_genlaguerre_all
from .spectral import ModeFunction, gram_schmidt
from .symplectic import gbmd as _gbmd
from .symplectic import symplectic_eigenvalues, symplectic_form

COLUMN_FLOOR = 1e-14
EDGE_MASS = 1e-9


# ---------------------------------------------------------------------------
# quadrature maps


@dataclass(frozen=True)
class OutputRelation:
    """``b = zeta a_f + xi a_g^dagger`` for one output mode, with ``f``, ``g`` normalized."""

    zeta: float
    f: ModeFunction
    xi: float
    g: ModeFunction


def relation_from_first_order(fom):
    return OutputRelation(fom.zeta, fom.f, fom.xi, fom.g)


@dataclass(frozen=True)
class BogoliubovKernels:
    """Raw kernels ``F(omega, Omega) = mu delta(omega - Omega) + F_smooth`` and ``G``.

    Matrices are indexed ``[omega_out, Omega_in]`` on ``grid``; the delta part
    is carried by the scalar ``mu`` and never placed on the grid.
    """

    grid: object
    mu: complex
    F_smooth: np.ndarray
    G: np.ndarray


def relations_from_kernels(kernels, outputs):
    """Output relations for modes ``outputs`` under raw Bogoliubov kernels."""
    rels = []
    w = kernels.grid.weights
    for v in outputs:
        wv = w * v.amp
        f_t = np.conj(kernels.mu) * v.amp + np.conj(kernels.F_smooth).T @ wv
        g_t = np.conj(kernels.G).T @ np.conj(wv)
        f_m = ModeFunction(v.grid, f_t)
        g_m = ModeFunction(v.grid, g_t)
        zeta, xi = f_m.norm(), g_m.norm()
        f = f_m.normalize() if zeta > 0 else f_m
        g = g_m.normalize() if xi > 0 else g_m
        rels.append(OutputRelation(zeta, f, xi, g))
    return rels


def complex_to_real(F, G):
    """Real quadrature matrix of ``b = F a + G a^dagger``."""
    F = np.atleast_2d(F)
    G = np.atleast_2d(G)
    return np.block([[(F + G).real, (G - F).imag], [(F + G).imag, (F - G).real]])


@dataclass(frozen=True)
class QuadratureMap:
    """``Gamma_out = A Gamma_in + B Gamma_perp`` and its Gram-Schmidt bookkeeping.

    ``flags`` records output modes whose ``f`` (beam splitting) or ``g``
    (squeezing) contribution was dropped because its normalizer vanished.
    """

    A: np.ndarray
    B: np.ndarray
    F_in: np.ndarray = None
    G_in: np.ndarray = None
    F_perp: np.ndarray = None
    G_perp: np.ndarray = None
    h_basis: list = field(default_factory=list)
    flags: tuple = ()

    @classmethod
    def from_matrices(cls, A, B):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if A.shape[0] != B.shape[0] or A.shape[0] % 2 or A.shape[1] % 2 or B.shape[1] % 2:
            raise ShapeError("A and B must be 2M x 2N and 2M x 2K")
        return cls(A, B)

    @property
    def n_out(self):
        return self.A.shape[0] // 2

    @property
    def n_in(self):
        return self.A.shape[1] // 2

    @property
    def cov_B(self):
        return cov_from_B(self)

    def commutator_defect(self):
        """``max|A Omega A^T + B Omega B^T - Omega|``."""
        M = self.n_out
        C = self.A @ symplectic_form(self.n_in) @ self.A.T
        if self.B.shape[1]:
            C = C + self.B @ symplectic_form(self.B.shape[1] // 2) @ self.B.T
        return float(np.max(np.abs(C - symplectic_form(M))))


def assemble_quadrature_map(relations, inputs, tol=COLUMN_FLOOR):
    """Build ``A`` and ``B`` from per-output relations and orthonormal input modes.

    The Gram-Schmidt seed order is ``u_1..u_N, g_1..g_M, f_1..f_M``, so the
    auxiliary modes ``h_1..h_M`` come from the ``g`` and ``h_{M+1}..h_{2M}``
    from the ``f``.  A relation whose ``zeta`` or ``xi`` is below ``tol``
    contributes no mode; its slot in ``h_basis`` is ``None`` and the
    corresponding columns of ``B`` are zero.
    """
    if not isinstance(relations, (list, tuple)):
        relations = [relations]
    relations = [relation_from_first_order(r) if isinstance(r, FirstOrderMap) else r for r in relations]
    inputs = list(inputs)
    N = len(inputs)
    M = len(relations)
    if N:
        gram = np.array([[np.vdot(a.amp * a.grid.weights, b.amp) for b in inputs] for a in inputs])
        if np.max(np.abs(gram - np.eye(N))) > 1e-10:
            raise ContractError("input modes are not orthonormal")
    seeds = list(inputs)
    slots = []
    flags = []
    for j, r in enumerate(relations):
        if r.xi > tol:
            seeds.append(r.g)
            slots.append(("g", j, j))
        else:
            flags.append(f"output {j}: xi below {tol:g}, squeezing contribution dropped")
    for j, r in enumerate(relations):
        if r.zeta > tol:
            seeds.append(r.f)
            slots.append(("f", j, M + j))
        else:
            flags.append(f"output {j}: zeta below {tol:g}, beam-splitting contribution dropped")
    basis, coeffs = gram_schmidt(seeds, N)

    F_in = np.zeros((M, N), dtype=complex)
    G_in = np.zeros((M, N), dtype=complex)
    F_perp = np.zeros((M, 2 * M), dtype=complex)
    G_perp = np.zeros((M, 2 * M), dtype=complex)
    h_basis = [None] * (2 * M)
    col_of_slot = {}
    for k, (kind, j, slot) in enumerate(slots):
        h_basis[slot] = basis[N + k]
        col_of_slot[slot] = N + k
    for k, (kind, j, slot) in enumerate(slots):
        row = coeffs[N + k]
        r = relations[j]
        if kind == "f":
            F_in[j] = r.zeta * np.conj(row[:N])
        else:
            G_in[j] = r.xi * row[:N]
        for s2, col in col_of_slot.items():
            if kind == "f":
                F_perp[j, s2] = r.zeta * np.conj(row[col])
            else:
                G_perp[j, s2] = r.xi * row[col]
    A = complex_to_real(F_in, G_in) if N else np.zeros((2 * M, 0))
    B = complex_to_real(F_perp, G_perp)
    return QuadratureMap(A, B, F_in, G_in, F_perp, G_perp, h_basis, tuple(flags))


def cov_from_B(qmap):
    """Covariance contribution ``B B^T`` of the auxiliary vacuum modes."""
    B = qmap.B
    return B @ B.T


# ---------------------------------------------------------------------------
# Gaussian states


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        cov = np.asarray(self.cov, dtype=float)
        mean = np.asarray(self.mean, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ShapeError(f"covariance must be 2k x 2k, got {cov.shape}")
        if mean.shape != (cov.shape[0],):
            raise ShapeError("mean and covariance sizes differ")
        if np.max(np.abs(cov - cov.T)) > 1e-10 * max(1.0, np.max(np.abs(cov))):
            raise ContractError("covariance matrix is not symmetric")
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))
        object.__setattr__(self, "mean", mean)

    @classmethod
    def vacuum(cls, n=1):
        return cls(np.zeros(2 * n), np.eye(2 * n))

    @property
    def n_modes(self):
        return self.cov.shape[0] // 2

    def symplectic_eigenvalues(self):
        return symplectic_eigenvalues(self.cov)

    def is_physical(self, tol=1e-6):
        return bool(np.all(self.symplectic_eigenvalues() >= 1.0 - tol))

    def reduced(self, modes):
        """Marginal state of the listed modes (zero-based)."""
        modes = list(modes)
        n = self.n_modes
        idx = modes + [n + m for m in modes]
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])


@dataclass(frozen=True)
class ConditionalGaussianState(GaussianState):
    """Output of the ``M > N`` branch.

    ``cov`` and ``mean`` describe the system quadratures in the primed frame
    ``Gamma' = S^-T Gamma_out`` with the environment integrated out.  Given an
    environment outcome ``gamma_e`` the system mean is ``mean + gain gamma_e``;
    ``environment_cov`` is the marginal covariance of ``gamma_e``.
    """

    gain: np.ndarray = None
    environment_cov: np.ndarray = None

    def mean_given(self, gamma_e):
        return self.mean + self.gain @ np.asarray(gamma_e, dtype=float)


def squeezed_vacuum(r):
    """Single-mode squeezed vacuum ``diag(e^-2r, e^2r)``."""
    return GaussianState(np.zeros(2), np.diag([math.exp(-2 * r), math.exp(2 * r)]))


def two_mode_squeezed_vacuum(r):
    """Correlated two-mode squeezed vacuum; each reduced mode is thermal with ``cov = cosh(2r) I``."""
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    cov = np.array(
        [[c, s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, -s, c]],
        dtype=float,
    )
    return GaussianState(np.zeros(4), cov)


def opposite_squeezed_pair(r):
    """Two modes squeezed in opposite quadratures, ``diag(e^-2r, e^2r, e^2r, e^-2r)`` in ``(x1, x2, p1, p2)``.

    This is a two-mode squeezed vacuum written in the basis of its two
    single-mode squeezed supermodes.
    """
    a, b = math.exp(-2 * r), math.exp(2 * r)
    return GaussianState(np.zeros(4), np.diag([a, b, b, a]))


def effective_input(state_in, gb):
    """Reduced input ``P S Gamma_in`` seen by a ``right`` (or square) decomposition."""
    if gb.side == "square":
        return state_in
    if gb.side != "right":
        raise ContractError("effective input is defined for right decompositions")
    T = gb.P @ gb.S
    return GaussianState(T @ state_in.mean, T @ state_in.cov @ T.T)


def propagate_gaussian(state_in, qmap, gb=None, check=True):
    """Propagate a Gaussian input through ``qmap``.

    ``M <= N``: returns the output state ``cov_B + core cov_in,s core^T``.
    ``M > N``: returns a :class:`ConditionalGaussianState` for the system
    block of the primed output quadratures.
    """
    if check and not state_in.is_physical():
        raise UnphysicalStateError("input state is not physical")
    if state_in.n_modes != qmap.n_in:
        raise ShapeError("input state and map disagree on the number of input modes")
    if gb is None:
        gb = _gbmd(qmap.A)
    covB = cov_from_B(qmap)
    if gb.side in ("square", "right"):
        s = effective_input(state_in, gb)
        core = gb.core
        return GaussianState(core @ s.mean, covB + core @ s.cov @ core.T)
    M, N = qmap.n_out, qmap.n_in
    T = np.linalg.inv(gb.S.T)
    cb = T @ covB @ T.T
    sys_idx = list(range(N)) + list(range(M, M + N))
    env_idx = list(range(N, M)) + list(range(M + N, 2 * M))
    c_ss = cb[np.ix_(sys_idx, sys_idx)]
    c_se = cb[np.ix_(sys_idx, env_idx)]
    c_ee = cb[np.ix_(env_idx, env_idx)]
    s = np.linalg.svd(c_ee, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise DegeneracyError("environment block of cov_B is singular")
    gain = np.linalg.solve(c_ee, c_se.T).T
    schur = c_ss - gain @ c_se.T
    core = gb.core
    mean = core @ state_in.mean
    cov = schur + core @ state_in.cov @ core.T
    return ConditionalGaussianState(mean, cov, gain=gain, environment_cov=c_ee)


def rescaled_output_cov(cov_in_s, cov_B, core):
    """``cov_in,s + core^-1 cov_B core^-T``; not checked for physicality."""
    core = np.asarray(core, dtype=float)
    s = np.linalg.svd(core, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= 1e-12 * s[0]:
        raise DegeneracyError("core matrix is singular")
    Ci = np.linalg.inv(core)
    return np.asarray(cov_in_s) + Ci @ np.asarray(cov_B) @ Ci.T


# ---------------------------------------------------------------------------
# Wigner grids


@dataclass(frozen=True)
class WignerWindow:
    """Sampling window ``[-x_half, x_half] x [-p_half, p_half]``."""

    x_half: float = 6.0
    p_half: float = None
    nx: int = 257
    np_: int = None

    def __post_init__(self):
        if self.p_half is None:
            object.__setattr__(self, "p_half", self.x_half)
        if self.np_ is None:
            object.__setattr__(self, "np_", self.nx)
        if not (self.x_half > 0 and self.p_half > 0) or self.nx < 3 or self.np_ < 3:
            raise ContractError("window needs positive half widths and at least 3 samples per axis")

    def axes(self):
        return np.linspace(-self.x_half, self.x_half, self.nx), np.linspace(-self.p_half, self.p_half, self.np_)

    def widened(self, factor):
        return WignerWindow(self.x_half * factor, self.p_half * factor, self.nx, self.np_)


@dataclass(frozen=True)
class WignerGrid:
    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    cell_area: float

    @classmethod
    def from_function(cls, window, fn):
        x, p = window.axes()
        X, P = np.meshgrid(x, p, indexing="ij")
        area = (x[1] - x[0]) * (p[1] - p[0])
        return cls(x, p, fn(X, P), area)

    def integral(self):
        """Trapezoid integral of the sampled field."""
        wx = np.full(self.x_axis.size, 1.0)
        wx[[0, -1]] = 0.5
        wp = np.full(self.p_axis.size, 1.0)
        wp[[0, -1]] = 0.5
        return float(wx @ self.values @ wp * self.cell_area)

    def edge_mass(self):
        v = np.abs(self.values)
        ring = v[0].sum() + v[-1].sum() + v[1:-1, 0].sum() + v[1:-1, -1].sum()
        return float(ring * self.cell_area)

    def moments(self):
        """Mean and covariance (vacuum = I convention) of the sampled field."""
        X, P = np.meshgrid(self.x_axis, self.p_axis, indexing="ij")
        w = self.values * self.cell_area
        tot = w.sum()
        mx, mp = (w * X).sum() / tot, (w * P).sum() / tot
        dx, dp = X - mx, P - mp
        cov = 2.0 * np.array(
            [[(w * dx * dx).sum(), (w * dx * dp).sum()], [(w * dx * dp).sum(), (w * dp * dp).sum()]]
        ) / tot
        return np.array([mx, mp]), cov

    def to_csv(self, path, header_lines=()):
        X, P = np.meshgrid(self.x_axis, self.p_axis, indexing="ij")
        with open(path, "w") as fh:
            for line in header_lines:
                fh.write(f"# {line}\n")
            fh.write("x,p,value\n")
            for xv, pv, wv in zip(X.ravel(), P.ravel(), self.values.ravel()):
                fh.write(f"{float(xv)!r},{float(pv)!r},{float(wv)!r}\n")

    def to_binary(self, path):
        """16-byte header (two little-endian uint64 dimensions) then row-major float64 values."""
        nx, np_ = self.values.shape
        with open(path, "wb") as fh:
            fh.write(struct.pack("<QQ", nx, np_))
            fh.write(np.ascontiguousarray(self.values, dtype="<f8").tobytes())


def read_wigner_binary(path):
    with open(path, "rb") as fh:
        nx, np_ = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != nx * np_:
        raise ShapeError("binary Wigner file is truncated")
    return data.reshape(nx, np_)


def read_wigner_csv(path):
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    x = np.unique(data[:, 0])
    p = np.unique(data[:, 1])
    values = data[:, 2].reshape(x.size, p.size)
    return WignerGrid(x, p, values, (x[1] - x[0]) * (p[1] - p[0]))


def window_for_cov(cov, base=None):
    """Window wide enough for a single-mode field whose second moments are ``cov``."""
    base = base or WignerWindow()
    cov = np.asarray(cov, dtype=float)
    fx = max(1.0, math.sqrt(max(cov[0, 0], 0.0)))
    fp = max(1.0, math.sqrt(max(cov[1, 1], 0.0)))
    return WignerWindow(base.x_half * fx, base.p_half * fp, base.nx, base.np_)


def _auto_widen(window, fn, tries=6):
    grid = WignerGrid.from_function(window, fn)
    for _ in range(tries):
        if grid.edge_mass() <= EDGE_MASS:
            return grid
        window = window.widened(1.5)
        grid = WignerGrid.from_function(window, fn)
    return grid


def gaussian_wigner_eval(state, window=None, mode=None, auto=True):
    """Sample a single-mode Gaussian Wigner function (or the marginal of ``mode``)."""
    if state.n_modes > 1:
        if mode is None:
            raise ContractError("select a mode to sample a multimode state")
        state = state.reduced([mode])
    cov = state.cov
    w = np.linalg.eigvalsh(cov)
    if w[0] <= 0:
        raise ContractError("covariance matrix is not positive definite")
    Ci = np.linalg.inv(cov)
    norm = 1.0 / (math.pi * math.sqrt(np.linalg.det(cov)))
    mx, mp = state.mean

    def fn(X, P):
        dx, dp = X - mx, P - mp
        return norm * np.exp(-(Ci[0, 0] * dx * dx + 2 * Ci[0, 1] * dx * dp + Ci[1, 1] * dp * dp))

    window = window or window_for_cov(cov)
    return _auto_widen(window, fn) if auto else WignerGrid.from_function(window, fn)


def fock_wigner(n, window=None):
    """Wigner function of the ``n``-photon Fock state."""
    window = window or WignerWindow()

    def fn(X, P):
        r2 = X * X + P * P
        return (-1) ** n / math.pi * np.exp(-r2) * eval_genlaguerre(n, 0, 2 * r2)

    return WignerGrid.from_function(window, fn)


def _as_core_and_noise(qmap, gb=None):
    if gb is not None and gb.side != "square":
        if gb.side != "right":
            raise ContractError("phase-space convolution is implemented for M <= N")
        core = gb.core
    else:
        core = qmap.A
    if core.shape != (2, 2):
        raise ShapeError("single effective mode required")
    return np.asarray(core, dtype=float), cov_from_B(qmap)


def smoothing_parameters(A, cov_B):
    """Principal smoothing widths of ``A^-1 cov_B A^-T``.

    Returns ``(sigma_x, sigma_p, e_x, e_p)``; ``e_x`` is the eigenvector with
    the larger x component.
    """
    A = np.asarray(A, dtype=float)
    if abs(np.linalg.det(A)) == 0.0:
        raise DegeneracyError("A is singular")
    Ai = np.linalg.inv(A)
    Sig = Ai @ cov_B @ Ai.T
    Sig = 0.5 * (Sig + Sig.T)
    s, e = np.linalg.eigh(Sig)
    s = np.maximum(s, 0.0)
    if abs(e[0, 0]) >= abs(e[0, 1]):
        return s[0], s[1], e[:, 0], e[:, 1]
    return s[1], s[0], e[:, 1], e[:, 0]


def fock_output_wigner(n, qmap, window=None, gb=None, auto=True):
    """Closed-form output Wigner function for an ``n``-photon input through a one-mode map."""
    if n < 0 or int(n) != n:
        raise ContractError("photon number must be a non-negative integer")
    A, covB = _as_core_and_noise(qmap, gb)
    sx, sp, ex, ep = smoothing_parameters(A, covB)
    C = covB + A @ A.T
    Ci = np.linalg.inv(C)
    norm = 1.0 / (math.pi * math.sqrt(np.linalg.det(C)))
    Ai = np.linalg.inv(A)
    R = np.column_stack([ex, ep])
    rho_x, rho_p = (sx - 1) / (sx + 1), (sp - 1) / (sp + 1)

    def fn(X, P):
        gx = Ai[0, 0] * X + Ai[0, 1] * P
        gp = Ai[1, 0] * X + Ai[1, 1] * P
        y = R[0, 0] * gx + R[1, 0] * gp
        z = R[0, 1] * gx + R[1, 1] * gp
        Ty = scaled_genlaguerre_all(n, -0.5, rho_x, 2 * y * y / (sx + 1) ** 2)
        Tz = scaled_genlaguerre_all(n, -0.5, rho_p, 2 * z * z / (sp + 1) ** 2)
        s = sum(Ty[m] * Tz[n - m] for m in range(n + 1))
        gauss = np.exp(-(Ci[0, 0] * X * X + 2 * Ci[0, 1] * X * P + Ci[1, 1] * P * P))
        return norm * gauss * s

    if window is None:
        window = window_for_cov(C)
    return _auto_widen(window, fn) if auto else WignerGrid.from_function(window, fn)


def wigner_convolution_oracle(W_in, qmap, gb=None, window=None, chunk=512):
    """Brute-force output Wigner function by direct quadrature of the convolution.

    ``W_out(gamma) = |det core|^-1 int W_in(g') G(core^-1 gamma - g') dg'`` with
    ``G`` the unit-normalized Gaussian of covariance ``core^-1 cov_B core^-T``.
    Accepts a list of input grids on a common window and returns a list.
    """
    single = isinstance(W_in, WignerGrid)
    grids = [W_in] if single else list(W_in)
    ref = grids[0]
    for g in grids:
        if g.edge_mass() > EDGE_MASS:
            raise WindowError(f"input Wigner function has edge mass {g.edge_mass():.3e}")
    core, covB = _as_core_and_noise(qmap, gb)
    det = abs(np.linalg.det(core))
    if det == 0.0:
        raise DegeneracyError("core matrix is singular")
    Ci = np.linalg.inv(core)
    Sig = Ci @ covB @ Ci.T
    Sig = 0.5 * (Sig + Sig.T)
    if window is None:
        _, m2 = ref.moments()
        window = window_for_cov(covB + core @ m2 @ core.T)
    x, p = window.axes()
    X, P = np.meshgrid(x, p, indexing="ij")
    Y = np.stack([Ci[0, 0] * X + Ci[0, 1] * P, Ci[1, 0] * X + Ci[1, 1] * P], axis=-1).reshape(-1, 2)
    area = (x[1] - x[0]) * (p[1] - p[0])

    lam = np.linalg.eigvalsh(Sig)
    if lam[-1] <= 1e-14:
        outs = []
        for g in grids:
            spl = RectBivariateSpline(g.x_axis, g.p_axis, g.values, kx=3, ky=3)
            vals = spl.ev(Y[:, 0], Y[:, 1]) / det
            outs.append(WignerGrid(x, p, vals.reshape(X.shape), area))
        return outs[0] if single else outs
    if lam[0] <= 0:
        raise ContractError("smoothing covariance must be positive definite or zero")

    Si = np.linalg.inv(Sig)
    gnorm = 1.0 / (math.pi * math.sqrt(np.linalg.det(Sig)))
    gx, gp = np.meshgrid(ref.x_axis, ref.p_axis, indexing="ij")
    pts = np.stack([gx.ravel(), gp.ravel()], axis=-1)
    wx = np.full(ref.x_axis.size, 1.0)
    wx[[0, -1]] = 0.5
    wp = np.full(ref.p_axis.size, 1.0)
    wp[[0, -1]] = 0.5
    wts = (np.outer(wx, wp) * ref.cell_area).ravel()
    Win = np.stack([g.values.ravel() * wts for g in grids], axis=1)
    out = np.empty((Y.shape[0], len(grids)))
    for i in range(0, Y.shape[0], chunk):
        d = Y[i:i + chunk, None, :] - pts[None, :, :]
        q = Si[0, 0] * d[..., 0] ** 2 + 2 * Si[0, 1] * d[..., 0] * d[..., 1] + Si[1, 1] * d[..., 1] ** 2
        out[i:i + chunk] = np.exp(-q) @ Win
    out *= gnorm / det
    outs = [WignerGrid(x, p, out[:, k].reshape(X.shape), area) for k in range(len(grids))]
    return outs[0] if single else outs
