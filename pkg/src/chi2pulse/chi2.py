"""THz-to-optical chi(2) interaction: dispersion, kernels and the first-order map.

The squeezing kernel ``J`` and beam-splitting kernel ``K`` are dense complex
matrices indexed as ``J[a, b] = J(Omega_a, omega_b)`` on a shared frequency
grid.  The interaction couples a THz band (below ``band_split``) to an optical
band (above it); kernel entries connecting two frequencies on the same side of
the split are set to zero, which enforces the spectral disjointness of the
THz input and optical output modes that the first-order map relies on.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import constants

from .errors import CoverageError, DegenerateRegimeError, DispersionRangeError, GridMismatchError, ParameterError
from .spectral import FWHM_PER_STD, ModeFunction, thz_to_omega

C_LIGHT = constants.c
HBAR = constants.hbar
EPS0 = constants.epsilon_0


@dataclass(frozen=True)
class ConstantIndex:
    """Dispersionless medium."""

    n0: float = 2.85

    def __post_init__(self):
        if not self.n0 > 1.0:
            raise ParameterError(f"refractive index must exceed 1, got {self.n0}")

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise DispersionRangeError("refractive index requested at non-positive frequency")
        return np.full(omega.shape, float(self.n0))


@dataclass(frozen=True)
class SellmeierIndex:
    """Single-pole Sellmeier model ``n**2 = a0 + b0 lam**2 / (lam**2 - c0)``, ``lam`` in micrometres."""

    a0: float = 4.27
    b0: float = 3.01
    c0: float = 0.142
    lambda_min_um: float = 0.45
    lambda_max_um: float = 30.0

    def __post_init__(self):
        if self.c0 < 0 or self.lambda_min_um ** 2 <= self.c0:
            raise ParameterError("Sellmeier validity window must lie above the pole")
        if not self.lambda_max_um > self.lambda_min_um:
            raise ParameterError("lambda_max_um must exceed lambda_min_um")

    @property
    def omega_range(self):
        k = 2e6 * math.pi * C_LIGHT
        return k / self.lambda_max_um, k / self.lambda_min_um

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.omega_range
        bad = (omega < lo * (1 - 1e-12)) | (omega > hi * (1 + 1e-12))
        if np.any(bad):
            w = omega[bad].flat[0]
            raise DispersionRangeError(
                f"Sellmeier model valid for {lo:.4g}..{hi:.4g} rad/s, requested {w:.4g}"
            )
        lam2 = (2e6 * math.pi * C_LIGHT / omega) ** 2
        return np.sqrt(self.a0 + self.b0 * lam2 / (lam2 - self.c0))

    @property
    def long_wavelength_limit(self):
        return math.sqrt(self.a0 + self.b0)


@dataclass(frozen=True)
class TwoBandIndex:
    """Constant THz index joined smoothly onto a Sellmeier optical model.

    Below ``blend_lo`` the index is ``thz_index``; above ``blend_hi`` it follows
    ``optical``.  In between a raised-cosine weight interpolates, so the
    index is continuous with a continuous derivative.
    """

    optical: SellmeierIndex = field(default_factory=SellmeierIndex)
    thz_index: float = 2.59
    blend_lo: float = thz_to_omega(60.0)
    blend_hi: float = thz_to_omega(100.0)

    def __post_init__(self):
        if not self.thz_index > 1.0:
            raise ParameterError(f"THz index must exceed 1, got {self.thz_index}")
        if not self.blend_hi > self.blend_lo:
            raise ParameterError("blend_hi must exceed blend_lo")
        if self.blend_lo < self.optical.omega_range[0]:
            raise ParameterError("blend region must lie inside the optical model's validity window")

    @property
    def omega_range(self):
        return 0.0, self.optical.omega_range[1]

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        if np.any(omega <= 0):
            raise DispersionRangeError("refractive index requested at non-positive frequency")
        out = np.full(omega.shape, float(self.thz_index))
        hi = omega > self.blend_lo
        if np.any(hi):
            w = omega[hi]
            t = np.clip((w - self.blend_lo) / (self.blend_hi - self.blend_lo), 0.0, 1.0)
            s = 0.5 * (1.0 - np.cos(math.pi * t))
            out[hi] = (1.0 - s) * self.thz_index + s * self.optical(w)
        return out


def refractive_index(omega, model):
    """Refractive index of ``model`` at angular frequency ``omega`` (scalar or array)."""
    n = model(omega)
    return float(n) if np.ndim(omega) == 0 else n


def wavenumber(x, model):
    """Signed wavenumber ``k(x) = x n(|x|) / c``, extended as an odd function with ``k(0) = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    nz = x != 0
    if np.any(nz):
        out[nz] = x[nz] * model(np.abs(x[nz])) / C_LIGHT
    return out


def delta_k(Omega, omega, model):
    """Phase mismatch ``k(Omega + omega) - k(Omega) - k(omega)`` in 1/m."""
    Omega = np.asarray(Omega, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if np.any(Omega <= 0) or np.any(omega <= 0):
        raise ParameterError("delta_k expects positive frequencies")
    dk = wavenumber(Omega + omega, model) - wavenumber(Omega, model) - wavenumber(omega, model)
    return float(dk) if dk.ndim == 0 else dk


@dataclass(frozen=True)
class CrystalParams:
    """Nonlinear crystal.  SI units; ``coupling_lambda=None`` selects the default coupling."""

    length: float = 20e-6
    r41: float = 4e-12
    beam_area: float = math.pi * (3e-6) ** 2
    coupling_lambda: float = None
    dispersion: object = field(default_factory=TwoBandIndex)

    def __post_init__(self):
        if not self.length > 0:
            raise ParameterError("crystal length must be positive")
        if not self.beam_area > 0:
            raise ParameterError("beam area must be positive")

    def coupling(self, omega_p):
        """Coupling ``lambda``; default ``eps0 A n(omega_p)**4 r41 / 2``."""
        if self.coupling_lambda is not None:
            return float(self.coupling_lambda)
        n = refractive_index(omega_p, self.dispersion)
        return EPS0 * self.beam_area * n**4 * self.r41 / 2.0


@dataclass(frozen=True)
class PumpPulse:
    """Coherent pump ``alpha(Omega) = alpha g(Omega)``.

    ``g`` is a Gaussian with intensity FWHM ``delta_omega_p`` centred at
    ``omega_p``, cut off beyond ``truncation`` intensity standard deviations
    and for ``Omega <= 0``, and normalized to unit norm on the grid.
    """

    alpha: complex = 1.0
    omega_p: float = thz_to_omega(200.0)
    delta_omega_p: float = thz_to_omega(118.0)
    truncation: float = 5.0

    def __post_init__(self):
        if not self.omega_p > 0 or not self.delta_omega_p > 0:
            raise ParameterError("pump centre and bandwidth must be positive")
        if not self.truncation > 0:
            raise ParameterError("pump truncation must be positive")

    @property
    def width(self):
        return self.delta_omega_p / FWHM_PER_STD

    def support(self):
        s = self.truncation * self.width
        return max(0.0, self.omega_p - s), self.omega_p + s

    def _shape(self, Omega):
        Omega = np.asarray(Omega, dtype=float)
        lo, hi = self.support()
        g = np.exp(-((Omega - self.omega_p) ** 2) / (4.0 * self.width**2))
        return np.where((Omega > 0) & (Omega > lo) & (Omega <= hi), g, 0.0)

    def shape(self, Omega, grid):
        """Unit-norm profile ``g(Omega)`` (normalization taken on ``grid``)."""
        norm = math.sqrt(float(grid.integrate(self._shape(grid.samples) ** 2)))
        return self._shape(Omega) / norm

    def spectrum(self, Omega, grid):
        return self.alpha * self.shape(Omega, grid)


@dataclass(frozen=True)
class InteractionKernels:
    grid: object
    J: np.ndarray
    K: np.ndarray
    band_split: float

    def scaled(self, factor):
        return InteractionKernels(self.grid, self.J * factor, self.K * factor, self.band_split)


DEFAULT_BAND_SPLIT = thz_to_omega(100.0)


def _check_coverage(pump, grid, band_split):
    lo, hi = pump.support()
    if not grid.covers(max(lo, grid.omega_min), hi):
        raise CoverageError(
            f"grid up to {grid.omega_max:.4g} rad/s does not cover the pump support up to {hi:.4g} rad/s"
        )
    if not grid.omega_min < band_split < grid.omega_max:
        raise CoverageError("band split must lie strictly inside the grid")


def _kernel_rows(rows, crystal, pump, grid, band_split):
    """Rows ``rows`` of (J, K); each row is computed independently."""
    w = grid.samples
    Om = w[rows][:, None]
    om = w[None, :]
    disp = crystal.dispersion
    lam = crystal.coupling(pump.omega_p)
    pref = (2.0 / HBAR) * (2 * math.pi) ** 1.5 * (HBAR / (4 * math.pi * EPS0 * C_LIGHT * crystal.beam_area)) ** 1.5
    L = crystal.length
    cross = (Om < band_split) != (om < band_split)

    n_w = disp(w)
    common = np.sqrt(Om * om / (n_w[rows][:, None] * n_w[None, :]))

    # squeezing kernel, evaluated only where the pump at Omega + omega is nonzero
    s = Om + om
    amp_s = pump.shape(s, grid)
    live = cross & (amp_s != 0)
    J = np.zeros(s.shape, dtype=complex)
    if np.any(live):
        sl = s[live]
        n_s = disp(sl)
        Om_l = np.broadcast_to(Om, s.shape)[live]
        om_l = np.broadcast_to(om, s.shape)[live]
        dk = wavenumber(sl, disp) - wavenumber(Om_l, disp) - wavenumber(om_l, disp)
        lam_hat = lam * L / math.sqrt(2 * math.pi) * np.sinc(dk * L / (2 * math.pi))
        J[live] = pref * np.sqrt(sl / n_s) * pump.alpha * amp_s[live] * common[live] * lam_hat

    # beam-splitting kernel with alpha(Omega - omega) + conj(alpha)(omega - Omega)
    d = Om - om
    d_full = np.broadcast_to(d, s.shape)
    g_pos = pump.shape(np.abs(d_full), grid)
    pump_term = np.where(d_full > 0, pump.alpha * g_pos, np.where(d_full < 0, np.conj(pump.alpha) * g_pos, 0.0))
    live = cross & (pump_term != 0)
    K = np.zeros(s.shape, dtype=complex)
    if np.any(live):
        Om_l = np.broadcast_to(Om, s.shape)[live]
        om_l = np.broadcast_to(om, s.shape)[live]
        n_s = disp(Om_l + om_l)
        dk = wavenumber(om_l - Om_l, disp) - wavenumber(-Om_l, disp) - wavenumber(om_l, disp)
        lam_hat = lam * L / math.sqrt(2 * math.pi) * np.sinc(dk * L / (2 * math.pi))
        K[live] = pref * np.sqrt(np.abs(om_l - Om_l) / n_s) * pump_term[live] * common[live] * lam_hat
    return J, K


def build_kernels(crystal, pump, grid, band_split=DEFAULT_BAND_SPLIT, threads=1, block=128):
    """Assemble the dense kernels ``J`` and ``K`` on ``grid``.

    Rows are independent; with ``threads > 1`` blocks of rows are evaluated
    concurrently and stitched back in order.
    """
    _check_coverage(pump, grid, band_split)
    n = grid.n_points
    J = np.zeros((n, n), dtype=complex)
    K = np.zeros((n, n), dtype=complex)
    if pump.alpha == 0:
        return InteractionKernels(grid, J, K, band_split)
    blocks = [np.arange(i, min(i + block, n)) for i in range(0, n, block)]

    def work(rows):
        return rows, _kernel_rows(rows, crystal, pump, grid, band_split)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, blocks))
    else:
        results = [work(b) for b in blocks]
    for rows, (Jb, Kb) in results:
        J[rows] = Jb
        K[rows] = Kb
    return InteractionKernels(grid, J, K, band_split)


class Regime(str, Enum):
    BEAM_SPLITTING = "beam_splitting"
    SQUEEZING = "squeezing"
    NONE = "none"


@dataclass(frozen=True)
class FirstOrderMap:
    """Effective single-output-mode Bogoliubov relation ``b_v = zeta a_f + xi a_g^dagger``."""

    v: ModeFunction
    f_K: ModeFunction
    f_J: ModeFunction
    theta_K: float
    theta_J: float
    theta: float
    mu: float
    nu: float
    regime: Regime
    f: ModeFunction
    g: ModeFunction
    zeta: float
    xi: float


def overlap_vectors(v, kernels):
    """Unnormalized ``f_K`` and ``f_J`` amplitude vectors for output mode ``v``."""
    if v.grid != kernels.grid:
        raise GridMismatchError("output mode and kernels use different grids")
    wv = kernels.grid.weights * v.amp
    f_K = -(np.conj(kernels.K) @ wv)
    f_J = np.conj(kernels.J) @ np.conj(wv)
    return f_K, f_J


def first_order_map(v, kernels, tol=1e-9):
    """First-order unitary reduction for output mode ``v``."""
    f_K, f_J = overlap_vectors(v, kernels)
    return first_order_map_from_overlaps(v, f_K, f_J, tol=tol)


def first_order_map_from_overlaps(v, f_K, f_J, tol=1e-9):
    """As :func:`first_order_map`, starting from precomputed ``f_K``, ``f_J`` vectors.

    Both vectors scale linearly with a real pump amplitude, so sweeps over
    ``alpha`` can reuse one kernel contraction per output mode.
    """
    grid = v.grid
    fK = ModeFunction(grid, f_K)
    fJ = ModeFunction(grid, f_J)
    tK = fK.norm()
    tJ = fJ.norm()
    big = max(tK, tJ)
    if big == 0.0:
        zero = ModeFunction(grid, np.zeros(grid.n_points))
        return FirstOrderMap(v, fK, fJ, 0.0, 0.0, 0.0, 1.0, 0.0, Regime.NONE, v, zero, 1.0, 0.0)
    if abs(tK - tJ) <= tol * big:
        raise DegenerateRegimeError(
            f"theta_K = {tK:.6g} and theta_J = {tJ:.6g} coincide; regime undefined"
        )
    theta = math.sqrt(abs(tK**2 - tJ**2))
    if tK > tJ:
        regime = Regime.BEAM_SPLITTING
        mu, nu = math.cos(theta), math.sin(theta)
    else:
        regime = Regime.SQUEEZING
        mu, nu = math.cosh(theta), math.sinh(theta)
    vK = tK / theta
    vJ = tJ / theta
    zeta = math.sqrt(mu**2 + (nu * vK) ** 2)
    xi = abs(nu) * vJ
    f_amp = (mu * v.amp + (nu / theta) * fK.amp) / zeta
    f = ModeFunction(grid, f_amp, True)
    if xi > 0:
        g = ModeFunction(grid, (nu / theta) * fJ.amp / xi, True)
    else:
        g = ModeFunction(grid, np.zeros(grid.n_points))
    return FirstOrderMap(v, fK, fJ, tK, tJ, theta, mu, nu, regime, f, g, zeta, xi)


def save_kernels_csv(kernels, prefix):
    """Write ``J`` and ``K`` as dense row-major CSV matrices (real and imaginary parts separately)."""
    paths = []
    for name, M in (("J", kernels.J), ("K", kernels.K)):
        for part, data in (("re", M.real), ("im", M.imag)):
            path = f"{prefix}{name}_{part}.csv"
            np.savetxt(path, data, delimiter=",", fmt="%.17g")
            paths.append(path)
    return paths
