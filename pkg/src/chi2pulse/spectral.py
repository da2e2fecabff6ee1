"""Frequency grids, broadband mode functions and their orthogonalization.

Angular frequencies are in rad/s throughout.  Mode amplitudes carry units of
1/sqrt(rad/s) so that the quadrature of ``|u|**2`` is dimensionless.
"""

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, ParameterError, RankDeficiencyError, TruncationWarning

TWO_PI = 2.0 * math.pi
THZ = 1e12
FWHM_PER_STD = 2.0 * math.sqrt(2.0 * math.log(2.0))

DEFAULT_GRID_POINTS = 2048
DEFAULT_GRID_MIN_THZ = 0.1
DEFAULT_GRID_MAX_THZ = 500.0
DEPENDENCE_THRESHOLD = 1e-8


def thz_to_omega(f_thz):
    """Ordinary frequency in THz to angular frequency in rad/s."""
    return TWO_PI * THZ * f_thz


def omega_to_thz(omega):
    """Angular frequency in rad/s to ordinary frequency in THz."""
    return omega / (TWO_PI * THZ)


def fwhm_to_width(fwhm):
    """Convert an intensity FWHM into the intensity standard deviation used by :func:`gaussian_mode`."""
    return fwhm / FWHM_PER_STD


def _readonly(a):
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid on ``[omega_min, omega_max]`` with composite trapezoid weights.

    Two grids compare equal when their three defining parameters are equal.
    """

    omega_min: float
    omega_max: float
    n_points: int
    samples: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.omega_min > 0):
            raise ParameterError(f"omega_min must be > 0, got {self.omega_min}")
        if not (self.omega_max > self.omega_min):
            raise ParameterError("omega_max must exceed omega_min")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ParameterError(f"n_points must be an integer >= 2, got {self.n_points}")
        object.__setattr__(self, "omega_min", float(self.omega_min))
        object.__setattr__(self, "omega_max", float(self.omega_max))
        object.__setattr__(self, "n_points", int(self.n_points))
        samples = np.linspace(self.omega_min, self.omega_max, self.n_points)
        h = (self.omega_max - self.omega_min) / (self.n_points - 1)
        weights = np.full(self.n_points, h)
        weights[0] = weights[-1] = 0.5 * h
        object.__setattr__(self, "samples", _readonly(samples))
        object.__setattr__(self, "weights", _readonly(weights))

    @classmethod
    def from_thz(cls, f_min=DEFAULT_GRID_MIN_THZ, f_max=DEFAULT_GRID_MAX_THZ, n_points=DEFAULT_GRID_POINTS):
        return cls(thz_to_omega(f_min), thz_to_omega(f_max), n_points)

    @property
    def spacing(self):
        return (self.omega_max - self.omega_min) / (self.n_points - 1)

    def integrate(self, values):
        """Trapezoid quadrature of sampled values along the last axis."""
        return np.asarray(values) @ self.weights

    def covers(self, lo, hi):
        return self.omega_min <= lo and hi <= self.omega_max

    def __hash__(self):
        return hash((self.omega_min, self.omega_max, self.n_points))


@dataclass(frozen=True)
class ModeFunction:
    """Complex spectral amplitude sampled on a :class:`FrequencyGrid`."""

    grid: FrequencyGrid
    amp: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        amp = np.asarray(self.amp, dtype=complex)
        if amp.shape != (self.grid.n_points,):
            raise ParameterError(f"amplitude has shape {amp.shape}, grid has {self.grid.n_points} points")
        object.__setattr__(self, "amp", _readonly(amp))

    def norm(self):
        return math.sqrt(float(self.grid.integrate(np.abs(self.amp) ** 2)))

    def normalize(self):
        n = self.norm()
        if n == 0.0:
            raise ParameterError("cannot normalize a mode with zero norm")
        return ModeFunction(self.grid, self.amp / n, True)

    def scaled(self, factor):
        return ModeFunction(self.grid, self.amp * factor, False)


def inner_product(u, v):
    """Quadrature of ``conj(u) * v`` over the shared grid."""
    if u.grid != v.grid:
        raise GridMismatchError("mode functions are sampled on different grids")
    return complex(u.grid.integrate(np.conj(u.amp) * v.amp))


def gaussian_mode(center, width, grid, support=None):
    """Real Gaussian mode with unit norm on ``grid``.

    ``width`` is the standard deviation of the spectral intensity ``|u|**2``,
    so the amplitude falls as ``exp(-(omega - center)**2 / (4 width**2))``.
    ``support`` optionally restricts the mode to ``(lo, hi)``; the profile is
    zeroed outside and renormalized.  Without an explicit support a
    :class:`TruncationWarning` is issued if the grid does not reach five
    widths on either side of the center.
    """
    if not (width > 0):
        raise ParameterError(f"width must be positive, got {width}")
    if not (center > 0):
        raise ParameterError(f"center must be positive, got {center}")
    w = grid.samples
    amp = np.exp(-((w - center) ** 2) / (4.0 * width**2))
    if support is not None:
        lo, hi = support
        amp = np.where((w >= lo) & (w <= hi), amp, 0.0)
    elif not grid.covers(center - 5 * width, center + 5 * width):
        warnings.warn(
            f"grid [{grid.omega_min:.4g}, {grid.omega_max:.4g}] rad/s truncates the Gaussian "
            f"centered at {center:.4g} with width {width:.4g}",
            TruncationWarning,
            stacklevel=2,
        )
    mode = ModeFunction(grid, amp)
    if mode.norm() == 0.0:
        raise ParameterError("Gaussian mode has no weight on the grid or support")
    return mode.normalize()


def gram_schmidt(seed, preserved_count=0, tol=DEPENDENCE_THRESHOLD):
    """Orthonormalize ``seed`` in order, keeping the leading modes untouched.

    Returns ``(basis, coeffs)`` where ``coeffs`` is lower triangular and
    ``seed[i] = sum_j coeffs[i, j] * basis[j]``.  The first
    ``preserved_count`` modes must already be orthonormal; they are passed
    through and their coefficient rows are the identity.  A seed whose
    residual after projection falls below ``tol`` times its own norm raises
    :class:`RankDeficiencyError`.
    """
    seed = list(seed)
    if not seed:
        return [], np.zeros((0, 0), dtype=complex)
    grid = seed[0].grid
    for s in seed:
        if s.grid != grid:
            raise GridMismatchError("seed modes are sampled on different grids")
    if not 0 <= preserved_count <= len(seed):
        raise ParameterError("preserved_count out of range")
    n = len(seed)
    wts = grid.weights
    coeffs = np.zeros((n, n), dtype=complex)
    vecs = []
    basis = []
    for i, s in enumerate(seed):
        if i < preserved_count:
            vecs.append(np.array(s.amp))
            basis.append(s if s.normalized else ModeFunction(grid, s.amp, True))
            coeffs[i, i] = 1.0
            continue
        r = np.array(s.amp)
        seed_norm = math.sqrt(float(wts @ np.abs(r) ** 2))
        if seed_norm == 0.0:
            raise RankDeficiencyError(i, 0.0)
        proj = np.zeros(i, dtype=complex)
        # two passes of classical Gram-Schmidt keep the basis orthogonal to rounding
        for _ in range(2):
            for j, b in enumerate(vecs):
                c = np.vdot(b * wts, r)
                proj[j] += c
                r = r - c * b
        res = math.sqrt(float(wts @ np.abs(r) ** 2))
        if res < tol * seed_norm:
            raise RankDeficiencyError(i, res / seed_norm)
        b = r / res
        vecs.append(b)
        basis.append(ModeFunction(grid, b, True))
        coeffs[i, :i] = proj
        coeffs[i, i] = res
    return basis, coeffs


def save_mode_csv(mode, path):
    """Write a mode as ``omega_rad_per_s, re_amp, im_amp`` rows with a header."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["omega_rad_per_s", "re_amp", "im_amp"])
        for w, a in zip(mode.grid.samples, mode.amp):
            wr.writerow([repr(float(w)), repr(float(a.real)), repr(float(a.imag))])


def load_mode_csv(path):
    """Read a mode written by :func:`save_mode_csv`; the grid must be uniform."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [h.strip() for h in rows[0]]
    if header != ["omega_rad_per_s", "re_amp", "im_amp"]:
        raise ParameterError(f"unexpected mode CSV header {header}")
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    omega = data[:, 0]
    grid = FrequencyGrid(omega[0], omega[-1], len(omega))
    if not np.allclose(grid.samples, omega, rtol=1e-12, atol=0.0):
        raise ParameterError("mode CSV frequencies are not a uniform grid")
    amp = data[:, 1] + 1j * data[:, 2]
    mode = ModeFunction(grid, amp)
    return ModeFunction(grid, amp, abs(mode.norm() - 1.0) < 1e-10)
