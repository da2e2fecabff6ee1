"""The two worked experiments: Fock up-conversion and a two-mode squeezed input.

A THz input (one or two broadband modes) is up-converted to a single optical
output mode centred at ``omega_out``.  :class:`Experiment` holds everything
that does not depend on the sweep point; :meth:`Experiment.evaluate` returns
one :class:`PointResult` per ``(omega_out, alpha)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chi2 import (
    CrystalParams,
    PumpPulse,
    Regime,
    build_kernels,
    first_order_map_from_overlaps,
    overlap_vectors,
)
from .errors import DegeneracyError, DegenerateRegimeError, UnphysicalStateError
from .phasespace import (
    GaussianState,
    assemble_quadrature_map,
    cov_from_B,
    effective_input,
    opposite_squeezed_pair,
    rescaled_output_cov,
    smoothing_parameters,
)
from .spectral import FrequencyGrid, fwhm_to_width, gaussian_mode, gram_schmidt, thz_to_omega
from .symplectic import gbmd, von_neumann_entropy

FOCK = "fock_single_mode"
TWO_MODE = "two_mode_squeezed"


@dataclass
class PointResult:
    omega_out_thz: float
    alpha: float
    flags: list
    fom: object = None
    qmap: object = None
    gb: object = None
    cov_in: np.ndarray = None
    cov_in_s: np.ndarray = None
    cov_out: np.ndarray = None
    cov_rescaled: np.ndarray = None
    sigma_x: float = math.nan
    sigma_p: float = math.nan
    entropy_in_s: float = math.nan
    entropy_out: float = math.nan
    entropy_rescaled: float = math.nan

    @property
    def ok(self):
        return not self.flags


class Experiment:
    """Frequency grid, crystal, pump and input modes derived from a config."""

    def __init__(self, cfg, threads=1):
        self.cfg = cfg
        self.grid = FrequencyGrid.from_thz(cfg.grid_min_thz, cfg.grid_max_thz, cfg.grid_points)
        self.crystal = cfg.crystal()
        self.pump = PumpPulse(1.0, thz_to_omega(cfg.pump_center_thz), thz_to_omega(cfg.pump_fwhm_thz), cfg.pump_truncation)
        self.band_split = thz_to_omega(cfg.band_split_thz)
        self.kernels = build_kernels(self.crystal, self.pump, self.grid, self.band_split, threads=threads)
        thz_band = (self.grid.omega_min, self.band_split)
        u1 = gaussian_mode(thz_to_omega(cfg.input_center_thz), fwhm_to_width(thz_to_omega(cfg.input_fwhm_thz)), self.grid, support=thz_band)
        if cfg.experiment == TWO_MODE:
            seed2 = gaussian_mode(
                thz_to_omega(cfg.second_input_center_thz),
                fwhm_to_width(thz_to_omega(cfg.second_input_fwhm_thz)),
                self.grid,
                support=thz_band,
            )
            self.inputs, _ = gram_schmidt([u1, seed2], 1)
            self.state_in = opposite_squeezed_pair(cfg.squeeze_r)
        else:
            self.inputs = [u1]
            self.state_in = GaussianState.vacuum(1)
        self._overlaps = {}

    def output_mode(self, omega_out_thz):
        return gaussian_mode(
            thz_to_omega(omega_out_thz),
            fwhm_to_width(thz_to_omega(self.cfg.output_fwhm_thz)),
            self.grid,
            support=(self.band_split, self.grid.omega_max),
        )

    def unit_overlaps(self, omega_out_thz):
        """Output mode and its ``f_K``, ``f_J`` vectors at unit pump amplitude (cached)."""
        key = float(omega_out_thz)
        if key not in self._overlaps:
            v = self.output_mode(key)
            self._overlaps[key] = (v,) + overlap_vectors(v, self.kernels)
        return self._overlaps[key]

    def theta_per_alpha(self, omega_out_thz):
        v, fK, fJ = self.unit_overlaps(omega_out_thz)
        tK = math.sqrt(float(self.grid.integrate(np.abs(fK) ** 2)))
        tJ = math.sqrt(float(self.grid.integrate(np.abs(fJ) ** 2)))
        return math.sqrt(abs(tK**2 - tJ**2)), tK > tJ

    def alpha_for_theta(self, omega_out_thz, theta):
        """Pump amplitude giving the requested ``theta`` (``theta`` is linear in ``alpha``)."""
        return theta / self.theta_per_alpha(omega_out_thz)[0]

    def first_order(self, omega_out_thz, alpha):
        v, fK, fJ = self.unit_overlaps(omega_out_thz)
        return first_order_map_from_overlaps(v, alpha * fK, alpha * fJ)

    def evaluate(self, omega_out_thz, alpha):
        res = PointResult(float(omega_out_thz), float(alpha), [])
        try:
            fom = self.first_order(omega_out_thz, alpha)
        except DegenerateRegimeError:
            res.flags.append("degenerate_regime")
            return res
        res.fom = fom
        qmap = assemble_quadrature_map([fom], self.inputs)
        res.qmap = qmap
        covB = cov_from_B(qmap)
        res.cov_in = self.state_in.cov
        A = qmap.A
        res.cov_out = covB + A @ self.state_in.cov @ A.T
        try:
            gb = gbmd(A)
        except DegeneracyError:
            res.flags.append("singular_core")
            gb = None
        res.gb = gb
        if gb is not None:
            s = effective_input(self.state_in, gb)
            res.cov_in_s = s.cov
            res.cov_out = covB + gb.core @ s.cov @ gb.core.T
            try:
                res.sigma_x, res.sigma_p = smoothing_parameters(gb.core, covB)[:2]
                res.cov_rescaled = rescaled_output_cov(s.cov, covB, gb.core)
            except DegeneracyError:
                res.flags.append("singular_core")
        elif self.cfg.experiment == FOCK:
            res.cov_in_s = self.state_in.cov
        for name, cov in (("entropy_in_s", res.cov_in_s), ("entropy_out", res.cov_out), ("entropy_rescaled", res.cov_rescaled)):
            if cov is None:
                continue
            try:
                setattr(res, name, von_neumann_entropy(cov))
            except UnphysicalStateError:
                if name != "entropy_rescaled":
                    res.flags.append(f"unphysical_{name[8:]}")
        return res


def is_squeezing(res):
    return res.fom is not None and res.fom.regime == Regime.SQUEEZING
