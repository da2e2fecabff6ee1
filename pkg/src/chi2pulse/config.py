"""Sweep configuration: schema, defaults, YAML parsing and serialization.

Frequencies are ordinary frequencies in THz and lengths in micrometres at
this boundary; :meth:`SweepConfig.crystal` converts to SI.  See
``docs/config.md`` for the annotated schema.
"""

import math
from dataclasses import asdict, dataclass, fields

import numpy as np
import yaml

from .chi2 import ConstantIndex, CrystalParams, SellmeierIndex, TwoBandIndex
from .errors import ConfigError, ParameterError
from .spectral import thz_to_omega

EXPERIMENTS = ("fock_single_mode", "two_mode_squeezed")
DISPERSION_MODELS = ("two_band", "sellmeier", "constant")


@dataclass(frozen=True)
class SweepConfig:
    experiment: str = "fock_single_mode"
    fock_n: int = 3
    squeeze_r: float = 1.0

    omega_out_min_thz: float = 180.0
    omega_out_max_thz: float = 230.0
    omega_out_step_thz: float = 1.0
    alpha_min: float = 0.0
    alpha_max: float = 8e6
    alpha_step: float = 8e4

    grid_min_thz: float = 0.1
    grid_max_thz: float = 500.0
    grid_points: int = 2048
    band_split_thz: float = 100.0

    crystal_length_um: float = 20.0
    r41: float = 4e-12
    beam_area_um2: float = math.pi * 9.0
    coupling_lambda: float = None

    dispersion_model: str = "two_band"
    sellmeier_a0: float = 4.27
    sellmeier_b0: float = 3.01
    sellmeier_c0_um2: float = 0.142
    sellmeier_lambda_min_um: float = 0.45
    sellmeier_lambda_max_um: float = 30.0
    thz_index: float = 2.59
    blend_lo_thz: float = 60.0
    blend_hi_thz: float = 100.0
    constant_index: float = 2.85

    pump_center_thz: float = 200.0
    pump_fwhm_thz: float = 118.0
    pump_truncation: float = 5.0

    input_center_thz: float = 27.0
    input_fwhm_thz: float = 35.0
    second_input_center_thz: float = 40.0
    second_input_fwhm_thz: float = 17.5
    output_fwhm_thz: float = 24.0

    wigner_half_width: float = 6.0
    wigner_points: int = 257

    output_dir: str = "results"
    threads: int = 1

    def omega_out_values(self):
        return _axis(self.omega_out_min_thz, self.omega_out_max_thz, self.omega_out_step_thz)

    def alpha_values(self):
        return _axis(self.alpha_min, self.alpha_max, self.alpha_step)

    def dispersion(self):
        opt = SellmeierIndex(
            self.sellmeier_a0,
            self.sellmeier_b0,
            self.sellmeier_c0_um2,
            self.sellmeier_lambda_min_um,
            self.sellmeier_lambda_max_um,
        )
        if self.dispersion_model == "sellmeier":
            return opt
        if self.dispersion_model == "constant":
            return ConstantIndex(self.constant_index)
        return TwoBandIndex(opt, self.thz_index, thz_to_omega(self.blend_lo_thz), thz_to_omega(self.blend_hi_thz))

    def crystal(self):
        return CrystalParams(
            self.crystal_length_um * 1e-6,
            self.r41,
            self.beam_area_um2 * 1e-12,
            self.coupling_lambda,
            self.dispersion(),
        )

    def replace(self, **changes):
        data = asdict(self)
        data.update(changes)
        return validate(data)


def _axis(lo, hi, step):
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


_FLOAT = (int, float)


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


_RULES = {
    "experiment": (str, lambda v: v in EXPERIMENTS, f"one of {', '.join(EXPERIMENTS)}"),
    "fock_n": (int, lambda v: 0 <= v <= 20, "integer in 0..20"),
    "squeeze_r": (_FLOAT, _nonneg, "real >= 0"),
    "omega_out_min_thz": (_FLOAT, _positive, "real > 0"),
    "omega_out_max_thz": (_FLOAT, _positive, "real > 0"),
    "omega_out_step_thz": (_FLOAT, _positive, "real > 0"),
    "alpha_min": (_FLOAT, _nonneg, "real >= 0"),
    "alpha_max": (_FLOAT, _nonneg, "real >= 0"),
    "alpha_step": (_FLOAT, _positive, "real > 0"),
    "grid_min_thz": (_FLOAT, _positive, "real > 0"),
    "grid_max_thz": (_FLOAT, _positive, "real > 0"),
    "grid_points": (int, lambda v: v >= 16, "integer >= 16"),
    "band_split_thz": (_FLOAT, _positive, "real > 0"),
    "crystal_length_um": (_FLOAT, _positive, "real > 0"),
    "r41": (_FLOAT, _positive, "real > 0"),
    "beam_area_um2": (_FLOAT, _positive, "real > 0"),
    "coupling_lambda": ((type(None),) + _FLOAT, lambda v: v is None or v > 0, "null or real > 0"),
    "dispersion_model": (str, lambda v: v in DISPERSION_MODELS, f"one of {', '.join(DISPERSION_MODELS)}"),
    "sellmeier_a0": (_FLOAT, _positive, "real > 0"),
    "sellmeier_b0": (_FLOAT, _nonneg, "real >= 0"),
    "sellmeier_c0_um2": (_FLOAT, _nonneg, "real >= 0"),
    "sellmeier_lambda_min_um": (_FLOAT, _positive, "real > 0"),
    "sellmeier_lambda_max_um": (_FLOAT, _positive, "real > 0"),
    "thz_index": (_FLOAT, lambda v: v > 1, "real > 1"),
    "blend_lo_thz": (_FLOAT, _positive, "real > 0"),
    "blend_hi_thz": (_FLOAT, _positive, "real > 0"),
    "constant_index": (_FLOAT, lambda v: v > 1, "real > 1"),
    "pump_center_thz": (_FLOAT, _positive, "real > 0"),
    "pump_fwhm_thz": (_FLOAT, _positive, "real > 0"),
    "pump_truncation": (_FLOAT, _positive, "real > 0"),
    "input_center_thz": (_FLOAT, _positive, "real > 0"),
    "input_fwhm_thz": (_FLOAT, _positive, "real > 0"),
    "second_input_center_thz": (_FLOAT, _positive, "real > 0"),
    "second_input_fwhm_thz": (_FLOAT, _positive, "real > 0"),
    "output_fwhm_thz": (_FLOAT, _positive, "real > 0"),
    "wigner_half_width": (_FLOAT, _positive, "real > 0"),
    "wigner_points": (int, lambda v: v >= 3, "integer >= 3"),
    "output_dir": (str, lambda v: bool(v), "non-empty string"),
    "threads": (int, lambda v: v >= 1, "integer >= 1"),
}


def _type_ok(value, types):
    if isinstance(value, bool):
        return False
    return isinstance(value, types)


def validate(data):
    """Check a mapping against the schema and return a :class:`SweepConfig`.

    Every offending key is reported in a single :class:`ConfigError`.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected a mapping of keys to values"])
    problems = []
    known = {f.name for f in fields(SweepConfig)}
    for key in data:
        if key not in known:
            problems.append(f"{key}: unknown key")
    values = {}
    for key, (types, check, expect) in _RULES.items():
        if key not in data:
            continue
        v = data[key]
        if isinstance(v, str) and types is not str:
            # YAML 1.1 reads exponent literals without a dot, such as 5e6, as strings
            try:
                v = float(v)
            except ValueError:
                pass
        if types is int and isinstance(v, float) and v.is_integer():
            v = int(v)
        if not _type_ok(v, types):
            problems.append(f"{key}: expected {expect}, got {v!r}")
            continue
        if isinstance(v, int) and types is _FLOAT:
            v = float(v)
        if not check(v):
            problems.append(f"{key}: expected {expect}, got {v!r}")
            continue
        values[key] = v
    if not problems:
        cfg = SweepConfig(**values)
        pairs = [
            ("omega_out_min_thz", "omega_out_max_thz"),
            ("alpha_min", "alpha_max"),
            ("grid_min_thz", "grid_max_thz"),
            ("sellmeier_lambda_min_um", "sellmeier_lambda_max_um"),
            ("blend_lo_thz", "blend_hi_thz"),
        ]
        for lo, hi in pairs:
            if getattr(cfg, hi) < getattr(cfg, lo):
                problems.append(f"{hi}: must be >= {lo}")
        if not cfg.grid_min_thz < cfg.band_split_thz < cfg.grid_max_thz:
            problems.append("band_split_thz: must lie strictly inside the frequency grid")
        if not cfg.band_split_thz < cfg.omega_out_min_thz:
            problems.append("omega_out_min_thz: output modes must lie above band_split_thz")
        try:
            cfg.dispersion()
        except ParameterError as exc:
            problems.append(f"dispersion_model: {exc}")
    if problems:
        raise ConfigError(problems)
    return cfg


def parse_config(path):
    """Read and validate a YAML config; an empty file yields all defaults."""
    with open(path) as fh:
        text = fh.read()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([f"<root>: not valid YAML ({exc})"]) from None
    return validate(data)


def serialize_config(cfg):
    """YAML text that :func:`parse_config` maps back to an equal config."""
    return yaml.safe_dump(asdict(cfg), sort_keys=False, default_flow_style=False)


def header_lines(cfg):
    """The resolved config as comment lines for output-file headers."""
    return ["resolved config:"] + ["  " + line for line in serialize_config(cfg).splitlines()]
