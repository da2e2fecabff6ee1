"""Batch runners behind the command line: result tables and Wigner fields.

Every file written here starts with ``#`` comment lines holding the fully
resolved config, so a table can be regenerated from its own header.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import yaml

from .config import header_lines, serialize_config
from .errors import ContractError, DegeneracyError, ParameterError
from .experiments import FOCK, TWO_MODE, Experiment
from .phasespace import (
    GaussianState,
    WignerWindow,
    fock_output_wigner,
    fock_wigner,
    gaussian_wigner_eval,
    window_for_cov,
)

TABLE_NAME = "sweep.csv"


def _fmt(v):
    if v is None:
        return "nan"
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def table_columns(cfg):
    cols = [
        "omega_out_thz", "alpha", "theta_K", "theta_J", "theta", "regime", "zeta", "xi",
        "A11", "A12", "A21", "A22", "covB_xx", "covB_pp", "sigma_x", "sigma_p",
    ]
    if cfg.experiment == TWO_MODE:
        # effective x and p rows of S_R (the only rows the output mode sees)
        cols += [f"S_x{j}" for j in range(4)] + [f"S_p{j}" for j in range(4)]
    cols += ["entropy_in_s", "entropy_out", "entropy_rescaled", "commutator_defect", "flags"]
    return cols


def _row(cfg, res):
    nan = math.nan
    fom, qmap, gb = res.fom, res.qmap, res.gb
    row = {"omega_out_thz": res.omega_out_thz, "alpha": res.alpha}
    if fom is not None:
        row.update(theta_K=fom.theta_K, theta_J=fom.theta_J, theta=fom.theta, regime=fom.regime.value, zeta=fom.zeta, xi=fom.xi)
    core = gb.core if gb is not None else (qmap.A if qmap is not None and qmap.A.shape == (2, 2) else None)
    for i in range(2):
        for j in range(2):
            row[f"A{i + 1}{j + 1}"] = core[i, j] if core is not None else nan
    if qmap is not None:
        covB = qmap.cov_B
        row["covB_xx"], row["covB_pp"] = covB[0, 0], covB[1, 1]
        row["commutator_defect"] = qmap.commutator_defect()
    row["sigma_x"], row["sigma_p"] = res.sigma_x, res.sigma_p
    if cfg.experiment == TWO_MODE:
        N = qmap.n_in if qmap is not None else 2
        for j in range(2 * N):
            row[f"S_x{j}"] = gb.S[0, j] if gb is not None else nan
            row[f"S_p{j}"] = gb.S[N, j] if gb is not None else nan
    row["entropy_in_s"], row["entropy_out"], row["entropy_rescaled"] = res.entropy_in_s, res.entropy_out, res.entropy_rescaled
    row["flags"] = ";".join(res.flags)
    return row


def sweep_points(cfg, experiment=None, threads=None):
    """Evaluate every ``(omega_out, alpha)`` point, returned in row-major order."""
    threads = threads or cfg.threads
    ex = experiment or Experiment(cfg, threads=threads)
    omegas = cfg.omega_out_values()
    alphas = cfg.alpha_values()

    def column(f):
        ex.unit_overlaps(f)
        return [ex.evaluate(f, a) for a in alphas]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cols = list(pool.map(column, omegas))
    else:
        cols = [column(f) for f in omegas]
    return [r for col in cols for r in col]


def run_sweep(cfg, out_dir=None, threads=None):
    """Write ``sweep.csv`` under ``out_dir`` and return ``(path, results)``."""
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    results = sweep_points(cfg, threads=threads)
    cols = table_columns(cfg)
    path = os.path.join(out_dir, TABLE_NAME)
    with open(path, "w") as fh:
        for line in header_lines(cfg):
            fh.write(f"# {line}\n")
        fh.write(",".join(cols) + "\n")
        for res in results:
            row = _row(cfg, res)
            fh.write(",".join(_fmt(row.get(c, math.nan)) for c in cols) + "\n")
    return path, results


def read_table(path):
    """Parse a sweep table into a dict of column name to list of strings."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh if not ln.startswith("#")]
    names = lines[0].split(",")
    data = {n: [] for n in names}
    for ln in lines[1:]:
        for n, v in zip(names, ln.split(",")):
            data[n].append(v)
    return data


def parse_point(text):
    """``"omega_thz,alpha"``; the second field may be ``theta=<value>`` instead of an amplitude."""
    parts = [s.strip() for s in str(text).split(",")]
    if len(parts) != 2:
        raise ParameterError("point must be given as omega_thz,alpha")
    try:
        omega = float(parts[0])
        if parts[1].startswith("theta="):
            return omega, None, float(parts[1][6:])
        return omega, float(parts[1]), None
    except ValueError:
        raise ParameterError(f"cannot parse point {text!r}") from None


def _check_in_range(cfg, omega, alpha):
    tol = 1e-9
    if not cfg.omega_out_min_thz - tol <= omega <= cfg.omega_out_max_thz + tol:
        raise ParameterError(f"omega_out {omega} THz lies outside the configured range")
    if not cfg.alpha_min * (1 - tol) <= alpha <= cfg.alpha_max * (1 + tol):
        raise ParameterError(f"alpha {alpha:g} lies outside the configured range")


def wigner_fields(cfg, omega, alpha=None, theta=None, experiment=None):
    """Evaluate the input, output and (two-mode) rescaled Wigner fields at one point.

    Returns ``(fields, result)`` where ``fields`` maps a name to a grid and
    ``result.flags`` records anything skipped.
    """
    ex = experiment or Experiment(cfg)
    if alpha is None:
        alpha = ex.alpha_for_theta(omega, theta)
    _check_in_range(cfg, omega, alpha)
    res = ex.evaluate(omega, alpha)
    base = WignerWindow(cfg.wigner_half_width, nx=cfg.wigner_points)
    fields = {}

    def gauss(cov):
        return gaussian_wigner_eval(GaussianState(np.zeros(2), cov), window_for_cov(cov, base))

    if cfg.experiment == FOCK:
        fields["input"] = fock_wigner(cfg.fock_n, base)
        if res.gb is not None:
            A = res.gb.core
            spread = res.qmap.cov_B + (2 * cfg.fock_n + 1) * A @ A.T
            fields["output"] = fock_output_wigner(cfg.fock_n, res.qmap, window_for_cov(spread, base), gb=res.gb)
        elif res.qmap is not None:
            # no signal reaches the output: it is Gaussian with the noise covariance
            A = res.qmap.A
            cov = res.qmap.cov_B + (2 * cfg.fock_n + 1) * A @ A.T
            fields["output"] = gauss(cov)
            res.flags.append("output_without_signal")
    else:
        if res.cov_in_s is not None:
            fields["input"] = gauss(res.cov_in_s)
        if res.cov_out is not None:
            fields["output"] = gauss(res.cov_out)
        if res.cov_rescaled is None:
            res.flags.append("rescaled_skipped")
        else:
            try:
                fields["rescaled"] = gauss(res.cov_rescaled)
            except (ContractError, DegeneracyError):
                res.flags.append("rescaled_skipped")
    return fields, res, alpha


def run_wigner(cfg, point, out_dir=None, binary=False):
    """Write ``wigner_<name>.csv`` (and ``.bin`` when asked) for one sweep point.

    Returns the list of written paths and the evaluated point.
    """
    omega, alpha, theta = parse_point(point) if isinstance(point, str) else point
    fields, res, alpha = wigner_fields(cfg, omega, alpha, theta)
    out_dir = out_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    head = header_lines(cfg) + [f"point: omega_out_thz={omega!r} alpha={alpha!r}", f"flags: {';'.join(res.flags)}"]
    paths = []
    for name, grid in fields.items():
        path = os.path.join(out_dir, f"wigner_{name}.csv")
        grid.to_csv(path, head + [f"field: {name}"])
        paths.append(path)
        if binary:
            bpath = os.path.join(out_dir, f"wigner_{name}.bin")
            grid.to_binary(bpath)
            paths.append(bpath)
    if binary:
        # the binary layout has no room for metadata, so it gets a sidecar
        meta = {
            "point": {"omega_out_thz": float(omega), "alpha": float(alpha)},
            "flags": list(res.flags),
            "axes": {
                name: {
                    "x": [float(g.x_axis[0]), float(g.x_axis[-1]), int(g.x_axis.size)],
                    "p": [float(g.p_axis[0]), float(g.p_axis[-1]), int(g.p_axis.size)],
                }
                for name, g in fields.items()
            },
            "config": yaml.safe_load(serialize_config(cfg)),
        }
        mpath = os.path.join(out_dir, "wigner_meta.yaml")
        with open(mpath, "w") as fh:
            yaml.safe_dump(meta, fh, sort_keys=False)
        paths.append(mpath)
    return paths, res
