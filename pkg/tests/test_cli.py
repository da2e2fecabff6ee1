import math
import os
import struct

import numpy as np
import pytest
import yaml

from chi2pulse.cli import main
from chi2pulse.config import SweepConfig, serialize_config
from chi2pulse.sweep import parse_point, read_table, run_sweep
from chi2pulse.errors import ParameterError

SMALL = dict(
    grid_points=256,
    omega_out_min_thz=180.0,
    omega_out_max_thz=230.0,
    omega_out_step_thz=25.0,
    alpha_min=0.0,
    alpha_max=2e6,
    alpha_step=1e6,
    wigner_points=33,
)


@pytest.fixture
def config_file(tmp_path):
    def make(**extra):
        p = tmp_path / "cfg.yaml"
        p.write_text(yaml.safe_dump({**SMALL, **extra}))
        return str(p)

    return make


def test_sweep_table(tmp_path, config_file, capsys):
    out = tmp_path / "a"
    assert main(["sweep", "--config", config_file(), "--out", str(out)]) == 0
    path = out / "sweep.csv"
    text = path.read_text()
    assert text.startswith("# resolved config:")
    tab = read_table(path)
    assert len(tab["omega_out_thz"]) == 9
    # rows run over alpha fastest
    assert tab["alpha"][:3] == ["0.0", "1000000.0", "2000000.0"]
    zero = [i for i, a in enumerate(tab["alpha"]) if float(a) == 0.0]
    for i in zero:
        # without pump the output mode is untouched vacuum and sees none of the input
        assert tab["regime"][i] == "none"
        assert float(tab["covB_xx"][i]) == pytest.approx(1.0, abs=1e-12)
        assert float(tab["covB_pp"][i]) == pytest.approx(1.0, abs=1e-12)
        assert float(tab["entropy_out"][i]) == 0.0
        assert "singular_core" in tab["flags"][i]
    for d in tab["commutator_defect"]:
        assert float(d) < 1e-8


def test_sweep_is_reproducible_and_thread_invariant(tmp_path, config_file):
    cfg = config_file()
    main(["sweep", "--config", cfg, "--out", str(tmp_path / "a")])
    a = (tmp_path / "a" / "sweep.csv").read_bytes()
    main(["sweep", "--config", cfg, "--out", str(tmp_path / "a")])
    assert a == (tmp_path / "a" / "sweep.csv").read_bytes()
    main(["sweep", "--config", cfg, "--out", str(tmp_path / "c"), "--threads", "3"])
    # the header records the thread count and directory; the data must match exactly
    strip = lambda b: [ln for ln in b.decode().splitlines() if not ln.startswith("#")]
    assert strip(a) == strip((tmp_path / "c" / "sweep.csv").read_bytes())


def test_two_mode_table_has_effective_rows(tmp_path):
    cfg = SweepConfig(**SMALL, experiment="two_mode_squeezed", output_dir=str(tmp_path))
    path, results = run_sweep(cfg)
    tab = read_table(path)
    assert "S_x3" in tab and "S_p0" in tab
    i = tab["alpha"].index("1000000.0")
    assert math.isfinite(float(tab["entropy_in_s"][i]))


def test_config_error_exit_code(tmp_path, config_file, capsys):
    assert main(["validate-config", "--config", config_file(alpha_step=0, fock_n=-1)]) == 2
    err = capsys.readouterr().err
    assert "alpha_step" in err and "fock_n" in err


def test_validate_prints_resolved_config(config_file, capsys):
    assert main(["validate-config", "--config", config_file()]) == 0
    printed = yaml.safe_load(capsys.readouterr().out)
    assert printed["grid_points"] == 256
    assert printed["thz_index"] == SweepConfig().thz_index


def test_missing_config_file(tmp_path):
    assert main(["sweep", "--config", str(tmp_path / "nope.yaml")]) == 2


def test_all_points_degenerate_exit_code(tmp_path, config_file):
    cfg = config_file(alpha_max=0.0, omega_out_min_thz=200.0, omega_out_max_thz=200.0)
    assert main(["sweep", "--config", cfg, "--out", str(tmp_path)]) == 3


def test_wigner_outputs(tmp_path, config_file):
    out = tmp_path / "w"
    assert main(["wigner", "--config", config_file(), "--out", str(out), "--point", "205,1e6", "--binary"]) == 0
    names = sorted(os.listdir(out))
    assert names == ["wigner_input.bin", "wigner_input.csv", "wigner_meta.yaml", "wigner_output.bin", "wigner_output.csv"]
    raw = (out / "wigner_output.bin").read_bytes()
    nx, np_ = struct.unpack("<QQ", raw[:16])
    assert (nx, np_) == (33, 33)
    meta = yaml.safe_load((out / "wigner_meta.yaml").read_text())
    assert meta["point"]["alpha"] == 1e6
    lines = [ln for ln in (out / "wigner_output.csv").read_text().splitlines() if not ln.startswith("#")]
    assert lines[0] == "x,p,value" and len(lines) == 1 + 33 * 33


def test_wigner_theta_point_and_range_check(tmp_path, config_file):
    assert main(["wigner", "--config", config_file(), "--out", str(tmp_path), "--point", "200,theta=0.5"]) == 0
    assert main(["wigner", "--config", config_file(), "--out", str(tmp_path), "--point", "250,1e6"]) == 2
    assert main(["wigner", "--config", config_file(), "--out", str(tmp_path)]) == 2


def test_parse_point():
    assert parse_point("200, 3e6") == (200.0, 3e6, None)
    assert parse_point("200,theta=3.14") == (200.0, None, 3.14)
    with pytest.raises(ParameterError):
        parse_point("200")
    with pytest.raises(ParameterError):
        parse_point("a,b")


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6 and all(ln.startswith("PASS") for ln in lines)
