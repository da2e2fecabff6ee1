"""Quick built-in property checks, run by ``chi2pulse selftest``.

Each check is small enough that the whole suite finishes in a few seconds.
"""

import math
import time

import numpy as np
from scipy.special import eval_genlaguerre

from .config import SweepConfig
from .experiments import Experiment
from .laguerre import scaled_genlaguerre_all
from .phasespace import (
    GaussianState,
    QuadratureMap,
    WignerWindow,
    fock_output_wigner,
    fock_wigner,
    smoothing_parameters,
    two_mode_squeezed_vacuum,
    wigner_convolution_oracle,
)
from .symplectic import gbmd, is_symplectic, random_symplectic, von_neumann_entropy


def _random_map(rng, M, N):
    """``(A, B)`` cut from a random symplectic matrix on ``M + N + extra`` modes."""
    tot = max(M, N) + M
    S = random_symplectic(tot, rng, max_squeeze=0.8)
    rows = list(range(M)) + list(range(tot, tot + M))
    A = S[np.ix_(rows, list(range(N)) + list(range(tot, tot + N)))]
    rest = [k for k in range(tot) if k >= N]
    B = S[np.ix_(rows, rest + [tot + k for k in rest])]
    return A, B


def check_gbmd(rng, trials=100):
    worst = 0.0
    for _ in range(trials):
        M, N = int(rng.integers(1, 3)), int(rng.integers(1, 7))
        A, _ = _random_map(rng, M, N)
        gb = gbmd(A)
        worst = max(worst, float(np.max(np.abs(gb.reconstruct() - A))))
        if not is_symplectic(gb.S):
            return False, "S not symplectic"
    return worst < 1e-10, f"max reconstruction error {worst:.2e}"


def check_entropy(rng):
    r = 1.0
    s_vac = von_neumann_entropy(np.eye(2))
    s_tms = von_neumann_entropy(two_mode_squeezed_vacuum(r).cov)
    red = two_mode_squeezed_vacuum(r).reduced([0]).cov
    c2, s2 = math.cosh(r) ** 2, math.sinh(r) ** 2
    exact = c2 * math.log(c2) - s2 * math.log(s2)
    err = abs(von_neumann_entropy(red) - exact)
    ok = s_vac < 1e-12 and s_tms < 1e-9 and err < 1e-10
    return ok, f"vacuum {s_vac:.1e}, two-mode {s_tms:.1e}, reduced error {err:.1e}"


def check_laguerre(rng):
    rho, q = rng.uniform(0.05, 0.95, 20), rng.uniform(0, 5, 20)
    P = scaled_genlaguerre_all(6, -0.5, rho, q)
    ref = np.array([rho**m * eval_genlaguerre(m, -0.5, -q / rho) for m in range(7)])
    err = float(np.max(np.abs(P - ref) / np.maximum(1.0, np.abs(ref))))
    return err < 1e-12, f"max relative error {err:.1e}"


def check_fock(rng):
    # the brute-force oracle only resolves smoothing kernels wider than its grid step
    while True:
        A, B = _random_map(rng, 1, 1)
        qmap = QuadratureMap.from_matrices(A, B)
        if min(smoothing_parameters(A, B @ B.T)[:2]) > 0.3:
            break
    win = WignerWindow(5.0, nx=21)
    worst = 0.0
    inputs = [fock_wigner(n, WignerWindow(7.0, nx=101)) for n in range(3)]
    oracle = wigner_convolution_oracle(inputs, qmap, window=win)
    for n in range(3):
        closed = fock_output_wigner(n, qmap, win, auto=False)
        worst = max(worst, float(np.max(np.abs(closed.values - oracle[n].values))))
    return worst < 1e-6, f"closed form vs oracle {worst:.1e}"


def check_first_order(rng):
    cfg = SweepConfig(grid_points=512)
    ex = Experiment(cfg)
    worst_u = worst_c = 0.0
    for f in (182.0, 195.0, 212.0):
        for a in (5e5, 2e6, 4e6):
            fom = ex.first_order(f, a)
            worst_u = max(worst_u, abs(fom.zeta**2 - fom.xi**2 - 1.0))
            worst_c = max(worst_c, ex.evaluate(f, a).qmap.commutator_defect())
    ok = worst_u < 1e-6 and worst_c < 1e-8
    return ok, f"|zeta^2 - xi^2 - 1| {worst_u:.1e}, commutator defect {worst_c:.1e}"


def check_physical_output(rng):
    worst = math.inf
    for _ in range(50):
        A, B = _random_map(rng, 1, int(rng.integers(1, 4)))
        cov = A @ A.T + B @ B.T
        nu = GaussianState(np.zeros(2), cov).symplectic_eigenvalues()
        worst = min(worst, float(nu.min()))
    return worst >= 1 - 1e-6, f"smallest output symplectic eigenvalue {worst:.6f}"


CHECKS = [
    ("gbmd reconstruction", check_gbmd),
    ("entropy", check_entropy),
    ("scaled laguerre", check_laguerre),
    ("fock closed form", check_fock),
    ("first-order map", check_first_order),
    ("output physicality", check_physical_output),
]


def run_selftest(seed=0, out=print):
    """Run every check, print one line each and return True if all passed."""
    rng = np.random.default_rng(seed)
    all_ok = True
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not a crashed CLI
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        all_ok &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name}: {detail} ({time.perf_counter() - t0:.2f} s)")
    return all_ok

