import math
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chi2pulse.errors import ContractError, DegeneracyError, UnphysicalStateError, WindowError
from chi2pulse.phasespace import (
    ConditionalGaussianState,
    GaussianState,
    QuadratureMap,
    WignerWindow,
    assemble_quadrature_map,
    complex_to_real,
    fock_output_wigner,
    fock_wigner,
    gaussian_wigner_eval,
    opposite_squeezed_pair,
    propagate_gaussian,
    read_wigner_binary,
    read_wigner_csv,
    rescaled_output_cov,
    smoothing_parameters,
    squeezed_vacuum,
    two_mode_squeezed_vacuum,
    wigner_convolution_oracle,
)
from chi2pulse.symplectic import gbmd, symplectic_eigenvalues

from conftest import random_map


def test_complex_to_real_basic_maps():
    assert np.array_equal(complex_to_real(1.0, 0.0), np.eye(2))
    # b = a^dagger conjugates the phase: p -> -p
    assert np.array_equal(complex_to_real(0.0, 1.0), np.diag([1.0, -1.0]))
    # b = i a rotates x -> -p, p -> x
    assert np.allclose(complex_to_real(1j, 0.0), [[0, -1], [1, 0]])


def test_named_states():
    assert np.allclose(symplectic_eigenvalues(squeezed_vacuum(0.7).cov), [1.0])
    assert np.allclose(symplectic_eigenvalues(two_mode_squeezed_vacuum(0.7).cov), [1.0, 1.0])
    assert np.allclose(symplectic_eigenvalues(opposite_squeezed_pair(0.7).cov), [1.0, 1.0])
    red = two_mode_squeezed_vacuum(0.4).reduced([1])
    assert np.allclose(red.cov, math.cosh(0.8) * np.eye(2))


def test_first_order_map_gives_canonical_quadrature_map(fock_experiment):
    for f, a in ((185.0, 2e6), (215.0, 2e6)):
        fom = fock_experiment.first_order(f, a)
        qmap = assemble_quadrature_map([fom], fock_experiment.inputs)
        assert qmap.A.shape == (2, 2) and qmap.B.shape == (2, 4)
        assert qmap.commutator_defect() < 1e-10
        assert not qmap.flags


def test_vanishing_squeezing_part_is_flagged(fock_experiment):
    fom = fock_experiment.first_order(200.0, 0.0)
    qmap = assemble_quadrature_map(fom, fock_experiment.inputs)
    assert any("xi below" in f for f in qmap.flags)
    assert qmap.h_basis[0] is None
    assert np.array_equal(qmap.B[:, [0, 2]], np.zeros((2, 2)))
    assert qmap.commutator_defect() < 1e-12


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(1, 2), N=st.integers(1, 4), r=st.floats(0.0, 1.0))
def test_gaussian_closure(seed, M, N, r):
    rng = np.random.default_rng(seed)
    qmap = random_map(rng, M, N)
    cov = np.eye(2 * N)
    cov[0, 0], cov[N, N] = math.exp(-2 * r), math.exp(2 * r)
    mean = rng.normal(size=2 * N)
    state = GaussianState(mean, cov)
    if M > N:
        return
    out = propagate_gaussian(state, qmap)
    direct = qmap.A @ cov @ qmap.A.T + qmap.B @ qmap.B.T
    assert np.allclose(out.cov, direct, atol=1e-9 * np.max(np.abs(direct)))
    assert np.allclose(out.mean, qmap.A @ mean, atol=1e-9)
    assert out.is_physical()


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(1, 2), extra=st.integers(1, 2))
def test_conditional_state_matches_gaussian_conditioning(seed, N, extra):
    rng = np.random.default_rng(seed)
    M = N + extra
    qmap = random_map(rng, M, N)
    state = GaussianState(rng.normal(size=2 * N), np.diag(rng.uniform(1.0, 2.0, 2 * N)))
    gb = gbmd(qmap.A)
    out = propagate_gaussian(state, qmap, gb)
    assert isinstance(out, ConditionalGaussianState)
    # full output in the primed frame, conditioned via the precision matrix
    T = np.linalg.inv(gb.S.T)
    full = T @ (qmap.A @ state.cov @ qmap.A.T + qmap.B @ qmap.B.T) @ T.T
    mean = T @ qmap.A @ state.mean
    sys_idx = list(range(N)) + list(range(M, M + N))
    env_idx = [k for k in range(2 * M) if k not in sys_idx]
    Lam = np.linalg.inv(full)
    L_ss = Lam[np.ix_(sys_idx, sys_idx)]
    L_se = Lam[np.ix_(sys_idx, env_idx)]
    cond_cov = np.linalg.inv(L_ss)
    gain = -cond_cov @ L_se
    scale = max(1.0, np.max(np.abs(cond_cov)))
    assert np.allclose(out.cov, cond_cov, atol=1e-8 * scale)
    assert np.allclose(out.gain, gain, atol=1e-8 * max(1.0, np.max(np.abs(gain))))
    ge = rng.normal(size=len(env_idx))
    expect = mean[sys_idx] + gain @ (ge - mean[env_idx])
    assert np.allclose(out.mean_given(ge), expect, atol=1e-8 * scale)


def test_propagate_rejects_unphysical_input():
    qmap = random_map(np.random.default_rng(2), 1, 1)
    with pytest.raises(UnphysicalStateError):
        propagate_gaussian(GaussianState(np.zeros(2), 0.5 * np.eye(2)), qmap)


def test_rescaled_cov_and_singular_core():
    cov_B = np.diag([0.5, 2.0])
    core = np.diag([2.0, 0.5])
    out = rescaled_output_cov(np.eye(2), cov_B, core)
    assert np.allclose(out, np.diag([1.125, 9.0]))
    with pytest.raises(DegeneracyError):
        rescaled_output_cov(np.eye(2), cov_B, np.diag([1.0, 0.0]))


def test_smoothing_parameters_pairing():
    A = np.diag([1.0, 1.0])
    sx, sp, ex, ep = smoothing_parameters(A, np.diag([3.0, 0.2]))
    assert (sx, sp) == pytest.approx((3.0, 0.2))
    assert abs(ex[0]) == pytest.approx(1.0)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_fock_wigner_normalized_with_known_origin(n):
    W = fock_wigner(n, WignerWindow(8.0, nx=201))
    assert W.integral() == pytest.approx(1.0, abs=1e-6)
    assert W.values[100, 100] == pytest.approx((-1) ** n / math.pi, rel=1e-12)


def test_gaussian_wigner_normalization_and_moments():
    st_ = GaussianState(np.array([0.3, -0.2]), np.array([[2.0, 0.4], [0.4, 0.7]]))
    W = gaussian_wigner_eval(st_)
    assert W.integral() == pytest.approx(1.0, abs=1e-6)
    mean, cov = W.moments()
    assert np.allclose(mean, st_.mean, atol=1e-6)
    assert np.allclose(cov, st_.cov, atol=1e-5)
    with pytest.raises(ContractError):
        gaussian_wigner_eval(two_mode_squeezed_vacuum(0.2))


def _resolvable_maps(count, seed=0, min_sigma=0.3):
    # the brute-force oracle needs a smoothing kernel wider than its grid spacing
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        q = random_map(rng, 1, 1, max_squeeze=0.5)
        if min(smoothing_parameters(q.A, q.B @ q.B.T)[:2]) > min_sigma:
            out.append(q)
    return out


@pytest.mark.parametrize("qmap", _resolvable_maps(3))
def test_fock_closed_form_matches_convolution(qmap):
    win = WignerWindow(5.0, nx=25)
    inputs = [fock_wigner(n, WignerWindow(7.5, nx=121)) for n in range(4)]
    oracle = wigner_convolution_oracle(inputs, qmap, window=win)
    for n in range(4):
        closed = fock_output_wigner(n, qmap, win, auto=False)
        assert np.max(np.abs(closed.values - oracle[n].values)) < 1e-6


def test_vacuum_input_gives_gaussian_output():
    qmap = random_map(np.random.default_rng(4), 1, 1)
    cov = qmap.A @ qmap.A.T + qmap.B @ qmap.B.T
    win = WignerWindow(6.0, nx=41)
    a = fock_output_wigner(0, qmap, win, auto=False)
    b = gaussian_wigner_eval(GaussianState(np.zeros(2), cov), win, auto=False)
    assert np.max(np.abs(a.values - b.values)) < 1e-14


def test_fock_output_is_normalized():
    qmap = random_map(np.random.default_rng(5), 1, 2)
    gb = gbmd(qmap.A)
    W = fock_output_wigner(3, qmap, gb=gb)
    assert W.integral() == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ContractError):
        fock_output_wigner(-1, qmap, gb=gb)


def test_oracle_refuses_truncated_input():
    qmap = random_map(np.random.default_rng(6), 1, 1)
    with pytest.raises(WindowError):
        wigner_convolution_oracle(fock_wigner(2, WignerWindow(2.0, nx=31)), qmap)


def test_csv_and_binary_round_trip(tmp_path):
    W = gaussian_wigner_eval(squeezed_vacuum(0.3), WignerWindow(4.0, 3.0, 9, 7), auto=False)
    W.to_csv(tmp_path / "w.csv", header_lines=["note"])
    text = (tmp_path / "w.csv").read_text().splitlines()
    assert text[:2] == ["# note", "x,p,value"]
    back = read_wigner_csv(tmp_path / "w.csv")
    assert np.array_equal(back.values, W.values)
    assert np.array_equal(back.x_axis, W.x_axis)
    W.to_binary(tmp_path / "w.bin")
    raw = (tmp_path / "w.bin").read_bytes()
    assert struct.unpack("<QQ", raw[:16]) == (9, 7)
    assert len(raw) == 16 + 8 * 63
    assert np.array_equal(read_wigner_binary(tmp_path / "w.bin"), W.values)


def test_window_validation():
    with pytest.raises(ContractError):
        WignerWindow(0.0)
    with pytest.raises(ContractError):
        WignerWindow(1.0, nx=2)


def test_quadrature_map_shapes():
    from chi2pulse.errors import ShapeError

    with pytest.raises(ShapeError):
        QuadratureMap.from_matrices(np.eye(2), np.zeros((4, 2)))
