import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chi2pulse.errors import ContractError, DegeneracyError, ShapeError, UnphysicalStateError
from chi2pulse.symplectic import (
    bloch_messiah,
    gbmd,
    is_symplectic,
    passive,
    random_symplectic,
    selector,
    squeezer,
    symplectic_eigenvalues,
    symplectic_form,
    von_neumann_entropy,
)

from conftest import random_map


def test_form_and_building_blocks():
    W = symplectic_form(2)
    assert np.array_equal(W @ W, -np.eye(4))
    assert is_symplectic(squeezer([0.3, -1.2]))
    U = np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)
    assert is_symplectic(passive(U))
    assert not is_symplectic(2 * np.eye(2))
    with pytest.raises(ShapeError):
        symplectic_form(0)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 5))
def test_random_symplectic_and_bloch_messiah(seed, n):
    M = random_symplectic(n, seed)
    assert is_symplectic(M)
    O, Z, Op = bloch_messiah(M)
    assert is_symplectic(O, 1e-8) and is_symplectic(Op, 1e-8)
    assert np.allclose(O.T @ O, np.eye(2 * n), atol=1e-8)
    z = np.diag(Z)[:n]
    assert np.all(z >= 1 - 1e-9) and np.all(np.diff(z) <= 1e-9)
    assert np.max(np.abs(O @ Z @ Op - M)) < 1e-8 * max(1.0, np.max(np.abs(M)))


def test_bloch_messiah_rejects_non_symplectic():
    with pytest.raises(ContractError):
        bloch_messiah(np.diag([2.0, 1.0]))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), M=st.integers(1, 3), N=st.integers(1, 5))
def test_gbmd_reconstructs(seed, M, N):
    qmap = random_map(np.random.default_rng(seed), M, N)
    gb = gbmd(qmap.A)
    assert np.max(np.abs(gb.reconstruct() - qmap.A)) < 1e-9 * max(1.0, np.max(np.abs(qmap.A)))
    assert is_symplectic(gb.S, 1e-8)
    if M < N:
        assert gb.side == "right"
        assert gb.core.shape == (2 * M, 2 * M)
        # equalized effective rows
        for j in range(M):
            assert np.linalg.norm(gb.S[j]) == pytest.approx(np.linalg.norm(gb.S[N + j]), rel=1e-9)
    elif M > N:
        assert gb.side == "left"
        assert gb.core.shape == (2 * N, 2 * N)
    else:
        assert gb.side == "square"


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 5))
def test_single_mode_elimination_agrees_with_general(seed, N):
    A = random_map(np.random.default_rng(seed), 1, N).A
    a = gbmd(A, method="elimination")
    b = gbmd(A, method="general")
    for g in (a, b):
        assert np.max(np.abs(g.reconstruct() - A)) < 1e-9 * max(1.0, np.max(np.abs(A)))
    # the core is fixed up to a symplectic 2x2 factor, so its determinant agrees
    assert np.linalg.det(a.core) == pytest.approx(np.linalg.det(b.core), rel=1e-8)


def test_elimination_needs_single_output():
    A = random_map(np.random.default_rng(1), 2, 3).A
    with pytest.raises(ShapeError):
        gbmd(A, method="elimination")


def test_degenerate_map_reports_direction():
    # output mode 1 is clean, but both quadratures of output mode 2 read x of input mode 2
    A = np.zeros((4, 6))
    A[0, 0], A[2, 3] = 1.0, 1.0
    A[1, 1], A[3, 1] = 1.0, 2.0
    with pytest.raises(DegeneracyError) as err:
        gbmd(A)
    d = err.value.direction
    assert np.linalg.norm(d) == pytest.approx(1.0)
    assert np.max(np.abs(A @ symplectic_form(3) @ A.T @ d)) < 1e-12


def test_selector_picks_quadratures():
    P = selector(1, 3)
    v = np.arange(6.0)
    assert np.array_equal(P @ v, [0.0, 3.0])


def test_entropy_reference_values():
    assert von_neumann_entropy(np.eye(2)) == 0.0
    # thermal state with nu = 3: 2 ln 2
    assert von_neumann_entropy(3 * np.eye(2)) == pytest.approx(2 * math.log(2), rel=1e-13)
    # one half of a two-mode squeezed vacuum, r = 0.5 (mpmath)
    r = 0.5
    assert von_neumann_entropy(math.cosh(2 * r) * np.eye(2)) == pytest.approx(0.659452959168036702, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
def test_symplectic_eigenvalues_are_invariant(seed, n):
    rng = np.random.default_rng(seed)
    nu = np.sort(rng.uniform(1.0, 4.0, n))
    cov = np.diag(np.concatenate([nu, nu]))
    S = random_symplectic(n, rng, max_squeeze=0.7)
    out = symplectic_eigenvalues(S @ cov @ S.T)
    assert np.allclose(out, nu, rtol=1e-8)


def test_entropy_rejects_unphysical_and_clips():
    with pytest.raises(UnphysicalStateError):
        von_neumann_entropy(0.5 * np.eye(2))
    # within the clip tolerance the eigenvalue is treated as 1
    assert von_neumann_entropy((1 - 1e-8) * np.eye(2)) == 0.0
    with pytest.raises(ContractError):
        symplectic_eigenvalues(np.array([[1.0, 0.5], [0.0, 1.0]]))
