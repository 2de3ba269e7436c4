import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from friendsim.monogamy import (
    FOCUS_LINES,
    Measure,
    ckw_check,
    concurrence_purity,
    concurrence_wootters,
    ghz_state,
    monogamy_scan,
    monogamy_table,
    negativity,
    partial_transpose,
    scan_to_csv,
    w_state,
)
from friendsim.qstate import DensityMatrix, DimensionError, Ket, random_pure_state, random_unitary, tensor
from oracles import bell_states, negativity_oracle, partial_transpose_loops, wootters_eig

seeds = st.integers(0, 2**32 - 1)


def dm(vec, dims=(2, 2)):
    return Ket(dims, vec).dm()


def werner(p):
    psi_minus = np.outer(bell_states()["psi-"], bell_states()["psi-"])
    return DensityMatrix((2, 2), p * psi_minus + (1 - p) * np.eye(4) / 4)


def random_mixed(dims, rng, rank):
    n = int(np.prod(dims))
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m))


# --- purity concurrence


@given(seeds, st.integers(1, 64))
def test_purity_concurrence_zero_on_pure(seed, n):
    psi = random_pure_state((n,), np.random.default_rng(seed))
    assert concurrence_purity(psi.dm()) == pytest.approx(0, abs=1e-6)
    assert 2 * (1 - np.sum(np.abs(psi.dm().entries) ** 2)) < 1e-10


def test_purity_concurrence_maximally_mixed_qubit():
    assert concurrence_purity(DensityMatrix((2,), np.eye(2) / 2)) == pytest.approx(1)


# --- Wootters


@pytest.mark.parametrize("name", ["phi+", "phi-", "psi+", "psi-"])
def test_wootters_bell(name):
    assert concurrence_wootters(dm(bell_states()[name])) == pytest.approx(1, abs=1e-10)


def test_wootters_product():
    assert concurrence_wootters(dm(np.kron([0.6, 0.8], [1, 1j]) / math.sqrt(2))) == pytest.approx(0, abs=1e-10)


def test_wootters_werner_frozen():
    # oracle value max(0, (3p - 1)/2) at p = 0.9
    assert wootters_eig(werner(0.9).entries) == pytest.approx(0.85, abs=1e-12)
    assert concurrence_wootters(werner(0.9)) == pytest.approx(0.85, abs=1e-10)


def test_wootters_wrong_dims():
    with pytest.raises(DimensionError):
        concurrence_wootters(DensityMatrix((3,), np.eye(3) / 3))


@given(st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda w: sum(w) > 1e-3))
def test_wootters_bell_diagonal(weights):
    p = np.array(weights) / sum(weights)
    m = sum(pi * np.outer(v, v.conj()) for pi, v in zip(p, bell_states().values()))
    rho = DensityMatrix((2, 2), m)
    expected = max(0.0, 2 * p.max() - 1)
    assert concurrence_wootters(rho) == pytest.approx(expected, abs=1e-10)
    assert wootters_eig(m) == pytest.approx(expected, abs=1e-7)


@given(seeds, st.integers(1, 4))
def test_wootters_matches_eigen_oracle(seed, rank):
    rho = random_mixed((2, 2), np.random.default_rng(seed), rank)
    assert concurrence_wootters(rho) == pytest.approx(wootters_eig(rho.entries), abs=1e-7)


# --- negativity


def test_negativity_bell():
    assert negativity(dm(bell_states()["phi+"]), (0,)) == pytest.approx(0.5, abs=1e-12)
    ev = np.sort(np.linalg.eigvalsh(partial_transpose(dm(bell_states()["phi+"]), (0,))))
    np.testing.assert_allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-12)


def test_negativity_separable():
    assert negativity(dm([1, 0, 0, 0]), (0,)) == pytest.approx(0, abs=1e-12)
    assert negativity(DensityMatrix((2, 2), np.eye(4) / 4), (1,)) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("split", [(), (0, 1), (3,)])
def test_negativity_bad_split(split):
    with pytest.raises(ValueError):
        negativity(dm([1, 0, 0, 0]), split)


@given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 2), (2, 2, 2)]), st.data())
def test_partial_transpose_matches_loops(seed, dims, data):
    rho = random_mixed(dims, np.random.default_rng(seed), 3)
    split = data.draw(st.sets(st.integers(0, len(dims) - 1), min_size=1, max_size=len(dims) - 1))
    np.testing.assert_allclose(
        partial_transpose(rho, split), partial_transpose_loops(rho.entries, dims, split), atol=1e-15
    )
    assert negativity(rho, split) == pytest.approx(negativity_oracle(rho.entries, dims, split), abs=1e-10)


@given(seeds, st.sampled_from([(2, 2), (2, 3), (3, 3)]))
def test_negativity_local_unitary_invariance(seed, dims):
    rng = np.random.default_rng(seed)
    rho = random_mixed(dims, rng, 2)
    u = np.kron(random_unitary(dims[0], rng), random_unitary(dims[1], rng))
    rotated = u @ rho.entries @ u.conj().T
    rotated = DensityMatrix(dims, 0.5 * (rotated + rotated.conj().T))
    assert abs(negativity(rotated, (0,)) - negativity(rho, (0,))) < 1e-10


# --- CKW


def test_ghz_values():
    r = ckw_check(ghz_state(), Measure.WoottersConcurrence)
    assert r.c2_pB == pytest.approx(0, abs=1e-10)
    assert r.c2_pL == pytest.approx(0, abs=1e-10)
    assert r.c2_p_BL == pytest.approx(1, abs=1e-10)
    assert r.satisfied and all(h for _, _, h in r.lines.values())


def test_w_values():
    r = ckw_check(w_state(), "WoottersConcurrence")
    assert r.c2_pB == pytest.approx(4 / 9, abs=1e-10)
    assert r.c2_pL == pytest.approx(4 / 9, abs=1e-10)
    assert r.c2_p_BL == pytest.approx(8 / 9, abs=1e-10)
    assert r.lhs == pytest.approx(r.rhs, abs=1e-10)
    assert r.satisfied


def test_product_state_all_zero():
    psi = Ket((2, 2, 2), np.eye(8)[0])
    r = ckw_check(psi)
    for name in ("c2_pB", "c2_pL", "c2_BL", "c2_p_BL"):
        assert getattr(r, name) == pytest.approx(0, abs=1e-12)
    assert r.satisfied


def test_wootters_needs_qubit_rooms():
    psi = random_pure_state((2, 3, 2), np.random.default_rng(0))
    with pytest.raises(DimensionError):
        ckw_check(psi, Measure.WoottersConcurrence)
    assert ckw_check(psi, Measure.Negativity).measure_id is Measure.Negativity


def test_ckw_rejects_unnormalized():
    with pytest.raises(ValueError, match="norm"):
        ckw_check(Ket((2, 2, 2), np.ones(8)))


@given(seeds)
def test_ckw_holds_for_haar_three_qubit(seed):
    psi = random_pure_state((2, 2, 2), np.random.default_rng(seed))
    r = ckw_check(psi)
    assert r.satisfied
    for name in FOCUS_LINES:
        lhs, rhs, holds = r.lines[name]
        assert holds and lhs <= rhs + 1e-10


def test_purity_measure_on_pairs_equals_one_vs_rest_of_complement():
    psi = random_pure_state((2, 2, 2), np.random.default_rng(7))
    r = ckw_check(psi, Measure.PurityConcurrence)
    # for a pure global state the (B, L) pair is the complement of p
    assert r.c2_BL == pytest.approx(r.c2_p_BL, abs=1e-12)


# --- scan


def test_scan_d2():
    row = monogamy_scan(2)
    assert row["c2_BL"] == pytest.approx(1, abs=1e-12)
    assert row["proxy_pB"] == pytest.approx(0, abs=1e-12)


def test_scan_d16():
    assert monogamy_scan(16)["c2_BL"] == pytest.approx(1.875, abs=1e-12)


@pytest.mark.parametrize("d", range(2, 33))
def test_scan_formula(d):
    row = monogamy_scan(d)
    assert row["c2_BL"] == pytest.approx(2 * (1 - 1 / d), abs=1e-12)
    assert row["proxy_pB"] == pytest.approx(0, abs=1e-12)
    assert row["c2_p_BL"] == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 8])
def test_swapped_construction_trades_off(d):
    row = monogamy_scan(d, "swapped")
    assert row["proxy_pB"] > 0.4
    assert row["c2_BL"] < 2 * (1 - 1 / d)


@pytest.mark.parametrize("d", [1, 33])
def test_scan_range(d):
    with pytest.raises(ValueError):
        monogamy_scan(d)


def test_scan_csv():
    text = scan_to_csv(monogamy_table(8), {"seed": 1})
    lines = text.splitlines()
    assert lines[0] == "# seed=1"
    assert lines[1] == "d,c2_BL,proxy_pB,c2_p_BL"
    assert len(lines) == 9
    assert float(lines[-1].split(",")[1]) == pytest.approx(1.75, abs=1e-12)


def test_detached_state_reductions():
    psi = tensor(Ket((2,), [0, 1]), Ket((3, 3), np.eye(3).ravel() / math.sqrt(3)))
    r = ckw_check(psi, Measure.Negativity)
    assert r.c2_pB == pytest.approx(0, abs=1e-12)
    assert r.c2_BL == pytest.approx(4, abs=1e-12)  # N = (d - 1) / 2 = 1, reported as (2 N)^2
