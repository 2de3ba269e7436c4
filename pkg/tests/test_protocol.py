import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from friendsim.protocol import (
    ProtocolParams,
    bell_projection_coeffs,
    bub_purity_check,
    conditional_posterior,
    fig1_sweep,
    is_fully_entangled_pair,
    normalization_closed_form,
    prepare_joint_prior,
    prob_spin_down,
    sample_spin_down,
    synchronized_pair_state,
)
from friendsim.qstate import AnnihilatedStateError, DensityMatrix, Ket, partial_trace
from oracles import bell_states, p_down_oracle, posterior_oracle

R2 = 1 / math.sqrt(2)
CANON = ProtocolParams()

# frozen from the term-by-term oracle at the canonical point
A_CANON = 0.9927992798267443
P_CANON = 0.4154490106371186


def test_frozen_values_match_oracle():
    c_down, c_up = posterior_oracle(math.sqrt(1 / 3), math.sqrt(2 / 3), R2, R2, R2, 0.0)
    assert abs(c_down) ** 2 + abs(c_up) ** 2 == pytest.approx(A_CANON, abs=1e-15)
    assert p_down_oracle(math.sqrt(1 / 3), math.sqrt(2 / 3), R2, R2, R2, 0.0) == pytest.approx(P_CANON, abs=1e-15)
    assert round(A_CANON, 5) == 0.99280 and round(P_CANON, 5) == 0.41545


def angle(lo=0.0, hi=4 * math.pi):
    return st.floats(lo, hi, allow_nan=False)


@st.composite
def real_params(draw):
    a = draw(angle(0, math.pi / 2))
    b = draw(angle(0, math.pi / 2))
    return ProtocolParams(
        alpha=math.cos(a), beta=math.sin(a), alpha_t=math.cos(b), beta_t=math.sin(b),
        rho_overlap=draw(st.floats(-1, 1)), phi=draw(angle()),
    )


@st.composite
def complex_params(draw):
    a, b = draw(angle(0, math.pi / 2)), draw(angle(0, math.pi / 2))
    ph = [draw(angle(0, 2 * math.pi)) for _ in range(4)]
    e = [complex(math.cos(x), math.sin(x)) for x in ph]
    return ProtocolParams(
        alpha=math.cos(a) * e[0], beta=math.sin(a) * e[1],
        alpha_t=math.cos(b) * e[2], beta_t=math.sin(b) * e[3],
        rho_overlap=draw(st.floats(-1, 1)), phi=draw(angle()),
    )


# --- params


@pytest.mark.parametrize(
    "kwargs, match",
    [
        ({"alpha": 1.0}, "alpha\\|\\^2"),
        ({"alpha_t": 0.1}, "alpha_t"),
        ({"rho_overlap": 1.5}, "rho_overlap"),
        ({"phi": math.inf}, "phi"),
    ],
)
def test_param_validation(kwargs, match):
    with pytest.raises(ValueError, match=match):
        ProtocolParams(**kwargs)


# --- joint prior


def test_prior_spin_down_certain():
    psi = prepare_joint_prior(ProtocolParams(alpha=1, beta=0, alpha_t=1, beta_t=0))
    np.testing.assert_allclose(psi.amplitudes, [R2, R2, 0, 0], atol=1e-12)


def test_prior_factorizes_when_branches_agree():
    a, b = 0.6, 0.8
    psi = prepare_joint_prior(ProtocolParams(alpha=a, beta=b, alpha_t=a, beta_t=b))
    np.testing.assert_allclose(psi.amplitudes, np.kron([a, b], [R2, R2]), atol=1e-12)


def test_prior_canonical_amplitudes_by_label():
    psi = prepare_joint_prior(CANON)
    # (particle, Bub) labels: down = 0, up = 1
    assert psi.amplitude(0, 0) == pytest.approx(0.40825, abs=5e-6)  # alpha |down 0>
    assert psi.amplitude(1, 0) == pytest.approx(0.57735, abs=5e-6)  # beta |up 0>
    assert psi.amplitude(0, 1) == pytest.approx(0.5, abs=1e-12)
    assert psi.amplitude(1, 1) == pytest.approx(0.5, abs=1e-12)


@given(complex_params())
def test_prior_unit_norm(p):
    assert prepare_joint_prior(p).norm == pytest.approx(1, abs=1e-12)


# --- posterior


def test_posterior_rho_one():
    post, a = conditional_posterior(CANON.replace(rho_overlap=1.0))
    np.testing.assert_allclose(post.amplitudes, [CANON.alpha, CANON.beta], atol=1e-12)
    assert a == pytest.approx(0.5, abs=1e-12)


def test_posterior_rho_zero():
    post, a = conditional_posterior(CANON.replace(rho_overlap=0.0))
    np.testing.assert_allclose(post.amplitudes, [R2, R2], atol=1e-12)
    assert a == pytest.approx(0.5, abs=1e-12)


def test_canonical_normalization():
    post, a = conditional_posterior(CANON)
    assert a == pytest.approx(A_CANON, abs=1e-12)
    assert normalization_closed_form(CANON) == pytest.approx(A_CANON, abs=1e-12)


def test_annihilation():
    p = ProtocolParams(alpha=R2, beta=R2, alpha_t=R2, beta_t=R2, rho_overlap=R2, phi=math.pi)
    with pytest.raises(AnnihilatedStateError, match="annihilated posterior"):
        conditional_posterior(p)
    with pytest.raises(AnnihilatedStateError):
        prob_spin_down(p)


@given(complex_params())
def test_posterior_matches_oracle(p):
    c_down, c_up = posterior_oracle(p.alpha, p.beta, p.alpha_t, p.beta_t, p.rho_overlap, p.phi)
    a_ref = abs(c_down) ** 2 + abs(c_up) ** 2
    if a_ref <= 1e-10:
        return
    post, a = conditional_posterior(p)
    assert a == pytest.approx(a_ref, abs=1e-12)
    np.testing.assert_allclose(post.amplitudes, np.array([c_down, c_up]) / math.sqrt(a_ref), atol=1e-10)


@given(real_params())
def test_normalization_closed_form_matches_pipeline(p):
    _, a = conditional_posterior(p) if normalization_closed_form(p) > 1e-10 else (None, None)
    if a is not None:
        assert normalization_closed_form(p) == pytest.approx(a, abs=1e-12)


# --- spin-down probability


def test_limits():
    assert prob_spin_down(CANON.replace(rho_overlap=1.0)) == pytest.approx(1 / 3, abs=1e-12)
    assert prob_spin_down(CANON.replace(rho_overlap=0.0)) == pytest.approx(0.5, abs=1e-12)
    assert prob_spin_down(CANON) == pytest.approx(P_CANON, abs=1e-12)


@given(real_params())
def test_closed_form_equals_pipeline(p):
    if normalization_closed_form(p) <= 1e-8:
        return
    closed = prob_spin_down(p, method="closed")
    pipe = prob_spin_down(p, method="pipeline")
    assert closed == pytest.approx(pipe, abs=1e-12)
    assert 0 <= closed <= 1 + 1e-12


@given(complex_params())
def test_pipeline_matches_oracle_for_complex_amplitudes(p):
    ref_a = abs(posterior_oracle(p.alpha, p.beta, p.alpha_t, p.beta_t, p.rho_overlap, p.phi)[0]) ** 2
    if ref_a + abs(posterior_oracle(p.alpha, p.beta, p.alpha_t, p.beta_t, p.rho_overlap, p.phi)[1]) ** 2 <= 1e-8:
        return
    ref = p_down_oracle(p.alpha, p.beta, p.alpha_t, p.beta_t, p.rho_overlap, p.phi)
    assert prob_spin_down(p) == pytest.approx(ref, abs=1e-10)


@pytest.mark.parametrize("rho", [1.0, -1.0])
def test_boundary_is_phase_independent(rho):
    vals = [prob_spin_down(CANON.replace(rho_overlap=rho, phi=phi)) for phi in np.linspace(0, 4 * math.pi, 101)]
    assert max(vals) - min(vals) < 1e-12


def test_unknown_method():
    with pytest.raises(ValueError):
        prob_spin_down(CANON, method="magic")


@pytest.mark.parametrize("rho", np.linspace(-0.9, 0.9, 5))
@pytest.mark.parametrize("phi", np.linspace(0, 2 * math.pi, 5))
def test_monte_carlo_grid(rho, phi):
    p = CANON.replace(rho_overlap=float(rho), phi=float(phi))
    target = prob_spin_down(p)
    n = 100_000
    freq = sample_spin_down(p, n, seed=int(1000 * (rho + 1) + 10 * phi)) / n
    sigma = math.sqrt(target * (1 - target) / n)
    assert abs(freq - target) <= 3 * sigma + 1e-12


# --- sweep


def test_sweep_shape_and_range():
    t = fig1_sweep()
    assert t.phi_grid.size == 401
    assert t.phi_grid[0] == 0 and t.phi_grid[-1] == pytest.approx(4 * math.pi)
    assert not t.flags.any()
    assert t.p_down.max() - t.p_down.min() > 0.1


def test_sweep_periodic():
    t = fig1_sweep()
    half = 200  # grid spacing is 4 pi / 400, so index + 200 is phi + 2 pi
    np.testing.assert_allclose(t.p_down[:half + 1], t.p_down[half:], atol=1e-12)


def test_sweep_flags_annihilated_points():
    p = ProtocolParams(alpha=R2, beta=R2, alpha_t=R2, beta_t=R2, rho_overlap=R2)
    t = fig1_sweep(p, phi_points=5)  # phi = 0, pi, 2 pi, 3 pi, 4 pi
    assert t.flags.tolist() == [False, True, False, True, False]
    csv = t.to_csv().splitlines()
    rows = [r for r in csv if not r.startswith("#")]
    assert rows[0] == "phi,p_down,flag"
    assert rows[2].split(",")[1:] == ["", "1"]


def test_sweep_needs_two_points():
    with pytest.raises(ValueError):
        fig1_sweep(phi_points=1)


# --- purity check


@pytest.mark.parametrize(
    "h, t, expected", [(1, 1, 1.0), (0, 0, 0.0), (R2, R2, 0.5), (1j, -1, 1.0)]
)
def test_purity_examples(h, t, expected):
    assert bub_purity_check(h, t) == pytest.approx(expected, abs=1e-12)


def test_purity_rejects_large_overlap():
    with pytest.raises(ValueError):
        bub_purity_check(1.1, 0)


# --- Bell projection


def bell_dm(name):
    return Ket((2, 2), bell_states()[name]).dm()


def test_bell_psi_plus():
    p01, p10 = bell_projection_coeffs(bell_dm("psi+"))
    assert abs(p01) == pytest.approx(0.5, abs=1e-12)
    assert abs(p10) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize(
    "rho",
    [Ket((2, 2), [1, 0, 0, 0]).dm(), DensityMatrix((2, 2), np.eye(4) / 4)],
    ids=["product", "mixed"],
)
def test_bell_zero_cases(rho):
    assert bell_projection_coeffs(rho) == (0, 0)


def test_bell_rotated_basis():
    # |Psi+> written in the Hadamard basis is |Phi+>-like; use a basis where it has the swap pattern
    u0 = np.array([1, 1]) / math.sqrt(2)
    u1 = np.array([1, -1]) / math.sqrt(2)
    v = np.kron(u0, u1) - np.kron(u1, u0)
    rho = Ket((2, 2), v).dm()
    p01, p10 = bell_projection_coeffs(rho, (u0, u1))
    assert p01 == pytest.approx(-0.5, abs=1e-12) and p10 == pytest.approx(-0.5, abs=1e-12)


def test_bell_non_orthonormal_basis():
    with pytest.raises(ValueError, match="orthonormal"):
        bell_projection_coeffs(bell_dm("psi+"), ([1, 0], [1, 1]))


@given(st.integers(2, 6), st.data(), angle(0, 2 * math.pi))
def test_synchronized_pairs_fully_entangled(d, data, phase):
    i = data.draw(st.integers(0, d - 1))
    k = data.draw(st.integers(0, d - 1).filter(lambda x: x != i))
    rho = synchronized_pair_state(d, i, k, phase)
    basis_pair = (np.eye(d)[i], np.eye(d)[k])
    assert is_fully_entangled_pair(rho, basis_pair)
    # each room alone is an even mixture of the two records
    red = partial_trace(rho, [0]).entries
    assert red[i, i] == pytest.approx(0.5) and red[k, k] == pytest.approx(0.5)
