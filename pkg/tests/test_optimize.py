"""Optimizer tests built around closed-form oracles.

The identity and depolarizing channels have known chi and convex-closure
values, which pins the decomposition search; the pure-state problems are
checked against eigenvalue arguments; the brute-force sampler gives an
independent lower bound that shares no code with the gradient path.
"""

import math

import numpy as np
import pytest

from entropics.core import (
    ValidationError,
    density_matrix,
    depolarizing_channel,
    identity_channel,
    partial_trace_channel,
    random_channel,
    random_pure,
    random_state,
    trace_norm,
)
from entropics.entropy import entropy, output_entropy
from entropics.eof import random_product_mixture
from entropics.optimize import (
    OptimizerOptions,
    brute_force_chi,
    constrained_capacity,
    convex_closure_output_entropy,
    holevo_chi,
    min_output_entropy,
    output_purity,
)

OPTS = OptimizerOptions(restarts=6, max_iters=300)
LOG2 = math.log(2.0)


def _binary(p: float) -> float:
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


# ---------------------------------------------------------------------------
# identity channel: closure vanishes, chi recovers the input entropy


def test_identity_closure_vanishes(qutrit_state):
    rep = convex_closure_output_entropy(identity_channel(3), qutrit_state, OPTS)
    assert rep.value <= 1e-8


def test_identity_chi_is_input_entropy(rand3_state):
    rep = holevo_chi(identity_channel(3), rand3_state, OPTS)
    assert abs(rep.value - entropy(rand3_state)) <= 1e-6


def test_identity_chi_qubit(qubit_mixed):
    rep = holevo_chi(identity_channel(2), qubit_mixed, OPTS)
    assert abs(rep.value - LOG2) <= 1e-8


# ---------------------------------------------------------------------------
# fully depolarizing channel: constant output, chi collapses


def test_fully_depolarizing_chi_zero(dep2, qubit_mixed):
    rep = holevo_chi(dep2, qubit_mixed, OPTS)
    assert abs(rep.value) <= 1e-8


def test_fully_depolarizing_closure_log_d():
    ch = depolarizing_channel(3, 1.0)
    rho = random_state(3, seed=4)
    rep = convex_closure_output_entropy(ch, rho, OPTS)
    assert abs(rep.value - math.log(3.0)) <= 1e-8


def test_partial_depolarizing_frozen():
    # Every pure qubit input comes out with spectrum (1 - p/2, p/2), so the
    # closure is the binary entropy of p/2 regardless of the average state.
    ch = depolarizing_channel(2, 0.5)
    rho = random_state(2, seed=9)
    rep = convex_closure_output_entropy(ch, rho, OPTS)
    assert abs(rep.value - _binary(0.25)) <= 1e-8
    chi = holevo_chi(ch, np.eye(2) / 2.0, OPTS)
    assert abs(chi.value - (LOG2 - _binary(0.25))) <= 1e-8


# ---------------------------------------------------------------------------
# independent oracle


def test_chi_beats_brute_force(rand3_state):
    ch = random_channel(2, 2, seed=5)
    rho = random_state(2, seed=6)
    opt = holevo_chi(ch, rho, OPTS)
    brute = brute_force_chi(ch, rho, samples=1500, polish_rounds=300, seed=3)
    assert opt.value >= brute - 1e-6
    assert abs(opt.value - brute) <= 5e-3


def test_brute_force_rejects_large_dims():
    with pytest.raises(ValidationError):
        brute_force_chi(random_channel(4, 4, seed=0), random_state(4, seed=0))


# ---------------------------------------------------------------------------
# pure-state problems


def test_min_output_entropy_identity():
    rep = min_output_entropy(identity_channel(3), OPTS)
    assert rep.value <= 1e-9
    assert rep.diagnostics["quantity"] == "min_output_entropy"


def test_min_output_entropy_depolarizing_frozen():
    rep = min_output_entropy(depolarizing_channel(2, 0.3), OPTS)
    assert abs(rep.value - _binary(0.15)) <= 1e-9


def test_output_purity_identity_picks_bottom_eigenvector():
    # Identity output entropy is zero on pure inputs, so only the observable
    # term matters and the bottom eigenvector wins.
    obs = np.diag([0.3, 2.0])
    rep = output_purity(identity_channel(2), obs, OPTS)
    assert abs(rep.value - 0.3) <= 1e-9
    psi = rep.diagnostics["vector"]
    assert abs(abs(psi[0]) ** 2 - 1.0) <= 1e-8


def test_output_purity_shift_invariance():
    ch = random_channel(2, 2, seed=7)
    rng = np.random.default_rng(8)
    base = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a = (base + base.conj().T) / 2.0
    lo = output_purity(ch, a, OPTS)
    hi = output_purity(ch, a + 0.7 * np.eye(2), OPTS)
    assert abs(hi.value - lo.value - 0.7) <= 1e-7


def test_output_purity_dimension_mismatch():
    with pytest.raises(ValidationError):
        output_purity(identity_channel(2), np.eye(3), OPTS)


# ---------------------------------------------------------------------------
# constrained capacity


def test_constrained_capacity_slack_bound():
    # Budget never binds, so the answer is plain max-chi = log 2.
    rep = constrained_capacity(identity_channel(2), np.eye(2), 2.0, OPTS)
    assert abs(rep.value - LOG2) <= 1e-5


def test_constrained_capacity_binding_frozen():
    # Identity channel with Tr rho |1><1| <= 1/4: the best average is
    # diag(3/4, 1/4), worth the binary entropy of 1/4.
    obs = np.diag([0.0, 1.0])
    rep = constrained_capacity(identity_channel(2), obs, 0.25, OPTS)
    assert rep.value <= _binary(0.25) + 1e-6
    assert rep.value >= _binary(0.25) - 5e-3
    assert rep.diagnostics["constraint_violation"] <= 1e-8


def test_constrained_capacity_infeasible():
    with pytest.raises(ValidationError):
        constrained_capacity(identity_channel(2), np.eye(2), 0.5, OPTS)


def test_constrained_capacity_depolarized():
    rep = constrained_capacity(depolarizing_channel(2, 1.0), np.eye(2), 2.0, OPTS)
    assert abs(rep.value) <= 1e-8


# ---------------------------------------------------------------------------
# certificates and report plumbing


def test_certificate_averages_back(rand3, rand3_state):
    rep = convex_closure_output_entropy(rand3, rand3_state, OPTS)
    avg = rep.certificate.average()
    assert trace_norm(avg.mat - rand3_state.mat) <= 1e-10
    assert abs(sum(p for p, _ in rep.certificate.members) - 1.0) <= 1e-12
    assert abs(rep.diagnostics["certificate_value"] - rep.value) <= 1e-9


def test_chi_diagnostics_consistent(rand3, rand3_state):
    rep = holevo_chi(rand3, rand3_state, OPTS)
    assert abs(rep.diagnostics["relative_entropy_form"] - rep.value) <= 1e-8
    recon = rep.diagnostics["output_entropy"] - rep.diagnostics["avg_output_entropy"]
    assert abs(recon - rep.value) <= 1e-12


def test_pure_input_fast_path():
    ch = random_channel(2, 3, seed=10)
    psi = random_pure(2, seed=11)
    rep = convex_closure_output_entropy(ch, psi, OPTS)
    assert rep.diagnostics["fast_path"] == "pure input"
    assert rep.value == output_entropy(ch, psi)
    assert len(rep.certificate.members) == 1


def test_max_atoms_below_rank_rejected(rand3_state):
    bad = OptimizerOptions(restarts=2, max_atoms=2)
    with pytest.raises(ValidationError):
        convex_closure_output_entropy(identity_channel(3), rand3_state, bad)


def test_dimension_mismatch_rejected(qubit_mixed):
    with pytest.raises(ValidationError):
        holevo_chi(identity_channel(3), qubit_mixed, OPTS)


def test_warm_start_shape_guard(qubit_mixed):
    with pytest.raises(ValidationError):
        convex_closure_output_entropy(
            identity_channel(2), qubit_mixed, OPTS,
            extra_starts=[np.eye(3)])


# ---------------------------------------------------------------------------
# separable input through a partial trace: the closure must reach zero


def test_separable_closure_reaches_zero():
    omega = random_product_mixture(2, 3, terms=4, seed=21)
    ch = partial_trace_channel(2, 3, "A")
    rep = convex_closure_output_entropy(ch, omega.state, OPTS)
    assert rep.value <= 1e-6


# ---------------------------------------------------------------------------
# determinism


def test_repeat_runs_are_bitwise_identical(rand3, rand3_state):
    a = holevo_chi(rand3, rand3_state, OPTS)
    b = holevo_chi(rand3, rand3_state, OPTS)
    assert a.value == b.value
    for (pa, ra), (pb, rb) in zip(a.certificate.members, b.certificate.members):
        assert pa == pb
        assert np.array_equal(ra.mat, rb.mat)
