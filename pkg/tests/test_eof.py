"""Entanglement of formation against the two-qubit closed form.

The concurrence formula is implemented first and tested on states whose
concurrence is known by hand (Bell, product, Werner); only then is the
optimizer compared against it. Pure-state values come from the marginal
entropy, which needs no optimization at all.
"""

import math

import numpy as np
import pytest

from entropics.core import (
    DensityMatrix,
    ValidationError,
    density_matrix,
    maximally_entangled_state,
    partial_trace,
    random_state,
)
from entropics.entropy import entropy
from entropics.eof import (
    bipartite_state,
    concurrence,
    eof,
    random_entangled_pure,
    random_product_mixture,
    schmidt_pure_state,
    separability_scan,
    wootters_eof,
)
from entropics.optimize import OptimizerOptions

OPTS = OptimizerOptions(restarts=8, max_iters=300)
LOG2 = math.log(2.0)


def _werner(w: float) -> DensityMatrix:
    bell = maximally_entangled_state(2).mat
    return density_matrix(w * bell + (1.0 - w) * np.eye(4) / 4.0)


# ---------------------------------------------------------------------------
# closed-form layer


def test_concurrence_bell(bell):
    assert abs(concurrence(bell) - 1.0) <= 1e-12


def test_concurrence_product_zero():
    rho = np.kron(np.diag([0.6, 0.4]), np.diag([0.8, 0.2]))
    assert concurrence(bipartite_state(rho, 2, 2)) <= 1e-12


def test_concurrence_werner_frozen():
    # Werner mixture w*Bell + (1-w)*I/4 has concurrence max(0, (3w-1)/2).
    assert abs(concurrence(_werner(0.9)) - 0.85) <= 1e-12
    assert concurrence(_werner(0.3)) == 0.0


def test_concurrence_needs_two_qubits():
    with pytest.raises(ValidationError):
        concurrence(random_state(9, seed=0))


def test_wootters_bell_is_log2(bell):
    assert abs(wootters_eof(bell) - LOG2) <= 1e-12


def test_wootters_separable_zero():
    assert wootters_eof(_werner(1.0 / 3.0)) == 0.0


# ---------------------------------------------------------------------------
# optimizer vs closed form


def test_eof_bell(bell):
    rep = eof(bipartite_state(bell, 2, 2), OPTS)
    assert abs(rep.value - LOG2) <= 1e-8


def test_eof_schmidt_frozen():
    # Squared Schmidt weights (0.8, 0.2): the marginal entropy is
    # -0.8 log 0.8 - 0.2 log 0.2 = 0.500402423538... nats.
    st = schmidt_pure_state([0.8, 0.2], 2, 2)
    rep = eof(st, OPTS)
    assert abs(rep.value - 0.5004024235381879) <= 1e-6


def test_eof_pure_matches_marginal_entropy():
    st = random_entangled_pure(2, 3, seed=17)
    rep = eof(st, OPTS)
    marginal = entropy(partial_trace(st.state, 2, 3, "A"))
    assert abs(rep.value - marginal) <= 1e-8


def test_eof_werner_matches_wootters():
    rho = _werner(0.8)
    rep = eof(bipartite_state(rho, 2, 2), OPTS)
    assert abs(rep.value - wootters_eof(rho)) <= 5e-3


def test_eof_separable_mixture_vanishes():
    st = random_product_mixture(2, 2, terms=3, seed=23)
    rep = eof(st, OPTS)
    assert rep.value <= 1e-6


def test_eof_keep_side_symmetric():
    st = random_entangled_pure(2, 2, seed=29)
    a = eof(st, OPTS, keep="A")
    b = eof(st, OPTS, keep="B")
    assert abs(a.value - b.value) <= 1e-8


# ---------------------------------------------------------------------------
# scan and constructors


def test_separability_scan_small():
    report = separability_scan(samples=4, seed=19, opts=OPTS)
    assert len(report.entries) == 4
    assert report.failures == ()
    kinds = [e.kind for e in report.entries]
    assert kinds == ["separable", "entangled", "separable", "entangled"]


def test_bipartite_state_dimension_guard():
    with pytest.raises(ValidationError):
        bipartite_state(np.eye(4) / 4.0, 2, 3)


def test_schmidt_weights_validated():
    with pytest.raises(ValidationError):
        schmidt_pure_state([0.9, 0.3], 2, 2)
    with pytest.raises(ValidationError):
        schmidt_pure_state([0.5, 0.3, 0.2], 2, 2)


def test_random_entangled_pure_min_weight():
    st = random_entangled_pure(3, 3, seed=31, min_weight=0.15)
    w = np.linalg.eigvalsh(partial_trace(st.state, 3, 3, "A").mat)
    assert float(np.min(w)) >= 0.15 - 1e-9
