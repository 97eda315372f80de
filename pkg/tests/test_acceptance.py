"""End-to-end acceptance checks with frozen seeds and stated tolerances.

Each test covers one advertised numerical contract and finishes by printing
a single summary line with the measured worst case, so a verbose run reads
as a checklist. Budgeted tests also assert their wall-clock limit.

These are deliberately heavier than the unit tests (hundreds of solver
calls); the whole file runs in roughly a quarter hour on one core, most of
it in the two full property-suite passes of the determinism check.
"""

import csv
import math
import statistics
import subprocess
import sys
import time

import numpy as np
import pytest

from entropics.core import (
    DensityMatrix,
    depolarizing_channel,
    ensemble,
    identity_channel,
    random_channel,
    random_hermitian,
    random_state,
    trace_norm,
)
from entropics.additivity import purity_additivity_gap
from entropics.decompositions import (
    stiefel_from_ensemble,
    transport_ensemble,
    truncation_sequence,
)
from entropics.duality import duality_check
from entropics.entropy import entropy
from entropics.eof import bipartite_state, eof, schmidt_pure_state, wootters_eof
from entropics.optimize import OptimizerOptions, holevo_chi
from entropics.propsuite import run_suite

LOG2 = math.log(2.0)
OPTS = OptimizerOptions(restarts=6, max_iters=200, value_tol=1e-8)


def _done(name: str, detail: str) -> None:
    print(f"PASS {name}: {detail}")


def test_identity_channel_chi_matches_entropy():
    # 100 random states at dims 2..4: chi under the identity channel is the
    # input entropy (within 1e-6) and the closure vanishes (within 1e-8).
    start = time.perf_counter()
    worst_chi = worst_hhat = 0.0
    for i in range(100):
        d = 2 + i % 3
        rho = random_state(d, seed=[31, i])
        rep = holevo_chi(identity_channel(d), rho, OPTS)
        worst_chi = max(worst_chi, abs(rep.value - entropy(rho)))
        worst_hhat = max(worst_hhat, rep.diagnostics["avg_output_entropy"])
    elapsed = time.perf_counter() - start
    assert worst_chi <= 1e-6
    assert worst_hhat <= 1e-8
    assert elapsed <= 120.0
    _done("identity channel",
          f"max |chi - H| {worst_chi:.2e}, max hhat {worst_hhat:.2e}, "
          f"{elapsed:.1f}s")


def test_fully_depolarizing_degeneracy():
    # Constant channels: chi collapses to zero and the closure equals the
    # entropy of the maximally mixed output for every tested state.
    worst_chi = worst_hhat = 0.0
    for i in range(20):
        d = 2 + i % 2
        rho = random_state(d, rank=1 + i % d, seed=[32, i])
        rep = holevo_chi(depolarizing_channel(d, 1.0), rho, OPTS)
        worst_chi = max(worst_chi, abs(rep.value))
        worst_hhat = max(worst_hhat,
                         abs(rep.diagnostics["avg_output_entropy"] - math.log(d)))
    assert worst_chi <= 1e-8
    assert worst_hhat <= 1e-8
    _done("fully depolarizing",
          f"max |chi| {worst_chi:.2e}, max |hhat - log d| {worst_hhat:.2e}")


def test_eof_matches_concurrence_oracle():
    # 50 random 2-qubit states against the closed-form concurrence value,
    # 64 restarts, within 5e-3, under 5 minutes.
    start = time.perf_counter()
    opts = OptimizerOptions(restarts=64, max_iters=200, value_tol=1e-8)
    worst = 0.0
    for i in range(50):
        rho = random_state(4, rank=[2, 3, 4][i % 3], seed=[33, i])
        value = eof(bipartite_state(rho, 2, 2), opts).value
        worst = max(worst, abs(value - wootters_eof(rho)))
    elapsed = time.perf_counter() - start
    assert worst <= 5e-3
    assert elapsed <= 300.0
    _done("eof vs concurrence oracle",
          f"max |eof - oracle| {worst:.2e} over 50 states, {elapsed:.1f}s")


@pytest.mark.extended
def test_eof_matches_concurrence_oracle_extended():
    # Tighter variant: 10 states, 512 restarts, within 1e-4, under 30 min.
    start = time.perf_counter()
    opts = OptimizerOptions(restarts=512, max_iters=300, value_tol=1e-10)
    worst = 0.0
    for i in range(10):
        rho = random_state(4, rank=[2, 3, 4][i % 3], seed=[33, i])
        value = eof(bipartite_state(rho, 2, 2), opts).value
        worst = max(worst, abs(value - wootters_eof(rho)))
    elapsed = time.perf_counter() - start
    assert worst <= 1e-4
    assert elapsed <= 1800.0
    _done("eof vs concurrence oracle (extended)",
          f"max |eof - oracle| {worst:.2e} over 10 states, {elapsed:.1f}s")


def test_pure_state_eof_frozen():
    opts = OptimizerOptions(restarts=8, max_iters=200)
    bell = schmidt_pure_state([0.5, 0.5], 2, 2)
    v_bell = eof(bell, opts).value
    assert abs(v_bell - LOG2) <= 1e-8
    skew = schmidt_pure_state([0.8, 0.2], 2, 2)
    v_skew = eof(skew, opts).value
    assert abs(v_skew - 0.5004024235381879) <= 1e-6
    _done("pure-state eof",
          f"Bell {v_bell:.9f} (log 2 {LOG2:.9f}), "
          f"Schmidt(0.8,0.2) {v_skew:.9f}")


def test_duality_gap_band():
    # 20 random qubit channel/state pairs: gap within [-1e-8, 5e-2] and
    # median at most 1e-2.
    gaps = []
    for i in range(20):
        chan = random_channel(2, 2, seed=[35, i])
        rho = random_state(2, seed=[35, i, 1])
        rep = duality_check(chan, rho, OPTS)
        gaps.append(rep.gap)
    low, high = min(gaps), max(gaps)
    med = statistics.median(gaps)
    assert low >= -1e-8
    assert high <= 5e-2
    assert med <= 1e-2
    _done("duality gap band",
          f"gaps in [{low:+.2e}, {high:+.2e}], median {med:.2e}")


def test_truncation_weighted_bound():
    # 10 random dim-8 instances: every truncation level obeys
    # lam_n chi_n <= chi_full + 1e-4, and the top level (n = rank, where the
    # truncation is the state itself up to reconstruction roundoff) must
    # reproduce chi_full within 1e-8. The top-level and full solves exchange
    # certificates as warm starts: chi is a maximum, so seeding can only
    # tighten both values, and a genuine gap would survive the exchange.
    opts = OptimizerOptions(restarts=4, max_iters=300, value_tol=1e-10)
    worst_bound = -math.inf
    worst_eq = 0.0
    for i in range(10):
        chan = random_channel(8, 8, env_dim=8, seed=[36, i])
        rank = [3, 4, 5][i % 3]
        rho = random_state(8, rank=rank, seed=[36, i, 1])
        first = holevo_chi(chan, rho, opts)
        rows = []
        for n, rho_n, lam in truncation_sequence(rho):
            extra = ()
            if n == rank:
                extra = (stiefel_from_ensemble(rho_n, first.certificate),)
            rep = holevo_chi(chan, rho_n, opts, extra_starts=extra)
            rows.append((lam, rep.value, rep.certificate))
        top_value, top_cert = rows[-1][1], rows[-1][2]
        chi_full = holevo_chi(
            chan, rho, opts,
            extra_starts=(stiefel_from_ensemble(rho, top_cert),)).value
        worst_bound = max(worst_bound,
                          max(lam * c - chi_full for lam, c, _ in rows))
        worst_eq = max(worst_eq, abs(top_value - chi_full))
    assert worst_bound <= 1e-4
    assert worst_eq <= 1e-8
    _done("truncation weighted bound",
          f"worst lam*chi_n - chi_full {worst_bound:+.2e}, "
          f"worst full-rank gap {worst_eq:.2e}")


def test_transport_reconstruction():
    # 100 random ensemble/target pairs: the transported ensemble averages to
    # the target within 1e-10, and the worst member distance shrinks
    # monotonically as the target approaches the original average.
    worst_avg = 0.0
    mono_ok = True
    for i in range(100):
        d = 2 + i % 3
        rng = np.random.default_rng([37, i])
        weights = rng.dirichlet(np.ones(3))
        members = [(float(w), random_state(d, seed=rng)) for w in weights]
        ens = ensemble(members)
        target = random_state(d, seed=rng)
        moved = transport_ensemble(ens, target)
        worst_avg = max(worst_avg,
                        trace_norm(moved.average().mat - target.mat))
        rho = ens.average()
        sig = random_state(d, seed=rng)
        dists = []
        for t in (0.1, 0.01, 0.001):
            mix = DensityMatrix((1.0 - t) * rho.mat + t * sig.mat)
            lifted = transport_ensemble(ens, mix)
            dists.append(max(
                trace_norm(a.mat - b.mat)
                for (_, a), (_, b) in zip(lifted.members, ens.members)))
        mono_ok = mono_ok and dists[0] >= dists[1] >= dists[2]
    assert worst_avg <= 1e-10
    assert mono_ok
    _done("transport reconstruction",
          f"max average drift {worst_avg:.2e}, memberwise shrink monotone "
          f"at t = 0.1 / 0.01 / 0.001 on all 100 instances")


def test_purity_kronecker_subadditivity():
    # 50 random channel/observable pairs: the product-channel purity at the
    # Kronecker-sum observable never beats the sum of marginals by more
    # than 1e-4.
    worst = -math.inf
    for i in range(50):
        rng = np.random.default_rng([38, i])
        da = int(rng.choice([2, 3]))
        db = int(rng.choice([2, 3]))
        phi = random_channel(da, da, seed=rng)
        psi = random_channel(db, db, seed=rng)
        obs_a = random_hermitian(da, seed=rng)
        obs_b = random_hermitian(db, seed=rng)
        worst = max(worst, purity_additivity_gap(phi, psi, obs_a, obs_b,
                                                 OPTS).gap)
    assert worst <= 1e-4
    _done("purity subadditivity", f"worst Kronecker-sum gap {worst:+.2e}")


def test_property_suite_zero_failures():
    # The six structural cases at 200 trials each, dims <= 3: no breach may
    # exceed twice its case tolerance.
    names = ["chi_concavity", "closure_convexity", "chi_chain",
             "donald_identity", "relent_monotone", "chi_dim_bound"]
    report = run_suite(seed=7, case_names=names)
    assert len(report.results) == len(names)
    for r in report.results:
        assert r.trials == 200
        assert r.failures == 0, f"{r.name}: worst breach {r.worst_breach:.3e}"
    worst = {r.name: r.worst_breach for r in report.results}
    _done("property suite",
          "zero hard failures over 200 trials each; worst breaches " +
          ", ".join(f"{k} {v:+.1e}" for k, v in worst.items()))


def test_selftest_byte_identical(tmp_path):
    # Two CLI selftest runs at the same seed must write byte-identical CSVs.
    outputs = []
    for run in range(2):
        out = tmp_path / f"selftest-{run}.csv"
        proc = subprocess.run(
            [sys.executable, "-m", "entropics", "selftest", "--seed", "7",
             "--out", str(out), "--no-fig"],
            capture_output=True, text=True, timeout=900)
        assert proc.returncode == 0, proc.stderr
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    rows = list(csv.reader(outputs[0].decode().splitlines()))
    assert rows[0][0] == "case"
    assert all(r[7] == "ok" for r in rows[1:])
    _done("selftest determinism",
          f"two seed-7 runs byte-identical ({len(outputs[0])} bytes, "
          f"{len(rows) - 1} cases all ok)")
