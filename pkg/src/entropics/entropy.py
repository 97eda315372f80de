"""Entropy functionals for positive operators.

The entropy convention here is the unnormalized one

    H(A) = Tr A log Tr A - Tr A log A,

which is homogeneous of degree one, satisfies H(c A) = c H(A), and reduces
to the von Neumann entropy when Tr A = 1. Relative entropy keeps the
Tr B - Tr A correction

    H(A || B) = Tr(A log A - A log B + B - A),

so both functionals stay consistent on unnormalized arguments. Relative
entropy is ``math.inf`` whenever the support of A leaks outside the support
of B. Eigenvalues below EIG_FLOOR_REL times the trace are treated as exact
zeros inside logarithms, with 0 log 0 = 0.

All logarithms are natural; values are in nats. The command line converts
to bits on request by dividing by log 2.
"""

from __future__ import annotations

import math

import numpy as np

from .core import (EIG_FLOOR_REL, TOL_PSD, Ensemble, KrausChannel,
                   ValidationError, _as_square_matrix, apply_channel_mat,
                   herm_part)

# A vector in the support of A counts as leaking out of the support of B when
# its squared projection onto the null space of B exceeds this.
SUPPORT_LEAK_TOL = 1e-9


def entropy_from_eigenvalues(w: np.ndarray) -> np.ndarray:
    """Unnormalized entropy from eigenvalue rows; works on (..., d) batches."""
    w = np.maximum(np.asarray(w, dtype=float), 0.0)
    t = np.sum(w, axis=-1)
    floor = EIG_FLOOR_REL * t[..., None]
    safe = np.where(w > floor, w, 1.0)
    tsafe = np.where(t > 0, t, 1.0)
    h = tsafe * np.log(tsafe) - np.sum(safe * np.log(safe), axis=-1)
    return np.maximum(np.where(t > 0, h, 0.0), 0.0)


def _psd_eigs(mat, tol_psd: float, name: str) -> np.ndarray:
    m = herm_part(_as_square_matrix(mat, name))
    w = np.linalg.eigvalsh(m)
    total = float(np.sum(w))
    if w.size and float(w[0]) < -tol_psd * max(1.0, abs(total)):
        raise ValidationError(
            f"{name} has negative eigenvalue {float(w[0]):.3e}")
    return w


def entropy(a, *, tol_psd: float = TOL_PSD) -> float:
    """H(A) = Tr A log Tr A - Tr A log A for a positive semidefinite A."""
    return float(entropy_from_eigenvalues(_psd_eigs(a, tol_psd, "operator")))


def output_entropy(channel: KrausChannel, rho) -> float:
    """Entropy of the channel output H(Phi(rho))."""
    m = _as_square_matrix(rho, "state")
    return entropy(apply_channel_mat(channel, m))


def relative_entropy(a, b, *, tol_psd: float = TOL_PSD) -> float:
    """H(A || B) = Tr(A log A - A log B + B - A), or inf on support leak.

    Support containment is decided by projecting the eigenvectors of A that
    carry mass onto the numerical null space of B; any squared overlap above
    SUPPORT_LEAK_TOL makes the value infinite.
    """
    am = herm_part(_as_square_matrix(a, "first operator"))
    bm = herm_part(_as_square_matrix(b, "second operator"))
    if am.shape != bm.shape:
        raise ValidationError(
            f"operator shapes differ: {am.shape} vs {bm.shape}")
    wa, va = np.linalg.eigh(am)
    wb, vb = np.linalg.eigh(bm)
    ta, tb = float(np.sum(wa)), float(np.sum(wb))
    if wa.size and float(wa[0]) < -tol_psd * max(1.0, abs(ta)):
        raise ValidationError(
            f"first operator has negative eigenvalue {float(wa[0]):.3e}")
    if wb.size and float(wb[0]) < -tol_psd * max(1.0, abs(tb)):
        raise ValidationError(
            f"second operator has negative eigenvalue {float(wb[0]):.3e}")

    floor_a = EIG_FLOOR_REL * max(ta, 0.0)
    floor_b = EIG_FLOOR_REL * max(tb, 0.0)
    mass_a = wa > floor_a
    null_b = wb <= floor_b
    if np.any(mass_a):
        if np.all(null_b):
            return math.inf
        if np.any(null_b):
            leak = np.abs(vb[:, null_b].conj().T @ va[:, mass_a]) ** 2
            if float(np.max(np.sum(leak, axis=0))) > SUPPORT_LEAK_TOL:
                return math.inf

    a_log_a = float(np.sum(wa[mass_a] * np.log(wa[mass_a]))) if np.any(mass_a) else 0.0
    keep_b = ~null_b
    a_log_b = 0.0
    if np.any(keep_b):
        vk = vb[:, keep_b]
        diag = np.real(np.einsum("ij,ik,kj->j", vk.conj(), am, vk))
        a_log_b = float(np.sum(np.log(wb[keep_b]) * diag))
    return a_log_a - a_log_b + tb - ta


def donald_residual(ens: Ensemble, sigma) -> float:
    """Absolute defect of the pivot identity for average states.

    For an ensemble with average rho, sum_i p_i H(rho_i || sigma) equals
    sum_i p_i H(rho_i || rho) + H(rho || sigma). Returns |lhs - rhs|, or
    ``math.inf`` when any term is infinite (a support violation is a
    distinguished outcome, not a residual).
    """
    avg = ens.average()
    lhs = 0.0
    rhs = relative_entropy(avg, sigma)
    if math.isinf(rhs):
        return math.inf
    for p, rho in ens.members:
        t1 = relative_entropy(rho, sigma)
        t2 = relative_entropy(rho, avg)
        if math.isinf(t1) or math.isinf(t2):
            return math.inf
        lhs += p * t1
        rhs += p * t2
    return abs(lhs - rhs)


def truncated_entropy_sequence(a, projectors) -> list[float]:
    """Entropies H(P_n A P_n) along an increasing projector sequence.

    The projectors must be Hermitian idempotents, nested (P_{n+1} P_n = P_n)
    and end at the identity; violations raise ValidationError.
    """
    am = _as_square_matrix(a, "operator")
    d = am.shape[0]
    projs = [np.asarray(getattr(p, "mat", p), dtype=complex) for p in projectors]
    if not projs:
        raise ValidationError("projector sequence is empty")
    prev = None
    for n, p in enumerate(projs):
        if p.shape != (d, d):
            raise ValidationError(f"projector {n} has shape {p.shape}")
        if np.max(np.abs(p - p.conj().T)) > 1e-8:
            raise ValidationError(f"projector {n} is not Hermitian")
        if np.max(np.abs(p @ p - p)) > 1e-8:
            raise ValidationError(f"projector {n} is not idempotent")
        if prev is not None and np.max(np.abs(p @ prev - prev)) > 1e-8:
            raise ValidationError(
                f"projector {n} does not dominate projector {n - 1}")
        prev = p
    if np.max(np.abs(projs[-1] - np.eye(d))) > 1e-8:
        raise ValidationError("projector sequence does not end at the identity")
    return [entropy(p @ am @ p) for p in projs]


def ensemble_output_entropy(channel: KrausChannel, ens: Ensemble) -> float:
    """Average output entropy sum_i p_i H(Phi(rho_i)) of an ensemble."""
    return float(sum(p * output_entropy(channel, rho) for p, rho in ens.members))


def ensemble_holevo_value(channel: KrausChannel, ens: Ensemble) -> float:
    """sum_i p_i H(Phi(rho_i) || Phi(rho)) against the ensemble average."""
    out_avg = apply_channel_mat(channel, ens.average().mat)
    total = 0.0
    for p, rho in ens.members:
        term = relative_entropy(apply_channel_mat(channel, rho.mat), out_avg)
        if math.isinf(term):
            return math.inf
        total += p * term
    return total
