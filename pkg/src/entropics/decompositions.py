"""Pure-state decompositions of density matrices and ensemble transport.

Every pure decomposition of a rank-r state rho with m atoms corresponds to a
point of the Stiefel manifold: an m x r matrix V with orthonormal columns.
Writing rho = sum_j lam_j |e_j><e_j| for the descending eigensystem, the
atoms are

    phi_i = sum_j V_ij sqrt(lam_j) |e_j>,   weight pi_i = <phi_i|phi_i>,

and sum_i |phi_i><phi_i| = rho exactly. This file also carries the
generalized-inverse transport that moves an ensemble for rho to an ensemble
for a nearby full-support state, and the spectral truncation ladder used by
the sweep drivers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (EIG_FLOOR_REL, RANK_TOL_REL, DensityMatrix, Ensemble,
                   ValidationError, _as_square_matrix, _complex_normal, _rng,
                   eigh_desc, ensemble, qr_orthonormalize, spectral_truncation)

# Atoms with weight at or below this are dropped from decoded ensembles and
# the remaining weights renormalized.
WEIGHT_FLOOR = 1e-14


class TransportError(ValidationError):
    """Ensemble transport hit a degenerate atom (vanishing transported mass)."""


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    """An m x r complex matrix with orthonormal columns (m >= r)."""

    matrix: np.ndarray

    @property
    def atoms(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.matrix.shape[1]


def stiefel_point(matrix, *, tol: float = 1e-9) -> StiefelPoint:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] < m.shape[1]:
        raise ValidationError(f"Stiefel matrix has bad shape {m.shape}")
    dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1]))))
    if dev > tol:
        raise ValidationError(f"columns are not orthonormal: deviation {dev:.3e}")
    return StiefelPoint(m)


def random_stiefel(atoms: int, rank: int, seed=0) -> StiefelPoint:
    """Uniform-ish random point from the QR factor of a Gaussian matrix."""
    if atoms < rank:
        raise ValidationError(f"need atoms >= rank, got {atoms} < {rank}")
    return StiefelPoint(qr_orthonormalize(_complex_normal(_rng(seed), (atoms, rank))))


def _spectral_factor(rho) -> tuple[np.ndarray, int]:
    """dim x r factor W with W W^dag = rho, columns along descending eigenvectors."""
    m = _as_square_matrix(rho, "state")
    w, v = eigh_desc(m)
    total = float(np.sum(w))
    r = int(np.sum(w > RANK_TOL_REL * max(total, 0.0)))
    if r == 0:
        raise ValidationError("state has numerical rank zero")
    lam = np.clip(w[:r], 0.0, None)
    return v[:, :r] * np.sqrt(lam), r


def decomposition_from_stiefel(rho, point: StiefelPoint) -> Ensemble:
    """Decode a Stiefel point into a pure-state ensemble averaging to rho.

    The point must have exactly rank(rho) columns. Atoms with weight below
    WEIGHT_FLOOR are dropped and the rest renormalized.
    """
    factor, r = _spectral_factor(rho)
    if point.rank != r:
        raise ValidationError(
            f"Stiefel point has {point.rank} columns but the state has "
            f"numerical rank {r}")
    phis = point.matrix @ factor.T          # (m, dim), rows are the atoms
    weights = np.sum(np.abs(phis) ** 2, axis=1)
    keep = weights > WEIGHT_FLOOR
    if not np.any(keep):
        raise ValidationError("all decomposition atoms have vanishing weight")
    total = float(np.sum(weights[keep]))
    members = []
    for i in np.nonzero(keep)[0]:
        v = phis[i]
        p = float(weights[i])
        members.append((p / total, DensityMatrix(np.outer(v, v.conj()) / p)))
    return ensemble(members)


def stiefel_from_ensemble(rho, ens: Ensemble,
                          atoms: int | None = None) -> StiefelPoint:
    """Encode a pure-state ensemble for rho as a Stiefel point.

    Inverse of :func:`decomposition_from_stiefel` up to atom order and
    phases. Members are projected onto their principal eigenvector, so the
    input should be (numerically) pure. Rows beyond the ensemble size are
    zero-padded up to ``atoms``; the result is re-orthonormalized through a
    QR factor to absorb roundoff.
    """
    m = _as_square_matrix(rho, "state")
    w, v = eigh_desc(m)
    total = float(np.sum(w))
    r = int(np.sum(w > RANK_TOL_REL * max(total, 0.0)))
    lam = np.clip(w[:r], 0.0, None)
    rows = max(atoms if atoms is not None else len(ens), len(ens))
    if rows < r:
        raise ValidationError(f"need at least {r} atoms, got {rows}")
    vmat = np.zeros((rows, r), dtype=complex)
    basis = v[:, :r]
    inv_sqrt = 1.0 / np.sqrt(np.where(lam > 0, lam, 1.0))
    for t, (p, member) in enumerate(ens.members):
        mw, mv = eigh_desc(member.mat)
        phi = np.sqrt(p * max(float(mw[0]), 0.0)) * mv[:, 0]
        vmat[t, :] = (basis.conj().T @ phi) * inv_sqrt
    return StiefelPoint(qr_orthonormalize(vmat))


def transport_ensemble(ens: Ensemble, target) -> Ensemble:
    """Move an ensemble for rho to one for a nearby state rho' exactly.

    With P the support projector of the average rho, each member maps through

        A_i = rho^{-1/2} rho_i rho^{-1/2}          (generalized inverse)
        B_i = rho'^{1/2} A_i rho'^{1/2} + rho'^{1/2} (I - P) rho'^{1/2}
        pi'_i = pi_i Tr B_i,   rho'_i = B_i / Tr B_i.

    The correction term spends the mass of rho' outside the support of rho,
    spread across atoms in proportion to their weights, so the new ensemble
    averages to rho' exactly. Raises TransportError when some transported
    atom has vanishing trace.
    """
    rho = ens.average().mat
    tmat = _as_square_matrix(target, "target state")
    if tmat.shape != rho.shape:
        raise ValidationError("target dimension does not match the ensemble")
    w, v = eigh_desc(rho)
    r = int(np.sum(w > RANK_TOL_REL * max(float(np.sum(w)), 0.0)))
    vr = v[:, :r]
    inv_sqrt = (vr / np.sqrt(np.clip(w[:r], 1e-300, None))) @ vr.conj().T
    proj = vr @ vr.conj().T
    tw, tv = eigh_desc(tmat)
    sq = (tv * np.sqrt(np.clip(tw, 0.0, None))) @ tv.conj().T
    correction = sq @ (np.eye(rho.shape[0]) - proj) @ sq
    members = []
    for p, member in ens.members:
        a = inv_sqrt @ member.mat @ inv_sqrt
        b = sq @ a @ sq + correction
        tb = float(np.real(np.trace(b)))
        if tb <= EIG_FLOOR_REL:
            raise TransportError(
                f"transported atom has vanishing trace {tb:.3e}")
        members.append((p * tb, DensityMatrix(b / tb)))
    return ensemble(members)


def truncation_sequence(rho) -> list[tuple[int, DensityMatrix, float]]:
    """All spectral truncations (n, rho_n, lam_n) for n = 1 .. rank(rho)."""
    m = _as_square_matrix(rho, "state")
    w = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
    r = int(np.sum(w > RANK_TOL_REL * max(float(np.sum(w)), 0.0)))
    out = []
    for n in range(1, r + 1):
        rho_n, lam = spectral_truncation(m, n)
        out.append((n, rho_n, lam))
    return out
