"""State, channel and ensemble primitives with dense complex linear algebra.

States are density matrices, channels are finite Kraus families between
explicit input and output dimensions, ensembles are weighted finite lists of
states. Everything is an explicit ``complex128`` matrix; no sparsity, no
symbolic structure. All randomness flows through :func:`numpy.random.default_rng`
seeded explicitly, so every sampled object is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

# Tolerance conventions, shared across the package:
#   TOL_PSD       absolute floor for eigenvalues of matrices that must be PSD
#                 (checked after symmetrizing (M + M^dag)/2)
#   TOL_TP        budget for || sum_k K_k^dag K_k - I || of a channel
#   TOL_TRACE     budget for |Tr rho - 1| of a state
#   EIG_FLOOR_REL eigenvalues below EIG_FLOOR_REL * trace are treated as zero
#                 inside logarithms
#   RANK_TOL_REL  eigenvalues above RANK_TOL_REL * trace count toward the
#                 numerical rank
TOL_PSD = 1e-10
TOL_TP = 1e-9
TOL_TRACE = 1e-9
EIG_FLOOR_REL = 1e-14
RANK_TOL_REL = 1e-12


class ValidationError(ValueError):
    """An input violates a structural invariant (shape, hermiticity, PSD, TP)."""


def _as_square_matrix(mat, name: str = "matrix") -> np.ndarray:
    m = np.asarray(getattr(mat, "mat", mat), dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {m.shape}")
    return m


def herm_part(mat: np.ndarray) -> np.ndarray:
    """Hermitian part (M + M^dag)/2; spectral routines symmetrize through this."""
    return (mat + mat.conj().T) / 2.0


def is_hermitian(mat: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(mat - mat.conj().T)) <= tol) if mat.size else True


def _lex_key(col: np.ndarray) -> tuple:
    return tuple(x for entry in col for x in (entry.real, entry.imag))


def eigh_desc(mat) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix with eigenvalues descending.

    Exact eigenvalue ties are broken lexicographically on the eigenvector
    entries, so repeated runs order degenerate subspaces identically.
    """
    m = herm_part(_as_square_matrix(mat))
    w, v = np.linalg.eigh(m)
    order = sorted(range(w.size), key=lambda j: (-w[j], _lex_key(v[:, j])))
    idx = np.array(order, dtype=int)
    return w[idx], v[:, idx]


def trace_norm(mat) -> float:
    """Sum of singular values."""
    m = np.asarray(getattr(mat, "mat", mat), dtype=complex)
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def numerical_rank(mat, *, rel_tol: float = RANK_TOL_REL) -> int:
    """Number of eigenvalues above ``rel_tol`` times the trace."""
    m = herm_part(_as_square_matrix(mat))
    w = np.linalg.eigvalsh(m)
    t = float(np.sum(w))
    if t <= 0:
        return 0
    return int(np.sum(w > rel_tol * t))


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A (presumed valid) density matrix. Use :func:`density_matrix` to validate."""

    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """A Hermitian observable; no positivity or trace constraint."""

    mat: np.ndarray

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A completely positive trace preserving map given by Kraus operators.

    Each operator is ``dim_out x dim_in``; sum_k K_k^dag K_k = I within TOL_TP.
    """

    dim_in: int
    dim_out: int
    kraus: tuple[np.ndarray, ...]

    def stacked(self) -> np.ndarray:
        """The Kraus family as one (k, dim_out, dim_in) array."""
        return np.stack(self.kraus)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """A finite weighted list of states with positive weights summing to one."""

    members: tuple[tuple[float, DensityMatrix], ...]

    @property
    def dim(self) -> int:
        return self.members[0][1].dim

    def __len__(self) -> int:
        return len(self.members)

    def average(self) -> DensityMatrix:
        acc = np.zeros((self.dim, self.dim), dtype=complex)
        for p, rho in self.members:
            acc += p * rho.mat
        return DensityMatrix(acc)


# ---------------------------------------------------------------------------
# validating constructors


def density_matrix(mat, *, tol_psd: float = TOL_PSD,
                   tol_trace: float = TOL_TRACE) -> DensityMatrix:
    """Validate hermiticity, positivity and unit trace, then wrap.

    Positivity is checked on the Hermitian part; eigenvalues may dip to
    ``-tol_psd`` to absorb roundoff. The stored matrix is the input as given
    (not symmetrized), so file round trips are byte exact.
    """
    m = _as_square_matrix(mat, "state")
    if not is_hermitian(m, 1e-8):
        raise ValidationError("state is not Hermitian within 1e-8")
    w = np.linalg.eigvalsh(herm_part(m))
    if w.size and float(w[0]) < -tol_psd:
        raise ValidationError(f"state has negative eigenvalue {w[0]:.3e}")
    tr = float(np.real(np.trace(m)))
    if abs(tr - 1.0) > tol_trace:
        raise ValidationError(f"state trace {tr!r} is not 1 within {tol_trace}")
    return DensityMatrix(m)


def hermitian_matrix(mat, *, tol: float = 1e-8) -> HermitianMatrix:
    m = _as_square_matrix(mat, "observable")
    if not is_hermitian(m, tol):
        raise ValidationError("observable is not Hermitian within tolerance")
    return HermitianMatrix(m)


def pure_state(vec) -> DensityMatrix:
    """Density matrix of a state vector (normalized first)."""
    v = np.asarray(vec, dtype=complex).reshape(-1)
    n = float(np.linalg.norm(v))
    if n <= 0:
        raise ValidationError("zero vector cannot be normalized to a state")
    v = v / n
    return DensityMatrix(np.outer(v, v.conj()))


def ensemble(members: Sequence[tuple[float, DensityMatrix]], *,
             tol: float = 1e-9) -> Ensemble:
    """Validate weights (positive, sum to one) and matching dimensions."""
    if not members:
        raise ValidationError("ensemble must have at least one member")
    fixed = []
    dim = None
    total = 0.0
    for p, rho in members:
        p = float(p)
        if p <= 0:
            raise ValidationError(f"ensemble weight {p!r} is not positive")
        if not isinstance(rho, DensityMatrix):
            rho = density_matrix(rho)
        if dim is None:
            dim = rho.dim
        elif rho.dim != dim:
            raise ValidationError("ensemble members have mixed dimensions")
        total += p
        fixed.append((p, rho))
    if abs(total - 1.0) > tol:
        raise ValidationError(f"ensemble weights sum to {total!r}, not 1")
    return Ensemble(tuple(fixed))


def validate_channel(kraus: Sequence[np.ndarray], dim_in: int, dim_out: int,
                     *, tol_tp: float = TOL_TP) -> KrausChannel:
    """Check shapes and trace preservation and wrap into a KrausChannel."""
    if not kraus:
        raise ValidationError("channel needs at least one Kraus operator")
    ops = []
    for t, k in enumerate(kraus):
        k = np.asarray(k, dtype=complex)
        if k.shape != (dim_out, dim_in):
            raise ValidationError(
                f"Kraus operator {t} has shape {k.shape}, "
                f"expected ({dim_out}, {dim_in})")
        ops.append(k)
    gram = sum(k.conj().T @ k for k in ops)
    dev = float(np.max(np.abs(gram - np.eye(dim_in))))
    if dev > tol_tp:
        raise ValidationError(
            f"channel is not trace preserving: ||sum K^dag K - I|| = {dev:.3e}")
    return KrausChannel(dim_in, dim_out, tuple(ops))


# ---------------------------------------------------------------------------
# channel algebra


def apply_channel_mat(channel: KrausChannel, mat: np.ndarray) -> np.ndarray:
    out = np.zeros((channel.dim_out, channel.dim_out), dtype=complex)
    for k in channel.kraus:
        km = k @ mat
        out += km @ k.conj().T
    return out


def apply_channel(channel: KrausChannel, rho) -> DensityMatrix:
    """Apply the channel to a state; output is a valid state by construction."""
    m = _as_square_matrix(rho, "state")
    if m.shape[0] != channel.dim_in:
        raise ValidationError(
            f"state dimension {m.shape[0]} does not match channel input "
            f"{channel.dim_in}")
    return DensityMatrix(apply_channel_mat(channel, m))


def tensor_channel(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Tensor product channel; Kraus family is all pairwise Kronecker products."""
    ops = tuple(np.kron(ka, kb) for ka in a.kraus for kb in b.kraus)
    return KrausChannel(a.dim_in * b.dim_in, a.dim_out * b.dim_out, ops)


def compose_channel(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Composition outer(inner(.)); Kraus family is all products L_j K_i."""
    if inner.dim_out != outer.dim_in:
        raise ValidationError(
            f"cannot compose: inner output {inner.dim_out} != outer input "
            f"{outer.dim_in}")
    ops = tuple(lj @ ki for lj in outer.kraus for ki in inner.kraus)
    return KrausChannel(inner.dim_in, outer.dim_out, ops)


def partial_trace_mat(mat: np.ndarray, dim_a: int, dim_b: int,
                      keep: str = "A") -> np.ndarray:
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "A":
        return np.einsum("abcb->ac", t)
    if keep == "B":
        return np.einsum("abad->bd", t)
    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


def partial_trace(omega, dim_a: int, dim_b: int, keep: str = "A") -> DensityMatrix:
    """Trace out one tensor factor of a bipartite state."""
    m = _as_square_matrix(omega, "state")
    if m.shape[0] != dim_a * dim_b:
        raise ValidationError(
            f"state dimension {m.shape[0]} is not dim_a*dim_b = {dim_a * dim_b}")
    return DensityMatrix(partial_trace_mat(m, dim_a, dim_b, keep))


def spectral_truncation(rho, n: int) -> tuple[DensityMatrix, float]:
    """Project a state onto its top-n spectral subspace and renormalize.

    Returns ``(rho_n, lam_n)`` where ``lam_n`` is the truncated mass
    Tr(P_n rho) and ``rho_n = P_n rho P_n / lam_n``. Eigenvalues are ordered
    descending with the deterministic tie break of :func:`eigh_desc`, so the
    projector choice is reproducible.
    """
    m = _as_square_matrix(rho, "state")
    d = m.shape[0]
    if not 1 <= n <= d:
        raise ValidationError(f"truncation level {n} outside 1..{d}")
    w, v = eigh_desc(m)
    top = np.clip(w[:n], 0.0, None)
    lam = float(np.sum(top))
    if lam <= 0:
        raise ValidationError("truncated mass is zero")
    vn = v[:, :n]
    mat = (vn * top) @ vn.conj().T / lam
    return DensityMatrix(mat), lam


def restrict_channel(channel: KrausChannel, isometry: np.ndarray) -> KrausChannel:
    """Restrict a channel to a subspace via an isometric embedding.

    ``isometry`` is ``dim_in x k`` with orthonormal columns; the restricted
    channel maps k-dimensional states through the embedding and then the
    original channel.
    """
    w = np.asarray(isometry, dtype=complex)
    if w.ndim != 2 or w.shape[0] != channel.dim_in:
        raise ValidationError(
            f"isometry shape {w.shape} does not embed into dimension "
            f"{channel.dim_in}")
    k = w.shape[1]
    dev = float(np.max(np.abs(w.conj().T @ w - np.eye(k))))
    if dev > 1e-9:
        raise ValidationError(f"embedding is not isometric: deviation {dev:.3e}")
    return KrausChannel(k, channel.dim_out, tuple(op @ w for op in channel.kraus))


# ---------------------------------------------------------------------------
# standard channels and states


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel(dim, dim, (np.eye(dim, dtype=complex),))


def depolarizing_channel(dim: int = 2, p: float = 1.0) -> KrausChannel:
    """Mix the input with the maximally mixed state: (1-p) rho + p I/d."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing weight {p} outside [0, 1]")
    ops = []
    if p < 1.0:
        ops.append(np.sqrt(1.0 - p) * np.eye(dim, dtype=complex))
    if p > 0.0:
        scale = np.sqrt(p / dim)
        for i in range(dim):
            for j in range(dim):
                e = np.zeros((dim, dim), dtype=complex)
                e[i, j] = scale
                ops.append(e)
    return KrausChannel(dim, dim, tuple(ops))


def dephasing_channel(q: float) -> KrausChannel:
    """Qubit phase damping: off-diagonal terms shrink by 1 - q."""
    if not 0.0 <= q <= 1.0:
        raise ValidationError(f"dephasing weight {q} outside [0, 1]")
    eye = np.eye(2, dtype=complex)
    z = np.diag([1.0 + 0j, -1.0 + 0j])
    return KrausChannel(2, 2, (np.sqrt(1.0 - q / 2.0) * eye,
                               np.sqrt(q / 2.0) * z))


def partial_trace_channel(dim_a: int, dim_b: int, keep: str = "A") -> KrausChannel:
    """The channel tracing out one factor of a dim_a x dim_b system."""
    din = dim_a * dim_b
    ops = []
    if keep == "A":
        for j in range(dim_b):
            bra = np.zeros((1, dim_b), dtype=complex)
            bra[0, j] = 1.0
            ops.append(np.kron(np.eye(dim_a, dtype=complex), bra))
        return KrausChannel(din, dim_a, tuple(ops))
    if keep == "B":
        for j in range(dim_a):
            bra = np.zeros((1, dim_a), dtype=complex)
            bra[0, j] = 1.0
            ops.append(np.kron(bra, np.eye(dim_b, dtype=complex)))
        return KrausChannel(din, dim_b, tuple(ops))
    raise ValidationError(f"keep must be 'A' or 'B', got {keep!r}")


def maximally_entangled_state(dim: int = 2) -> DensityMatrix:
    vec = np.zeros(dim * dim, dtype=complex)
    for i in range(dim):
        vec[i * dim + i] = 1.0
    return pure_state(vec)


def kron_sum(a, b) -> np.ndarray:
    """Kronecker sum A (x) I + I (x) B of two observables."""
    am = _as_square_matrix(a, "observable A")
    bm = _as_square_matrix(b, "observable B")
    return (np.kron(am, np.eye(bm.shape[0], dtype=complex))
            + np.kron(np.eye(am.shape[0], dtype=complex), bm))


# ---------------------------------------------------------------------------
# random generators


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_state(dim: int, rank: int | None = None, seed=0) -> DensityMatrix:
    """Random state from a normalized Gaussian factor G G^dag of chosen rank."""
    rank = dim if rank is None else rank
    if not 1 <= rank <= dim:
        raise ValidationError(f"rank {rank} outside 1..{dim}")
    g = _complex_normal(_rng(seed), (dim, rank))
    m = g @ g.conj().T
    return density_matrix(m / np.real(np.trace(m)))


def random_pure(dim: int, seed=0) -> DensityMatrix:
    return pure_state(_complex_normal(_rng(seed), dim))


def random_hermitian(dim: int, seed=0, scale: float = 1.0) -> HermitianMatrix:
    g = _complex_normal(_rng(seed), (dim, dim))
    return HermitianMatrix(scale * herm_part(g))


def qr_orthonormalize(mat) -> np.ndarray:
    """Nearest-ish matrix with orthonormal columns via the QR factor.

    The phases of the R diagonal are absorbed into Q so the result is a
    deterministic function of the input (R ends up with a nonnegative
    diagonal). Also serves as the retraction of the Stiefel optimizers.
    """
    q, r = np.linalg.qr(np.asarray(mat, dtype=complex))
    d = np.diagonal(r)
    safe = np.where(np.abs(d) > 0, d, 1.0)
    ph = safe / np.abs(safe)
    return q * ph.conj()[None, :]


def random_isometry(rows: int, cols: int, seed=0) -> np.ndarray:
    """Haar-ish isometry from the QR factor of a Gaussian matrix."""
    if rows < cols:
        raise ValidationError(f"no isometry with shape ({rows}, {cols})")
    return qr_orthonormalize(_complex_normal(_rng(seed), (rows, cols)))


def random_unitary(dim: int, seed=0) -> np.ndarray:
    return random_isometry(dim, dim, seed)


def random_channel(dim_in: int, dim_out: int, env_dim: int | None = None,
                   seed=0) -> KrausChannel:
    """Random channel from a Haar-ish Stinespring isometry.

    The isometry maps dim_in into dim_out x env_dim; the Kraus operators are
    its environment blocks. ``env_dim`` defaults to dim_in, which makes
    generic full-Kraus channels.
    """
    env_dim = dim_in if env_dim is None else env_dim
    if dim_out * env_dim < dim_in:
        raise ValidationError(
            f"dim_out * env_dim = {dim_out * env_dim} < dim_in = {dim_in}: "
            "no isometry exists")
    v = random_isometry(dim_out * env_dim, dim_in, seed)
    blocks = v.reshape(dim_out, env_dim, dim_in)
    ops = tuple(blocks[:, e, :] for e in range(env_dim))
    return validate_channel(ops, dim_in, dim_out)
