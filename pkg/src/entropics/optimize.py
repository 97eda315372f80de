"""Optimizers for ensemble and pure-state entropic quantities of channels.

The decomposition problems (convex closure of the output entropy, Holevo
chi at fixed average) search over Stiefel points: m x r matrices with
orthonormal columns encoding pure decompositions of a rank-r state into m
atoms (m defaults to r^2, which is enough atoms to attain the minimum).
Pure-state problems (output purity, minimal output entropy) search the unit
sphere, which is the single-column case of the same manifold.

The engine is projected gradient descent: the ambient gradient is estimated
by central finite differences with step 1e-6, projected onto the tangent
space, and the update is pulled back by a QR retraction with an Armijo
backtracking line search. Moving one coordinate of the decomposition matrix
moves exactly one ensemble atom, so a full finite-difference gradient costs
a handful of batched small eigenvalue problems rather than thousands of
objective evaluations.

Determinism: restart i draws its starting point from
``numpy.random.default_rng([seed, i])``, so results are reproducible and the
reported value never gets worse when the restart budget grows (the start
stream is a prefix).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.optimize

from .core import (DensityMatrix, HermitianMatrix, KrausChannel,
                   ValidationError, _as_square_matrix, _complex_normal,
                   apply_channel_mat, density_matrix, ensemble,
                   herm_part, numerical_rank, qr_orthonormalize)
from .decompositions import (StiefelPoint, _spectral_factor,
                             decomposition_from_stiefel, random_stiefel)
from .entropy import (ensemble_holevo_value, ensemble_output_entropy,
                      entropy, entropy_from_eigenvalues, output_entropy)


@dataclass(frozen=True)
class OptimizerOptions:
    """Knobs shared by all optimizers.

    ``max_atoms`` bounds the ensemble size for decomposition searches and
    defaults to rank^2. ``value_tol`` and ``step_tol`` are the convergence
    thresholds on objective decrease and on the retracted step size.
    """

    restarts: int = 32
    max_iters: int = 500
    step_tol: float = 1e-10
    value_tol: float = 1e-9
    max_atoms: int | None = None
    seed: int = 0
    fd_step: float = 1e-6


@dataclass(frozen=True)
class OptimizerReport:
    """Result of a multistart optimization run.

    ``certificate`` is the witness achieving ``value``: an Ensemble for
    decomposition problems, a DensityMatrix (pure) for sphere problems.
    ``best_restart_seed`` is the index of the winning random restart, or -1
    when a deterministic or caller-provided start won. ``converged`` means
    the winning run exited on a tolerance rather than the iteration cap.
    """

    value: float
    certificate: object
    restarts_used: int
    best_restart_seed: int
    gradient_norm_at_exit: float
    iterations: int
    converged: bool
    diagnostics: dict = field(default_factory=dict)


def _resolve(opts: OptimizerOptions | None) -> OptimizerOptions:
    opts = OptimizerOptions() if opts is None else opts
    if opts.restarts < 0 or opts.max_iters < 1 or opts.seed < 0:
        raise ValidationError("optimizer options out of range")
    if opts.fd_step <= 0 or opts.value_tol <= 0 or opts.step_tol <= 0:
        raise ValidationError("optimizer tolerances must be positive")
    return opts


# ---------------------------------------------------------------------------
# batched output entropies


def _eigvalsh_small(a: np.ndarray) -> np.ndarray:
    """Eigenvalues of a batch of small Hermitian matrices, ascending.

    Closed forms at d = 2 and d = 3 dodge the per-call LAPACK overhead that
    otherwise dominates the finite-difference batches. The d = 3 branch is
    the shifted trigonometric formula; individual eigenvalues can lose
    accuracy near exact degeneracy, but the entropies built from them do
    not, since entropy depends on a degenerate pair only at second order in
    the splitting.
    """
    d = a.shape[-1]
    if d == 2:
        d00 = a[..., 0, 0].real
        d11 = a[..., 1, 1].real
        off = a[..., 0, 1]
        mean = 0.5 * (d00 + d11)
        disc = np.sqrt(np.maximum(0.25 * (d00 - d11) ** 2 + np.abs(off) ** 2, 0.0))
        return np.stack([mean - disc, mean + disc], axis=-1)
    if d == 3:
        a00 = a[..., 0, 0].real
        a11 = a[..., 1, 1].real
        a22 = a[..., 2, 2].real
        a01 = a[..., 0, 1]
        a02 = a[..., 0, 2]
        a12 = a[..., 1, 2]
        q = (a00 + a11 + a22) / 3.0
        b00 = a00 - q
        b11 = a11 - q
        b22 = a22 - q
        p1 = (np.abs(a01) ** 2 + np.abs(a02) ** 2 + np.abs(a12) ** 2)
        p2 = b00 ** 2 + b11 ** 2 + b22 ** 2 + 2.0 * p1
        p = np.sqrt(np.maximum(p2 / 6.0, 0.0))
        # det of the shifted matrix, real by hermiticity
        det_b = (b00 * (b11 * b22 - np.abs(a12) ** 2)
                 - (a01 * (a01.conj() * b22 - a12 * a02.conj())).real
                 + (a02 * (a01.conj() * a12.conj() - b11 * a02.conj())).real)
        safe_p = np.where(p > 0.0, p, 1.0)
        r = np.clip(det_b / (2.0 * safe_p ** 3), -1.0, 1.0)
        phi = np.arccos(r) / 3.0
        big = q + 2.0 * p * np.cos(phi)
        small = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
        mid = 3.0 * q - big - small
        return np.stack([small, mid, big], axis=-1)
    return np.linalg.eigvalsh(a)


def _output_entropies(kstack: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Unnormalized output entropies H(Phi(phi phi^dag)) for rows of phis."""
    y = np.einsum("koi,bi->bko", kstack, phis)
    out = np.einsum("bko,bkp->bop", y, y.conj())
    return entropy_from_eigenvalues(_eigvalsh_small(out))


# ---------------------------------------------------------------------------
# objectives


class _EnsembleObjective:
    """sum_i H(Phi(phi_i phi_i^dag)) over decompositions of a fixed state.

    By homogeneity of the entropy this equals sum_i pi_i H(Phi(rho_i)) on
    the manifold, and it extends smoothly to ambient perturbations, which is
    what the finite-difference gradient probes.
    """

    def __init__(self, channel: KrausChannel, rho, fd_step: float):
        factor, r = _spectral_factor(rho)
        self.rows = factor.T            # (r, dim_in); phi matrix = V @ rows
        self.kstack = channel.stacked()
        self.rank = r
        self.h = fd_step

    def value(self, v: np.ndarray) -> float:
        return float(np.sum(_output_entropies(self.kstack, v @ self.rows)))

    def gradient(self, v: np.ndarray) -> np.ndarray:
        m, r = v.shape
        h = self.h
        phis = v @ self.rows
        pert = np.empty((m, r, 2, 2, phis.shape[1]), dtype=complex)
        pert[...] = phis[:, None, None, None, :]
        for d, direction in enumerate((self.rows, 1j * self.rows)):
            pert[:, :, d, 0, :] += h * direction[None, :, :]
            pert[:, :, d, 1, :] -= h * direction[None, :, :]
        ents = _output_entropies(self.kstack, pert.reshape(-1, phis.shape[1]))
        ents = ents.reshape(m, r, 2, 2)
        diff = (ents[..., 0] - ents[..., 1]) / (2.0 * h)
        return diff[..., 0] + 1j * diff[..., 1]


class _PureObjective:
    """H(Phi(psi psi^dag)) + <psi|A|psi> over unit vectors psi as (d, 1) points."""

    def __init__(self, channel: KrausChannel, obs: np.ndarray, fd_step: float):
        self.kstack = channel.stacked()
        self.obs = obs
        self.dim = channel.dim_in
        self.h = fd_step

    def _raw(self, phis: np.ndarray) -> np.ndarray:
        ent = _output_entropies(self.kstack, phis)
        quad = np.real(np.einsum("bi,ij,bj->b", phis.conj(), self.obs, phis))
        return ent + quad

    def value(self, v: np.ndarray) -> float:
        return float(self._raw(v[:, 0][None, :])[0])

    def gradient(self, v: np.ndarray) -> np.ndarray:
        h = self.h
        psi = v[:, 0]
        d = psi.size
        pert = np.empty((d, 2, 2, d), dtype=complex)
        pert[...] = psi[None, None, None, :]
        idx = np.arange(d)
        pert[idx, 0, 0, idx] += h
        pert[idx, 0, 1, idx] -= h
        pert[idx, 1, 0, idx] += 1j * h
        pert[idx, 1, 1, idx] -= 1j * h
        vals = self._raw(pert.reshape(-1, d)).reshape(d, 2, 2)
        diff = (vals[..., 0] - vals[..., 1]) / (2.0 * h)
        return (diff[:, 0] + 1j * diff[:, 1])[:, None]


# ---------------------------------------------------------------------------
# engine


def _stiefel_tangent(v: np.ndarray, g: np.ndarray) -> np.ndarray:
    s = v.conj().T @ g
    return g - v @ ((s + s.conj().T) / 2.0)


def _pgd(fun, grad, x0: np.ndarray, opts: OptimizerOptions,
         lower_bound: float = -math.inf, ambient: bool = False):
    """Projected gradient descent with Armijo backtracking on one start.

    The trial step uses the spectral (Barzilai-Borwein) quotient from the
    previous accepted move when it is positive, else doubles the last
    accepted step. The spectral step adapts to the active curvature, which
    matters in the nearly flat valleys around zero-entropy optima where
    fixed stepping crawls. ``ambient`` switches off the orthonormality
    constraint: the step is a plain gradient step with no tangent
    projection or retraction, used by the free-ensemble search whose
    objective is scale invariant.
    """
    x = x0
    fx = fun(x)
    alpha = 1.0
    gn = 0.0
    iters = 0
    converged = False
    stall = 0
    prev_x = None
    prev_t = None
    for iters in range(1, opts.max_iters + 1):
        if fx <= lower_bound + opts.value_tol:
            converged = True
            break
        g = grad(x)
        t = g if ambient else _stiefel_tangent(x, g)
        gn = float(np.linalg.norm(t))
        if gn <= 1e-14:
            converged = True
            break
        step = min(2.0 * alpha, 1e6)
        if prev_x is not None:
            dx = x - prev_x
            dg = t - prev_t
            denom = float(np.real(np.vdot(dx, dg)))
            if denom > 1e-300:
                step = min(max(float(np.real(np.vdot(dx, dx))) / denom,
                               1e-8), 1e6)
        accepted = False
        for _ in range(60):
            moved = x - step * t
            xn = moved if ambient else qr_orthonormalize(moved)
            fn = fun(xn)
            if fn <= fx - 1e-4 * step * gn * gn:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        gain = fx - fn
        prev_x, prev_t = x, t
        x, fx, alpha = xn, fn, step
        if step * gn < opts.step_tol:
            converged = True
            break
        # Spectral steps alternate large and small gains, so one small gain
        # is not stagnation; demand three in a row before stopping.
        stall = stall + 1 if gain < opts.value_tol else 0
        if stall >= 3:
            converged = True
            break
    return fx, x, gn, iters, converged


def _multistart(fun, grad, starts, opts: OptimizerOptions,
                lower_bound: float = -math.inf, ambient: bool = False):
    """Run every start, keep the best final value (ties: earliest start)."""
    best = None
    used = 0
    for label, x0 in starts:
        fx, x, gn, iters, conv = _pgd(fun, grad, x0, opts, lower_bound,
                                      ambient)
        used += 1
        if best is None or fx < best[0]:
            best = (fx, x, gn, iters, conv, label)
        if best[0] <= lower_bound + opts.value_tol:
            break
    if best is None:
        raise ValidationError("optimizer was given no starting points")
    return best, used


def _conform_start(point, atoms: int, rank: int) -> np.ndarray:
    mat = np.asarray(getattr(point, "matrix", point), dtype=complex)
    if mat.ndim != 2 or mat.shape[1] != rank:
        raise ValidationError(
            f"extra start has shape {mat.shape}, expected (*, {rank})")
    if mat.shape[0] > atoms:
        raise ValidationError(
            f"extra start has {mat.shape[0]} atoms but the budget is {atoms}")
    if mat.shape[0] < atoms:
        mat = np.vstack([mat, np.zeros((atoms - mat.shape[0], rank), complex)])
    return qr_orthonormalize(mat)


def _as_state(rho) -> DensityMatrix:
    return rho if isinstance(rho, DensityMatrix) else density_matrix(rho)


# ---------------------------------------------------------------------------
# decomposition problems


# Only incumbents below this average entropy enter the zero-entropy polish;
# higher values mean the optimum is not in the slow near-zero tail where
# the polish pays off.
_POLISH_GATE = 0.25


class _LinearEntropyObjective:
    """Weighted output purity defect Tr A - (Tr A^2)/Tr A over a decomposition.

    Vanishes exactly where the entropy objective does (each atom's output
    rank one), but is rational in the decomposition matrix, so descent near
    the common zero set has ordinary curvature instead of the unbounded
    -x log x curvature that makes the entropy crawl there. Dividing by the
    trace keeps each atom's defect on the same weight-linear scale as its
    entropy contribution. The gradient is closed form, which matters here:
    finite differences lose to roundoff once the defect drops below the
    square root of machine precision.
    """

    def __init__(self, rows: np.ndarray, kstack: np.ndarray):
        self.rows = rows
        self.kstack = kstack

    def _pieces(self, v: np.ndarray):
        y = np.einsum("koi,bi->bko", self.kstack, v @ self.rows)
        out = np.einsum("bko,bkp->bop", y, y.conj())
        tr = np.maximum(np.real(np.einsum("bii->b", out)), 1e-150)
        tr2 = np.real(np.einsum("bij,bji->b", out, out))
        return y, out, tr, tr2

    def value(self, v: np.ndarray) -> float:
        _, _, tr, tr2 = self._pieces(v)
        return float(np.sum(tr - tr2 / tr))

    def gradient(self, v: np.ndarray) -> np.ndarray:
        y, out, tr, tr2 = self._pieces(v)
        c1 = 1.0 + tr2 / (tr * tr)
        gy = c1[:, None, None] * y \
            - (2.0 / tr)[:, None, None] * np.einsum("bop,bkp->bko", out, y)
        gphi = np.einsum("koi,bko->bi", self.kstack.conj(), gy)
        return 2.0 * gphi @ self.rows.conj().T


def _zero_entropy_polish(objective: _EnsembleObjective, x: np.ndarray,
                         fx: float):
    """Refine a near-zero incumbent through the purity-defect surrogate.

    The entropy objective converges sublinearly toward zero-entropy optima,
    so an incumbent stuck at 1e-4 may sit a tiny step away from an exact
    decomposition. That last stretch is covered by minimizing the smooth
    surrogate with L-BFGS over the ambient matrix, adding an isometry
    penalty ||V*V - I||_F^2. Both terms vanish together at an exact
    zero-entropy decomposition, so the penalty costs nothing at the target,
    and the final QR retraction only absorbs roundoff. The result counts
    only when the true objective improves, so the polish is sound
    regardless of where the surrogate leads.
    """
    sur = _LinearEntropyObjective(objective.rows, objective.kstack)
    if sur.value(x) > 0.05:
        return fx, x, False
    m, r = x.shape
    eye = np.eye(r)
    mu = 4.0

    def split(u):
        return u[:m * r].reshape(m, r) + 1j * u[m * r:].reshape(m, r)

    def fun(u):
        w = split(u)
        p = w.conj().T @ w - eye
        f = sur.value(w) + mu * float(np.real(np.sum(p * p.conj())))
        g = sur.gradient(w) + 4.0 * mu * (w @ p)
        return f, np.concatenate([g.real.ravel(), g.imag.ravel()])

    u0 = np.concatenate([x.real.ravel(), x.imag.ravel()])
    res = scipy.optimize.minimize(
        fun, u0, jac=True, method="L-BFGS-B",
        options={"maxiter": 8000, "ftol": 0.0, "gtol": 1e-14, "maxcor": 30})
    xs = qr_orthonormalize(split(res.x))
    fs = objective.value(xs)
    if fs < fx:
        return fs, xs, True
    return fx, x, False


def convex_closure_output_entropy(channel: KrausChannel, rho,
                                  opts: OptimizerOptions | None = None,
                                  extra_starts=()) -> OptimizerReport:
    """Minimize the average output entropy over pure decompositions of rho.

    This is the convex closure (largest convex minorant) of the output
    entropy evaluated at rho; for a partial-trace channel it is the
    entanglement of formation. The certificate ensemble averages back to
    rho exactly and has at most rank(rho)^2 atoms.
    """
    opts = _resolve(opts)
    state = _as_state(rho)
    if state.dim != channel.dim_in:
        raise ValidationError(
            f"state dimension {state.dim} does not match channel input "
            f"{channel.dim_in}")
    r = numerical_rank(state.mat)
    if r <= 1:
        value = output_entropy(channel, state)
        cert = ensemble([(1.0, state)])
        return OptimizerReport(value, cert, 0, -1, 0.0, 0, True,
                               {"fast_path": "pure input"})
    atoms = opts.max_atoms if opts.max_atoms is not None else r * r
    if atoms < r:
        raise ValidationError(f"max_atoms {atoms} below the state rank {r}")
    objective = _EnsembleObjective(channel, state, opts.fd_step)
    starts = [(-1, _conform_start(p, atoms, r)) for p in extra_starts]
    starts.append((-1, np.eye(atoms, r, dtype=complex)))
    for i in range(opts.restarts):
        starts.append(
            (i, random_stiefel(atoms, r, np.random.default_rng([opts.seed, i])).matrix))
    best, used = _multistart(objective.value, objective.gradient, starts,
                             opts, lower_bound=0.0)
    fx, x, gn, iters, conv, label = best
    polished = False
    if opts.value_tol < fx < _POLISH_GATE:
        fx, x, polished = _zero_entropy_polish(objective, x, fx)
    cert = decomposition_from_stiefel(state, StiefelPoint(x))
    diag = {
        "certificate_value": ensemble_output_entropy(channel, cert),
        "atoms": atoms,
        "polished": polished,
    }
    return OptimizerReport(fx, cert, used, label, gn, iters, conv, diag)


def holevo_chi(channel: KrausChannel, rho,
               opts: OptimizerOptions | None = None,
               extra_starts=()) -> OptimizerReport:
    """Holevo quantity at fixed average state.

    chi(rho) = H(Phi(rho)) - min over decompositions of the average output
    entropy; the certificate is the optimal ensemble. The diagnostics carry
    the direct relative-entropy evaluation of the certificate, which should
    agree with the reported value to high accuracy.
    """
    inner = convex_closure_output_entropy(channel, rho, opts, extra_starts)
    state = _as_state(rho)
    h_out = output_entropy(channel, state)
    value = h_out - inner.value
    diag = dict(inner.diagnostics)
    diag["output_entropy"] = h_out
    diag["relative_entropy_form"] = ensemble_holevo_value(channel,
                                                          inner.certificate)
    diag["avg_output_entropy"] = inner.value
    return replace(inner, value=value, diagnostics=diag)


# ---------------------------------------------------------------------------
# pure-state problems


def output_purity(channel: KrausChannel, obs,
                  opts: OptimizerOptions | None = None,
                  extra_starts=()) -> OptimizerReport:
    """Minimize H(Phi(psi psi^dag)) + <psi|A|psi> over pure input states.

    ``obs`` is a Hermitian observable on the channel input. The certificate
    is the minimizing pure state; its vector sits in diagnostics under
    ``"vector"`` for warm starting follow-up solves.
    """
    opts = _resolve(opts)
    a = herm_part(_as_square_matrix(obs, "observable"))
    d = channel.dim_in
    if a.shape[0] != d:
        raise ValidationError(
            f"observable dimension {a.shape[0]} does not match channel input {d}")
    objective = _PureObjective(channel, a, opts.fd_step)
    w, v = np.linalg.eigh(a)
    lower = float(w[0])
    starts = []
    for p in extra_starts:
        vec = np.asarray(getattr(p, "matrix", p), dtype=complex).reshape(-1)
        if vec.size != d:
            raise ValidationError(
                f"extra start has dimension {vec.size}, expected {d}")
        starts.append((-1, qr_orthonormalize(vec[:, None])))
    starts.append((-1, qr_orthonormalize(v[:, 0][:, None])))
    for i in range(opts.restarts):
        rng = np.random.default_rng([opts.seed, i])
        starts.append((i, qr_orthonormalize(_complex_normal(rng, (d, 1)))))
    best, used = _multistart(objective.value, objective.gradient, starts,
                             opts, lower_bound=lower)
    fx, x, gn, iters, conv, label = best
    psi = x[:, 0]
    cert = DensityMatrix(np.outer(psi, psi.conj()))
    return OptimizerReport(fx, cert, used, label, gn, iters, conv,
                           {"vector": psi})


def min_output_entropy(channel: KrausChannel,
                       opts: OptimizerOptions | None = None,
                       extra_starts=()) -> OptimizerReport:
    """Minimal output entropy over pure inputs (zero-observable purity)."""
    zero = np.zeros((channel.dim_in, channel.dim_in), dtype=complex)
    rep = output_purity(channel, zero, opts, extra_starts)
    diag = dict(rep.diagnostics)
    diag["quantity"] = "min_output_entropy"
    return replace(rep, diagnostics=diag)


# ---------------------------------------------------------------------------
# constrained capacity


class _FreeEnsembleObjective:
    """Penalized Holevo value over free ensembles (average not pinned).

    Rows of the m x d parameter matrix are unnormalized atom vectors; the
    derived ensemble has weights |w_i|^2 / s and average sigma / s with
    sigma = sum_i w_i w_i^dag, s = Tr sigma. The objective (to maximize) is

        H(Phi(avg)) - sum_i pi_i H(Phi(atom_i))
        - mu * max(0, Tr Phi(avg) Hc - bound)

    which is the chi value of the derived ensemble minus the exact penalty.
    """

    def __init__(self, channel: KrausChannel, obs_out: np.ndarray,
                 bound: float, mu: float, fd_step: float):
        self.kstack = channel.stacked()
        self.hc = obs_out
        self.bound = bound
        self.mu = mu
        self.h = fd_step
        self.dout = channel.dim_out

    def value_batch(self, ws: np.ndarray) -> np.ndarray:
        b, m, d = ws.shape
        sig = np.einsum("bmi,bmj->bij", ws, ws.conj())
        s = np.maximum(np.real(np.einsum("bii->b", sig)), 1e-300)
        avg = sig / s[:, None, None]
        out = np.einsum("koi,bij,kpj->bop", self.kstack, avg, self.kstack.conj())
        h_avg = entropy_from_eigenvalues(_eigvalsh_small(out))
        y = np.einsum("koi,bmi->bmko", self.kstack, ws)
        at = np.einsum("bmko,bmkp->bmop", y, y.conj())
        h_at = entropy_from_eigenvalues(
            _eigvalsh_small(at.reshape(b * m, self.dout, self.dout)))
        h_at = h_at.reshape(b, m).sum(axis=1) / s
        energy = np.real(np.einsum("bop,po->b", out, self.hc))
        j = h_avg - h_at - self.mu * np.maximum(energy - self.bound, 0.0)
        return -j

    def value(self, w: np.ndarray) -> float:
        return float(self.value_batch(w[None])[0])

    def gradient(self, w: np.ndarray) -> np.ndarray:
        m, d = w.shape
        h = self.h
        batch = np.repeat(w[None], m * d * 4, axis=0).reshape(m, d, 2, 2, m, d)
        ii = np.arange(m)[:, None]
        jj = np.arange(d)[None, :]
        batch[ii, jj, 0, 0, ii, jj] += h
        batch[ii, jj, 0, 1, ii, jj] -= h
        batch[ii, jj, 1, 0, ii, jj] += 1j * h
        batch[ii, jj, 1, 1, ii, jj] -= 1j * h
        vals = self.value_batch(batch.reshape(-1, m, d)).reshape(m, d, 2, 2)
        diff = (vals[..., 0] - vals[..., 1]) / (2.0 * h)
        return diff[..., 0] + 1j * diff[..., 1]

    def state_of(self, w: np.ndarray) -> np.ndarray:
        sig = np.einsum("mi,mj->ij", w, w.conj())
        return sig / max(float(np.real(np.trace(sig))), 1e-300)

    def violation_of(self, w: np.ndarray) -> float:
        out = apply_channel_mat_stack(self.kstack, self.state_of(w))
        return max(0.0, float(np.real(np.trace(out @ self.hc))) - self.bound)


def apply_channel_mat_stack(kstack: np.ndarray, mat: np.ndarray) -> np.ndarray:
    return np.einsum("koi,ij,kpj->op", kstack, mat, kstack.conj())


def constrained_capacity(channel: KrausChannel, obs_out, bound: float,
                         opts: OptimizerOptions | None = None) -> OptimizerReport:
    """Maximal Holevo chi over states meeting an output expectation budget.

    Maximizes chi(rho) subject to Tr Phi(rho) Hc <= bound. The constraint is
    handled by an exact penalty whose weight escalates tenfold until the
    violation at the incumbent drops below 1e-8; the incumbent average state
    is then certified by an ordinary fixed-average chi solve.

    Raises ValidationError when no state satisfies the budget (the minimum
    of Tr Phi(rho) Hc is the bottom eigenvalue of the pulled-back
    observable).
    """
    opts = _resolve(opts)
    hc = herm_part(_as_square_matrix(obs_out, "output observable"))
    if hc.shape[0] != channel.dim_out:
        raise ValidationError(
            f"observable dimension {hc.shape[0]} does not match channel "
            f"output {channel.dim_out}")
    pulled = sum(k.conj().T @ hc @ k for k in channel.kraus)
    floor = float(np.linalg.eigvalsh(herm_part(pulled))[0])
    if floor > bound + 1e-12:
        raise ValidationError(
            f"constraint infeasible: min output expectation {floor:.6g} "
            f"exceeds bound {bound:.6g}")
    d = channel.dim_in
    atoms = opts.max_atoms if opts.max_atoms is not None else d * d
    # Deterministic start spreading mass evenly over the basis.
    w0 = np.zeros((atoms, d), dtype=complex)
    for i in range(atoms):
        w0[i, i % d] = 1.0 / math.sqrt(atoms)
    free_opts = replace(opts, step_tol=max(opts.step_tol, 1e-12))
    mu = 10.0
    outer_iters = 0
    best_w = None
    violation = math.inf
    for escalation in range(9):
        objective = _FreeEnsembleObjective(channel, hc, bound, mu, opts.fd_step)
        starts = []
        if best_w is not None:
            starts.append((-1, best_w))
        starts.append((-1, w0))
        n_random = opts.restarts if escalation == 0 else min(opts.restarts, 2)
        for i in range(n_random):
            rng = np.random.default_rng([opts.seed, escalation, i])
            starts.append((i, _complex_normal(rng, (atoms, d)) / math.sqrt(atoms * d)))
        best, used = _multistart(objective.value, objective.gradient, starts,
                                 free_opts, ambient=True)
        fx, x, gn, iters, conv, label = best
        outer_iters += iters
        best_w = x
        violation = objective.violation_of(x)
        if violation < 1e-8:
            break
        mu *= 10.0
    state = density_matrix(herm_part(objective.state_of(best_w)))
    chi_rep = holevo_chi(channel, state, opts)
    diag = dict(chi_rep.diagnostics)
    diag.update({
        "state": state,
        "constraint_violation": violation,
        "penalty_weight": mu,
        "free_search_value": -fx,
    })
    converged = chi_rep.converged and violation < 1e-8
    return OptimizerReport(chi_rep.value, chi_rep.certificate,
                           chi_rep.restarts_used, chi_rep.best_restart_seed,
                           chi_rep.gradient_norm_at_exit, outer_iters,
                           converged, diag)


# ---------------------------------------------------------------------------
# brute-force oracle


def brute_force_chi(channel: KrausChannel, rho, samples: int = 4000,
                    polish_rounds: int = 400, seed: int = 0) -> float:
    """Independent lower-bound oracle for the Holevo quantity (dims <= 3).

    Dense random sampling of decomposition points followed by a shrinking
    random-walk polish; the value of each candidate is the direct
    relative-entropy sum against the fixed average, so this path shares no
    machinery with the gradient optimizer it is used to check.
    """
    if channel.dim_in > 3:
        raise ValidationError("brute-force oracle only supports dims <= 3")
    state = _as_state(rho)
    r = numerical_rank(state.mat)
    atoms = r * r

    def val(mat: np.ndarray) -> float:
        ens = decomposition_from_stiefel(state, StiefelPoint(mat))
        v = ensemble_holevo_value(channel, ens)
        return -math.inf if math.isinf(v) else v

    rng = np.random.default_rng([seed])
    best_mat = random_stiefel(atoms, r, rng).matrix
    best_val = val(best_mat)
    for _ in range(samples - 1):
        cand = random_stiefel(atoms, r, rng).matrix
        cv = val(cand)
        if cv > best_val:
            best_val, best_mat = cv, cand
    radius = 0.25
    fails = 0
    for _ in range(polish_rounds):
        cand = qr_orthonormalize(
            best_mat + radius * _complex_normal(rng, best_mat.shape))
        cv = val(cand)
        if cv > best_val:
            best_val, best_mat = cv, cand
            fails = 0
        else:
            fails += 1
            if fails >= 20:
                radius *= 0.5
                fails = 0
                if radius < 1e-6:
                    break
    return best_val
