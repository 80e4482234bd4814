"""Receive-phase EDoF maximization.

The trace-to-norm ratio of the composite channel Gram matrix is maximized
over the receive phase schedule by a Dinkelbach bisection: for a fixed
ratio candidate `zeta`, the relaxed subproblem

    maximize   Tr(C E) - zeta * ||C E||_F
    over       E = blkdiag(B_1, ..., B_P),  B_p >= 0,  diag(B_p) = 1

is concave over a convex compact set (C = q_tx-weighted channel Gram,
blocks of size N_r, P = K*N); its optimal value decreases strictly in
zeta, and the bisection brackets the unique root.  The rank-1 block
structure is then recovered by Gaussian randomization and optionally
snapped to a discrete phase set.

The subproblem is solved by projected gradient ascent: the Euclidean
gradient is C - zeta * herm(C^2 E) / ||C E||_F and feasibility is
restored by zeroing off-block entries and alternating per block between
eigenvalue clipping and resetting the diagonal to one.  Step sizes come
from the tangent majorant of the square root: at the current iterate,
sqrt(x) <= sqrt(x0) + (x - x0) / (2 sqrt(x0)) turns the objective into a
block-separable concave quadratic whose gradient is the same, so the
per-block Lipschitz step s / (zeta * lambda_max((C^2)_pp)) guarantees
ascent; backtracking on objective decrease covers projection inexactness
and the zeta ~ 0 corner.  Both Tr(C E) and ||C E||_F decouple over
blocks given the diagonal blocks of C and of C^2, so no full-size matrix
product appears in the loop; when C is available in factored form
C = F F^H (F tall, e.g. rank M from the channel), those diagonal blocks
contract through the small Gram F^H F.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .rng import DRAWS, generator

_TWO_PI = 2.0 * math.pi


class BracketError(RuntimeError):
    """Subproblem values at the bisection bracket edges have wrong signs."""


def _herm(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


@dataclass
class SdrProblem:
    """Relaxation data: Hermitian PSD C with its block partition.

    `block_sizes` lists the receive blocks slot-major: (k=1, n=1..N),
    ..., (k=K, n=1..N), each of size N_r.  `factor` optionally holds a
    tall F with C = F @ F^H for fast contractions.
    """

    c: np.ndarray
    block_sizes: tuple[int, ...]
    k_slots: int
    n_rx: int
    factor: np.ndarray | None = None

    _starts: tuple[int, ...] = field(init=False, repr=False)
    _cpp: list = field(init=False, repr=False)
    _dpp: list = field(init=False, repr=False)
    _factor_blocks: list = field(init=False, repr=False)
    _gram: np.ndarray | None = field(init=False, repr=False)
    _d_top: list = field(init=False, repr=False)
    spectral_norm: float = field(init=False, repr=False)
    fro_norm: float = field(init=False, repr=False)

    def __post_init__(self):
        n = self.c.shape[0]
        self.block_sizes = tuple(int(b) for b in self.block_sizes)
        if self.c.shape != (n, n):
            raise ValueError("C must be square")
        if sum(self.block_sizes) != n:
            raise ValueError("block sizes must tile C")
        if len(self.block_sizes) != self.k_slots * self.n_rx:
            raise ValueError("expected K*N blocks")
        herm_err = np.max(np.abs(self.c - self.c.conj().T)) if n else 0.0
        scale = max(np.max(np.abs(self.c)), 1e-300)
        if herm_err > 1e-10 * scale:
            raise ValueError("C must be Hermitian")
        self.c = _herm(self.c)

        starts = np.concatenate([[0], np.cumsum(self.block_sizes)])
        self._starts = tuple(int(s) for s in starts[:-1])
        sl = [slice(s, s + b) for s, b in zip(self._starts, self.block_sizes)]
        self._cpp = [np.ascontiguousarray(self.c[s, s]) for s in sl]
        if self.factor is not None:
            self._factor_blocks = [np.ascontiguousarray(self.factor[s, :]) for s in sl]
            self._gram = _herm(self.factor.conj().T @ self.factor)
            self._dpp = []
            gw, gv = np.linalg.eigh(self._gram)
            self.spectral_norm = float(max(gw[-1], 0.0))
            self.fro_norm = float(np.linalg.norm(self._gram))
            # lambda_max(F_p S F_p^H) via the similar small matrix
            # S^1/2 (F_p^H F_p) S^1/2
            root = gv * np.sqrt(np.clip(gw, 0.0, None))
            s_half = root @ gv.conj().T
            self._d_top = []
            for f in self._factor_blocks:
                small = _herm(s_half @ (f.conj().T @ f) @ s_half)
                self._d_top.append(float(max(np.linalg.eigvalsh(small)[-1], 0.0)))
        else:
            self._factor_blocks = []
            self._gram = None
            self._dpp = [np.ascontiguousarray(self.c[s, :] @ self.c[:, s]) for s in sl]
            ew = np.linalg.eigvalsh(self.c)
            if ew[0] < -1e-8 * max(float(ew[-1]), 0.0):
                raise ValueError("C must be positive semidefinite")
            self.spectral_norm = float(max(ew[-1], 0.0))
            self.fro_norm = float(np.linalg.norm(self.c))
            self._d_top = [float(max(np.linalg.eigvalsh(_herm(d))[-1], 0.0))
                           for d in self._dpp]

    @property
    def size(self) -> int:
        return self.c.shape[0]

    def trace_term(self, blocks: list[np.ndarray]) -> float:
        """Tr(C E) = sum_p Tr(C_pp B_p)."""
        total = 0.0
        if self._factor_blocks:
            for f, b in zip(self._factor_blocks, blocks):
                total += float(np.sum((f.conj() * (b @ f))).real)
        else:
            for cpp, b in zip(self._cpp, blocks):
                total += float(np.sum(cpp.T * b).real)
        return total

    def norm_sq(self, blocks: list[np.ndarray]) -> float:
        """||C E||_F^2 = sum_p Tr(B_p (C^2)_pp B_p)."""
        total = 0.0
        if self._factor_blocks:
            g = self._gram
            for f, b in zip(self._factor_blocks, blocks):
                u = f.conj().T @ b
                total += float(np.sum(u.conj() * (g @ u)).real)
        else:
            for d, b in zip(self._dpp, blocks):
                total += float(np.sum((b @ d).T * b).real)
        return max(total, 0.0)

    def d_apply(self, p: int, b: np.ndarray) -> np.ndarray:
        """(C^2)_pp @ B_p."""
        if self._factor_blocks:
            f = self._factor_blocks[p]
            return f @ (self._gram @ (f.conj().T @ b))
        return self._dpp[p] @ b

    def rank_one_scores(self, q_blocks: list[np.ndarray]) -> tuple[float, float]:
        """(Tr(C E), ||C E||_F) for E with unit-modulus rank-1 blocks."""
        tr = 0.0
        n2 = 0.0
        for p, q in enumerate(q_blocks):
            npx = q.shape[0]
            if self._factor_blocks:
                z = self._factor_blocks[p].conj().T @ q
                tr += float(np.vdot(z, z).real)
                n2 += npx * float(np.vdot(z, self._gram @ z).real)
            else:
                tr += float(np.vdot(q, self._cpp[p] @ q).real)
                n2 += npx * float(np.vdot(q, self._dpp[p] @ q).real)
        return tr, max(n2, 0.0)

    def numerical_rank(self, rtol: float = 1e-9) -> int:
        if self.factor is not None:
            s = np.linalg.svd(self.factor, compute_uv=False)
            if s.size == 0 or s[0] == 0.0:
                return 0
            return int(np.count_nonzero(s > rtol * s[0]))
        w = np.linalg.eigvalsh(self.c)
        top = max(float(w[-1]), 0.0)
        if top == 0.0:
            return 0
        return int(np.count_nonzero(w > rtol * top))


def build_sdr_problem(h_w: np.ndarray, schedule) -> SdrProblem:
    """C = (stacked per-slot h_w @ q_tx) Gram, with its block partition."""
    k, m_tx, n_t, n_rx, n_r = schedule.shape
    if h_w.shape != (n_rx * n_r, m_tx * n_t):
        raise ValueError(
            f"h_w shape {h_w.shape} inconsistent with schedule "
            f"(expected {(n_rx * n_r, m_tx * n_t)})")
    factor = np.vstack([h_w @ schedule.slot_tx_matrix(s) for s in range(k)])
    c = _herm(factor @ factor.conj().T)
    return SdrProblem(c=c, block_sizes=(n_r,) * (k * n_rx), k_slots=k, n_rx=n_rx,
                      factor=factor)


@dataclass
class RelaxedSolution:
    """Feasible block-diagonal E with solver diagnostics."""

    blocks: list[np.ndarray]
    objective: float
    feasibility_residual: float
    stationarity_residual: float
    converged: bool
    iterations: int

    @property
    def e(self) -> np.ndarray:
        """The full block-diagonal matrix."""
        n = sum(b.shape[0] for b in self.blocks)
        out = np.zeros((n, n), dtype=complex)
        at = 0
        for b in self.blocks:
            k = b.shape[0]
            out[at:at + k, at:at + k] = b
            at += k
        return out


def _project_block(b: np.ndarray, shift_scale: float = 1e-10) -> np.ndarray:
    """Feasibility retraction: unit diagonal, then PSD clip, then restore
    the diagonal by congruence scaling (which keeps the clip's PSD-ness;
    post-clip diagonals are >= 1 whenever the pre-clip diagonal is 1).

    `shift_scale` sets the accepted eigenvalue floor relative to the
    block size; iterations run with a loose floor to skip the clip when
    a Cholesky factorization succeeds, the final cleanup with a strict one.
    """
    n = b.shape[0]
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    b = _herm(b)
    np.fill_diagonal(b, 1.0)
    try:
        np.linalg.cholesky(b + (shift_scale * n) * np.eye(n))
        return b
    except np.linalg.LinAlgError:
        pass
    w, v = np.linalg.eigh(b)
    if w[-1] <= 0.0:
        return np.eye(n, dtype=complex)
    b = (v * np.clip(w, 0.0, None)) @ v.conj().T
    d = np.clip(np.diag(b).real, 1.0, None)
    scale = 1.0 / np.sqrt(d)
    b = _herm(b * np.outer(scale, scale))
    np.fill_diagonal(b, 1.0)
    return b


def solve_subproblem(prob: SdrProblem, zeta: float, tol: float = 1e-6,
                     max_iters: int = 5000,
                     init: list[np.ndarray] | None = None) -> RelaxedSolution:
    """Projected gradient ascent on Tr(C E) - zeta * ||C E||_F.

    Returns a feasible block-diagonal E; `objective` is its exact value
    and therefore a lower bound on the maximum.  `stationarity_residual`
    is ||project(E + a * grad) - E||_F / (a * ||C||_F) with base step
    a = 1 / ||C||_2, compared against `tol`.
    """
    if zeta < 0.0:
        raise ValueError("zeta must be non-negative")
    loose = 1e-7
    if init is None:
        blocks = [np.eye(n, dtype=complex) for n in prob.block_sizes]
    else:
        blocks = [_project_block(b.copy()) for b in init]

    scale = max(prob.fro_norm, 1e-300)
    a = 1.0 / max(prob.spectral_norm, 1e-300)

    def objective(bl):
        return prob.trace_term(bl) - zeta * math.sqrt(prob.norm_sq(bl))

    def gradients(bl):
        s = math.sqrt(prob.norm_sq(bl))
        if s <= 1e-300:
            return [cpp.copy() for cpp in prob._cpp], s
        return [prob._cpp[p] - (zeta / s) * _herm(prob.d_apply(p, bl[p]))
                for p in range(len(bl))], s

    def probe_residual(bl, grads):
        move = 0.0
        for b, g in zip(bl, grads):
            step = _project_block(b + a * g)
            move += float(np.linalg.norm(step - b) ** 2)
        return math.sqrt(move) / (a * scale)

    def step_sizes(s: float, it: int, grads: list[np.ndarray]) -> list[float]:
        # majorant-Lipschitz step, trust-capped so each move has Frobenius
        # norm at most sqrt(n_p) (keeps the feasibility projection cheap)
        fallback = a / math.sqrt(it)
        out = []
        for top, g in zip(prob._d_top, grads):
            denom = zeta * top
            t = s / denom if denom > 0.0 and s > 0.0 else fallback
            gn = float(np.linalg.norm(g))
            if gn > 0.0:
                t = min(t, math.sqrt(g.shape[0]) / gn)
            out.append(t)
        return out

    f_cur = objective(blocks)
    best_f, best_blocks = f_cur, [b.copy() for b in blocks]
    converged = False
    stall = 0
    it = 0
    residual = math.inf
    shrink = 1.0  # adaptive step damping, carried across iterations
    while it < max_iters:
        it += 1
        grads, s = gradients(blocks)
        steps = step_sizes(s, it, grads)
        accepted = False
        for attempt in range(25):
            cand = [_project_block(b + shrink * t * g, loose)
                    for b, t, g in zip(blocks, steps, grads)]
            f_new = objective(cand)
            if f_new >= f_cur - 1e-14 * scale:
                accepted = True
                if attempt == 0:
                    shrink = min(2.0 * shrink, 1.0)
                break
            shrink *= 0.5
        if accepted:
            gain = f_new - f_cur
            blocks, f_cur = cand, f_new
            if f_cur > best_f:
                best_f, best_blocks = f_cur, [b.copy() for b in blocks]
            stall = stall + 1 if gain <= max(1e-13 * scale, 1e-9 * abs(f_cur)) else 0
        else:
            stall += 1
        if stall >= 6 or it % 25 == 0:
            grads, _ = gradients(blocks)
            residual = probe_residual(blocks, grads)
            if residual <= tol:
                converged = True
                break
            if stall >= 6:
                break

    if best_f > f_cur:
        blocks = best_blocks
    # strict feasibility cleanup; the reported objective is exact on it
    blocks = [_project_block(b) for b in blocks]
    f_cur = objective(blocks)
    grads, _ = gradients(blocks)
    residual = probe_residual(blocks, grads)
    converged = converged or residual <= tol

    feas = 0.0
    for b in blocks:
        n = b.shape[0]
        diag_dev = float(np.max(np.abs(np.diag(b) - 1.0)))
        w = np.linalg.eigvalsh(b)
        neg = max(0.0, -float(w[0])) / max(n, 1)
        feas = max(feas, diag_dev, neg)
    return RelaxedSolution(blocks=blocks, objective=objective(blocks),
                           feasibility_residual=feas,
                           stationarity_residual=residual,
                           converged=converged, iterations=it)


def dinkelbach_value(prob: SdrProblem, zeta: float, tol: float = 1e-6,
                     max_iters: int = 5000) -> float:
    """Optimal value of the relaxed subproblem at ratio candidate `zeta`."""
    return solve_subproblem(prob, zeta, tol=tol, max_iters=max_iters).objective


@dataclass
class DinkelbachRun:
    """Bisection trace and the recovered phase schedule."""

    zeta_low: float
    zeta_high: float
    zeta_opt: float
    iterations: tuple[tuple[float, float], ...]
    e_opt: RelaxedSolution
    recovered_phases: np.ndarray
    achieved_edof: float
    well_posed: bool
    bracket_values: tuple[float, float]
    subproblem_solves: int


def dinkelbach_bisect(prob: SdrProblem, epsilon: float = 1e-3, *,
                      rank_bound: int, tol: float = 1e-6, max_iters: int = 5000,
                      num_draws: int = 100, seed: int = 0,
                      bracket_rtol: float = 1e-4) -> DinkelbachRun:
    """Bisection on the sign of the subproblem value over [1, sqrt(rank)].

    `rank_bound` is the composite-channel rank prediction; the bracket is
    [1, sqrt(rank_bound)].  Edge values outside their theoretical signs
    by more than bracket_rtol * ||C||_F indicate either subproblem failure
    (aborted) or an instance whose relaxation genuinely exceeds the rank
    bound (rank(C) > rank_bound; flagged well_posed=False and continued).

    When the channel factor repeats identically across slots (transmit
    schedule constant over the symbol), a slot-replicated optimum exists
    for every subproblem -- slot-averaging keeps the trace and cannot
    increase the norm -- so the bisection runs on the single-slot problem
    and replicates; subproblem values scale by K.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if rank_bound < 1:
        raise ValueError("rank_bound must be at least 1")
    work, kfold = _slot_reduced(prob)
    z_lo = 1.0
    z_hi = math.sqrt(float(rank_bound))
    btol = bracket_rtol * prob.fro_norm

    solves = 0
    sol = solve_subproblem(work, z_lo, tol=tol, max_iters=max_iters)
    solves += 1
    f_lo = kfold * sol.objective
    if f_lo < -btol:
        raise BracketError(f"value at ratio 1 is {f_lo:.3e} < -{btol:.3e}; "
                           "subproblem solver failed to reach a non-negative value")
    if z_hi > z_lo:
        sol = solve_subproblem(work, z_hi, tol=tol, max_iters=max_iters,
                               init=sol.blocks)
        solves += 1
        f_hi = kfold * sol.objective
    else:
        f_hi = f_lo
    well_posed = f_hi <= btol
    if not well_posed and prob.numerical_rank() <= rank_bound:
        raise BracketError(
            f"value at the upper ratio edge is {f_hi:.3e} > {btol:.3e} although "
            f"rank(C) <= {rank_bound}; subproblem solver failed")

    trace: list[tuple[float, float]] = []
    last_zeta = z_hi if z_hi > 1.0 else z_lo
    last_value = f_hi if z_hi > 1.0 else f_lo
    while True:
        z_mid = 0.5 * (z_lo + z_hi)
        if z_mid != last_zeta:
            sol = solve_subproblem(work, z_mid, tol=tol, max_iters=max_iters,
                                   init=sol.blocks)
            solves += 1
            last_zeta = z_mid
            last_value = kfold * sol.objective
        trace.append((z_mid, last_value))
        if last_value >= 0.0:
            z_lo = z_mid
        else:
            z_hi = z_mid
        if z_hi - z_lo <= epsilon:
            break

    zeta_opt = 0.5 * (z_lo + z_hi)
    if kfold > 1:
        sol = RelaxedSolution(blocks=[b.copy() for _ in range(kfold) for b in sol.blocks],
                              objective=kfold * sol.objective,
                              feasibility_residual=sol.feasibility_residual,
                              stationarity_residual=sol.stationarity_residual,
                              converged=sol.converged, iterations=sol.iterations)
    phases, achieved = gaussian_randomize(sol, prob, num_draws, seed)
    return DinkelbachRun(zeta_low=1.0, zeta_high=math.sqrt(float(rank_bound)),
                         zeta_opt=zeta_opt, iterations=tuple(trace), e_opt=sol,
                         recovered_phases=phases, achieved_edof=achieved,
                         well_posed=well_posed, bracket_values=(f_lo, f_hi),
                         subproblem_solves=solves)


def _slot_reduced(prob: SdrProblem) -> tuple[SdrProblem, int]:
    """Single-slot equivalent when the factor repeats across slots."""
    if prob.factor is None or prob.k_slots <= 1:
        return prob, 1
    rows = prob.factor.shape[0] // prob.k_slots
    first = prob.factor[:rows]
    for k in range(1, prob.k_slots):
        if not np.array_equal(prob.factor[k * rows:(k + 1) * rows], first):
            return prob, 1
    per_slot = len(prob.block_sizes) // prob.k_slots
    reduced = SdrProblem(c=_herm(first @ first.conj().T),
                         block_sizes=prob.block_sizes[:per_slot],
                         k_slots=1, n_rx=prob.n_rx, factor=first)
    return reduced, prob.k_slots


def gaussian_randomize(e_opt, prob: SdrProblem, num_draws: int,
                       seed: int) -> tuple[np.ndarray, float]:
    """Recover unit-modulus rank-1 blocks from the relaxed solution.

    Per block, `num_draws` vectors are drawn from the zero-mean complex
    Gaussian with that block's covariance and projected entrywise onto
    unit modulus.  Candidates are scored by the trace-to-Frobenius ratio
    they realize -- of the recovered composite channel Gram when the
    problem carries the channel factor, of C E otherwise.  Selection
    starts from the best joint draw and then refines block by block over
    the drawn pool (cyclic best-response sweeps) since the objective
    couples blocks; the sweep is deterministic.  The selected phases come
    back as a (K, N, N_r) receive schedule; `achieved_edof` is the
    squared ratio.
    """
    if num_draws < 1:
        raise ValueError("num_draws must be at least 1")
    blocks = e_opt.blocks if isinstance(e_opt, RelaxedSolution) else list(e_opt)
    if len(blocks) != len(prob.block_sizes):
        raise ValueError("solution blocks do not match the problem partition")
    if len(set(prob.block_sizes)) != 1:
        raise ValueError("phase recovery requires uniform block sizes")
    rng = generator(seed, stream=DRAWS)
    n_blocks = len(blocks)

    candidates: list[np.ndarray] = []  # per block: (n, num_draws) unit modulus
    for b in blocks:
        n = b.shape[0]
        w, v = np.linalg.eigh(_herm(b))
        root = v * np.sqrt(np.clip(w, 0.0, None))
        g = (rng.standard_normal((n, num_draws))
             + 1j * rng.standard_normal((n, num_draws))) / math.sqrt(2.0)
        z = root @ g
        mag = np.abs(z)
        unit = np.where(mag > 0.0, z / np.where(mag > 0.0, mag, 1.0), 1.0)
        candidates.append(unit)

    if prob.factor is not None:
        # per block: (num_draws, M) candidate composite-channel rows
        rows = [c.conj().T @ f for c, f in zip(candidates, prob._factor_blocks)]

        def score_of(sel: list[int]) -> float:
            h_c = np.array([rows[p][sel[p]] for p in range(n_blocks)])
            s2 = np.linalg.svd(h_c, compute_uv=False) ** 2
            denom = math.sqrt(float(np.sum(s2 * s2)))
            return float(np.sum(s2)) / denom if denom > 0.0 else 0.0

        def block_scores(sel: list[int], p: int) -> np.ndarray:
            h_c = np.array([rows[q][sel[q]] for q in range(n_blocks)])
            out = np.empty(num_draws)
            for i in range(num_draws):
                h_c[p] = rows[p][i]
                s2 = np.linalg.svd(h_c, compute_uv=False) ** 2
                denom = math.sqrt(float(np.sum(s2 * s2)))
                out[i] = float(np.sum(s2)) / denom if denom > 0.0 else 0.0
            return out
    else:
        # SDR-objective scores decompose additively over blocks
        tr_tab = np.empty((n_blocks, num_draws))
        n2_tab = np.empty((n_blocks, num_draws))
        for p, cand in enumerate(candidates):
            cpp_q = prob._cpp[p] @ cand
            tr_tab[p] = np.sum(cand.conj() * cpp_q, axis=0).real
            d_q = prob.d_apply(p, cand)
            n2_tab[p] = prob.block_sizes[p] * np.sum(cand.conj() * d_q, axis=0).real

        def score_of(sel: list[int]) -> float:
            tr = float(sum(tr_tab[p, sel[p]] for p in range(n_blocks)))
            n2 = float(sum(n2_tab[p, sel[p]] for p in range(n_blocks)))
            return tr / math.sqrt(n2) if n2 > 0.0 else 0.0

        def block_scores(sel: list[int], p: int) -> np.ndarray:
            tr_rest = float(sum(tr_tab[q, sel[q]] for q in range(n_blocks) if q != p))
            n2_rest = float(sum(n2_tab[q, sel[q]] for q in range(n_blocks) if q != p))
            n2 = n2_rest + n2_tab[p]
            with np.errstate(divide="ignore", invalid="ignore"):
                out = np.where(n2 > 0.0, (tr_rest + tr_tab[p]) / np.sqrt(n2), 0.0)
            return out

    joint = np.array([score_of([i] * n_blocks) for i in range(num_draws)])
    best_idx = int(np.argmax(joint))
    selection = [best_idx] * n_blocks
    best_score = float(joint[best_idx])
    for _ in range(4):
        improved = False
        for p in range(n_blocks):
            scores = block_scores(selection, p)
            i_best = int(np.argmax(scores))
            if scores[i_best] > best_score + 1e-15:
                selection[p] = i_best
                best_score = float(scores[i_best])
                improved = True
        if not improved:
            break

    n_r = prob.block_sizes[0]
    phases = np.zeros((prob.k_slots, prob.n_rx, n_r))
    for p, cand in enumerate(candidates):
        k, n = divmod(p, prob.n_rx)
        phases[k, n, :] = np.mod(np.angle(cand[:, selection[p]]), _TWO_PI)
    achieved = best_score ** 2 if best_score > 0.0 else 0.0
    return phases, float(achieved)


def quantize_phases(phases: np.ndarray, bits: int) -> np.ndarray:
    """Snap each phase to the nearest of the 2^bits levels k*pi/2^(bits-1).

    Distance is circular; exact ties resolve to the smaller phase value.
    """
    if bits < 1:
        raise ValueError("bits must be at least 1")
    levels = 1 << bits
    step = _TWO_PI / levels
    wrapped = np.mod(phases, _TWO_PI)
    idx_f = wrapped / step
    lo = np.floor(idx_f)
    frac = idx_f - lo
    lo_phase = np.mod(lo, levels) * step
    hi_phase = np.mod(lo + 1, levels) * step
    pick_hi = frac > 0.5
    tie = frac == 0.5
    out = np.where(pick_hi, hi_phase, lo_phase)
    out = np.where(tie, np.minimum(lo_phase, hi_phase), out)
    return out
