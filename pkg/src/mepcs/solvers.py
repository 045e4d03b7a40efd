"""Entropy-pursuit objectives and their minimization over ``X_b^n``.

Two objectives share the residual term ``(lam / n^2) ||A u - y||^2``:

* LMEP: structure term is the conditional empirical entropy ``H_k(u)``.
* AMEP: structure term is the linear functional ``sum_a w[a] p_hat(a|u)``;
  with Bayesian weights this is Q-MAP.

``solve_exhaustive`` is exact (and the oracle for everything else);
``solve_anneal`` is a Metropolis annealer for sizes beyond enumeration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import _anneal_kernel as kernel
from .empirical import (
    block_codes,
    conditional_empirical_entropy,
    empirical_distribution,
)
from .errors import InvalidInputError, ShapeError, TooLargeError
from .quantization import QuantizedSequence, QuantSpec, build_alphabet, quantize_sequence
from .sensing import SensingSystem, residual_norm_sq
from .weights import WeightVector, linear_structure, perturb_weights, weights_from_empirical

LMEP = "LMEP"
AMEP = "AMEP"
EXHAUSTIVE_GUARD = 2 ** 24
TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CostSpec:
    """Everything needed to evaluate one objective."""

    mode: str
    k: int
    quant: QuantSpec
    sensing: SensingSystem
    y: np.ndarray
    weights: WeightVector | None = None

    def __post_init__(self):
        if self.mode not in (LMEP, AMEP):
            raise InvalidInputError(f"mode must be LMEP or AMEP, got {self.mode!r}")
        if self.k < 0:
            raise InvalidInputError("k must be >= 0")
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if y.size != self.sensing.m:
            raise ShapeError(f"y has length {y.size}, A has {self.sensing.m} rows")
        if self.sensing.n <= self.k + 1:
            raise ShapeError("need n > k + 1")
        object.__setattr__(self, "y", y)
        if self.mode == AMEP:
            w = self.weights
            if w is None:
                raise InvalidInputError("AMEP needs a weight vector")
            if w.order != self.k + 1 or not np.array_equal(w.alphabet, build_alphabet(self.quant)):
                raise ShapeError("weights must be indexed by (k+1)-blocks over the solver alphabet")

    @property
    def n(self) -> int:
        return self.sensing.n

    @property
    def lam(self) -> float:
        return self.sensing.lam

    @property
    def scale(self) -> float:
        return self.sensing.lam / self.n ** 2

    @property
    def alphabet(self) -> np.ndarray:
        return build_alphabet(self.quant)

    def with_weights(self, weights: WeightVector) -> "CostSpec":
        return replace(self, mode=AMEP, weights=weights)

    def as_lmep(self) -> "CostSpec":
        return replace(self, mode=LMEP, weights=None)


def _as_sequence(u, spec: CostSpec) -> QuantizedSequence:
    if isinstance(u, QuantizedSequence):
        if u.spec != spec.quant:
            raise ShapeError("sequence was quantized under a different QuantSpec")
        seq = u
    else:
        seq = QuantizedSequence(np.asarray(u, dtype=float), spec.quant)
    if seq.n != spec.n:
        raise ShapeError(f"sequence has length {seq.n}, expected {spec.n}")
    return seq


def residual_term(u, spec: CostSpec) -> float:
    seq = _as_sequence(u, spec)
    return spec.scale * residual_norm_sq(spec.sensing.A, seq.values, spec.y)


def entropy_term(u, spec: CostSpec) -> float:
    seq = _as_sequence(u, spec)
    return conditional_empirical_entropy(empirical_distribution(seq, spec.k + 1))


def weighted_term(u, spec: CostSpec) -> float:
    seq = _as_sequence(u, spec)
    if spec.weights is None:
        raise InvalidInputError("no weights attached to this cost")
    return linear_structure(spec.weights, empirical_distribution(seq, spec.k + 1))


def lmep_cost(u, spec: CostSpec) -> float:
    """``H_k(u) + (lam / n^2) ||A u - y||^2``; weights are ignored."""
    return entropy_term(u, spec) + residual_term(u, spec)


def amep_cost(u, spec: CostSpec) -> float:
    """``sum_a w[a] p_hat_{k+1}(a|u) + (lam / n^2) ||A u - y||^2``."""
    return weighted_term(u, spec) + residual_term(u, spec)


def structure_term(u, spec: CostSpec) -> float:
    return entropy_term(u, spec) if spec.mode == LMEP else weighted_term(u, spec)


def cost(u, spec: CostSpec) -> float:
    return lmep_cost(u, spec) if spec.mode == LMEP else amep_cost(u, spec)


@dataclass
class RecoveryResult:
    xhat: QuantizedSequence
    cost: float
    structure_term: float
    residual_term: float
    trace: list = field(default_factory=list)
    seed: int | None = None
    solver: str = ""

    @classmethod
    def evaluate(cls, seq: QuantizedSequence, spec: CostSpec, **kw) -> "RecoveryResult":
        s = structure_term(seq, spec)
        r = residual_term(seq, spec)
        return cls(seq, s + r, s, r, **kw)


# exhaustive search


def _candidate_indices(start: int, stop: int, n: int, size: int) -> np.ndarray:
    """Rows are candidates ``start .. stop-1`` in lexicographic order."""
    c = np.arange(start, stop, dtype=np.int64)
    out = np.empty((c.size, n), dtype=np.int64)
    for j in range(n - 1, -1, -1):
        out[:, j] = c % size
        c //= size
    return out


def _xlogx(c):
    c = np.asarray(c, dtype=float)
    out = np.zeros_like(c)
    pos = c > 0
    out[pos] = c[pos] * np.log2(c[pos])
    return out


def batch_costs(idx: np.ndarray, spec: CostSpec) -> tuple[np.ndarray, np.ndarray]:
    """(structure, residual) terms for every row of an index matrix."""
    alphabet = spec.alphabet
    size = alphabet.size
    order = spec.k + 1
    codes = block_codes(idx, order, size)
    n_windows = codes.shape[1]
    if spec.mode == AMEP:
        structure = spec.weights.w.reshape(-1)[codes].sum(axis=1) / n_windows
    else:
        n_blocks = size ** order
        rows = codes.shape[0]
        flat = codes + (np.arange(rows, dtype=np.int64) * n_blocks)[:, None]
        counts = np.bincount(flat.ravel(), minlength=rows * n_blocks).reshape(rows, -1)
        ctx = counts.reshape(rows, -1, size).sum(axis=2)
        structure = (_xlogx(ctx).sum(axis=1) - _xlogx(counts).sum(axis=1)) / n_windows
    r = alphabet[idx] @ spec.sensing.A.T - spec.y
    residual = spec.scale * np.einsum("ij,ij->i", r, r)
    return structure, residual


def solve_exhaustive(spec: CostSpec, chunk: int = 1 << 14) -> RecoveryResult:
    """Global minimizer over ``X_b^n`` by enumeration.

    Costs within a relative ``1e-12`` of the minimum count as ties; the
    lexicographically smallest tied sequence is returned.
    """
    size = spec.alphabet.size
    n = spec.n
    total = size ** n
    if total > EXHAUSTIVE_GUARD:
        raise TooLargeError(f"|X_b|^n = {size}^{n} exceeds the exhaustive guard of 2^24")
    best_cost = math.inf
    best_index = -1
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        idx = _candidate_indices(start, stop, n, size)
        s, r = batch_costs(idx, spec)
        costs = s + r
        m = float(costs.min())
        if m < best_cost - TIE_RTOL * max(1.0, abs(best_cost if math.isfinite(best_cost) else m)):
            tol = TIE_RTOL * max(1.0, abs(m))
            best_index = start + int(np.flatnonzero(costs <= m + tol)[0])
            best_cost = m
    seq = QuantizedSequence.from_indices(_candidate_indices(best_index, best_index + 1, n, size)[0], spec.quant)
    return RecoveryResult.evaluate(seq, spec, solver="exhaustive")


# annealing


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric cooling from ``t0`` to ``t_end`` bits over ``sweeps`` sweeps
    of ``n`` single-coordinate proposals each."""

    t0: float = 1.0
    t_end: float = 1e-3
    sweeps: int = 200
    restarts: int = 8
    init: str = "random"
    log_moves: bool = False

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise InvalidInputError("sweeps and restarts must be >= 1")
        if self.t0 < 0 or self.t_end < 0:
            raise InvalidInputError("temperatures must be nonnegative")
        if self.init not in ("random", "zeros"):
            raise InvalidInputError(f"unknown init {self.init!r}")

    def temperatures(self) -> np.ndarray:
        if self.sweeps == 1:
            return np.array([self.t0])
        if self.t0 == 0 or self.t_end == 0:
            return np.linspace(self.t0, self.t_end, self.sweeps)
        return np.geomspace(self.t0, self.t_end, self.sweeps)


def _restart_seeds(seed: int, restarts: int) -> list[np.random.SeedSequence]:
    return np.random.SeedSequence(int(seed)).spawn(restarts)


def _initial_state(schedule: AnnealSchedule, rng, n, size, alphabet) -> np.ndarray:
    if schedule.init == "random":
        return rng.integers(0, size, size=n)
    return np.full(n, int(np.argmin(np.abs(alphabet))), dtype=np.int64)


def _anneal_once(spec: CostSpec, schedule: AnnealSchedule, ss, init_idx=None, chunk_sweeps: int = 64):
    alphabet = spec.alphabet
    size = alphabet.size
    n, m = spec.n, spec.sensing.m
    order = spec.k + 1
    n_windows = n - order
    rng = np.random.Generator(np.random.Philox(ss))
    if init_idx is None:
        idx = _initial_state(schedule, rng, n, size, alphabet).astype(np.int64)
    else:
        idx = np.array(init_idx, dtype=np.int64)
    At = np.ascontiguousarray(spec.sensing.A.T)
    col_sq = np.einsum("ij,ij->i", At, At)
    wflat = spec.weights.w.reshape(-1).copy() if spec.mode == AMEP else np.zeros(1)
    mode = kernel.AMEP if spec.mode == AMEP else kernel.LMEP

    counts = np.zeros(size ** order, dtype=np.int64)
    kernel.fill_counts(idx, order, size, n_windows, counts)
    r = np.empty(m)
    kernel.fill_residual(idx, alphabet, At, spec.y, r)
    start = kernel.structure_value(mode, counts, wflat, size, n_windows) + spec.scale * float(r @ r)
    scalars = np.array([start, start, 0.0])
    best_idx = idx.copy()

    temps = schedule.temperatures()
    trace = np.zeros((temps.size, 4))
    moves = []
    for s0 in range(0, temps.size, chunk_sweeps):
        t_chunk = temps[s0:s0 + chunk_sweeps]
        n_prop = t_chunk.size * n
        coords = rng.integers(0, n, size=n_prop)
        proposals = rng.integers(0, size, size=n_prop)
        uniforms = rng.random(n_prop)
        move_log = np.zeros((n_prop if schedule.log_moves else 1, 4))
        scalars[2] = 0
        kernel.run_chunk(mode, idx, counts, r, best_idx, scalars, alphabet, At, col_sq, spec.y, wflat,
                         order, size, n_windows, spec.scale, t_chunk, coords, proposals, uniforms,
                         trace[s0:s0 + t_chunk.size], move_log, schedule.log_moves)
        if schedule.log_moves:
            logged = move_log[: int(scalars[2])].copy()
            logged[:, 0] += s0 * n
            moves.append(logged)
    seq = QuantizedSequence.from_indices(best_idx, spec.quant)
    return seq, trace, (np.vstack(moves) if moves else None)


def solve_anneal(spec: CostSpec, schedule: AnnealSchedule | None = None, seed: int = 0,
                 init: QuantizedSequence | None = None) -> RecoveryResult:
    """Metropolis annealing over single-coordinate changes.

    Each proposal picks a uniform coordinate and a uniform alphabet value;
    its cost change touches at most ``k + 1`` block counts and one column of
    ``A``. Every restart draws from its own child seed, and the best state
    seen over all restarts is returned (recomputed from scratch).
    ``init`` overrides the starting state of every restart.
    """
    schedule = schedule or AnnealSchedule()
    init_idx = None if init is None else _as_sequence(init, spec).indices
    best = None
    for r, ss in enumerate(_restart_seeds(seed, schedule.restarts)):
        seq, trace, moves = _anneal_once(spec, schedule, ss, init_idx)
        res = RecoveryResult.evaluate(seq, spec, seed=seed, solver="anneal")
        res.trace = [
            {"restart": r, "sweep": i, "temperature": t, "current": c, "best": b, "accepted": int(a)}
            for i, (t, c, b, a) in enumerate(trace)
        ]
        if moves is not None:
            res.trace.extend(
                {"restart": r, "proposal": int(p), "coord": int(i), "value": float(spec.alphabet[int(v)]), "current": c}
                for p, i, v, c in moves
            )
        if best is None or res.cost < best.cost or (
            res.cost == best.cost and tuple(res.xhat.indices) < tuple(best.xhat.indices)
        ):
            trace_all = (best.trace if best else []) + res.trace
            best = res
            best.trace = trace_all
        else:
            best.trace.extend(res.trace)
    return best


# verifiers


def normalized_error(x, xhat) -> float:
    """``||x - xhat||_2 / sqrt(n)``."""
    x = np.asarray(x.values if isinstance(x, QuantizedSequence) else x, dtype=float).reshape(-1)
    xhat = np.asarray(xhat.values if isinstance(xhat, QuantizedSequence) else xhat, dtype=float).reshape(-1)
    if x.size != xhat.size:
        raise ShapeError("sequences differ in length")
    return float(np.linalg.norm(x - xhat) / math.sqrt(x.size))


def _entropy_power(seq: QuantizedSequence, order: int) -> Fraction:
    """``2 ** (W * H_k(seq))`` as an exact rational, W the window count."""
    counts = empirical_distribution(seq, order).counts
    ctx = counts.sum(axis=-1)
    num, den = 1, 1
    for c in ctx.ravel().tolist():
        num *= c ** c
    for c in counts.ravel().tolist():
        den *= c ** c
    return Fraction(num, den)


@dataclass
class EquivalenceReport:
    passed: bool
    lmep: RecoveryResult
    amep: RecoveryResult
    lmep_optimum: float
    amep_lmep_cost: float
    difference: float
    structure_exact_equal: bool
    residual_difference: float
    tol: float


def check_minimizer_equivalence(spec: CostSpec, tol: float = 1e-10) -> EquivalenceReport:
    """Solve LMEP exactly, derive weights from its minimizer, solve AMEP
    exactly with those weights, and confirm the AMEP minimizer attains the
    LMEP optimum."""
    lspec = spec.as_lmep()
    u = solve_exhaustive(lspec)
    w = weights_from_empirical(empirical_distribution(u.xhat, spec.k + 1))
    v = solve_exhaustive(lspec.with_weights(w))
    v_cost = lmep_cost(v.xhat, lspec)
    order = spec.k + 1
    exact = _entropy_power(u.xhat, order) == _entropy_power(v.xhat, order)
    res_diff = residual_term(v.xhat, lspec) - u.residual_term
    diff = v_cost - u.cost
    return EquivalenceReport(
        passed=abs(diff) <= tol,
        lmep=u,
        amep=v,
        lmep_optimum=u.cost,
        amep_lmep_cost=v_cost,
        difference=diff,
        structure_exact_equal=exact,
        residual_difference=res_diff,
        tol=tol,
    )


@dataclass
class InputWeightReport:
    passed: bool
    amep_cost_at_xhat: float
    lmep_cost_at_xhat: float
    lmep_cost_at_input: float
    xhat: QuantizedSequence


def check_input_weight_chain(spec: CostSpec, x, tol: float = 1e-10) -> InputWeightReport:
    """With weights from the empirical law of ``[x]_b``, the AMEP minimizer
    satisfies ``H_k(xhat) + R(xhat) <= c_w(xhat) + R(xhat) <= H_k([x]_b) + R([x]_b)``."""
    lspec = spec.as_lmep()
    xq = quantize_sequence(x, spec.quant)
    w = weights_from_empirical(empirical_distribution(xq, spec.k + 1))
    aspec = lspec.with_weights(w)
    xhat = solve_exhaustive(aspec)
    a_cost = xhat.cost
    l_cost = lmep_cost(xhat.xhat, lspec)
    ref = lmep_cost(xq, lspec)
    passed = l_cost <= a_cost + tol and a_cost <= ref + tol
    return InputWeightReport(passed, a_cost, l_cost, ref, xhat.xhat)


@dataclass
class SandwichReport:
    passed: bool
    f_at_minimizer: float
    f_at_perturbed_minimizer: float
    eps: float
    linf: float
    xhat: QuantizedSequence
    xtilde: QuantizedSequence


def check_sandwich_lemma(spec: CostSpec, eps: float, seed: int = 0,
                         w_hat: WeightVector | None = None, tol: float = 1e-12) -> SandwichReport:
    """Minimize ``f`` (weights ``w``) and ``f_hat`` (weights ``w_hat``) and
    check ``f(xhat) <= f(xtilde) <= f(xhat) + 2 eps``.

    ``w_hat`` defaults to ``w`` plus bounded uniform noise of sup-norm at
    most ``eps``.
    """
    if spec.mode != AMEP:
        raise InvalidInputError("sandwich check needs an AMEP cost")
    w = spec.weights
    if w_hat is None:
        w_hat = perturb_weights(w, eps, b=1, seed=seed)
    linf = float(np.max(np.abs(w.w - w_hat.w)))
    if linf > eps * (1 + 1e-12):
        raise InvalidInputError(f"||w - w_hat||_inf = {linf} exceeds eps = {eps}")
    xhat = solve_exhaustive(spec)
    xtilde = solve_exhaustive(spec.with_weights(w_hat))
    f_hat_min = xhat.cost
    f_tilde = amep_cost(xtilde.xhat, spec)
    passed = f_hat_min <= f_tilde + tol and f_tilde <= f_hat_min + 2 * eps + tol
    return SandwichReport(passed, f_hat_min, f_tilde, eps, linf, xhat.xhat, xtilde.xhat)
