"""Synthetic stationary sources and their exact quantized block laws.

Two kinds are supported:

* ``sparse-iid``: ``X_i ~ (1 - p) delta_0 + p Unif[lo, hi)``.
* ``finite-markov``: a stationary chain on finitely many states, each of
  which must sit on the b-bit grid so quantization leaves it unchanged.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from .empirical import MAX_BLOCKS, TrueBlockDistribution
from .errors import ConfigError, DomainError, TooLargeError
from .quantization import QuantSpec, build_alphabet, quantize_scalar

SPARSE_IID = "sparse-iid"
FINITE_MARKOV = "finite-markov"


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for every seeded draw in the package."""
    return np.random.Generator(np.random.Philox(int(seed)))


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Solve ``pi P = pi`` with ``sum(pi) = 1``."""
    P = np.asarray(transition, dtype=float)
    s = P.shape[0]
    system = np.vstack([P.T - np.eye(s), np.ones(s)])
    rhs = np.zeros(s + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


@dataclass(frozen=True, eq=False)
class SourceModel:
    kind: str
    p: float = 0.0
    lo: float = 0.0
    hi: float = 1.0
    states: np.ndarray | None = None
    transition: np.ndarray | None = None
    initial: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind == SPARSE_IID:
            if not 0.0 <= self.p <= 1.0:
                raise ConfigError(f"spike probability must be in [0, 1], got {self.p}")
            if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
                raise ConfigError("continuous part needs a finite interval lo < hi")
        elif self.kind == FINITE_MARKOV:
            if self.states is None or self.transition is None:
                raise ConfigError("finite-markov needs states and a transition matrix")
            states = np.asarray(self.states, dtype=float).reshape(-1)
            P = np.asarray(self.transition, dtype=float)
            if P.shape != (states.size, states.size):
                raise ConfigError("transition matrix must be square over the states")
            if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1) > 1e-12):
                raise ConfigError("transition rows must be probability vectors")
            if np.unique(states).size != states.size:
                raise ConfigError("states must be distinct")
            object.__setattr__(self, "states", states)
            object.__setattr__(self, "transition", P)
            object.__setattr__(self, "initial", stationary_distribution(P))
        else:
            raise ConfigError(f"unknown source kind {self.kind!r}")

    @classmethod
    def sparse_iid(cls, p: float, lo: float = 0.0, hi: float = 1.0) -> "SourceModel":
        return cls(SPARSE_IID, p=p, lo=lo, hi=hi)

    @classmethod
    def markov(cls, states, transition) -> "SourceModel":
        return cls(FINITE_MARKOV, states=states, transition=transition)

    @property
    def is_iid(self) -> bool:
        return self.kind == SPARSE_IID

    def support(self) -> tuple[float, float]:
        """Smallest interval ``[lo, hi]`` holding every draw."""
        if self.kind == SPARSE_IID:
            return min(0.0, self.lo), max(0.0, self.hi)
        return float(self.states.min()), float(self.states.max())


def sample_source(model: SourceModel, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` consecutive samples; deterministic given ``seed``."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    rng = make_rng(seed)
    if model.kind == SPARSE_IID:
        spikes = rng.random(n) < model.p
        cont = rng.uniform(model.lo, model.hi, size=n)
        return np.where(spikes, cont, 0.0)

    u = rng.random(n).tolist()
    rows = [list(np.cumsum(r)) for r in model.transition]
    init = list(np.cumsum(model.initial))
    last = model.states.size - 1
    path = np.empty(n, dtype=np.int64)
    state = min(bisect.bisect_right(init, u[0]), last)
    path[0] = state
    for i in range(1, n):
        state = min(bisect.bisect_right(rows[state], u[i]), last)
        path[i] = state
    return model.states[path]


def _symbol_law(model: SourceModel, spec: QuantSpec, alphabet: np.ndarray) -> np.ndarray:
    """``P([X]_b = a)`` for each grid point of a sparse-iid source."""
    step = spec.step
    width = model.hi - model.lo
    overlap = np.clip(np.minimum(alphabet + step, model.hi) - np.maximum(alphabet, model.lo), 0.0, None)
    law = model.p * overlap / width
    zero = np.flatnonzero(alphabet == 0.0)
    if zero.size != 1:
        raise DomainError("0 must lie in the quantized alphabet")
    law[zero[0]] += 1.0 - model.p
    return law


def _check_in_alphabet(values, alphabet, spec):
    for v in np.atleast_1d(values):
        if quantize_scalar(v, spec.b) != v:
            raise ConfigError(f"state {v} is not on the {spec.b}-bit grid")
        if not np.any(alphabet == v):
            raise DomainError(f"state {v} lies outside the quantized alphabet")


def true_block_distribution(model: SourceModel, spec: QuantSpec, order: int) -> TrueBlockDistribution:
    """Exact law of ``[X^order]_b`` over ``build_alphabet(spec)``."""
    if order < 1:
        raise ConfigError("order must be >= 1")
    alphabet = build_alphabet(spec)
    size = alphabet.size
    if size ** order > MAX_BLOCKS:
        raise TooLargeError(f"{size}^{order} blocks exceeds the enumeration guard of 2^24")

    if model.kind == SPARSE_IID:
        lo, hi = model.support()
        if not (spec.contains(lo) and (spec.contains(hi) or (not spec.closed and hi == spec.hi))):
            raise DomainError("source support is not inside the quantization interval")
        law = _symbol_law(model, spec, alphabet)
        probs = law
        for _ in range(order - 1):
            probs = np.multiply.outer(probs, law)
    else:
        _check_in_alphabet(model.states, alphabet, spec)
        pos = np.searchsorted(alphabet, model.states)
        init = np.zeros(size)
        init[pos] = model.initial
        T = np.zeros((size, size))
        T[np.ix_(pos, pos)] = model.transition
        probs = init
        for _ in range(order - 1):
            probs = probs[..., :, None] * T
    probs = probs / probs.sum()
    return TrueBlockDistribution(order, alphabet, probs)


def block_entropy(dist: TrueBlockDistribution) -> float:
    p = dist.probs[dist.probs > 0]
    return float(-np.sum(p * np.log2(p)))


@dataclass(frozen=True)
class IdEstimate:
    k: int
    b_values: tuple[int, ...]
    ratios: tuple[float, ...]
    extrapolated: float


def quantized_conditional_entropy(model: SourceModel, spec: QuantSpec, k: int) -> float:
    """``H([X_{k+1}]_b | [X^k]_b)`` from the exact block law."""
    if k < 0:
        raise ConfigError("k must be >= 0")
    if model.is_iid or k == 0:
        return block_entropy(true_block_distribution(model, spec, 1))
    upper = block_entropy(true_block_distribution(model, spec, k + 1))
    lower = block_entropy(true_block_distribution(model, spec, k))
    return upper - lower


def estimate_information_dimension(model: SourceModel, k: int, b_values, interval=None) -> IdEstimate:
    """Per-b ratios ``H([X_{k+1}]_b | [X^k]_b) / b``.

    ``extrapolated`` is the ratio at the largest ``b``; no limit is fitted.
    """
    b_values = tuple(int(b) for b in b_values)
    if not b_values:
        raise ConfigError("need at least one b")
    lo, hi = interval if interval is not None else model.support()
    closed = not (model.is_iid and hi == model.hi)
    ratios = []
    for b in b_values:
        spec = QuantSpec(b, lo, hi, closed=closed)
        ratios.append(quantized_conditional_entropy(model, spec, k) / b)
    return IdEstimate(k, b_values, tuple(ratios), ratios[b_values.index(max(b_values))])


def check_qmap_mass_condition(dist: TrueBlockDistribution, f: float) -> bool:
    """True iff every block of positive mass has mass >= ``f |X_b|^-(k+1)``."""
    threshold = f * float(dist.size) ** (-dist.order)
    mass = dist.probs[dist.probs > 0]
    return bool(np.all(mass >= threshold * (1 - 1e-12)))
