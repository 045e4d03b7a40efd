"""Block weights for the linearized structure cost.

A weight vector assigns ``w[a^{k+1}]`` bits to every block of length
``k + 1``. The linear structure cost of a sequence is
``sum_a w[a] * p_hat_{k+1}(a)``. Three recipes are provided: from an
empirical distribution (reconstruction or quantized input), and from a
known block law (the Bayesian weights). Blocks whose conditional probability
is zero receive ``cap`` in place of an infinite weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .empirical import (
    BlockDistribution,
    EmpiricalDistribution,
    block_kl,
    conditional_kl_decomposition,
    marginalize,
    read_block_table,
    table_to_array,
    write_block_table,
)
from .errors import InvalidInputError, ShapeError
from .sources import make_rng


def default_cap(b: int | None, k: int) -> float:
    """``b (k + 1) + 32`` bits; exceeds any ``-log2`` conditional that an
    empirical distribution over fewer than 2^32 windows can produce."""
    return float((b or 0) * (k + 1) + 32)


@dataclass(frozen=True, eq=False)
class WeightVector:
    order: int
    alphabet: np.ndarray
    w: np.ndarray
    cap: float

    def __post_init__(self):
        alphabet = np.asarray(self.alphabet)
        w = np.array(self.w, dtype=float)
        if w.shape != (alphabet.size,) * self.order:
            raise ShapeError(f"weight shape {w.shape} does not match alphabet/order")
        if not (self.cap > 0 and math.isfinite(self.cap)):
            raise InvalidInputError("cap must be positive and finite")
        if not np.all(np.isfinite(w)) or np.any(w < 0) or np.any(w > self.cap):
            raise InvalidInputError("weights must lie in [0, cap]")
        w.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "w", w)

    @property
    def k(self) -> int:
        return self.order - 1

    def shifted(self, c: float) -> "WeightVector":
        """Add ``c`` to every weight; the cap grows with it."""
        return WeightVector(self.order, self.alphabet, self.w + c, self.cap + max(c, 0.0))


def _build(d: BlockDistribution, cap: float) -> WeightVector:
    _, lr, pos = d._log_ratio()
    w = np.full(d.probs.shape, float(cap))
    w[pos] = np.minimum(lr[pos], cap)
    return WeightVector(d.order, d.alphabet, w, float(cap))


def weights_from_empirical(d: EmpiricalDistribution, cap: float | None = None) -> WeightVector:
    """``w[a] = log2(p_hat_k(context) / p_hat_{k+1}(a))``.

    Serves both the reconstruction-based and the input-based recipes: pass
    the empirical distribution of whichever sequence the weights should be
    tuned to. Unseen blocks get ``cap``.
    """
    if cap is None:
        cap = default_cap(getattr(d, "b", None), d.order - 1)
    return _build(d, cap)


def weights_from_distribution(dist: BlockDistribution, cap: float | None = None, b: int | None = None) -> WeightVector:
    """Bayesian weights ``w[a] = -log2 P(a_{k+1} | a^k)`` from a block law."""
    if cap is None:
        cap = default_cap(b, dist.order - 1)
    return _build(dist, cap)


def linear_structure(wv: WeightVector, d: BlockDistribution) -> float:
    """``sum_a w[a] p(a)``.

    Terms are formed elementwise in the same layout as
    ``conditional_empirical_entropy`` so that feeding a distribution its own
    weights reproduces its entropy bit for bit.
    """
    if wv.order != d.order or not np.array_equal(wv.alphabet, d.alphabet):
        raise ShapeError("weights and distribution differ in order or alphabet")
    p = d.probs
    return float(np.sum(p * np.where(p > 0, wv.w, 0.0)))


def perturb_weights(wv: WeightVector, eps: float, b: int, seed: int) -> WeightVector:
    """Add i.i.d. Unif[-eps b, eps b] noise per block, clamped to [0, cap].

    Clamping only moves values toward the originals, so
    ``weight_linf_distance(out, wv, b) <= eps``.
    """
    if eps < 0:
        raise InvalidInputError("eps must be nonnegative")
    if eps == 0:
        return wv
    noise = make_rng(seed).uniform(-eps * b, eps * b, size=wv.w.shape)
    w = np.clip(wv.w + noise, 0.0, wv.cap)
    return WeightVector(wv.order, wv.alphabet, w, wv.cap)


def weight_linf_distance(w1: WeightVector, w2: WeightVector, b: int) -> float:
    """``(1/b) max_a |w1[a] - w2[a]|``."""
    if w1.w.shape != w2.w.shape or not np.array_equal(w1.alphabet, w2.alphabet):
        raise ShapeError("weight vectors are indexed by different blocks")
    return float(np.max(np.abs(w1.w - w2.w))) / b


@dataclass(frozen=True)
class KlGap:
    """Divergences of an empirical law from a model law, in bits per b."""

    block: float
    conditional: float
    context: float

    @property
    def infinite(self) -> bool:
        return math.isinf(self.block) or math.isinf(self.conditional)


def conditional_kl_weight_gap(p_hat: BlockDistribution, q: BlockDistribution, b: int) -> KlGap:
    """Divergence of ``p_hat`` from ``q``, each normalized by ``b``.

    ``block`` is ``D(p_hat_{k+1} || q_{k+1}) / b``; ``conditional`` is the
    context-averaged conditional divergence over ``b``; ``context`` is the
    divergence of the order-k marginals over ``b``. When all are finite,
    ``block = conditional + context``.
    """
    full = block_kl(p_hat, q)
    cond, _ = conditional_kl_decomposition(p_hat, q)
    if p_hat.order > 1:
        ctx = block_kl(marginalize(p_hat), marginalize(q))
    else:
        ctx = 0.0
    return KlGap(full / b, cond / b, ctx / b)


def write_weights(path, wv: WeightVector) -> None:
    write_block_table(path, wv.alphabet, wv.w)


def read_weights(path, alphabet, cap: float) -> WeightVector:
    """Load a weight table; blocks missing from the file get ``cap``."""
    w = table_to_array(read_block_table(path), alphabet, fill=cap)
    return WeightVector(w.ndim, np.asarray(alphabet, dtype=float), np.minimum(w, cap), cap)
