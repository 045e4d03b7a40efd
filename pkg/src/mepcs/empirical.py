"""Block statistics of finite-alphabet sequences.

Distributions over blocks of length ``order`` are stored as dense arrays of
shape ``(|alphabet|,) * order``; a block ``(a_1, ..., a_order)`` lives at the
index tuple of its symbols. Empirical distributions keep exact integer counts.

All logarithms are base 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientDataError, InvalidInputError, ShapeError
from .quantization import QuantizedSequence

MAX_BLOCKS = 2 ** 24


@dataclass(frozen=True, eq=False)
class BlockDistribution:
    """Law of length-``order`` blocks over ``alphabet``."""

    order: int
    alphabet: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        alphabet = np.asarray(self.alphabet)
        probs = np.asarray(self.probs, dtype=float)
        if self.order < 1:
            raise InvalidInputError("order must be >= 1")
        if probs.shape != (alphabet.size,) * self.order:
            raise ShapeError(f"probs shape {probs.shape} does not match alphabet/order")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidInputError("probabilities must be finite and nonnegative")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "probs", probs)

    @property
    def size(self) -> int:
        return self.alphabet.size

    def context_probs(self) -> np.ndarray:
        """Marginal of the first ``order - 1`` symbols, broadcastable against
        ``probs``."""
        return self.probs.sum(axis=-1, keepdims=True)

    def _log_ratio(self):
        """(mass, log2(context mass / block mass)) with zeros off-support."""
        p = self.probs
        ctx = np.broadcast_to(self.context_probs(), p.shape)
        lr = np.zeros_like(p)
        pos = p > 0
        lr[pos] = np.log2(ctx[pos] / p[pos])
        return p, lr, pos

    def as_dict(self) -> dict:
        out = {}
        for idx in zip(*np.nonzero(self.probs)):
            out[tuple(self.alphabet[list(idx)].tolist())] = float(self.probs[idx])
        return out


@dataclass(frozen=True, eq=False)
class TrueBlockDistribution(BlockDistribution):
    """Exact block law of a source model."""

    def __post_init__(self):
        super().__post_init__()
        if abs(self.probs.sum() - 1.0) > 1e-9:
            raise InvalidInputError(f"block law sums to {self.probs.sum()}, not 1")


class EmpiricalDistribution(BlockDistribution):
    """Block frequencies stored as integer counts over ``total`` windows."""

    def __init__(self, order: int, alphabet, counts, b: int | None = None):
        counts = np.asarray(counts)
        if not np.issubdtype(counts.dtype, np.integer):
            raise InvalidInputError("counts must be integers")
        if np.any(counts < 0):
            raise InvalidInputError("counts must be nonnegative")
        total = int(counts.sum())
        if total <= 0:
            raise InsufficientDataError("empirical distribution needs at least one window")
        counts = counts.astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "b", b)
        super().__init__(order, alphabet, counts / total)

    def context_probs(self) -> np.ndarray:
        return self.counts.sum(axis=-1, keepdims=True) / self.total

    def _log_ratio(self):
        c = self.counts
        ctx = np.broadcast_to(c.sum(axis=-1, keepdims=True), c.shape)
        lr = np.zeros(c.shape)
        pos = c > 0
        # ratio of integer counts, so the same float feeds entropy and weights
        lr[pos] = np.log2(ctx[pos] / c[pos])
        return self.probs, lr, pos

    def __repr__(self):
        return f"EmpiricalDistribution(order={self.order}, |alphabet|={self.size}, total={self.total})"


def _symbol_indices(u, alphabet):
    """Map a sequence onto alphabet indices. Returns (indices, alphabet, b)."""
    if isinstance(u, QuantizedSequence):
        if alphabet is not None:
            raise InvalidInputError("alphabet is implied by a QuantizedSequence")
        return np.asarray(u.indices), u.alphabet, u.spec.b
    u = np.asarray(u)
    if alphabet is None:
        alphabet = np.unique(u)
    alphabet = np.asarray(alphabet)
    if np.any(alphabet[1:] <= alphabet[:-1]):
        raise InvalidInputError("alphabet must be sorted without duplicates")
    idx = np.searchsorted(alphabet, u)
    if u.size and (idx.max() >= alphabet.size or np.any(alphabet[np.minimum(idx, alphabet.size - 1)] != u)):
        raise InvalidInputError("sequence contains symbols outside the alphabet")
    return idx.astype(np.int64), alphabet, None


def block_codes(indices: np.ndarray, order: int, size: int) -> np.ndarray:
    """Flat block code of every window ``u[s : s + order]`` for
    ``s = 0 .. n - order - 1``.

    The final symbol never ends a window; this is the counting convention
    used for all empirical statistics here.
    """
    n = indices.shape[-1]
    n_windows = n - order
    codes = np.zeros(indices.shape[:-1] + (n_windows,), dtype=np.int64)
    for j in range(order):
        codes = codes * size + indices[..., j:j + n_windows]
    return codes


def empirical_distribution(u, order: int, alphabet=None) -> EmpiricalDistribution:
    """Order-``order`` empirical block distribution of ``u``.

    Counts windows ``u[i-order : i]`` for ``i = order+1 .. n`` (1-based), so
    there are ``n - order`` windows and ``u_n`` is never counted.

    Parameters
    ----------
    u : QuantizedSequence or sequence of symbols
    order : int
        Block length, at least 1.
    alphabet : optional
        Sorted symbol set for plain sequences; defaults to the symbols seen.
    """
    if order < 1:
        raise InvalidInputError("order must be >= 1")
    idx, alphabet, b = _symbol_indices(u, alphabet)
    n = idx.size
    if n <= order:
        raise InsufficientDataError(f"need n > order, got n={n}, order={order}")
    size = alphabet.size
    if size ** order > MAX_BLOCKS:
        raise InvalidInputError(f"{size}^{order} blocks exceeds the dense-table limit")
    codes = block_codes(idx, order, size)
    counts = np.bincount(codes, minlength=size ** order).reshape((size,) * order)
    return EmpiricalDistribution(order, alphabet, counts, b=b)


def marginalize(d: BlockDistribution, drop: str = "last") -> BlockDistribution:
    """Sum out the last (or first) symbol of every block."""
    if d.order < 2:
        raise InvalidInputError("cannot marginalize an order-1 distribution")
    axis = {"last": -1, "first": 0}[drop]
    if isinstance(d, EmpiricalDistribution):
        return EmpiricalDistribution(d.order - 1, d.alphabet, d.counts.sum(axis=axis), b=d.b)
    return type(d)(d.order - 1, d.alphabet, d.probs.sum(axis=axis))


def conditional_empirical_entropy(d: BlockDistribution) -> float:
    """``H(U_{k+1} | U^k)`` in bits for ``U^{k+1} ~ d`` (``d`` of order k+1).

    The conditioning marginal is taken from ``d`` itself; for order 1 this is
    the plain entropy.
    """
    p, lr, _ = d._log_ratio()
    return float(np.sum(p * lr))


def _check_compatible(d1: BlockDistribution, d2: BlockDistribution):
    if d1.order != d2.order or not np.array_equal(d1.alphabet, d2.alphabet):
        raise ShapeError("distributions differ in order or alphabet")


def total_variation(d1: BlockDistribution, d2: BlockDistribution) -> tuple[float, float]:
    """Return ``(L1, TV)`` where ``TV = L1 / 2``."""
    _check_compatible(d1, d2)
    l1 = float(np.abs(d1.probs - d2.probs).sum())
    return l1, l1 / 2


def _conditionals(d: BlockDistribution):
    ctx = np.broadcast_to(d.context_probs(), d.probs.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.where(ctx > 0, d.probs / ctx, 0.0)
    return cond


def conditional_kl_decomposition(q2: BlockDistribution, q1: BlockDistribution) -> tuple[float, float]:
    """Split the conditional cross-entropy of ``q2`` against ``q1``.

    Returns ``(kl, h)`` with ``kl = sum_ctx q2(ctx) D(q2(.|ctx) || q1(.|ctx))``
    and ``h = H_k(q2)``, so that ``kl + h = -sum q2(a) log q1(a_last | ctx)``.
    ``kl`` is ``inf`` when ``q1`` gives zero conditional mass somewhere
    ``q2`` does not.
    """
    _check_compatible(q1, q2)
    h = conditional_empirical_entropy(q2)
    c2, c1 = _conditionals(q2), _conditionals(q1)
    pos = q2.probs > 0
    if np.any(c1[pos] <= 0):
        return math.inf, h
    kl = float(np.sum(q2.probs[pos] * np.log2(c2[pos] / c1[pos])))
    return max(kl, 0.0), h


def block_kl(p: BlockDistribution, q: BlockDistribution) -> float:
    """Full block divergence ``D(p || q)`` in bits; ``inf`` off support."""
    _check_compatible(p, q)
    pos = p.probs > 0
    if np.any(q.probs[pos] <= 0):
        return math.inf
    return float(np.sum(p.probs[pos] * np.log2(p.probs[pos] / q.probs[pos])))


def lz78_code_length(u, alphabet_size: int | None = None) -> int:
    """Bits used by an LZ78 encoding of ``u``.

    The j-th phrase costs ``ceil(log2 j)`` bits for the dictionary reference
    plus ``ceil(log2 |alphabet|)`` bits for the new symbol. A trailing phrase
    that repeats a dictionary entry is charged the same way.
    """
    if isinstance(u, QuantizedSequence):
        symbols = u.indices.tolist()
        if alphabet_size is None:
            alphabet_size = u.alphabet.size
    else:
        symbols = list(u)
        if alphabet_size is None:
            alphabet_size = len(set(symbols))
    if not symbols:
        raise InvalidInputError("LZ78 length needs n >= 1")
    symbol_bits = math.ceil(math.log2(alphabet_size)) if alphabet_size > 1 else 0

    dictionary = {(): 0}
    phrase = ()
    n_phrases = 0
    for s in symbols:
        phrase = phrase + (s,)
        if phrase not in dictionary:
            n_phrases += 1
            dictionary[phrase] = n_phrases
            phrase = ()
    if phrase:
        n_phrases += 1
    return sum(math.ceil(math.log2(j)) + symbol_bits for j in range(1, n_phrases + 1))


# two-column block tables


def _format_symbol(s) -> str:
    if isinstance(s, (float, np.floating)):
        return repr(float(s))
    return str(s)


def write_block_table(path, alphabet, values: np.ndarray, skip_zero: bool = False) -> None:
    """Write ``block<TAB>value`` lines; block symbols are comma-joined."""
    alphabet = np.asarray(alphabet)
    values = np.asarray(values, dtype=float)
    lines = ["# block\tvalue"]
    for idx in np.ndindex(values.shape):
        v = values[idx]
        if skip_zero and v == 0:
            continue
        block = ",".join(_format_symbol(alphabet[i]) for i in idx)
        lines.append(f"{block}\t{float(v)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_block_table(path) -> dict[tuple[float, ...], float]:
    table = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        block, value = line.split("\t")
        table[tuple(float(s) for s in block.split(","))] = float(value)
    return table


def table_to_array(table: dict, alphabet, order: int | None = None, fill: float = 0.0) -> np.ndarray:
    """Scatter a block table onto a dense array over ``alphabet``."""
    alphabet = np.asarray(alphabet, dtype=float)
    if order is None:
        orders = {len(k) for k in table}
        if len(orders) != 1:
            raise ShapeError("table blocks have inconsistent lengths")
        order = orders.pop()
    out = np.full((alphabet.size,) * order, fill)
    lookup = {float(a): i for i, a in enumerate(alphabet)}
    for block, v in table.items():
        if len(block) != order:
            raise ShapeError(f"block {block} has length {len(block)}, expected {order}")
        try:
            out[tuple(lookup[s] for s in block)] = v
        except KeyError as e:
            raise ShapeError(f"symbol {e.args[0]} not in alphabet") from None
    return out


def write_distribution(path, d: BlockDistribution) -> None:
    write_block_table(path, d.alphabet, d.probs)


def read_distribution(path, alphabet) -> TrueBlockDistribution:
    table = read_block_table(path)
    probs = table_to_array(table, alphabet)
    return TrueBlockDistribution(probs.ndim, np.asarray(alphabet, dtype=float), probs)
