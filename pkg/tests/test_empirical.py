import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mepcs.empirical import (
    EmpiricalDistribution,
    TrueBlockDistribution,
    conditional_empirical_entropy,
    conditional_kl_decomposition,
    empirical_distribution,
    lz78_code_length,
    marginalize,
    read_distribution,
    total_variation,
    write_distribution,
)
from mepcs.errors import InsufficientDataError, InvalidInputError, ShapeError
from mepcs.quantization import QuantSpec, quantize_sequence
from mepcs.weights import weights_from_distribution

ALT = (0, 1, 0, 1, 0)


def rand_dist(rng, size, order, zeros=0.0):
    p = rng.random((size,) * order)
    if zeros:
        p[rng.random(p.shape) < zeros] = 0.0
        if p.sum() == 0:
            p.flat[0] = 1.0
    return TrueBlockDistribution(order, np.arange(size, dtype=float), p / p.sum())


def test_empirical_distribution_examples():
    d = empirical_distribution(ALT, 2)
    assert d.total == 3
    assert d.as_dict() == {(0, 1): 2 / 3, (1, 0): 1 / 3}

    d1 = empirical_distribution(ALT, 1)
    assert d1.counts.tolist() == [2, 2] and d1.total == 4

    const = empirical_distribution([7] * 10, 3)
    assert const.as_dict() == {(7, 7, 7): 1.0}


def test_empirical_distribution_window_oracle():
    rng = np.random.default_rng(3)
    u = rng.integers(0, 3, size=40)
    for order in (1, 2, 3):
        d = empirical_distribution(u, order, alphabet=[0, 1, 2])
        n = u.size
        expected = {}
        for i in range(order + 1, n + 1):  # 1-based, windows u_{i-order}..u_{i-1}
            block = tuple(u[i - order - 1:i - 1].tolist())
            expected[block] = expected.get(block, 0) + 1
        for block in itertools.product(range(3), repeat=order):
            assert d.counts[block] == expected.get(block, 0)
        assert d.total == n - order


def test_empirical_distribution_errors():
    with pytest.raises(InsufficientDataError):
        empirical_distribution([0, 1], 2)
    with pytest.raises(InvalidInputError):
        empirical_distribution([0, 1, 2], 1, alphabet=[0, 1])


def test_quantized_sequence_input_uses_full_alphabet():
    spec = QuantSpec(1, 0.0, 1.0)
    d = empirical_distribution(quantize_sequence([0.0, 0.7, 0.0, 0.7], spec), 1)
    assert d.alphabet.tolist() == [0.0, 0.5, 1.0]
    assert d.counts.tolist() == [2, 1, 0]
    assert d.b == 1


def test_marginalize_examples():
    pm = marginalize(empirical_distribution([4] * 5, 2))
    assert pm.as_dict() == {(4,): 1.0}
    m = marginalize(empirical_distribution(ALT, 2))
    assert m.as_dict() == {(0,): 2 / 3, (1,): 1 / 3}
    uni = TrueBlockDistribution(2, np.arange(3.0), np.full((3, 3), 1 / 9))
    assert np.allclose(marginalize(uni).probs, 1 / 3)
    with pytest.raises(InvalidInputError):
        marginalize(empirical_distribution(ALT, 1))


def test_marginalization_commutes():
    rng = np.random.default_rng(11)
    u = rng.integers(0, 3, size=200)
    d = empirical_distribution(u, 4, alphabet=[0, 1, 2])
    a = marginalize(marginalize(d, "last"), "first")
    b = marginalize(marginalize(d, "first"), "last")
    assert np.array_equal(a.counts, b.counts)


@pytest.mark.parametrize("n", [50, 500, 5000])
def test_marginal_vs_direct_differ_by_one_window(n):
    rng = np.random.default_rng(n)
    u = rng.integers(0, 2, size=n)
    k = 2
    via = marginalize(empirical_distribution(u, k + 1, alphabet=[0, 1]))
    direct = empirical_distribution(u, k, alphabet=[0, 1])
    l1, _ = total_variation(via, direct)
    assert l1 <= 2 / (n - k)


def test_normalization_exact():
    rng = np.random.default_rng(5)
    for _ in range(20):
        u = rng.integers(0, 4, size=rng.integers(10, 80))
        d = empirical_distribution(u, 2, alphabet=[0, 1, 2, 3])
        assert sum(Fraction(int(c), d.total) for c in d.counts.ravel()) == 1


def test_conditional_entropy_examples():
    assert conditional_empirical_entropy(empirical_distribution([2] * 9, 2)) == 0.0
    assert conditional_empirical_entropy(empirical_distribution(ALT, 2)) == 0.0
    u = np.random.default_rng(0).integers(0, 2, size=100_000)
    h = conditional_empirical_entropy(empirical_distribution(u, 2))
    assert abs(h - 1.0) < 0.02


@settings(max_examples=60)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4), st.integers(1, 3))
def test_entropy_range(seed, size, order):
    rng = np.random.default_rng(seed)
    u = rng.integers(0, size, size=rng.integers(order + 1, 60))
    d = empirical_distribution(u, order, alphabet=np.arange(size))
    h = conditional_empirical_entropy(d)
    assert -1e-12 <= h <= math.log2(size) + 1e-12


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3]), st.integers(1, 3))
def test_concavity_first_order_bound(seed, size, order):
    rng = np.random.default_rng(seed)
    p = rand_dist(rng, size, order, zeros=0.2)
    q = rand_dist(rng, size, order, zeros=0.2)
    w = weights_from_distribution(p, cap=64.0)
    bound = conditional_empirical_entropy(p) + float(np.sum(w.w * (q.probs - p.probs)))
    assert conditional_empirical_entropy(q) <= bound + 1e-9


def test_lz78_examples():
    assert lz78_code_length([3], alphabet_size=8) == 3
    assert lz78_code_length([0, 0, 0, 0], alphabet_size=2) == 6
    short = lz78_code_length([0] * 64, alphabet_size=2) / 64
    long = lz78_code_length([0] * 4096, alphabet_size=2) / 4096
    assert long < short


def lz78_oracle(symbols, alphabet_size):
    """String-based LZ78 parse: each phrase is the shortest prefix of the
    remaining input not yet in the dictionary."""
    text = [str(s) for s in symbols]
    seen = set()
    phrases = 0
    i = 0
    while i < len(text):
        j = i + 1
        while j <= len(text) and "|".join(text[i:j]) in seen:
            j += 1
        seen.add("|".join(text[i:j]))
        phrases += 1
        i = j
    sym = math.ceil(math.log2(alphabet_size)) if alphabet_size > 1 else 0
    return sum(math.ceil(math.log2(j)) + sym for j in range(1, phrases + 1))


@pytest.mark.parametrize("seed", range(10))
def test_lz78_against_oracle(seed):
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 3, size=rng.integers(1, 300)).tolist()
    assert lz78_code_length(u, 3) == lz78_oracle(u, 3)


def test_lz78_deterministic_on_quantized():
    spec = QuantSpec(2, 0.0, 1.0)
    q = quantize_sequence(np.linspace(0, 1, 50), spec)
    assert lz78_code_length(q) == lz78_code_length(q)
    assert lz78_code_length(q) == lz78_code_length(q.indices.tolist(), alphabet_size=5)


def test_total_variation_examples():
    a = TrueBlockDistribution(1, np.array([0.0, 1.0]), np.array([0.6, 0.4]))
    b = TrueBlockDistribution(1, np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    assert total_variation(a, a) == (0.0, 0.0)
    l1, tv = total_variation(a, b)
    assert l1 == pytest.approx(0.2) and tv == pytest.approx(0.1)
    p1 = TrueBlockDistribution(1, np.array([0.0, 1.0]), np.array([1.0, 0.0]))
    p2 = TrueBlockDistribution(1, np.array([0.0, 1.0]), np.array([0.0, 1.0]))
    assert total_variation(p1, p2) == (2.0, 1.0)
    c = TrueBlockDistribution(1, np.array([0.0, 1.0, 2.0]), np.full(3, 1 / 3))
    with pytest.raises(ShapeError):
        total_variation(a, c)


def test_kl_decomposition_examples():
    alphabet = np.array([0.0, 1.0])
    q2 = TrueBlockDistribution(2, alphabet, np.array([[1.0, 0.0], [0.0, 0.0]]))
    q1 = TrueBlockDistribution(2, alphabet, np.array([[0.25, 0.25], [0.25, 0.25]]))
    kl, h = conditional_kl_decomposition(q2, q1)
    assert kl == pytest.approx(1.0) and h == 0.0

    kl, h = conditional_kl_decomposition(q1, q1)
    assert kl == 0.0 and h == pytest.approx(1.0)

    q0 = TrueBlockDistribution(2, alphabet, np.array([[0.0, 0.5], [0.25, 0.25]]))
    kl, _ = conditional_kl_decomposition(q2, q0)
    assert math.isinf(kl)


def weighted_log_loss_oracle(q2, q1):
    """sum_a q2(a) * -log2 q1(a_last | context) by explicit loops."""
    size, order = q2.size, q2.order
    total = 0.0
    for block in itertools.product(range(size), repeat=order):
        if q2.probs[block] == 0:
            continue
        ctx = block[:-1]
        ctx_mass = sum(q1.probs[ctx + (s,)] for s in range(size))
        total += q2.probs[block] * -math.log2(q1.probs[block] / ctx_mass)
    return total


@pytest.mark.parametrize("seed", range(25))
def test_kl_decomposition_identity(seed):
    rng = np.random.default_rng(seed)
    q1 = rand_dist(rng, 2, 2)
    q2 = rand_dist(rng, 2, 2)
    kl, h = conditional_kl_decomposition(q2, q1)
    assert kl + h == pytest.approx(weighted_log_loss_oracle(q2, q1), abs=1e-12)


def test_distribution_table_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    d = rand_dist(rng, 3, 2)
    path = tmp_path / "dist.tsv"
    write_distribution(path, d)
    back = read_distribution(path, d.alphabet)
    assert np.array_equal(back.probs, d.probs)
    assert path.read_text().splitlines()[1].startswith("0.0,0.0\t")


def test_empirical_requires_integer_counts():
    with pytest.raises(InvalidInputError):
        EmpiricalDistribution(1, [0, 1], np.array([0.5, 0.5]))
