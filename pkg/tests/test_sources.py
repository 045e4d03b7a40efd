import math

import numpy as np
import pytest

from mepcs.empirical import (
    TrueBlockDistribution,
    empirical_distribution,
    marginalize,
    total_variation,
)
from mepcs.errors import ConfigError, TooLargeError
from mepcs.quantization import QuantSpec, quantize_sequence
from mepcs.sources import (
    SourceModel,
    check_qmap_mass_condition,
    estimate_information_dimension,
    sample_source,
    stationary_distribution,
    true_block_distribution,
)

UNIT = QuantSpec(1, 0.0, 1.0, closed=False)
SPARSE = SourceModel.sparse_iid(0.2)
MARKOV = SourceModel.markov([0.0, 0.5], [[0.9, 0.1], [0.1, 0.9]])


def mixture_entropy(p, b):
    """H([X]_b) for (1-p) delta_0 + p Unif[0,1): one cell of mass
    1 - p + p 2^-b and 2^b - 1 cells of mass p 2^-b."""
    cell = p * 2.0 ** -b
    zero = 1 - p + cell
    h = -zero * math.log2(zero) if zero > 0 else 0.0
    if cell > 0:
        h -= (2 ** b - 1) * cell * math.log2(cell)
    return h


def test_sample_sparse_p0_is_zero():
    assert not np.any(sample_source(SourceModel.sparse_iid(0.0), 1000, 3))


def test_sample_sparse_fraction():
    x = sample_source(SPARSE, 100_000, 1)
    assert abs(np.mean(x != 0) - 0.2) < 0.01
    assert x.min() >= 0 and x.max() < 1


def test_sample_markov_self_transition():
    x = sample_source(MARKOV, 100_000, 2)
    same = np.mean(x[1:] == x[:-1])
    assert abs(same - 0.9) < 0.01


def test_sampling_is_deterministic():
    assert np.array_equal(sample_source(SPARSE, 50, 9), sample_source(SPARSE, 50, 9))
    assert not np.array_equal(sample_source(SPARSE, 50, 9), sample_source(SPARSE, 50, 10))


def test_invalid_models():
    with pytest.raises(ConfigError):
        SourceModel.sparse_iid(1.5)
    with pytest.raises(ConfigError):
        SourceModel.markov([0.0, 1.0], [[0.5, 0.4], [0.1, 0.9]])
    with pytest.raises(ConfigError):
        SourceModel("gaussian")
    with pytest.raises(ConfigError):
        sample_source(SPARSE, 0, 1)


def test_true_block_sparse_example():
    d = true_block_distribution(SPARSE, UNIT, 1)
    assert d.alphabet.tolist() == [0.0, 0.5]
    assert d.probs == pytest.approx([0.9, 0.1])


def test_true_block_iid_product():
    spec = QuantSpec(2, 0.0, 1.0, closed=False)
    d1 = true_block_distribution(SPARSE, spec, 1)
    d2 = true_block_distribution(SPARSE, spec, 2)
    assert np.allclose(d2.probs, np.outer(d1.probs, d1.probs), atol=1e-15)


def test_true_block_markov_chain_rule():
    d = true_block_distribution(MARKOV, UNIT, 2)
    pi = stationary_distribution(MARKOV.transition)
    assert pi == pytest.approx([0.5, 0.5])
    assert d.probs[0, 0] == pytest.approx(pi[0] * 0.9)
    assert d.probs[1, 0] == pytest.approx(pi[1] * 0.1)


@pytest.mark.parametrize("model", [SPARSE, MARKOV])
@pytest.mark.parametrize("b", [1, 2, 3])
def test_true_block_normalized_and_consistent(model, b):
    spec = QuantSpec(b, 0.0, 1.0, closed=False)
    prev = None
    for order in (1, 2, 3):
        d = true_block_distribution(model, spec, order)
        assert abs(d.probs.sum() - 1) < 1e-10
        if prev is not None:
            assert np.allclose(marginalize(d).probs, prev.probs, atol=1e-12)
            assert np.allclose(marginalize(d, "first").probs, prev.probs, atol=1e-12)
        prev = d


def test_markov_states_must_be_on_grid():
    off = SourceModel.markov([0.0, 0.3], [[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(ConfigError):
        true_block_distribution(off, UNIT, 1)


def test_enumeration_guard():
    with pytest.raises(TooLargeError):
        true_block_distribution(SPARSE, QuantSpec(9, 0.0, 1.0, closed=False), 3)


@pytest.mark.parametrize("model", [SPARSE, MARKOV], ids=["sparse", "markov"])
def test_empirical_approaches_true_law(model):
    spec = QuantSpec(2, 0.0, 1.0, closed=False)
    truth = true_block_distribution(model, spec, 2)
    devs = []
    for n in (100, 1000, 10_000, 100_000):
        mean = np.mean([
            total_variation(empirical_distribution(quantize_sequence(sample_source(model, n, s), spec), 2), truth)[0]
            for s in range(10)
        ])
        devs.append(mean)
    assert all(a > b for a, b in zip(devs, devs[1:]))


@pytest.mark.parametrize("b, expected", [(8, 0.2 + 0.722 / 8), (16, 0.245)])
def test_id_sparse_examples(b, expected):
    est = estimate_information_dimension(SPARSE, 0, [b])
    assert est.ratios[0] == pytest.approx(mixture_entropy(0.2, b) / b, abs=1e-12)
    assert est.ratios[0] == pytest.approx(expected, abs=0.01)


def test_id_decreases_toward_p():
    est = estimate_information_dimension(SPARSE, 0, [4, 8, 12, 16])
    r = est.ratios
    assert all(a > b for a, b in zip(r, r[1:]))
    assert all(x > 0.2 for x in r)
    assert est.extrapolated == r[-1]
    assert abs(est.extrapolated - 0.2) < 0.06


def test_id_unstructured_and_memory():
    full = estimate_information_dimension(SourceModel.sparse_iid(1.0), 0, [4, 8])
    assert full.ratios == pytest.approx((1.0, 1.0))
    # a discrete-state chain has no continuous part: ratio shrinks like 1/b
    chain = estimate_information_dimension(MARKOV, 1, [1, 2, 4])
    h2 = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
    assert chain.ratios == pytest.approx((h2 / 1, h2 / 2, h2 / 4))


def test_mass_condition():
    uni = TrueBlockDistribution(2, np.arange(3.0), np.full((3, 3), 1 / 9))
    assert check_qmap_mass_condition(uni, 1.0)
    assert check_qmap_mass_condition(uni, 0.3)
    low = np.full((2, 2), 1 / 4)
    low[0, 0] = 1 / 8
    low[1, 1] = 3 / 8
    assert not check_qmap_mass_condition(TrueBlockDistribution(2, np.arange(2.0), low), 1.0)
    sparse = true_block_distribution(SPARSE, UNIT, 1)
    assert check_qmap_mass_condition(sparse, 0.2)
    assert not check_qmap_mass_condition(sparse, 0.25)
