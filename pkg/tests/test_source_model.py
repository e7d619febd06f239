import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from swexp.errors import DomainError, SourceSpecError
from swexp.source_model import (
    LN2,
    BinarySymmetricPair,
    JointSource,
    binary_entropy,
    binary_entropy_inverse,
    conditional_entropy,
    conditional_x_given_y,
    kl_divergence,
    load_source,
    marginal_y,
    source_from_dict,
)


def test_marginal_y_bss_symmetric():
    src = BinarySymmetricPair(0.1).to_joint()
    assert np.allclose(marginal_y(src), [0.5, 0.5])


def test_marginal_y_column_sums():
    src = JointSource(("0", "1"), ("0", "1"), [[0.5, 0.2], [0.1, 0.2]])
    assert np.allclose(marginal_y(src), [0.6, 0.4])


def test_marginal_y_normalized():
    rng = np.random.default_rng(0)
    m = rng.random((4, 3))
    m /= m.sum()
    src = JointSource("abcd", "xyz", m)
    assert abs(marginal_y(src).sum() - 1.0) < 1e-12


def test_conditional_bss():
    src = BinarySymmetricPair(0.1).to_joint()
    cond = conditional_x_given_y(src)
    assert np.allclose(cond, [[0.9, 0.1], [0.1, 0.9]])


def test_conditional_independent_source():
    px = np.array([0.3, 0.7])
    py = np.array([0.6, 0.4])
    src = JointSource("ab", "xy", np.outer(px, py))
    cond = conditional_x_given_y(src)
    assert np.allclose(cond[:, 0], px) and np.allclose(cond[:, 1], px)


def test_conditional_first_column():
    src = JointSource(("0", "1"), ("0", "1"), [[0.5, 0.2], [0.1, 0.2]])
    cond = conditional_x_given_y(src)
    assert np.allclose(cond[:, 0], [5 / 6, 1 / 6])


def test_conditional_entropy_bss():
    src = BinarySymmetricPair(0.1).to_joint()
    # independent high-precision evaluation of -p ln p - (1-p) ln(1-p)
    expect = -0.1 * math.log(0.1) - 0.9 * math.log(0.9)
    assert abs(conditional_entropy(src) - expect) < 1e-14
    assert abs(expect - 0.325083) < 1e-6


def test_conditional_entropy_deterministic():
    src = JointSource(("0", "1"), ("0", "1"), [[0.5, 0.0], [0.0, 0.5]])
    assert conditional_entropy(src) == 0.0


def test_conditional_entropy_independent_uniform():
    src = JointSource(("0", "1"), ("0", "1"), [[0.25, 0.25], [0.25, 0.25]])
    assert abs(conditional_entropy(src) - LN2) < 1e-14


def test_kl_trivial_cases():
    assert kl_divergence([0.4, 0.6], [0.4, 0.6]) == 0.0
    assert abs(kl_divergence([1.0, 0.0], [0.5, 0.5]) - LN2) < 1e-14
    assert kl_divergence([0.5, 0.5], [1.0, 0.0]) == math.inf


def test_kl_direct_summation():
    p = np.array([0.3, 0.7])
    q = np.array([0.5, 0.5])
    expect = sum(pi * math.log(pi / qi) for pi, qi in zip(p, q))
    assert abs(kl_divergence(p, q) - expect) < 1e-15


def test_binary_entropy_inverse_endpoints():
    assert binary_entropy_inverse(LN2) == 0.5
    assert binary_entropy_inverse(0.0) == 0.0
    assert abs(binary_entropy_inverse(0.325083) - 0.1) < 1e-6


def test_binary_entropy_domain():
    with pytest.raises(DomainError):
        binary_entropy(1.2)
    with pytest.raises(DomainError):
        binary_entropy_inverse(LN2 + 0.01)


@given(st.floats(min_value=0.0, max_value=0.5))
def test_entropy_roundtrip(delta):
    r = binary_entropy(delta)
    assert abs(binary_entropy_inverse(r) - delta) < 1e-9


def test_entropy_matches_conditional_entropy_for_bss():
    for p in (0.05, 0.2, 0.5):
        src = BinarySymmetricPair(p).to_joint()
        assert abs(conditional_entropy(src) - binary_entropy(p)) < 1e-12


@given(st.integers(min_value=0, max_value=10 ** 9), st.integers(min_value=2, max_value=6))
def test_kl_nonnegative(seed, k):
    rng = np.random.default_rng(seed)
    p = rng.random(k) + 1e-3
    q = rng.random(k) + 1e-3
    p /= p.sum()
    q /= q.sum()
    d = kl_divergence(p, q)
    assert d >= 0.0
    if np.allclose(p, q, atol=1e-13):
        assert d < 1e-10


def test_joint_source_rejects_bad_input():
    with pytest.raises(SourceSpecError):
        JointSource(("0", "1"), ("0", "1"), [[0.6, 0.2], [0.1, 0.2]])  # sums to 1.1
    with pytest.raises(SourceSpecError):
        JointSource(("0", "1"), ("0", "1"), [[1.0, 0.0], [0.0, 0.0]])  # zero x-marginal
    with pytest.raises(SourceSpecError):
        JointSource(("0", "1"), ("0", "1"), [[1.1, -0.1], [0.0, 0.0]])  # negative entry


def test_bsp_domain():
    with pytest.raises(DomainError):
        BinarySymmetricPair(0.0)
    with pytest.raises(DomainError):
        BinarySymmetricPair(0.6)


def test_json_loader_roundtrip(tmp_path):
    spec = {
        "alphabet_x": ["0", "1"],
        "alphabet_y": ["0", "1"],
        "pmf": [[0.45, 0.05], [0.05, 0.45]],
    }
    path = tmp_path / "src.json"
    path.write_text(json.dumps(spec))
    src = load_source(path)
    assert src.alphabet_x == ("0", "1")
    assert np.allclose(src.pmf, spec["pmf"])


def test_json_loader_reports_offender(tmp_path):
    spec = {
        "alphabet_x": ["0", "1"],
        "alphabet_y": ["0", "1"],
        "pmf": [[0.45, -0.05], [0.05, 0.55]],
    }
    with pytest.raises(SourceSpecError, match=r"x=0, y=1"):
        source_from_dict(spec)
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(SourceSpecError, match="not valid JSON"):
        load_source(path)
