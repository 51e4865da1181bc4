import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegel.errors import (
    InvalidArgumentError,
    InvalidRangeError,
    NonPositiveEntryError,
    ToleranceNotMetError,
)
from siegel.haar import (
    MonteCarloReport,
    RngStream,
    a_integral_closed_form,
    a_integral_mc,
    a_integral_quadrature,
    conjugation_jacobian,
    sample_haar_so,
    sample_haar_so_batch,
    sample_siegel_point,
    siegel_density,
)
from siegel.iwasawa import MINIMAL_PARAMS, SiegelParams

T_MIN = MINIMAL_PARAMS.t


def conjugation_matrix_det(a):
    """Independent oracle: assemble the linear map u -> a u a^{-1} on the
    strict upper coordinates column by column and take the determinant."""
    a = np.asarray(a, dtype=float)
    n = a.size
    idx = [(i, j) for i in range(n) for j in range(i + 1, n)]
    mat = np.zeros((len(idx), len(idx)))
    for col, (i, j) in enumerate(idx):
        e = np.zeros((n, n))
        e[i, j] = 1.0
        v = np.diag(a) @ e @ np.diag(1.0 / a)
        for row, pq in enumerate(idx):
            mat[row, col] = v[pq]
    return float(np.linalg.det(mat))


def test_jacobian_trivial_cases():
    assert conjugation_jacobian([1.0, 1.0, 1.0]) == 1.0
    assert math.isclose(conjugation_jacobian([2.0, 0.5]), 4.0, rel_tol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_jacobian_matches_numeric_determinant(n, rng):
    for _ in range(100):
        x = rng.uniform(0.2, 4.0, n)
        a = x / np.prod(x) ** (1.0 / n)
        lhs = conjugation_jacobian(a)
        rhs = conjugation_matrix_det(a)
        assert abs(lhs - rhs) / abs(rhs) <= 1e-9


def test_jacobian_rejects_bad_input():
    with pytest.raises(NonPositiveEntryError):
        conjugation_jacobian([1.0, -1.0])
    with pytest.raises(InvalidArgumentError):
        conjugation_jacobian([2.0, 2.0])


def test_density_examples():
    assert siegel_density([0.37]) == 1.0  # exponent 1*(2-1)-1 = 0
    assert siegel_density([1.0, 1.0]) == 1.0
    assert math.isclose(siegel_density([2.0, 3.0]), 6.0, rel_tol=1e-14)
    with pytest.raises(NonPositiveEntryError):
        siegel_density([0.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10**6))
def test_density_is_multiplicative_per_coordinate(n, seed):
    gen = np.random.default_rng(seed)
    b = np.exp(gen.uniform(-1.5, 1.5, n - 1))
    i = np.arange(1, n)
    expected = float(np.prod(b ** (i * (n - i) - 1)))
    assert math.isclose(siegel_density(b), expected, rel_tol=1e-12)


def test_haar_so_invariants():
    ks = sample_haar_so_batch(3, 400, RngStream(3))
    gram = np.einsum("sij,sik->sjk", ks, ks)
    assert np.max(np.abs(gram - np.eye(3))) <= 1e-10
    assert np.allclose(np.linalg.det(ks), 1.0, atol=1e-10)


def test_haar_so_determinism_is_bitwise():
    k1 = sample_haar_so(5, RngStream(7, 3))
    k2 = sample_haar_so(5, RngStream(7, 3))
    assert np.array_equal(k1, k2)
    k3 = sample_haar_so(5, RngStream(7, 4))
    assert not np.array_equal(k1, k3)


def test_haar_so_angle_is_uniform():
    # Kolmogorov-Smirnov on the rotation angle at n = 2, 1% critical value
    n_samples = 10**5
    ks = sample_haar_so_batch(2, n_samples, RngStream(2024))
    theta = np.mod(np.arctan2(ks[:, 1, 0], ks[:, 0, 0]), 2.0 * math.pi)
    u = np.sort(theta) / (2.0 * math.pi)
    i = np.arange(1, n_samples + 1)
    d_stat = max(np.max(i / n_samples - u), np.max(u - (i - 1) / n_samples))
    assert d_stat < 1.6276 / math.sqrt(n_samples)


def test_haar_so_entry_mean_is_centered():
    n_samples = 10**5
    ks = sample_haar_so_batch(2, n_samples, RngStream(77))
    # var(cos theta) = 1/2 for a uniform angle
    four_sigma = 4.0 * math.sqrt(0.5 / n_samples)
    assert abs(float(np.mean(ks[:, 0, 0]))) <= four_sigma


def test_sample_siegel_point_invariants():
    p = MINIMAL_PARAMS
    gen = RngStream(9).generator()
    for _ in range(200):
        pt = sample_siegel_point(3, p, p.t / 16.0, gen)
        pt.check(p)
        assert math.isclose(
            pt.weight, siegel_density(pt.b) * float(np.prod(pt.b)), rel_tol=1e-12
        )
    with pytest.raises(InvalidRangeError):
        sample_siegel_point(3, p, 2.0 * p.t, gen)


def test_sample_siegel_point_materializes_as_member():
    from siegel.iwasawa import membership_excess

    p = MINIMAL_PARAMS
    gen = RngStream(10).generator()
    for _ in range(50):
        pt = sample_siegel_point(3, p, p.t / 16.0, gen)
        assert membership_excess(pt.to_group_element(), p) <= 1e-9


def test_quadrature_examples():
    assert math.isclose(a_integral_quadrature(2, 1.0), 0.5, rel_tol=1e-12)
    assert math.isclose(a_integral_quadrature(3, T_MIN), 2.0 / 9.0, rel_tol=1e-10)
    assert math.isclose(a_integral_quadrature(4, 1.0), 1.0 / 72.0, rel_tol=1e-10)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("t", [1.0, T_MIN, 2.0])
def test_quadrature_matches_closed_form(n, t):
    q = a_integral_quadrature(n, t)
    c = a_integral_closed_form(n, t)
    assert abs(q - c) / c <= 1e-10


def test_quadrature_rejects_impossible_tolerance():
    with pytest.raises((ToleranceNotMetError, InvalidArgumentError)):
        a_integral_quadrature(3, T_MIN, rel_tol=0.0)


def test_mc_estimate_n2_matches_truncated_exact():
    # exponent 0 in n = 2: the integral over [b_min, t] is (t - b_min)/2
    t, b_min = 1.0, 1.0 / 16.0
    rep = a_integral_mc(2, t, 200_000, RngStream(5), b_min=b_min)
    exact = 0.5 * (t - b_min)
    assert abs(rep.estimate - exact) <= 3.0 * rep.std_error
    assert rep.samples == 200_000 and rep.seed == 5


def test_mc_estimate_n3_matches_quadrature():
    t = T_MIN
    rep = a_integral_mc(3, t, 400_000, RngStream(6), b_min=t / 64.0)
    target = a_integral_closed_form(3, t)  # == t**4 / 8
    assert math.isclose(target, t**4 / 8.0, rel_tol=1e-14)
    bias = rep.truncation_bound * target
    assert abs(rep.estimate - target) <= 3.0 * rep.std_error + bias
    assert abs(rep.estimate - target) / target <= 0.01


def test_mc_is_deterministic_per_stream():
    r1 = a_integral_mc(3, T_MIN, 10_000, RngStream(12, 1))
    r2 = a_integral_mc(3, T_MIN, 10_000, RngStream(12, 1))
    assert r1 == r2


def test_mc_report_json_fields():
    rep = a_integral_mc(2, 1.0, 1000, RngStream(0))
    doc = rep.to_json_dict()
    for key in ("estimate", "std_error", "samples", "seed", "b_min"):
        assert key in doc
