import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from contactval import matnum
from contactval.errors import DimensionError, DomainError, PoleError, ValidationError
from contactval.matnum import _pf_parlett_reid, _pf_recursive


def random_skew(rng, m):
    x = rng.normal(size=(m, m))
    return x - x.T


finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@st.composite
def skew_matrices(draw, sizes=(2, 4, 6, 8)):
    m = draw(st.sampled_from(sizes))
    x = draw(arrays(np.float64, (m, m), elements=finite))
    return x - x.T


def test_standard_j_squares_to_minus_identity():
    J = matnum.standard_j(3)
    np.testing.assert_array_equal(J @ J, -np.eye(6))
    np.testing.assert_array_equal(J.T, -J)


def test_pfaffian_of_standard_j():
    # Pf(J) with J = [[0, -I], [I, 0]] is (-1)^{n(n+1)/2}
    for n in range(1, 5):
        assert matnum.pfaffian(matnum.standard_j(n)) == pytest.approx((-1) ** (n * (n + 1) // 2))


def test_pfaffian_of_sdiag_is_product():
    lam = [3.0, 2.0, 0.5]
    assert matnum.pfaffian(matnum.sdiag(lam)) == pytest.approx(3.0)


@given(skew_matrices())
@settings(max_examples=60, deadline=None)
def test_pfaffian_squared_is_determinant(a):
    pf = matnum.pfaffian(a)
    det = np.linalg.det(a)
    assert pf * pf == pytest.approx(det, rel=1e-8, abs=1e-8 * max(1.0, np.abs(a).max()) ** a.shape[0])


@pytest.mark.parametrize("m", [2, 4, 6, 8, 10, 12])
def test_recursive_and_parlett_reid_agree(m):
    rng = np.random.default_rng(m)
    a = random_skew(rng, m)
    assert _pf_parlett_reid(a) == pytest.approx(_pf_recursive(a), rel=1e-10)


def test_pfaffian_batch_matches_scalar():
    rng = np.random.default_rng(0)
    stack = np.array([random_skew(rng, 6) for _ in range(20)])
    np.testing.assert_allclose(matnum.pfaffian_batch(stack), [matnum.pfaffian(a) for a in stack],
                               rtol=1e-12)


def test_pfaffian_congruence_rule():
    # Pf(B A B^T) = det(B) Pf(A)
    rng = np.random.default_rng(1)
    a = random_skew(rng, 6)
    b = rng.normal(size=(6, 6))
    assert matnum.pfaffian(b @ a @ b.T) == pytest.approx(np.linalg.det(b) * matnum.pfaffian(a), rel=1e-9)


def test_odd_size_rejected():
    with pytest.raises(DimensionError):
        matnum.pfaffian(np.zeros((3, 3)))


def test_non_skew_rejected():
    with pytest.raises(ValidationError):
        matnum.pfaffian(np.eye(2))


@given(skew_matrices())
@settings(max_examples=60, deadline=None)
def test_skew_canonical_reconstructs(a):
    lam, B = matnum.skew_canonical(a)
    scale = max(1.0, np.abs(a).max())
    np.testing.assert_allclose(B @ B.T, np.eye(a.shape[0]), atol=1e-9)
    np.testing.assert_allclose(B.T @ matnum.sdiag(lam) @ B, a, atol=1e-9 * scale)
    assert np.all(np.diff(lam) <= 1e-12 * scale)
    assert np.all(lam >= -1e-12)


def test_skew_canonical_orientation():
    rng = np.random.default_rng(5)
    a = random_skew(rng, 6)
    lam, B = matnum.skew_canonical(a)
    assert abs(np.linalg.det(B)) == pytest.approx(1.0)
    assert np.linalg.det(B) * np.prod(lam) == pytest.approx(matnum.pfaffian(a), rel=1e-10)


@pytest.mark.parametrize("a", [
    np.zeros((4, 4)),
    matnum.sdiag([1.0, 1.0, 1.0]),
    matnum.sdiag([2.0, 0.0]),
    np.kron(np.ones((2, 2)), np.array([[0.0, 1.0], [-1.0, 0.0]])),
])
def test_skew_canonical_degenerate_inputs(a):
    lam, B = matnum.skew_canonical(a)
    np.testing.assert_allclose(B @ B.T, np.eye(a.shape[0]), atol=1e-12)
    np.testing.assert_allclose(B.T @ matnum.sdiag(lam) @ B, a, atol=1e-12)
    assert np.linalg.det(B) * np.prod(lam) == pytest.approx(matnum.pfaffian(a), abs=1e-12)


def test_skew_spectrum_batch_matches_canonical():
    rng = np.random.default_rng(2)
    stack = np.array([random_skew(rng, 8) for _ in range(10)])
    spec = matnum.skew_spectrum_batch(stack)
    for a, s in zip(stack, spec):
        np.testing.assert_allclose(s, matnum.skew_canonical(a)[0], rtol=1e-10)


@pytest.mark.parametrize("size,k", [(2, 1), (3, 1), (4, 2), (4, 1), (5, 3)])
def test_mixed_discriminant_two_blocks_matches_permutations(size, k):
    rng = np.random.default_rng(size * 10 + k)
    a, b = rng.normal(size=(2, size, size))
    blocks = [(a, size - k), (b, k)]
    assert matnum.mixed_discriminant(blocks) == pytest.approx(
        matnum.mixed_discriminant_permutations(blocks), rel=1e-10, abs=1e-12)


def test_mixed_discriminant_three_blocks():
    rng = np.random.default_rng(9)
    a, b, c = rng.normal(size=(3, 4, 4))
    blocks = [(a, 2), (b, 1), (c, 1)]
    assert matnum.mixed_discriminant(blocks) == pytest.approx(
        matnum.mixed_discriminant_permutations(blocks), rel=1e-10)


def test_mixed_discriminant_of_identity_with_itself():
    # D(A[N]) = det A and D(I[N-k], A[k]) = tr ∧^k A / C(N, k)
    rng = np.random.default_rng(3)
    a = rng.normal(size=(5, 5))
    assert matnum.mixed_discriminant([(a, 5)]) == pytest.approx(np.linalg.det(a))
    for k in range(6):
        val = matnum.mixed_discriminant([(np.eye(5), 5 - k), (a, k)])
        assert val == pytest.approx(matnum.compound_trace(a, k) / math.comb(5, k), rel=1e-9, abs=1e-12)


def test_mixed_discriminant_bad_multiplicities():
    with pytest.raises(DimensionError):
        matnum.mixed_discriminant([(np.eye(3), 2)])


@pytest.mark.parametrize("m", range(0, 7))
def test_compound_trace_matches_principal_minors(m):
    rng = np.random.default_rng(m)
    a = rng.normal(size=(6, 6))
    assert matnum.compound_trace(a, m) == pytest.approx(matnum.principal_minor_sum(a, m), rel=1e-9, abs=1e-10)


def test_compound_trace_domain():
    with pytest.raises(DomainError):
        matnum.compound_trace(np.eye(3), 4)


def test_euler_secant_values():
    assert matnum.euler_secant(5) == [1, -1, 5, -61, 1385, -50521]


@pytest.mark.parametrize("n", range(0, 8))
def test_binomial_even_inverse_is_inverse(n):
    a = matnum.binomial_even_matrix(n)
    ai = matnum.binomial_even_inverse(n)
    prod = [[sum(a[i][l] * ai[l][j] for l in range(n + 1)) for j in range(n + 1)] for i in range(n + 1)]
    assert prod == [[Fraction(int(i == j)) for j in range(n + 1)] for i in range(n + 1)]


@pytest.mark.parametrize("a,b", [(0.5, 1.5), (-0.5, 2.0), (-2.5, 1.0), (3.0, -1.5), (-0.25, -0.25)])
def test_beta_continued_against_reflection_oracle(a, b):
    oracle = matnum.gamma_reflected(a) * matnum.gamma_reflected(b) / matnum.gamma_reflected(a + b)
    assert matnum.beta_continued(a, b) == pytest.approx(oracle, rel=1e-12)


def test_beta_continued_zero_at_sum_pole():
    assert matnum.beta_continued(-0.5, -0.5) == 0.0


@pytest.mark.parametrize("a,b", [(0.0, 1.0), (-1.0, 0.5), (2.0, -3.0)])
def test_beta_continued_poles(a, b):
    with pytest.raises(PoleError):
        matnum.beta_continued(a, b)


def test_log_beta_rejects_non_positive():
    with pytest.raises(DomainError):
        matnum.log_beta(-1.0, 1.0)
