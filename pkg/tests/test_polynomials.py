import numpy as np
import pytest

from varietal.errors import DegreeError, DimensionMismatch, EmptyInput
from varietal.polynomials import (
    HomogeneousPoly,
    Monomial,
    dehomogenize_poly,
    evaluate,
    gradient,
    homogenize_poly,
    monomial_basis_size,
    monomial_exponents,
    multiply_linear_forms,
    poly_from_json,
    veronese_embed,
    veronese_jacobian,
    veronese_matrix,
)

from _helpers import eval_term_by_term, finite_difference_jacobian, hpoly, ipoly, product_of_forms_oracle


# ---------------------------------------------------------------------------
# monomial counting and ordering

def test_basis_size_degree2_dim4():
    assert monomial_basis_size(2, 4) == 10


def test_basis_size_linear_is_dimension():
    for D in (1, 2, 5, 9):
        assert monomial_basis_size(1, D) == D


def test_basis_size_cubic_two_vars():
    # x^3, x^2 y, x y^2, y^3
    assert monomial_basis_size(3, 2) == 4


def test_basis_size_overflow_is_an_error():
    with pytest.raises(OverflowError):
        monomial_basis_size(400, 400)


def test_monomial_order_graded_lex_desc():
    exps = monomial_exponents(2, 2)
    assert [tuple(e) for e in exps] == [(2, 0), (1, 1), (0, 2)]


def test_monomial_order_is_a_bijection():
    for degree, num_vars in [(1, 3), (2, 3), (3, 2), (4, 4)]:
        size = monomial_basis_size(degree, num_vars)
        seen = set()
        for k in range(size):
            m = Monomial.from_index(k, degree, num_vars)
            assert m.degree == degree
            assert m.index() == k
            seen.add(m.exponents)
        assert len(seen) == size


# ---------------------------------------------------------------------------
# Veronese embedding

def test_veronese_quadratic_two_vars():
    np.testing.assert_allclose(veronese_embed([2, 3], 2), [4.0, 6.0, 9.0])


def test_veronese_degree_one_is_identity():
    x = np.array([0.3, -1.2, 4.0, 0.0])
    np.testing.assert_array_equal(veronese_embed(x, 1), x)


def test_veronese_linearizes_evaluation():
    """dot(embedding, coeffs) equals term-by-term evaluation for random cubics."""
    rng = np.random.default_rng(7)
    M = monomial_basis_size(3, 3)
    for _ in range(100):
        x = rng.uniform(-2, 2, size=3)
        p = HomogeneousPoly(3, 3, rng.standard_normal(M))
        via_embed = float(p.coeffs @ veronese_embed(x, 3))
        oracle = eval_term_by_term(p, x)
        assert abs(via_embed - oracle) <= 1e-12 * (1.0 + abs(oracle))


def test_veronese_matrix_matches_single_embeddings():
    rng = np.random.default_rng(11)
    X = rng.uniform(-1, 1, size=(6, 3))
    V = veronese_matrix(X, 2)
    for j, x in enumerate(X):
        np.testing.assert_allclose(V[j], veronese_embed(x, 2))


# ---------------------------------------------------------------------------
# Jacobian and gradients

def test_jacobian_by_hand_quadratic():
    a, b = 2.0, 3.0
    expected = np.array([[2 * a, 0.0], [b, a], [0.0, 2 * b]])
    np.testing.assert_allclose(veronese_jacobian([a, b], 2), expected)


def test_jacobian_degree_one_is_identity():
    np.testing.assert_array_equal(veronese_jacobian([5.0, -3.0, 2.0], 1), np.eye(3))


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    for _ in range(20):
        x = rng.uniform(-2, 2, size=4)
        J = veronese_jacobian(x, 4)
        fd = finite_difference_jacobian(lambda y: veronese_embed(y, 4), x)
        err = np.linalg.norm(fd - J) / np.linalg.norm(J)
        assert err < 1e-6


def test_evaluate_simple_product():
    p = hpoly(2, 2, {(1, 1): 1.0})          # x1 * x2
    assert evaluate(p, [3.0, 5.0]) == pytest.approx(15.0)


def test_evaluate_zero_polynomial():
    p = HomogeneousPoly(3, 2, np.zeros(monomial_basis_size(2, 3)))
    assert evaluate(p, [1.0, 2.0, 3.0]) == 0.0


def test_evaluate_cubic_in_four_vars_at_ones():
    # x0^2 x1 + x0 x2^2 + x1 x2 x3 at (1,1,1,1) is 3
    p = hpoly(4, 3, {(2, 1, 0, 0): 1.0, (1, 0, 2, 0): 1.0, (0, 1, 1, 1): 1.0})
    assert evaluate(p, [1.0, 1.0, 1.0, 1.0]) == pytest.approx(3.0)


def test_evaluate_rejects_wrong_dimension():
    p = hpoly(2, 2, {(1, 1): 1.0})
    with pytest.raises(DimensionMismatch):
        evaluate(p, [1.0, 2.0, 3.0])


def test_gradient_of_product_monomial():
    p = hpoly(2, 2, {(1, 1): 1.0})          # grad = (x2, x1)
    np.testing.assert_allclose(gradient(p, [0.0, 3.0]), [3.0, 0.0])


def test_gradient_on_hyperplane_follows_product_rule():
    """grad[(b1.x)(b2.x)] at b1.x = 0 is b1 scaled by b2.x."""
    rng = np.random.default_rng(3)
    for _ in range(20):
        b1 = rng.standard_normal(4)
        b2 = rng.standard_normal(4)
        y = rng.standard_normal(4)
        x = y - b1 * (b1 @ y) / (b1 @ b1)            # now b1.x = 0
        p = multiply_linear_forms([b1, b2])
        expected = b1 * (b2 @ x)
        np.testing.assert_allclose(gradient(p, x), expected, atol=1e-12)


def test_euler_identity_for_homogeneous_polynomials():
    """x . grad p(x) = degree * p(x)."""
    rng = np.random.default_rng(19)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        V = int(rng.integers(2, 5))
        p = HomogeneousPoly(V, n, rng.standard_normal(monomial_basis_size(n, V)))
        x = rng.uniform(-2, 2, size=V)
        lhs = float(x @ gradient(p, x))
        rhs = n * evaluate(p, x)
        scale = abs(rhs) + np.linalg.norm(x) * np.linalg.norm(gradient(p, x)) + 1e-30
        assert abs(lhs - rhs) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# products of linear forms

def test_two_coordinate_forms_give_cross_term():
    p = multiply_linear_forms([[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(p.coeffs, [0.0, 1.0, 0.0])


def test_single_form_passes_through():
    b = np.array([2.0, -1.0, 0.5])
    p = multiply_linear_forms([b])
    np.testing.assert_allclose(p.coeffs, b)
    assert p.degree == 1


def test_difference_of_squares():
    p = multiply_linear_forms([[1.0, 1.0], [1.0, -1.0]])
    np.testing.assert_allclose(p.coeffs, [1.0, 0.0, -1.0])


def test_product_matches_convolution_oracle():
    rng = np.random.default_rng(23)
    for _ in range(10):
        forms = [rng.standard_normal(3) for _ in range(3)]
        p = multiply_linear_forms(forms)
        oracle = product_of_forms_oracle(forms)
        exps = monomial_exponents(3, 3)
        for k, alpha in enumerate(exps):
            assert p.coeffs[k] == pytest.approx(oracle.get(tuple(alpha), 0.0), abs=1e-12)


def test_product_vanishes_on_union_of_kernels():
    rng = np.random.default_rng(29)
    forms = [rng.standard_normal(4) for _ in range(3)]
    p = multiply_linear_forms(forms)
    for _ in range(100):
        b = forms[rng.integers(0, 3)]
        y = rng.uniform(-2, 2, size=4)
        x = y - b * (b @ y) / (b @ b)
        scale = np.linalg.norm(p.coeffs) * np.linalg.norm(veronese_embed(x, 3)) + 1e-30
        assert abs(evaluate(p, x)) < 1e-12 * scale


def test_empty_form_list_rejected():
    with pytest.raises(EmptyInput):
        multiply_linear_forms([])


# ---------------------------------------------------------------------------
# homogenization / dehomogenization

def _cubic_and_its_dehomogenization():
    P = hpoly(4, 3, {(2, 1, 0, 0): 1.0, (1, 0, 2, 0): 1.0, (0, 1, 1, 1): 1.0})
    p = ipoly(3, 3, {(1, 0, 0): 1.0, (0, 2, 0): 1.0, (1, 1, 1): 1.0})
    return P, p


def test_dehomogenize_cubic():
    P, p = _cubic_and_its_dehomogenization()
    np.testing.assert_array_equal(dehomogenize_poly(P).coeffs, p.coeffs)


def test_homogenize_cubic():
    P, p = _cubic_and_its_dehomogenization()
    np.testing.assert_array_equal(homogenize_poly(p, 3).coeffs, P.coeffs)


def test_homogenize_already_homogeneous():
    p = ipoly(2, 2, {(1, 1): 2.0, (2, 0): -1.0})
    P = homogenize_poly(p, 2)
    expected = hpoly(3, 2, {(0, 1, 1): 2.0, (0, 2, 0): -1.0})
    np.testing.assert_array_equal(P.coeffs, expected.coeffs)


def test_dehomogenize_pure_power_of_x0():
    P = hpoly(3, 4, {(4, 0, 0): 1.0})
    p = dehomogenize_poly(P)
    expected = ipoly(2, 4, {(0, 0): 1.0})
    np.testing.assert_array_equal(p.coeffs, expected.coeffs)


def test_dehomogenize_matches_substitution_oracle():
    """Evaluating the dehomogenization at x equals evaluating at (1, x)."""
    rng = np.random.default_rng(31)
    M = monomial_basis_size(3, 4)
    for _ in range(20):
        P = HomogeneousPoly(4, 3, rng.standard_normal(M))
        p = dehomogenize_poly(P)
        x = rng.uniform(-2, 2, size=3)
        lhs = eval_term_by_term(p, x)
        rhs = eval_term_by_term(P, np.concatenate([[1.0], x]))
        assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(rhs))


def test_round_trip_inhomogeneous_side():
    rng = np.random.default_rng(37)
    size = ipoly(3, 4, {}).coeffs.shape[0]
    for _ in range(20):
        from varietal.polynomials import InhomogeneousPoly
        p = InhomogeneousPoly(3, 4, rng.standard_normal(size))
        back = dehomogenize_poly(homogenize_poly(p, 4))
        np.testing.assert_allclose(back.coeffs, p.coeffs, atol=1e-15)


def test_round_trip_homogeneous_side():
    rng = np.random.default_rng(41)
    M = monomial_basis_size(3, 4)
    for _ in range(20):
        P = HomogeneousPoly(4, 3, rng.standard_normal(M))
        back = homogenize_poly(dehomogenize_poly(P), 3)
        np.testing.assert_allclose(back.coeffs, P.coeffs, atol=1e-15)


def test_homogenize_rejects_higher_degree():
    p = ipoly(2, 3, {(2, 1): 1.0})
    with pytest.raises(DegreeError):
        homogenize_poly(p, 2)


def test_poly_json_round_trip():
    P, p = _cubic_and_its_dehomogenization()
    for poly in (P, p):
        back = poly_from_json(poly.to_json())
        assert back.num_vars == poly.num_vars
        np.testing.assert_array_equal(back.coeffs, poly.coeffs)
