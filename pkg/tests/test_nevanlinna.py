import numpy as np
import pytest

from app.core.errors import DimensionError, DomainError, ExceptionalPointError
from app.core.nevanlinna import (
    AcBoxTerm,
    AffineTerm,
    ConstantTerm,
    NevanlinnaModel,
    PoleTerm,
    boundary_value,
    derivative,
    direct_sum,
    evaluate,
    exceptional_points,
    sample_upper_half_plane,
    validate,
)
from tests.conftest import (
    acbox_model,
    affine_model,
    box_pole_model,
    constant_model,
    pole_model,
    scalar,
    scalar_model,
    sqrt_model,
)


def test_closed_form_values():
    assert evaluate(constant_model(1j), 2 + 3j)[0, 0] == 1j
    assert evaluate(affine_model(), 1 + 1j)[0, 0] == 1 + 1j
    assert evaluate(pole_model(), 1j)[0, 0] == pytest.approx(1j)
    assert evaluate(sqrt_model(), 3 + 4j)[0, 0] == pytest.approx(-1 + 2j)


def test_constant_term_reflects_below_axis():
    model = constant_model(0.5 + 1j)
    assert evaluate(model, -1j)[0, 0] == 0.5 - 1j


def test_eval_rejects_real_lambda():
    with pytest.raises(DomainError):
        evaluate(sqrt_model(), 1.0)
    with pytest.raises(DomainError):
        derivative(sqrt_model(), 1.0)


def test_boundary_values():
    assert boundary_value(acbox_model(), 0.5)[0, 0] == pytest.approx(1j * np.pi)
    assert boundary_value(sqrt_model(), 4.0)[0, 0] == pytest.approx(2j)
    assert boundary_value(sqrt_model(), -4.0)[0, 0] == pytest.approx(-2.0)
    assert boundary_value(pole_model(2.0), 3.0)[0, 0] == pytest.approx(-1.0)


@pytest.mark.parametrize("model, point", [
    (pole_model(0.0), 0.0),
    (acbox_model(), 1.0),
    (sqrt_model(), 0.0),
])
def test_boundary_value_refuses_exceptional_points(model, point):
    with pytest.raises(ExceptionalPointError):
        boundary_value(model, point)


def test_exceptional_points_sorted_and_unique():
    model = direct_sum(acbox_model(), direct_sum(pole_model(1.0), sqrt_model()))
    assert exceptional_points(model) == [0.0, 1.0]


def test_derivatives_in_closed_form():
    assert derivative(constant_model(1j), 1j)[0, 0] == 0
    assert derivative(affine_model(), 1j)[0, 0] == 1
    assert derivative(pole_model(), 1j)[0, 0] == pytest.approx(-1.0)


def test_direct_sum_is_block_diagonal():
    model = direct_sum(constant_model(1j), constant_model(2j))
    assert model.dim == 2
    np.testing.assert_allclose(evaluate(model, 1 + 1j), np.diag([1j, 2j]))


def test_validate_reports_non_finite_scalars():
    violations = validate(scalar_model(PoleTerm(float("nan"), scalar(1.0))))
    assert violations == ["term 0 (pole): t finite fails"]

    violations = validate(scalar_model(AcBoxTerm(float("-inf"), 1.0, scalar(1.0))))
    assert violations == ["term 0 (acbox): a, b finite fails"]


def test_validate_reports_repeated_pole():
    model = NevanlinnaModel(dim=1, terms=(PoleTerm(0.5, scalar(1.0)), PoleTerm(0.5, scalar(2.0))))
    assert validate(model) == ["term 1 (pole): location t = 0.5 repeats term 0"]


def test_direct_sum_merges_coinciding_poles():
    model = direct_sum(pole_model(2.0), pole_model(2.0))
    poles = [term for term in model.terms if isinstance(term, PoleTerm)]
    assert len(poles) == 1
    np.testing.assert_allclose(poles[0].G, np.eye(2))
    assert validate(model) == []
    np.testing.assert_allclose(evaluate(model, 1j), np.eye(2) / (2.0 - 1j))


def test_size_mismatch_rejected():
    with pytest.raises(DimensionError):
        NevanlinnaModel(dim=2, terms=(ConstantTerm(scalar(1j)),))
    with pytest.raises(DimensionError):
        NevanlinnaModel(dim=0)


def test_validate_accepts_fixtures(fixture_models):
    for model in fixture_models:
        assert validate(model) == [], model.name


def test_validate_names_term_and_invariant():
    violations = validate(constant_model(-1j))
    assert any(v.startswith("term 0 (constant): Im C ⪰ 0 fails") for v in violations)

    violations = validate(scalar_model(PoleTerm(0.0, scalar(-1.0))))
    assert "term 0 (pole): G ⪰ 0 fails" in violations

    hermitian_fail = AffineTerm(np.array([[0, 1], [0, 0]]), np.eye(2))
    violations = validate(NevanlinnaModel(dim=2, terms=(hermitian_fail,)))
    assert "term 0 (affine): A = A* fails" in violations


def test_nevanlinna_property_on_samples(fixture_models):
    for model in fixture_models:
        for z in sample_upper_half_plane(200, 7):
            value = evaluate(model, z)
            imag = (value - value.conj().T) / 2j
            smallest = np.linalg.eigvalsh(0.5 * (imag + imag.conj().T)).min()
            assert smallest >= -1e-12 * (1 + np.linalg.norm(value, 2))


def test_symmetry_across_real_axis(fixture_models):
    for model in fixture_models:
        for z in sample_upper_half_plane(50, 11):
            upper = evaluate(model, z)
            lower = evaluate(model, np.conj(z))
            assert np.linalg.norm(lower - upper.conj().T, 2) <= 1e-13 * (1 + np.linalg.norm(upper, 2))


def test_boundary_value_is_upper_limit(fixture_models):
    for model in fixture_models:
        points = exceptional_points(model)
        for lam in np.linspace(-3.1, 3.1, 25):
            if any(abs(lam - p) < 0.25 for p in points):
                continue
            limit = boundary_value(model, lam)
            near = evaluate(model, lam + 1e-7j)
            assert np.linalg.norm(limit - near, 2) <= 1e-5 * (1 + np.linalg.norm(limit, 2))


def test_derivative_matches_finite_difference(fixture_models):
    h = 1e-5
    for model in fixture_models:
        for z in (0.3 + 0.7j, -1.2 + 1.5j, 2.2 + 0.5j):
            exact = derivative(model, z)
            approx = (evaluate(model, z + h) - evaluate(model, z - h)) / (2 * h)
            assert np.linalg.norm(exact - approx, 2) <= 1e-7 * (1 + np.linalg.norm(exact, 2))


def test_box_pole_model_has_full_rank_imaginary_part():
    value = boundary_value(box_pole_model(), 0.5)
    imag = (value - value.conj().T) / 2j
    assert np.linalg.eigvalsh(imag).min() > 0
