import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from statvac.fields import (
    LORENTZIAN,
    FieldError,
    MetricField,
    SingularMetricError,
    TensorField,
    compose,
    inner,
    norm2,
    one_form,
    raise_form,
    sym2_field,
    trace_g,
)
from statvac.grid import ChartGrid, periodic_axis

from geometries import flat_torus, random_periodic_metric


def test_shape_validation():
    grid, m = flat_torus(2, 8)
    with pytest.raises(FieldError):
        TensorField(grid, 1, 0, np.zeros(grid.shape + (3,)))


def test_symmetry_validation():
    grid, _ = flat_torus(2, 8)
    bad = np.zeros(grid.shape + (2, 2))
    bad[..., 0, 1] = 1.0
    with pytest.raises(FieldError):
        TensorField(grid, 2, 0, bad, symmetric=True)
    ok = bad + np.swapaxes(bad, -1, -2)
    sym2_field(grid, ok)


def test_singular_metric_reports_node():
    grid = ChartGrid((periodic_axis("x", 8), periodic_axis("y", 8)))
    comps = np.zeros(grid.shape + (2, 2))
    comps[..., 0, 0] = 1.0
    comps[..., 1, 1] = 1.0
    comps[3, 5, 1, 1] = 0.0
    with pytest.raises(SingularMetricError) as err:
        MetricField(grid, comps)
    assert err.value.node_index == (3, 5)


def test_signature_check():
    grid, _ = flat_torus(2, 8)
    comps = np.zeros(grid.shape + (2, 2))
    comps[..., 0, 0] = -1.0
    comps[..., 1, 1] = 1.0
    with pytest.raises(FieldError):
        MetricField(grid, comps)  # declared riemannian, one negative eigenvalue
    MetricField(grid, comps, signature=LORENTZIAN)


def test_inverse_and_det_cached(rng):
    grid, m = random_periodic_metric(rng)
    ident = np.einsum("...ij,...jk->...ik", m.comps, m.inv)
    eye = np.zeros_like(ident)
    eye[..., 0, 0] = eye[..., 1, 1] = 1.0
    assert np.max(np.abs(ident - eye)) < 1e-12
    assert np.max(np.abs(m.det - np.linalg.det(m.comps))) < 1e-12


def test_compose_trace_consistency(rng):
    grid, m = random_periodic_metric(rng)
    w = rng.standard_normal(grid.shape + (2, 2))
    w = w - np.swapaxes(w, -1, -2)  # antisymmetric
    ww = compose(m, w, w)
    # trace of the composition is the full contraction
    assert np.max(np.abs(trace_g(m, ww) - norm2(m, w))) < 1e-10
    # and it is positive semidefinite in the antisymmetric case
    eigs = np.linalg.eigvalsh(np.einsum("...ik,...kj->...ij", m.inv, ww))
    assert eigs.min() > -1e-10


def test_raise_form_inner(rng):
    grid, m = random_periodic_metric(rng)
    w = rng.standard_normal(grid.shape + (2,))
    up = raise_form(m, w)
    assert np.max(np.abs(np.einsum("...i,...i->...", up, w) - norm2(m, w))) < 1e-12


@settings(max_examples=15, deadline=None)
@given(scale=st.floats(min_value=0.1, max_value=5.0))
def test_inner_linear_scaling(scale):
    grid, m = flat_torus(2, 8)
    a = np.ones(grid.shape + (2, 2))
    np.testing.assert_allclose(inner(m, scale * a, a), scale * inner(m, a, a))


def test_tensor_arithmetic():
    grid, _ = flat_torus(2, 8)
    a = one_form(grid, np.ones(grid.shape + (2,)))
    b = one_form(grid, 2 * np.ones(grid.shape + (2,)))
    assert (a + b).comps[0, 0, 0] == 3.0
    assert (b - a).comps[0, 0, 0] == 1.0
    assert (2.0 * a).comps[0, 0, 0] == 2.0
    field_scale = np.full(grid.shape, 3.0)
    assert (a * field_scale).comps[0, 0, 1] == 3.0
    with pytest.raises(FieldError):
        a + sym2_field(grid, np.zeros(grid.shape + (2, 2)))
