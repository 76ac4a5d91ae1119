"""Moment matrices, Cholesky determinants, and Christoffel functions."""

import math

import numpy as np
import pytest

from optdesign import (
    SingularGramError,
    christoffel,
    christoffel_many,
    gaussian_weight,
    make_design,
    moment_matrix,
    monomial_basis,
    orthonormal_factor,
    unit_weight,
)


def _random_design(rng, m, d=1, complex_atoms=False):
    pts = rng.uniform(-1, 1, (m, d))
    if complex_atoms:
        pts = pts + 1j * rng.uniform(-1, 1, (m, d))
    w = rng.uniform(0.1, 1.0, m)
    return make_design(pts, w / w.sum())


def test_moment_matrix_matches_direct_sum():
    # oracle: assemble entry by entry from the definition
    rng = np.random.default_rng(11)
    design = _random_design(rng, 6, complex_atoms=True)
    weight = gaussian_weight()
    s = 2
    basis = monomial_basis(1, s)
    mm = moment_matrix(design, weight, s, basis)
    z = design.points[:, 0]
    wv = np.exp(-np.abs(z) ** 2) ** (2 * s)
    direct = np.zeros((3, 3), dtype=complex)
    for i, ai in enumerate(basis.indices):
        for j, aj in enumerate(basis.indices):
            direct[i, j] = np.sum(design.weights * wv * np.conj(z ** ai[0]) * z ** aj[0])
    assert np.allclose(mm.matrix, direct, rtol=1e-13, atol=1e-15)
    assert np.allclose(mm.matrix, mm.matrix.conj().T)


def test_log_det_matches_slogdet():
    rng = np.random.default_rng(5)
    design = _random_design(rng, 7, d=2)
    mm = moment_matrix(design, unit_weight(), 1, monomial_basis(2, 1))
    sign, ref = np.linalg.slogdet(mm.matrix)
    assert sign == pytest.approx(1.0)
    assert mm.log_det == pytest.approx(ref, abs=1e-12)
    assert mm.log_det_monomial == mm.log_det  # monomial basis shifts by zero


def test_singular_design_reports_minus_inf_then_raises():
    design = make_design([0.0, 1.0], [0.5, 0.5])
    mm = moment_matrix(design, unit_weight(), 2, monomial_basis(1, 2))
    assert mm.log_det == -math.inf
    with pytest.raises(SingularGramError) as err:
        orthonormal_factor(mm, unit_weight())
    assert err.value.pivot >= 1


def test_near_singular_design_is_refused():
    design = make_design([0.0, 1e-9, 1.0], [0.4, 0.3, 0.3])
    mm = moment_matrix(design, unit_weight(), 2, monomial_basis(1, 2))
    with pytest.raises(SingularGramError):
        orthonormal_factor(mm, unit_weight())


def test_christoffel_at_atoms_of_square_design():
    # for n atoms spanning the n-dimensional space, K(z_k) = 1 / mu_k
    design = make_design([-1.0, 0.1, 0.9], [0.2, 0.5, 0.3])
    mm = moment_matrix(design, unit_weight(), 2, monomial_basis(1, 2))
    ev = orthonormal_factor(mm, unit_weight())
    for z, mu in zip(design.points, design.weights):
        assert christoffel(ev, z) == pytest.approx(1.0 / mu, rel=1e-11)


def test_christoffel_trace_identity():
    # integrating K against its own design gives the space dimension
    rng = np.random.default_rng(2)
    design = _random_design(rng, 8, complex_atoms=True)
    weight = gaussian_weight()
    mm = moment_matrix(design, weight, 3, monomial_basis(1, 3))
    ev = orthonormal_factor(mm, weight)
    vals = christoffel_many(ev, design.points)
    assert float(design.weights @ vals) == pytest.approx(4.0, rel=1e-11)


def test_christoffel_batch_matches_singles():
    rng = np.random.default_rng(9)
    design = _random_design(rng, 5)
    mm = moment_matrix(design, unit_weight(), 1, monomial_basis(1, 1))
    ev = orthonormal_factor(mm, unit_weight())
    pts = np.array([[0.3], [-0.7], [1.0]])
    batch = christoffel_many(ev, pts)
    singles = [christoffel(ev, p) for p in pts]
    assert np.allclose(batch, singles, rtol=1e-15)
    assert np.all(batch > 0)


def test_dimension_mismatch_rejected():
    design = make_design([[0.0, 0.0]], [1.0])
    with pytest.raises(ValueError):
        moment_matrix(design, unit_weight(), 1, monomial_basis(1, 1))
