import itertools
import json
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cyclic_designs import basisgen, cyclic, designlib, matcore
from cyclic_designs.designlib import Constellation
from cyclic_designs.errors import ContractViolation, InvalidInputError

U1 = np.array([[1, -1j], [1, 1j]]) / np.sqrt(2)
F3 = np.exp(2j * np.pi * np.outer(range(3), range(3)) / 3) / np.sqrt(3)


def brute_frame_potential(vectors, t):
    m = len(vectors)
    return sum(abs(np.vdot(a, b)) ** (2 * t) for a in vectors for b in vectors) / m ** 2


def u1_bases():
    return [np.linalg.matrix_power(U1, j) for j in range(3)]


def random_unitary(dim, seed):
    return matcore.expm_hermitian(np.random.default_rng(seed).normal(scale=3, size=dim * dim - 1))


def test_frame_potential_single_basis():
    assert designlib.frame_potential(Constellation.from_bases([np.eye(2)]), 1) == pytest.approx(0.5)


def test_frame_potential_u1_saturates():
    c = Constellation.from_bases(u1_bases())
    assert designlib.frame_potential(c, 2) == pytest.approx(1 / 3, abs=1e-14)
    assert designlib.frame_potential(c, 2) == pytest.approx(brute_frame_potential(list(c.vectors), 2), abs=1e-15)


def test_frame_potential_antipodal_pair():
    assert designlib.frame_potential(Constellation(np.eye(2)), 2) == pytest.approx(0.5)


def test_frame_potential_rejects_empty():
    with pytest.raises(InvalidInputError):
        Constellation(np.zeros((0, 2)))


@pytest.mark.parametrize("d,t,expected", [(2, 2, 1 / 3), (3, 2, 1 / 6), (2, 4, 1 / 5)])
def test_welch_bound(d, t, expected):
    assert designlib.welch_bound(d, t) == pytest.approx(expected)


def test_certify_u1_and_no_four_design():
    c = Constellation.from_bases(u1_bases())
    cert = designlib.certify_projective_design(c, 2)
    assert cert.is_design and cert.epsilon < 1e-10
    assert cert.epsilon == pytest.approx(cert.frame_potential * 3 - 1, abs=1e-12)
    cert4 = designlib.certify_projective_design(c, 4)
    assert not cert4.is_design and cert4.epsilon > 0.01


def test_certify_construction_one():
    u = cyclic.construction_one(1)
    c = Constellation.from_bases([np.linalg.matrix_power(u, j) for j in range(5)])
    assert designlib.certify_projective_design(c, 2).epsilon < 1e-10


def test_decohere_computational_vertices():
    pts = designlib.decohere(Constellation(np.eye(3))).points
    assert np.array_equal(pts, np.eye(3))


def test_decohere_qubit_angle():
    theta = np.arcsin(np.sqrt(2 / 3))
    psi = np.array([[np.cos(theta / 2), np.sin(theta / 2)]])
    p = designlib.decohere(Constellation(psi)).points[0]
    assert np.allclose(p, [0.5 + 1 / np.sqrt(12), 0.5 - 1 / np.sqrt(12)], atol=1e-15)


def test_decohere_golden_columns_are_permutations():
    g = basisgen.golden_basis().matrix
    pts = designlib.decohere(Constellation(g.T)).points
    ref = np.sort(pts[0])
    assert all(np.allclose(np.sort(p), ref) for p in pts)


def test_decohere_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        designlib.decohere(Constellation(np.eye(2)), np.eye(3))


@pytest.mark.parametrize("d,ks,expected", [
    (3, [1], Fraction(1, 3)), (3, [2], Fraction(1, 6)), (3, [1, 1], Fraction(1, 12)),
])
def test_simplex_average_examples(d, ks, expected):
    assert designlib.simplex_monomial_average(d, ks) == expected


@pytest.mark.parametrize("d", range(2, 9))
def test_simplex_average_second_moment(d):
    assert designlib.simplex_monomial_average(d, [2]) == Fraction(2, d * (d + 1))


def test_simplex_average_against_dirichlet_sampling():
    rng = np.random.default_rng(7)
    x = rng.dirichlet(np.ones(4), size=400_000)
    ks = (2, 1, 0, 1)
    vals = np.prod(x ** np.array(ks), axis=1)
    se = vals.std() / np.sqrt(len(vals))
    assert abs(vals.mean() - float(designlib.simplex_monomial_average(4, ks))) < 4 * se


def test_simplex_design_qubit_points():
    x = 1 / np.sqrt(12)
    s = designlib.SimplexPointSet([[0.5 + x, 0.5 - x], [0.5 - x, 0.5 + x]])
    assert designlib.certify_simplex_design(s, 3).passed
    assert not designlib.certify_simplex_design(s, 4).passed


def test_simplex_design_vertices():
    s = designlib.SimplexPointSet(np.eye(3))
    assert designlib.certify_simplex_design(s, 1).passed
    res = designlib.certify_simplex_design(s, 2)
    assert not res.passed and res.max_residual == pytest.approx(1 / 3 - 1 / 6)


def test_simplex_point_set_validation():
    with pytest.raises(InvalidInputError):
        designlib.SimplexPointSet([[0.7, 0.7]])
    with pytest.raises(InvalidInputError):
        designlib.SimplexPointSet([[1.1, -0.1]])
    s = designlib.SimplexPointSet([[1 + 1e-13, -1e-13]])
    assert s.points.min() == 0.0


def test_mub_examples():
    assert designlib.certify_mub(u1_bases()).passed
    assert not designlib.certify_mub([np.eye(3), F3, F3 @ F3]).passed
    assert not designlib.certify_mub([np.eye(2), np.eye(2)]).passed
    with pytest.raises(ContractViolation):
        designlib.certify_mub([np.eye(2), 2 * np.eye(2)])


def test_uncertainty_examples():
    e, v = np.linalg.eig(U1)
    for a in range(2):
        h = designlib.uncertainty_average(v[:, a] / np.linalg.norm(v[:, a]), u1_bases())
        assert h == pytest.approx(np.log2(3) - 1, abs=1e-12)
    assert designlib.uncertainty_average([1, 0], [np.eye(2)]) == 0
    assert designlib.uncertainty_average(np.ones(2) / np.sqrt(2), [np.eye(2)]) == pytest.approx(1)
    with pytest.raises(InvalidInputError):
        designlib.uncertainty_average([1, 0, 0], [np.eye(2)])


def test_constellation_json_round_trip():
    c = Constellation.from_bases(u1_bases())
    back = Constellation.from_json(json.loads(json.dumps(c.to_json())))
    assert np.array_equal(back.vectors, c.vectors) and np.array_equal(back.weights, c.weights)


def test_constellation_rejects_non_unit():
    with pytest.raises(InvalidInputError):
        Constellation([[1.0, 0.1]])


def random_constellation(seed, dim, m):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(m, dim)) + 1j * rng.normal(size=(m, dim))
    return Constellation(z / np.linalg.norm(z, axis=1, keepdims=True))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4), st.integers(1, 12), st.integers(1, 4))
def test_welch_inequality(seed, dim, m, t):
    c = random_constellation(seed, dim, m)
    assert designlib.frame_potential(c, t) >= designlib.welch_bound(dim, t) - 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4))
def test_frame_potential_unitary_invariance(seed, dim):
    c = random_constellation(seed, dim, 7)
    u = random_unitary(dim, seed + 1)
    rotated = Constellation(c.vectors @ u.T)
    for t in (1, 2, 3):
        assert abs(designlib.frame_potential(c, t) - designlib.frame_potential(rotated, t)) < 1e-12


@pytest.mark.parametrize("bases_fn", [
    u1_bases,
    lambda: [np.eye(3)] + [np.diag(np.exp(2j * np.pi * np.arange(3) ** 2 * j / 3)) @ F3 for j in range(3)],
])
def test_designs_are_nested(bases_fn):
    c = Constellation.from_bases(bases_fn())
    assert designlib.certify_projective_design(c, 2).is_design
    assert designlib.certify_projective_design(c, 1).is_design


@pytest.mark.parametrize("seed", range(8))
def test_decoherence_of_design_is_simplex_design(seed):
    c = Constellation.from_bases(u1_bases())
    b = random_unitary(2, seed)
    assert designlib.certify_simplex_design(designlib.decohere(c, b), 2, tol=1e-10).passed
    assert designlib.certify_simplex_design(designlib.decohere(c, b), 3, tol=1e-10).passed


def _mub_d3():
    return [np.eye(3)] + [np.diag(np.exp(2j * np.pi * np.arange(3) ** 2 * j / 3)) @ F3 for j in range(3)]


@pytest.mark.parametrize("bases", [u1_bases(), _mub_d3()])
def test_mub_iff_two_design_positive(bases):
    c = Constellation.from_bases(bases)
    assert designlib.certify_mub(bases).passed
    assert designlib.certify_projective_design(c, 2).is_design


@pytest.mark.parametrize("dim,seed", [(2, 0), (2, 1), (3, 2), (3, 3)])
def test_mub_iff_two_design_negative(dim, seed):
    bases = [random_unitary(dim, seed + 10 * j) for j in range(dim + 1)]
    c = Constellation.from_bases(bases)
    assert not designlib.certify_mub(bases).passed
    assert not designlib.certify_projective_design(c, 2).is_design


def test_monomial_enumeration_counts():
    # number of monomials of degree 1..t in d variables
    assert len(list(designlib.monomial_exponents(3, 3))) == sum(comb(3 + s - 1, s) for s in (1, 2, 3))
    assert all(sum(ks) >= 1 for ks in designlib.monomial_exponents(4, 2))
    assert len(set(designlib.monomial_exponents(4, 3))) == len(list(designlib.monomial_exponents(4, 3)))
    assert set(itertools.chain.from_iterable(designlib.monomial_exponents(2, 1))) == {0, 1}
