import json

import numpy as np
import pytest

from cyclic_designs import basisgen, cyclic, designlib, diffsets
from cyclic_designs.errors import ContractViolation, InvalidInputError


def golden_fano():
    return cyclic.assemble(basisgen.golden_basis(), diffsets.make_difference_set(7, [1, 2, 4]))


def order_four():
    return cyclic.assemble(basisgen.two_amplitude_basis(basisgen.skew_hadamard(4)), diffsets.power_of_two_set(4))


def test_u1_literal():
    assert np.allclose(cyclic.qubit_u1(), np.array([[1, -1j], [1, 1j]]) / np.sqrt(2))


def test_u1_design():
    d = cyclic.u1_design()
    assert designlib.certify_mub(d.bases()).passed
    assert cyclic.certify(d, 2).epsilon < 1e-10
    u3 = np.linalg.matrix_power(cyclic.qubit_u1(), 3)
    assert np.allclose(u3, u3[0, 0] * np.eye(2))


def test_diag_rows():
    u = cyclic.qubit_u1()
    assert np.allclose(np.diag(cyclic.diag_rows(u)), [u[0, 0], u[0, 1], u[1, 0], u[1, 1]])


def test_construction_one_level_one():
    u = cyclic.construction_one(1)
    assert u.shape == (4, 4)
    d = cyclic.construction_one_design(1)
    rep = cyclic.certify_bases_mub(d)
    assert rep.passed and rep.max_violation < 1e-10
    assert cyclic.certify(d, 2).epsilon < 1e-10


def test_construction_one_level_two_is_not_mub():
    d = cyclic.construction_one_design(2)
    assert d.dim == 16
    assert not cyclic.certify_bases_mub(d).passed


def test_construction_one_range():
    with pytest.raises(OverflowError):
        cyclic.construction_one(3, max_dim=64)


def test_golden_fano_design():
    d = golden_fano()
    assert d.k == 6 and d.numerators == (1, 2, 4)
    assert cyclic.certify(d, 2).epsilon < 1e-9
    assert cyclic.certify(d, 1).epsilon < 1e-10


def test_qubit_family_three_bases():
    d = cyclic.assemble(basisgen.qubit_basis(), diffsets.make_difference_set(3, [0, 1]))
    assert cyclic.certify(d, 2).is_design and cyclic.certify(d, 3).is_design


def test_power_of_two_design():
    assert cyclic.certify(order_four(), 2).epsilon < 1e-9


def test_assemble_rejects_mismatch():
    with pytest.raises(InvalidInputError):
        cyclic.assemble(basisgen.golden_basis(), diffsets.power_of_two_set(4))
    with pytest.raises(ContractViolation):
        cyclic.assemble(basisgen.golden_basis(), diffsets.DifferenceSet(7, (1, 2, 3)))


def test_qubit_family_matches_u1_frame_potential():
    a, b = cyclic.qubit_family(2), cyclic.u1_design()
    for t in (1, 2, 3, 4):
        assert cyclic.cyclic_frame_potential(a, t) == pytest.approx(cyclic.cyclic_frame_potential(b, t), abs=1e-13)


def test_qubit_family_k10():
    d = cyclic.qubit_family(10)
    assert cyclic.certify(d, 3).is_design and not cyclic.certify(d, 4).is_design


@pytest.mark.parametrize("k", range(2, 19))
def test_qubit_family_two_designs(k):
    assert cyclic.certify(cyclic.qubit_family(k), 2).is_design


def test_qubit_family_too_small():
    with pytest.raises(InvalidInputError):
        cyclic.qubit_family(1)


@pytest.mark.parametrize("factory", [cyclic.u1_design, golden_fano, order_four, lambda: cyclic.qubit_family(7)])
@pytest.mark.parametrize("t", [1, 2, 3])
def test_fast_frame_potential_matches_brute_force(factory, t):
    d = factory()
    assert cyclic.cyclic_frame_potential(d, t) == pytest.approx(designlib.frame_potential(d.constellation, t), abs=1e-13)


@pytest.mark.parametrize("factory", [golden_fano, order_four, lambda: cyclic.qubit_family(5)])
def test_assembled_design_invariants(factory):
    d = factory()
    assert cyclic.certify(d, 1).epsilon < 1e-10
    assert cyclic.closure_residual(d) < 1e-9
    # decoherence in the eigenbasis collapses to d points with (k+1)-fold multiplicity
    pts = designlib.decohere(d.constellation, d.eigenvectors).points
    reps = []
    for p in pts:
        if not any(np.max(np.abs(p - r)) < 1e-9 for r in reps):
            reps.append(p)
    assert len(reps) == d.dim
    counts = [sum(np.max(np.abs(p - r)) < 1e-9 for p in pts) for r in reps]
    assert counts == [d.k + 1] * d.dim


def test_constellation_entry_is_power_column():
    d = golden_fano()
    c = d.constellation
    j, beta = 3, 2
    assert np.allclose(c.vectors[j * d.dim + beta], np.linalg.matrix_power(d.generator, j)[:, beta], atol=1e-12)


def test_generator_matches_eigendata():
    d = golden_fano()
    recon = (d.eigenvectors * np.exp(1j * d.phases)) @ d.eigenvectors.conj().T
    assert np.max(np.abs(recon - d.generator)) < 1e-9


def test_from_generator_snaps_roots_of_unity():
    d = cyclic.from_generator(golden_fano().generator, 6)
    assert sorted(d.numerators) == [1, 2, 4]


def test_design_json_round_trip():
    d = golden_fano()
    js = json.loads(json.dumps(d.to_json()))
    assert js["phase_fractions"] == ["1/7", "2/7", "4/7"]
    back = cyclic.CyclicDesign.from_json(js)
    assert np.array_equal(back.generator, d.generator) and back.numerators == d.numerators


def test_design_json_rejects_inconsistent_eigendata():
    js = golden_fano().to_json()
    js["phases"] = [0.0, 0.0, 0.0]
    with pytest.raises(ContractViolation):
        cyclic.CyclicDesign.from_json(js)


def test_u1_eigenvectors_minimum_uncertainty():
    h = cyclic.eigenvector_uncertainties(cyclic.u1_design())
    assert np.allclose(h, np.log2(3) - 1, atol=1e-9)


@pytest.mark.parametrize("factory", [golden_fano, order_four, lambda: cyclic.qubit_family(9)])
def test_eigenvector_uncertainty_of_assembled_designs(factory):
    # every eigenvector sees the same decohered distribution in each basis
    d = factory()
    h = cyclic.eigenvector_uncertainties(d)
    assert np.allclose(h, np.log2(d.dim + 1) - 1, atol=1e-9)
