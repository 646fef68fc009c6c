import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import (boys_erf, boys_quadrature, s_orbital_overlap_quadrature,
                     s_orbital_self_coulomb)
from qachem.molint import (ANGSTROM_TO_BOHR, ActiveSpaceError, CoincidentNucleiError, Geometry,
                           UnsupportedFeatureError, active_space, boys, build_basis, diatomic,
                           dump_integrals, full_space, integrals, load_integrals, load_sto3g,
                           make_shell, mo_transform, nuclear_repulsion, parse_basis, scf_rhf)


def test_boys_at_zero():
    assert boys(0, 0.0) == 1.0
    assert boys(2, 0.0) == pytest.approx(0.2, rel=1e-15)


def test_boys_matches_erf_form():
    assert boys(0, 1.0) == pytest.approx(boys_erf(1.0), rel=1e-12)
    assert boys(0, 1.0) == pytest.approx(0.746824132812427, rel=1e-12)


@pytest.mark.parametrize("m", [0, 1, 3, 6, 8])
@pytest.mark.parametrize("x", [1e-6, 0.3, 2.0, 11.9, 12.1, 30.0, 50.0])
def test_boys_against_quadrature(m, x):
    assert boys(m, x) == pytest.approx(boys_quadrature(m, x), rel=1e-12)


@given(st.integers(0, 7), st.floats(0.0, 50.0))
def test_boys_downward_recursion(m, x):
    lhs = boys(m, x)
    rhs = (2 * x * boys(m + 1, x) + math.exp(-x)) / (2 * m + 1)
    assert abs(lhs - rhs) <= 1e-11


def test_boys_rejects_negative():
    with pytest.raises(ValueError):
        boys(0, -1.0)
    with pytest.raises(ValueError):
        boys(-1, 1.0)


def test_sto3g_table_has_three_primitives():
    table = load_sto3g()
    assert set(table) >= {"H", "Li"}
    for shells in table.values():
        for L, exps, coefs in shells:
            assert len(exps) == len(coefs) == 3
            assert all(e > 0 for e in exps)


def test_parse_basis_rejects_short_line():
    with pytest.raises(ValueError):
        parse_basis("H 0 1.0 1.0")


def test_d_shell_unsupported():
    with pytest.raises(UnsupportedFeatureError):
        make_shell((0, 0, 0), 2, [1.0, 2.0, 3.0], [0.3, 0.3, 0.3])


def test_h2_overlap_matches_quadrature():
    ints = integrals(diatomic("H", "H", 1.4011))
    assert ints.S[0, 1] == pytest.approx(s_orbital_overlap_quadrature(1.4011), abs=1e-9)
    assert ints.S[0, 1] == pytest.approx(0.6589, abs=5e-4)


def test_self_overlap_is_one():
    ints = integrals(diatomic("Li", "H", 3.0))
    assert np.allclose(np.diag(ints.S), 1.0, atol=1e-12)


def test_single_h_coulomb():
    ints = integrals(Geometry.from_atoms([("H", (0.0, 0.0, 0.0))]))
    assert ints.eri[0, 0, 0, 0] == pytest.approx(s_orbital_self_coulomb(), rel=1e-10)
    assert ints.eri[0, 0, 0, 0] == pytest.approx(0.7746, abs=1e-4)


def test_integral_symmetries_lih():
    ints = integrals(diatomic("Li", "H", 1.6, "angstrom"))
    assert ints.n_spatial == 6
    for M in (ints.S, ints.T, ints.V):
        assert np.array_equal(M, M.T)
    assert np.all(np.linalg.eigvalsh(ints.S) > 0)
    g = ints.eri
    for perm in [(1, 0, 3, 2), (2, 3, 0, 1), (2, 1, 0, 3), (0, 3, 2, 1)]:
        assert np.allclose(g, g.transpose(perm), atol=1e-14)


def test_integrals_against_pyscf():
    pyscf = pytest.importorskip("pyscf")
    ints = integrals(diatomic("Li", "H", 1.6, "angstrom"))
    mol = pyscf.gto.M(atom="Li 0 0 0; H 0 0 1.6", basis="sto-3g", unit="angstrom",
                      cart=True, verbose=0)
    assert np.allclose(ints.S, mol.intor("int1e_ovlp"), atol=1e-6)
    assert np.allclose(ints.T, mol.intor("int1e_kin"), atol=1e-6)
    assert np.allclose(ints.V, mol.intor("int1e_nuc"), atol=1e-6)
    assert np.allclose(ints.eri_chem, mol.intor("int2e"), atol=1e-6)


def test_nuclear_repulsion():
    assert nuclear_repulsion(Geometry.from_atoms([("H", (0, 0, 0))])) == 0.0
    assert nuclear_repulsion(diatomic("H", "H", 1.4011)) == pytest.approx(1 / 1.4011)
    assert nuclear_repulsion(diatomic("Li", "H", 3.0)) == pytest.approx(1.0)
    with pytest.raises(CoincidentNucleiError):
        nuclear_repulsion(diatomic("H", "H", 0.0))


def test_geometry_validation():
    with pytest.raises(ValueError):
        Geometry(())
    with pytest.raises(ValueError):
        Geometry.from_atoms([("H", 0, (0, 0, 0))])
    g = diatomic("H", "H", 1.0, "angstrom")
    assert g.atoms[1].position[2] == pytest.approx(ANGSTROM_TO_BOHR)


def test_scf_h2_energy_and_orthonormality():
    ints = integrals(diatomic("H", "H", 1.4011))
    scf = scf_rhf(ints, 2)
    assert scf.converged
    assert scf.e_hf_total == pytest.approx(-1.1167, abs=1e-4)
    C = scf.mo_coefficients
    assert np.allclose(C.T @ ints.S @ C, np.eye(2), atol=1e-8)
    D = scf.density
    assert np.allclose(D @ ints.S @ D, 2 * D, atol=1e-7)
    assert scf.e_hf_total == pytest.approx(scf.e_electronic + ints.nuclear_repulsion)


def test_scf_lih_against_pyscf():
    pyscf = pytest.importorskip("pyscf")
    ints = integrals(diatomic("Li", "H", 1.6, "angstrom"))
    scf = scf_rhf(ints, 4)
    mol = pyscf.gto.M(atom="Li 0 0 0; H 0 0 1.6", basis="sto-3g", unit="angstrom", verbose=0)
    ref = pyscf.scf.RHF(mol).run(conv_tol=1e-12)
    assert scf.e_hf_total == pytest.approx(ref.e_tot, abs=1e-6)
    assert len(scf.orbital_energies) == 6


def test_mo_transform_identity():
    ints = integrals(diatomic("H", "H", 1.4))
    mo = mo_transform(ints, np.eye(2))
    assert np.allclose(mo.h, ints.hcore)
    assert np.allclose(mo.g, ints.eri)
    with pytest.raises(ValueError):
        mo_transform(ints, np.eye(3))


@given(st.integers(0, 2**31 - 1))
def test_mo_transform_random_orthogonal(seed):
    ints = integrals(diatomic("Li", "H", 3.0))
    rng = np.random.default_rng(seed)
    C, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    mo = mo_transform(ints, C)
    g = mo.g
    for perm in [(1, 0, 3, 2), (2, 3, 0, 1), (2, 1, 0, 3)]:
        assert np.allclose(g, g.transpose(perm), atol=1e-12)
    # direct contraction, one index at a time
    ref = ints.eri
    for axis in range(4):
        ref = np.moveaxis(np.tensordot(ref, C, axes=([axis], [0])), -1, axis)
    assert np.allclose(g, ref, atol=1e-12)
    assert np.trace(mo.h) == pytest.approx(np.trace(C.T @ ints.hcore @ C))


def test_active_space_without_freezing_is_identity(h2_mo):
    _, _, mo = h2_mo
    act = active_space(mo, (), None, 2)
    assert np.allclose(act.h, mo.h)
    assert np.allclose(act.g, mo.g)
    assert act.core_energy == mo.nuclear_repulsion
    assert full_space(mo, 2).n_active_electrons == 2


def test_freezing_all_occupied_gives_hf_energy():
    ints = integrals(diatomic("Li", "H", 1.6, "angstrom"))
    scf = scf_rhf(ints, 4)
    mo = mo_transform(ints, scf.mo_coefficients)
    act = active_space(mo, (0, 1), (2, 3), 4)
    assert act.n_active_electrons == 0
    assert act.core_energy == pytest.approx(scf.e_hf_total, abs=1e-10)


def test_lih_two_orbital_active_space():
    ints = integrals(diatomic("Li", "H", 1.6, "angstrom"))
    scf = scf_rhf(ints, 4)
    act = active_space(mo_transform(ints, scf.mo_coefficients), (0,), (1, 2), 4)
    assert 2 * act.n_spatial == 4
    assert act.n_active_electrons == 2


def test_active_space_errors(h2_mo):
    _, _, mo = h2_mo
    with pytest.raises(ActiveSpaceError):
        active_space(mo, (0,), (0, 1), 2)
    with pytest.raises(ActiveSpaceError):
        active_space(mo, (0,), None, 1)
    with pytest.raises(ActiveSpaceError):
        active_space(mo, (), (5,), 2)


def test_integral_file_round_trip(tmp_path, h2_mo):
    _, _, mo = h2_mo
    act = active_space(mo, (), None, 2)
    path = tmp_path / "ints.txt"
    dump_integrals(path, act)
    back = load_integrals(path)
    assert back.n_active_electrons == 2
    assert np.array_equal(back.h, act.h)
    assert np.array_equal(back.g, act.g)
    assert back.core_energy == act.core_energy


def test_basis_placed_on_every_atom():
    shells = build_basis(diatomic("Li", "H", 3.0))
    assert [s.L for s in shells] == [0, 0, 1, 0]
    assert sum(s.size for s in shells) == 6
