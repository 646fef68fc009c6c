import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import copy_state, hamiltonian_matrix
from qachem.anneal import ExactSolver
from qachem.isingmap import (CopyConfig, DegenerateRunError, map_to_polynomials,
                             rayleigh_quotient, rayleigh_quotients, reconstruct_state,
                             sign_gauge, solve_polynomial, svar, variational_minimize, zvar)
from qachem.poly import SpinPolynomial
from qachem.qubitham import QubitHamiltonian, diagonal_minimum, exact_diagonalize


def random_hamiltonian(rng, n, n_terms=8):
    mapping = {}
    for _ in range(n_terms):
        label = " ".join(f"{a}{q}" for q, a in enumerate(rng.choice(list("IXYZ"), size=n))
                         if a != "I") or "I"
        mapping[label] = mapping.get(label, 0.0) + rng.normal()
    return QubitHamiltonian.from_dict(n, mapping)


def dense(H):
    return hamiltonian_matrix([(t.factor_map, t.coefficient) for t in H.terms], H.n_qubits)


def all_configs(n, r):
    for values in itertools.product((1, -1), repeat=n * r + r):
        v = np.array(values, dtype=np.int8)
        yield CopyConfig(v[:n * r].reshape(n, r), v[n * r:])


@given(st.integers(0, 2**31 - 1), st.integers(1, 3), st.integers(1, 3))
def test_polynomials_match_state_vector(seed, n, r):
    rng = np.random.default_rng(seed)
    H = random_hamiltonian(rng, n)
    inst = map_to_polynomials(H, r)
    M = dense(H)
    X = rng.choice([-1, 1], size=(50, n * r + r)).astype(float)
    e, nrm = inst.compiled()[0](X), inst.compiled()[1](X)
    for row, ev, nv in zip(X, e, nrm):
        cfg = CopyConfig(row[:n * r].reshape(n, r), row[n * r:])
        psi = copy_state(cfg.bits, cfg.signs)
        assert ev == pytest.approx(np.vdot(psi, M @ psi).real, abs=1e-10)
        assert nv == pytest.approx(np.vdot(psi, psi).real, abs=1e-10)


def test_identity_hamiltonian():
    inst = map_to_polynomials(QubitHamiltonian.from_dict(2, {"I": 1.7}), 3)
    assert inst.energy_poly.allclose(inst.norm_poly * 1.7)


def test_single_z_r1():
    inst = map_to_polynomials(QubitHamiltonian.from_dict(1, {"Z0": 1.0}), 1)
    assert inst.energy_poly.allclose(SpinPolynomial(0.0, {(zvar(0, 1),): 1.0}))
    assert inst.norm_poly.allclose(SpinPolynomial(1.0))


def test_r1_keeps_only_diagonal_terms():
    H = QubitHamiltonian.from_dict(2, {"I": 0.5, "Z0": 0.3, "Z0 Z1": -0.2, "X0": 9.0, "Y0 Y1": 4.0})
    inst = map_to_polynomials(H, 1)
    expected = SpinPolynomial(0.5, {(zvar(0, 1),): 0.3, (zvar(0, 1), zvar(1, 1)): -0.2})
    assert inst.energy_poly.allclose(expected)


def test_reconstruct_state():
    cfg = CopyConfig(np.array([[1, 1], [-1, -1]]), np.array([1, -1]))
    assert np.allclose(reconstruct_state(cfg), 0)
    cfg = CopyConfig(np.array([[-1], [1]]), np.array([1]))
    psi = reconstruct_state(cfg)
    assert np.array_equal(psi, np.eye(4)[1])


@given(st.integers(0, 2**31 - 1))
def test_reconstruct_state_matches_oracle_and_norm(seed):
    rng = np.random.default_rng(seed)
    n, r = 3, 4
    cfg = CopyConfig.random(n, r, rng)
    psi = reconstruct_state(cfg)
    assert np.allclose(psi, copy_state(cfg.bits, cfg.signs))
    inst = map_to_polynomials(QubitHamiltonian.from_dict(n, {"I": 1.0}), r)
    assert inst.norm_poly.evaluate(cfg.assignment()) == pytest.approx(np.vdot(psi, psi).real)


def test_rayleigh_quotient_r1_is_diagonal_element():
    H = random_hamiltonian(np.random.default_rng(3), 3)
    inst = map_to_polynomials(H, 1)
    diag = H.diagonal()
    for b in range(8):
        bits = np.array([[1 - 2 * ((b >> i) & 1)] for i in range(3)])
        assert rayleigh_quotient(inst, CopyConfig(bits, np.array([1]))) == pytest.approx(diag[b])


def test_rayleigh_quotient_signals_zero_norm():
    inst = map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 2)
    cfg = CopyConfig(np.array([[1, 1]]), np.array([1, -1]))
    assert rayleigh_quotient(inst, cfg) is None
    q, nrm = rayleigh_quotients(inst, inst.config_vector(cfg)[None, :])
    assert np.isnan(q[0]) and nrm[0] == 0


def test_variational_bound_on_h2(h2_point):
    H = h2_point.hamiltonian
    e0 = exact_diagonalize(H)[0]
    rng = np.random.default_rng(0)
    for r in (2, 4):
        inst = map_to_polynomials(H, r)
        X = rng.choice([-1.0, 1.0], size=(5000, H.n_qubits * r + r))
        q, _ = rayleigh_quotients(inst, X)
        assert np.nanmin(q) >= e0 - 1e-9


def test_sign_flip_symmetry():
    rng = np.random.default_rng(5)
    H = random_hamiltonian(rng, 2)
    inst = map_to_polynomials(H, 3)
    for _ in range(50):
        cfg = CopyConfig.random(2, 3, rng)
        a, b = cfg.assignment(), CopyConfig(cfg.bits, -cfg.signs).assignment()
        assert inst.energy_poly.evaluate(a) == pytest.approx(inst.energy_poly.evaluate(b))
        assert inst.norm_poly.evaluate(a) == pytest.approx(inst.norm_poly.evaluate(b))


def best_quotient(inst):
    vals = [rayleigh_quotient(inst, c) for c in all_configs(inst.n, inst.r)]
    return min(v for v in vals if v is not None)


@pytest.mark.parametrize("seed", range(5))
def test_expressiveness_grows_with_two_more_copies(seed):
    # a cancelling pair of copies embeds every r-copy state in the (r+2)-copy set,
    # and doubling each copy embeds it in the 2r-copy set
    H = random_hamiltonian(np.random.default_rng(seed), 2)
    best = {r: best_quotient(map_to_polynomials(H, r)) for r in (1, 2, 3, 4)}
    assert best[3] <= best[1] + 1e-12
    assert best[4] <= best[2] + 1e-12
    assert best[2] <= best[1] + 1e-12
    assert best[4] >= exact_diagonalize(H)[0] - 1e-9


def test_one_more_copy_can_lose_expressiveness():
    # with +-1 amplitudes the amplitude sum has the parity of r, so three
    # copies cannot form |a> - |b> while two can
    inst2 = map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 2)
    inst3 = map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 3)
    assert best_quotient(inst2) == pytest.approx(-1.0)
    assert best_quotient(inst3) > -1.0 + 1e-3


def test_polynomial_dump_round_trip(h2_point):
    inst = map_to_polynomials(h2_point.hamiltonian, 2)
    text = inst.energy_poly.dumps()
    assert "z_0_1" in text and "s_2" in text
    assert SpinPolynomial.loads(text).allclose(inst.energy_poly, atol=0.0)


def test_sign_gauge():
    inst = map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 2)
    assert sign_gauge(inst) == {svar(1): 1}
    F = solve_polynomial(inst, 0.0)
    assert svar(1) not in F.variables
    assert sign_gauge(map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 1)) == {}


def test_shift_loop_x_r2():
    inst = map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 2)
    res = variational_minimize(inst, ExactSolver(), lam0=1.0)
    assert res.energy == pytest.approx(-1.0)
    psi = reconstruct_state(res.config)
    psi = psi / np.linalg.norm(psi)
    assert abs(np.vdot(psi, np.array([1, -1]) / np.sqrt(2))) == pytest.approx(1.0)
    assert res.iterations >= 1


@pytest.mark.parametrize("fix_sign", [True, False])
def test_shift_loop_r1_is_diagonal_minimum(h2_point, fix_sign):
    H = h2_point.hamiltonian
    inst = map_to_polynomials(H, 1)
    res = variational_minimize(inst, ExactSolver(), lam0=h2_point.e_hf + 1.0, fix_sign=fix_sign)
    assert res.energy == pytest.approx(diagonal_minimum(H)[0], abs=1e-12)


def test_shift_loop_upper_bounds_and_improves(h2_point):
    H = h2_point.hamiltonian
    e0 = exact_diagonalize(H)[0]
    inst = map_to_polynomials(H, 2)
    res = variational_minimize(inst, ExactSolver(), lam0=0.0)
    assert e0 - 1e-9 <= res.energy <= h2_point.e_hf + 1e-9
    lams = [s.lam for s in res.trace]
    assert all(b < a for a, b in zip(lams, lams[1:]))


class ZeroNormSampler:
    """Returns only configurations whose copies cancel."""

    def sample(self, model):
        from qachem.anneal import SampleSet
        cfg = np.ones((1, model.num_variables), dtype=np.int8)
        for t, v in enumerate(model.variables):
            if v[0] == "s" and v[1] == 2:
                cfg[0, t] = -1
        return SampleSet.from_samples(model.variables, cfg, model.energies(cfg))


def test_degenerate_run_error():
    inst = map_to_polynomials(QubitHamiltonian.from_dict(1, {"X0": 1.0}), 2)
    with pytest.raises(DegenerateRunError, match="4 attempts"):
        variational_minimize(inst, ZeroNormSampler(), lam0=1.0, max_retries=3)


def test_rejects_bad_r():
    with pytest.raises(ValueError):
        map_to_polynomials(QubitHamiltonian.from_dict(1, {"Z0": 1.0}), 0)
