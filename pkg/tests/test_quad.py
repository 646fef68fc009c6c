import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import enumerate_polynomial
from qachem.anneal import brute_force_min
from qachem.poly import BooleanPolynomial, SpinPolynomial
from qachem.quad import (BINARY, SPIN, PENALTY_POLICIES, QuadraticModel, complete_ancillas,
                         lift_solution, quadratize, record_pairs, reduce_degree, to_binary,
                         to_boolean, to_spin, to_spin_polynomial)


def random_spin_poly(rng, n_vars=None, max_degree=6, n_terms=None) -> SpinPolynomial:
    n_vars = n_vars or int(rng.integers(3, 13))
    n_terms = n_terms or int(rng.integers(2, 9))
    terms = {}
    for _ in range(n_terms):
        d = int(rng.integers(1, min(max_degree, n_vars) + 1))
        m = tuple(sorted(("x", int(i)) for i in rng.choice(n_vars, size=d, replace=False)))
        terms[m] = terms.get(m, 0.0) + float(np.round(rng.normal(), 3))
    return SpinPolynomial(float(rng.normal()), terms)


def spin_assignments(variables):
    for values in itertools.product((1, -1), repeat=len(variables)):
        yield dict(zip(variables, values))


def test_boolean_constant_and_single_variable():
    assert to_boolean(SpinPolynomial(2.5)).constant == 2.5
    b = to_boolean(SpinPolynomial(0.0, {("a",): 1.0}))
    assert b.constant == 1.0 and b.terms == {("a",): -2.0}


@given(st.integers(0, 2**31 - 1))
def test_boolean_round_trip(seed):
    p = random_spin_poly(np.random.default_rng(seed), n_vars=8)
    back = to_spin_polynomial(to_boolean(p))
    assert back.allclose(p, atol=1e-12)
    b = to_boolean(p)
    for a in spin_assignments(p.variables):
        x = {v: (1 - s) // 2 for v, s in a.items()}
        assert b.evaluate(x) == pytest.approx(p.evaluate(a), abs=1e-9)


def test_model_domain_round_trip():
    m = QuadraticModel(["a", "b"], {"a": 0.5}, {("a", "b"): -1.0}, 0.25, SPIN)
    b = to_binary(m)
    assert b.domain == BINARY
    for s in itertools.product((1, -1), repeat=2):
        x = np.array([(1 - v) // 2 for v in s])
        assert b.energies(x[None, :])[0] == pytest.approx(m.energies(np.array([s]))[0])
    back = to_spin(b)
    assert back.linear == pytest.approx(m.linear) and back.offset == pytest.approx(m.offset)


def test_model_dump_round_trip():
    m = QuadraticModel([("z", 0, 1), ("s", 2)], {("z", 0, 1): 0.5},
                       {(("z", 0, 1), ("s", 2)): -1.25}, 3.0, SPIN)
    back = QuadraticModel.loads(m.dumps())
    assert back.variables == m.variables
    assert back.linear == m.linear and back.quadratic == m.quadratic
    assert back.offset == m.offset and back.domain == SPIN


def test_self_coupling_rejected():
    with pytest.raises(ValueError):
        QuadraticModel(["a"], {}, {("a", "a"): 1.0})


def test_quadratic_input_is_unchanged():
    p = SpinPolynomial(1.0, {("a",): 0.5, ("a", "b"): -2.0})
    model, record = quadratize(p)
    assert len(record) == 0
    assert model.variables == ["a", "b"]
    for a in spin_assignments(["a", "b"]):
        assert model.energy(a) == pytest.approx(p.evaluate(a))


def test_single_cubic_term():
    p = BooleanPolynomial(0.0, {("x1", "x2", "x3"): -1.0})
    model, record = reduce_degree(p)
    assert len(record) == 1
    sub = record.substitutions[0]
    assert (sub.a, sub.b) == ("x1", "x2")
    assert sub.penalty == pytest.approx(2.0)
    best = min(model.energy(dict(zip(model.variables, v)))
               for v in itertools.product((0, 1), repeat=4))
    assert best == pytest.approx(-1.0)


def test_most_frequent_pair_with_lexicographic_ties():
    p = BooleanPolynomial(0.0, {("a", "c", "d"): 1.0, ("b", "c", "d"): 1.0, ("a", "b", "e"): 1.0})
    _, record = reduce_degree(p)
    assert (record.substitutions[0].a, record.substitutions[0].b) == ("c", "d")
    p = BooleanPolynomial(0.0, {("a", "b", "c"): 1.0})
    _, record = reduce_degree(p)
    assert (record.substitutions[0].a, record.substitutions[0].b) == ("a", "b")


@pytest.mark.parametrize("policy", PENALTY_POLICIES)
@given(seed=st.integers(0, 2**31 - 1))
def test_consistent_assignments_preserve_value(policy, seed):
    p = random_spin_poly(np.random.default_rng(seed), n_vars=7)
    model, record = quadratize(p, policy)
    for a in spin_assignments(p.variables):
        full = complete_ancillas(a, record, SPIN)
        assert model.energy(full) == pytest.approx(p.evaluate(a), abs=1e-9)
        lifted, ok = lift_solution(full, record, SPIN)
        assert ok and lifted == a


@pytest.mark.parametrize("policy", PENALTY_POLICIES)
@given(seed=st.integers(0, 2**31 - 1))
def test_global_minima_are_consistent(policy, seed):
    p = random_spin_poly(np.random.default_rng(seed), n_vars=8)
    model, record = quadratize(p, policy)
    if model.num_variables > 16:
        return
    poly_min, _ = enumerate_polynomial(p.constant, p.terms, p.variables)
    ground = brute_force_min(model)
    assert ground.lowest_energy == pytest.approx(poly_min, abs=1e-9)
    for row in ground.configurations:
        lifted, ok = lift_solution(dict(zip(model.variables, row.tolist())), record, SPIN)
        assert ok
        assert p.evaluate(lifted) == pytest.approx(poly_min, abs=1e-9)


def test_inconsistent_ancilla_pays_penalty():
    p = BooleanPolynomial(0.0, {("a", "b", "c"): 1.0})
    model, record = reduce_degree(p)
    sub = record.substitutions[0]
    x = {"a": 1, "b": 1, "c": 0, sub.ancilla: 0}
    lifted, ok = lift_solution(x, record)
    assert not ok
    assert model.energy(x) - p.evaluate(lifted) >= sub.penalty - 1e-12


def test_identity_record_lift():
    _, record = reduce_degree(BooleanPolynomial(0.0, {("a", "b"): 1.0}))
    assert lift_solution({"a": 1, "b": 0}, record) == ({"a": 1, "b": 0}, True)


def test_reduction_is_deterministic():
    p = random_spin_poly(np.random.default_rng(11), n_vars=10)
    m1, r1 = quadratize(p)
    m2, r2 = quadratize(p)
    assert m1.dumps() == m2.dumps() and record_pairs(r1) == record_pairs(r2)


def test_replayed_pairs_give_same_structure():
    p = random_spin_poly(np.random.default_rng(4), n_vars=9)
    m1, r1 = quadratize(p, "tight")
    m2, r2 = quadratize(p * 0.5, "tight", record_pairs(r1))
    assert record_pairs(r2) == record_pairs(r1)
    assert m2.variables == m1.variables


def test_penalty_policies_ordering():
    p = random_spin_poly(np.random.default_rng(8), n_vars=9, n_terms=8)
    pens = {pol: [s.penalty for s in quadratize(p, pol)[1].substitutions]
            for pol in PENALTY_POLICIES}
    total = sum(abs(c) for c in to_boolean(p).terms.values())
    assert all(m == pytest.approx(1 + total) for m in pens["global"])
    assert all(t <= g + 1e-12 for t, g in zip(pens["tight"], pens["global"]))


def test_unknown_policy():
    with pytest.raises(ValueError):
        quadratize(SpinPolynomial(0.0, {("a", "b", "c"): 1.0}), "loose")


def test_polynomial_substitute_and_dump():
    p = SpinPolynomial(1.0, {("a", "b"): 2.0, ("b",): -1.0})
    q = p.substitute({"b": -1})
    assert q.constant == 2.0 and q.terms == {("a",): -2.0}
    back = SpinPolynomial.loads(p.dumps())
    assert back.allclose(p, atol=0.0)
