import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockforge import algebra
from fockforge.algebra import (GeneratorIndexError, annihilate, apply_generator,
                               bg_cartan, bg_lower, bg_raise, casimir_su11_check,
                               commutator_residual, create, e_lower, e_raise,
                               h_mix, identity_op, k1_op, k2_op, k3_op,
                               k_minus_op, k_plus_op, l_op, op_product, op_sum,
                               parse_generator, relations_suite, scale, to_matrix)
from fockforge.fock import build_basis, basis_state, inner_product, sector_of
from fockforge.states import glauber_cs


@pytest.fixture(scope="module")
def one_mode():
    return build_basis(1, 20)


@pytest.fixture(scope="module")
def two_mode():
    return build_basis(2, 12)


def test_annihilate_vacuum(two_mode):
    out = apply_generator(annihilate(1), basis_state(two_mode, (0, 0)))
    assert out.amplitudes == {}


def test_ladder_actions(two_mode):
    out = apply_generator(annihilate(2), basis_state(two_mode, (1, 3)))
    assert out.amplitudes == {(1, 2): pytest.approx(math.sqrt(3))}
    out = apply_generator(create(1), basis_state(two_mode, (1, 3)))
    assert out.amplitudes == {(2, 3): pytest.approx(math.sqrt(2))}


def test_pair_lowering_example(two_mode):
    # a_1 a_2 |2,3> = sqrt(6) |1,2>
    out = apply_generator(e_lower(1, 2), basis_state(two_mode, (2, 3)))
    assert out.amplitudes == {(1, 2): pytest.approx(math.sqrt(6))}


def test_k3_diagonal(one_mode):
    for n in (0, 1, 5):
        out = apply_generator(k3_op(), basis_state(one_mode, (n,)))
        assert out.amplitudes[(n,)] == pytest.approx(n / 2.0 + 0.25)


def test_h_mix_action(two_mode):
    # H(1,2) = adag_1 a_2 moves a quantum from mode 2 to mode 1
    out = apply_generator(h_mix(1, 2), basis_state(two_mode, (1, 2)))
    assert out.amplitudes == {(2, 1): pytest.approx(math.sqrt(2 * 2))}
    # diagonal part carries the +1/2
    out = apply_generator(h_mix(2, 2), basis_state(two_mode, (1, 2)))
    assert out.amplitudes[(1, 2)] == pytest.approx(2.5)


def test_create_drops_and_accounts(two_mode):
    edge = basis_state(two_mode, (12, 0))
    out = apply_generator(create(1), edge)
    assert out.amplitudes == {}
    assert out.lost_weight == pytest.approx(13.0)   # (n+1) |amp|^2


def test_l_operator_matches_sector(two_mode):
    op = l_op(1, 1)
    for n in two_mode.states:
        out = apply_generator(op, basis_state(two_mode, n))
        expected = sector_of(n, 1, 1).l
        if expected == 0:
            assert out.amplitudes.get(n, 0.0) == pytest.approx(0.0)
        else:
            assert out.amplitudes[n] == pytest.approx(expected)


def test_pair_lowering_preserves_parity_and_lowers_by_two(two_mode):
    for n in two_mode.states:
        out = apply_generator(e_lower(1, 2), basis_state(two_mode, n))
        for m in out.amplitudes:
            assert sum(m) == sum(n) - 2
            assert sector_of(m, 1, 1).parity == sector_of(n, 1, 1).parity


def test_adjointness_of_ladders(two_mode):
    rng = np.random.default_rng(3)
    from fockforge.fock import StateVector
    interior = [n for n in two_mode.states if sum(n) <= two_mode.cutoff - 2]
    u = StateVector(two_mode, {n: complex(*rng.normal(size=2)) for n in interior})
    v = StateVector(two_mode, {n: complex(*rng.normal(size=2)) for n in interior})
    for i in (1, 2):
        lhs = inner_product(u, apply_generator(annihilate(i), v))
        rhs = inner_product(apply_generator(create(i), u), v)
        assert abs(lhs - rhs) < 1e-13 * max(1.0, abs(lhs))


def test_raise_then_lower_is_normal_ordered_polynomial(two_mode):
    # a_1 a_2 adag_1 adag_2 |n> = (n_1+1)(n_2+1)|n> on interior states
    op = op_product(e_lower(1, 2), e_raise(1, 2))
    for n in two_mode.states:
        if sum(n) > two_mode.cutoff - 2:
            continue
        out = apply_generator(op, basis_state(two_mode, n))
        assert out.amplitudes[n] == pytest.approx((n[0] + 1) * (n[1] + 1), rel=1e-12)


def test_commutator_residual_examples():
    basis = build_basis(4, 8)
    # [E(1,2), E(3,4)] = 0
    assert commutator_residual(e_lower(1, 2), e_lower(3, 4), None, basis) < 1e-13
    # [a, a] = 0 exactly
    assert commutator_residual(annihilate(1), annihilate(1), None, basis) == 0.0
    one = build_basis(1, 16)
    # [K-, K+] = 2 K3
    assert commutator_residual(k_minus_op(), k_plus_op(), scale(2.0, k3_op()), one) < 1e-13


def test_commutator_margin_validation(one_mode):
    with pytest.raises(ValueError):
        commutator_residual(e_lower(1, 1), e_raise(1, 1), None, one_mode,
                            interior_margin=25)
    with pytest.raises(ValueError):
        commutator_residual(e_raise(1, 1), e_raise(1, 1), None, one_mode,
                            interior_margin=2)


def test_relations_suite_sp(two_mode):
    report = relations_suite("sp", two_mode)
    assert report.passed
    assert report.worst < 1e-12
    assert "[E(1,2),Edag(1,2)]" in report.residuals


def test_relations_suite_sp_three_modes():
    basis = build_basis(3, 12)
    report = relations_suite("sp", basis)
    assert report.passed and report.worst < 1e-12


def test_relations_suite_su11(one_mode):
    report = relations_suite("su11", one_mode)
    assert len(report.residuals) == 3
    assert report.passed


def test_relations_suite_u_pq(two_mode):
    report = relations_suite("u_pq", two_mode, p=1, q=1)
    assert report.passed
    assert any(label.startswith("[L,") for label in report.residuals)
    basis = build_basis(3, 10)
    report = relations_suite("u_pq", basis, p=2, q=1)
    assert report.passed


def test_relations_suite_thread_count_invariance(two_mode):
    seq = relations_suite("sp", two_mode, threads=1)
    par = relations_suite("sp", two_mode, threads=4)
    assert seq.residuals == par.residuals


def test_relations_suite_rejects_bad_input(one_mode, two_mode):
    with pytest.raises(ValueError):
        relations_suite("su11", two_mode)
    with pytest.raises(ValueError):
        relations_suite("u_pq", two_mode, p=2, q=2)
    with pytest.raises(ValueError):
        relations_suite("so_many", two_mode)


def test_casimir_value(one_mode):
    assert casimir_su11_check(one_mode) < 1e-12
    # eigenvalue -3/16 on |0> and |1> directly
    casimir = op_sum(op_product(k3_op(), k3_op()),
                     scale(-1.0, op_product(k1_op(), k1_op())),
                     scale(-1.0, op_product(k2_op(), k2_op())))
    for n in (0, 1):
        out = apply_generator(casimir, basis_state(one_mode, (n,)))
        assert out.amplitudes[(n,)] == pytest.approx(-3.0 / 16.0, abs=1e-14)


def test_casimir_rejects_multimode(two_mode):
    with pytest.raises(ValueError):
        casimir_su11_check(two_mode)


def test_bg_ladder_matrix_elements():
    basis = build_basis(1, 10)
    k = 1.5
    out = apply_generator(bg_lower(k), basis_state(basis, (4,)))
    assert out.amplitudes[(3,)] == pytest.approx(math.sqrt(4 * (2 * k + 3)))
    out = apply_generator(bg_raise(k), basis_state(basis, (4,)))
    assert out.amplitudes[(5,)] == pytest.approx(math.sqrt(5 * (2 * k + 4)))
    out = apply_generator(bg_cartan(k), basis_state(basis, (4,)))
    assert out.amplitudes[(4,)] == pytest.approx(k + 4)


def test_bg_ladder_su11_relations():
    basis = build_basis(1, 14)
    for k in (0.5, 1.0, 2.5):
        r1 = commutator_residual(bg_lower(k), bg_raise(k),
                                 scale(2.0, op_sum(bg_cartan(k))), basis)
        r2 = commutator_residual(bg_cartan(k), bg_raise(k), bg_raise(k), basis)
        assert max(r1, r2) < 1e-12
    with pytest.raises(ValueError):
        bg_lower(0.3)


def test_generator_index_validation(two_mode):
    with pytest.raises(GeneratorIndexError):
        apply_generator(annihilate(3), basis_state(two_mode, (0, 0)))
    with pytest.raises(GeneratorIndexError):
        apply_generator(bg_lower(0.5), basis_state(two_mode, (0, 0)))


def test_dense_matrix_matches_sparse_application(two_mode):
    spec = op_sum(e_lower(1, 2), scale(0.5j, h_mix(2, 1)))
    mat = to_matrix(spec, two_mode)
    state = glauber_cs((0.4, 0.3j), two_mode, force=True)
    dense = mat @ state.to_dense()
    sparse = apply_generator(spec, state).to_dense()
    assert np.max(np.abs(dense - sparse)) < 1e-13


def test_parse_generator_round_trip(two_mode):
    for text, builder in [
        ("E(1,2)", e_lower(1, 2)),
        ("0.5*K1 + Product(E(1,1),Edag(1,1))",
         op_sum(scale(0.5, k1_op()), op_product(e_lower(1, 1), e_raise(1, 1)))),
        ("Scale(2j, H(1,2)) - a(1)",
         op_sum(scale(2j, h_mix(1, 2)), scale(-1.0, annihilate(1)))),
        ("L(1,1)", l_op(1, 1)),
        ("Sum(K3, I)", op_sum(k3_op(), identity_op())),
    ]:
        parsed = parse_generator(text)
        for n in two_mode.states[:10]:
            lhs = apply_generator(parsed, basis_state(two_mode, n))
            rhs = apply_generator(builder, basis_state(two_mode, n))
            diff = lhs.add(rhs.scaled(-1.0))
            assert diff.norm() < 1e-13
    # ladder atoms parse too (one-mode only at application time)
    assert parse_generator("BGminus(1.5)") == bg_lower(1.5)


def test_parse_generator_errors():
    with pytest.raises(ValueError):
        parse_generator("Q(1)")
    with pytest.raises(ValueError):
        parse_generator("E(1,2) K3")
    with pytest.raises(ValueError):
        parse_generator("E(1")


@given(st.integers(0, 8), st.integers(0, 8))
@settings(max_examples=40, deadline=None)
def test_number_operator_via_h(n1, n2):
    basis = build_basis(2, 16)
    if n1 + n2 > basis.cutoff:
        return
    op = op_sum(h_mix(1, 1), scale(-0.5, identity_op()))   # adag_1 a_1
    out = apply_generator(op, basis_state(basis, (n1, n2)))
    got = out.amplitudes.get((n1, n2), 0.0)
    assert got == pytest.approx(n1, abs=1e-13)
