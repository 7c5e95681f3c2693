import math

import numpy as np
import pytest

from fockforge import algebra
from fockforge.fock import build_basis, inner_product, sector_of
from fockforge.specfun import bessel_i
from fockforge.states import (BGParams, CatParams, NormalizationError,
                              PhiCatParams, SquaredCatParams, TailBoundError,
                              UpqParams, UpqState, bg_overlap_closed_form,
                              bg_su11_cs, cat_coefficients, cat_norm_residual,
                              glauber_cs, multimode_cat, phi_cat,
                              required_cutoff, squared_amp_cat,
                              squared_cat_coefficients, state_from_family_record,
                              upq_bg_cs)


@pytest.fixture(scope="module")
def one_mode():
    return build_basis(1, 30)


@pytest.fixture(scope="module")
def two_mode():
    return build_basis(2, 24)


# ---------------------------------------------------------------------------
# Glauber states
# ---------------------------------------------------------------------------

def test_glauber_vacuum(two_mode):
    g = glauber_cs((0.0, 0.0), two_mode)
    assert g.amplitudes == {(0, 0): 1.0 + 0.0j}


def test_glauber_amplitude_value(one_mode):
    # closed-form Poisson amplitude at n = 2 for alpha = 1
    g = glauber_cs((1.0,), one_mode)
    assert abs(g.amplitudes[(2,)]) == pytest.approx(math.exp(-0.5) / math.sqrt(2.0),
                                                    rel=1e-14)
    assert abs(g.amplitudes[(2,)]) == pytest.approx(0.42888194248035344, rel=1e-12)


def test_glauber_is_annihilation_eigenstate(two_mode):
    alpha = (0.7, -0.4 + 0.3j)
    g = glauber_cs(alpha, two_mode)
    for i in (1, 2):
        mean = inner_product(g, algebra.apply_generator(algebra.annihilate(i), g))
        assert abs(mean - alpha[i - 1]) < 1e-12


def test_glauber_norm_equals_one_minus_tail(two_mode):
    alpha = (1.1, 0.5j)
    g = glauber_cs(alpha, two_mode)
    assert abs(g.norm_sq() - (1.0 - g.lost_weight)) < 1e-14


def test_glauber_tail_rejection_names_required_cutoff():
    small = build_basis(1, 3)
    with pytest.raises(TailBoundError) as err:
        glauber_cs((2.0,), small)
    needed = required_cutoff((2.0,), 1e-10)
    assert str(needed) in str(err.value)
    # force builds anyway, recording the tail
    g = glauber_cs((2.0,), small, force=True)
    assert g.lost_weight > 1e-3


# ---------------------------------------------------------------------------
# cats
# ---------------------------------------------------------------------------

def test_cat_coefficients_satisfy_norm_condition():
    alpha = (0.8, -0.5j)
    for ratio in (1.0, -1.0, 0.35 + 0.2j, 2.5j):
        c_plus, c_minus = cat_coefficients(alpha, ratio)
        residual = cat_norm_residual(CatParams(alpha, c_plus, c_minus))
        assert abs(residual) < 1e-12


def test_multimode_cat_glauber_limit(two_mode):
    alpha = (0.8, -0.5j)
    cat = multimode_cat(CatParams(alpha, 1.0, 0.0), two_mode)
    g = glauber_cs(alpha, two_mode)
    assert cat.add(g.scaled(-1.0)).norm() < 1e-15


def test_even_and_odd_cats_live_on_their_parity_sectors(two_mode):
    alpha = (1.0, 0.4)
    even = multimode_cat(CatParams(alpha, *cat_coefficients(alpha, +1.0)), two_mode)
    odd = multimode_cat(CatParams(alpha, *cat_coefficients(alpha, -1.0)), two_mode)
    assert even.amplitudes and odd.amplitudes
    assert all(sum(n) % 2 == 0 for n in even.amplitudes)
    assert all(sum(n) % 2 == 1 for n in odd.amplitudes)


def test_cat_at_zero_alpha_is_vacuum(two_mode):
    cat = multimode_cat(CatParams((0.0, 0.0), 0.25, 0.75), two_mode)
    assert set(cat.amplitudes) == {(0, 0)}
    assert cat.amplitudes[(0, 0)] == pytest.approx(1.0)


def test_cat_rejects_bad_normalization(two_mode):
    with pytest.raises(NormalizationError) as err:
        multimode_cat(CatParams((0.8, -0.5j), 1.0, 1.0), two_mode)
    assert "norm condition" in str(err.value)


def test_cat_eigenstate_of_all_pairs(two_mode):
    alpha = (0.8, -0.5j)
    cat = multimode_cat(CatParams(alpha, *cat_coefficients(alpha, 0.6 - 0.1j)), two_mode)
    for i in (1, 2):
        for j in (1, 2):
            ev = alpha[i - 1] * alpha[j - 1]
            image = algebra.apply_generator(algebra.e_lower(i, j), cat)
            assert image.add(cat.scaled(-ev)).norm() < 1e-10


# ---------------------------------------------------------------------------
# phase-parameterized family
# ---------------------------------------------------------------------------

def test_phi_cat_zero_angle_is_glauber(two_mode):
    alpha = (0.8, -0.5j)
    pc = phi_cat(PhiCatParams(alpha, 0.0, +1), two_mode)
    g = glauber_cs(alpha, two_mode)
    assert pc.add(g.scaled(-1.0)).norm() < 1e-15


def test_phi_cat_right_angle_is_rotated_minus_branch(one_mode):
    # cos = 0: the state is +/- i |-alpha>
    pc = phi_cat(PhiCatParams((0.9,), math.pi / 2.0, +1), one_mode)
    minus = glauber_cs((-0.9,), one_mode).scaled(1j)
    assert pc.add(minus.scaled(-1.0)).norm() < 1e-13


def test_phi_cat_matches_superposition_coefficientwise(two_mode):
    alpha = (0.8, -0.5j)
    phi = 0.37
    pc = phi_cat(PhiCatParams(alpha, phi, +1), two_mode)
    cat = multimode_cat(CatParams(alpha, math.cos(phi), 1j * math.sin(phi)), two_mode)
    for n, a in pc.amplitudes.items():
        assert abs(a - cat.amplitudes[n]) < 1e-13


def test_phi_cat_unit_norm_for_every_angle(two_mode):
    alpha = (0.8, -0.5j)
    for phi in (0.0, 0.3, 1.2, math.pi / 2, 2.9):
        pc = phi_cat(PhiCatParams(alpha, phi, +1), two_mode)
        assert abs(pc.norm_sq() - (1.0 - pc.lost_weight)) < 1e-12


def test_phi_cat_sign_flip_is_angle_reversal(two_mode):
    alpha = (0.8, -0.5j)
    plus = phi_cat(PhiCatParams(alpha, 0.41, +1), two_mode)
    minus = phi_cat(PhiCatParams(alpha, -0.41, -1), two_mode)
    assert plus.add(minus.scaled(-1.0)).norm() < 1e-14


# ---------------------------------------------------------------------------
# ladder eigenstates and overlaps
# ---------------------------------------------------------------------------

def test_bg_state_zero_eigenvalue(one_mode):
    st = bg_su11_cs(BGParams(0.0, 0.5), one_mode)
    assert st.amplitudes == {(0,): 1.0 + 0.0j}


def test_bg_state_k_half_squared_amplitudes(one_mode):
    # k = 1/2, z = 1: |amp_n|^2 = (1/n!)^2 / I_0(2), brute-force series oracle
    st = bg_su11_cs(BGParams(1.0, 0.5), one_mode)
    i0 = sum(1.0 / math.factorial(m) ** 2 for m in range(40))
    for n in range(6):
        assert abs(st.amplitudes[(n,)]) ** 2 == pytest.approx(
            (1.0 / math.factorial(n)) ** 2 / i0, rel=1e-12)


def test_bg_state_unit_norm(one_mode):
    big = build_basis(1, 60)
    st = bg_su11_cs(BGParams(2.0 + 1.0j, 1.5), big)
    assert abs(st.norm_sq() - 1.0) < 1e-12


def test_bg_state_is_lowering_eigenstate(one_mode):
    big = build_basis(1, 60)
    for k in (0.5, 1.0, 1.5):
        st = bg_su11_cs(BGParams(1.3, k), big)
        image = algebra.apply_generator(algebra.bg_lower(k), st)
        assert image.add(st.scaled(-1.3)).norm() < 1e-10


def test_bg_state_tail_rejection():
    small = build_basis(1, 4)
    with pytest.raises(TailBoundError):
        bg_su11_cs(BGParams(3.0, 1.0), small)


def test_bg_state_rejects_bad_bargmann(one_mode):
    with pytest.raises(ValueError):
        BGParams(1.0, 0.3)


def test_bg_overlap_trivial_cases(one_mode):
    assert bg_overlap_closed_form(1.3 + 0.2j, 1.3 + 0.2j, 1.0) == pytest.approx(1.0)
    assert bg_overlap_closed_form(1.0, 1.0, 0.5) == pytest.approx(1.0)


def test_bg_overlap_bessel_ratio_form():
    # k = 1, z1 = 1, z2 = 2: I_1(2 sqrt 2)/sqrt(I_1(2) I_1(4))
    expected = bessel_i(1.0, 2.0 * math.sqrt(2.0)) / math.sqrt(
        bessel_i(1.0, 2.0) * bessel_i(1.0, 4.0))
    assert bg_overlap_closed_form(1.0, 2.0, 1.0) == pytest.approx(expected, rel=1e-12)


def test_bg_overlap_matches_fock_sum():
    basis = build_basis(1, 70)
    rng = np.random.default_rng(11)
    for _ in range(20):
        z1 = complex(rng.uniform(-1.8, 1.8), rng.uniform(-1.8, 1.8))
        z2 = complex(rng.uniform(-1.8, 1.8), rng.uniform(-1.8, 1.8))
        for k in (0.5, 1.0, 2.0):
            closed = bg_overlap_closed_form(z1, z2, k)
            s1 = bg_su11_cs(BGParams(z1, k), basis)
            s2 = bg_su11_cs(BGParams(z2, k), basis)
            assert abs(closed - inner_product(s1, s2)) < 1e-10


# ---------------------------------------------------------------------------
# charge-sector components
# ---------------------------------------------------------------------------

def test_upq_equal_mode_diagonal(two_mode):
    # p = q = 1, l = 0: amplitudes a^n b^n / n! on |n, n>
    a, b = 0.8, 0.6
    comp = upq_bg_cs(UpqParams(p=1, q=1, l=0, alpha=(a, b)), two_mode)
    assert isinstance(comp, UpqState) and comp.feasible
    for n in range(6):
        assert comp.state.amplitudes[(n, n)] == pytest.approx(
            (a * b) ** n / math.factorial(n), rel=1e-13)


def test_upq_lowest_term_for_positive_charge(two_mode):
    comp = upq_bg_cs(UpqParams(p=1, q=1, l=2, alpha=(0.7, 0.5)), two_mode)
    lowest = min(comp.state.amplitudes, key=sum)
    assert lowest == (2, 0)
    assert comp.state.amplitudes[(2, 0)] == pytest.approx(0.7 ** 2 / math.sqrt(2.0),
                                                          rel=1e-13)


def test_upq_support_and_charge_eigenvalue(two_mode):
    comp = upq_bg_cs(UpqParams(p=1, q=1, l=-1, alpha=(0.8, 0.5j)), two_mode)
    op = algebra.l_op(1, 1)
    for n in comp.state.amplitudes:
        assert sector_of(n, 1, 1).l == -1
    image = algebra.apply_generator(op, comp.state)
    assert image.add(comp.state.scaled(+1.0)).norm() < 1e-13


def test_upq_infeasible_sector_is_flagged(two_mode):
    comp = upq_bg_cs(UpqParams(p=1, q=1, l=two_mode.cutoff + 2,
                               alpha=(0.8, 0.5)), two_mode)
    assert not comp.feasible
    assert comp.state.amplitudes == {}
    assert comp.norm_sq == 0.0


def test_upq_reduced_parameterization_matches_full():
    basis = build_basis(3, 10)
    a_n = 0.8 - 0.3j
    z = (0.5 + 0.1j, -0.4j)       # z_1 = a_1 a_3 (p block), z_2 = a_2 / a_3 (q block)
    alpha = (z[0] / a_n, z[1] * a_n, a_n)
    via_z = upq_bg_cs(UpqParams(p=1, q=2, l=-1, z=z, alpha_n=a_n), basis)
    via_alpha = upq_bg_cs(UpqParams(p=1, q=2, l=-1, alpha=alpha), basis)
    diff = via_z.state.add(via_alpha.state.scaled(-1.0))
    assert diff.norm() < 1e-13
    with pytest.raises(ValueError):
        UpqParams(p=1, q=2, l=0, z=z, alpha_n=0.0).full_alpha()


def test_upq_sums_to_glauber(two_mode):
    alpha = (0.8, 0.5)
    pref = math.exp(-0.5 * sum(abs(a) ** 2 for a in alpha))
    total = None
    for l in range(-two_mode.cutoff, two_mode.cutoff + 1):
        comp = upq_bg_cs(UpqParams(p=1, q=1, l=l, alpha=alpha), two_mode).state
        total = comp if total is None else total.add(comp)
    g = glauber_cs(alpha, two_mode)
    assert total.scaled(pref).add(g.scaled(-1.0)).norm() < 1e-13


# ---------------------------------------------------------------------------
# squared-amplitude cats
# ---------------------------------------------------------------------------

def test_squared_cat_trivial_branch(two_mode):
    alpha = (0.7, 0.6)
    sq = squared_amp_cat(SquaredCatParams(alpha, 1.0, 0.0), two_mode)
    base = glauber_cs(alpha, two_mode)
    assert sq.add(base.scaled(-1.0)).norm() < 1e-15


def test_squared_cat_normalization_checked(two_mode):
    with pytest.raises(NormalizationError):
        squared_amp_cat(SquaredCatParams((0.7, 0.6), 1.0, 1.0), two_mode)


def test_squared_cat_is_squared_pair_eigenstate(two_mode):
    alpha = (0.7, 0.6)
    d_plus, d_minus = squared_cat_coefficients(alpha, 1.0, two_mode)
    sq = squared_amp_cat(SquaredCatParams(alpha, d_plus, d_minus), two_mode)
    assert abs(sq.norm_sq() - 1.0) < 1e-9
    for i in (1, 2):
        for j in (1, 2):
            ev = (alpha[i - 1] * alpha[j - 1]) ** 2
            op = algebra.op_product(algebra.e_lower(i, j), algebra.e_lower(i, j))
            image = algebra.apply_generator(op, sq)
            assert image.add(sq.scaled(-ev)).norm() < 1e-9


def test_squared_cat_one_mode_squared_eigenvalue(one_mode):
    d_plus, d_minus = squared_cat_coefficients((1.0,), 1.0, one_mode)
    sq = squared_amp_cat(SquaredCatParams((1.0,), d_plus, d_minus), one_mode)
    op = algebra.op_product(algebra.e_lower(1, 1), algebra.e_lower(1, 1))
    image = algebra.apply_generator(op, sq)
    assert image.add(sq.scaled(-1.0)).norm() < 1e-9
    # the two branches are glauber(1) and glauber(i): not an a^2 eigenstate
    single = algebra.apply_generator(algebra.e_lower(1, 1), sq)
    assert single.add(sq.scaled(-1.0)).norm() > 0.1


def test_state_from_family_record_matches_constructors(two_mode, one_mode):
    alpha = (0.8, -0.5j)
    rec = {"family": "phi_cat", "alpha": [[0.8, 0.0], [0.0, -0.5]],
           "phi": 0.3, "sign": "+"}
    via_record = state_from_family_record(rec, two_mode)
    direct = phi_cat(PhiCatParams(alpha, 0.3, +1), two_mode)
    assert via_record.add(direct.scaled(-1.0)).norm() < 1e-15

    rec = {"family": "bg_su11", "z": [1.0, 0.5], "k": 1.0}
    via_record = state_from_family_record(rec, one_mode)
    direct = bg_su11_cs(BGParams(1.0 + 0.5j, 1.0), one_mode)
    assert via_record.add(direct.scaled(-1.0)).norm() < 1e-15

    rec = {"family": "upq", "p": 1, "q": 1, "l": 0, "alpha": [0.8, 0.6]}
    via_record = state_from_family_record(rec, two_mode)
    assert (0, 0) in via_record.amplitudes

    with pytest.raises(ValueError):
        state_from_family_record({"family": "mystery"}, two_mode)


def test_squared_cat_with_phase_family_base(two_mode):
    alpha = (0.7, 0.6)
    base_c = (math.cos(0.4), 1j * math.sin(0.4))
    d_plus, d_minus = squared_cat_coefficients(alpha, 0.5, two_mode, base_c=base_c)
    sq = squared_amp_cat(SquaredCatParams(alpha, d_plus, d_minus,
                                          base_c_plus=base_c[0],
                                          base_c_minus=base_c[1]), two_mode)
    ev = (alpha[0] * alpha[1]) ** 2
    op = algebra.op_product(algebra.e_lower(1, 2), algebra.e_lower(1, 2))
    image = algebra.apply_generator(op, sq)
    assert image.add(sq.scaled(-ev)).norm() < 1e-9
