import itertools
from fractions import Fraction

import numpy as np
import pytest

from poqlab.fourier import (Group, GroupFunction, GroupMismatch, SubsetOfGroup,
                            ZeroFunction, collision_probability, convolve, dft,
                            dft_z4_exact, donoho_stark_check,
                            eta_quadruple_bruteforce, eta_set, idft,
                            linearity_eta, support_size,
                            uncertainty_bound_check, uncertainty_product,
                            uniformity_nu)

Z4 = Group(4, 1)
Z4_3 = Group(4, 3)


def random_function(group, gen):
    return GroupFunction(group, gen.normal(size=group.size)
                         + 1j * gen.normal(size=group.size))


# --- transform ---------------------------------------------------------------

def test_dft_delta_is_constant():
    f = GroupFunction.from_dict(Z4, {(0,): 1.0})
    np.testing.assert_allclose(dft(f).values, np.full(4, 0.5), atol=1e-12)


def test_dft_constant_is_scaled_delta():
    f = GroupFunction(Z4, np.ones(4, dtype=complex))
    want = np.zeros(4, dtype=complex)
    want[0] = 2.0
    np.testing.assert_allclose(dft(f).values, want, atol=1e-12)


def test_parseval_random():
    gen = np.random.default_rng(0)
    for _ in range(200):
        f = random_function(Z4_3, gen)
        assert abs(dft(f).norm2() - f.norm2()) < 1e-9


def test_inverse_round_trip():
    gen = np.random.default_rng(1)
    f = random_function(Z4_3, gen)
    np.testing.assert_allclose(idft(dft(f)).values, f.values, atol=1e-9)


def test_double_transform_is_negation():
    # exhaustively on Z_4, then randomly on Z_4^3
    for idx in range(4):
        f = GroupFunction.from_dict(Z4, {(idx,): 1.0})
        ff = dft(dft(f))
        want = np.zeros(4, dtype=complex)
        want[(-idx) % 4] = 1.0
        np.testing.assert_allclose(ff.values, want, atol=1e-12)
    gen = np.random.default_rng(2)
    f = random_function(Z4_3, gen)
    ff = dft(dft(f)).values
    neg = np.array([ff[Z4_3.encode([-c for c in Z4_3.decode(i)])]
                    for i in range(Z4_3.size)])
    np.testing.assert_allclose(
        np.array([f.values[i] for i in range(Z4_3.size)]), neg, atol=1e-9)


# --- convolution -------------------------------------------------------------

def test_convolve_deltas():
    fa = GroupFunction.from_dict(Z4, {(1,): 1.0})
    fb = GroupFunction.from_dict(Z4, {(2,): 1.0})
    want = np.zeros(4, dtype=complex)
    want[3] = 0.5  # |G|^{-1/2} at a+b
    np.testing.assert_allclose(convolve(fa, fb).values, want, atol=1e-12)


def test_convolution_theorem_and_commutativity():
    gen = np.random.default_rng(3)
    for _ in range(100):
        f, g = random_function(Z4_3, gen), random_function(Z4_3, gen)
        lhs = dft(convolve(f, g)).values
        rhs = dft(f).values * dft(g).values
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)
        np.testing.assert_allclose(convolve(f, g).values,
                                   convolve(g, f).values, atol=1e-9)


def test_convolve_group_mismatch():
    with pytest.raises(GroupMismatch):
        convolve(GroupFunction(Z4, np.ones(4)),
                 GroupFunction(Group(4, 2), np.ones(16)))


# --- uniformity --------------------------------------------------------------

def test_nu_indicator_is_one():
    gen = np.random.default_rng(4)
    mask = gen.random(Z4_3.size) < 0.3
    mask[0] = True
    f = GroupFunction(Z4_3, mask.astype(complex))
    assert abs(uniformity_nu(f) - 1.0) < 1e-12


def test_nu_weighted_example():
    f = GroupFunction(Group(2, 1), np.array([2.0, 1.0], dtype=complex))
    assert abs(uniformity_nu(f) - 9 / 10) < 1e-12


def test_nu_zero_function_raises():
    with pytest.raises(ZeroFunction):
        uniformity_nu(GroupFunction(Z4, np.zeros(4)))


def test_coefficients_bounded_by_one():
    gen = np.random.default_rng(13)
    for _ in range(300):
        f = random_function(Z4_3, gen)
        if gen.random() < 0.5:
            f = GroupFunction(Z4_3, f.values * (gen.random(Z4_3.size) < 0.3))
        if not np.abs(f.values).any():
            continue
        assert uniformity_nu(f) <= 1 + 1e-12
        assert linearity_eta(f) <= 1 + 1e-12


# --- linearity ---------------------------------------------------------------

def test_eta_singleton():
    s = SubsetOfGroup.from_elements(Z4, [(3,)])
    assert eta_set(s) == 1


def test_eta_pair_example():
    s = SubsetOfGroup.from_elements(Z4, [(0,), (1,)])
    assert eta_set(s) == Fraction(3, 4)
    assert eta_quadruple_bruteforce(s) == Fraction(3, 4)


def _subgroups_z4_squared():
    """All subgroups of Z_4^2, via closures of <= 2 generators."""
    g = Group(4, 2)
    found = {}
    elements = [g.decode(i) for i in range(16)]
    for gens in itertools.chain(itertools.combinations(elements, 1),
                                itertools.combinations(elements, 2)):
        members = {(0, 0)}
        frontier = list(gens)
        while frontier:
            el = frontier.pop()
            if el in members:
                continue
            members.add(el)
            for other in list(members):
                nxt = ((el[0] + other[0]) % 4, (el[1] + other[1]) % 4)
                if nxt not in members:
                    frontier.append(nxt)
        found[tuple(sorted(members))] = members
    return [set(v) for v in found.values()]


def test_eta_cosets_are_one_with_quadruple_oracle():
    g = Group(4, 2)
    for sub in _subgroups_z4_squared():
        for shift in [(0, 0), (1, 2), (3, 3)]:
            coset = {((a + shift[0]) % 4, (b + shift[1]) % 4) for a, b in sub}
            s = SubsetOfGroup.from_elements(g, coset)
            assert eta_set(s) == 1
            if len(coset) <= 8:
                assert eta_quadruple_bruteforce(s) == 1


def test_eta_one_implies_coset_structure():
    # the converse direction: sets achieving 1 must be closed under x+y-z
    gen = np.random.default_rng(5)
    g = Group(4, 2)
    for _ in range(200):
        mask = gen.random(16) < 0.4
        if not mask.any():
            continue
        s = SubsetOfGroup.from_elements(g, [g.decode(i)
                                            for i in np.flatnonzero(mask)])
        if eta_set(s) == 1:
            members = {g.decode(i) for i in np.flatnonzero(mask)}
            for a, b, c in itertools.product(members, repeat=3):
                combo = tuple((ai + bi - ci) % 4 for ai, bi, ci in zip(a, b, c))
                assert combo in members


def test_eta_convolution_matches_quadruple_oracle_on_random_sets():
    gen = np.random.default_rng(6)
    g = Group(4, 2)
    for _ in range(25):
        idx = gen.choice(16, size=5, replace=False)
        s = SubsetOfGroup.from_elements(g, [g.decode(int(i)) for i in idx])
        assert eta_set(s) == eta_quadruple_bruteforce(s)
        # float path agrees with the exact value
        assert abs(linearity_eta(s.indicator()) - float(eta_set(s))) < 1e-9


def test_eta_drop_last_coordinate_never_decreases():
    # image sets of second-player strategies: one element per (y, 1) + 2Z_4^3
    gen = np.random.default_rng(7)
    g3 = Group(4, 3)
    g2 = Group(4, 2)
    for _ in range(1000):
        elements = []
        for y0, y1 in itertools.product((0, 1), repeat=2):
            b = gen.integers(0, 2, size=3)
            elements.append(((y0 + 2 * b[0]) % 4, (y1 + 2 * b[1]) % 4,
                             (1 + 2 * b[2]) % 4))
        v = SubsetOfGroup.from_elements(g3, elements)
        v_dropped = SubsetOfGroup.from_elements(g2, {e[:2] for e in elements})
        assert eta_set(v) <= eta_set(v_dropped)


# --- collision bound ---------------------------------------------------------

def test_collision_bound_exact():
    gen = np.random.default_rng(8)
    for _ in range(50):
        w1 = gen.integers(0, 10, size=64)
        w2 = gen.integers(0, 10, size=64)
        if not w1.any() or not w2.any():
            continue
        p = [Fraction(int(v), int(w1.sum())) for v in w1]
        q = [Fraction(int(v), int(w2.sum())) for v in w2]
        agree = sum(a * b for a, b in zip(p, q))
        c_p = collision_probability(p)
        c_q = collision_probability(q)
        # P[s = s']^2 <= c c', exactly, with equality iff p = q
        assert agree * agree <= c_p * c_q
        if agree * agree == c_p * c_q:
            assert p == q
    p = [Fraction(1, 4)] * 4
    assert collision_probability(p) == Fraction(1, 4)
    agree = sum(a * b for a, b in zip(p, p))
    assert agree * agree == collision_probability(p) ** 2


# --- uncertainty -------------------------------------------------------------

def test_uncertainty_product_examples():
    delta = GroupFunction.from_dict(Z4, {(0,): 1.0})
    assert abs(uncertainty_product(delta) - 1.0) < 1e-12
    full = GroupFunction(Z4, np.ones(4, dtype=complex))
    assert abs(uncertainty_product(full) - 1.0) < 1e-12


def test_uncertainty_product_random_sparse():
    gen = np.random.default_rng(9)
    for _ in range(100):
        f = random_function(Z4_3, gen)
        keep = gen.random(Z4_3.size) < 0.2
        if not keep.any():
            continue
        f = GroupFunction(Z4_3, f.values * keep)
        assert uncertainty_product(f) >= 1 - 1e-9


def test_uncertainty_bound_check_cases():
    delta = GroupFunction.from_dict(Z4, {(0,): 1.0})
    lhs, rhs, holds = uncertainty_bound_check(delta, dft(delta))
    assert holds and abs(lhs - 1) < 1e-9 and abs(rhs - 1) < 1e-9

    gen = np.random.default_rng(10)
    for _ in range(200):
        f = random_function(Z4_3, gen)
        g = random_function(Z4_3, gen)
        f = GroupFunction(Z4_3, f.values / f.norm2())
        g = GroupFunction(Z4_3, g.values / g.norm2())
        _, _, holds = uncertainty_bound_check(f, g)
        assert holds

    with pytest.raises(ValueError):
        uncertainty_bound_check(GroupFunction(Z4, np.ones(4)), delta)


def test_uncertainty_equality_on_cosets():
    # exhaustive over every coset of every subgroup of Z_4^2
    g = Group(4, 2)
    for sub in _subgroups_z4_squared():
        for shift in itertools.product(range(4), repeat=2):
            coset = [((a + shift[0]) % 4, (b + shift[1]) % 4) for a, b in sub]
            vals = np.zeros(16, dtype=complex)
            for el in coset:
                vals[g.encode(el)] = 1 / np.sqrt(len(coset))
            f = GroupFunction(g, vals)
            lhs, rhs, holds = uncertainty_bound_check(f, dft(f))
            assert holds and abs(lhs - rhs) < 1e-9
            # these are exactly the tight support-product cases
            assert support_size(f) * support_size(dft(f)) == g.size


def test_donoho_stark_cases():
    delta = GroupFunction.from_dict(Z4, {(0,): 1.0})
    assert donoho_stark_check(delta)
    # subgroup {0, 2} of Z_4: equality, checked with the exact transform
    sub = SubsetOfGroup.from_elements(Z4, [(0,), (2,)])
    re, im = dft_z4_exact(sub.mask.astype(np.int64), 1)
    exact_support = int(((re != 0) | (im != 0)).sum())
    assert sub.size * exact_support == Z4.size
    assert donoho_stark_check(sub.indicator())
    gen = np.random.default_rng(11)
    for _ in range(200):
        f = random_function(Z4_3, gen)
        assert donoho_stark_check(f)


def test_exact_z4_transform_matches_float():
    gen = np.random.default_rng(12)
    for n in (1, 2, 3):
        g = Group(4, n)
        w = gen.integers(-3, 4, size=g.size)
        re, im = dft_z4_exact(w, n)
        float_version = dft(GroupFunction(g, w.astype(complex))).values
        np.testing.assert_allclose((re + 1j * im) / np.sqrt(g.size),
                                   float_version, atol=1e-9)
