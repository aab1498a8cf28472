import random

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from frobmult.groebner import (Caps, ResourceCapExceeded, buchberger, column_vector, ideal, is_regular_element,
                               is_regular_sequence, krull_dimension, module_kernel, quotient_length,
                               socle_data, socle_dimension, vector_entries)
from frobmult.polyring import PolyRing, RingPresentation, format_polynomial

NAMES = ("x", "y", "z")


def free(p=2, names=NAMES):
    return RingPresentation(PolyRing(names, p))


@st.composite
def zero_dim_ideals(draw):
    """Random ideals containing x^3, y^3, z^3 (so the quotient is finite)."""
    p = draw(st.sampled_from([2, 3]))
    amb = free(p)
    r = amb.ring
    gens = [r.parse("x^3"), r.parse("y^3"), r.parse("z^3")]
    for _ in range(draw(st.integers(0, 3))):
        f = r.zero()
        for _ in range(draw(st.integers(1, 3))):
            e = draw(st.lists(st.integers(0, 2), min_size=3, max_size=3))
            f = f + r.monomial(e, draw(st.integers(1, p - 1)))
        gens.append(f)
    return amb, gens


def sympy_basis(amb, gens):
    syms = sympy.symbols(amb.names)
    G = sympy.groebner([sympy.sympify(format_polynomial(g).replace("^", "**")) for g in gens], *syms,
                       modulus=amb.p, order="grevlex")
    return {sympy.Poly(g, *syms, modulus=amb.p).monic().as_expr() for g in G.exprs}


def ours_as_sympy(gb, amb):
    syms = sympy.symbols(amb.names)
    out = set()
    for f in gb.polynomials():
        out.add(sympy.Poly(sympy.sympify(format_polynomial(f).replace("^", "**")), *syms,
                           modulus=amb.p).monic().as_expr())
    return out


def test_quotient_length_examples():
    amb = free()
    r = amb.ring
    assert ideal([r.parse("x"), r.parse("y"), r.parse("z")], amb).quotient_length() == 1
    assert ideal([r.parse("x^2"), r.parse("y^2"), r.parse("z^2")], amb).quotient_length() == 8
    assert ideal([r.parse("x"), r.parse("y")], amb).quotient_length() == float("inf")
    assert quotient_length(ideal([r.one()], amb)) == 0


def test_socle_of_monomial_complete_intersection():
    amb = free()
    r = amb.ring
    gb = ideal([r.parse("x^2"), r.parse("y^2"), r.parse("z^2")], amb)
    vecs, dim = socle_data(gb)
    assert dim == 1 == socle_dimension(gb)
    assert vecs[0] == dict(r.parse("x*y*z").terms)
    # (x, y, z)^2 has socle spanned by x, y, z
    sq = ideal([a * b for a in r.gens() for b in r.gens()], amb)
    assert socle_dimension(sq) == 3


def test_regular_elements():
    amb = free()
    r = amb.ring
    gb = ideal([r.parse("x*y")], amb)
    assert not is_regular_element(gb, r.parse("x"))
    assert is_regular_element(gb, r.parse("x + y"))
    assert is_regular_sequence([r.parse("x"), r.parse("y"), r.parse("z")], amb)
    assert not is_regular_sequence([r.parse("x*y"), r.parse("x*z")], amb)
    with pytest.raises(ValueError):
        is_regular_element(gb, r.parse("x*y"))


def test_krull_dimension_examples():
    amb = free()
    r = amb.ring
    assert krull_dimension(ideal([], amb)) == 3
    assert krull_dimension(ideal([r.parse("x*y")], amb)) == 2
    assert krull_dimension(ideal([r.parse("x"), r.parse("y*z")], amb)) == 1
    assert krull_dimension(ideal([r.one()], amb)) == -1


def test_hypersurface_is_koszul_kernel():
    # kernel of (x y z) is generated by the three Koszul relations
    amb = free()
    r = amb.ring
    ker = module_kernel([dict(g.terms) for g in r.gens()], 1, amb)
    kgb = buchberger(ker, amb, 3)
    koszul = [[r.parse("y"), r.parse("x"), r.zero()], [r.parse("z"), r.zero(), r.parse("x")],
              [r.zero(), r.parse("z"), r.parse("y")]]
    assert all(kgb.contains(column_vector(c)) for c in koszul)
    assert len(kgb) == 3


def test_module_kernel_over_quotient():
    # over K[x,y]/(xy) the kernel of x is generated by y
    amb = RingPresentation(PolyRing(("x", "y"), 2), [PolyRing(("x", "y"), 2).parse("x*y")])
    r = amb.ring
    ker = module_kernel([dict(r.parse("x").terms)], 1, amb)
    assert buchberger(ker, amb, 1) == ideal([r.parse("y")], amb)


def test_module_groebner_length():
    amb = free()
    r = amb.ring
    # coker of the 2x1 column (x, y) on top of m^2 * F
    gens = [column_vector([r.parse("x"), r.parse("y")])]
    for c in range(2):
        for a in r.gens():
            for b in r.gens():
                gens.append(column_vector([a * b if i == c else r.zero() for i in range(2)]))
    gb = buchberger(gens, amb, 2)
    assert gb.quotient_length() == 2 * 4 - 1


def test_degree_cap_raises():
    amb = free()
    r = amb.ring
    with pytest.raises(ResourceCapExceeded):
        ideal([r.parse("x^2*y + z^3"), r.parse("x*y^2 + z^3")], amb, Caps(max_degree=3))


def test_component_check():
    amb = free()
    with pytest.raises(ValueError):
        buchberger([column_vector([amb.ring.zero(), amb.ring.one()])], amb, 1)


@given(zero_dim_ideals())
def test_reduced_basis_matches_independent_oracle(data):
    amb, gens = data
    assert ours_as_sympy(ideal(gens, amb), amb) == sympy_basis(amb, gens)


@given(zero_dim_ideals(), st.randoms(use_true_random=False))
def test_reduced_basis_is_deterministic(data, rnd):
    amb, gens = data
    shuffled = list(gens)
    rnd.shuffle(shuffled)
    a, b = ideal(gens, amb), ideal(shuffled, amb)
    assert a.elements == b.elements
    assert a == b


@given(zero_dim_ideals(), st.integers(0, 2 ** 32 - 1))
def test_normal_form_is_idempotent_and_canonical(data, seed):
    amb, gens = data
    gb = ideal(gens, amb)
    r = amb.ring
    rng = random.Random(seed)
    f = r.zero()
    for _ in range(4):
        f = f + r.monomial([rng.randint(0, 4) for _ in range(3)], rng.randint(1, r.p - 1))
    nf = gb.normal_form(dict(f.terms))
    assert gb.normal_form(nf) == nf
    # adding an ideal member does not change the normal form
    g = gens[rng.randrange(len(gens))] * r.monomial([rng.randint(0, 2) for _ in range(3)])
    assert gb.normal_form(dict((f + g).terms)) == nf
    # standard monomials are exactly the terms normal forms can use
    std = set(gb.standard_monomials().keys)
    assert set(nf) <= std


@given(zero_dim_ideals())
def test_length_is_number_of_standard_monomials(data):
    amb, gens = data
    gb = ideal(gens, amb)
    basis, mats = gb.multiplication_matrices()
    assert len(basis) == gb.quotient_length()
    # the action matrices commute (the quotient is a module)
    for i in range(len(mats)):
        for j in range(i):
            assert mats[i] @ mats[j] == mats[j] @ mats[i]


@given(zero_dim_ideals())
def test_vector_roundtrip(data):
    amb, gens = data
    r = amb.ring
    v = column_vector(gens)
    assert vector_entries(r, v, len(gens)) == gens
