import itertools
import random

from fractions import Fraction

import pytest

from partopus.partitions import P, star
from partopus.terms import App, FormalSum, Generator, MapSymbol, generators
from partopus.compose import (
    Composition,
    apply_map,
    compose_multi,
    compose_pair,
    enumerate_subdivisions,
    expand_chain,
    interleavings,
    substitute_identity,
    tilde,
    tilde_prefactor,
)


def sym(name, ptype, sup=0):
    return MapSymbol(name, P(ptype), sup)


def slot_args(target, gens):
    gens = list(gens)
    out = []
    for width in P(target) if isinstance(target, str) else target:
        out.append(tuple(gens[:width]))
        gens = gens[width:]
    return tuple(out)


def test_interleavings():
    merges = set(interleavings([("a", "b"), ("c",)]))
    assert merges == {("a", "b", "c"), ("a", "c", "b"), ("c", "a", "b")}
    assert list(interleavings([])) == [()]
    assert list(interleavings([(), ("x",)])) == [("x",)]


def test_subdivision_counts_x3_y24():
    # {x(3)}{y(2|4)}: subdivisions per component, as bubbles are counted
    assert len(enumerate_subdivisions(P("(2|6)"), 3, P("(2|4)"))) == 1 * 3
    assert len(enumerate_subdivisions(P("(3|5)"), 3, P("(2|4)"))) == 4
    assert len(enumerate_subdivisions(P("(4|4)"), 3, P("(2|4)"))) == 3
    with pytest.raises(ValueError):
        enumerate_subdivisions(P("(5|3)"), 3, P("(2|4)"))


def test_subdivision_count_zero_slot():
    # the six subdivisions for (2|2) in {x(4)}{y(1|0)}: the empty string of
    # the zero slot is positioned, and positions count as different
    assert len(enumerate_subdivisions(P("(2|2)"), 4, P("(1|0)"))) == 6


def test_whole_slot_identity_subdivision():
    assert len(enumerate_subdivisions(P("(2|3)"), 1, P("(2|3)"))) == 1


def expand_terms(x, y, target, names="abcdefgh", multi=False):
    comp = (compose_multi(x, y) if multi else compose_pair(x, y))[P(target)]
    gens = generators(names[:P(target).arity])
    return apply_map(comp, slot_args(target, gens)), gens, comp


def test_composition_term_counts_x3_y24():
    x, y = sym("x", "(3)"), sym("y", "(2|4)")
    for target, n in [("(2|6)", 3), ("(3|5)", 6), ("(4|4)", 3)]:
        s, _, _ = expand_terms(x, y, target)
        assert len(s) == n, target


def test_composition_structure_x3_y24_first_component():
    x, y = sym("x", "(3)"), sym("y", "(2|4)")
    s, g, _ = expand_terms(x, y, "(2|6)")
    a, b, c, d, e, f, gg, h = g
    expected_trees = {
        App(x, [[App(y, [[a, b], [c, d, e, f]]), gg, h]]),
        App(x, [[c, App(y, [[a, b], [d, e, f, gg]]), h]]),
        App(x, [[c, d, App(y, [[a, b], [e, f, gg, h]])]]),
    }
    assert {t for _, t in s.terms()} == expected_trees
    assert all(abs(cf) == 1 for cf, _ in s.terms())


def test_composition_multi_slot_outer():
    # {x(1|2)}{y(2|3)} componentwise term counts from the worked example
    x, y = sym("x", "(1|2)"), sym("y", "(2|3)")
    assert star(P("(1|2)"), P("(2|3)")).support() == {
        P("(2|3|2)"), P("(1|2|4)"), P("(1|3|3)")}
    for target, n in [("(2|3|2)", 1), ("(1|2|4)", 2), ("(1|3|3)", 2)]:
        s, _, _ = expand_terms(x, y, target)
        assert len(s) == n, target
    s, g, _ = expand_terms(x, y, "(2|3|2)")
    a, b, c, d, e, f, gg = g
    assert {t for _, t in s.terms()} == {
        App(x, [[App(y, [[a, b], [c, d, e]])], [f, gg]])}


def test_zero_slot_composition_12_terms():
    x, y = sym("x", "(4)"), sym("y", "(1|0)")
    s, g, comp = expand_terms(x, y, "(2|2)")
    assert comp.subdivision_count() == 6
    assert len(s) == 12
    a, b, c, d = g
    ya, yb = App(y, [[a], []]), App(y, [[b], []])
    expected = {
        App(x, [[ya, b, c, d]]), App(x, [[ya, c, b, d]]), App(x, [[ya, c, d, b]]),
        App(x, [[c, ya, b, d]]), App(x, [[c, ya, d, b]]),
        App(x, [[c, d, ya, b]]),
        App(x, [[a, yb, c, d]]),
        App(x, [[a, c, yb, d]]), App(x, [[c, a, yb, d]]),
        App(x, [[a, c, d, yb]]), App(x, [[c, a, d, yb]]), App(x, [[c, d, a, yb]]),
    }
    assert {t for _, t in s.terms()} == expected


def test_element_substitution_via_zero_partition():
    # {x(n)}{y(0)} substitutes the element y(0) into every argument position
    x, y = sym("x", "(3)"), sym("y", "(0)")
    s, g, _ = expand_terms(x, y, "(2)")
    assert len(s) == 3
    b = App(y, [[]])
    a1, a2 = g
    assert {t for _, t in s.terms()} == {
        App(x, [[b, a1, a2]]), App(x, [[a1, b, a2]]), App(x, [[a1, a2, b]])}


def test_identity_map_gives_arity_factor():
    # {x(i)}{id(1)} = i {x(i)} once the identity symbol is erased
    ident = sym("id", "(1)")
    for i in range(1, 6):
        x = sym("x", "(%d)" % i)
        comp = compose_pair(x, ident)[P("(%d)" % i)]
        gens = generators("abcdefgh"[:i])
        s = substitute_identity(apply_map(comp, (gens,)), ident)
        assert s == FormalSum([(i, App(x, (gens,)))])


def test_multibrace_signed_expansion():
    # {x}{y,z}{a,...,f} with d(x)=2, d(y)=1, d(z)=2: three fully signed terms
    rng = random.Random(11)
    for _ in range(6):
        sx, sy, sz = rng.randint(0, 1), rng.randint(0, 1), rng.randint(0, 1)
        sup = [rng.randint(0, 1) for _ in range(6)]
        x, y, z = sym("x", "(3)", sx), sym("y", "(2)", sy), sym("z", "(3)", sz)
        gens = generators("abcdef", sup)
        a, b, c, d, e, f = gens
        comp = compose_multi(x, [y, z])[P("(6)")]
        s = apply_map(comp, (gens,))
        sa, sb, sc = sup[0], sup[1], sup[2]
        expected = FormalSum([
            ((-1) ** (sz * (sa + sb)),
             App(x, [[App(y, [[a, b]]), App(z, [[c, d, e]]), f]])),
            ((-1) ** (sz * (sa + sb + sc)),
             App(x, [[App(y, [[a, b]]), c, App(z, [[d, e, f]])]])),
            (-(-1) ** (sy * sa + sz * (sa + sb + sc)),
             App(x, [[a, App(y, [[b, c]]), App(z, [[d, e, f]])]])),
        ])
        assert s == expected, (sx, sy, sz, sup)


def test_chain_twelve_terms():
    x, y, z = sym("x", "(3)"), sym("y", "(2)"), sym("z", "(3)")
    gens = generators("abcdef")
    s = expand_chain(x, [[y], [z], list(gens)])
    assert len(s) == 12
    # the chain contains the simultaneous substitutions both ways and the
    # nested ones
    both = apply_map(compose_multi(x, [y, z])[P("(6)")], (gens,))
    for _, t in both.terms():
        assert s.coeff(t) != 0


def test_chain_antisymmetrization():
    x = sym("x", "(3)")
    a, b, c = generators("abc")
    s = expand_chain(x, [[a], [b], [c]])
    assert len(s) == 6
    for perm in itertools.permutations([a, b, c]):
        sign = 1
        seq = list(perm)
        # parity of the permutation: elements with super degree 0 swap at -1
        for i in range(3):
            for j in range(i + 1, 3):
                if (a, b, c).index(seq[i]) > (a, b, c).index(seq[j]):
                    sign = -sign
        assert s.coeff(App(x, [list(perm)])) == sign


def test_chain_mm_is_associativity():
    m = sym("m", "(2)")
    a, b, c = generators("abc")
    s = expand_chain(m, [[m], [a, b, c]])
    assert s == FormalSum([
        (1, App(m, [[App(m, [[a, b]]), c]])),
        (-1, App(m, [[a, App(m, [[b, c]])]])),
    ])


def test_inadmissible_substitution_vanishes():
    # substituting into an element is inadmissible: {x}{a}{b} has no nesting
    x = sym("x", "(2)")
    a, b = generators("ab")
    s = expand_chain(x, [[a], [b]])
    assert len(s) == 2
    assert s.coeff(App(x, [[a, b]])) == 1
    assert s.coeff(App(x, [[b, a]])) == -1


def test_type_soundness_supports_match():
    types = ["(1)", "(2)", "(3)", "(1|1)", "(1|2)", "(2|1)", "(1|1|1)", "(2|2)"]
    for t1, t2 in itertools.product(types, repeat=2):
        x, y = sym("x", t1), sym("y", t2)
        assert set(compose_pair(x, y)) == star(P(t1), P(t2)).support()


def test_multi_type_support_matches_higher_product():
    from partopus.partitions import higher_product
    x, y, z = sym("x", "(2|3)"), sym("y", "(2)"), sym("z", "(3|4)")
    got = set(compose_multi(x, [y, z]))
    want = higher_product(P("(1|2)"), P("(2|3)"),
                          [[P("(2)"), P("(3|4)")]]).support()
    assert got == want


def _triple_composition(x, y, z, order="left"):
    """((x∘y)∘z) or (x∘(y∘z)) per target, applied to generic generators."""
    acc = {}
    if order == "left":
        for t1, w in compose_pair(x, y).items():
            for t2, c in compose_pair(w, z).items():
                acc.setdefault(t2, []).append(c)
    else:
        for t1, w in compose_pair(y, z).items():
            for t2, c in compose_pair(x, w).items():
                acc.setdefault(t2, []).append(c)
    out = {}
    for target, comps in acc.items():
        gens = generators(["g%d" % k for k in range(target.arity)])
        args = slot_args(target, gens)
        total = FormalSum.zero()
        for c in comps:
            total = total + apply_map(c, args)
        out[target] = total
    return out


def test_single_slot_composition_is_right_pre_lie():
    # classical Gerstenhaber: for single-slot types the iterated composition
    # defect ({x}{y}){z} - {x}{{y}{z}} is graded symmetric in y and z
    types = ["(1)", "(2)", "(3)"]
    rng = random.Random(3)
    for t1, t2, t3 in itertools.product(types, repeat=3):
        sx, sy, sz = rng.randint(0, 1), rng.randint(0, 1), rng.randint(0, 1)
        x, y, z = sym("x", t1, sx), sym("y", t2, sy), sym("z", t3, sz)
        eps = (-1) ** (P(t2).d * P(t3).d + sy * sz)

        def defect(u, v):
            lhs = _triple_composition(x, u, v, "left")
            rhs = _triple_composition(x, u, v, "right")
            out = {}
            for tgt in set(lhs) | set(rhs):
                out[tgt] = lhs.get(tgt, FormalSum.zero()) \
                    - rhs.get(tgt, FormalSum.zero())
            return out

        d1 = defect(y, z)
        d2 = defect(z, y)
        # relabel the symbols of d2 is unnecessary: same objects, same trees;
        # the grading sign relates the two orders
        for tgt in set(d1) | set(d2):
            lhs = d1.get(tgt, FormalSum.zero())
            rhs = d2.get(tgt, FormalSum.zero()).scale(eps)
            assert lhs == rhs, (t1, t2, t3, tgt, sx, sy, sz)


def test_partitioned_chain_defect_is_symmetric():
    # for partitioned types the triple composition is read structurally:
    # ({x}{y}){z} - {x}{{y}{z}} = {x}{y,z} + {x}{z,y}, both signed against
    # the written order {x}{y}{z}; the defect is symmetric in y, z
    types = ["(2)", "(1|1)", "(1|2)"]
    rng = random.Random(5)
    for t1, t2, t3 in itertools.product(types, repeat=3):
        sx, sy, sz = rng.randint(0, 1), rng.randint(0, 1), rng.randint(0, 1)
        x, y, z = sym("x", t1, sx), sym("y", t2, sy), sym("z", t3, sz)
        eps = (-1) ** (P(t2).d * P(t3).d + sy * sz)

        def separate_terms(u, v):
            out = {}
            for tgt, comp in compose_multi(x, [u, v]).items():
                gens = generators(["g%d" % k for k in range(tgt.arity)])
                out[tgt] = apply_map(comp, slot_args(tgt, gens),
                                     original_symbols=(x, y, z))
            return out

        # the cross term {x}{z,y} carries the Gerstenhaber sign relative to
        # {x}{y,z} when both are signed against the written order {x}{y}{z};
        # the structural defect {x}{y,z} + {x}{z,y} is then symmetric
        for tgt, plain in compose_multi(x, [z, y]).items():
            gens = generators(["g%d" % k for k in range(tgt.arity)])
            own = apply_map(plain, slot_args(tgt, gens))
            rel = apply_map(plain, slot_args(tgt, gens),
                            original_symbols=(x, y, z))
            assert rel == own.scale(eps), (t1, t2, t3, tgt)


def test_tilde_prefactor_and_wrapper():
    m = sym("m", "(2)")
    a, b = generators("ab", [1, 0])
    # bilinear map: prefactor is (-1)^{||a||} on the first argument
    assert tilde_prefactor([a, b]) == (-1) ** (a.total_degree % 2)
    s = apply_map(tilde(m), [(a, b)], use_total=True)
    assert s == FormalSum([((-1) ** (1 + a.super_degree), App(m, [[a, b]]))])
    # unary maps are unchanged; applying tilde twice squares the sign away
    u = sym("u", "(1)", 1)
    assert apply_map(tilde(u), [(a,)], use_total=True) == \
        apply_map(u, [(a,)], use_total=True)
    assert apply_map(tilde(tilde(m)), [(a, b)], use_total=True) == \
        apply_map(m, [(a, b)], use_total=True)


def test_tilde_squared_master_component_is_associativity():
    # {m~}{m~}{a,b,c} = (-1)^{|b|} (m(m(a,b),c) - (-1)^{|a|} m(a,m(b,c)))
    for sa, sb, sc in itertools.product((0, 1), repeat=3):
        m = sym("m", "(2)", 0)
        gens = generators("abc", [sa, sb, sc])
        a, b, c = gens
        comp = Composition(tilde(m), (tilde(m),), P("(3)"))
        s = apply_map(comp, (gens,), use_total=True)
        expected = FormalSum([
            ((-1) ** sb, App(m, [[App(m, [[a, b]]), c]])),
            (-((-1) ** sb), App(m, [[a, App(m, [[b, c]])]])),
        ])
        assert s == expected, (sa, sb, sc)


def test_type_ii_ingredient_identity_slots():
    # {m(3)}{id(1|0)} + {m(3)}{id(0|1)} at (1|2) adds up to
    # 3 {m(3)}{a}{b,c} once the identity applications are erased
    m = sym("m", "(3)")
    gens = generators("abc")
    a, b, c = gens
    total = FormalSum.zero()
    for idt in ("(1|0)", "(0|1)"):
        ident = sym("id", idt)
        comp = compose_pair(m, ident)[P("(1|2)")]
        s = apply_map(comp, slot_args("(1|2)", gens))
        total = total + substitute_identity(s, ident)
    chain = expand_chain(m, [[a], [b, c]])
    assert total == chain.scale(3)
