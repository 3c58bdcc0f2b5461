"""Composition of partitioned multilinear maps by subdivision enumeration.

A composition {x}{y1,...,yk} is a sum of partitioned maps, one for each
partition in the higher product of the types.  Each component expands, on
slot-structured arguments, as a signed sum over subdivisions: every inner
map takes consecutive strings of the prescribed lengths from the slots it
covers (adjacent inner maps share one slot), and the leftover strings merge
into the receiving slot of the outer map in every order-preserving way.

Signs are global: each expanded tree is compared against the original order
of the compact expression (maps first, then the arguments slot by slot) and
every inverted pair contributes its interchange sign.  With ``use_total``
the interchange sign uses total degrees, which is the convention under
which the tilde-modified maps of the master identity compose.

Zero-length slots of an inner map are placed like any other string (their
position matters); a zero slot of the outer map never composes, matching
the vanishing of the partition product there.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .partitions import Partition, higher_product, star, star_simple
from .terms import (
    App,
    FormalSum,
    Generator,
    MapSymbol,
    koszul_sign,
)


def interleavings(seqs):
    """All order-preserving merges of the given sequences."""
    seqs = [tuple(s) for s in seqs if s]
    if not seqs:
        yield ()
        return
    if len(seqs) == 1:
        yield seqs[0]
        return

    def rec(rests):
        if all(not r for r in rests):
            yield ()
            return
        for k, r in enumerate(rests):
            if r:
                shrunk = rests[:k] + [r[1:]] + rests[k + 1:]
                for tail in rec(shrunk):
                    yield (r[0],) + tail

    yield from rec(list(seqs))


def tilde_prefactor(flat_args):
    """(-1)^((n-1)||a1|| + (n-2)||a2|| + ... + ||a_{n-1}||) on the flattened list."""
    n = len(flat_args)
    e = sum((n - 1 - i) * flat_args[i].total_degree for i in range(n))
    return -1 if e % 2 else 1


class PMap:
    """A formal partitioned map that can expand on slot-structured arguments.

    ``expand`` returns (coefficient, tree) pairs WITHOUT the global reordering
    sign, which is applied once at the top by ``apply_map``.
    """

    ptype = None
    super_degree = 0

    @property
    def d(self):
        return self.ptype.d

    @property
    def dbar(self):
        return self.ptype.dbar

    @property
    def total_degree(self):
        return self.d + self.dbar + self.super_degree

    @property
    def arity(self):
        return self.ptype.arity

    def symbols(self):
        raise NotImplementedError

    def expand(self, slots):
        raise NotImplementedError


class SymbolPMap(PMap):
    """An atomic map symbol."""

    def __init__(self, sym):
        self.sym = sym
        self.ptype = sym.ptype
        self.super_degree = sym.super_degree

    def symbols(self):
        return (self.sym,)

    def expand(self, slots):
        return [(Fraction(1), App(self.sym, slots))]

    def __repr__(self):
        return "SymbolPMap(%s)" % self.sym


class TildeMap(PMap):
    """The tilde modification: same map, argument-dependent sign prefactor."""

    def __init__(self, inner):
        self.inner = as_pmap(inner)
        self.ptype = self.inner.ptype
        self.super_degree = self.inner.super_degree

    def symbols(self):
        return self.inner.symbols()

    def expand(self, slots):
        flat = [a for s in slots for a in s]
        p = tilde_prefactor(flat)
        return [(c * p, t) for c, t in self.inner.expand(slots)]

    def __repr__(self):
        return "TildeMap(%r)" % (self.inner,)


def as_pmap(obj):
    if isinstance(obj, PMap):
        return obj
    if isinstance(obj, MapSymbol):
        return SymbolPMap(obj)
    raise TypeError("expected a map symbol or PMap, got %r" % (obj,))


def tilde(x):
    """Tilde-modify a map; applying it twice only squares the prefactor away."""
    return TildeMap(x)


# ---------------------------------------------------------------------------
# subdivision plans

class Subdivision:
    """One way of placing the inner maps' strings inside the target slots.

    ``placements[q]`` lists, for target slot q of the affected region, the
    (inner index, inner slot, start, length) of each c-string in that slot;
    ``free[r]`` lists the (slot, lo, hi) leftover segments that merge into
    the outer argument region r (region 0 precedes the first inner map,
    region k follows the last).
    """

    __slots__ = ("placements", "free", "n_inners")

    def __init__(self, placements, free, n_inners):
        self.placements = placements
        self.free = free
        self.n_inners = n_inners

    def strings(self, region_args):
        """(b, c, d) element strings per region slot, pair composition only."""
        out = []
        for q, args in enumerate(region_args):
            (_, _, start, length), = self.placements[q]
            out.append((tuple(args[:start]),
                        tuple(args[start:start + length]),
                        tuple(args[start + length:])))
        return out

    def c_slots(self, region_args):
        """Slot-structured c-strings per inner map."""
        per_inner = {}
        for q, placed in enumerate(self.placements):
            for (alpha, li, start, length) in placed:
                per_inner.setdefault(alpha, {})[li] = \
                    tuple(region_args[q][start:start + length])
        return [tuple(per_inner[a][li] for li in sorted(per_inner[a]))
                for a in range(self.n_inners)]

    def free_strings(self, region_args):
        """Leftover strings grouped by outer region, empties dropped."""
        return [[tuple(region_args[q][lo:hi]) for q, lo, hi in segs
                 if hi > lo] for segs in self.free]


def _region_layout(inner_types):
    starts, pos = [], 0
    for t in inner_types:
        starts.append(pos)
        pos += len(t) - 1
    return starts, pos + 1


def _slot_placements(size, occupants, inner_types):
    """Yield (placements, segments) for one target slot.

    occupants: list of (inner index, inner slot index), in order; adjacent
    inner maps may share the slot.  Segments carry the outer region they
    merge into: a gap before inner alpha's string joins region alpha, a gap
    after it joins region alpha + 1.
    """
    if len(occupants) == 1:
        (alpha, li), = occupants
        j = inner_types[alpha][li]
        hi = size - j
        if hi < 0:
            return
        for p in range(hi + 1):
            yield ([(alpha, li, p, j)],
                   [(0, p, alpha), (p + j, size, alpha + 1)])
    else:
        (a1, l1), (a2, l2) = occupants
        j1, j2 = inner_types[a1][l1], inner_types[a2][l2]
        for p1 in range(size - j1 - j2 + 1):
            for p2 in range(p1 + j1, size - j2 + 1):
                yield ([(a1, l1, p1, j1), (a2, l2, p2, j2)],
                       [(0, p1, a1), (p1 + j1, p2, a1 + 1),
                        (p2 + j2, size, a2 + 1)])


def _subdivisions(region_sizes, inner_types):
    """All subdivisions of a region composed with the given inner maps."""
    starts, span = _region_layout(inner_types)
    if span != len(region_sizes):
        return []
    occ = [[] for _ in range(span)]
    for alpha, t in enumerate(inner_types):
        for li in range(len(t)):
            occ[starts[alpha] + li].append((alpha, li))
    k = len(inner_types)
    total_j = sum(sum(t.slots) for t in inner_types)
    if sum(region_sizes) - total_j < 0:
        return []
    per_slot = []
    for q, size in enumerate(region_sizes):
        choices = list(_slot_placements(size, occ[q], inner_types))
        if not choices:
            return []
        per_slot.append(choices)
    subs = []
    for combo in itertools.product(*per_slot):
        placements = [c[0] for c in combo]
        free = [[] for _ in range(k + 1)]
        for q, (_, segs) in enumerate(combo):
            for lo, hi, region in segs:
                if region <= k:
                    free[region].append((q, lo, hi))
        subs.append(Subdivision(placements, free, k))
    return subs


def enumerate_subdivisions(target, outer_slot_size, inner):
    """All subdivisions for one slot of size ``outer_slot_size`` composed with
    ``inner`` at the given target; the target must lie in (i) * inner."""
    if target not in star_simple(outer_slot_size, inner).support():
        raise ValueError("%s is not a component of (%d)*%s"
                         % (target, outer_slot_size, inner))
    free_needed = outer_slot_size - 1
    subs = _subdivisions(list(target.slots), [inner])
    # the slot sizes already force the leftover total; assert the bookkeeping
    assert all(sum(hi - lo for seg in s.free for q, lo, hi in seg) == free_needed
               for s in subs)
    return subs


class Composition(PMap):
    """One typed component of {outer}{inner1,...,innerk}."""

    def __init__(self, outer, inners, target):
        self.outer = as_pmap(outer)
        self.inners = tuple(as_pmap(y) for y in inners)
        if not isinstance(target, Partition):
            target = Partition(target)
        self.ptype = target
        self.super_degree = self.outer.super_degree \
            + sum(y.super_degree for y in self.inners)
        if len(self.inners) > 1 and not all(y.ptype.is_regular for y in self.inners):
            raise ValueError("simultaneous composition takes regular inner types")
        self._routes = self._find_routes()
        if not self._routes:
            raise ValueError("%s does not arise from composing %s with %s" % (
                target, self.outer.ptype,
                ",".join(str(y.ptype) for y in self.inners)))

    def _find_routes(self):
        inner_types = [y.ptype for y in self.inners]
        _, span = _region_layout(inner_types)
        outer_slots = self.outer.ptype.slots
        target = self.ptype.slots
        k = len(self.inners)
        total_j = sum(sum(t.slots) for t in inner_types)
        routes = []
        for l, i_l in enumerate(outer_slots):
            if len(target) != len(outer_slots) - 1 + span:
                continue
            if target[:l] != outer_slots[:l]:
                continue
            if target[l + span:] != outer_slots[l + 1:]:
                continue
            region = list(target[l:l + span])
            if sum(region) - total_j != i_l - k:
                continue
            subs = _subdivisions(region, inner_types)
            if subs:
                routes.append((l, span, subs))
        return routes

    def symbols(self):
        out = list(self.outer.symbols())
        for y in self.inners:
            out.extend(y.symbols())
        return tuple(out)

    def subdivision_count(self):
        """Number of subdivisions over all routes (the bubble count)."""
        return sum(len(subs) for _, _, subs in self._routes)

    def expand(self, slots):
        out = []
        for l, span, subs in self._routes:
            region_args = [tuple(s) for s in slots[l:l + span]]
            for sub in subs:
                c_slots = sub.c_slots(region_args)
                inner_sums = [y.expand(cs)
                              for y, cs in zip(self.inners, c_slots)]
                frees = sub.free_strings(region_args)
                merge_pools = [list(interleavings(f)) for f in frees]
                for inner_combo in itertools.product(*inner_sums):
                    coeff = Fraction(1)
                    trees = []
                    for c, t in inner_combo:
                        coeff *= c
                        trees.append(t)
                    for merge_combo in itertools.product(*merge_pools):
                        slot_args = list(merge_combo[0])
                        for t, merged in zip(trees, merge_combo[1:]):
                            slot_args.append(t)
                            slot_args.extend(merged)
                        outer_args = tuple(slots[:l]) + (tuple(slot_args),) \
                            + tuple(slots[l + span:])
                        for oc, tree in self.outer.expand(outer_args):
                            out.append((coeff * oc, tree))
        return out

    def __repr__(self):
        return "Composition<{%s}{%s} at %s>" % (
            self.outer.ptype, ",".join(str(y.ptype) for y in self.inners),
            self.ptype)


def compose_pair(x, y):
    """{x}{y} as a map from target partitions to typed compositions."""
    x, y = as_pmap(x), as_pmap(y)
    out = {}
    for tau in sorted(star(x.ptype, y.ptype).support()):
        out[tau] = Composition(x, (y,), tau)
    return out


def compose_multi(x, ys):
    """{x}{y1,...,yk}: the simultaneous composition, regular types only."""
    x = as_pmap(x)
    ys = [as_pmap(y) for y in ys]
    if len(ys) == 1:
        return compose_pair(x, ys[0])
    shape = Partition((1, len(ys)))
    support = higher_product(shape, x.ptype, [[y.ptype for y in ys]]).support()
    return {tau: Composition(x, ys, tau) for tau in sorted(support)}


def _reading_units(tree, unit_ids):
    out = [tree.head]
    for child in tree.children():
        if id(child) in unit_ids or isinstance(child, Generator):
            out.append(child)
        else:
            out.extend(_reading_units(child, unit_ids))
    return out


def apply_map(pmap, slots, use_total=False, extra_unit_ids=(),
              original_symbols=None):
    """Apply a map to slot-structured arguments; returns the signed FormalSum.

    The sign of each term compares its reading order (heads first, slots left
    to right, argument trees as single units) with the original order of the
    compact expression.  ``original_symbols`` overrides the written order of
    the map symbols, e.g. to sign {x}{z,y} against the expression {x}{y}{z}.
    """
    pmap = as_pmap(pmap)
    slots = tuple(tuple(s) for s in slots)
    if len(slots) != len(pmap.ptype) or \
            any(len(s) != w for s, w in zip(slots, pmap.ptype)):
        raise ValueError("arguments %r do not fit the type %s"
                         % (slots, pmap.ptype))
    flat = [a for s in slots for a in s]
    unit_ids = {id(a) for a in flat} | set(extra_unit_ids)
    symbols = list(original_symbols) if original_symbols is not None \
        else list(pmap.symbols())
    original = symbols + flat
    out = []
    for coeff, tree in pmap.expand(slots):
        reading = _reading_units(tree, unit_ids)
        sgn = koszul_sign(original, reading, use_total=use_total)
        out.append((coeff * sgn, tree))
    return FormalSum(out)


# ---------------------------------------------------------------------------
# brace chains on single-slot types

class _Lazy:
    """A fully applied map whose expansion is deferred: element-valued."""

    __slots__ = ("pmap", "args")

    def __init__(self, pmap, args):
        self.pmap = pmap
        self.args = tuple(args)


def _is_elementish(entry):
    return isinstance(entry, (Generator, App, _Lazy))


def _entry_arity(entry):
    return entry.pmap.arity if isinstance(entry, _Lazy) else None


def _combine(ys, zs):
    """Feed the group ``zs`` into the group ``ys`` in every planar way.

    Map entries of ``ys`` swallow consecutive blocks of ``zs``; only blocks
    of element-valued entries that exactly fill the map survive (a partially
    applied map can never complete, and substitution into an element is
    inadmissible).  Leftover entries interleave in order.
    """
    m, n = len(ys), len(zs)

    def rec(yi, zi):
        if yi == m:
            yield list(zs[zi:])
            return
        y = ys[yi]
        for start in range(zi, n + 1):
            prefix = list(zs[zi:start])
            if _is_elementish(y):
                for tail in rec(yi + 1, start):
                    yield prefix + [y] + tail
                continue
            # empty block: the map rides along unapplied
            for tail in rec(yi + 1, start):
                yield prefix + [y] + tail
            want = y.arity
            stop = start + want
            if stop <= n and all(_is_elementish(e) for e in zs[start:stop]):
                entry = _Lazy(y, zs[start:stop])
                for tail in rec(yi + 1, stop):
                    yield prefix + [entry] + tail

    yield from rec(0, 0)


def _expand_entry(entry):
    if isinstance(entry, _Lazy):
        pools = [_expand_entry(a) for a in entry.args]
        out = []
        for combo in itertools.product(*pools):
            coeff = Fraction(1)
            units = []
            for c, u in combo:
                coeff *= c
                units.append(u)
            for c2, tree in entry.pmap.expand((tuple(units),)):
                out.append((coeff * c2, tree))
        return out
    return [(Fraction(1), entry)]


def expand_chain(head, groups, use_total=False):
    """{head}{G1}...{Gt}: iterated substitution on single-slot types.

    Groups hold map symbols and elements; the final result must be element
    valued, so the chain has to supply exactly the arguments the surviving
    maps consume.  Inadmissible substitutions contribute nothing.
    """
    head = as_pmap(head)
    entry_groups = []
    for g in groups:
        entry_groups.append([as_pmap(e) if isinstance(e, (MapSymbol, PMap))
                             else e for e in g])
    for p in [head] + [e for g in entry_groups for e in g
                       if isinstance(e, PMap)]:
        if p.dbar != 0:
            raise ValueError("brace chains are defined here for single-slot "
                             "types; got %s" % p.ptype)

    original = list(head.symbols())
    unit_ids = set()
    for g in entry_groups:
        for e in g:
            if isinstance(e, PMap):
                original.extend(e.symbols())
            else:
                original.append(e)
                unit_ids.add(id(e))

    combos = [entry_groups[0]] if len(entry_groups) == 1 else None
    if combos is None:
        stack = list(entry_groups)
        combos = [stack.pop()]
        while stack:
            prev = stack.pop()
            combos = [h for c in combos for h in _combine(prev, c)]

    want = head.arity
    out = []
    for combo in combos:
        if len(combo) != want or not all(_is_elementish(e) for e in combo):
            continue
        pools = [_expand_entry(e) for e in combo]
        for picked in itertools.product(*pools):
            coeff = Fraction(1)
            units = []
            for c, u in picked:
                coeff *= c
                units.append(u)
            for c2, tree in head.expand((tuple(units),)):
                reading = _reading_units(tree, unit_ids)
                sgn = koszul_sign(original, reading, use_total=use_total)
                out.append((coeff * c2 * sgn, tree))
    return FormalSum(out)


def substitute_identity(s, id_symbol):
    """Erase applications of an identity symbol: id(u) becomes u."""
    def rewrite(node):
        if isinstance(node, Generator):
            return node
        slots = tuple(tuple(rewrite(c) for c in slot) for slot in node.slots)
        if node.head == id_symbol:
            children = [c for slot in slots for c in slot]
            if len(children) == 1:
                return children[0]
        return App(node.head, slots)

    return s.map_trees(rewrite)
