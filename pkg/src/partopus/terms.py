"""Bigraded formal symbols, application trees, and Koszul signs.

Symbols carry two degrees: d (arity minus one; elements of the underlying
space have d = -1) and a super degree.  Interchanging two symbols u, v costs
(-1)^(d(u)d(v) + |u||v|); with total degrees ||u|| = d + dbar + |u| the cost
becomes (-1)^(||u|| ||v||), which is the convention used by the tilde-modified
maps of the master identities.

A Term is a rational coefficient on an application tree whose nodes apply a
map symbol to slot-structured children; a FormalSum keeps such terms in a
canonical normal form (sorted, like terms combined, zeros dropped).
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .partitions import Partition


class Generator:
    """A formal element of the underlying space: d = -1, dbar = 0."""

    __slots__ = ("name", "super_degree", "_key")

    def __init__(self, name, super_degree=0):
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "super_degree", int(super_degree))
        object.__setattr__(self, "_key", (self.name, self.super_degree))

    def __setattr__(self, *a):
        raise AttributeError("Generator is immutable")

    d = property(lambda self: -1)
    dbar = property(lambda self: 0)

    @property
    def total_degree(self):
        return -1 + self.super_degree

    def sort_key(self):
        return (0, self.name, self.super_degree)

    def __eq__(self, other):
        return isinstance(other, Generator) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __str__(self):
        return self.name

    def __repr__(self):
        return "Generator(%r, super=%d)" % (self.name, self.super_degree)


class MapSymbol:
    """A formal partitioned multilinear map of a given type and super degree."""

    __slots__ = ("name", "ptype", "super_degree", "_key")

    def __init__(self, name, ptype, super_degree=0):
        if not isinstance(ptype, Partition):
            ptype = Partition(ptype)
        object.__setattr__(self, "name", str(name))
        object.__setattr__(self, "ptype", ptype)
        object.__setattr__(self, "super_degree", int(super_degree))
        object.__setattr__(self, "_key", (self.name, ptype.slots, self.super_degree))

    def __setattr__(self, *a):
        raise AttributeError("MapSymbol is immutable")

    d = property(lambda self: self.ptype.d)
    dbar = property(lambda self: self.ptype.dbar)

    @property
    def total_degree(self):
        return self.d + self.dbar + self.super_degree

    def sort_key(self):
        return (1, self.name, self.ptype.sort_key(), self.super_degree)

    def __eq__(self, other):
        return isinstance(other, MapSymbol) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __str__(self):
        return "%s%s" % (self.name, self.ptype)

    def __repr__(self):
        return "MapSymbol(%r, %s, super=%d)" % (
            self.name, self.ptype, self.super_degree)


class App:
    """A map symbol applied to slot-structured children (fully applied).

    Children are Generators or nested Apps, so an App always denotes an
    element: d = -1.  Super degrees add.
    """

    __slots__ = ("head", "slots", "super_degree", "_hash")

    def __init__(self, head, slots):
        slots = tuple(tuple(s) for s in slots)
        if len(slots) != len(head.ptype):
            raise ValueError("slot count mismatch for %s: got %d slots"
                             % (head, len(slots)))
        for got, want in zip(slots, head.ptype):
            if len(got) != want:
                raise ValueError("arity mismatch for %s: slots %r" % (head, slots))
        sup = head.super_degree + sum(c.super_degree for s in slots for c in s)
        object.__setattr__(self, "head", head)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "super_degree", sup)
        object.__setattr__(self, "_hash", hash((head, slots)))

    def __setattr__(self, *a):
        raise AttributeError("App is immutable")

    d = property(lambda self: -1)
    dbar = property(lambda self: 0)

    @property
    def total_degree(self):
        return -1 + self.super_degree

    def sort_key(self):
        return (2, self.head.sort_key(),
                tuple(tuple(c.sort_key() for c in s) for s in self.slots))

    def __eq__(self, other):
        return isinstance(other, App) and self.head == other.head \
            and self.slots == other.slots

    def __hash__(self):
        return self._hash

    def children(self):
        for s in self.slots:
            yield from s

    def __str__(self):
        return render_node(self)

    def __repr__(self):
        return "App<%s>" % render_node(self)


def flatten(node):
    """Reading order of atomic symbols: head first, slots left to right."""
    if isinstance(node, Generator):
        return [node]
    out = [node.head]
    for child in node.children():
        out.extend(flatten(child))
    return out


def _pair_sign(u, v, use_total):
    if use_total:
        return -1 if (u.total_degree * v.total_degree) % 2 else 1
    return -1 if (u.d * v.d + u.super_degree * v.super_degree) % 2 else 1


def permutation_sign(objs, perm, use_total=False):
    """Koszul sign of rearranging ``objs`` into the order given by ``perm``.

    ``perm[k]`` is the index into ``objs`` of the item at position k after
    the rearrangement.  Each inverted pair contributes its interchange sign.
    """
    n = len(objs)
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation of indices: %r" % (perm,))
    sign = 1
    for a in range(n):
        for b in range(a + 1, n):
            if perm[a] > perm[b]:
                sign *= _pair_sign(objs[perm[a]], objs[perm[b]], use_total)
    return sign


def koszul_sign(before, after, use_total=False):
    """Sign accrued when ``before`` is reordered into ``after``.

    Items are matched by identity first and then by equality; equal symbols
    are matched in order, which keeps the sign well defined (identical
    symbols never cross).
    """
    if len(before) != len(after):
        raise ValueError("not a permutation: lengths differ")
    used = [False] * len(before)
    perm = []
    for item in after:
        idx = next((k for k, o in enumerate(before) if not used[k] and o is item),
                   None)
        if idx is None:
            idx = next((k for k, o in enumerate(before)
                        if not used[k] and o == item), None)
        if idx is None:
            raise ValueError("%r is not drawn from the original sequence" % (item,))
        used[idx] = True
        perm.append(idx)
    return permutation_sign(list(before), perm, use_total=use_total)


def sign_between(original, reading, use_total=False):
    """Global sign of a term: reading order against the compact-expression order."""
    return koszul_sign(original, reading, use_total=use_total)


class FormalSum:
    """A normalized rational combination of application trees."""

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        if isinstance(terms, dict):
            items = [(c, t) for t, c in terms.items()]
        else:
            items = list(terms)
        acc = {}
        for coeff, tree in items:
            if not isinstance(tree, App):
                raise TypeError("FormalSum terms must be App trees")
            acc[tree] = acc.get(tree, Fraction(0)) + Fraction(coeff)
        object.__setattr__(self, "_terms",
                           {t: c for t, c in acc.items() if c})

    def __setattr__(self, *a):
        raise AttributeError("FormalSum is immutable")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def single(cls, coeff, tree):
        return cls([(coeff, tree)])

    def terms(self):
        """(coefficient, tree) pairs in canonical order."""
        return [(self._terms[t], t)
                for t in sorted(self._terms, key=lambda t: t.sort_key())]

    @property
    def is_zero(self):
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def coeff(self, tree):
        return self._terms.get(tree, Fraction(0))

    def __add__(self, other):
        acc = dict(self._terms)
        for t, c in other._terms.items():
            acc[t] = acc.get(t, Fraction(0)) + c
        return FormalSum([(c, t) for t, c in acc.items()])

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, k):
        k = Fraction(k)
        return FormalSum([(c * k, t) for t, c in self._terms.items()])

    def __eq__(self, other):
        return isinstance(other, FormalSum) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def equal_up_to_sign(self, other):
        """Same trees with the same coefficient magnitudes, signs ignored."""
        if set(self._terms) != set(other._terms):
            return False
        return all(abs(c) == abs(other._terms[t]) for t, c in self._terms.items())

    def map_trees(self, fn):
        """Rewrite every tree; like terms recombine."""
        return FormalSum([(c, fn(t)) for t, c in self._terms.items()])

    def __str__(self):
        return render(self, "text")

    def __repr__(self):
        return "FormalSum<%s>" % render(self, "text")


def normalize(s):
    """Identity on FormalSum (construction normalizes); accepts raw term lists."""
    if isinstance(s, FormalSum):
        return FormalSum(s.terms())
    return FormalSum(s)


# ---------------------------------------------------------------------------
# rendering and parsing

def render_node(node, latex=False):
    if isinstance(node, Generator):
        return node.name
    head = "{%s}" % node.head if not latex else "\\{%s\\}" % node.head
    slots = "|".join(",".join(render_node(c, latex) for c in s)
                     for s in node.slots)
    return "%s{%s}" % (head, slots) if not latex else "%s\\{%s\\}" % (head, slots)


def _coeff_prefix(c, lead):
    sign = "-" if c < 0 else ("" if lead else "+")
    mag = abs(c)
    body = "" if mag == 1 else (str(mag) if mag.denominator == 1 else
                                "%d/%d" % (mag.numerator, mag.denominator))
    return sign + body


def render(s, fmt="text"):
    """Deterministic text/latex/json rendering of a normalized sum."""
    if fmt == "json":
        return json.dumps(to_json(s))
    if fmt not in ("text", "latex"):
        raise ValueError("unknown format %r" % fmt)
    if s.is_zero:
        return "0"
    parts = []
    for coeff, tree in s.terms():
        parts.append(_coeff_prefix(coeff, not parts)
                     + render_node(tree, latex=(fmt == "latex")))
    joiner = " " if fmt == "text" else " "
    return joiner.join(parts)


def _node_to_json(node):
    if isinstance(node, Generator):
        return {"gen": node.name, "super": node.super_degree}
    return {"head": str(node.head), "super": node.head.super_degree,
            "slots": [[_node_to_json(c) for c in s] for s in node.slots]}


def to_json(s):
    out = []
    for coeff, tree in s.terms():
        obj = _node_to_json(tree)
        obj["coeff"] = "%d/%d" % (coeff.numerator, coeff.denominator) \
            if coeff.denominator != 1 else str(coeff.numerator)
        out.append(obj)
    return {"terms": out}


_HEAD_RE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(\(.*\))$")


def _node_from_json(obj):
    if "gen" in obj:
        return Generator(obj["gen"], obj.get("super", 0))
    m = _HEAD_RE.match(obj["head"])
    if not m:
        raise ValueError("bad head %r" % obj["head"])
    sym = MapSymbol(m.group(1), Partition.parse(m.group(2)), obj.get("super", 0))
    return App(sym, [[_node_from_json(c) for c in s] for s in obj["slots"]])


def from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    terms = []
    for t in obj["terms"]:
        c = Fraction(t.get("coeff", "1"))
        terms.append((c, _node_from_json(t)))
    return FormalSum(terms)


def generators(names, supers=0):
    """Convenience: a tuple of generators named after ``names``."""
    if isinstance(supers, int):
        supers = [supers] * len(names)
    return tuple(Generator(n, s) for n, s in zip(names, supers))
