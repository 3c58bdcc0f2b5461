"""Ordered partitions and the slot-insertion product.

An ordered partition (i1|...|ir) groups the arguments of a multilinear map
into r slots.  The product of two partitions records which argument
groupings arise when a map of the second type is substituted into one slot
of a map of the first type.  Products of basis partitions are always
support-reduced (every partition in the result carries coefficient 1);
iterated products reduce at every step.  The raw, multiplicity-counting
variant is exposed separately because term generation for master
identities needs per-factorization multiplicities.

Gradings: d = (total arguments) - 1 and dbar = (slot count) - 1, both
additive over the product.  A partition is regular when every slot is
positive; zero slots are admitted everywhere except in higher products.
"""

from __future__ import annotations

import itertools
import json
import re
from functools import lru_cache


class PartitionParseError(ValueError):
    """Raised on malformed partition or partition-sum text.

    ``position`` is the character offset of the offending token.
    """

    def __init__(self, message, position=0):
        super().__init__(message)
        self.position = position


class Partition:
    """An immutable ordered tuple of slot sizes, each >= 0, at least one slot."""

    __slots__ = ("slots", "_hash")

    def __init__(self, slots):
        slots = tuple(int(s) for s in slots)
        if len(slots) < 1:
            raise ValueError("a partition needs at least one slot")
        if any(s < 0 for s in slots):
            raise ValueError("slot sizes must be nonnegative: %r" % (slots,))
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "_hash", hash(slots))

    def __setattr__(self, name, value):
        raise AttributeError("Partition is immutable")

    @property
    def d(self):
        """Total number of arguments minus one."""
        return sum(self.slots) - 1

    @property
    def dbar(self):
        """Total number of slots minus one."""
        return len(self.slots) - 1

    @property
    def is_regular(self):
        return all(s >= 1 for s in self.slots)

    @property
    def arity(self):
        return sum(self.slots)

    def sort_key(self):
        return (self.d, self.dbar, self.slots)

    def __len__(self):
        return len(self.slots)

    def __iter__(self):
        return iter(self.slots)

    def __getitem__(self, idx):
        return self.slots[idx]

    def __eq__(self, other):
        return isinstance(other, Partition) and self.slots == other.slots

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return "(" + "|".join(str(s) for s in self.slots) + ")"

    def __repr__(self):
        return "Partition%r" % (self.slots,)

    def replace_slot(self, idx, pieces):
        """New partition with slot ``idx`` replaced by the slot sequence ``pieces``."""
        return Partition(self.slots[:idx] + tuple(pieces) + self.slots[idx + 1:])

    @classmethod
    def parse(cls, text, offset=0):
        s = text.strip()
        pad = offset + (len(text) - len(text.lstrip()))
        m = re.fullmatch(r"\(\s*\d+\s*(?:\|\s*\d+\s*)*\)", s)
        if not m:
            raise PartitionParseError(
                "expected a partition like (1|2|3), got %r" % text, pad)
        return cls(int(tok) for tok in re.findall(r"\d+", s))


def P(text):
    """Shorthand parser: P("(1|2|3)")."""
    return Partition.parse(text)


class PartitionVector:
    """A finite integer combination of partitions.

    ``form`` is "reduced" (no record of multiplicities; product outputs carry
    coefficient 1) or "raw" (multiplicities preserved for subdivision
    counting).  The additive group structure is exact either way; only the
    provenance differs.
    """

    __slots__ = ("entries", "form")

    def __init__(self, entries=(), form="reduced"):
        if form not in ("reduced", "raw"):
            raise ValueError("form must be 'reduced' or 'raw'")
        acc = {}
        items = entries.items() if isinstance(entries, dict) else entries
        for pi, c in items:
            if not isinstance(pi, Partition):
                pi = Partition(pi)
            c = int(c)
            if c:
                acc[pi] = acc.get(pi, 0) + c
                if not acc[pi]:
                    del acc[pi]
        object.__setattr__(self, "entries", acc)
        object.__setattr__(self, "form", form)

    def __setattr__(self, name, value):
        raise AttributeError("PartitionVector is immutable")

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def basis(cls, pi):
        return cls([(pi, 1)])

    def support(self):
        return set(self.entries)

    def coeff(self, pi):
        return self.entries.get(pi, 0)

    def reduce(self):
        """Set every nonzero coefficient to 1 (the paper's duplicate erasure)."""
        return PartitionVector([(pi, 1) for pi in self.entries], form="reduced")

    @property
    def is_zero(self):
        return not self.entries

    def terms(self):
        """(coefficient, partition) pairs in canonical order: by d, dbar, slots."""
        return [(self.entries[pi], pi) for pi in sorted(self.entries)]

    def __add__(self, other):
        acc = dict(self.entries)
        for pi, c in other.entries.items():
            acc[pi] = acc.get(pi, 0) + c
        return PartitionVector(acc, form=self.form)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return PartitionVector({pi: -c for pi, c in self.entries.items()},
                               form=self.form)

    def scale(self, k):
        return PartitionVector({pi: k * c for pi, c in self.entries.items()},
                               form=self.form)

    def __eq__(self, other):
        return isinstance(other, PartitionVector) and self.entries == other.entries

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def __str__(self):
        if not self.entries:
            return "0"
        out = []
        for c, pi in self.terms():
            mag = abs(c)
            body = ("" if mag == 1 else str(mag)) + str(pi)
            if not out:
                out.append(body if c > 0 else "-" + body)
            else:
                out.append(("+" if c > 0 else "-") + body)
        return "".join(out)

    def __repr__(self):
        return "PartitionVector<%s>" % self

    def to_json(self):
        return {"terms": [{"coeff": c, "slots": list(pi.slots)}
                          for c, pi in self.terms()]}

    @classmethod
    def from_json(cls, obj):
        return cls([(Partition(t["slots"]), int(t["coeff"]))
                    for t in obj["terms"]])

    @classmethod
    def parse(cls, text):
        """Parse sums like "(2|6)+(3|5)-2(4|4)".  Whitespace-insensitive."""
        s = text.strip()
        if s == "0":
            return cls.zero()
        pos, terms = 0, []
        token = re.compile(r"\s*([+-]?)\s*(\d*)\s*(\(\s*\d+\s*(?:\|\s*\d+\s*)*\))")
        while pos < len(s):
            m = token.match(s, pos)
            if not m:
                raise PartitionParseError("bad partition-sum syntax", pos)
            sign, mag, part = m.groups()
            if sign == "" and terms:
                raise PartitionParseError("missing + or - between terms", m.start(3))
            c = int(mag) if mag else 1
            if sign == "-":
                c = -c
            terms.append((Partition.parse(part), c))
            pos = m.end()
        return cls(terms)


def compositions(total, parts):
    """All tuples of ``parts`` nonnegative integers summing to ``total``."""
    if total < 0:
        return
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def star_simple(i, pi2):
    """(i) * (j1|...|js): distribute i-1 over the slots; zero vector for i = 0."""
    if i == 0:
        return PartitionVector.zero()
    js = pi2.slots
    terms = [(Partition(j + u for j, u in zip(js, us)), 1)
             for us in compositions(i - 1, len(js))]
    return PartitionVector(terms)


@lru_cache(maxsize=None)
def star_raw(pi1, pi2):
    """Slot-by-slot product with multiplicities kept (the paper's p-hat)."""
    acc = []
    for l, i in enumerate(pi1.slots):
        for tau in star_simple(i, pi2).support():
            acc.append((pi1.replace_slot(l, tau.slots), 1))
    return PartitionVector(acc, form="raw")


def star(a, b):
    """Support-reduced product, extended to vectors by taking the support union.

    Iterated products reduce at every step; this is the product under which
    the regular partitions form a right pre-Lie algebra (counting
    multiplicities instead breaks both pre-Lie and associativity statements).
    Vector inputs must have nonnegative coefficients.
    """
    sup_a = _support_of(a)
    sup_b = _support_of(b)
    out = set()
    for pi1 in sup_a:
        for pi2 in sup_b:
            out |= star_raw(pi1, pi2).support()
    return PartitionVector([(pi, 1) for pi in out])


def _support_of(x):
    if isinstance(x, Partition):
        return (x,)
    if isinstance(x, PartitionVector):
        if any(c < 0 for c in x.entries.values()):
            raise ValueError("support-level product needs nonnegative coefficients")
        return tuple(x.entries)
    raise TypeError("expected Partition or PartitionVector, got %r" % (x,))


def pre_lie_defect(p1, p2, p3):
    """(p1*p2)*p3 - p1*(p2*p3), products reduced at each step."""
    return star(star(p1, p2), p3) - star(p1, star(p2, p3))


def distinct_slot_terms(p1, p2, p3):
    """Terms where p2 and p3 multiply two distinct slots of the basis partition p1.

    Manifestly symmetric in p2 and p3.  In the coefficient-erasing calculus
    this set IS the associator defect: (p1*p2)*p3 = p1*(p2*p3) + these terms
    at the support level.
    """
    out = set()
    for alpha in range(len(p1)):
        for beta in range(len(p1)):
            if alpha == beta:
                continue
            for sig in star_simple(p1[alpha], p2).support():
                for tau in star_simple(p1[beta], p3).support():
                    pieces = []
                    for idx, s in enumerate(p1.slots):
                        if idx == alpha:
                            pieces.extend(sig.slots)
                        elif idx == beta:
                            pieces.extend(tau.slots)
                        else:
                            pieces.append(s)
                    out.add(Partition(pieces))
    return PartitionVector([(pi, 1) for pi in out])


def defect_symmetry_holds(p1, p2, p3):
    """Right pre-Lie symmetry of the associator in the reduced calculus.

    Every duplicate is erased after each product, so "the defect is symmetric
    in the last two arguments" means: in both association orders the triple
    product equals the nested product together with the same symmetric set of
    distinct-slot terms.  Coefficient-level defect equality is strictly false
    (the reduction step is not linear), which is why the check takes this
    form.
    """
    d_set = distinct_slot_terms(p1, p2, p3).support()
    for a, b in ((p2, p3), (p3, p2)):
        lhs = star(star(p1, a), b).support()
        rhs = star(p1, star(a, b)).support()
        if lhs != rhs | d_set:
            return False
    return True


def bracket(p, q):
    """p*q - q*p."""
    return star(p, q) - star(q, p)


def bracket_vec(v, w):
    """Bracket extended bilinearly to integer vectors over reduced basis products."""
    acc = PartitionVector.zero()
    vi = v.entries if isinstance(v, PartitionVector) else {v: 1}
    wi = w.entries if isinstance(w, PartitionVector) else {w: 1}
    for pi1, c1 in vi.items():
        for pi2, c2 in wi.items():
            acc = acc + bracket(pi1, pi2).scale(c1 * c2)
    return acc


def jacobi_holds(a, b, c):
    """Jacobi identity for the commutator bracket, in the reduced calculus.

    Expanding [[a,b],c] + [[b,c],a] + [[c,a],b] gives six positive and six
    negative triple products; the identity asserts the two reduced sums
    coincide.  This follows from the distinct-slot form of the pre-Lie
    property on regular partitions.
    """
    pos = (star(star(a, b), c) + star(star(b, c), a) + star(star(c, a), b)
           + star(c, star(b, a)) + star(a, star(c, b)) + star(b, star(a, c)))
    neg = (star(star(b, a), c) + star(star(c, b), a) + star(star(a, c), b)
           + star(c, star(a, b)) + star(a, star(b, c)) + star(b, star(c, a)))
    return pos.support() == neg.support()


def _concat_overlap(parts):
    """Concatenate partitions, merging each last slot with the next first slot."""
    slots = list(parts[0].slots)
    for p in parts[1:]:
        slots[-1] += p.slots[0]
        slots.extend(p.slots[1:])
    return slots


def _n_single_group(head, args):
    """N(1|k){head | args} as a set of partitions.

    For a singleton head (i): write the overlapped concatenation of the
    arguments and add nonnegative integers totalling i - k to the slots in
    every possible way (empty when i < k).  A general head distributes the
    whole group over its slots one at a time.
    """
    if len(head) == 1:
        i, k = head[0], len(args)
        base = _concat_overlap(args)
        return {Partition(b + u for b, u in zip(base, us))
                for us in compositions(i - k, len(base))}
    out = set()
    for alpha in range(len(head)):
        for tau in _n_single_group(Partition((head[alpha],)), args):
            out.add(head.replace_slot(alpha, tau.slots))
    return out


def _brace_distributions(ys, zs):
    """All planar ways to feed the group ``zs`` into the group ``ys``.

    Each y swallows a consecutive (possibly empty) block of zs; leftover zs
    interleave around the ys in order.  Yields lists whose entries are either
    a plain partition or a (y, block) pair to be expanded recursively.
    """
    m, n = len(ys), len(zs)

    def rec(yi, zi):
        if yi == m:
            yield [("plain", z) for z in zs[zi:]]
            return
        for start in range(zi, n + 1):
            prefix = [("plain", z) for z in zs[zi:start]]
            for stop in range(start, n + 1):
                entry = ("plain", ys[yi]) if stop == start \
                    else ("nest", ys[yi], tuple(zs[start:stop]))
                for tail in rec(yi + 1, stop):
                    yield prefix + [entry] + tail

    yield from rec(0, 0)


def _expand_groups(head, groups):
    if len(groups) == 1:
        return _n_single_group(head, list(groups[0]))
    *rest, ys, zs = groups
    out = set()
    for assignment in _brace_distributions(list(ys), list(zs)):
        # branch over the supports of any nested sub-products
        pools = []
        for entry in assignment:
            if entry[0] == "plain":
                pools.append((entry[1],))
            else:
                _, y, block = entry
                pools.append(tuple(sorted(_n_single_group(y, list(block)))))
        for combo in itertools.product(*pools):
            out |= _expand_groups(head, list(rest) + [list(combo)])
    return out


def higher_product(shape, head, groups):
    """The higher product N(shape){head | group1 | group2 | ...}, support-reduced.

    ``shape`` is a regular partition (1|l1|...|lt); ``groups`` supplies t
    groups of regular partitions of sizes l1, ..., lt.  Mixed shapes expand
    by the brace rule: the last group distributes over the earlier ones,
    interleavings first, then nested substitutions.
    """
    if not isinstance(shape, Partition):
        shape = Partition(shape)
    if shape[0] != 1 or len(shape) < 2:
        raise ValueError("higher-product shape must look like (1|l1|...|lt)")
    if not shape.is_regular:
        raise ValueError("higher-product shape must be regular")
    groups = [list(g) for g in groups]
    if len(groups) != len(shape) - 1:
        raise ValueError("expected %d groups, got %d" % (len(shape) - 1, len(groups)))
    for lam, g in zip(shape.slots[1:], groups):
        if len(g) != lam:
            raise ValueError("group sizes must match the shape %s" % shape)
    every = [head] + [p for g in groups for p in g]
    for p in every:
        if not isinstance(p, Partition):
            raise TypeError("expected Partition, got %r" % (p,))
        if not p.is_regular:
            raise ValueError("higher products are defined for regular partitions only")
    return PartitionVector([(pi, 1) for pi in _expand_groups(head, groups)])


def regular_partitions(max_d, max_dbar=None):
    """All regular partitions with d <= max_d (and optionally dbar <= max_dbar)."""
    out = []
    for n in range(1, max_d + 2):          # n = total arguments = d + 1
        max_r = n if max_dbar is None else min(n, max_dbar + 1)
        for r in range(1, max_r + 1):
            for us in compositions(n - r, r):
                out.append(Partition(u + 1 for u in us))
    return sorted(out)


def partitions_with(d, dbar, regular=True):
    """All partitions with the given degrees; zero slots admitted if not regular."""
    n, r = d + 1, dbar + 1
    if r < 1 or n < 0:
        return []
    lo = 1 if regular else 0
    if n < lo * r:
        return []
    return sorted(Partition(u + lo for u in us)
                  for us in compositions(n - lo * r, r))
