"""Per-partition components of the master identity of the tilde-modified maps.

For a regular target partition, the quadratic (Type I) part collects the
target component of every composition of two structure maps whose types
multiply onto the target; the Type II part collects the contributions of the
two identity maps on the zero-slot types (1|0) and (0|1), which add up to
one term per adjacent slot pair, weighted by the size of the merged slot.
Setting the sum of both parts to zero gives the subidentity for the target.

Structure maps are written m(pi) with super degree d + dbar + 1 (mod 2), so
every one of them has odd total degree.
"""

from __future__ import annotations

import itertools
import json
import string

from .partitions import Partition, PartitionVector, partitions_with, star_raw
from .terms import App, FormalSum, Generator, MapSymbol, koszul_sign, to_json
from .compose import (
    Composition,
    apply_map,
    interleavings,
    tilde,
    tilde_prefactor,
)

IDENTITY_TYPES = (Partition((1, 0)), Partition((0, 1)))


def structure_symbol(ptype, name="m"):
    """The structure map of the given type, with the parity the master
    identity forces: |m(pi)| = d + dbar + 1 (mod 2)."""
    if not isinstance(ptype, Partition):
        ptype = Partition(ptype)
    return MapSymbol(name, ptype, (ptype.d + ptype.dbar + 1) % 2)


def target_generators(target, supers=0):
    """Generators a, b, c, ... in lexicographic slot order, slot-structured."""
    n = target.arity
    names = list(string.ascii_lowercase)
    while len(names) < n:
        names += ["a%d" % k for k in range(n)]
    if isinstance(supers, int):
        supers = [supers] * n
    gens = [Generator(names[k], supers[k]) for k in range(n)]
    slots, pos = [], 0
    for width in target:
        slots.append(tuple(gens[pos:pos + width]))
        pos += width
    return tuple(slots)


class Factorization:
    """A pair of structure-map types whose product contains the target."""

    __slots__ = ("outer", "inner", "multiplicity", "merge_index")

    def __init__(self, outer, inner, multiplicity, merge_index=None):
        self.outer = outer
        self.inner = inner
        self.multiplicity = multiplicity
        self.merge_index = merge_index   # set on the (1|0)/(0|1) rows

    @property
    def is_identity_row(self):
        return self.inner in IDENTITY_TYPES

    def key(self):
        return (self.outer.sort_key(), self.inner.sort_key())

    def __eq__(self, other):
        return isinstance(other, Factorization) and \
            (self.outer, self.inner) == (other.outer, other.inner)

    def __hash__(self):
        return hash((self.outer, self.inner))

    def __repr__(self):
        return "Factorization(%s*%s, mult=%d)" % (
            self.outer, self.inner, self.multiplicity)


def regular_factorizations(target):
    """All regular (outer, inner) with the target in their product, found by
    scanning the degree splits d = d1 + d2, dbar = b1 + b2."""
    if not target.is_regular:
        raise ValueError("the master identity is generated at regular targets")
    rows = []
    for d1 in range(target.d + 1):
        for b1 in range(target.dbar + 1):
            for pi1 in partitions_with(d1, b1):
                for pi2 in partitions_with(target.d - d1, target.dbar - b1):
                    mult = star_raw(pi1, pi2).coeff(target)
                    if mult:
                        rows.append(Factorization(pi1, pi2, mult))
    rows.sort(key=Factorization.key)
    return rows


def identity_factorizations(target):
    """The rows through m(1|0) and m(0|1): outer merges two adjacent slots."""
    rows = []
    for alpha in range(len(target) - 1):
        merged = Partition(target.slots[:alpha]
                           + (target[alpha] + target[alpha + 1],)
                           + target.slots[alpha + 2:])
        for ident in IDENTITY_TYPES:
            mult = star_raw(merged, ident).coeff(target)
            rows.append(Factorization(merged, ident, mult, merge_index=alpha))
    return rows


def factorizations(target):
    """Regular rows plus the identity-map rows, pruned to potentially nonzero
    structure maps (every other zero-slot map vanishes by definition)."""
    return regular_factorizations(target) + identity_factorizations(target)


def _support_predicate(support):
    if support is None:
        return lambda pi: True
    if callable(support):
        return support
    if support == "a-infinity":
        return lambda pi: len(pi) == 1
    if support == "ones":
        return lambda pi: all(s == 1 for s in pi)
    allowed = {pi if isinstance(pi, Partition) else Partition(pi)
               for pi in support}
    return lambda pi: pi in allowed


def type_i_rows(target, supers=0, support=None, use_tilde=True, name="m"):
    """(factorization, composition, expansion) per admitted regular row."""
    keep = _support_predicate(support)
    slots = target_generators(target, supers)
    out = []
    for row in regular_factorizations(target):
        if not (keep(row.outer) and keep(row.inner)):
            continue
        mo = structure_symbol(row.outer, name)
        mi = structure_symbol(row.inner, name)
        comp = Composition(tilde(mo) if use_tilde else mo,
                           (tilde(mi) if use_tilde else mi,), target)
        s = apply_map(comp, slots, use_total=use_tilde)
        out.append((row, comp, s))
    return out


def type_i_terms(target, supers=0, support=None, use_tilde=True, name="m"):
    total = FormalSum.zero()
    for _, _, s in type_i_rows(target, supers, support, use_tilde, name):
        total = total + s
    return total


def type_ii_terms(target, include_coefficients=True, supers=0, support=None,
                  use_tilde=True, name="m"):
    """The identity-map contributions: for each adjacent slot pair, the map on
    the merged type applied to every order-preserving merge of the two slots,
    weighted by the merged slot size (or 1 in the convention without
    coefficients)."""
    keep = _support_predicate(support)
    slots = target_generators(target, supers)
    gens = [g for s in slots for g in s]
    total = FormalSum.zero()
    for alpha in range(len(target) - 1):
        merged_type = Partition(target.slots[:alpha]
                                + (target[alpha] + target[alpha + 1],)
                                + target.slots[alpha + 2:])
        if not keep(merged_type):
            continue
        head = structure_symbol(merged_type, name)
        weight = target[alpha] + target[alpha + 1] if include_coefficients else 1
        original = [head] + gens
        for merge in interleavings([slots[alpha], slots[alpha + 1]]):
            new_slots = slots[:alpha] + (tuple(merge),) + slots[alpha + 2:]
            tree = App(head, new_slots)
            reading = [head] + [g for s in new_slots for g in s]
            sgn = koszul_sign(original, reading, use_total=use_tilde)
            pre = tilde_prefactor([g for s in new_slots for g in s]) \
                if use_tilde else 1
            total = total + FormalSum([(weight * sgn * pre, tree)])
    return total


class IdentityReport:
    """One subidentity: its factorization rows and both groups of terms."""

    def __init__(self, target, rows, type_i, type_ii, options):
        self.target = target
        self.rows = rows                  # (Factorization, subdiv count, terms)
        self.type_i = type_i
        self.type_ii = type_ii
        self.options = options

    @property
    def identity_sum(self):
        return self.type_i + self.type_ii

    def to_json(self):
        return {
            "target": list(self.target.slots),
            "rows": [{"outer": list(r.outer.slots),
                      "inner": list(r.inner.slots),
                      "multiplicity": r.multiplicity,
                      "subdivisions": nsub,
                      "terms": nterms}
                     for r, nsub, nterms in self.rows],
            "type_i": to_json(self.type_i),
            "type_ii": to_json(self.type_ii),
            "options": dict(self.options),
        }

    def render(self, fmt="text"):
        from .terms import render
        if fmt == "json":
            return json.dumps(self.to_json(), indent=2)
        lines = ["subidentity at %s:" % self.target]
        body = render(self.type_i, fmt)
        if not self.type_ii.is_zero:
            tail = render(self.type_ii, fmt)
            if not tail.startswith("-"):
                tail = "+" + tail
            body = body + " " + tail
        lines.append(body + " = 0")
        return "\n".join(lines)


def master_identity(target, include_type_ii_coefficients=True, supers=0,
                    support=None, use_tilde=True, include_type_ii=True,
                    name="m"):
    """Generate the subidentity for a regular target partition.

    ``support`` restricts the structure maps considered nonzero ("a-infinity"
    keeps the single-slot maps, "ones" the all-ones maps; a set or predicate
    restricts explicitly).  ``include_type_ii_coefficients=False`` is the
    convention that drops the merged-slot weights.
    """
    if not isinstance(target, Partition):
        target = Partition(target)
    rows = []
    for row, comp, s in type_i_rows(target, supers, support, use_tilde, name):
        rows.append((row, comp.subdivision_count(), len(s)))
    t1 = type_i_terms(target, supers, support, use_tilde, name)
    t2 = type_ii_terms(target, include_type_ii_coefficients, supers, support,
                       use_tilde, name) if include_type_ii else FormalSum.zero()
    if support is None or isinstance(support, str):
        sup_opt = support
    elif callable(support):
        sup_opt = "custom"
    else:
        sup_opt = sorted(str(p if isinstance(p, Partition) else Partition(p))
                         for p in support)
    options = {
        "type_ii_coefficients": bool(include_type_ii_coefficients),
        "type_ii": bool(include_type_ii),
        "tilde": bool(use_tilde),
        "support": sup_opt,
    }
    return IdentityReport(target, rows, t1, t2, options)
