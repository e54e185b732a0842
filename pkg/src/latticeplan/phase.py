"""Phase semantics of linear logic over a finite commutative monoid.

A phase space is a validated monoid plus a designated "false" subset. Subsets
of the carrier form the raw algebra; facts (fixed points of the double dual)
carry the multiplicative and additive connectives. Spaces and subsets are
immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import LatticePlanError, LimitExceeded
from .lattice import FiniteLattice, subset_id, verify_poset

DEFAULT_CARRIER_BOUND = 12


class PhaseError(LatticePlanError):
    """Base class for phase-space validation and algebra errors."""


class NotClosed(PhaseError):
    pass


class NotAssociative(PhaseError):
    pass


class NotCommutative(PhaseError):
    pass


class UnitLawViolation(PhaseError):
    pass


class SpaceMismatch(PhaseError):
    """Subsets of different phase spaces were combined."""


class NotAFact(PhaseError):
    pass


class CarrierTooLarge(LimitExceeded):
    pass


class NotDualClasses(PhaseError):
    pass


class NotClosedUnderOps(PhaseError):
    pass


class WrongExtremes(PhaseError):
    pass


@dataclass(eq=False)
class PhaseSpace:
    """A finite commutative monoid with a designated false subset."""

    carrier: tuple[str, ...]
    product_table: dict[tuple[str, str], str] = field(repr=False)
    unit: str
    false_members: frozenset[str]
    _dual_cache: dict[frozenset[str], frozenset[str]] = field(
        default_factory=dict, repr=False)

    def mul(self, x: str, y: str) -> str:
        return self.product_table[(x, y)]

    def subset(self, members: Iterable[str]) -> MonoidSubset:
        members = frozenset(members)
        unknown = members - set(self.carrier)
        if unknown:
            raise SpaceMismatch(f"members {sorted(unknown)} not in carrier")
        return MonoidSubset(self, members)

    @property
    def empty(self) -> MonoidSubset:
        return MonoidSubset(self, frozenset())

    @property
    def full(self) -> MonoidSubset:
        return MonoidSubset(self, frozenset(self.carrier))

    @property
    def false_set(self) -> MonoidSubset:
        return MonoidSubset(self, self.false_members)

    # Distinguished facts. "one" is the whole carrier, "zero" the closure of
    # the empty subset, "i_fact" the closure of the unit, and "false_fact"
    # the closure of the false subset.
    @property
    def one(self) -> MonoidSubset:
        return self.full

    @property
    def zero(self) -> MonoidSubset:
        return closure(self.empty)

    @property
    def i_fact(self) -> MonoidSubset:
        return closure(self.subset([self.unit]))

    @property
    def false_fact(self) -> MonoidSubset:
        return closure(self.false_set)


@dataclass(frozen=True)
class MonoidSubset:
    """A subset of one phase space's carrier."""

    space: PhaseSpace
    members: frozenset[str]

    def __le__(self, other: "MonoidSubset") -> bool:
        _same_space(self, other)
        return self.members <= other.members

    def __lt__(self, other: "MonoidSubset") -> bool:
        _same_space(self, other)
        return self.members < other.members

    def sorted_members(self) -> list[str]:
        return sorted(self.members)

    def display(self) -> str:
        return subset_id(self.members)


def _same_space(*subsets: MonoidSubset) -> PhaseSpace:
    space = subsets[0].space
    for s in subsets[1:]:
        if s.space is not space:
            raise SpaceMismatch("subsets belong to different phase spaces")
    return space


def validate_monoid(carrier: Sequence[str],
                    table: Mapping[tuple[str, str], str],
                    unit: str,
                    false_set: Iterable[str] = ()) -> PhaseSpace:
    """Check monoid axioms exhaustively and build the phase space.

    The product must be total, closed, associative, and commutative, with the
    stated unit. Commutativity is demanded because every duality law used
    downstream depends on it.
    """
    elems = tuple(carrier)
    if len(set(elems)) != len(elems):
        raise PhaseError("duplicate carrier element")
    elem_set = set(elems)
    if unit not in elem_set:
        raise PhaseError(f"unit {unit!r} is not a carrier element")
    for x in elems:
        for y in elems:
            if (x, y) not in table:
                raise NotClosed(f"product {x!r}*{y!r} is missing")
            if table[(x, y)] not in elem_set:
                raise NotClosed(f"product {x!r}*{y!r} = {table[(x, y)]!r} "
                                "leaves the carrier")
    for x in elems:
        if table[(unit, x)] != x or table[(x, unit)] != x:
            raise UnitLawViolation(f"unit law fails at {x!r}")
    for x in elems:
        for y in elems:
            if table[(x, y)] != table[(y, x)]:
                raise NotCommutative(f"{x!r}*{y!r} != {y!r}*{x!r}")
            for z in elems:
                if table[(table[(x, y)], z)] != table[(x, table[(y, z)])]:
                    raise NotAssociative(f"witness triple ({x!r}, {y!r}, {z!r})")
    false_members = frozenset(false_set)
    if not false_members <= elem_set:
        raise PhaseError("false set leaves the carrier")
    return PhaseSpace(carrier=elems, product_table=dict(table), unit=unit,
                      false_members=false_members)


def pointwise_product(x: MonoidSubset, y: MonoidSubset) -> MonoidSubset:
    """Elementwise monoid product of two subsets."""
    space = _same_space(x, y)
    return MonoidSubset(space, frozenset(
        space.mul(a, b) for a in x.members for b in y.members))


def linear_implication(x: MonoidSubset, y: MonoidSubset) -> MonoidSubset:
    """All z whose product with every member of x lands in y."""
    space = _same_space(x, y)
    return MonoidSubset(space, frozenset(
        z for z in space.carrier
        if all(space.mul(a, z) in y.members for a in x.members)))


def dual(x: MonoidSubset) -> MonoidSubset:
    """Linear negation: the implication from x into the false set."""
    space = x.space
    cached = space._dual_cache.get(x.members)
    if cached is None:
        cached = linear_implication(x, space.false_set).members
        space._dual_cache[x.members] = cached
    return MonoidSubset(space, cached)


def closure(x: MonoidSubset) -> MonoidSubset:
    return dual(dual(x))


def is_fact(x: MonoidSubset) -> bool:
    return closure(x).members == x.members


def _require_facts(*subsets: MonoidSubset) -> None:
    for s in subsets:
        if not is_fact(s):
            raise NotAFact(f"{s.display()} is not a fact")


def tensor(x: MonoidSubset, y: MonoidSubset) -> MonoidSubset:
    """Multiplicative conjunction: closure of the pointwise product."""
    _same_space(x, y)
    _require_facts(x, y)
    return closure(pointwise_product(x, y))


def par(x: MonoidSubset, y: MonoidSubset) -> MonoidSubset:
    """Multiplicative disjunction: dual of the product of the duals."""
    _same_space(x, y)
    _require_facts(x, y)
    return dual(pointwise_product(dual(x), dual(y)))


def with_additive(x: MonoidSubset, y: MonoidSubset) -> MonoidSubset:
    """Additive conjunction: plain intersection of facts."""
    space = _same_space(x, y)
    _require_facts(x, y)
    out = MonoidSubset(space, x.members & y.members)
    # the intersection of facts is a fact; anything else is an algebra bug
    if not is_fact(out):
        raise PhaseError("internal consistency: fact intersection is not a fact")
    return out


def plus_additive(x: MonoidSubset, y: MonoidSubset) -> MonoidSubset:
    """Additive disjunction: closure of the union of facts."""
    space = _same_space(x, y)
    _require_facts(x, y)
    return closure(MonoidSubset(space, x.members | y.members))


def enumerate_facts(space: PhaseSpace,
                    max_carrier: int = DEFAULT_CARRIER_BOUND) -> list[MonoidSubset]:
    """All fixed points of the double dual, scanning every carrier subset."""
    n = len(space.carrier)
    if n > max_carrier:
        raise CarrierTooLarge(
            f"carrier has {n} elements; fact enumeration is bounded at {max_carrier}")
    facts = []
    elems = sorted(space.carrier)
    for r in range(n + 1):
        for combo in combinations(elems, r):
            candidate = MonoidSubset(space, frozenset(combo))
            if is_fact(candidate):
                facts.append(candidate)
    facts.sort(key=lambda f: (len(f.members), f.sorted_members()))
    return facts


def fact_lattice(space: PhaseSpace,
                 names: Mapping[frozenset[str], str] | None = None,
                 max_carrier: int = DEFAULT_CARRIER_BOUND) -> FiniteLattice:
    """The facts ordered by inclusion, as a finite lattice.

    Element ids are canonical member displays unless a naming map is given.
    """
    facts = enumerate_facts(space, max_carrier)
    def name(f: MonoidSubset) -> str:
        if names and f.members in names:
            return names[f.members]
        return f.display()
    ids = [name(f) for f in facts]
    pairs = [(name(a), name(b)) for a in facts for b in facts
             if a.members <= b.members]
    return verify_poset(ids, pairs)


@dataclass(frozen=True)
class OpClPartition:
    """Dual classes of open and closed facts with their closure properties."""

    space: PhaseSpace
    open_facts: frozenset[MonoidSubset]
    closed_facts: frozenset[MonoidSubset]


def validate_op_cl(space: PhaseSpace,
                   open_facts: Iterable[MonoidSubset],
                   closed_facts: Iterable[MonoidSubset]) -> OpClPartition:
    """Check the open/closed class axioms, or fail with a witness."""
    opens = frozenset(open_facts)
    closeds = frozenset(closed_facts)
    for f in opens | closeds:
        if f.space is not space:
            raise SpaceMismatch("class member belongs to another space")
        if not is_fact(f):
            raise NotAFact(f"{f.display()} is not a fact")
    if frozenset(dual(f) for f in opens) != closeds:
        raise NotDualClasses("closed class is not the dual image of the open class")

    for a in opens:
        for b in opens:
            t = tensor(a, b)
            if t not in opens:
                raise NotClosedUnderOps(
                    f"open class: {a.display()} (x) {b.display()} = {t.display()} escapes")
            p = plus_additive(a, b)
            if p not in opens:
                raise NotClosedUnderOps(
                    f"open class: {a.display()} + {b.display()} = {p.display()} escapes")
    for a in closeds:
        for b in closeds:
            w = with_additive(a, b)
            if w not in closeds:
                raise NotClosedUnderOps(
                    f"closed class: {a.display()} & {b.display()} = {w.display()} escapes")
            p = par(a, b)
            if p not in closeds:
                raise NotClosedUnderOps(
                    f"closed class: {a.display()} par {b.display()} = {p.display()} escapes")

    def check_extremes(cls: frozenset[MonoidSubset], biggest: MonoidSubset,
                       smallest: MonoidSubset, label: str) -> None:
        if biggest not in cls or smallest not in cls:
            raise WrongExtremes(f"{label} class must contain {biggest.display()} "
                                f"and {smallest.display()}")
        for f in cls:
            if not (smallest.members <= f.members <= biggest.members):
                raise WrongExtremes(
                    f"{label} class member {f.display()} outside its extremes")

    check_extremes(opens, space.i_fact, space.zero, "open")
    check_extremes(closeds, space.one, space.false_fact, "closed")
    return OpClPartition(space=space, open_facts=opens, closed_facts=closeds)
