"""Finite partially ordered sets and lattices with exact join/meet structure.

Elements are opaque string identifiers. Comparison is by identifier and
membership, never by name semantics; mixing elements of different lattices
raises ForeignElement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import LatticePlanError

# Lattice elements are plain identifier strings; validity is checked by the
# owning lattice on every operation.
LatticeElement = str


class LatticeError(LatticePlanError):
    """Base class for order/lattice validation errors."""


class ReflexivityViolation(LatticeError):
    pass


class AntisymmetryViolation(LatticeError):
    pass


class TransitivityViolation(LatticeError):
    pass


class NotALattice(LatticeError):
    """Some pair of elements has no unique least upper or greatest lower bound."""


class ForeignElement(LatticeError):
    """An identifier does not belong to the lattice it was used with."""


class NotBrouwerian(LatticeError):
    """The queried pair has no greatest x with meet(a, x) <= b."""


class NotGenerating(LatticeError):
    """A declared generator set does not reach every element by joins/meets."""


def transitive_closure(pairs: Iterable[tuple[str, str]],
                       elements: Iterable[str]) -> set[tuple[str, str]]:
    """Reflexive-transitive closure of a relation over the given elements."""
    closed = {(a, a) for a in elements}
    closed.update(pairs)
    changed = True
    while changed:
        changed = False
        for (a, b) in list(closed):
            for (c, d) in list(closed):
                if b == c and (a, d) not in closed:
                    closed.add((a, d))
                    changed = True
    return closed


@dataclass(frozen=True, eq=False)
class FiniteLattice:
    """A validated finite lattice: total order relation plus join/meet tables.

    Instances are immutable once built; construct them through verify_poset.
    """

    elements: tuple[str, ...]
    leq_pairs: frozenset[tuple[str, str]]
    top: str
    bottom: str
    generators: tuple[str, ...]
    join_table: dict[tuple[str, str], str] = field(repr=False)
    meet_table: dict[tuple[str, str], str] = field(repr=False)
    _up: dict[str, frozenset[str]] = field(repr=False)
    _down: dict[str, frozenset[str]] = field(repr=False)

    def __contains__(self, element: str) -> bool:
        return element in self._up

    def _check(self, *ids: str) -> None:
        for e in ids:
            if e not in self._up:
                raise ForeignElement(f"element {e!r} is not in this lattice")

    def leq(self, a: str, b: str) -> bool:
        self._check(a, b)
        return b in self._up[a]

    def join(self, a: str, b: str) -> str:
        self._check(a, b)
        return self.join_table[(a, b)]

    def meet(self, a: str, b: str) -> str:
        self._check(a, b)
        return self.meet_table[(a, b)]

    def join_set(self, subset: Iterable[str]) -> str:
        """Fold of binary joins; the empty join is the bottom element."""
        out = self.bottom
        for e in subset:
            out = self.join(out, e)
        return out

    def meet_set(self, subset: Iterable[str]) -> str:
        """Fold of binary meets; the empty meet is the top element."""
        out = self.top
        for e in subset:
            out = self.meet(out, e)
        return out

    def upper_set(self, a: str) -> frozenset[str]:
        self._check(a)
        return self._up[a]

    def lower_set(self, a: str) -> frozenset[str]:
        self._check(a)
        return self._down[a]

    def relative_pseudocomplement(self, a: str, b: str) -> str:
        """Greatest x with meet(a, x) <= b, if it exists."""
        self._check(a, b)
        candidates = [x for x in self.elements if self.leq(self.meet(a, x), b)]
        for x in candidates:
            if all(self.leq(y, x) for y in candidates):
                return x
        raise NotBrouwerian(f"no greatest x with meet({a!r}, x) <= {b!r}")

    def is_brouwer(self) -> bool:
        """True iff every pair has a relative pseudocomplement."""
        for a in self.elements:
            for b in self.elements:
                try:
                    self.relative_pseudocomplement(a, b)
                except NotBrouwerian:
                    return False
        return True

    def covers(self) -> list[tuple[str, str]]:
        """Transitive reduction of the order: pairs (a, b) with b covering a."""
        out = []
        for a in self.elements:
            for b in self.elements:
                if a == b or not self.leq(a, b):
                    continue
                between = [c for c in self.elements
                           if c not in (a, b) and self.leq(a, c) and self.leq(c, b)]
                if not between:
                    out.append((a, b))
        return sorted(out)

    def to_dot(self, name: str = "lattice") -> str:
        """Hasse diagram of the lattice as DOT text, bottom-up."""
        lines = [f"digraph \"{name}\" {{", "  rankdir=BT;"]
        for e in sorted(self.elements):
            marks = []
            if e == self.top:
                marks.append("top")
            if e == self.bottom:
                marks.append("bottom")
            label = e if not marks else f"{e}\\n({','.join(marks)})"
            lines.append(f"  \"{e}\" [label=\"{label}\"];")
        for (a, b) in self.covers():
            lines.append(f"  \"{a}\" -> \"{b}\";")
        lines.append("}")
        return "\n".join(lines) + "\n"


def verify_poset(elements: Sequence[str],
                 pairs: Iterable[tuple[str, str]],
                 *,
                 covers: bool = False,
                 generators: Sequence[str] | None = None) -> FiniteLattice:
    """Validate an order relation and build the lattice with cached tables.

    The relation may be given in full or as Hasse cover pairs; cover input is
    transitively closed before the axioms are checked. Fails with a witness
    when reflexivity, antisymmetry, transitivity, or unique bounds break.
    """
    elems = tuple(elements)
    if len(set(elems)) != len(elems):
        dup = next(e for e in elems if elems.count(e) > 1)
        raise LatticeError(f"duplicate element id {dup!r}")
    if not elems:
        raise LatticeError("a lattice needs at least one element")
    elem_set = set(elems)
    rel = set(pairs)
    for (a, b) in rel:
        if a not in elem_set or b not in elem_set:
            raise ForeignElement(f"relation pair ({a!r}, {b!r}) uses unknown elements")

    if covers:
        rel = transitive_closure(rel, elems)
    else:
        for a in elems:
            if (a, a) not in rel:
                raise ReflexivityViolation(f"missing ({a!r}, {a!r})")
        for (a, b) in rel:
            for (c, d) in rel:
                if b == c and (a, d) not in rel:
                    raise TransitivityViolation(f"({a!r},{b!r}) and ({b!r},{d!r}) "
                                                f"without ({a!r},{d!r})")
    for (a, b) in rel:
        if a != b and (b, a) in rel:
            raise AntisymmetryViolation(f"{a!r} <= {b!r} and {b!r} <= {a!r}")

    up = {a: frozenset(b for b in elems if (a, b) in rel) for a in elems}
    down = {a: frozenset(b for b in elems if (b, a) in rel) for a in elems}

    join_table: dict[tuple[str, str], str] = {}
    meet_table: dict[tuple[str, str], str] = {}
    for a in elems:
        for b in elems:
            ubs = [x for x in elems if x in up[a] and x in up[b]]
            least = [x for x in ubs if all(y in up[x] for y in ubs)]
            if len(least) != 1:
                raise NotALattice(f"pair ({a!r}, {b!r}) has no unique join")
            join_table[(a, b)] = least[0]
            lbs = [x for x in elems if x in down[a] and x in down[b]]
            greatest = [x for x in lbs if all(y in down[x] for y in lbs)]
            if len(greatest) != 1:
                raise NotALattice(f"pair ({a!r}, {b!r}) has no unique meet")
            meet_table[(a, b)] = greatest[0]

    top = elems[0]
    bottom = elems[0]
    for e in elems:
        top = join_table[(top, e)]
        bottom = meet_table[(bottom, e)]

    gens = tuple(generators) if generators is not None else elems
    for g in gens:
        if g not in elem_set:
            raise ForeignElement(f"generator {g!r} is not an element")

    lattice = FiniteLattice(
        elements=elems,
        leq_pairs=frozenset(rel),
        top=top,
        bottom=bottom,
        generators=gens,
        join_table=join_table,
        meet_table=meet_table,
        _up=up,
        _down=down,
    )
    if generators is not None and not generators_closure(lattice, gens):
        raise NotGenerating(f"generators {sorted(gens)} do not reach every element")
    return lattice


def generators_closure(lattice: FiniteLattice, gens: Iterable[str]) -> bool:
    """True iff the closure of gens under binary join and meet is everything."""
    reached = set(gens)
    for g in reached:
        lattice._check(g)
    if not reached:
        return len(lattice.elements) == 0
    changed = True
    while changed:
        changed = False
        for a, b in combinations(sorted(reached), 2):
            for c in (lattice.join(a, b), lattice.meet(a, b)):
                if c not in reached:
                    reached.add(c)
                    changed = True
    return reached == set(lattice.elements)


def powerset_lattice(atoms: Sequence[str]) -> FiniteLattice:
    """The powerset of the given atoms ordered by inclusion.

    Element ids are canonical sorted member lists in braces, e.g. "{a,b}".
    """
    atoms = sorted(set(atoms))
    subsets = [frozenset(c) for r in range(len(atoms) + 1)
               for c in combinations(atoms, r)]
    ids = {s: subset_id(s) for s in subsets}
    pairs = [(ids[s], ids[t]) for s in subsets for t in subsets if s <= t]
    return verify_poset([ids[s] for s in subsets], pairs,
                        generators=[ids[frozenset([a])] for a in atoms]
                        if atoms else None)


def chain_lattice(ids: Sequence[str]) -> FiniteLattice:
    """A chain ordered bottom-to-top in the given id order."""
    pairs = [(ids[i], ids[i + 1]) for i in range(len(ids) - 1)]
    return verify_poset(ids, pairs, covers=True)


def subset_id(members: Iterable[str]) -> str:
    """Canonical display id for a set of names: "{a,b}"."""
    return "{" + ",".join(sorted(members)) + "}"
