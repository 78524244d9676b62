"""Finite causal sites: the abstract poset of regions indexing a net.

A :class:`CausalSite` stores a finite set of opaque region identifiers
together with a containment relation ``leq`` ("is contained in") and a
symmetric "causally disjoint" relation.  Geometry, if any, lives only in the
fixture generators; every algorithm in this package consumes the two
relations and nothing else.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product


@dataclass(frozen=True)
class Violation:
    """One failed site invariant; ``items`` names the offending regions."""

    kind: str
    items: tuple[str, ...]
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "items": list(self.items), "detail": self.detail}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


@dataclass(frozen=True)
class CausalSite:
    """Finite poset of regions with a spacelike-disjointness relation.

    ``leq`` holds pairs ``(a, b)`` meaning ``a`` is contained in ``b`` and is
    expected to be reflexive; ``disjoint`` holds unordered disjointness as a
    set of ordered pairs closed under swapping.  Instances are immutable and
    safe to share.
    """

    regions: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    disjoint: frozenset[tuple[str, str]]

    @classmethod
    def from_relations(
        cls,
        regions: list[str],
        leq_pairs: list[tuple[str, str]],
        disjoint_pairs: list[tuple[str, str]],
        close: bool = True,
    ) -> "CausalSite":
        """Build a site; with ``close=True`` the containment relation is
        closed reflexively and transitively and disjointness is symmetrized.

        Raw documents should be loaded with ``close=False`` so that
        :func:`validate_site` can flag whatever the data actually says.
        """
        regs = tuple(regions)
        leq = {(a, b) for a, b in leq_pairs}
        dis = {(a, b) for a, b in disjoint_pairs}
        if close:
            leq |= {(r, r) for r in regs}
            changed = True
            while changed:
                changed = False
                for (a, b), (c, d) in product(tuple(leq), tuple(leq)):
                    if b == c and (a, d) not in leq:
                        leq.add((a, d))
                        changed = True
            dis |= {(b, a) for a, b in dis}
            # monotone completion: a <= b and c _|_ b forces c _|_ a
            changed = True
            while changed:
                changed = False
                for (a, b) in tuple(leq):
                    for (c, d) in tuple(dis):
                        if d == b and (c, a) not in dis:
                            dis.add((c, a))
                            dis.add((a, c))
                            changed = True
        return cls(regions=regs, leq=frozenset(leq), disjoint=frozenset(dis))

    def contains(self, a: str, b: str) -> bool:
        """True when region ``a`` is contained in region ``b``."""
        return (a, b) in self.leq

    def is_disjoint(self, a: str, b: str) -> bool:
        return (a, b) in self.disjoint

    def require_region(self, a: str) -> None:
        if a not in self.regions:
            raise KeyError(f"unknown region id: {a!r}")

    def to_json(self) -> dict:
        return {
            "regions": list(self.regions),
            "leq": sorted([a, b] for a, b in self.leq),
            "disjoint": sorted([a, b] for a, b in self.disjoint),
        }


def validate_site(site: CausalSite) -> ValidationReport:
    """Check every site invariant; violations are data, not exceptions."""
    bad: list[Violation] = []
    regs = site.regions
    known = set(regs)
    for a, b in sorted(site.leq | site.disjoint):
        for r in (a, b):
            if r not in known:
                bad.append(Violation("unknown-region", (r,)))
    for r in regs:
        if (r, r) not in site.leq:
            bad.append(Violation("reflexivity", (r,)))
    for a, b in sorted(site.leq):
        if a != b and (b, a) in site.leq:
            bad.append(Violation("antisymmetry", (a, b)))
    for (a, b) in sorted(site.leq):
        for c in regs:
            if (b, c) in site.leq and (a, c) not in site.leq:
                bad.append(Violation("transitivity", (a, b, c)))
    for a, b in sorted(site.disjoint):
        if a == b:
            bad.append(Violation("irreflexivity", (a,)))
        if (b, a) not in site.disjoint:
            bad.append(Violation("symmetry", (a, b)))
    # a <= b and c _|_ b must force c _|_ a
    for (a, b) in sorted(site.leq):
        for c in regs:
            if (c, b) in site.disjoint and (c, a) not in site.disjoint:
                bad.append(Violation("monotonicity", (a, b, c)))
    for r in regs:
        if not any((b, r) in site.disjoint for b in regs):
            bad.append(Violation("empty-complement", (r,)))
    # deduplicate, keep deterministic order
    seen: set[tuple] = set()
    uniq = []
    for v in bad:
        key = (v.kind, v.items)
        if key not in seen:
            seen.add(key)
            uniq.append(v)
    return ValidationReport(tuple(uniq))


def spacelike_complement(site: CausalSite, a: str) -> frozenset[str]:
    """All regions disjoint from ``a``."""
    site.require_region(a)
    return frozenset(b for b in site.regions if site.is_disjoint(b, a))


def complement_connected(site: CausalSite, a: str) -> bool:
    """Connectivity of the containment graph on the complement of ``a``.

    Vertices are the regions disjoint from ``a``; two are adjacent when one
    contains the other.  This is the discrete stand-in for pathwise
    connectedness of the causal complement: a chain of mutually comparable
    regions lets algebras embed step by step into a common commutant.
    """
    comp = sorted(spacelike_complement(site, a))
    if not comp:
        return False
    index = {r: i for i, r in enumerate(comp)}
    parent = list(range(len(comp)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for b, c in product(comp, comp):
        if b < c and (site.contains(b, c) or site.contains(c, b)):
            ri, rj = find(index[b]), find(index[c])
            if ri != rj:
                parent[ri] = rj
    roots = {find(i) for i in range(len(comp))}
    return len(roots) == 1


def first_disjoint_region(site: CausalSite, a: str) -> str:
    """Lexicographically first region disjoint from ``a``; raises if none."""
    comp = sorted(spacelike_complement(site, a))
    if not comp:
        raise ValueError(f"region {a!r} has empty spacelike complement")
    return comp[0]


def disjoint_region_pairs(site: CausalSite) -> list[tuple[str, str]]:
    """All ordered disjoint pairs, lexicographically sorted (deterministic)."""
    return sorted(p for p in site.disjoint)


def regions_containing_both(site: CausalSite, a: str, b: str) -> list[str]:
    return sorted(d for d in site.regions if site.contains(a, d) and site.contains(b, d))
