"""Concrete finite-dimensional nets of matrix algebras on a reference space.

A :class:`ConcreteAlgebra` is a linear span of matrices on a fixed reference
space, expected to be closed under products and adjoints and to contain the
identity.  A :class:`NetModel` assigns one such algebra to every region of a
causal site.  Weak closures, normality and the other von Neumann-theoretic
notions all collapse to plain linear algebra at this scale, so they are not
re-litigated per operation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, dagger, hs_norm
from .site import CausalSite, spacelike_complement


class ConcreteAlgebra:
    """Span of complex ``dim x dim`` matrices, with cached orthonormal basis."""

    def __init__(self, dim: int, basis: list[np.ndarray], tol: float = DEFAULT_TOL):
        self.dim = int(dim)
        self.basis = [np.asarray(b, dtype=complex) for b in basis]
        self.tol = tol
        self._onb: np.ndarray | None = None

    @property
    def onb(self) -> np.ndarray:
        if self._onb is None:
            self._onb = linalg.orthonormal_span(self.basis, self.tol)
        return self._onb

    @property
    def span_dim(self) -> int:
        return self.onb.shape[0]

    def contains(self, x: np.ndarray, tol: float | None = None) -> bool:
        scale = max(hs_norm(x), 1.0)
        return linalg.project_onto_span(self.onb, x)[1] <= (tol or self.tol) * scale

    def membership_defect(self, x: np.ndarray) -> float:
        return linalg.project_onto_span(self.onb, x)[1]

    def validate(self, tol: float | None = None) -> list[str]:
        """Invariant check: independence, identity, product/adjoint closure."""
        tol = tol or self.tol
        problems = []
        if len(self.basis) != self.span_dim:
            problems.append("basis linearly dependent")
        if not self.contains(np.eye(self.dim, dtype=complex), tol):
            problems.append("identity not in span")
        for i, a in enumerate(self.basis):
            if not self.contains(dagger(a), tol):
                problems.append(f"adjoint of basis[{i}] leaves span")
            for j, b in enumerate(self.basis):
                if not self.contains(a @ b, tol):
                    problems.append(f"product basis[{i}]@basis[{j}] leaves span")
        return problems


def commutant(alg: ConcreteAlgebra, tol: float = DEFAULT_TOL) -> ConcreteAlgebra:
    """The algebra of all matrices commuting with every basis element.

    Computed as the nullspace of the stacked commutator map; the result is
    automatically *-closed and unital.
    """
    d = alg.dim
    if not alg.basis:
        return ConcreteAlgebra(d, [np.eye(d, dtype=complex)], tol)
    rows = np.concatenate([linalg.commutator_operator(g) for g in alg.basis])
    null = linalg.nullspace(rows, tol)
    mats = [v.reshape(d, d) for v in null]
    return ConcreteAlgebra(d, mats, tol)


def check_irreducibility(alg: ConcreteAlgebra, tol: float = DEFAULT_TOL) -> bool:
    """True when the commutant is just the scalars."""
    return commutant(alg, tol).span_dim == 1


def minimal_central_projections(alg: ConcreteAlgebra, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Minimal projections of the center, by iterative spectral splitting."""
    comm = commutant(alg, tol)
    # center = alg intersected with its commutant, solved in alg coordinates
    coords = []
    for g in comm.basis:
        coords.append(linalg.commutator_operator(g))
    stacked_alg = np.stack([linalg.mat_to_vec(b) for b in alg.basis], axis=1)
    rows = np.concatenate([c @ stacked_alg for c in coords]) if coords else np.zeros((0, len(alg.basis)))
    null = linalg.nullspace(rows, tol)
    center = [sum(c * b for c, b in zip(vec, alg.basis)) for vec in null]
    projs = [np.eye(alg.dim, dtype=complex)]
    for z in center:
        for h in ((z + dagger(z)) / 2.0, (z - dagger(z)) / 2.0j):
            new: list[np.ndarray] = []
            for p in projs:
                w, v = np.linalg.eigh((p + dagger(p)) / 2.0)
                cols = v[:, w > 0.5]
                if cols.shape[1] == 0:
                    continue
                compressed = dagger(cols) @ h @ cols
                for _, q in linalg.eig_projections(compressed, tol=1e-7):
                    new.append(cols @ q @ dagger(cols))
            projs = new
    return projs


def central_support(p: np.ndarray, alg: ConcreteAlgebra, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Smallest central projection of ``alg`` dominating the projection ``p``.

    Computed as the support projection of the two-sided ideal spanned by
    ``{a p b}`` over basis pairs; the support of a two-sided ideal is central.
    """
    if not alg.contains(p, tol):
        raise ValueError("projection is not a member of the algebra")
    if not linalg.is_projection(p, max(tol, 1e-8)):
        raise ValueError("input is not an orthogonal projection")
    acc = np.zeros((alg.dim, alg.dim), dtype=complex)
    for a in alg.basis:
        for b in alg.basis:
            m = a @ p @ b
            n = hs_norm(m)
            if n > tol:
                acc += (m @ dagger(m)) / (n * n)
    w, v = np.linalg.eigh((acc + dagger(acc)) / 2.0)
    cols = v[:, w > max(tol, 1e-10) * max(w.max(), 1.0)]
    z = cols @ dagger(cols)
    return z


@dataclass(frozen=True)
class DualityReport:
    region: str
    dim_local: int
    dim_dual: int
    defect_local_in_dual: float
    defect_dual_in_local: float
    tol: float

    @property
    def defect(self) -> float:
        return max(self.defect_local_in_dual, self.defect_dual_in_local)

    @property
    def holds(self) -> bool:
        return self.defect <= self.tol

    def to_json(self) -> dict:
        return {
            "region": self.region,
            "dim_local": self.dim_local,
            "dim_dual": self.dim_dual,
            "defect_local_in_dual": self.defect_local_in_dual,
            "defect_dual_in_local": self.defect_dual_in_local,
            "defect": self.defect,
            "holds": self.holds,
            "tol": self.tol,
        }


class GlobalAlgebra:
    """Product closure of all local algebras, with factorization recipes.

    The union of the local spans is usually a proper subspace of the full
    algebra they generate, so each closure basis element is kept as an exact
    ordered product of tagged local generators.  Morphisms defined on local
    generators then extend multiplicatively along the recipes.
    """

    def __init__(self, net: "NetModel", tol: float = DEFAULT_TOL):
        self.net = net
        self.tol = tol
        self.gen_tags: list[tuple[str, int]] = []
        gens: list[np.ndarray] = []
        for region in net.site.regions:
            for idx, mat in enumerate(net.local[region].basis):
                self.gen_tags.append((region, idx))
                gens.append(mat)
        self.generators = gens
        basis, recipes = linalg.product_closure(gens, net.dim, tol)
        self.basis = basis
        self.recipes = recipes
        self.onb = linalg.orthonormal_span(basis, tol)
        stack = np.stack([linalg.mat_to_vec(b) for b in basis], axis=1)
        self._pinv = np.linalg.pinv(stack, rcond=1e-12)
        self.algebra = ConcreteAlgebra(net.dim, basis, tol)
        self.is_full = self.onb.shape[0] == net.dim * net.dim

    def expand(self, x: np.ndarray) -> np.ndarray:
        """Coordinates of ``x`` in the closure basis (least squares)."""
        return self._pinv @ linalg.mat_to_vec(x)

    def membership_defect(self, x: np.ndarray) -> float:
        return linalg.project_onto_span(self.onb, x)[1]

    def contains(self, x: np.ndarray, tol: float | None = None) -> bool:
        scale = max(hs_norm(x), 1.0)
        return self.membership_defect(x) <= (tol or self.tol) * scale

    def generating_pair(self) -> list[np.ndarray]:
        """A small deterministic generating set for intertwiner systems.

        Two pseudo-generic combinations of the closure basis generate the
        whole algebra in every case we ship; the closure dimension is checked
        and the full generator list is returned as a fallback.
        """
        k = len(self.basis)
        c1 = np.array([1.0 / (i + 2.0) for i in range(k)])
        c2 = np.array([1.0 / (i * i + 3.0) for i in range(k)])
        x1 = sum(c * b for c, b in zip(c1, self.basis))
        x2 = sum(c * b for c, b in zip(c2, self.basis))
        cand = [x1, x2, dagger(x1), dagger(x2)]
        closed, _ = linalg.product_closure(cand, self.net.dim, self.tol)
        if len(closed) >= self.onb.shape[0]:
            return cand
        return list(self.generators) + [dagger(g) for g in self.generators]


class NetModel:
    """Assignment of a concrete algebra to each region of a causal site."""

    def __init__(self, site: CausalSite, local: dict[str, ConcreteAlgebra], tol: float = DEFAULT_TOL):
        dims = {alg.dim for alg in local.values()}
        if len(dims) != 1:
            raise ValueError("all local algebras must share the ambient dimension")
        self.site = site
        self.local = local
        self.dim = dims.pop()
        self.tol = tol
        self._commutants: dict[str, ConcreteAlgebra] = {}
        self._global: GlobalAlgebra | None = None

    @property
    def global_algebra(self) -> GlobalAlgebra:
        if self._global is None:
            self._global = GlobalAlgebra(self, self.tol)
        return self._global

    def commutant_of(self, region: str) -> ConcreteAlgebra:
        """Cached commutant of the local algebra at ``region``."""
        if region not in self._commutants:
            self._commutants[region] = commutant(self.local[region], self.tol)
        return self._commutants[region]

    def check_isotony(self) -> list[tuple[str, str, float]]:
        """Per containment pair, the worst membership defect of A(a) in A(b)."""
        out = []
        for (a, b) in sorted(self.site.leq):
            if a == b:
                continue
            defect = linalg.span_defect(self.local[b].onb, self.local[a].basis)
            out.append((a, b, defect))
        return out

    def check_locality(self) -> list[tuple[str, str, float]]:
        """Per disjoint pair, the worst commutator norm between local bases."""
        out = []
        for (a, b) in sorted(self.site.disjoint):
            if a >= b:
                continue
            worst = 0.0
            for x in self.local[a].basis:
                for y in self.local[b].basis:
                    worst = max(worst, hs_norm(x @ y - y @ x))
            out.append((a, b, worst))
        return out


def generated_algebra(net: NetModel, regions: list[str] | frozenset[str], tol: float = DEFAULT_TOL) -> ConcreteAlgebra:
    """Product closure of the union of local bases over the given regions."""
    regs = sorted(regions)
    if not regs:
        raise ValueError("need at least one region")
    gens = [m for r in regs for m in net.local[r].basis]
    basis, _ = linalg.product_closure(gens, net.dim, tol)
    return ConcreteAlgebra(net.dim, basis, tol)


def check_haag_duality(net: NetModel, a: str, tol: float = DEFAULT_TOL) -> DualityReport:
    """Compare the commutant of the spacelike-complement algebra with A(a)."""
    comp = spacelike_complement(net.site, a)
    if not comp:
        raise ValueError(f"region {a!r} has empty spacelike complement")
    generated = generated_algebra(net, comp, tol)
    dual = commutant(generated, tol)
    local = net.local[a]
    return DualityReport(
        region=a,
        dim_local=local.span_dim,
        dim_dual=dual.span_dim,
        defect_local_in_dual=linalg.span_defect(dual.onb, local.basis),
        defect_dual_in_local=linalg.span_defect(local.onb, dual.basis),
        tol=tol,
    )
