"""The category of localized transportable bimodules of a finite net.

Objects are amplimorphisms: linear, multiplicative, *-preserving maps from
the global algebra into ``dim*n``-square matrices, stored by their values on
the closure basis of the global algebra.  Arrows are intertwiners, stored as
one rectangular block matrix whose ``dim x dim`` blocks are required to lie
in the global algebra.

Index conventions (used consistently everywhere):

* an element of ``B(H) (x) M_n`` is an ``n x n`` block matrix of ``dim``-square
  blocks, so the flat index is ``multiplicity * dim + h``;
* the multiplicity index of a tensor ``rho sigma`` is ``i = i1 + n_rho * i2``
  with ``i1`` indexing ``rho`` (fast) and ``i2`` indexing ``sigma`` (slow), so
  flat indices factor as ``i2 * (n_rho * dim) + (i1 * dim + h)``.

With this layout, adjoints of arrows are plain conjugate transposes and the
``n_tau x n_sigma`` block view of an arrow in ``(rho sigma, rho tau)`` is
ordinary slicing by the slow index.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, dagger, hs_norm
from .nets import NetModel


class Amplimorphism:
    """A bimodule object: values of a morphism on the global closure basis.

    ``images[k]`` is the value on ``net.global_algebra.basis[k]``; the value
    on an arbitrary member of the global algebra follows by linearity.  The
    ``support`` field is the claimed localization region, if any, and is a
    claim to be checked (:func:`check_localized`), never an assumption.
    """

    def __init__(
        self,
        net: NetModel,
        mult: int,
        images: list[np.ndarray],
        support: str | None = None,
        is_identity: bool = False,
        name: str | None = None,
    ):
        self.net = net
        self.mult = int(mult)
        self.images = [np.asarray(m, dtype=complex) for m in images]
        self.support = support
        self.is_identity = is_identity
        self.name = name
        self._unit: np.ndarray | None = None
        self._stack: np.ndarray | None = None
        d = net.dim
        for m in self.images:
            if m.shape != (mult * d, mult * d):
                raise ValueError("image has wrong shape for the multiplicity")

    @property
    def dim(self) -> int:
        return self.net.dim

    @property
    def total_dim(self) -> int:
        return self.mult * self.net.dim

    def apply(self, x: np.ndarray) -> np.ndarray:
        """Value on an arbitrary element of the global algebra."""
        if self.is_identity:
            return np.asarray(x, dtype=complex)
        coeff = self.net.global_algebra.expand(x)
        if self._stack is None:
            self._stack = np.stack(self.images)
        return np.tensordot(coeff, self._stack, axes=1)

    @property
    def unit(self) -> np.ndarray:
        """The unit arrow 1_rho = rho(1), a projection."""
        if self._unit is None:
            self._unit = self.apply(np.eye(self.dim, dtype=complex))
        return self._unit

    def amplify(self, x: np.ndarray, p: int) -> np.ndarray:
        """Apply the morphism entrywise to an element of ``B(H) (x) M_p``.

        The output lives in ``B(H) (x) M_n (x) M_p`` with the morphism's own
        multiplicity index fast, matching the tensor-object convention.
        """
        d = self.dim
        x = np.asarray(x, dtype=complex)
        if self.is_identity:
            return x
        nd = self.total_dim
        out = np.zeros((p * nd, p * nd), dtype=complex)
        for i in range(p):
            for j in range(p):
                block = x[i * d : (i + 1) * d, j * d : (j + 1) * d]
                if hs_norm(block) == 0.0:
                    continue
                out[i * nd : (i + 1) * nd, j * nd : (j + 1) * nd] = self.apply(block)
        return out

    def morphism_defects(self, tol: float = DEFAULT_TOL) -> dict[str, float]:
        """Residuals of the defining identities, evaluated on the basis.

        Keys: ``multiplicative``, ``star``, ``unit_projection``, ``hermite``
        (rho(A) = rho(1) rho(A) rho(1)).  Linearity holds by construction.
        """
        glob = self.net.global_algebra
        worst_mult = 0.0
        for i, gi in enumerate(glob.basis):
            for j, gj in enumerate(glob.basis):
                lhs = self.images[i] @ self.images[j]
                rhs = self.apply(gi @ gj)
                worst_mult = max(worst_mult, hs_norm(lhs - rhs))
        worst_star = max(
            hs_norm(dagger(m) - self.apply(dagger(g)))
            for m, g in zip(self.images, glob.basis)
        )
        u = self.unit
        unit_proj = max(hs_norm(u @ u - u), hs_norm(dagger(u) - u))
        worst_supp = max(hs_norm(u @ m @ u - m) for m in self.images)
        return {
            "multiplicative": worst_mult,
            "star": worst_star,
            "unit_projection": unit_proj,
            "hermite": worst_supp,
        }

    def __repr__(self) -> str:
        tag = self.name or "object"
        return f"<Amplimorphism {tag} mult={self.mult} support={self.support!r}>"


def identity_object(net: NetModel) -> Amplimorphism:
    """The identity (vacuum) object: A -> A, multiplicity one."""
    basis = net.global_algebra.basis
    return Amplimorphism(net, 1, list(basis), support=None, is_identity=True, name="iota")


def morphism_from_unitary(net: NetModel, w: np.ndarray, support: str | None, name: str | None = None) -> Amplimorphism:
    """Multiplicity-one object conjugating by a fixed unitary of B(H)."""
    images = [w @ g @ dagger(w) for g in net.global_algebra.basis]
    return Amplimorphism(net, 1, images, support=support, name=name)


class Intertwiner:
    """Arrow between two objects: a block matrix with entries in the algebra."""

    def __init__(self, source: Amplimorphism, target: Amplimorphism, mat: np.ndarray):
        self.source = source
        self.target = target
        self.mat = np.asarray(mat, dtype=complex)
        if self.mat.shape != (target.total_dim, source.total_dim):
            raise ValueError("intertwiner matrix has the wrong shape")

    def adjoint(self) -> "Intertwiner":
        return Intertwiner(self.target, self.source, dagger(self.mat))

    def compose(self, other: "Intertwiner") -> "Intertwiner":
        """self . other, defined when other.target is self.source."""
        return Intertwiner(other.source, self.target, self.mat @ other.mat)

    def entry(self, i: int, j: int) -> np.ndarray:
        d = self.source.dim
        return self.mat[i * d : (i + 1) * d, j * d : (j + 1) * d]

    def defect(self, tol: float = DEFAULT_TOL) -> float:
        """Worst residual of the intertwining relations on a generating set."""
        rho, sig, t = self.source, self.target, self.mat
        worst = max(
            hs_norm(t @ rho.unit - t),
            hs_norm(sig.unit @ t - t),
        )
        for g in rho.net.global_algebra.generating_pair():
            worst = max(worst, hs_norm(t @ rho.apply(g) - sig.apply(g) @ t))
        glob = rho.net.global_algebra
        if not glob.is_full:
            for i in range(sig.mult):
                for j in range(rho.mult):
                    worst = max(worst, glob.membership_defect(self.entry(i, j)))
        return worst

    def is_unitary(self, tol: float = DEFAULT_TOL) -> bool:
        a = self.adjoint()
        return (
            hs_norm((a.mat @ self.mat) - self.source.unit) <= tol
            and hs_norm((self.mat @ a.mat) - self.target.unit) <= tol
        )

    def __repr__(self) -> str:
        return f"<Intertwiner {self.source!r} -> {self.target!r}>"


def unit_arrow(rho: Amplimorphism) -> Intertwiner:
    return Intertwiner(rho, rho, rho.unit)


def check_localized(rho: Amplimorphism, o: str, tol: float = DEFAULT_TOL) -> bool:
    """Does rho act as A -> (A (x) 1) rho(1) on every algebra disjoint from o?"""
    return localization_defect(rho, o) <= tol


def localization_defect(rho: Amplimorphism, o: str) -> float:
    net = rho.net
    net.site.require_region(o)
    u = rho.unit
    worst = 0.0
    for a in sorted(net.site.regions):
        if not net.site.is_disjoint(a, o):
            continue
        for g in net.local[a].basis:
            free = np.kron(np.eye(rho.mult, dtype=complex), g) @ u
            worst = max(worst, hs_norm(rho.apply(g) - free))
    return worst


def local_membership_defect(rho: Amplimorphism, a: str) -> float:
    """How far rho(A(a)) is from A(a) (x) M_n, for a region containing the support."""
    net = rho.net
    alg = net.local[a]
    d = net.dim
    worst = 0.0
    for g in alg.basis:
        img = rho.apply(g)
        for i in range(rho.mult):
            for j in range(rho.mult):
                worst = max(worst, alg.membership_defect(img[i * d : (i + 1) * d, j * d : (j + 1) * d]))
    return worst


def tensor_objects(rho: Amplimorphism, sigma: Amplimorphism) -> Amplimorphism:
    """Monoidal product: (rho sigma)(A) = rho applied entrywise to sigma(A)."""
    if rho.net is not sigma.net:
        raise ValueError("objects live on different nets")
    if sigma.is_identity:
        out = Amplimorphism(rho.net, rho.mult, list(rho.images), support=rho.support,
                            is_identity=rho.is_identity)
        out.name = _tensor_name(rho, sigma)
        return out
    images = [rho.amplify(m, sigma.mult) for m in sigma.images]
    support = rho.support if rho.support == sigma.support else _common_support(rho, sigma)
    if rho.is_identity:
        support = sigma.support
    out = Amplimorphism(rho.net, rho.mult * sigma.mult, images, support=support,
                        is_identity=rho.is_identity and sigma.is_identity)
    out.name = _tensor_name(rho, sigma)
    return out


def _tensor_name(rho: Amplimorphism, sigma: Amplimorphism) -> str | None:
    if rho.name and sigma.name:
        return f"({rho.name}*{sigma.name})"
    return None


def _common_support(rho: Amplimorphism, sigma: Amplimorphism) -> str | None:
    """Smallest region containing both claimed supports, if one exists."""
    site = rho.net.site
    if rho.support is None and sigma.support is not None:
        return None if not rho.is_identity else sigma.support
    if rho.support is None or sigma.support is None:
        return None
    candidates = [
        d for d in site.regions
        if site.contains(rho.support, d) and site.contains(sigma.support, d)
    ]
    if not candidates:
        return None
    candidates.sort(key=lambda d: (sum(1 for r in site.regions if site.contains(r, d)), d))
    return candidates[0]


def tensor_arrows(t: Intertwiner, s: Intertwiner) -> Intertwiner:
    """Monoidal product of arrows, lexicographic convention.

    For ``t in (rho1, rho2)`` and ``s in (sigma1, sigma2)`` the result lies in
    ``(rho1 sigma1, rho2 sigma2)`` and its (i, j) entry is
    ``sum_k t[i1, k] rho1(s[i2, j2])[k, j1]``.
    """
    rho1 = t.source
    d = rho1.dim
    n_s2 = s.target.mult
    n_s1 = s.source.mult
    nd = rho1.total_dim
    amp = np.zeros((n_s2 * nd, n_s1 * nd), dtype=complex)
    for i in range(n_s2):
        for j in range(n_s1):
            block = s.mat[i * d : (i + 1) * d, j * d : (j + 1) * d]
            if hs_norm(block) != 0.0:
                amp[i * nd : (i + 1) * nd, j * nd : (j + 1) * nd] = rho1.apply(block)
    big_t = np.kron(np.eye(n_s2, dtype=complex), t.mat)
    return Intertwiner(
        tensor_objects(t.source, s.source),
        tensor_objects(t.target, s.target),
        big_t @ amp,
    )


def block(t: Intertwiner, rho: Amplimorphism, i: int, j: int) -> np.ndarray:
    """Block view of an arrow in ``(rho sigma, rho tau)``.

    Slices by the slow multiplicity index, so the result is an element of the
    reduced algebra ``(A (x) M_{n_rho})_{rho(1)}``.  The caller names the fast
    factor ``rho`` because an arrow does not remember its factorization.
    """
    fast = rho.total_dim
    n_tau = t.target.total_dim // fast
    n_sigma = t.source.total_dim // fast
    if not (0 <= i < n_tau and 0 <= j < n_sigma):
        raise IndexError("block index out of range")
    return block_view(t.mat, fast, i, j)


def block_view(t: np.ndarray, fast_dim: int, i: int, j: int) -> np.ndarray:
    """Slice the (i, j) block of size ``fast_dim`` out of a big matrix."""
    return t[i * fast_dim : (i + 1) * fast_dim, j * fast_dim : (j + 1) * fast_dim]


def intertwiner_space(rho: Amplimorphism, sigma: Amplimorphism, tol: float = DEFAULT_TOL) -> list[Intertwiner]:
    """Basis of the space of intertwiners from rho to sigma.

    Solves the linear system ``T rho(G) = sigma(G) T`` over an algebra
    generating set, together with the unit conditions and, when the global
    algebra is a proper subalgebra, entrywise membership.
    """
    if rho.net is not sigma.net:
        raise ValueError("objects live on different nets")
    net = rho.net
    d = net.dim
    nr, ns = rho.total_dim, sigma.total_dim
    eye_r = np.eye(nr, dtype=complex)
    eye_s = np.eye(ns, dtype=complex)
    rows = []
    for g in net.global_algebra.generating_pair():
        rows.append(np.kron(eye_s, rho.apply(g).T) - np.kron(sigma.apply(g), eye_r))
    rows.append(np.kron(eye_s, rho.unit.T) - np.eye(ns * nr, dtype=complex))
    rows.append(np.kron(sigma.unit, eye_r) - np.eye(ns * nr, dtype=complex))
    glob = net.global_algebra
    if not glob.is_full:
        # entrywise membership: project each d x d block onto the complement
        onb = glob.onb
        perp = np.eye(d * d, dtype=complex) - dagger(onb) @ onb
        selector = np.zeros((d * d, ns * nr), dtype=complex)
        membership_rows = []
        for i in range(sigma.mult):
            for j in range(rho.mult):
                sel = np.zeros((d * d, ns * nr), dtype=complex)
                for r in range(d):
                    for c in range(d):
                        flat = (i * d + r) * nr + (j * d + c)
                        sel[r * d + c, flat] = 1.0
                membership_rows.append(perp @ sel)
        rows.extend(membership_rows)
        del selector
    system = np.concatenate(rows)
    null = linalg.nullspace(system, tol)
    out = []
    for v in null:
        out.append(Intertwiner(rho, sigma, v.reshape(ns, nr)))
    return out


def find_unitary_equivalence(
    rho: Amplimorphism, sigma: Amplimorphism, tol: float = DEFAULT_TOL
) -> Intertwiner | None:
    """Search the intertwiner space for a unitary arrow.

    Deterministic sweep: each basis element, then a small fixed lattice of
    coefficient vectors, each polar-decomposed and accepted when the partial
    isometry part is itself an intertwiner with the correct units.  Returns
    ``None`` (with no side effects) when the sweep finds nothing; that is a
    reported outcome, not proof that no unitary exists.
    """
    space = intertwiner_space(rho, sigma, tol)
    if not space:
        return None
    candidates: list[np.ndarray] = [t.mat for t in space]
    if len(space) > 1:
        coeffs = [1.0, -1.0, 1.0j, -1.0j]
        for combo in product(range(len(coeffs) + 1), repeat=min(len(space), 4)):
            if sum(1 for c in combo if c) < 2:
                continue
            mat = np.zeros_like(space[0].mat)
            for idx, sel in enumerate(combo):
                if sel:
                    mat = mat + coeffs[sel - 1] * space[idx].mat
            candidates.append(mat)
            if len(candidates) > 2000:
                break
    onb = linalg.orthonormal_span([t.mat for t in space], tol)
    for mat in candidates:
        u = linalg.polar_isometry(mat, tol)
        if hs_norm(u) == 0.0:
            continue
        proj, defect = linalg.project_onto_span(onb, u)
        if defect > tol * max(hs_norm(u), 1.0):
            continue
        cand = Intertwiner(rho, sigma, u)
        if cand.is_unitary(max(tol, 1e-8)):
            return Intertwiner(rho, sigma, _fix_phase(u))
    return None


def _fix_phase(u: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the largest-magnitude entry is real positive."""
    flat = u.reshape(-1)
    k = int(np.argmax(np.abs(flat)))
    z = flat[k]
    if abs(z) == 0:
        return u
    return u * (abs(z) / z)


def direct_sum(rho1: Amplimorphism, rho2: Amplimorphism) -> tuple[Amplimorphism, Intertwiner, Intertwiner]:
    """Canonical block-diagonal direct sum with scalar injection isometries."""
    if rho1.net is not rho2.net:
        raise ValueError("objects live on different nets")
    net = rho1.net
    d = net.dim
    n1, n2 = rho1.mult, rho2.mult
    n = n1 + n2
    images = []
    for m1, m2 in zip(rho1.images, rho2.images):
        big = np.zeros((n * d, n * d), dtype=complex)
        big[: n1 * d, : n1 * d] = m1
        big[n1 * d :, n1 * d :] = m2
        images.append(big)
    support = rho1.support if rho1.support == rho2.support else None
    alpha = Amplimorphism(net, n, images, support=support)
    alpha.name = f"({rho1.name}+{rho2.name})" if rho1.name and rho2.name else None
    w1 = np.zeros((n * d, n1 * d), dtype=complex)
    w1[: n1 * d, :] = np.eye(n1 * d)
    w2 = np.zeros((n * d, n2 * d), dtype=complex)
    w2[n1 * d :, :] = np.eye(n2 * d)
    inj1 = Intertwiner(rho1, alpha, w1 @ rho1.unit)
    inj2 = Intertwiner(rho2, alpha, w2 @ rho2.unit)
    return alpha, inj1, inj2


class SubobjectResult:
    """Outcome of a subobject search; failure carries a diagnostic string."""

    def __init__(self, obj: Amplimorphism | None, isometry: Intertwiner | None, reason: str = ""):
        self.object = obj
        self.isometry = isometry
        self.reason = reason

    @property
    def found(self) -> bool:
        return self.object is not None


def subobject(rho: Amplimorphism, e: np.ndarray, tol: float = DEFAULT_TOL) -> SubobjectResult:
    """Split off the subobject determined by a projection in (rho, rho).

    Looks for an isometry ``V`` with entries in the algebra, ``V V+ = e`` and
    ``beta(A) = V+ rho(A) V``.  A scalar-blocked projection is split exactly
    (entries are multiples of the identity, hence local); otherwise the range
    decomposition is used and entrywise membership is verified.  Failure is a
    reported outcome: finite nets need not be closed under subobjects.
    """
    net = rho.net
    d = net.dim
    e = np.asarray(e, dtype=complex)
    if not linalg.is_projection(e, max(tol, 1e-8)):
        raise ValueError("e is not an orthogonal projection")
    worst = max(hs_norm(e @ rho.apply(g) - rho.apply(g) @ e) for g in net.global_algebra.generating_pair())
    if worst > max(tol, 1e-8):
        raise ValueError("e is not an intertwiner of (rho, rho)")

    v = _scalar_block_isometry(rho, e, tol)
    reason = ""
    if v is None:
        rank = int(round(float(np.real(np.trace(e)))))
        if rank % d != 0:
            # multiplicity must still be an integer count of isometry columns
            m = (rank + d - 1) // d
        else:
            m = rank // d
        m = max(m, 1)
        w, vecs = np.linalg.eigh((e + dagger(e)) / 2.0)
        cols = vecs[:, w > 0.5]
        if cols.shape[1] != rank:
            return SubobjectResult(None, None, "projection rank is numerically ambiguous")
        v = np.zeros((rho.total_dim, m * d), dtype=complex)
        v[:, : cols.shape[1]] = cols
        glob = net.global_algebra
        if not glob.is_full:
            defect = max(
                glob.membership_defect(v[i * d : (i + 1) * d, j * d : (j + 1) * d])
                for i in range(rho.mult)
                for j in range(m)
            )
            if defect > tol:
                return SubobjectResult(None, None, "no algebra-valued isometry found")
        reason = "range decomposition"
    m = v.shape[1] // d
    images = [dagger(v) @ img @ v for img in rho.images]
    beta = Amplimorphism(net, m, images, support=None)
    beta.name = f"sub({rho.name})" if rho.name else None
    beta.support = _best_support(beta, rho.support, tol)
    arrow = Intertwiner(beta, rho, v)
    return SubobjectResult(beta, arrow, reason)


def _scalar_block_isometry(rho: Amplimorphism, e: np.ndarray, tol: float) -> np.ndarray | None:
    """Exact splitting when every block of ``e`` is a scalar multiple of 1."""
    d = rho.dim
    n = rho.mult
    scal = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            blockij = e[i * d : (i + 1) * d, j * d : (j + 1) * d]
            c, resid = linalg.scalar_fit(np.eye(d, dtype=complex), blockij)
            if resid > tol * max(hs_norm(blockij), 1.0):
                return None
            scal[i, j] = c
    w, vecs = np.linalg.eigh((scal + dagger(scal)) / 2.0)
    cols = vecs[:, w > 0.5]
    if cols.shape[1] == 0:
        return None
    return np.kron(cols, np.eye(d, dtype=complex))


def _best_support(beta: Amplimorphism, hint: str | None, tol: float) -> str | None:
    order = []
    if hint is not None:
        order.append(hint)
    order.extend(r for r in sorted(beta.net.site.regions) if r != hint)
    for o in order:
        if localization_defect(beta, o) <= tol:
            return o
    return None
