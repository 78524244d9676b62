"""Exchange symmetry, permutation statistics and left inverses.

The exchange symmetry is computed by transporting both objects to a
lexicographically chosen pair of disjoint regions, conjugating the scalar
flip matrix back, and revalidating against a second independent transport
configuration (a hard error if the two disagree: independence of the choice
is a theorem we check, not assume).

Left inverses are stored by their generator: a completely positive
normalized map from the reduced algebra ``rho(1) (A (x) M_n) rho(1)`` to the
global algebra with the module property ``phi(B rho(A)) = phi(B) A``.  The
indexed family on arrow spaces is derived blockwise from the generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
import math
import math

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, dagger, hs_norm
from .bimodules import (
    Amplimorphism,
    Intertwiner,
    block_view,
    identity_object,
    intertwiner_space,
    subobject,
    tensor_arrows,
    tensor_objects,
    unit_arrow,
)
from .site import disjoint_region_pairs
from .transport import TransporterFamily


def flip_matrix(n: int, m: int) -> np.ndarray:
    """Scalar commutation (perfect-shuffle) permutation on C^(n*m).

    Maps the composite index ``i1 + n*i2`` to ``i2 + m*i1``; conjugation by
    it swaps the two lexicographic tensor factors.
    """
    if n < 1 or m < 1:
        raise ValueError("multiplicities must be positive")
    theta = np.zeros((n * m, n * m), dtype=complex)
    for i1 in range(n):
        for i2 in range(m):
            theta[i2 + m * i1, i1 + n * i2] = 1.0
    return theta


def big_flip(n: int, m: int, d: int) -> np.ndarray:
    """The flip acting on multiplicity indices of ``B(H) (x) M_n (x) M_m``."""
    return np.kron(flip_matrix(n, m), np.eye(d, dtype=complex))


def exchange_symmetry(
    fam_rho: TransporterFamily,
    fam_sigma: TransporterFamily,
    tol: float = DEFAULT_TOL,
    revalidate: bool = True,
) -> Intertwiner:
    """The symmetry arrow in ``(rho sigma, sigma rho)``.

    Requires transports of the two objects into disjoint regions; raises
    ``RuntimeError`` when two independent transport configurations disagree
    and ``ValueError`` when the site offers no disjoint pair covered by both
    families.
    """
    rho, sigma = fam_rho.base, fam_sigma.base
    site = rho.net.site
    pairs = [
        (o1, a1)
        for o1, a1 in disjoint_region_pairs(site)
        if o1 in fam_rho.unitaries and a1 in fam_sigma.unitaries
    ]
    if not pairs:
        raise ValueError("no mutually spacelike transport configuration available on this site")

    def compute(pair: tuple[str, str]) -> np.ndarray:
        o1, a1 = pair
        u = fam_rho.transporter(o1)
        v = fam_sigma.transporter(a1)
        uxv = tensor_arrows(u, v)
        vxu = tensor_arrows(v, u)
        theta = big_flip(rho.mult, sigma.mult, rho.dim)
        return dagger(vxu.mat) @ theta @ uxv.mat

    mat = compute(pairs[0])
    if revalidate and len(pairs) > 1:
        other = compute(pairs[1])
        scale = max(hs_norm(mat), 1.0)
        if hs_norm(mat - other) > tol * scale:
            raise RuntimeError(
                "exchange symmetry depends on the transport configuration: "
                f"residual {hs_norm(mat - other):.3e} between {pairs[0]} and {pairs[1]}"
            )
    return Intertwiner(tensor_objects(rho, sigma), tensor_objects(sigma, rho), mat)


def power_object(rho: Amplimorphism, k: int) -> Amplimorphism:
    """k-fold tensor power (k = 0 gives the identity object)."""
    if k == 0:
        return identity_object(rho.net)
    out = rho
    for _ in range(k - 1):
        out = tensor_objects(rho, out)
    return out


def power_family(fam: TransporterFamily, k: int) -> TransporterFamily:
    if k == 0:
        iota = identity_object(fam.base.net)
        units = {a: np.eye(fam.base.dim, dtype=complex) for a in fam.unitaries}
        return TransporterFamily(iota, fam.home, units)
    out = fam
    for _ in range(k - 1):
        out = fam.tensor(out)
    return out


def perm_generators(fam: TransporterFamily, n: int, tol: float = DEFAULT_TOL) -> list[Intertwiner]:
    """Adjacent-transposition unitaries of the permutation action on rho^n.

    Generator ``k`` (1-based) is ``1_{rho^(k-1)} x eps(rho,rho) x 1_{rho^(n-k-1)}``.
    """
    rho = fam.base
    eps = exchange_symmetry(fam, fam, tol)
    gens = []
    for k in range(1, n):
        left = unit_arrow(power_object(rho, k - 1))
        right = unit_arrow(power_object(rho, n - k - 1))
        gens.append(tensor_arrows(tensor_arrows(left, eps), right))
    return gens


def adjacent_word(perm: tuple[int, ...]) -> list[int]:
    """Bubble-sort decomposition of a permutation into adjacent swaps.

    Returns 0-based generator indices ``a`` such that composing the swaps
    ``(a, a+1)`` in list order equals the permutation.
    """
    seq = list(perm)
    word: list[int] = []
    changed = True
    while changed:
        changed = False
        for j in range(len(seq) - 1):
            if seq[j] > seq[j + 1]:
                seq[j], seq[j + 1] = seq[j + 1], seq[j]
                word.append(j)
                changed = True
    word.reverse()
    return word


def perm_unitary(gens: list[Intertwiner], unit: Intertwiner, perm: tuple[int, ...]) -> np.ndarray:
    """Evaluate the representation on one permutation (matrix product of swaps)."""
    mat = unit.mat
    for a in adjacent_word(perm):
        mat = mat @ gens[a].mat
    return mat


def symmetrizer(fam: TransporterFamily, d: int, kind: str, tol: float = DEFAULT_TOL) -> Intertwiner:
    """Totally (anti)symmetric projection in ``(rho^d, rho^d)``.

    ``kind`` is "sym" or "antisym".  The d! terms are summed in a fixed
    lexicographic order.
    """
    if kind not in ("sym", "antisym"):
        raise ValueError("kind must be 'sym' or 'antisym'")
    rho_d = power_object(fam.base, d)
    unit = unit_arrow(rho_d)
    if d == 1:
        return unit
    gens = perm_generators(fam, d, tol)
    acc = np.zeros_like(unit.mat)
    for perm in sorted(permutations(range(d))):
        word = adjacent_word(perm)
        sign = (-1.0) ** len(word) if kind == "antisym" else 1.0
        acc = acc + sign * perm_unitary(gens, unit, perm)
    return Intertwiner(rho_d, rho_d, acc / float(math.factorial(d)))


class LeftInverse:
    """Generator of a left inverse: a CP normalized map on the reduced algebra.

    ``images[k]`` is the value on the k-th element of the orthonormal basis of
    ``rho(1) (A (x) M_n) rho(1)``; the map vanishes on the orthocomplement.
    """

    def __init__(self, base: Amplimorphism, onb: np.ndarray, images: list[np.ndarray]):
        self.base = base
        self.onb = onb
        self.images = images
        self._stack: np.ndarray | None = None

    @classmethod
    def reduced_basis(cls, rho: Amplimorphism, tol: float = DEFAULT_TOL) -> np.ndarray:
        d, n = rho.dim, rho.mult
        u = rho.unit
        mats = []
        for i in range(n):
            for j in range(n):
                for g in rho.net.global_algebra.basis:
                    e = np.zeros((n, n), dtype=complex)
                    e[i, j] = 1.0
                    mats.append(u @ np.kron(e, g) @ u)
        return linalg.orthonormal_span(mats, tol)

    @classmethod
    def from_map(cls, rho: Amplimorphism, fn, tol: float = DEFAULT_TOL) -> "LeftInverse":
        onb = cls.reduced_basis(rho, tol)
        nd = rho.total_dim
        images = [fn(v.reshape(nd, nd)) for v in onb]
        return cls(rho, onb, images)

    def generator(self, x: np.ndarray) -> np.ndarray:
        """phi(x) for x in the reduced algebra (projected onto it)."""
        coeff = self.onb.conj() @ linalg.mat_to_vec(x)
        if self._stack is None:
            self._stack = np.stack(self.images) if self.images else np.zeros((0, self.base.dim, self.base.dim))
        return np.tensordot(coeff, self._stack, axes=1)

    def family(self, e: np.ndarray, sigma: Amplimorphism, tau: Amplimorphism) -> Intertwiner:
        """The indexed-family value on an arrow of ``(rho sigma, rho tau)``."""
        fast = self.base.total_dim
        d = self.base.dim
        out = np.zeros((tau.total_dim, sigma.total_dim), dtype=complex)
        for i in range(tau.mult):
            for j in range(sigma.mult):
                out[i * d : (i + 1) * d, j * d : (j + 1) * d] = self.generator(
                    block_view(e, fast, i, j)
                )
        return Intertwiner(sigma, tau, out)

    def validate(self, tol: float = DEFAULT_TOL) -> dict[str, float]:
        """Residuals: module property, normalization, complete positivity.

        The CP figure is the most negative Choi eigenvalue, clipped at zero.
        """
        rho = self.base
        d, nd = rho.dim, rho.total_dim
        worst_mod = 0.0
        for v in self.onb:
            b = v.reshape(nd, nd)
            pb = self.generator(b)
            for g in rho.net.global_algebra.generating_pair():
                worst_mod = max(
                    worst_mod, hs_norm(self.generator(b @ rho.apply(g)) - pb @ g)
                )
        norm_defect = hs_norm(self.generator(rho.unit) - np.eye(d, dtype=complex))
        u = rho.unit
        choi = np.zeros((nd * d, nd * d), dtype=complex)
        for a in range(nd):
            for b in range(nd):
                e = np.zeros((nd, nd), dtype=complex)
                e[a, b] = 1.0
                choi[a * d : (a + 1) * d, b * d : (b + 1) * d] = self.generator(u @ e @ u)
        eigs = np.linalg.eigvalsh((choi + dagger(choi)) / 2.0)
        cp_defect = float(max(0.0, -eigs.min()))
        nonzero = max(hs_norm(m) for m in self.images) if self.images else 0.0
        return {
            "module": worst_mod,
            "normalized": norm_defect,
            "cp": cp_defect,
            "nonzero": nonzero,
        }


def left_inverse_from_conjugate(
    rho: Amplimorphism, rho_bar: Amplimorphism, r: Intertwiner, tol: float = DEFAULT_TOL
) -> LeftInverse:
    """phi(B) = (R+R)^-1 R+ rho_bar(B) R, with rho_bar applied entrywise."""
    rr = dagger(r.mat) @ r.mat
    c, _ = linalg.scalar_fit(np.eye(rho.dim, dtype=complex), rr)
    if abs(c) <= tol:
        raise ValueError("R+R vanishes; no left inverse from this solution")

    def fn(b: np.ndarray) -> np.ndarray:
        return (dagger(r.mat) @ rho_bar.amplify(b, rho.mult) @ r.mat) / c

    return LeftInverse.from_map(rho, fn, tol)


def left_inverse_from_inverse(rho: Amplimorphism, tol: float = DEFAULT_TOL) -> LeftInverse:
    """The inverse of an injective morphism onto its reduced algebra.

    This is the unique net-left inverse of a faithful simple object; validity
    for non-simple inputs is whatever the residuals say.
    """
    glob = rho.net.global_algebra
    cols = np.stack([linalg.mat_to_vec(m) for m in rho.images], axis=1)
    pinv = np.linalg.pinv(cols, rcond=1e-12)
    basis = glob.basis

    def fn(b: np.ndarray) -> np.ndarray:
        coeff = pinv @ linalg.mat_to_vec(b)
        out = np.zeros((rho.dim, rho.dim), dtype=complex)
        for c, g in zip(coeff, basis):
            if c != 0:
                out += c * g
        return out

    return LeftInverse.from_map(rho, fn, tol)


def left_inverse_from_witness(
    rho: Amplimorphism,
    d: int,
    v: Intertwiner,
    li_gamma: LeftInverse,
    tol: float = DEFAULT_TOL,
) -> LeftInverse:
    """Left inverse of rho from a statistics witness (d, gamma, V).

    ``v`` is the isometry from gamma into rho^d and ``li_gamma`` a left
    inverse of gamma; the generator sends B to
    ``phi_gamma(V+ rho^(d-1)(B) V)`` with the power applied entrywise.
    """
    rho_pow = power_object(rho, d - 1)

    def fn(b: np.ndarray) -> np.ndarray:
        lifted = rho_pow.amplify(b, rho.mult)
        return li_gamma.generator(dagger(v.mat) @ lifted @ v.mat)

    return LeftInverse.from_map(rho, fn, tol)


def li_compose(outer: LeftInverse, inner: LeftInverse, tol: float = DEFAULT_TOL) -> LeftInverse:
    """Composite left inverse of ``tensor(inner.base, outer.base)``.

    The inner generator strips the fast factor blockwise, the outer one
    finishes the job.
    """
    rho_in, rho_out = inner.base, outer.base
    composite = tensor_objects(rho_in, rho_out)
    d = rho_in.dim
    fast = rho_in.total_dim

    def fn(b: np.ndarray) -> np.ndarray:
        n_out = rho_out.mult
        mid = np.zeros((rho_out.total_dim, rho_out.total_dim), dtype=complex)
        for i in range(n_out):
            for j in range(n_out):
                mid[i * d : (i + 1) * d, j * d : (j + 1) * d] = inner.generator(
                    block_view(b, fast, i, j)
                )
        return outer.generator(mid)

    return LeftInverse.from_map(composite, fn, tol)


def li_power(li: LeftInverse, d: int, tol: float = DEFAULT_TOL) -> LeftInverse:
    """d-fold composition: the left inverse of the d-th tensor power."""
    out = li
    for _ in range(d - 1):
        out = li_compose(out, li, tol)
    return out


def li_convex(
    li1: LeftInverse,
    li2: LeftInverse,
    w1: Intertwiner,
    w2: Intertwiner,
    s: float,
    tol: float = DEFAULT_TOL,
) -> LeftInverse:
    """Convex combination through the injections of a direct sum."""
    if not 0.0 <= s <= 1.0:
        raise ValueError("convex parameter must lie in [0, 1]")
    alpha = w1.target

    def fn(b: np.ndarray) -> np.ndarray:
        t1 = li1.generator(dagger(w1.mat) @ b @ w1.mat)
        t2 = li2.generator(dagger(w2.mat) @ b @ w2.mat)
        return s * t1 + (1.0 - s) * t2

    return LeftInverse.from_map(alpha, fn, tol)


def li_compress(
    li: LeftInverse, v: Intertwiner, e: np.ndarray, tol: float = DEFAULT_TOL
) -> LeftInverse | None:
    """Left inverse of a subobject; ``None`` when the gate scalar vanishes.

    The gate is the scalar value of the generator on the projection; a zero
    is the obstruction to subobject left inverses, a reported outcome rather
    than a fault.
    """
    gate, _ = linalg.scalar_fit(np.eye(li.base.dim, dtype=complex), li.generator(e))
    if abs(gate) <= tol:
        return None
    beta = v.source

    def fn(b: np.ndarray) -> np.ndarray:
        return li.generator(v.mat @ b @ dagger(v.mat)) / gate

    return LeftInverse.from_map(beta, fn, tol)


def statistics_parameter(
    rho: Amplimorphism, li: LeftInverse, eps_self: Intertwiner, tol: float = DEFAULT_TOL
) -> tuple[float, float]:
    """The scalar value of the left inverse on the self-exchange arrow.

    Returns ``(lambda, residual)``; raises when the value is not a scalar
    multiple of the unit (the object is reducible or the map invalid), or
    when it vanishes (infinite statistics, outside the finite class).
    """
    m = li.family(eps_self.mat, rho, rho)
    lam, resid = linalg.scalar_fit(rho.unit, m.mat)
    scale = max(hs_norm(m.mat), 1.0)
    if resid > max(tol, 1e-8) * scale:
        raise ValueError(
            f"left inverse of exchange is not scalar (residual {resid:.3e}); "
            "object reducible or left inverse invalid"
        )
    if abs(lam) <= tol:
        raise ValueError("statistics parameter vanishes: infinite statistics")
    if abs(lam.imag) > max(tol, 1e-8):
        raise ValueError(f"statistics parameter has imaginary part {lam.imag:.3e}")
    return float(lam.real), float(resid)


def is_standard(rho: Amplimorphism, li: LeftInverse, eps_self: Intertwiner, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Standardness: the square of the exchange value is a positive scalar."""
    m = li.family(eps_self.mat, rho, rho).mat
    c, resid = linalg.scalar_fit(rho.unit, m @ m)
    ok = resid <= max(tol, 1e-8) * max(hs_norm(m @ m), 1.0) and c.real > tol and abs(c.imag) < max(tol, 1e-8)
    return ok, float(c.real)


def dhr_formula_check(
    fam: TransporterFamily, li: LeftInverse, d: int, lam: float, tol: float = DEFAULT_TOL
) -> float:
    """Residual of the composed-left-inverse evaluation on the antisymmetrizer.

    Compares the d-fold composed left inverse applied to the antisymmetric
    projection with ``(1/d!) * prod_k (1 - k*lambda)``.
    """
    rho = fam.base
    anti = symmetrizer(fam, d, "antisym", tol)
    li_d = li_power(li, d, tol)
    iota = identity_object(rho.net)
    val = li_d.family(anti.mat, iota, iota)
    lhs, _ = linalg.scalar_fit(np.eye(rho.dim, dtype=complex), val.mat)
    rhs = 1.0
    for k in range(1, d):
        rhs *= 1.0 - k * lam
    rhs /= float(math.factorial(d))
    return abs(lhs - rhs)


def check_simple(
    fam: TransporterFamily,
    li: LeftInverse | None = None,
    tol: float = DEFAULT_TOL,
) -> float | None:
    """Cross-checked simplicity test; returns the sign or ``None``.

    Evaluates every applicable equivalent criterion (exchange arrow scalar,
    square irreducible, left-inverse value at +-1) and hard-errors when they
    disagree: internal inconsistency is a bug, not data.
    """
    gamma = fam.base
    eps = exchange_symmetry(fam, fam, tol)
    unit2 = power_object(gamma, 2).unit
    chi, resid = linalg.scalar_fit(unit2, eps.mat)
    scalar_test = resid <= max(tol, 1e-8) * max(hs_norm(eps.mat), 1.0) and (
        abs(chi - 1) <= 1e-6 or abs(chi + 1) <= 1e-6
    )
    square = power_object(gamma, 2)
    square_irreducible = len(intertwiner_space(square, square, tol)) == 1
    votes = {"exchange_scalar": scalar_test, "square_irreducible": square_irreducible}
    sign: float | None = float(np.sign(chi.real)) if scalar_test else None
    if li is not None:
        m = li.family(eps.mat, gamma, gamma).mat
        val, vres = linalg.scalar_fit(gamma.unit, m)
        li_test = vres <= max(tol, 1e-8) * max(hs_norm(m), 1.0) and (
            abs(val - 1) <= 1e-6 or abs(val + 1) <= 1e-6
        )
        votes["left_inverse_pm1"] = li_test
        if li_test and sign is not None and abs(val.real - sign) > 1e-6:
            raise RuntimeError("simplicity tests disagree on the sign")
    if len(set(votes.values())) > 1:
        raise RuntimeError(f"simplicity tests disagree: {votes}")
    return sign if all(votes.values()) else None


@dataclass
class SummandReport:
    """Classification evidence for one irreducible summand."""

    name: str
    statistics_dim: int | None = None
    kind: str | None = None  # "antisym" | "sym" | "either"
    lam: float | None = None
    lam_residual: float | None = None
    gamma_sign: float | None = None
    gamma_faithful: bool | None = None
    status: str = "unclassified"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "statistics_dim": self.statistics_dim,
            "kind": self.kind,
            "lambda": self.lam,
            "lambda_residual": self.lam_residual,
            "gamma_sign": self.gamma_sign,
            "gamma_faithful": self.gamma_faithful,
            "status": self.status,
        }


@dataclass
class StatisticsReport:
    """Aggregate finite-statistics verdict for an object."""

    object_name: str
    irreducible: bool
    summands: list[SummandReport] = field(default_factory=list)
    witnesses: list[tuple[int, Amplimorphism, Intertwiner, TransporterFamily | None]] = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return bool(self.summands) and all(s.status == "finite" for s in self.summands)

    def to_json(self) -> dict:
        return {
            "object": self.object_name,
            "irreducible": self.irreducible,
            "finite_statistics": self.finite,
            "summands": [s.to_json() for s in self.summands],
        }


def check_faithful_morphism(rho: Amplimorphism, tol: float = DEFAULT_TOL) -> bool:
    """Zero kernel of the morphism on the global algebra."""
    cols = np.stack([linalg.mat_to_vec(m) for m in rho.images], axis=1)
    null = linalg.nullspace(cols.T, tol)
    return null.shape[0] == 0


def decompose_irreducibles(
    rho: Amplimorphism,
    fam: TransporterFamily | None,
    tol: float = DEFAULT_TOL,
) -> list[tuple[Amplimorphism, Intertwiner, TransporterFamily | None]]:
    """Split an object into irreducible subobjects via (rho, rho) projections.

    Returns ``(summand, isometry into rho, family or None)`` triples.  The
    transported family is propagated only along scalar-block splittings,
    where localization survives exactly.
    """
    space = intertwiner_space(rho, rho, tol)
    if len(space) <= 1:
        return [(rho, unit_arrow(rho), fam)]
    herm = np.zeros_like(space[0].mat)
    for k, t in enumerate(space):
        herm = herm + (t.mat + dagger(t.mat)) / (k + 2.0)
    pieces = linalg.eig_projections(herm, tol=1e-7)
    out: list[tuple[Amplimorphism, Intertwiner, TransporterFamily | None]] = []
    for _, proj in pieces:
        e = rho.unit @ proj @ rho.unit
        if hs_norm(e) <= tol:
            continue
        # clean the compression back into an orthogonal projection
        w, v = np.linalg.eigh((e + dagger(e)) / 2.0)
        cols = v[:, w > 0.5]
        if cols.shape[1] == 0:
            continue
        e = cols @ dagger(cols)
        res = subobject(rho, e, tol)
        if not res.found:
            out.append((rho, unit_arrow(rho), fam))
            continue
        beta, iso = res.object, res.isometry
        sub_fam = _transport_subobject_family(fam, iso, tol) if fam is not None else None
        deeper = decompose_irreducibles(beta, sub_fam, tol)
        for obj, emb, f in deeper:
            out.append((obj, iso.compose(emb), f))
    return out if out else [(rho, unit_arrow(rho), fam)]


def _transport_subobject_family(
    fam: TransporterFamily, iso: Intertwiner, tol: float
) -> TransporterFamily | None:
    """Family for a subobject along a scalar-block isometry, else ``None``."""
    d = fam.base.dim
    n = fam.base.mult
    m = iso.source.mult
    for i in range(n):
        for j in range(m):
            blockij = iso.mat[i * d : (i + 1) * d, j * d : (j + 1) * d]
            _, resid = linalg.scalar_fit(np.eye(d, dtype=complex), blockij)
            if resid > tol * max(hs_norm(blockij), 1.0):
                return None
    beta = iso.source
    # transporter for the subobject: W_a = Y_a+ U_a V with Y_a = U_a V
    units = {}
    for a, u in fam.unitaries.items():
        y = u @ iso.mat
        units[a] = dagger(y) @ u @ iso.mat
    home = beta.support or fam.home
    return TransporterFamily(beta, home, units)


def classify_finite_statistics(
    rho: Amplimorphism,
    fam: TransporterFamily | None,
    d_max: int = 4,
    tol: float = DEFAULT_TOL,
) -> StatisticsReport:
    """Search statistics witnesses (d, gamma, V) for every irreducible part.

    For each summand and each d up to ``d_max`` the (anti)symmetrizer is
    split off; a hit needs the subobject to be simple and faithful.  Summands
    without transport data, and summands where no witness exists below the
    bound, are reported as unclassified: non-classification is an outcome.
    """
    summands = decompose_irreducibles(rho, fam, tol)
    report = StatisticsReport(rho.name or "object", irreducible=len(summands) == 1)
    for idx, (beta, _, beta_fam) in enumerate(summands):
        sr = SummandReport(name=f"{report.object_name}[{idx}]")
        if beta_fam is None:
            sr.status = "no transport data"
            report.summands.append(sr)
            continue
        hit = None
        for d in range(1, d_max + 1):
            for kind in ("antisym", "sym"):
                proj = symmetrizer(beta_fam, d, kind, tol) if d > 1 else unit_arrow(beta)
                if hs_norm(proj.mat) <= tol:
                    continue
                if d == 1:
                    gamma, iso, gamma_fam = beta, unit_arrow(beta), beta_fam
                else:
                    res = subobject(power_object(beta, d), proj.mat, tol)
                    if not res.found:
                        continue
                    gamma, iso = res.object, res.isometry
                    gamma_fam = _transport_subobject_family(power_family(beta_fam, d), iso, tol)
                if gamma_fam is None:
                    continue
                sign = check_simple(gamma_fam, None, tol)
                if sign is None:
                    continue
                faithful = check_faithful_morphism(gamma, tol)
                if not faithful:
                    continue
                hit = (d, "either" if d == 1 else kind, gamma, iso, gamma_fam, sign)
                break
            if hit:
                break
        if hit is None:
            sr.status = f"unclassified <= {d_max}"
            report.summands.append(sr)
            continue
        d, kind, gamma, iso, gamma_fam, sign = hit
        sr.statistics_dim = d
        sr.kind = kind
        sr.gamma_sign = sign
        sr.gamma_faithful = True
        li_gamma = left_inverse_from_inverse(gamma, tol)
        li_beta = left_inverse_from_witness(beta, d, iso, li_gamma, tol)
        eps_beta = exchange_symmetry(beta_fam, beta_fam, tol)
        try:
            lam, resid = statistics_parameter(beta, li_beta, eps_beta, tol)
            sr.lam, sr.lam_residual = lam, resid
        except ValueError:
            sr.status = "left inverse degenerate"
            report.summands.append(sr)
            continue
        sr.status = "finite"
        report.summands.append(sr)
        report.witnesses.append((d, gamma, iso, gamma_fam))
    return report
