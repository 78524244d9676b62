"""Transporter families and the 1-cocycles they generate.

A transporter family for an object localized in ``o`` picks, for every
region ``a``, a unitary arrow onto a copy of the object localized in ``a``.
The pairwise products of these unitaries form a 1-cocycle over the site,
which is what the presheaf extension functor consumes.
"""

from __future__ import annotations

import numpy as np

from .linalg import DEFAULT_TOL, dagger, hs_norm
from .bimodules import Amplimorphism, Intertwiner, localization_defect
from .site import regions_containing_both


class TransporterFamily:
    """Unitary transports of one object into every region of the site.

    ``unitaries[a]`` is the matrix of a unitary arrow from the base object to
    its transported copy localized in ``a``; at the home region it must be the
    unit arrow.  Transported objects are derived on demand:
    ``tau_a(A) = V_a rho(A) V_a+``.
    """

    def __init__(self, base: Amplimorphism, home: str, unitaries: dict[str, np.ndarray]):
        self.base = base
        self.home = home
        self.unitaries = {r: np.asarray(v, dtype=complex) for r, v in unitaries.items()}
        self._targets: dict[str, Amplimorphism] = {}

    def regions(self) -> list[str]:
        return sorted(self.unitaries)

    def transporter(self, a: str) -> Intertwiner:
        return Intertwiner(self.base, self.target(a), self.unitaries[a])

    def target(self, a: str) -> Amplimorphism:
        """The transported copy of the base object localized in ``a``."""
        if a not in self._targets:
            v = self.unitaries[a]
            images = [v @ m @ dagger(v) for m in self.base.images]
            tau = Amplimorphism(self.base.net, self.base.mult, images, support=a)
            tau.name = f"{self.base.name}@{a}" if self.base.name else None
            self._targets[a] = tau
        return self._targets[a]

    def validate(self, tol: float = DEFAULT_TOL) -> dict[str, float]:
        """Worst residuals: covering, unit-at-home, unitarity, localization."""
        base = self.base
        report = {"coverage": 0.0, "home_unit": 0.0, "unitarity": 0.0, "localization": 0.0, "intertwining": 0.0}
        missing = [r for r in base.net.site.regions if r not in self.unitaries]
        report["coverage"] = float(len(missing))
        if self.home in self.unitaries:
            report["home_unit"] = hs_norm(self.unitaries[self.home] - base.unit)
        for a in self.regions():
            v = self.unitaries[a]
            tau = self.target(a)
            report["unitarity"] = max(
                report["unitarity"],
                hs_norm(dagger(v) @ v - base.unit),
                hs_norm(v @ dagger(v) - tau.unit),
            )
            report["localization"] = max(report["localization"], localization_defect(tau, a))
            for g in base.net.global_algebra.generating_pair():
                report["intertwining"] = max(
                    report["intertwining"], hs_norm(v @ base.apply(g) - tau.apply(g) @ v)
                )
        return report

    def ok(self, tol: float = DEFAULT_TOL) -> bool:
        rep = self.validate(tol)
        return all(v <= (tol if k != "coverage" else 0.5) for k, v in rep.items())

    def tensor(self, other: "TransporterFamily") -> "TransporterFamily":
        """Family for the tensor object; both factors transported to the same region."""
        from .bimodules import tensor_objects, tensor_arrows

        prod = tensor_objects(self.base, other.base)
        units: dict[str, np.ndarray] = {}
        for a in self.regions():
            if a not in other.unitaries:
                continue
            uv = tensor_arrows(self.transporter(a), other.transporter(a))
            units[a] = uv.mat
        return TransporterFamily(prod, prod.support or self.home, units)

    def direct_sum(self, other: "TransporterFamily") -> tuple["TransporterFamily", Intertwiner, Intertwiner]:
        """Family for the canonical direct sum (blockwise transports)."""
        from .bimodules import direct_sum as _dsum

        alpha, w1, w2 = _dsum(self.base, other.base)
        units: dict[str, np.ndarray] = {}
        for a in self.regions():
            if a not in other.unitaries:
                continue
            d = alpha.dim
            n1 = self.base.mult
            n2 = other.base.mult
            big = np.zeros(((n1 + n2) * d, (n1 + n2) * d), dtype=complex)
            big[: n1 * d, : n1 * d] = self.unitaries[a]
            big[n1 * d :, n1 * d :] = other.unitaries[a]
            units[a] = big
        return TransporterFamily(alpha, self.home, units), w1, w2


def rebase(fam: TransporterFamily, a: str) -> TransporterFamily:
    """The same transports, re-anchored at the copy localized in ``a``.

    The transported object becomes the base and the transporters are the
    cocycle values ``z_{b a} = V_b V_a+``.
    """
    sigma = fam.target(a)
    units = {b: fam.unitaries[b] @ dagger(fam.unitaries[a]) for b in fam.unitaries}
    return TransporterFamily(sigma, a, units)


class Cocycle:
    """Partial isometries ``z[a, b]`` subject to the 1-cocycle identity."""

    def __init__(self, family: TransporterFamily):
        self.family = family
        self.site = family.base.net.site

    def value(self, a: str, b: str) -> np.ndarray:
        return self.family.unitaries[a] @ dagger(self.family.unitaries[b])

    def identity_residuals(self) -> dict[str, float]:
        """Residual table for the three cocycle conditions over the site."""
        site = self.site
        net = self.family.base.net
        regs = sorted(self.family.unitaries)
        worst_chain = 0.0
        for a in regs:
            for b in regs:
                zab = self.value(a, b)
                for c in regs:
                    worst_chain = max(
                        worst_chain, hs_norm(zab @ self.value(b, c) - self.value(a, c))
                    )
        worst_unit = max(
            hs_norm(self.value(a, a) - self.family.target(a).unit) for a in regs
        )
        worst_local = 0.0
        d = net.dim
        n = self.family.base.mult
        for a in regs:
            for b in regs:
                hulls = regions_containing_both(site, a, b)
                if not hulls:
                    continue
                zab = self.value(a, b)
                for hull in hulls:
                    alg = net.local[hull]
                    for i in range(n):
                        for j in range(n):
                            entry = zab[i * d : (i + 1) * d, j * d : (j + 1) * d]
                            worst_local = max(worst_local, alg.membership_defect(entry))
        return {"chain": worst_chain, "unit": worst_unit, "local_entries": worst_local}

    def reproduces_base(self) -> float:
        """Residual of rho(A) = z_{ob} (A (x) 1) z_{bo} on spacelike algebras."""
        fam = self.family
        net = fam.base.net
        site = net.site
        o = fam.home
        worst = 0.0
        eye_n = np.eye(fam.base.mult, dtype=complex)
        for a in sorted(site.regions):
            if not site.is_disjoint(a, o):
                continue
            for b in sorted(site.regions):
                if b == o or not (site.is_disjoint(b, a)):
                    continue
                zob = self.value(o, b)
                zbo = self.value(b, o)
                for g in net.local[a].basis:
                    lhs = fam.base.apply(g)
                    rhs = zob @ np.kron(eye_n, g) @ zbo
                    worst = max(worst, hs_norm(lhs - rhs))
        return worst


def cocycle_from_transporters(fam: TransporterFamily, tol: float = DEFAULT_TOL) -> Cocycle:
    """Build the cocycle ``z_{ab} = V_a V_b+`` after checking unitarity."""
    rep = fam.validate(tol)
    if rep["unitarity"] > max(tol, 1e-8):
        raise ValueError(f"transporter family is not unitary (residual {rep['unitarity']:.2e})")
    return Cocycle(fam)
