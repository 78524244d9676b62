"""Deterministic finite-net fixtures with machine-checked duality.

The default fixture puts a copy of ``M_k`` on every cell of a small grid,
lets the cyclic group of order ``k`` act site-wise by the clock unitary, and
represents the gauge-invariant part of each box algebra on the invariant
(vacuum) subspace.  Charge objects conjugate by restricted on-site clock
powers; their transporters are two-site clock products, which live in every
box containing both cells.

The gauge-odd single-site field does not survive the vacuum restriction (it
maps the invariant subspace onto its complement), so the shipped charges are
built from the gauge-invariant on-site unitaries: that is the construction
that exists at this scale.  Whether any of them generates a sector distinct
from the vacuum is recorded in the manifest, never assumed.

An S3 fixture (permutation action on ``C^3`` per site) is available behind a
flag; its duality report is computed and stored honestly, with no claim made
in advance.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from .linalg import DEFAULT_TOL, dagger, hs_norm
from .bimodules import (
    Amplimorphism,
    identity_object,
    intertwiner_space,
    localization_defect,
    morphism_from_unitary,
)
from .nets import (
    ConcreteAlgebra,
    NetModel,
    check_haag_duality,
    check_irreducibility,
    generated_algebra,
)
from .site import CausalSite, validate_site
from .transport import TransporterFamily


@dataclass(frozen=True)
class GaugeFixtureSpec:
    """Parameters of a gauge fixture; everything downstream is derived."""

    rows: int = 2
    cols: int = 2
    group: str = "cyclic"  # "cyclic" or "s3"
    order: int = 2  # cyclic order; ignored for s3
    vacuum_restriction: bool = True
    name: str = "z2"

    def __post_init__(self):
        if self.rows < 2 or self.cols < 2:
            raise ValueError("grid must be at least 2x2")
        if self.group not in ("cyclic", "s3"):
            raise ValueError(f"unknown gauge group: {self.group!r}")
        if self.group == "cyclic" and self.order < 2:
            raise ValueError("cyclic order must be >= 2")


BUILTIN_SPECS = {
    "z2": GaugeFixtureSpec(2, 2, "cyclic", 2, True, "z2"),
    "z3": GaugeFixtureSpec(2, 2, "cyclic", 3, True, "z3"),
    "s3": GaugeFixtureSpec(2, 2, "s3", 6, True, "s3"),
}


def grid_boxes(rows: int, cols: int) -> dict[str, frozenset[tuple[int, int]]]:
    """All proper sub-rectangles of the grid, as region-id -> cell set."""
    boxes = {}
    for r0 in range(rows):
        for r1 in range(r0, rows):
            for c0 in range(cols):
                for c1 in range(c0, cols):
                    if (r1 - r0 + 1) == rows and (c1 - c0 + 1) == cols:
                        continue  # the full grid has empty complement
                    cells = frozenset(
                        (r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1)
                    )
                    boxes[f"r{r0}{r1}c{c0}{c1}"] = cells
    return boxes


def grid_site(rows: int, cols: int) -> tuple[CausalSite, dict[str, frozenset[tuple[int, int]]]]:
    boxes = grid_boxes(rows, cols)
    names = sorted(boxes)
    leq = [
        (a, b) for a in names for b in names if boxes[a] <= boxes[b]
    ]
    disjoint = [
        (a, b) for a in names for b in names if a != b and not (boxes[a] & boxes[b])
    ]
    site = CausalSite.from_relations(names, leq, disjoint, close=True)
    return site, boxes


def cell_region(cell: tuple[int, int]) -> str:
    r, c = cell
    return f"r{r}{r}c{c}{c}"


def _clock(k: int) -> np.ndarray:
    omega = np.exp(2j * np.pi / k)
    return np.diag(omega ** np.arange(k))


def _site_operator(local: np.ndarray, site_index: int, n_sites: int, k: int) -> np.ndarray:
    mats = [np.eye(k, dtype=complex)] * n_sites
    mats[site_index] = local
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _s3_permutation_matrices() -> list[np.ndarray]:
    mats = []
    for perm in sorted(permutations(range(3))):
        m = np.zeros((3, 3), dtype=complex)
        for i, j in enumerate(perm):
            m[j, i] = 1.0
        mats.append(m)
    return mats


class FixtureBundle:
    """A generated net together with its charges, transports and manifest."""

    def __init__(
        self,
        spec: GaugeFixtureSpec,
        site: CausalSite,
        boxes: dict[str, frozenset[tuple[int, int]]],
        net: NetModel,
        vacuum_isometry: np.ndarray,
        charge_units: dict[tuple[int, int], np.ndarray],
    ):
        self.spec = spec
        self.site = site
        self.boxes = boxes
        self.net = net
        self.vacuum_isometry = vacuum_isometry
        self.charge_units = charge_units  # cell -> restricted on-site unitary
        self.objects: dict[str, Amplimorphism] = {}
        self.families: dict[str, TransporterFamily] = {}
        self.manifest: dict = {}
        self._cells = sorted(charge_units)
        self.objects["iota"] = identity_object(net)
        self.families["iota"] = TransporterFamily(
            self.objects["iota"],
            sorted(site.regions)[0],
            {a: np.eye(net.dim, dtype=complex) for a in site.regions},
        )
        for cell in self._cells:
            name = f"charge_{cell[0]}{cell[1]}"
            rho, fam = self.charged_morphism(cell)
            self.objects[name] = rho
            self.families[name] = fam

    def min_cell(self, region: str) -> tuple[int, int]:
        return min(self.boxes[region])

    def max_cell(self, region: str) -> tuple[int, int]:
        return max(self.boxes[region])

    def charged_morphism(
        self, cell: tuple[int, int], power: int = 1, anchor: str = "min"
    ) -> tuple[Amplimorphism, TransporterFamily]:
        """Charge object at a cell plus its canonical transporter family.

        ``anchor`` picks which cell of each target region carries the
        transported copy ("min" or "max"); the two choices give independent
        transport configurations for uniqueness tests.
        """
        if cell not in self.charge_units:
            raise ValueError(f"unknown cell: {cell!r}")
        w = np.linalg.matrix_power(self.charge_units[cell], power)
        home = cell_region(cell)
        name = f"charge_{cell[0]}{cell[1]}" + (f"_p{power}" if power != 1 else "")
        rho = morphism_from_unitary(self.net, w, support=home, name=name)
        pick = self.min_cell if anchor == "min" else self.max_cell
        unitaries = {}
        for region in self.site.regions:
            target = np.linalg.matrix_power(self.charge_units[pick(region)], power)
            unitaries[region] = target @ dagger(w)
        return rho, TransporterFamily(rho, home, unitaries)

    def build_manifest(self, tol: float = DEFAULT_TOL) -> dict:
        """Run every structural check and freeze the outcomes."""
        net = self.net
        report: dict = {
            "fixture": self.spec.name,
            "grid": [self.spec.rows, self.spec.cols],
            "group": self.spec.group,
            "order": self.spec.order,
            "vacuum_restriction": self.spec.vacuum_restriction,
            "ambient_dim": net.dim,
            "tol": tol,
        }
        report["site_valid"] = validate_site(self.site).ok
        report["isotony_defect"] = max((d for _, _, d in net.check_isotony()), default=0.0)
        report["locality_defect"] = max((d for _, _, d in net.check_locality()), default=0.0)
        duality = {}
        for region in sorted(self.site.regions):
            rep = check_haag_duality(net, region, tol)
            duality[region] = rep.to_json()
        report["duality"] = duality
        report["duality_defect"] = max(d["defect"] for d in duality.values())
        glob = generated_algebra(net, list(self.site.regions), tol)
        report["global_dim"] = glob.span_dim
        report["global_irreducible"] = check_irreducibility(glob, tol)
        sectors = {}
        names = sorted(n for n in self.objects if n != "iota")
        for name in names:
            rho = self.objects[name]
            sectors[name] = {
                "localized_at_support": localization_defect(rho, rho.support) <= tol,
                "dim_hom_to_vacuum": len(intertwiner_space(rho, self.objects["iota"], tol)),
                "self_dim": len(intertwiner_space(rho, rho, tol)),
            }
        for a, b in zip(names, names[1:]):
            sectors[f"{a}|{b}"] = {
                "dim_hom": len(intertwiner_space(self.objects[a], self.objects[b], tol))
            }
        report["sectors"] = sectors
        self.manifest = report
        return report


def build_gauge_fixture(spec: GaugeFixtureSpec, tol: float = DEFAULT_TOL, manifest: bool = True) -> FixtureBundle:
    """Instantiate the net, charges and manifest for a fixture spec."""
    site, boxes = grid_site(spec.rows, spec.cols)
    cells = sorted({cell for cs in boxes.values() for cell in cs})
    n_sites = len(cells)
    cell_index = {cell: i for i, cell in enumerate(cells)}

    if spec.group == "cyclic":
        k = spec.order
        dim_site = k
        clock = _clock(k)
        group_elements = [np.linalg.matrix_power(clock, j) for j in range(k)]
        charge_local = clock
    else:
        dim_site = 3
        group_elements = _s3_permutation_matrices()
        j3 = np.ones((3, 3), dtype=complex) / 3.0
        charge_local = 2.0 * j3 - np.eye(3, dtype=complex)  # invariant, order two

    full_dim = dim_site**n_sites

    def global_gauge(g: np.ndarray) -> np.ndarray:
        out = g
        for _ in range(n_sites - 1):
            out = np.kron(out, g)
        return out

    if spec.vacuum_restriction:
        if spec.group == "cyclic":
            # invariant basis states have digit sum divisible by the order
            k = spec.order
            keep = []
            for idx in range(full_dim):
                digits, x = [], idx
                for _ in range(n_sites):
                    digits.append(x % dim_site)
                    x //= dim_site
                if sum(digits) % k == 0:
                    keep.append(idx)
            q = np.zeros((full_dim, len(keep)), dtype=complex)
            for col, idx in enumerate(keep):
                q[idx, col] = 1.0
        else:
            proj = sum(global_gauge(g) for g in group_elements) / len(group_elements)
            w, v = np.linalg.eigh((proj + dagger(proj)) / 2.0)
            q = v[:, w > 0.5]
    else:
        q = np.eye(full_dim, dtype=complex)

    def restrict(m: np.ndarray) -> np.ndarray:
        return dagger(q) @ m @ q

    averager = [global_gauge(g) for g in group_elements]

    def invariant_box_basis(box_cells: frozenset[tuple[int, int]]) -> list[np.ndarray]:
        """Restricted basis of the gauge-invariant part of the box algebra."""
        idxs = sorted(cell_index[c] for c in box_cells)
        mats: list[np.ndarray] = []
        if spec.group == "cyclic":
            k = spec.order
            for assignment in product(range(dim_site), repeat=2 * len(idxs)):
                pairs = list(zip(assignment[::2], assignment[1::2]))
                if sum(i - j for i, j in pairs) % k != 0:
                    continue
                m = np.eye(1, dtype=complex)
                pos = 0
                for s in range(n_sites):
                    if s in idxs:
                        i, j = pairs[pos]
                        unit = np.zeros((dim_site, dim_site), dtype=complex)
                        unit[i, j] = 1.0
                        pos += 1
                    else:
                        unit = np.eye(dim_site, dtype=complex)
                    m = np.kron(m, unit)
                mats.append(restrict(m))
        else:
            candidates: list[np.ndarray] = []
            for assignment in product(range(dim_site), repeat=2 * len(idxs)):
                pairs = list(zip(assignment[::2], assignment[1::2]))
                m = np.eye(1, dtype=complex)
                pos = 0
                for s in range(n_sites):
                    if s in idxs:
                        i, j = pairs[pos]
                        unit = np.zeros((dim_site, dim_site), dtype=complex)
                        unit[i, j] = 1.0
                        pos += 1
                    else:
                        unit = np.eye(dim_site, dtype=complex)
                    m = np.kron(m, unit)
                avg = sum(u @ m @ dagger(u) for u in averager) / len(averager)
                if hs_norm(avg) > tol:
                    candidates.append(avg)
            from . import linalg as _la

            onb = _la.orthonormal_span(candidates, tol)
            mats = [restrict(v.reshape(full_dim, full_dim)) for v in onb]
        return mats

    local = {
        name: ConcreteAlgebra(q.shape[1], invariant_box_basis(bc), tol)
        for name, bc in sorted(boxes.items())
    }
    net = NetModel(site, local, tol)

    charge_units = {}
    for cell in cells:
        op = _site_operator(charge_local, cell_index[cell], n_sites, dim_site)
        charge_units[cell] = restrict(op)

    bundle = FixtureBundle(spec, site, boxes, net, q, charge_units)
    if manifest:
        bundle.build_manifest(tol)
    return bundle


def build_charged_morphism(
    bundle: FixtureBundle, cell: tuple[int, int], power: int = 1
) -> tuple[Amplimorphism, TransporterFamily]:
    """Charge object for a cell and charge label (power of the generator)."""
    return bundle.charged_morphism(cell, power)


def build_center_variant(bundle: FixtureBundle, tol: float = DEFAULT_TOL) -> tuple[NetModel, Amplimorphism, TransporterFamily]:
    """Doubled net with center-bearing local algebras and a cut-down object.

    Local algebras become ``A(b) (+) A(b)`` acting block-diagonally on two
    copies of the vacuum space.  The returned object compresses everything to
    the first summand: it is localized everywhere, transportable with the
    central projection as transporter, and fails faithfulness and double
    faithfulness in a controlled way.
    """
    net0 = bundle.net
    d = net0.dim
    local = {}
    for region, alg in net0.local.items():
        basis = []
        for b in alg.basis:
            top = np.zeros((2 * d, 2 * d), dtype=complex)
            top[:d, :d] = b
            bot = np.zeros((2 * d, 2 * d), dtype=complex)
            bot[d:, d:] = b
            basis.extend([top, bot])
        local[region] = ConcreteAlgebra(2 * d, basis, tol)
    net = NetModel(net0.site, local, tol)
    p = np.zeros((2 * d, 2 * d), dtype=complex)
    p[:d, :d] = np.eye(d)
    images = [g @ p for g in net.global_algebra.basis]
    home = sorted(net.site.regions)[0]
    rho = Amplimorphism(net, 1, images, support=home, name="cutdown")
    fam = TransporterFamily(rho, home, {a: p.copy() for a in net.site.regions})
    return net, rho, fam
