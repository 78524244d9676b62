"""Dense linear-algebra kernels shared by the whole package.

Everything works on complex ``numpy`` arrays.  Matrices that "live in an
algebra" are always square; spans of matrices are handled by flattening to
vectors and doing SVD-based rank/projection work.  All routines are
deterministic: no randomness, no dependence on scheduling.
"""

from __future__ import annotations

import numpy as np

#: Default absolute tolerance for rank, membership and closure decisions.
DEFAULT_TOL = 1e-9


def dagger(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def hs_inner(x: np.ndarray, y: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product <x, y> = tr(x^* y)."""
    return complex(np.tensordot(x.conj(), y, axes=2))


def hs_norm(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def mat_to_vec(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=complex).reshape(-1)


def vecs_to_mats(vecs: np.ndarray, shape: tuple[int, int]) -> list[np.ndarray]:
    return [v.reshape(shape) for v in vecs]


def orthonormal_span(mats: list[np.ndarray], tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (rows) of the span of the given matrices, via SVD.

    Returns an array of shape ``(rank, numel)`` of flattened matrices.  The
    basis depends only on the input order, never on timing.
    """
    if not mats:
        return np.zeros((0, 0), dtype=complex)
    stack = np.stack([mat_to_vec(m) for m in mats])
    scale = max(np.abs(stack).max(), 1.0)
    u, s, vh = np.linalg.svd(stack / scale, full_matrices=False)
    rank = int(np.sum(s > tol))
    return vh[:rank]


def project_onto_span(onb: np.ndarray, x: np.ndarray) -> tuple[np.ndarray, float]:
    """Orthogonal projection of ``x`` onto the span; returns (projection, defect).

    ``onb`` is a row-orthonormal matrix of flattened basis vectors and the
    defect is the Hilbert-Schmidt norm of the residual.
    """
    v = mat_to_vec(x)
    if onb.size == 0:
        return np.zeros_like(x), float(np.linalg.norm(v))
    coeff = onb.conj() @ v
    proj = coeff @ onb
    return proj.reshape(x.shape), float(np.linalg.norm(v - proj))


def span_contains(onb: np.ndarray, x: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    scale = max(hs_norm(x), 1.0)
    return project_onto_span(onb, x)[1] <= tol * scale


def span_defect(onb: np.ndarray, mats: list[np.ndarray]) -> float:
    """Largest relative projection residual of ``mats`` against the span."""
    worst = 0.0
    for m in mats:
        scale = max(hs_norm(m), 1.0)
        worst = max(worst, project_onto_span(onb, m)[1] / scale)
    return worst


def nullspace(a: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal rows spanning the right nullspace of ``a``."""
    if a.size == 0:
        n = a.shape[1] if a.ndim == 2 else 0
        return np.eye(n, dtype=complex)
    m, n = a.shape
    scale = max(np.abs(a).max(), 1.0)
    work = a / scale
    if m < n:  # pad so reduced SVD still returns the full right basis
        work = np.concatenate([work, np.zeros((n - m, n), dtype=complex)])
    _, s, vh = np.linalg.svd(work, full_matrices=False)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj()


def left_mul_operator(a: np.ndarray, n: int) -> np.ndarray:
    """Matrix of X -> a X on row-major vec(X), X of shape (a.shape[1], n)."""
    return np.kron(a, np.eye(n, dtype=complex))


def right_mul_operator(b: np.ndarray, n: int) -> np.ndarray:
    """Matrix of X -> X b on row-major vec(X), X of shape (n, b.shape[0])."""
    return np.kron(np.eye(n, dtype=complex), b.T)


def commutator_operator(g: np.ndarray) -> np.ndarray:
    """Matrix of X -> gX - Xg on row-major vec(X)."""
    d = g.shape[0]
    eye = np.eye(d, dtype=complex)
    return np.kron(g, eye) - np.kron(eye, g.T)


def product_closure(
    gens: list[np.ndarray], dim: int, tol: float = DEFAULT_TOL
) -> tuple[list[np.ndarray], list[tuple[int, ...]]]:
    """Close a generating set under products, tracking factorizations.

    Returns ``(basis, recipes)`` where every basis matrix is an exact ordered
    product of generators (the identity has the empty recipe) and together
    they span the generated unital algebra.  Adjoints must be supplied by the
    caller in ``gens`` if *-closure is wanted.  Terminates because the span
    dimension is bounded by ``dim**2``.
    """
    basis: list[np.ndarray] = [np.eye(dim, dtype=complex)]
    recipes: list[tuple[int, ...]] = [()]
    onb = orthonormal_span(basis, tol)

    def try_add(mat: np.ndarray, recipe: tuple[int, ...]) -> bool:
        nonlocal onb
        scale = max(hs_norm(mat), 1.0)
        if project_onto_span(onb, mat)[1] <= tol * scale:
            return False
        basis.append(mat)
        recipes.append(recipe)
        onb = orthonormal_span(basis, tol)
        return True

    for k, g in enumerate(gens):
        try_add(np.asarray(g, dtype=complex), (k,))

    frontier = list(range(len(basis)))
    while frontier:
        new_idx: list[int] = []
        snapshot = len(basis)
        for i in frontier:
            for j in range(snapshot):
                if len(basis) >= dim * dim:
                    break
                prod = basis[i] @ basis[j]
                if try_add(prod, recipes[i] + recipes[j]):
                    new_idx.append(len(basis) - 1)
                prod = basis[j] @ basis[i]
                if try_add(prod, recipes[j] + recipes[i]):
                    new_idx.append(len(basis) - 1)
        frontier = new_idx
    return basis, recipes


def scalar_fit(unit: np.ndarray, x: np.ndarray) -> tuple[complex, float]:
    """Least-squares scalar c with x ~ c*unit; returns (c, absolute residual)."""
    denom = hs_inner(unit, unit)
    c = hs_inner(unit, x) / denom if abs(denom) > 0 else 0.0
    return c, hs_norm(x - c * unit)


def is_projection(p: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    return hs_norm(p @ p - p) <= tol and hs_norm(dagger(p) - p) <= tol


def polar_isometry(x: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Partial-isometry factor of the polar decomposition of ``x``.

    Singular directions below ``tol`` (relative to the largest singular
    value) are dropped, so the result has the same support/range projections
    as ``x`` up to that cut.
    """
    u, s, vh = np.linalg.svd(x, full_matrices=False)
    if s.size == 0 or s[0] <= tol:
        return np.zeros_like(x)
    keep = s > tol * s[0]
    return (u[:, keep]) @ (vh[keep])


def eig_projections(h: np.ndarray, tol: float) -> list[tuple[float, np.ndarray]]:
    """Spectral projections of a hermitian matrix, eigenvalues clustered by tol.

    Returns ``(eigenvalue, projection)`` pairs sorted by ascending eigenvalue.
    """
    w, v = np.linalg.eigh((h + dagger(h)) / 2.0)
    out: list[tuple[float, np.ndarray]] = []
    i = 0
    n = len(w)
    while i < n:
        j = i
        while j + 1 < n and abs(w[j + 1] - w[i]) <= max(tol, 1e-12):
            j += 1
        cols = v[:, i : j + 1]
        out.append((float(np.mean(w[i : j + 1])), cols @ dagger(cols)))
        i = j + 1
    return out


def inverse_sqrt_psd(h: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose inverse square root of a positive semidefinite matrix."""
    w, v = np.linalg.eigh((h + dagger(h)) / 2.0)
    inv = np.where(w > tol, 1.0 / np.sqrt(np.clip(w, tol, None)), 0.0)
    return (v * inv) @ dagger(v)
