"""Eigensystems by closed form where one exists, a cyclic-Jacobi dense oracle
otherwise, and the degeneracy structure both feed into walk averaging.

Eigenvalues are always sorted descending with ties broken by ascending
pre-sort index, so output is reproducible across runs and platforms.
Closed-form circulant constructions assign one computed eigenvalue per
{a, -a} orbit, which makes the symmetry degeneracy lambda_a == lambda_{-a}
exact in floating point rather than approximate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, GraphValidationError, Symbol

DEGENERACY_TOL = 1e-9
ORTHONORMALITY_TOL = 1e-10
RESIDUAL_TOL = 1e-9


class JacobiConvergenceError(RuntimeError):
    """Dense eigensolver failed to reach its off-diagonal threshold."""

    def __init__(self, off_norm: float, sweeps: int):
        self.off_norm = off_norm
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi sweep cap reached ({sweeps} sweeps); "
            f"off-diagonal Frobenius norm {off_norm:.3e}"
        )


@dataclass
class Spectrum:
    """Eigenvalues (descending) with paired orthonormal eigenvector columns.

    exact_pairs lists sorted-index pairs whose degeneracy is exact by
    construction (circulant a <-> -a), independent of floating rounding.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    exact_pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        self.eigenvectors = np.asarray(self.eigenvectors, dtype=np.complex128)

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def scaled(self, factor: float) -> "Spectrum":
        """Spectrum of factor * A; eigenvectors and ordering are unchanged."""
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return Spectrum(self.eigenvalues * factor, self.eigenvectors, self.exact_pairs)


@dataclass
class DegeneracyPartition:
    """Partition of eigenvalue indices into equality classes."""

    classes: list[list[int]]

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.classes)

    @property
    def multiplicities(self) -> list[int]:
        return [len(c) for c in self.classes]


@dataclass
class CharacterTable:
    """Character table of a finite group: one row per irreducible.

    The first class is the identity class, so chars[:, 0] must equal dims.
    """

    class_sizes: list[int]
    dims: list[int]
    chars: np.ndarray

    def __post_init__(self):
        self.class_sizes = [int(s) for s in self.class_sizes]
        self.dims = [int(d) for d in self.dims]
        self.chars = np.asarray(self.chars, dtype=np.complex128)
        self.validate()

    @property
    def order(self) -> int:
        return sum(self.class_sizes)

    def validate(self) -> None:
        h = len(self.class_sizes)
        if len(self.dims) != h or self.chars.shape != (h, h):
            raise ValueError("character table shape mismatch")
        if self.class_sizes[0] != 1:
            raise ValueError("first class must be the identity class (size 1)")
        if sum(d * d for d in self.dims) != self.order:
            raise ValueError("sum of squared dimensions must equal the group order")
        if not np.allclose(self.chars[:, 0].real, self.dims, atol=1e-9) or np.any(
            np.abs(self.chars[:, 0].imag) > 1e-9
        ):
            raise ValueError("identity-class column must equal the dimensions")
        sizes = np.asarray(self.class_sizes, dtype=np.float64)
        gram = (self.chars * sizes) @ self.chars.conj().T
        if not np.allclose(gram, self.order * np.eye(h), atol=1e-9):
            raise ValueError("character rows fail orthogonality")

    @classmethod
    def from_json(cls, text: str) -> "CharacterTable":
        doc = json.loads(text)
        try:
            chars = np.array(
                [[complex(re, im) for re, im in row] for row in doc["chars"]]
            )
            return cls(doc["class_sizes"], doc["dims"], chars)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed character table JSON: {exc}") from None


def _sorted_spectrum(
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    pairs: list[tuple[int, int]] | None = None,
) -> Spectrum:
    """Sort descending, ties by ascending original index; remap exact pairs."""
    order = np.lexsort((np.arange(len(eigenvalues)), -eigenvalues))
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    remapped = ()
    if pairs:
        remapped = tuple(
            sorted(
                (int(min(rank[a], rank[b])), int(max(rank[a], rank[b])))
                for a, b in pairs
            )
        )
    return Spectrum(eigenvalues[order], eigenvectors[:, order], remapped)


def _roots_of_unity(L: int) -> np.ndarray:
    """The L-th roots e^{2 pi i k / L} with exact values at quarter turns.

    Quarter-turn exactness keeps Z_2 and Z_4 character sums integral, which
    downstream checks rely on (exact zero spectral gaps).
    """
    k = np.arange(L)
    roots = np.exp(2j * np.pi * k / L)
    for num, val in ((0, 1.0), (1, 1j), (2, -1.0), (3, -1j)):
        if (num * L) % 4 == 0:
            roots[num * L // 4] = val
    return roots


def abelian_circulant_eigensystem(sym: Symbol) -> Spectrum:
    """Closed-form eigensystem of the circulant defined by `sym`.

    Eigenvalue for character a: sum over the symbol support of Re chi_a(x);
    eigenvector entries chi_a(x) / sqrt(|G|).
    """
    group = sym.group
    n = group.order
    L = math.lcm(*group.factors)
    coords = group.coordinates()
    # phase[x, a] = sum_j a_j x_j L / n_j (mod L); chi_a(x) = root^phase
    weights = np.array([L // f for f in group.factors], dtype=np.int64)
    phase = ((coords * weights) @ coords.T) % L
    chars = _roots_of_unity(L)[phase]

    support = sym.support
    eigenvalues = np.empty(n, dtype=np.float64)
    seen = np.zeros(n, dtype=bool)
    pairs: list[tuple[int, int]] = []
    for a in range(n):
        if seen[a]:
            continue
        neg = group.negate_index(a)
        lam = float(np.sum(chars[support, a].real))
        eigenvalues[a] = lam
        seen[a] = True
        if neg != a:
            eigenvalues[neg] = lam
            seen[neg] = True
            pairs.append((a, neg))
    eigenvectors = chars / math.sqrt(n)  # column a holds chi_a(x) / sqrt(|G|)
    return _sorted_spectrum(eigenvalues, eigenvectors, pairs)


def class_circulant_eigenvalues(
    table: CharacterTable, f_by_class: list[int]
) -> list[tuple[float, int]]:
    """Eigenvalues with multiplicities for a class-function circulant.

    Returns one (lambda_j, d_j^2) entry per irreducible, sorted descending.
    Eigenvectors are out of scope here; use the dense oracle for them.
    """
    f = np.asarray(f_by_class, dtype=np.float64)
    if f.shape != (len(table.class_sizes),):
        raise ValueError("class function length does not match class count")
    if not np.isin(f, (0, 1)).all():
        raise ValueError("class function values must be 0 or 1")
    if f[0] != 0:
        raise GraphValidationError("class function must vanish on the identity class")
    if not f.any():
        raise GraphValidationError("class function is zero everywhere (disconnected)")
    sizes = np.asarray(table.class_sizes, dtype=np.float64)
    lams = (table.chars.conj() * (sizes * f)).sum(axis=1) / np.asarray(table.dims)
    if np.any(np.abs(lams.imag) > 1e-9):
        raise ValueError("class circulant eigenvalues came out non-real")
    out = [(float(l.real), d * d) for l, d in zip(lams, table.dims)]
    out.sort(key=lambda t: -t[0])
    return out


def path_eigensystem(n: int) -> Spectrum:
    """Spectrum of the path P_n: 2 cos((j+1) pi / (n+1)) with sine eigenvectors."""
    if n < 2:
        raise GraphValidationError("path requires n >= 2")
    j = np.arange(1, n + 1)
    eigenvalues = 2.0 * np.cos(j * np.pi / (n + 1))
    grid = np.outer(j, j) * (np.pi / (n + 1))
    vecs = np.sqrt(2.0 / (n + 1)) * np.sin(grid)  # vecs[l, j-1]
    return _sorted_spectrum(eigenvalues, vecs.astype(np.complex128), None)


def bunkbed_eigensystem(base_spec: Spectrum) -> Spectrum:
    """Spectrum of a bunkbed from its base: lambda_j +- 1 with (|0> +- |1>)/sqrt(2)
    tensor factors.  exact_pairs is left empty; lambda_j + 1 may collide with
    lambda_k - 1, so degeneracy is recomputed numerically downstream.
    """
    n = base_spec.n
    eigenvalues = np.concatenate([base_spec.eigenvalues + 1.0, base_spec.eigenvalues - 1.0])
    plus = np.vstack([base_spec.eigenvectors, base_spec.eigenvectors]) / math.sqrt(2)
    minus = np.vstack([base_spec.eigenvectors, -base_spec.eigenvectors]) / math.sqrt(2)
    eigenvectors = np.hstack([plus, minus])
    return _sorted_spectrum(eigenvalues, eigenvectors, None)


def jacobi_eigensystem(
    matrix: np.ndarray, max_sweeps: int = 64
) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations on a real symmetric matrix.

    Converges when the off-diagonal Frobenius norm drops below
    1e-12 * (1 + ||A||_F); raises JacobiConvergenceError past the sweep cap.
    Returns (eigenvalues, eigenvector columns), unsorted.
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, atol=0.0):
        raise ValueError("matrix must be symmetric")
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.diag(a).copy(), v
    thresh = 1e-12 * (1.0 + np.linalg.norm(a))
    skip = thresh / n  # elements this small cannot lift the off norm above thresh

    def off_norm(m: np.ndarray) -> float:
        # computed from the off-diagonal entries directly; the algebraic
        # shortcut ||m||^2 - ||diag||^2 cancels catastrophically near zero
        stripped = m.copy()
        np.fill_diagonal(stripped, 0.0)
        return float(np.linalg.norm(stripped))

    for _ in range(max_sweeps):
        off = off_norm(a)
        if off < thresh:
            eigenvalues = np.diag(a).copy()
            return eigenvalues, v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = off_norm(a)
    if off < thresh:
        return np.diag(a).copy(), v
    raise JacobiConvergenceError(off, max_sweeps)


def dense_eigensystem(g: Graph) -> Spectrum:
    """Independent oracle: full eigensystem of the adjacency via cyclic Jacobi."""
    g.validate()
    eigenvalues, vecs = jacobi_eigensystem(g.adjacency.astype(np.float64))
    return _sorted_spectrum(eigenvalues, vecs.astype(np.complex128), None)


def graph_eigensystem(g: Graph, method: str = "auto") -> Spectrum:
    """Eigensystem of a graph, closed form when available.

    method: "auto" picks the closed form keyed by construction metadata and
    falls back to the dense oracle; "closed" errors when no closed form
    exists; "dense" forces the oracle.
    """
    if method not in ("auto", "closed", "dense"):
        raise ValueError(f"unknown method {method!r}")
    if method == "dense":
        return dense_eigensystem(g)
    if g.symbol is not None:
        return abelian_circulant_eigensystem(g.symbol)
    if g.family == "path":
        return path_eigensystem(g.n)
    if g.family == "bunkbed" and g.base is not None:
        return bunkbed_eigensystem(graph_eigensystem(g.base, method="auto"))
    if method == "closed":
        raise ValueError(f"no closed-form eigensystem for family {g.family!r}")
    return dense_eigensystem(g)


def degeneracy_classes(spec: Spectrum, tol: float = DEGENERACY_TOL) -> DegeneracyPartition:
    """Cluster sorted eigenvalues by adjacent gap; force-merge exact pairs."""
    if tol <= 0:
        raise ValueError("degeneracy tolerance must be positive")
    lam = spec.eigenvalues
    n = len(lam)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for j in range(1, n):
        if lam[j - 1] - lam[j] <= tol:
            union(j - 1, j)
    for a, b in spec.exact_pairs:
        union(a, b)
    groups: dict[int, list[int]] = {}
    for j in range(n):
        groups.setdefault(find(j), []).append(j)
    classes = [sorted(groups[r]) for r in sorted(groups)]
    return DegeneracyPartition(classes)


def spectral_gap(spec: Spectrum, tol: float = DEGENERACY_TOL) -> float:
    """min_{j != k} |lambda_j - lambda_k|; exactly 0 when any class repeats."""
    part = degeneracy_classes(spec, tol)
    if any(len(c) > 1 for c in part.classes):
        return 0.0
    lam = spec.eigenvalues
    if len(lam) < 2:
        return math.inf
    return float(np.min(lam[:-1] - lam[1:]))


def spectrum_type(spec: Spectrum, tol: float = DEGENERACY_TOL) -> int:
    """Number of distinct eigenvalues (degeneracy classes)."""
    return len(degeneracy_classes(spec, tol).classes)


def check_spectrum(spec: Spectrum, adjacency: np.ndarray) -> None:
    """Assert orthonormality and eigen-residual invariants; raises on failure."""
    z = spec.eigenvectors
    gram = z.conj().T @ z
    if np.max(np.abs(gram - np.eye(spec.n))) > ORTHONORMALITY_TOL:
        raise RuntimeError("eigenvectors are not orthonormal to 1e-10")
    resid = adjacency.astype(np.float64) @ z - z * spec.eigenvalues
    if np.max(np.abs(resid)) > RESIDUAL_TOL:
        raise RuntimeError("eigen-residual exceeds 1e-9")


def spectrum_to_json(
    spec: Spectrum,
    tol: float = DEGENERACY_TOL,
    include_eigenvectors: bool = False,
    extra: dict | None = None,
) -> str:
    part = degeneracy_classes(spec, tol)
    doc: dict = {
        "schema": "ctqw/1",
        "n": spec.n,
        "eigenvalues": [float(x) for x in spec.eigenvalues],
        "multiplicities": part.multiplicities,
        "degeneracy_classes": part.classes,
        "spectral_gap": spectral_gap(spec, tol),
        "type": len(part.classes),
    }
    if include_eigenvectors:
        doc["eigenvectors"] = [
            [[float(z.real), float(z.imag)] for z in spec.eigenvectors[:, j]]
            for j in range(spec.n)
        ]
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2)
