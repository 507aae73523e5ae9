"""Unit-vector sets, Gram matrices, sign patterns and spherical zones."""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from plankzone.errors import NormalizationError

UNIT_TOL = 1e-12
KERNEL_TOL = 1e-10


@dataclass(frozen=True)
class UnitVectorSet:
    """n unit vectors in R^d stored as the rows of an (n, d) array."""

    vectors: np.ndarray

    def __post_init__(self):
        arr = np.array(self.vectors, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"expected a non-empty (n, d) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vectors contain non-finite entries")
        norms = np.linalg.norm(arr, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
        if bad.size:
            raise NormalizationError(int(bad[0]), float(norms[bad[0]]))
        arr.setflags(write=False)
        object.__setattr__(self, "vectors", arr)

    @classmethod
    def normalized(cls, vectors) -> "UnitVectorSet":
        arr = np.atleast_2d(np.asarray(vectors, dtype=float))
        norms = np.linalg.norm(arr, axis=1)
        zero = np.flatnonzero(norms == 0)
        if zero.size:
            raise NormalizationError(int(zero[0]), 0.0)
        return cls(arr / norms[:, None])

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def embed(self, dim: int) -> "UnitVectorSet":
        """Zero-pad the vectors into R^dim."""
        if dim < self.d:
            raise ValueError(f"cannot embed R^{self.d} into R^{dim}")
        out = np.zeros((self.n, dim))
        out[:, : self.d] = self.vectors
        return UnitVectorSet(out)


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric PSD matrix with unit diagonal, H_ij = <v_i, v_j>."""

    entries: np.ndarray

    def __post_init__(self):
        H = np.array(self.entries, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
            raise ValueError(f"Gram matrix must be square, got shape {H.shape}")
        if np.max(np.abs(H - H.T)) > 1e-12:
            raise ValueError("Gram matrix is not symmetric")
        if np.max(np.abs(np.diag(H) - 1.0)) > 1e-12:
            raise ValueError("Gram matrix diagonal must be 1")
        if np.max(np.abs(H)) > 1 + 1e-12:
            raise ValueError("Gram matrix entries exceed 1 in absolute value")
        if np.linalg.eigvalsh(H)[0] < -1e-10:
            raise ValueError("Gram matrix is not positive semidefinite")
        H = 0.5 * (H + H.T)
        H.setflags(write=False)
        object.__setattr__(self, "entries", H)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @functools.cached_property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_invertible(self, tol: float = KERNEL_TOL) -> bool:
        return bool(self.eigenvalues[0] > tol)


def as_gram(H) -> GramMatrix:
    return H if isinstance(H, GramMatrix) else GramMatrix(H)


def as_matrix(H) -> np.ndarray:
    return H.entries if isinstance(H, GramMatrix) else np.asarray(H, dtype=float)


@dataclass(frozen=True)
class SignPattern:
    """A quadrant (orthant) of R^n given by its sign vector."""

    signs: tuple

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if not signs or any(s not in (-1, 1) for s in signs):
            raise ValueError(f"sign pattern entries must be +1 or -1, got {self.signs}")
        object.__setattr__(self, "signs", signs)

    @classmethod
    def parse(cls, text: str) -> "SignPattern":
        """Build from a string such as ``"++-"``."""
        lut = {"+": 1, "-": -1}
        try:
            return cls(tuple(lut[c] for c in text.strip()))
        except KeyError:
            raise ValueError(f"invalid sign pattern {text!r}; use only '+' and '-'") from None

    @classmethod
    def of(cls, w) -> "SignPattern":
        w = np.asarray(w, dtype=float)
        if np.any(w == 0):
            raise ValueError("vector has zero entries; its quadrant is undefined")
        return cls(tuple(np.sign(w).astype(int)))

    @property
    def n(self) -> int:
        return len(self.signs)

    def __str__(self) -> str:
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def __neg__(self) -> "SignPattern":
        return SignPattern(tuple(-s for s in self.signs))

    def array(self) -> np.ndarray:
        return np.array(self.signs, dtype=float)


def all_sign_patterns(n: int, first_positive: bool = False) -> Iterator[SignPattern]:
    """Quadrants of R^n in lexicographic order of their '+'/'-' strings."""
    if first_positive:
        for rest in itertools.product((1, -1), repeat=n - 1):
            yield SignPattern((1,) + rest)
    else:
        for signs in itertools.product((1, -1), repeat=n):
            yield SignPattern(signs)


@dataclass(frozen=True)
class Zone:
    """Points of S^2 within spherical distance width/2 of the great circle normal to ``normal``."""

    normal: np.ndarray
    width: float
    half_sin: float = field(init=False, repr=False)

    def __post_init__(self):
        normal = np.array(self.normal, dtype=float)
        if normal.shape != (3,):
            raise ValueError(f"zone normal must be a 3-vector, got shape {normal.shape}")
        if abs(np.linalg.norm(normal) - 1.0) > UNIT_TOL:
            raise NormalizationError(0, float(np.linalg.norm(normal)))
        width = float(self.width)
        if not 0 < width < np.pi:
            raise ValueError(f"zone width must lie in (0, pi), got {width!r}")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "width", width)
        object.__setattr__(self, "half_sin", float(np.sin(width / 2)))

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.abs(x @ self.normal) <= self.half_sin


def gram(vs) -> GramMatrix:
    """Gram matrix of a unit-vector set (arrays are validated first)."""
    if not isinstance(vs, UnitVectorSet):
        vs = UnitVectorSet(vs)
    V = vs.vectors
    H = V @ V.T
    H = 0.5 * (H + H.T)
    np.fill_diagonal(H, 1.0)
    return GramMatrix(np.clip(H, -1.0, 1.0))


def extremal_configuration(n: int) -> UnitVectorSet:
    """n unit vectors in R^2 spanning lines spaced pi/n apart."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    theta = np.arange(n) * np.pi / n
    V = np.column_stack([np.cos(theta), np.sin(theta)])
    return UnitVectorSet(V / np.linalg.norm(V, axis=1)[:, None])


def kernel_basis(H, tol: float = KERNEL_TOL) -> list:
    """Orthonormal basis of the eigenspace of H with eigenvalues below ``tol``."""
    evals, evecs = np.linalg.eigh(as_matrix(H))
    basis = []
    for k in np.flatnonzero(evals < tol):
        vec = evecs[:, k]
        lead = vec[np.flatnonzero(np.abs(vec) > 1e-12)[0]]
        basis.append(vec * np.sign(lead))
    return basis


# -- sphere grid ---------------------------------------------------------------

_PHI = (1 + 5**0.5) / 2
_ICO_VERTICES = [
    (-1, _PHI, 0), (1, _PHI, 0), (-1, -_PHI, 0), (1, -_PHI, 0),
    (0, -1, _PHI), (0, 1, _PHI), (0, -1, -_PHI), (0, 1, -_PHI),
    (_PHI, 0, -1), (_PHI, 0, 1), (-_PHI, 0, -1), (-_PHI, 0, 1),
]
_ICO_FACES = [
    (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
    (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
    (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
    (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
]


@functools.lru_cache(maxsize=8)
def icosphere(level: int) -> np.ndarray:
    """Vertices of the icosahedron subdivided ``level`` times, projected onto S^2.

    Returns a read-only (10 * 4**level + 2, 3) array.
    """
    if level < 0:
        raise ValueError("subdivision level must be non-negative")
    verts = [np.array(v, dtype=float) / np.linalg.norm(v) for v in _ICO_VERTICES]
    faces = list(_ICO_FACES)
    for _ in range(level):
        cache = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            if key not in cache:
                m = verts[i] + verts[j]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    out = np.array(verts)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class CoverageReport:
    covered: bool
    margin: float
    uncovered_point: Optional[np.ndarray]
    refined_point: Optional[np.ndarray]
    refined_margin: Optional[float]
    grid_size: int
    total_width: float


def _zone_ratio(normals, half_sins, X):
    return np.min(np.abs(X @ normals.T) / half_sins, axis=1)


def _refine_uncovered(normals, half_sins, x0):
    # Within the sign cell of x0, maximizing min_k s_k<n_k,x>/sin_k over the
    # unit ball is a concave problem; its optimum is the deepest uncovered point.
    signs = np.sign(normals @ x0)
    signs[signs == 0] = 1
    A = signs[:, None] * normals / half_sins[:, None]
    z0 = np.append(x0, np.min(A @ x0))
    cons = [
        {"type": "ineq", "fun": lambda z: A @ z[:3] - z[3], "jac": lambda z: np.hstack([A, -np.ones((len(A), 1))])},
        {"type": "ineq", "fun": lambda z: 1.0 - z[:3] @ z[:3], "jac": lambda z: np.append(-2 * z[:3], 0.0)},
    ]
    res = minimize(
        lambda z: -z[3],
        z0,
        jac=lambda z: np.array([0.0, 0.0, 0.0, -1.0]),
        constraints=cons,
        method="SLSQP",
        options={"ftol": 1e-14, "maxiter": 200},
    )
    x = res.x[:3] / np.linalg.norm(res.x[:3])
    ratio = float(_zone_ratio(normals, half_sins, x[None, :])[0])
    if ratio < float(_zone_ratio(normals, half_sins, x0[None, :])[0]):
        return x0, float(_zone_ratio(normals, half_sins, x0[None, :])[0])
    return x, ratio


def zone_covers(zones: Sequence[Zone], resolution: int = 6, tol: float = 1e-12) -> CoverageReport:
    """Test whether the zones cover S^2 on an icosahedral grid.

    ``margin`` is the largest value over grid points of
    min_k |<normal_k, x>| / sin(width_k / 2); a grid point is uncovered when
    this ratio exceeds 1.  The best uncovered grid point is then refined
    within its sign cell to the locally deepest uncovered direction.
    """
    zones = list(zones)
    if not zones:
        raise ValueError("at least one zone is required")
    if resolution < 2:
        raise ValueError(f"resolution (subdivision level) must be >= 2, got {resolution}")
    normals = np.array([z.normal for z in zones])
    half_sins = np.array([z.half_sin for z in zones])
    X = icosphere(resolution)
    ratio = _zone_ratio(normals, half_sins, X)
    best = int(np.argmax(ratio))
    margin = float(ratio[best])
    total = float(sum(z.width for z in zones))
    if margin <= 1 + tol:
        return CoverageReport(True, margin, None, None, None, len(X), total)
    point = np.array(X[best])
    refined, refined_margin = _refine_uncovered(normals, half_sins, point)
    return CoverageReport(False, margin, point, refined, refined_margin, len(X), total)
