"""Points of Gr(d, n), the sphere-Hausdorff metric delta, delta_X and Plücker coordinates.

delta(A, B) is the Hausdorff distance between the unit spheres of A and B.
For a unit vector a at angle theta from B the nearest unit vector of B is the
normalised projection, at chord length 2 sin(theta / 2); the supremum is
reached at the largest principal angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, RankDeficient

EQUALITY_TOL = 1e-9
RANK_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Subspace:
    """A d-plane in R^n stored as a (d, n) array with orthonormal rows."""

    frame: np.ndarray

    def __post_init__(self):
        f = np.array(self.frame, dtype=float, copy=True)
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[0] > f.shape[1]:
            raise DimensionMismatch(f"frame must have shape (d, n) with 1 <= d <= n, got {f.shape}")
        f.setflags(write=False)
        object.__setattr__(self, "frame", f)

    @property
    def n(self) -> int:
        return self.frame.shape[1]

    @property
    def d(self) -> int:
        return self.frame.shape[0]

    @classmethod
    def from_spanning(cls, vectors: Iterable[Sequence[float]]) -> "Subspace":
        return cls(orthonormalize(vectors))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n))

    @classmethod
    def orthogonal_complement(cls, normals: Iterable[Sequence[float]], n: int | None = None) -> "Subspace":
        """The subspace orthogonal to every vector in ``normals``."""
        m = np.atleast_2d(np.asarray(list(normals), dtype=float))
        n = m.shape[1] if n is None else n
        _, s, vt = np.linalg.svd(m, full_matrices=True)
        rank = int(np.sum(s > RANK_TOL * max(s[0], 1e-300))) if s.size else 0
        if rank == 0:
            raise RankDeficient("normal vectors vanish")
        if rank == n:
            raise RankDeficient("normals span the whole space")
        return cls.from_spanning(vt[rank:])

    @property
    def projector(self) -> np.ndarray:
        return self.frame.T @ self.frame

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        if (self.n, self.d) != (other.n, other.d):
            return False
        return delta(self, other) < EQUALITY_TOL

    __hash__ = None

    def to_json(self) -> list[list[float]]:
        return [[float(v) for v in row] for row in self.frame]

    @classmethod
    def from_json(cls, rows) -> "Subspace":
        return cls.from_spanning(rows)

    def __repr__(self):
        return f"Subspace(d={self.d}, n={self.n}, frame={np.round(self.frame, 6).tolist()})"


def orthonormalize(vectors: Iterable[Sequence[float]]) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalisation pass."""
    v = np.atleast_2d(np.asarray(list(vectors), dtype=float))
    if v.size == 0:
        raise RankDeficient("no spanning vectors")
    s = np.linalg.svd(v, compute_uv=False)
    if s[-1] <= RANK_TOL * s[0] or v.shape[0] > v.shape[1]:
        raise RankDeficient(f"spanning vectors are dependent (singular values {s.tolist()})")
    out = []
    for w in v:
        w = w.copy()
        for _ in range(2):
            for q in out:
                w -= (q @ w) * q
        w /= np.linalg.norm(w)
        out.append(w)
    return np.array(out)


def _check_pair(a: Subspace, b: Subspace):
    if a.n != b.n or a.d != b.d:
        raise DimensionMismatch(f"Gr({a.d},{a.n}) vs Gr({b.d},{b.n})")


def principal_angles_batch(fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    """Principal angles for stacks of frames of shape (m, d, n); result (m, d), ascending.

    Small angles come from sines (singular values of the part of B orthogonal
    to A), large ones from cosines (singular values of A B^T), so neither end
    loses precision.
    """
    fa = np.asarray(fa, dtype=float)
    fb = np.asarray(fb, dtype=float)
    cos = np.linalg.svd(fa @ np.swapaxes(fb, -1, -2), compute_uv=False)  # descending
    resid = fb - (fb @ np.swapaxes(fa, -1, -2)) @ fa
    sin = np.linalg.svd(resid, compute_uv=False)[..., ::-1]  # ascending
    d = fa.shape[-2]
    sin = sin[..., :d] if sin.shape[-1] >= d else np.pad(sin, [(0, 0)] * (sin.ndim - 1) + [(d - sin.shape[-1], 0)])
    cos = np.clip(cos, 0.0, 1.0)
    sin = np.clip(sin, 0.0, 1.0)
    from_cos = np.arccos(cos)
    from_sin = np.arcsin(sin)
    return np.where(sin * sin < 0.5, from_sin, from_cos)


def principal_angles(a: Subspace, b: Subspace) -> list[float]:
    _check_pair(a, b)
    return principal_angles_batch(a.frame[None], b.frame[None])[0].tolist()


def delta_batch(fa: np.ndarray, fb: np.ndarray) -> np.ndarray:
    theta = principal_angles_batch(fa, fb)[..., -1]
    return 2.0 * np.sin(theta / 2.0)


def delta(a: Subspace, b: Subspace) -> float:
    _check_pair(a, b)
    return float(delta_batch(a.frame[None], b.frame[None])[0])


@dataclass(frozen=True, eq=False)
class NashPoint:
    point: np.ndarray
    tangent: Subspace

    def __post_init__(self):
        p = np.array(self.point, dtype=float, copy=True).reshape(-1)
        if p.size != self.tangent.n:
            raise DimensionMismatch("point and tangent live in different ambient spaces")
        p.setflags(write=False)
        object.__setattr__(self, "point", p)


def delta_X(p: NashPoint, q: NashPoint) -> float:
    if p.point.size != q.point.size:
        raise DimensionMismatch("NashPoints in different ambient spaces")
    return max(float(np.linalg.norm(p.point - q.point)), delta(p.tangent, q.tangent))


# Plücker coordinates


@dataclass(frozen=True, eq=False)
class PlueckerCoords:
    coords: np.ndarray
    n: int
    d: int

    @property
    def index(self) -> list[tuple[int, ...]]:
        return list(combinations(range(self.n), self.d))


def sign_normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise RankDeficient("zero Plücker vector")
    v = v / norm
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def pluecker_raw(frame: np.ndarray) -> np.ndarray:
    """All d x d minors of ``frame`` in lexicographic column order (unnormalised)."""
    d, n = frame.shape
    return np.array([np.linalg.det(frame[:, cols]) for cols in combinations(range(n), d)])


def pluecker(a: Subspace) -> PlueckerCoords:
    return PlueckerCoords(sign_normalize(pluecker_raw(a.frame)), a.n, a.d)


def subspace_from_pluecker(p: Sequence[float], n: int, d: int) -> Subspace:
    """Recover the d-plane closest to an (approximately decomposable) Plücker vector.

    Each (d-1)-subset I contracts p to the vector w_I[j] = p[I + (j,)], which
    lies in the plane when p is decomposable; the top-d right singular vectors
    of the stacked contractions span it.
    """
    p = np.asarray(p, dtype=float)
    subsets = list(combinations(range(n), d))
    if p.size != len(subsets):
        raise DimensionMismatch(f"expected {len(subsets)} Plücker coordinates, got {p.size}")
    if d == n:
        return Subspace.full(n)
    pos = {s: k for k, s in enumerate(subsets)}
    rows = []
    for idx in combinations(range(n), d - 1):
        w = np.zeros(n)
        for j in range(n):
            if j in idx:
                continue
            key = tuple(sorted(idx + (j,)))
            sign = -1.0 if sum(1 for i in idx if i > j) % 2 else 1.0
            w[j] = sign * p[pos[key]]
        rows.append(w)
    _, s, vt = np.linalg.svd(np.array(rows))
    if s.size < d or s[d - 1] <= RANK_TOL * s[0]:
        raise RankDeficient("Plücker vector does not determine a d-plane")
    return Subspace.from_spanning(vt[:d])


# brute-force reference for delta


def _sphere_samples(frame: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    d = frame.shape[0]
    if d == 1:
        return np.vstack([frame, -frame])
    g = rng.standard_normal((count, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g @ frame


def _one_sided(frame_a: np.ndarray, frame_b: np.ndarray, samples: int, rng) -> float:
    """sup over unit a in A of the distance from a to the unit sphere of B."""

    def dist(points):
        # nearest point of the sphere of B is the normalised projection
        proj = np.linalg.norm(points @ frame_b.T, axis=1)
        return np.sqrt(np.maximum(2.0 - 2.0 * proj, 0.0))

    d = frame_a.shape[0]
    pts = _sphere_samples(frame_a, samples, rng)
    vals = dist(pts)
    if d == 1:
        return float(vals.max())
    # local refinement: stochastic hill climbing on the sphere of A from the best samples
    coords = pts @ frame_a.T
    order = np.argsort(vals)[-8:]
    best = float(vals.max())
    for k in order:
        c = coords[k].copy()
        cur = float(vals[k])
        step = 0.1
        while step > 1e-9:
            trial = c + step * rng.standard_normal((16, d))
            trial /= np.linalg.norm(trial, axis=1, keepdims=True)
            tv = dist(trial @ frame_a)
            j = int(np.argmax(tv))
            if tv[j] > cur:
                cur, c = float(tv[j]), trial[j]
            else:
                step *= 0.5
        best = max(best, cur)
    return best


def hausdorff_delta_oracle(a: Subspace, b: Subspace, samples: int = 10_000, seed: int = 0) -> float:
    """Sampled sphere-Hausdorff distance; approaches delta(a, b) from below."""
    _check_pair(a, b)
    if samples < 100:
        raise ValueError("samples must be at least 100")
    rng = np.random.default_rng(seed)
    return max(
        _one_sided(a.frame, b.frame, samples, rng),
        _one_sided(b.frame, a.frame, samples, rng),
    )


def random_subspace(n: int, d: int, rng: np.random.Generator) -> Subspace:
    if not 1 <= d <= n:
        raise ValueError(f"need 1 <= d <= n, got d={d}, n={n}")
    q, _ = np.linalg.qr(rng.standard_normal((n, d)))
    return Subspace(q.T)


def line(direction: Sequence[float]) -> Subspace:
    return Subspace.from_spanning([direction])


def angle_to_delta(theta: float) -> float:
    return 2.0 * math.sin(theta / 2.0)
