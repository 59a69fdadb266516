"""Quaternions, slice frames, quaternionic matrices, and the complex adjoint.

A quaternion is stored as four real components (w, x, y, z) against the basis
(1, e1, e2, e3) with e1*e2 = e3 and all three imaginary units squaring to -1.
A slice frame is an ordered pair (i, j) of orthogonal unit imaginary
quaternions; it identifies H with pairs over the slice field R + iR, and a
quaternionic matrix P = A + B j embeds as the doubled complex block matrix

    [[A, B], [-conj(B), conj(A)]]

called the complex adjoint here, following the linear-algebra literature.
The adjoint is an injective algebra homomorphism whose image is exactly the
set of matrices Q fixed by J conj(Q) J^T with the block-antisymmetric unit J.
Everything numerically heavy downstream runs on adjoint images and pulls the
result back; this module owns the embedding, its inverse, and the quaternion
arithmetic underneath.

Complex matrices are plain numpy arrays throughout; only quaternionic data
gets wrapper types.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .errors import DimensionMismatch, SymmetryViolation

__all__ = [
    "Quaternion",
    "SliceFrame",
    "QMatrix",
    "DEFAULT_FRAME",
    "ZERO",
    "ONE",
    "E1",
    "E2",
    "E3",
    "qmul",
    "complex_adjoint",
    "complex_adjoint_inverse",
    "column_embedding",
    "operator_norm",
    "right_independent",
    "symplectic_unit",
    "symplectic_defect",
    "slice_frame_through",
]


# ---------------------------------------------------------------------------
# raw component-array arithmetic (trailing axis of length 4)

def hconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def hprod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise Hamilton product of component arrays (broadcasting)."""
    aw, ax, ay, az = (a[..., k] for k in range(4))
    bw, bx, by, bz = (b[..., k] for k in range(4))
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def hmatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product of component arrays shaped (..., r, c, 4) @ (..., c, k, 4)."""
    aw, ax, ay, az = (a[..., k] for k in range(4))
    bw, bx, by, bz = (b[..., k] for k in range(4))
    return np.stack(
        [
            aw @ bw - ax @ bx - ay @ by - az @ bz,
            aw @ bx + ax @ bw + ay @ bz - az @ by,
            aw @ by - ax @ bz + ay @ bw + az @ bx,
            aw @ bz + ax @ by - ay @ bx + az @ bw,
        ],
        axis=-1,
    )


def habs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


# ---------------------------------------------------------------------------
# scalar type

@dataclasses.dataclass(frozen=True)
class Quaternion:
    """One quaternion w + x e1 + y e2 + z e3."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> "Quaternion":
        a = np.asarray(a, dtype=float)
        if a.shape != (4,):
            raise DimensionMismatch(f"quaternion needs 4 components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __abs__(self) -> float:
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    @property
    def real(self) -> float:
        return self.w

    def inverse(self) -> "Quaternion":
        n2 = self.w**2 + self.x**2 + self.y**2 + self.z**2
        if n2 == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        c = self.conj()
        return Quaternion(c.w / n2, c.x / n2, c.y / n2, c.z / n2)

    def _coerce(self, other):
        if isinstance(other, Quaternion):
            return other
        if isinstance(other, (int, float)):
            return Quaternion(float(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quaternion.from_array(hprod(self.as_array(), o.as_array()))

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self

    def allclose(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return abs(self - other) <= tol

    def as_json(self) -> list:
        return [self.w, self.x, self.y, self.z]

    @classmethod
    def from_json(cls, obj) -> "Quaternion":
        return cls.from_array(np.asarray(obj, dtype=float))


ZERO = Quaternion()
ONE = Quaternion(1.0)
E1 = Quaternion(0.0, 1.0, 0.0, 0.0)
E2 = Quaternion(0.0, 0.0, 1.0, 0.0)
E3 = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product of two quaternions."""
    return a * b


# ---------------------------------------------------------------------------
# slice frames

@dataclasses.dataclass(frozen=True)
class SliceFrame:
    """Orthogonal pair of unit imaginary quaternions spanning a slice.

    The frame fixes the identification H = (R + iR) + (R + iR) j used by the
    complex adjoint.  i and j must be purely imaginary, unit length, and
    orthogonal; then ij = -ji automatically and (1, i, j, ij) is an
    orthonormal real basis of H.
    """

    i: Quaternion
    j: Quaternion

    def __post_init__(self):
        tol = 1e-9
        for name, q in (("i", self.i), ("j", self.j)):
            if abs(q.w) > tol:
                raise ValueError(f"frame unit {name} must be purely imaginary")
            if abs(abs(q) - 1.0) > tol:
                raise ValueError(f"frame unit {name} must have unit length")
        dot = self.i.x * self.j.x + self.i.y * self.j.y + self.i.z * self.j.z
        if abs(dot) > tol:
            raise ValueError("frame units must be orthogonal")

    @property
    def k(self) -> Quaternion:
        return self.i * self.j

    def basis(self) -> np.ndarray:
        """4x4 orthonormal matrix whose rows are (1, i, j, ij) as real vectors."""
        return np.stack(
            [
                ONE.as_array(),
                self.i.as_array(),
                self.j.as_array(),
                self.k.as_array(),
            ]
        )


DEFAULT_FRAME = SliceFrame(E1, E2)


def slice_frame_through(p: Quaternion, fallback: SliceFrame = DEFAULT_FRAME) -> SliceFrame:
    """A frame whose first unit points along the imaginary part of p.

    Real p carries no direction, so the fallback frame is returned unchanged.
    The second unit is completed deterministically from the standard imaginary
    axes (the least-aligned one, orthonormalized).
    """
    im = np.array([p.x, p.y, p.z], dtype=float)
    n = float(np.linalg.norm(im))
    if n <= 1e-14 * max(1.0, abs(p)):
        return fallback
    axis = im / n
    cands = np.eye(3)
    overlaps = np.abs(cands @ axis)
    e = cands[int(np.argmin(overlaps))]
    e = e - (e @ axis) * axis
    e = e / np.linalg.norm(e)
    mk = lambda v: Quaternion(0.0, float(v[0]), float(v[1]), float(v[2]))
    return SliceFrame(mk(axis), mk(e))


def to_frame_coords(arr: np.ndarray, frame: SliceFrame) -> np.ndarray:
    """Rewrite component arrays against the frame basis (1, i, j, ij)."""
    return np.asarray(arr, dtype=float) @ frame.basis().T


def from_frame_coords(co: np.ndarray, frame: SliceFrame) -> np.ndarray:
    return np.asarray(co, dtype=float) @ frame.basis()


# ---------------------------------------------------------------------------
# matrices

class QMatrix:
    """Dense quaternionic matrix backed by a (rows, cols, 4) float array."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 3 or arr.shape[-1] != 4:
            raise DimensionMismatch(f"expected shape (rows, cols, 4), got {arr.shape}")
        self.data = arr

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data)

    @classmethod
    def from_real(cls, m) -> "QMatrix":
        m = np.asarray(m, dtype=float)
        data = np.zeros(m.shape + (4,))
        data[..., 0] = m
        return cls(data)

    @classmethod
    def from_entries(cls, rows) -> "QMatrix":
        data = np.array([[q.as_array() for q in row] for row in rows], dtype=float)
        return cls(data)

    @classmethod
    def from_scalar(cls, q: Quaternion) -> "QMatrix":
        return cls(q.as_array().reshape(1, 1, 4))

    # -- shape and access ---------------------------------------------------

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion.from_array(self.data[i, j])

    def is_scalar(self) -> bool:
        return self.data.shape[:2] == (1, 1)

    def scalar(self) -> Quaternion:
        if not self.is_scalar():
            raise DimensionMismatch("matrix is not 1x1")
        return self.entry(0, 0)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return QMatrix(self.data + other.data)

    def __sub__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        self._check_same_shape(other)
        return QMatrix(self.data - other.data)

    def __neg__(self):
        return QMatrix(-self.data)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return QMatrix(self.data * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return QMatrix(hmatmul(self.data, other.data))

    def left_mul(self, q: Quaternion) -> "QMatrix":
        """Multiply every entry by q from the left."""
        return QMatrix(hprod(q.as_array(), self.data))

    def right_mul(self, q: Quaternion) -> "QMatrix":
        return QMatrix(hprod(self.data, q.as_array()))

    def conj(self) -> "QMatrix":
        return QMatrix(hconj(self.data))

    def conj_transpose(self) -> "QMatrix":
        return QMatrix(np.swapaxes(hconj(self.data), 0, 1))

    def max_abs(self) -> float:
        if self.data.size == 0:
            return 0.0
        return float(np.max(habs(self.data)))

    def allclose(self, other: "QMatrix", tol: float = 1e-12) -> bool:
        self._check_same_shape(other)
        return bool(np.all(np.abs(self.data - other.data) <= tol))

    def _check_same_shape(self, other: "QMatrix"):
        if self.data.shape != other.data.shape:
            raise DimensionMismatch(
                f"shape mismatch: {self.data.shape[:2]} vs {other.data.shape[:2]}"
            )

    def __repr__(self):
        return f"QMatrix({self.rows}x{self.cols})"

    # -- serialization ------------------------------------------------------

    def as_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "data": [[list(map(float, e)) for e in row] for row in self.data],
        }

    @classmethod
    def from_json(cls, obj) -> "QMatrix":
        rows, cols = int(obj["rows"]), int(obj["cols"])
        data = np.asarray(obj["data"], dtype=float)
        if data.shape != (rows, cols, 4):
            raise DimensionMismatch(
                f"declared {rows}x{cols} but data has shape {data.shape}"
            )
        return cls(data)


# ---------------------------------------------------------------------------
# the complex adjoint and friends

def symplectic_unit(n: int) -> np.ndarray:
    """The 2n x 2n block matrix [[0, I], [-I, 0]]."""
    j = np.zeros((2 * n, 2 * n), dtype=complex)
    j[:n, n:] = np.eye(n)
    j[n:, :n] = -np.eye(n)
    return j


def symplectic_defect(q: np.ndarray) -> float:
    """Max-entry distance of a complex matrix from the adjoint image."""
    q = np.asarray(q, dtype=complex)
    r2, c2 = q.shape[-2], q.shape[-1]
    if r2 % 2 or c2 % 2:
        raise DimensionMismatch("adjoint images have even dimensions")
    jr = symplectic_unit(r2 // 2)
    jc = symplectic_unit(c2 // 2)
    mapped = jr @ np.conj(q) @ jc.T
    if mapped.size == 0:
        return 0.0
    return float(np.max(np.abs(mapped - q)))


def adjoint_array(arr: np.ndarray, frame: SliceFrame = DEFAULT_FRAME) -> np.ndarray:
    """Complex adjoint of component arrays shaped (..., rows, cols, 4)."""
    co = to_frame_coords(arr, frame)
    a = co[..., 0] + 1j * co[..., 1]
    b = co[..., 2] + 1j * co[..., 3]
    top = np.concatenate([a, b], axis=-1)
    bottom = np.concatenate([-np.conj(b), np.conj(a)], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def adjoint_pullback(q: np.ndarray, frame: SliceFrame = DEFAULT_FRAME) -> tuple[np.ndarray, float]:
    """Undo the adjoint, symmetrizing first; returns (components, defect)."""
    q = np.asarray(q, dtype=complex)
    defect = symplectic_defect(q)
    r, c = q.shape[-2] // 2, q.shape[-1] // 2
    q11 = q[..., :r, :c]
    q12 = q[..., :r, c:]
    q21 = q[..., r:, :c]
    q22 = q[..., r:, c:]
    a = 0.5 * (q11 + np.conj(q22))
    b = 0.5 * (q12 - np.conj(q21))
    co = np.stack([a.real, a.imag, b.real, b.imag], axis=-1)
    return from_frame_coords(co, frame), defect


def complex_adjoint(p: QMatrix | Quaternion, f: SliceFrame = DEFAULT_FRAME) -> np.ndarray:
    """Embed a quaternionic matrix as its doubled complex block matrix."""
    if isinstance(p, Quaternion):
        p = QMatrix.from_scalar(p)
    return adjoint_array(p.data, f)


def complex_adjoint_inverse(
    q: np.ndarray, f: SliceFrame = DEFAULT_FRAME, tol: float = 1e-9
) -> QMatrix:
    """Pull a complex matrix back through the adjoint.

    Raises SymmetryViolation when the matrix sits further than tol (relative
    to its magnitude) from the adjoint image; otherwise the image-symmetric
    part is returned, which is exact for exact inputs.
    """
    q = np.asarray(q, dtype=complex)
    if q.ndim != 2:
        raise DimensionMismatch("expected a 2-d complex matrix")
    scale = max(1.0, float(np.max(np.abs(q))) if q.size else 0.0)
    components, defect = adjoint_pullback(q, f)
    if defect > tol * scale:
        raise SymmetryViolation(
            f"symmetry defect {defect:.3e} exceeds tolerance {tol * scale:.3e}",
            certificate={"defect": defect, "tol": tol * scale},
        )
    return QMatrix(components)


def column_embedding(w: QMatrix, f: SliceFrame = DEFAULT_FRAME) -> np.ndarray:
    """Stack a quaternionic column u + v j as the complex vector [u; -conj v]."""
    if w.cols != 1:
        raise DimensionMismatch("column embedding expects an n x 1 matrix")
    return complex_adjoint(w, f)[:, 0]


def operator_norm(p: QMatrix | Quaternion) -> float:
    """Euclidean operator norm, via the largest adjoint singular value."""
    adj = complex_adjoint(p, DEFAULT_FRAME)
    if adj.size == 0:
        return 0.0
    return float(np.linalg.norm(adj, 2))


def right_independent(
    vectors, f: SliceFrame = DEFAULT_FRAME, tol: float = 1e-9
) -> bool:
    """Whether columns are independent under right quaternion combinations.

    Right dependence over H is a rank statement about both adjoint columns of
    every vector together (the second column is the antilinear partner of the
    first, and right scalar action mixes the pair), so the test stacks full
    adjoint blocks.  Each vector is normalized first, which makes the verdict
    exactly invariant under right multiplication by nonzero quaternions.
    """
    vectors = list(vectors)
    if not vectors:
        raise DimensionMismatch("need at least one vector")
    height = vectors[0].rows
    for v in vectors:
        if v.cols != 1 or v.rows != height:
            raise DimensionMismatch("vectors must share a common n x 1 shape")
    blocks = []
    for v in vectors:
        norm = operator_norm(v)
        if norm <= 1e-300:
            return False
        blocks.append(complex_adjoint(v, f) / norm)
    stacked = np.concatenate(blocks, axis=1)
    if stacked.shape[1] > stacked.shape[0]:
        return False
    smallest = np.linalg.svd(stacked, compute_uv=False)[-1]
    return bool(smallest > tol)
