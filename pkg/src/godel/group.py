"""The Gödel isometry group G = R x G2 x R as a matrix Lie group.

A point is stored as coordinates (x0, x1, x2, x3).  The G0 = R x G2 part
acts on R^3 by affine maps and is realized by the 4x4 matrices

    [[e^{-x1}, 0, 0, x2],
     [0,       1, 0, x1],
     [0,       0, 1, x0],
     [0,       0, 0, 1 ]]

while x3 is a central additive factor carried alongside.

Lie algebra vectors come in two frames.  The natural frame (e0, e1, e2, e3)
is the coordinate basis at the unit.  The orthonormal frame replaces e2 by
e2' = sqrt(2) (e0 - e2), which together with e0, e1, e3 is orthonormal for
the Lorentz metric of signature (+, -, -, -).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

SQRT2 = math.sqrt(2.0)

NATURAL = "natural"
ORTHONORMAL = "orthonormal"
FRAMES = (NATURAL, ORTHONORMAL)

# below this |c1| the factor (1 - e^{-c1}) / c1 is taken from its Taylor series
_EXP_SERIES_CUTOFF = 1e-5


class GroupElement(NamedTuple):
    x0: float = 0.0
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    @property
    def array(self) -> np.ndarray:
        return np.array(self, dtype=float)


IDENTITY = GroupElement(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class AlgebraVector:
    """Element of the Lie algebra with components in a tagged frame."""

    frame: str
    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    c3: float = 0.0

    def __post_init__(self):
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}; expected one of {FRAMES}")

    @classmethod
    def natural(cls, c0=0.0, c1=0.0, c2=0.0, c3=0.0) -> "AlgebraVector":
        return cls(NATURAL, float(c0), float(c1), float(c2), float(c3))

    @classmethod
    def orthonormal(cls, c0=0.0, c1=0.0, c2=0.0, c3=0.0) -> "AlgebraVector":
        return cls(ORTHONORMAL, float(c0), float(c1), float(c2), float(c3))

    @classmethod
    def from_array(cls, frame: str, values) -> "AlgebraVector":
        c0, c1, c2, c3 = (float(v) for v in values)
        return cls(frame, c0, c1, c2, c3)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.c0, self.c1, self.c2, self.c3])

    def to_natural(self) -> "AlgebraVector":
        if self.frame == NATURAL:
            return self
        w0, w1, w2, w3 = self.c0, self.c1, self.c2, self.c3
        return AlgebraVector(NATURAL, w0 + SQRT2 * w2, w1, -SQRT2 * w2, w3)

    def to_orthonormal(self) -> "AlgebraVector":
        if self.frame == ORTHONORMAL:
            return self
        v0, v1, v2, v3 = self.c0, self.c1, self.c2, self.c3
        return AlgebraVector(ORTHONORMAL, v0 + v2, v1, -v2 / SQRT2, v3)

    def to_frame(self, frame: str) -> "AlgebraVector":
        return self.to_natural() if frame == NATURAL else self.to_orthonormal()

    def _check_frame(self, other: "AlgebraVector"):
        if other.frame != self.frame:
            raise ValueError(f"frame mismatch: {self.frame} vs {other.frame}")

    def __add__(self, other: "AlgebraVector") -> "AlgebraVector":
        self._check_frame(other)
        return AlgebraVector.from_array(self.frame, self.array + other.array)

    def __sub__(self, other: "AlgebraVector") -> "AlgebraVector":
        self._check_frame(other)
        return AlgebraVector.from_array(self.frame, self.array - other.array)

    def __mul__(self, scalar: float) -> "AlgebraVector":
        return AlgebraVector.from_array(self.frame, float(scalar) * self.array)

    __rmul__ = __mul__

    def __neg__(self) -> "AlgebraVector":
        return self * -1.0


def basis(i: int, frame: str = NATURAL) -> AlgebraVector:
    """The i-th basis vector of the given frame."""
    values = [0.0] * 4
    values[i] = 1.0
    return AlgebraVector.from_array(frame, values)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    return GroupElement(
        g.x0 + h.x0,
        g.x1 + h.x1,
        g.x2 + math.exp(-g.x1) * h.x2,
        g.x3 + h.x3,
    )


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(-g.x0, -g.x1, -g.x2 * math.exp(g.x1), -g.x3)


def to_matrix(g: GroupElement) -> np.ndarray:
    """4x4 image of the G0 part of ``g``; x3 is not represented."""
    return np.array(
        [
            [math.exp(-g.x1), 0.0, 0.0, g.x2],
            [0.0, 1.0, 0.0, g.x1],
            [0.0, 0.0, 1.0, g.x0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def from_matrix(m, x3: float = 0.0) -> GroupElement:
    m = np.asarray(m, dtype=float)
    return GroupElement(float(m[2, 3]), float(m[1, 3]), float(m[0, 3]), float(x3))


def algebra_matrix(v: AlgebraVector) -> np.ndarray:
    """4x4 image of the G0 part of ``v`` (combination of the basis matrices)."""
    v = v.to_natural()
    m = np.zeros((4, 4))
    m[2, 3] = v.c0
    m[0, 0] = -v.c1
    m[1, 3] = v.c1
    m[0, 3] = v.c2
    return m


def bracket(v: AlgebraVector, w: AlgebraVector) -> AlgebraVector:
    """Lie bracket; the only nonzero natural relation is [e1, e2] = -e2."""
    if v.frame != w.frame:
        raise ValueError("bracket needs both vectors in the same frame")
    a, b = v.to_natural(), w.to_natural()
    result = AlgebraVector.natural(0.0, 0.0, -(a.c1 * b.c2 - a.c2 * b.c1), 0.0)
    return result.to_frame(v.frame)


def structure_constants() -> np.ndarray:
    """Table ``C[k, i, j]`` with [e_i, e_j] = sum_k C[k, i, j] e_k.

    Indices run over the orthonormal frame (e0, e1, e2', e3).
    """
    c = np.zeros((4, 4, 4))
    c[0, 1, 2], c[0, 2, 1] = SQRT2, -SQRT2
    c[2, 1, 2], c[2, 2, 1] = -1.0, 1.0
    return c


def _exp_factor(c1: float) -> float:
    # (1 - e^{-c1}) / c1
    if abs(c1) < _EXP_SERIES_CUTOFF:
        return 1.0 - c1 / 2.0 + c1 * c1 / 6.0 - c1 * c1 * c1 / 24.0
    return -math.expm1(-c1) / c1


def exp(v: AlgebraVector) -> GroupElement:
    """Group exponential, in closed form."""
    v = v.to_natural()
    return GroupElement(v.c0, v.c1, v.c2 * _exp_factor(v.c1), v.c3)


def left_translate_tangent(g: GroupElement, v: AlgebraVector) -> tuple:
    """Coordinate velocity (dx0, dx1, dx2, dx3) of dl_g(v) at ``g``."""
    v = v.to_natural()
    return (v.c0, v.c1, math.exp(-g.x1) * v.c2, v.c3)
