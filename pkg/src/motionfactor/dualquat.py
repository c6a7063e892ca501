"""Quaternion and dual quaternion algebra with the kinematic action on 3-space.

All values are immutable plain data and every operation is a pure function,
so everything here is safe to share between threads.  Rigid displacements are
represented projectively: a dual quaternion h = p + eps*q with nonzero real
norm acts on points, and real multiples of h act identically.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .errors import (
    ExceptionalPoint,
    NotInGroup,
    NotLinearMotion,
    NotOnStudyQuadric,
)


@dataclass(frozen=True, slots=True)
class DualNumber:
    """Number re + eps*du with eps**2 = 0."""

    re: float
    du: float = 0.0

    def __add__(self, other: "DualNumber") -> "DualNumber":
        return DualNumber(self.re + other.re, self.du + other.du)

    def __sub__(self, other: "DualNumber") -> "DualNumber":
        return DualNumber(self.re - other.re, self.du - other.du)

    def __mul__(self, other: "DualNumber") -> "DualNumber":
        return DualNumber(self.re * other.re, self.re * other.du + self.du * other.re)


@dataclass(frozen=True, slots=True)
class Quaternion:
    """Element w + x*i + y*j + z*k of the quaternion algebra."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            aw, ax, ay, az = self.w, self.x, self.y, self.z
            bw, bx, by, bz = other.w, other.x, other.y, other.z
            return Quaternion(
                aw * bw - ax * bx - ay * by - az * bz,
                aw * bx + ax * bw + ay * bz - az * by,
                aw * by - ax * bz + ay * bw + az * bx,
                aw * bz + ax * by - ay * bx + az * bw,
            )
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def dot(self, other: "Quaternion") -> float:
        return (self.w * other.w + self.x * other.x
                + self.y * other.y + self.z * other.z)

    def scalar(self) -> float:
        return self.w

    def vec(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def inverse(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() * (1.0 / n)

    def max_abs(self) -> float:
        return max(abs(self.w), abs(self.x), abs(self.y), abs(self.z))

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_abs() <= tol

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @staticmethod
    def from_vector(v) -> "Quaternion":
        v = np.asarray(v, dtype=float)
        return Quaternion(0.0, v[0], v[1], v[2])


Q_ZERO = Quaternion()
Q_ONE = Quaternion(1.0)
QI = Quaternion(0.0, 1.0, 0.0, 0.0)
QJ = Quaternion(0.0, 0.0, 1.0, 0.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True, slots=True)
class DualQuaternion:
    """Element primal + eps*dual of the dual quaternion ring."""

    primal: Quaternion = Q_ZERO
    dual: Quaternion = Q_ZERO

    def __add__(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(self.primal + other.primal, self.dual + other.dual)

    def __sub__(self, other: "DualQuaternion") -> "DualQuaternion":
        return DualQuaternion(self.primal - other.primal, self.dual - other.dual)

    def __neg__(self) -> "DualQuaternion":
        return DualQuaternion(-self.primal, -self.dual)

    def __mul__(self, other):
        if isinstance(other, DualQuaternion):
            return DualQuaternion(
                self.primal * other.primal,
                self.primal * other.dual + self.dual * other.primal,
            )
        if isinstance(other, Quaternion):
            return DualQuaternion(self.primal * other, self.dual * other)
        if isinstance(other, (int, float)):
            return DualQuaternion(self.primal * other, self.dual * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        if isinstance(other, Quaternion):
            return DualQuaternion(other * self.primal, other * self.dual)
        return NotImplemented

    def conj(self) -> "DualQuaternion":
        return DualQuaternion(self.primal.conj(), self.dual.conj())

    def norm(self) -> DualNumber:
        # h*conj(h) = N(p) + eps*(p*conj(q) + q*conj(p)); the dual part is
        # automatically scalar and equals twice the 4-vector inner product
        # of primal and dual, which is the Study condition defect.
        return DualNumber(self.primal.norm(), 2.0 * self.primal.dot(self.dual))

    def study_defect(self) -> float:
        return 2.0 * self.primal.dot(self.dual)

    def inverse(self) -> "DualQuaternion":
        pinv = self.primal.inverse()
        return DualQuaternion(pinv, -(pinv * self.dual * pinv))

    def max_abs(self) -> float:
        return max(self.primal.max_abs(), self.dual.max_abs())

    def is_zero(self, tol: float = DEFAULT_TOL) -> bool:
        return self.max_abs() <= tol

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.primal.as_array(), self.dual.as_array()])

    @staticmethod
    def from_array(a) -> "DualQuaternion":
        a = np.asarray(a, dtype=float)
        if a.shape != (8,):
            raise ValueError("dual quaternion needs 8 coordinates")
        return DualQuaternion(Quaternion(*a[:4]), Quaternion(*a[4:]))


DQ_ZERO = DualQuaternion()
DQ_ONE = DualQuaternion(Q_ONE)


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product of two quaternions."""
    return a * b


def dq_mul(a: DualQuaternion, b: DualQuaternion) -> DualQuaternion:
    """Product in the dual quaternion ring (eps**2 = 0)."""
    return a * b


def dq_norm(h: DualQuaternion) -> DualNumber:
    """Norm h*conj(h) as a dual number; its dual part is the Study defect."""
    return h.norm()


def act_on_point(h: DualQuaternion, point, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Apply the rigid displacement represented by h to a point of 3-space.

    Requires the norm of h to be a nonzero real; raises NotInGroup otherwise.
    """
    nrm = h.norm()
    scale = 1.0 + abs(nrm.re)
    if abs(nrm.du) > tol * scale:
        raise NotInGroup(f"Study defect {nrm.du:.3e} exceeds tolerance")
    if abs(nrm.re) <= tol * scale:
        raise NotInGroup("primal part has zero norm")
    p, q = h.primal, h.dual
    xq = Quaternion.from_vector(point)
    r = p * xq * p.conj() + p * q.conj() - q * p.conj()
    return r.vec() / nrm.re


@dataclass(frozen=True, eq=False)
class Rotation:
    """Revolute generator: rotation about the line with these Pluecker coordinates."""

    direction: np.ndarray
    moment: np.ndarray
    kind = "rotation"

    def anchor_point(self) -> np.ndarray:
        """Point of the axis closest to the origin."""
        return np.cross(self.direction, self.moment)


@dataclass(frozen=True, eq=False)
class Translation:
    """Prismatic generator: translation along a fixed unit direction."""

    direction: np.ndarray
    kind = "translation"

    def anchor_point(self) -> np.ndarray:
        # No axis to anchor; carry the origin as the representative point.
        return np.zeros(3)


Generator = Rotation | Translation


def classify_generator(h: DualQuaternion, tol: float = DEFAULT_TOL) -> Generator:
    """Classify the monic linear motion polynomial t - h.

    Returns a Rotation with the (unit direction, moment) of its fixed axis, or
    a Translation with its unit direction.  Raises NotLinearMotion when t - h
    is not a motion polynomial or h is a real constant.
    """
    scale = 1.0 + h.max_abs()
    if abs(h.dual.scalar()) > tol * scale:
        raise NotLinearMotion("dual part of h has a scalar component")
    if abs(h.study_defect()) > tol * scale * scale:
        raise NotLinearMotion("norm of t - h is not a real polynomial")
    pv = h.primal.vec()
    qv = h.dual.vec()
    plen = float(np.linalg.norm(pv))
    if plen > tol * scale:
        # h = cos + sin*(d + eps*(d x a)) up to scale, so the classical
        # Pluecker moment a x d is the negated dual vector part
        direction = pv / plen
        moment = -qv / plen
        moment = moment - np.dot(direction, moment) * direction
        return Rotation(direction, moment)
    qlen = float(np.linalg.norm(qv))
    if qlen > tol * scale:
        return Translation(qv / qlen)
    raise NotLinearMotion("h is a real constant, t - h moves nothing")


def study_form(a: DualQuaternion, b: DualQuaternion) -> float:
    """Symmetric bilinear form cutting out the Study quadric.

    study_form(h, h) equals the Study defect of h.
    """
    return a.primal.dot(b.dual) + b.primal.dot(a.dual)


@dataclass(frozen=True, slots=True)
class Pose:
    """Canonical projective representative of a rigid displacement.

    The representative has unit primal norm and its largest magnitude primal
    coefficient is positive.
    """

    rep: DualQuaternion

    def act(self, point, tol: float = DEFAULT_TOL) -> np.ndarray:
        return act_on_point(self.rep, point, tol)

    def as_array(self) -> np.ndarray:
        return self.rep.as_array()


def normalize_pose(h: DualQuaternion, tol: float = DEFAULT_TOL) -> Pose:
    """Normalize h to the canonical representative of its displacement."""
    pn = h.primal.norm()
    scale = 1.0 + pn + h.dual.norm()
    if pn <= tol * scale:
        raise ExceptionalPoint("primal part vanishes, point lies in the exceptional 3-space")
    defect = h.study_defect()
    if abs(defect) > tol * scale:
        raise NotOnStudyQuadric(f"Study defect {defect:.3e} exceeds tolerance")
    rep = h * (1.0 / math.sqrt(pn))
    coeffs = rep.primal.as_array()
    if coeffs[int(np.argmax(np.abs(coeffs)))] < 0.0:
        rep = -rep
    return Pose(rep)


def projective_residual(a: DualQuaternion, b: DualQuaternion) -> float:
    """Sine of the angle between the two representatives in R^8.

    Zero exactly when a and b define the same projective point.
    """
    u = a.as_array()
    v = b.as_array()
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        return 1.0
    u = u / nu
    # orthogonal component, accurate for small angles unlike sqrt(1 - cos^2)
    w = v - np.dot(u, v) * u
    return float(np.linalg.norm(w) / nv)


def pose_distance(a: DualQuaternion, b: DualQuaternion, tol: float = DEFAULT_TOL) -> float:
    """Distance between the canonical representatives, insensitive to sign."""
    u = normalize_pose(a, tol).as_array()
    v = normalize_pose(b, tol).as_array()
    return float(min(np.linalg.norm(u - v), np.linalg.norm(u + v)))
