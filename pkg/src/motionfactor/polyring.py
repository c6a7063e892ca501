"""Univariate polynomials over the reals and the dual quaternions.

Coefficients are stored in ascending degree with a central variable: t
commutes with every coefficient, but the coefficients themselves do not
commute.  Division is right division with left quotients throughout, so
c = quotient * divisor + remainder.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL
from .dualquat import DQ_ONE, DualQuaternion, Quaternion
from .errors import (
    NonInvertibleDivisorLeading,
    NonInvertibleLeading,
    NonRealNorm,
    NotNonnegative,
    NumericalConditionWarning,
    OddDegree,
    ZeroNorm,
)

NEG_INF = float("-inf")


def _trim_floats(vals: list[float], tol: float) -> tuple[float, ...]:
    scale = max((abs(v) for v in vals), default=0.0)
    cut = tol * (1.0 + scale)
    n = len(vals)
    while n > 0 and abs(vals[n - 1]) <= cut:
        n -= 1
    return tuple(float(v) for v in vals[:n])


@dataclass(frozen=True, slots=True)
class RealPoly:
    """Real polynomial, coefficients ascending by degree, trailing zeros trimmed."""

    coeffs: tuple[float, ...] = ()

    @staticmethod
    def of(vals, tol: float = DEFAULT_TOL) -> "RealPoly":
        return RealPoly(_trim_floats([float(v) for v in vals], tol))

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> float:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> float:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    def monic(self) -> "RealPoly":
        return self * (1.0 / self.lead)

    def __add__(self, other: "RealPoly") -> "RealPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPoly.of([self.coeff(k) + other.coeff(k) for k in range(n)])

    def __sub__(self, other: "RealPoly") -> "RealPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return RealPoly.of([self.coeff(k) - other.coeff(k) for k in range(n)])

    def __neg__(self) -> "RealPoly":
        return RealPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, RealPoly):
            if self.is_zero or other.is_zero:
                return RealPoly()
            return RealPoly.of(np.convolve(self.coeffs, other.coeffs))
        if isinstance(other, (int, float)):
            return RealPoly.of([c * other for c in self.coeffs])
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __call__(self, t: float) -> float:
        if math.isinf(t):
            return self.lead if not self.is_zero else 0.0
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def divmod_by(self, d: "RealPoly", tol: float = DEFAULT_TOL) -> tuple["RealPoly", "RealPoly"]:
        if d.is_zero:
            raise ZeroDivisionError("division by the zero polynomial")
        r = list(self.coeffs)
        nd = len(d.coeffs)
        if len(r) < nd:
            return RealPoly(), self
        q = [0.0] * (len(r) - nd + 1)
        dl = d.lead
        for k in range(len(r) - nd, -1, -1):
            coef = r[k + nd - 1] / dl
            q[k] = coef
            if coef != 0.0:
                for i, dc in enumerate(d.coeffs):
                    r[k + i] -= coef * dc
            r[k + nd - 1] = 0.0
        return RealPoly.of(q, tol), RealPoly.of(r[: nd - 1], tol)

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def as_array(self) -> np.ndarray:
        return np.array(self.coeffs if self.coeffs else (0.0,))


RP_ZERO = RealPoly()
RP_ONE = RealPoly((1.0,))


def _trim_dq(vals: list[DualQuaternion], tol: float) -> tuple[DualQuaternion, ...]:
    scale = max((v.max_abs() for v in vals), default=0.0)
    cut = tol * (1.0 + scale)
    n = len(vals)
    while n > 0 and vals[n - 1].max_abs() <= cut:
        n -= 1
    return tuple(vals[:n])


@dataclass(frozen=True, slots=True)
class DQPoly:
    """Polynomial over the dual quaternions in a central variable."""

    coeffs: tuple[DualQuaternion, ...] = ()

    @staticmethod
    def of(vals, tol: float = DEFAULT_TOL) -> "DQPoly":
        out = []
        for v in vals:
            if isinstance(v, DualQuaternion):
                out.append(v)
            elif isinstance(v, Quaternion):
                out.append(DualQuaternion(v))
            elif isinstance(v, (int, float)):
                out.append(DualQuaternion(Quaternion(float(v))))
            else:
                out.append(DualQuaternion.from_array(v))
        return DQPoly(_trim_dq(out, tol))

    @staticmethod
    def from_real(p: RealPoly) -> "DQPoly":
        return DQPoly.of(list(p.coeffs))

    @staticmethod
    def t_minus(h: DualQuaternion) -> "DQPoly":
        return DQPoly((-h, DQ_ONE))

    @property
    def degree(self) -> float:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> DualQuaternion:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int) -> DualQuaternion:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else DualQuaternion()

    def is_monic(self, tol: float = DEFAULT_TOL) -> bool:
        return (not self.is_zero) and (self.lead - DQ_ONE).max_abs() <= tol

    def component(self, i: int) -> RealPoly:
        """Real coefficient polynomial of basis element i (0..3 primal, 4..7 dual)."""
        return RealPoly.of([c.as_array()[i] for c in self.coeffs])

    def primal_components(self) -> list[RealPoly]:
        return [self.component(i) for i in range(4)]

    def dual_components(self) -> list[RealPoly]:
        return [self.component(i) for i in range(4, 8)]

    def conj(self) -> "DQPoly":
        return DQPoly(tuple(c.conj() for c in self.coeffs))

    def __add__(self, other: "DQPoly") -> "DQPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return DQPoly.of([self.coeff(k) + other.coeff(k) for k in range(n)])

    def __sub__(self, other: "DQPoly") -> "DQPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        return DQPoly.of([self.coeff(k) - other.coeff(k) for k in range(n)])

    def __neg__(self) -> "DQPoly":
        return DQPoly(tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, RealPoly):
            other = DQPoly.from_real(other)
        if isinstance(other, (DualQuaternion, Quaternion, int, float)):
            if isinstance(other, (int, float)):
                other = DualQuaternion(Quaternion(float(other)))
            elif isinstance(other, Quaternion):
                other = DualQuaternion(other)
            return DQPoly(tuple(c * other for c in self.coeffs))
        if isinstance(other, DQPoly):
            if self.is_zero or other.is_zero:
                return DQPoly()
            out = [DualQuaternion() for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] = out[i + j] + a * b
            return DQPoly(tuple(out))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, RealPoly):
            return DQPoly.from_real(other) * self
        if isinstance(other, (int, float)):
            return DQPoly(tuple(c * other for c in self.coeffs))
        if isinstance(other, (Quaternion, DualQuaternion)):
            g = other if isinstance(other, DualQuaternion) else DualQuaternion(other)
            return DQPoly(tuple(g * c for c in self.coeffs))
        return NotImplemented

    def eval_at(self, t0: float) -> DualQuaternion:
        """Evaluate at a real parameter; at infinity this is the leading coefficient."""
        if self.is_zero:
            return DualQuaternion()
        if math.isinf(t0):
            return self.lead
        acc = DualQuaternion()
        for c in reversed(self.coeffs):
            acc = acc * t0 + c
        return acc

    def right_eval(self, h: DualQuaternion) -> DualQuaternion:
        """Right evaluation sum(c_i * h**i), coefficients on the left."""
        if self.is_zero:
            return DualQuaternion()
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * h + c
        return acc

    def max_abs(self) -> float:
        return max((c.max_abs() for c in self.coeffs), default=0.0)

    def to_json(self) -> dict:
        return {"coeffs": [list(c.as_array()) for c in self.coeffs]}

    @staticmethod
    def from_json(data: dict) -> "DQPoly":
        return DQPoly.of(data["coeffs"])


def poly_mul(a: DQPoly, b: DQPoly) -> DQPoly:
    """Coefficient convolution respecting the noncommutative products."""
    return a * b


def eval_at(c: DQPoly, t0: float) -> DualQuaternion:
    return c.eval_at(t0)


def right_eval(c: DQPoly, h: DualQuaternion) -> DualQuaternion:
    return c.right_eval(h)


def right_divide(c: DQPoly, d: DQPoly, tol: float = DEFAULT_TOL) -> tuple[DQPoly, DQPoly]:
    """Right division c = quotient * d + remainder with deg remainder < deg d."""
    if d.is_zero:
        raise ZeroDivisionError("division by the zero polynomial")
    dl = d.lead
    if dl.primal.norm() <= tol * (1.0 + dl.max_abs()) ** 2:
        raise NonInvertibleDivisorLeading("divisor leading coefficient has zero primal part")
    dinv = dl.inverse()
    r = list(c.coeffs)
    nd = len(d.coeffs)
    if len(r) < nd:
        return DQPoly(), c
    q = [DualQuaternion() for _ in range(len(r) - nd + 1)]
    for k in range(len(r) - nd, -1, -1):
        a = r[k + nd - 1] * dinv
        q[k] = a
        for i in range(nd - 1):
            r[k + i] = r[k + i] - a * d.coeffs[i]
        r[k + nd - 1] = DualQuaternion()
    return DQPoly.of(q, tol), DQPoly.of(r[: nd - 1], tol)


def norm_poly(c: DQPoly, tol: float = DEFAULT_TOL) -> tuple[RealPoly, RealPoly]:
    """Real and dual scalar parts of c * conj(c).

    The vector parts vanish identically in exact arithmetic and are asserted
    to be negligible here; the dual scalar part is the Study defect of the
    curve and vanishes exactly when c is a motion polynomial.
    """
    prim = c.primal_components()
    dual = c.dual_components()
    re = RP_ZERO
    du = RP_ZERO
    for p, q in zip(prim, dual):
        re = re + p * p
        du = du + p * q * 2.0
    full = c * c.conj()
    scale = (1.0 + c.max_abs()) ** 2 * (1 + len(c.coeffs))
    worst = max(
        (full.component(i).max_abs() for i in (1, 2, 3, 5, 6, 7)), default=0.0
    )
    assert worst <= tol * scale, "vector parts of the norm polynomial did not cancel"
    return re, du


@dataclass(frozen=True, slots=True)
class MotionPolynomial:
    """Validated polynomial with real nonzero norm and invertible leading coefficient."""

    poly: DQPoly
    norm: RealPoly

    @property
    def degree(self) -> float:
        return self.poly.degree

    def is_monic(self, tol: float = DEFAULT_TOL) -> bool:
        return self.poly.is_monic(tol)

    def monicize(self, tol: float = DEFAULT_TOL) -> tuple["MotionPolynomial", DualQuaternion]:
        """Split off the leading coefficient: poly = monic * lead.

        Returns the monic motion polynomial and the leading coefficient, so the
        original motion is the monic one followed by the constant displacement.
        """
        lead = self.poly.lead
        if self.is_monic(tol):
            return self, DQ_ONE
        monic = self.poly * lead.inverse()
        return validate_motion(monic, tol), lead

    def eval_at(self, t0: float) -> DualQuaternion:
        return self.poly.eval_at(t0)


def validate_motion(c: DQPoly, tol: float = DEFAULT_TOL) -> MotionPolynomial:
    """Check the motion polynomial conditions and wrap c with its cached norm."""
    if c.is_zero:
        raise ZeroNorm("zero polynomial")
    re, du = norm_poly(c, tol)
    scale = 1.0 + re.max_abs()
    if du.max_abs() > tol * scale:
        raise NonRealNorm(f"dual part of the norm has magnitude {du.max_abs():.3e}")
    if re.is_zero:
        raise ZeroNorm("norm polynomial vanishes identically")
    lead = c.lead
    if lead.primal.norm() <= tol * (1.0 + lead.max_abs()) ** 2:
        raise NonInvertibleLeading("leading coefficient has zero primal part")
    return MotionPolynomial(c, re)


def real_roots_complex(n: RealPoly) -> np.ndarray:
    """All complex roots of a real polynomial, via companion matrix eigenvalues."""
    if n.is_zero:
        raise ValueError("zero polynomial has no well defined root set")
    if n.degree == 0:
        return np.array([], dtype=complex)
    return np.roots(n.as_array()[::-1])


_IM_TOL = 1e-6          # imaginary part below this means "real root"
_PAIR_GAP = 5e-3        # relative gap allowed inside a double real root cluster
_CONDITION_SEP = 1e-4   # separation below which the quadratic multiset is ill conditioned


def quadratic_factors(n: RealPoly, tol: float = DEFAULT_TOL) -> list[RealPoly]:
    """Factor a monic nonnegative real polynomial into monic quadratics.

    Complex conjugate root pairs give irreducible quadratics; real roots must
    come in even multiplicity and are paired into (t - r)**2.  The result is a
    multiset sorted by coefficients.  A NumericalConditionWarning is emitted
    when two quadratic factors nearly coincide, since multiplicities are then
    ambiguous in floating point.
    """
    if n.is_zero:
        raise ValueError("zero polynomial")
    if abs(n.lead - 1.0) > 1e-8:
        raise ValueError("polynomial must be monic")
    deg = int(n.degree)
    if deg % 2 != 0:
        raise OddDegree(f"degree {deg} is odd")
    if deg == 0:
        return []
    roots = real_roots_complex(n)
    reals = sorted(float(r.real) for r in roots if abs(r.imag) <= _IM_TOL)
    uppers = sorted((r for r in roots if r.imag > _IM_TOL), key=lambda r: (r.real, r.imag))
    lowers = [r for r in roots if r.imag < -_IM_TOL]
    quads: list[RealPoly] = []
    reps: list[complex] = []
    for u in uppers:
        if not lowers:
            raise NotNonnegative("unpaired complex root, polynomial is not real or not nonnegative")
        j = int(np.argmin([abs(np.conj(u) - v) for v in lowers]))
        v = lowers.pop(j)
        b = -(u + v).real
        c0 = (u * v).real
        quads.append(RealPoly((c0, b, 1.0)))
        reps.append(complex((u.real + v.real) / 2.0, (u.imag - v.imag) / 2.0))
    if len(reals) % 2 != 0:
        raise NotNonnegative("a real root has odd multiplicity")
    for i in range(0, len(reals), 2):
        r1, r2 = reals[i], reals[i + 1]
        if abs(r1 - r2) > _PAIR_GAP * (1.0 + abs(r1)):
            raise NotNonnegative(f"real roots {r1:.6g} and {r2:.6g} cannot pair, odd multiplicities")
        quads.append(RealPoly((r1 * r2, -(r1 + r2), 1.0)))
        reps.append(complex((r1 + r2) / 2.0, 0.0))
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if abs(reps[i] - reps[j]) < _CONDITION_SEP:
                warnings.warn(
                    "nearly coinciding quadratic factors, multiplicities are ill conditioned",
                    NumericalConditionWarning,
                    stacklevel=2,
                )
                break
        else:
            continue
        break
    quads = _refine_quadratic_clusters(n, quads)
    quads.sort(key=lambda q: (round(q.coeff(1), 9), round(q.coeff(0), 9)))
    return quads


def _refine_quadratic_clusters(n: RealPoly, quads: list[RealPoly]) -> list[RealPoly]:
    """Newton polish of (possibly repeated) quadratic factors.

    Roots of multiplicity k carry an eps**(1/k) error out of the eigenvalue
    solver, so the clustering net is wide; a merge is kept only when the
    refined power m**k actually divides n, otherwise the originals stand.
    """
    clusters: list[list[RealPoly]] = []
    for q in quads:
        for cluster in clusters:
            if (q - cluster[0]).max_abs() <= 2e-2 * (1.0 + cluster[0].max_abs()):
                cluster.append(q)
                break
        else:
            clusters.append([q])
    out: list[RealPoly] = []
    for cluster in clusters:
        k = len(cluster)
        b0 = sum(q.coeff(1) for q in cluster) / k
        c0 = sum(q.coeff(0) for q in cluster) / k
        bc = np.array([b0, c0])
        for _ in range(40):
            m = RealPoly((bc[1], bc[0], 1.0))
            mk = RP_ONE
            for _ in range(k):
                mk = mk * m
            _, rem = n.divmod_by(mk)
            r = np.array([rem.coeff(i) for i in range(2 * k)])
            if np.max(np.abs(r)) <= 1e-14 * (1.0 + n.max_abs()):
                break
            jac = np.zeros((2 * k, 2))
            for col, delta in enumerate((np.array([1e-7, 0.0]), np.array([0.0, 1e-7]))):
                m2 = RealPoly((bc[1] + delta[1], bc[0] + delta[0], 1.0))
                mk2 = RP_ONE
                for _ in range(k):
                    mk2 = mk2 * m2
                _, rem2 = n.divmod_by(mk2)
                r2 = np.array([rem2.coeff(i) for i in range(2 * k)])
                jac[:, col] = (r2 - r) / 1e-7
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
            if not np.all(np.isfinite(step)) or np.linalg.norm(step) > 1.0:
                break
            bc = bc + step
            if np.linalg.norm(step) < 1e-15:
                break
        refined = RealPoly((bc[1], bc[0], 1.0))
        mk = RP_ONE
        for _ in range(k):
            mk = mk * refined
        _, rem = n.divmod_by(mk)
        before = _cluster_residual(n, cluster)
        if rem.max_abs() <= max(before, 1e-12 * (1.0 + n.max_abs())):
            out.extend([refined] * k)
        else:
            out.extend(cluster)
    return out


def _cluster_residual(n: RealPoly, cluster: list[RealPoly]) -> float:
    prod = RP_ONE
    for q in cluster:
        prod = prod * q
    _, rem = n.divmod_by(prod)
    return rem.max_abs()


def _divides_all(polys: list[RealPoly], d: RealPoly, tol: float) -> list[RealPoly] | None:
    quots = []
    for p in polys:
        q, r = p.divmod_by(d)
        if r.max_abs() > tol * (1.0 + p.max_abs()):
            return None
        quots.append(q)
    return quots


def common_real_factor(polys: list[RealPoly], tol: float = 1e-7) -> RealPoly:
    """Monic greatest common real polynomial divisor of the given polynomials.

    Candidates come from the quadratic factorization of the sum of squares,
    which every common real factor must divide twice.
    """
    work = [p for p in polys if not p.is_zero]
    if not work:
        raise ValueError("all component polynomials are zero")
    ssq = RP_ZERO
    for p in work:
        ssq = ssq + p * p
    ssq = ssq.monic()
    quads = quadratic_factors(ssq)
    groups: list[tuple[RealPoly, int]] = []
    for q in quads:
        for i, (rep, cnt) in enumerate(groups):
            if (q - rep).max_abs() <= 1e-6 * (1.0 + rep.max_abs()):
                groups[i] = (rep, cnt + 1)
                break
        else:
            groups.append((q, 1))
    g = RP_ONE
    for quad, mult in groups:
        b, c0 = quad.coeff(1), quad.coeff(0)
        disc = b * b - 4.0 * c0
        if disc > -_IM_TOL * (1.0 + abs(c0)):
            lin = RealPoly((b / 2.0, 1.0))  # t - r with r = -b/2
            budget = mult
            while budget > 0:
                quots = _divides_all(work, lin, tol)
                if quots is None:
                    break
                work = quots
                g = g * lin
                budget -= 1
        else:
            budget = mult // 2
            while budget > 0:
                quots = _divides_all(work, quad, tol)
                if quots is None:
                    break
                work = quots
                g = g * quad
                budget -= 1
    return g


def max_real_factor(p: DQPoly, tol: float = 1e-7) -> RealPoly:
    """Maximal monic real polynomial dividing the primal part of p.

    Intended for quaternion polynomials or primal parts; dual components of
    the argument are ignored.
    """
    if p.is_zero:
        raise ValueError("zero polynomial")
    return common_real_factor(p.primal_components(), tol)
