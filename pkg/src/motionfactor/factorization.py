"""Factorization of motion polynomials into linear rotation and translation factors.

The generic path peels one linear factor per quadratic factor of the norm
polynomial; choosing the order of the quadratics enumerates all (generically
n!) factorizations.  Exceptional inputs, where the primal part has real
factors, lead to empty or infinite solution sets for single factors.  Planar
inputs are then solved exactly in a commutative complex subalgebra; other
inputs go through a budgeted depth first search over sampled solution
families with a one step lookahead.  When only revolute factors are
acceptable, real polynomial multipliers of bounded degree are tried in order.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import least_squares

from .config import DEFAULT_BUDGET, DEFAULT_FAMILY_SAMPLES, DEFAULT_TOL
from .dualquat import (
    DualQuaternion,
    Quaternion,
    Rotation,
    classify_generator,
)
from .errors import (
    ConstantRemainder,
    ExceptionalCase,
    NonInvertibleLeading,
    NotLinearMotion,
    Unbounded,
)
from .polyring import (
    DQPoly,
    MotionPolynomial,
    RP_ONE,
    RealPoly,
    max_real_factor,
    quadratic_factors,
    real_roots_complex,
    right_divide,
    validate_motion,
)

SUCCESS = "success"
NO_FACTORIZATION = "no_factorization"
NEEDS_MULTIPLIER = "needs_multiplier"


@dataclass(frozen=True, slots=True)
class Factorization:
    """Ordered linear factors with (t-h_1)...(t-h_n) = C * multiplier."""

    factors: tuple[DualQuaternion, ...]
    multiplier: RealPoly = RP_ONE

    def product(self) -> DQPoly:
        out = DQPoly.of([1.0])
        for h in self.factors:
            out = out * DQPoly.t_minus(h)
        return out

    def residual_against(self, c: DQPoly) -> float:
        target = c * self.multiplier
        prod = self.product()
        n = max(len(prod.coeffs), len(target.coeffs))
        return max(
            (prod.coeff(k) - target.coeff(k)).max_abs() for k in range(n)
        ) if n else 0.0

    def kinds(self) -> tuple[str, ...]:
        return tuple(classify_generator(h).kind for h in self.factors)

    def to_json(self) -> dict:
        return {
            "factors": [list(h.as_array()) for h in self.factors],
            "multiplier": list(self.multiplier.coeffs),
            "kinds": list(self.kinds()),
        }


@dataclass(frozen=True, slots=True)
class UniqueSolution:
    h: DualQuaternion


@dataclass(frozen=True, eq=False)
class SolutionFamily:
    """Affine family basepoint + sum(params[i] * basis[i]) of factor candidates.

    When satisfied is False the stated residual constraints cut a nonlinear
    subset out of the affine space instead of the whole space.
    """

    basepoint: DualQuaternion
    basis: tuple[DualQuaternion, ...]
    constraints: tuple[str, ...]
    satisfied: bool

    def at(self, params) -> DualQuaternion:
        h = self.basepoint
        for lam, b in zip(params, self.basis):
            h = h + b * float(lam)
        return h

    def params_of(self, h: DualQuaternion) -> np.ndarray:
        """Coordinates of the projection of h onto the family (orthonormal basis)."""
        delta = h.as_array() - self.basepoint.as_array()
        return np.array([np.dot(b.as_array(), delta) for b in self.basis])

    def distance_to(self, h: DualQuaternion) -> float:
        return float(np.linalg.norm((self.at(self.params_of(h)) - h).as_array()))


@dataclass(frozen=True, slots=True)
class NoSolution:
    residual: float
    reason: str


LinearSolutionSet = UniqueSolution | SolutionFamily | NoSolution


@dataclass(frozen=True, slots=True)
class FactorizationReport:
    status: str
    factorizations: tuple[Factorization, ...]
    multiplier: RealPoly = RP_ONE
    diagnostics: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "multiplier": list(self.multiplier.coeffs),
            "factorizations": [f.to_json() for f in self.factorizations],
            "diagnostics": list(self.diagnostics),
        }


@dataclass(frozen=True, slots=True)
class SearchSettings:
    tol: float = DEFAULT_TOL
    budget: int = DEFAULT_BUDGET
    family_samples: int = DEFAULT_FAMILY_SAMPLES
    seed: int = 0


def linear_zero(r: DQPoly, tol: float = DEFAULT_TOL) -> DualQuaternion:
    """Unique zero of a linear polynomial with invertible leading coefficient."""
    scale = 1.0 + r.max_abs()
    if r.degree < 1:
        raise ConstantRemainder("remainder is constant, no linear zero exists")
    r1 = r.coeff(1)
    if r1.primal.norm() <= tol * scale * scale:
        raise NonInvertibleLeading("leading coefficient of the remainder is not invertible")
    return -(r1.inverse() * r.coeff(0))


def _quadratic_of(h: DualQuaternion) -> RealPoly:
    """Monic real quadratic satisfied by a motion generator h."""
    return RealPoly((h.primal.norm(), -2.0 * h.primal.scalar(), 1.0))


def _group_quadratics(ms: list[RealPoly], tol: float = 1e-7) -> list[tuple[RealPoly, int]]:
    groups: list[tuple[RealPoly, int]] = []
    for m in ms:
        for i, (rep, cnt) in enumerate(groups):
            if (m - rep).max_abs() <= tol * (1.0 + rep.max_abs()):
                groups[i] = (rep, cnt + 1)
                break
        else:
            groups.append((m, 1))
    return groups


def factor_generic(c: MotionPolynomial, order: list[RealPoly] | None = None) -> Factorization:
    """Peel linear factors following the given order of norm quadratics.

    Each chosen quadratic is pulled from the right of the remaining quotient.
    The input must be monic; exceptional remainders raise ExceptionalCase.
    """
    if not c.is_monic():
        raise ValueError("factor_generic needs a monic motion polynomial")
    if order is None:
        order = quadratic_factors(c.norm.monic())
    d = c.poly
    factors: list[DualQuaternion] = []
    for m in order:
        _, r = right_divide(d, DQPoly.from_real(m))
        h = linear_zero(r)
        factors.insert(0, h)
        d, rem = right_divide(d, DQPoly.t_minus(h))
        if rem.max_abs() > 1e-6 * (1.0 + c.poly.max_abs()):
            raise ExceptionalCase("division by the computed linear factor left a remainder")
    return Factorization(tuple(factors))


def _distinct_orders(groups: list[tuple[RealPoly, int]]) -> list[list[RealPoly]]:
    labels: list[int] = []
    for idx, (_, cnt) in enumerate(groups):
        labels.extend([idx] * cnt)
    seen = sorted(set(itertools.permutations(labels)))
    return [[groups[i][0] for i in perm] for perm in seen]


def _factor_sort_key(f: Factorization):
    return tuple(tuple(round(v, 9) for v in h.as_array()) for h in f.factors)


def _dedupe_factorizations(fs: list[Factorization], tol: float = 1e-7) -> list[Factorization]:
    out: list[Factorization] = []
    for f in fs:
        dup = False
        for g in out:
            if len(f.factors) != len(g.factors):
                continue
            if all((a - b).max_abs() <= tol for a, b in zip(f.factors, g.factors)):
                dup = True
                break
        if not dup:
            out.append(f)
    out.sort(key=_factor_sort_key)
    return out


def all_factorizations(c: MotionPolynomial) -> list[Factorization]:
    """All factorizations reachable by permuting the norm quadratics."""
    groups = _group_quadratics(quadratic_factors(c.norm.monic()))
    found = [factor_generic(c, order) for order in _distinct_orders(groups)]
    return _dedupe_factorizations(found)


# ---------------------------------------------------------------------------
# Single linear factor with prescribed norm quadratic
# ---------------------------------------------------------------------------

def _lmat4(q: Quaternion) -> np.ndarray:
    w, x, y, z = q.w, q.x, q.y, q.z
    return np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ])


def _lmat8(h: DualQuaternion) -> np.ndarray:
    out = np.zeros((8, 8))
    p = _lmat4(h.primal)
    out[:4, :4] = p
    out[4:, 4:] = p
    out[4:, :4] = _lmat4(h.dual)
    return out


def _solve_affine(a: np.ndarray, b: np.ndarray, scale: float):
    """Minimum norm solution and orthonormal nullspace basis of a*h = b."""
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        return np.zeros(a.shape[1]), np.zeros((0, a.shape[1])), float("inf")
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    cutoff = max(s[0] * 1e-11 if s.size else 0.0, 1e-11 * scale)
    rank = int(np.sum(s > cutoff))
    h0 = vt[:rank].T @ ((u[:, :rank].T @ b) / s[:rank]) if rank else np.zeros(a.shape[1])
    nullspace = vt[rank:]
    residual = float(np.linalg.norm(a @ h0 - b))
    return h0, nullspace, residual


def _factor_system(c: DQPoly, m: RealPoly) -> tuple[np.ndarray, np.ndarray, float]:
    """Linear system on the 8 coordinates of a factor zero with norm quadratic m.

    A remainder that is negligible relative to c means m divides c exactly;
    the division rows are then dropped instead of solving against noise.
    """
    s = -m.coeff(1) / 2.0
    n = m.coeff(0)
    _, r = right_divide(c, DQPoly.from_real(m))
    r1, r0 = r.coeff(1), r.coeff(0)
    scale = 1.0 + max(r1.max_abs(), r0.max_abs(), abs(s), abs(n))
    e0 = np.zeros(8)
    e0[0] = 1.0
    e4 = np.zeros(8)
    e4[4] = 1.0
    trace_rows = np.vstack([e0, e4])
    trace_rhs = np.array([s, 0.0])
    rem_size = max(r1.max_abs(), r0.max_abs())
    if rem_size <= 1e-8 * (1.0 + c.max_abs()):
        return trace_rows, trace_rhs, scale
    a = np.vstack([_lmat8(r1), trace_rows])
    b = np.concatenate([-r0.as_array(), trace_rhs])
    return a, b, scale


def solve_linear_factor(
    c: DQPoly, m: RealPoly, tol: float = DEFAULT_TOL
) -> LinearSolutionSet:
    """All h with norm quadratic m and right_eval(c, h) = 0.

    Reduces c modulo m to a linear remainder, solves the resulting linear
    system over the 8 coordinates of h together with the trace conditions,
    and intersects with the quadratic norm and Study conditions.  Conditions
    that restrict the solution space affinely are folded back into the linear
    system; truly quadratic residual conditions are reported on the family.
    """
    if m.degree != 2:
        raise ValueError("norm factor must be quadratic")
    if abs(m.lead - 1.0) > 1e-8:
        raise ValueError("norm factor must be monic")
    s = -m.coeff(1) / 2.0
    n = m.coeff(0)
    a, b, scale = _factor_system(c, m)
    feas_tol = 1e-7 * scale

    constraints: tuple[str, ...] = ()
    for _ in range(4):
        h0, nullspace, residual = _solve_affine(a, b, scale)
        if residual > feas_tol:
            return NoSolution(residual, "linear system is inconsistent")
        d = nullspace.shape[0]
        vp = nullspace[:, :4]
        vd = nullspace[:, 4:]
        # residual conditions restricted to the affine space, as quadratics in
        # the family parameters lam
        c1 = float(h0[:4] @ h0[:4] - n)
        l1 = 2.0 * vp @ h0[:4]
        q1 = vp @ vp.T
        c2 = float(h0[:4] @ h0[4:])
        l2 = vp @ h0[4:] + vd @ h0[:4]
        q2 = 0.5 * (vp @ vd.T + vd @ vp.T)
        conds = [("primal norm", c1, l1, q1), ("study condition", c2, l2, q2)]
        if d == 0:
            bad = max(abs(c1), abs(c2))
            if bad > feas_tol:
                return NoSolution(bad, "norm or Study condition violated")
            return UniqueSolution(DualQuaternion.from_array(h0))
        added = False
        residual_constraints: list[str] = []
        for name, c0, lin, quad in conds:
            qn = float(np.linalg.norm(quad))
            ln = float(np.linalg.norm(lin))
            if qn <= feas_tol and ln <= feas_tol:
                if abs(c0) > feas_tol:
                    return NoSolution(abs(c0), f"{name} cannot be met on the solution space")
            elif qn <= feas_tol:
                # affine condition: fold into the linear system and resolve
                row = lin @ nullspace
                a = np.vstack([a, row])
                b = np.concatenate([b, [row @ h0 - c0]])
                added = True
            else:
                residual_constraints.append(name)
        if not added:
            constraints = tuple(residual_constraints)
            break

    satisfied = not constraints
    if satisfied:
        lam, *_ = np.linalg.lstsq(vd.T, -h0[4:], rcond=None)
        basepoint = DualQuaternion.from_array(h0 + nullspace.T @ lam)
    else:
        basepoint = _canonical_variety_point(s, n)
    basis = tuple(DualQuaternion.from_array(v) for v in nullspace)
    return SolutionFamily(basepoint, basis, constraints, satisfied)


def _canonical_variety_point(s: float, n: float) -> DualQuaternion:
    rho = math.sqrt(max(n - s * s, 0.0))
    return DualQuaternion(Quaternion(s, 0.0, 0.0, rho))


# ---------------------------------------------------------------------------
# Backtracking search
# ---------------------------------------------------------------------------

@dataclass
class _SearchState:
    target: DQPoly
    budget: int
    nodes: int = 0
    truncated: bool = False
    family_seen: bool = False
    results: list[Factorization] = field(default_factory=list)

    def spend(self) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            self.truncated = True
            return False
        return True


def _remaining_after(groups: list[tuple[RealPoly, int]], idx: int) -> list[tuple[RealPoly, int]]:
    out = []
    for i, (m, cnt) in enumerate(groups):
        cnt = cnt - 1 if i == idx else cnt
        if cnt > 0:
            out.append((m, cnt))
    return out


def _probe_residual(quot: DQPoly, m: RealPoly, tol: float) -> np.ndarray:
    """Infeasibility vector of extending the factorization of quot with norm m."""
    s = -m.coeff(1) / 2.0
    n = m.coeff(0)
    if quot.degree <= 1:
        h = -quot.coeff(0)
        quad = _quadratic_of(h)
        return np.array([
            h.dual.scalar(),
            h.primal.dot(h.dual),
            quad.coeff(0) - n,
            quad.coeff(1) - m.coeff(1),
        ])
    a, b, scale = _factor_system(quot, m)
    h0, _, res = _solve_affine(a, b, scale)
    if not math.isfinite(res):
        return np.full(12, 1e9)
    residual = a @ h0 - b
    if a.shape[0] == 2:
        # m divides quot exactly: a factor with this norm always splits off
        return np.zeros(1)
    return np.concatenate([
        residual,
        [h0[:4] @ h0[:4] - n, h0[:4] @ h0[4:]],
    ])


def _direction_starts(d: DQPoly) -> list[np.ndarray]:
    """Candidate rotation axis directions suggested by the coefficient structure."""
    dirs = [np.array([0.0, 0.0, 1.0])]
    vecs = []
    for coeff in d.coeffs:
        for v in (coeff.primal.vec(), coeff.dual.vec()):
            ln = np.linalg.norm(v)
            if ln > 1e-9:
                vecs.append(v / ln)
    for i in range(len(vecs)):
        for j in range(i + 1, len(vecs)):
            cr = np.cross(vecs[i], vecs[j])
            ln = np.linalg.norm(cr)
            if ln > 1e-6:
                vecs.append(cr / ln)
                dirs.append(cr / ln)
        if len(dirs) > 6:
            break
    uniq: list[np.ndarray] = []
    for v in dirs:
        if all(min(np.linalg.norm(v - u), np.linalg.norm(v + u)) > 1e-6 for u in uniq):
            uniq.append(v)
    return uniq


def _family_objective(d: DQPoly, fam: SolutionFamily, m: RealPoly, m_next: RealPoly | None, tol: float):
    scale = 1.0 + d.max_abs()
    s = -m.coeff(1) / 2.0
    n = m.coeff(0)

    def resid(lam: np.ndarray) -> np.ndarray:
        h = fam.at(lam)
        parts = [
            np.array([h.primal.norm() - n, 2.0 * h.primal.scalar() - 2.0 * s,
                      h.primal.dot(h.dual), h.dual.scalar()]) / scale
        ]
        quot, rem = right_divide(d, DQPoly.t_minus(h))
        rem_arr = rem.coeff(0).as_array() if not rem.is_zero else np.zeros(8)
        parts.append(rem_arr / scale)
        if m_next is not None:
            parts.append(_probe_residual(quot, m_next, tol) / scale)
        out = np.concatenate(parts)
        if not np.all(np.isfinite(out)):
            # overflow from far away parameters: steer the optimizer back
            return np.full(out.shape, 1e9)
        return out

    return resid


def _family_candidates(
    d: DQPoly,
    m: RealPoly,
    fam: SolutionFamily,
    remaining: list[tuple[RealPoly, int]],
    settings: SearchSettings,
    state: "_SearchState | None" = None,
) -> list[DualQuaternion]:
    """Representatives of a solution family worth branching on.

    Solutions of a one step lookahead (parameters for which the next level
    stays feasible) come first, then the canonical minimum dual norm point,
    then a few deterministic samples.
    """
    dim = len(fam.basis)
    if dim == 0:
        return [fam.basepoint]
    scale = 1.0 + d.max_abs()
    rng = np.random.default_rng(settings.seed + 1)

    # near field starts first: the lookahead objective can decay toward
    # infinity along the family, which makes far starts useless decoys
    starts: list[np.ndarray] = [np.zeros(dim)]
    s = -m.coeff(1) / 2.0
    n = m.coeff(0)
    if not fam.satisfied:
        for direction in _direction_starts(d):
            for sign in (1.0, -1.0):
                u = DualQuaternion(
                    Quaternion(s, *(sign * math.sqrt(max(n - s * s, 0.0)) * direction))
                )
                starts.append(fam.params_of(u))
    for step in (0.5, 1.0, 2.0 * scale):
        for i in range(dim):
            for sign in (1.0, -1.0):
                lam = np.zeros(dim)
                lam[i] = sign * step
                starts.append(lam)
    if dim > 3:
        starts.extend(rng.normal(scale=scale, size=(8, dim)))

    candidates: list[DualQuaternion] = []
    targets: list[RealPoly | None]
    if remaining:
        targets = [mn for mn, _ in remaining]
    else:
        targets = [None]
    for m_next in targets:
        objective = _family_objective(d, fam, m, m_next, settings.tol)
        found = 0
        for lam0 in starts:
            # parameter solves are the expensive part of the search, so they
            # count against the node budget as well
            if state is not None and not state.spend():
                return candidates
            res = least_squares(objective, lam0, xtol=3e-16, ftol=3e-16, gtol=None, max_nfev=120)
            if float(np.linalg.norm(res.fun)) <= 1e-9:
                candidates.append(fam.at(res.x))
                found += 1
                if found >= 2 + settings.family_samples:
                    break

    if fam.satisfied:
        candidates.append(fam.basepoint)
        for i in range(settings.family_samples):
            lam = np.zeros(dim)
            lam[i % dim] = (0.5 + 0.5 * (i // dim)) * scale * (1 if i % 2 == 0 else -1)
            candidates.append(fam.at(lam))

    uniq: list[DualQuaternion] = []
    for h in candidates:
        if all((h - g).max_abs() > 1e-7 * scale for g in uniq):
            uniq.append(h)
    return uniq


def _record(state: _SearchState, factors: list[DualQuaternion], tol: float) -> None:
    f = Factorization(tuple(factors))
    if f.residual_against(state.target) <= 1e-5 * (1.0 + state.target.max_abs()):
        state.results.append(f)


def _dfs(
    d: DQPoly,
    groups: list[tuple[RealPoly, int]],
    acc: list[DualQuaternion],
    state: _SearchState,
    settings: SearchSettings,
) -> None:
    if state.truncated:
        return
    if d.degree <= 0:
        if not groups:
            _record(state, acc, settings.tol)
        return
    if d.degree == 1:
        _record(state, [-d.coeff(0)] + acc, settings.tol)
        return
    for idx, (m, _) in enumerate(groups):
        sol = solve_linear_factor(d, m, settings.tol)
        remaining = _remaining_after(groups, idx)
        if isinstance(sol, NoSolution):
            continue
        if isinstance(sol, UniqueSolution):
            candidates = [sol.h]
        else:
            state.family_seen = True
            candidates = _family_candidates(d, m, sol, remaining, settings, state)
        for h in candidates:
            if not state.spend():
                return
            quot, rem = right_divide(d, DQPoly.t_minus(h))
            if rem.max_abs() > 1e-6 * (1.0 + d.max_abs()):
                continue
            _dfs(quot, remaining, [h] + acc, state, settings)


# ---------------------------------------------------------------------------
# Planar subalgebra: exact factorization via complex linear algebra
# ---------------------------------------------------------------------------

def _planar_frame_of(d: DQPoly, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray, np.ndarray] | None:
    """Orthonormal frame (u, v, n) of a planar polynomial, or None.

    Planar means every primal vector part is parallel to the common axis
    direction n, every dual part is a vector in the plane orthogonal to n,
    and no dual part has a scalar component.
    """
    scale = 1.0 + d.max_abs()
    prim, dual = [], []
    for c in d.coeffs:
        if abs(c.dual.scalar()) > tol * scale:
            return None
        pv = c.primal.vec()
        qv = c.dual.vec()
        if np.linalg.norm(pv) > tol * scale:
            prim.append(pv)
        if np.linalg.norm(qv) > tol * scale:
            dual.append(qv)
    n = None
    if prim:
        n = prim[0] / np.linalg.norm(prim[0])
    else:
        for i in range(len(dual)):
            for j in range(i + 1, len(dual)):
                cr = np.cross(dual[i], dual[j])
                if np.linalg.norm(cr) > tol * scale * scale:
                    n = cr / np.linalg.norm(cr)
                    break
            if n is not None:
                break
        if n is None and dual:
            w0 = dual[0] / np.linalg.norm(dual[0])
            helper = np.array([0.0, 0.0, 1.0])
            if abs(float(np.dot(helper, w0))) > 0.9:
                helper = np.array([0.0, 1.0, 0.0])
            n = helper - float(np.dot(helper, w0)) * w0
            n = n / np.linalg.norm(n)
    if n is None:
        return None
    for pv in prim:
        if np.linalg.norm(np.cross(n, pv)) > tol * scale:
            return None
    for qv in dual:
        if abs(float(np.dot(n, qv))) > tol * scale:
            return None
    helper = np.array([1.0, 0.0, 0.0])
    if abs(float(np.dot(helper, n))) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    u = helper - float(np.dot(helper, n)) * n
    u = u / np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v, n


def _refine_root_clusters(pcode: np.ndarray, roots: np.ndarray) -> list[complex]:
    """Cluster equal roots of a complex polynomial and polish each by Newton.

    pcode holds ascending coefficients.  Multiple roots are refined against
    the remainder of the polynomial modulo (t - z)**k.
    """
    clusters: list[list[complex]] = []
    for r in sorted(roots, key=lambda z: (round(z.real, 6), round(z.imag, 6))):
        for cl in clusters:
            if abs(r - cl[0]) <= 2e-2 * (1.0 + abs(cl[0])):
                cl.append(r)
                break
        else:
            clusters.append([complex(r)])
    out: list[complex] = []
    for cl in clusters:
        k = len(cl)
        z = sum(cl) / k
        if k > 1:
            def rem_of(zz: complex) -> np.ndarray:
                divisor = np.array([1.0])
                for _ in range(k):
                    divisor = np.convolve(divisor, np.array([1.0, -zz]))
                _, rem = np.polydiv(pcode[::-1], divisor)
                return rem
            for _ in range(40):
                r0 = rem_of(z)
                if np.max(np.abs(r0)) <= 1e-14 * (1.0 + np.max(np.abs(pcode))):
                    break
                h = 1e-7
                jac = (rem_of(z + h) - r0) / h
                jac_i = (rem_of(z + 1j * h) - r0) / h
                a = np.column_stack([
                    np.concatenate([jac.real, jac.imag]),
                    np.concatenate([jac_i.real, jac_i.imag]),
                ])
                b = -np.concatenate([r0.real, r0.imag])
                step, *_ = np.linalg.lstsq(a, b, rcond=None)
                if not np.all(np.isfinite(step)) or np.linalg.norm(step) > 1.0:
                    break
                z = z + complex(step[0], step[1])
                if np.linalg.norm(step) < 1e-15:
                    break
        out.extend([z] * k)
    return out


def _distinct_sequences(values: list[complex]) -> list[list[complex]]:
    labels: list[int] = []
    reps: list[complex] = []
    for z in values:
        for i, r in enumerate(reps):
            if abs(z - r) <= 1e-9 * (1.0 + abs(r)):
                labels.append(i)
                break
        else:
            reps.append(z)
            labels.append(len(reps) - 1)
    seqs = sorted(set(itertools.permutations(labels)))
    return [[reps[i] for i in seq] for seq in seqs]


def _lex_min_dual(w0: np.ndarray, nullspace: np.ndarray) -> np.ndarray:
    """Pick the family member minimizing dual norms from the last factor backwards."""
    w = w0.copy()
    basis = nullspace.copy()  # shape (d, m), rows are basis vectors
    scale = 1.0 + float(np.max(np.abs(w))) if w.size else 1.0
    for j in range(len(w) - 1, -1, -1):
        if basis.shape[0] == 0:
            break
        row = basis[:, j]
        rn = float(np.linalg.norm(row))
        if rn <= 1e-9 * scale:
            continue  # remaining freedom cannot move this coordinate
        lam = -w[j] * np.conj(row) / (rn * rn)
        w = w + basis.T @ lam
        _, _, vt = np.linalg.svd(row.reshape(1, -1))
        keep = vt[1:]
        basis = keep.conj() @ basis if keep.size else np.zeros((0, len(w)), dtype=complex)
    return w


def _factor_planar(
    d: DQPoly,
    frame: tuple[np.ndarray, np.ndarray, np.ndarray],
    state: "_SearchState",
    settings: SearchSettings,
) -> None:
    """Exact factorization of a monic planar polynomial.

    In the plane the problem is commutative: the primal parts are the complex
    roots of the primal code in some order, and the dual parts solve a square
    complex linear system.  Inconsistent orderings are skipped; singular but
    consistent systems yield solution families sampled like the search does.
    """
    u, v, n = frame
    m = int(d.degree)
    pcode = np.array([
        complex(c.primal.scalar(), float(np.dot(c.primal.vec(), n))) for c in d.coeffs
    ])
    qcode = np.array([
        complex(float(np.dot(c.dual.vec(), u)), -float(np.dot(c.dual.vec(), v)))
        for c in d.coeffs
    ])
    roots = np.roots(pcode[::-1])
    zs = _refine_root_clusters(pcode, roots)
    rhs = -qcode[:m]
    if len(rhs) < m:
        rhs = np.concatenate([rhs, np.zeros(m - len(rhs), dtype=complex)])
    scale = 1.0 + float(np.max(np.abs(qcode))) if len(qcode) else 1.0
    for seq in _distinct_sequences(zs):
        if not state.spend():
            return
        cols = []
        for j in range(m):
            poly = np.array([1.0 + 0.0j])
            for l in range(m):
                if l == j:
                    continue
                zl = np.conj(seq[l]) if l < j else seq[l]
                poly = np.convolve(poly, np.array([-zl, 1.0]))
            if len(poly) < m:
                poly = np.concatenate([poly, np.zeros(m - len(poly), dtype=complex)])
            cols.append(poly[:m])
        mat = np.column_stack(cols)
        w0, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        if np.linalg.norm(mat @ w0 - rhs) > 1e-8 * scale:
            continue
        _, svals, vt = np.linalg.svd(mat)
        rank = int(np.sum(svals > max(svals[0] * 1e-11, 1e-11 * scale)))
        nullspace = vt[rank:].conj()
        w_candidates = [_lex_min_dual(w0, nullspace)]
        if nullspace.shape[0] > 0:
            state.family_seen = True
            base = w_candidates[0]
            for i in range(settings.family_samples):
                row = nullspace[i % nullspace.shape[0]]
                step = (0.5 + 0.5 * (i // nullspace.shape[0])) * scale
                w_candidates.append(base + step * (1j ** i) * row)
        for w in w_candidates:
            factors = []
            for zj, wj in zip(seq, w):
                primal = Quaternion(zj.real, *(zj.imag * n))
                dvec = wj.real * u - wj.imag * v
                factors.append(DualQuaternion(primal, Quaternion(0.0, *dvec)))
            _record(state, factors, settings.tol)


def _refine_factors(factors: tuple[DualQuaternion, ...], target: DQPoly) -> tuple[DualQuaternion, ...]:
    """Polish a factor chain so the reconstruction holds to machine precision."""
    k = len(factors)
    x0 = np.concatenate([h.as_array() for h in factors])
    scale = 1.0 + target.max_abs()

    def resid(x: np.ndarray) -> np.ndarray:
        hs = [DualQuaternion.from_array(x[8 * i: 8 * i + 8]) for i in range(k)]
        prod = Factorization(tuple(hs)).product()
        diff = prod - target
        parts = [np.concatenate([c.as_array() for c in diff.coeffs]) if not diff.is_zero else np.zeros(1)]
        parts.append(np.array([h.dual.scalar() for h in hs]))
        parts.append(np.array([h.primal.dot(h.dual) for h in hs]))
        return np.concatenate(parts) / scale

    before = float(np.linalg.norm(resid(x0)))
    if before <= 1e-12:
        return factors
    res = least_squares(resid, x0, xtol=3e-16, ftol=3e-16, gtol=None, max_nfev=80)
    if float(np.linalg.norm(res.fun)) >= before:
        return factors
    return tuple(DualQuaternion.from_array(res.x[8 * i: 8 * i + 8]) for i in range(k))


def _ensure_monic(c: MotionPolynomial, diagnostics: list[str], tol: float) -> MotionPolynomial:
    if c.is_monic(tol):
        return c
    monic, _ = c.monicize(tol)
    diagnostics.append("input normalized to a monic polynomial by splitting off the leading coefficient")
    return monic


def factor_with_backtracking(
    c: MotionPolynomial, settings: SearchSettings | None = None
) -> FactorizationReport:
    """Depth first search over norm quadratic orders and solution families.

    Collects every distinct full linear factorization found within the node
    budget.  Encountered solution families are sampled (canonical
    representative, lookahead solutions, and a few deterministic samples), so
    an infinite solution set yields finitely many representatives.
    """
    st = settings or SearchSettings()
    diagnostics: list[str] = []
    cm = _ensure_monic(c, diagnostics, st.tol)
    state = _SearchState(target=cm.poly, budget=st.budget)
    frame = _planar_frame_of(cm.poly)
    if frame is not None:
        # planar inputs reduce to commutative complex algebra and are solved
        # exactly, covering the exceptional cases with real primal factors
        diagnostics.append("planar input solved in the complex subalgebra")
        _factor_planar(cm.poly, frame, state, st)
    else:
        ms = quadratic_factors(cm.norm.monic(), st.tol)
        groups = _group_quadratics(ms)
        _dfs(cm.poly, groups, [], state, st)
    polished = [
        Factorization(_refine_factors(f.factors, cm.poly)) for f in state.results
    ]
    facts = _dedupe_factorizations(polished)
    if state.family_seen:
        diagnostics.append(
            "solution families encountered: infinitely many factorizations exist, "
            "returned factorizations sample them"
        )
    if state.truncated:
        diagnostics.append(f"node budget {st.budget} exhausted after {state.nodes} nodes")
    if facts:
        return FactorizationReport(SUCCESS, tuple(facts), RP_ONE, tuple(diagnostics))
    if state.truncated:
        return FactorizationReport(NEEDS_MULTIPLIER, (), RP_ONE, tuple(diagnostics))
    diagnostics.append("search tree exhausted without a full factorization")
    return FactorizationReport(NO_FACTORIZATION, (), RP_ONE, tuple(diagnostics))


def is_bounded(c: MotionPolynomial) -> bool:
    """True when the norm polynomial has no real roots, so all trajectories stay bounded."""
    roots = real_roots_complex(c.norm)
    return not any(abs(r.imag) <= 1e-6 * (1.0 + abs(r)) for r in roots)


def _multiplier_candidates(base_quads: list[RealPoly], max_deg: int) -> list[RealPoly]:
    """Candidate real multipliers: 1, single factors, products, then squares."""
    cands: list[tuple[tuple[int, int, tuple[float, ...]], RealPoly]] = []
    for expo in itertools.product(range(3), repeat=len(base_quads)):
        deg = 2 * sum(expo)
        if deg == 0 or deg > 2 * max_deg:
            continue
        has_square = int(any(e >= 2 for e in expo))
        if not has_square and deg > max_deg and sum(expo) > 1:
            continue
        r = RP_ONE
        for e, q in zip(expo, base_quads):
            for _ in range(e):
                r = r * q
        cands.append(((has_square, deg, tuple(r.coeffs)), r))
    cands.sort(key=lambda kv: kv[0])
    return [RP_ONE] + [r for _, r in cands]


def factor_bounded_with_multiplier(
    c: MotionPolynomial,
    max_deg: int | None = None,
    settings: SearchSettings | None = None,
) -> FactorizationReport:
    """Search for a real multiplier R so that c * R factors into rotations only.

    Candidates are ordered by degree: the trivial multiplier, then the
    irreducible quadratic factors of the real part of the primal, their
    products, and finally products with squared factors.
    """
    st = settings or SearchSettings()
    diagnostics: list[str] = []
    cm = _ensure_monic(c, diagnostics, st.tol)
    if not is_bounded(cm):
        raise Unbounded("norm polynomial has real roots, trajectories are unbounded")
    w = max_real_factor(cm.poly)
    max_deg = int(w.degree) if max_deg is None else max_deg
    base_quads = []
    if w.degree >= 2:
        base_quads = [q for q, _ in _group_quadratics(quadratic_factors(w.monic()))]
    candidates = _multiplier_candidates(base_quads, max(max_deg, 0))
    diagnostics.append(
        "candidate multipliers: " + "; ".join(str(list(r.coeffs)) for r in candidates)
    )
    for r in candidates:
        target = validate_motion(cm.poly * r, st.tol)
        rep = factor_with_backtracking(target, st)
        rotations_only = []
        for f in rep.factorizations:
            try:
                if all(isinstance(classify_generator(h, 1e-6), Rotation) for h in f.factors):
                    rotations_only.append(replace(f, multiplier=r))
            except NotLinearMotion:
                continue
        if rotations_only:
            diagnostics.extend(rep.diagnostics)
            diagnostics.append(f"multiplier {list(r.coeffs)} succeeded")
            return FactorizationReport(
                SUCCESS, tuple(rotations_only), r, tuple(diagnostics)
            )
        diagnostics.append(f"multiplier {list(r.coeffs)} failed: {rep.status}")
    diagnostics.append("no candidate multiplier produced a rotation only factorization")
    return FactorizationReport(NEEDS_MULTIPLIER, (), RP_ONE, tuple(diagnostics))


def factor_quaternion(p: DQPoly, tol: float = DEFAULT_TOL) -> Factorization:
    """Factor a monic quaternion polynomial into linear quaternion factors.

    When a norm quadratic divides the polynomial exactly, the canonical split
    with zero at s + sqrt(n - s**2) * k is used.
    """
    scale = 1.0 + p.max_abs()
    if max((q.max_abs() for q in p.dual_components()), default=0.0) > tol * scale:
        raise ValueError("polynomial has nonzero dual part, not a quaternion polynomial")
    if not p.is_monic(tol):
        raise ValueError("polynomial must be monic")
    norm = RealPoly()
    for comp in p.primal_components():
        norm = norm + comp * comp
    d = p
    factors: list[DualQuaternion] = []
    for m in quadratic_factors(norm.monic(), tol):
        _, r = right_divide(d, DQPoly.from_real(m))
        if r.max_abs() <= 1e-8 * scale:
            u = _canonical_variety_point(-m.coeff(1) / 2.0, m.coeff(0))
            h = u.conj()
        else:
            h = linear_zero(r, tol)
        factors.insert(0, h)
        d, rem = right_divide(d, DQPoly.t_minus(h))
        if rem.max_abs() > 1e-6 * scale:
            raise ExceptionalCase("division by the computed linear factor left a remainder")
    return Factorization(tuple(factors))


def right_multiply_and_factor(
    c: MotionPolynomial, h_poly: DQPoly, settings: SearchSettings | None = None
) -> FactorizationReport:
    """Factor c * H for a user supplied monic quaternion polynomial H.

    C and C*H parametrize different motions, but the fixed points of H retain
    their trajectories, which is what makes the construction useful for
    drawing curves.
    """
    st = settings or SearchSettings()
    scale = 1.0 + h_poly.max_abs()
    if max((q.max_abs() for q in h_poly.dual_components()), default=0.0) > st.tol * scale:
        raise ValueError("right multiplier must be a quaternion polynomial")
    if not h_poly.is_monic(st.tol):
        raise ValueError("right multiplier must be monic")
    target = validate_motion(c.poly * h_poly, st.tol)
    rep = factor_with_backtracking(target, st)
    note = (
        "factored the right multiplied polynomial; fixed points of the right "
        "multiplier retain their trajectories"
    )
    return replace(rep, diagnostics=(note,) + rep.diagnostics)
