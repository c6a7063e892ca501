"""Linkage data model, forward kinematics, validation and exporters.

A linkage is a connected graph of rigid links joined by revolute or prismatic
joints, together with closure loops given as pairs of factor chains whose
products agree.  Forward kinematics evaluates each chain at a parameter; the
loop identities guarantee a consistent configuration for every parameter
value away from the real roots of the involved norm polynomials.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .config import DEFAULT_SAMPLE_COUNT, DEFAULT_SAMPLE_RANGE, DEFAULT_TOL
from .dualquat import (
    DQ_ONE,
    DualQuaternion,
    Rotation,
    act_on_point,
    classify_generator,
    normalize_pose,
    pose_distance,
)
from .errors import ClosureMismatch, NotPlanar, SingularParameter
from .polyring import DQPoly, RealPoly


@dataclass(frozen=True, eq=False)
class Joint:
    """Revolute or prismatic joint, labeled by the dual quaternion of its factor."""

    id: str
    generator: DualQuaternion
    kind: str


@dataclass(frozen=True, eq=False)
class Link:
    """Rigid body carrying one or more joints."""

    id: str
    joint_ids: frozenset[str]


@dataclass(frozen=True, eq=False)
class LinkGraph:
    """Links as vertices, shared joints as edges."""

    links: tuple[Link, ...]
    joints: tuple[Joint, ...]

    def link(self, link_id: str) -> Link:
        for l in self.links:
            if l.id == link_id:
                return l
        raise KeyError(link_id)

    def joint(self, joint_id: str) -> Joint:
        for j in self.joints:
            if j.id == joint_id:
                return j
        raise KeyError(joint_id)


@dataclass(frozen=True, eq=False)
class Linkage:
    """Link graph plus closure loops, ground link and optional tracer point."""

    graph: LinkGraph
    loops: tuple[tuple[tuple[str, ...], tuple[str, ...]], ...]
    ground: str
    orientations: tuple[tuple[str, str, str], ...]  # joint id, from link, to link
    tracer: tuple[str, tuple[float, float, float]] | None = None
    notes: tuple[str, ...] = ()

    def joint_links(self, joint_id: str) -> tuple[str, str]:
        for jid, a, b in self.orientations:
            if jid == joint_id:
                return a, b
        raise KeyError(joint_id)

    def with_notes(self, notes: tuple[str, ...]) -> "Linkage":
        return replace(self, notes=self.notes + notes)

    def norm_quadratics(self) -> list[RealPoly]:
        out = []
        for j in self.graph.joints:
            h = j.generator
            out.append(RealPoly((h.primal.norm(), -2.0 * h.primal.scalar(), 1.0)))
        return out


@dataclass(frozen=True, eq=False)
class ConfigurationSample:
    """Snapshot of the linkage at one parameter value."""

    t: float
    link_displacements: dict[str, DualQuaternion]
    joint_positions: dict[str, np.ndarray]
    max_loop_residual: float


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _chain_product(chain) -> DQPoly:
    out = DQPoly.of([1.0])
    for _, gen in chain:
        out = out * DQPoly.t_minus(gen)
    return out


def assemble(loops, ground: str | None = None, tracer=None, tol: float = DEFAULT_TOL) -> Linkage:
    """Build a linkage from closure loops given as pairs of joint chains.

    Each loop is a pair (left, right) of chains of (joint id, generator)
    traversed from the loop base to the far link.  Chains sharing a joint are
    welded consistently: the links on the incoming sides merge, and likewise
    the outgoing sides.  Raises ClosureMismatch when a chain pair does not
    multiply to the same polynomial.
    """
    gens: dict[str, DualQuaternion] = {}
    for left, right in loops:
        for jid, gen in list(left) + list(right):
            if jid in gens:
                if (gens[jid] - gen).max_abs() > 1e-9 * (1.0 + gen.max_abs()):
                    raise ValueError(f"joint {jid} appears with two different generators")
            else:
                gens[jid] = gen
    for i, (left, right) in enumerate(loops):
        lp = _chain_product(left)
        rp = _chain_product(right)
        residual = (lp - rp).max_abs()
        if residual > 1e-7 * (1.0 + lp.max_abs()):
            raise ClosureMismatch(f"loop {i}: chain products differ by {residual:.3e}")

    # Slots are the per-loop link positions; shared joints weld their incoming
    # slots together and their outgoing slots together.
    uf = _UnionFind()
    joint_sides: dict[str, list[tuple]] = {}
    for i, (left, right) in enumerate(loops):
        for chain_name, chain in (("l", left), ("r", right)):
            for pos, (jid, _) in enumerate(chain):
                before = (i, chain_name, pos)
                after = (i, chain_name, pos + 1)
                if pos == 0:
                    uf.union(before, (i, "l", 0))  # loop base shared by both chains
                if pos + 1 == len(chain):
                    uf.union(after, (i, "far"))
                joint_sides.setdefault(jid, []).append((before, after))
    for jid, sides in joint_sides.items():
        first_before, first_after = sides[0]
        for before, after in sides[1:]:
            uf.union(before, first_before)
            uf.union(after, first_after)

    class_joints: dict = {}
    orient: list[tuple[str, object, object]] = []
    for jid, sides in joint_sides.items():
        before, after = sides[0]
        a, b = uf.find(before), uf.find(after)
        if a == b:
            raise ClosureMismatch(f"joint {jid} would connect a link to itself")
        class_joints.setdefault(a, set()).add(jid)
        class_joints.setdefault(b, set()).add(jid)
        orient.append((jid, a, b))

    link_names: dict = {}
    for cls, jids in class_joints.items():
        link_names[cls] = "+".join(sorted(jids))
    links = tuple(
        Link(link_names[cls], frozenset(jids)) for cls, jids in sorted(
            class_joints.items(), key=lambda kv: link_names[kv[0]]
        )
    )
    joints = tuple(
        Joint(jid, gens[jid], classify_generator(gens[jid], tol).kind)
        for jid in sorted(gens)
    )
    orientations = tuple(
        (jid, link_names[a], link_names[b]) for jid, a, b in sorted(orient)
    )

    # connectivity of the link graph
    adj: dict[str, set[str]] = {l.id: set() for l in links}
    for _, a, b in orientations:
        adj[a].add(b)
        adj[b].add(a)
    seen = set()
    stack = [links[0].id]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        stack.extend(adj[cur] - seen)
    if len(seen) != len(links):
        raise ValueError("link graph is not connected")

    base_cls = uf.find((0, "l", 0))
    ground_id = link_names[base_cls] if ground is None else ground
    if ground_id not in adj:
        raise ValueError(f"unknown ground link {ground_id!r}")
    tracer_t = None
    if tracer is not None:
        link_id, point = tracer
        if link_id not in adj:
            raise ValueError(f"unknown tracer link {link_id!r}")
        tracer_t = (link_id, (float(point[0]), float(point[1]), float(point[2])))
    loops_t = tuple(
        (tuple(jid for jid, _ in left), tuple(jid for jid, _ in right))
        for left, right in loops
    )
    return Linkage(LinkGraph(links, joints), loops_t, ground_id, orientations, tracer_t)


def _guard_parameter(linkage: Linkage, t0: float, margin: float = 1e-3) -> None:
    if math.isinf(t0):
        return
    for quad in linkage.norm_quadratics():
        if abs(quad(t0)) < margin * (1.0 + t0 * t0):
            raise SingularParameter(f"t = {t0} is within {margin} of a norm polynomial root")


def _displacements(linkage: Linkage, t0: float) -> dict[str, DualQuaternion]:
    evals = {
        j.id: DQPoly.t_minus(j.generator).eval_at(t0) for j in linkage.graph.joints
    }
    neighbors: dict[str, list[tuple[str, str, bool]]] = {l.id: [] for l in linkage.graph.links}
    for jid, a, b in linkage.orientations:
        neighbors[a].append((b, jid, True))
        neighbors[b].append((a, jid, False))
    disp: dict[str, DualQuaternion] = {linkage.ground: DQ_ONE}
    stack = [linkage.ground]
    while stack:
        cur = stack.pop()
        for nxt, jid, forward in neighbors[cur]:
            if nxt in disp:
                continue
            g = evals[jid]
            disp[nxt] = disp[cur] * (g if forward else g.conj())
            stack.append(nxt)
    return disp


def sample_configuration(linkage: Linkage, t0: float, tol: float = DEFAULT_TOL) -> ConfigurationSample:
    """Forward kinematics at one parameter value.

    Link displacements are the chain prefix products relative to the ground
    link; joint positions are the axis anchor points in the world frame.
    """
    _guard_parameter(linkage, t0)
    raw = _displacements(linkage, t0)
    disp = {lid: normalize_pose(g, 1e-6).rep for lid, g in raw.items()}
    positions: dict[str, np.ndarray] = {}
    for jid, a, _ in linkage.orientations:
        gen = linkage.graph.joint(jid)
        anchor = classify_generator(gen.generator, 1e-6).anchor_point()
        positions[jid] = act_on_point(disp[a], anchor, 1e-6)
    worst = 0.0
    for left_ids, right_ids in linkage.loops:
        lp = DQ_ONE
        for jid in left_ids:
            lp = lp * DQPoly.t_minus(linkage.graph.joint(jid).generator).eval_at(t0)
        rp = DQ_ONE
        for jid in right_ids:
            rp = rp * DQPoly.t_minus(linkage.graph.joint(jid).generator).eval_at(t0)
        worst = max(worst, pose_distance(lp, rp, 1e-6))
    return ConfigurationSample(t0, disp, positions, worst)


def default_samples(linkage: Linkage, count: int = DEFAULT_SAMPLE_COUNT,
                    span: tuple[float, float] = DEFAULT_SAMPLE_RANGE,
                    margin: float = 1e-3) -> list[float]:
    """Equally spaced parameter samples nudged away from norm polynomial roots."""
    lo, hi = span
    quads = linkage.norm_quadratics()
    out = []
    for t in np.linspace(lo, hi, count):
        t = float(t)
        for _ in range(40):
            if all(abs(q(t)) >= margin * (1.0 + t * t) for q in quads):
                break
            t += 2.1 * margin
        out.append(t)
    return out


def _world_lines(linkage: Linkage, t0: float) -> dict[str, tuple[np.ndarray, np.ndarray] | None]:
    """World frame joint axes as (unit direction, point) pairs; None for prismatic joints."""
    raw = _displacements(linkage, t0)
    lines: dict[str, tuple[np.ndarray, np.ndarray] | None] = {}
    for jid, a, _ in linkage.orientations:
        gen = classify_generator(linkage.graph.joint(jid).generator, 1e-6)
        g = raw[a]
        if isinstance(gen, Rotation):
            p0 = act_on_point(g, gen.anchor_point(), 1e-6)
            p1 = act_on_point(g, gen.anchor_point() + gen.direction, 1e-6)
            lines[jid] = (p1 - p0, p0)
        else:
            lines[jid] = None
    return lines


def _line_distance_angle(l1, l2) -> tuple[float, float]:
    d1, a1 = l1
    d2, a2 = l2
    n1 = float(np.linalg.norm(d1))
    n2 = float(np.linalg.norm(d2))
    cr = np.cross(d1, d2)
    ncr = float(np.linalg.norm(cr))
    angle = math.atan2(ncr, abs(float(np.dot(d1, d2))))
    if ncr <= 1e-7 * n1 * n2:
        # parallel axes: the skew line formula would divide noise by noise
        dist = float(np.linalg.norm(np.cross(a2 - a1, d1))) / n1
    else:
        dist = abs(float(np.dot(a2 - a1, cr))) / ncr
    return dist, angle


@dataclass(frozen=True, eq=False)
class RigidityReport:
    """Per link maximal deviation of pairwise joint axis distances and angles."""

    per_link: dict[str, float]
    angle_notes: dict[str, float]
    max_deviation: float
    samples: tuple[float, ...]

    def passes(self, threshold: float = 1e-7) -> bool:
        return self.max_deviation <= threshold


def rigidity_check(linkage: Linkage, samples: list[float] | None = None) -> RigidityReport:
    """Check that joints sharing a link keep their mutual distance and angle.

    Joint axes are located through the chain displacements of their incoming
    links, so broken closure identities show up as varying distances.
    """
    if samples is None:
        samples = default_samples(linkage)
    per_sample_lines = []
    for t in samples:
        _guard_parameter(linkage, t)
        per_sample_lines.append(_world_lines(linkage, t))
    per_link: dict[str, float] = {}
    angle_notes: dict[str, float] = {}
    positions = {t: sample_configuration(linkage, t).joint_positions for t in samples}
    for link in linkage.graph.links:
        jids = sorted(link.joint_ids)
        dev = 0.0
        for i in range(len(jids)):
            for j in range(i + 1, len(jids)):
                dists, angles = [], []
                for lines in per_sample_lines:
                    l1, l2 = lines[jids[i]], lines[jids[j]]
                    if l1 is None or l2 is None:
                        continue
                    dist, ang = _line_distance_angle(l1, l2)
                    dists.append(dist)
                    angles.append(ang)
                if dists:
                    dev = max(dev, max(dists) - min(dists), max(angles) - min(angles))
        per_link[link.id] = dev
        if len(jids) >= 3:
            spread = 0.0
            for a in range(len(jids)):
                for b in range(len(jids)):
                    for c in range(b + 1, len(jids)):
                        if a in (b, c):
                            continue
                        vals = []
                        for t in samples:
                            pa = positions[t][jids[a]]
                            u = positions[t][jids[b]] - pa
                            v = positions[t][jids[c]] - pa
                            nu, nv = np.linalg.norm(u), np.linalg.norm(v)
                            if nu < 1e-12 or nv < 1e-12:
                                continue
                            vals.append(math.acos(max(-1.0, min(1.0, float(np.dot(u, v)) / (nu * nv)))))
                        if vals:
                            spread = max(spread, max(vals) - min(vals))
            angle_notes[link.id] = spread
    worst = max(per_link.values(), default=0.0)
    return RigidityReport(per_link, angle_notes, worst, tuple(samples))


def trajectory(linkage: Linkage, link_id: str, point, t_samples) -> np.ndarray:
    """Trajectory of a point rigidly attached to a link, one row per sample."""
    linkage.graph.link(link_id)
    pts = []
    for t in t_samples:
        _guard_parameter(linkage, t)
        disp = _displacements(linkage, t)
        pts.append(act_on_point(disp[link_id], point, 1e-6))
    return np.vstack(pts)


def linkage_to_json(linkage: Linkage) -> dict:
    data = {
        "joints": [
            {"id": j.id, "generator": list(j.generator.as_array()), "kind": j.kind}
            for j in linkage.graph.joints
        ],
        "links": [
            {"id": l.id, "joints": sorted(l.joint_ids)} for l in linkage.graph.links
        ],
        "loops": [
            {"left": list(left), "right": list(right)} for left, right in linkage.loops
        ],
        "ground": linkage.ground,
    }
    if linkage.tracer is not None:
        data["tracer"] = {"link": linkage.tracer[0], "point": list(linkage.tracer[1])}
    if linkage.notes:
        data["notes"] = list(linkage.notes)
    return data


def import_linkage(data: dict, tol: float = DEFAULT_TOL) -> Linkage:
    """Rebuild a linkage from its JSON form, revalidating all loop closures."""
    gens = {j["id"]: DualQuaternion.from_array(j["generator"]) for j in data["joints"]}
    loops = []
    for loop in data["loops"]:
        left = [(jid, gens[jid]) for jid in loop["left"]]
        right = [(jid, gens[jid]) for jid in loop["right"]]
        loops.append((left, right))
    tracer = None
    if "tracer" in data:
        tracer = (data["tracer"]["link"], tuple(data["tracer"]["point"]))
    linkage = assemble(loops, ground=data.get("ground"), tracer=tracer, tol=tol)
    want_links = {l["id"]: frozenset(l["joints"]) for l in data.get("links", [])}
    if want_links:
        got_links = {l.id: l.joint_ids for l in linkage.graph.links}
        if want_links != got_links:
            raise ClosureMismatch("stored link partition disagrees with the assembled one")
    if "notes" in data:
        linkage = linkage.with_notes(tuple(data["notes"]))
    return linkage


def _planar_frame(linkage: Linkage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    normal = None
    for j in linkage.graph.joints:
        gen = classify_generator(j.generator, 1e-6)
        if isinstance(gen, Rotation):
            if normal is None:
                normal = gen.direction
            elif float(np.linalg.norm(np.cross(normal, gen.direction))) > 1e-8:
                raise NotPlanar("rotation axes are not parallel")
        elif normal is not None and abs(float(np.dot(gen.direction, normal))) > 1e-8:
            raise NotPlanar("translation direction leaves the plane")
    if normal is None:
        raise NotPlanar("no rotation axis to define the drawing plane")
    if normal[int(np.argmax(np.abs(normal)))] < 0:
        normal = -normal
    helper = np.array([1.0, 0.0, 0.0])
    if abs(float(np.dot(helper, normal))) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    e1 = helper - float(np.dot(helper, normal)) * normal
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(normal, e1)
    return normal, e1, e2


def export(linkage: Linkage, format: str = "json", options: dict | None = None) -> bytes:
    """Serialize a linkage: json (lossless), svg (planar only) or csv of joint paths."""
    options = options or {}
    if format == "json":
        return json.dumps(linkage_to_json(linkage), indent=2).encode()
    samples = options.get("samples")
    if samples is None:
        samples = default_samples(linkage, options.get("sample_count", DEFAULT_SAMPLE_COUNT))
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["t", "joint_id", "x", "y", "z"])
        for t in samples:
            sample = sample_configuration(linkage, t)
            for jid in sorted(sample.joint_positions):
                x, y, z = sample.joint_positions[jid]
                writer.writerow([repr(t), jid, repr(float(x)), repr(float(y)), repr(float(z))])
        return buf.getvalue().encode()
    if format == "svg":
        return _export_svg(linkage, samples)
    raise ValueError(f"unknown export format {format!r}")


def _export_svg(linkage: Linkage, samples: list[float]) -> bytes:
    _, e1, e2 = _planar_frame(linkage)

    def project(p: np.ndarray) -> tuple[float, float]:
        return float(np.dot(p, e1)), float(np.dot(p, e2))

    joint_paths: dict[str, list[tuple[float, float]]] = {
        j.id: [] for j in linkage.graph.joints
    }
    tracer_path: list[tuple[float, float]] = []
    for t in samples:
        sample = sample_configuration(linkage, t)
        for jid, pos in sample.joint_positions.items():
            joint_paths[jid].append(project(pos))
        if linkage.tracer is not None:
            link_id, point = linkage.tracer
            disp = sample.link_displacements[link_id]
            tracer_path.append(project(act_on_point(disp, point, 1e-6)))
    all_pts = [p for path in joint_paths.values() for p in path] + tracer_path
    xs = [p[0] for p in all_pts]
    ys = [p[1] for p in all_pts]
    pad = 0.1 * max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    view = (min(xs) - pad, min(ys) - pad, max(xs) - min(xs) + 2 * pad, max(ys) - min(ys) + 2 * pad)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view[0]:.4f} {view[1]:.4f} '
        f'{view[2]:.4f} {view[3]:.4f}">'
    ]
    stroke = max(view[2], view[3]) / 300.0
    for jid, path in joint_paths.items():
        pts = " ".join(f"{x:.10g},{y:.10g}" for x, y in path)
        parts.append(
            f'<polyline class="joint-path" id="path-{jid}" points="{pts}" '
            f'fill="none" stroke="#888" stroke-width="{stroke:.4f}"/>'
        )
    if tracer_path:
        pts = " ".join(f"{x:.10g},{y:.10g}" for x, y in tracer_path)
        parts.append(
            f'<polyline class="tracer" points="{pts}" fill="none" '
            f'stroke="#d22" stroke-width="{1.5 * stroke:.4f}"/>'
        )
    first = sample_configuration(linkage, samples[0])
    for jid in sorted(first.joint_positions):
        x, y = project(first.joint_positions[jid])
        parts.append(
            f'<circle class="joint" id="joint-{jid}" cx="{x:.10g}" cy="{y:.10g}" '
            f'r="{2 * stroke:.4f}" fill="#225"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts).encode()
