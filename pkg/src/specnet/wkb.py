"""Numerically traced spectral networks for polynomial spectral curves.

A curve P(z, w) = 0, monic of degree n in w, defines an n-sheeted branched
cover of the z-plane.  At a phase theta, walls are the trajectories solving
Im(e^{-i theta} (lambda_i - lambda_j) dz) = 0 with growing mass |Z|,
Z = int (lambda_i - lambda_j) dz.  Integration happens in the flat charge
coordinate: each step advances Z by a real increment along the e^{i theta}
ray (so the defining equation holds to machine precision by construction)
and solves for z with a midpoint corrector on dz/dZ = 1/(lambda_i-lambda_j).
Sheets are tracked as root values continued by nearest matching; no global
branch-cut system is constructed.

Simple branch points emit three walls along directions spaced 2 pi / 3;
crossings of composable walls become creation joints seeding an (ik) wall
with Z_ik = Z_ij + Z_jk, iterated until every joint's newborn mass exceeds
the cutoff.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .network import SpectralNetwork

TWO_PI = 2 * math.pi


class CurveError(ValueError):
    """The polynomial does not define a usable spectral curve."""


class NonGenericPhase(RuntimeError):
    """A wall hit a branch point or a degenerate crossing; perturb theta.

    The standard remedy is theta + 1e-3.
    """


class RootCollision(RuntimeError):
    """Sheet tracking lost: step too large relative to root separation."""


class GappedGuardError(RuntimeError):
    """Extension rounds kept producing joints without mass growth."""


# ----- curve -----

class SpectralCurve:
    """A bivariate polynomial P(z, w), monic of degree >= 2 in w."""

    def __init__(self, text: str, fiber_var: str = "w"):
        self.text = text
        w = sp.Symbol(fiber_var)
        try:
            expr = sp.sympify(text, rational=True)
        except sp.SympifyError as err:
            raise CurveError("cannot parse curve %r: %s" % (text, err))
        base_syms = sorted(expr.free_symbols - {w}, key=lambda s: s.name)
        if len(base_syms) > 1:
            raise CurveError("curve must involve %s and one base variable, "
                             "got %s" % (fiber_var, base_syms))
        z = base_syms[0] if base_syms else sp.Symbol("z")
        self.w, self.z = w, z
        poly = sp.Poly(expr, w)
        lead = poly.LC()
        if lead.free_symbols:
            raise CurveError("leading w-coefficient must be constant")
        poly = sp.Poly(sp.expand(expr / lead), w)
        self.n = poly.degree()
        if self.n < 2:
            raise CurveError("degree in %s must be >= 2" % fiber_var)
        self._coeff_polys = []  # z-polynomial (numpy coeffs) per w-power, descending
        for k in range(self.n, -1, -1):
            ck = sp.Poly(poly.nth(k), z)
            self._coeff_polys.append(
                np.array([float(c) for c in ck.all_coeffs()], dtype=complex))
        disc = sp.discriminant(poly.as_expr(), w)
        self._disc = sp.Poly(disc, z)
        if all(c == 0 for c in self._disc.all_coeffs()):
            raise CurveError("discriminant vanishes identically")

    def roots_at(self, z: complex) -> np.ndarray:
        """All n sheet values over z, in numpy's root order."""
        coeffs = np.array([np.polyval(c, z) for c in self._coeff_polys])
        return np.roots(coeffs)

    def disc_coeffs(self) -> np.ndarray:
        return np.array([complex(c) for c in self._disc.all_coeffs()])


@dataclass(frozen=True)
class Phase:
    theta: float

    @property
    def direction(self) -> complex:
        return cmath.exp(1j * self.theta)


@dataclass
class BranchPoint:
    z: complex
    tag: str  # "simple" | "unsupported"


def branch_points(curve: SpectralCurve, tol: float = 1e-9) -> List[BranchPoint]:
    """Roots of the w-discriminant, Newton-polished, tagged by simplicity.

    A root is simple when it is a single root of the discriminant and
    exactly one pair of sheets collides there.
    """
    coeffs = curve.disc_coeffs()
    if len(coeffs) <= 1:
        return []
    roots = np.roots(coeffs)
    deriv = np.polyder(coeffs)
    out: List[BranchPoint] = []
    scale = 1 + max(abs(r) for r in roots)
    for r in roots:
        for _ in range(50):  # Newton polish
            d = np.polyval(deriv, r)
            if d == 0:
                break
            step = np.polyval(coeffs, r) / d
            r = r - step
            if abs(step) < 1e-15 * scale:
                break
        out.append(complex(r))
    # cluster multiple roots
    clusters: List[List[complex]] = []
    for r in sorted(out, key=lambda c: (c.real, c.imag)):
        if clusters and abs(r - clusters[-1][-1]) < tol * scale:
            clusters[-1].append(r)
        else:
            clusters.append([r])
    result = []
    for cluster in clusters:
        z = sum(cluster) / len(cluster)
        tag = "simple"
        if len(cluster) > 1:
            tag = "unsupported"
        else:
            sheets = curve.roots_at(z)
            close = sum(1 for i in range(len(sheets)) for j in range(i + 1, len(sheets))
                        if abs(sheets[i] - sheets[j]) < 1e-6 * (1 + abs(sheets).max()))
            if close != 1:
                tag = "unsupported"
        result.append(BranchPoint(z, tag))
    return result


# ----- sheet tracking -----

def sheets_at(curve: SpectralCurve, z: complex,
              seed: Optional[np.ndarray] = None) -> np.ndarray:
    """Sheet values over z; with a seed, returned in the seed's order.

    Pairing is nearest-root matching with collision detection: the largest
    seed-to-root move must stay below half the smallest root separation.
    """
    roots = curve.roots_at(z)
    if seed is None:
        return roots
    n = len(roots)
    pairs = sorted((abs(seed[i] - roots[j]), i, j)
                   for i in range(n) for j in range(n))
    assign: Dict[int, int] = {}
    used = set()
    worst = 0.0
    for d, i, j in pairs:
        if i in assign or j in used:
            continue
        assign[i] = j
        used.add(j)
        worst = max(worst, d)
    sep = min((abs(roots[i] - roots[j])
               for i in range(n) for j in range(i + 1, n)), default=math.inf)
    if worst > 0.5 * sep:
        raise RootCollision("root move %.3g vs separation %.3g at z=%s"
                            % (worst, sep, z))
    return np.array([roots[assign[i]] for i in range(n)])


# ----- seeds and walls -----

@dataclass
class WallSeed:
    z0: complex
    vals: np.ndarray  # all sheet values at z0
    pair: Tuple[int, int]  # indices (i, j) into vals; wall charge uses i - j
    Z0: complex
    origin: tuple  # ("bp", branch index) | ("joint", joint index)


@dataclass
class TracedWall:
    id: int
    seed: WallSeed
    points: List[complex]
    charges: List[complex]
    vals_end: np.ndarray
    asymptote: str  # "radius" | "cutoff" | "joint:<id>" (set later)
    origin: tuple

    @property
    def mass(self) -> float:
        return abs(self.charges[-1])

    def pair_values_at(self, index: int, frac: float,
                       curve: SpectralCurve) -> Tuple[complex, complex, np.ndarray]:
        """Sheet-pair values at a point interpolated inside segment ``index``."""
        z = self.points[index] * (1 - frac) + self.points[index + 1] * frac
        base = self._vals_at_index(index, curve)
        vals = sheets_at(curve, z, base)
        i, j = self.seed.pair
        return vals[i], vals[j], vals

    def _vals_at_index(self, index: int, curve: SpectralCurve) -> np.ndarray:
        vals = self.seed.vals
        # continue from the seed through the stored samples up to index
        for k in range(1, index + 1):
            vals = sheets_at(curve, self.points[k], vals)
        return vals

    def charge_at(self, index: int, frac: float) -> complex:
        return self.charges[index] * (1 - frac) + self.charges[index + 1] * frac


def _local_coefficient(curve: SpectralCurve, b: complex,
                       probe: float = 1e-5) -> complex:
    """Leading Puiseux coefficient c with lambda_+/- ~ lambda_0 +/- c sqrt(z-b)."""
    sheets = curve.roots_at(b)
    n = len(sheets)
    pairs = sorted((abs(sheets[i] - sheets[j]), i, j)
                   for i in range(n) for j in range(i + 1, n))
    _, i0, j0 = pairs[0]
    center = (sheets[i0] + sheets[j0]) / 2
    z = b + probe
    roots = sorted(curve.roots_at(z), key=lambda r: abs(r - center))
    return (roots[0] - roots[1]) / (2 * math.sqrt(probe))


def initial_rays(curve: SpectralCurve, bp: BranchPoint, theta: float,
                 offset: float = 1e-7) -> List[WallSeed]:
    """Three outward wall seeds at a simple branch point.

    Near b the two colliding sheets differ by 2c (z-b)^{1/2}, so
    Z = (4c/3)(z-b)^{3/2}; walls leave along the three directions where
    e^{-i theta} Z is real, phi_k = (2/3)(theta - arg(4c/3)) + 2 pi k / 3.
    """
    if bp.tag != "simple":
        raise CurveError("branch point %s is not simple" % bp.z)
    c = _local_coefficient(curve, bp.z)
    big_c = 4 * c / 3
    phi0 = (2.0 / 3.0) * (theta - cmath.phase(big_c))
    seeds = []
    for k in range(3):
        phi = phi0 + TWO_PI * k / 3
        z0 = bp.z + offset * cmath.exp(1j * phi)
        vals = curve.roots_at(z0)
        # colliding pair: the two roots nearest each other
        n = len(vals)
        pairs = sorted((abs(vals[i] - vals[j]), i, j)
                       for i in range(n) for j in range(i + 1, n))
        _, i0, j0 = pairs[0]
        # order the pair so the step direction points outward
        direction = cmath.exp(1j * theta) / (vals[i0] - vals[j0])
        if (direction.real * math.cos(phi) + direction.imag * math.sin(phi)) < 0:
            i0, j0 = j0, i0
        mass0 = abs(big_c) * offset ** 1.5
        seeds.append(WallSeed(z0, vals, (i0, j0),
                              mass0 * cmath.exp(1j * theta), ("bp", bp.z)))
    return seeds


def trace_wall(curve: SpectralCurve, seed: WallSeed, theta: float,
               mass_cutoff: float, radius: float,
               step: Optional[float] = None, wall_id: int = -1) -> TracedWall:
    """Integrate one wall until it reaches the domain radius or mass cutoff.

    Steps advance Z by ds along e^{i theta}; z follows via a midpoint
    corrector on 1/(lambda_i - lambda_j), with the step halved whenever root
    tracking reports a collision risk and a cap on |dz|.
    """
    ds_max = step if step is not None else 1e-3 * mass_cutoff
    ds_min = ds_max * 1e-10
    dz_max = radius / 50.0
    phase = cmath.exp(1j * theta)
    z = seed.z0
    vals = seed.vals.copy()
    i, j = seed.pair
    Z = seed.Z0
    points = [z]
    charges = [Z]
    ds = min(ds_max, max(abs(Z) * 0.5, ds_max * 1e-6))
    asymptote = "cutoff"
    while True:
        if abs(Z) >= mass_cutoff:
            asymptote = "cutoff"
            break
        if abs(z) >= radius:
            asymptote = "radius"
            break
        d0 = vals[i] - vals[j]
        if d0 == 0:
            raise NonGenericPhase("wall %d hit a branch point at z=%s; "
                                  "try theta + 1e-3" % (wall_id, z))
        try:
            dz0 = phase * ds / d0
            if abs(dz0) > dz_max:
                raise RootCollision("step cap")
            z_mid = z + dz0 / 2
            vals_mid = sheets_at(curve, z_mid, vals)
            dm = vals_mid[i] - vals_mid[j]
            if dm == 0:
                raise NonGenericPhase("wall %d hit a branch point near z=%s; "
                                      "try theta + 1e-3" % (wall_id, z_mid))
            dz = phase * ds / dm
            if abs(dz) > dz_max:
                raise RootCollision("step cap")
            z_new = z + dz
            vals_new = sheets_at(curve, z_new, vals_mid)
        except RootCollision:
            ds /= 2
            if ds < ds_min:
                raise NonGenericPhase(
                    "step underflow near z=%s (wall %d close to a branch "
                    "point); try theta + 1e-3" % (z, wall_id))
            continue
        z, vals = z_new, vals_new
        Z = Z + phase * ds
        points.append(z)
        charges.append(Z)
        ds = min(ds * 1.5, ds_max)
    return TracedWall(wall_id, seed, points, charges, vals, asymptote,
                      seed.origin)


# ----- joint detection -----

def _segment_intersections(a: np.ndarray, b: np.ndarray):
    """Transversal intersections of two complex polylines.

    Yields (ia, ta, ib, tb, z) with segment indices and local parameters.
    Bounding-box prefilter, then exact 2x2 solves.
    """
    ax, ay = a.real, a.imag
    bx, by = b.real, b.imag
    a_lo_x = np.minimum(ax[:-1], ax[1:])[:, None]
    a_hi_x = np.maximum(ax[:-1], ax[1:])[:, None]
    a_lo_y = np.minimum(ay[:-1], ay[1:])[:, None]
    a_hi_y = np.maximum(ay[:-1], ay[1:])[:, None]
    b_lo_x = np.minimum(bx[:-1], bx[1:])[None, :]
    b_hi_x = np.maximum(bx[:-1], bx[1:])[None, :]
    b_lo_y = np.minimum(by[:-1], by[1:])[None, :]
    b_hi_y = np.maximum(by[:-1], by[1:])[None, :]
    overlap = ((a_lo_x <= b_hi_x) & (b_lo_x <= a_hi_x)
               & (a_lo_y <= b_hi_y) & (b_lo_y <= a_hi_y))
    for ia, ib in zip(*np.nonzero(overlap)):
        p, r = a[ia], a[ia + 1] - a[ia]
        q, s = b[ib], b[ib + 1] - b[ib]
        denom = (r * s.conjugate()).imag
        if denom == 0:
            continue
        d = q - p
        t = (d * s.conjugate()).imag / denom
        u = (d * r.conjugate()).imag / denom
        if 0 <= t <= 1 and 0 <= u <= 1:
            yield int(ia), float(t), int(ib), float(u), p + t * r


@dataclass
class Joint:
    id: int
    z: complex
    parents: Tuple[int, int]  # wall ids (ij, jk)
    parent_cuts: Dict[int, Tuple[int, float]]  # wall id -> (segment, frac)
    child: Optional[int]  # wall id of the seeded (ik) wall
    charge: complex  # Z_ij + Z_jk at the joint


@dataclass
class NonInteraction:
    z: complex
    walls: Tuple[int, int]


def _match_value(a: complex, b: complex, scale: float, rtol: float = 1e-8) -> bool:
    return abs(a - b) <= rtol * (1 + scale)


def build_wkb_network(curve: SpectralCurve, theta: float, mass_cutoff: float,
                      radius: float, max_rounds: int = 12,
                      step: Optional[float] = None) -> SpectralNetwork:
    """Trace the full network: initial rays, joints, iterated extension.

    Crossings whose sheet pairs share a value (matched within 1e-8 relative)
    become creation joints and seed an (ik) wall with Z_ik = Z_ij + Z_jk;
    disjoint-pair crossings are recorded as non-interactions.  Rounds repeat
    until no newborn wall fits under the mass cutoff; newborn masses must
    grow between rounds (gapped guard).
    """
    bps = branch_points(curve)
    for bp in bps:
        if bp.tag != "simple":
            raise CurveError("non-simple branch point at z=%s" % bp.z)
    walls: List[TracedWall] = []
    joints: List[Joint] = []
    non_interactions: List[NonInteraction] = []
    seen_pairs = set()
    frontier: List[TracedWall] = []
    for bp in bps:
        for seed in initial_rays(curve, bp, theta):
            wall = trace_wall(curve, seed, theta, mass_cutoff, radius,
                              step=step, wall_id=len(walls))
            walls.append(wall)
            frontier.append(wall)
    last_min_birth = 0.0
    rounds = 0
    while frontier:
        rounds += 1
        if rounds > max_rounds:
            raise GappedGuardError("extension exceeded %d rounds" % max_rounds)
        new_frontier: List[TracedWall] = []
        births: List[float] = []
        candidates = []
        for wall in frontier:
            for other in walls:
                if other.id >= wall.id and other in frontier:
                    if other.id <= wall.id:
                        continue
                candidates.append((wall, other))
        for wall, other in candidates:
            if wall.id == other.id:
                continue
            key = tuple(sorted((wall.id, other.id)))
            if key in seen_pairs:
                continue
            seen_pairs.add(key)
            a = np.array(wall.points)
            b = np.array(other.points)
            for ia, ta, ib, tb, z in _segment_intersections(a, b):
                if _shared_origin_artifact(wall, other, ia, ib, z):
                    continue
                child = _classify_crossing(curve, wall, other, ia, ta, ib, tb, z)
                if child is None:
                    non_interactions.append(NonInteraction(z, (wall.id, other.id)))
                    continue
                seed, ordered = child
                if abs(seed.Z0) >= mass_cutoff:
                    continue
                joint = Joint(len(joints), z, ordered,
                              {wall.id: (ia, ta), other.id: (ib, tb)},
                              None, seed.Z0)
                new_wall = trace_wall(curve, seed, theta, mass_cutoff, radius,
                                      step=step, wall_id=len(walls))
                joint.child = new_wall.id
                joints.append(joint)
                walls.append(new_wall)
                new_frontier.append(new_wall)
                births.append(abs(seed.Z0))
        if births:
            min_birth = min(births)
            if min_birth <= last_min_birth:
                raise GappedGuardError(
                    "newborn mass %.6g did not grow past %.6g"
                    % (min_birth, last_min_birth))
            last_min_birth = min_birth
        frontier = new_frontier
    net = _export(curve, walls, joints, theta, mass_cutoff)
    net.traced = walls
    net.joints_info = joints
    net.non_interactions = non_interactions
    return net


def _shared_origin_artifact(wall: TracedWall, other: TracedWall,
                            ia: int, ib: int, z: complex) -> bool:
    """Crossings within a few steps of a common origin are seeding artifacts."""
    near_a = ia < 3 and abs(z - wall.points[0]) < 1e-3
    near_b = ib < 3 and abs(z - other.points[0]) < 1e-3
    return (near_a or near_b) and wall.origin == other.origin


def _classify_crossing(curve, wall, other, ia, ta, ib, tb, z):
    """Return (child seed, ordered parent ids) for a composable crossing."""
    a1, a2, vals_a = wall.pair_values_at(ia, ta, curve)
    b1, b2, vals_b = other.pair_values_at(ib, tb, curve)
    scale = float(np.abs(vals_a).max())
    za = wall.charge_at(ia, ta)
    zb = other.charge_at(ib, tb)
    # ordered pairs (i, j): charge along the wall integrates lambda_i - lambda_j
    if _match_value(a2, b1, scale) and not _match_value(a1, b2, scale):
        first, second = (wall, (a1, a2), za), (other, (b1, b2), zb)
    elif _match_value(b2, a1, scale) and not _match_value(b1, a2, scale):
        first, second = (other, (b1, b2), zb), (wall, (a1, a2), za)
    else:
        return None
    (w_ij, (vi, vj), Zij), (w_jk, (_vj, vk), Zjk) = first, second
    vals = sheets_at(curve, z, vals_a if w_ij is wall else vals_b)
    idx_i = int(np.argmin(np.abs(vals - vi)))
    idx_k = int(np.argmin(np.abs(vals - vk)))
    if idx_i == idx_k:
        raise NonGenericPhase("degenerate (ik) pair at joint z=%s; "
                              "try theta + 1e-3" % z)
    seed = WallSeed(z, vals, (idx_i, idx_k), Zij + Zjk,
                    ("joint", (w_ij.id, w_jk.id)))
    return seed, (w_ij.id, w_jk.id)


# ----- export -----

def _sorted_label(vals: np.ndarray, pair: Tuple[int, int]) -> Tuple[int, int]:
    """1-based indices of the pair in the (real, imag)-sorted sheet order."""
    order = sorted(range(len(vals)),
                   key=lambda k: (round(vals[k].real, 6), round(vals[k].imag, 6)))
    rank = {k: r + 1 for r, k in enumerate(order)}
    return rank[pair[0]], rank[pair[1]]


def _export(curve, walls: List[TracedWall], joints: List[Joint],
            theta: float, mass_cutoff: float) -> SpectralNetwork:
    net = SpectralNetwork(cutoff=mass_cutoff)
    bp_vertex: Dict[complex, int] = {}
    for wall in walls:
        if wall.origin[0] == "bp" and wall.origin[1] not in bp_vertex:
            b = wall.origin[1]
            bp_vertex[b] = net.add_vertex("initial", (b.real, b.imag)).id
    joint_vertex: Dict[int, int] = {}  # child wall id -> vertex id
    for joint in joints:
        joint_vertex[joint.child] = net.add_vertex(
            "interaction_creation", (joint.z.real, joint.z.imag)).id
    cuts: Dict[int, List[tuple]] = {w.id: [] for w in walls}
    for joint in joints:
        for wid, cut in joint.parent_cuts.items():
            cuts[wid].append((cut, joint_vertex[joint.child], joint.z))
    for wall in walls:
        if wall.origin[0] == "bp":
            source = bp_vertex[wall.origin[1]]
        else:
            source = joint_vertex[wall.id]
        start_idx = 0
        start_pt = wall.points[0]
        vals = wall.seed.vals
        segments = sorted(cuts[wall.id])
        pieces = []
        for (cut, vid, zj) in segments:
            seg_index, _frac = cut
            route = [start_pt] + wall.points[start_idx + 1: seg_index + 1] + [zj]
            pieces.append((route, start_idx, vid))
            start_idx, start_pt = seg_index, zj
        pieces.append(([start_pt] + wall.points[start_idx + 1:], start_idx, None))
        for route, base_idx, target_vid in pieces:
            label_vals = wall._vals_at_index(base_idx, curve)
            label = _sorted_label(label_vals, wall.seed.pair)
            target = target_vid if target_vid is not None \
                else "end:" + wall.asymptote
            mass = abs(wall.charges[min(base_idx + len(route) - 1,
                                        len(wall.charges) - 1)])
            net.add_wall(label, source,
                         target,
                         [(p.real, p.imag) for p in route],
                         mass, 0 if wall.origin[0] == "bp" else 1,
                         wall=wall.id,
                         pair=(wall.seed.pair),
                         origin=wall.origin)
            if isinstance(target, int):
                source = target
    net.theta = theta
    return net
