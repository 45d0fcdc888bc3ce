import cmath
import math

import numpy as np
import pytest

from specnet.wkb import (
    CurveError,
    SpectralCurve,
    branch_points,
    build_wkb_network,
    initial_rays,
    sheets_at,
    trace_wall,
)


def test_curve_parsing():
    curve = SpectralCurve("w^2 - z")
    assert curve.n == 2
    curve = SpectralCurve("w^3 - 3*w + x")
    assert curve.n == 3
    curve = SpectralCurve("w^2 - 1")
    assert curve.n == 2


def test_curve_rejects_bad_input():
    with pytest.raises(CurveError):
        SpectralCurve("w - z")  # single sheet
    with pytest.raises(CurveError):
        SpectralCurve("w^2 - x*y")  # two base variables
    with pytest.raises(CurveError):
        SpectralCurve("q^3 - z")  # missing fiber variable


def test_roots_at():
    curve = SpectralCurve("w^2 - z")
    roots = sorted(curve.roots_at(4.0), key=lambda r: r.real)
    assert abs(roots[0] + 2) < 1e-12 and abs(roots[1] - 2) < 1e-12


def test_branch_points_examples():
    assert [b.z for b in branch_points(SpectralCurve("w^2 - z"))] == [0]
    bps = sorted(b.z.real for b in branch_points(SpectralCurve("w^3 - 3*w + x")))
    assert abs(bps[0] + 2) < 1e-9 and abs(bps[1] - 2) < 1e-9
    assert branch_points(SpectralCurve("w^2 - 1")) == []


def test_branch_points_are_simple():
    for bp in branch_points(SpectralCurve("w^3 - 3*w + x")):
        assert bp.tag == "simple"


def test_sheet_tracking_swaps_around_branch_point():
    """Continuing the sheets around z = 0 of w^2 = z swaps them."""
    curve = SpectralCurve("w^2 - z")
    z = 1.0 + 0j
    vals = curve.roots_at(z)
    start = vals.copy()
    steps = 200
    for k in range(1, steps + 1):
        zk = cmath.exp(2j * math.pi * k / steps)
        vals = sheets_at(curve, zk, vals)
    assert abs(vals[0] - start[1]) < 1e-6
    assert abs(vals[1] - start[0]) < 1e-6


def test_initial_rays_point_outward():
    curve = SpectralCurve("w^2 - z")
    bp = branch_points(curve)[0]
    seeds = initial_rays(curve, bp, theta=0.0)
    assert len(seeds) == 3
    for seed in seeds:
        i, j = seed.pair
        v = cmath.exp(0j) / (seed.vals[i] - seed.vals[j])
        # the flow direction leads away from the branch point
        assert (v * (seed.z0 - bp.z).conjugate()).real > 0


def test_traced_wall_mass_monotone_and_phase_constant():
    curve = SpectralCurve("w^2 - z")
    theta = 0.4
    bp = branch_points(curve)[0]
    for k, seed in enumerate(initial_rays(curve, bp, theta)):
        wall = trace_wall(curve, seed, theta, 8.0, 4.0, wall_id=k)
        masses = [abs(Z) for Z in wall.charges]
        assert all(a < b for a, b in zip(masses, masses[1:]))
        rot = cmath.exp(-1j * theta)
        for Z in wall.charges:
            assert abs((rot * Z).imag) <= 1e-6 * (1 + abs(Z))


def test_airy_network_three_rays():
    net = build_wkb_network(SpectralCurve("w^2 - z"), 0.0, 10.0, 5.0)
    assert len(net.traced) == 3
    assert net.joints_info == []
    dirs = sorted(cmath.phase(w.points[-1]) for w in net.traced)
    expected = sorted((-2 * math.pi / 3, 0.0, 2 * math.pi / 3))
    for got, want in zip(dirs, expected):
        assert abs(got - want) < 1e-3


def test_constant_curve_gives_empty_network():
    net = build_wkb_network(SpectralCurve("w^2 - 1"), 0.0, 10.0, 5.0)
    assert net.walls == {} and net.vertices == {}


def test_wkb_network_vertices_classify(cubic_net):
    cubic_net.validate_decorations()


def test_cubic_secondary_walls(cubic_net):
    secondary = [w for w in cubic_net.traced if w.origin[0] == "joint"]
    assert len(secondary) == 2


def test_wkb_charge_additivity(cubic_net):
    for joint in cubic_net.joints_info:
        total = 0
        for wid in joint.parents:
            wall = cubic_net.traced[wid]
            seg, frac = joint.parent_cuts[wid]
            total += wall.charge_at(seg, frac)
        assert abs(total - joint.charge) <= 1e-6 * (1 + abs(joint.charge))
        # the composed sheet pair really is (i,k): lambda differences add
        child = cubic_net.traced[joint.child]
        i, k = child.seed.pair
        d_child = child.seed.vals[i] - child.seed.vals[k]
        d_parents = 0
        for wid in joint.parents:
            wall = cubic_net.traced[wid]
            seg, frac = joint.parent_cuts[wid]
            vi, vj, _ = wall.pair_values_at(seg, frac, cubic_net.curve)
            d_parents += vi - vj
        assert abs(d_child - d_parents) <= 1e-6 * (1 + abs(d_child))


@pytest.fixture(scope="module")
def cubic_net():
    curve = SpectralCurve("w^3 - 3*w + x")
    net = build_wkb_network(curve, 0.3, 12.0, 8.0)
    net.curve = curve
    return net
