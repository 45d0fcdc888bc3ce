from fractions import Fraction

import pytest

from specnet.forest import (
    NonGenericGeometry,
    _conjugate,
    _poly_crossings,
    build_forest,
    build_forest_strands,
)
from specnet.network import OPEN_END_PREFIX
from specnet.weave import bend_weave, parse_weave

from conftest import EXAMPLES

STRAND_COUNTS = {
    "mutation_a": 6,
    "mutation_b": 6,
    "sigma1_6": 15,
    "five_crossing": 8,
    "three_strand": 20,
}


def test_strand_counts(builders):
    for name, builder in builders.items():
        assert len(builder.strands) == STRAND_COUNTS[name], name


def test_every_strand_reaches_a_chord(builders):
    for builder in builders.values():
        names = set(builder.bent.chord_names)
        for strand in builder.strands:
            assert strand.chord in names


def test_seed_labels_are_adjacent_transpositions(builders):
    for builder in builders.values():
        for vertex in builder.weave.trivalent_vertices():
            for seed in builder.seed_flowlines(vertex.id):
                assert set(seed.label) == {vertex.letter, vertex.letter + 1}


def test_three_seeds_per_branch_point(builders):
    for builder in builders.values():
        branch_strands = [s for s in builder.strands if s.origin[0] == "branch"]
        assert len(branch_strands) == 3 * len(builder.weave.trivalent_vertices())


def test_network_shape(builders):
    for name, builder in builders.items():
        net = builder.to_network()
        assert net.inconsistent_vertices() == []
        kinds = [v.kind for v in net.vertices.values()]
        assert kinds.count("initial") == len(builder.weave.trivalent_vertices())
        assert kinds.count("interaction_creation") == len(builder.joints)
        open_ends = [w for w in net.walls.values()
                     if isinstance(w.target, str)
                     and w.target.startswith(OPEN_END_PREFIX)]
        # every strand contributes exactly one open end (its chord)
        assert len(open_ends) == len(builder.strands)


def test_joint_labels_compose(builders):
    for builder in builders.values():
        for joint in builder.joints:
            p1, p2 = joint["parents"]
            l1 = builder.strands[p1].label_at(joint["params"][p1])
            l2 = builder.strands[p2].label_at(joint["params"][p2])
            child = builder.strands[joint["child"]].start_label
            composed = {(l1[0], l2[1])} if l1[1] == l2[0] else set()
            composed |= {(l2[0], l1[1])} if l2[1] == l1[0] else set()
            assert child in composed


def test_crossings_sorted_and_conjugation_consistent(builders):
    for builder in builders.values():
        for strand in builder.strands:
            params = [c[0] for c in strand.crossings]
            assert params == sorted(params)
            label = strand.start_label
            for _, letter, _ in strand.crossings:
                label = _conjugate(label, letter)
            assert label == strand.final_label()


def test_build_forest_is_deterministic():
    text = EXAMPLES["five_crossing"]
    a = build_forest(bend_weave(parse_weave(text)))
    b = build_forest(bend_weave(parse_weave(text)))
    from specnet.network import network_to_json

    assert network_to_json(a) == network_to_json(b)


def test_conjugate():
    assert _conjugate((1, 3), 1) == (2, 3)
    assert _conjugate((2, 3), 1) == (1, 3)
    assert _conjugate((1, 2), 3) == (1, 2)


def test_poly_crossings_basic():
    P = [(Fraction(0), Fraction(0)), (Fraction(2), Fraction(2))]
    Q = [(Fraction(0), Fraction(2)), (Fraction(2), Fraction(0))]
    out = _poly_crossings(P, Q)
    assert len(out) == 1
    (_, t), (_, u), pt = out[0]
    assert t == u == Fraction(1, 2)
    assert pt == (Fraction(1), Fraction(1))


def test_poly_crossings_rejects_collinear_overlap():
    P = [(Fraction(0), Fraction(0)), (Fraction(2), Fraction(0))]
    Q = [(Fraction(1), Fraction(0)), (Fraction(3), Fraction(0))]
    with pytest.raises(NonGenericGeometry):
        _poly_crossings(P, Q)


def test_poly_crossings_parallel_disjoint():
    P = [(Fraction(0), Fraction(0)), (Fraction(2), Fraction(0))]
    Q = [(Fraction(0), Fraction(1)), (Fraction(2), Fraction(1))]
    assert _poly_crossings(P, Q) == []


def test_delta_offsets_distinct(builders):
    for builder in builders.values():
        deltas = [s.delta for s in builder.strands]
        assert len(set(deltas)) == len(deltas)
