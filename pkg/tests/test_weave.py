import pytest
from hypothesis import given, strategies as st

from specnet.braid import BraidWord, demazure_product, parse_braid
from specnet.weave import (
    Move,
    Weave,
    bend_weave,
    cycle_generators,
    parse_weave,
    validate_moves,
    validate_weave,
)

SIGMA1_6 = """
n=2
top: 1 1 1 1 1 1
moves: t5 t3 t2 t1 t1
"""

THREE_STRAND = """
n=3
top: 2 1 2 1 2 1 2
moves: h1 t3 h2 t1 t3 h2 t1
"""

FIVE_CROSSING = """
n=3
top: 2 1 2 1 2
moves: h1 t3 h2 t1
"""

MUTATION_A = "n=2\ntop: 1 1 1\nmoves: t2 t1"
MUTATION_B = "n=2\ntop: 1 1 1\nmoves: t1 t1"


def test_parse_and_slices():
    weave = parse_weave(SIGMA1_6)
    assert weave.strand_count == 2
    assert [len(s) for s in weave.slices] == [6, 5, 4, 3, 2, 1]
    assert weave.bottom == (1,)
    assert validate_weave(weave) == []

    weave = parse_weave(THREE_STRAND)
    assert weave.top == (2, 1, 2, 1, 2, 1, 2)
    assert weave.bottom == (1, 2, 1)
    assert [len(s) for s in weave.slices] == [7, 7, 6, 6, 5, 4, 4, 3]
    assert validate_weave(weave) == []


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_weave("top: 1 1")  # no strand count
    with pytest.raises(ValueError):
        parse_weave("n=2\ntop: 1 2")  # letter out of range
    with pytest.raises(ValueError):
        parse_weave("n=2\ntop: 1 1\nmoves: q1")  # unknown move kind
    with pytest.raises(ValueError):
        parse_weave("n=2\ntop: 1 1\nmoves: t2")  # move out of range


def test_validate_moves_reports_local_model_violations():
    # trivalent on unequal letters
    errs = validate_moves(3, (1, 2), [Move("t", 1)])
    assert errs and "equal letters" in errs[0]
    # hexavalent needs (a, b, a) with adjacent a, b
    errs = validate_moves(3, (1, 2, 2), [Move("h", 1)])
    assert errs and "hexavalent" in errs[0]
    # tetravalent needs distant letters
    errs = validate_moves(3, (1, 2), [Move("x", 1)])
    assert errs and "tetravalent" in errs[0]
    # out-of-range top letter
    errs = validate_moves(2, (2,), [])
    assert errs and "out of range" in errs[0]


def test_vertex_structure():
    weave = parse_weave(THREE_STRAND)
    kinds = [v.kind for v in weave.vertices]
    assert kinds == [
        "hexavalent", "trivalent", "hexavalent", "trivalent",
        "trivalent", "hexavalent", "trivalent",
    ]
    for vertex in weave.vertices:
        ups = weave.vertex_upper_segments(vertex.id)
        downs = weave.vertex_lower_segments(vertex.id)
        if vertex.kind == "trivalent":
            assert len(ups) == 2 and len(downs) == 1
        elif vertex.kind == "hexavalent":
            assert len(ups) == 3 and len(downs) == 3
        else:
            assert len(ups) == 2 and len(downs) == 2


def test_cycle_generators_one_strand_pair():
    # Six-crossing two-strand weave: generator k is named after chord z_k.
    weave = parse_weave(SIGMA1_6)
    gens = cycle_generators(weave)
    by_row = {weave.vertices[g.trivalent_vertex].row: g for g in gens}
    assert [by_row[r].name for r in range(5)] == ["s_1", "s_3", "s_4", "s_5", "s_2"]
    assert [by_row[r].chord_position for r in range(5)] == [6, 4, 3, 2, 5]
    # scan order is bottom-to-top
    assert [g.name for g in gens] == ["s_2", "s_5", "s_4", "s_3", "s_1"]
    assert [g.index for g in gens] == [1, 2, 3, 4, 5]


def test_cycle_generators_three_crossing_pair():
    gens_a = cycle_generators(parse_weave(MUTATION_A))
    assert [g.name for g in gens_a] == ["s_2", "s_1"]
    assert [g.chord_position for g in gens_a] == [2, 3]
    gens_b = cycle_generators(parse_weave(MUTATION_B))
    assert [g.name for g in gens_b] == ["s_1", "s_2"]
    assert [g.chord_position for g in gens_b] == [3, 2]


def test_cycle_generators_rank_three():
    weave = parse_weave(THREE_STRAND)
    gens = cycle_generators(weave)
    assert [g.name for g in gens] == ["s_1", "s_2", "s_3", "s_4"]
    assert [g.chord_position for g in gens] == [7, 6, 5, 4]

    weave = parse_weave(FIVE_CROSSING)
    gens = cycle_generators(weave)
    assert [g.name for g in gens] == ["s_1", "s_2"]
    assert [g.chord_position for g in gens] == [5, 4]


def test_bend_weave_boundary():
    bent = bend_weave(parse_weave(SIGMA1_6))
    assert bent.boundary_word == parse_braid("n=2; 1 1 1 1 1 1 1")
    assert bent.chord_names == ["z_6", "z_5", "z_4", "z_3", "z_2", "z_1", "w_1"]
    xs = [bent.top_positions[name] for name in bent.chord_names]
    assert xs == sorted(xs)
    assert bent.marked_x > xs[-1]

    bent = bend_weave(parse_weave(THREE_STRAND))
    assert bent.boundary_word == parse_braid("n=3; 2 1 2 1 2 1 2 1 2 1")
    assert bent.chord_names == (
        ["z_%d" % k for k in range(7, 0, -1)] + ["w_3", "w_2", "w_1"])
    assert len(bent.bent_segments) == 3


def test_bent_lines_are_nested():
    bent = bend_weave(parse_weave(THREE_STRAND))
    depth = len(bent.weave.moves)
    for p, seg in enumerate(bent.bent_segments):
        (x_top, y_top), (_, y_low), (x_in, _), (_, y_end) = seg.points
        assert y_top == 0 and y_end == -depth
        assert x_in == p + 1
        assert seg.letter == bent.weave.bottom[p]
        # outer lines (smaller p) drop lower and rise farther right
        if p > 0:
            prev = bent.bent_segments[p - 1]
            assert prev.points[0][0] > x_top
            assert prev.points[1][1] < y_low


# ----- property tests: random legal weaves (random-walk construction) -----

@given(st.integers(2, 4), st.lists(st.integers(0, 10 ** 6), min_size=2, max_size=12),
       st.randoms())
def test_random_weave_invariants(n, seeds, rng):
    top = tuple(rng.choice(range(1, n)) for _ in range(rng.randint(1, 8)))
    from specnet.weave import _apply_move

    word = top
    moves = []
    for seed in seeds:
        candidates = []
        for p in range(len(word) - 1):
            if word[p] == word[p + 1]:
                candidates.append(Move("t", p + 1))
            elif abs(word[p] - word[p + 1]) > 1:
                candidates.append(Move("x", p + 1))
        for p in range(len(word) - 2):
            if word[p] == word[p + 2] and abs(word[p] - word[p + 1]) == 1:
                candidates.append(Move("h", p + 1))
        if not candidates:
            break
        move = candidates[seed % len(candidates)]
        moves.append(move)
        word = _apply_move(word, move)

    weave = Weave(n, top, moves)
    assert validate_weave(weave) == []
    assert weave.bottom == word
    # every move preserves the Demazure product of the slice
    products = {demazure_product(BraidWord(n, s)) for s in weave.slices}
    assert len(products) == 1
    # slice lengths drop by one exactly at trivalent moves
    for move, before, after in zip(weave.moves, weave.slices, weave.slices[1:]):
        assert len(before) - len(after) == (1 if move.kind == "t" else 0)
    # every trivalent vertex yields a generator named after a beta chord
    gens = cycle_generators(weave)
    assert len(gens) == len(weave.trivalent_vertices())
    assert len({g.name for g in gens}) == len(gens)
    # bending preserves letters and reaches the top
    bent = bend_weave(weave)
    assert bent.boundary_word.letters == weave.top + weave.bottom
