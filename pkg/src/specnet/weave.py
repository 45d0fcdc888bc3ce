"""Demazure weaves: slice/move representation, validation, bending, layout.

A weave is stored as a list of horizontal braid-word slices (top to bottom)
with one elementary move between consecutive slices:

* ``t<p>`` trivalent: letters (p, p+1) equal, merged into one;
* ``h<p>`` hexavalent: letters (p, p+1, p+2) = (a, b, a) with |a-b| = 1,
  rewritten to (b, a, b);
* ``x<p>`` tetravalent: letters (p, p+1) = (a, b) with |a-b| > 1, swapped.

Text format::

    n=3
    top: 2 1 2 1 2 1 2
    moves: h1 t3 h2 t1 t3 h2 t1

Layout is exact-rational: slice letters sit at integer columns, slices at
integer depths (top slice at y = 0, y decreasing downward), vertices at
half-integer depths.  Bending routes the bottom slice's lines around the
bottom-right of the diagram up to the top, to the right of the top slice.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .braid import BraidWord, demazure_product, label_chords, parse_braid

Point = Tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Move:
    kind: str  # 't' | 'h' | 'x'
    position: int  # 1-based index of the leftmost letter involved

    def width(self) -> int:
        return 3 if self.kind == "h" else 2


@dataclass
class WeaveVertex:
    id: int
    kind: str  # 'trivalent' | 'hexavalent' | 'tetravalent'
    row: int  # band index: sits between slices row and row+1 (0-based)
    position: int  # 1-based leftmost involved letter in the upper slice
    letter: int  # for trivalent: the merged letter; otherwise upper-left letter
    point: Point = (Fraction(0), Fraction(0))


@dataclass
class Segment:
    """A weave-line piece, drawn as a polyline from its upper to lower end.

    Ends are descriptors: ("slot", slice_index, position), ("vertex", vertex_id,
    role) or ("top", chord_position) for bent lines that return to the top
    boundary.  ``role`` is the 0-based index among the vertex's upper (for
    lower ends) or lower (for upper ends) attachment points, left to right.
    """

    id: int
    letter: int
    points: List[Point]
    upper: Tuple
    lower: Tuple


_KINDS = {"t": "trivalent", "h": "hexavalent", "x": "tetravalent"}


def _apply_move(word: Tuple[int, ...], move: Move) -> Tuple[int, ...]:
    p = move.position - 1
    if p < 0 or p + move.width() > len(word):
        raise ValueError("move %s%d out of range for word of length %d"
                         % (move.kind, move.position, len(word)))
    if move.kind == "t":
        a, b = word[p], word[p + 1]
        if a != b:
            raise ValueError("trivalent requires equal letters at position %d" % move.position)
        return word[:p] + (a,) + word[p + 2:]
    if move.kind == "h":
        a, b, c = word[p], word[p + 1], word[p + 2]
        if a != c or abs(a - b) != 1:
            raise ValueError("hexavalent requires (a,b,a) with |a-b|=1 at position %d" % move.position)
        return word[:p] + (b, a, b) + word[p + 3:]
    if move.kind == "x":
        a, b = word[p], word[p + 1]
        if abs(a - b) <= 1:
            raise ValueError("tetravalent requires |a-b|>1 at position %d" % move.position)
        return word[:p] + (b, a) + word[p + 2:]
    raise ValueError("unknown move kind %r" % move.kind)


class Weave:
    """A parsed Demazure weave with derived slices, vertices and geometry."""

    def __init__(self, strand_count: int, top: Tuple[int, ...], moves: List[Move]):
        self.strand_count = strand_count
        self.moves = list(moves)
        self.slices: List[Tuple[int, ...]] = [tuple(top)]
        for move in self.moves:
            self.slices.append(_apply_move(self.slices[-1], move))
        self.vertices: List[WeaveVertex] = []
        self.segments: List[Segment] = []
        self._seg_below: Dict[Tuple[int, int], Segment] = {}
        self._seg_above: Dict[Tuple[int, int], Segment] = {}
        self._vertex_upper: Dict[Tuple[int, int], List[Segment]] = {}
        self._vertex_lower: Dict[Tuple[int, int], List[Segment]] = {}
        self._build()

    # ----- structure -----
    def _build(self):
        for row, move in enumerate(self.moves):
            upper, lower = self.slices[row], self.slices[row + 1]
            p = move.position - 1
            width = move.width()
            kind = _KINDS[move.kind]
            x_vertex = Fraction(2 * move.position + width - 1, 2)  # midpoint of involved columns
            y_vertex = -(Fraction(2 * row + 1, 2))
            vertex = WeaveVertex(len(self.vertices), kind, row, move.position,
                                 upper[p], (x_vertex, y_vertex))
            self.vertices.append(vertex)
            out_width = width - 1 if move.kind == "t" else width

            def col(q):  # 1-based position -> x coordinate
                return Fraction(q)

            for q in range(1, len(upper) + 1):
                if p + 1 <= q <= p + width:
                    seg = Segment(len(self.segments), upper[q - 1],
                                  [(col(q), Fraction(-row)), vertex.point],
                                  ("slot", row, q), ("vertex", vertex.id, q - p - 1))
                    self.segments.append(seg)
                    self._seg_below[(row, q)] = seg
                else:
                    q_next = q if q <= p else q - (width - out_width)
                    seg = Segment(len(self.segments), upper[q - 1],
                                  [(col(q), Fraction(-row)), (col(q_next), Fraction(-row - 1))],
                                  ("slot", row, q), ("slot", row + 1, q_next))
                    self.segments.append(seg)
                    self._seg_below[(row, q)] = seg
                    self._seg_above[(row + 1, q_next)] = seg
            for j in range(out_width):
                q_out = move.position + j
                seg = Segment(len(self.segments), lower[q_out - 1],
                              [vertex.point, (col(q_out), Fraction(-row - 1))],
                              ("vertex", vertex.id, j), ("slot", row + 1, q_out))
                self.segments.append(seg)
                self._seg_above[(row + 1, q_out)] = seg
        # collect vertex attachments
        for seg in self.segments:
            if seg.lower[0] == "vertex":
                self._vertex_upper.setdefault(seg.lower[1], []).append(seg)
            if seg.upper[0] == "vertex":
                self._vertex_lower.setdefault(seg.upper[1], []).append(seg)
        for attachments in self._vertex_upper.values():
            attachments.sort(key=lambda s: s.lower[2])
        for attachments in self._vertex_lower.values():
            attachments.sort(key=lambda s: s.upper[2])

    # ----- queries -----
    @property
    def top(self) -> Tuple[int, ...]:
        return self.slices[0]

    @property
    def bottom(self) -> Tuple[int, ...]:
        return self.slices[-1]

    def trivalent_vertices(self) -> List[WeaveVertex]:
        return [v for v in self.vertices if v.kind == "trivalent"]

    def segment_below_slot(self, slice_index: int, position: int) -> Optional[Segment]:
        return self._seg_below.get((slice_index, position))

    def segment_above_slot(self, slice_index: int, position: int) -> Optional[Segment]:
        return self._seg_above.get((slice_index, position))

    def vertex_upper_segments(self, vertex_id: int) -> List[Segment]:
        return self._vertex_upper.get(vertex_id, [])

    def vertex_lower_segments(self, vertex_id: int) -> List[Segment]:
        return self._vertex_lower.get(vertex_id, [])

    def continue_up(self, segment: Segment) -> Optional[Segment]:
        """The segment above ``segment`` for a line walking toward the top.

        Straight through tetravalent and hexavalent vertices; up the *left*
        upper edge at a trivalent vertex; None at the top boundary.
        """
        upper = segment.upper
        if upper[0] == "slot":
            r, q = upper[1], upper[2]
            if r == 0:
                return None
            return self._seg_above[(r, q)]
        if upper[0] == "top":
            return None
        vertex = self.vertices[upper[1]]
        role = upper[2]
        ups = self.vertex_upper_segments(vertex.id)
        if vertex.kind == "trivalent":
            return ups[0]
        if vertex.kind == "hexavalent":
            return ups[2 - role]
        return ups[1 - role]

    def top_chord_position(self, segment: Segment) -> int:
        """Walk a line up to the top slice; 1-based top position reached."""
        current = segment
        while True:
            nxt = self.continue_up(current)
            if nxt is None:
                if current.upper[0] == "slot" and current.upper[1] == 0:
                    return current.upper[2]
                raise ValueError("line does not reach the top slice")
            current = nxt


@dataclass
class CycleGenerator:
    index: int  # 1-based, in bottom-to-top scan order
    trivalent_vertex: int  # vertex id
    name: str  # symbol, named after the associated top chord
    chord_position: int  # 1-based top-slice position of the top-right edge


def parse_weave(text: str) -> Weave:
    n = None
    top: Optional[Tuple[int, ...]] = None
    moves: List[Move] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("n="):
            n = int(line[2:])
        elif line.startswith("top:"):
            top = tuple(int(tok) for tok in line[4:].replace(",", " ").split())
        elif line.startswith("moves:"):
            for token in line[6:].split():
                kind, pos = token[0], token[1:]
                if kind not in _KINDS or not pos.isdigit():
                    raise ValueError("malformed move token %r" % token)
                moves.append(Move(kind, int(pos)))
        else:
            raise ValueError("unrecognized line %r" % raw)
    if n is None or top is None:
        raise ValueError("weave text must declare n= and top:")
    BraidWord(n, top)  # range-checks the letters
    return Weave(n, top, moves)


def validate_moves(strand_count: int, top: Tuple[int, ...], moves: List[Move]) -> List[str]:
    """Check every move against its local model; violations as strings.

    Stops at the first structurally invalid move, since later slices are
    undefined past it.
    """
    violations = []
    for letter in top:
        if not 1 <= letter <= strand_count - 1:
            violations.append("top slice: letter %d out of range" % letter)
    if violations:
        return violations
    word = tuple(top)
    for index, move in enumerate(moves):
        try:
            word = _apply_move(word, move)
        except ValueError as err:
            violations.append("move %d (%s%d): %s" % (index + 1, move.kind, move.position, err))
            break
    return violations


def validate_weave(weave: Weave) -> List[str]:
    return validate_moves(weave.strand_count, weave.top, weave.moves)


def cycle_generators(weave: Weave) -> List[CycleGenerator]:
    """One generator per trivalent vertex, scanned bottom-to-top.

    The generator symbol is named after the top chord reached by the vertex's
    top-right edge (continuing up-left past higher trivalent vertices).
    """
    chord_names = _top_chord_names(weave)
    generators = []
    scan = sorted(weave.trivalent_vertices(), key=lambda v: (-v.row, v.position))
    for index, vertex in enumerate(scan, start=1):
        right_in = weave.vertex_upper_segments(vertex.id)[-1]
        position = weave.top_chord_position(right_in)
        chord = chord_names[position - 1]
        if not chord.startswith("z_"):
            raise ValueError("trivalent vertex %d maps to non-beta chord %s" % (vertex.id, chord))
        generators.append(CycleGenerator(index, vertex.id, "s_" + chord[2:], position))
    return generators


def _top_chord_names(weave: Weave) -> List[str]:
    beta = BraidWord(weave.strand_count, weave.top)
    delta = BraidWord(weave.strand_count, weave.bottom)
    labeling = label_chords(beta, delta)
    return list(labeling.beta_chords)


class BentWeave:
    """A weave with its bottom slice routed around to the top-right.

    The bent lines are nested L-shaped polylines around the bottom-right of
    the diagram; bottom letter 0 (leftmost) wraps outermost and surfaces
    rightmost at the top.  Bending adds no vertices and no crossings, so the
    boundary word of the bent weave is top-slice ++ bottom-slice.
    """

    def __init__(self, weave: Weave):
        self.weave = weave
        n = weave.strand_count
        top_len = len(weave.top)
        bottom = weave.bottom
        m = len(bottom)
        depth = len(weave.moves)
        self.boundary_word = BraidWord(n, weave.top + bottom)
        labeling = label_chords(BraidWord(n, weave.top), BraidWord(n, bottom))
        self.chord_names: List[str] = list(labeling.beta_chords) + list(labeling.delta_chords)
        # Bending traverses the bottom edge in reverse boundary order, so the
        # bottom letter p surfaces at the (p+1)-th rightmost top position and
        # is named w_{p+1}: left-to-right the bent chords read w_m ... w_1.
        self.marked_points = labeling.marked_points
        wall_margin = Fraction(max(top_len, max((len(s) for s in weave.slices), default=1)) + 2)
        self.bent_segments: List[Segment] = []
        self.top_positions: Dict[str, Fraction] = {}
        for q in range(1, top_len + 1):
            self.top_positions[labeling.beta_chords[q - 1]] = Fraction(q)
        next_id = len(weave.segments)
        for p in range(m):  # p: 0-based bottom-slice position
            drop = Fraction(depth + 1 + (m - 1 - p))
            x_up = wall_margin + (m - 1 - p)
            name = labeling.delta_chords[m - 1 - p]
            seg = Segment(
                next_id, bottom[p],
                [(x_up, Fraction(0)), (x_up, -drop), (Fraction(p + 1), -drop),
                 (Fraction(p + 1), Fraction(-depth))],
                ("top", x_up), ("slot", depth, p + 1))
            self.bent_segments.append(seg)
            self.top_positions[name] = x_up
            next_id += 1
        self.marked_x = wall_margin + m  # marked points sit right of every chord
        self.right_edge = self.marked_x + 1
        self.bottom_edge = -(Fraction(depth + m + 2))

    @property
    def strand_count(self):
        return self.weave.strand_count

    def bent_segment_below_slot(self, position: int) -> Segment:
        return self.bent_segments[position - 1]


def bend_weave(weave: Weave) -> BentWeave:
    return BentWeave(weave)
