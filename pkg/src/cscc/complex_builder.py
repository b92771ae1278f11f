"""Construction and validation of four-colored 3D color-code complexes.

Complexes are generated in the dual picture. A tetrahedralization of the
integer grid supplies dual vertices (one per stabilizer cell) and tetrahedra
(one per qubit). Outside the lattice box, dual vertices collapse onto one label
per boundary facet; a tetrahedron whose image keeps four distinct vertices is a
qubit. The primal complex is then read off:

- cells are dual vertices inside the box,
- faces are dual edges with at least one cell endpoint,
- edges are dual triangles, each shared by exactly two qubits.
"""

import json
import logging
from collections import defaultdict, deque
from collections.abc import Callable, Hashable, Iterable
from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from itertools import combinations, product
from typing import Any

from cscc.errors import (
    ComplexFormatError,
    ConstructionError,
    ExtentError,
    NotBipartiteError,
    PreconditionError,
)


logger = logging.getLogger(__name__)


class Color(str, Enum):
    """The four cell colors."""

    R = "r"
    G = "g"
    Y = "y"
    B = "b"


COLOR_ORDER: tuple[Color, ...] = (Color.R, Color.G, Color.Y, Color.B)

PAULI_Z = "PauliZ"
TRUNCATED_FACET = "truncated"

# Rectangular solid: blue left/right, red front/back, green bottom, yellow top.
CUBE_LABELS: dict[str, str] = {
    "left": "b",
    "right": "b",
    "front": "r",
    "back": "r",
    "bottom": "g",
    "top": "y",
}

# Node colors are read from coordinate parities, see _node_color.
_BITS_TO_COLOR = {
    (0, 1): Color.R,
    (0, 0): Color.G,
    (1, 1): Color.Y,
    (1, 0): Color.B,
}

Position = tuple[Fraction, Fraction, Fraction]
Node = tuple[int, int, int]


def color_key(color: Color) -> int:
    """Sort key realizing r < g < y < b."""
    return COLOR_ORDER.index(color)


def sorted_colors(colors: Iterable[Color]) -> tuple[Color, ...]:
    return tuple(sorted(colors, key=color_key))


@dataclass(frozen=True)
class Qubit:
    """A vertex of the primal complex.

    ``facets`` names the colored boundary facets whose collapsed dual vertex
    belongs to this qubit's tetrahedron.
    """

    id: int
    position: Position
    facets: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Edge:
    qubits: tuple[int, int]
    color: Color


@dataclass(frozen=True)
class Face:
    qubits: tuple[int, ...]
    colors: tuple[Color, Color]


@dataclass(frozen=True)
class Cell:
    qubits: tuple[int, ...]
    color: Color


@dataclass(frozen=True)
class ColoredComplex:
    """Primal color-code complex plus boundary data."""

    qubits: tuple[Qubit, ...]
    edges: tuple[Edge, ...]
    faces: tuple[Face, ...]
    cells: tuple[Cell, ...]
    boundary_labels: dict[str, str] = field(default_factory=dict)
    truncation_region: frozenset[int] = frozenset()

    @property
    def n(self) -> int:
        return len(self.qubits)

    def stats(self) -> dict[str, int]:
        """Element counts used in reports."""
        return {
            "qubits": len(self.qubits),
            "edges": len(self.edges),
            "faces": len(self.faces),
            "cells": len(self.cells),
            "truncation_region": len(self.truncation_region),
        }


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    """Pass/fail per structural rule, with a witness for each failure."""

    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def get(self, name: str) -> CheckResult:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_dict(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "witness": c.witness}
                for c in self.checks
            ],
        }


@dataclass(frozen=True)
class Bipartition:
    """Even/odd split of the qubits; ``parity[q]`` is 0 for even, 1 for odd."""

    parity: tuple[int, ...]

    def signs(self) -> tuple[int, ...]:
        """T exponent per qubit: +1 on even qubits, -1 on odd ones."""
        return tuple(1 - 2 * p for p in self.parity)

    def summary(self) -> dict[str, int]:
        odd = sum(self.parity)
        return {"even": len(self.parity) - odd, "odd": odd}


def _node_color(node: Node) -> Color:
    x, y, z = node
    if (x + y + z) % 2:
        return _BITS_TO_COLOR[(x % 2, y % 2)]
    return _BITS_TO_COLOR[(1 - x % 2, 1 - y % 2)]


def _cube_tetrahedra(origin: Node) -> list[tuple[Node, ...]]:
    """Split the unit cube at ``origin`` into five tetrahedra.

    The central tetrahedron spans the four odd corners; each even corner forms
    a tetrahedron with its three axis neighbours.
    """
    ox, oy, oz = origin
    corners = [(ox + dx, oy + dy, oz + dz) for dx, dy, dz in product((0, 1), repeat=3)]
    odd = [c for c in corners if sum(c) % 2]
    tetrahedra: list[tuple[Node, ...]] = [tuple(odd)]
    for corner in corners:
        if sum(corner) % 2 == 0:
            neighbours = [
                c for c in odd if sum(abs(a - b) for a, b in zip(c, corner)) == 1
            ]
            tetrahedra.append((corner, *neighbours))
    return tetrahedra


def _check_extent(extent: Iterable[int]) -> tuple[int, int, int]:
    values = tuple(extent)
    if len(values) != 3 or not all(isinstance(v, int) for v in values):
        raise ExtentError(f"Extent must be three integers, got {values!r}")
    if min(values) < 1:
        raise ExtentError(f"Extent components must be >= 1, got {values!r}")
    return values  # type: ignore[return-value]


class _BoxLattice:
    """Node box [0, 2a] x [0, 2b] x [0, 2c] with capped, labeled facets."""

    def __init__(self, extent: tuple[int, int, int]):
        """Initialize the lattice.

        Args:
            extent: Box extent in units of two lattice spacings
        """
        self.size = tuple(2 * e for e in extent)
        sx, sy, sz = self.size
        box = set(product(range(sx + 1), range(sy + 1), range(sz + 1)))
        self.cells: set[Node] = box | self._caps()

    def _caps(self) -> set[Node]:
        """Cell nodes one step outside each facet.

        A cap hides the box nodes of the facet's own color from its label.
        """
        sx, sy, sz = self.size
        caps: set[Node] = set()
        for y, z in product(range(1, sy, 2), range(1, sz, 2)):
            caps.update({(-1, y, z), (sx + 1, y, z)})
        for x, z in product(range(1, sx, 2), range(1, sz, 2)):
            caps.update({(x, -1, z), (x, sy + 1, z)})
        for x, y in product(range(1, sx, 2), range(1, sy, 2)):
            caps.add((x, y, -1))
        for x, y in product(range(0, sx + 1, 2), range(0, sy + 1, 2)):
            caps.add((x, y, sz + 1))
        return caps

    def collapse(self, node: Node) -> Hashable:
        if node in self.cells:
            return node
        x, y, z = node
        sx, sy, sz = self.size
        if z > sz:
            return "top"
        if z < 0:
            return "bottom"
        if x < 0:
            return "left"
        if x > sx:
            return "right"
        if y < 0:
            return "front"
        return "back"

    def vertex_color(self, vertex: Hashable) -> Color:
        if isinstance(vertex, str):
            return Color(CUBE_LABELS[vertex])
        return _node_color(vertex)  # type: ignore[arg-type]

    def tetrahedra(self) -> list[tuple[Position, frozenset[Hashable]]]:
        """Qubit tetrahedra as (centroid, collapsed image) pairs.

        Raises:
            ConstructionError: If a collapsed vertex carries the wrong color
        """
        sx, sy, sz = self.size
        qubits = []
        origins = product(range(-2, sx + 2), range(-2, sy + 2), range(-2, sz + 2))
        for origin in origins:
            for tet in _cube_tetrahedra(origin):
                if not any(node in self.cells for node in tet):
                    continue
                image = [self.collapse(node) for node in tet]
                if len(set(image)) < 4:
                    continue
                for node, vertex in zip(tet, image):
                    if isinstance(vertex, str) and self.vertex_color(
                        vertex
                    ) != _node_color(node):
                        raise ConstructionError(
                            f"Node {node} collapses onto {vertex} with color "
                            f"{_node_color(node).value}"
                        )
                centroid = tuple(Fraction(sum(n[i] for n in tet), 4) for i in range(3))
                qubits.append((centroid, frozenset(image)))
        return qubits  # type: ignore[return-value]


def _assemble_complex(
    tetrahedra: list[tuple[Position, frozenset[Hashable]]],
    is_cell: Callable[[Hashable], bool],
    vertex_color: Callable[[Hashable], Color],
    labels: dict[str, str],
) -> ColoredComplex:
    """Read the primal complex off a list of qubit tetrahedra.

    Args:
        tetrahedra: (centroid, image) per qubit; images hold cells and facet labels
        is_cell: True for dual vertices that are cells
        vertex_color: Color of every dual vertex
        labels: Boundary label per facet

    Returns:
        The primal complex with ids assigned by sorted centroid

    Raises:
        ConstructionError: On repeated images, or dual triangles not shared by
            exactly two qubits
    """
    ordered = sorted(tetrahedra, key=lambda item: item[0])
    images = [image for _, image in ordered]
    if len(set(images)) != len(images):
        raise ConstructionError("Two qubits collapse onto the same dual tetrahedron")

    qubits = tuple(
        Qubit(
            id=q,
            position=position,
            facets=frozenset(v for v in image if isinstance(v, str)),
        )
        for q, (position, image) in enumerate(ordered)
    )

    triangles: dict[frozenset[Hashable], list[tuple[int, Hashable]]] = defaultdict(list)
    dual_edges: dict[frozenset[Hashable], list[int]] = defaultdict(list)
    dual_cells: dict[Hashable, list[int]] = defaultdict(list)
    for q, image in enumerate(images):
        for vertex in image:
            triangle = image - {vertex}
            if any(is_cell(v) for v in triangle):
                triangles[triangle].append((q, vertex))
            if is_cell(vertex):
                dual_cells[vertex].append(q)
        for pair in combinations(image, 2):
            if any(is_cell(v) for v in pair):
                dual_edges[frozenset(pair)].append(q)

    edges = []
    for owners in triangles.values():
        if len(owners) != 2:
            raise ConstructionError(
                f"Dual triangle shared by {len(owners)} qubits: "
                f"{sorted(q for q, _ in owners)}"
            )
        (q1, v1), (q2, v2) = owners
        if vertex_color(v1) != vertex_color(v2):
            raise ConstructionError(f"Qubits {q1} and {q2} disagree on edge color")
        edges.append(Edge(qubits=(min(q1, q2), max(q1, q2)), color=vertex_color(v1)))

    faces = [
        Face(
            qubits=tuple(sorted(owners)),
            colors=sorted_colors(vertex_color(v) for v in pair),  # type: ignore[arg-type]
        )
        for pair, owners in dual_edges.items()
    ]
    cells = [
        Cell(qubits=tuple(sorted(owners)), color=vertex_color(vertex))
        for vertex, owners in dual_cells.items()
    ]

    return ColoredComplex(
        qubits=qubits,
        edges=tuple(sorted(edges, key=lambda e: e.qubits)),
        faces=tuple(sorted(faces, key=lambda f: (f.qubits, f.colors))),
        cells=tuple(sorted(cells, key=lambda c: c.qubits)),
        boundary_labels=dict(labels),
    )


def build_cube(extent: Iterable[int]) -> ColoredComplex:
    """Build the color code on a rectangular solid.

    Left/right boundaries are blue, front/back red, top yellow and bottom green.

    Args:
        extent: Positive integer triple; each unit adds two lattice spacings

    Returns:
        Validated complex with an empty truncation region

    Raises:
        ExtentError: If the extent is malformed
        ConstructionError: If the generated complex fails validation
    """
    size = _check_extent(extent)
    lattice = _BoxLattice(size)
    complex_ = _assemble_complex(
        lattice.tetrahedra(),
        is_cell=lambda v: v in lattice.cells,
        vertex_color=lattice.vertex_color,
        labels=CUBE_LABELS,
    )
    _require_valid(complex_)
    logger.info(
        f"Built cube {size}: {complex_.n} qubits, {len(complex_.cells)} cells, "
        f"{len(complex_.faces)} faces"
    )
    return complex_


def build_truncated_cube(extent: Iterable[int]) -> ColoredComplex:
    """Build the cube and mark its rear-right vertical edge for truncation.

    The truncation region holds every qubit touching both the right (blue) and
    back (red) facets. It runs from the bottom (green) to the top (yellow)
    facet, and Z on the whole region is a string that branches onto all four.

    Args:
        extent: Positive integer triple

    Returns:
        Validated complex whose ``truncation_region`` is labeled PauliZ

    Raises:
        ExtentError: If the region reaches the opposite vertical edge
        ConstructionError: If validation fails
    """
    cube = build_cube(extent)
    region = frozenset(
        q.id for q in cube.qubits if {"right", "back"} <= q.facets
    )
    if not region or any(
        cube.qubits[q].facets & {"left", "front"} for q in region
    ):
        raise ExtentError(f"Extent {tuple(extent)} too small for a truncated edge")
    labels = dict(cube.boundary_labels)
    labels[TRUNCATED_FACET] = PAULI_Z
    truncated = replace(cube, boundary_labels=labels, truncation_region=region)
    _require_valid(truncated)
    logger.info(f"Truncation region holds {len(region)} qubits")
    return truncated


def build_tetrahedral15() -> ColoredComplex:
    """The 15-qubit tetrahedral color code.

    One interior dual vertex per color and four boundary facets; qubits are the
    nonempty subsets of colors whose interior vertex they use.
    """
    corners = {
        Color.R: (1, 1, 1),
        Color.G: (1, -1, -1),
        Color.Y: (-1, 1, -1),
        Color.B: (-1, -1, 1),
    }
    facet_of = {color: f"{color.value}-boundary" for color in COLOR_ORDER}
    labels = {facet_of[color]: color.value for color in COLOR_ORDER}

    tetrahedra = []
    for choice in product((False, True), repeat=4):
        if not any(choice):
            continue
        image: set[Hashable] = set()
        points = []
        for color, interior in zip(COLOR_ORDER, choice):
            scale = 1 if interior else 3
            points.append(tuple(scale * c for c in corners[color]))
            image.add(("cell", color) if interior else facet_of[color])
        centroid = tuple(Fraction(sum(p[i] for p in points), 4) for i in range(3))
        tetrahedra.append((centroid, frozenset(image)))

    def vertex_color(vertex: Hashable) -> Color:
        if isinstance(vertex, str):
            return Color(labels[vertex])
        return vertex[1]  # type: ignore[index,no-any-return]

    complex_ = _assemble_complex(
        tetrahedra,  # type: ignore[arg-type]
        is_cell=lambda v: not isinstance(v, str),
        vertex_color=vertex_color,
        labels=labels,
    )
    _require_valid(complex_)
    return complex_


def _require_valid(complex_: ColoredComplex) -> None:
    report = validate(complex_)
    if not report.passed:
        failed = ", ".join(f"{c.name} ({c.witness})" for c in report.failures())
        raise ConstructionError(f"Generated complex fails validation: {failed}")


class _Incidence:
    """Lookup tables shared by the validators."""

    def __init__(self, complex_: ColoredComplex):
        self.complex = complex_
        n = complex_.n
        self.cells_of: list[list[int]] = [[] for _ in range(n)]
        for index, cell in enumerate(complex_.cells):
            for q in cell.qubits:
                if 0 <= q < n:
                    self.cells_of[q].append(index)
        self.edges_of: list[list[int]] = [[] for _ in range(n)]
        for index, edge in enumerate(complex_.edges):
            for q in edge.qubits:
                if 0 <= q < n:
                    self.edges_of[q].append(index)
        self.faces_of: list[list[int]] = [[] for _ in range(n)]
        for index, face in enumerate(complex_.faces):
            for q in face.qubits:
                if 0 <= q < n:
                    self.faces_of[q].append(index)

    def label_color(self, facet: str) -> str | None:
        return self.complex.boundary_labels.get(facet)

    def vertex_of(self, qubit: int, color: Color) -> tuple[str, Any] | None:
        """The dual vertex of ``color`` in a qubit's tetrahedron."""
        for index in self.cells_of[qubit]:
            if self.complex.cells[index].color == color:
                return ("cell", index)
        for facet in sorted(self.complex.qubits[qubit].facets):
            if self.label_color(facet) == color.value:
                return ("facet", facet)
        return None


def _check_labels(inc: _Incidence) -> CheckResult:
    allowed = {c.value for c in COLOR_ORDER} | {PAULI_Z}
    for facet, label in sorted(inc.complex.boundary_labels.items()):
        if label not in allowed:
            return CheckResult("boundary labels", False, f"facet {facet}: {label}")
    for qubit in inc.complex.qubits:
        for facet in sorted(qubit.facets):
            if facet not in inc.complex.boundary_labels:
                return CheckResult("boundary labels", False, f"qubit {qubit.id}: {facet}")
    return CheckResult("boundary labels", True)


def _check_qubit_ids(inc: _Incidence) -> CheckResult:
    for index, qubit in enumerate(inc.complex.qubits):
        if qubit.id != index:
            return CheckResult("dense qubit ids", False, f"qubit {qubit.id} at {index}")
    return CheckResult("dense qubit ids", True)


def _check_qubit_cells(inc: _Incidence) -> CheckResult:
    """Each qubit sees each color exactly once, as a cell or as a facet."""
    for qubit in inc.complex.qubits:
        for color in COLOR_ORDER:
            cells = sum(
                1 for i in inc.cells_of[qubit.id] if inc.complex.cells[i].color == color
            )
            facets = sum(
                1 for f in qubit.facets if inc.label_color(f) == color.value
            )
            if cells + facets != 1:
                return CheckResult(
                    "qubit-cell incidence", False, f"qubit {qubit.id} color {color.value}"
                )
    return CheckResult("qubit-cell incidence", True)


def _check_interior_degree(inc: _Incidence) -> CheckResult:
    for qubit in inc.complex.qubits:
        if qubit.facets:
            continue
        edge_colors = [inc.complex.edges[i].color for i in inc.edges_of[qubit.id]]
        face_colors = [inc.complex.faces[i].colors for i in inc.faces_of[qubit.id]]
        if (
            len(edge_colors) != 4
            or len(set(edge_colors)) != 4
            or len(face_colors) != 6
            or len(set(face_colors)) != 6
        ):
            return CheckResult("interior qubit degree", False, f"qubit {qubit.id}")
    return CheckResult("interior qubit degree", True)


def _check_edges(inc: _Incidence) -> CheckResult:
    """An edge of color u joins qubits that share every dual vertex but the u one."""
    for index, edge in enumerate(inc.complex.edges):
        a, b = edge.qubits
        if not (0 <= a < inc.complex.n and 0 <= b < inc.complex.n) or a == b:
            return CheckResult("edge-cell color consistency", False, f"edge {index}")
        for color in COLOR_ORDER:
            va, vb = inc.vertex_of(a, color), inc.vertex_of(b, color)
            same = va is not None and va == vb
            if color == edge.color:
                ok = va is not None and vb is not None and not same
            else:
                ok = same
            if not ok:
                return CheckResult(
                    "edge-cell color consistency", False, f"edge {index}"
                )
    return CheckResult("edge-cell color consistency", True)


def _check_faces(inc: _Incidence) -> CheckResult:
    name = "face-cell containment"
    for index, face in enumerate(inc.complex.faces):
        support = set(face.qubits)
        if not support:
            return CheckResult(name, False, f"face {index}")
        first = face.qubits[0]
        for color in face.colors:
            containing = [
                i
                for i in inc.cells_of[first]
                if inc.complex.cells[i].color == color
                and support <= set(inc.complex.cells[i].qubits)
            ]
            if len(containing) == 1:
                continue
            shared = set.intersection(
                *(set(inc.complex.qubits[q].facets) for q in support)
            )
            if containing or not any(inc.label_color(f) == color.value for f in shared):
                return CheckResult(name, False, f"face {index}")
        for color in COLOR_ORDER:
            if color in face.colors:
                continue
            for q in face.qubits:
                partners = [
                    other
                    for i in inc.edges_of[q]
                    if inc.complex.edges[i].color == color
                    for other in inc.complex.edges[i].qubits
                    if other != q and other in support
                ]
                if len(partners) != 1:
                    return CheckResult(name, False, f"face {index}")
    return CheckResult(name, True)


def _check_boundary_soundness(inc: _Incidence) -> CheckResult:
    for index, cell in enumerate(inc.complex.cells):
        for q in cell.qubits:
            if any(
                inc.label_color(f) == cell.color.value
                for f in inc.complex.qubits[q].facets
            ):
                return CheckResult("boundary soundness", False, f"cell {index}")
    return CheckResult("boundary soundness", True)


def _check_even_overlap(inc: _Incidence) -> CheckResult:
    for index, face in enumerate(inc.complex.faces):
        counts: dict[int, int] = defaultdict(int)
        for q in face.qubits:
            for cell in inc.cells_of[q]:
                counts[cell] += 1
        for cell, count in sorted(counts.items()):
            if count % 2:
                return CheckResult(
                    "(cell,face) even-overlap", False, f"cell {cell}, face {index}"
                )
    return CheckResult("(cell,face) even-overlap", True)


def _check_triangle_closure(inc: _Incidence) -> CheckResult:
    """Each dual triangle with a cell vertex lies in exactly two qubits."""
    owners: dict[tuple[Any, ...], list[int]] = defaultdict(list)
    for qubit in inc.complex.qubits:
        vertices = [inc.vertex_of(qubit.id, color) for color in COLOR_ORDER]
        found = [v for v in vertices if v is not None]
        if len(found) != len(vertices):
            return CheckResult("triangle closure", False, f"qubit {qubit.id}")
        for opposite in range(len(found)):
            triangle = tuple(v for i, v in enumerate(found) if i != opposite)
            if any(kind == "cell" for kind, _ in triangle):
                owners[triangle].append(qubit.id)
    for qubits in owners.values():
        if len(qubits) != 2:
            return CheckResult("triangle closure", False, f"qubits {sorted(qubits)}")
    return CheckResult("triangle closure", True)


def _check_boundary_colors(inc: _Incidence) -> CheckResult:
    """Touched facets carry colors, and every colored facet is touched."""
    touched: set[str] = set()
    for qubit in inc.complex.qubits:
        for facet in sorted(qubit.facets):
            if inc.label_color(facet) == PAULI_Z:
                return CheckResult(
                    "boundary color consistency", False, f"qubit {qubit.id}: {facet}"
                )
        touched |= qubit.facets
    for facet, label in sorted(inc.complex.boundary_labels.items()):
        if label != PAULI_Z and facet not in touched:
            return CheckResult("boundary color consistency", False, f"facet {facet}")
    return CheckResult("boundary color consistency", True)


def _check_region(inc: _Incidence) -> CheckResult:
    outside = sorted(q for q in inc.complex.truncation_region if not 0 <= q < inc.complex.n)
    if outside:
        return CheckResult("truncation region", False, f"qubit {outside[0]}")
    return CheckResult("truncation region", True)


def _check_support_ids(complex_: ColoredComplex) -> CheckResult:
    """Every edge, face and cell names existing qubits only."""
    name = "support ids in range"
    n = complex_.n
    groups: tuple[tuple[str, tuple[Any, ...]], ...] = (
        ("edge", complex_.edges),
        ("face", complex_.faces),
        ("cell", complex_.cells),
    )
    for kind, items in groups:
        for index, item in enumerate(items):
            outside = [q for q in item.qubits if not 0 <= q < n]
            if outside:
                return CheckResult(name, False, f"{kind} {index}: qubit {outside[0]}")
    return CheckResult(name, True)


def _in_range_view(complex_: ColoredComplex) -> ColoredComplex:
    """Copy with qubits renumbered by position and unknown ids dropped from supports.

    Edges are kept as given; the edge check reports bad endpoints itself.
    """
    n = complex_.n

    def keep(qubits: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(q for q in qubits if 0 <= q < n)

    return replace(
        complex_,
        qubits=tuple(replace(q, id=index) for index, q in enumerate(complex_.qubits)),
        faces=tuple(replace(f, qubits=keep(f.qubits)) for f in complex_.faces),
        cells=tuple(replace(c, qubits=keep(c.qubits)) for c in complex_.cells),
    )


def validate(complex_: ColoredComplex) -> ValidationReport:
    """Check every structural rule of a colored complex.

    Ids outside the qubit range fail the first two checks; the remaining rules
    run on a view that ignores them, so damaged input never raises.

    Args:
        complex_: Complex to check

    Returns:
        ValidationReport with one entry per rule; failures carry a witness
    """
    inc = _Incidence(_in_range_view(complex_))
    checks = (
        _check_support_ids(complex_),
        _check_qubit_ids(_Incidence(complex_)),
        _check_labels(inc),
        _check_qubit_cells(inc),
        _check_boundary_colors(inc),
        _check_triangle_closure(inc),
        _check_interior_degree(inc),
        _check_edges(inc),
        _check_faces(inc),
        _check_boundary_soundness(inc),
        _check_even_overlap(inc),
        _check_region(inc),
    )
    report = ValidationReport(checks=checks)
    for check in report.failures():
        logger.debug(f"Validation failed: {check.name} ({check.witness})")
    return report


def bipartition(complex_: ColoredComplex) -> Bipartition:
    """Two-color the qubit adjacency graph (adjacency = sharing an edge).

    The lowest-id qubit of every connected component is even.

    Raises:
        NotBipartiteError: If some edge joins two qubits of equal parity
    """
    neighbours: list[list[int]] = [[] for _ in range(complex_.n)]
    for edge in complex_.edges:
        a, b = edge.qubits
        neighbours[a].append(b)
        neighbours[b].append(a)

    parity: list[int | None] = [None] * complex_.n
    for start in range(complex_.n):
        if parity[start] is not None:
            continue
        parity[start] = 0
        queue = deque([start])
        while queue:
            q = queue.popleft()
            for other in neighbours[q]:
                if parity[other] is None:
                    parity[other] = 1 - parity[q]  # type: ignore[operator]
                    queue.append(other)
                elif parity[other] == parity[q]:
                    raise NotBipartiteError(f"Edge ({q}, {other}) joins equal parities")
    return Bipartition(parity=tuple(p or 0 for p in parity))


def boundary_charges(complex_: ColoredComplex, qubit_ids: Iterable[int]) -> dict[str, int]:
    """Parity of a Z support's overlap with each colored facet.

    A Z string ending on a facet has odd overlap with that facet's qubits;
    stabilizers have even overlap everywhere, so the charges only depend on the
    logical class.
    """
    support = set(qubit_ids)
    return {
        facet: sum(1 for q in support if facet in complex_.qubits[q].facets) % 2
        for facet, label in sorted(complex_.boundary_labels.items())
        if label != PAULI_Z
    }


def color_string(
    complex_: ColoredComplex,
    color: Color,
    start: str,
    end: str,
    avoid: Iterable[int] = (),
) -> frozenset[int] | None:
    """Shortest Z string of ``color`` edges joining two facets of that color.

    Every qubit has at most one edge of each color, so such a string is a path
    that enters and leaves each ``color`` cell it visits through one edge. The
    search runs over those cells and the two facets, linked by ``color`` edges.

    Args:
        complex_: Valid complex
        color: Edge color of the string
        start: Facet the string begins on
        end: Facet the string ends on
        avoid: Qubit ids the string may not touch

    Returns:
        Qubit ids of the string, or None if every such string meets ``avoid``

    Raises:
        PreconditionError: If the facets coincide or one is not colored ``color``
    """
    if start == end:
        raise PreconditionError(f"String needs two distinct facets, got {start!r} twice")
    for facet in (start, end):
        if complex_.boundary_labels.get(facet) != color.value:
            raise PreconditionError(f"Facet {facet!r} is not colored {color.value}")

    inc = _Incidence(complex_)
    blocked = set(avoid)
    links: dict[Hashable, list[tuple[Hashable, int]]] = defaultdict(list)
    for index, edge in enumerate(complex_.edges):
        if edge.color != color or blocked & set(edge.qubits):
            continue
        a, b = (inc.vertex_of(q, color) for q in edge.qubits)
        if a is not None and b is not None:
            links[a].append((b, index))
            links[b].append((a, index))

    source, target = ("facet", start), ("facet", end)
    came_from: dict[Hashable, tuple[Hashable, int] | None] = {source: None}
    queue = deque([source])
    while queue and target not in came_from:
        node = queue.popleft()
        for other, index in links[node]:
            if other not in came_from:
                came_from[other] = (node, index)
                queue.append(other)
    if target not in came_from:
        return None

    support: set[int] = set()
    step = came_from[target]
    while step is not None:
        node, index = step
        support.update(complex_.edges[index].qubits)
        step = came_from[node]
    logger.debug(f"{color.value} string {start} -> {end}: {len(support)} qubits")
    return frozenset(support)


def string_color(complex_: ColoredComplex, qubit_ids: Iterable[int]) -> Color | None:
    """Color u for which the support is a disjoint union of u edges, if any."""
    support = set(qubit_ids)
    if not support:
        return None
    for color in COLOR_ORDER:
        inside = [
            edge
            for edge in complex_.edges
            if edge.color == color and set(edge.qubits) <= support
        ]
        covered = {q for edge in inside for q in edge.qubits}
        if covered == support and 2 * len(inside) == len(support):
            return color
    return None


def _pairs_up(
    remaining: frozenset[int],
    neighbours: dict[int, set[int]],
    seen: dict[frozenset[int], bool],
) -> bool:
    """True if the qubits split into pairs joined by edges."""
    if not remaining:
        return True
    if remaining not in seen:
        first = min(remaining)
        seen[remaining] = any(
            _pairs_up(remaining - {first, other}, neighbours, seen)
            for other in sorted(neighbours[first] & remaining)
        )
    return seen[remaining]


def branch_qubit(complex_: ColoredComplex, qubit_ids: Iterable[int]) -> int | None:
    """Junction of a branching string.

    A branching string is an odd support that becomes a disjoint union of
    edges, of any colors, once one qubit is removed. That qubit is returned;
    the lowest id wins if several work.
    """
    support = set(qubit_ids)
    if len(support) % 2 == 0:
        return None
    neighbours: dict[int, set[int]] = {q: set() for q in support}
    for edge in complex_.edges:
        a, b = edge.qubits
        if a in support and b in support:
            neighbours[a].add(b)
            neighbours[b].add(a)
    seen: dict[frozenset[int], bool] = {}
    for q in sorted(support):
        if _pairs_up(frozenset(support - {q}), neighbours, seen):
            return q
    return None


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def complex_to_dict(complex_: ColoredComplex) -> dict[str, Any]:
    """JSON-ready form of a complex, sorted for byte-stable output."""
    return {
        "qubits": [
            {
                "id": q.id,
                "pos": [_fraction_str(c) for c in q.position],
                "facets": sorted(q.facets),
            }
            for q in complex_.qubits
        ],
        "edges": [
            {"support": list(e.qubits), "color": e.color.value} for e in complex_.edges
        ],
        "faces": [
            {"support": list(f.qubits), "color": "".join(c.value for c in f.colors)}
            for f in complex_.faces
        ],
        "cells": [
            {"support": list(c.qubits), "color": c.color.value} for c in complex_.cells
        ],
        "boundaries": [
            {"facet": facet, "label": label}
            for facet, label in sorted(complex_.boundary_labels.items())
        ],
        "truncation_region": sorted(complex_.truncation_region),
    }


def complex_to_json(complex_: ColoredComplex) -> str:
    return json.dumps(complex_to_dict(complex_), indent=2)


def complex_from_dict(data: dict[str, Any]) -> ColoredComplex:
    """Rebuild a complex from its JSON form.

    Raises:
        ComplexFormatError: If keys are missing or values malformed
    """
    try:
        qubits = tuple(
            Qubit(
                id=int(item["id"]),
                position=tuple(Fraction(p) for p in item["pos"]),  # type: ignore[arg-type]
                facets=frozenset(item.get("facets", [])),
            )
            for item in data["qubits"]
        )
        edges = tuple(
            Edge(qubits=tuple(item["support"]), color=Color(item["color"]))  # type: ignore[arg-type]
            for item in data["edges"]
        )
        faces = tuple(
            Face(
                qubits=tuple(item["support"]),
                colors=sorted_colors(Color(c) for c in item["color"]),  # type: ignore[arg-type]
            )
            for item in data["faces"]
        )
        cells = tuple(
            Cell(qubits=tuple(item["support"]), color=Color(item["color"]))
            for item in data["cells"]
        )
        labels = {item["facet"]: item["label"] for item in data["boundaries"]}
        region = frozenset(int(q) for q in data.get("truncation_region", []))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ComplexFormatError(f"Malformed complex JSON: {e}") from e
    return ColoredComplex(
        qubits=qubits,
        edges=edges,
        faces=faces,
        cells=cells,
        boundary_labels=labels,
        truncation_region=region,
    )


def complex_from_json(text: str) -> ColoredComplex:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ComplexFormatError(f"Invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ComplexFormatError("Complex JSON must be an object")
    return complex_from_dict(data)
