"""Tests for complex_builder module."""

import json
from dataclasses import replace
from fractions import Fraction
from itertools import combinations, product

import pytest

from cscc.complex_builder import (
    PAULI_Z,
    Cell,
    Color,
    ColoredComplex,
    Edge,
    Face,
    Qubit,
    bipartition,
    boundary_charges,
    branch_qubit,
    build_cube,
    build_tetrahedral15,
    build_truncated_cube,
    color_string,
    complex_from_json,
    complex_to_json,
    string_color,
    validate,
)
from cscc.errors import (
    ComplexFormatError,
    ExtentError,
    NotBipartiteError,
    PreconditionError,
)


def make_qubit(qubit_id: int) -> Qubit:
    """Create a qubit on the x axis."""
    return Qubit(id=qubit_id, position=(Fraction(qubit_id), Fraction(0), Fraction(0)))


def make_path_complex(n: int) -> ColoredComplex:
    """Create a bare complex whose qubits form a path."""
    return ColoredComplex(
        qubits=tuple(make_qubit(q) for q in range(n)),
        edges=tuple(Edge(qubits=(q, q + 1), color=Color.R) for q in range(n - 1)),
        faces=(),
        cells=(),
    )


def enumerate_cube_counts(extent: tuple[int, int, int]) -> dict[str, int]:
    """Count cube elements straight from the lattice, without the builder.

    Every even node spans one corner tetrahedron per octant and every unit
    cube holds one tetrahedron on its odd corners. Nodes outside the box and
    its caps collapse onto the facet they lie beyond.
    """
    sx, sy, sz = (2 * e for e in extent)
    cells = set(product(range(sx + 1), range(sy + 1), range(sz + 1)))
    odd_y, odd_z = range(1, sy, 2), range(1, sz, 2)
    cells |= {(x, y, z) for x in (-1, sx + 1) for y in odd_y for z in odd_z}
    cells |= {(x, y, z) for y in (-1, sy + 1) for x in range(1, sx, 2) for z in odd_z}
    cells |= {(x, y, -1) for x in range(1, sx, 2) for y in range(1, sy, 2)}
    cells |= {(x, y, sz + 1) for x in range(0, sx + 1, 2) for y in range(0, sy + 1, 2)}

    def collapse(node: tuple[int, int, int]) -> object:
        x, y, z = node
        if node in cells:
            return node
        for beyond, facet in (
            (z > sz, "top"),
            (z < 0, "bottom"),
            (x < 0, "left"),
            (x > sx, "right"),
            (y < 0, "front"),
        ):
            if beyond:
                return facet
        return "back"

    span = [range(-2, s + 3) for s in (sx, sy, sz)]
    tets: set[frozenset[tuple[int, int, int]]] = set()
    for node in product(*span):
        if sum(node) % 2:
            continue
        x, y, z = node
        for dx, dy, dz in product((-1, 1), repeat=3):
            tets.add(frozenset({node, (x + dx, y, z), (x, y + dy, z), (x, y, z + dz)}))
    for x, y, z in product(*(range(-2, s + 2) for s in (sx, sy, sz))):
        corners = product((x, x + 1), (y, y + 1), (z, z + 1))
        tets.add(frozenset(c for c in corners if sum(c) % 2))

    images: set[frozenset[object]] = set()
    for tet in tets:
        if not tet & cells:
            continue
        image = frozenset(collapse(node) for node in tet)
        if len(image) == 4:
            images.add(image)
    triangles = {image - {v} for image in images for v in image}
    pairs = {frozenset(p) for image in images for p in combinations(image, 2)}
    return {
        "qubits": len(images),
        "edges": sum(1 for t in triangles if t & cells),
        "faces": sum(1 for p in pairs if p & cells),
        "cells": len({v for image in images for v in image if v in cells}),
        "truncation_region": 0,
    }


class TestBuildTetrahedral15:
    """Tests for the 15-qubit tetrahedral complex."""

    def test_element_counts(self) -> None:
        """Test qubit, cell and face counts."""
        complex_ = build_tetrahedral15()

        assert complex_.n == 15
        assert len(complex_.cells) == 4
        assert all(len(cell.qubits) == 8 for cell in complex_.cells)
        assert len(complex_.faces) == 18
        assert all(len(face.qubits) == 4 for face in complex_.faces)

    def test_one_cell_per_color(self) -> None:
        """Test the four cells carry the four colors."""
        colors = {cell.color for cell in build_tetrahedral15().cells}

        assert colors == set(Color)

    def test_validates(self) -> None:
        """Test every structural check passes."""
        assert validate(build_tetrahedral15()).passed

    def test_single_interior_qubit(self) -> None:
        """Test exactly one qubit touches no boundary facet."""
        interior = [q for q in build_tetrahedral15().qubits if not q.facets]

        assert len(interior) == 1


class TestBuildCube:
    """Tests for build_cube."""

    @pytest.mark.parametrize("extent", [(1, 1, 1), (2, 1, 1), (1, 2, 3), (2, 2, 2)])
    def test_generated_complexes_validate(self, extent: tuple[int, int, int]) -> None:
        """Test generated complexes pass every check."""
        report = validate(build_cube(extent))

        assert report.passed, report.failures()

    @pytest.mark.slow
    @pytest.mark.parametrize("extent", [(3, 3, 3), (4, 4, 4)])
    def test_larger_complexes_validate(self, extent: tuple[int, int, int]) -> None:
        """Test validity on larger extents."""
        assert validate(build_cube(extent)).passed

    @pytest.mark.parametrize("extent", [(1, 1, 1), (2, 1, 1)])
    def test_counts_match_lattice_enumeration(self, extent: tuple[int, int, int]) -> None:
        """Test element counts against a direct count over the lattice."""
        assert build_cube(extent).stats() == enumerate_cube_counts(extent)

    def test_boundary_labels(self) -> None:
        """Test the six facets and their colors."""
        labels = build_cube((1, 1, 1)).boundary_labels

        assert labels == {
            "left": "b",
            "right": "b",
            "front": "r",
            "back": "r",
            "bottom": "g",
            "top": "y",
        }

    def test_ids_follow_positions(self) -> None:
        """Test ids are dense and ordered by position."""
        qubits = build_cube((1, 1, 1)).qubits

        assert [q.id for q in qubits] == list(range(len(qubits)))
        assert [q.position for q in qubits] == sorted(q.position for q in qubits)

    def test_every_facet_is_touched(self) -> None:
        """Test each facet has qubits."""
        complex_ = build_cube((1, 1, 1))
        touched = set().union(*(q.facets for q in complex_.qubits))

        assert touched == set(complex_.boundary_labels)

    def test_deterministic(self) -> None:
        """Test two builds serialize identically."""
        assert complex_to_json(build_cube((1, 2, 1))) == complex_to_json(
            build_cube((1, 2, 1))
        )

    @pytest.mark.parametrize("extent", [(0, 1, 1), (1, -1, 1), (1, 1)])
    def test_invalid_extent(self, extent: tuple[int, ...]) -> None:
        """Test malformed extents are rejected."""
        with pytest.raises(ExtentError):
            build_cube(extent)


class TestBuildTruncatedCube:
    """Tests for build_truncated_cube."""

    def test_region_is_labeled(self) -> None:
        """Test the truncation region is nonempty and labeled PauliZ."""
        complex_ = build_truncated_cube((1, 1, 1))

        assert complex_.truncation_region
        assert complex_.boundary_labels["truncated"] == PAULI_Z
        assert validate(complex_).passed

    def test_region_lies_in_strip(self) -> None:
        """Test every region qubit sits in the rear-right vertical strip."""
        extent = (2, 2, 2)
        complex_ = build_truncated_cube(extent)
        x_min, y_min = Fraction(2 * extent[0]), Fraction(2 * extent[1])

        for q in complex_.truncation_region:
            x, y, _ = complex_.qubits[q].position
            assert x_min < x < x_min + 1
            assert y_min < y < y_min + 1

    def test_region_touches_both_facets(self) -> None:
        """Test region qubits touch the right and back facets only."""
        complex_ = build_truncated_cube((1, 1, 1))

        for q in complex_.truncation_region:
            facets = complex_.qubits[q].facets
            assert {"right", "back"} <= facets
            assert not facets & {"left", "front"}

    def test_region_runs_bottom_to_top(self) -> None:
        """Test the region reaches the bottom and top facets."""
        complex_ = build_truncated_cube((1, 1, 1))
        touched = set().union(*(complex_.qubits[q].facets for q in complex_.truncation_region))

        assert {"bottom", "top"} <= touched

    def test_region_z_charges(self) -> None:
        """Test Z on the region is odd on right, back, bottom and top."""
        complex_ = build_truncated_cube((1, 1, 1))

        charges = boundary_charges(complex_, complex_.truncation_region)

        assert charges == {
            "back": 1,
            "bottom": 1,
            "front": 0,
            "left": 0,
            "right": 1,
            "top": 1,
        }


class TestValidate:
    """Tests for validate on damaged complexes."""

    def test_missing_cell_qubit(self) -> None:
        """Test dropping a qubit from a cell breaks even overlap."""
        complex_ = build_tetrahedral15()
        first = complex_.cells[0]
        damaged = replace(
            complex_,
            cells=(Cell(qubits=first.qubits[1:], color=first.color), *complex_.cells[1:]),
        )

        report = validate(damaged)

        assert not report.passed
        assert not report.get("(cell,face) even-overlap").passed

    def test_recolored_edge(self) -> None:
        """Test a recolored edge is caught with the edge as witness."""
        complex_ = build_tetrahedral15()
        edge = complex_.edges[0]
        other = next(c for c in Color if c != edge.color)
        damaged = replace(
            complex_, edges=(Edge(qubits=edge.qubits, color=other), *complex_.edges[1:])
        )

        check = validate(damaged).get("edge-cell color consistency")

        assert not check.passed
        assert check.witness == "edge 0"

    def test_region_out_of_range(self) -> None:
        """Test region ids must be qubits."""
        complex_ = replace(build_tetrahedral15(), truncation_region=frozenset({99}))

        assert not validate(complex_).get("truncation region").passed

    def test_dropped_qubit_opens_triangles(self) -> None:
        """Test removing a qubit leaves dual triangles with one owner."""
        complex_ = build_tetrahedral15()
        last = complex_.n - 1
        damaged = replace(
            complex_,
            qubits=complex_.qubits[:-1],
            edges=tuple(e for e in complex_.edges if last not in e.qubits),
            faces=tuple(
                Face(qubits=tuple(q for q in f.qubits if q != last), colors=f.colors)
                for f in complex_.faces
            ),
            cells=tuple(
                Cell(qubits=tuple(q for q in c.qubits if q != last), color=c.color)
                for c in complex_.cells
            ),
        )

        report = validate(damaged)

        assert report.get("support ids in range").passed
        assert not report.get("triangle closure").passed

    def test_face_with_unknown_qubit(self) -> None:
        """Test an out-of-range face id is reported instead of raising."""
        complex_ = build_tetrahedral15()
        first = complex_.faces[0]
        damaged = replace(
            complex_,
            faces=(Face(qubits=(*first.qubits, 99), colors=first.colors), *complex_.faces[1:]),
        )

        report = validate(damaged)

        assert not report.passed
        assert report.get("support ids in range").witness == "face 0: qubit 99"
        assert report.get("(cell,face) even-overlap").passed

    def test_cell_with_unknown_qubit(self) -> None:
        """Test an out-of-range cell id is reported instead of raising."""
        complex_ = build_tetrahedral15()
        first = complex_.cells[0]
        damaged = replace(
            complex_,
            cells=(Cell(qubits=(-1, *first.qubits), color=first.color), *complex_.cells[1:]),
        )

        check = validate(damaged).get("support ids in range")

        assert not check.passed
        assert check.witness == "cell 0: qubit -1"

    def test_sparse_qubit_ids(self) -> None:
        """Test non-dense qubit ids fail without breaking later checks."""
        complex_ = build_tetrahedral15()
        last = complex_.qubits[-1]
        damaged = replace(complex_, qubits=(*complex_.qubits[:-1], replace(last, id=99)))

        report = validate(damaged)

        assert not report.get("dense qubit ids").passed
        assert report.get("qubit-cell incidence").passed

    def test_damaged_json_validates_without_error(self) -> None:
        """Test a loaded document with a bad face id yields a failing report."""
        data = json.loads(complex_to_json(build_tetrahedral15()))
        data["faces"][0]["support"].append(99)

        report = validate(complex_from_json(json.dumps(data)))

        assert [c.name for c in report.failures()] == ["support ids in range"]

    def test_untouched_facet(self) -> None:
        """Test a colored facet no qubit touches is inconsistent."""
        complex_ = build_tetrahedral15()
        labels = {**complex_.boundary_labels, "extra": "g"}

        check = validate(replace(complex_, boundary_labels=labels)).get(
            "boundary color consistency"
        )

        assert not check.passed
        assert check.witness == "facet extra"

    def test_qubit_on_pauliz_facet(self) -> None:
        """Test qubits may not touch a PauliZ facet."""
        complex_ = build_truncated_cube((1, 1, 1))
        first = complex_.qubits[0]
        damaged = replace(
            complex_,
            qubits=(replace(first, facets=first.facets | {"truncated"}), *complex_.qubits[1:]),
        )

        assert not validate(damaged).get("boundary color consistency").passed

    def test_unknown_label(self) -> None:
        """Test boundary labels must be colors or PauliZ."""
        complex_ = build_tetrahedral15()
        labels = {**complex_.boundary_labels, "extra": "purple"}

        report = validate(replace(complex_, boundary_labels=labels))

        assert not report.get("boundary labels").passed


class TestBipartition:
    """Tests for bipartition."""

    def test_single_edge(self) -> None:
        """Test two joined qubits get opposite parities."""
        split = bipartition(make_path_complex(2))

        assert split.parity == (0, 1)
        assert split.signs() == (1, -1)

    def test_odd_cycle(self) -> None:
        """Test a triangle is not bipartite."""
        triangle = replace(
            make_path_complex(3),
            edges=(
                Edge(qubits=(0, 1), color=Color.R),
                Edge(qubits=(1, 2), color=Color.G),
                Edge(qubits=(0, 2), color=Color.B),
            ),
        )

        with pytest.raises(NotBipartiteError):
            bipartition(triangle)

    @pytest.mark.parametrize("extent", [(1, 1, 1), (2, 2, 2)])
    def test_edges_join_opposite_parities(self, extent: tuple[int, int, int]) -> None:
        """Test every lattice edge joins an even and an odd qubit."""
        complex_ = build_cube(extent)
        split = bipartition(complex_)

        for edge in complex_.edges:
            a, b = edge.qubits
            assert split.parity[a] != split.parity[b]

    def test_tetrahedral_split(self) -> None:
        """Test the 15-qubit code splits into 8 and 7 qubits."""
        summary = bipartition(build_tetrahedral15()).summary()

        assert sorted(summary.values()) == [7, 8]


class TestBoundaryCharges:
    """Tests for boundary_charges."""

    def test_faces_carry_no_charge(self) -> None:
        """Test Z stabilizers have even overlap with every facet."""
        complex_ = build_cube((1, 1, 1))

        for face in complex_.faces:
            assert not any(boundary_charges(complex_, face.qubits).values())

    def test_pauliz_facet_is_skipped(self) -> None:
        """Test the truncated facet has no charge entry."""
        complex_ = build_truncated_cube((1, 1, 1))

        assert "truncated" not in boundary_charges(complex_, [0])


class TestColorString:
    """Tests for color_string, string_color and branch_qubit."""

    @pytest.mark.parametrize(
        ("color", "start", "end"),
        [(Color.B, "left", "right"), (Color.R, "front", "back")],
    )
    def test_string_is_a_z_logical(self, color: Color, start: str, end: str) -> None:
        """Test the string meets every cell evenly and ends on its two facets."""
        complex_ = build_cube((2, 2, 2))

        support = color_string(complex_, color, start, end)

        assert support is not None
        assert string_color(complex_, support) == color
        for cell in complex_.cells:
            assert len(support & set(cell.qubits)) % 2 == 0
        charges = boundary_charges(complex_, support)
        assert {f for f, c in charges.items() if c} == {start, end}

    def test_avoids_truncation_region(self) -> None:
        """Test the blue string routes around the truncated edge."""
        complex_ = build_truncated_cube((1, 1, 1))

        support = color_string(
            complex_, Color.B, "left", "right", avoid=complex_.truncation_region
        )

        assert support is not None
        assert not support & complex_.truncation_region

    def test_fully_blocked(self) -> None:
        """Test None when every qubit is off limits."""
        complex_ = build_cube((1, 1, 1))

        assert color_string(complex_, Color.B, "left", "right", avoid=range(complex_.n)) is None

    def test_wrong_facet_color(self) -> None:
        """Test a red facet cannot end a blue string."""
        with pytest.raises(PreconditionError):
            color_string(build_cube((1, 1, 1)), Color.B, "left", "front")

    def test_mixed_support_has_no_color(self) -> None:
        """Test an edge plus one stray qubit is not a string."""
        complex_ = build_tetrahedral15()
        red = next(e for e in complex_.edges if e.color == Color.R)
        stray = next(q.id for q in complex_.qubits if q.id not in red.qubits)

        assert string_color(complex_, red.qubits) == Color.R
        assert string_color(complex_, {*red.qubits, stray}) is None
        assert string_color(complex_, ()) is None

    def test_branch_at_lone_qubit(self) -> None:
        """Test a single qubit branches at itself."""
        assert branch_qubit(build_tetrahedral15(), {7}) == 7

    def test_even_support_does_not_branch(self) -> None:
        """Test an edge is a string, not a branch."""
        complex_ = build_tetrahedral15()
        red = next(e for e in complex_.edges if e.color == Color.R)

        assert branch_qubit(complex_, red.qubits) is None

    def test_branch_leaves_an_edge(self) -> None:
        """Test removing the branch qubit from edge plus stray leaves an edge."""
        complex_ = build_tetrahedral15()
        red = next(e for e in complex_.edges if e.color == Color.R)
        stray = next(q.id for q in complex_.qubits if q.id not in red.qubits)
        support = {*red.qubits, stray}

        branch = branch_qubit(complex_, support)

        assert branch in support
        rest = set(support - {branch})
        assert any(set(e.qubits) == rest for e in complex_.edges)


class TestSerialization:
    """Tests for complex JSON round trips."""

    def test_round_trip(self) -> None:
        """Test loading a dumped complex reproduces the same document."""
        complex_ = build_truncated_cube((1, 1, 1))
        text = complex_to_json(complex_)

        loaded = complex_from_json(text)

        assert complex_to_json(loaded) == text
        assert validate(loaded).passed

    def test_document_fields(self) -> None:
        """Test the JSON layout."""
        data = json.loads(complex_to_json(build_tetrahedral15()))

        assert set(data) == {
            "qubits",
            "edges",
            "faces",
            "cells",
            "boundaries",
            "truncation_region",
        }
        assert set(data["qubits"][0]) == {"id", "pos", "facets"}
        assert all("/" in p for p in data["qubits"][0]["pos"])

    @pytest.mark.parametrize("text", ["not json", "[]", '{"qubits": []}'])
    def test_malformed(self, text: str) -> None:
        """Test malformed documents are rejected."""
        with pytest.raises(ComplexFormatError):
            complex_from_json(text)
