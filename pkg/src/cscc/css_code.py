"""CSS code assembly, Pauli-Z projection and logical bases."""

import json
import logging
import string
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Any

import numpy as np

from cscc import gf2
from cscc.complex_builder import (
    COLOR_ORDER,
    Color,
    ColoredComplex,
    boundary_charges,
    color_string,
    string_color,
)
from cscc.errors import (
    CommutationError,
    ComplexFormatError,
    EmptyResultError,
    PreconditionError,
)

logger = logging.getLogger(__name__)

# Zbar_A is a blue string from left to right, Zbar_B a red one from front to back.
STRING_LOGICALS: tuple[tuple[Color, str, str], ...] = (
    (Color.B, "left", "right"),
    (Color.R, "front", "back"),
)


@dataclass(frozen=True, eq=False)
class CssCode:
    """CSS code given by binary check matrices.

    Attributes:
        hx: X-stabilizer supports, one row per cell
        hz: Z-stabilizer supports, one row per face
        qubit_map: Complex qubit id of every column
    """

    hx: np.ndarray
    hz: np.ndarray
    qubit_map: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.qubit_map)
        object.__setattr__(self, "hx", gf2.as_binary(self.hx, n))
        object.__setattr__(self, "hz", gf2.as_binary(self.hz, n))
        for name in ("hx", "hz"):
            if getattr(self, name).shape[1] != n:
                raise ComplexFormatError(
                    f"{name} has {getattr(self, name).shape[1]} columns, expected {n}"
                )

    @property
    def n(self) -> int:
        return len(self.qubit_map)

    @cached_property
    def rank_x(self) -> int:
        return gf2.rank(self.hx)

    @cached_property
    def rank_z(self) -> int:
        return gf2.rank(self.hz)

    @property
    def k(self) -> int:
        return self.n - self.rank_x - self.rank_z

    def column_of(self, qubit_id: int) -> int:
        try:
            return self.qubit_map.index(qubit_id)
        except ValueError:
            raise PreconditionError(
                f"Qubit {qubit_id} is not a column of the code"
            ) from None

    def commutes(self) -> bool:
        return not gf2.matmul(self.hx, self.hz.T).any()

    def stats(self) -> dict[str, int]:
        return {"n": self.n, "r_x": self.rank_x, "r_z": self.rank_z, "k": self.k}


@dataclass(frozen=True, eq=False)
class LogicalPair:
    label: str
    x: np.ndarray
    z: np.ndarray


@dataclass(frozen=True, eq=False)
class LogicalBasis:
    """Symplectic logical basis; ``x`` of pair i anticommutes only with ``z`` of pair i."""

    pairs: tuple[LogicalPair, ...]
    annotations: dict[str, Any] = field(default_factory=dict)

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(pair.label for pair in self.pairs)

    def xbars(self, n: int | None = None) -> np.ndarray:
        if not self.pairs:
            return np.zeros((0, n or 0), dtype=np.uint8)
        return np.array([pair.x for pair in self.pairs], dtype=np.uint8)

    def zbars(self, n: int | None = None) -> np.ndarray:
        if not self.pairs:
            return np.zeros((0, n or 0), dtype=np.uint8)
        return np.array([pair.z for pair in self.pairs], dtype=np.uint8)

    def pair(self, label: str) -> LogicalPair:
        for pair in self.pairs:
            if pair.label == label:
                return pair
        raise KeyError(label)

    def violations(self, code: CssCode) -> list[str]:
        """Describe every broken basis property; empty when the basis is valid."""
        problems = []
        xs, zs = self.xbars(code.n), self.zbars(code.n)
        gram = gf2.matmul(xs, zs.T)
        if not np.array_equal(gram, np.eye(self.k, dtype=np.uint8)):
            problems.append("Xbar/Zbar pairing is not the identity")
        if gf2.matmul(code.hz, xs.T).any():
            problems.append("an Xbar anticommutes with a Z stabilizer")
        if gf2.matmul(code.hx, zs.T).any():
            problems.append("a Zbar anticommutes with an X stabilizer")
        for pair in self.pairs:
            if gf2.in_rowspace(code.hx, pair.x):
                problems.append(f"Xbar_{pair.label} is an X stabilizer")
            if gf2.in_rowspace(code.hz, pair.z):
                problems.append(f"Zbar_{pair.label} is a Z stabilizer")
        return problems

    def to_dict(self, qubit_map: tuple[int, ...] | None = None) -> dict[str, Any]:
        def ids(bits: np.ndarray) -> list[int]:
            cols = np.flatnonzero(bits).tolist()
            return [qubit_map[c] for c in cols] if qubit_map else cols

        return {
            "pairs": [
                {"label": p.label, "x": ids(p.x), "z": ids(p.z)} for p in self.pairs
            ],
            "annotations": self.annotations,
        }


def logical_labels(k: int) -> tuple[str, ...]:
    return tuple(string.ascii_uppercase[i] for i in range(k))


def assemble(complex_: ColoredComplex) -> CssCode:
    """Build the color code: X checks on cells, Z checks on faces.

    Raises:
        CommutationError: If some cell and face overlap on an odd number of qubits
    """
    n = complex_.n
    hx = np.zeros((len(complex_.cells), n), dtype=np.uint8)
    for row, cell in enumerate(complex_.cells):
        hx[row, list(cell.qubits)] = 1
    hz = np.zeros((len(complex_.faces), n), dtype=np.uint8)
    for row, face in enumerate(complex_.faces):
        hz[row, list(face.qubits)] = 1
    code = CssCode(hx=hx, hz=hz, qubit_map=tuple(q.id for q in complex_.qubits))
    _require_commuting(code)
    logger.info(
        f"Assembled code: n={code.n}, rank(Hx)={code.rank_x}, "
        f"rank(Hz)={code.rank_z}, k={code.k}"
    )
    return code


def _require_commuting(code: CssCode) -> None:
    overlap = gf2.matmul(code.hx, code.hz.T)
    if overlap.any():
        x_row, z_row = (int(i) for i in np.argwhere(overlap)[0])
        raise CommutationError(
            f"X check {x_row} and Z check {z_row} overlap on an odd number of qubits"
        )


def _dedupe_rows(matrix: np.ndarray) -> np.ndarray:
    seen = set()
    keep = []
    for index, row in enumerate(matrix):
        key = row.tobytes()
        if row.any() and key not in seen:
            seen.add(key)
            keep.append(index)
    return matrix[keep]


def project_z(code: CssCode, region: set[int] | frozenset[int]) -> CssCode:
    """Project the qubits of ``region`` onto the +1 eigenstate of Z.

    Z checks lose the region columns. X checks are replaced by a basis of the
    X-stabilizer combinations that avoid the region, since every other X
    stabilizer anticommutes with some projected Z.

    Args:
        code: Code to project
        region: Complex qubit ids to remove

    Returns:
        Code on the remaining columns

    Raises:
        PreconditionError: If the region is empty or names unknown qubits
        EmptyResultError: If no column survives
    """
    if not region:
        raise PreconditionError("Projection region is empty")
    removed = sorted(code.column_of(q) for q in region)
    removed_set = set(removed)
    keep = [c for c in range(code.n) if c not in removed_set]
    if not keep:
        raise EmptyResultError("Projection removes every qubit")

    hz = _dedupe_rows(code.hz[:, keep])
    if code.hx.shape[0]:
        avoiding = gf2.left_kernel(code.hx[:, removed])
        combos = gf2.matmul(avoiding, code.hx)[:, keep]
        hx = gf2.row_reduce(combos).rows if combos.shape[0] else combos
    else:
        hx = np.zeros((0, len(keep)), dtype=np.uint8)

    projected = CssCode(hx=hx, hz=hz, qubit_map=tuple(code.qubit_map[c] for c in keep))
    _require_commuting(projected)
    logger.info(
        f"Projected {len(removed)} qubits: n={projected.n}, k {code.k} -> {projected.k}"
    )
    return projected


def _quotient_basis(space: np.ndarray, modulo: np.ndarray) -> list[np.ndarray]:
    """Rows of ``space`` independent modulo the row space of ``modulo``, in order."""
    base = gf2.row_reduce(modulo).rows if modulo.shape[0] else modulo
    stacked = np.concatenate([base, space], axis=0)
    offset = base.shape[0]
    return [stacked[i].copy() for i in gf2.independent_rows(stacked) if i >= offset]


def logical_basis(code: CssCode) -> LogicalBasis:
    """Extract a symplectic logical basis by Gram-Schmidt over GF(2).

    Args:
        code: CSS code with k >= 1

    Returns:
        LogicalBasis with labels A, B, ... in pivot order

    Raises:
        PreconditionError: If the code encodes no logical qubit
    """
    if code.k < 1:
        raise PreconditionError(f"Code encodes no logical qubits (k={code.k})")

    xs = _quotient_basis(gf2.kernel(code.hz), code.hx)
    zs = _quotient_basis(gf2.kernel(code.hx), code.hz)

    pairs = []
    for label in logical_labels(code.k):
        x = xs.pop(0)
        partner = next((j for j, z in enumerate(zs) if int(x @ z) % 2), None)
        if partner is None:
            raise PreconditionError("Logical operators have a degenerate pairing")
        z = zs.pop(partner)
        for other in xs:
            if int(other @ z) % 2:
                other ^= x
        for other in zs:
            if int(x @ other) % 2:
                other ^= z
        pairs.append(LogicalPair(label=label, x=x, z=z))

    logger.debug(f"Logical basis weights: {[(int(p.x.sum()), int(p.z.sum())) for p in pairs]}")
    return LogicalBasis(pairs=tuple(pairs))


def _reduce_weight(z: np.ndarray, hz: np.ndarray) -> np.ndarray:
    """Greedily add Z stabilizers while that lowers the support weight."""
    z = z.copy()
    if hz.shape[0] == 0:
        return z
    while True:
        weights = (hz ^ z).sum(axis=1)
        best = int(np.argmin(weights))
        if weights[best] >= z.sum():
            return z
        z ^= hz[best]


def _edge_colors(complex_: ColoredComplex, support: set[int]) -> Counter[str]:
    return Counter(
        edge.color.value
        for edge in complex_.edges
        if edge.qubits[0] in support and edge.qubits[1] in support
    )


def _complete_rows(rows: np.ndarray, k: int) -> np.ndarray | None:
    """Extend independent rows to an invertible k x k matrix with unit rows."""
    if gf2.rank(rows) < rows.shape[0]:
        return None
    completed = list(rows)
    for index in range(k):
        unit = np.zeros(k, dtype=np.uint8)
        unit[index] = 1
        if gf2.rank(np.array([*completed, unit])) > len(completed):
            completed.append(unit)
    return np.array(completed, dtype=np.uint8)


def match_geometric_basis(
    complex_: ColoredComplex, code: CssCode, basis: LogicalBasis
) -> LogicalBasis:
    """Relabel a logical basis after its boundary geometry.

    Zbar_A becomes a shortest blue string between the left and right facets and
    Zbar_B a shortest red string between front and back, both built from code
    qubits only. With N expressing the new Z logicals in the old ones, the X
    logicals change by the inverse transpose of N, so the pairing stays the
    identity. Remaining logicals keep their old classes and are slimmed by
    adding Z stabilizers.

    Args:
        complex_: Complex the code was assembled from
        code: Code on (a subset of) the complex qubits
        basis: Symplectic basis of ``code``

    Returns:
        Matched basis, or the input basis annotated "geometric-match: none"
    """
    labels = complex_.boundary_labels
    if basis.k < len(STRING_LOGICALS) or any(
        labels.get(facet) != color.value
        for color, *facets in STRING_LOGICALS
        for facet in facets
    ):
        return _unmatched(basis)

    columns = {q: c for c, q in enumerate(code.qubit_map)}
    outside = [q.id for q in complex_.qubits if q.id not in columns]
    zs = basis.zbars(code.n)
    generators = np.concatenate([zs, code.hz], axis=0)
    strings, rows = [], []
    for color, start, end in STRING_LOGICALS:
        support = color_string(complex_, color, start, end, avoid=outside)
        if support is None:
            return _unmatched(basis)
        z = np.zeros(code.n, dtype=np.uint8)
        z[[columns[q] for q in sorted(support)]] = 1
        coeffs = gf2.solve(generators, z)
        if coeffs is None:
            logger.warning(f"{color.value} string {start}-{end} is not a Z logical")
            return _unmatched(basis)
        strings.append(z)
        rows.append(coeffs[: basis.k])

    change = _complete_rows(np.array(rows, dtype=np.uint8), basis.k)
    if change is None:
        return _unmatched(basis)
    rest = list(gf2.matmul(change[len(strings) :], zs)) if basis.k > len(strings) else []
    new_z = [*strings, *(_reduce_weight(z, code.hz) for z in rest)]
    new_x = gf2.matmul(gf2.inverse(change).T, basis.xbars(code.n))
    pairs = tuple(
        LogicalPair(label=label, x=x, z=z)
        for label, x, z in zip(basis.labels, new_x, new_z)
    )

    annotations: dict[str, Any] = {"geometric-match": "strings"}
    for pair in pairs:
        support = support_ids(code, pair.z)
        colors = _edge_colors(complex_, support)
        color = string_color(complex_, support)
        annotations[f"Zbar_{pair.label}"] = {
            "weight": len(support),
            "string_color": color.value if color else None,
            "dominant_edge_color": colors.most_common(1)[0][0] if colors else None,
            "edge_colors": dict(sorted(colors.items())),
            "charges": boundary_charges(complex_, support),
        }
    first, second = pairs[0], pairs[1]
    annotations["overlap"] = {
        f"{first.label}{second.label}": int((first.z & second.z).sum())
    }
    logger.info(
        f"Matched logical basis: Zbar weights {[int(p.z.sum()) for p in pairs]}"
    )
    return LogicalBasis(pairs=pairs, annotations=annotations)


def _unmatched(basis: LogicalBasis) -> LogicalBasis:
    logger.info("No geometric match for the logical basis")
    return LogicalBasis(pairs=basis.pairs, annotations={"geometric-match": "none"})


def support_ids(code: CssCode, bits: np.ndarray) -> set[int]:
    return {code.qubit_map[c] for c in np.flatnonzero(bits)}


def face_pairs() -> tuple[str, ...]:
    """The six face color pairs, written like "gy"."""
    return tuple(a.value + b.value for a, b in combinations(COLOR_ORDER, 2))


def membrane_representative(
    complex_: ColoredComplex, code: CssCode, xbar: np.ndarray, pair: str
) -> np.ndarray | None:
    """Equivalent X logical supported on faces of one color pair.

    Args:
        complex_: Complex the code was assembled from
        code: Code on (a subset of) the complex qubits
        xbar: X logical in code columns
        pair: Face colors, e.g. "gy"

    Returns:
        Sum of ``pair`` faces, restricted to code columns, that differs from
        ``xbar`` by X stabilizers; None if no such sum exists
    """
    columns = {q: c for c, q in enumerate(code.qubit_map)}
    rows = [
        [columns[q] for q in face.qubits if q in columns]
        for face in complex_.faces
        if "".join(c.value for c in face.colors) == pair
    ]
    faces = np.zeros((len(rows), code.n), dtype=np.uint8)
    for index, cols in enumerate(rows):
        faces[index, cols] = 1
    faces = _dedupe_rows(faces)
    if faces.shape[0] == 0:
        return None
    coeffs = gf2.solve(np.concatenate([faces, code.hx], axis=0), xbar)
    if coeffs is None:
        return None
    return gf2.matmul(coeffs[None, : faces.shape[0]], faces)[0]


def membranes(
    complex_: ColoredComplex, code: CssCode, xbar: np.ndarray
) -> dict[str, np.ndarray]:
    """Membrane representative of ``xbar`` for every face pair that has one."""
    found: dict[str, np.ndarray] = {}
    for pair in face_pairs():
        rep = membrane_representative(complex_, code, xbar, pair)
        if rep is not None:
            found[pair] = rep
    return found


def code_to_dict(code: CssCode) -> dict[str, Any]:
    return {
        "n": code.n,
        "hx": [np.flatnonzero(row).tolist() for row in code.hx],
        "hz": [np.flatnonzero(row).tolist() for row in code.hz],
        "qubit_map": list(code.qubit_map),
    }


def code_to_json(code: CssCode) -> str:
    return json.dumps(code_to_dict(code), indent=2)


def code_from_dict(data: dict[str, Any]) -> CssCode:
    """Load a code from its row-support form.

    Raises:
        ComplexFormatError: If a field is missing or a support is out of range
        CommutationError: If the checks do not commute
    """
    try:
        n = int(data["n"])
        qubit_map = tuple(int(q) for q in data.get("qubit_map", range(n)))
        matrices = {}
        for name in ("hx", "hz"):
            rows = data[name]
            matrix = np.zeros((len(rows), n), dtype=np.uint8)
            for index, support in enumerate(rows):
                if any(not 0 <= int(c) < n for c in support):
                    raise ValueError(f"{name} row {index} leaves [0, {n})")
                matrix[index, [int(c) for c in support]] = 1
            matrices[name] = matrix
    except (KeyError, TypeError, ValueError) as e:
        raise ComplexFormatError(f"Malformed code JSON: {e}") from e
    if len(qubit_map) != n:
        raise ComplexFormatError(f"qubit_map has {len(qubit_map)} entries, expected {n}")
    code = CssCode(hx=matrices["hx"], hz=matrices["hz"], qubit_map=qubit_map)
    _require_commuting(code)
    return code


def code_from_json(text: str) -> CssCode:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ComplexFormatError(f"Invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ComplexFormatError("Code JSON must be an object")
    return code_from_dict(data)
