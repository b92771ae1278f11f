"""Phase polynomials of signed transversal T layers on CSS codes.

Applying T^c_v to every qubit v multiplies a computational basis state x by
w**f(x) with f(x) = sum_v c_v x_v. On the codespace, x ranges over the X
stabilizer generators (variables b1..br) and the X logicals (u1..uk), and f
becomes a multilinear polynomial mod 8 of degree at most three. The layer
preserves the codespace iff no monomial involves a b variable; the u-only part
is the logical gate.
"""

import logging
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np

from cscc import gf2
from cscc.complex_builder import Bipartition
from cscc.css_code import CssCode, LogicalBasis
from cscc.errors import (
    BoundExceededError,
    CodespaceNotPreservedError,
    DimensionMismatchError,
    PreconditionError,
    UnclassifiableError,
)
from cscc.pauli_algebra import DiagonalGate, transversal_t

logger = logging.getLogger(__name__)

# Enumeration bounds of the state-vector oracle.
MAX_ORACLE_QUBITS = 22
MAX_ORACLE_STABILIZERS = 16

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class SignVector:
    """Exponent of T per qubit, each +1 or -1."""

    values: tuple[int, ...]

    def __post_init__(self) -> None:
        bad = [v for v in self.values if v not in (1, -1)]
        if bad:
            raise PreconditionError(f"Sign entries must be +1 or -1, got {bad[0]}")

    def __len__(self) -> int:
        return len(self.values)

    def negated(self) -> "SignVector":
        return SignVector(tuple(-v for v in self.values))

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64)

    def gate(self) -> DiagonalGate:
        return transversal_t(self.values)


def sign_vector_from_bipartition(
    bipartition: Bipartition, qubit_map: Sequence[int] | None = None
) -> SignVector:
    """T on even qubits, T-dagger on odd ones, restricted to ``qubit_map`` columns."""
    signs = bipartition.signs()
    if qubit_map is None:
        return SignVector(signs)
    return SignVector(tuple(signs[q] for q in qubit_map))


@dataclass(frozen=True)
class PhasePolynomial:
    """Multilinear polynomial mod 8 over b1..br followed by u1..uk.

    Monomials are sorted tuples of variable indices; index t < r is b(t+1),
    otherwise u(t-r+1). Zero coefficients are never stored.
    """

    coefficients: dict[Monomial, int]
    n_stabilizers: int
    n_logicals: int

    def var_name(self, index: int) -> str:
        if index < self.n_stabilizers:
            return f"b{index + 1}"
        return f"u{index - self.n_stabilizers + 1}"

    def is_stabilizer_var(self, index: int) -> bool:
        return index < self.n_stabilizers

    def negated(self) -> "PhasePolynomial":
        return PhasePolynomial(
            {m: (-c) % 8 for m, c in self.coefficients.items()},
            self.n_stabilizers,
            self.n_logicals,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "monomials": [
                {"vars": [self.var_name(t) for t in m], "coeff": c}
                for m, c in sorted(self.coefficients.items())
            ]
        }


def evaluate(poly: PhasePolynomial, assignment: Sequence[int]) -> int:
    """Value of the polynomial mod 8 on a 0/1 assignment of b1..br, u1..uk."""
    if len(assignment) != poly.n_stabilizers + poly.n_logicals:
        raise DimensionMismatchError(
            f"Assignment has {len(assignment)} entries, expected "
            f"{poly.n_stabilizers + poly.n_logicals}"
        )
    total = sum(
        c for m, c in poly.coefficients.items() if all(assignment[t] for t in m)
    )
    return total % 8


class _Weights:
    """Signed intersection weights on integer bitsets."""

    def __init__(self, rows: list[int], signs: np.ndarray):
        self.rows = rows
        self.plus = gf2.row_to_int(signs == 1)
        self.minus = gf2.row_to_int(signs == -1)

    def weight(self, mask: int) -> int:
        return (mask & self.plus).bit_count() - (mask & self.minus).bit_count()

    def terms_from(self, t: int) -> dict[Monomial, int]:
        """All monomials whose lowest variable is ``t``."""
        rows = self.rows
        terms: dict[Monomial, int] = {(t,): self.weight(rows[t]) % 8}
        for s in range(t + 1, len(rows)):
            pair = rows[t] & rows[s]
            if not pair:
                continue
            terms[(t, s)] = (6 * self.weight(pair)) % 8
            for u in range(s + 1, len(rows)):
                triple = pair & rows[u]
                if triple:
                    terms[(t, s, u)] = (4 * self.weight(triple)) % 8
        return {m: c for m, c in terms.items() if c}


def induced_phase_polynomial(
    code: CssCode, basis: LogicalBasis, signs: SignVector, threads: int = 1
) -> PhasePolynomial:
    """Phase polynomial of the signed T layer on the codespace.

    By inclusion-exclusion the coefficient of a monomial over rows S is W(S),
    -2 W(S) or 4 W(S) mod 8 for one, two or three rows, with W(S) the signed
    weight of the rows' common support. Larger monomials vanish mod 8.

    Args:
        code: CSS code; its independent X checks become b1..br
        basis: Logical basis; its X logicals become u1..uk
        signs: T exponent per column
        threads: Worker processes over the lowest monomial variable; 1 runs
            in the calling process

    Returns:
        PhasePolynomial with all nonzero coefficients

    Raises:
        DimensionMismatchError: If the signs or logicals do not match the code length
    """
    if len(signs) != code.n:
        raise DimensionMismatchError(f"Sign vector has {len(signs)} entries, code has {code.n}")
    if any(pair.x.size != code.n for pair in basis.pairs):
        raise DimensionMismatchError("Logical basis does not match the code length")

    stabilizers = [code.hx[i] for i in gf2.independent_rows(code.hx)]
    rows = [gf2.row_to_int(r) for r in stabilizers]
    rows += [gf2.row_to_int(pair.x) for pair in basis.pairs]
    weights = _Weights(rows, signs.as_array())

    variables = range(len(rows))
    if threads > 1:
        chunk = max(1, len(rows) // (4 * threads))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(weights.terms_from, variables, chunksize=chunk))
    else:
        parts = [weights.terms_from(t) for t in variables]

    coefficients: dict[Monomial, int] = {}
    for part in parts:
        coefficients.update(part)
    poly = PhasePolynomial(coefficients, len(stabilizers), basis.k)
    logger.info(
        f"Phase polynomial over {len(stabilizers)} stabilizer and {basis.k} logical "
        f"variables: {len(coefficients)} nonzero monomials"
    )
    return poly


@dataclass(frozen=True)
class PreservationResult:
    preserved: bool
    witnesses: tuple[tuple[Monomial, int], ...] = ()

    def to_dict(self, poly: PhasePolynomial) -> dict[str, Any]:
        return {
            "preserved": self.preserved,
            "witnesses": [
                {"vars": [poly.var_name(t) for t in m], "coeff": c}
                for m, c in self.witnesses
            ],
        }


def preserves_codespace(poly: PhasePolynomial) -> PreservationResult:
    """True iff every monomial with a stabilizer variable has coefficient 0."""
    witnesses = tuple(
        (m, c)
        for m, c in sorted(poly.coefficients.items())
        if c and any(poly.is_stabilizer_var(t) for t in m)
    )
    if witnesses:
        logger.debug(f"{len(witnesses)} stabilizer monomials survive")
    return PreservationResult(preserved=not witnesses, witnesses=witnesses)


@dataclass(frozen=True)
class LogicalAction:
    """Logical diagonal gate as coefficients mod 8 over the logical qubits.

    Keys are logical indices (0 for A); ``labels`` names them.
    """

    linear: dict[int, int] = field(default_factory=dict)
    quadratic: dict[tuple[int, int], int] = field(default_factory=dict)
    cubic: dict[tuple[int, int, int], int] = field(default_factory=dict)
    labels: tuple[str, ...] = ()

    @classmethod
    def from_terms(
        cls, terms: Mapping[Monomial, int], labels: Sequence[str]
    ) -> "LogicalAction":
        """Split monomial coefficients by degree, dropping zeros.

        Raises:
            UnclassifiableError: On a nonzero monomial of degree above three
        """
        linear: dict[int, int] = {}
        quadratic: dict[tuple[int, int], int] = {}
        cubic: dict[tuple[int, int, int], int] = {}
        for monomial, coeff in sorted(terms.items()):
            coeff %= 8
            if not coeff:
                continue
            if len(monomial) == 1:
                linear[monomial[0]] = coeff
            elif len(monomial) == 2:
                quadratic[monomial] = coeff  # type: ignore[index]
            elif len(monomial) == 3:
                cubic[monomial] = coeff  # type: ignore[index]
            else:
                raise UnclassifiableError(
                    f"Degree-{len(monomial)} coefficient {coeff} on {monomial}"
                )
        return cls(linear, quadratic, cubic, tuple(labels))

    def terms(self) -> dict[Monomial, int]:
        merged: dict[Monomial, int] = {(i,): c for i, c in self.linear.items()}
        merged.update(self.quadratic)
        merged.update(self.cubic)
        return merged

    def evaluate(self, assignment: Sequence[int]) -> int:
        return sum(c for m, c in self.terms().items() if all(assignment[i] for i in m)) % 8

    def negated(self) -> "LogicalAction":
        return LogicalAction.from_terms(
            {m: -c for m, c in self.terms().items()}, self.labels
        )

    def coefficient(self, *indices: int) -> int:
        return self.terms().get(tuple(sorted(indices)), 0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "monomials": [
                {"vars": [self.labels[i] for i in m], "coeff": c}
                for m, c in sorted(self.terms().items())
            ]
        }


def logical_action(poly: PhasePolynomial, labels: Sequence[str] | None = None) -> LogicalAction:
    """Restrict a codespace-preserving polynomial to the logical variables.

    Raises:
        CodespaceNotPreservedError: If a stabilizer monomial survives
    """
    verdict = preserves_codespace(poly)
    if not verdict.preserved:
        raise CodespaceNotPreservedError(
            f"{len(verdict.witnesses)} stabilizer monomials have nonzero coefficients",
            witnesses=verdict.witnesses,
        )
    if labels is None:
        labels = tuple(f"u{i + 1}" for i in range(poly.n_logicals))
    offset = poly.n_stabilizers
    return LogicalAction.from_terms(
        {tuple(t - offset for t in m): c for m, c in poly.coefficients.items()},
        labels,
    )


@dataclass(frozen=True)
class GateTerm:
    kind: str
    qubits: tuple[str, ...]
    power: int = 1

    @property
    def text(self) -> str:
        if self.power == 1:
            name = self.kind
        elif self.power == -1:
            name = f"{self.kind}†"
        else:
            name = f"{self.kind}^{self.power}"
        return f"{name} on ({','.join(self.qubits)})"

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, "qubits": list(self.qubits), "power": self.power}


@dataclass(frozen=True)
class GateDescription:
    terms: tuple[GateTerm, ...] = ()

    @property
    def text(self) -> str:
        return " · ".join(t.text for t in self.terms) if self.terms else "identity"

    def to_dict(self) -> dict[str, Any]:
        return {"gates": [t.to_dict() for t in self.terms], "text": self.text}


# Coefficient contributed by one unit power of each gate kind.
_UNIT_COEFF = {"T": 1, "S": 2, "Z": 4, "CS": 2, "CZ": 4, "CCZ": 4}

_LINEAR = {2: ("S", 1), 4: ("Z", 1), 6: ("S", -1)}
_QUADRATIC = {2: ("CS", 1), 4: ("CZ", 1), 6: ("CS", -1)}
_T_POWERS = {1: 1, 3: 3, 5: -3, 7: -1}


def classify_gate(action: LogicalAction) -> GateDescription:
    """Name the logical gate as a product of T/S/Z, CS/CZ and CCZ factors.

    Raises:
        UnclassifiableError: On an odd two-qubit or a non-4 three-qubit coefficient
    """

    def names(indices: Iterable[int]) -> tuple[str, ...]:
        return tuple(action.labels[i] for i in indices)

    terms = []
    for index, coeff in sorted(action.linear.items()):
        if coeff % 2:
            terms.append(GateTerm("T", names([index]), _T_POWERS[coeff]))
        else:
            kind, power = _LINEAR[coeff]
            terms.append(GateTerm(kind, names([index]), power))
    for pair, coeff in sorted(action.quadratic.items()):
        if coeff not in _QUADRATIC:
            raise UnclassifiableError(f"Two-qubit coefficient {coeff} on {names(pair)}")
        kind, power = _QUADRATIC[coeff]
        terms.append(GateTerm(kind, names(pair), power))
    for triple, coeff in sorted(action.cubic.items()):
        if coeff != 4:
            raise UnclassifiableError(f"Three-qubit coefficient {coeff} on {names(triple)}")
        terms.append(GateTerm("CCZ", names(triple)))
    return GateDescription(tuple(terms))


def action_from_gates(description: GateDescription, labels: Sequence[str]) -> LogicalAction:
    """Coefficient maps of a gate description; inverse of :func:`classify_gate`."""
    index = {label: i for i, label in enumerate(labels)}
    terms: dict[Monomial, int] = {}
    for term in description.terms:
        monomial = tuple(sorted(index[q] for q in term.qubits))
        terms[monomial] = terms.get(monomial, 0) + _UNIT_COEFF[term.kind] * term.power
    return LogicalAction.from_terms(terms, labels)


def _mobius(values: np.ndarray, k: int) -> np.ndarray:
    """Multilinear coefficients mod 8 from the values on all 2**k assignments."""
    coeffs = values.astype(np.int64).copy()
    index = np.arange(1 << k)
    for bit in range(k):
        upper = index[((index >> bit) & 1) == 1]
        coeffs[upper] -= coeffs[upper ^ (1 << bit)]
    return coeffs % 8


def statevector_logical_action(
    code: CssCode, basis: LogicalBasis, signs: SignVector
) -> LogicalAction:
    """Logical action of the signed T layer computed from explicit codewords.

    Every logical basis state is the uniform superposition over its coset of the
    X-stabilizer group. The layer must multiply all of a coset's bitstrings by
    one common phase w**f(u); f is then interpolated.

    Raises:
        BoundExceededError: If the code is too large to enumerate
        CodespaceNotPreservedError: If some codeword is not mapped to a multiple
            of itself; ``witnesses`` holds its logical assignment
    """
    if len(signs) != code.n:
        raise DimensionMismatchError(f"Sign vector has {len(signs)} entries, code has {code.n}")
    if code.n > MAX_ORACLE_QUBITS or code.rank_x > MAX_ORACLE_STABILIZERS:
        raise BoundExceededError(
            f"Oracle limited to n <= {MAX_ORACLE_QUBITS} and rank(Hx) <= "
            f"{MAX_ORACLE_STABILIZERS}, got n={code.n}, rank(Hx)={code.rank_x}"
        )

    stabilizers = gf2.row_reduce(code.hx).rows if code.hx.shape[0] else code.hx
    r, k = stabilizers.shape[0], basis.k
    choices = (np.arange(1 << r)[:, None] >> np.arange(r)) & 1
    group = gf2.matmul(choices, stabilizers)
    xbars = basis.xbars(code.n)
    c = signs.as_array()

    values = np.zeros(1 << k, dtype=np.int64)
    for u in range(1 << k):
        bits = np.array([(u >> i) & 1 for i in range(k)], dtype=np.uint8)
        offset = gf2.matmul(bits[None, :], xbars)[0] if k else np.zeros(code.n, np.uint8)
        exponents = ((group ^ offset).astype(np.int64) @ c) % 8
        if np.any(exponents != exponents[0]):
            raise CodespaceNotPreservedError(
                f"Codeword {bits.tolist()} picks up unequal phases across its coset",
                witnesses=tuple(bits.tolist()),
            )
        values[u] = exponents[0]

    coeffs = _mobius(values, k)
    terms = {
        tuple(i for i in range(k) if (mask >> i) & 1): int(coeffs[mask])
        for mask in range(1, 1 << k)
    }
    return LogicalAction.from_terms(terms, basis.labels)
