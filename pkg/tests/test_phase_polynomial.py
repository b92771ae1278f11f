"""Tests for phase_polynomial module."""

from itertools import product

import numpy as np
import pytest

from cscc import gf2
from cscc.complex_builder import bipartition, build_tetrahedral15
from cscc.css_code import CssCode, LogicalBasis, LogicalPair, assemble, logical_basis
from cscc.errors import (
    BoundExceededError,
    CodespaceNotPreservedError,
    DimensionMismatchError,
    PreconditionError,
    UnclassifiableError,
)
from cscc.phase_polynomial import (
    GateDescription,
    GateTerm,
    LogicalAction,
    PhasePolynomial,
    SignVector,
    action_from_gates,
    classify_gate,
    evaluate,
    induced_phase_polynomial,
    logical_action,
    preserves_codespace,
    sign_vector_from_bipartition,
    statevector_logical_action,
)
from cscc.verify import random_css_code

NO_LOGICALS = LogicalBasis(pairs=())


def make_code(hx: list[list[int]], n: int) -> CssCode:
    """Create a code with X checks only."""
    return CssCode(
        hx=np.array(hx, dtype=np.uint8).reshape(len(hx), n),
        hz=np.zeros((0, n), dtype=np.uint8),
        qubit_map=tuple(range(n)),
    )


def tetrahedral_setup() -> tuple[CssCode, LogicalBasis, SignVector]:
    """Create the 15-qubit code, its basis and bipartition signs."""
    complex_ = build_tetrahedral15()
    code = assemble(complex_)
    signs = sign_vector_from_bipartition(bipartition(complex_), code.qubit_map)
    return code, logical_basis(code), signs


class TestSignVector:
    """Tests for SignVector."""

    def test_rejects_other_exponents(self) -> None:
        """Test only +1 and -1 are allowed."""
        with pytest.raises(PreconditionError):
            SignVector((1, 2))

    def test_from_bipartition_with_map(self) -> None:
        """Test signs are restricted to the mapped qubits."""
        complex_ = build_tetrahedral15()
        split = bipartition(complex_)

        signs = sign_vector_from_bipartition(split, [3, 0])

        assert signs.values == (split.signs()[3], split.signs()[0])


class TestInducedPhasePolynomial:
    """Tests for induced_phase_polynomial."""

    def test_overlapping_rows(self) -> None:
        """Test two rows sharing one qubit."""
        code = make_code([[1, 1, 0], [0, 1, 1]], 3)

        poly = induced_phase_polynomial(code, NO_LOGICALS, SignVector((1, 1, 1)))

        assert poly.coefficients == {(0,): 2, (1,): 2, (0, 1): 6}
        assert poly.to_dict()["monomials"][1] == {"vars": ["b1", "b2"], "coeff": 6}

    def test_weight_eight_row_vanishes(self) -> None:
        """Test a single weight-8 row with uniform signs gives the zero polynomial."""
        code = make_code([[1] * 8], 8)

        poly = induced_phase_polynomial(code, NO_LOGICALS, SignVector((1,) * 8))

        assert poly.coefficients == {}

    def test_tetrahedral_is_logical_t(self) -> None:
        """Test the 15-qubit code has no stabilizer terms and a T-type logical term."""
        code, basis, signs = tetrahedral_setup()

        poly = induced_phase_polynomial(code, basis, signs)

        assert preserves_codespace(poly).preserved
        assert poly.n_stabilizers == 4
        assert poly.coefficients == {(4,): poly.coefficients[(4,)]}
        assert poly.coefficients[(4,)] in (1, 7)

    def test_sign_flip_negates(self) -> None:
        """Test negating the signs negates every coefficient."""
        rng = np.random.default_rng(3)
        code = random_css_code(rng)
        basis = logical_basis(code)
        signs = SignVector(tuple(int(s) for s in rng.choice([1, -1], size=code.n)))

        flipped = induced_phase_polynomial(code, basis, signs.negated())

        assert flipped == induced_phase_polynomial(code, basis, signs).negated()

    def test_workers_do_not_change_result(self) -> None:
        """Test the process pool merges deterministically."""
        code, basis, signs = tetrahedral_setup()

        assert induced_phase_polynomial(
            code, basis, signs, threads=4
        ) == induced_phase_polynomial(code, basis, signs)

    def test_dimension_mismatch(self) -> None:
        """Test sign vectors must match the code length."""
        with pytest.raises(DimensionMismatchError):
            induced_phase_polynomial(make_code([[1, 1]], 2), NO_LOGICALS, SignVector((1,)))

    @pytest.mark.parametrize("seed", range(5))
    def test_polynomial_reproduces_phases(self, seed: int) -> None:
        """Test evaluation matches the signed weight of every coset element."""
        rng = np.random.default_rng(seed)
        code = random_css_code(rng, max_n=8)
        basis = logical_basis(code)
        signs = SignVector(tuple(int(s) for s in rng.choice([1, -1], size=code.n)))
        checks = code.hx[gf2.independent_rows(code.hx)].reshape(-1, code.n)
        rows = np.concatenate([checks, basis.xbars(code.n)])

        poly = induced_phase_polynomial(code, basis, signs)

        for assignment in product((0, 1), repeat=rows.shape[0]):
            x = gf2.matmul(np.array([assignment]), rows)[0]
            expected = int(x.astype(np.int64) @ signs.as_array()) % 8
            assert evaluate(poly, assignment) == expected


class TestPreservesCodespace:
    """Tests for preserves_codespace."""

    def test_logical_only(self) -> None:
        """Test a polynomial in logical variables only is preserving."""
        poly = PhasePolynomial({(0, 1): 2}, n_stabilizers=0, n_logicals=2)

        assert preserves_codespace(poly).preserved

    def test_stabilizer_monomial(self) -> None:
        """Test a surviving b monomial is a witness."""
        poly = PhasePolynomial({(0, 1): 4}, n_stabilizers=1, n_logicals=1)

        result = preserves_codespace(poly)

        assert not result.preserved
        assert result.witnesses == (((0, 1), 4),)
        assert result.to_dict(poly)["witnesses"] == [{"vars": ["b1", "u1"], "coeff": 4}]


class TestLogicalAction:
    """Tests for logical_action."""

    def test_control_s(self) -> None:
        """Test 2 u1 u2 becomes a quadratic term."""
        poly = PhasePolynomial({(0, 1): 2}, n_stabilizers=0, n_logicals=2)

        action = logical_action(poly, ("A", "B"))

        assert action.quadratic == {(0, 1): 2}
        assert not action.linear and not action.cubic

    def test_shifts_past_stabilizers(self) -> None:
        """Test logical indices start after the stabilizer variables."""
        poly = PhasePolynomial({(2,): 1}, n_stabilizers=2, n_logicals=1)

        assert logical_action(poly).linear == {0: 1}

    def test_not_preserved(self) -> None:
        """Test the action is undefined when a b monomial survives."""
        poly = PhasePolynomial({(0,): 2}, n_stabilizers=1, n_logicals=1)

        with pytest.raises(CodespaceNotPreservedError) as excinfo:
            logical_action(poly)

        assert excinfo.value.witnesses == (((0,), 2),)


class TestClassifyGate:
    """Tests for classify_gate and action_from_gates."""

    def test_control_s(self) -> None:
        """Test coefficient 2 on a pair is CS."""
        action = LogicalAction(quadratic={(0, 1): 2}, labels=("A", "B"))

        assert classify_gate(action).text == "CS on (A,B)"

    def test_control_s_dagger(self) -> None:
        """Test coefficient 6 on a pair is CS dagger."""
        action = LogicalAction(quadratic={(0, 1): 6}, labels=("A", "B"))

        assert classify_gate(action).terms == (GateTerm("CS", ("A", "B"), -1),)

    def test_identity(self) -> None:
        """Test empty maps are the identity."""
        assert classify_gate(LogicalAction(labels=("A",))).text == "identity"

    def test_composite(self) -> None:
        """Test Z on A combined with CZ."""
        action = LogicalAction(linear={0: 4}, quadratic={(0, 1): 4}, labels=("A", "B"))

        description = classify_gate(action)

        assert description.text == "Z on (A) · CZ on (A,B)"
        assert description.to_dict()["gates"][1] == {
            "kind": "CZ",
            "qubits": ["A", "B"],
            "power": 1,
        }

    @pytest.mark.parametrize(
        "action",
        [
            LogicalAction(linear={0: 1}, labels=("A",)),
            LogicalAction(linear={0: 7, 1: 6}, labels=("A", "B")),
            LogicalAction(linear={0: 5}, cubic={(0, 1, 2): 4}, labels=("A", "B", "C")),
            LogicalAction(quadratic={(0, 2): 2, (1, 2): 4}, labels=("A", "B", "C")),
        ],
    )
    def test_round_trip(self, action: LogicalAction) -> None:
        """Test descriptions re-serialize to the same coefficients."""
        assert action_from_gates(classify_gate(action), action.labels) == action

    def test_odd_pair_coefficient(self) -> None:
        """Test odd two-qubit coefficients are unclassifiable."""
        with pytest.raises(UnclassifiableError):
            classify_gate(LogicalAction(quadratic={(0, 1): 3}, labels=("A", "B")))

    def test_bad_triple_coefficient(self) -> None:
        """Test three-qubit coefficients other than 4 are unclassifiable."""
        with pytest.raises(UnclassifiableError):
            classify_gate(LogicalAction(cubic={(0, 1, 2): 2}, labels=("A", "B", "C")))

    def test_description_to_dict(self) -> None:
        """Test the machine-readable form."""
        description = GateDescription((GateTerm("T", ("A",), -1),))

        assert description.to_dict() == {
            "gates": [{"kind": "T", "qubits": ["A"], "power": -1}],
            "text": "T† on (A)",
        }


class TestStatevectorLogicalAction:
    """Tests for the state-vector oracle."""

    def test_tetrahedral_matches_engine(self) -> None:
        """Test the oracle and the engine agree on the 15-qubit code."""
        code, basis, signs = tetrahedral_setup()
        engine = logical_action(induced_phase_polynomial(code, basis, signs), basis.labels)

        oracle = statevector_logical_action(code, basis, signs)

        assert oracle == engine
        assert oracle.linear[0] in (1, 7)

    def test_single_unencoded_qubit(self) -> None:
        """Test a bare qubit with T is logical T."""
        code = make_code([], 1)
        one = np.array([1], np.uint8)
        basis = LogicalBasis(pairs=(LogicalPair("A", one, one),))

        action = statevector_logical_action(code, basis, SignVector((1,)))

        assert action.linear == {0: 1}

    def test_flipped_signs_negate(self) -> None:
        """Test T-dagger everywhere negates the logical action."""
        code, basis, signs = tetrahedral_setup()

        flipped = statevector_logical_action(code, basis, signs.negated())

        assert flipped == statevector_logical_action(code, basis, signs).negated()

    def test_representative_invariance(self) -> None:
        """Test adding an X stabilizer to Xbar leaves the action unchanged."""
        code, basis, signs = tetrahedral_setup()
        pair = basis.pairs[0]
        shifted = LogicalBasis(pairs=(LogicalPair("A", pair.x ^ code.hx[0], pair.z),))

        original = logical_action(induced_phase_polynomial(code, basis, signs), ("A",))
        moved = logical_action(induced_phase_polynomial(code, shifted, signs), ("A",))

        assert moved == original

    def test_not_preserved(self) -> None:
        """Test a single T on one qubit of a stabilizer pair breaks the codespace."""
        code = make_code([[1, 1]], 2)
        basis = LogicalBasis(
            pairs=(LogicalPair("A", np.array([1, 0], np.uint8), np.array([1, 1], np.uint8)),)
        )

        with pytest.raises(CodespaceNotPreservedError):
            statevector_logical_action(code, basis, SignVector((1, 1)))

    def test_bound(self) -> None:
        """Test codes beyond the enumeration bound are refused."""
        code = make_code([], 23)

        with pytest.raises(BoundExceededError):
            statevector_logical_action(code, NO_LOGICALS, SignVector((1,) * 23))
