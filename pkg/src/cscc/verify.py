"""End-to-end verification of transversal gates on color codes.

The CS protocol builds the truncated cube, projects its rear-right edge onto Z,
applies T on even and T-dagger on odd qubits, and checks that the result is a
logical control-S between the two surviving logical qubits. Commutator phases
follow the convention M = P·D·P·D† throughout.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any

import numpy as np

from cscc import gf2
from cscc.complex_builder import (
    COLOR_ORDER,
    ColoredComplex,
    bipartition,
    boundary_charges,
    branch_qubit,
    build_cube,
    build_tetrahedral15,
    build_truncated_cube,
    string_color,
    validate,
)
from cscc.css_code import (
    CssCode,
    LogicalBasis,
    assemble,
    logical_basis,
    match_geometric_basis,
    membranes,
    project_z,
    support_ids,
)
from cscc.errors import (
    CodespaceNotPreservedError,
    MembershipError,
    PreconditionError,
    UnclassifiableError,
    UnknownFixtureError,
)
from cscc.pauli_algebra import (
    PauliWithPhase,
    commutator_diag_with_xpauli,
    commutator_slayer_with_xpauli,
)
from cscc.phase_polynomial import (
    LogicalAction,
    PhasePolynomial,
    PreservationResult,
    SignVector,
    classify_gate,
    induced_phase_polynomial,
    logical_action,
    preserves_codespace,
    sign_vector_from_bipartition,
    statevector_logical_action,
)

logger = logging.getLogger(__name__)

CONVENTION = "M = P·D·P·D†"
FIXTURES = ("tetrahedral15", "cube", "truncated_cube_min", "unencoded_cs")
CUBE_FIXTURE_EXTENT = (2, 2, 2)
MIN_TRUNCATED_EXTENT = (1, 1, 1)
THETA_SAMPLES = 10


@dataclass(frozen=True)
class AcceptanceCheck:
    """One named check; informational checks are reported but never gate ``passed``."""

    name: str
    passed: bool
    detail: str = ""
    required: bool = True


@dataclass
class VerificationReport:
    """Everything measured on one subject, in JSON-ready form."""

    subject: str
    convention: str = CONVENTION
    complex: dict[str, Any] | None = None
    code: dict[str, Any] | None = None
    bipartition: dict[str, int] | None = None
    preservation: dict[str, Any] | None = None
    logical_action: dict[str, Any] | None = None
    classification: dict[str, Any] | None = None
    theta_exp: int | None = None
    phi_exp: int | None = None
    eta_exp: int | None = None
    membership: list[dict[str, Any]] = field(default_factory=list)
    annotations: dict[str, Any] = field(default_factory=dict)
    checks: list[AcceptanceCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        required = [check for check in self.checks if check.required]
        return bool(required) and all(check.passed for check in required)

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(AcceptanceCheck(name, bool(passed), detail))
        if not passed:
            logger.warning(f"{self.subject}: check failed: {name} {detail}".rstrip())

    def note(self, name: str, passed: bool, detail: str = "") -> None:
        """Record an informational check."""
        self.checks.append(AcceptanceCheck(name, bool(passed), detail, required=False))
        logger.info(f"{self.subject}: {name}: {'yes' if passed else 'no'} {detail}".rstrip())


@dataclass(frozen=True)
class CosetEvidence:
    """How a commutator-derived Z-type Pauli decomposes into Zbars and Z checks."""

    operator: str
    phase_exp: int
    logicals: tuple[str, ...]
    stabilizer_rows: tuple[int, ...]
    residual: tuple[int, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "operator": self.operator,
            "phase_exp": self.phase_exp,
            "logicals": list(self.logicals),
            "stabilizer_rows": list(self.stabilizer_rows),
            "residual": list(self.residual),
        }


@dataclass(frozen=True)
class CommutatorResult:
    theta_exp: int
    phi_exp: int
    eta_exp: int
    evidence: tuple[CosetEvidence, ...]


@dataclass(frozen=True)
class _Pipeline:
    complex: ColoredComplex
    code: CssCode
    basis: LogicalBasis
    signs: SignVector
    poly: PhasePolynomial
    verdict: PreservationResult
    action: LogicalAction | None
    unprojected_k: int


def _run_pipeline(complex_: ColoredComplex, threads: int) -> _Pipeline:
    code = assemble(complex_)
    unprojected_k = code.k
    if complex_.truncation_region:
        code = project_z(code, complex_.truncation_region)
    # Signs come from the full complex; projected qubits just drop out.
    signs = sign_vector_from_bipartition(bipartition(complex_), code.qubit_map)
    basis = match_geometric_basis(complex_, code, logical_basis(code))
    poly = induced_phase_polynomial(code, basis, signs, threads=threads)
    verdict = preserves_codespace(poly)
    action = logical_action(poly, basis.labels) if verdict.preserved else None
    return _Pipeline(
        complex_, code, basis, signs, poly, verdict, action, unprojected_k
    )


def _base_report(subject: str, run: _Pipeline) -> VerificationReport:
    report = VerificationReport(
        subject=subject,
        complex=run.complex.stats(),
        code={**run.code.stats(), "k_before_projection": run.unprojected_k},
        bipartition={
            "even": sum(1 for s in run.signs.values if s == 1),
            "odd": sum(1 for s in run.signs.values if s == -1),
        },
        preservation=run.verdict.to_dict(run.poly),
        annotations={"basis": run.basis.to_dict(run.code.qubit_map)},
    )
    problems = run.basis.violations(run.code)
    report.check("logical basis is symplectic", not problems, "; ".join(problems))
    if run.action is not None:
        report.logical_action = run.action.to_dict()
        try:
            report.classification = classify_gate(run.action).to_dict()
        except UnclassifiableError as e:
            report.annotations["classification_error"] = str(e)
    return report


def check_theta(code: CssCode, signs: SignVector, xbar: np.ndarray) -> int:
    """Global phase exponent of the commutator of the T layer with X on ``xbar``."""
    if len(signs) != code.n:
        raise PreconditionError(f"Sign vector has {len(signs)} entries, code has {code.n}")
    commutator = commutator_diag_with_xpauli(signs.gate(), PauliWithPhase.x_type(xbar))
    return commutator.global_exp


def _coset_evidence(
    code: CssCode,
    basis: LogicalBasis,
    name: str,
    pauli: PauliWithPhase,
    expected: tuple[str, ...],
) -> CosetEvidence:
    """Decompose ``pauli`` over the Zbars and Z checks and compare with ``expected``.

    Raises:
        MembershipError: If the Pauli has X components, lies outside the logical Z
            group, or decomposes into other logicals than ``expected``
    """
    if pauli.x.any():
        raise MembershipError(f"{name} is not Z-type", residual=np.flatnonzero(pauli.x).tolist())
    zbars = basis.zbars(code.n)
    generators = np.concatenate([zbars, code.hz], axis=0)
    coeffs = gf2.solve(generators, pauli.z)
    target = pauli.z.copy()
    for label in expected:
        target ^= basis.pair(label).z
    if coeffs is None or tuple(
        label for label, bit in zip(basis.labels, coeffs[: basis.k]) if bit
    ) != expected:
        residual = pauli.z if coeffs is None else target
        if code.hz.shape[0]:
            residual = gf2.row_reduce(code.hz).reduce(residual)
        raise MembershipError(
            f"{name} is not in the coset of {'·'.join(f'Zbar_{e}' for e in expected)}",
            residual=np.flatnonzero(residual).tolist(),
        )
    return CosetEvidence(
        operator=name,
        phase_exp=pauli.phase_exp,
        logicals=expected,
        stabilizer_rows=tuple(int(i) for i in np.flatnonzero(coeffs[basis.k :])),
    )


def check_commutators(code: CssCode, basis: LogicalBasis, signs: SignVector) -> CommutatorResult:
    """Reproduce the commutator phases of the T layer.

    With M the commutator of the layer with Xbar_A, the commutator of M with
    Xbar_A must be w**phi Zbar_B and its commutator with Xbar_B must be
    w**eta Zbar_A Zbar_B, both up to Z stabilizers.

    Raises:
        PreconditionError: If the basis has fewer than two logical qubits
        MembershipError: If a commutator leaves its expected coset
    """
    if basis.k < 2:
        raise PreconditionError(f"Commutator check needs two logical qubits, got {basis.k}")
    first, second = basis.pairs[0], basis.pairs[1]
    x_first = PauliWithPhase.x_type(first.x)
    x_second = PauliWithPhase.x_type(second.x)

    m_gate = commutator_diag_with_xpauli(signs.gate(), x_first)
    p_phi = commutator_slayer_with_xpauli(m_gate, x_first)
    p_eta = commutator_slayer_with_xpauli(m_gate, x_second)
    evidence = (
        _coset_evidence(code, basis, f"[M, Xbar_{first.label}]", p_phi, (second.label,)),
        _coset_evidence(
            code, basis, f"[M, Xbar_{second.label}]", p_eta, (first.label, second.label)
        ),
    )
    logger.info(
        f"Commutators: theta={m_gate.global_exp}, phi={p_phi.phase_exp}, "
        f"eta={p_eta.phase_exp}"
    )
    return CommutatorResult(m_gate.global_exp, p_phi.phase_exp, p_eta.phase_exp, evidence)


def _random_representatives(
    code: CssCode, xbar: np.ndarray, rng: np.random.Generator, count: int
) -> list[np.ndarray]:
    if code.hx.shape[0] == 0:
        return [xbar.copy() for _ in range(count)]
    choices = rng.integers(0, 2, size=(count, code.hx.shape[0]))
    return list(gf2.matmul(choices, code.hx) ^ xbar)


def sample_commutator_phases(
    code: CssCode,
    basis: LogicalBasis,
    signs: SignVector,
    rng: np.random.Generator,
    count: int = THETA_SAMPLES,
) -> tuple[set[int], set[int]]:
    """phi and eta over random representative triples.

    Each sample draws two representatives of Xbar_A, one to build M and one to
    commute with it, and one of Xbar_B. Both phases are properties of the
    logical operators, so every sample must agree.

    Raises:
        PreconditionError: If the basis has fewer than two logical qubits
        MembershipError: If a sampled commutator leaves its expected coset
    """
    if basis.k < 2:
        raise PreconditionError(f"Commutator check needs two logical qubits, got {basis.k}")
    first, second = basis.pairs[0], basis.pairs[1]
    builders = _random_representatives(code, first.x, rng, count)
    partners = _random_representatives(code, first.x, rng, count)
    others = _random_representatives(code, second.x, rng, count)
    phis, etas = set(), set()
    for x_m, x_a, x_b in zip(builders, partners, others):
        m_gate = commutator_diag_with_xpauli(signs.gate(), PauliWithPhase.x_type(x_m))
        p_phi = commutator_slayer_with_xpauli(m_gate, PauliWithPhase.x_type(x_a))
        p_eta = commutator_slayer_with_xpauli(m_gate, PauliWithPhase.x_type(x_b))
        _coset_evidence(code, basis, "sampled phi commutator", p_phi, (second.label,))
        _coset_evidence(
            code, basis, "sampled eta commutator", p_eta, (first.label, second.label)
        )
        phis.add(p_phi.phase_exp)
        etas.add(p_eta.phase_exp)
    return phis, etas


def _geometry_checks(report: VerificationReport, run: _Pipeline) -> None:
    """Informational checks on membrane representatives and their intersections."""
    complex_, code = run.complex, run.code
    first, second = run.basis.pairs[0], run.basis.pairs[1]
    found = {pair.label: membranes(complex_, code, pair.x) for pair in (first, second)}
    report.annotations["membranes"] = {label: sorted(reps) for label, reps in found.items()}
    for label, reps in found.items():
        report.note(f"Xbar_{label} has membrane representatives", bool(reps), ", ".join(reps))

    reps_a, reps_b = found[first.label], found[second.label]
    crossing = next(
        ((p, q) for p, q in combinations(reps_a, 2) if len(set(p) & set(q)) == 1), None
    )
    if crossing is None:
        report.note("phi intersection is a string", False, "no two membranes share one color")
    else:
        p, q = crossing
        meet = support_ids(code, reps_a[p] & reps_a[q])
        expected = next(c for c in COLOR_ORDER if c.value not in p + q)
        color = string_color(complex_, meet)
        report.note(
            f"phi intersection of {p} and {q} membranes is a {expected.value} string",
            color == expected,
            f"{len(meet)} qubits, string color {color.value if color else None}",
        )

    if reps_a and reps_b:
        p, q = next(iter(reps_a)), next(iter(reps_b))
        meet = support_ids(code, reps_a[p] & reps_b[q])
        branch = branch_qubit(complex_, meet)
        report.annotations["eta_branch_qubit"] = branch
        report.note(
            f"eta intersection of {p} and {q} membranes branches at one qubit",
            branch is not None,
            f"{len(meet)} qubits, branch qubit {branch}",
        )


def _cs_checks(report: VerificationReport, run: _Pipeline, seed: int) -> None:
    code, basis, signs, action = run.code, run.basis, run.signs, run.action
    report.check("k before projection = 3", run.unprojected_k == 3, f"k={run.unprojected_k}")
    report.check("k after projection = 2", code.k == 2, f"k={code.k}")
    report.check(
        "codespace preserved",
        run.verdict.preserved,
        f"{len(run.verdict.witnesses)} stabilizer monomials",
    )
    if action is None or code.k != 2:
        return

    quadratic = action.coefficient(0, 1)
    report.check("CS coefficient is 2 or 6", quadratic in (2, 6), f"coefficient {quadratic}")
    report.check("no cubic terms", not action.cubic, str(action.cubic))
    report.check(
        "no linear terms",
        not action.linear,
        ", ".join(f"{action.labels[i]}:{c}" for i, c in sorted(action.linear.items())),
    )

    rng = np.random.default_rng(seed)
    thetas = []
    for pair in basis.pairs:
        samples = [pair.x, *_random_representatives(code, pair.x, rng, THETA_SAMPLES)]
        values = {check_theta(code, signs, rep) for rep in samples}
        thetas.append(values)
        report.check(
            f"theta = 0 for Xbar_{pair.label} and {THETA_SAMPLES} representatives",
            values == {0},
            f"values {sorted(values)}",
        )
    report.annotations["theta_values"] = {
        pair.label: sorted(values) for pair, values in zip(basis.pairs, thetas)
    }

    try:
        result = check_commutators(code, basis, signs)
    except MembershipError as e:
        report.check("commutator cosets", False, f"{e} residual={e.residual}")
        return
    report.theta_exp, report.phi_exp, report.eta_exp = (
        result.theta_exp,
        result.phi_exp,
        result.eta_exp,
    )
    report.membership = [item.to_dict() for item in result.evidence]
    report.check("commutator cosets", True)
    report.check("phi = 0", result.phi_exp == 0, f"phi_exp={result.phi_exp}")
    report.check("eta in {2, 6}", result.eta_exp in (2, 6), f"eta_exp={result.eta_exp}")
    report.check(
        "eta matches CS coefficient",
        result.eta_exp == quadratic,
        f"eta_exp={result.eta_exp}, coefficient={quadratic}",
    )

    try:
        phis, etas = sample_commutator_phases(code, basis, signs, rng)
    except MembershipError as e:
        report.check("sampled commutator cosets", False, f"{e} residual={e.residual}")
        return
    report.annotations["phi_values"] = sorted(phis)
    report.annotations["eta_values"] = sorted(etas)
    report.check(
        f"phi and eta agree over {THETA_SAMPLES} representative triples",
        phis == {result.phi_exp} and etas == {result.eta_exp},
        f"phi {sorted(phis)}, eta {sorted(etas)}",
    )
    _geometry_checks(report, run)


def verify_complex(
    complex_: ColoredComplex, subject: str = "complex", threads: int = 1, seed: int = 0
) -> VerificationReport:
    """Run the transversal-T pipeline on any complex.

    Complexes with a truncation region get the full control-S acceptance list;
    others are checked for validity and codespace preservation only.
    """
    validation = validate(complex_)
    if not validation.passed:
        report = VerificationReport(subject=subject, complex=complex_.stats())
        for failure in validation.failures():
            report.check(f"validator: {failure.name}", False, failure.witness or "")
        return report

    run = _run_pipeline(complex_, threads)
    report = _base_report(subject, run)
    report.check("complex validates", True)
    if complex_.truncation_region:
        _cs_checks(report, run, seed)
    else:
        report.check("codespace preserved", run.verdict.preserved)
    logger.info(f"{subject}: {'pass' if report.passed else 'FAIL'}")
    return report


def verify_cs_protocol(
    extent: tuple[int, int, int], threads: int = 1, seed: int = 0
) -> VerificationReport:
    """Verify the logical control-S on the truncated cube of the given extent."""
    complex_ = build_truncated_cube(extent)
    return verify_complex(
        complex_, subject=f"truncated_cube {tuple(extent)}", threads=threads, seed=seed
    )


def _phase_table(fn: Any) -> dict[tuple[int, int], int]:
    return {(a, b): fn(a, b) % 8 for a in (0, 1) for b in (0, 1)}


def _conjugation_table(
    table: dict[tuple[int, int], int], flip: tuple[int, int]
) -> dict[tuple[int, int], int]:
    """Phase table of X D X D† for a diagonal D given by its phase table."""
    return _phase_table(
        lambda a, b: table[(a ^ flip[0], b ^ flip[1])] - table[(a, b)]
    )


def _pauli_table(pauli: PauliWithPhase) -> dict[tuple[int, int], int]:
    return _phase_table(lambda a, b: pauli.phase_exp + 4 * (pauli.z[0] * a + pauli.z[1] * b))


def check_unencoded_cs() -> VerificationReport:
    """Check the CS commutator identities on exact two-qubit phase tables."""
    report = VerificationReport(subject="unencoded_cs")
    cs = _phase_table(lambda a, b: 2 * a * b)
    v = _conjugation_table(cs, (1, 0))
    s_b_cz = _phase_table(lambda a, b: 2 * b + 4 * a * b)
    report.check("X_A CS X_A CS† = S_B·CZ", v == s_b_cz, str(v))

    phi = _conjugation_table(v, (1, 0))
    z_b = PauliWithPhase.z_type([0, 1])
    report.check("X_A V X_A V† = Z_B", phi == _pauli_table(z_b), str(phi))

    eta = _conjugation_table(v, (0, 1))
    i_zz = PauliWithPhase.z_type([1, 1], phase_exp=2)
    report.check("X_B V X_B V† = i Z_A Z_B", eta == _pauli_table(i_zz), str(eta))

    report.phi_exp, report.eta_exp = phi[(0, 0)], eta[(0, 0)]
    report.classification = classify_gate(
        LogicalAction(quadratic={(0, 1): cs[(1, 1)]}, labels=("A", "B"))
    ).to_dict()
    return report


def _tetrahedral_report(threads: int) -> VerificationReport:
    complex_ = build_tetrahedral15()
    run = _run_pipeline(complex_, threads)
    report = _base_report("tetrahedral15", run)
    report.check("k = 1", run.code.k == 1, f"k={run.code.k}")
    report.check("codespace preserved", run.verdict.preserved)
    if run.action is None:
        return report
    oracle = statevector_logical_action(run.code, run.basis, run.signs)
    report.check("engine matches state-vector oracle", oracle == run.action, str(oracle.to_dict()))
    report.check(
        "logical T or T†",
        not run.action.quadratic
        and not run.action.cubic
        and run.action.linear.get(0) in (1, 7),
        str(run.action.to_dict()),
    )
    return report


def _cube_report(threads: int) -> VerificationReport:
    complex_ = build_cube(CUBE_FIXTURE_EXTENT)
    run = _run_pipeline(complex_, threads)
    report = _base_report(f"cube {CUBE_FIXTURE_EXTENT}", run)
    report.check("k = 3", run.code.k == 3, f"k={run.code.k}")
    report.check("codespace preserved", run.verdict.preserved)
    charges = [
        boundary_charges(complex_, support_ids(run.code, pair.z))
        for pair in run.basis.pairs
    ]
    report.annotations["zbar_charges"] = {
        pair.label: charge for pair, charge in zip(run.basis.pairs, charges)
    }
    matrix = np.array([list(c.values()) for c in charges], dtype=np.uint8)
    report.check(
        "Z logicals carry independent boundary charges",
        gf2.rank(matrix) == run.code.k,
        f"rank {gf2.rank(matrix)}",
    )
    return report


def run_fixture(name: str, threads: int = 1, seed: int = 0) -> VerificationReport:
    """Verify one of the built-in fixtures.

    Raises:
        UnknownFixtureError: If ``name`` is not in FIXTURES
    """
    logger.info(f"Running fixture {name}")
    if name == "tetrahedral15":
        return _tetrahedral_report(threads)
    if name == "cube":
        return _cube_report(threads)
    if name == "truncated_cube_min":
        return verify_cs_protocol(MIN_TRUNCATED_EXTENT, threads=threads, seed=seed)
    if name == "unencoded_cs":
        return check_unencoded_cs()
    raise UnknownFixtureError(f"Unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")


def random_css_code(rng: np.random.Generator, max_n: int = 14) -> CssCode:
    """Random CSS code with k >= 1 and at most four X checks.

    Z checks are random combinations of the X checks' kernel, using fewer rows
    than the kernel dimension.
    """
    n = int(rng.integers(3, max_n + 1))
    hx = rng.integers(0, 2, size=(int(rng.integers(0, min(4, n - 1) + 1)), n))
    kernel = gf2.kernel(hx) if hx.shape[0] else np.eye(n, dtype=np.uint8)
    rows = int(rng.integers(0, kernel.shape[0]))
    hz = gf2.matmul(rng.integers(0, 2, size=(rows, kernel.shape[0])), kernel)
    return CssCode(hx=hx, hz=hz, qubit_map=tuple(range(n)))


@dataclass(frozen=True)
class TrialVerdict:
    trial: int
    n: int
    k: int
    engine_preserved: bool
    oracle_preserved: bool
    agree: bool
    engine_action: dict[str, Any] | None = None
    oracle_action: dict[str, Any] | None = None


@dataclass(frozen=True)
class CrosscheckResult:
    seed: int
    trials: tuple[TrialVerdict, ...]

    @property
    def agreed(self) -> int:
        return sum(1 for t in self.trials if t.agree)

    @property
    def passed(self) -> bool:
        return self.agreed == len(self.trials)


def oracle_crosscheck(seed: int, trials: int, threads: int = 1) -> CrosscheckResult:
    """Compare the phase-polynomial engine with the state-vector oracle on random codes.

    Raises:
        PreconditionError: If ``trials`` is below 1
    """
    if trials < 1:
        raise PreconditionError(f"Need at least one trial, got {trials}")
    rng = np.random.default_rng(seed)
    verdicts = []
    for trial in range(trials):
        code = random_css_code(rng)
        signs = SignVector(tuple(int(s) for s in rng.choice([1, -1], size=code.n)))
        basis = logical_basis(code)

        poly = induced_phase_polynomial(code, basis, signs, threads=threads)
        engine = logical_action(poly, basis.labels) if preserves_codespace(poly).preserved else None
        try:
            oracle: LogicalAction | None = statevector_logical_action(code, basis, signs)
        except CodespaceNotPreservedError:
            oracle = None

        agree = engine == oracle
        verdicts.append(
            TrialVerdict(
                trial=trial,
                n=code.n,
                k=code.k,
                engine_preserved=engine is not None,
                oracle_preserved=oracle is not None,
                agree=agree,
                engine_action=None if agree or engine is None else engine.to_dict(),
                oracle_action=None if agree or oracle is None else oracle.to_dict(),
            )
        )
        if not agree:
            logger.warning(f"Trial {trial}: engine and oracle disagree")
    result = CrosscheckResult(seed=seed, trials=tuple(verdicts))
    logger.info(f"{result.agreed}/{trials} agree")
    return result
