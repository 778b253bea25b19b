"""Executable exact checks of the symbol-level identities.

Each check returns an :class:`IdentityReport`.  A check passes exactly when
the polynomial difference between the computed and the claimed side is
identically zero; there is no tolerance anywhere.  On failure the witness
is the first differing entry in row-major order (matrix identities) or the
least differing term (scalar identities), together with the difference
``claimed - computed``.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Iterable, Iterator, Sequence

from hspgen import __version__
from hspgen.hsp import (
    FamilyKind,
    PairFamily,
    SigmaMode,
    bilinear_form,
    bracket,
    build_basis,
    build_phi,
    build_sigma,
    closed_form_dual,
    conjugate_sigma,
    deformed_target,
    dpi,
    dpi_from_action,
    dpi_of,
    dual_basis,
    gamma1,
    gamma_k,
    Gamma_k,
    generating_function_rhs,
    k_part,
    nilpotent_target,
    satisfies_group_relation,
    satisfies_relation,
    u_of_z,
)
from hspgen.matrix import (
    PolyMatrix,
    SignMode,
    det_bareiss,
    msf_det_assemble,
    pfaffian_expansion,
    msf_det_rhs,
    msf_pf_rhs,
    pf_antidiag,
)
from hspgen.ring import ONE, S, U, ZERO, Polynomial, VariableId, var
from hspgen.weyl import weyl_commutator, weyl_symbol

SCHEMA_VERSION = 1

IDENTITIES = (
    "structure",
    "nilpotency",
    "deformed",
    "gen-fn",
    "symbol",
    "lie-hom",
    "invariance",
    "phi",
    "msf-pf",
    "msf-det",
)
FAMILY_IDENTITIES = IDENTITIES[:7]

DEFAULT_GRID = {
    FamilyKind.SOSTAR: (1, 2, 3, 4, 5),
    FamilyKind.SP: (1, 2, 3),
    FamilyKind.SU: ((1, 1), (2, 1), (2, 2), (3, 1), (3, 2)),
}
DEFAULT_PHI = (1, 2, 3, 4, 5)
DEFAULT_MSF_PF = (1, 2, 3)
DEFAULT_MSF_DET = ((1, 1), (2, 1), (2, 2), (3, 2))


@dataclass
class IdentityReport:
    identity: str
    family: str
    params: dict
    status: str
    witness: dict | None = None
    elapsed_ms: float = 0.0
    options: dict = field(default_factory=dict)
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "IdentityReport":
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "IdentityReport":
        return cls.from_dict(json.loads(text))

    @property
    def subject(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    def to_text(self, timings: bool = False) -> str:
        head = f"{'PASS' if self.passed else 'FAIL'}  {self.identity:<10}  {self.subject}"
        if self.options:
            head += "  [" + ", ".join(f"{k}={v}" for k, v in sorted(self.options.items())) + "]"
        if timings:
            head += f"  ({self.elapsed_ms:.1f} ms)"
        if self.witness:
            head += "\n      witness: " + json.dumps(self.witness, sort_keys=True)
        return head


@dataclass(frozen=True)
class Mutation:
    """Corrupt one entry of the deformed symbol matrix (0-based position)."""

    row: int
    col: int
    kind: str = "negate"

    def apply(self, m: PolyMatrix) -> PolyMatrix:
        e = list(m.entries())
        k = self.row * m.cols + self.col
        if self.kind == "negate":
            e[k] = -e[k]
        elif self.kind == "bump":
            e[k] = e[k] + ONE
        else:
            raise ValueError(f"unknown mutation {self.kind}")
        return PolyMatrix(m.rows, m.cols, e)


# -- witnesses ----------------------------------------------------------------


def scalar_witness(claimed: Polynomial, computed: Polynomial) -> dict | None:
    diff = claimed - computed
    if not diff:
        return None
    (exps, c) = diff.terms()[-1]
    term = Polynomial.from_terms([(dict(exps), c)])
    return {"kind": "term", "term": term.to_text(), "difference": diff.to_text()}


def matrix_witness(claimed: PolyMatrix, computed: PolyMatrix) -> dict | None:
    if claimed.shape != computed.shape:
        return {"kind": "shape", "claimed": list(claimed.shape), "computed": list(computed.shape)}
    for i in range(claimed.rows):
        for j in range(claimed.cols):
            d = claimed[i, j] - computed[i, j]
            if d:
                return {"kind": "entry", "row": i + 1, "col": j + 1, "difference": d.to_text()}
    return None


def _family_report(identity: str, f: PairFamily, witness, t0: float, **options) -> IdentityReport:
    return IdentityReport(
        identity=identity,
        family=f.name.split("(")[0],
        params=f.params(),
        status="fail" if witness else "pass",
        witness=witness,
        elapsed_ms=round((time.perf_counter() - t0) * 1000, 3),
        options={k: v for k, v in options.items() if v is not None},
    )


def _guarded(fn: Callable[[], dict | None]) -> dict | None:
    try:
        return fn()
    except (ValueError, ArithmeticError) as exc:
        return {"kind": "error", "message": f"{type(exc).__name__}: {exc}"}


def _sigma_tilde(f: PairFamily, mutation: Mutation | None, sigma_mode) -> PolyMatrix:
    m = build_sigma(f, deformed=True, mode=sigma_mode)
    return mutation.apply(m) if mutation else m


def _pf_or_det(f: PairFamily, m: PolyMatrix) -> Polynomial:
    return pf_antidiag(m) if f.kind is FamilyKind.SOSTAR else det_bareiss(m)


def _mode_option(f: PairFamily, sigma_mode) -> str | None:
    mode = SigmaMode(sigma_mode)
    return mode.value if f.kind is FamilyKind.SU else None


# -- family checks ------------------------------------------------------------


def check_structure(f: PairFamily) -> IdentityReport:
    """Basis relations, duality, closed-form duals, and the operator
    formulas against the group-action oracle."""
    t0 = time.perf_counter()

    def run():
        basis = build_basis(f)
        if len(basis) != f.dimension:
            return {"kind": "dimension", "expected": f.dimension, "got": len(basis)}
        for b in basis:
            if not satisfies_relation(f, b.matrix):
                return {"kind": "relation", "element": b.name}
        duals = dual_basis(f)
        for i, b in enumerate(basis):
            for j, d in enumerate(duals):
                if bilinear_form(f, b, d) != int(i == j):
                    return {"kind": "duality", "element": b.name, "dual": d.name}
        for b, d in zip(basis, duals):
            if d.matrix != closed_form_dual(f, b):
                return {"kind": "closed-form-dual", "element": b.name}
        for b in basis:
            got, want = dpi(f, b), dpi_from_action(f, b)
            if got != want:
                w = scalar_witness(want.poly, got.poly)
                return {**w, "element": b.name}
        u, ui = u_of_z(f), u_of_z(f, inverse=True)
        if u @ ui != PolyMatrix.identity(f.N):
            return {"kind": "unipotent-inverse"}
        if not satisfies_group_relation(f, u):
            return {"kind": "group-relation"}
        return None

    return _family_report("structure", f, _guarded(run), t0)


def check_nilpotency(f: PairFamily) -> IdentityReport:
    t0 = time.perf_counter()
    w = _guarded(lambda: matrix_witness(nilpotent_target(f), conjugate_sigma(f, build_sigma(f))))
    return _family_report("nilpotency", f, w, t0)


def check_deformed(
    f: PairFamily, *, mutation: Mutation | None = None, sigma_mode=SigmaMode.BLOCK
) -> IdentityReport:
    t0 = time.perf_counter()
    w = _guarded(
        lambda: matrix_witness(deformed_target(f), conjugate_sigma(f, _sigma_tilde(f, mutation, sigma_mode)))
    )
    return _family_report("deformed", f, w, t0, sigma_mode=_mode_option(f, sigma_mode))


def check_generating_function(
    f: PairFamily, *, mutation: Mutation | None = None, sigma_mode=SigmaMode.BLOCK
) -> IdentityReport:
    """Pf/det of the deformed symbol matrix, computed directly and after
    conjugation by u(z), against the closed form."""
    t0 = time.perf_counter()

    def run():
        m = _sigma_tilde(f, mutation, sigma_mode)
        rhs = generating_function_rhs(f)
        w = scalar_witness(rhs, _pf_or_det(f, m))
        if w:
            return {**w, "stage": "direct"}
        w = scalar_witness(rhs, _pf_or_det(f, conjugate_sigma(f, m)))
        if w:
            return {**w, "stage": "conjugated"}
        return None

    return _family_report("gen-fn", f, _guarded(run), t0, sigma_mode=_mode_option(f, sigma_mode))


def check_symbol_consistency(
    f: PairFamily, *, mutation: Mutation | None = None, sigma_mode=SigmaMode.BLOCK
) -> IdentityReport:
    """symbol(Gamma_k) = gamma_k, and sigma~ at u = s - gamma_1 is sigma."""
    t0 = time.perf_counter()

    def run():
        for k in range(f.rank + 1):
            w = scalar_witness(gamma_k(f, k), weyl_symbol(Gamma_k(f, k)))
            if w:
                return {**w, "k": k}
        specialized = _sigma_tilde(f, mutation, sigma_mode).map(lambda p: p.substitute({U: var(S) - gamma1(f)}))
        w = matrix_witness(build_sigma(f), specialized)
        return {**w, "stage": "specialization"} if w else None

    return _family_report("symbol", f, _guarded(run), t0, sigma_mode=_mode_option(f, sigma_mode))


def check_lie_hom(f: PairFamily) -> IdentityReport:
    """[dpi(X), dpi(Y)] = dpi([X, Y]) over all basis pairs."""
    t0 = time.perf_counter()

    def run():
        basis = build_basis(f)
        ops = [dpi(f, b) for b in basis]
        for a in range(len(basis)):
            for b in range(a + 1, len(basis)):
                lhs = weyl_commutator(ops[a], ops[b])
                rhs = dpi_of(f, bracket(basis[a].matrix, basis[b].matrix))
                w = scalar_witness(rhs.poly, lhs.poly)
                if w:
                    return {**w, "pair": [basis[a].name, basis[b].name]}
        return None

    return _family_report("lie-hom", f, _guarded(run), t0)


def check_invariance(f: PairFamily) -> IdentityReport:
    """The block-diagonal operators at s = 0 commute with every Gamma_k."""
    t0 = time.perf_counter()

    def run():
        ks = [(b, dpi(f, b).substitute({S: 0})) for b in k_part(f)]
        for k in range(f.rank + 1):
            g = Gamma_k(f, k)
            for b, op in ks:
                c = weyl_commutator(op, g)
                if c:
                    return {**scalar_witness(ZERO, c.poly), "k": k, "element": b.name}
        return None

    return _family_report("invariance", f, _guarded(run), t0)


# -- standalone checks --------------------------------------------------------


def _standalone_report(identity: str, family: str, params: dict, witness, t0: float, **options) -> IdentityReport:
    return IdentityReport(
        identity=identity,
        family=family,
        params=params,
        status="fail" if witness else "pass",
        witness=witness,
        elapsed_ms=round((time.perf_counter() - t0) * 1000, 3),
        options={k: v for k, v in options.items() if v is not None},
    )


def check_phi_generating_function(n: int) -> IdentityReport:
    """Pf of the symbol version of Phi equals sum_k u^(n-2k) gamma_k."""
    t0 = time.perf_counter()

    def run():
        f = PairFamily.sostar(n)
        phi = build_phi(n)
        lhs = pfaffian_expansion(phi)
        u = var(U)
        rhs = sum((u ** (n - 2 * k) * gamma_k(f, k) for k in range(n // 2 + 1)), ZERO)
        return scalar_witness(rhs, lhs)

    return _standalone_report("phi", "SOstar", {"n": n}, _guarded(run), t0)


def _gen(kind: str, i: int, j: int) -> Polynomial:
    return var(VariableId(kind, (i, j)))


def generic_msf_pf_matrix(n: int) -> PolyMatrix:
    """[[a, b], [c, -J a^T J]] with independent parameters a[i,j],
    b[i,j], c[i,j] (i<j for b and c) in the antidiagonal layout."""

    def alt(kind, i, j):
        if i == j:
            return ZERO
        return _gen(kind, i, j) if i < j else -_gen(kind, j, i)

    a = PolyMatrix.build(n, n, lambda i, j: _gen("a", i + 1, j + 1))
    b = PolyMatrix.build(n, n, lambda r, c: alt("b", r + 1, n - c))
    c = PolyMatrix.build(n, n, lambda r, col: alt("c", col + 1, n - r))
    jn = PolyMatrix.antidiagonal(n)
    return PolyMatrix.blocks([[a, b], [c, -(jn @ a.T @ jn)]])


def check_msf(kind: str, params: dict, sign_mode: SignMode | str = SignMode.CORRECTED) -> IdentityReport:
    """Minor summation formulas on fully generic symbolic matrices.

    ``kind`` is ``"pfaffian"`` (params ``{"n": n}``) or ``"determinant"``
    (params ``{"p": p, "q": q}``, using ``sign_mode``)."""
    t0 = time.perf_counter()
    if kind == "pfaffian":
        n = params["n"]

        def run():
            m = generic_msf_pf_matrix(n)
            return scalar_witness(msf_pf_rhs(m), pf_antidiag(m))

        return _standalone_report("msf-pf", "generic", {"n": n}, _guarded(run), t0)
    if kind == "determinant":
        p, q = params["p"], params["q"]
        mode = SignMode(sign_mode)

        def run():
            b = PolyMatrix.build(p, q, lambda i, j: _gen("b", i + 1, j + 1))
            c = PolyMatrix.build(p, q, lambda i, j: _gen("c", i + 1, j + 1))
            u, v = var(U), var(VariableId("v"))
            lhs = det_bareiss(msf_det_assemble(b, c, u, v))
            return scalar_witness(msf_det_rhs(b, c, u, v, mode), lhs)

        return _standalone_report("msf-det", "generic", {"p": p, "q": q}, _guarded(run), t0, sign_mode=mode.value)
    raise ValueError(f"unknown minor summation kind {kind!r}")


# -- suites -------------------------------------------------------------------


@dataclass(frozen=True)
class Task:
    identity: str
    family: PairFamily | None = None
    params: tuple = ()
    sign_mode: str = SignMode.CORRECTED.value
    sigma_mode: str = SigmaMode.BLOCK.value
    mutation: Mutation | None = None


_FAMILY_CHECKS = {
    "structure": check_structure,
    "nilpotency": check_nilpotency,
    "lie-hom": check_lie_hom,
    "invariance": check_invariance,
}
_DEFORMED_CHECKS = {
    "deformed": check_deformed,
    "gen-fn": check_generating_function,
    "symbol": check_symbol_consistency,
}


def run_task(task: Task) -> IdentityReport:
    if task.identity in _FAMILY_CHECKS:
        return _FAMILY_CHECKS[task.identity](task.family)
    if task.identity in _DEFORMED_CHECKS:
        return _DEFORMED_CHECKS[task.identity](task.family, mutation=task.mutation, sigma_mode=task.sigma_mode)
    if task.identity == "phi":
        return check_phi_generating_function(task.params[0])
    if task.identity == "msf-pf":
        return check_msf("pfaffian", {"n": task.params[0]})
    if task.identity == "msf-det":
        p, q = task.params
        return check_msf("determinant", {"p": p, "q": q}, task.sign_mode)
    raise ValueError(f"unknown identity {task.identity!r}")


@dataclass
class Selection:
    """Which checks to run.  ``None`` fields mean "the default grid"."""

    families: Sequence[FamilyKind] | None = None
    identities: Sequence[str] | None = None
    sostar: Sequence[int] | None = None
    sp: Sequence[int] | None = None
    su: Sequence[tuple[int, int]] | None = None
    phi: Sequence[int] | None = None
    msf_pf: Sequence[int] | None = None
    msf_det: Sequence[tuple[int, int]] | None = None
    sign_mode: str = SignMode.CORRECTED.value
    sigma_mode: str = SigmaMode.BLOCK.value
    mutation: Mutation | None = None


def grid_families(sel: Selection) -> list[PairFamily]:
    kinds = [FamilyKind(k) for k in sel.families] if sel.families else list(FamilyKind)
    out: list[PairFamily] = []
    for kind in FamilyKind:
        if kind not in kinds:
            continue
        if kind is FamilyKind.SOSTAR:
            out += [PairFamily.sostar(n) for n in (sel.sostar or DEFAULT_GRID[kind])]
        elif kind is FamilyKind.SP:
            out += [PairFamily.sp(n) for n in (sel.sp or DEFAULT_GRID[kind])]
        else:
            out += [PairFamily.su(p, q) for p, q in (sel.su or DEFAULT_GRID[kind])]
    return out


def plan(sel: Selection) -> list[Task]:
    """Tasks in the deterministic declared order: identity, then family."""
    identities = list(sel.identities) if sel.identities else list(IDENTITIES)
    for ident in identities:
        if ident not in IDENTITIES:
            raise ValueError(f"unknown identity {ident!r}")
    fams = grid_families(sel)
    kinds = set(FamilyKind(k) for k in sel.families) if sel.families else set(FamilyKind)
    explicit = set(sel.identities or ())
    tasks: list[Task] = []
    for ident in IDENTITIES:
        if ident not in identities:
            continue
        if ident in FAMILY_IDENTITIES:
            for f in fams:
                tasks.append(Task(ident, f, (), sel.sign_mode, sel.sigma_mode, sel.mutation))
        elif ident == "phi":
            if FamilyKind.SOSTAR in kinds or "phi" in explicit:
                ns = sel.phi or (sel.sostar if sel.sostar else DEFAULT_PHI)
                tasks += [Task("phi", None, (n,)) for n in ns]
        elif not sel.families or ident in explicit:
            if ident == "msf-pf":
                tasks += [Task("msf-pf", None, (n,)) for n in (sel.msf_pf or DEFAULT_MSF_PF)]
            else:
                tasks += [Task("msf-det", None, pq, sel.sign_mode) for pq in (sel.msf_det or DEFAULT_MSF_DET)]
    return tasks


def iter_suite(sel: Selection | None = None, jobs: int = 1) -> Iterator[IdentityReport]:
    """Yield reports in declared order; with ``jobs > 1`` checks run in a
    process pool but are still yielded in order."""
    tasks = plan(sel or Selection())
    if jobs <= 1 or len(tasks) <= 1:
        for t in tasks:
            yield run_task(t)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(run_task, tasks)


def run_suite(sel: Selection | None = None, jobs: int = 1) -> list[IdentityReport]:
    return list(iter_suite(sel, jobs))


def summarize(reports: Iterable[IdentityReport]) -> tuple[int, int]:
    reports = list(reports)
    passed = sum(r.passed for r in reports)
    return passed, len(reports) - passed


def with_mutation(sel: Selection, mutation: Mutation) -> Selection:
    return replace(sel, mutation=mutation)
