"""Command line front end: ``hspgen verify`` and ``hspgen dump``.

Exit codes: 0 when every selected check passes, 1 when any fails, 2 for
usage or configuration errors (including cost-guard refusals).
"""

from __future__ import annotations

import json
import os
import sys

import click

from hspgen import __version__
from hspgen.hsp import (
    FamilyKind,
    Gamma_k,
    PairFamily,
    SigmaMode,
    build_basis,
    build_phi,
    build_sigma,
    dual_basis,
    gamma_k,
)
from hspgen.matrix import PolyMatrix, SignMode
from hspgen.verify import IDENTITIES, Selection, iter_suite, plan, summarize

JOBS_ENV = "HSPGEN_JOBS"

# largest ranks accepted without --unsafe
GUARDS = {"sostar": 6, "sp": 4, "su": 7, "phi": 6, "msf-pf": 4, "msf-det": 7}


class GuardError(click.UsageError):
    pass


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise click.UsageError(f"{JOBS_ENV} must be an integer, got {raw!r}")


def _check_guards(sel: Selection, unsafe: bool) -> None:
    if unsafe:
        return
    over = []
    for n in sel.sostar or ():
        if n > GUARDS["sostar"]:
            over.append(f"SOstar n={n} > {GUARDS['sostar']}")
    for n in sel.sp or ():
        if n > GUARDS["sp"]:
            over.append(f"Sp n={n} > {GUARDS['sp']}")
    for p, q in sel.su or ():
        if p + q > GUARDS["su"]:
            over.append(f"SU p+q={p + q} > {GUARDS['su']}")
    for n in sel.phi or ():
        if n > GUARDS["phi"]:
            over.append(f"phi n={n} > {GUARDS['phi']}")
    for n in sel.msf_pf or ():
        if n > GUARDS["msf-pf"]:
            over.append(f"msf-pf n={n} > {GUARDS['msf-pf']}")
    for p, q in sel.msf_det or ():
        if p + q > GUARDS["msf-det"]:
            over.append(f"msf-det p+q={p + q} > {GUARDS['msf-det']}")
    if over:
        raise GuardError("cost guard exceeded (" + "; ".join(over) + "); pass --unsafe to run anyway")


def _build_selection(family, n, p, q, identity, all_, sign_mode, sigma_mode) -> Selection:
    if all_ and (family or n or p or q or identity):
        raise click.UsageError("--all cannot be combined with a family, rank or identity filter")
    if (p is None) != (q is None):
        raise click.UsageError("--p and --q must be given together")
    if p is not None and p < q:
        raise click.UsageError(f"SU needs p >= q, got p={p}, q={q}")
    if any(k < 1 for k in n) or (q is not None and q < 1):
        raise click.UsageError("ranks must be positive")
    sel = Selection(
        families=[FamilyKind(f) for f in family] or None,
        identities=list(identity) or None,
        sign_mode=sign_mode,
        sigma_mode=sigma_mode,
    )
    if n:
        sel.sostar = sel.sp = sel.phi = sel.msf_pf = tuple(n)
    if p is not None:
        sel.su = sel.msf_det = ((p, q),)
    return sel


@click.group()
@click.version_option(__version__, prog_name="hspgen")
def main() -> None:
    """Exact verification of symbol-level identities for SO*(2n), Sp(n,R), SU(p,q)."""


@main.command()
@click.option("--family", "-f", multiple=True, type=click.Choice([k.value for k in FamilyKind]), help="Restrict to a family (repeatable).")
@click.option("--n", "n", multiple=True, type=int, help="Rank n for sostar/sp, phi and msf-pf (repeatable).")
@click.option("--p", type=int, help="p for SU and msf-det.")
@click.option("--q", type=int, help="q for SU and msf-det.")
@click.option("--identity", "-i", multiple=True, type=click.Choice(IDENTITIES), help="Restrict to an identity (repeatable).")
@click.option("--all", "all_", is_flag=True, help="Run the full default grid.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), help="Write the report here instead of stdout.")
@click.option("--jobs", "-j", type=int, default=None, help=f"Worker processes (default ${JOBS_ENV} or 1).")
@click.option("--sign-mode", type=click.Choice([m.value for m in SignMode]), default=SignMode.CORRECTED.value, show_default=True, help="Sign convention for the block-determinant expansion.")
@click.option("--sigma-mode", type=click.Choice([m.value for m in SigmaMode]), default=SigmaMode.BLOCK.value, show_default=True, help="How the deformed symbol matrix is built.")
@click.option("--timings", is_flag=True, help="Show per-check wall time in text output.")
@click.option("--unsafe", is_flag=True, help="Ignore the cost guards.")
def verify(family, n, p, q, identity, all_, fmt, out, jobs, sign_mode, sigma_mode, timings, unsafe):
    """Run exact identity checks and report pass/fail per check."""
    sel = _build_selection(family, n, p, q, identity, all_, sign_mode, sigma_mode)
    _check_guards(sel, unsafe)
    jobs = _default_jobs() if jobs is None else jobs
    if jobs < 1:
        raise click.UsageError("--jobs must be >= 1")
    tasks = plan(sel)
    if not tasks:
        raise click.UsageError("the selection matches no checks")

    stream = open(out, "w", encoding="utf-8") if out else sys.stdout
    reports = []
    try:
        for r in iter_suite(sel, jobs=jobs):
            reports.append(r)
            if fmt == "text":
                stream.write(r.to_text(timings) + "\n")
            else:
                stream.write(r.to_json() + "\n")
            stream.flush()
        passed, failed = summarize(reports)
        if fmt == "text":
            stream.write(f"{passed} passed, {failed} failed\n")
    finally:
        if out:
            stream.close()
    sys.exit(1 if failed else 0)


def _family(family, n, p, q) -> PairFamily:
    if family is None:
        raise click.UsageError("--family is required for this target")
    try:
        if family == "su":
            if p is None or q is None:
                raise click.UsageError("--p and --q are required for su")
            return PairFamily.su(p, q)
        if n is None:
            raise click.UsageError("--n is required for sostar and sp")
        return PairFamily(FamilyKind(family), n=n)
    except ValueError as exc:
        raise click.UsageError(str(exc))


def _matrix_lines(m: PolyMatrix) -> list[str]:
    return [f"({i + 1},{j + 1}): {m[i, j].to_text()}" for i in range(m.rows) for j in range(m.cols)]


def _sparse_text(entries) -> str:
    return ", ".join(f"({i + 1},{j + 1})={v}" for (i, j), v in entries)


@main.command()
@click.argument("what", type=click.Choice(["basis", "sigma", "sigma-tilde", "phi", "gamma", "Gamma"]))
@click.option("--family", "-f", type=click.Choice([k.value for k in FamilyKind]))
@click.option("--n", type=int)
@click.option("--p", type=int)
@click.option("--q", type=int)
@click.option("--k", type=int, help="Index for gamma/Gamma (default: all).")
@click.option("--sigma-mode", type=click.Choice([m.value for m in SigmaMode]), default=SigmaMode.BLOCK.value, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def dump(what, family, n, p, q, k, sigma_mode, fmt):
    """Print a constructed object (basis, symbol matrices, Phi, invariants)."""
    if what == "phi":
        if n is None or n < 1:
            raise click.UsageError("--n >= 1 is required for phi")
        if n > GUARDS["phi"]:
            raise GuardError(f"phi n={n} > {GUARDS['phi']}")
        title, m = f"phi n={n}", build_phi(n)
        _emit_matrix(title, m, fmt)
        return
    f = _family(family, n, p, q)
    if what == "basis":
        data = [
            {"element": b.name, "matrix": _sparse_text(b.entries), "dual": _sparse_text(d.entries)}
            for b, d in zip(build_basis(f), dual_basis(f))
        ]
        if fmt == "json":
            click.echo(json.dumps({"family": f.name, "basis": data}, indent=1))
        else:
            click.echo(f"# basis {f.name}, dimension {len(data)}")
            for row in data:
                click.echo(f"{row['element']}: {row['matrix']}  | dual: {row['dual']}")
        return
    if what in ("sigma", "sigma-tilde"):
        m = build_sigma(f, deformed=what == "sigma-tilde", mode=sigma_mode)
        _emit_matrix(f"{what} {f.name}", m, fmt)
        return
    ks = [k] if k is not None else list(range(f.rank + 1))
    if any(x < 0 or x > f.rank for x in ks):
        raise click.UsageError(f"k must lie in [0, {f.rank}] for {f.name}")
    items = []
    for x in ks:
        text = gamma_k(f, x).to_text() if what == "gamma" else Gamma_k(f, x).to_text()
        items.append((x, text))
    if fmt == "json":
        click.echo(json.dumps({"family": f.name, what: {str(x): t for x, t in items}}, indent=1))
    else:
        for x, t in items:
            click.echo(f"{what}_{x} {f.name}: {t}")


def _emit_matrix(title: str, m: PolyMatrix, fmt: str) -> None:
    if fmt == "json":
        click.echo(json.dumps({"title": title, "rows": m.rows, "cols": m.cols, "entries": m.to_text()}, indent=1))
        return
    click.echo(f"# {title} ({m.rows}x{m.cols})")
    for line in _matrix_lines(m):
        click.echo(line)


if __name__ == "__main__":
    main()
