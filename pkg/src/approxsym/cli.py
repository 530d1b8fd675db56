"""Command-line front end.

Exit status: 0 when every check passes, 1 when the report contains a
reference diff, 2 on error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

import sympy as sp

from . import adjoint as adj
from . import detsolve, invariants, liealg, optimal, reference
from .grammar import ParseError, parse, to_text
from .jet import VectorField
from .symbolic import T, X, normalize

EXIT_OK, EXIT_DIFF, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


@dataclass
class RunConfig:
    pde: detsolve.PerturbedPDE
    preset: str | None
    ansatz: detsolve.Ansatz
    fmt: str
    seed: int


def ansatz_for_degree(n: int) -> detsolve.Ansatz:
    """Degree ``n`` for xi, tau in (x, t); phi affine in u with degree ``n - 1``."""
    if n < 0:
        raise CliError("ansatz degree must be >= 0")
    return detsolve.Ansatz(n, 0, max(n - 1, 0), min(n, 1))


def make_config(args) -> RunConfig:
    if args.pde and args.preset:
        raise CliError("give either --pde or --preset, not both")
    if args.perturb and not args.pde:
        raise CliError("--perturb needs --pde")
    if args.pde:
        pde = detsolve.PerturbedPDE.from_text(args.pde, args.perturb or "0")
        preset = None
    else:
        preset = args.preset or "harry-dym"
        from .presets import preset_pde
        pde = preset_pde(preset)
    return RunConfig(pde, preset, ansatz_for_degree(args.ansatz_deg), args.format, args.seed)


def load_schema(command: str) -> dict:
    """JSON schema shipped for the output of ``command``."""
    return json.loads(resources.files(__package__).joinpath(f"schemas/{command}.json").read_text())


# -- shared helpers -------------------------------------------------------------

def field_json(vf: VectorField) -> dict:
    return {"xi": to_text(vf.xi), "tau": to_text(vf.tau), "phi": to_text(vf.phi)}


def subspace_json(sub: liealg.Subspace, labels) -> list[str]:
    idx = sub.basis_indices()
    if idx is not None:
        return [labels[i] for i in idx]
    return [liealg.vector_text(r, labels) for r in sub.rows]


def diff(item: str, published: str, derived: str, note: str = "") -> dict:
    out = {"item": item, "published": published, "derived": derived}
    if note:
        out["note"] = note
    return out


def _exact(config: RunConfig) -> detsolve.GeneratorBasis:
    if config.preset and config.ansatz == detsolve.Ansatz():
        from .presets import exact_basis
        return exact_basis(config.preset)
    return detsolve.solve_exact(config.pde, config.ansatz)


def _algebra(config: RunConfig) -> liealg.LieAlgebraTable:
    exact = _exact(config)
    if not len(exact):
        raise CliError("empty basis")
    return liealg.structure_constants(detsolve.algebra_basis(exact).fields)


# -- symmetries -----------------------------------------------------------------

def cmd_symmetries(config: RunConfig, args) -> dict:
    pde = config.pde
    exact = _exact(config)
    report = detsolve.stability(pde, config.ansatz, exact)
    approx = detsolve.approximate_symmetries(pde, config.ansatz, exact)
    residuals = [detsolve.approximate_residual(vf, pde) for vf in approx.fields]
    out = {
        "pde": pde.to_text(),
        "ansatz": vars(config.ansatz).copy(),
        "exact": [field_json(vf) for vf in exact.fields],
        "exact_residual_zero": [detsolve.exact_residual(vf, pde) == 0 for vf in exact.fields],
        "auxiliary_H": [to_text(detsolve.auxiliary_H(vf, pde)) for vf in exact.fields],
        "stable": report.stable,
        "deformations": [field_json(d) if d is not None else None for d in report.deformations],
        "approximate": [dict(field_json(vf), tag=tag) for vf, tag in zip(approx.fields, approx.tags)],
        "approximate_residual_zero": [r.is_zero() for r in residuals],
        "reference_diff": [],
    }
    if config.preset == "harry-dym":
        out["reference_diff"] = symmetries_diff(pde, exact)
    return out


def _xt_degree(e) -> int:
    return sp.Poly(e, X, T).total_degree()


def symmetries_diff(pde, exact) -> list[dict]:
    diffs = []
    for k, (xi, tau, phi) in enumerate(reference.GENERATORS, start=1):
        vf = VectorField(parse(xi), parse(tau), parse(phi))
        res = detsolve.exact_residual(vf, pde)
        if res != 0:
            same_shape = [f for f in exact.fields if _xt_degree(f.xi) == _xt_degree(vf.xi)]
            derived = same_shape[0].to_text() if same_shape else "none"
            diffs.append(diff(f"generator {k}", vf.to_text(), derived,
                              f"published field has residual {to_text(res)}"))
    xi, tau, phi = (parse(s) for s in reference.GENERIC_EXACT)
    diffs.append(diff("generic exact phi", to_text(phi), "(A2 - A5 + A3*x)*u",
                      "published coefficient of u is not linear in the constants; "
                      "the residual fixes it to -A5 for tau = A4 + 3*A5*t"))
    consistent = VectorField(parse("A1 + A2*x + A3/2*x^2"), parse("A4 + A5*t"),
                             parse("(A2 - A5/3 + A3*x)*u"))
    h = detsolve.auxiliary_H(consistent, pde)
    literal = detsolve.auxiliary_H(
        VectorField(xi, tau, parse("(A2 - A5 + A3*x)*u")), pde)
    published_h = normalize(parse(reference.AUXILIARY_H))
    if normalize(h - published_h) != 0:
        diffs.append(diff("auxiliary H", to_text(published_h), to_text(h)))
    if normalize(literal - published_h) != 0:
        diffs.append(diff("auxiliary H (tau = A4 + 3*A5*t)", to_text(published_h), to_text(literal),
                          "published H matches when the A5 generator is (3*t*Dt - u*Du)/3"))
    deformation = detsolve.solve_deformation(consistent, pde)
    printed = VectorField(*(parse(s) for s in reference.DEFORMATION))
    for name, ok in deformation.membership_by_parameter(printed).items():
        if not ok:
            diffs.append(diff(f"deformation term {name}", printed.to_text(),
                              deformation.particular.to_text(),
                              f"the {name} part is not a solution; for C1 the sign of C1/3*u "
                              "must be negative" if name == "C1" else ""))
    return diffs


def render_symmetries(out: dict, fmt: str) -> str:
    if fmt == "latex":
        lines = [r"\begin{align*}"]
        for k, f in enumerate(out["approximate"], start=1):
            vf = VectorField(parse(f["xi"]), parse(f["tau"]), parse(f["phi"]))
            lines.append(rf"\mathbf{{v}}_{{{k}}} &= {field_latex(vf)} \\")
        lines.append(r"\end{align*}")
        return "\n".join(lines) + "\n"
    lines = [f"pde: {out['pde']} = 0", "", "== exact symmetries =="]
    for k, (f, ok) in enumerate(zip(out["exact"], out["exact_residual_zero"]), start=1):
        lines.append(f"X{k} = {text_field(f)}  [{mark(ok)}]")
    lines += ["", "== auxiliary H and deformations =="]
    for k, (h, st, d) in enumerate(zip(out["auxiliary_H"], out["stable"], out["deformations"]), 1):
        dtext = text_field(d) if d else "none"
        lines.append(f"X{k}: H = {h}; {'stable' if st else 'unstable'}; X1 = {dtext}")
    lines += ["", "== approximate symmetries =="]
    for k, (f, ok) in enumerate(zip(out["approximate"], out["approximate_residual_zero"]), 1):
        lines.append(f"v{k} = {text_field(f)}  ({f['tag']}) [{mark(ok)}]")
    lines += render_diff(out["reference_diff"])
    return "\n".join(lines) + "\n"


def text_field(f: dict) -> str:
    return VectorField(parse(f["xi"]), parse(f["tau"]), parse(f["phi"])).to_text()


def field_latex(vf: VectorField) -> str:
    parts = []
    for c, d in zip(vf.coefficients, ("x", "t", "u")):
        if c != 0:
            parts.append(rf"\left({sp.latex(c)}\right)\partial_{d}")
    return " + ".join(parts) or "0"


# -- algebra --------------------------------------------------------------------

def cmd_algebra(config: RunConfig, args) -> dict:
    g = _algebra(config)
    labels = g.labels
    series = liealg.derived_series(g)
    rad = liealg.radical(g)
    out = {
        "table": g.to_json(),
        "brackets": [[g.bracket_text(i, j) for j in range(g.dim)] for i in range(g.dim)],
        "derived_series": [subspace_json(s, labels) for s in series],
        "derived_series_dims": [s.dim for s in series],
        "radical": subspace_json(rad, labels),
        "solvable_chain": [subspace_json(s, labels) for s in liealg.solvable_chain(g, rad)],
        "reference_diff": [],
    }
    if config.preset == "harry-dym":
        out.update(algebra_preset(config, g))
    return out


def algebra_preset(config: RunConfig, g) -> dict:
    labels = g.labels
    diffs = []
    for i in range(g.dim):
        for j in range(g.dim):
            printed = reference.combination(reference.COMMUTATORS[i][j])
            derived = [g.constant(i, j, k) for k in range(g.dim)]
            if [Fraction(str(c)) for c in printed] != derived:
                diffs.append(diff(f"[v{i + 1},v{j + 1}]", reference.COMMUTATORS[i][j],
                                  g.bracket_text(i, j)))
    series = liealg.derived_series(g)
    for k, (pub, got) in enumerate(zip(reference.DERIVED_SERIES, series)):
        want = liealg.Subspace.of_indices(g.dim, [i - 1 for i in pub])
        if want != got:
            diffs.append(diff(f"derived series term {k}", str(pub), got.text(labels)))
    rad = liealg.radical(g)
    if rad != liealg.Subspace.of_indices(g.dim, [i - 1 for i in reference.RADICAL]):
        diffs.append(diff("radical", str(reference.RADICAL), rad.text(labels)))
    levi_space = liealg.Subspace.of_indices(g.dim, [i - 1 for i in reference.LEVI_FACTOR])
    levi = liealg.levi_check(g, levi_space)
    chain = liealg.solvable_chain(g, rad)
    for k, (pub, got) in enumerate(zip(reference.SOLVABLE_CHAIN, chain), start=1):
        if liealg.Subspace.of_indices(g.dim, [i - 1 for i in pub]) != got:
            diffs.append(diff(f"solvable chain term {k}", str(pub), got.text(labels)))
    name, images = reference.ISOMORPHISM
    sub = liealg.subalgebra_table(g, levi_space)
    target = liealg.reference_algebra(name)
    printed_ok = liealg.check_homomorphism(liealg.diagonal(images), sub, target)
    witness = liealg.search_diagonal_isomorphism(sub, target)
    if not printed_ok:
        diffs.append(diff(f"isomorphism onto {name}", f"diag{tuple(images)}",
                          f"diag{tuple(int(x) if x.denominator == 1 else str(x) for x in witness)}"
                          if witness else "none found"))
    deformed = liealg.structure_constants(
        detsolve.approximate_symmetries(config.pde, config.ansatz, _exact(config)).fields)
    return {
        "levi": {"subspace": subspace_json(levi_space, labels), "subalgebra": levi.subalgebra,
                 "nondegenerate": levi.nondegenerate,
                 "trivial_intersection": levi.trivial_intersection, "spans": levi.spans},
        "isomorphism": {"target": name, "published_map": [str(x) for x in images],
                        "published_ok": printed_ok,
                        "witness": [str(x) for x in witness] if witness else None},
        "deformed_brackets": [[deformed.bracket_text(i, j) for j in range(deformed.dim)]
                              for i in range(deformed.dim)],
        "reference_diff": diffs,
    }


def render_algebra(out: dict, fmt: str) -> str:
    n = len(out["brackets"])
    labels = [f"v{i + 1}" for i in range(n)]
    if fmt == "latex":
        lines = [r"\begin{array}{c|" + "c" * n + "}",
                 " & " + " & ".join(rf"\mathbf{{v}}_{{{i + 1}}}" for i in range(n)) + r" \\ \hline"]
        for i, row in enumerate(out["brackets"]):
            cells = [latex_combo(c) for c in row]
            lines.append(rf"\mathbf{{v}}_{{{i + 1}}} & " + " & ".join(cells) + r" \\")
        lines.append(r"\end{array}")
        return "\n".join(lines) + "\n"
    lines = ["== commutators [row, column] =="]
    width = max(len(c) for row in out["brackets"] + [labels] for c in row) + 1
    lines.append(" " * 5 + "".join(l.ljust(width) for l in labels))
    for l, row in zip(labels, out["brackets"]):
        lines.append(l.ljust(5) + "".join(c.ljust(width) for c in row).rstrip())
    lines += ["", "== structure =="]
    lines.append("derived series dims: " + ", ".join(map(str, out["derived_series_dims"])))
    for k, s in enumerate(out["derived_series"]):
        lines.append(f"  g({k}) = span{{{', '.join(s)}}}")
    lines.append(f"radical = span{{{', '.join(out['radical'])}}}")
    lines.append("solvable chain: " + " > ".join(
        "{0}" if not s else "span{" + ", ".join(s) + "}" for s in out["solvable_chain"]))
    if "levi" in out:
        lv = out["levi"]
        lines.append(f"levi factor span{{{', '.join(lv['subspace'])}}}: subalgebra={lv['subalgebra']} "
                     f"nondegenerate={lv['nondegenerate']} "
                     f"trivial_intersection={lv['trivial_intersection']} spans={lv['spans']}")
        iso = out["isomorphism"]
        lines.append(f"isomorphism onto {iso['target']}: published diag({', '.join(iso['published_map'])}) "
                     f"{'ok' if iso['published_ok'] else 'fails'}; witness "
                     f"{'diag(' + ', '.join(iso['witness']) + ')' if iso['witness'] else 'none'}")
        lines += ["", "== commutators of the deformed basis =="]
        for l, row in zip(labels, out["deformed_brackets"]):
            lines.append(l.ljust(5) + " | ".join(row))
    lines += render_diff(out["reference_diff"])
    return "\n".join(lines) + "\n"


def latex_combo(text: str) -> str:
    import re
    return re.sub(r"v(\d+)", r"\\mathbf{v}_{\1}", text).replace("*", "")


# -- adjoint --------------------------------------------------------------------

def cmd_adjoint(config: RunConfig, args) -> dict:
    g = _algebra(config)
    table = adj.adjoint_table(g)
    out = {
        "entries": [[adj.entry_text(m, j, g.labels) for j in range(g.dim)] for m in table],
        "identity_at_zero": all(
            m.entries[j][k].at(0) == (1 if j == k else 0)
            for m in table for j in range(g.dim) for k in range(g.dim)),
        "latex": adj.latex_table(g, table),
        "reference_diff": [],
    }
    if config.preset == "harry-dym":
        out["reference_diff"] = adjoint_diff(g, table)
    return out


def adjoint_diff(g, table) -> list[dict]:
    mu = sp.Symbol("mu")
    diffs = []
    for i, m in enumerate(table):
        for j in range(g.dim):
            printed = reference.ADJOINT[i][j]
            derived = adj.entry_text(m, j, g.labels)
            try:
                coeffs = reference.combination(printed)
            except ValueError:
                diffs.append(diff(f"Ad(v{i + 1}) v{j + 1}", printed, derived, "malformed entry"))
                continue
            if any(normalize(c - m.entries[j][k].to_expr(mu)) != 0 for k, c in enumerate(coeffs)):
                diffs.append(diff(f"Ad(v{i + 1}) v{j + 1}", printed, derived))
    return diffs


def render_adjoint(out: dict, fmt: str) -> str:
    if fmt == "latex":
        return out["latex"]
    lines = ["== Ad(exp(mu*v_i)) v_j =="]
    for i, row in enumerate(out["entries"]):
        for j, e in enumerate(row):
            lines.append(f"v{i + 1} | v{j + 1} : {e}")
    lines.append(f"identity at mu = 0: {mark(out['identity_at_zero'])}")
    lines += render_diff(out["reference_diff"])
    return "\n".join(lines) + "\n"


# -- optimal --------------------------------------------------------------------

def _need_preset(config: RunConfig, what: str):
    if config.preset != "harry-dym":
        raise CliError(f"{what} is only available for the harry-dym preset")


def parse_vector(text: str) -> list[Fraction]:
    try:
        w = [Fraction(p.strip()) for p in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise CliError(f"bad vector {text!r}: expected comma-separated rationals") from None
    if len(w) != 10:
        raise CliError(f"vector needs 10 entries, got {len(w)}")
    if not any(w):
        raise CliError("zero vector")
    return w


def cmd_optimal(config: RunConfig, args) -> dict:
    _need_preset(config, "the optimal-system ladder")
    from .presets import adjoints
    table = adjoints(config.preset)
    if args.vector:
        w = parse_vector(args.vector)
        rep, trace = optimal.normalize_vector(w, table)
        replayed = optimal.replay(optimal.ReductionTrace.from_script(trace.script()), w, table)
        return {
            "input": [str(x) for x in w],
            "family": rep.family,
            "representative": rep.text(),
            "params": {k: str(v) for k, v in rep.params.items()},
            "trace": trace.script(),
            "replay_ok": replayed == rep.vector,
            "reference_diff": [],
        }
    audit = optimal.audit_table(table, seed=config.seed)
    diffs = []
    for row in audit.rows:
        if not row.fixed_point:
            diffs.append(diff(f"family {row.ident}", row.published, row.derived, "not a fixed point"))
        elif row.published.replace(" ", "") != row.derived.replace(" ", ""):
            diffs.append(diff(f"family {row.ident}", row.published, row.derived,
                              "parameter pattern differs"))
    for a, b in audit.duplicates:
        diffs.append(diff(f"families {a} and {b}", "listed separately", "same family", "duplicate"))
    for ident in audit.unlisted:
        fam = next(f for f in optimal.FAMILIES if f.ident == ident)
        diffs.append(diff(f"family {ident}", "absent", fam.text(), "reached by the ladder"))
    return {
        "families": [{"ident": f.ident, "template": f.text()} for f in optimal.FAMILIES],
        "audit": [{"ident": r.ident, "published": r.published, "reached": r.reached,
                   "fixed_point": r.fixed_point} for r in audit.rows],
        "reference_diff": diffs,
    }


def render_optimal(out: dict, fmt: str) -> str:
    if "family" in out:
        if fmt == "latex":
            rep = latex_combo(out["representative"])
            return f"\\mathbf{{v}}^{{{out['family']}}} = {rep}\n"
        lines = [f"family: {out['family']}", f"representative: {out['representative']}"]
        if out["params"]:
            lines.append("params: " + ", ".join(f"{k} = {v}" for k, v in out["params"].items()))
        lines += ["trace:"] + ["  " + l for l in out["trace"].splitlines()]
        lines.append(f"replay: {mark(out['replay_ok'])}")
        return "\n".join(lines) + "\n"
    if fmt == "latex":
        lines = [r"\begin{array}{l}"]
        lines += [rf"\mathbf{{v}}^{{{f['ident']}}} = {latex_combo(f['template'])} \\"
                  for f in out["families"]]
        lines.append(r"\end{array}")
        return "\n".join(lines) + "\n"
    lines = ["== ladder families =="]
    lines += [f"{f['ident']:>2}: {f['template']}" for f in out["families"]]
    lines += ["", "== published families =="]
    for r in out["audit"]:
        lines.append(f"{r['ident']:>2}: {r['published']} -> family {r['reached']} "
                     f"[{'fixed' if r['fixed_point'] else 'moved'}]")
    lines += render_diff(out["reference_diff"])
    return "\n".join(lines) + "\n"


# -- invariants -------------------------------------------------------------------

def cmd_invariants(config: RunConfig, args) -> dict:
    basis = detsolve.algebra_basis(_exact(config)).fields
    if args.generator:
        vf = invariants.generator(args.generator, basis)
        try:
            pair = invariants.characteristic_invariants(vf)
        except invariants.NotInCatalog as exc:
            raise CliError(f"{exc}; check candidates with verify_invariant") from None
        ok = invariants.verify_invariant(vf, pair.first) and invariants.verify_invariant(vf, pair.second)
        return {"rows": [row_json(invariants.InvariantRow(args.generator, vf, None, None, pair, ok))],
                "reference_diff": []}
    _need_preset(config, "the invariant table")
    rows = invariants.invariant_table(basis)
    diffs = [diff(f"invariants of {r.operator}", " , ".join(r.published.text()),
                  " , ".join(r.derived.text()) if r.derived else "none", "published pair fails")
             for r in rows if not r.published_ok]
    out = {"rows": [row_json(r) for r in rows], "reference_diff": diffs}
    out["latex"] = invariants.table_latex(rows)
    return out


def row_json(r: invariants.InvariantRow) -> dict:
    return {
        "operator": r.operator,
        "field": field_json(r.field),
        "published": list(r.published.text()) if r.published else None,
        "published_ok": r.published_ok,
        "derived": list(r.derived.text()) if r.derived else None,
        "derived_ok": r.derived_ok,
        "status": r.status,
        "note": r.note,
    }


def render_invariants(out: dict, fmt: str) -> str:
    if fmt == "latex" and "latex" in out:
        return out["latex"]
    lines = ["== invariants =="]
    for r in out["rows"]:
        if r["published"]:
            lines.append(f"{r['operator']} | {r['published'][0]} | {r['published'][1]} | {r['status']}")
        if r["derived"] and (not r["published_ok"]):
            lines.append(f"{r['operator']} | {r['derived'][0]} | {r['derived'][1]} | derived "
                         f"[{mark(bool(r['derived_ok']))}]")
    lines += render_diff(out["reference_diff"])
    return "\n".join(lines) + "\n"


# -- output -----------------------------------------------------------------------

def use_color() -> bool:
    return os.environ.get("APPROXSYM_COLOR", "1") != "0" and sys.stdout.isatty()


def mark(ok: bool) -> str:
    text = "ok" if ok else "FAIL"
    if use_color():
        return f"\033[{'32' if ok else '31'}m{text}\033[0m"
    return text


def render_diff(diffs: list[dict]) -> list[str]:
    if not diffs:
        return []
    lines = ["", "== reference diff =="]
    for d in diffs:
        line = f"{d['item']}: published {d['published']} | derived {d['derived']}"
        if d.get("note"):
            line += f"  ({d['note']})"
        lines.append(line)
    return lines


COMMANDS = {
    "symmetries": (cmd_symmetries, render_symmetries),
    "algebra": (cmd_algebra, render_algebra),
    "adjoint": (cmd_adjoint, render_adjoint),
    "optimal": (cmd_optimal, render_optimal),
    "invariants": (cmd_invariants, render_invariants),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pde", help="unperturbed left-hand side F0, e.g. 'u_t + u*u_x'")
    common.add_argument("--perturb", help="perturbation F1 (needs --pde)")
    common.add_argument("--preset", choices=["harry-dym"], help="built-in equation")
    common.add_argument("--format", choices=["text", "json", "latex"], default="text")
    common.add_argument("--ansatz-deg", type=int, default=3, help="degree bound for xi, tau")
    common.add_argument("--seed", type=int, default=0)
    parser = argparse.ArgumentParser(prog="approxsym", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("symmetries", parents=[common], help="exact and approximate generators")
    sub.add_parser("algebra", parents=[common], help="commutators and structure")
    sub.add_parser("adjoint", parents=[common], help="adjoint representation")
    p = sub.add_parser("optimal", parents=[common], help="optimal system and classification")
    p.add_argument("--vector", help="10 comma-separated rationals")
    p = sub.add_parser("invariants", parents=[common], help="invariants of generators")
    p.add_argument("--generator", help="combination of v1..v10, e.g. 'v7 + a*v8'")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run, render = COMMANDS[args.command]
    try:
        config = make_config(args)
        out = run(config, args)
    except (CliError, ParseError, ValueError, ZeroDivisionError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"approxsym: error: {msg}", file=sys.stderr)
        return EXIT_ERROR
    if config.fmt == "json":
        out = {k: v for k, v in out.items() if k != "latex"}
        sys.stdout.write(json.dumps(out, indent=2) + "\n")
    else:
        sys.stdout.write(render(out, config.fmt))
    return EXIT_DIFF if out.get("reference_diff") else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
