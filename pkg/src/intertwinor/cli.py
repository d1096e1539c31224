"""Command-line front end: single evaluations, grid tables, verification, torus runs.

Output is deterministic: records echo their full inputs, exact values are
serialized as num/den strings (never floats), poles as "pole", and float-mode
values in the shortest round-trip form (or at a requested precision).  The
``verify`` and ``torus`` commands exit 0 exactly when everything passes, so
they double as CI gates.  The only environment variable honored is
INTERTWINOR_OUTDIR, which prefixes relative output paths.
"""

from __future__ import annotations

import csv
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from . import blocks, spectra, torus, verify
from .arithmetic import format_fraction
from .spectra import (
    BundleParams,
    DegenerateNormalizationError,
    Family,
    KTypeLabel,
    NonexistentKTypeError,
)

FAMILY_CHOICES = ("coexact", "exact", "mixed", "m1-delta", "m1-d", "m2")
TABLE_HEADER = ("p", "q", "k", "a", "jp", "j", "r", "family", "operator",
                "s", "Jp", "J", "value", "coeff", "radicand", "trace", "det")


def _resolve_out(path: Optional[str]) -> Optional[Path]:
    if path is None:
        return None
    p = Path(path)
    outdir = os.environ.get("INTERTWINOR_OUTDIR")
    if outdir and not p.is_absolute():
        p = Path(outdir) / p
    return p


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _json_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"


def _parse_r(text: str, mode: str):
    """Exact mode accepts integers only; float mode accepts any real.

    Integral orders always route to the exact evaluation path, even in float
    mode, where the separate numeric gammas would sit on spurious poles.
    """
    if mode == "exact":
        try:
            value = Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise click.BadParameter(f"could not parse r={text!r}")
        if value.denominator != 1:
            raise click.BadParameter(
                f"exact mode requires integer r, got {text}; use --mode float")
        return int(value)
    try:
        value = float(Fraction(text)) if "/" in text else float(text)
    except ValueError:
        raise click.BadParameter(f"could not parse r={text!r}")
    return int(value) if value.is_integer() else value


def _bundle(p: int, q: int, k: int, a: int) -> BundleParams:
    try:
        return BundleParams(p, q, k, a)
    except ValueError as err:
        raise click.ClickException(str(err))


def _fmt_float(x: float, precision: int) -> str:
    return repr(x) if precision >= 17 else format(x, f".{precision}g")


def _eval_record(params: BundleParams, jp: int, j: int, r, family: Family,
                 operator: str, mode: str, precision: int = 17) -> dict:
    label = KTypeLabel(family, jp, j)
    if not spectra.ktype_exists(params, label):
        raise NonexistentKTypeError(
            f"{family.value} type at (j'={jp}, j={j}) is empty for these parameters")
    pt = spectra.spectral_point(params, jp, j)
    record = {
        "p": params.p, "q": params.q, "k": params.k, "a": params.a,
        "jp": jp, "j": j, "r": str(r), "family": family.value,
        "operator": operator, "mode": mode,
        "s": format_fraction(params.s),
        "Jp": format_fraction(pt.Jp), "J": format_fraction(pt.J),
    }
    if operator == "even-order":
        if family is Family.MIXED:
            block = blocks.even_order_block(params, pt, int(r))
            record.update(trace=format_fraction(block.trace),
                          det=format_fraction(block.det))
        else:
            value = blocks.even_order_eigenvalue(family, params, pt, int(r))
            record.update(value=format_fraction(value), zero=value == 0)
        return record
    if family is Family.MIXED:
        det = spectra.mult2_det(pt, r)
        record["det"] = det.serialize()
        record["pole"] = det.is_pole
        if mode == "exact":
            try:
                block = blocks.intertwinor_block(params, pt, Fraction(r), 1)
                record["trace_unit_seed"] = format_fraction(block.trace)
            except DegenerateNormalizationError as err:
                record["trace_unit_seed"] = f"degenerate: {err}"
            record["seed_squared"] = blocks.block_scale_squared(params, pt, int(r)).serialize()
        return record
    value = spectra.normalized_eigenvalue(
        family, params, pt, r if mode == "float" else int(r))
    record["coeff"] = value.coeff.serialize()
    record["radicand"] = format_fraction(value.radicand) \
        if isinstance(value.radicand, Fraction) else _fmt_float(value.radicand, precision)
    record["pole"] = value.coeff.is_pole
    record["zero"] = value.coeff.is_zero
    if mode == "float":
        z = value.to_complex()
        record["value_float"] = _fmt_float(z.real, precision) if z.imag == 0 else \
            {"re": _fmt_float(z.real, precision), "im": _fmt_float(z.imag, precision)}
    return record


@click.group()
def main():
    """Spectra of conformal intertwinors on form bundles over sphere products."""


@main.command("eval")
@click.option("--p", type=int, required=True)
@click.option("--q", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--a", type=int, required=True)
@click.option("--jp", type=int, required=True, help="first-factor harmonic level j'")
@click.option("--j", type=int, required=True, help="second-factor harmonic level j")
@click.option("--r", "r_text", type=str, required=True, help="order parameter")
@click.option("--family", type=click.Choice(FAMILY_CHOICES), required=True)
@click.option("--operator", type=click.Choice(("normalized", "even-order")),
              default="normalized", show_default=True)
@click.option("--mode", type=click.Choice(("exact", "float")), default="exact",
              show_default=True)
@click.option("--precision", type=click.IntRange(2, 17), default=17, show_default=True,
              help="significant digits for floats in float mode")
@click.option("-o", "--output", type=str, default=None, help="write the record here")
def cmd_eval(p, q, k, a, jp, j, r_text, family, operator, mode, precision, output):
    """Evaluate one spectral quantity at a single parameter point."""
    params = _bundle(p, q, k, a)
    r = _parse_r(r_text, mode if operator == "normalized" else "exact")
    try:
        record = _eval_record(params, jp, j, r, Family.parse(family), operator, mode,
                              precision)
    except (NonexistentKTypeError, DegenerateNormalizationError, ValueError) as err:
        raise click.ClickException(str(err))
    _emit(_json_line(record), _resolve_out(output))


def _table_rows(params, jp_max, j_max, r, family, operator, mode, precision=17):
    for jp in range(jp_max + 1):
        for j in range(j_max + 1):
            if not spectra.ktype_exists(params, KTypeLabel(family, jp, j)):
                continue
            try:
                rec = _eval_record(params, jp, j, r, family, operator, mode, precision)
            except DegenerateNormalizationError:
                pt = spectra.spectral_point(params, jp, j)
                rec = {
                    "p": params.p, "q": params.q, "k": params.k, "a": params.a,
                    "jp": jp, "j": j, "r": str(r), "family": family.value,
                    "operator": operator, "mode": mode,
                    "s": format_fraction(params.s),
                    "Jp": format_fraction(pt.Jp), "J": format_fraction(pt.J),
                    "value": "degenerate",
                }
            yield rec


@main.command("table")
@click.option("--p", type=int, required=True)
@click.option("--q", type=int, required=True)
@click.option("--k", type=int, required=True)
@click.option("--a", type=int, required=True)
@click.option("--jp-max", type=int, required=True)
@click.option("--j-max", type=int, required=True)
@click.option("--r", "r_text", type=str, required=True)
@click.option("--family", type=click.Choice(FAMILY_CHOICES), required=True)
@click.option("--operator", type=click.Choice(("normalized", "even-order")),
              default="normalized", show_default=True)
@click.option("--mode", type=click.Choice(("exact", "float")), default="exact",
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(("csv", "jsonl")), default="csv",
              show_default=True)
@click.option("--precision", type=click.IntRange(2, 17), default=17, show_default=True,
              help="significant digits for floats in float mode")
@click.option("-o", "--output", type=str, default=None)
def cmd_table(p, q, k, a, jp_max, j_max, r_text, family, operator, mode, fmt,
              precision, output):
    """Tabulate spectral values over a level grid in lexicographic row order."""
    params = _bundle(p, q, k, a)
    r = _parse_r(r_text, mode if operator == "normalized" else "exact")
    rows = list(_table_rows(params, jp_max, j_max, r, Family.parse(family),
                            operator, mode, precision))
    if fmt == "jsonl":
        _emit("".join(_json_line(rec) for rec in rows), _resolve_out(output))
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TABLE_HEADER, extrasaction="ignore",
                            lineterminator="\n")
    writer.writeheader()
    for rec in rows:
        writer.writerow({key: rec.get(key, "") for key in TABLE_HEADER})
    _emit(buf.getvalue(), _resolve_out(output))


@main.command("verify")
@click.option("--suite", type=click.Choice(tuple(verify.SUITES) + ("all",)),
              default="all", show_default=True)
@click.option("--p-max", type=int, default=7, show_default=True)
@click.option("--q-max", type=int, default=7, show_default=True)
@click.option("--j-max", type=int, default=8, show_default=True)
@click.option("--r-max", type=int, default=4, show_default=True)
@click.option("-o", "--output", type=str, default="verify_report.jsonl",
              show_default=True)
def cmd_verify(suite, p_max, q_max, j_max, r_max, output):
    """Run the exact consistency suites; exit 0 only with zero failures."""
    grid = verify.GridSpec(p_max=p_max, q_max=q_max, j_max=j_max,
                           r_values=tuple(range(1, r_max + 1)))
    names = tuple(verify.SUITES) if suite == "all" else (suite,)
    all_reports = []
    failed = 0
    for name in names:
        reports = verify.SUITES[name](grid)
        counts = verify.summarize(reports)
        failed += counts[verify.FAIL]
        click.echo(f"{name}: total={counts['total']} pass={counts[verify.PASS]} "
                   f"fail={counts[verify.FAIL]} skipped={counts[verify.SKIP]}")
        all_reports.extend(reports)
    out = _resolve_out(output)
    out.parent.mkdir(parents=True, exist_ok=True)
    verify.write_report(all_reports, out)
    click.echo(f"report: {out}")
    sys.exit(0 if failed == 0 else 1)


@main.command("torus")
@click.option("--k", type=click.IntRange(0, 2), required=True)
@click.option("--r", "r_text", type=str, required=True)
@click.option("--m", "--M", "m_trunc", type=int, default=24, show_default=True,
              help="Fourier truncation")
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--mode", type=click.Choice(("exact", "float")), default="exact",
              show_default=True)
@click.option("-o", "--output", type=str, default=None)
def cmd_torus(k, r_text, m_trunc, tol, mode, output):
    """Measure the intertwining residual on the truncated torus basis."""
    r = _parse_r(r_text, mode)
    try:
        result = torus.intertwining_residual(m_trunc, k, r, mode=mode)
    except (torus.PoleOnModeError, ValueError) as err:
        raise click.ClickException(str(err))
    passed = result.residual < tol
    record = {
        "check": "intertwining-residual",
        "point": {"k": k, "r": str(r), "M": m_trunc, "mode": mode,
                  "margin": result.margin, "columns": result.columns},
        "status": "pass" if passed else "fail",
        "lhs": repr(result.residual),
        "rhs": f"tol {tol!r}",
    }
    line = _json_line(record)
    click.echo(line, nl=False)
    out = _resolve_out(output)
    if out is not None:
        _emit(line, out)
    sys.exit(0 if passed else 1)


if __name__ == "__main__":
    main()
