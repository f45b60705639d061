"""Command-line front end over JSON artifacts.

Artifacts (fields, sources, parents, codes) are small JSON documents that
are human-auditable against printed matrices.  Exit codes: 0 on success /
pass, 1 on a semantic failure (verification fails, not perfect, round-trip
failures, not compressible), 2 on invalid input.  Output is deterministic:
no timestamps, sorted keys.  Terminal indices are 0-based everywhere.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import analysis, codec
from .code import PartitionCode, construct_mpc, is_perfect, min_total_length, ratio_report, verify_compression
from .errors import MPCError
from .field import Field
from .linalg import FMatrix
from .parent import ParentMatrix, build_parent_thm7, s2_parent, validate_parent, zero_sum_repair
from .source import DEFAULT_ENUM_CAP, Source, generalized_hamming_source, hamming_source, make_source


def _dump(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out is None or out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read {path}: {exc}") from None


def _load_source(path: str) -> Source:
    return Source.from_json(_load(path))


def _load_code(path: str) -> PartitionCode:
    return PartitionCode.from_json(_load(path))


def _load_parent(path: str) -> ParentMatrix:
    return ParentMatrix.from_json(_load(path))


def _workers(cli_value: int) -> int:
    env = os.environ.get("MPC_WORKERS")
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise click.ClickException(f"MPC_WORKERS={env!r} is not an integer") from None
    return max(1, cli_value)


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.replace(" ", "").split(",") if x != ""]


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except MPCError as exc:
            click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
            sys.exit(2)


@click.group(cls=_Group, name="mpc")
def main() -> None:
    """Zero-error distributed compression with matrix partition codes."""


# --- artifact creation ----------------------------------------------------------

@main.command("make-source")
@click.option("--kind", type=click.Choice(["hamming", "generalized-hamming", "explicit"]), required=True)
@click.option("--p", type=int, required=True, help="field characteristic (prime)")
@click.option("--u", type=int, default=1, help="extension degree")
@click.option("--modulus", type=str, default=None, help="comma-separated modulus coefficients, constant first")
@click.option("--n", type=int, required=True)
@click.option("--s", type=int, required=True)
@click.option("--L", "scalars", type=str, default=None, help="comma-separated deviation scalars")
@click.option("--D-file", "d_file", type=str, default=None, help="JSON file with explicit representatives")
@click.option("--out", type=str, default=None)
def cmd_make_source(kind, p, u, modulus, n, s, scalars, d_file, out) -> None:
    """Create a source artifact."""
    field = Field(p, u, _parse_ints(modulus) if modulus else None)
    if kind == "hamming":
        src = hamming_source(field, n, s)
    elif kind == "generalized-hamming":
        if not scalars:
            raise click.ClickException("--L is required for generalized-hamming sources")
        src = generalized_hamming_source(field, n, s, _parse_ints(scalars))
    else:
        if not d_file:
            raise click.ClickException("--D-file is required for explicit sources")
        doc = _load(d_file)
        reps = doc["D"] if isinstance(doc, dict) else doc
        src = make_source(field, n, s, reps)
    _dump(src.to_json(), out)


@main.command("make-parent")
@click.option("--source", "source_path", type=str, required=True)
@click.option("--auto", is_flag=True, help="build from the source's scalar structure and repair")
@click.option("--q2-file", type=str, default=None, help="matrix JSON for the two-terminal construction")
@click.option("--blocks-file", type=str, default=None, help='{"blocks": [matrix, ...]} to validate as-is')
@click.option("--no-repair", is_flag=True, help="with --auto, emit the unrepaired candidate blocks")
@click.option("--out", type=str, default=None)
def cmd_make_parent(source_path, auto, q2_file, blocks_file, no_repair, out) -> None:
    """Create (or validate) a parent-matrix artifact for a source."""
    src = _load_source(source_path)
    if sum(map(bool, (auto, q2_file, blocks_file))) != 1:
        raise click.ClickException("choose exactly one of --auto, --q2-file, --blocks-file")
    if auto:
        if src.scalars is None:
            raise click.ClickException("--auto needs a hamming/generalized-hamming source")
        candidate = build_parent_thm7(src.field, list(src.scalars), src.s, src.n)
        if no_repair:
            blocks = [
                FMatrix(src.field, candidate.array[:, i * src.n:(i + 1) * src.n])
                for i in range(src.s)
            ]
            _dump({"field": src.field.to_json(), "r": candidate.rows, "s": src.s,
                   "n": src.n, "blocks": [b.to_json() for b in blocks],
                   "zero_sum_repaired": False}, out)
            return
        parent = zero_sum_repair(candidate, src)
    elif q2_file:
        parent = s2_parent(FMatrix.from_json(src.field, _load(q2_file)))
    else:
        doc = _load(blocks_file)
        parent = ParentMatrix([FMatrix.from_json(src.field, b) for b in doc["blocks"]])
    report = validate_parent(parent, src)
    _dump(parent.to_json(), out)
    click.echo(json.dumps(report.to_json(), sort_keys=True), err=True)
    if not report.ok:
        sys.exit(1)


@main.command("construct")
@click.option("--parent", "parent_path", type=str, required=True)
@click.option("--partition", type=str, default=None, help="comma-separated completion rows per terminal")
@click.option("--U-file", "u_file", type=str, default=None, help='{"U": [matrix or null, ...]}')
@click.option("--out", type=str, default=None)
def cmd_construct(parent_path, partition, u_file, out) -> None:
    """Build the minimal-length code from a parent matrix."""
    parent = _load_parent(parent_path)
    part = _parse_ints(partition) if partition else None
    u_mats = None
    if u_file:
        docs = _load(u_file)["U"]
        u_mats = [FMatrix.from_json(parent.field, d) if d is not None else None for d in docs]
    code = construct_mpc(parent, part, u_mats)
    _dump(code.to_json(), out)


# --- verification and analysis ----------------------------------------------------

@main.command("verify")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--source", "source_path", type=str, required=True)
@click.option("--mode", type=click.Choice(["structural", "exhaustive"]), default="structural")
@click.option("--cap", type=int, default=DEFAULT_ENUM_CAP)
def cmd_verify(code_path, source_path, mode, cap) -> None:
    """Check that the code compresses the source losslessly."""
    code = _load_code(code_path)
    src = _load_source(source_path)
    report = verify_compression(code, src, mode=mode, cap=cap)
    _dump(report.to_json(), None)
    sys.exit(0 if report.ok else 1)


@main.command("perfect")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--source", "source_path", type=str, required=True)
def cmd_perfect(code_path, source_path) -> None:
    """Check whether the code fills its codeword space exactly."""
    code = _load_code(code_path)
    src = _load_source(source_path)
    report = is_perfect(code, src)
    _dump(report.to_json(), None)
    sys.exit(0 if report.perfect else 1)


@main.command("ratio")
@click.option("--code", "code_path", type=str, required=True)
def cmd_ratio(code_path) -> None:
    """Per-terminal compression ratios and the minimality flag."""
    _dump(ratio_report(_load_code(code_path)).to_json(), None)


@main.command("min-length")
@click.option("--parent", "parent_path", type=str, required=True)
def cmd_min_length(parent_path) -> None:
    """Least total code length achievable from this parent."""
    _dump({"min_M": min_total_length(_load_parent(parent_path))}, None)


# --- data path ---------------------------------------------------------------------

def _stream(input_path: str | None):
    fh = sys.stdin if input_path in (None, "-") else open(input_path)
    try:
        for line in fh:
            line = line.strip()
            if line:
                yield line
    finally:
        if fh is not sys.stdin:
            fh.close()


def _emit(obj: dict, ofh) -> None:
    ofh.write(json.dumps(obj, sort_keys=True) + "\n")


@main.command("encode")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--input", "input_path", type=str, default=None, help="line-JSON {\"x\": [vec,...]}; default stdin")
@click.option("--output", "output_path", type=str, default=None)
def cmd_encode(code_path, input_path, output_path) -> None:
    """Encode source tuples, one JSON object per line."""
    code = _load_code(code_path)
    f = code.field
    ofh = sys.stdout if output_path in (None, "-") else open(output_path, "w")
    try:
        for k, line in enumerate(_stream(input_path)):
            try:
                x = json.loads(line)["x"]
                sigma = np.array(
                    [[f.element_from_json(e) for e in comp] for comp in x]
                )
                y = codec.encode(code, sigma)
                _emit({"y": [[f.element_to_json(int(v)) for v in part] for part in y]}, ofh)
            except (MPCError, KeyError, ValueError, json.JSONDecodeError) as exc:
                _emit({"error": f"{type(exc).__name__}: {exc}", "line": k}, ofh)
    finally:
        if ofh is not sys.stdout:
            ofh.close()


@main.command("decode")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--source", "source_path", type=str, required=True)
@click.option("--input", "input_path", type=str, default=None, help="line-JSON {\"y\": [vec,...]}; default stdin")
@click.option("--output", "output_path", type=str, default=None)
def cmd_decode(code_path, source_path, input_path, output_path) -> None:
    """Decode codewords, one JSON object per line; errors are in-stream records."""
    code = _load_code(code_path)
    src = _load_source(source_path)
    f = code.field
    decoder = codec.build_decoder(code, src)
    ofh = sys.stdout if output_path in (None, "-") else open(output_path, "w")
    try:
        for k, line in enumerate(_stream(input_path)):
            try:
                y = json.loads(line)["y"]
                parts = [[f.element_from_json(e) for e in part] for part in y]
                x = decoder.decode(parts)
                _emit({"x": [[f.element_to_json(int(v)) for v in comp] for comp in x]}, ofh)
            except (MPCError, KeyError, ValueError, json.JSONDecodeError) as exc:
                _emit({"error": f"{type(exc).__name__}: {exc}", "line": k}, ofh)
    finally:
        if ofh is not sys.stdout:
            ofh.close()


@main.command("roundtrip")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--source", "source_path", type=str, required=True)
@click.option("--exhaustive", is_flag=True)
@click.option("--samples", type=int, default=10_000)
@click.option("--seed", type=int, default=0)
@click.option("--cap", type=int, default=DEFAULT_ENUM_CAP)
@click.option("--workers", type=int, default=1, help="process count for exhaustive runs (MPC_WORKERS overrides)")
def cmd_roundtrip(code_path, source_path, exhaustive, samples, seed, cap, workers) -> None:
    """decode(encode(sigma)) == sigma over all of S or a random sample."""
    code = _load_code(code_path)
    src = _load_source(source_path)
    report = codec.roundtrip_report(
        code, src, exhaustive=exhaustive, samples=samples, seed=seed,
        cap=cap, workers=_workers(workers),
    )
    _dump(report.to_json(), None)
    sys.exit(0 if report.ok else 1)


# --- structure tools -----------------------------------------------------------------

@main.command("extract-parent")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--source", "source_path", type=str, required=True)
@click.option("--out", type=str, default=None)
def cmd_extract_parent(code_path, source_path, out) -> None:
    """Recover a parent matrix from any verified compression."""
    code = _load_code(code_path)
    src = _load_source(source_path)
    parent = analysis.extract_parent(code, src)
    _dump(parent.to_json(), out)
    report = validate_parent(parent, src)
    click.echo(json.dumps(report.to_json(), sort_keys=True), err=True)


@main.command("shift")
@click.option("--code", "code_path", type=str, required=True)
@click.option("--source", "source_path", type=str, required=True)
@click.option("--perm", type=str, required=True, help="comma-separated terminal order (0-based)")
@click.option("--K-file", "k_file", type=str, required=True, help="matrix JSON; columns span K")
@click.option("--out", type=str, default=None)
def cmd_shift(code_path, source_path, perm, k_file, out) -> None:
    """Move a shared nullspace component between terminals."""
    code = _load_code(code_path)
    src = _load_source(source_path)
    k = FMatrix.from_json(src.field, _load(k_file))
    new_hs = analysis.nullspace_shift(code, _parse_ints(perm), k)
    new_code = PartitionCode(new_hs)
    report = verify_compression(new_code, src)
    _dump(new_code.to_json(), out)
    click.echo(json.dumps(report.to_json(), sort_keys=True), err=True)
    sys.exit(0 if report.ok else 1)


@main.command("compressible")
@click.option("--source", "source_path", type=str, required=True)
@click.option("--cap", type=int, default=4_000_000)
def cmd_compressible(source_path, cap) -> None:
    """Does the source admit any compression into fewer than s*n symbols?"""
    report = analysis.compressible(_load_source(source_path), cap=cap)
    _dump(report.to_json(), None)
    sys.exit(0 if report.compressible else 1)


@main.command("brute-min")
@click.option("--source", "source_path", type=str, required=True)
@click.option("--max-space", type=int, default=16)
@click.option("--max-s", type=int, default=3)
def cmd_brute_min(source_path, max_space, max_s) -> None:
    """Exhaustive least total code length (tiny sources only)."""
    m = analysis.brute_min_m(_load_source(source_path), max_space=max_space, max_s=max_s)
    _dump({"min_M": m}, None)


if __name__ == "__main__":
    main()
