"""``properlab`` command line.

Exit codes: 0 whenever the computation finished (the verdict, positive or
negative, is in the payload), 1 for bad input, 2 when a resource cap was hit
or an internal cross-check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from . import __version__
from .cartan import MatrixGroupSpec, cartan_dims, cartan_projection_gl, real_rank
from .catalog import audit_markdown, space_form_report, tangential_table_audit
from .cones import RationalSubspace
from .errors import ProperlabError, ProperlabInputError, ResourceCapError
from .linalg import fraction_str
from .properness import (
    DEFAULT_CAP,
    Partition,
    ReductivePair,
    calabi_markus,
    cocompact_standard_check,
    is_proper_reductive,
    is_similar_reductive,
    sl2_formula_audit,
    sl2_irreducible_formula,
    sl2_proper_oracle,
    sl2_proper_printed_formula,
    sl2_proper_shortcut,
    sl2_ray,
)
from .rootdata import RootDatum, build_root_datum
from .tempered import WeightSystem, p_V, temperedness_report, weights_adjoint, weights_standard
from .volume import MCConfig, Shape, overlap_series, q_estimate

FILE_VERSION = "1"


class UsageError(ProperlabInputError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ----------------------------------------------------------------------------
# reports


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def make_report(command: str, inputs: dict, verdict: dict, method: str, warnings: list[str] | None = None) -> dict:
    return {
        "command": command,
        "inputs": _jsonable(inputs),
        "verdict": _jsonable(verdict),
        "method": method,
        "warnings": list(warnings or []),
    }


def _text_lines(obj: Any, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        out = []
        for k, v in obj.items():
            out.extend(_text_lines(v, f"{prefix}{k}." if isinstance(v, (dict, list)) and v else f"{prefix}{k}"))
        return out
    if isinstance(obj, list) and obj and any(isinstance(v, (dict, list)) for v in obj):
        out = []
        for i, v in enumerate(obj):
            out.extend(_text_lines(v, f"{prefix.rstrip('.')}[{i}]."))
        return out
    return [f"{prefix.rstrip('.')}: {json.dumps(obj)}"]


def emit(report: dict, fmt: str = "text") -> bytes:
    """Serialize a report; JSON is key-sorted with rationals as "p/q" strings."""
    if fmt == "json":
        return (json.dumps(report, sort_keys=True, allow_nan=False) + "\n").encode()
    if fmt == "csv":
        rows = report["verdict"].get("rows")
        buf = io.StringIO()
        if rows:
            cols = list(rows[0])
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(cols)
            for r in rows:
                w.writerow(["" if r.get(c) is None else (json.dumps(r[c]) if isinstance(r[c], (list, dict)) else r[c]) for c in cols])
        else:
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["key", "value"])
            for line in _text_lines(report["verdict"]):
                k, _, v = line.partition(": ")
                w.writerow([k, v])
        return buf.getvalue().encode()
    if "text" in report:
        return (report["text"].rstrip("\n") + "\n").encode()
    body = [f"{report['command']} ({report['method']})"] + ["  " + s for s in _text_lines(report["verdict"])]
    body += [f"  warning: {w}" for w in report["warnings"]]
    return ("\n".join(body) + "\n").encode()


# ----------------------------------------------------------------------------
# input parsing; every error names the field it came from


def _at(path: str, fn: Callable, *args):
    try:
        return fn(*args)
    except (ProperlabInputError, ValueError, TypeError, KeyError, json.JSONDecodeError) as e:
        raise ProperlabInputError(f"{path}: {e}") from None


def _loads(path: str, text: str):
    return _at(path, json.loads, text)


def _load_file(path: str, allowed: set[str]) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as e:
        raise ProperlabInputError(f"--file: {e}") from None
    except json.JSONDecodeError as e:
        raise ProperlabInputError(f"--file: invalid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ProperlabInputError("--file: top level must be an object")
    version = data.pop("version", FILE_VERSION)
    if str(version) != FILE_VERSION:
        raise ProperlabInputError(f"version: unsupported problem-file version {version!r}")
    unknown = set(data) - allowed
    if unknown:
        raise ProperlabInputError(f"{sorted(unknown)[0]}: unknown field")
    return data


_GROUP_RE = re.compile(r"^\s*(SL|GL|SO|O|SU|U|Sp)\s*\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?(?:,\s*R\s*)?\)\s*$")


def parse_group(text_or_obj, path: str) -> MatrixGroupSpec:
    """``{"family": "SO", "p": 2, "q": 1}`` or shorthand ``SO(2,1)``, ``SL(3)``, ``Sp(4)`` (= Sp(4,R))."""
    obj = text_or_obj
    if isinstance(obj, str):
        m = _GROUP_RE.match(obj)
        if m:
            fam, a, b = m.group(1), int(m.group(2)), m.group(3)
            if fam in ("SL", "GL"):
                return _at(path, MatrixGroupSpec, fam, a)
            if fam == "Sp":
                if a % 2:
                    raise ProperlabInputError(f"{path}: Sp(2n) needs an even size")
                return _at(path, MatrixGroupSpec, fam, a // 2)
            if b is None:
                raise ProperlabInputError(f"{path}: {fam} needs two indices")
            return _at(path, lambda: MatrixGroupSpec(fam, p=a, q=int(b)))
        obj = _loads(path, obj)
    if not isinstance(obj, dict):
        raise ProperlabInputError(f"{path}: expected a group object")
    return _at(path, MatrixGroupSpec.from_json, obj)


def parse_datum(obj, path: str) -> RootDatum:
    if isinstance(obj, str):
        obj = _loads(path, obj)
    if not isinstance(obj, dict):
        raise ProperlabInputError(f"{path}: expected a root datum object")
    unknown = set(obj) - {"family", "rank", "roots"}
    if unknown:
        raise ProperlabInputError(f"{path}.{sorted(unknown)[0]}: unknown field")
    for key in ("family", "rank"):
        if key not in obj:
            raise ProperlabInputError(f"{path}.{key}: missing")
    return _at(path, RootDatum.from_json, obj)


def parse_subspace(obj, path: str, ambient: int) -> RationalSubspace:
    if isinstance(obj, str):
        obj = _loads(path, obj)
    if isinstance(obj, list):
        obj = {"basis": obj}
    if not isinstance(obj, dict) or "basis" not in obj:
        raise ProperlabInputError(f"{path}.basis: missing")
    for i, v in enumerate(obj["basis"]):
        if not isinstance(v, list) or len(v) != ambient:
            raise ProperlabInputError(f"{path}.basis[{i}]: expected a vector of length {ambient}")
    if not obj["basis"]:
        return RationalSubspace.zero(ambient)
    return _at(path, RationalSubspace.from_json, obj, ambient)


def parse_vector(text: str, path: str) -> list[float]:
    text = text.strip()
    if text.startswith("["):
        vals = _loads(path, text)
    else:
        vals = [v for v in text.split(",") if v.strip()]
    try:
        return [float(v) for v in vals]
    except (TypeError, ValueError):
        raise ProperlabInputError(f"{path}: expected numbers") from None


def parse_grid(text: str, path: str) -> list[float]:
    """``start:stop:count`` (inclusive) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ProperlabInputError(f"{path}: expected start:stop:count")
        try:
            a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ProperlabInputError(f"{path}: expected start:stop:count") from None
        if n < 1:
            raise ProperlabInputError(f"{path}: count must be >= 1")
        return [float(x) for x in np.linspace(a, b, n)]
    return parse_vector(text, path)


# ----------------------------------------------------------------------------
# subcommands


def _cmd_mu(args) -> dict:
    src = _load_file(args.file, {"matrix"}) if args.file else {}
    raw = src.get("matrix", args.matrix)
    if raw is None:
        raise ProperlabInputError("matrix: missing (use --matrix or --file)")
    mat = _loads("matrix", raw) if isinstance(raw, str) else raw
    mu = _at("matrix", cartan_projection_gl, mat)
    return make_report("mu", {"matrix": mat}, {"mu": [float(x) for x in mu]}, "one-sided Jacobi SVD (float64)")


def _pair_from_args(args) -> tuple[ReductivePair, dict]:
    if args.file:
        data = _load_file(args.file, {"ambient", "a_L", "a_H"})
        for key in ("ambient", "a_L", "a_H"):
            if key not in data:
                raise ProperlabInputError(f"{key}: missing")
        datum = parse_datum(data["ambient"], "ambient")
        aL, aH = data["a_L"], data["a_H"]
    else:
        if args.family is None or args.rank is None:
            raise ProperlabInputError("ambient: give --family and --rank (or --file)")
        datum = _at("ambient", build_root_datum, args.family, args.rank)
        aL, aH = args.a_L or "[]", args.a_H or "[]"
    pair = _at(
        "a_L/a_H",
        ReductivePair,
        datum,
        parse_subspace(aL, "a_L", datum.ambient_dim),
        parse_subspace(aH, "a_H", datum.ambient_dim),
    )
    inputs = {"ambient": datum.to_json(), "a_L": pair.a_L.to_json(), "a_H": pair.a_H.to_json()}
    return pair, inputs


def _cmd_proper(args) -> dict:
    pair, inputs = _pair_from_args(args)
    verdict = is_proper_reductive(pair, cap=args.cap)
    return make_report("proper", inputs, verdict.to_json(), "exhaustive Weyl scan (exact)")


def _cmd_similar(args) -> dict:
    pair, inputs = _pair_from_args(args)
    return make_report("similar", inputs, {"similar": is_similar_reductive(pair, cap=args.cap)}, "exhaustive Weyl scan (exact)")


def _cmd_calabi_markus(args) -> dict:
    G, H = parse_group(args.G, "G"), parse_group(args.H, "H")
    rG, rH = real_rank(G), real_rank(H)
    infinite = calabi_markus(ranks=(rG, rH))
    return make_report(
        "calabi-markus",
        {"G": G.to_json(), "H": H.to_json()},
        {"rank_G": rG, "rank_H": rH, "infinite_discontinuous_group": infinite},
        "closed-form real ranks",
    )


def _cmd_cocompact(args) -> dict:
    specs = {k: parse_group(getattr(args, k), k) for k in ("G", "H", "L")}
    d = {k: cartan_dims(s)[1] for k, s in specs.items()}
    ok = cocompact_standard_check(d["G"], d["H"], d["L"])
    return make_report(
        "cocompact",
        {k: s.to_json() for k, s in specs.items()},
        {"d_G": d["G"], "d_H": d["H"], "d_L": d["L"], "cocompact": ok},
        "d = dim p from exact basis construction",
    )


def _parse_partition(text: str) -> Partition:
    try:
        parts = [int(x) for x in re.split(r"[,+\s]+", text.strip()) if x]
    except ValueError:
        raise ProperlabInputError("partition: expected positive integers like 5 or 3,1,1") from None
    return _at("partition", Partition.from_parts, parts)


def _cmd_sl2(args) -> dict:
    part = _parse_partition(args.partition)
    if args.n is not None and args.n != part.n:
        raise ProperlabInputError(f"n: partition sums to {part.n}, not {args.n}")
    n, m = part.n, args.m
    if not 1 <= m < n:
        raise ProperlabInputError(f"m: need 1 <= m < n = {n}")
    oracle = sl2_proper_oracle(part, m)
    verdict = {
        "partition": str(part),
        "n": n,
        "m": m,
        "ray": list(sl2_ray(part)),
        "proper": oracle,
        "shortcut": sl2_proper_shortcut(part, m),
        "printed_formula": sl2_proper_printed_formula(part, m),
        "irreducible_formula": sl2_irreducible_formula(n, m) if part.is_irreducible else None,
    }
    warnings = []
    if verdict["printed_formula"] != oracle:
        warnings.append("printed inequality disagrees with the exhaustive oracle for this case")
    return make_report("sl2", {"partition": str(part), "m": m}, verdict, "exhaustive S_n scan (oracle)", warnings)


def _cmd_sl2_audit(args) -> dict:
    if args.n_max < 2:
        raise ProperlabInputError("n-max: must be >= 2")
    report = sl2_formula_audit(args.n_max, threads=args.threads)
    verdict = report.summary()
    verdict["rows"] = [r.to_json() for r in report.rows]
    return make_report("sl2-audit", {"n_max": args.n_max}, verdict, "exhaustive S_n scan vs closed forms")


def _weights_from_args(args) -> tuple[RootDatum, WeightSystem, dict]:
    if args.file:
        data = _load_file(args.file, {"datum", "weights"})
        if "datum" not in data:
            raise ProperlabInputError("datum: missing")
        datum = parse_datum(data["datum"], "datum")
        if "weights" not in data or not isinstance(data["weights"], list):
            raise ProperlabInputError("weights: expected a list")
        for i, w in enumerate(data["weights"]):
            if not isinstance(w, dict) or "covector" not in w:
                raise ProperlabInputError(f"weights[{i}].covector: missing")
            if len(w["covector"]) != datum.ambient_dim:
                raise ProperlabInputError(f"weights[{i}].covector: expected length {datum.ambient_dim}")
        ws = _at("weights", WeightSystem.from_json, data["weights"], datum.ambient_dim)
    else:
        if args.family is None or args.rank is None:
            raise ProperlabInputError("datum: give --family and --rank (or --file)")
        datum = _at("datum", build_root_datum, args.family, args.rank)
        ws = weights_standard(datum) if args.rep == "std" else weights_adjoint(datum)
    return datum, ws, {"datum": datum.to_json(), "weights": ws.to_json()}


def _cmd_pv(args) -> dict:
    datum, ws, inputs = _weights_from_args(args)
    res = p_V(ws, datum, allow_infinite=True, threads=args.threads)
    verdict = res.to_json()
    verdict["temperedness"] = temperedness_report(res)
    return make_report("pv", inputs, verdict, "exact extreme-ray enumeration")


def _cmd_tempered(args) -> dict:
    datum, ws, inputs = _weights_from_args(args)
    res = p_V(ws, datum, allow_infinite=True, chambers=False, threads=args.threads)
    verdict = {"p_V": res.to_json()["value"]} | temperedness_report(res)
    return make_report("tempered", inputs, verdict, "exact p_V; readings under both conventions")


def _shape_from_args(args, dim: int | None) -> Shape:
    if args.shape == "box":
        ext = parse_vector(args.extents, "extents") if args.extents else [1.0] * (dim or 0)
        if dim is not None and len(ext) == 1 and dim > 1:
            ext = ext * dim
        return _at("extents", Shape.box, ext)
    if dim is None:
        raise ProperlabInputError("dim: needed for ball shapes")
    r = parse_vector(args.extents, "extents")[0] if args.extents else 1.0
    return _at("extents", Shape.ball, dim, r, args.shape == "k_invariant_ball")


def _mc_config(args) -> MCConfig | None:
    if getattr(args, "exact", False):
        return None
    return _at("samples", MCConfig, args.samples, args.seed, args.shards)


def _cmd_vol(args) -> dict:
    if args.vol_cmd == "sim":
        u = parse_vector(args.u, "u")
        shape = _shape_from_args(args, len(u))
        if shape.dim != len(u):
            raise ProperlabInputError(f"u: expected {shape.dim} exponents")
        grid = parse_grid(args.t_grid or "0:3:13", "t-grid")
        cfg = _mc_config(args)
        if abs(math.fsum(u)) > 1e-12 * max(1.0, max(abs(x) for x in u)):
            raise ProperlabInputError("u: exponents must sum to zero")
        pts = overlap_series(shape, u, grid, cfg, threads=args.threads)
        rows = [{"t": p.t, "estimate": p.estimate, "stderr": p.stderr, "exact": p.exact} for p in pts]
        inputs = {"shape": shape.to_json(), "u": u, "t_grid": grid, "seed": args.seed}
        if cfg is not None:
            inputs |= {"samples": cfg.samples, "shards": cfg.shards}
        method = "exact box formula" if cfg is None else "Monte Carlo (Philox, per-shard streams)"
        return make_report("vol sim", inputs, {"rows": rows}, method)
    # fit-q
    group = parse_group(args.group, "group")
    if group.family != "SL":
        raise ProperlabInputError("group: fit-q supports SL(n) only")
    shape = _shape_from_args(args, group.n)
    directions = _loads("directions", args.directions) if args.directions else None
    if directions is None:
        n = group.n
        directions = [[1.0] + [0.0] * (n - 2) + [-1.0]] if n > 1 else []
    if not isinstance(directions, list) or not all(isinstance(d, list) for d in directions):
        raise ProperlabInputError("directions: expected a list of vectors")
    grid = parse_grid(args.t_grid, "t-grid") if args.t_grid else None
    cfg = _mc_config(args)
    est = q_estimate(group, shape, directions, cfg, t_grid=grid, threads=args.threads)
    inputs = {"group": group.to_json(), "shape": shape.to_json(), "directions": directions, "seed": args.seed}
    if cfg is not None:
        inputs |= {"samples": cfg.samples, "shards": cfg.shards}
    verdict = {"q_hat": est.q_hat, "rows": est.table}
    return make_report("vol fit-q", inputs, verdict, "least-squares decay fit of MC volumes", est.warnings)


def _cmd_catalog(args) -> dict:
    if args.catalog_cmd == "spaceform":
        return make_report("catalog spaceform", {"p": args.p, "q": args.q}, _at("p/q", space_form_report, args.p, args.q), "closed-form predicates")
    rows = _at("p-max", tangential_table_audit, args.p_max)
    report = make_report(
        "catalog tangential-table",
        {"p_max": args.p_max},
        {"rows": [r.to_json() for r in rows], "mismatches": [r.cell for r in rows if not r.match]},
        "p < rho(q) for q <= 128",
    )
    return report | {"text": audit_markdown(rows)}


def _cmd_selftest(args) -> dict:
    from .battery import run_all

    results = run_all(seed=args.seed, threads=args.threads, only=args.only)
    lines = [r.line() for r in results]
    all_ok = all(r.passed for r in results)
    report = make_report(
        "selftest",
        {"seed": args.seed, "only": args.only},
        {"all_passed": all_ok, "criteria": [r.to_json() for r in results]},
        "acceptance battery",
    )
    report["text"] = "\n".join(lines + [f"{sum(r.passed for r in results)}/{len(results)} passed"])
    report["_failed"] = not all_ok
    return report


COMMANDS = {
    "mu": _cmd_mu,
    "proper": _cmd_proper,
    "similar": _cmd_similar,
    "calabi-markus": _cmd_calabi_markus,
    "cocompact": _cmd_cocompact,
    "sl2": _cmd_sl2,
    "sl2-audit": _cmd_sl2_audit,
    "pv": _cmd_pv,
    "tempered": _cmd_tempered,
    "vol": _cmd_vol,
    "catalog": _cmd_catalog,
    "selftest": _cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="JSON output (key-sorted)")
    fmt.add_argument("--csv", action="store_true", help="CSV output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="Weyl group enumeration cap")
    common.add_argument("--file", help="JSON problem file")

    parser = _Parser(prog="properlab", description="Properness, temperedness and volume computations for reductive groups.")
    parser.add_argument("--version", action="version", version=f"properlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mu", parents=[common], help="Cartan projection of a matrix in GL(n,R)")
    p.add_argument("--matrix", help="row-major JSON array")

    for name, helptext in (("proper", "is the L-action on G/H proper?"), ("similar", "are L and H similar?")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--family", choices=list("ABCD") + ["BC"])
        p.add_argument("--rank", type=int)
        p.add_argument("--a-L", dest="a_L", help="JSON list of basis vectors")
        p.add_argument("--a-H", dest="a_H", help="JSON list of basis vectors")

    p = sub.add_parser("calabi-markus", parents=[common], help="rank test for infinite discontinuous groups")
    p.add_argument("--G", required=True)
    p.add_argument("--H", required=True)

    p = sub.add_parser("cocompact", parents=[common], help="d(L) + d(H) = d(G)")
    for k in ("G", "H", "L"):
        p.add_argument(f"--{k}", required=True)

    p = sub.add_parser("sl2", parents=[common], help="SL(2,R) -> SL(n,R) acting on SL(n)/SL(m)")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--partition", required=True, help="block sizes, e.g. 5 or 3,1,1")

    p = sub.add_parser("sl2-audit", parents=[common], help="oracle vs closed forms for all partitions")
    p.add_argument("--n-max", type=int, default=8)

    for name in ("pv", "tempered"):
        p = sub.add_parser(name, parents=[common], help="p_V and temperedness of L^2(V)")
        p.add_argument("--family", choices=list("ABCD") + ["BC"])
        p.add_argument("--rank", type=int)
        p.add_argument("--rep", choices=["std", "adjoint"], default="std")

    p = sub.add_parser("vol", help="volumes of S cap gS")
    vsub = p.add_subparsers(dest="vol_cmd", required=True, parser_class=_Parser)
    shape_opts = _Parser(add_help=False)
    shape_opts.add_argument("--shape", choices=["box", "ball", "k_invariant_ball"], default="box")
    shape_opts.add_argument("--extents", help="half widths (box) or radius (balls)")
    shape_opts.add_argument("--samples", type=int, default=1_000_000)
    shape_opts.add_argument("--shards", type=int, default=8)
    shape_opts.add_argument("--t-grid", dest="t_grid")
    q = vsub.add_parser("sim", parents=[common, shape_opts], help="volume series along exp(t diag(u))")
    q.add_argument("--u", required=True, help="diagonal exponents, summing to 0")
    q.add_argument("--exact", action="store_true", help="exact box formula instead of Monte Carlo")
    q = vsub.add_parser("fit-q", parents=[common, shape_opts], help="empirical optimal exponent q(G; V)")
    q.add_argument("--group", default="SL(2)")
    q.add_argument("--directions", help="JSON list of dominant directions in a")

    p = sub.add_parser("catalog", help="space forms X(p,q)")
    csub = p.add_subparsers(dest="catalog_cmd", required=True, parser_class=_Parser)
    q = csub.add_parser("spaceform", parents=[common])
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--q", type=int, required=True)
    q = csub.add_parser("tangential-table", parents=[common])
    q.add_argument("--p-max", type=int, default=11)

    p = sub.add_parser("selftest", parents=[common], help="run the acceptance battery")
    p.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], help="comma list of criterion numbers")
    p.add_argument("--strict", action="store_true", help="exit 1 when a criterion fails")
    return parser


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout.buffer
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.threads < 1:
            raise ProperlabInputError("threads: must be >= 1")
        report = COMMANDS[args.command](args)
    except ProperlabInputError as e:
        print(f"error: {e}", file=err)
        return 1
    except ResourceCapError as e:
        print(f"resource limit: {e}", file=err)
        return 2
    except ProperlabError as e:
        print(f"internal check failed: {e}", file=err)
        return 2
    failed = report.pop("_failed", False)
    text = report.pop("text", None)
    fmt = "json" if args.json else "csv" if args.csv else "text"
    if fmt == "text" and text is not None:
        report["text"] = text
    out.write(emit(report, fmt))
    out.flush()
    return 1 if failed and getattr(args, "strict", False) else 0


def main() -> None:
    sys.exit(run())
