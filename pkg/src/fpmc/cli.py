"""Command-line interface, configuration files and reports.

Every command builds its whole output first and writes it in one call.
Exit codes: 0 success, 1 determinate negative result, 2 input error,
3 unsupported precondition.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from . import ample, blowup, cone, config as cfg, fixtures, lattice, linalg, roots
from .config import CurveConfiguration
from .errors import FPMCError, InputInvalid

INT64_MAX = 2 ** 63 - 1


# ---------------------------------------------------------------------------
# configuration files


def _fail(path: str, reason: str) -> InputInvalid:
    return InputInvalid(f"{path}: {reason}")


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def config_from_data(data: Any) -> CurveConfiguration:
    if not isinstance(data, dict):
        raise _fail("$", "expected a JSON object")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise _fail("$.name", "must be a string")
    curves = data.get("curves")
    if not isinstance(curves, list):
        raise _fail("$.curves", "missing or not a list")
    if not curves:
        raise _fail("$.curves", "configuration has no curves")
    names, genera = [], []
    for k, c in enumerate(curves):
        if not isinstance(c, dict):
            raise _fail(f"$.curves[{k}]", "expected an object with name and genus")
        if not isinstance(c.get("name"), str) or not c["name"]:
            raise _fail(f"$.curves[{k}].name", "missing or not a non-empty string")
        g = c.get("genus", 0)
        if not _is_int(g) or g < 0:
            raise _fail(f"$.curves[{k}].genus", "must be a non-negative integer")
        names.append(c["name"])
        genera.append(g)
    gram = data.get("gram")
    if not isinstance(gram, list):
        raise _fail("$.gram", "missing or not a list")
    n = len(names)
    if len(gram) != n:
        raise _fail("$.gram", f"has {len(gram)} rows for {n} curves")
    for i, row in enumerate(gram):
        if not isinstance(row, list) or len(row) != n:
            raise _fail(f"$.gram[{i}]", f"must be a list of {n} integers")
        for j, x in enumerate(row):
            if not _is_int(x):
                raise _fail(f"$.gram[{i}][{j}]", "not an integer")
    for i in range(n):
        for j in range(i + 1, n):
            if gram[i][j] != gram[j][i]:
                raise _fail("$.gram", f"not symmetric: [{i}][{j}] = {gram[i][j]} but [{j}][{i}] = {gram[j][i]}")
    amb = data.get("ambient_rank")
    if amb is not None and (not _is_int(amb) or amb < 1):
        raise _fail("$.ambient_rank", "must be a positive integer")
    try:
        return CurveConfiguration(tuple(names), gram, tuple(genera), ambient_rank=amb, label=name)
    except InputInvalid as exc:
        raise _fail("$", str(exc)) from None


def parse_config(text: str) -> CurveConfiguration:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _fail("$", f"invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})") from None
    return config_from_data(data)


def config_to_data(config: CurveConfiguration) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "name": config.label,
        "curves": [{"name": n, "genus": g} for n, g in zip(config.names, config.genera)],
        "gram": [list(row) for row in config.gram],
    }
    if config.ambient_rank is not None:
        out["ambient_rank"] = config.ambient_rank
    return out


def serialize_config(config: CurveConfiguration) -> str:
    """JSON with one curve and one Gram row per line."""
    data = config_to_data(config)
    lines = ["{", f'  "name": {json.dumps(data["name"])},', '  "curves": [']
    lines += [f"    {json.dumps(c)}," for c in data["curves"]]
    lines[-1] = lines[-1].rstrip(",")
    lines += ["  ],", '  "gram": [']
    lines += [f"    {json.dumps(r)}," for r in data["gram"]]
    lines[-1] = lines[-1].rstrip(",")
    lines.append("  ]," if "ambient_rank" in data else "  ]")
    if "ambient_rank" in data:
        lines.append(f'  "ambient_rank": {data["ambient_rank"]}')
    lines.append("}")
    return "\n".join(lines) + "\n"


_TERM = re.compile(r"\s*([+-]?)\s*(\d+(?:/\d+)?)?\s*\*?\s*([A-Za-z_][\w']*)\s*")


def parse_divisor(text: Any, config: CurveConfiguration) -> List[Fraction]:
    """A divisor as a coefficient list (JSON) or a sum such as ``2C + f - E1``."""
    if isinstance(text, list):
        data = text
    else:
        s = str(text).strip()
        if s.startswith("["):
            try:
                data = json.loads(s)
            except json.JSONDecodeError:
                raise InputInvalid(f"cannot parse divisor {s!r}") from None
        else:
            D = [Fraction(0)] * len(config)
            pos = 0
            while pos < len(s):
                m = _TERM.match(s, pos)
                if not m or m.end() == pos or (pos > 0 and not m.group(1)):
                    raise InputInvalid(f"cannot parse divisor {s!r} at offset {pos}")
                c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
                D[config.index(m.group(3))] += -c if m.group(1) == "-" else c
                pos = m.end()
            return D
    if len(data) != len(config) or not all(isinstance(x, (int, str)) and not isinstance(x, bool) for x in data):
        raise InputInvalid(f"divisor needs {len(config)} integer or 'p/q' coefficients")
    try:
        return [Fraction(x) for x in data]
    except (ValueError, ZeroDivisionError):
        raise InputInvalid(f"bad divisor coefficients {data!r}") from None


# ---------------------------------------------------------------------------
# reports


def exact(x: Any) -> Any:
    """JSON-safe view: big integers as decimal strings, rationals as 'p/q'."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x if abs(x) <= INT64_MAX else str(x)
    if isinstance(x, Fraction):
        return exact(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): exact(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [exact(v) for v in x]
    return str(x)


@dataclass
class Report:
    command: str
    digest: str
    status: str
    payload: Dict[str, Any]
    text: List[str]
    code: int = 0

    def render(self, as_json: bool) -> str:
        if as_json:
            body = {
                "command": self.command,
                "input_digest": self.digest,
                "status": self.status,
                "payload": exact(self.payload),
            }
            return json.dumps(body, indent=2) + "\n"
        return "\n".join(self.text) + "\n"


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _read(path: str) -> bytes:
    try:
        if path == "-":
            return sys.stdin.buffer.read()
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputInvalid(f"{path}: {exc.strerror}") from None


def _load_config(path: str):
    raw = _read(path)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise InputInvalid(f"{path}: not UTF-8 text") from None
    return parse_config(text), _digest(raw)


def _fmt(v: Sequence) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


# ---------------------------------------------------------------------------
# commands


def cmd_analyze(args) -> Report:
    config, dg = _load_config(args.file)
    rep = cfg.validate(config)
    t = rep.invariants
    sig = config.span_signature()
    payload: Dict[str, Any] = {
        "name": config.label,
        "invariants": {"rho": t.rho, "delta_E": t.delta_E, "p_E": t.p_E},
        "span_signature": list(sig.as_tuple()),
        "components": rep.components,
        "warnings": rep.warnings,
    }
    text = [
        f"configuration {config.label or args.file}: {len(config)} curves",
        f"(rho, delta_E, p_E) = ({t.rho}, {t.delta_E}, {t.p_E})",
        f"span signature {sig}",
        f"components: {rep.components}",
    ]
    try:
        K = cfg.canonical_class(config)
        payload["canonical_class"] = {"coeffs": K.coeffs, "products": K.products, "square": K.square}
        text.append(f"K = {_fmt(K.coeffs)}, K.K = {K.square}")
    except FPMCError as exc:
        payload["canonical_class"] = None
        text.append(f"K: {exc}")
    subs = cfg.find_exceptional_subsets(config, first_only=True)
    if subs:
        payload["spanning_subset"] = {"names": subs[0].names, "max_ratio_sq": subs[0].max_ratio_sq}
        text.append(f"connected spanning subset {list(subs[0].names)}")
    text += [f"warning: {w}" for w in rep.warnings]
    return Report("analyze", dg, "ok", payload, text)


def cmd_certify(args) -> Report:
    config, dg = _load_config(args.file)
    c = cone.certify_fpmc(config)
    rs = c.rays
    payload = {
        "basis": c.basis,
        "rays": [{"coords": r, "square": s} for r, s in zip(rs.rays, rs.squares)],
        "isotropic_rays": c.isotropic_rays,
        "witness": c.witness,
        "witness_pair": c.witness_pair,
    }
    text = [f"{c.status}: {len(rs)} extreme nef rays over basis {list(c.basis)}"]
    text += [f"  ray {_fmt(r)}  square {s}" for r, s in zip(rs.rays, rs.squares)]
    if c.witness is not None:
        if c.witness_pair is not None:
            text.append(f"witness pair {_fmt(c.witness_pair[0])}, {_fmt(c.witness_pair[1])} with negative product")
        else:
            text.append(f"witness {_fmt(c.witness)} with negative square")
    return Report("certify", dg, c.status, payload, text, 0 if c.certified else 1)


def cmd_ample(args) -> Report:
    config, dg = _load_config(args.file)
    cert = ample.make_ample(config, minimal=args.minimal)
    h = ample.expand(config, cert)
    payload: Dict[str, Any] = {
        "curves": cert.curve_names,
        "a": cert.a,
        "products": cert.products,
        "square": cert.square,
        "route": cert.route,
        "h_over_all_curves": h,
    }
    text = [f"ample h = {_fmt(cert.a)} over {list(cert.curve_names)}: h.E = {_fmt(cert.products)}, h.h = {cert.square}"]
    if args.reider:
        r = ample.reider_class(config, cert).reider
        payload["reider"] = {"coeffs": r.coeffs, "square": r.square, "products": r.products}
        text.append(f"K + 4h = {_fmt(r.coeffs)}: square {r.square}, products {_fmt(r.products)}")
    return Report("ample", dg, "ok", payload, text)


def _component_data(c: roots.RootComponentReport) -> Dict[str, Any]:
    return {"curves": c.vertex_set, "kind": c.kind, "type": c.type, "rank": c.rank, "marks": c.marks}


def cmd_roots(args) -> Report:
    config, dg = _load_config(args.file)
    comps = roots.classify_minus2_components(config)
    text = [f"{len(comps)} component(s) of (-2)-curves"]
    for c in comps:
        line = f"  {c.type or 'unrecognized'} ({c.kind}) on {list(c.vertex_set)}"
        if c.marks:
            line += f", marks {_fmt(c.marks)}"
        text.append(line)
    return Report("roots", dg, "ok", {"components": [_component_data(c) for c in comps]}, text)


def cmd_case2b(args) -> Report:
    config, dg = _load_config(args.file)
    res = roots.case2b_criterion(config)
    payload: Dict[str, Any] = {
        "holds": res.holds,
        "K_square": res.K_square,
        "rank_sum": res.rank_sum,
        "components": [_component_data(c) for c in res.components],
        "minus_K_products": res.minus_K_products,
        "reasons": res.reasons,
    }
    text = [f"case 2b criterion {'holds' if res.holds else 'fails'}: K.K = {res.K_square}, affine rank sum {res.rank_sum}"]
    text += [f"  {r}" for r in res.reasons]
    if res.holds:
        fibers = []
        for c in res.components:
            D, m = roots.fiber_divisor_and_index(config, c)
            fibers.append({"type": c.type, "divisor": D, "index": m})
            text.append(f"  {c.type}: fiber divisor = {m} * (-K)")
        payload["fibers"] = fibers
    status = "holds" if res.holds else "fails"
    return Report("case2b", dg, status, payload, text, 0 if res.holds else 1)


def cmd_enumerate(args) -> Report:
    dg = _digest(json.dumps([args.rho, args.delta, args.max_offdiag, args.bounds, args.pmax]).encode())
    if args.bounds:
        s = ample.effective_bounds(args.rho, args.delta, args.pmax, args.max_offdiag)
        payload = {
            "rho": s.rho, "delta_E": s.delta_E, "count": s.count,
            "N_effective": s.N_effective, "witness": s.witness,
            "p_E": s.p_E, "N_prime_effective": s.N_prime_effective,
            "prime_witness": s.prime_witness,
        }
        text = [f"{s.count} canonical Gram matrices for rho={s.rho}, delta={s.delta_E}",
                f"N_effective = {s.N_effective} (attained by {s.witness})"]
        if s.p_E is not None:
            text.append(f"N'_effective(p_E={s.p_E}) = {s.N_prime_effective} (attained by {s.prime_witness})")
        return Report("enumerate-gram", dg, "ok", payload, text)
    mats = list(ample.enumerate_gram(args.rho, args.delta, args.max_offdiag))
    payload = {"rho": args.rho, "delta_E": args.delta, "count": len(mats)}
    text = [f"{len(mats)} canonical Gram matrices for rho={args.rho}, delta={args.delta}"]
    if args.list:
        payload["matrices"] = mats
        text += [f"  {M}" for M in mats]
    return Report("enumerate-gram", dg, "ok", payload, text)


def cmd_classes(args) -> Report:
    config, dg = _load_config(args.file)
    K = cfg.canonical_class(config)
    B = config.basis
    L = lattice.Lattice(config.span_gram(), tuple(config.names[b] for b in B))
    Kc = [K.coeffs[b] for b in B]
    found = lattice.enumerate_bounded_classes(L, Kc, args.delta, args.pmax)
    payload = {"basis": L.basis_names, "K": Kc, "classes": found}
    text = [f"{len(found)} classes with -{args.delta} <= e.e < 0 and genus <= {args.pmax} over basis {list(L.basis_names)}"]
    text += [f"  {_fmt(e)}" for e in found]
    return Report("classes", dg, "ok", payload, text)


def cmd_mw(args) -> Report:
    if args.verify_table:
        dg = _digest(json.dumps([[r.fibers, list(r.expected)] for r in fixtures.MW_TABLE]).encode())
        checks = roots.verify_mw_table()
        rows = []
        text = []
        for c in checks:
            rows.append({"fibers": c.fibers, "expected": c.expected, "computed": c.computed,
                         "determinant": c.determinant, "order_ok": c.order_ok, "matches": c.matches,
                         "error": c.error})
            got = str(roots.MWGroup(c.computed, c.determinant)) if c.computed is not None else c.error
            exp = str(roots.MWGroup(c.expected, c.determinant))
            text.append(f"{'ok  ' if c.matches else 'FAIL'} {c.fibers:<14} table {exp:<12} computed {got}")
        ok = all(c.matches for c in checks)
        text.append(f"{sum(c.matches for c in checks)}/{len(checks)} rows reproduced")
        return Report("mw", dg, "match" if ok else "mismatch", {"rows": rows}, text, 0 if ok else 1)
    if not args.fibers:
        raise InputInvalid("mw needs --fibers or --verify-table")
    dg = _digest(args.fibers.encode())
    fib = roots.parse_fibers(args.fibers)
    g = roots.mw_group(fib)
    payload = {"fibers": roots.format_fibers(fib), "invariant_factors": g.invariant_factors,
               "order": g.order, "determinant": g.determinant, "isotropic_subgroups": g.n_subgroups}
    text = [f"{roots.format_fibers(fib)}: torsion {g} (order {g.order}, determinant {g.determinant})"]
    return Report("mw", dg, "ok", payload, text)


def _load_json(path: str):
    raw = _read(path)
    try:
        return json.loads(raw), _digest(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InputInvalid(f"{path}: invalid JSON ({exc})") from None


def cmd_blowup(args) -> Report:
    script, dg = _load_json(args.script)
    if not isinstance(script, dict):
        raise InputInvalid("$: script must be a JSON object")
    res = blowup.run_script(script)
    st = res.state
    payload = {
        "configuration": config_to_data(res.config),
        "ambient_rank": st.rank,
        "K": st.K,
        "K_square": st.K_square(),
        "K_products": res.K_products,
        "signature": list(st.signature().as_tuple()),
    }
    text = [f"{len(script['steps'])} blow-ups: rank {st.rank}, K.K = {st.K_square()}, signature {st.signature()}"]
    for n, kp in zip(res.config.names, res.K_products):
        c = st.curve(n)
        text.append(f"  {n}: E.E = {st.dot(c.coords, c.coords)}, genus {c.genus}, K.E = {kp}")
    if args.export:
        return Report("blowup", dg, "ok", payload, [serialize_config(res.config).rstrip()])
    return Report("blowup", dg, "ok", payload, text)


def _fixture_params(items: Sequence[str]) -> Dict[str, int]:
    out = {}
    for it in items or []:
        k, sep, v = it.partition("=")
        if not sep:
            raise InputInvalid(f"fixture parameter {it!r} is not key=value")
        try:
            out[k] = int(v)
        except ValueError:
            raise InputInvalid(f"fixture parameter {it!r} needs an integer value") from None
    return out


def cmd_fixtures(args) -> Report:
    dg = _digest((args.id or "list").encode())
    if args.id in (None, "list"):
        ids = fixtures.fixture_ids()
        notes = {i: fixtures.fixture(i).provenance for i in ids}
        return Report("fixtures", dg, "ok", {"fixtures": notes}, [f"{i:<14} {notes[i]}" for i in ids])
    entry = fixtures.fixture(args.id, **_fixture_params(args.param))
    p = entry.payload
    if isinstance(p, CurveConfiguration):
        data: Any = config_to_data(p)
        text = [serialize_config(p).rstrip()] if args.export else [
            f"{entry.id}: {entry.provenance}", f"  {len(p)} curves, (rho, delta_E, p_E) = "
            f"{cfg.validate(p).invariants.as_tuple()}"]
    elif isinstance(p, dict):
        data = p
        text = [json.dumps(p, indent=2)] if args.export else [f"{entry.id}: {entry.provenance}",
                                                              f"  {len(p['steps'])} steps"]
    else:
        data = [{"fibers": r.fibers, "group": r.printed, "invariant_factors": r.expected} for r in p]
        text = [f"{r.fibers:<14} {r.printed}" for r in p]
    return Report("fixtures", dg, "ok", {"id": entry.id, "provenance": entry.provenance, "data": data}, text)


def cmd_almost(args) -> Report:
    config, dg = _load_config(args.file)
    r = parse_divisor(args.r, config)
    gens = None
    if args.gens:
        data, _ = _load_json(args.gens)
        if not isinstance(data, list):
            raise InputInvalid(f"{args.gens}: expected a list of divisors")
        gens = [parse_divisor(g, config) for g in data]
    rep = cone.check_almost_fpmc(config, r, gens, args.R)
    payload = {
        "passed": rep.passed, "delta_E": rep.delta_E, "p_E": rep.p_E,
        "bounded": rep.bounded_ok, "max_abs_product": rep.max_abs_product, "R": rep.R_bound,
        "generators_ok": rep.generators_ok, "extremal": rep.extremal, "failures": rep.failures,
    }
    text = [f"almost finite polyhedral check {'passed' if rep.passed else 'failed'}: "
            f"delta_E = {rep.delta_E}, p_E = {rep.p_E}, max |E.r| = {rep.max_abs_product}"]
    text += [f"  {f}" for f in rep.failures]
    return Report("almost", dg, "passed" if rep.passed else "failed", payload, text, 0 if rep.passed else 1)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fpmc", description="Exact tools for Mori cones of surfaces given by curve configurations.")
    p.add_argument("--json", action="store_true", help="machine-readable exact report")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="configuration JSON ('-' for stdin)")
        sp.set_defaults(fn=fn)
        return sp

    with_file("analyze", cmd_analyze, "invariants, components and canonical class")
    with_file("certify", cmd_certify, "decide whether the listed curves generate the Mori cone")
    sp = with_file("ample", cmd_ample, "integral ample class")
    sp.add_argument("--minimal", action="store_true", help="least square instead of Perron rounding")
    sp.add_argument("--reider", action="store_true", help="also report K + 4h")
    with_file("roots", cmd_roots, "classify components of (-2)-curves")
    with_file("case2b", cmd_case2b, "K.K = 0 with affine root components of total rank 8")

    sp = sub.add_parser("enumerate-gram", help="admissible hyperbolic Gram matrices up to permutation")
    sp.add_argument("--rho", type=int, required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--max-offdiag", type=int, default=None)
    sp.add_argument("--list", action="store_true", help="print every matrix")
    sp.add_argument("--bounds", action="store_true", help="compute the effective bounds")
    sp.add_argument("--pmax", type=int, default=None, help="genus bound for the K + 4h bound")
    sp.set_defaults(fn=cmd_enumerate)

    sp = with_file("classes", cmd_classes, "classes of bounded square and genus")
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--pmax", type=int, required=True)

    sp = sub.add_parser("mw", help="torsion Mordell-Weil groups")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--fibers", help="e.g. 'A5~+A2~+A1~'")
    g.add_argument("--verify-table", action="store_true")
    sp.set_defaults(fn=cmd_mw)

    sp = sub.add_parser("blowup", help="run a blow-up script")
    sp.add_argument("script")
    sp.add_argument("--export", action="store_true", help="print the resulting configuration JSON")
    sp.set_defaults(fn=cmd_blowup)

    sp = sub.add_parser("fixtures", help="built-in data")
    sp.add_argument("id", nargs="?", default=None)
    sp.add_argument("--export", action="store_true")
    sp.add_argument("--param", action="append", metavar="KEY=VALUE")
    sp.set_defaults(fn=cmd_fixtures)

    sp = with_file("almost", cmd_almost, "almost finite polyhedral check")
    sp.add_argument("--r", required=True, help="divisor, e.g. 'f' or '[0,1]'")
    sp.add_argument("--gens", default=None, help="JSON list of generator divisors")
    sp.add_argument("--R", type=int, default=None, help="bound on |E.r|")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and 2
    try:
        report = args.fn(args)
    except FPMCError as exc:
        msg = f"error: {exc}"
        if args.json:
            body = {"command": args.command, "status": "error", "error": type(exc).__name__, "message": str(exc)}
            sys.stdout.write(json.dumps(body, indent=2) + "\n")
        else:
            sys.stderr.write(msg + "\n")
        return exc.exit_code
    sys.stdout.write(report.render(args.json))
    return report.code


if __name__ == "__main__":
    sys.exit(main())
