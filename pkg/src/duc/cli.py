"""Command-line interface.

Every subcommand prints one machine-readable report (JSON by default, CSV
for tabular results) containing the full run configuration, so a run is
reproducible from its own output.  Identical configurations produce byte
identical reports; anything nondeterministic (timings, progress) stays off
stdout.  Warnings such as budget exhaustion or lower-bound results are
collected in a "caveats" array rather than prose.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import ca_sim, ergodicity, linear_ca
from .builtins import builtin_names, get_builtin
from .constructions import (
    dressed_swap,
    fourier_reduce,
    graph_state_gate,
    kicked_ising_gate,
    n2_family,
    p_state_gate,
    ring_linear,
)
from .gates import Gate, is_dual_unitary, is_perfect, is_unitary
from .perm_maps import PermMap, check_flags, enumerate_du, parse, render, to_gate

SCHEMA_VERSION = 1
DENSE_CAP = 6561
STATE_CAP = 2 ** 24
EXPECTED_CLASS_COUNTS = {2: 5, 3: 227}


class UsageError(Exception):
    pass


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.complexfloating):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj)}")


def _config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(args, result, caveats, rows=None):
    """Write the report: JSON always carries config + result + caveats;
    CSV needs a tabular result and embeds the schema in its first line."""
    if args.format == "csv":
        if rows is None:
            raise UsageError("this subcommand has no CSV form; use --format json")
        header, data = rows
        lines = [f"# duc csv schema={SCHEMA_VERSION} command={args.command}"]
        lines.append(",".join(header))
        for row in data:
            lines.append(",".join(str(v) for v in row))
        text = "\n".join(lines) + "\n"
    else:
        report = {
            "schema": SCHEMA_VERSION,
            "command": args.command,
            "config": _config(args),
            "result": result,
            "caveats": caveats,
        }
        text = json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_int_list(spec: str, even_only: bool = False) -> list[int]:
    """Accepts "8", "2..48" (inclusive) or "8,10,12"."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if even_only:
        out = [v for v in out if v % 2 == 0]
    if not out:
        raise UsageError(f"empty integer list {spec!r}")
    return out


def _grid_map(fn, keys, threads: int):
    """Apply fn over keys, merging results back in key order."""
    if threads <= 1:
        return [fn(k) for k in keys]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, keys))


def _get_map(args) -> PermMap:
    if getattr(args, "builtin", None):
        try:
            return get_builtin(args.builtin)
        except (KeyError, ValueError) as exc:
            raise UsageError(str(exc)) from None
    if getattr(args, "map", None):
        return parse(args.map)
    raise UsageError("need --builtin or --map")


def _get_gate(args) -> Gate:
    return to_gate(_get_map(args))


def _parse_operator(spec: str, n: int) -> np.ndarray:
    """Operator notations: "clock", "shift", "e:A,B" (1-based unit matrix),
    "diag:v1,v2,..." or "mat:a,b;c,d" with python complex literals."""
    if spec == "clock":
        return np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    if spec == "shift":
        return np.roll(np.eye(n, dtype=complex), 1, axis=0)
    if spec.startswith("e:"):
        a, b = (int(v) for v in spec[2:].split(","))
        if not (1 <= a <= n and 1 <= b <= n):
            raise UsageError(f"unit matrix indices out of range in {spec!r}")
        m = np.zeros((n, n), dtype=complex)
        m[a - 1, b - 1] = 1.0
        return m
    if spec.startswith("diag:"):
        vals = [complex(v) for v in spec[5:].split(",")]
        if len(vals) != n:
            raise UsageError(f"diag needs {n} entries")
        return np.diag(np.asarray(vals, dtype=complex))
    if spec.startswith("mat:"):
        try:
            rows = [[complex(v) for v in row.split(",")] for row in spec[4:].split(";")]
            m = np.asarray(rows, dtype=complex)
        except ValueError as exc:
            raise UsageError(f"bad matrix literal {spec!r}: {exc}") from None
        if m.shape != (n, n):
            raise UsageError(f"matrix must be {n}x{n}")
        return m
    raise UsageError(f"unknown operator spec {spec!r}")


# --------------------------------------------------------------------------
# subcommands


def cmd_verify(args):
    m = _get_map(args)
    flags = check_flags(m)
    result = {
        "name": args.builtin or render(m),
        "n": m.n,
        "bijective": flags.bijective,
        "dual_unitary": flags.dual_unitary,
        "perfect": flags.perfect,
    }
    _emit(args, result, [])


def _gate_flags(g: Gate) -> dict:
    return {
        "unitary": is_unitary(g),
        "dual_unitary": is_dual_unitary(g),
        "perfect": is_perfect(g),
    }


def cmd_construct(args):
    fam = args.family
    caveats: list[str] = []
    params: dict = {"n": args.n}
    if fam == "n2_family":
        gate = n2_family(args.j)
        params = {"j": args.j}
    elif fam == "dressed_swap":
        rng = np.random.Generator(np.random.Philox(key=[args.seed, 0]))
        angles = rng.uniform(0, 2 * np.pi, size=args.n * args.n)
        gate = dressed_swap(np.exp(1j * angles), args.n)
        params["seed"] = args.seed
    elif fam in ("graph_state", "fourier_reduce"):
        alphas = tuple(_parse_int_list(args.alphas)) if fam == "graph_state" else (0, 0)
        betas = tuple(_parse_int_list(args.betas))
        gammas = tuple(_parse_int_list(args.gammas))
        gate = graph_state_gate(args.n, alphas, betas, gammas)
        params.update({"alphas": list(alphas), "betas": list(betas),
                       "gammas": list(gammas)})
    elif fam == "kicked_ising":
        gate = kicked_ising_gate(args.n)
    elif fam == "p_state":
        gate = p_state_gate(args.n)
    elif fam == "ring_linear":
        coeffs = tuple(_parse_int_list(args.coeffs))
        if len(coeffs) != 4:
            raise UsageError("--coeffs needs four integers")
        m = ring_linear(args.n, coeffs)
        params["coeffs"] = list(coeffs)
        flags = check_flags(m)
        _emit(args, {"family": fam, "params": params, "map": render(m),
                     "bijective": flags.bijective,
                     "dual_unitary": flags.dual_unitary,
                     "perfect": flags.perfect}, caveats)
        return
    else:
        raise UsageError(f"unknown family {fam!r}")

    result = {"family": fam, "params": params, "flags": _gate_flags(gate)}
    if fam == "fourier_reduce":
        m = fourier_reduce(gate)
        result["map"] = render(m)
        flags = check_flags(m)
        result["map_flags"] = {"bijective": flags.bijective,
                               "dual_unitary": flags.dual_unitary,
                               "perfect": flags.perfect}
    _emit(args, result, caveats)


def cmd_enumerate(args):
    report = enumerate_du(args.n, max_n=args.max_n, with_reshuffle_diagnostic=True)
    caveats = []
    result = report.to_dict()
    if not args.classes:
        del result["classes"]
    result["non_interacting_count"] = sum(report.non_interacting)
    expected = EXPECTED_CLASS_COUNTS.get(args.n)
    if expected is not None:
        result["expected_count"] = expected
        if report.class_count != expected:
            caveats.append(
                f"class_count {report.class_count} differs from the expected "
                f"{expected}; reshuffle-inclusive count "
                f"{report.reshuffle_class_count} reported as a diagnostic")
    _emit(args, result, caveats)


def cmd_gliders(args):
    g = _get_gate(args)
    caveats: list[str] = []
    per_direction = {}
    for direction in ("right", "left"):
        t = ergodicity.transfer_matrix(g, args.alpha, direction, args.dense_cap)
        rep = ergodicity.spectrum_report(t)
        per_direction[direction] = rep.unimodular_count - 1
    result = {
        "alpha": args.alpha,
        "count": per_direction["right"] + per_direction["left"],
        "right": per_direction["right"],
        "left": per_direction["left"],
    }
    if args.extract:
        cands = ergodicity.extract_gliders(g, args.alpha, dim_cap=args.dense_cap)
        result["operators"] = [
            {
                "direction": c.direction,
                "eigenvalue": complex(c.eigenvalue),
                "phase": complex(c.phase),
                "support_range": c.support_range,
                "residual": c.residual,
                "verified": c.verified,
            }
            for c in cands
        ]
        if not all(c.verified for c in cands):
            caveats.append("some extracted operators failed re-verification")
    _emit(args, result, caveats)


def cmd_correlate(args):
    g = _get_gate(args)
    n = g.n
    o1 = _parse_operator(args.op1, n)
    o2 = _parse_operator(args.op2 or args.op1, n)
    if args.traceless:
        o1 = o1 - np.trace(o1) / n * np.eye(n)
        o2 = o2 - np.trace(o2) / n * np.eye(n)
    xs = _parse_int_list(args.x) if args.x else list(range(1, args.L + 1))
    ts = _parse_int_list(args.t, even_only=True)

    def one(key):
        t, x = key
        return ergodicity.correlator(g, args.L, t, o1, o2, x, args.y,
                                     state_cap=args.state_cap)
    keys = [(t, x) for t in ts for x in xs]
    vals = _grid_map(one, keys, args.threads)
    result = [
        {"t": t, "x": x, "y": args.y, "value": complex(v),
         "on_cone": ergodicity.on_light_cone(x, args.y, t, args.L)}
        for (t, x), v in zip(keys, vals)
    ]
    rows = (
        ["t", "x", "y", "re", "im", "on_cone"],
        [(t, x, args.y, v.real, v.imag, int(ergodicity.on_light_cone(x, args.y, t, args.L)))
         for (t, x), v in zip(keys, vals)],
    )
    _emit(args, result, [], rows)


def cmd_orbits(args):
    m = _get_map(args)
    volumes = _parse_int_list(args.L, even_only=True)

    def one(L):
        return ca_sim.average_orbit_length(
            m, L, samples=args.samples, repetitions=args.repetitions,
            seed=args.seed, budget=args.budget)
    stats = _grid_map(one, volumes, args.threads)
    caveats = [
        f"L={s.volume}: {s.budget_exhausted} orbits exceeded the budget {args.budget}"
        for s in stats if s.budget_exhausted
    ]
    result = [s.to_dict() for s in stats]
    cols = ["L", "samples", "repetitions", "seed", "mean", "log_mean",
            "rel_variance_log", "budget_exhausted"]
    rows = (cols, [(s.volume, s.samples, s.repetitions, s.seed, s.mean,
                    s.log_mean, s.rel_variance_log, s.budget_exhausted)
                   for s in stats])
    _emit(args, result, caveats, rows)


def cmd_recurrence(args):
    m = _get_map(args)
    volumes = _parse_int_list(args.L, even_only=True)
    if args.method == "exhaustive_lcm":
        over = [L for L in volumes if m.n ** L > args.state_cap]
        if over:
            raise UsageError(
                f"volumes {over} exceed the state cap {args.state_cap}; raise "
                "--state-cap or use another method")

    def one(L):
        return ca_sim.recurrence_time(m, L, method=args.method,
                                      samples=args.samples, seed=args.seed,
                                      budget=args.budget)
    res = _grid_map(one, volumes, args.threads)
    caveats = [f"L={r.volume}: {c}" for r in res for c in r.caveats]
    result = [{"L": r.volume, "T": r.T, "method": r.method} for r in res]
    rows = (["L", "T", "method"], [(r.volume, r.T, r.method) for r in res])
    _emit(args, result, caveats, rows)


def cmd_ffield(args):
    if args.ffield_command == "order":
        volumes = _parse_int_list(args.L, even_only=True)

        def one(L):
            return linear_ca.matrix_order(linear_ca.build_v(L, args.p))
        reps = _grid_map(one, volumes, args.threads)
        caveats = [f"L={r.L}: {c}" for r in reps for c in r.caveats]
        result = [
            {"L": r.L, "T": r.T, "n": r.n, "s": r.s, "method": r.method,
             "certified": r.certified, "multiple": r.multiple}
            for r in reps
        ]
        rows = (["L", "p", "T", "n", "s", "method", "certified"],
                [(r.L, r.p, r.T, r.n, r.s, r.method, r.certified) for r in reps])
        _emit(args, result, caveats, rows)
        return
    if args.ffield_command == "blocks":
        rep = linear_ca.block_spectrum(args.p, args.L)
        result = {
            "p": rep["p"], "L": rep["L"], "ell": rep["ell"], "n": rep["n"],
            "field": rep["field"], "modulus": list(rep["modulus"]),
            "lcm_block_orders": rep["lcm_block_orders"],
            "matrix_T": rep["matrix_T"], "matches": rep["matches"],
            "blocks": [
                {"omega": list(b["omega"].coeffs), "order": b["order"],
                 "charpoly_ok": b["charpoly_ok"], "special": b["special"]}
                for b in rep["blocks"]
            ],
        }
        _emit(args, result, [])
        return
    # verify
    kind = args.corollary
    if kind == "2pm":
        result = linear_ca.verify_corollary_2pm(args.p, args.m_max)
        ok = all(r["mu_in_range"] and r["lower_bound_ok"] for r in result)
    elif kind == "div":
        volumes = _parse_int_list(args.L, even_only=True)
        result = [linear_ca.verify_divisibility(args.p, L) for L in volumes
                  if (L // 2) % args.p]
        ok = all(r["divides"] and r["upper_bound_ok"] for r in result)
    elif kind == "repunit":
        result = [linear_ca.verify_repunit_bound(args.p, k) for k in
                  _parse_int_list(args.k)]
        ok = all(r["ok"] for r in result)
    elif kind == "coprime":
        result = linear_ca.coprime_decomposition_check(args.p, args.a, args.b)
        ok = True
    else:
        raise UsageError(f"unknown corollary {kind!r}")
    caveats = [] if ok else ["at least one assertion failed; see result"]
    _emit(args, {"kind": kind, "ok": ok, "checks": result}, caveats)
    if not ok:
        raise RuntimeError("verification failed")


# --------------------------------------------------------------------------
# parser


def _add_common(sp):
    sp.add_argument("--out", help="write the report to a file instead of stdout")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--threads", type=int, default=1,
                    help="parallel grid tasks; results merge in key order")


def _add_map_source(sp):
    sp.add_argument("--builtin", help=f"one of {', '.join(builtin_names())}")
    sp.add_argument("--map", help='map text like "21 12 / 22 11"')


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="duc",
        description="Dual-unitary circuit analyses with deterministic reports.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("verify", help="bijectivity / dual-unitarity / perfectness flags")
    _add_map_source(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("construct", help="build a gate family member and test its flags")
    sp.add_argument("--family", required=True,
                    choices=("n2_family", "dressed_swap", "graph_state",
                             "kicked_ising", "p_state", "ring_linear",
                             "fourier_reduce"))
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--j", type=float, default=0.25, help="n2_family coupling")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--alphas", default="1,1")
    sp.add_argument("--betas", default="1,1")
    sp.add_argument("--gammas", default="0,0")
    sp.add_argument("--coeffs", default="1,1,1,-1")
    _add_common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("enumerate", help="equivalence classes of DU permutation maps")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--max-n", type=int, default=3, dest="max_n")
    sp.add_argument("--classes", action="store_true",
                    help="include per-class representatives in the report")
    _add_common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("gliders", help="glider counts from the transfer spectrum")
    _add_map_source(sp)
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--extract", action="store_true",
                    help="solve for the glider operators and re-verify them")
    sp.add_argument("--dense-cap", type=int, default=DENSE_CAP, dest="dense_cap")
    _add_common(sp)
    sp.set_defaults(func=cmd_gliders)

    sp = sub.add_parser("correlate", help="two-point correlators on a ring")
    _add_map_source(sp)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--t", required=True, help="even times, e.g. 0..4")
    sp.add_argument("--y", type=int, required=True, help="fixed site of op1")
    sp.add_argument("--x", help="sites of op2; all of 1..L when omitted")
    sp.add_argument("--op1", required=True)
    sp.add_argument("--op2")
    sp.add_argument("--traceless", action="store_true")
    sp.add_argument("--state-cap", type=int, default=STATE_CAP, dest="state_cap")
    _add_common(sp)
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("orbits", help="sampled orbit-length statistics")
    _add_map_source(sp)
    sp.add_argument("--L", required=True, help="even volumes, e.g. 8..16")
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--repetitions", type=int, default=10)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=ca_sim.DEFAULT_BUDGET)
    _add_common(sp)
    sp.set_defaults(func=cmd_orbits)

    sp = sub.add_parser("recurrence", help="lcm of all orbit lengths")
    _add_map_source(sp)
    sp.add_argument("--L", required=True)
    sp.add_argument("--method", default="exhaustive_lcm",
                    choices=("exhaustive_lcm", "matrix_order", "sampled_lower_bound"))
    sp.add_argument("--samples", type=int, default=64)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=ca_sim.DEFAULT_BUDGET)
    sp.add_argument("--state-cap", type=int, default=STATE_CAP, dest="state_cap")
    _add_common(sp)
    sp.set_defaults(func=cmd_recurrence)

    sp = sub.add_parser("ffield", help="exact orders of the additive map over F_p")
    fsub = sp.add_subparsers(dest="ffield_command", required=True)
    fo = fsub.add_parser("order")
    fo.add_argument("--p", type=int, default=3)
    fo.add_argument("--L", required=True)
    _add_common(fo)
    fo.set_defaults(func=cmd_ffield)
    fv = fsub.add_parser("verify")
    fv.add_argument("--corollary", required=True,
                    choices=("2pm", "div", "repunit", "coprime"))
    fv.add_argument("--p", type=int, default=3)
    fv.add_argument("--m-max", type=int, default=3, dest="m_max")
    fv.add_argument("--L", default="2..48")
    fv.add_argument("--k", default="2,3", help="repunit exponents")
    fv.add_argument("--a", type=int, default=4)
    fv.add_argument("--b", type=int, default=3)
    _add_common(fv)
    fv.set_defaults(func=cmd_ffield)
    fb = fsub.add_parser("blocks")
    fb.add_argument("--p", type=int, default=3)
    fb.add_argument("--L", type=int, required=True)
    _add_common(fb)
    fb.set_defaults(func=cmd_ffield)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - anything else is a computation failure
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
