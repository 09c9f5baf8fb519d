"""Command-line driver.

Exit codes: 0 success, 1 decode or search failure (a witness is printed),
2 configuration error.  Outputs are assembled in memory and written only
once every step has succeeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import runtime_sim as rs
from .errors import AgRookError
from .function_field import Curve
from .galois import field_from_order
from .mm_tensors import MatmulScheme, load_algorithm, naive_algorithm, strassen_2x2x2
from .rook_diagonal import build_diagonal, empirical_threshold, threshold_bounds
from .rook_entangled import build_entangled
from .tensor_power import (
    Infeasible,
    SymmetricDecomposition,
    TruthTable,
    build_power_scheme,
    interpolate,
    waring_bruteforce,
)

KINDS = ("diagonal", "entangled", "power", "general-matmul")
CONFIG_KEYS = {
    "curve", "kind", "k", "dims", "n", "policy", "seed", "straggler", "trials", "mode",
    "algorithm", "algorithm_file", "decomposition", "data_q", "block", "out", "format",
    "field_q", "truth_table", "ell", "max_rank",
}


class ConfigError(Exception):
    pass


class RunFailure(Exception):
    """Decode or search failure; exit code 1."""


# -- config -------------------------------------------------------------------

def load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    for key, val in cfg.items():
        if isinstance(val, dict) or (isinstance(val, list) and any(isinstance(v, (list, dict))
                                                                   for v in val)):
            raise ConfigError(f"config key {key!r} is nested more than one level")
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if "straggler" in cfg:
        straggler_model(cfg, 0, 0)
    base = os.path.dirname(os.path.abspath(path))
    for key in ("decomposition", "truth_table", "algorithm_file"):
        if key in cfg and not os.path.isabs(cfg[key]):
            cfg[key] = os.path.join(base, cfg[key])
    return cfg


def _require(cfg, *keys):
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"config is missing {', '.join(missing)}")


def _int(cfg, key, default=None):
    val = cfg.get(key, default)
    if val is None:
        return None
    try:
        return int(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be an integer") from None


def _triple(val, key):
    if isinstance(val, str):
        val = val.split(",")
    try:
        out = tuple(int(v) for v in val)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be three integers") from None
    if len(out) != 3:
        raise ConfigError(f"{key} must be three integers")
    return out


def _curve(cfg):
    _require(cfg, "curve")
    try:
        return Curve.parse(str(cfg["curve"]))
    except (ValueError, AgRookError) as exc:
        raise ConfigError(str(exc)) from None


def _data_field(cfg, curve):
    q = _int(cfg, "data_q")
    if q is None:
        return curve.field
    try:
        F = field_from_order(q)
    except (ValueError, AgRookError) as exc:
        raise ConfigError(str(exc)) from None
    if not (F == curve.field or (F.m == 1 and F.p == curve.field.p)):
        raise ConfigError(f"data field GF({q}) does not embed into {curve.field}")
    return F


def _algorithm(cfg, F):
    name = cfg.get("algorithm", "strassen")
    if "algorithm_file" in cfg:
        try:
            return load_algorithm(cfg["algorithm_file"], F)
        except (OSError, KeyError, ValueError, AgRookError) as exc:
            raise ConfigError(f"cannot load algorithm: {exc}") from None
    if name == "strassen":
        return strassen_2x2x2(F)
    if name == "naive":
        return naive_algorithm(*_triple(cfg.get("dims", "2,2,2"), "dims"), F)
    raise ConfigError(f"unknown algorithm {name!r}")


def _decomposition(cfg, F):
    _require(cfg, "decomposition")
    try:
        with open(cfg["decomposition"]) as fh:
            return SymmetricDecomposition.from_lines(F, fh.read().splitlines())
    except (OSError, ValueError, IndexError) as exc:
        raise ConfigError(f"cannot read decomposition: {exc}") from None


def build_scheme(cfg, seed):
    """Scheme plus the field random inputs are drawn from."""
    kind = cfg.get("kind", "diagonal")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}")
    curve = _curve(cfg)
    data = _data_field(cfg, curve)
    n = _int(cfg, "n")
    policy = cfg.get("policy", "canonical")
    if policy not in ("canonical", "seeded"):
        raise ConfigError("policy must be canonical or seeded")
    try:
        if kind == "diagonal":
            _require(cfg, "k")
            return build_diagonal(curve, _int(cfg, "k"), n, policy, seed), data
        if kind == "general-matmul":
            alg = _algorithm(cfg, curve.field)
            base = build_diagonal(curve, alg.rank, n, policy, seed)
            return MatmulScheme(base, alg), data
        if kind == "entangled":
            _require(cfg, "dims")
            return build_entangled(curve, None, *_triple(cfg["dims"], "dims"), n=n), data
        return build_power_scheme(curve, _decomposition(cfg, data), n, policy, seed), data
    except ConfigError:
        raise
    except (AgRookError, ValueError) as exc:
        raise ConfigError(f"cannot build {kind} scheme: {type(exc).__name__}: {exc}") from None


def random_inputs(scheme, data, rng, cfg):
    if scheme.kind == "power":
        return scheme.random_inputs(rng)
    block = _triple(cfg.get("block", "2,2,2"), "block")
    if scheme.kind == "general-matmul":
        return scheme.random_inputs(rng, block, field=data)
    inputs = scheme.random_inputs(rng, block)
    if data is not scheme.field:
        inputs = tuple(np.asarray(x) % data.p for x in inputs)
    return inputs


def straggler_model(cfg, n, seed):
    text = str(cfg.get("straggler", "all"))
    name, _, arg = text.partition(":")
    try:
        if name == "all":
            return rs.FixedSet(tuple(range(n)))
        if name == "fixed":
            return rs.FixedSet(tuple(int(v) for v in arg.split(",") if v != ""))
        if name == "bernoulli":
            return rs.Bernoulli(float(arg), seed)
        if name == "adversary":
            return rs.ExhaustiveAdversary(int(arg))
    except ValueError as exc:
        raise ConfigError(f"bad straggler model {text!r}: {exc}") from None
    raise ConfigError(f"unknown straggler model {text!r}")


# -- rendering ------------------------------------------------------------------

def _table_text(rows, fmt):
    if fmt == "json":
        return json.dumps(rows, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    keys = list(rows[0]) if rows else []
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: (" ".join(map(str, v)) if isinstance(v, (list, tuple)) else
                        ("" if v is None else v)) for k, v in row.items()})
    return buf.getvalue()


# -- commands -----------------------------------------------------------------

def cmd_curve_info(args, cfg):
    desc = args.descriptor or cfg.get("curve")
    if desc is None:
        raise ConfigError("give a curve descriptor")
    try:
        curve = Curve.parse(desc)
    except (ValueError, AgRookError) as exc:
        raise ConfigError(str(exc)) from None
    F = curve.field
    places = curve.rational_places()
    gens = []
    for P in curve.generator_places():
        r = curve.min_pole_generator(P)[1]
        gens.append({"place": P.serialize(F), "r": r, "true_min": curve.is_true_min_pole(P)})
    info = {
        "curve": curve.descriptor(),
        "genus": curve.genus,
        "field": str(F),
        "rational_places": len(places),
        "first_places": [P.serialize(F) for P in places[:8]],
        "generator_places": gens[:8],
    }
    if args.format == "csv":
        text = _table_text([{"curve": info["curve"], "genus": info["genus"],
                             "rational_places": info["rational_places"]}], "csv")
    else:
        text = json.dumps(info, indent=1) + "\n"
    return {"curve_info." + args.format: text}


def cmd_build(args, cfg):
    scheme, _ = build_scheme(cfg, args.seed)
    return {"scheme.json": json.dumps(scheme.to_dict(), indent=1, sort_keys=True) + "\n"}


def cmd_simulate(args, cfg):
    scheme, data = build_scheme(cfg, args.seed)
    model = straggler_model(cfg, scheme.n, args.seed)
    trials = _int(cfg, "trials", 1)
    rng = np.random.default_rng(args.seed)
    rows, failed = [], None
    for trial in range(trials):
        inputs = random_inputs(scheme, data, rng, cfg)
        try:
            report = rs.simulate_run(scheme, inputs, model, trial)
        except StopIteration:
            break
        d = report.to_dict()
        d["trial"] = trial
        rows.append(d)
        if not report.success and failed is None:
            failed = report.responders
    files = {"simulate." + args.format: _table_text(rows, args.format)}
    if failed is not None:
        raise RunFailure(f"decode failed for responders {list(failed)}", files)
    return files


def cmd_threshold(args, cfg):
    scheme, _ = build_scheme(cfg, args.seed)
    mode = cfg.get("mode", "exhaustive")
    trials = _int(cfg, "trials", 200)
    try:
        res = empirical_threshold(scheme, mode, args.seed, trials)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    base = getattr(scheme, "base", scheme)
    ell = getattr(scheme, "ell", 2)
    row = {
        "curve": scheme.curve.descriptor() if hasattr(scheme, "curve") else base.curve.descriptor(),
        "kind": scheme.kind,
        "k": getattr(base, "k", None),
        "n": scheme.n,
        "sigma_hat": getattr(base, "sigma_hat", None),
        "R_star": scheme.threshold,
        "R_emp": res.R_emp,
        "bound_2sigma": ell * base.sigma_hat if hasattr(base, "sigma_hat") else None,
        "subsets_tested": res.subsets_tested,
        "witness": list(res.witness) if res.witness else None,
        "mode": mode,
        "seed": args.seed,
    }
    if hasattr(base, "sigma_hat"):
        row["bounds_hold"] = all(v[2] for v in threshold_bounds(base, ell).values())
    curve = rs.success_curve(scheme, trials=min(trials, 100), seed=args.seed)
    files = {"threshold." + args.format: _table_text([row], args.format),
             "success_curve.csv": rs.curve_to_csv(curve)}
    if res.R_emp is None:
        raise RunFailure(f"no size up to n decodes; witness {list(res.witness)}", files)
    return files


def cmd_tensor_compile(args, cfg):
    _require(cfg, "field_q", "truth_table")
    try:
        F = field_from_order(_int(cfg, "field_q"))
        table = TruthTable.read_csv(F, cfg["truth_table"])
    except (OSError, ValueError, AgRookError) as exc:
        raise ConfigError(f"cannot read truth table: {exc}") from None
    polys = interpolate(table)
    files = {}
    for j, p in enumerate(polys):
        name = "poly.txt" if len(polys) == 1 else f"poly_{j + 1}.txt"
        files[name] = "\n".join(p.to_lines()) + "\n"
    if "ell" in cfg:
        ell = _int(cfg, "ell")
        max_rank = _int(cfg, "max_rank", 3)
        for j, p in enumerate(polys):
            name = "decomposition.txt" if len(polys) == 1 else f"decomposition_{j + 1}.txt"
            try:
                res = waring_bruteforce(p, ell, max_rank)
            except (ValueError, AgRookError) as exc:
                raise RunFailure(f"search failed for output {j + 1}: {exc}", files) from None
            if isinstance(res, Infeasible):
                raise RunFailure(f"output {j + 1} has no decomposition of rank <= {max_rank}",
                                 files)
            files[name] = "\n".join(res.to_lines()) + "\n"
    return files


def cmd_bench(args, cfg):
    scheme, data = build_scheme(cfg, args.seed)
    rng = np.random.default_rng(args.seed)
    reps = _int(cfg, "trials", 5)
    rows = []
    for rep in range(reps):
        inputs = random_inputs(scheme, data, rng, cfg)
        t0 = time.perf_counter()
        payloads = scheme.encode(inputs)
        t1 = time.perf_counter()
        responses = {w: scheme.compute(payloads[w]) for w in range(scheme.n)}
        t2 = time.perf_counter()
        scheme.decode(responses)
        t3 = time.perf_counter()
        rows.append({"rep": rep, "encode_s": f"{t1 - t0:.6f}", "compute_s": f"{t2 - t1:.6f}",
                     "decode_s": f"{t3 - t2:.6f}"})
    return {"bench." + args.format: _table_text(rows, args.format)}


# -- entry point ----------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON experiment config")
    common.add_argument("--out", help="output directory (default: print to stdout)")
    common.add_argument("--seed", type=int, help="overrides the config seed")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    parser = argparse.ArgumentParser(prog="agrook", description="Coded matrix products on curves")
    sub = parser.add_subparsers(dest="command", required=True)
    curve = sub.add_parser("curve", help="curve queries")
    csub = curve.add_subparsers(dest="action", required=True)
    info = csub.add_parser("info", parents=[common], help="genus, places, pole numbers")
    info.add_argument("descriptor", nargs="?")
    info.set_defaults(func=cmd_curve_info, default_format="json")
    for name, func, fmt in (("build", cmd_build, "json"), ("simulate", cmd_simulate, "json"),
                            ("threshold", cmd_threshold, "csv"), ("bench", cmd_bench, "csv")):
        p = sub.add_parser(name, parents=[common])
        p.set_defaults(func=func, default_format=fmt)
    tensor = sub.add_parser("tensor", help="function compilation")
    tsub = tensor.add_subparsers(dest="action", required=True)
    comp = tsub.add_parser("compile", parents=[common], help="truth table to polynomial")
    comp.set_defaults(func=cmd_tensor_compile, default_format="json")
    return parser


def _emit(files, out):
    if out is None:
        for name, text in files.items():
            sys.stdout.write(f"== {name}\n{text}")
        return
    os.makedirs(out, exist_ok=True)
    for name, text in files.items():
        with open(os.path.join(out, name), "w") as fh:
            fh.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is None:
            args.seed = _int(cfg, "seed", 0)
        if args.format is None:
            args.format = cfg.get("format", args.default_format)
            if args.format not in ("csv", "json"):
                raise ConfigError("format must be csv or json")
        out = args.out or cfg.get("out")
        files = args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except RunFailure as exc:
        message, files = exc.args
        print(f"failure: {message}", file=sys.stderr)
        _emit(files, out)
        return 1
    _emit(files, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
