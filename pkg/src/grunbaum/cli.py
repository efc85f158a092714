"""Command-line driver for estimates, checks, sharpness sweeps and randomized suites.

Usage: ``grunbaum --config experiment.json [--seed N] [--out PATH] [--format json|csv]``.
Exit codes: 0 all checks pass, 1 some inequality check failed, 2 bad configuration or input.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import inequalities as ineq
from . import measures
from . import polytope as poly
from .bodies import ProductConeBody
from .core import Seed, Subspace, random_subspace

COMMANDS = ("estimate", "check", "sweep", "suite")
CHECKERS = ("centroid_section", "halfspace", "classic", "prop", "worst_direction")
QUANTITIES = ("intrinsic", "dual", "dual_halfspace")
DEFAULT_SUITE = [[2, 1, 1], [3, 2, 1], [3, 2, 2], [4, 3, 2]]

# key -> accepted python types
KEYS = {
    "command": str, "body": str, "generator": str, "vertices": int,
    "n": int, "k": int, "i": int,
    "checker": str, "measure": str, "mode": str, "order": str,
    "subspace": (str, list), "inner_subspace": list, "xi": list,
    "quantity": str, "method": str,
    "theorem": str, "epsilons": list, "t": (int, float),
    "seed": int, "samples": int, "directions": int, "starts": int, "step_tol": (int, float),
    "dual_method": str, "grid": int,
    "bodies": int, "configs": list, "xi_count": int, "measures": list,
    "out": str, "format": str,
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config field '{key}': {message}")
        self.key = key


# ---------------------------------------------------------------------------
# config handling

def load_config(path: str) -> tuple[dict, Path]:
    p = Path(path)
    try:
        cfg = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config", "top level must be a JSON object")
    validate(cfg)
    return cfg, p.parent


def validate(cfg: dict) -> None:
    for key, value in cfg.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        want = KEYS[key]
        if isinstance(value, bool) or not isinstance(value, want):
            raise ConfigError(key, f"wrong type {type(value).__name__}")
    cmd = cfg.get("command")
    if cmd not in COMMANDS:
        raise ConfigError("command", f"must be one of {COMMANDS}")
    if "seed" in cfg and not (0 <= cfg["seed"] < 2**64):
        raise ConfigError("seed", "must be an unsigned 64-bit integer")
    for key in ("samples", "directions", "bodies", "xi_count", "vertices"):
        if key in cfg and cfg[key] < 1:
            raise ConfigError(key, "must be positive")
    if "format" in cfg and cfg["format"] not in ("json", "csv"):
        raise ConfigError("format", "must be json or csv")
    dims = {key: cfg[key] for key in ("n", "k", "i") if key in cfg}
    for key, v in dims.items():
        if v < 1:
            raise ConfigError(key, "must be >= 1")
    if "k" in dims and "n" in dims and dims["k"] > dims["n"]:
        raise ConfigError("k", f"k = {dims['k']} exceeds n = {dims['n']}")
    if "i" in dims and "k" in dims and dims["i"] > dims["k"]:
        raise ConfigError("i", f"i = {dims['i']} exceeds k = {dims['k']}")
    if "i" in dims and "n" in dims and dims["i"] > dims["n"]:
        raise ConfigError("i", f"i = {dims['i']} exceeds n = {dims['n']}")
    if cmd == "check" and cfg.get("checker") not in CHECKERS:
        raise ConfigError("checker", f"must be one of {CHECKERS}")
    if cmd == "estimate" and cfg.get("quantity") not in QUANTITIES:
        raise ConfigError("quantity", f"must be one of {QUANTITIES}")
    if cmd == "sweep":
        if cfg.get("theorem") not in ineq.SWEEPS:
            raise ConfigError("theorem", f"must be one of {ineq.SWEEPS}")
        for key in ("n", "k", "i", "epsilons"):
            if key not in cfg:
                raise ConfigError(key, "required for sweeps")
    if cmd == "suite":
        for c in cfg.get("configs", DEFAULT_SUITE):
            if (not isinstance(c, list) or len(c) != 3 or not all(isinstance(v, int) for v in c)
                    or not (1 <= c[2] <= c[1] <= c[0])):
                raise ConfigError("configs", f"entry {c!r} is not a valid [n, k, i]")
    if "measure" in cfg and cfg["measure"] not in ("volume", "intrinsic", "dual"):
        raise ConfigError("measure", "must be volume, intrinsic or dual")
    if "mode" in cfg and cfg["mode"] not in ("section", "projection"):
        raise ConfigError("mode", "must be section or projection")
    if "order" in cfg and cfg["order"] not in ("section_then_project", "project_then_section"):
        raise ConfigError("order", "must be section_then_project or project_then_section")
    if "measures" in cfg and not set(cfg["measures"]) <= set(ineq.SUITE_MEASURES):
        raise ConfigError("measures", f"entries must be among {ineq.SUITE_MEASURES}")


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(key, "required for this command")
    return cfg[key]


def load_body(path: Path):
    """Read a polytope or product-cone body file."""
    try:
        d = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError("body", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("body", f"invalid JSON in {path}: {exc}") from exc
    kind = d.get("type") if isinstance(d, dict) else None
    try:
        if kind == "polytope":
            V = np.array(d["vertices"], dtype=float)
            if V.ndim != 2 or V.shape[1] != d["ambient_dim"]:
                raise ValueError("vertex rows do not match ambient_dim")
            return poly.hull(V)
        if kind == "product_cone":
            return ProductConeBody.from_json_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError("body", f"bad body file {path}: {exc}") from exc
    raise ConfigError("body", f"unknown body type {kind!r}")


def _body(cfg: dict, base: Path, seed: Seed | None):
    if "body" in cfg:
        K = load_body(base / cfg["body"])
    elif cfg.get("generator") == "random_centered_polytope":
        n = _require(cfg, "n")
        K = poly.random_centered_polytope(n, cfg.get("vertices", 3 * n + 6), _need_seed(seed).child(0))
    elif "generator" in cfg:
        raise ConfigError("generator", f"unknown generator {cfg['generator']!r}")
    else:
        raise ConfigError("body", "give a body file or a generator")
    if "n" in cfg and K.ambient_dim != cfg["n"]:
        raise ConfigError("n", f"body lives in R^{K.ambient_dim}, config says n = {cfg['n']}")
    return K


def _need_seed(seed):
    if seed is None:
        raise ConfigError("seed", "required for stochastic paths")
    return seed


def _subspace(cfg: dict, key: str, n: int, seed: Seed | None, default_dim: int | None) -> Subspace:
    spec = cfg.get(key, "random" if key == "subspace" else None)
    if spec is None:
        raise ConfigError(key, "required")
    if spec == "random":
        d = default_dim if default_dim is not None else cfg.get("k")
        if d is None:
            raise ConfigError("k", "needed to draw a random subspace")
        return random_subspace(n, d, _need_seed(seed).child(1))
    if isinstance(spec, str):
        raise ConfigError(key, "must be 'random' or a list of basis rows")
    try:
        rows = np.array(spec, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != n:
            raise ValueError(f"rows must have length {n}")
        E = Subspace.span(rows)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, str(exc)) from exc
    if key == "subspace" and "k" in cfg and E.dim != cfg["k"]:
        raise ConfigError("k", f"subspace has dimension {E.dim}, config says k = {cfg['k']}")
    return E


def _xi(cfg: dict, n: int) -> np.ndarray:
    xi = np.array(_require(cfg, "xi"), dtype=float)
    if xi.shape != (n,) or not np.isfinite(xi).all() or np.linalg.norm(xi) == 0:
        raise ConfigError("xi", f"must be a non-zero vector of length {n}")
    return xi / np.linalg.norm(xi)


def _check_config(cfg: dict, seed: Seed | None) -> ineq.CheckConfig:
    defaults = ineq.CheckConfig()
    return ineq.CheckConfig(
        seed=seed,
        samples=cfg.get("samples", defaults.samples),
        directions=cfg.get("directions", defaults.directions),
        starts=cfg.get("starts", defaults.starts),
        step_tol=float(cfg.get("step_tol", defaults.step_tol)),
        dual_method=cfg.get("dual_method", defaults.dual_method),
        grid=cfg.get("grid"),
    )


# ---------------------------------------------------------------------------
# commands

def run_estimate(cfg, base, seed):
    K = _body(cfg, base, seed)
    i = _require(cfg, "i")
    quantity = cfg["quantity"]
    if "subspace" in cfg:
        E = _subspace(cfg, "subspace", K.ambient_dim, seed, None)
        K = poly.section(ineq._as_polytope(K), E)
        if not isinstance(K, poly.Polytope):
            raise ConfigError("subspace", "section through the origin is degenerate")
    samples = cfg.get("samples", 100_000)
    if quantity == "intrinsic":
        est = measures.intrinsic_volume(ineq._as_polytope(K), i, cfg.get("method", "exact"), samples, seed)
    elif quantity == "dual":
        est = measures.dual_volume(K, i, cfg.get("method", "sphere_mc"), samples, seed)
    else:
        xi = _xi(cfg, K.ambient_dim)
        est = measures.dual_volume_halfspace(K, i, xi, cfg.get("method", "sphere_mc"), samples, seed)
    return [{"quantity": quantity, "i": i, "dim": K.ambient_dim, "estimate": est.to_dict()}], True


def run_check(cfg, base, seed):
    K = _body(cfg, base, seed)
    n = K.ambient_dim
    cc = _check_config(cfg, seed)
    which = cfg["checker"]
    if which == "classic":
        E = Subspace.full(n)
        rep = ineq.check_halfspace(K, E, n, "section", "volume", _xi(cfg, n), cc)
    elif which == "centroid_section":
        E = _subspace(cfg, "subspace", n, seed, None)
        measure = _require(cfg, "measure")
        rep = ineq.check_centroid_section(K, E, cfg.get("i", E.dim), measure, cc)
    elif which in ("halfspace", "worst_direction"):
        E = _subspace(cfg, "subspace", n, seed, None)
        measure = cfg.get("measure", "dual")
        if measure == "intrinsic":
            raise ConfigError("measure", "half-space checks use volume or dual")
        i = cfg.get("i", E.dim)
        mode = cfg.get("mode", "section")
        if which == "halfspace":
            rep = ineq.check_halfspace(K, E, i, mode, measure, _xi(cfg, n), cc)
        else:
            _, rep = ineq.worst_direction(K, E, i, mode, measure, cc)
    else:
        E = _subspace(cfg, "subspace", n, seed, None)
        F = _subspace(cfg, "inner_subspace", n, seed, None)
        rep = ineq.check_prop(K, E, F, _xi(cfg, n), cfg.get("order", "section_then_project"), cc)
    return [rep.to_dict()], rep.passed


def run_sweep(cfg, base, seed):
    cc = _check_config(cfg, seed)
    rows = ineq.sharpness_sweep(cfg["theorem"], cfg["n"], cfg["k"], cfg["i"], cfg["epsilons"],
                                cfg.get("t"), cc, cfg.get("method", "quadrature"))
    return [r.to_dict() for r in rows], True


def run_suite(cfg, base, seed):
    seed = _need_seed(seed)
    cc = _check_config(cfg, seed)
    reports = []
    for c in cfg.get("configs", DEFAULT_SUITE):
        n, k, i = c
        cc_c = dataclasses.replace(cc, seed=seed.child(1000 * n + 100 * k + i))
        reports += ineq.suite_reports(n, k, i, bodies=cfg.get("bodies", 50), directions=cfg.get("xi_count", 8),
                                      vertices=cfg.get("vertices"),
                                      measures_=tuple(cfg.get("measures", ineq.SUITE_MEASURES)), cfg=cc_c)
    dicts = [r.to_dict() for r in reports]
    return dicts, all(r.passed for r in reports)


RUNNERS = {"estimate": run_estimate, "check": run_check, "sweep": run_sweep, "suite": run_suite}


# ---------------------------------------------------------------------------
# output

SWEEP_COLUMNS = ["epsilon", "t", "ratio", "expected_limit", "abs_error", "stderr"]
REPORT_COLUMNS = ["theorem", "n", "k", "i", "lhs", "rhs_raw", "constant", "ratio", "margin", "sigma", "pass"]


def _fmt(v):
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def render(command: str, seed: Seed | None, reports: list, fmt: str) -> str:
    if fmt == "json":
        doc = {"tool_version": __version__, "seed": None if seed is None else seed.to_dict(), "reports": reports}
        if command == "suite":
            margins = [r["margin"] for r in reports]
            doc["summary"] = {
                "total": len(reports),
                "passed": sum(r["pass"] for r in reports),
                "worst_margin": min(margins) if margins else None,
            }
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "sweep":
        w.writerow(SWEEP_COLUMNS)
        for r in reports:
            w.writerow([_fmt(r["epsilon"]), _fmt(r["t"]), _fmt(r["ratio"]), _fmt(r["expected_limit"]),
                        _fmt(r["error"]), _fmt(r["stderr"])])
    elif command == "estimate":
        w.writerow(["quantity", "i", "dim", "value", "stderr", "samples", "method"])
        for r in reports:
            e = r["estimate"]
            w.writerow([r["quantity"], r["i"], r["dim"], _fmt(e["value"]), _fmt(e["stderr"]), e["samples"], e["method"]])
    else:
        w.writerow(REPORT_COLUMNS)
        for r in reports:
            d = r["dims"]
            w.writerow([r["theorem"], d["n"], d["k"], d["i"], _fmt(r["lhs"]["value"]), _fmt(r["rhs_raw"]["value"]),
                        _fmt(r["constant"]), _fmt(r["ratio"]), _fmt(r["margin"]), _fmt(r["sigma"]),
                        str(r["pass"]).lower()])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grunbaum", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True, help="flat JSON experiment file")
    ap.add_argument("--seed", type=int, help="64-bit seed, overrides the config")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=("json", "csv"), help="report format (default json)")
    ap.add_argument("--samples", type=int, help="global Monte-Carlo sample override")
    ap.add_argument("--quiet", action="store_true", help="suppress the summary line on stderr")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, base = load_config(args.config)
        if args.samples is not None:
            if args.samples < 1:
                raise ConfigError("samples", "must be positive")
            cfg["samples"] = args.samples
        raw_seed = args.seed if args.seed is not None else cfg.get("seed")
        if raw_seed is not None and not (0 <= raw_seed < 2**64):
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        seed = None if raw_seed is None else Seed(raw_seed)
        fmt = args.format or cfg.get("format", "json")
        out = args.out or cfg.get("out")
        command = cfg["command"]
        try:
            reports, ok = RUNNERS[command](cfg, base, seed)
        except ConfigError:
            raise
        except (ValueError, TypeError) as exc:
            raise ConfigError(command, str(exc)) from exc
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = render(command, seed, reports, fmt)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not args.quiet:
        if command in ("check", "suite"):
            passed = sum(r["pass"] for r in reports)
            print(f"{command}: {passed}/{len(reports)} checks pass", file=sys.stderr)
        else:
            print(f"{command}: {len(reports)} rows", file=sys.stderr)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
