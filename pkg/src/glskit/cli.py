"""Command line front end: ``glskit <experiment> --config <path> [--out <dir>] [--seed <u64>]``.

Configs are flat ``key = value`` text files (``#`` starts a comment).
Unknown keys are rejected.  Every run writes ``<experiment>.json`` with the
fully resolved configuration and the seed, plus CSV tables, into the
output directory.  Files are written to a temporary name first and then
renamed into place.

Selectors
---------
``psi`` / ``nu``: ``power_alpha:<alpha>``, ``grand_b:<b>`` or ``file:<path>`` (PSI v1).

``f``: ``gaussian``, ``indicator:<delta>``, ``gaussian_tail:<n>``,
``gaussian_truncated:<n>`` or ``file:<path>`` (GRIDFN v1).

Exit status: 0 success, 2 invalid configuration or input, 3 numerical
failure (quadrature error or a polarization run that did not converge).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .compactness import (
    FunctionSequence,
    gaussian_truncation_family,
    indicator_curve,
    remark_demos,
    theorem1_certify,
    theorem2_certify,
)
from .measure import (
    GridFunction,
    MeasuredPartition,
    QuadratureError,
    exact_lp_norm,
    gaussian_moment_curve,
    gaussian_tail_curve,
    read_gridfn,
    write_gridfn,
)
from .norm import ega_modulus, g0_membership, gls_norm
from .psi import make_psi_builtin, read_psi_file
from .rearrange import gradient_seminorm, schaftingen_run, schwarz_symmetrize

EXPERIMENTS = ("norm", "g0", "ega", "symmetrize", "polarize_run", "theorem1", "theorem2",
               "remark1", "remark2", "polya_szego")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


class NonConvergence(RuntimeError):
    pass


# --- typed config ---------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _str_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


_COMMON = {"experiment": (str, None), "seed": (int, 0), "output_dir": (str, "glskit_out")}

_SCHEMA: dict[str, dict] = {
    "norm": {"f": (str, "gaussian"), "psi": (str, "power_alpha:0.5"), "tol": (float, 1e-4)},
    "g0": {"f": (str, "gaussian"), "psi": (str, "power_alpha:0.5"), "tol": (float, 1e-3)},
    "ega": {"family": (str, "gaussian_truncations"), "cells": (int, 2 ** 14), "levels": (_int_list, [1, 2, 3, 4, 5]),
            "psi": (str, "power_alpha:0.5"), "deltas": (_float_list, None)},
    "symmetrize": {"grid": (str, None), "output_grid": (str, "symmetrized.gridfn"),
                   "p_list": (_float_list, [1.0, 2.0])},
    "polarize_run": {"grid": (str, None), "random_dims": (_int_list, None), "strategy": (str, "random"),
                     "max_iter": (int, 200000), "p_list": (_float_list, [2.0]), "nu_list": (_str_list, [])},
    "theorem1": {"sequence": (str, "remark2"), "f": (str, "indicator:0.01831563888873418"),
                 "psi": (str, "power_alpha:1"), "nu": (str, "power_alpha:0.5"), "probes": (_float_list, None),
                 "n_max": (int, 200), "eps": (float, 1e-2), "tol": (float, 1e-2), "passes": (int, 4),
                 "measure_probes": (int, 0)},
    "theorem2": {"family": (str, "gaussian_truncations"), "cells": (int, 2 ** 14),
                 "levels": (_int_list, [1, 2, 3, 4, 5]), "psi": (str, "power_alpha:0.5"),
                 "probes": (_float_list, None), "deltas": (_float_list, None), "eps": (float, 1e-2),
                 "tol": (float, 1e-2), "floor_tol": (float, 0.1)},
    "remark1": {"psi": (str, "power_alpha:0.5"), "f": (str, "indicator:0.01831563888873418"),
                "n_max": (int, 1000)},
    "remark2": {"psi": (str, "power_alpha:0.5"), "nu": (str, "power_alpha:1"), "n_max": (int, 20),
                "probes": (_float_list, [2.0, 8.0, 64.0]), "method": (str, "gamma")},
    "polya_szego": {"grid": (str, None), "random_dims": (_int_list, [64]), "p_list": (_float_list, [1.0, 2.0, 4.0])},
}


def parse_config(text: str, experiment: str) -> dict:
    """Parse flat ``key = value`` text and fill defaults; raises :class:`ConfigError`."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    schema = {**_COMMON, **_SCHEMA[experiment]}
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        if key not in schema:
            raise ConfigError(f"line {lineno}: unknown key {key!r} for experiment {experiment!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    out = {}
    for key, (conv, default) in schema.items():
        if key in raw:
            try:
                out[key] = conv(raw[key])
            except ValueError as exc:
                raise ConfigError(f"key {key!r}: {exc}") from None
        else:
            out[key] = default
    if out["experiment"] is not None and out["experiment"] != experiment:
        raise ConfigError(f"config is for experiment {out['experiment']!r}, not {experiment!r}")
    out["experiment"] = experiment
    if out["seed"] < 0 or out["seed"] >= 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    return out


# --- selectors ----------------------------------------------------------------------


def _split(sel: str) -> tuple[str, str]:
    kind, _, arg = sel.partition(":")
    return kind.strip(), arg.strip()


def make_psi(sel: str, base: Path):
    kind, arg = _split(sel)
    if kind == "file":
        return read_psi_file(base / arg)
    if kind in ("power_alpha", "grand_b"):
        if not arg:
            raise ConfigError(f"psi selector {sel!r} needs a parameter")
        return make_psi_builtin(kind, float(arg))
    raise ConfigError(f"unknown psi selector {sel!r}")


def make_function(sel: str, base: Path):
    kind, arg = _split(sel)
    if kind == "gaussian":
        return gaussian_moment_curve()
    if kind == "indicator":
        return indicator_curve(float(arg))
    if kind in ("gaussian_tail", "gaussian_truncated"):
        return gaussian_tail_curve(float(arg), "tail" if kind == "gaussian_tail" else "truncated")
    if kind == "file":
        return read_gridfn(base / arg)
    raise ConfigError(f"unknown function selector {sel!r}")


def _grid_input(cfg: dict, base: Path, rng: np.random.Generator) -> GridFunction:
    if cfg.get("grid"):
        return read_gridfn(base / cfg["grid"])
    dims = cfg.get("random_dims")
    if not dims:
        raise ConfigError("need either 'grid' or 'random_dims'")
    part = MeasuredPartition.grid(dims)
    return GridFunction(part, rng.uniform(0.0, 1.0, part.size))


def _family(cfg: dict, base: Path) -> list[GridFunction]:
    kind, arg = _split(cfg["family"])
    if kind == "gaussian_truncations":
        return gaussian_truncation_family(cfg["cells"], cfg["levels"])
    if kind == "files":
        return [read_gridfn(base / p) for p in arg.split(";") if p.strip()]
    raise ConfigError(f"unknown family selector {cfg['family']!r}")


# --- output ----------------------------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(repr(float(x)) if isinstance(x, (float, np.floating)) else str(x) for x in r))
    return "\n".join(lines) + "\n"


# --- experiments -------------------------------------------------------------------------


def _run_norm(cfg, base, rng):
    res = gls_norm(make_function(cfg["f"], base), make_psi(cfg["psi"], base), tol=cfg["tol"])
    return res.to_dict(), {"trace": _csv(["p", "ratio"], res.certificate)}


def _run_g0(cfg, base, rng):
    res = g0_membership(make_function(cfg["f"], base), make_psi(cfg["psi"], base), tol=cfg["tol"])
    rows = [(side, p, r) for side, pts in res.tails.items() for p, r in pts]
    return res.to_dict(), {"tails": _csv(["side", "p", "ratio"], rows)}


def _run_ega(cfg, base, rng):
    fam = _family(cfg, base)
    deltas = cfg["deltas"] or [2.0 ** -k for k in range(1, 15)]
    res = ega_modulus(fam, make_psi(cfg["psi"], base), deltas)
    return res.to_dict(), {"modulus": _csv(["delta", "eta"], zip(res.deltas, res.etas))}


def _run_symmetrize(cfg, base, rng):
    if not cfg["grid"]:
        raise ConfigError("symmetrize needs 'grid'")
    u = read_gridfn(base / cfg["grid"])
    us = schwarz_symmetrize(u)
    rows = [(p, exact_lp_norm(u, p), exact_lp_norm(us, p)) for p in cfg["p_list"]]
    return ({"input": cfg["grid"], "output_grid": cfg["output_grid"],
             "norms": [{"p": p, "input": a, "symmetrized": b} for p, a, b in rows]},
            {"norms": _csv(["p", "input", "symmetrized"], rows)}, {cfg["output_grid"]: us})


def _run_polarize(cfg, base, rng):
    u = _grid_input(cfg, base, rng)
    nus = [make_psi(s, base) for s in cfg["nu_list"]]
    run = schaftingen_run(u, cfg["strategy"], seed=cfg["seed"], max_iter=cfg["max_iter"],
                          p_list=cfg["p_list"], nu_list=nus)
    report = run.summary()
    if not run.terminal_fixed_point:
        raise NonConvergence(f"no family fixed point after {run.iterations} iterations", report,
                             {"trace": run.to_csv()})
    return report, {"trace": run.to_csv()}


def _run_theorem1(cfg, base, rng):
    kind = cfg["sequence"]
    if kind == "remark2":
        seq = FunctionSequence.remark2_truncated_gaussian()
    elif kind == "remark1":
        seq = FunctionSequence.remark1(make_function(cfg["f"], base))
    else:
        raise ConfigError(f"unknown sequence {kind!r}; use remark1 or remark2")
    rep = theorem1_certify(seq, make_psi(cfg["psi"], base), make_psi(cfg["nu"], base), p_probes=cfg["probes"],
                           tol=cfg["tol"], eps=cfg["eps"], n_max=cfg["n_max"], passes=cfg["passes"],
                           measure_probes=cfg["measure_probes"])
    return rep.to_dict(), {"condition1": rep.condition1_csv(), "condition2": rep.condition2_csv(),
                           "extraction": rep.extraction_csv()}


def _run_theorem2(cfg, base, rng):
    rep, ega = theorem2_certify(_family(cfg, base), make_psi(cfg["psi"], base), p_probes=cfg["probes"],
                                deltas=cfg["deltas"], tol=cfg["tol"], eps=cfg["eps"], floor_tol=cfg["floor_tol"])
    return rep.to_dict(), {"condition2": rep.condition2_csv(),
                           "ega": _csv(["delta", "eta", "reference"],
                                       zip(ega.deltas, ega.etas, rep.ega["reference_indicator"]))}


def _run_remark1(cfg, base, rng):
    d = remark_demos("remark1", make_psi(cfg["psi"], base), make_function(cfg["f"], base),
                     n_values=range(1, cfg["n_max"] + 1))
    rows = [(r["n"], r["measured"], r["expected"], r["rel_error"]) for r in d["rows"]]
    return d, {"identity": _csv(["n", "measured", "norm_over_n_plus_1", "rel_error"], rows)}


def _run_remark2(cfg, base, rng):
    d = remark_demos("remark2", make_psi(cfg["psi"], base), n_values=range(0, cfg["n_max"] + 1),
                     probes=cfg["probes"], nu=make_psi(cfg["nu"], base), method=cfg["method"])
    rows = zip(d["n_values"], d["truncated_norms"], d["gap_norms"], d["stronger_norm"]["gap_norms"])
    return d, {"norms": _csv(["n", "truncated_norm", "gap_norm", "gap_norm_stronger"], rows)}


def _run_polya_szego(cfg, base, rng):
    u = _grid_input(cfg, base, rng)
    us = schwarz_symmetrize(u)
    rows = [(p, gradient_seminorm(u, p), gradient_seminorm(us, p)) for p in cfg["p_list"]]
    report = {"dims": list(u.partition.dims),
              "rows": [{"p": p, "input": a, "symmetrized": b, "holds": b <= a * (1 + 1e-12)} for p, a, b in rows]}
    return report, {"gradients": _csv(["p", "input", "symmetrized"], rows)}


_RUNNERS = {
    "norm": _run_norm, "g0": _run_g0, "ega": _run_ega, "symmetrize": _run_symmetrize,
    "polarize_run": _run_polarize, "theorem1": _run_theorem1, "theorem2": _run_theorem2,
    "remark1": _run_remark1, "remark2": _run_remark2, "polya_szego": _run_polya_szego,
}


def run_experiment(cfg: dict, base: Path = Path(".")) -> tuple[int, dict]:
    """Run one experiment, write its outputs, and return ``(exit status, report)``."""
    out = Path(cfg["output_dir"])
    name = cfg["experiment"]
    env = {"GLSKIT_THREADS": os.environ.get("GLSKIT_THREADS")}
    rng = np.random.default_rng(cfg["seed"])
    envelope = {"experiment": name, "seed": cfg["seed"], "config": cfg, "environment": env,
                "version": __version__}
    status = EXIT_OK
    tables: dict[str, str] = {}
    grids: dict = {}
    try:
        result = _RUNNERS[name](cfg, base, rng)
        report, tables = result[0], result[1]
        if len(result) > 2:
            grids = result[2]
        envelope.update(status="ok", result=report)
    except NonConvergence as exc:
        msg, report, tables = exc.args
        status = EXIT_NUMERIC
        envelope.update(status="error", error={"type": "NonConvergence", "message": msg}, result=report)
    except QuadratureError as exc:
        status = EXIT_NUMERIC
        envelope.update(status="error", error={"type": "QuadratureError", "message": str(exc)})
    except (ValueError, TypeError, OSError, KeyError) as exc:
        status = EXIT_INVALID
        envelope.update(status="error", error={"type": type(exc).__name__, "message": str(exc)})
    _atomic_write(out / f"{name}.json", json.dumps(_jsonable(envelope), indent=2) + "\n")
    for leg, text in tables.items():
        _atomic_write(out / f"{name}_{leg}.csv", text)
    for fname, g in grids.items():
        fd, tmp = tempfile.mkstemp(dir=out, suffix=".tmp")
        os.close(fd)
        write_gridfn(tmp, g)
        os.replace(tmp, out / fname)
    return status, envelope


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="glskit", description="Bilateral grand Lebesgue space experiments")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="flat key = value config file")
    ap.add_argument("--out", help="output directory (overrides output_dir)")
    ap.add_argument("--seed", type=int, help="unsigned 64-bit seed (overrides seed)")
    args = ap.parse_args(argv)
    path = Path(args.config)
    try:
        text = path.read_text()
        cfg = parse_config(text, args.experiment)
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ConfigError("seed must be an unsigned 64-bit integer")
            cfg["seed"] = args.seed
        if args.out:
            cfg["output_dir"] = args.out
    except (OSError, ConfigError) as exc:
        print(json.dumps({"status": "error", "error": {"type": type(exc).__name__, "message": str(exc)}}),
              file=sys.stderr)
        return EXIT_INVALID
    status, env = run_experiment(cfg, base=path.parent)
    if status != EXIT_OK:
        print(json.dumps({"status": "error", "error": env["error"]}), file=sys.stderr)
    else:
        print(str(Path(cfg["output_dir"]) / f"{args.experiment}.json"))
    return status


if __name__ == "__main__":
    sys.exit(main())
