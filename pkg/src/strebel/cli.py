"""Command-line front end.

Exit codes: 0 success, 1 domain or validation failure, 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import asymptotics as asy
from .errors import DomainError, SpecParseError, StrebelError, ValidationError
from .oracle import annulus_modulus, quad_modulus
from .qc_maps import assemble_F, build_F, choose_X, dilatation_P, h_dilatation_sup, threshold_time
from .scenario import check_grid, load_domain, load_pair, load_params, parse_grid, to_csv
from .surface import CylinderDecomposition, NotSimilar, validate_decomposition

log = logging.getLogger("strebel")

EXIT_OK, EXIT_DOMAIN, EXIT_IO = 0, 1, 2


@dataclass
class Scenario:
    command: str
    inputs: list[str]
    grid: list[float] | None
    out: str | None
    fmt: str
    resolution: int | None
    seed: int


def _sweep(fn, grid):
    # rows come back in grid order whatever the execution order
    with ThreadPoolExecutor() as pool:
        return list(pool.map(fn, grid))


def _emit(sc: Scenario, header, rows, extra: dict | None = None) -> None:
    if sc.fmt == "json":
        doc = {"columns": list(header), "rows": [list(r) for r in rows]}
        doc.update(extra or {})
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = to_csv(header, rows)
    _write(sc, text)
    if extra and sc.fmt != "json":
        for k, v in extra.items():
            print(f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}", file=sys.stderr)


def _write(sc: Scenario, text: str) -> None:
    if sc.out:
        Path(sc.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_validate(sc: Scenario) -> int:
    spec = CylinderDecomposition.load(sc.inputs[0])
    rep = validate_decomposition(spec)
    _write(sc, json.dumps(rep.to_dict(), indent=2) + "\n")
    return EXIT_OK if rep.valid else EXIT_DOMAIN


def _grid(sc: Scenario, from_file, name, **kw) -> list[float]:
    g = sc.grid if sc.grid is not None else from_file
    if g is None:
        raise SpecParseError(f"no {name} grid given (flag or scenario file)")
    return check_grid(g, name, **kw)


def cmd_distance(sc: Scenario) -> int:
    ps = load_pair(sc.inputs[0])
    header = ("t", "lower_bound", "K_F_t_upper", "theorem_value")
    pair = ps.pair()
    if isinstance(pair, NotSimilar):
        log.info("rays are not similar: %s", pair.reason)
        _emit(sc, header, [("divergent",)])
        return EXIT_OK
    ts = _grid(sc, ps.t_grid, "t", nonnegative=True)
    limit = asy.asymptotic_distance(pair).value
    lower = asy.lower_bound(pair)
    params = ps.interpolation_params(pair)

    def row(t):
        try:
            upper = assemble_F(params, t).half_log_K
        except DomainError as exc:
            log.warning("t=%g: %s", t, exc)
            upper = math.nan
        return (t, lower, upper, limit)

    _emit(sc, header, _sweep(row, ts))
    return EXIT_OK


def cmd_shift(sc: Scenario) -> int:
    ps = load_pair(sc.inputs[0])
    pair = ps.pair()
    header = ("alpha", "shifted_value")
    if isinstance(pair, NotSimilar):
        _emit(sc, header, [("divergent",)])
        return EXIT_OK
    alphas = _grid(sc, ps.alpha_grid, "alpha")
    rows = _sweep(lambda a: (a, asy.shifted_asymptotic_distance(pair, a).value), alphas)
    extra = {
        "alpha_star": asy.optimal_shift(pair),
        "min_value": asy.minimal_shifted_distance(pair),
        "grid_min": min(r[1] for r in rows),
    }
    _emit(sc, header, rows, extra)
    return EXIT_OK


def cmd_qc_sweep(sc: Scenario, mode: str) -> int:
    scen = load_params(sc.inputs[0])
    if mode == "eps":
        eps_grid = _grid(sc, scen.eps_grid, "eps")
        if any(not 0 < e < 1 for e in eps_grid):
            raise DomainError("eps values must lie in (0, 1)")
        M = max(max(p.M, 1 / p.M) for p in scen.annuli)

        def row(e):
            if M > 1:
                X = choose_X(M, e)
                k_lim = (M - M**X) / (1 - M**X)
            else:
                X, k_lim = math.nan, 1.0
            return (e, X, k_lim, h_dilatation_sup(e))

        _emit(sc, ("eps", "X", "K_P_limit", "K_H"), _sweep(row, eps_grid))
        return EXIT_OK

    ts = _grid(sc, scen.t_grid, "t", nonnegative=True)

    def row(t):
        asm = assemble_F(scen.annuli, t)
        return (
            t,
            max(r.K_P for r in asm.pieces),
            max(r.K_Q for r in asm.pieces),
            max(r.K_h for r in asm.pieces),
            asm.K,
        )

    rows = _sweep(row, ts)
    extra = None
    if sc.fmt == "json":
        import numpy as np

        rng = np.random.default_rng(sc.seed)
        seams = []
        for t in ts:
            worst = math.nan
            try:
                worst = max(max(build_F(p.oriented(), t).seam_mismatch(1000, rng).values()) for p in scen.annuli)
            except DomainError:
                pass
            seams.append(worst)
        extra = {
            "seam_mismatch": seams,
            "threshold_time": [threshold_time(p.oriented()) for p in scen.annuli],
            "K_P_limit": [dilatation_P(p.oriented(), 0.0).limit for p in scen.annuli],
        }
    _emit(sc, ("t", "K_P", "K_Q_sup", "K_h", "K_F"), rows, extra)
    return EXIT_OK


def cmd_oracle(sc: Scenario) -> int:
    dom = load_domain(sc.inputs[0], sc.resolution)
    if dom.kind == "quadrilateral":
        doc = quad_modulus(dom).to_dict()
    else:
        doc = annulus_modulus(dom.r_in, dom.resolution, dom.r_out).to_dict()
    doc["kind"] = dom.kind
    _write(sc, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the table to this path instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")
    common.add_argument("--resolution", type=int, default=None, help="grid resolution for the modulus oracle")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")

    p = argparse.ArgumentParser(prog="strebel", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="validate a surface file")
    s.add_argument("path")
    s = sub.add_parser("distance", parents=[common], help="sweep t: bounds and limit of d(r(t), r'(t))")
    s.add_argument("pair")
    s.add_argument("--t", dest="grid", type=parse_grid, help="t grid, start:stop:step or comma list")
    s = sub.add_parser("shift", parents=[common], help="sweep the base-point shift alpha")
    s.add_argument("pair")
    s.add_argument("--alpha", dest="grid", type=parse_grid, help="alpha grid, start:stop:step or comma list")
    s = sub.add_parser("qc-sweep", parents=[common], help="dilatations of the comparison maps")
    s.add_argument("params")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--t", dest="grid", type=parse_grid)
    g.add_argument("--eps", dest="eps_grid", type=parse_grid)
    s = sub.add_parser("oracle", parents=[common], help="discrete conformal modulus of a grid domain")
    s.add_argument("domain")
    return p


def _configure_logging() -> None:
    level = os.environ.get("STREBEL_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    inputs = [getattr(args, k) for k in ("path", "pair", "params", "domain") if hasattr(args, k)]
    sc = Scenario(args.command, inputs, getattr(args, "grid", None), args.out, args.fmt, args.resolution, args.seed)
    try:
        if args.command == "validate":
            return cmd_validate(sc)
        if args.command == "distance":
            return cmd_distance(sc)
        if args.command == "shift":
            return cmd_shift(sc)
        if args.command == "qc-sweep":
            if args.eps_grid is not None:
                sc.grid = args.eps_grid
                return cmd_qc_sweep(sc, "eps")
            scen_has_eps = sc.grid is None and load_params(sc.inputs[0]).t_grid is None
            return cmd_qc_sweep(sc, "eps" if scen_has_eps else "t")
        if args.command == "oracle":
            return cmd_oracle(sc)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(json.dumps(exc.report.to_dict(), indent=2), file=sys.stderr)
        return EXIT_DOMAIN
    except (StrebelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
