"""Command line front end: gen, svd, diagnose, solve-pde.

Every run writes a manifest.json into the output directory recording the
command, resolved configuration, inputs, outputs, seed and wall time; handled
failures still write the manifest with an ``error`` field and exit nonzero.
Numerical non-convergence is data, not an error: it lands in the CSV outputs
and the exit code stays 0.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import pielm
from .benchgen import HardMatrixSpec, gen_hard, gen_random_sparse, write_sidecar
from .bidiag import golub_kahan, write_trace_csv
from .mmio import read_matrix_market, write_matrix_market
from .sparse import diagnose, sparsify, write_diagnostics_csv
from .svd import (
    SvdConfig,
    apply_truncated_pinv,
    ritz_from_bidiag,
    sparse_svd,
    sweep_start_vector,
    write_solve_report_csv,
    write_spectrum_csv,
)


def _read_flat_config(path) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment, blank lines are skipped."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def _resolve(flag_value, config: dict, key: str, default, cast):
    if flag_value is not None:
        return flag_value
    if key in config:
        raw = config[key]
        if cast is bool:
            return raw.lower() in ("1", "true", "yes", "on")
        return cast(raw)
    return default


# -- subcommand bodies --------------------------------------------------------


def _cmd_gen(args, out_dir: Path, config: dict) -> tuple[dict, list, list]:
    out_path = out_dir / args.output
    if args.kind == "hard":
        spec = HardMatrixSpec(
            m=args.m, n=args.n, rank=args.rank, eps=args.eps, rho=args.rho, seed=args.seed
        )
        A = gen_hard(spec)
        fields = spec.fields()
    else:
        A = gen_random_sparse(args.m, args.n, args.density, seed=args.seed)
        fields = {
            "kind": "random",
            "m": args.m,
            "n": args.n,
            "density": args.density,
            "seed": args.seed,
        }
    write_matrix_market(A, out_path)
    sidecar = Path(str(out_path) + ".spec")
    write_sidecar(sidecar, fields)
    resolved = dict(fields)
    resolved["nnz"] = A.nnz
    return resolved, [], [str(out_path), str(sidecar)]


def _cmd_svd(args, out_dir: Path, config: dict) -> tuple[dict, list, list]:
    A = read_matrix_market(args.input)
    kmax = min(A.shape)
    k = min(args.k, kmax)
    cfg = SvdConfig(
        k=k,
        num_wanted=min(args.num_wanted, kmax) if args.num_wanted is not None else None,
        conv_tol=args.conv_tol,
        max_restarts=args.restarts,
        mode=args.ortho,
    )
    outputs = []
    if args.trace or args.dump_gram:
        v1 = sweep_start_vector(A.ncols, args.seed)
        fact = golub_kahan(A, v1, k, mode=cfg.mode, collect_trace=bool(args.trace))
        if args.trace:
            trace_path = out_dir / args.trace
            write_trace_csv(fact, trace_path)
            outputs.append(str(trace_path))
        if args.dump_gram:
            for name, Q in (("uu", fact.U), ("vv", fact.V)):
                gram_path = out_dir / f"{args.dump_gram}_{name}.mtx"
                write_matrix_market(sparsify(Q.T @ Q, 0.0), gram_path)
                outputs.append(str(gram_path))
        if cfg.max_restarts == 0:
            t = ritz_from_bidiag(fact, conv_tol=cfg.conv_tol)
        else:
            t = sparse_svd(A, cfg, seed=args.seed)
    else:
        t = sparse_svd(A, cfg, seed=args.seed)
    spectrum_path = out_dir / args.spectrum
    write_spectrum_csv(t, spectrum_path)
    outputs.append(str(spectrum_path))
    resolved = {
        "k": k,
        "num_wanted": cfg.wanted,
        "ortho": str(cfg.mode.value),
        "conv_tol": cfg.conv_tol,
        "max_restarts": cfg.max_restarts,
        "num_converged": t.num_converged,
        "num_triplets": len(t),
    }
    return resolved, [str(args.input)], outputs


def _cmd_diagnose(args, out_dir: Path, config: dict) -> tuple[dict, list, list]:
    A = read_matrix_market(args.input)
    diag = diagnose(A, rank_tol=args.rank_tol)
    out_path = out_dir / args.output
    write_diagnostics_csv(diag, out_path)
    resolved = {"rank_tol": args.rank_tol}
    resolved.update({k: v for k, v in diag.rows()})
    return resolved, [str(args.input)], [str(out_path)]


def _cmd_solve_pde(args, out_dir: Path, config: dict) -> tuple[dict, list, list]:
    pe = _resolve(args.pe, config, "pe", -1000.0, float)
    length = _resolve(args.length, config, "L", 1.0, float)
    nodes = _resolve(args.nodes, config, "nodes", 512, int)
    collocations = _resolve(args.collocations, config, "collocations", 2 * nodes, int)
    width = _resolve(args.width, config, "width", 1e-4, float)
    drop_tol = _resolve(args.drop_tol, config, "drop_tol", 1e-14, float)
    seed = _resolve(args.seed if args.seed_given else None, config, "seed", 0, int)
    phi0 = _resolve(args.phi0, config, "phi0", 0.0, float)
    phiL = _resolve(args.phiL, config, "phiL", 1.0, float)
    shuffle = _resolve(args.shuffle, config, "shuffle", False, bool)
    grid_n = _resolve(args.grid, config, "grid", 10000, int)
    svd_k = _resolve(args.svd_k, config, "svd.k", None, int)
    trunc_eps = _resolve(args.trunc_eps, config, "svd.trunc_eps", 1e-12, float)
    mode = _resolve(args.ortho, config, "svd.mode", "full", str)
    restarts = _resolve(args.restarts, config, "svd.max_restarts", 1, int)
    conv_tol = _resolve(args.conv_tol, config, "svd.conv_tol", 1e-10, float)

    problem = pielm.make_problem(
        pe, collocations, length=length, phi0=phi0, phiL=phiL, shuffle=shuffle, seed=seed
    )
    model = pielm.init_model(nodes, width, seed=seed, domain_length=length)
    kmax = min(collocations + 2, nodes)
    k = kmax if svd_k is None else min(svd_k, kmax)
    cfg = SvdConfig(
        k=k, conv_tol=conv_tol, max_restarts=restarts, mode=mode, trunc_eps=trunc_eps
    )
    trained, report = pielm.train(model, problem, cfg, drop_tol=drop_tol, seed=seed)

    grid = np.linspace(0.0, length, grid_n)
    metrics = pielm.error_metrics(trained, problem, grid)

    outputs = []
    solution_path = out_dir / "solution.csv"
    pielm.write_solution_csv(trained, problem, grid, solution_path)
    outputs.append(str(solution_path))
    report_path = out_dir / "solve_report.csv"
    write_solve_report_csv(report.solve, report_path)
    outputs.append(str(report_path))
    diag_path = out_dir / "diagnostics.csv"
    write_diagnostics_csv(report.diagnostics, diag_path)
    outputs.append(str(diag_path))
    errors_path = out_dir / "errors.csv"
    with open(errors_path, "w", newline="") as fh:
        fh.write("metric,value\n")
        for key, val in metrics.items():
            fh.write(f"{key},{val!r}\n")
    outputs.append(str(errors_path))
    if args.dump_system:
        system = pielm.assemble(model, problem, drop_tol)
        sys_path = out_dir / args.dump_system
        write_matrix_market(system.H, sys_path)
        outputs.append(str(sys_path))

    resolved = {
        "pe": pe,
        "L": length,
        "nodes": nodes,
        "collocations": collocations,
        "width": width,
        "drop_tol": drop_tol,
        "seed": seed,
        "phi0": phi0,
        "phiL": phiL,
        "shuffle": shuffle,
        "grid": grid_n,
        "svd.k": k,
        "svd.trunc_eps": trunc_eps,
        "svd.mode": str(cfg.mode.value),
        "svd.max_restarts": restarts,
        "svd.conv_tol": conv_tol,
        "l2_rel": metrics["l2_rel"],
        "linf": metrics["linf"],
        "boundary_err": metrics["boundary_err"],
        "retained": report.solve.retained,
        "residual_norm": report.solve.residual_norm,
    }
    return resolved, [], outputs


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-pielm",
        description="Sparse SVD, matrix diagnostics and random-feature PDE solves",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for every random draw")
    parser.add_argument("--out-dir", default=".", help="directory for outputs and manifest")
    parser.add_argument("--config", default=None, help="flat key=value config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a benchmark matrix")
    p.add_argument("--kind", choices=("hard", "random"), default="hard")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank", type=int, default=100, help="rank of the clean part (hard)")
    p.add_argument("--eps", type=float, default=1e-3, help="noise scale (hard)")
    p.add_argument("--rho", type=float, default=0.01, help="noise fill (hard)")
    p.add_argument("--density", type=float, default=0.01, help="fill fraction (random)")
    p.add_argument("-o", "--output", default="matrix.mtx", help="file name inside --out-dir")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("svd", help="singular spectrum of a Matrix Market file")
    p.add_argument("input")
    p.add_argument("--k", type=int, default=100, help="subspace size per sweep")
    p.add_argument("--num-wanted", type=int, default=None)
    p.add_argument("--ortho", choices=("none", "full", "one-sided"), default="full")
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--conv-tol", type=float, default=1e-10)
    p.add_argument("--spectrum", default="spectrum.csv", help="output file name")
    p.add_argument("--trace", default=None, help="also write per-iteration trace CSV")
    p.add_argument("--dump-gram", default=None, help="prefix for U^T U / V^T V dumps")
    p.set_defaults(func=_cmd_svd)

    p = sub.add_parser("diagnose", help="shape, sparsity and spectrum summary")
    p.add_argument("input")
    p.add_argument("--rank-tol", type=float, default=1e-12)
    p.add_argument("-o", "--output", default="diagnostics.csv")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("solve-pde", help="solve steady convection-diffusion")
    p.add_argument("--pe", type=float, default=None)
    p.add_argument("--length", type=float, default=None)
    p.add_argument("--nodes", type=int, default=None, help="hidden units (L+1)")
    p.add_argument("--collocations", type=int, default=None)
    p.add_argument("--width", type=float, default=None, help="Gaussian window width d")
    p.add_argument("--drop-tol", type=float, default=None)
    p.add_argument("--phi0", type=float, default=None)
    p.add_argument("--phiL", type=float, default=None)
    p.add_argument("--shuffle", action="store_const", const=True, default=None)
    p.add_argument("--grid", type=int, default=None, help="evaluation grid size")
    p.add_argument("--svd-k", type=int, default=None)
    p.add_argument("--trunc-eps", type=float, default=None)
    p.add_argument("--ortho", choices=("none", "full", "one-sided"), default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--conv-tol", type=float, default=None)
    p.add_argument("--dump-system", default=None, help="also write H as Matrix Market")
    p.set_defaults(func=_cmd_solve_pde)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": args.command,
        "seed": args.seed,
        "config": {},
        "input_paths": [],
        "output_paths": [],
        "wall_time_s": 0.0,
    }
    t0 = time.perf_counter()
    try:
        config = _read_flat_config(args.config) if args.config else {}
        resolved, inputs, outputs = args.func(args, out_dir, config)
        manifest["config"] = resolved
        manifest["input_paths"] = inputs
        manifest["output_paths"] = outputs
    except (OSError, ValueError) as exc:
        manifest["error"] = str(exc)
        manifest["wall_time_s"] = time.perf_counter() - t0
        with open(out_dir / "manifest.json", "w") as fh:
            json.dump(manifest, fh, indent=2)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    manifest["wall_time_s"] = time.perf_counter() - t0
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
