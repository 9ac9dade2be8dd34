"""Command-line interface: ``lvglasso {simulate,fit,path,roc}``.

Exit codes: 0 success, 1 input error, 2 numerical failure, 3 I/O error.
"""
import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
from scipy import linalg

from . import __version__, em, evaluate, files, simgen
from ._backend import BACKEND

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("lvglasso")


class NumericalFailure(Exception):
    pass


def parse_grid(text):
    """``min,max,count[,log|lin]`` -> descending array of penalties."""
    parts = [s.strip() for s in text.split(",")]
    if len(parts) not in (3, 4):
        raise argparse.ArgumentTypeError("expected min,max,count[,log|lin]")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad numbers in grid {text!r}") from None
    spacing = parts[3] if len(parts) == 4 else "log"
    if spacing not in ("log", "lin"):
        raise argparse.ArgumentTypeError("grid spacing must be 'log' or 'lin'")
    if count < 1 or lo < 0 or hi < lo or (count > 1 and hi == lo):
        raise argparse.ArgumentTypeError("need 0 <= min < max and count >= 1")
    if spacing == "log" and lo <= 0:
        raise argparse.ArgumentTypeError("log grid needs min > 0")
    if count == 1:
        return np.array([hi])
    grid = np.geomspace(hi, lo, count) if spacing == "log" else np.linspace(hi, lo, count)
    return grid


def _nonneg_float(text):
    x = float(text)
    if x < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return x


def _pos_int(text):
    x = int(text)
    if x < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def build_parser():
    ap = argparse.ArgumentParser(prog="lvglasso", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    sim = argparse.ArgumentParser(add_help=False)
    sim.add_argument("--p", type=int, default=198, help="observed variables")
    sim.add_argument("--h", type=int, default=2, help="latent variables")
    sim.add_argument("--n", type=int, default=1000, help="sample size")
    sim.add_argument("--seed", type=int, default=0)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--r", type=int, default=2, help="latent rank bound")
    model.add_argument("--em-tol", type=float, default=1e-5)
    model.add_argument("--em-max-iter", type=_pos_int, default=200)
    model.add_argument("--glasso-tol", type=float, default=1e-6)
    model.add_argument("--init-seed", type=int, default=0)
    model.add_argument("--ridge", type=float, default=1e-2)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--lambda-grid", type=parse_grid, default=None, metavar="MIN,MAX,COUNT[,log]",
                      help="default: 40 log-spaced values from 0.5*max|offdiag| down 1000-fold")
    grid.add_argument("--zero-tol", type=_nonneg_float, default=evaluate.DEFAULT_ZERO_TOL)

    io = argparse.ArgumentParser(add_help=False)
    io.add_argument("--out-dir", type=Path, required=True)

    inp = argparse.ArgumentParser(add_help=False)
    inp.add_argument("--in", dest="input", type=Path,
                     help="covariance CSV, or a directory holding sigma_o_n.csv")

    sub.add_parser("simulate", parents=[sim, io], help="draw a synthetic model and dataset")
    f = sub.add_parser("fit", parents=[model, inp, io], help="fit one penalty")
    f.add_argument("--lambda", dest="lam", type=_nonneg_float, required=True)
    sub.add_parser("path", parents=[model, grid, inp, io], help="fit a warm-started penalty grid")
    roc = sub.add_parser("roc", parents=[sim, model, grid, inp, io],
                         help="ROC of support recovery against a known model")
    roc.add_argument("--compare-glasso", action="store_true",
                     help="also run the r=0 path and report both AUCs")
    roc.add_argument("--svg", action="store_true", help="also write roc.svg")
    return ap


def _em_config(args, lam=0.0, r=None):
    return em.EmConfig(
        r=args.r if r is None else r, lam=lam, em_tol=args.em_tol,
        em_max_iter=args.em_max_iter, glasso_tol=args.glasso_tol,
        init_seed=args.init_seed, ridge=args.ridge,
    )


def _metadata(args, **extra):
    cfg = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in vars(args).items()}
    return {"version": __version__, "backend": BACKEND, "config": cfg, **extra}


def _sigma_path(p):
    if p is None:
        raise ValueError("--in is required")
    return p / "sigma_o_n.csv" if p.is_dir() else p


def _load_sigma(args):
    path = _sigma_path(args.input)
    if not path.exists():
        raise FileNotFoundError(f"input not found: {path}")
    return files.read_sym_matrix(path)


def _prepare_out(args):
    args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.input is not None and args.input.resolve() == args.out_dir.resolve() and args.command != "roc":
        raise ValueError("--in and --out-dir must differ")


def cmd_simulate(args):
    if args.p < 2 or args.h < 0 or args.n < 2:
        raise ValueError("need p >= 2, h >= 0, n >= 2")
    args.out_dir.mkdir(parents=True, exist_ok=True)
    model, data, seeds = simgen.simulate(args.p, args.h, args.n, args.seed)
    out = args.out_dir
    files.write_matrix(out / "K_true.csv", model.K_true)
    files.write_edges(out / "edges.csv", model.true_edges)
    files.write_matrix(out / "locations.csv", model.locations)
    files.write_matrix(out / "X.csv", data.X)
    files.write_matrix(out / "sigma_o_n.csv", data.sigma_o_n)
    files.write_json(out / "metadata.json", _metadata(
        args, seeds=seeds, diag_value=model.diag_value, n_edges=len(model.true_edges),
    ))
    print(f"wrote model p={args.p} h={args.h} ({len(model.true_edges)} edges, "
          f"diag {model.diag_value}) and n={args.n} samples to {out}")
    return EXIT_OK


def _fit_summary(f):
    return {
        "lambda": f.lam,
        "objective": f.objective,
        "objective_trace": f.observed_objective_trace,
        "iterations": f.iterations,
        "converged": f.converged,
        "rank_L": em.numerical_rank(f.L_hat),
    }


def cmd_fit(args):
    _prepare_out(args)
    sigma = _load_sigma(args)
    cfg = _em_config(args, lam=args.lam)
    f = em.fit(sigma, cfg)
    out = args.out_dir
    files.write_matrix(out / "S_hat.csv", f.S_hat)
    files.write_matrix(out / "L_hat.csv", f.L_hat)
    files.write_matrix(out / "K_hat.csv", f.partition.K)
    files.write_json(out / "report.json", _metadata(args, em_config=asdict(cfg), **_fit_summary(f)))
    print(f"objective {f.objective:.10g} after {f.iterations} EM iterations "
          f"(converged={f.converged}, rank(L)={em.numerical_rank(f.L_hat)})")
    if not f.converged:
        raise NumericalFailure("EM did not converge; results written anyway")
    return EXIT_OK


def _grid(args, sigma):
    return args.lambda_grid if args.lambda_grid is not None else em.default_lambda_grid(sigma)


def cmd_path(args):
    _prepare_out(args)
    sigma = _load_sigma(args)
    lambdas = _grid(args, sigma)
    fits = em.lambda_path(sigma, lambdas, _em_config(args))
    rows, supports = [], []
    for lam, f in zip(lambdas, fits):
        if f is None:
            rows.append({"lambda": float(lam), "failed": True})
            supports.append(None)
            continue
        edges = evaluate.support(f.S_hat, args.zero_tol).edges
        s = _fit_summary(f)
        s.pop("objective_trace")
        s["n_edges"] = len(edges)
        rows.append(s)
        supports.append(sorted(edges))
    files.write_json(args.out_dir / "path.json", _metadata(args, lambdas=lambdas, fits=rows, supports=supports))
    n_bad = sum(f is None for f in fits)
    print(f"fitted {len(fits) - n_bad}/{len(fits)} penalties; "
          f"{sum(1 for f in fits if f is not None and not f.converged)} not converged")
    if n_bad == len(fits):
        raise NumericalFailure("every fit on the path failed")
    return EXIT_OK


def _roc_inputs(args):
    if args.input is not None:
        d = args.input
        if not d.is_dir():
            raise ValueError("roc --in expects a directory written by 'simulate'")
        sigma = files.read_sym_matrix(d / "sigma_o_n.csv")
        edges = files.read_edges(d / "edges.csv")
        return sigma, evaluate.EdgeSet(sigma.shape[0], frozenset(edges)), None
    if args.p < 2 or args.h < 0 or args.n < 2:
        raise ValueError("need p >= 2, h >= 0, n >= 2")
    model, data, seeds = simgen.simulate(args.p, args.h, args.n, args.seed)
    return data.sigma_o_n, evaluate.EdgeSet(args.p, frozenset(model.true_edges)), seeds


def cmd_roc(args):
    args.out_dir.mkdir(parents=True, exist_ok=True)
    sigma, truth, seeds = _roc_inputs(args)
    lambdas = _grid(args, sigma)
    ranks = {"lvglasso": args.r}
    if args.compare_glasso:
        ranks["glasso"] = 0
    curves, report = {}, {}
    for name, r in ranks.items():
        fits = em.lambda_path(sigma, lambdas, _em_config(args, r=r))
        if all(f is None for f in fits):
            raise NumericalFailure(f"every {name} fit failed")
        series = evaluate.roc(fits, truth, args.zero_tol, lambdas=lambdas)
        best = evaluate.closest_to_truth(fits, truth, args.zero_tol, lambdas=lambdas)
        curves[name] = series
        files.write_roc(args.out_dir / f"roc_{name}.csv", series)
        report[name] = {
            "r": r,
            "auc": series.auc,
            "closest_index": best,
            "closest_lambda": float(lambdas[best]),
            "closest_edges": sorted(evaluate.support(fits[best].S_hat, args.zero_tol).edges),
        }
        print(f"{name} (r={r}) AUC {series.auc:.6f}")
    if args.svg:
        files.write_roc_svg(args.out_dir / "roc.svg", curves)
    files.write_json(args.out_dir / "metadata.json", _metadata(args, seeds=seeds, lambdas=lambdas, results=report))
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "path": cmd_path, "roc": cmd_roc}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
