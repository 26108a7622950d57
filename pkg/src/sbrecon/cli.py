"""Command line front end.

Subcommands::

    sbrecon phantom NAME --n 128 --out phantom.raw
    sbrecon reconstruct --config run.ini --out outdir
    sbrecon compare --config a.ini --config b.ini --out outdir
    sbrecon oracle --config run.ini [--reference ref.raw] --out outdir

Exit codes: 0 success, 1 configuration error, 2 numerical abort.
"""

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import fft, kernels
from .config import ConfigError, load_config
from .io import read_raw, write_raw
from .phantoms import PHANTOMS, make_phantom
from .solver import NumericalAbort, oracle_schedule
from .reweighting import WeightSchedule

log = logging.getLogger("sbrecon")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def _save_preview(path, u):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    img = np.abs(u) if np.iscomplexobj(u) else u
    plt.imsave(path, np.clip(img, 0.0, 1.0), cmap="gray", vmin=0.0, vmax=1.0)


def _write_summary(path, pairs):
    with open(path, "w") as fh:
        for k, v in pairs:
            fh.write(f"{k}={v}\n")


def read_summary(path):
    out = {}
    with open(path) as fh:
        for line in fh:
            if "=" in line:
                k, v = line.rstrip("\n").split("=", 1)
                out[k] = v
    return out


def _write_run(out_dir, cfg, result):
    os.makedirs(out_dir, exist_ok=True)
    write_raw(os.path.join(out_dir, "rec.raw"), result.u)
    _save_preview(os.path.join(out_dir, "rec.png"), result.u)
    result.log.to_csv(os.path.join(out_dir, "log.csv"))
    _write_summary(
        os.path.join(out_dir, "summary.txt"),
        [
            ("name", cfg.name),
            ("kind", cfg.kind),
            ("n", cfg.n),
            ("method", cfg.method),
            ("reweight", cfg.solver.reweight),
            ("iterations", len(result.log)),
            ("re", f"{result.re:.10f}"),
            ("ssim", f"{result.ssim:.10f}"),
            ("residual", f"{result.residual:.6e}"),
            ("seconds", f"{result.seconds:.3f}"),
            ("backend", kernels.BACKEND),
        ],
    )


def _out_dir(args, cfg):
    return args.out or cfg.out_dir or "out"


def _configure(args):
    fft.set_threads(1 if args.test_mode else args.threads)
    if args.test_mode:
        # no threaded reductions anywhere: keeps reruns bit identical
        os.environ.setdefault("OMP_NUM_THREADS", "1")


def _apply_seed(cfg, args):
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def cmd_phantom(args):
    if args.name not in PHANTOMS:
        raise ConfigError(f"unknown phantom {args.name!r}; choose from {sorted(PHANTOMS)}")
    if args.n < 32:
        raise ConfigError("phantom side must be >= 32")
    img = make_phantom(args.name, args.n)
    out = args.out or f"{args.name}-{args.n}.raw"
    write_raw(out, img)
    if args.preview:
        _save_preview(os.path.splitext(out)[0] + ".png", img)
    print(out)
    return EXIT_OK


def cmd_reconstruct(args):
    from .experiment import run

    if len(args.config) != 1:
        raise ConfigError("reconstruct takes exactly one --config")
    cfg = _apply_seed(load_config(args.config[0]), args)
    result = run(cfg)
    out = _out_dir(args, cfg)
    _write_run(out, cfg, result)
    print(f"{cfg.name}: RE={result.re:.6f} SSIM={result.ssim:.6f} time={result.seconds:.1f}s")
    return EXIT_OK


def _plot_logs(path, named_logs):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    for name, lg in named_logs:
        ax1.semilogy(lg.iteration, lg.re, label=name)
        ax2.plot(lg.iteration, lg.ssim, label=name)
    ax1.set_xlabel("iteration")
    ax1.set_ylabel("relative error")
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("SSIM")
    ax1.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def cmd_compare(args):
    from .experiment import build_problem, run

    paths = list(args.config) + list(args.configs)
    if len(paths) < 2:
        raise ConfigError("compare needs at least two configs")
    cfgs = [_apply_seed(load_config(p), args) for p in paths]
    keys = {c.setup_key() for c in cfgs}
    if len(keys) != 1:
        raise ConfigError("configs do not share the same image and sampling setup")
    out = args.out or "compare"
    os.makedirs(out, exist_ok=True)
    problem = build_problem(cfgs[0])
    rows, logs = [], []
    for c in cfgs:
        if c.transform != cfgs[0].transform or c.levels != cfgs[0].levels:
            p = build_problem(c, image=problem.image)
        else:
            p = problem
        res = run(c, problem=p)
        _write_run(os.path.join(out, _safe(c.name)), c, res)
        rows.append((c.name, res.re, res.ssim, res.seconds))
        logs.append((c.name, res.log))
        print(f"{c.name}: RE={res.re:.6f} SSIM={res.ssim:.6f}")
    with open(os.path.join(out, "compare.csv"), "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["name", "re", "ssim", "seconds"])
        for name, re, ss, sec in rows:
            wr.writerow([name, repr(re), repr(ss), f"{sec:.3f}"])
    _plot_logs(os.path.join(out, "compare.png"), logs)
    return EXIT_OK


def _safe(name):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)


def cmd_oracle(args):
    from .experiment import build_problem, run

    if len(args.config) != 1:
        raise ConfigError("oracle takes exactly one --config")
    cfg = _apply_seed(load_config(args.config[0]), args)
    if cfg.transform == "none":
        raise ConfigError("the oracle experiment needs a transform")
    ref = read_raw(args.reference) if args.reference else None
    problem = build_problem(cfg, image=ref)
    if problem.image.shape != (cfg.n, cfg.n):
        raise ConfigError(f"reference shape {problem.image.shape} does not match n={cfg.n}")
    frozen = oracle_schedule(problem.transform, problem.image, cfg.solver)
    lam_const = np.full_like(frozen.lam, cfg.solver.const_lambda)
    lam_const[0] = 0.0
    const = WeightSchedule(lam_const, frozen.w, frozen.epsilon, "oracle")
    scfg = cfg.solver.replace(reweight="oracle")
    out = args.out or "oracle"
    os.makedirs(out, exist_ok=True)
    runs = []
    for tag, sched in (("const", const), ("ml", frozen)):
        res = run(cfg, problem=problem, frozen=sched, solver_cfg=scfg)
        res.log.to_csv(os.path.join(out, f"log_{tag}.csv"))
        runs.append((tag, res))
        print(f"oracle weights, {tag} lambda: RE={res.re:.6f} SSIM={res.ssim:.6f}")
    with open(os.path.join(out, "oracle.csv"), "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["iter", "re_const", "re_ml", "ssim_const", "ssim_ml",
                     "residual_const", "residual_ml"])
        a, b = runs[0][1].log, runs[1][1].log
        for i in range(len(a)):
            wr.writerow([a.iteration[i], a.re[i], b.re[i], a.ssim[i], b.ssim[i],
                         a.residual[i], b.residual[i]])
    _plot_logs(os.path.join(out, "oracle.png"),
               [("constant lambda", runs[0][1].log), ("multilevel lambda", runs[1][1].log)])
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", action="append", default=[], help="experiment config")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--seed", type=int, help="override the sampling seed")
    common.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    common.add_argument("--test-mode", action="store_true",
                        help="single-threaded, bit-reproducible execution")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="sbrecon", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    ph = sub.add_parser("phantom", parents=[common], help="write a test image")
    ph.add_argument("name", help=", ".join(sorted(PHANTOMS)))
    ph.add_argument("--n", type=int, default=128)
    ph.add_argument("--preview", action="store_true", help="also write a PNG")
    ph.set_defaults(func=cmd_phantom)
    rc = sub.add_parser("reconstruct", parents=[common], help="run one reconstruction")
    rc.set_defaults(func=cmd_reconstruct)
    cp = sub.add_parser("compare", parents=[common], help="run several configs side by side")
    cp.add_argument("configs", nargs="*", help="more config files")
    cp.set_defaults(func=cmd_compare)
    orc = sub.add_parser("oracle", parents=[common], help="reweighting with true coefficients")
    orc.add_argument("--reference", help="ground-truth image (raw format)")
    orc.set_defaults(func=cmd_oracle)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    _configure(args)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
