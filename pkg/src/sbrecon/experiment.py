"""Turn an :class:`~sbrecon.config.ExperimentConfig` into operators and runs."""

import time
from dataclasses import dataclass

import numpy as np

from .io import read_raw
from .metrics import relative_error, ssim
from .phantoms import make_phantom
from .sampling import (
    fourier_operator,
    inpainting_operator,
    make_radial_mask,
    radon_operator,
    random_pixel_mask,
)
from .solver import ConvergenceLog, iht_inpaint, split_bregman_reconstruct
from .transforms import build_shearlet, build_wavelet


@dataclass
class Problem:
    image: np.ndarray
    A: object
    transform: object
    y: np.ndarray


@dataclass
class RunResult:
    name: str
    u: np.ndarray
    log: ConvergenceLog
    re: float
    ssim: float
    residual: float
    seconds: float


def load_image(cfg):
    if cfg.image:
        img = read_raw(cfg.image)
        if img.shape != (cfg.n, cfg.n):
            raise ValueError(f"image {cfg.image} has shape {img.shape}, config says n={cfg.n}")
        return img
    return make_phantom(cfg.phantom, cfg.n)


def build_transform(cfg):
    if cfg.transform == "wavelet":
        return build_wavelet(cfg.n, cfg.levels, cfg.family)
    if cfg.transform == "shearlet":
        return build_shearlet(cfg.n, cfg.levels, list(cfg.directions))
    return None


def build_operator(cfg):
    if cfg.kind == "fourier":
        return fourier_operator(make_radial_mask(cfg.n, cfg.lines))
    if cfg.kind == "radon":
        return radon_operator(cfg.n, cfg.angles)
    return inpainting_operator(random_pixel_mask(cfg.n, cfg.keep, cfg.seed))


def build_problem(cfg, image=None):
    img = load_image(cfg) if image is None else np.asarray(image)
    A = build_operator(cfg)
    return Problem(img, A, build_transform(cfg), A.forward(img))


def run(cfg, problem=None, frozen=None, solver_cfg=None):
    """Reconstruct the configured problem and score it against the ground truth."""
    p = problem if problem is not None else build_problem(cfg)
    scfg = solver_cfg if solver_cfg is not None else cfg.solver
    t0 = time.perf_counter()
    if cfg.method == "iht":
        log = ConvergenceLog()
        ynorm = np.linalg.norm(p.y)

        def record(i, u):
            res = float(np.linalg.norm(p.A.forward(u) - p.y) / ynorm)
            log.append(i + 1, relative_error(p.image, u), ssim(p.image, u), res, None,
                       time.perf_counter() - t0)

        u, _ = iht_inpaint(p.A, p.transform, p.y, cfg.iht_strategy, cfg.iht_param,
                           cfg.iht_eps, cfg.iht_sigma, cfg.iht_iters, callback=record)
        res = log.residual[-1]
    else:
        u, log = split_bregman_reconstruct(p.A, p.transform, p.y, scfg, reference=p.image,
                                           frozen=frozen)
        res = log.residual[-1]
    elapsed = time.perf_counter() - t0
    uu = u.real if np.iscomplexobj(u) and np.isrealobj(p.image) else u
    return RunResult(cfg.name, uu, log, relative_error(p.image, uu), ssim(p.image, uu),
                     res, elapsed)
