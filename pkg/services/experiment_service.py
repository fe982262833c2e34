"""One runner per CLI command; each turns a RunConfig into the rendered artifact text."""

import logging
from typing import Dict

from . import area_service, frame_service, output_service, sampler_service, tail_service, variation_service
from .app_service import RunConfig, path_factory
from utils.fingerprint import values_digest


def run_sample(config: RunConfig) -> str:
    path = path_factory(config)(config.level, config.seed)
    logging.info(f"Sampled level {config.level} path, {path.values.size} points")

    if config.frame_h is not None:
        frame = frame_service.frame_eval(path, config.frame_h)
        if config.fmt == "json":
            return output_service.render_json(
                {"level": path.level, "seed": config.seed, "h": str(frame.h), "values": frame.values}
            )
        return output_service.render_csv(
            output_service.FRAME_HEADER, output_service.frame_rows(path.level, frame.values)
        )

    if config.fmt == "json":
        return output_service.render_json(
            {
                "level": path.level,
                "seed": config.seed,
                "digest": values_digest(path.values),
                "values": path.values,
            }
        )
    return output_service.render_csv(output_service.PATH_HEADER, output_service.path_rows(path.points(), path.values))


def run_variation(config: RunConfig) -> str:
    """p-variation norm of T_h2 - T_h1 next to the dyadic bound for h = h2 - h1."""
    path = path_factory(config)(config.level, config.seed)
    p, alpha = config.p, config.alpha
    beta = config.alpha if config.beta is None else config.beta
    pprime = config.p if config.pprime is None else config.pprime

    diff = frame_service.frame_difference(
        frame_service.frame_eval(path, config.h2), frame_service.frame_eval(path, config.h1)
    )
    pvar = variation_service.pvar_exact(diff, p)
    sup_norm = float(abs(diff).max())
    norm = sup_norm + pvar.value

    h = config.h2 - config.h1
    dyadic = {"dyadic_sum": None, "dyadic_bound": None, "bound_ratio": None}
    if h.numerator > 0:
        dyadic_sum = variation_service.dyadic_sum(path, h, p, alpha)
        bound = variation_service.c_alpha_p(alpha, p) * dyadic_sum ** (1 / p)
        dyadic["dyadic_sum"] = dyadic_sum
        dyadic["dyadic_bound"] = bound
        if norm > 0:
            dyadic["bound_ratio"] = bound * variation_service.bound_constant(p) / norm

    payload: Dict[str, object] = {
        "params": {
            "p": p,
            "alpha": alpha,
            "h1": str(config.h1),
            "h2": str(config.h2),
            "level": config.level,
            "seed": config.seed,
            "deterministic": config.deterministic,
        },
        "path_digest": values_digest(path.values),
        "pvar": pvar.value,
        "dissection": list(pvar.dissection),
        "sup_norm": sup_norm,
        "pvar_norm": norm,
        "constants": variation_service.d_constants(alpha, beta, p, pprime, config.tol).as_dict(),
        **dyadic,
    }
    if config.ramp and h.numerator > 0:
        payload["closed_form"] = {
            "pvar": 0.0,
            "sup_norm": float(h),
            "pvar_norm": float(h),
            "dyadic_sum": variation_service.ramp_dyadic_sum(config.level, h, p, alpha),
        }
    return output_service.render_json(payload)


def run_tail(config: RunConfig) -> str:
    report = tail_service.tail_experiment(
        p=config.p,
        alpha=config.alpha,
        h1=config.h1,
        h2=config.h2,
        level=config.level,
        trials=config.trials,
        r_grid=config.r_grid,
        seed=config.seed,
        pprimes=() if config.pprime is None else (config.pprime,),
        beta=config.beta,
        threads=config.threads,
        path_factory=path_factory(config),
    )
    if config.fmt == "csv":
        return output_service.render_csv(output_service.TAIL_HEADER, report.rows())
    return output_service.render_json(report.to_json())


def run_area_surface(config: RunConfig) -> str:
    path = path_factory(config)(config.level, config.seed)
    surface = area_service.area_surface(path, config.m, config.n, config.threads)
    if config.fmt == "json":
        return output_service.render_json(
            {
                "params": {"m": config.m, "n": config.n, "level": config.level, "seed": config.seed},
                "rows": surface.rows(),
                "oscillation": area_service.surface_oscillation(surface),
            }
        )
    return output_service.render_csv(output_service.SURFACE_HEADER, surface.rows())


def run_diagonal(config: RunConfig) -> str:
    seeds = [sampler_service.trial_seed(config.seed, i) for i in range(config.trials)]
    report = area_service.diagonal_limit(
        seeds,
        config.s,
        config.offsets,
        config.n,
        level=config.level,
        threads=config.threads,
        path_factory=path_factory(config),
    )
    report.params["seed"] = config.seed
    report.params["deterministic"] = config.deterministic
    return output_service.render_json(report.to_json())


def run_constants(config: RunConfig) -> str:
    constants = variation_service.d_constants(config.alpha, config.beta, config.p, config.pprime, config.tol)
    return output_service.render_json(constants.as_dict())


RUNNERS = {
    "sample": run_sample,
    "variation": run_variation,
    "tail": run_tail,
    "area-surface": run_area_surface,
    "diagonal": run_diagonal,
    "constants": run_constants,
}
