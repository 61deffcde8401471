"""
Subcommand implementations. Each returns a Report; main() turns it into an exit code.
"""

import logging
from argparse import Namespace
from typing import Any, Dict, Tuple

import numpy as np

from ..algebra.augmented import AugmentedLeibnizAlgebra, canonical_augmentation, derived_algebra, verify_augmented
from ..algebra.leibniz import (
    LeibnizAlgebra,
    center_quotient,
    left_center,
    lie_quotient,
    squares_ideal,
    verify_leibniz,
    verify_lie,
)
from ..algebra.scalars import ScalarMode, jsonable, to_float
from ..config import RackforgeConfig
from ..exceptions import ConfigError, PreconditionError
from ..integration.checks import exp_chart_check, group_model_check, verify_nilradical_translation
from ..integration.cutoff import invariant_cutoff
from ..integration.dirty import (
    build_pullback_rack,
    integration_report,
    lie_case_reduction,
    section_equivariance_check,
    section_identity_check,
)
from ..matrix.exponential import strip_membership
from ..matrix.polynomials import char_poly, root_bound, roots
from ..models.integration_models import IntegrationConfig
from ..models.report_models import CheckRecord, Report, VerificationReport
from ..racks.structures import (
    RackStructure,
    check_rack_axioms,
    conjugation_rack,
    from_augmented,
    gauge,
    kinyon_augmented,
    kinyon_rack,
    trivial_rack,
)
from ..racks.tangent import tangent_leibniz, tangent_leibniz_check
from .io import (
    ReportBuilder,
    build_algebra,
    build_augmentation,
    build_model,
    element_vectors,
    file_stem,
    raw_matrices,
    read_algebra_file,
    subspace_json,
)

logger = logging.getLogger(__name__)

CONSTRUCTIONS = ("trivial", "conjugation", "kinyon", "gauged", "augmented", "dirty")


def _seed(args: Namespace, settings: RackforgeConfig) -> int:
    return args.seed if getattr(args, "seed", None) is not None else settings.seed


def _integration_config(args: Namespace, settings: RackforgeConfig) -> IntegrationConfig:
    return IntegrationConfig.from_settings(
        settings,
        tau_prime=getattr(args, "tau_prime", None),
        tau=getattr(args, "tau", None),
        fd_step=getattr(args, "step", None),
        samples=getattr(args, "samples", None),
        seed=_seed(args, settings),
        tol=getattr(args, "tol", None),
    )


def _load(path: str) -> Tuple[Any, str, LeibnizAlgebra]:
    spec, digest = read_algebra_file(path)
    return spec, digest, build_algebra(spec, file_stem(path))


def cmd_verify(args: Namespace, settings: RackforgeConfig) -> Report:
    """Leibniz identity (and the augmentation axioms when the file carries one)."""
    spec, digest, alg = _load(args.path)
    builder = ReportBuilder("verify", digest, None, {"path_stem": file_stem(args.path)})
    leibniz = builder.add(verify_leibniz(alg))
    builder.result("dimension", alg.dim)
    builder.result("scalars", alg.mode.value)
    builder.result("is_leibniz", leibniz.passed)
    builder.result("is_lie", verify_lie(alg).passed)
    aug = build_augmentation(spec, file_stem(args.path))
    if aug is not None:
        builder.add(verify_augmented(aug), prefix="augmentation.")
        builder.result("derived_matches_bracket", _same_table(derived_algebra(aug), alg))
    return builder.finish()


def _same_table(a: LeibnizAlgebra, b: LeibnizAlgebra) -> bool:
    if a.exact and b.exact:
        return bool(np.all(a.structure == b.structure))
    return bool(np.max(np.abs(to_float(a.structure) - to_float(b.structure)), initial=0.0) <= 1e-9)


def cmd_analyze(args: Namespace, settings: RackforgeConfig) -> Report:
    """Q(h), z(h), the quotients h/Q and h/z and the canonical augmentation."""
    spec, digest, alg = _load(args.path)
    builder = ReportBuilder("analyze", digest, _seed(args, settings), {"path_stem": file_stem(args.path)})
    if not builder.add(verify_leibniz(alg)).passed:
        logger.warning(f"{alg.name} is not Leibniz; skipping the ideal analysis")
        return builder.finish()

    squares = squares_ideal(alg)
    center = left_center(alg)
    contained = center.contains(squares)
    builder.add(VerificationReport(checks=[CheckRecord.build(
        "squares_in_left_center", contained, 0.0 if contained else 1.0, squares_dim=squares.dim, center_dim=center.dim,
    )]))
    quotient, projection = lie_quotient(alg)
    builder.add(verify_lie(quotient), prefix="lie_quotient.")
    center_alg, center_projection = center_quotient(alg)
    builder.add(verify_lie(center_alg), prefix="center_quotient.")
    aug = canonical_augmentation(alg)
    builder.add(verify_augmented(aug), prefix="canonical.")
    if spec.nilradical:
        cfg = IntegrationConfig.from_settings(settings, seed=_seed(args, settings))
        builder.add(verify_nilradical_translation(alg, spec.nilradical, cfg), prefix="nilradical.")

    builder.result("squares_ideal", subspace_json(squares))
    builder.result("left_center", subspace_json(center))
    builder.result("lie_quotient", {"dim": quotient.dim, "labels": list(quotient.labels),
                                    "structure": quotient.structure, "projection": projection.matrix})
    builder.result("center_quotient", {"dim": center_alg.dim, "labels": list(center_alg.labels),
                                       "structure": center_alg.structure, "projection": center_projection.matrix})
    builder.result("canonical_augmentation", {"p": aug.p, "action": aug.action, "kernel_dim": aug.kernel_of_p().dim})
    return builder.finish()


def _augmentation_for(spec, alg: LeibnizAlgebra, name: str) -> Tuple[AugmentedLeibnizAlgebra, bool]:
    aug = build_augmentation(spec, name)
    if aug is not None:
        return aug, False
    if not verify_leibniz(alg).passed:
        raise PreconditionError(f"{alg.name} is not Leibniz; no canonical augmentation")
    return canonical_augmentation(alg), True


def cmd_integrate(args: Namespace, settings: RackforgeConfig) -> Report:
    """Dirty integration pipeline: section checks, rack axioms, fibres, tangent bracket, Lie case."""
    spec, digest, alg = _load(args.path)
    cfg = _integration_config(args, settings)
    name = file_stem(args.path)
    aug, canonical = _augmentation_for(spec, alg, name)
    model = build_model(spec, aug.g, args.model)
    builder = ReportBuilder("integrate", digest, cfg.seed, {"model": model.name, **cfg.model_dump()})

    builder.add(group_model_check(model, cfg), prefix="model.")
    builder.add(section_identity_check(model, cfg), prefix="section.")
    builder.add(section_equivariance_check(model, cfg), prefix="section.")
    builder.add(exp_chart_check(model, cfg), prefix="chart.")
    rack = build_pullback_rack(aug, model, cfg)
    report = builder.add(integration_report(rack, int(settings.get("fiber_base_points", 32))), prefix="rack.")
    tangent = report.check("tangent_bracket")
    builder.result("fiber_dim", rack.fiber_dim)
    builder.result("tangent_relative_error", tangent.max_defect)
    builder.result("tangent_table", tangent.details.get("table"))
    builder.result("canonical_augmentation", canonical)

    if alg.dim and verify_lie(alg).passed and (canonical or _same_table(derived_algebra(aug), alg)):
        lie_model = model if canonical else build_model(spec, alg, args.model)
        reduction = builder.add(lie_case_reduction(alg, lie_model, cfg), prefix="lie_case.")
        builder.result("lie_case_reduction", "pass" if reduction.passed else "fail")
    return builder.finish()


def cmd_strip(args: Namespace, settings: RackforgeConfig) -> Report:
    """Strip verdicts, root bounds and cutoff values for listed elements and matrices."""
    spec, digest, alg = _load(args.path)
    tau = args.tau if args.tau is not None else float(settings.get("tau"))
    tau_prime = args.tau_prime if args.tau_prime is not None else min(float(settings.get("tau_prime")), tau / 2)
    cfg = IntegrationConfig.from_settings(settings, tau=tau, tau_prime=tau_prime, seed=_seed(args, settings))
    builder = ReportBuilder("strip", digest, cfg.seed, {"tau": tau, "tau_prime": tau_prime})

    bound_checks = VerificationReport(subject="root_bound")
    worst, counterexample = 0.0, None
    entries = []
    for label, matrix, element in _strip_inputs(spec, alg):
        poly = char_poly(matrix)
        bound = root_bound(poly)
        spectrum = roots(poly)
        largest = max((abs(z) for z in spectrum.values), default=0.0)
        excess = max(0.0, largest - bound * (1 + 1e-9))
        if excess > worst:
            worst = excess
        if excess > 0 and counterexample is None:
            counterexample = {"input": label, "largest_root": largest, "bound": bound}
        verdict = strip_membership(matrix, tau)
        entry: Dict[str, Any] = {"input": label, "member": verdict.member, "margin": verdict.margin,
                                 "beta": verdict.beta, "root_bound": bound}
        if element is not None:
            entry["cutoff"] = invariant_cutoff(alg, element, cfg)
        entries.append(entry)
    bound_checks.add(CheckRecord.build("root_bound", counterexample is None, worst, counterexample,
                                       inputs=len(entries)))
    builder.add(bound_checks)
    builder.result("verdicts", entries)

    if args.model or spec.model is not None:
        model = build_model(spec, alg, args.model)
        builder.add(exp_chart_check(model, cfg), prefix="chart.")
    return builder.finish()


def _strip_inputs(spec, alg: LeibnizAlgebra):
    for k, element in enumerate(element_vectors(spec)):
        yield f"elements[{k}]", alg.ad(element), element
    for k, matrix in enumerate(raw_matrices(spec)):
        yield f"matrices[{k}]", matrix, None


def _construction(args: Namespace, settings: RackforgeConfig, spec, alg: LeibnizAlgebra) -> Tuple[RackStructure, int]:
    name = args.construction
    seed = _seed(args, settings)
    if name == "trivial":
        return trivial_rack(alg.dim, alg.mode), alg.dim
    if name == "kinyon":
        return kinyon_rack(alg, strict=False), alg.dim
    if name == "gauged":
        factor = args.gauge_factor if args.gauge_factor is not None else float(settings.get("gauge_factor"))
        return gauge(kinyon_rack(alg, strict=False), lambda y: factor * to_float(y), seed=seed), alg.dim
    if name == "augmented":
        return from_augmented(kinyon_augmented(alg), seed=seed), alg.dim
    if name == "conjugation":
        model = build_model(spec, alg, args.model)
        return conjugation_rack(model.group_ops()), model.dim
    if name == "dirty":
        cfg = _integration_config(args, settings)
        aug, _ = _augmentation_for(spec, alg, alg.name)
        model = build_model(spec, aug.g, args.model)
        return build_pullback_rack(aug, model, cfg).rack_structure(), aug.dim_h
    raise ConfigError(f"unknown construction {name!r}; choose from {', '.join(CONSTRUCTIONS)}")


def cmd_rackcheck(args: Namespace, settings: RackforgeConfig) -> Report:
    """Rack axioms on seeded samples plus the recovered tangent bracket."""
    spec, digest, alg = _load(args.path)
    seed = _seed(args, settings)
    samples = args.samples if args.samples is not None else settings.samples
    rack, dim = _construction(args, settings, spec, alg)
    parameters = {"construction": args.construction, "samples": samples}
    if args.construction == "gauged":
        parameters["gauge_factor"] = args.gauge_factor if args.gauge_factor is not None else settings.get("gauge_factor")
    builder = ReportBuilder("rackcheck", digest, seed, parameters)
    tol = float(settings.get("tol"))
    builder.add(check_rack_axioms(rack, samples, seed, tol, float(settings.get("sample_scale"))))
    step = float(settings.get("fd_step"))
    estimate = tangent_leibniz(rack, dim, step, step)
    builder.add(tangent_leibniz_check(estimate))
    builder.result("rack", rack.name)
    builder.result("tangent_table", np.round(estimate.table, 8))
    builder.result("tangent_error", estimate.error)
    if args.construction in ("kinyon", "gauged", "augmented") and alg.mode == ScalarMode.RATIONAL:
        builder.result("structure_constants", jsonable(alg.structure))
    return builder.finish()


COMMANDS = {
    "verify": cmd_verify,
    "analyze": cmd_analyze,
    "integrate": cmd_integrate,
    "strip": cmd_strip,
    "rackcheck": cmd_rackcheck,
}
