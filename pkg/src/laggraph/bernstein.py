"""Executable hypothesis/conclusion checks for the Bernstein-type statements.

Each checker consumes a FieldReport and emits a TheoremVerdict: named
hypothesis checks, conclusion checks, an applicability flag (all hypotheses
hold on the sampled box), and a consistency flag (vacuously true when not
applicable).  Conclusions are diagnostics, never proofs: the underlying
statements quantify over all of R^n, so every verdict carries a note that
the measurements cover only a bounded box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .fields import FieldReport

__all__ = [
    "ConfigError",
    "CheckResult",
    "TheoremVerdict",
    "Tolerances",
    "beta0_bound",
    "check_theorem1",
    "check_theorem2",
    "check_chern",
    "check_tube",
    "THEOREM_CHECKS",
    "GLOBAL_NOTE",
]

GLOBAL_NOTE = "domain is a bounded box; theorem hypotheses are global"


class ConfigError(ValueError):
    """Unusable configuration (bad thresholds, missing fields)."""


@dataclass
class CheckResult:
    name: str
    measured: float
    threshold: float
    op: str  # "le": measured <= threshold, "lt": strict, "ge": measured >= threshold
    passed: bool
    witness: tuple | None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "measured": self.measured,
            "threshold": self.threshold,
            "op": self.op,
            "pass": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
        }


@dataclass
class TheoremVerdict:
    theorem: str
    hypothesis_checks: list
    conclusion_checks: list
    applicable: bool
    consistent: bool
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "hypothesis_checks": [c.as_dict() for c in self.hypothesis_checks],
            "conclusion_checks": [c.as_dict() for c in self.conclusion_checks],
            "applicable": self.applicable,
            "consistent": self.consistent,
            "notes": list(self.notes),
        }


@dataclass
class Tolerances:
    """Thresholds for hypothesis and conclusion checks.

    pde_c = None selects the default residual constant 10 * (1 + sup|Hess|_F^2);
    the PDE threshold is then tau = C * h^2 with h the coarsest grid spacing.
    """

    eig: float = 1e-9
    affine: float = 1e-8
    pde_c: float | None = None
    hess_bound: float = 100.0
    margin: float = 1e-9

    def tau_pde(self, report: FieldReport) -> float:
        c = self.pde_c
        if c is None:
            c = 10.0 * (1.0 + report.summaries["hess_sup_norm"] ** 2)
        h = max(report.domain.spacing)
        return c * h * h


def beta0_bound(n: int) -> float:
    """The volume-element bound cos^{-n}(pi / (2 sqrt(kappa n))), kappa = 1
    for n = 2 and 2 for n >= 3."""
    if not isinstance(n, int) or n < 2:
        raise ConfigError(f"beta0_bound requires an integer n >= 2, got {n!r}")
    kappa = 1.0 if n == 2 else 2.0
    return math.cos(math.pi / (2.0 * math.sqrt(kappa * n))) ** (-n)


def _check(report, name, summary_key, threshold, op) -> CheckResult:
    if summary_key not in report.summaries:
        raise ConfigError(
            f"field report lacks '{summary_key}' (cmf residual needs resolution >= 7)"
        )
    measured = report.summaries[summary_key]
    if op == "le":
        passed = measured <= threshold
    elif op == "lt":
        passed = measured < threshold
    elif op == "ge":
        passed = measured >= threshold
    else:
        raise ValueError(f"unknown op {op!r}")
    return CheckResult(
        name=name,
        measured=measured,
        threshold=threshold,
        op=op,
        passed=passed,
        witness=report.witnesses.get(summary_key),
    )


def _verdict(theorem: str, hypotheses: list, conclusions: list) -> TheoremVerdict:
    applicable = all(c.passed for c in hypotheses)
    consistent = (not applicable) or all(c.passed for c in conclusions)
    notes = [GLOBAL_NOTE]
    if applicable and not consistent:
        notes.append("conclusion fails on the sampled box; see conclusion_checks")
    return TheoremVerdict(
        theorem=theorem,
        hypothesis_checks=hypotheses,
        conclusion_checks=conclusions,
        applicable=applicable,
        consistent=consistent,
        notes=notes,
    )


def check_theorem1(report: FieldReport, tol: Tolerances | None = None) -> TheoremVerdict:
    """Convex + H-minimal graph => affine plane."""
    tol = tol or Tolerances()
    tau = tol.tau_pde(report)
    hyp = [
        _check(report, "convexity", "min_eigen", -tol.eig, "ge"),
        _check(report, "h_minimality", "sup_hmin_residual", tau, "le"),
    ]
    concl = [_check(report, "affinity", "affinity_residual", tol.affine, "le")]
    return _verdict("thm1", hyp, concl)


def check_theorem2(
    report: FieldReport,
    beta0: float | None = None,
    tol: Tolerances | None = None,
) -> TheoremVerdict:
    """Volume element bounded below beta0 + conformal Maslov form => plane."""
    tol = tol or Tolerances()
    n = report.domain.dim
    bound = beta0_bound(n)
    if beta0 is None:
        beta0 = bound - 1e-9
    elif beta0 >= bound:
        raise ConfigError(
            f"beta0 = {beta0} must be strictly below beta0_bound({n}) = {bound}"
        )
    tau = tol.tau_pde(report)
    hyp = [
        _check(report, "volume_element_bound", "sup_delta_u", beta0, "le"),
        _check(report, "conformal_maslov", "sup_cmf_residual", tau, "le"),
    ]
    concl = [
        _check(report, "affinity", "affinity_residual", tol.affine, "le"),
        _check(report, "isotropy", "isotropy_residual", tol.affine, "le"),
    ]
    return _verdict("thm2", hyp, concl)


def check_chern(report: FieldReport, tol: Tolerances | None = None) -> TheoremVerdict:
    """Bounded Hessian + H-minimal => minimal in the usual sense (|H| = 0)."""
    tol = tol or Tolerances()
    tau = tol.tau_pde(report)
    hyp = [
        _check(report, "hessian_bound", "hess_sup_norm", tol.hess_bound, "le"),
        _check(report, "h_minimality", "sup_hmin_residual", tau, "le"),
    ]
    concl = [_check(report, "mean_curvature", "sup_mean_curv", tau, "le")]
    return _verdict("chern", hyp, concl)


def check_tube(report: FieldReport, tol: Tolerances | None = None) -> TheoremVerdict:
    """Gauss image in a thin tube around the scalar geodesic => isotropic
    constant Hessian.  The convexity radius is pi/2 for n = 2 (the fiber is
    a round 2-sphere) and pi / (2 sqrt(2)) otherwise."""
    tol = tol or Tolerances()
    n = report.domain.dim
    radius = math.pi / 2.0 if n == 2 else math.pi / (2.0 * math.sqrt(2.0))
    tau = tol.tau_pde(report)
    hyp = [
        _check(report, "tube_radius", "sup_tube_dev", radius - tol.margin, "lt"),
        _check(report, "conformal_maslov", "sup_cmf_residual", tau, "le"),
        _check(report, "hessian_bound", "hess_sup_norm", tol.hess_bound, "le"),
    ]
    concl = [
        _check(report, "affinity", "affinity_residual", tol.affine, "le"),
        _check(report, "isotropy", "isotropy_residual", tol.affine, "le"),
    ]
    return _verdict("tube", hyp, concl)


THEOREM_CHECKS = {
    "thm1": check_theorem1,
    "thm2": check_theorem2,
    "chern": check_chern,
    "tube": check_tube,
}
