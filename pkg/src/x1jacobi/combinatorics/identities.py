"""
Exact identity suites pairing every closed form with a path oracle.

Each suite returns a SuiteResult: one pass/fail cell per parameter tuple and the first
counterexample found. A weight override replaces oracle step weights so the failure
path can be exercised deliberately.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from ..core.config import settings
from ..monitoring import performance_track
from ..utils.logging import get_logger
from .paths import (
    Number,
    Path,
    PathModel,
    S_closed,
    S_model,
    S_sum,
    arcsine_Q_moment,
    arcsine_Q_moment_binomial,
    brute_force_sum,
    c_closed,
    check_guard,
    displacement_profile,
    enumeration_size,
    five_step_model,
    iter_paths,
    s_closed,
    s_half,
    three_step_model,
    transfer_sum,
)

logger = get_logger(__name__)

WeightOverride = Optional[Mapping[int, Fraction]]

S_GRID: Tuple[Tuple[Fraction, Fraction], ...] = (
    (Fraction(1, 2), Fraction(0)),
    (Fraction(1, 2), Fraction(1, 3)),
    (Fraction(2, 5), Fraction(1, 7)),
)


@dataclass(frozen=True)
class Counterexample:
    """Where a suite first failed; path is a step sequence when one is implicated."""

    suite: str
    parameters: Dict[str, Any]
    expected: Number
    actual: Number
    path: Optional[Path] = None

    def describe(self) -> str:
        params = ", ".join(f"{key}={value}" for key, value in self.parameters.items())
        text = f"{self.suite}({params}): closed form {self.expected} != oracle {self.actual}"
        if self.path is not None:
            text += f"; path {list(self.path)}"
        return text


@dataclass
class SuiteResult:
    name: str
    cells: List[Tuple[Dict[str, Any], bool]] = field(default_factory=list)
    counterexample: Optional[Counterexample] = None

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.cells)

    def record(
        self,
        parameters: Dict[str, Any],
        expected: Number,
        actual: Number,
        model: Optional[PathModel] = None,
        reference: Optional[PathModel] = None,
    ) -> None:
        ok = expected == actual
        self.cells.append((parameters, ok))
        if not ok and self.counterexample is None:
            self.counterexample = Counterexample(
                self.name, parameters, expected, actual, _implicated_path(model, reference)
            )
            logger.warning(f"Identity failure: {self.counterexample.describe()}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "suite": self.name,
            "passed": self.passed,
            "cells": len(self.cells),
            "failures": sum(1 for _, ok in self.cells if not ok),
            "counterexample": self.counterexample.describe() if self.counterexample else None,
        }


def _override(model: PathModel, weights: WeightOverride) -> PathModel:
    if not weights:
        return model
    merged = dict(model.step_weights)
    merged.update({step: Fraction(value) for step, value in weights.items()})
    return PathModel(
        merged, model.length, model.displacement, model.unit_steps, model.floor, model.ceiling, model.start
    )


def _implicated_path(model: Optional[PathModel], reference: Optional[PathModel]) -> Optional[Path]:
    """First path whose weight differs between model and reference; else the first contributing path."""
    if model is None or enumeration_size(model) > settings.paths.SUITE_ENUMERATION_LIMIT:
        return None
    first: Optional[Path] = None
    for path, weight in iter_paths(model):
        if first is None:
            first = path
        if reference is None:
            continue
        if any(step not in reference.step_weights for step in path):
            return path
        level, ref_weight = reference.start, Fraction(1)
        for step in path:
            ref_weight *= reference.weight(level, step)
            level += step
        if ref_weight != weight:
            return path
    return first


@performance_track("paths.suite_s")
def suite_s(
    k_max: int = 10,
    grid: Sequence[Tuple[Fraction, Fraction]] = S_GRID,
    weights: WeightOverride = None,
) -> SuiteResult:
    """s_closed against the {-1,0,1} enumeration for k <= k_max, |j| <= k; one enumeration per (k, a, b)."""
    result = SuiteResult("s_closed")
    for a, b in grid:
        for k in range(k_max + 1):
            reference = three_step_model(k, 0, a, b)
            model = _override(reference, weights)
            profile = displacement_profile(model)
            for j in range(-k, k + 1):
                result.record(
                    {"k": k, "j": j, "a": str(a), "b": str(b)},
                    s_closed(k, j, a, b),
                    profile.get(j, Fraction(0)),
                    model.with_displacement(j),
                    reference.with_displacement(j),
                )
    return result


@performance_track("paths.suite_parity")
def suite_parity(k_max: int = 10) -> SuiteResult:
    """s_closed(k, j, a, 0) vanishes when k - j is odd, and s_half agrees with s_closed(k, j, 1/2, 0)."""
    result = SuiteResult("parity")
    for k in range(k_max + 1):
        for j in range(-k, k + 1):
            if (k - j) % 2:
                result.record({"k": k, "j": j, "a": "1/2"}, Fraction(0), s_closed(k, j, Fraction(1, 2), 0))
            result.record({"k": k, "j": j, "form": "s_half"}, s_half(k, j), s_closed(k, j, Fraction(1, 2), 0))
    return result


@performance_track("paths.suite_c")
def suite_c(
    d_pairs: Sequence[Tuple[Fraction, Fraction]],
    k_max: int = 8,
    weights: WeightOverride = None,
) -> SuiteResult:
    """c_closed against the five-step returning-path enumeration for k <= k_max."""
    result = SuiteResult("c_closed")
    for d0, d1 in d_pairs:
        U = (d1 / 4, d0 / 2, d1 / 8)
        for k in range(k_max + 1):
            reference = five_step_model(k, U)
            model = _override(reference, weights)
            result.record(
                {"k": k, "d0": str(d0), "d1": str(d1)},
                c_closed(k, d0, d1),
                brute_force_sum(model),
                model,
                reference,
            )
    return result


@performance_track("paths.suite_qq")
def suite_qq(d_pairs: Sequence[Tuple[Fraction, Fraction]], k_max: int = 10) -> SuiteResult:
    """c_closed = arcsine_Q_moment = binomial expansion against Wallis moments, k <= k_max."""
    result = SuiteResult("arcsine_Q_moment")
    for d0, d1 in d_pairs:
        for k in range(k_max + 1):
            params = {"k": k, "d0": str(d0), "d1": str(d1)}
            target = arcsine_Q_moment(k, d0, d1)
            result.record(params, target, c_closed(k, d0, d1))
            result.record({**params, "form": "binomial"}, target, arcsine_Q_moment_binomial(k, d0, d1))
    return result


@performance_track("paths.suite_S")
def suite_S(k_max: int = 12, weights: WeightOverride = None) -> SuiteResult:
    """
    S_closed against the constrained path oracle and the triple sum for k <= k_max.

    Where plain enumeration is within the suite limit, the level transfer is checked
    against it too.
    """
    result = SuiteResult("S")
    limit = settings.paths.SUITE_ENUMERATION_LIMIT
    for k in range(k_max + 1):
        for i in range(k // 2 + 1):
            params = {"k": k, "i": i}
            expected = S_closed(k, i)
            model = _override(S_model(k, i), weights)
            enumerable = enumeration_size(model) <= limit
            total = brute_force_sum(model) if enumerable else transfer_sum(model)
            result.record(params, expected, Fraction(total) / comb(k, 2 * i), model, S_model(k, i))
            result.record({**params, "form": "sum"}, expected, S_sum(k, i))
            if enumerable:
                result.record({**params, "form": "transfer"}, total, transfer_sum(model))
    return result


@performance_track("paths.suite_S_laws")
def suite_S_laws(k_max: int = 12) -> SuiteResult:
    """Doubling S(k+1, i+1) = 2 S(k, i) and base row S(k, 0) = C(2k, k)/2^k = sum over m."""
    result = SuiteResult("S_laws")
    for k in range(k_max + 1):
        for i in range(k // 2 + 1):
            if i + 1 <= (k + 1) // 2:
                result.record({"k": k, "i": i, "law": "doubling"}, 2 * S_closed(k, i), S_closed(k + 1, i + 1))
        base = sum(
            (Fraction(comb(k, 2 * m) * comb(2 * m, m), 4**m) for m in range(k // 2 + 1)), Fraction(0)
        )
        result.record({"k": k, "law": "base"}, Fraction(comb(2 * k, k), 2**k), S_closed(k, 0))
        result.record({"k": k, "law": "base_sum"}, S_closed(k, 0), base)
    return result


SuiteRunner = Callable[[], SuiteResult]


def run_all(
    d_pairs: Sequence[Tuple[Fraction, Fraction]],
    k_max_s: int = 10,
    k_max_c: int = 8,
    k_max_qq: int = 10,
    k_max_S: int = 12,
    weights: WeightOverride = None,
) -> List[SuiteResult]:
    """Every identity suite in a fixed order; enumeration sizes are checked against the guard before any suite runs."""
    check_guard(three_step_model(k_max_s, 0, 1, 1))
    check_guard(five_step_model(k_max_c, (1, 1, 1)))
    runners: List[SuiteRunner] = [
        lambda: suite_s(k_max_s, weights=weights),
        lambda: suite_parity(k_max_s),
        lambda: suite_c(d_pairs, k_max_c, weights=weights),
        lambda: suite_qq(d_pairs, k_max_qq),
        lambda: suite_S(k_max_S, weights=weights),
        lambda: suite_S_laws(k_max_S),
    ]
    results = [runner() for runner in runners]
    logger.info(
        "Identity suites finished",
        extra={"context": {r.name: r.passed for r in results}},
    )
    return results


def first_counterexample(results: Sequence[SuiteResult]) -> Optional[Counterexample]:
    for result in results:
        if result.counterexample is not None:
            return result.counterexample
    return None
