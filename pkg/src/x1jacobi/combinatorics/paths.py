"""
Exact weighted lattice-path sums and the closed forms they certify.

A path is a sequence of integer steps; its weight is the product of step weights.
Sums are exact whenever the weights are Fractions. Two engines walk the same path
graph: plain enumeration of step sequences in lexicographic order, and a level-by-level
transfer over (level, unit-step count) states. Closed forms use math.comb on Fractions.
"""

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Callable, Dict, Iterator, Mapping, Optional, Sequence, Tuple, Union

from ..core.config import settings
from ..core.exceptions import GuardExceededError, ParameterError

Number = Union[Fraction, int, float]
Rational = Union[Fraction, int]
LevelWeight = Callable[[int, int], Number]
Path = Tuple[int, ...]


@dataclass(frozen=True)
class PathModel:
    """
    Paths of `length` steps from `start` with net `displacement`.

    unit_steps, when set, fixes the number of steps with |step| = 1. floor and ceiling
    bound the visited levels (floor <= level < ceiling). level_weight(level, step), when
    given, replaces step_weights and makes the weight depend on the level a step leaves.
    """

    step_weights: Mapping[int, Number]
    length: int
    displacement: int = 0
    unit_steps: Optional[int] = None
    floor: Optional[int] = None
    ceiling: Optional[int] = None
    start: int = 0
    level_weight: Optional[LevelWeight] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.length < 0:
            raise ParameterError(f"Path length must be non-negative, got {self.length}")
        if not self.step_weights:
            raise ParameterError("Step set must not be empty")

    @property
    def steps(self) -> Tuple[int, ...]:
        return tuple(sorted(self.step_weights))

    def weight(self, level: int, step: int) -> Number:
        if self.level_weight is not None:
            return self.level_weight(level, step)
        return self.step_weights[step]

    def with_displacement(self, displacement: int) -> "PathModel":
        return PathModel(
            self.step_weights,
            self.length,
            displacement,
            self.unit_steps,
            self.floor,
            self.ceiling,
            self.start,
            self.level_weight,
        )


def three_step_model(k: int, j: int, a: Rational, b: Rational) -> PathModel:
    """Steps {-1, 0, 1} with weights (a, b, a)."""
    a, b = Fraction(a), Fraction(b)
    return PathModel({-1: a, 0: b, 1: a}, k, j)


def five_step_model(k: int, weights: Sequence[Rational], j: int = 0) -> PathModel:
    """Steps {-2..2} with weights (U_0, U_1, U_2) by |step|."""
    U0, U1, U2 = (Fraction(w) for w in weights)
    return PathModel({-2: U2, -1: U1, 0: U0, 1: U1, 2: U2}, k, j)


def enumeration_size(model: PathModel) -> int:
    return len(model.step_weights) ** model.length


def check_guard(model: PathModel, guard: Optional[int] = None) -> None:
    guard = guard if guard is not None else settings.paths.ENUMERATION_GUARD
    size = enumeration_size(model)
    if size > guard:
        raise GuardExceededError(
            f"Enumerating {len(model.step_weights)}^{model.length} = {size} paths exceeds the guard {guard}",
            size=size,
            guard=guard,
        )


def _walk(model: PathModel, path: Path) -> Optional[Number]:
    """Weight of path, or None if it leaves the allowed levels or breaks the unit-step count."""
    if model.unit_steps is not None and sum(1 for step in path if abs(step) == 1) != model.unit_steps:
        return None
    level = model.start
    weight: Number = 1
    for step in path:
        weight = weight * model.weight(level, step)
        level += step
        if model.floor is not None and level < model.floor:
            return None
        if model.ceiling is not None and level >= model.ceiling:
            return None
    return weight


def iter_paths(model: PathModel, guard: Optional[int] = None) -> Iterator[Tuple[Path, Number]]:
    """Admissible step sequences ending at the model's displacement, lexicographically, with weights."""
    check_guard(model, guard)
    for path in product(model.steps, repeat=model.length):
        if sum(path) != model.displacement:
            continue
        weight = _walk(model, path)
        if weight is not None:
            yield path, weight


def brute_force_sum(model: PathModel, guard: Optional[int] = None) -> Number:
    """Sum of path weights by enumerating all |steps|^length step sequences."""
    return sum((weight for _, weight in iter_paths(model, guard)), Fraction(0))


def displacement_profile(model: PathModel, guard: Optional[int] = None) -> Dict[int, Number]:
    """One enumeration, path weights bucketed by net displacement (the model's own is ignored)."""
    check_guard(model, guard)
    profile: Dict[int, Number] = defaultdict(Fraction)
    for path in product(model.steps, repeat=model.length):
        weight = _walk(model, path)
        if weight is not None:
            profile[sum(path)] += weight
    return dict(profile)


def transfer_states(model: PathModel) -> Dict[Tuple[int, int], Number]:
    """
    Total weight arriving at each (level, unit-step count) after `length` steps.

    Walks the same graph as the enumeration, one step at a time.
    """
    states: Dict[Tuple[int, int], Number] = {(model.start, 0): 1}
    for _ in range(model.length):
        following: Dict[Tuple[int, int], Number] = defaultdict(int)
        for (level, units), weight in states.items():
            for step in model.steps:
                target = level + step
                if model.floor is not None and target < model.floor:
                    continue
                if model.ceiling is not None and target >= model.ceiling:
                    continue
                count = units + (abs(step) == 1)
                if model.unit_steps is not None and count > model.unit_steps:
                    continue
                following[(target, count)] += weight * model.weight(level, step)
        states = following
    return states


def transfer_sum(model: PathModel) -> Number:
    """Same sum as brute_force_sum, by the level transfer; no size guard."""
    target = model.start + model.displacement
    total: Number = Fraction(0)
    for (level, units), weight in transfer_states(model).items():
        if level != target:
            continue
        if model.unit_steps is not None and units != model.unit_steps:
            continue
        total += weight
    return total


def level_weighted_sum(model: PathModel, guard: Optional[int] = None) -> Number:
    """Enumeration for level-dependent weights; accepts float weights."""
    if model.level_weight is None:
        raise ParameterError("level_weighted_sum needs a level_weight function")
    return sum((weight for _, weight in iter_paths(model, guard)), 0.0 if _has_floats(model) else Fraction(0))


def _has_floats(model: PathModel) -> bool:
    return isinstance(model.weight(model.start, model.steps[0]), float)


# Closed forms


def s_closed(k: int, j: int, a: Rational, b: Rational) -> Fraction:
    """Sum over i of C(k, |j|+2i) C(|j|+2i, i) a^(|j|+2i) b^(k-|j|-2i)."""
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    a, b = Fraction(a), Fraction(b)
    j = abs(j)
    total = Fraction(0)
    for i in range(0, (k - j) // 2 + 1 if k >= j else 0):
        up = j + 2 * i
        total += comb(k, up) * comb(up, i) * a**up * b ** (k - up)
    return total


def s_half(k: int, j: int) -> Fraction:
    """s_closed(k, j, 1/2, 0): C(k, (k-j)/2) / 2^k when k - j is even, else 0."""
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    j = abs(j)
    if j > k or (k - j) % 2:
        return Fraction(0)
    return Fraction(comb(k, (k - j) // 2), 2**k)


def c_closed(k: int, d0: Rational, d1: Rational) -> Fraction:
    """Returning k-step paths over {-2..2} with weights (d1/4, d0/2, d1/8), summed by step counts."""
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    d0, d1 = Fraction(d0), Fraction(d1)
    total = Fraction(0)
    for i in range(k // 2 + 1):
        monomial = comb(k, 2 * i) * d0 ** (2 * i) * d1 ** (k - 2 * i)
        for s in range(min(i, k - 2 * i) + 1):
            for m in range((k - 2 * i - s) // 2 + 1):
                count = comb(2 * i, s + i) * comb(k - 2 * i, s + 2 * m) * comb(s + 2 * m, m)
                total += Fraction(count, 2 ** (2 * k - 2 * i + 2 * m + max(0, s - 1))) * monomial
    return total


def wallis_moment(l: int) -> Fraction:
    """Arcsine moment of x^l: C(2m, m)/4^m for l = 2m, zero for odd l."""
    if l < 0:
        raise ParameterError(f"l must be non-negative, got {l}")
    if l % 2:
        return Fraction(0)
    m = l // 2
    return Fraction(comb(2 * m, m), 4**m)


def arcsine_Q_moment(k: int, d0: Rational, d1: Rational) -> Fraction:
    """Arcsine moment of Q^k for Q(x) = (d1/2) x^2 + d0 x."""
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    d0, d1 = Fraction(d0), Fraction(d1)
    return sum(
        (
            Fraction(comb(k, 2 * i) * comb(2 * (k - i), k - i), 2 ** (3 * k - 4 * i))
            * d0 ** (2 * i)
            * d1 ** (k - 2 * i)
            for i in range(k // 2 + 1)
        ),
        Fraction(0),
    )


def arcsine_Q_moment_binomial(k: int, d0: Rational, d1: Rational) -> Fraction:
    """The same moment by direct binomial expansion against wallis_moment."""
    d0, d1 = Fraction(d0), Fraction(d1)
    return sum(
        (comb(k, j) * d0**j * (d1 / 2) ** (k - j) * wallis_moment(2 * k - j) for j in range(k + 1)),
        Fraction(0),
    )


def _check_S_index(k: int, i: int) -> None:
    if k < 0 or i < 0 or i > k // 2:
        raise ParameterError(f"S needs 0 <= i <= k // 2, got k={k}, i={i}", k=k, i=i)


def S_closed(k: int, i: int) -> Fraction:
    """C(2(k-i), k-i) / 2^(k-2i)."""
    _check_S_index(k, i)
    return Fraction(comb(2 * (k - i), k - i), 2 ** (k - 2 * i))


def S_sum(k: int, i: int) -> Fraction:
    """The triple-sum form of S_{k,i} read off the step-count expansion of c_closed."""
    _check_S_index(k, i)
    total = Fraction(0)
    for s in range(min(i, k - 2 * i) + 1):
        for m in range((k - 2 * i - s) // 2 + 1):
            count = comb(2 * i, s + i) * comb(k - 2 * i, s + 2 * m) * comb(s + 2 * m, m)
            total += Fraction(count, 2 ** (2 * m + max(0, s - 1)))
    return total


def S_model(k: int, i: int) -> PathModel:
    """Returning k-step paths with exactly 2i unit steps; weight 1/2 per |step| = 2."""
    half = Fraction(1, 2)
    return PathModel({-2: half, -1: Fraction(1), 0: Fraction(1), 1: Fraction(1), 2: half}, k, 0, unit_steps=2 * i)


def S_bruteforce(k: int, i: int, limit: Optional[int] = None) -> Fraction:
    """
    S_{k,i} from the path graph: the constrained path sum divided by C(k, 2i).

    Plain enumeration is used while 5^k stays within limit (the suite limit by
    default); beyond it the level transfer walks the same graph.
    """
    _check_S_index(k, i)
    model = S_model(k, i)
    limit = limit if limit is not None else settings.paths.SUITE_ENUMERATION_LIMIT
    if enumeration_size(model) <= limit:
        total = brute_force_sum(model)
    else:
        total = transfer_sum(model)
    return Fraction(total) / comb(k, 2 * i)


def limit_weight(j: int, d: Sequence[Rational]) -> Fraction:
    """
    Limit of the j-th band coefficient of Q for btilde = d_0 + d_1 x + ... + d_m x^m.

    Sum over k = 1..m+1 of (d_{k-1}/k) s_half(k, |j|); zero beyond |j| = m + 1.
    """
    coeffs = [Fraction(v) for v in d]
    return sum((coeffs[k - 1] / k * s_half(k, abs(j)) for k in range(1, len(coeffs) + 1)), Fraction(0))
