"""Entropy statistics over joint distributions.

Sign conventions
----------------
``transmission_n`` is the signed inclusion-exclusion of subset entropies,

    T(S) = sum over nonempty X of S of (-1)**(|X| + 1) * H(X),

so ``T`` of two variables is ordinary mutual information and ``T`` of three
is McGill's co-information, which can be negative.  For a single variable we
define ``T({x}) = H(x)``; with that convention the excess entropy is simply
``Y(S) = sum of T(X)`` over the nonempty subsets ``X`` of ``S``.

Substituting ``Y(X)`` for every joint entropy ``H(X)`` (``|X| >= 2``) in the
inclusion-exclusion sum gives the mutual redundancy ``R(S)``.  The sum
telescopes to ``R(S) = (-1)**(|S| + 1) * T(S)``: ``R`` is ``-T`` for even
``|S|`` and ``T`` for odd ``|S|``.  :func:`mutual_redundancy` evaluates both
routes and raises :class:`PathMismatch` if they disagree.

``q_measure`` is the Ashby/Krippendorff sum with the opposite sign
convention, ``Q(S) = (-1)**|S| * T(S)``.
"""

from __future__ import annotations

import itertools
import logging
import math
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .distribution import (
    JointDistribution,
    VariableSet,
    entropy,
    marginal,
    max_entropy,
    resolve_axes,
    slice_condition,
    _check_base,
)
from .errors import (
    DegenerateAlphabet,
    EmptyVariableSet,
    IdenticalVariables,
    InputError,
    InvalidOrder,
    OverlappingSets,
    PathMismatch,
    UnknownMeasure,
)

log = logging.getLogger(__name__)

IDENTITY_TOL = 1e-9
IPF_TOLERANCE = 1e-10
IPF_MAX_ITERATIONS = 10_000
II_TOL = 1e-6


class IpfNotConverged(RuntimeWarning):
    pass


@dataclass(frozen=True)
class MeasureReport:
    """One measure value (in units of ``log_base``) with provenance."""

    measure_name: str
    variables: tuple[str, ...]
    value: float
    log_base: float = 2.0
    observation_count: float | None = None
    extra: Mapping[str, float] | None = None
    given: tuple[str, ...] = ()
    sign_rule: str | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise PathMismatch(f"{self.measure_name} produced non-finite value {self.value}")

    def to_dict(self) -> dict:
        out = {
            "measure": self.measure_name,
            "variables": list(self.variables),
            "value": self.value,
            "log_base": self.log_base,
            "observation_count": self.observation_count,
        }
        if self.given:
            out["given"] = list(self.given)
        if self.sign_rule is not None:
            out["sign_rule"] = self.sign_rule
        if self.extra is not None:
            out["terms"] = dict(self.extra)
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


@dataclass(frozen=True)
class IpfResult:
    fitted: JointDistribution
    iterations: int
    max_margin_error: float
    converged: bool


def _clamp_nonneg(value: float, what: str, tol: float = IDENTITY_TOL) -> float:
    if value < -tol:
        raise PathMismatch(f"{what} = {value!r} is negative beyond tolerance {tol}")
    return max(value, 0.0)


def _names(dist: JointDistribution, variables: VariableSet) -> tuple[str, ...]:
    return tuple(dist.variables[a] for a in resolve_axes(dist, variables))


def _subsets(items: Sequence, min_size: int = 1) -> Iterable[tuple]:
    for k in range(min_size, len(items) + 1):
        yield from itertools.combinations(items, k)


def _entropy_table(dist: JointDistribution, names: Sequence[str], base: float) -> dict[frozenset, float]:
    """Joint entropy of every nonempty subset of ``names``."""
    return {frozenset(x): entropy(marginal(dist, x), base) for x in _subsets(names)}


def _inclusion_exclusion(table: Mapping[frozenset, float], names: Sequence[str]) -> float:
    return math.fsum(
        (-1) ** (len(x) + 1) * table[frozenset(x)] for x in _subsets(names)
    )


def _transmissions(table: Mapping[frozenset, float], names: Sequence[str]) -> dict[frozenset, float]:
    return {frozenset(x): _inclusion_exclusion(table, x) for x in _subsets(names)}


def _term_label(names: Iterable[str]) -> str:
    return "H(" + ",".join(names) + ")"


def _explain(table: Mapping[frozenset, float], names: Sequence[str]) -> dict[str, float]:
    return {_term_label(x): table[frozenset(x)] for x in _subsets(names)}


# ---------------------------------------------------------------------------
# entropies


def subset_entropy(dist: JointDistribution, variables: VariableSet, base: float = 2) -> float:
    return entropy(marginal(dist, variables), base)


def _disjoint(dist, *groups) -> list[tuple[str, ...]]:
    out = []
    seen: set[str] = set()
    for g in groups:
        names = _names(dist, g)
        if seen.intersection(names):
            raise OverlappingSets(f"variable sets overlap on {sorted(seen.intersection(names))}")
        seen.update(names)
        out.append(names)
    return out


def conditional_entropy(
    dist: JointDistribution, variables: VariableSet, given: VariableSet, base: float = 2
) -> float:
    """``H(S | G) = H(S u G) - H(G)``."""
    s, g = _disjoint(dist, variables, given)
    h = subset_entropy(dist, s + g, base) - subset_entropy(dist, g, base)
    return _clamp_nonneg(h, f"H({','.join(s)}|{','.join(g)})")


def _sliced_conditional_entropy(dist: JointDistribution, x: str, y: str, base: float) -> float:
    """``H(x | y)`` averaged over the conditional distributions ``p(x | y=v)``."""
    pair = marginal(dist, (x, y))
    py = marginal(pair, y)
    cats = pair.alphabets[1].categories
    return math.fsum(
        p * entropy(slice_condition(pair, {y: cats[cell[0]]}), base)
        for cell, p in py.mass.items()
    )


# ---------------------------------------------------------------------------
# transmissions


def transmission2(dist: JointDistribution, x: str, y: str, base: float = 2) -> float:
    """Mutual information between two variables.

    Evaluated both as ``H(x) - H(x|y)`` (with ``H(x|y)`` averaged over the
    sliced conditionals) and as ``H(x) + H(y) - H(x,y)``; the two must agree.
    """
    if x == y:
        raise IdenticalVariables(f"transmission needs two distinct variables, got {x!r} twice")
    _names(dist, (x, y))
    hx = subset_entropy(dist, x, base)
    hy = subset_entropy(dist, y, base)
    hxy = subset_entropy(dist, (x, y), base)
    additive = hx + hy - hxy
    conditional = hx - _sliced_conditional_entropy(dist, x, y, base)
    if abs(additive - conditional) > IDENTITY_TOL:
        raise PathMismatch(
            f"T({x},{y}): additive form {additive!r} != conditional form {conditional!r}"
        )
    return _clamp_nonneg(additive, f"T({x},{y})")


def conditional_transmission(
    dist: JointDistribution, x: str, y: str, given: VariableSet, base: float = 2
) -> float:
    """``T(x, y | G) = H(x|G) + H(y|G) - H(x,y|G)``."""
    if x == y:
        raise IdenticalVariables(f"transmission needs two distinct variables, got {x!r} twice")
    (xs, ys, g) = _disjoint(dist, x, y, given)
    h = lambda v: subset_entropy(dist, v, base)  # noqa: E731
    value = h(xs + g) + h(ys + g) - h(xs + ys + g) - h(g)
    return _clamp_nonneg(value, f"T({x},{y}|{','.join(g)})")


def transmission_n(dist: JointDistribution, variables: VariableSet, base: float = 2) -> float:
    """Signed N-dimensional transmission (co-information); ``T({x}) = H(x)``."""
    names = _names(dist, variables)
    return _inclusion_exclusion(_entropy_table(dist, names, base), names)


def q_measure(dist: JointDistribution, variables: VariableSet, base: float = 2) -> float:
    """Ashby/Krippendorff ``Q(S) = sum over X of S of (-1)**(1+|S|-|X|) H(X)``.

    The empty subset contributes ``H({}) = 0``.  ``Q(S) = (-1)**|S| T(S)``.
    """
    names = _names(dist, variables)
    table = _entropy_table(dist, names, base)
    n = len(names)
    return math.fsum((-1) ** (1 + n - len(x)) * table[frozenset(x)] for x in _subsets(names))


def excess_entropy(dist: JointDistribution, variables: VariableSet, base: float = 2) -> float:
    """``Y(S)``: joint uncertainty with every overlap counted twice.

    Equal to the sum of ``T(X)`` over all nonempty ``X`` of ``S``, e.g.
    ``Y(1,2) = H(1,2) + 2 T(1,2)``.
    """
    names = _names(dist, variables)
    table = _entropy_table(dist, names, base)
    return math.fsum(_transmissions(table, names).values())


def _redundancy_paths(table, names) -> tuple[float, float]:
    trans = _transmissions(table, names)
    excess = {
        x: math.fsum(trans[frozenset(z)] for z in _subsets(sorted(x, key=names.index)))
        for x in trans
    }
    substituted = math.fsum(
        (-1) ** (len(x) + 1) * (table[x] if len(x) == 1 else excess[x]) for x in trans
    )
    closed = (-1) ** (len(names) + 1) * trans[frozenset(names)]
    return substituted, closed


def mutual_redundancy(dist: JointDistribution, variables: VariableSet, base: float = 2) -> float:
    """Mutual redundancy ``R(S) = (-1)**(|S|+1) * T(S)``.

    Also recomputed by substituting ``Y`` for every joint entropy in the
    inclusion-exclusion sum; :class:`PathMismatch` is raised if the two
    disagree by more than 1e-9.
    """
    names = _names(dist, variables)
    if len(names) < 2:
        raise EmptyVariableSet("mutual redundancy needs at least two variables")
    substituted, closed = _redundancy_paths(_entropy_table(dist, names, base), names)
    if abs(substituted - closed) > IDENTITY_TOL:
        raise PathMismatch(
            f"R({','.join(names)}): substitution {substituted!r} != closed form {closed!r}"
        )
    return closed


def redundancy_fraction(dist: JointDistribution, variables: VariableSet) -> float:
    """Unused share of capacity, ``(H_max - H) / H_max``, on the margin."""
    m = marginal(dist, variables)
    hmax = max_entropy(m)
    if hmax <= 0:
        raise DegenerateAlphabet("every alphabet in the margin is a singleton")
    frac = (hmax - entropy(m)) / hmax
    if frac < -IDENTITY_TOL or frac > 1 + IDENTITY_TOL:
        raise PathMismatch(f"redundancy fraction {frac!r} outside [0, 1]")
    return min(max(frac, 0.0), 1.0)


# ---------------------------------------------------------------------------
# maximum-entropy fitting


def _dense(dist: JointDistribution) -> np.ndarray:
    arr = np.zeros(dist.cardinalities)
    for cell, p in dist.mass.items():
        arr[cell] = p
    return arr


def _from_dense(arr: np.ndarray, like: JointDistribution) -> JointDistribution:
    total = arr.sum()
    mass = {tuple(int(i) for i in idx): float(arr[idx] / total) for idx in zip(*np.nonzero(arr))}
    return JointDistribution(like.alphabets, mass, like.total_observations)


def ipf_fit(
    dist: JointDistribution,
    margin_order: int,
    tolerance: float = IPF_TOLERANCE,
    max_iterations: int = IPF_MAX_ITERATIONS,
) -> IpfResult:
    """Maximum-entropy distribution sharing every ``margin_order``-way margin.

    Iterative proportional fitting from the uniform table: each sweep rescales
    the working table to match each k-way margin in turn.  Cells whose target
    margin is zero become zero and stay zero.  Stops after the first sweep
    whose largest absolute margin deviation is within ``tolerance``.
    """
    n = dist.ndim
    if not isinstance(margin_order, (int, np.integer)) or not 1 <= margin_order < n:
        raise InvalidOrder(f"margin order must be in [1, {n - 1}], got {margin_order!r}")
    if max_iterations < 1:
        raise InputError("max_iterations must be >= 1")

    target = _dense(dist)
    margins = []
    for keep in itertools.combinations(range(n), margin_order):
        drop = tuple(a for a in range(n) if a not in keep)
        margins.append((drop, target.sum(axis=drop, keepdims=True)))

    fitted = np.full(target.shape, 1.0 / target.size)
    error = math.inf
    iterations = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        while iterations < max_iterations:
            iterations += 1
            for drop, want in margins:
                have = fitted.sum(axis=drop, keepdims=True)
                fitted *= np.where(have > 0, want / have, 0.0)
            error = max(
                float(np.abs(fitted.sum(axis=drop, keepdims=True) - want).max())
                for drop, want in margins
            )
            if error <= tolerance:
                break
    converged = error <= tolerance
    log.debug("ipf order=%d iterations=%d error=%.3g", margin_order, iterations, error)
    return IpfResult(_from_dense(fitted, dist), iterations, error, converged)


def _interaction(dist, variables, base, tolerance, max_iterations):
    names = _names(dist, variables)
    if len(names) < 3:
        raise EmptyVariableSet("interaction information needs at least three variables")
    m = marginal(dist, names)
    fit = ipf_fit(m, len(names) - 1, tolerance, max_iterations)
    h_obs = entropy(m, base)
    # IPF iterates stay log-linear in the margins, so the cross-entropy of m
    # against the fit equals H(fit) at convergence and is stationary there:
    # its error is second order in the residual margin mismatch.
    scale = math.log2(base)
    cross = -math.fsum(p * math.log2(fit.fitted.mass[c]) for c, p in m.mass.items()) / scale
    value = cross - h_obs
    if fit.converged:
        value = _clamp_nonneg(value, "interaction information", II_TOL)
    else:
        value = max(value, 0.0)
    return value, fit, cross, h_obs


def interaction_information(
    dist: JointDistribution,
    variables: VariableSet,
    tolerance: float = IPF_TOLERANCE,
    max_iterations: int = IPF_MAX_ITERATIONS,
    base: float = 2,
) -> float:
    """Entropy removed by the top-order interaction among ``variables``.

    The difference between the entropy of the maximum-entropy model that
    matches all (|S|-1)-way margins and the entropy of the observed margin,
    evaluated as the KL divergence of the observed margin from the fit.
    Issues :class:`IpfNotConverged` when the fit did not converge.
    """
    value, fit, _, _ = _interaction(dist, variables, base, tolerance, max_iterations)
    if not fit.converged:
        warnings.warn(
            f"IPF stopped after {fit.iterations} sweeps with margin error {fit.max_margin_error:.3g}",
            IpfNotConverged,
            stacklevel=2,
        )
    return value


# ---------------------------------------------------------------------------
# named dispatch

MEASURES = {
    "entropy": "joint Shannon entropy H(S)",
    "t": "transmission T(S): sum of (-1)^(|X|+1) H(X) over nonempty X of S",
    "q": "Ashby/Krippendorff Q(S) = (-1)^|S| T(S)",
    "r": "mutual redundancy R(S) = (-1)^(|S|+1) T(S)",
    "y": "excess entropy Y(S): sum of T(X) over nonempty X of S",
    "rfrac": "redundancy fraction (H_max - H) / H_max",
    "tcond": "conditional transmission T(x,y|G); --vars x,y --given G",
    "ii": "interaction information against the (|S|-1)-way maximum-entropy model",
}

ALIASES = {
    "h": "entropy",
    "transmission": "t",
    "mutual_information": "t",
    "mutual_redundancy": "r",
    "redundancy": "r",
    "excess_entropy": "y",
    "redundancy_fraction": "rfrac",
    "conditional_transmission": "tcond",
    "interaction_information": "ii",
    "q_measure": "q",
}

SIGN_RULE = "(-1)^(n+1)*T"


def canonical_measure(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in MEASURES:
        raise UnknownMeasure(f"unknown measure {name!r}; choose from {sorted(MEASURES)}")
    return key


def measure_report(
    dist: JointDistribution,
    measure_name: str,
    variables: VariableSet,
    *,
    given: VariableSet = (),
    base: float = 2,
    explain: bool = False,
    tolerance: float = IPF_TOLERANCE,
    max_iterations: int = IPF_MAX_ITERATIONS,
) -> MeasureReport:
    """Evaluate a measure by name and package it as a :class:`MeasureReport`.

    With ``explain`` the report carries every subset entropy the value was
    assembled from (or the two entropies for ``ii`` and ``rfrac``).
    """
    name = canonical_measure(measure_name)
    base = _check_base(base)
    names = _names(dist, variables)
    given_names: tuple[str, ...] = ()
    extra = None
    sign_rule = None
    notes: list[str] = []

    if name == "tcond":
        if len(names) != 2:
            raise InputError("tcond needs exactly two variables in --vars")
        if isinstance(given, str):
            given = (given,)
        if not given:
            raise EmptyVariableSet("tcond needs a nonempty conditioning set")
        given_names = _names(dist, given)
        value = conditional_transmission(dist, names[0], names[1], given_names, base)
        if explain:
            g = given_names
            parts = [names[:1] + g, names[1:] + g, names + g, g]
            extra = {_term_label(p): subset_entropy(dist, p, base) for p in parts}
    elif name == "ii":
        value, fit, cross, h_obs = _interaction(dist, names, base, tolerance, max_iterations)
        if not fit.converged:
            notes.append(
                f"IPF did not converge: {fit.iterations} sweeps, margin error {fit.max_margin_error:.3g}"
            )
        if explain:
            extra = {"cross_entropy": cross, "H_observed": h_obs}
    elif name == "rfrac":
        value = redundancy_fraction(dist, names)
        if explain:
            m = marginal(dist, names)
            extra = {"H": entropy(m, base), "H_max": max_entropy(m, base)}
    else:
        table = _entropy_table(dist, names, base)
        if name == "entropy":
            value = table[frozenset(names)]
        elif name == "t":
            value = transmission_n(dist, names, base)
        elif name == "q":
            value = q_measure(dist, names, base)
        elif name == "y":
            value = excess_entropy(dist, names, base)
        elif name == "r":
            value = mutual_redundancy(dist, names, base)
            sign_rule = SIGN_RULE
        if explain:
            extra = _explain(table, names)

    return MeasureReport(
        measure_name=name,
        variables=names,
        value=value,
        log_base=base,
        observation_count=dist.total_observations,
        extra=extra,
        given=given_names,
        sign_rule=sign_rule,
        warnings=tuple(notes),
    )
