"""Joint probability distributions over categorical variables.

A :class:`JointDistribution` stores probability mass sparsely, keyed by tuples
of category indices (one index per variable).  Cells with zero mass are simply
absent, which makes the ``0 * log 0 = 0`` convention structural: no code path
ever evaluates the log of zero.

All objects are immutable and every operation is a pure function.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from collections.abc import Hashable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Union

from .errors import (
    AllZeroCounts,
    DuplicateVariable,
    EmptyDataset,
    EmptyVariableSet,
    InputError,
    InvalidAlphabet,
    InvalidBase,
    InvalidWeight,
    TupleOutOfAlphabet,
    UnknownVariable,
    ZeroProbabilityCondition,
)

NORMALIZATION_TOL = 1e-12

Category = Hashable
Cell = tuple[int, ...]
VariableSet = Union[str, Sequence[str]]


@dataclass(frozen=True)
class Alphabet:
    """Ordered category labels of one variable."""

    variable: str
    categories: tuple[Category, ...]

    def __post_init__(self):
        if not isinstance(self.variable, str) or not self.variable:
            raise InvalidAlphabet("variable name must be a non-empty string")
        cats = tuple(self.categories)
        object.__setattr__(self, "categories", cats)
        if not cats:
            raise InvalidAlphabet(f"alphabet of {self.variable!r} is empty")
        if len(set(cats)) != len(cats):
            raise InvalidAlphabet(f"alphabet of {self.variable!r} has duplicate labels")

    @property
    def cardinality(self) -> int:
        return len(self.categories)

    def index(self, label: Category) -> int:
        try:
            return self.categories.index(label)
        except ValueError:
            raise TupleOutOfAlphabet(
                f"category {label!r} not in alphabet of {self.variable!r}"
            ) from None


@dataclass(frozen=True)
class JointDistribution:
    """Normalized probability mass over tuples of category indices.

    ``mass`` maps index tuples (one entry per alphabet, in alphabet order) to
    strictly positive probabilities summing to one.
    """

    alphabets: tuple[Alphabet, ...]
    mass: Mapping[Cell, float]
    total_observations: float | None = None
    _axes: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        alphabets = tuple(self.alphabets)
        object.__setattr__(self, "alphabets", alphabets)
        if not alphabets:
            raise EmptyVariableSet("a distribution needs at least one variable")
        names = [a.variable for a in alphabets]
        if len(set(names)) != len(names):
            raise DuplicateVariable(f"duplicate variable names: {names}")
        object.__setattr__(self, "_axes", MappingProxyType({n: i for i, n in enumerate(names)}))

        cards = [a.cardinality for a in alphabets]
        mass = {}
        for cell, p in self.mass.items():
            cell = tuple(cell)
            if len(cell) != len(cards) or any(
                not 0 <= i < c for i, c in zip(cell, cards)
            ):
                raise TupleOutOfAlphabet(f"cell {cell} does not fit alphabets {cards}")
            if not (p > 0 and math.isfinite(p)):
                raise InputError(f"cell {cell} has non-positive mass {p}")
            mass[cell] = float(p)
        if not mass:
            raise AllZeroCounts("distribution has no support")
        total = math.fsum(mass.values())
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise InputError(f"masses sum to {total!r}, not 1")
        object.__setattr__(self, "mass", MappingProxyType(mass))
        if self.total_observations is not None and self.total_observations < 0:
            raise InvalidWeight("total_observations must be nonnegative")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(a.variable for a in self.alphabets)

    @property
    def cardinalities(self) -> tuple[int, ...]:
        return tuple(a.cardinality for a in self.alphabets)

    @property
    def ndim(self) -> int:
        return len(self.alphabets)

    def axis(self, name: str) -> int:
        try:
            return self._axes[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r}") from None

    def alphabet(self, name: str) -> Alphabet:
        return self.alphabets[self.axis(name)]

    def prob(self, labels: Sequence[Category]) -> float:
        """Probability of one cell given by category labels."""
        if len(labels) != self.ndim:
            raise TupleOutOfAlphabet(f"expected {self.ndim} labels, got {len(labels)}")
        cell = tuple(a.index(v) for a, v in zip(self.alphabets, labels))
        return self.mass.get(cell, 0.0)

    def labelled(self) -> dict[tuple, float]:
        """Support as a dict keyed by category-label tuples."""
        return {
            tuple(a.categories[i] for a, i in zip(self.alphabets, cell)): p
            for cell, p in self.mass.items()
        }

    def __len__(self):
        return len(self.mass)


def resolve_axes(dist: JointDistribution, variables: VariableSet) -> tuple[int, ...]:
    """Map a variable set to axis indices, validating it on the way."""
    if isinstance(variables, str):
        variables = (variables,)
    variables = tuple(variables)
    if not variables:
        raise EmptyVariableSet("variable set is empty")
    if len(set(variables)) != len(variables):
        raise DuplicateVariable(f"duplicate variables in {list(variables)}")
    return tuple(dist.axis(v) for v in variables)


def _check_base(base: float) -> float:
    try:
        base = float(base)
    except (TypeError, ValueError):
        raise InvalidBase(f"invalid log base {base!r}") from None
    if not (base > 1 and math.isfinite(base)):
        raise InvalidBase(f"log base must be a finite number > 1, got {base!r}")
    return base


def _log2_base(base: float) -> float:
    return math.log2(_check_base(base))


def build_from_counts(
    counts: Mapping[Any, float],
    alphabets: Sequence[Alphabet],
    *,
    pseudocount: float = 0.0,
) -> JointDistribution:
    """Maximum-likelihood distribution from co-occurrence counts.

    Keys of ``counts`` are tuples of category labels matching ``alphabets``.
    With a single alphabet a bare label is accepted as well.  Counts may be
    fractional.  ``pseudocount`` is added to every cell of the full product
    space before normalizing; ``total_observations`` always reports the raw
    count total.
    """
    alphabets = tuple(alphabets)
    if not alphabets:
        raise EmptyVariableSet("need at least one alphabet")
    if pseudocount < 0 or not math.isfinite(pseudocount):
        raise InvalidWeight(f"pseudocount must be finite and >= 0, got {pseudocount}")
    lookup = [{c: i for i, c in enumerate(a.categories)} for a in alphabets]

    cells: dict[Cell, list[float]] = defaultdict(list)
    for key, count in counts.items():
        if not isinstance(key, tuple):
            key = (key,)
        if len(key) != len(alphabets):
            raise TupleOutOfAlphabet(f"tuple {key!r} has wrong length for {len(alphabets)} variables")
        try:
            cell = tuple(lk[v] for lk, v in zip(lookup, key))
        except KeyError as exc:
            raise TupleOutOfAlphabet(f"tuple {key!r}: label {exc.args[0]!r} not in alphabet") from None
        count = float(count)
        if not (count >= 0 and math.isfinite(count)):
            raise InvalidWeight(f"count for {key!r} must be finite and >= 0, got {count}")
        cells[cell].append(count)

    raw = {cell: math.fsum(v) for cell, v in cells.items()}
    observed = math.fsum(raw.values())
    if observed <= 0:
        raise AllZeroCounts("all counts are zero")

    if pseudocount:
        for cell in itertools.product(*(range(a.cardinality) for a in alphabets)):
            raw[cell] = raw.get(cell, 0.0) + pseudocount
    total = math.fsum(raw.values())
    mass = {cell: c / total for cell, c in raw.items() if c > 0}
    return JointDistribution(alphabets, mass, total_observations=observed)


def from_records(
    dataset,
    variables: VariableSet,
    *,
    weight_column: str | None = None,
    alphabets: Mapping[str, Sequence[Category]] | None = None,
    pseudocount: float = 0.0,
) -> JointDistribution:
    """Count co-occurrences of ``variables`` over the rows of a dataset.

    Alphabets come from ``alphabets`` if given, else from the dataset's
    declared alphabets, else from the observed values in first-appearance
    order.  With ``weight_column`` each row contributes its (nonnegative,
    possibly fractional) weight instead of 1.
    """
    if isinstance(variables, str):
        variables = (variables,)
    variables = tuple(variables)
    if not variables:
        raise EmptyVariableSet("variable set is empty")
    if len(set(variables)) != len(variables):
        raise DuplicateVariable(f"duplicate variables in {list(variables)}")
    if not dataset.rows:
        raise EmptyDataset("dataset has no rows")
    cols = [dataset.column_index(v) for v in variables]
    wcol = dataset.column_index(weight_column) if weight_column is not None else None
    if wcol is not None and wcol in cols:
        raise InputError(f"weight column {weight_column!r} cannot also be analysed")

    declared = dict(getattr(dataset, "alphabets", None) or {})
    if alphabets:
        declared.update(alphabets)

    counts: dict[tuple, float] = defaultdict(float)
    seen: list[dict] = [{} for _ in cols]
    for lineno, row in enumerate(dataset.rows):
        key = tuple(row[c] for c in cols)
        for s, v in zip(seen, key):
            s.setdefault(v, None)
        if wcol is None:
            counts[key] += 1
        else:
            try:
                w = float(row[wcol])
            except ValueError:
                raise InvalidWeight(f"row {lineno}: weight {row[wcol]!r} is not a number") from None
            counts[key] += w

    alpha = tuple(
        Alphabet(v, tuple(declared[v]) if v in declared else tuple(s))
        for v, s in zip(variables, seen)
    )
    return build_from_counts(counts, alpha, pseudocount=pseudocount)


def marginal(dist: JointDistribution, variables: VariableSet) -> JointDistribution:
    """Sum out every variable not in ``variables``; axes follow its order."""
    axes = resolve_axes(dist, variables)
    if axes == tuple(range(dist.ndim)):
        return dist
    groups: dict[Cell, list[float]] = defaultdict(list)
    for cell, p in dist.mass.items():
        groups[tuple(cell[a] for a in axes)].append(p)
    mass = {cell: math.fsum(ps) for cell, ps in groups.items()}
    return JointDistribution(
        tuple(dist.alphabets[a] for a in axes), mass, dist.total_observations
    )


def slice_condition(
    dist: JointDistribution, assignment: Mapping[str, Category]
) -> JointDistribution:
    """Restrict to the cells matching ``assignment`` and renormalize.

    The result ranges over the unassigned variables only.
    """
    if not assignment:
        return dist
    fixed = {dist.axis(v): dist.alphabet(v).index(label) for v, label in assignment.items()}
    free = [a for a in range(dist.ndim) if a not in fixed]
    if not free:
        raise EmptyVariableSet("conditioning on every variable leaves nothing")
    picked = {
        cell: p
        for cell, p in dist.mass.items()
        if all(cell[a] == i for a, i in fixed.items())
    }
    event = math.fsum(picked.values())
    if event <= 0:
        raise ZeroProbabilityCondition(f"event {dict(assignment)!r} has probability zero")
    groups: dict[Cell, list[float]] = defaultdict(list)
    for cell, p in picked.items():
        groups[tuple(cell[a] for a in free)].append(p)
    mass = {cell: math.fsum(ps) / event for cell, ps in groups.items()}
    n = dist.total_observations * event if dist.total_observations is not None else None
    return JointDistribution(tuple(dist.alphabets[a] for a in free), mass, n)


def entropy(dist: JointDistribution, base: float = 2) -> float:
    """Shannon entropy ``-sum p log p`` in units of ``base``."""
    scale = _log2_base(base)
    h = -math.fsum(p * math.log2(p) for p in dist.mass.values())
    return max(h, 0.0) / scale


def max_entropy(dist: JointDistribution, base: float = 2) -> float:
    """Log of the number of cells in the declared product space."""
    scale = _log2_base(base)
    return math.fsum(math.log2(c) for c in dist.cardinalities) / scale


def observed_max_entropy(dist: JointDistribution, base: float = 2) -> float:
    """Like :func:`max_entropy` but counting only categories with support."""
    scale = _log2_base(base)
    used = [set() for _ in range(dist.ndim)]
    for cell in dist.mass:
        for s, i in zip(used, cell):
            s.add(i)
    return math.fsum(math.log2(len(s)) for s in used) / scale


def product(*dists: JointDistribution) -> JointDistribution:
    """Joint distribution of mutually independent components."""
    alphabets = tuple(itertools.chain.from_iterable(d.alphabets for d in dists))
    mass = {}
    for parts in itertools.product(*(d.mass.items() for d in dists)):
        cell = tuple(itertools.chain.from_iterable(c for c, _ in parts))
        mass[cell] = math.prod(p for _, p in parts)
    # products of normalized masses can drift by a few ulps
    total = math.fsum(mass.values())
    return JointDistribution(alphabets, {c: p / total for c, p in mass.items()})


def index_alphabets(cards: Iterable[int], names: Sequence[str]) -> tuple[Alphabet, ...]:
    return tuple(Alphabet(n, tuple(range(k))) for n, k in zip(names, cards))
