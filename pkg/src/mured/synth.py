"""Canonical test distributions and a brute-force reference oracle.

The generators produce exact distributions (no sampling).  The oracle in
:func:`oracle_measure` recomputes every measure from a fully materialized dense
table with naive loops and bitmask subset enumeration.  It deliberately
shares no marginalization, entropy or subset code with :mod:`mured.measures`.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .distribution import Alphabet, JointDistribution
from .errors import (
    AllCellsZero,
    ArityTooSmall,
    InputError,
    InvalidProbability,
    InvalidSpec,
    TooLargeForOracle,
    UnknownMeasure,
)

KINDS = (
    "parity",
    "independent_uniform",
    "copy_chain",
    "latent_common_cause",
    "random_dirichlet_like",
)

KIND_ALIASES = {
    "independent": "independent_uniform",
    "copy": "copy_chain",
    "latent": "latent_common_cause",
    "random": "random_dirichlet_like",
}

ORACLE_MAX_CELLS = 10**6


def default_names(n: int) -> tuple[str, ...]:
    if n <= 4:
        return tuple("xyzw"[:n])
    return tuple(f"x{i}" for i in range(1, n + 1))


def _alphabets(cards: Sequence[int], names: Sequence[str] | None) -> tuple[Alphabet, ...]:
    names = tuple(names) if names is not None else default_names(len(cards))
    if len(names) != len(cards):
        raise InvalidSpec(f"{len(names)} names for {len(cards)} variables")
    return tuple(Alphabet(v, tuple(range(k))) for v, k in zip(names, cards))


def _cells(cards: Sequence[int]):
    """All index tuples of a product space, last axis fastest."""
    idx = [0] * len(cards)
    total = math.prod(cards)
    for _ in range(total):
        yield tuple(idx)
        for a in reversed(range(len(cards))):
            idx[a] += 1
            if idx[a] < cards[a]:
                break
            idx[a] = 0


def parity(n: int, names: Sequence[str] | None = None) -> JointDistribution:
    """n-1 independent fair bits followed by their XOR."""
    if n < 2:
        raise ArityTooSmall(f"parity needs at least 2 variables, got {n}")
    p = 2.0 ** -(n - 1)
    mass = {bits + (sum(bits) % 2,): p for bits in _cells([2] * (n - 1))}
    return JointDistribution(_alphabets([2] * n, names), mass)


def copy_chain(n: int, card: int = 2, names: Sequence[str] | None = None) -> JointDistribution:
    """n identical copies of one uniform variable with ``card`` categories."""
    if n < 1 or card < 1:
        raise InvalidSpec("copy_chain needs n >= 1 and card >= 1")
    mass = {(v,) * n: 1.0 / card for v in range(card)}
    return JointDistribution(_alphabets([card] * n, names), mass)


def latent_common_cause(noise: float, names: Sequence[str] | None = None) -> JointDistribution:
    """Three noisy copies of a hidden fair bit, with the hidden bit summed out.

    Each observed bit flips independently with probability ``noise``; at 0 the
    result is the copy triple and at 0.5 three independent fair coins.
    """
    noise = float(noise)
    if not 0.0 <= noise <= 1.0:
        raise InvalidProbability(f"noise must lie in [0, 1], got {noise}")
    mass = {}
    for cell in _cells([2, 2, 2]):
        p = 0.0
        for h in (0, 1):
            term = 0.5
            for bit in cell:
                term *= noise if bit != h else 1.0 - noise
            p += term
        if p > 0:
            mass[cell] = p
    return JointDistribution(_alphabets([2, 2, 2], names), mass)


def independent_uniform(cards: Sequence[int], names: Sequence[str] | None = None) -> JointDistribution:
    cards = [int(c) for c in cards]
    if not cards or any(c < 1 for c in cards):
        raise InvalidSpec(f"cardinalities must all be >= 1, got {cards}")
    p = 1.0 / math.prod(cards)
    return JointDistribution(_alphabets(cards, names), {c: p for c in _cells(cards)})


def random_distribution(
    seed: int | None,
    cards: Sequence[int],
    sparsity: float = 0.0,
    names: Sequence[str] | None = None,
) -> JointDistribution:
    """Seeded random distribution; masses are normalized Exp(1) draws.

    A ``sparsity`` fraction of cells (rounded down) is set to zero.
    """
    cards = [int(c) for c in cards]
    if not cards or any(c < 1 for c in cards):
        raise InvalidSpec(f"cardinalities must all be >= 1, got {cards}")
    if not 0.0 <= sparsity < 1.0:
        raise InvalidProbability(f"sparsity must lie in [0, 1), got {sparsity}")
    rng = np.random.default_rng(seed)
    size = math.prod(cards)
    weights = rng.exponential(size=size)
    zeroed = int(math.floor(sparsity * size))
    if zeroed:
        weights[rng.choice(size, zeroed, replace=False)] = 0.0
    total = math.fsum(weights)
    if not total > 0:
        raise AllCellsZero("every cell was zeroed")
    mass = {
        cell: float(w) / total for cell, w in zip(_cells(cards), weights) if w > 0
    }
    return JointDistribution(_alphabets(cards, names), mass)


@dataclass(frozen=True)
class GeneratorSpec:
    kind: str
    arity: int = 3
    cardinalities: tuple[int, ...] | None = None
    noise: float = 0.0
    seed: int | None = None
    sparsity: float = 0.0

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind, self.kind)
        if kind not in KINDS:
            raise InvalidSpec(f"unknown generator kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.cardinalities is not None:
            cards = tuple(int(c) for c in self.cardinalities)
            object.__setattr__(self, "cardinalities", cards)
            object.__setattr__(self, "arity", len(cards))
            if any(c < 1 for c in cards):
                raise InvalidSpec(f"cardinalities must all be >= 1, got {cards}")
        if self.arity < 1:
            raise InvalidSpec(f"arity must be >= 1, got {self.arity}")
        if not 0.0 <= self.noise <= 1.0:
            raise InvalidProbability(f"noise must lie in [0, 1], got {self.noise}")

    def cards(self, default: int = 2) -> tuple[int, ...]:
        return self.cardinalities or (default,) * self.arity


def generate(spec: GeneratorSpec) -> JointDistribution:
    if spec.kind == "parity":
        if spec.cardinalities and set(spec.cardinalities) != {2}:
            raise InvalidSpec("parity variables are binary")
        return parity(spec.arity)
    if spec.kind == "copy_chain":
        cards = set(spec.cards())
        if len(cards) != 1:
            raise InvalidSpec("copy_chain needs one common cardinality")
        return copy_chain(spec.arity, cards.pop())
    if spec.kind == "latent_common_cause":
        if spec.arity != 3 or set(spec.cards()) != {2}:
            raise InvalidSpec("latent_common_cause has exactly three binary variables")
        return latent_common_cause(spec.noise)
    if spec.kind == "independent_uniform":
        return independent_uniform(spec.cards())
    return random_distribution(spec.seed, spec.cards(), spec.sparsity)


# ---------------------------------------------------------------------------
# oracle


def _dense_table(dist: JointDistribution) -> dict[tuple, float]:
    """Every cell of the product space, zero cells included."""
    cards = dist.cardinalities
    if math.prod(cards) > ORACLE_MAX_CELLS:
        raise TooLargeForOracle(
            f"{math.prod(cards)} dense cells exceeds the oracle limit of {ORACLE_MAX_CELLS}"
        )
    table = {}
    for cell in _cells(cards):
        table[cell] = dist.mass.get(cell, 0.0)
    return table


def _project(table: dict[tuple, float], axes: Sequence[int]) -> dict[tuple, float]:
    out: dict[tuple, float] = {}
    for cell, p in table.items():
        key = tuple(cell[a] for a in axes)
        out[key] = out.get(key, 0.0) + p
    return out


def _plain_entropy(table: dict[tuple, float], base: float) -> float:
    h = 0.0
    for p in table.values():
        if p > 0:
            h -= p * math.log(p)
    return h / math.log(base)


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def _members(mask: int, n: int) -> list[int]:
    return [i for i in range(n) if mask >> i & 1]


def _submasks(mask: int):
    """Nonempty submasks of ``mask``."""
    sub = mask
    while sub:
        yield sub
        sub = (sub - 1) & mask


def _maxent_entropy(table: dict[tuple, float], cards: Sequence[int], order: int, base: float) -> float:
    """Entropy of the max-entropy table matching all ``order``-way margins.

    Solved as the dual of the maximum-entropy problem: a log-linear model
    restricted to cells whose margins are all positive, parametrized by an
    orthonormal basis of the margin-indicator row space and fitted by damped
    Newton steps.  Independent of iterative proportional fitting.
    """
    n = len(cards)
    cells = list(_cells(cards))
    t = np.array([table[c] for c in cells])
    feats = []
    for mask in range(1, 1 << n):
        if _popcount(mask) != order:
            continue
        axes = _members(mask, n)
        marg = _project(table, axes)
        for key in marg:
            feats.append(([tuple(c[a] for a in axes) == key for c in cells], marg[key]))
    allowed = np.ones(len(cells), dtype=bool)
    for row, value in feats:
        if value <= 0:
            allowed &= ~np.array(row)
    rows = np.array([row for row, value in feats if value > 0], dtype=float)[:, allowed]
    target = t[allowed]

    u, s, _ = np.linalg.svd(rows.T, full_matrices=False)
    basis = u[:, s > s[0] * 1e-10]
    moments = basis.T @ target
    theta = np.zeros(basis.shape[1])

    def dual(th):
        eta = basis @ th
        top = eta.max()
        return top + math.log(np.exp(eta - top).sum()) - th @ moments

    def probs(th):
        eta = basis @ th
        w = np.exp(eta - eta.max())
        return w / w.sum()

    for _ in range(500):
        p = probs(theta)
        grad = basis.T @ p - moments
        if np.abs(grad).max() < 1e-16:
            break
        weighted = basis * p[:, None]
        hess = basis.T @ weighted - np.outer(basis.T @ p, basis.T @ p)
        step = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        current = dual(theta)
        # slack for roundoff once the dual has flattened out near the optimum
        slack = 1e-14 * max(1.0, abs(current))
        scale = 1.0
        while scale > 1e-12 and dual(theta + scale * step) > current + 1e-4 * scale * (grad @ step) + slack:
            scale *= 0.5
        if scale <= 1e-12:
            break
        theta = theta + scale * step
        if np.abs(scale * step).max() < 1e-15:
            break
    p = probs(theta)
    h = -float(np.sum(p[p > 0] * np.log(p[p > 0])))
    return h / math.log(base)


def oracle_measure(
    dist: JointDistribution,
    measure_name: str,
    variables: Sequence[str],
    given: Sequence[str] = (),
    base: float = 2,
) -> float:
    """Recompute a named measure by dense brute force."""
    from .measures import canonical_measure

    name = canonical_measure(measure_name)
    if isinstance(variables, str):
        variables = (variables,)
    if isinstance(given, str):
        given = (given,)
    if base <= 1:
        raise InputError(f"log base must be > 1, got {base}")
    full = _dense_table(dist)
    picked = list(variables) + list(given)
    if not variables or len(set(picked)) != len(picked):
        raise InputError("variables must be nonempty and disjoint from the conditioning set")
    if given and name != "tcond":
        raise InputError(f"measure {name!r} takes no conditioning set")
    axes = [dist.axis(v) for v in picked]
    table = _project(full, axes)
    m = len(picked)
    k = len(variables)
    cards = [dist.cardinalities[a] for a in axes]

    h = {}
    for mask in range(1, 1 << m):
        h[mask] = _plain_entropy(_project(table, _members(mask, m)), base)
    h[0] = 0.0
    everything = (1 << k) - 1

    def trans(mask):
        return sum((-1) ** (_popcount(sub) + 1) * h[sub] for sub in _submasks(mask))

    if name == "entropy":
        return h[everything]
    if name == "t":
        return trans(everything)
    if name == "q":
        return sum(
            (-1) ** (1 + k - _popcount(sub)) * h[sub] for sub in _submasks(everything)
        )
    if name == "y":
        return sum(trans(sub) for sub in _submasks(everything))
    if name == "r":
        if k < 2:
            raise InputError("mutual redundancy needs at least two variables")
        total = 0.0
        for sub in _submasks(everything):
            if _popcount(sub) == 1:
                joint = h[sub]
            else:
                joint = sum(trans(inner) for inner in _submasks(sub))
            total += (-1) ** (_popcount(sub) + 1) * joint
        return total
    if name == "rfrac":
        hmax = sum(math.log(c) for c in cards[:k]) / math.log(base)
        if hmax <= 0:
            raise InputError("degenerate alphabet")
        return (hmax - h[everything]) / hmax
    if name == "tcond":
        if k != 2 or not given:
            raise InputError("tcond needs two variables and a nonempty conditioning set")
        g = ((1 << m) - 1) ^ everything
        return h[1 | g] + h[2 | g] - h[3 | g] - h[g]
    if name == "ii":
        if k < 3:
            raise InputError("interaction information needs at least three variables")
        return _maxent_entropy(table, cards, k - 1, base) - h[everything]
    raise UnknownMeasure(name)
