"""Staged betting on decidable events of the binary tree with exact fair odds.

A strategy is asked, per win/loss history, which event it bets on and how
much; knowledge states are tracked as prefix-free cylinder unions, so every
conditional probability and payoff stays an exact rational.  Strategies may
bet on single coordinates out of order (nonmonotonic bit betting) or on
arbitrary cylinder unions; a bet on a fresh coordinate pays the ratio of the
conditional mass of the losing side to the winning side.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bits
from .errors import (
    PreconditionError,
    ResourceLimitError,
    StrategyViolation,
    check_enumeration_depth,
    enumeration_limit,
)
from .martingale import Martingale
from .measure import Measure, from_masses
from .randtests import CylinderSet
from .rationals import ONE, RAT, ZERO


@dataclass(frozen=True)
class BitEvent:
    """The event that coordinate `index` equals `side`."""

    index: int
    side: int

    def describe(self) -> str:
        return f"bit[{self.index}]={self.side}"


@dataclass(frozen=True)
class CylinderEvent:
    """A union of cylinders given by prefix-free generators."""

    generators: tuple

    def describe(self) -> str:
        return "cyl{" + ",".join(self.generators) + "}"


def _set_mass(gens, mu: Measure) -> Fraction:
    return sum((mu.mass(g) for g in gens), ZERO)


def _bit_expansion_guard(gens, index: int):
    # fresh generators shorter than the coordinate get expanded 2^gap-fold
    cost = sum(1 << max(0, index + 1 - len(g)) for g in gens)
    if cost > (1 << enumeration_limit()):
        raise ResourceLimitError(
            f"restricting bit {index} would expand the knowledge set {cost}-fold"
        )


def _split_knowledge(gens, event, mu: Measure):
    """Partition a knowledge set by an event: (win generators, loss generators)."""
    if isinstance(event, BitEvent):
        _bit_expansion_guard(gens, event.index)
        win = bits.restrict_bit(gens, event.index, event.side)
        lose = bits.restrict_bit(gens, event.index, 1 - event.side)
    elif isinstance(event, CylinderEvent):
        win = bits.intersect(gens, event.generators)
        lose = bits.subtract(gens, event.generators)
    else:
        raise PreconditionError(f"unknown event type {type(event).__name__}")
    return win, lose


def _membership(event, x: str):
    """Does the sample with prefix x lie in the event? True/False/None."""
    if isinstance(event, BitEvent):
        if event.index >= len(x):
            return None
        return int(x[event.index]) == event.side
    return bits.member_prefix(event.generators, x)


@dataclass
class KnowledgeState:
    """Information accumulated along a win/loss history."""

    generators: tuple
    mass: Fraction


class BettingStrategy:
    """Base class: subclasses answer bet() with an (event, stake) pair or None.

    Returning None ends betting on that history branch; capital and knowledge
    freeze from then on.
    """

    start_capital = ONE

    def bet(self, history: str, capital: Fraction, knowledge: KnowledgeState, mu: Measure):
        raise NotImplementedError


class NullStrategy(BettingStrategy):
    """Never bets; capital stays put and nothing is learned."""

    def bet(self, history, capital, knowledge, mu):
        return None


class TableStrategy(BettingStrategy):
    """Explicit decision table: history -> (event, stake)."""

    def __init__(self, nodes: dict, start_capital=ONE):
        self.nodes = dict(nodes)
        self.start_capital = RAT(start_capital)

    def bet(self, history, capital, knowledge, mu):
        return self.nodes.get(history)


class BitAllInStrategy(BettingStrategy):
    """Bets the whole current capital on successive coordinates.

    sides is cycled to pick the predicted value of each coordinate; after a
    bust the stakes are zero but knowledge keeps refining bit by bit.
    """

    def __init__(self, sides: str = "0", start_capital=ONE):
        if not sides or any(ch not in "01" for ch in sides):
            raise PreconditionError("sides must be a nonempty binary string")
        self.sides = sides
        self.start_capital = RAT(start_capital)

    def bet(self, history, capital, knowledge, mu):
        k = len(history)
        side = int(self.sides[k % len(self.sides)])
        return (BitEvent(k, side), capital)


class LikelihoodRatioStrategy(BettingStrategy):
    """Monotone bit betting that replicates the model/base quotient martingale."""

    def __init__(self, model: Measure, start_capital=ONE):
        self.model = model
        self.start_capital = RAT(start_capital)
        self._prefixes = {"": ""}

    def _seen_prefix(self, history: str, mu: Measure) -> str:
        got = self._prefixes.get(history)
        if got is not None:
            return got
        k = len(history)
        while history[:k] not in self._prefixes:
            k -= 1
        prefix = self._prefixes[history[:k]]
        for outcome in history[k:]:
            side = self._side(prefix, mu)
            prefix += str(side) if outcome == "1" else str(1 - side)
            k += 1
            self._prefixes[history[:k]] = prefix
        return prefix

    def _ratios(self, prefix: str, mu: Measure):
        out = []
        for b in (0, 1):
            pc = mu.conditional(prefix, b)
            nc = self.model.conditional(prefix, b)
            if pc is None or pc == 0:
                out.append(None)
            else:
                out.append((ZERO if nc is None else nc) / pc)
        return out

    def _side(self, prefix: str, mu: Measure) -> int:
        r0, r1 = self._ratios(prefix, mu)
        if r0 is None or r1 is None:
            raise StrategyViolation(f"base measure degenerate after {prefix!r}")
        return 1 if r1 >= r0 else 0

    def bet(self, history, capital, knowledge, mu):
        prefix = self._seen_prefix(history, mu)
        side = self._side(prefix, mu)
        ratio = self._ratios(prefix, mu)[side]
        p = mu.conditional(prefix, side)
        stake = capital * (ratio - 1) * p / (1 - p)
        return (BitEvent(len(prefix), side), stake)


class DoublingStrategy(BettingStrategy):
    """Bets through the generators of a target cylinder set in order, staking
    exactly enough to lift capital to the target (2) on a win."""

    def __init__(self, target_set: CylinderSet, mu: Measure, target=2, start_capital=ONE):
        self.target_set = target_set
        self.target = RAT(target)
        self.start_capital = RAT(start_capital)
        total = target_set.mass(mu)
        if total > RAT(1, 2):
            raise PreconditionError(f"target set mass {total} exceeds 1/2")
        for g in target_set.generators:
            if mu.mass(g) == 0:
                raise PreconditionError(f"target generator {g!r} has zero mass")

    def bet(self, history, capital, knowledge, mu):
        if "1" in history:
            return None  # already won
        k = len(history)
        gens = self.target_set.generators
        if k >= len(gens):
            return None  # nothing left to chase
        event = CylinderEvent(generators=(gens[k],))
        win_mass = _set_mass(bits.intersect(knowledge.generators, event.generators), mu)
        p = win_mass / knowledge.mass
        stake = (self.target - capital) * p / (1 - p)
        return (event, stake)


def doubling_strategy(target, mu: Measure) -> DoublingStrategy:
    """Build the capital-doubling strategy for a cylinder set of mass <= 1/2."""
    if not isinstance(target, CylinderSet):
        target = CylinderSet.from_strings(target)
    return DoublingStrategy(target, mu)


def kl_payoff(mu: Measure, known, target: int, side: int) -> Optional[Fraction]:
    """Per-unit winnings for betting that coordinate `target` equals `side`
    after the coordinates in `known` (pairs (index, bit)) have been revealed.

    None when the conditioning event or the chosen side is null.
    """
    known = dict(known)
    if target in known:
        raise PreconditionError(f"coordinate {target} was already revealed")
    gens = ("",)
    for index in sorted(known):
        _bit_expansion_guard(gens, index)
        gens = bits.restrict_bit(gens, index, known[index])
    b_mass = _set_mass(gens, mu)
    if b_mass == 0:
        return None
    win = bits.restrict_bit(gens, target, side)
    win_mass = _set_mass(win, mu)
    if win_mass == 0:
        return None
    return (b_mass - win_mass) / win_mass


@dataclass
class _Node:
    history: str
    knowledge: KnowledgeState
    capital: Fraction
    event: object = None
    stake: Optional[Fraction] = None
    conditional: Optional[Fraction] = None
    payoff: Optional[Fraction] = None

    @property
    def terminal(self) -> bool:
        return self.event is None


def _resolve_bet(node: _Node, event, stake, mu: Measure):
    """Validate a bet and compute the win/loss successor data."""
    stake = RAT(stake)
    if stake < 0:
        raise StrategyViolation(f"negative stake {stake} at {node.history!r}")
    if stake > node.capital:
        raise StrategyViolation(f"stake {stake} exceeds capital {node.capital} at {node.history!r}")
    win, lose = _split_knowledge(node.knowledge.generators, event, mu)
    win_mass, lose_mass = _set_mass(win, mu), _set_mass(lose, mu)
    if win_mass == 0 or lose_mass == 0:
        raise StrategyViolation(
            f"bet on a conditionally null or sure event at {node.history!r}: {event.describe()}"
        )
    p = win_mass / node.knowledge.mass
    payoff = lose_mass / win_mass  # = (1-p)/p relative to the knowledge set
    win_node = _Node(
        history=node.history + "1",
        knowledge=KnowledgeState(win, win_mass),
        capital=node.capital + stake * payoff,
    )
    lose_node = _Node(
        history=node.history + "0",
        knowledge=KnowledgeState(lose, lose_mass),
        capital=node.capital - stake,
    )
    return p, payoff, win_node, lose_node


def walk_strategy(strategy: BettingStrategy, mu: Measure, depth: int) -> dict:
    """Expand the full history tree to the given depth.

    Returns a dict history -> node; terminal nodes mark where the strategy
    stopped betting.  Raises StrategyViolation if the strategy breaks the
    no-debt or non-degenerate-event rules anywhere in the tree.
    """
    check_enumeration_depth(depth)
    tree = {}

    def rec(node: _Node):
        tree[node.history] = node
        if len(node.history) >= depth:
            return
        decision = strategy.bet(node.history, node.capital, node.knowledge, mu)
        if decision is None:
            return
        event, stake = decision
        p, payoff, win_node, lose_node = _resolve_bet(node, event, stake, mu)
        node.event, node.stake, node.conditional, node.payoff = event, stake, p, payoff
        rec(win_node)
        rec(lose_node)

    root = _Node(history="", knowledge=KnowledgeState(("",), mu.mass("")), capital=strategy.start_capital)
    rec(root)
    return tree


@dataclass
class PlayResult:
    """One play of a strategy against a concrete sample."""

    history: str
    values: list
    events: list
    knowledge_masses: list
    undetermined: bool = False
    violation: Optional[str] = None

    @property
    def final(self) -> Fraction:
        return self.values[-1]

    @property
    def max_attained(self) -> Fraction:
        return max(self.values)


def play(strategy: BettingStrategy, mu: Measure, x, max_steps: Optional[int] = None) -> PlayResult:
    """Run the strategy against a sample (a bit string, or a rational named
    through binary digits); stops at a win/loss the sample cannot decide."""
    if not isinstance(x, str):
        from .cells import binary_digits

        depth = max_steps if max_steps is not None else enumeration_limit()
        x = binary_digits().resolved_name(x, depth)
    if max_steps is None:
        max_steps = len(x)
    node = _Node(history="", knowledge=KnowledgeState(("",), mu.mass("")), capital=strategy.start_capital)
    values = [node.capital]
    events, masses = [], [node.knowledge.mass]
    for _ in range(max_steps):
        decision = strategy.bet(node.history, node.capital, node.knowledge, mu)
        if decision is None:
            break
        event, stake = decision
        outcome = _membership(event, x)
        if outcome is None:
            return PlayResult(node.history, values, events, masses, undetermined=True)
        try:
            _, _, win_node, lose_node = _resolve_bet(node, event, stake, mu)
        except StrategyViolation as exc:
            return PlayResult(node.history, values, events, masses, violation=str(exc))
        node = win_node if outcome else lose_node
        values.append(node.capital)
        events.append(event.describe())
        masses.append(node.knowledge.mass)
    return PlayResult(node.history, values, events, masses)


def strategy_to_cantor(strategy: BettingStrategy, mu: Measure, depth: int):
    """Reread a strategy as a measure on histories plus a martingale over it.

    The measure gives each history the mass of its knowledge set; beyond a
    terminal node the win branch keeps the whole mass (a stopped gambler
    formally bets on the whole space).  The returned martingale is the
    capital function, fair against that measure.
    """
    tree = walk_strategy(strategy, mu, depth)

    def locate(sigma: str):
        """(node, alive) where alive means sigma only extends wins past the end."""
        k = len(sigma)
        while sigma[:k] not in tree:
            k -= 1
        node = tree[sigma[:k]]
        return node, all(ch == "1" for ch in sigma[k:])

    def mass_fn(sigma: str) -> Fraction:
        node, alive = locate(sigma)
        return node.knowledge.mass if alive else ZERO

    nu = from_masses(mass_fn, label=f"knowledge({type(strategy).__name__})")

    def capital_fn(sigma: str) -> Optional[Fraction]:
        node, alive = locate(sigma)
        return node.capital if alive else None

    mart = Martingale(nu, capital_fn, label=f"capital({type(strategy).__name__})")
    return nu, mart


@dataclass
class StrategyProfile:
    balanced: bool
    exhaustive_trend: Fraction
    bets_audited: int


def classify_strategy(strategy: BettingStrategy, mu: Measure, depth: int) -> StrategyProfile:
    """Balanced iff every audited bet is a conditional-half event; the trend is
    the largest knowledge mass still held at the audit frontier."""
    tree = walk_strategy(strategy, mu, depth)
    balanced = True
    bets = 0
    trend = ZERO
    for node in tree.values():
        if not node.terminal:
            bets += 1
            if node.conditional != Fraction(1, 2):
                balanced = False
        if len(node.history) == depth or (node.terminal and len(node.history) <= depth):
            trend = max(trend, node.knowledge.mass)
    return StrategyProfile(balanced=balanced, exhaustive_trend=trend, bets_audited=bets)


def strategy_to_interval_morphism(strategy: BettingStrategy, mu: Measure, depth: int) -> dict:
    """Map each history's knowledge set to an interval of matching length:
    the root goes to (0,1) and each split hands the loss branch the left part."""
    tree = walk_strategy(strategy, mu, depth)
    intervals = {"": (ZERO, ONE)}

    def rec(history: str):
        node = tree[history]
        if node.terminal or history + "0" not in tree:
            return
        a, b = intervals[history]
        lose_mass = tree[history + "0"].knowledge.mass
        intervals[history + "0"] = (a, a + lose_mass)
        intervals[history + "1"] = (a + lose_mass, b)
        rec(history + "0")
        rec(history + "1")

    rec("")
    return intervals
