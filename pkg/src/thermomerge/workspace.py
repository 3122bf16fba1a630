"""Workspace coproduct, two-component projection, targeted merge, and the
merge Markov chain.

The coproduct is multiplicative over components.  Per component the choices
are: leave it on the right, extract it whole to the left, or extract a
nonempty set of pairwise-disjoint accessible subtrees (left) and quotient
the remainder (right).  Taking the whole-component choice in every slot
gives the F (x) 1 primitive; taking no extraction anywhere gives 1 (x) F.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .embed import FuncVec, LexEmbedding, embed_tree
from .semiring import ThermoParams
from .syntree import (
    Address,
    SynTree,
    Workspace,
    is_leaf,
    merge,
    quotient_many,
    subtree_at,
)


@dataclass(frozen=True)
class CoproductTerm:
    """Extracted forest (left) paired with the quotient workspace (right)."""

    left: Workspace
    right: Workspace

    def __repr__(self):
        return f"({self.left.key}) (x) ({self.right.key})"


def _disjoint_selections(t: SynTree) -> list:
    """All sets of pairwise vertex-disjoint non-root subtree addresses,
    including the empty set."""

    def below(addr: Address) -> list:
        sub = subtree_at(t, addr)
        own = [(addr,)] if addr != () else []
        if is_leaf(sub):
            return [()] + own
        combos = []
        for s0 in below(addr + (0,)):
            for s1 in below(addr + (1,)):
                combos.append(s0 + s1)
        return combos + own

    return below(())


def _component_choices(t: SynTree) -> list:
    """Per-component coproduct choices as (left trees, right trees) pairs."""
    choices = [((), (t,)), ((t,), ())]
    for sel in _disjoint_selections(t):
        if not sel:
            continue
        extracted = tuple(subtree_at(t, a) for a in sel)
        remainder = quotient_many(t, sel)
        choices.append((extracted, (remainder,) if remainder is not None else ()))
    return choices


def coproduct(f: Workspace) -> List[CoproductTerm]:
    """All coproduct terms of a workspace, one per combination of
    per-component choices (so identical terms can repeat: that repetition
    is the term's multiplicity)."""
    if f.is_unit():
        return [CoproductTerm(f, f)]
    per_comp = [_component_choices(t) for t in f.components]
    terms = []
    for combo in itertools.product(*per_comp):
        left = tuple(itertools.chain.from_iterable(c[0] for c in combo))
        right = tuple(itertools.chain.from_iterable(c[1] for c in combo))
        terms.append(CoproductTerm(Workspace(left), Workspace(right)))
    return terms


def pi2(terms: List[CoproductTerm]) -> List[CoproductTerm]:
    """Keep the terms whose left workspace has exactly two components."""
    return [t for t in terms if len(t.left) == 2]


@dataclass
class WorkspaceSum:
    """Formal sum of workspaces with positive integer multiplicities."""

    terms: dict = field(default_factory=dict)  # key -> (Workspace, multiplicity)

    def add(self, w: Workspace, mult: int = 1) -> None:
        cur = self.terms.get(w.key)
        self.terms[w.key] = (w, (cur[1] if cur else 0) + mult)

    def items(self) -> list:
        return [self.terms[k] for k in sorted(self.terms)]

    def __len__(self):
        return len(self.terms)

    def is_empty(self) -> bool:
        return not self.terms

    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.terms.values())


def merge_chain_step(f: Workspace) -> WorkspaceSum:
    """One application of the merge chain: for every two-component left
    channel T1 | T2 with quotient F', emit merge(T1,T2) | F'."""
    out = WorkspaceSum()
    for term in pi2(coproduct(f)):
        t1, t2 = term.left.components
        out.add(Workspace((merge(t1, t2),) + term.right.components))
    return out


def targeted_merge(f: Workspace, t1: SynTree, t2: SynTree) -> WorkspaceSum:
    """As merge_chain_step, keeping only left channels equal to {t1, t2}."""
    want = Workspace((t1, t2))
    out = WorkspaceSum()
    for term in pi2(coproduct(f)):
        if term.left == want:
            a, b = term.left.components
            out.add(Workspace((merge(a, b),) + term.right.components))
    return out


@dataclass
class MarkovTrajectory:
    states: list
    dead_end: bool = False

    @property
    def steps_taken(self) -> int:
        return len(self.states) - 1


def markov_sample(
    f: Workspace,
    seed: int,
    steps: int,
    weight_fn: Optional[Callable[[Workspace, int], float]] = None,
) -> MarkovTrajectory:
    """Iterate the merge chain, sampling among emitted workspaces with
    probability proportional to multiplicity (or a custom weight hook).

    A state with an empty sum ends the trajectory early and is flagged.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    rng = np.random.default_rng(seed)
    traj = MarkovTrajectory([f])
    cur = f
    for _ in range(steps):
        total = merge_chain_step(cur)
        if total.is_empty():
            traj.dead_end = True
            break
        pairs = total.items()
        weights = np.array(
            [weight_fn(w, m) if weight_fn else float(m) for w, m in pairs], dtype=float
        )
        if not np.all(weights >= 0) or weights.sum() == 0:
            raise ValueError("weight hook must give nonnegative weights with positive sum")
        idx = rng.choice(len(pairs), p=weights / weights.sum())
        cur = pairs[idx][0]
        traj.states.append(cur)
    return traj


def circuit_value(f: Workspace, params: ThermoParams, e: LexEmbedding) -> List[FuncVec]:
    """Evaluate each component pointwise over the embedding; the workspace's
    monomial is represented by this multiset of component values."""
    return [embed_tree(t, params, e) for t in f.components]
