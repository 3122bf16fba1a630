"""Tree-bracketed semiring evaluation, leaf coefficient polynomials evaluated
at a point, tree-shaped entropy, and per-node optimal weights.

Leaf values are keyed by lexical-item id (ids are unique, so repetitions are
distinct keys) and may be scalars or numpy arrays; array values evaluate the
whole bracket pointwise.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from .semiring import InfoMeasure, ThermoParams, argmin_oplus, entropy, oplus
from .syntree import (
    Address,
    HeadMarking,
    SynTree,
    TreeError,
    internal_addresses,
    is_leaf,
    leaf_addresses,
)


def _check_lambda(t: SynTree, lam: Mapping[Address, float]) -> None:
    need = set(internal_addresses(t))
    have = set(map(tuple, lam))
    missing = need - have
    if missing:
        raise TreeError(f"lambda assignment missing nodes {sorted(missing)}")
    for a in need:
        v = lam[a]
        if not (0.0 <= v <= 1.0):
            raise TreeError(f"lambda at {a} outside [0,1]: {v}")


def _leaf_value(t: SynTree, xs: Mapping[str, object]):
    try:
        return xs[t.item.id]
    except KeyError:
        raise TreeError(f"no value for leaf item {t.item.id!r}") from None


def coeffs(t: SynTree, h: HeadMarking, lam: Mapping[Address, float]) -> dict:
    """Leaf probabilities induced by per-node weights and a head marking.

    Walking from the root, the edge toward the head contributes lambda_v and
    the other edge 1 - lambda_v; the product along the root-to-leaf path is
    that leaf's coefficient.  Returns leaf address -> probability; the values
    sum to 1.
    """
    h.validate(t)
    _check_lambda(t, lam)
    out = {}

    def walk(sub: SynTree, addr: Address, acc: float) -> None:
        if is_leaf(sub):
            out[addr] = acc
            return
        lv = lam[addr]
        toward = h.mark[addr]
        for i, c in enumerate(sub.children):
            factor = lv if i == toward else 1.0 - lv
            walk(c, addr + (i,), acc * factor)

    walk(t, (), 1.0)
    return out


def bracket_eval_lambda(
    t: SynTree,
    params: ThermoParams,
    xs: Mapping[str, object],
    lam: Mapping[Address, float],
):
    """Evaluate the bracket at fixed per-node weights: bottom-up
    ``l*x1 + (1-l)*x2 - S(l)/beta`` with l weighting the canonical-first child."""
    _check_lambda(t, lam)

    def walk(sub: SynTree, addr: Address):
        if is_leaf(sub):
            return np.asarray(_leaf_value(sub, xs), dtype=float)
        lv = lam[addr]
        a = walk(sub.children[0], addr + (0,))
        b = walk(sub.children[1], addr + (1,))
        return lv * a + (1.0 - lv) * b - entropy(params.measure, lv) / params.beta

    out = walk(t, ())
    return float(out) if out.ndim == 0 else out


def bracket_eval(t: SynTree, params: ThermoParams, xs: Mapping[str, object]):
    """Evaluate the bracket with the deformed addition at every internal node.

    Equals the global minimum over all per-node weights of
    ``bracket_eval_lambda`` (the minimizations separate node by node), and is
    invariant under child reordering since the addition is commutative.
    """

    def walk(sub: SynTree):
        if is_leaf(sub):
            v = np.asarray(_leaf_value(sub, xs), dtype=float)
            return float(v) if v.ndim == 0 else v
        a, b = (walk(c) for c in sub.children)
        return oplus(params, a, b)

    return walk(t)


def argmin_lambda(t: SynTree, params: ThermoParams, xs: Mapping[str, object]) -> dict:
    """Per-node minimizing weights, bottom-up; plugging the result into
    bracket_eval_lambda reproduces bracket_eval."""
    lam = {}

    def walk(sub: SynTree, addr: Address):
        if is_leaf(sub):
            v = np.asarray(_leaf_value(sub, xs), dtype=float)
            return float(v) if v.ndim == 0 else v
        a = walk(sub.children[0], addr + (0,))
        b = walk(sub.children[1], addr + (1,))
        lam[addr] = argmin_oplus(params, a, b)
        return oplus(params, a, b)

    walk(t, ())
    return lam


def tree_entropy(t: SynTree, measure: InfoMeasure, a: Mapping[Address, float]) -> float:
    """The tree-shaped n-ary information measure of a leaf distribution.

    Recursively S(l) + l*S_first + (1-l)*S_second where l is the first
    child's share of the subtree mass and child distributions are
    renormalized.  Requires strictly positive leaf mass so the conditionals
    exist.
    """
    want = set(leaf_addresses(t))
    have = set(map(tuple, a))
    if want != have:
        raise TreeError(f"distribution keyed by {sorted(have)}, tree leaves are {sorted(want)}")
    for addr, p in a.items():
        if p <= 0:
            raise TreeError(f"leaf mass at {addr} must be positive, got {p}")
    total = sum(a.values())
    if abs(total - 1.0) > 1e-12:
        raise TreeError(f"leaf distribution sums to {total!r}, not 1")

    def mass(sub: SynTree, addr: Address) -> float:
        if is_leaf(sub):
            return a[addr]
        return sum(mass(c, addr + (i,)) for i, c in enumerate(sub.children))

    def walk(sub: SynTree, addr: Address, total: float) -> float:
        if is_leaf(sub):
            return 0.0
        m0 = mass(sub.children[0], addr + (0,))
        lv = m0 / total
        s0 = walk(sub.children[0], addr + (0,), m0)
        s1 = walk(sub.children[1], addr + (1,), total - m0)
        return float(entropy(measure, min(max(lv, 0.0), 1.0))) + lv * s0 + (1.0 - lv) * s1

    return walk(t, (), mass(t, ()))
