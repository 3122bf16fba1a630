"""Entropy-deformed tropical addition and its successor function.

The deformed sum is ``x (+) y = min_p { p*x + (1-p)*y - S(p)/beta }`` over
p in [0,1], for a binary information measure S and inverse temperature
beta > 0.  For the second-order Renyi (collision) measure the minimizer has
a closed form; other measures fall back to a seeded golden-section search.
Plain ``+`` is the semiring product; +inf is the additive unit and
saturates the product.

All evaluators accept scalars or numpy arrays (elementwise).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

INF = math.inf
LOG2 = math.log(2.0)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SEED_STEP = 1e-3
_LAMBDA_TOL = 1e-10


class SemiringError(ValueError):
    pass


@dataclass(frozen=True)
class InfoMeasure:
    """Binary information measure: concave on [0,1], symmetric, zero at the ends.

    kind is one of 'shannon', 'renyi' (param=alpha>0, !=1) or 'tsallis'
    (param=q>0, !=1).
    """

    kind: str
    param: Optional[float] = None

    def __post_init__(self):
        if self.kind == "shannon":
            if self.param is not None:
                raise SemiringError("shannon takes no parameter")
        elif self.kind in ("renyi", "tsallis"):
            if self.param is None or self.param <= 0 or self.param == 1.0:
                raise SemiringError(f"{self.kind} needs param > 0 and != 1")
        else:
            raise SemiringError(f"unknown measure kind {self.kind!r}")

    @property
    def is_shannon(self) -> bool:
        return self.kind == "shannon"

    @property
    def is_ry2(self) -> bool:
        return self.kind == "renyi" and self.param == 2.0

    def __str__(self):
        if self.is_shannon:
            return "shannon"
        return f"{self.kind}({self.param:g})"


def shannon() -> InfoMeasure:
    return InfoMeasure("shannon")


def renyi(alpha: float) -> InfoMeasure:
    return InfoMeasure("renyi", float(alpha))


def tsallis(q: float) -> InfoMeasure:
    return InfoMeasure("tsallis", float(q))


RY2 = renyi(2.0)


def parse_measure(text: str) -> InfoMeasure:
    """Parse 'shannon', 'ry2', 'renyi:a' or 'tsallis:q'."""
    t = text.strip().lower()
    if t == "shannon":
        return shannon()
    if t in ("ry2", "renyi2"):
        return RY2
    if ":" in t:
        kind, _, val = t.partition(":")
        if kind == "renyi":
            return renyi(float(val))
        if kind == "tsallis":
            return tsallis(float(val))
    raise SemiringError(f"cannot parse measure {text!r}")


@dataclass(frozen=True)
class ThermoParams:
    """Measure plus inverse temperature; fixes the deformed addition."""

    measure: InfoMeasure = RY2
    beta: float = 1.0

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise SemiringError(f"beta must be finite and positive, got {self.beta}")


def _plogp(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    mask = p > 0
    out[mask] = p[mask] * np.log(p[mask])
    return out


def entropy(measure: InfoMeasure, p):
    """Evaluate the binary measure at probability p (scalar or array)."""
    arr = np.asarray(p, dtype=float)
    if np.any(arr < 0) or np.any(arr > 1):
        raise SemiringError("probability outside [0,1]")
    q = 1.0 - arr
    if measure.is_shannon:
        out = -(_plogp(arr) + _plogp(q))
    elif measure.kind == "renyi":
        a = measure.param
        out = np.log(arr**a + q**a) / (1.0 - a)
    else:  # tsallis
        qq = measure.param
        out = (1.0 - arr**qq - q**qq) / (qq - 1.0)
    return float(out) if np.isscalar(p) or np.asarray(p).ndim == 0 else out


def max_entropy(measure: InfoMeasure) -> float:
    """Maximum of the measure on [0,1]; attained at 1/2 by symmetry+concavity."""
    return float(entropy(measure, 0.5))


def lambda_min_ry2(x, y, beta: float):
    """Closed-form minimizer of F(l) = l*x + (1-l)*y + log(l^2+(1-l)^2)/beta.

    With u = beta*(y-x)/2: clamps to 1 for u >= 1, 0 for u <= -1, and is
    (1 + u - sqrt(1-u^2)) / (2u) in between, evaluated in the equivalent
    cancellation-free form 1/2 + u / (2*(1 + sqrt(1-u^2))).
    """
    x_arr, y_arr = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    u = beta * (y_arr - x_arr) / 2.0
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    lam = np.empty_like(u)
    hi = u >= 1.0
    lo = u <= -1.0
    mid = ~(hi | lo)
    lam[hi] = 1.0
    lam[lo] = 0.0
    um = u[mid]
    lam[mid] = 0.5 + um / (2.0 * (1.0 + np.sqrt(1.0 - um * um)))
    return float(lam[0]) if scalar else lam


def _objective(measure: InfoMeasure, beta: float, x, y, lam):
    return lam * x + (1.0 - lam) * y - entropy(measure, lam) / beta


def _argmin_unit_interval(measure: InfoMeasure, beta: float, x, y):
    """Seeded golden-section minimization of the deformed-sum objective.

    Coarse 1e-3 grid picks the basin, golden section refines to _LAMBDA_TOL.
    Vectorized elementwise over x, y.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    x, y = np.atleast_1d(x), np.atleast_1d(y)
    grid = np.arange(0.0, 1.0 + _SEED_STEP / 2, _SEED_STEP)
    vals = np.stack([_objective(measure, beta, x, y, g) for g in grid])
    best = np.argmin(vals, axis=0)
    lo = grid[np.maximum(best - 1, 0)]
    hi = grid[np.minimum(best + 1, len(grid) - 1)]
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc = _objective(measure, beta, x, y, c)
    fd = _objective(measure, beta, x, y, d)
    while np.max(hi - lo) > _LAMBDA_TOL:
        take_c = fc < fd
        hi = np.where(take_c, d, hi)
        lo = np.where(take_c, lo, c)
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        fc = _objective(measure, beta, x, y, c)
        fd = _objective(measure, beta, x, y, d)
    return (lo + hi) / 2.0


def _oplus_finite(params: ThermoParams, x, y):
    # order the pair so (x,y) and (y,x) run identical instructions:
    # commutativity then holds exactly, not just to rounding
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    scalar = x.ndim == 0 and y.ndim == 0
    lo = np.minimum(x, y)
    hi = np.maximum(x, y)
    if params.measure.is_ry2:
        lam = lambda_min_ry2(lo, hi, params.beta)
        d = lam**2 + (1.0 - lam) ** 2
        # the true minimum never exceeds the boundary value lo; clamping
        # removes the rounding overshoot near |u| = 1
        out = np.minimum(lam * lo + (1.0 - lam) * hi + np.log(d) / params.beta, lo)
        return float(out) if scalar else out
    shape = np.broadcast(lo, hi).shape
    lam = _argmin_unit_interval(params.measure, params.beta, lo, hi)
    out = _objective(params.measure, params.beta, np.atleast_1d(lo), np.atleast_1d(hi), lam)
    out = np.minimum(out, np.atleast_1d(lo))
    return float(out[0]) if scalar else out.reshape(shape)


def oplus(params: ThermoParams, x, y):
    """Deformed addition; +inf is the additive unit."""
    if np.isscalar(x) and np.isscalar(y):
        if x == INF:
            return y
        if y == INF:
            return x
        return float(_oplus_finite(params, x, y))
    return _oplus_finite(params, x, y)


def odot(x, y):
    """Semiring product: ordinary addition, saturating at +inf."""
    if x == INF or y == INF:
        return INF
    return x + y


def argmin_oplus(params: ThermoParams, x, y):
    """The weight the minimizer puts on x in x (+) y."""
    if params.measure.is_ry2:
        return lambda_min_ry2(x, y, params.beta)
    scalar = np.asarray(x).ndim == 0 and np.asarray(y).ndim == 0
    shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
    lam = _argmin_unit_interval(params.measure, params.beta, x, y)
    return float(lam[0]) if scalar else lam.reshape(shape)


def successor(params: ThermoParams, x):
    """x (+) 0, the map that determines the whole addition by distributivity.

    For the collision measure: identity below -2/beta, zero above 2/beta,
    and in between, with u = beta*x/2 and s = sqrt(1-u^2),

        (u - 1 + s + log((1 - s)/u^2)) / beta
            = (u - 1 + s - log(1 + s)) / beta,

    using (1-s)/u^2 = 1/(1+s) to avoid cancellation.  (The whole bracket is
    scaled by 1/beta; that keeps the piecewise branches continuous at
    u = +-1 and makes x (+) y = successor(x-y) + y an identity at every
    beta, verified against direct minimization.)
    """
    if not params.measure.is_ry2:
        return oplus(params, x, 0.0)
    beta = params.beta
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    u = np.atleast_1d(beta * xa / 2.0)
    out = np.empty_like(u)
    lo = u <= -1.0
    hi = u >= 1.0
    mid = ~(lo | hi)
    out[lo] = np.atleast_1d(xa)[lo]
    out[hi] = 0.0
    um = u[mid]
    s = np.sqrt(1.0 - um * um)
    mid_val = (um - 1.0 + s - np.log1p(s)) / beta
    # clamp as in the pairwise sum: the interior value never exceeds
    # min(x, 0), but rounding near |u| = 1 can overshoot
    out[mid] = np.minimum(mid_val, np.minimum(np.atleast_1d(xa)[mid], 0.0))
    return float(out[0]) if scalar else out


def successor_inverse(params: ThermoParams, xi: float, tol: float = 1e-12) -> float:
    """The unique x <= 2/beta with successor(x) == xi, for xi <= 0.

    Identity branch for xi <= -2/beta; otherwise bisection on
    [-2/beta, 2/beta].  Round-trips through successor to ~1e-10.
    """
    if xi > 0:
        raise SemiringError(f"successor range is (-inf, 0], got {xi}")
    beta = params.beta
    edge = 2.0 / beta
    if xi == 0:
        return edge
    if xi <= -edge:
        return xi
    lo, hi = -edge, edge
    # successor is strictly increasing on [-2/beta, 2/beta]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if successor(params, mid) < xi:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ExpansionFit:
    """Least-squares estimates of the low-order sweep coefficients of
    successor(x, beta) + log(2)/beta as a polynomial in beta."""

    c0: float
    c1: float
    c3: float
    residual: float


def beta_expansion_probe(
    x: float,
    betas: Sequence[float],
    measure: InfoMeasure = RY2,
) -> ExpansionFit:
    """Fit successor(x,beta) + log(2)/beta against [1, beta, beta^3].

    Requires every beta in the sweep to satisfy |beta*x/2| < 1 so the
    interior branch is probed.  The closed form gives c0 = x/2 and
    c1 = -x^2/16 (the beta-constant term vanishes only at x = 0).
    """
    bs = np.asarray(sorted(betas), dtype=float)
    if len(bs) < 4:
        raise SemiringError("need at least 4 sweep points")
    if np.any(bs <= 0):
        raise SemiringError("sweep betas must be positive")
    if np.any(np.abs(bs * x / 2.0) >= 1.0):
        raise SemiringError("sweep leaves the |beta*x/2| < 1 domain")
    g = np.array([successor(ThermoParams(measure, b), x) for b in bs]) + LOG2 / bs
    design = np.vstack([np.ones_like(bs), bs, bs**3]).T
    coef, *_ = np.linalg.lstsq(design, g, rcond=None)
    resid = float(np.max(np.abs(design @ coef - g)))
    return ExpansionFit(float(coef[0]), float(coef[1]), float(coef[2]), resid)
