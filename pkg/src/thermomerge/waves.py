"""Sinusoidal realization: lexical items as waves, merge as cross-frequency
phase synchronization, accessible-term recovery by inverse-temperature
sweeps, workspace wave products, and FFT phase recovery.

Frequencies are exact rationals so coprime frequency multipliers are exact;
phases are floats and are NOT wrapped mod 2*pi inside the semiring algebra
(the successor branches depend on real ordering).  Wrapping happens only at
signal synthesis and when reporting recovered phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .semiring import LOG2, RY2, ThermoParams, oplus, successor, successor_inverse
from .syntree import (
    Address,
    SynTree,
    Workspace,
    internal_addresses,
    is_leaf,
    merge,
    subtree_at,
)

TWO_PI = 2.0 * math.pi


class WaveError(ValueError):
    pass


class PhaseExtractionError(WaveError):
    """Sweep observations are inconsistent with a single synchronization."""


def wrap_phase(p: float) -> float:
    """Wrap to (-pi, pi]."""
    out = -((-p + math.pi) % TWO_PI - math.pi)
    return out if out != -math.pi else math.pi


@dataclass(frozen=True)
class Wave:
    """A pure sinusoid A*sin(2*pi*nu*t + omega) with exact rational frequency."""

    amplitude: float
    frequency: Fraction
    phase: float

    def __post_init__(self):
        object.__setattr__(self, "frequency", Fraction(self.frequency))
        if self.amplitude <= 0:
            raise WaveError(f"amplitude must be positive, got {self.amplitude}")
        if self.frequency <= 0:
            raise WaveError(f"frequency must be positive, got {self.frequency}")

    def evaluate(self, t) -> np.ndarray:
        return self.amplitude * np.sin(TWO_PI * float(self.frequency) * np.asarray(t) + self.phase)

    def to_json(self) -> dict:
        return {"A": self.amplitude, "nu": str(self.frequency), "omega": self.phase}

    @classmethod
    def from_json(cls, doc: dict) -> "Wave":
        return cls(float(doc["A"]), Fraction(str(doc["nu"])), float(doc["omega"]))


@dataclass(frozen=True)
class WavePacket:
    waves: tuple

    def __post_init__(self):
        ordered = tuple(sorted(self.waves, key=lambda w: (w.frequency, w.amplitude, w.phase)))
        object.__setattr__(self, "waves", ordered)

    def evaluate(self, t) -> np.ndarray:
        out = np.zeros_like(np.asarray(t, dtype=float))
        for w in self.waves:
            out = out + w.evaluate(t)
        return out

    def to_json(self) -> list:
        return [w.to_json() for w in self.waves]


def freq_multipliers(nu1: Fraction, nu2: Fraction) -> tuple:
    """The unique coprime (n12, n21) with n12*nu1 == n21*nu2."""
    nu1, nu2 = Fraction(nu1), Fraction(nu2)
    if nu1 <= 0 or nu2 <= 0:
        raise WaveError(f"frequencies must be positive, got {nu1}, {nu2}")
    ratio = nu2 / nu1
    return ratio.numerator, ratio.denominator


@dataclass(frozen=True)
class SyncNode:
    """Reference frequency and synchronized phase of a subtree; internal
    nodes record the coprime multipliers applied to their children."""

    ref_frequency: Fraction
    phase: float
    multipliers: Optional[tuple] = None


@dataclass
class SyncResult:
    tree: SynTree
    nodes: dict  # Address -> SyncNode
    packet: WavePacket

    @property
    def root(self) -> SyncNode:
        return self.nodes[()]


def sync_pair(w1: Wave, w2: Wave, params: ThermoParams) -> tuple:
    """Cross-frequency synchronization of two sinusoids.

    Scales the phases by the coprime multipliers, locks both onto the
    entropy-optimized common value (n12*w1) (+) (n21*w2), and keeps the
    amplitudes and frequencies unchanged.
    """
    n12, n21 = freq_multipliers(w1.frequency, w2.frequency)
    omega = oplus(params, n12 * w1.phase, n21 * w2.phase)
    packet = WavePacket(
        (
            Wave(w1.amplitude, w1.frequency, omega),
            Wave(w2.amplitude, w2.frequency, omega),
        )
    )
    return omega, packet


def _beta_for(addr: Address, params: ThermoParams, node_betas: Optional[Mapping]) -> float:
    if node_betas is None:
        return params.beta
    try:
        return float(node_betas[addr])
    except KeyError:
        raise WaveError(f"no inverse temperature for node {addr}") from None


def sync_tree(
    t: SynTree,
    lexwaves: Mapping[str, Wave],
    params: ThermoParams,
    node_betas: Optional[Mapping] = None,
) -> SyncResult:
    """Bottom-up synchronization over a tree.

    Each subtree carries (reference frequency, phase); merging children with
    references mu1, mu2 uses the coprime (m1, m2) with m1*mu1 == m2*mu2 and
    phase (m1*w1) (+) (m2*w2) at that node's inverse temperature.  The output
    packet puts the root phase on every leaf sinusoid.
    """
    nodes = {}

    def walk(sub: SynTree, addr: Address) -> SyncNode:
        if is_leaf(sub):
            try:
                w = lexwaves[sub.item.id]
            except KeyError:
                raise WaveError(f"no wave for leaf item {sub.item.id!r}") from None
            node = SyncNode(w.frequency, w.phase)
            nodes[addr] = node
            return node
        left = walk(sub.children[0], addr + (0,))
        right = walk(sub.children[1], addr + (1,))
        m1, m2 = freq_multipliers(left.ref_frequency, right.ref_frequency)
        beta = _beta_for(addr, params, node_betas)
        omega = oplus(
            ThermoParams(params.measure, beta), m1 * left.phase, m2 * right.phase
        )
        node = SyncNode(m1 * left.ref_frequency, omega, (m1, m2))
        nodes[addr] = node
        return node

    root = walk(t, ())
    packet_waves = []
    if is_leaf(t):
        packet_waves.append(lexwaves[t.item.id])
    else:
        for item in _tree_leaf_items(t):
            w = lexwaves[item.id]
            packet_waves.append(Wave(w.amplitude, w.frequency, root.phase))
    return SyncResult(t, nodes, WavePacket(tuple(packet_waves)))


def _tree_leaf_items(t: SynTree):
    if is_leaf(t):
        yield t.item
    else:
        for c in t.children:
            yield from _tree_leaf_items(c)


# -- sweep extraction ----------------------------------------------------------

ROOT_SWEEP = tuple(np.geomspace(1e-3, 5e-2, 12))
DEEP_SWEEP = tuple(np.geomspace(1e-6, 1e-4, 12))


def extract_pair(
    obs: Callable[[float], float],
    betas: Sequence[float] = ROOT_SWEEP,
    tol: float = 1e-6,
) -> tuple:
    """Recover the unordered pair {x, y} from observations of x (+) y across
    an inverse-temperature sweep (collision measure).

    After removing the log(2)/beta pole, the sweep of a single
    synchronization is (x+y)/2 - ((x-y)^2/16) beta + O(beta^3): the linear
    fit supplies the pair mean and gap, a two-point solve plus a
    successor-function inversion refines them, and the residual over the
    whole sweep rejects composite (multi-merge) inputs.  Returns (w1, w2)
    with w2 >= w1.
    """
    bs = np.array(sorted(float(b) for b in betas))
    if len(bs) < 8:
        raise WaveError("need at least 8 sweep points")
    if bs[0] <= 0:
        raise WaveError("sweep betas must be positive")
    vals = np.array([float(obs(b)) for b in bs])
    if not np.all(np.isfinite(vals)):
        raise PhaseExtractionError("non-finite sweep observation")
    g = vals + LOG2 / bs
    design = np.vstack([np.ones_like(bs), bs]).T
    (c0, c1), *_ = np.linalg.lstsq(design, g, rcond=None)

    def ups(delta: float, b: float) -> float:
        return successor(ThermoParams(RY2, b), delta)

    b_lo, b_hi = bs[0], bs[-1]
    edge = -2.0 / b_hi  # interior-branch domain at the stiffest sweep point

    def endpoint_gap(delta: float) -> float:
        # increasing in delta on [edge, 0]; zero at the true gap
        return (vals[0] - ups(delta, b_lo)) - (vals[-1] - ups(delta, b_hi))

    if c1 >= -1e-14 or endpoint_gap(0.0) <= 0.0:
        delta = 0.0
    else:
        lo = max(-8.0 * math.sqrt(-c1), edge * (1 - 1e-12))
        while endpoint_gap(lo) > 0.0 and lo > edge * (1 - 1e-12):
            lo = max(lo * 2.0, edge * (1 - 1e-12))
        hi = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if endpoint_gap(mid) > 0.0:
                hi = mid
            else:
                lo = mid
            if hi - lo < 1e-14:
                break
        delta = 0.5 * (lo + hi)

    x_hi = float(np.mean(vals - np.array([ups(delta, b) for b in bs])))
    for _ in range(3):  # alternate: gap from the reference point, level from the sweep
        xi = min(vals[-1] - x_hi, 0.0)
        delta = successor_inverse(ThermoParams(RY2, b_hi), xi)
        x_hi = float(np.mean(vals - np.array([ups(delta, b) for b in bs])))

    residual = float(np.max(np.abs(vals - x_hi - np.array([ups(delta, b) for b in bs]))))
    if residual > 10.0 * tol:
        raise PhaseExtractionError(
            f"sweep residual {residual:.3g} exceeds {10 * tol:.3g}; "
            "input is not a single synchronization"
        )
    if abs(bs[-1] * delta / 2.0) >= 1.0:
        raise PhaseExtractionError("recovered gap leaves the |u|<1 sweep domain")
    return (x_hi + delta, x_hi)


@dataclass
class ExtractionReport:
    """Phases recovered per vertex address.

    For a cherry over two leaves, which leaf carries which value is not
    observable from root-phase sweeps (the synchronized phase is a symmetric
    function of the scaled pair), so those leaves are assigned ascending in
    canonical child order, the node is listed in ambiguous_cherries, and
    leaf_candidates exposes both consistent assignments.
    """

    phases: dict
    ref_frequencies: dict
    pairs: dict = field(default_factory=dict)  # node -> recovered scaled (lo, hi)
    multipliers: dict = field(default_factory=dict)  # node -> (m1, m2)
    ambiguous_cherries: list = field(default_factory=list)

    def leaf_candidates(self, addr: Address) -> list:
        """Both leaf-phase assignments consistent with the recovered pair at
        an ambiguous cherry: [(child0, child1), (child0', child1')]."""
        lo, hi = self.pairs[addr]
        m1, m2 = self.multipliers[addr]
        return [(lo / m1, hi / m2), (hi / m1, lo / m2)]


def extraction_errors(report: "ExtractionReport", truth: Mapping[Address, float]) -> dict:
    """Per-node recovery errors against reference phases.

    Leaves under an ambiguous cherry are scored as a pair: the error is the
    best candidate assignment's worst leaf (both leaves get that value).
    """
    ambiguous_leaves = {
        c + (i,) for c in report.ambiguous_cherries for i in (0, 1)
    }
    errs = {}
    for addr, ph in report.phases.items():
        if addr not in ambiguous_leaves:
            errs[addr] = abs(ph - truth[addr])
    for c in report.ambiguous_cherries:
        truth_pair = (truth[c + (0,)], truth[c + (1,)])
        pair_err = min(
            max(abs(c0 - truth_pair[0]), abs(c1 - truth_pair[1]))
            for c0, c1 in report.leaf_candidates(c)
        )
        errs[c + (0,)] = pair_err
        errs[c + (1,)] = pair_err
    return errs


def multibeta_extract(
    t: SynTree,
    node_betas: Mapping[Address, float],
    obs: Callable[[Mapping[Address, float]], float],
    lexfreqs: Mapping[str, Fraction],
    tol: float = 1e-6,
) -> ExtractionReport:
    """Recover the phase of every accessible term when each internal node
    carries its own inverse temperature.

    Sweeping one node's beta toward zero drives that subtree's phase to
    -inf, so every enclosing synchronization saturates onto the identity
    branch; the composite then equals the swept subtree's phase times the
    product of the multipliers met on the way up.  Each node is peeled with
    extract_pair on its rescaled sweep.
    """
    if is_leaf(t):
        raise WaveError("nothing to extract from a single leaf")
    internals = internal_addresses(t)
    vals = [float(node_betas[a]) for a in internals]
    if len(set(vals)) != len(vals):
        raise WaveError("per-node inverse temperatures must be pairwise distinct")

    refs: dict = {}
    mults: dict = {}

    def annotate(sub: SynTree, addr: Address) -> Fraction:
        if is_leaf(sub):
            refs[addr] = Fraction(lexfreqs[sub.item.id])
            return refs[addr]
        mu1 = annotate(sub.children[0], addr + (0,))
        mu2 = annotate(sub.children[1], addr + (1,))
        m1, m2 = freq_multipliers(mu1, mu2)
        mults[addr] = (m1, m2)
        refs[addr] = m1 * mu1
        return refs[addr]

    annotate(t, ())

    scale = {(): 1}
    for a in internals:
        m1, m2 = mults[a]
        scale[a + (0,)] = scale[a] * m1
        scale[a + (1,)] = scale[a] * m2

    pairs = {}
    for addr in internals:
        sweep = ROOT_SWEEP if addr == () else DEEP_SWEEP
        last_err = None
        for attempt in range(3):
            window = [b * (1e-2**attempt) for b in sweep]

            def scaled_obs(b: float) -> float:
                assignment = dict(node_betas)
                assignment[addr] = b
                return obs(assignment) / scale[addr]

            try:
                pairs[addr] = extract_pair(scaled_obs, window, tol=tol)
                break
            except PhaseExtractionError as err:  # outer nodes not yet saturated
                last_err = err
        else:
            raise PhaseExtractionError(f"extraction failed at node {addr}: {last_err}")

    report = ExtractionReport(
        phases={}, ref_frequencies=dict(refs), pairs=dict(pairs), multipliers=dict(mults)
    )
    for addr in sorted(internals, key=len, reverse=True):  # deepest first
        lo, hi = pairs[addr]
        beta = float(node_betas[addr])
        report.phases[addr] = oplus(ThermoParams(RY2, beta), lo, hi)
        m1, m2 = mults[addr]
        kids = (addr + (0,), addr + (1,))
        child_is_leaf = [is_leaf(subtree_at(t, k)) for k in kids]
        if not any(child_is_leaf):
            expected = (m1 * report.phases[kids[0]], m2 * report.phases[kids[1]])
            straight = abs(lo - expected[0]) + abs(hi - expected[1])
            crossed = abs(lo - expected[1]) + abs(hi - expected[0])
            if min(straight, crossed) > 100 * tol:
                raise PhaseExtractionError(
                    f"child phases at {addr} do not match the recovered pair"
                )
            # recovered child phases already pin both values; nothing to assign
        elif child_is_leaf == [True, True]:
            report.phases[kids[0]] = lo / m1
            report.phases[kids[1]] = hi / m2
            report.ambiguous_cherries.append(addr)
        else:
            inner = kids[0] if not child_is_leaf[0] else kids[1]
            leaf_addr = kids[1] if inner == kids[0] else kids[0]
            m_inner = m1 if inner == kids[0] else m2
            m_leaf = m2 if inner == kids[0] else m1
            e_inner = m_inner * report.phases[inner]
            leaf_scaled = hi if abs(lo - e_inner) <= abs(hi - e_inner) else lo
            report.phases[leaf_addr] = leaf_scaled / m_leaf
    return report


# -- workspace products and Fourier recovery -----------------------------------


def workspace_wave(waves: Sequence[Wave], t) -> np.ndarray:
    """Pointwise product of one representative sinusoid per component.

    Distinct frequencies are required (recovery from the product is
    ill-posed otherwise); the empty product is the constant 1 signal.
    """
    freqs = [w.frequency for w in waves]
    if len(set(freqs)) != len(freqs):
        raise WaveError(f"duplicate component frequencies {freqs}")
    out = np.ones_like(np.asarray(t, dtype=float))
    for w in waves:
        out = out * w.evaluate(t)
    return out


def _product_lines(freqs: Sequence[Fraction]) -> list:
    """Spectral lines of prod_i sin(theta_i) as (signs, kind, coeff_sign)."""
    k = len(freqs)
    if k == 1:
        return [((1,), "sin", 1)]
    if k == 2:
        return [((1, -1), "cos", 1), ((1, 1), "cos", -1)]
    if k == 3:
        return [
            ((1, 1, -1), "sin", 1),
            ((-1, 1, 1), "sin", 1),
            ((1, -1, 1), "sin", 1),
            ((1, 1, 1), "sin", -1),
        ]
    raise WaveError("phase recovery supports at most 3 factors")


def recovery_grid(freqs: Sequence[Fraction], min_samples: int = 4096) -> np.ndarray:
    """Sample times long enough to resolve every product line on integer
    cycles (>= 2 periods of the slowest line) with ample Nyquist margin."""
    freqs = [Fraction(f) for f in freqs]
    lines = _product_lines(freqs)
    line_freqs = []
    for signs, _, _ in lines:
        f = sum(s * nu for s, nu in zip(signs, freqs))
        if f != 0:
            line_freqs.append(abs(f))
    if not line_freqs:
        raise WaveError("all spectral lines collapse to DC")
    base = 1
    for f in line_freqs:
        base = base * f.denominator // math.gcd(base, f.denominator)
    f_min, f_max = min(line_freqs), max(line_freqs)
    duration = base * max(1, math.ceil(2.0 / (float(f_min) * base)))
    n = max(min_samples, 1 << math.ceil(math.log2(8.0 * float(f_max) * duration + 1)))
    return np.arange(n) * (duration / n)


def fft_phase_recovery(samples: np.ndarray, dt: float, freqs: Sequence[Fraction]) -> list:
    """Read the phases of <= 3 known-frequency sine factors from their product.

    Locates the sum/difference spectral lines, reads their angles, and solves
    the sign-pattern system.  The answer is exact only up to the joint-pi
    flips that leave a sine product invariant (see product_phase_candidates);
    phases are returned in (-pi, pi].
    """
    freqs = [Fraction(f) for f in freqs]
    if len(set(freqs)) != len(freqs):
        raise WaveError(f"duplicate factor frequencies {freqs}")
    samples = np.asarray(samples, dtype=float)
    n = len(samples)
    duration = n * dt
    lines = _product_lines(freqs)
    abs_freqs = []
    for signs, _, _ in lines:
        f = float(sum(s * nu for s, nu in zip(signs, freqs)))
        if abs(f) < 1e-12:
            raise WaveError("a spectral line sits at DC; factors are unresolvable")
        abs_freqs.append(abs(f))
    if len(set(round(f * duration) for f in abs_freqs)) != len(abs_freqs):
        raise WaveError("spectral lines collide; factors are unresolvable")
    spectrum = np.fft.rfft(samples)
    level = max(1.0, float(np.max(np.abs(samples))))

    measured = []
    for (signs, kind, coeff_sign), f_abs in zip(lines, abs_freqs):
        f_signed = float(sum(s * nu for s, nu in zip(signs, freqs)))
        cycles = f_abs * duration
        if abs(cycles - round(cycles)) > 1e-6:
            raise WaveError(f"line at {f_abs} does not sit on a bin (duration {duration})")
        if f_abs >= 0.5 / dt:
            raise WaveError(f"line at {f_abs} violates Nyquist for dt={dt}")
        k = int(round(cycles))
        coeff = spectrum[k]
        if abs(coeff) < 1e-9 * n * level:
            raise WaveError(f"no detectable line at {f_abs}")
        theta = float(np.angle(coeff))
        s_f = 1.0 if f_signed > 0 else -1.0
        if kind == "cos":
            phi = s_f * (theta - (math.pi if coeff_sign < 0 else 0.0))
        else:
            c_eff = coeff_sign * s_f
            phi = s_f * (theta + math.pi / 2.0 - (math.pi if c_eff < 0 else 0.0))
        measured.append((signs, phi))

    k_fac = len(freqs)
    if k_fac == 1:
        return [wrap_phase(measured[0][1])]
    if k_fac == 2:
        d = measured[0][1]
        s = measured[1][1]
        return [wrap_phase((s + d) / 2.0), wrap_phase((s - d) / 2.0)]
    mat = np.array([m[0] for m in measured[:3]], dtype=float)
    rhs = np.array([m[1] for m in measured[:3]])
    sol = np.linalg.solve(mat, rhs)
    return [wrap_phase(p) for p in sol]


def product_phase_candidates(phases: Sequence[float]) -> list:
    """All phase tuples giving the same sine product: flip any even number
    of factors by pi (for one factor, the phase is unambiguous)."""
    k = len(phases)
    base = tuple(wrap_phase(p) for p in phases)
    if k == 1:
        return [base]
    out = [base]
    if k == 2:
        out.append(tuple(wrap_phase(p + math.pi) for p in base))
        return out
    for i in range(k):
        for j in range(i + 1, k):
            flipped = list(base)
            flipped[i] = wrap_phase(flipped[i] + math.pi)
            flipped[j] = wrap_phase(flipped[j] + math.pi)
            out.append(tuple(flipped))
    return out


def resolve_principal(phases: Sequence[float]) -> tuple:
    """Pick, among the product-equivalent candidates, the one with every
    phase in (-pi/2, pi/2]; exact when the true phases lie there.  Falls
    back to the measured candidate otherwise."""
    for cand in product_phase_candidates(phases):
        if all(-math.pi / 2 < p <= math.pi / 2 for p in cand):
            return cand
    return tuple(wrap_phase(p) for p in phases)


# -- the wave-level merge operator ---------------------------------------------


@dataclass
class WaveMergeResult:
    workspace: Workspace
    merged_tree: Optional[SynTree]
    merged_phase: Optional[float]
    merged_frequency: Optional[Fraction]
    symbolic_phase: Optional[float]
    diagram_delta: float
    recovered_phases: dict
    times: np.ndarray
    signal: np.ndarray
    new_times: np.ndarray
    new_signal: np.ndarray

    @property
    def unchanged(self) -> bool:
        return self.merged_tree is None


def component_representative(t: SynTree, lexwaves: Mapping[str, Wave], params: ThermoParams) -> Wave:
    """One sinusoid standing for a component: its reference frequency and
    synchronized root phase (leaf components keep their own amplitude)."""
    if is_leaf(t):
        return lexwaves[t.item.id]
    res = sync_tree(t, lexwaves, params)
    return Wave(1.0, res.root.ref_frequency, res.root.phase)


def wave_merge_operator(
    f: Workspace,
    t1: SynTree,
    t2: SynTree,
    params: ThermoParams,
    lexwaves: Mapping[str, Wave],
) -> WaveMergeResult:
    """Merge two full components at the wave level.

    Synthesizes the workspace product, recovers each component's phase by
    FFT (resolved to the principal branch), locks the chosen pair onto the
    multiplier-scaled deformed sum, and re-emits the product wave of the new
    workspace.  The recovered merge phase is compared against the symbolic
    route (sync the merged tree from the lexicon waves directly).
    """
    from .workspace import targeted_merge

    comps = list(f.components)
    if len(comps) == 0:
        raise WaveError("empty workspace has nothing to merge")
    reps = [component_representative(c, lexwaves, params) for c in comps]
    if targeted_merge(f, t1, t2).is_empty():
        # no two-component channel matches the pair: signal passes through
        times = recovery_grid([w.frequency for w in reps])
        signal = workspace_wave(reps, times)
        return WaveMergeResult(
            workspace=f, merged_tree=None, merged_phase=None, merged_frequency=None,
            symbolic_phase=None, diagram_delta=0.0, recovered_phases={},
            times=times, signal=signal, new_times=times, new_signal=signal,
        )
    keys = [c.key for c in comps]
    try:
        i1 = keys.index(t1.key)
        rest_keys = keys[:i1] + keys[i1 + 1 :]
        i2 = rest_keys.index(t2.key)
        i2 = i2 if i2 < i1 else i2 + 1
    except ValueError:
        raise WaveError(
            "wave-level merge needs t1 and t2 to be full components of the workspace"
        ) from None
    refs = [w.frequency for w in reps]
    times = recovery_grid(refs)
    dt = float(times[1] - times[0])
    signal = workspace_wave(reps, times)
    recovered = resolve_principal(fft_phase_recovery(signal, dt, refs))
    rec_by_key = {c.key: p for c, p in zip(comps, recovered)}

    mu1, mu2 = refs[i1], refs[i2]
    m1, m2 = freq_multipliers(mu1, mu2)
    merged_phase = oplus(params, m1 * recovered[i1], m2 * recovered[i2])
    merged_tree = merge(t1, t2)
    merged_freq = m1 * mu1

    sym = sync_tree(merged_tree, lexwaves, params)
    new_components = tuple(c for j, c in enumerate(comps) if j not in (i1, i2)) + (merged_tree,)
    new_ws = Workspace(new_components)
    new_reps = [
        Wave(1.0, reps[j].frequency, recovered[j])
        for j in range(len(comps))
        if j not in (i1, i2)
    ] + [Wave(1.0, merged_freq, merged_phase)]
    new_times = recovery_grid([w.frequency for w in new_reps])
    new_signal = workspace_wave(new_reps, new_times)
    return WaveMergeResult(
        workspace=new_ws,
        merged_tree=merged_tree,
        merged_phase=merged_phase,
        merged_frequency=merged_freq,
        symbolic_phase=sym.root.phase,
        diagram_delta=abs(merged_phase - sym.root.phase),
        recovered_phases=rec_by_key,
        times=times,
        signal=signal,
        new_times=new_times,
        new_signal=new_signal,
    )
