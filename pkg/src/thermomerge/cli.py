"""Command-line front door: experiment drivers with deterministic seeding,
CSV/JSON export, and rendered figures alongside the delimited output."""

from __future__ import annotations

import csv
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import plots
from .embed import (
    EmbeddingError,
    SampleGrid,
    generate_embedding,
    high_temp_beta,
    injectivity_audit,
    load_embedding_csv,
    save_embedding_csv,
    wall_crossing_check,
)
from .semiring import RY2, ThermoParams, lambda_min_ry2, parse_measure, successor
from .syntree import (
    Leaf,
    LexItem,
    Lexicon,
    Workspace,
    addr_from_str,
    addr_to_str,
    enumerate_trees,
    first_child_marking,
    internal_addresses,
    parse_tree,
)
from .treeval import argmin_lambda, bracket_eval, bracket_eval_lambda, coeffs, tree_entropy
from .waves import (
    Wave,
    WaveError,
    extraction_errors,
    multibeta_extract,
    sync_tree,
    wave_merge_operator,
    wrap_phase,
)
from .workspace import coproduct, markov_sample

OUTDIR_ENV = "THERMOMERGE_OUTDIR"


def _outdir(path: str | None) -> Path:
    out = Path(path or os.environ.get(OUTDIR_ENV, "thermomerge-out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_config(out: Path, command: str, config: dict) -> None:
    _write_json(out / f"{command}.config.json", {"command": command, **config})


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _tokens_of(text: str) -> list:
    out, cur = [], ""
    for ch in text:
        if ch in "{},":
            if cur.strip():
                out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


def _implicit_lexicon(tree_texts) -> Lexicon:
    ids = []
    for text in tree_texts:
        for tok in _tokens_of(text):
            if tok not in ids:
                ids.append(tok)
    return Lexicon(LexItem(i) for i in ids)


def _load_lexicon(path: str | None, tree_texts=()) -> Lexicon:
    if path is None:
        return _implicit_lexicon(tree_texts)
    if not Path(path).exists():
        raise click.UsageError(f"lexicon file not found: {path}")
    return Lexicon.load(path)


def _load_waves(path: str) -> tuple:
    """Read a combined lexicon+waves JSON document."""
    if not Path(path).exists():
        raise click.UsageError(f"wave lexicon file not found: {path}")
    doc = json.loads(Path(path).read_text())
    lexicon = Lexicon.from_json(doc)
    waves = {k: Wave.from_json(v) for k, v in doc.get("waves", {}).items()}
    missing = [it.id for it in lexicon if it.id not in waves]
    if missing:
        raise click.UsageError(f"items without waves: {missing}")
    return lexicon, waves


measure_option = click.option(
    "--measure", default="ry2", show_default=True, help="shannon, ry2, renyi:A or tsallis:Q"
)
beta_option = click.option("--beta", default=1.0, show_default=True, help="inverse temperature")
outdir_option = click.option(
    "--output-dir", default=None, help=f"output directory (default ${OUTDIR_ENV} or ./thermomerge-out)"
)
figures_option = click.option(
    "--figures/--no-figures", default=True, show_default=True, help="render PNG figures"
)


@click.group()
def main():
    """Thermodynamic-semiring merge toolkit."""


@main.command()
@beta_option
@measure_option
@click.option("--points", default=801, show_default=True)
@click.option("--u-span", default=1.5, show_default=True, help="half-width of the u range")
@click.option("--x-span", default=None, type=float, help="half-width of the x range (default 4/beta)")
@outdir_option
@figures_option
def semiring(beta, measure, points, u_span, x_span, output_dir, figures):
    """Tabulate the minimizer curve and the successor function."""
    if points < 3 or u_span <= 0 or (x_span is not None and x_span <= 0):
        raise click.UsageError("points must be >= 3 and spans positive")
    m = parse_measure(measure)
    params = ThermoParams(m, beta)
    out = _outdir(output_dir)
    x_span = x_span if x_span is not None else 4.0 / beta

    us = np.linspace(-u_span, u_span, points)
    lam = np.array([lambda_min_ry2(0.0, 2.0 * u / beta, beta) for u in us])
    _write_csv(out / "lambda_min.csv", ["u", "lambda_min"], [(repr(float(u)), repr(float(l))) for u, l in zip(us, lam)])

    xs = np.linspace(-x_span, x_span, points)
    ups = np.array([successor(params, x) for x in xs])
    _write_csv(out / "successor.csv", ["x", "upsilon"], [(repr(float(x)), repr(float(v))) for x, v in zip(xs, ups)])

    if figures:
        plots.save_curve(out / "lambda_min.png", us, {"lambda_min(u)": lam}, "u", "lambda_min",
                         "Minimizing weight vs u (kinks only at |u|=1)")
        plots.save_curve(out / "successor.png", xs, {"successor(x)": ups}, "x", "x (+) 0",
                         f"Successor function, {m}, beta={beta:g}")
    _write_config(out, "semiring", {"beta": beta, "measure": str(m), "points": points,
                                    "u_span": u_span, "x_span": x_span})
    click.echo(f"semiring tables written to {out}")


@main.command("eval")
@click.argument("tree_text")
@click.option("--xs", "xs_spec", required=True, help="JSON object or @file with leaf values by item id")
@click.option("--lexicon", "lexicon_path", default=None, help="lexicon JSON (default: ids from the tree)")
@beta_option
@measure_option
@outdir_option
def eval_cmd(tree_text, xs_spec, lexicon_path, beta, measure, output_dir):
    """Evaluate a bracketed tree: value, optimal weights, tree entropy."""
    lexicon = _load_lexicon(lexicon_path, [tree_text])
    t = parse_tree(tree_text, lexicon)
    raw = Path(xs_spec[1:]).read_text() if xs_spec.startswith("@") else xs_spec
    try:
        xs = {k: float(v) for k, v in json.loads(raw).items()}
    except (json.JSONDecodeError, AttributeError) as err:
        raise click.UsageError(f"cannot parse --xs: {err}")
    params = ThermoParams(parse_measure(measure), beta)
    value = bracket_eval(t, params, xs)
    lam = argmin_lambda(t, params, xs)
    report = {"tree": t.key, "value": value, "beta": beta, "measure": str(params.measure),
              "optimal_lambda": {addr_to_str(a): float(v) for a, v in lam.items()}}
    if internal_addresses(t):
        marking = first_child_marking(t)
        a = coeffs(t, marking, lam)
        if all(p > 0 for p in a.values()):
            s_t = tree_entropy(t, params.measure, a)
            report["leaf_distribution"] = {addr_to_str(k): v for k, v in a.items()}
            report["tree_entropy"] = s_t
            report["lambda_check"] = bracket_eval_lambda(t, params, xs, lam)
    out = _outdir(output_dir)
    _write_json(out / "eval.json", report)
    _write_config(out, "eval", {"tree": tree_text, "beta": beta, "measure": measure})
    click.echo(json.dumps(report, indent=2, sort_keys=True))


@main.command("gen-trees")
@click.argument("labels", nargs=-1, required=True)
@click.option("--cap", default=7, show_default=True)
@outdir_option
def gen_trees(labels, cap, output_dir):
    """Enumerate all distinct unordered binary trees over the labels."""
    try:
        trees = enumerate_trees([LexItem(l) for l in labels], cap=cap)
    except Exception as err:
        raise click.UsageError(str(err))
    out = _outdir(output_dir)
    (out / "gen_trees.txt").write_text("".join(t.key + "\n" for t in trees))
    _write_config(out, "gen-trees", {"labels": list(labels), "cap": cap, "count": len(trees)})
    for t in trees:
        click.echo(t.key)
    click.echo(f"{len(trees)} trees")


@main.command("embed")
@click.option("--lexicon", "lexicon_path", default=None, help="lexicon JSON")
@click.option("--items", default=4, show_default=True, help="item count when no lexicon file")
@click.option("--samples", default=256, show_default=True)
@click.option("--modes", default=5, show_default=True)
@click.option("--amplitude", default=1.0, show_default=True)
@click.option("--seed", default=42, show_default=True)
@outdir_option
def embed_cmd(lexicon_path, items, samples, modes, amplitude, seed, output_dir):
    """Generate a random-Fourier lexicon embedding and write it as CSV."""
    if lexicon_path is not None:
        lexicon = _load_lexicon(lexicon_path)
    else:
        lexicon = Lexicon(LexItem(f"w{i}") for i in range(1, items + 1))
    e = generate_embedding(lexicon, SampleGrid(samples), modes=modes, amplitude=amplitude, seed=seed)
    m, beta_bound = high_temp_beta(e)
    out = _outdir(output_dir)
    save_embedding_csv(e, out / "embedding.csv")
    _write_config(out, "embed", {"items": [i.id for i in lexicon], "samples": samples,
                                 "modes": modes, "amplitude": amplitude, "seed": seed,
                                 "sup_norm": m, "beta_bound": beta_bound})
    click.echo(f"embedding.csv written; sup-norm {m:g}, high-temperature bound {beta_bound:g}")


@main.command()
@click.option("--embedding", "embedding_path", default=None, help="embedding CSV to audit")
@click.option("--items", default=4, show_default=True)
@click.option("--samples", default=256, show_default=True)
@click.option("--modes", default=5, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--n-max", default=4, show_default=True)
@click.option("--beta", default=None, type=float, help="default: half the high-temperature bound")
@measure_option
@click.option("--threshold", default=1e-9, show_default=True)
@click.option("--threads", default=1, show_default=True, help="parallel audit workers")
@outdir_option
@figures_option
def audit(embedding_path, items, samples, modes, seed, n_max, beta, measure, threshold,
          threads, output_dir, figures):
    """Injectivity audit plus the single-rotation wall-crossing check."""
    try:
        if embedding_path is not None:
            e = load_embedding_csv(embedding_path)
        else:
            lexicon = Lexicon(LexItem(f"w{i}") for i in range(1, items + 1))
            e = generate_embedding(lexicon, SampleGrid(samples), modes=modes, seed=seed)
    except EmbeddingError as err:
        click.echo(f"embedding rejected: {err}", err=True)
        sys.exit(1)
    m = parse_measure(measure)
    _, beta_bound = high_temp_beta(e)
    beta = beta if beta is not None else 0.5 * beta_bound
    params = ThermoParams(m, beta)
    report = injectivity_audit(e, params, n_max=n_max, threshold=threshold, threads=threads)
    wall = wall_crossing_check(e, params, e.items()[: min(5, len(e.items()))])
    wall_ok = wall.sup_gap <= 1e-8 if m.is_shannon else wall.sup_gap > wall.threshold
    doc = {"injectivity": report.to_json(), "wall_crossing": wall.to_json(),
           "wall_ok": wall_ok, "beta": beta}
    out = _outdir(output_dir)
    _write_json(out / "audit.json", doc)
    if figures:
        plots.save_gap_bars(out / "audit.png",
                            [s.n_leaves for s in report.per_size],
                            [s.min_gap for s in report.per_size],
                            threshold, "Minimum pairwise separation per size")
    _write_config(out, "audit", {"items": items, "samples": samples, "seed": seed,
                                 "n_max": n_max, "beta": beta, "measure": str(m),
                                 "threshold": threshold, "threads": threads,
                                 "embedding": embedding_path})
    ok = report.passed and wall_ok
    click.echo(f"injectivity: {'pass' if report.passed else 'FAIL'} (min gap {report.min_gap:.3g}); "
               f"wall crossing: {'pass' if wall_ok else 'FAIL'} (gap {wall.sup_gap:.3g})")
    if not ok:
        sys.exit(1)


@main.command("coproduct")
@click.argument("trees", nargs=-1, required=True)
@click.option("--lexicon", "lexicon_path", default=None)
@outdir_option
def coproduct_cmd(trees, lexicon_path, output_dir):
    """Dump all coproduct terms of a workspace."""
    lexicon = _load_lexicon(lexicon_path, trees)
    ws = Workspace(tuple(parse_tree(s, lexicon) for s in trees))
    terms = coproduct(ws)
    doc = {"workspace": ws.key, "n_terms": len(terms),
           "terms": [{"left": [t.key for t in c.left.components],
                      "right": [t.key for t in c.right.components]} for c in terms]}
    out = _outdir(output_dir)
    _write_json(out / "coproduct.json", doc)
    _write_config(out, "coproduct", {"trees": list(trees)})
    click.echo(f"{len(terms)} coproduct terms written to {out / 'coproduct.json'}")


@main.command()
@click.argument("trees", nargs=-1, required=True)
@click.option("--steps", default=3, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--lexicon", "lexicon_path", default=None)
@outdir_option
def markov(trees, steps, seed, lexicon_path, output_dir):
    """Sample a merge-chain trajectory from a starting workspace."""
    lexicon = _load_lexicon(lexicon_path, trees)
    ws = Workspace(tuple(parse_tree(s, lexicon) for s in trees))
    traj = markov_sample(ws, seed=seed, steps=steps)
    doc = {"start": ws.key, "steps_requested": steps, "seed": seed,
           "dead_end": traj.dead_end,
           "trajectory": [[t.key for t in w.components] for w in traj.states]}
    out = _outdir(output_dir)
    _write_json(out / "markov.json", doc)
    _write_config(out, "markov", {"trees": list(trees), "steps": steps, "seed": seed})
    for w in traj.states[1:]:
        click.echo(w.key)
    if traj.dead_end:
        click.echo(f"dead end after {traj.steps_taken} steps")


@main.command("wave-merge")
@click.option("--waves", "waves_path", required=True, help="lexicon+waves JSON")
@click.argument("trees", nargs=-1, required=True)
@click.option("--t1", default=None, help="first component (default: first in workspace)")
@click.option("--t2", default=None, help="second component (default: second in workspace)")
@beta_option
@click.option("--tol", default=1e-3, show_default=True)
@outdir_option
@figures_option
def wave_merge(waves_path, trees, t1, t2, beta, tol, output_dir, figures):
    """Merge two workspace components at the wave level and check the diagram."""
    lexicon, waves = _load_waves(waves_path)
    ws = Workspace(tuple(parse_tree(s, lexicon) for s in trees))
    if len(ws) < 2:
        raise click.UsageError("need at least two components")
    t1_tree = parse_tree(t1, lexicon) if t1 else ws.components[0]
    t2_tree = parse_tree(t2, lexicon) if t2 else ws.components[1]
    params = ThermoParams(RY2, beta)
    try:
        res = wave_merge_operator(ws, t1_tree, t2_tree, params, waves)
    except WaveError as err:
        raise click.ClickException(str(err))
    out = _outdir(output_dir)
    _write_csv(out / "wave_merge_signal.csv", ["t", "value"],
               [(repr(float(a)), repr(float(b))) for a, b in zip(res.times, res.signal)])
    _write_csv(out / "wave_merge_signal_after.csv", ["t", "value"],
               [(repr(float(a)), repr(float(b))) for a, b in zip(res.new_times, res.new_signal)])
    doc = {"workspace": ws.key, "merged": res.merged_tree.key,
           "new_workspace": res.workspace.key,
           "recovered_phases": res.recovered_phases,
           "merged_phase": res.merged_phase,
           "merged_frequency": str(res.merged_frequency),
           "symbolic_phase": res.symbolic_phase,
           "diagram_delta": res.diagram_delta}
    _write_json(out / "wave_merge.json", doc)
    if figures:
        plots.save_signal(out / "wave_merge.png", res.times,
                          {"before": (res.times, res.signal),
                           "after": (res.new_times, res.new_signal)},
                          "Workspace product wave, before/after merge")
    _write_config(out, "wave-merge", {"trees": list(trees), "beta": beta, "tol": tol,
                                      "waves": waves_path})
    click.echo(f"merged {t1_tree.key} with {t2_tree.key}: phase {res.merged_phase:.6f}, "
               f"diagram delta {res.diagram_delta:.3g}")
    if res.diagram_delta > tol:
        sys.exit(1)


@main.command("wave-extract")
@click.option("--waves", "waves_path", required=True, help="lexicon+waves JSON")
@click.argument("tree_text")
@click.option("--betas", "betas_json", default=None,
              help="JSON object node-path -> beta (default: auto-assigned distinct values)")
@click.option("--tol", default=1e-3, show_default=True)
@outdir_option
def wave_extract(waves_path, tree_text, betas_json, tol, output_dir):
    """Round-trip: synchronize a tree, recover every accessible term's phase."""
    lexicon, waves = _load_waves(waves_path)
    t = parse_tree(tree_text, lexicon)
    internals = internal_addresses(t)
    if not internals:
        raise click.UsageError("tree has no internal nodes to extract")
    if betas_json:
        doc = json.loads(betas_json)
        betas = {addr_from_str(k): float(v) for k, v in doc.items()}
    else:
        betas = {a: 0.45 / (1 + 0.35 * i) for i, a in enumerate(sorted(internals))}
    params = ThermoParams(RY2, max(betas.values()))
    freqs = {it.id: waves[it.id].frequency for it in lexicon}

    def observed(assignment):
        return sync_tree(t, waves, params, node_betas=assignment).nodes[()].phase

    report = multibeta_extract(t, betas, observed, freqs, tol=tol)
    truth = sync_tree(t, waves, params, node_betas=betas)
    errs = extraction_errors(report, {a: n.phase for a, n in truth.nodes.items()})
    rows, max_err = [], 0.0
    for addr in sorted(report.phases, key=lambda a: (len(a), a)):
        err = errs[addr]
        max_err = max(max_err, err)
        rows.append({"node": addr_to_str(addr), "recovered": report.phases[addr],
                     "true": truth.nodes[addr].phase, "error": err})
    out = _outdir(output_dir)
    _write_json(out / "wave_extract.json",
                {"tree": t.key, "betas": {addr_to_str(a): b for a, b in betas.items()},
                 "nodes": rows, "max_error": max_err,
                 "ambiguous_cherries": [addr_to_str(a) for a in report.ambiguous_cherries]})
    _write_config(out, "wave-extract", {"tree": tree_text, "tol": tol, "waves": waves_path})
    click.echo(f"max recovery error {max_err:.3g} over {len(rows)} nodes")
    if max_err > tol:
        sys.exit(1)


@main.command()
@click.option("--lexicon", "waves_path", default="data/demo_lexicon.json", show_default=True,
              help="lexicon+waves JSON")
@click.option("--steps", default=3, show_default=True)
@click.option("--seed", default=7, show_default=True)
@beta_option
@outdir_option
def pipeline(waves_path, steps, seed, beta, output_dir):
    """Full demo: waves, synchronization, extraction, products, recovery, merge."""
    lexicon, waves = _load_waves(waves_path)
    params = ThermoParams(RY2, beta)
    out = _outdir(output_dir)
    ids = [it.id for it in lexicon]
    if len(ids) < 3:
        raise click.UsageError("pipeline demo needs at least 3 items")
    stages, failed = [], False

    def stage(name, ok, detail):
        nonlocal failed
        stages.append({"stage": name, "ok": bool(ok), "detail": detail})
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        failed = failed or not ok

    stage("lexicon", len(ids) >= 3, f"{len(ids)} items with waves")

    a, b, c = (Leaf(lexicon[i]) for i in ids[:3])
    from .syntree import merge as tree_merge

    demo_tree = tree_merge(a, tree_merge(b, c))
    internals = internal_addresses(demo_tree)
    betas = {ad: 0.45 / (1 + 0.35 * i) for i, ad in enumerate(sorted(internals))}
    freqs = {it.id: waves[it.id].frequency for it in lexicon}

    def observed(assignment):
        return sync_tree(demo_tree, waves, params, node_betas=assignment).nodes[()].phase

    truth = sync_tree(demo_tree, waves, params, node_betas=betas)
    try:
        rep = multibeta_extract(demo_tree, betas, observed, freqs)
        err = max(
            extraction_errors(rep, {a: n.phase for a, n in truth.nodes.items()}).values()
        )
        stage("sync+extract", err <= 1e-3, f"{demo_tree.key}: max phase error {err:.2e}")
    except WaveError as exc:
        stage("sync+extract", False, str(exc))

    ws = Workspace((a, tree_merge(b, c)))
    try:
        res = wave_merge_operator(ws, ws.components[0], ws.components[1], params, waves)
        sync_parts = {t.key: (t.item.label if hasattr(t, "item") else "") for t in ws.components}
        deltas = []
        for comp in ws.components:
            from .waves import component_representative

            true_ph = wrap_phase(component_representative(comp, waves, params).phase)
            deltas.append(abs(res.recovered_phases[comp.key] - true_ph))
        stage("product+fft", max(deltas) <= 1e-3,
              f"workspace {ws.key}: max component phase error {max(deltas):.2e}")
        stage("diagram", res.diagram_delta <= 1e-3,
              f"recover-then-merge vs symbolic: delta {res.diagram_delta:.2e}")
    except WaveError as exc:
        stage("product+fft", False, str(exc))
        stage("diagram", False, "skipped")

    start = Workspace(tuple(Leaf(lexicon[i]) for i in ids[:3]))
    traj = markov_sample(start, seed=seed, steps=steps)
    for w in traj.states[1:]:
        click.echo(f"  markov: {w.key}")
    stage("markov", traj.steps_taken == steps or traj.dead_end,
          f"{traj.steps_taken} steps from {start.key}" + (" (dead end)" if traj.dead_end else ""))

    _write_json(out / "pipeline.json", {"stages": stages, "beta": beta, "seed": seed})
    _write_config(out, "pipeline", {"lexicon": waves_path, "steps": steps, "seed": seed,
                                    "beta": beta})
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
