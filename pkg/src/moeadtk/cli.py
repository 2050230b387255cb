"""Command-line interface.

Subcommands:
  run       one seeded search run; writes archive, final population, metadata
  evaluate  score a dump file with an indicator under a frame
  select    pick a subset from an archive dump
  tune      offline GA over configuration genomes
  compare   run an experiment plan and emit tables

Frame sources are either ``analytic`` (the problem's true front) or a path to
an objective-only reference file.  Worker count for ``compare`` comes from
--workers or the MOEADTK_WORKERS environment variable.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments, hyperheuristic, presets
from .core import Archive, nondominated_filter, RandomSource
from .indicators import hypervolume_ratio, igd, normalize_for_indicator
from .moead import MoeadConfig, load_config, run_moead, save_config
from .problems import load_reference_file, parse_problem_name
from .subset_selection import distance_based_select, greedy_hv_select, greedy_igd_select


def _frame_and_reference(frame_source: str, problem: str | None, count: int):
    if frame_source == "analytic":
        if not problem:
            raise SystemExit("--frame analytic requires --problem")
        return experiments.true_front_frame(problem, None, count)
    return experiments.true_front_frame(problem or "", frame_source, count)


def _load_objectives(path: str, m: int) -> np.ndarray:
    rows = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) < m:
                raise SystemExit(f"{path}: line has fewer than {m} columns")
            rows.append([float(v) for v in parts[-m:]])
    if not rows:
        raise SystemExit(f"{path}: no data rows")
    return np.asarray(rows)


def _write_points(path, points: np.ndarray) -> None:
    with open(path, "w") as fh:
        for row in points:
            fh.write("\t".join(format(v, ".17g") for v in row) + "\n")


def _cmd_run(args) -> int:
    if args.config:
        config = load_config(args.config)
    elif args.variant:
        if args.variant.lower() in ("auto-fp", "auto-ss"):
            config = presets.tuned_config(args.problem, args.variant.split("-")[1])
        else:
            config = experiments.standard_variant(args.variant)
    else:
        raise SystemExit("provide --config or --variant")
    if args.budget:
        from dataclasses import replace

        config = replace(config, budget=args.budget)
    result = run_moead(args.problem, config, args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    result.archive.dump(out / "archive.txt")
    final = Archive(result.final_population)
    final.dump(out / "final_population.txt")
    save_config(config, out / "config.cfg")
    meta = {
        "problem": result.problem_name,
        "seed": result.seed,
        "budget": config.budget,
        "evaluations": len(result.archive),
        "generations": result.generations,
    }
    (out / "run.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote {len(result.archive)} evaluations to {out}")
    return 0


def _cmd_evaluate(args) -> int:
    spec = parse_problem_name(args.problem) if args.problem else None
    m = spec.m if spec else args.m
    frame, refset = _frame_and_reference(args.frame, args.problem, args.front_samples)
    points = _load_objectives(args.input, m)
    if args.indicator == "hv":
        value = hypervolume_ratio(points, frame)
    else:
        reference = refset
        if args.reference:
            reference = load_reference_file(args.reference)
        value = igd(normalize_for_indicator(points, frame),
                    normalize_for_indicator(reference.points, frame))
    print(format(value, ".10g"))
    return 0


def _cmd_select(args) -> int:
    spec = parse_problem_name(args.problem) if args.problem else None
    m = spec.m if spec else args.m
    points = _load_objectives(args.input, m)
    front = points[nondominated_filter(points)]
    if args.method == "distance":
        rng = RandomSource(args.seed).generator
        picked = distance_based_select(front, args.k, rng)
    else:
        frame, refset = _frame_and_reference(args.frame, args.problem,
                                             args.front_samples)
        if args.method == "greedy-hv":
            picked = greedy_hv_select(front, args.k, frame)
        else:
            reference = load_reference_file(args.reference) if args.reference else refset
            picked = greedy_igd_select(front, args.k, reference, frame)
    _write_points(args.out, front[picked])
    print(f"selected {len(picked)} of {front.shape[0]} non-dominated points -> {args.out}")
    return 0


def _cmd_tune(args) -> int:
    tuner = hyperheuristic.TunerConfig(
        mu=args.mu,
        generations=args.generations,
        runs_per_fitness=args.runs,
        framework=args.framework,
        inner_budget=args.budget,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []

    def progress(entry):
        rows.append(entry)
        print(f"generation {entry.generation}: best {entry.best_fitness:.4f} "
              f"mean {entry.mean_fitness:.4f}")

    result = hyperheuristic.tune_moead(args.problem, tuner, args.seed,
                                       progress=progress)
    (out / "best_genome.txt").write_text(result.best_genome.bits + "\n")
    save_config(result.best_config, out / "best_config.cfg")
    described = hyperheuristic.describe_config(result.best_config)
    lines = ["field\tvalue"] + [f"{k}\t{v}" for k, v in described.items()]
    (out / "best_config.tsv").write_text("\n".join(lines) + "\n")
    with open(out / "generations.csv", "w") as fh:
        fh.write("generation,best_fitness,mean_fitness,frame_ideal,frame_nadir,"
                 "evaluated_configs\n")
        for entry in rows:
            ideal = " ".join(format(v, ".10g") for v in entry.frame_ideal)
            nadir = " ".join(format(v, ".10g") for v in entry.frame_nadir)
            fh.write(f"{entry.generation},{entry.best_fitness!r},"
                     f"{entry.mean_fitness!r},{ideal},{nadir},"
                     f"{entry.evaluated_configs}\n")
    print(f"best fitness {result.best_fitness:.4f}; outputs in {out}")
    return 0


def _variant_config(name: str, problem: str) -> MoeadConfig:
    lowered = name.lower()
    if lowered in ("auto-fp", "auto-ss"):
        return presets.tuned_config(problem, lowered.split("-")[1])
    return experiments.standard_variant(name)


def _cmd_compare(args) -> int:
    plan_spec = json.loads(Path(args.plan).read_text())
    problems = plan_spec["problems"]
    variant_names = plan_spec.get(
        "variants", ["WS", "TCH", "MTCH", "PBI", "IPBI", "auto-fp", "auto-ss"])
    baseline = plan_spec.get("baseline", variant_names[-1])
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    indicators = tuple(plan_spec.get("indicators", ["hv"]))
    frameworks = tuple(plan_spec.get("frameworks", ["fp", "ss"]))
    runs = plan_spec.get("runs", 31)
    budget = plan_spec.get("budget", 10_000)
    reference_files = plan_spec.get("reference_files", {})

    all_results: dict = {}
    for problem in problems:
        variants = {name: _variant_config(name, problem) for name in variant_names}
        plan = experiments.ExperimentPlan(
            problems=(problem,),
            variants=variants,
            baseline=baseline,
            runs=runs,
            budget=budget,
            indicators=indicators,
            frameworks=frameworks,
            reference_files=reference_files,
            seeds=tuple(plan_spec["seeds"]) if "seeds" in plan_spec else None,
        )
        for variant in variant_names:
            scores = experiments.run_cell(plan, problem, variant, args.workers)
            all_results[(problem, variant)] = scores
            rows = ["framework,indicator,run,seed,value"]
            for (fw, ind), vals in scores.items():
                for i, v in enumerate(vals):
                    seed = plan.seed_list()[i]
                    rows.append(f"{fw},{ind},{i},{seed},{v!r}")
            (out / f"cell_{problem}_{variant}.csv").write_text("\n".join(rows) + "\n")
            print(f"cell {problem} / {variant} done", flush=True)

    summary = {}
    for fw in frameworks:
        for ind in indicators:
            grid = {
                problem: {
                    variant: all_results[(problem, variant)][(fw, ind)]
                    for variant in variant_names
                }
                for problem in problems
            }
            table = experiments.emit_table(grid, baseline,
                                           larger_is_better=(ind == "hv"))
            stem = f"table_{fw}_{ind}"
            (out / f"{stem}.txt").write_text(table.text)
            (out / f"{stem}.csv").write_text(table.csv)
            summary[f"{fw}/{ind}"] = {
                variant: dict(zip("+-=", counts))
                for variant, counts in table.sign_counts.items()
            }
    (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"tables written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moeadtk",
                                     description="decomposition-based "
                                     "multi-objective optimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one seeded search run")
    p_run.add_argument("--problem", required=True)
    p_run.add_argument("--config", help="flat key=value configuration file")
    p_run.add_argument("--variant", help="WS/TCH/MTCH/PBI/IPBI/auto-fp/auto-ss")
    p_run.add_argument("--seed", type=int, default=1)
    p_run.add_argument("--budget", type=int, default=None)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_eval = sub.add_parser("evaluate", help="score a dump file")
    p_eval.add_argument("--input", required=True, help="archive/population dump")
    p_eval.add_argument("--indicator", choices=("hv", "igd"), required=True)
    p_eval.add_argument("--frame", default="analytic",
                        help="'analytic' or a reference file path")
    p_eval.add_argument("--problem", help="problem name for the analytic frame")
    p_eval.add_argument("--reference", help="IGD reference file (defaults to frame source)")
    p_eval.add_argument("--m", type=int, default=3, help="objective count if no problem")
    p_eval.add_argument("--front-samples", type=int, default=10_000)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sel = sub.add_parser("select", help="subset selection from an archive dump")
    p_sel.add_argument("--input", required=True)
    p_sel.add_argument("--method", choices=("distance", "greedy-hv", "greedy-igd"),
                       required=True)
    p_sel.add_argument("--k", type=int, default=91)
    p_sel.add_argument("--frame", default="analytic")
    p_sel.add_argument("--problem")
    p_sel.add_argument("--reference")
    p_sel.add_argument("--m", type=int, default=3)
    p_sel.add_argument("--seed", type=int, default=0)
    p_sel.add_argument("--front-samples", type=int, default=10_000)
    p_sel.add_argument("--out", required=True)
    p_sel.set_defaults(func=_cmd_select)

    p_tune = sub.add_parser("tune", help="offline GA over configurations")
    p_tune.add_argument("--problem", required=True)
    p_tune.add_argument("--framework", choices=hyperheuristic.FRAMEWORKS,
                        default="solution_selection")
    p_tune.add_argument("--mu", type=int, default=100)
    p_tune.add_argument("--generations", type=int, default=100)
    p_tune.add_argument("--runs", type=int, default=5)
    p_tune.add_argument("--budget", type=int, default=10_000)
    p_tune.add_argument("--seed", type=int, default=1)
    p_tune.add_argument("--out", required=True)
    p_tune.set_defaults(func=_cmd_tune)

    p_cmp = sub.add_parser("compare", help="run an experiment plan")
    p_cmp.add_argument("--plan", required=True, help="JSON plan file")
    p_cmp.add_argument("--out", required=True)
    p_cmp.add_argument("--workers", type=int, default=None)
    p_cmp.set_defaults(func=_cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
