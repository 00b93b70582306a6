"""Command-line entry points: train, generate, eval, synth, serve."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import guilget
from guilget.corpus import (
    SynthConfig,
    build_samples,
    filter_screens,
    load_dataset,
    make_batches,
    save_dataset,
    synth_corpus,
)
from guilget.graph import parse_ag
from guilget.metrics import eval_report, report_table
from guilget.model.config import TrainConfig
from guilget.model.sampling import generate_layout
from guilget.model.stages import GuilgetModel
from guilget.model.trainer import train
from guilget.render import render_svg


def _dump_json(doc: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_train(args: argparse.Namespace) -> int:
    config = TrainConfig.from_file(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if config.data_dir is not None:
        records = filter_screens(load_dataset(config.data_dir))
        records = [r for r in records if r.split == "train"]
    elif config.synth_count is not None:
        grammar = SynthConfig(**config.synth_grammar)
        records = [
            r
            for r in synth_corpus(config.synth_count, config.synth_seed, grammar)
            if r.split == "train"
        ]
    else:
        raise ValueError("training config needs either data.dir or data.synth")
    print(f"training on {len(records)} screens for {config.steps} steps")
    samples = build_samples(records, config.model, config.seed)
    batches = make_batches(samples, config.batch_size, config.seed)
    model = GuilgetModel(config.model, seed=config.seed)
    history = train(model, batches, config, log=print)

    ckpt_path = out / "model.ckpt"
    model.save(ckpt_path)
    with open(out / "losses.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(history[0].keys()))
        writer.writeheader()
        writer.writerows(history)
    from guilget.figures import save_loss_curves

    save_loss_curves(history, out / "losses.png")
    print(f"wrote {ckpt_path}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    model = GuilgetModel.load(args.ckpt)
    with open(args.ag, "r", encoding="utf-8") as fh:
        graph = parse_ag(json.load(fh))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    layouts = generate_layout(model, graph, args.samples, args.temperature, args.seed)
    classes = graph.classes_by_id()
    for i, boxes in enumerate(layouts):
        doc = {
            "seed": args.seed,
            "sample": i,
            "temperature": args.temperature,
            "boxes": [
                {
                    "id": instance,
                    "class": classes[instance],
                    "x": box.x,
                    "y": box.y,
                    "w": box.w,
                    "h": box.h,
                }
                for instance, box in sorted(boxes.items())
            ],
        }
        _dump_json(doc, out / f"layout_{i:02d}.json")
        svg = render_svg(boxes, classes, graph.parent_of)
        (out / f"wireframe_{i:02d}.svg").write_text(svg, encoding="utf-8")
    print(f"wrote {len(layouts)} layouts to {out}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    model = GuilgetModel.load(args.ckpt)
    records = filter_screens(load_dataset(args.data))
    test = [r for r in records if r.split == "test"] or records
    reports = eval_report(
        model, test, grouping=args.group_by, temperature=args.temperature, seed=args.seed
    )
    table = report_table(reports)
    print(table, end="")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.txt").write_text(table, encoding="utf-8")
    _dump_json({"reports": [r.as_dict() for r in reports]}, out / "report.json")
    with open(out / "report.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["group", "n_layouts", "cpi", "ccs", "alignment", "w_bbox", "gui_agc"])
        for r in reports:
            writer.writerow(
                [r.group or "all", r.n_layouts, r.cpi, r.ccs, r.alignment, r.w_bbox, r.gui_agc]
            )
    from guilget.figures import save_metric_bars

    save_metric_bars(reports, out / "report.png")
    print(f"wrote report files to {out}")
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    records = synth_corpus(args.samples, args.seed, SynthConfig())
    save_dataset(records, args.out)
    print(f"wrote {len(records)} screens to {args.out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from guilget.service import create_app

    model = GuilgetModel.load(args.ckpt)
    app = create_app(model, static_dir=args.static)
    uvicorn.run(app, host="127.0.0.1", port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guilget",
        description="Generate GUI wireframe layouts from arrangement graphs.",
    )
    parser.add_argument("--version", action="version", version=guilget.__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model from a JSON config")
    p_train.add_argument("--config", required=True, help="training config JSON")
    p_train.add_argument("--out", default="runs/train", help="output directory")
    p_train.set_defaults(fn=cmd_train)

    p_gen = sub.add_parser("generate", help="generate layouts for a graph")
    p_gen.add_argument("--ckpt", required=True, help="model checkpoint")
    p_gen.add_argument("--ag", required=True, help="arrangement-graph JSON file")
    p_gen.add_argument("--samples", type=int, default=1)
    p_gen.add_argument("--temperature", type=float, default=0.5)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default="runs/generate", help="output directory")
    p_gen.set_defaults(fn=cmd_generate)

    p_eval = sub.add_parser("eval", help="run the metric suite on a dataset")
    p_eval.add_argument("--ckpt", required=True)
    p_eval.add_argument("--data", required=True, help="dataset directory")
    p_eval.add_argument("--group-by", choices=("none", "category", "complexity"), default="none")
    p_eval.add_argument("--temperature", type=float, default=0.5)
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--out", default="runs/eval", help="output directory")
    p_eval.set_defaults(fn=cmd_eval)

    p_synth = sub.add_parser("synth", help="synthesize a screen dataset")
    p_synth.add_argument("--samples", type=int, required=True, help="screen count")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="dataset directory")
    p_synth.set_defaults(fn=cmd_synth)

    p_serve = sub.add_parser("serve", help="run the HTTP generation service")
    p_serve.add_argument("--ckpt", required=True)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--static", default=None, help="static studio UI directory")
    p_serve.set_defaults(fn=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
