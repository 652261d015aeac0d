"""Command-line interface.

Subcommands: render (view -> PNG/face-id/depth dumps), segment (prompt ->
part instances), query (program or natural-language question -> answer),
bench (suite -> scored report).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CadqaError
from .geometry import load_model
from .qa import (
    ChatEndpointConfig,
    answer_question,
    default_template,
    load_suite,
    run_benchmark,
    write_report,
)
from .query import parse as parse_program
from .query import evaluate, value_to_python
from .render import ViewSpec, camera_for_view, render
from .segment import PipelineConfig, filter_by_sides, resolve_provider, segment_model


def _add_resolution(p: argparse.ArgumentParser):
    p.add_argument("--width", type=int, default=1920)
    p.add_argument("--height", type=int, default=1080)


def _pipeline_config(args) -> PipelineConfig:
    kwargs = {}
    if getattr(args, "width", None):
        kwargs["render_width"] = args.width
    if getattr(args, "height", None):
        kwargs["render_height"] = args.height
    if getattr(args, "view_set", None):
        kwargs["view_set"] = args.view_set
    if getattr(args, "box_threshold", None) is not None:
        kwargs["box_score_threshold"] = args.box_threshold
    return PipelineConfig(**kwargs)


def cmd_render(args) -> int:
    model = load_model(args.model)
    view = ViewSpec.parse(args.view)
    camera = camera_for_view(model, view, args.width, args.height)
    buffers = render(model, camera)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{Path(args.model).stem}_{view.key.replace(':', '')}"
    buffers.save_color_png(out / f"{stem}.png")
    buffers.save_face_id_png(out / f"{stem}_faces.png")
    buffers.save_depth_bin(out / f"{stem}_depth.bin")
    print(f"wrote {stem}.png, {stem}_faces.png, {stem}_depth.bin to {out}")
    return 0


def cmd_segment(args) -> int:
    model = load_model(args.model)
    cfg = _pipeline_config(args)
    provider = resolve_provider(args.provider, model)
    parts = segment_model(model, args.prompt, provider, cfg)
    if args.sides:
        sides = [s.strip() for s in args.sides.split(",") if s.strip()]
        parts = filter_by_sides(model, parts, sides, cfg)
    payload = [p.to_json() for p in parts]
    Path(args.out).write_text(json.dumps(payload, indent=1), encoding="utf-8")
    print(f"{len(parts)} part(s) -> {args.out}")
    return 0


def cmd_query(args) -> int:
    model = load_model(args.model)
    cfg = _pipeline_config(args)
    provider = resolve_provider(args.provider, model)
    if args.program:
        source = Path(args.program).read_text(encoding="utf-8")
        answer = evaluate(parse_program(source), model, provider, cfg)
        print(json.dumps({"value": value_to_python(answer.value)}, indent=1))
        return 0
    if not args.llm_config:
        print("error: --question needs --llm-config", file=sys.stderr)
        return 2
    endpoint = ChatEndpointConfig.from_json(args.llm_config)
    answer, category, note = answer_question(
        args.question, model, provider, cfg,
        endpoint=endpoint, template=default_template())
    if answer is None:
        print(json.dumps({"error": note, "category": category}, indent=1))
        return 1
    print(json.dumps({"value": value_to_python(answer.value)}, indent=1))
    return 0


def cmd_bench(args) -> int:
    suite = load_suite(args.suite)
    cfg = _pipeline_config(args)
    endpoint = None
    if args.llm_config:
        endpoint = ChatEndpointConfig.from_json(args.llm_config)
    report = run_benchmark(suite, args.mode, args.provider, cfg,
                           endpoint=endpoint, workers=args.workers)
    json_path, text_path = write_report(report, args.report)
    print(report.to_text())
    print(f"report -> {json_path}, {text_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cadquery",
        description="Measurement question answering over face-segmented CAD meshes")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render one view to image/face-id/depth files")
    p.add_argument("--model", required=True)
    p.add_argument("--view", required=True,
                   help="top|bottom|left|right|front|back|corner:K")
    _add_resolution(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("segment", help="find parts matching a text prompt")
    p.add_argument("--model", required=True)
    p.add_argument("--prompt", required=True)
    p.add_argument("--provider", default="oracle",
                   help="oracle | null | remote:<base-url>")
    p.add_argument("--sides", default=None, help="comma list, e.g. top,left")
    p.add_argument("--view-set", choices=("six_main_axes", "eight_corners"),
                   default=None)
    p.add_argument("--box-threshold", type=float, default=None)
    _add_resolution(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_segment)

    p = sub.add_parser("query", help="answer one question or run a program")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--program", help="path to a .cadq program")
    group.add_argument("--question", help="natural-language question")
    p.add_argument("--llm-config", help="chat endpoint config JSON (for --question)")
    p.add_argument("--provider", default="oracle")
    p.add_argument("--view-set", choices=("six_main_axes", "eight_corners"),
                   default=None)
    _add_resolution(p)
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("bench", help="run a benchmark suite and score it")
    p.add_argument("--suite", required=True)
    p.add_argument("--mode", choices=("golden", "replay", "live"), required=True)
    p.add_argument("--provider", default="oracle")
    p.add_argument("--llm-config", default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--view-set", choices=("six_main_axes", "eight_corners"),
                   default=None)
    _add_resolution(p)
    p.add_argument("--report", required=True)
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CadqaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
