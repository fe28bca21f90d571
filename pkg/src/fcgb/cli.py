"""Command line front end: ``fcgb resolve|chart|products|verify|info``.

Every tunable can come from a JSON config file (``--config``); flags given on
the command line win. Progress goes to stderr as ``key=value`` lines.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from xml.sax.saxutils import escape

from .resolution import (
    ExtChart,
    ResolutionError,
    ResolutionState,
    RunOptions,
    ext_chart,
    load_checkpoint,
    load_module,
    products,
    products_tsv,
    read_manifest,
    save_checkpoint,
)

CHECKPOINT_ENV = "FCGB_CHECKPOINT_ROOT"


@dataclass
class RunConfig:
    module: str | None = None
    smax: int | None = None
    tmax: int | None = None
    checkpoint: str | None = None
    threads: int = 1
    paper_literal_pairs: bool = False
    buchberger_triple: bool = False
    svg: str | None = None
    out: str | None = None
    generators: list[str] = field(default_factory=list)
    range: str | None = None

    def validate(self) -> None:
        for name in ("smax", "tmax"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    def options(self) -> RunOptions:
        return RunOptions(self.paper_literal_pairs, self.buchberger_triple, self.threads)

    def checkpoint_dir(self) -> Path:
        if self.checkpoint:
            return Path(self.checkpoint)
        root = Path(os.environ.get(CHECKPOINT_ENV, "checkpoints"))
        return root / Path(self.module_name).stem

    @property
    def module_name(self) -> str:
        return self.module or "F2"


def emit(**kv) -> None:
    print(" ".join(f"{k}={v}" for k, v in kv.items()), file=sys.stderr, flush=True)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("--module", help="module file, or a builtin name (F2, HZ)")
    common.add_argument("--smax", type=int)
    common.add_argument("--tmax", type=int)
    common.add_argument("--checkpoint", help=f"checkpoint directory (default: ${CHECKPOINT_ENV}/<module>)")
    common.add_argument("--threads", type=int)
    common.add_argument("--paper-literal-pairs", action="store_const", const=True, default=None,
                        help="queue a square pair for every generator, not only divisors of the lead")
    common.add_argument("--buchberger-triple", action="store_const", const=True, default=None,
                        help="skip overlap pairs covered by the chain criterion")
    common.add_argument("--out", help="write the TSV here instead of stdout")

    p = argparse.ArgumentParser(prog="fcgb", description="Minimal resolutions and Ext over the Steenrod algebra.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("resolve", parents=[common], help="create or extend a checkpointed resolution")
    chart = sub.add_parser("chart", parents=[common], help="write the Ext chart as TSV (and SVG)")
    chart.add_argument("--svg", help="also draw the chart to this SVG file")
    prod = sub.add_parser("products", parents=[common], help="products of the given generators")
    prod.add_argument("generators", nargs="+")
    ver = sub.add_parser("verify", parents=[common], help="run the invariant and oracle checks")
    ver.add_argument("--range", help="oracle range, e.g. t=12")
    sub.add_parser("info", parents=[common], help="summarize a checkpoint")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        data = json.loads(Path(args.config).read_text())
        known = {f.name for f in fields(RunConfig)}
        for k, v in data.items():
            k = k.replace("-", "_")
            if k not in known:
                raise ValueError(f"unknown config key {k!r}")
            setattr(cfg, k, v)
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, v)
    cfg.validate()
    return cfg


# ---------- commands ----------


def _open_state(cfg: RunConfig, must_exist: bool) -> ResolutionState:
    """Load the checkpoint; read-only commands take module and flags from it."""
    path = cfg.checkpoint_dir()
    manifest = read_manifest(path)
    if manifest is None:
        if must_exist:
            raise ResolutionError(f"no checkpoint at {path}")
        return ResolutionState(load_module(cfg.module_name), cfg.options())
    module = load_module(cfg.module) if cfg.module else None
    return load_checkpoint(path, module, None if must_exist else cfg.options())


def cmd_resolve(cfg: RunConfig) -> int:
    if cfg.tmax is None:
        raise ValueError("resolve needs --tmax")
    smax = cfg.tmax if cfg.smax is None else cfg.smax
    path = cfg.checkpoint_dir()
    state = _open_state(cfg, must_exist=False)
    emit(event="start", module=cfg.module_name, smax=smax, tmax=cfg.tmax, checkpoint=path,
         frontier=state.frontier(), config_hash=state.config_hash(), threads=cfg.threads)
    t0 = time.perf_counter()
    if state.frontier() >= cfg.tmax and state.s_max >= smax:
        emit(event="done", frontier=state.frontier(), elapsed=0.0, note="already-complete")
        return 0

    def barrier(st: ResolutionState, t: int) -> None:
        save_checkpoint(st, path)

    def progress(rec: dict) -> None:
        emit(event="degree", **rec)

    state.extend(smax, cfg.tmax, on_barrier=barrier, progress=progress)
    save_checkpoint(state, path)
    emit(event="done", frontier=state.frontier(), generators=sum(len(lv.gens) for lv in state.levels[1:]),
         elapsed=round(time.perf_counter() - t0, 3))
    return 0


def _chart_for(cfg: RunConfig, state: ResolutionState) -> ExtChart:
    t_max = state.frontier() if cfg.tmax is None else cfg.tmax
    s_max = state.s_max if cfg.smax is None else cfg.smax
    return ext_chart(state, s_max=s_max, t_max=t_max)


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_chart(cfg: RunConfig) -> int:
    state = _open_state(cfg, must_exist=True)
    chart = _chart_for(cfg, state)
    _write(chart.to_tsv(), cfg.out)
    if cfg.svg:
        names = chart.by_name()
        lines = [g for g in ("h0", "h1") if g in names]
        if lines:
            t_top = max((e.t for e in chart.entries), default=0)
            chart.products = products(state, lines, t_max=min(t_top, state.frontier()), chart=chart)
        Path(cfg.svg).write_text(chart_svg(chart))
    return 0


def cmd_products(cfg: RunConfig) -> int:
    state = _open_state(cfg, must_exist=True)
    table = products(state, cfg.generators, t_max=cfg.tmax)
    _write(products_tsv(table), cfg.out)
    return 0


def cmd_info(cfg: RunConfig) -> int:
    path = cfg.checkpoint_dir()
    manifest = read_manifest(path)
    if manifest is None:
        raise ResolutionError(f"no checkpoint at {path}")
    lines = [f"checkpoint\t{path}", f"config_hash\t{manifest['config_hash']}",
             f"frontier\t{min(manifest['frontiers'], default=-1)}", f"levels\t{len(manifest['frontiers'])}"]
    state = load_checkpoint(path, check=False)
    for s, lv in enumerate(state.levels):
        lines.append(f"s={s}\tgenerators={len(lv.gens)}\tgb_entries={len(lv.gb.entries)}\tfrontier={lv.frontier}")
    _write("\n".join(lines) + "\n", cfg.out)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    from . import verify

    t_range = 12
    if cfg.range:
        key, _, val = cfg.range.partition("=")
        if key != "t" or not val.isdigit():
            raise ValueError("--range expects t=<int>")
        t_range = int(val)
    checks = verify.default_checks(t_range, rng=random.Random(0))
    path = cfg.checkpoint_dir()
    if read_manifest(path) is not None:
        checks.append(("checkpoint", lambda: verify.check_checkpoint(path, cfg.options(), t_range)))
    failed = 0
    for name, fn in checks:
        t0 = time.perf_counter()
        try:
            detail = fn() or "ok"
            ok = True
        except Exception as exc:  # a failing check must not hide the others
            detail = f"{type(exc).__name__}: {exc}"
            ok = False
        failed += not ok
        emit(check=name, status="pass" if ok else "fail", elapsed=round(time.perf_counter() - t0, 3),
             detail=json.dumps(str(detail)))
    return 1 if failed else 0


# ---------- SVG ----------


def chart_svg(chart: ExtChart, cell: int = 24) -> str:
    """Adams chart: x = t - s, y = s, one dot per generator, h0/h1 product lines."""
    pts = {}
    stacks: dict[tuple[int, int], int] = {}
    for e in sorted(chart.entries, key=lambda e: (e.t, e.s, e.k)):
        n = e.t - e.s
        k = stacks.get((n, e.s), 0)
        stacks[(n, e.s)] = k + 1
        pts[e.name] = (n, e.s, k)
    x_max = max((p[0] for p in pts.values()), default=0) + 1
    y_max = max((p[1] for p in pts.values()), default=0) + 1
    width, height = (x_max + 1) * cell, (y_max + 1) * cell
    margin = cell

    def xy(name: str) -> tuple[float, float]:
        n, s, k = pts[name]
        return margin + n * cell + k * 5, height - margin - s * cell + k * 3

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width + margin}" height="{height + margin}" '
           f'viewBox="0 0 {width + margin} {height + margin}">',
           '<g stroke="#ddd" stroke-width="0.5">']
    for n in range(x_max + 1):
        x = margin + n * cell
        out.append(f'<line x1="{x}" y1="{margin}" x2="{x}" y2="{height - margin}"/>')
    for s in range(y_max + 1):
        y = height - margin - s * cell
        out.append(f'<line x1="{margin}" y1="{y}" x2="{width}" y2="{y}"/>')
    out.append("</g>")
    out.append('<g stroke="black" stroke-width="1">')
    for (g, h), res in sorted(chart.products.items()):
        if g not in ("h0", "h1") or h not in pts:
            continue
        for r in res:
            if r in pts:
                x1, y1 = xy(h)
                x2, y2 = xy(r)
                out.append(f'<line class="{g}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
    out.append("</g>")
    out.append('<g fill="black">')
    for e in sorted(chart.entries, key=lambda e: (e.t, e.s, e.k)):
        x, y = xy(e.name)
        out.append(f'<circle cx="{x}" cy="{y}" r="2.5"><title>{escape(e.name)} ({e.s},{e.t})</title></circle>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


COMMANDS = {
    "resolve": cmd_resolve,
    "chart": cmd_chart,
    "products": cmd_products,
    "verify": cmd_verify,
    "info": cmd_info,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg)
    except (ResolutionError, ValueError, OSError) as exc:
        emit(event="error", command=args.command, message=json.dumps(str(exc)))
        return 2


if __name__ == "__main__":
    sys.exit(main())
