"""Command-line interface: deterministic plain-text reports over the file formats.

Subcommands: cover, actions, verify, sheaf-demo, pare-demo, emit-grid.
Reports open with machine-parsable ``key: value`` header lines and continue
with ``---``-separated sections whose rows are ``key=value`` pairs or
serialized core values.  Identical invocations on identical inputs produce
byte-identical output.

Exit status: 0 on success, 1 when a verification fails (the offending
instance is printed), 2 on input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from random import Random

from . import actions as actions_mod
from . import separation, site
from .cover import (
    InitialNormalCover,
    VerificationError,
    closed_form_arrow,
    closed_form_boolean,
    generation_bound,
    initial_cover_generic,
    solution_set,
)
from .formats import (
    ParseError,
    ParsedPresheaf,
    parse_presheaf,
    serialize_category,
    serialize_morphism,
    serialize_presheaf,
)
from .fincat import build_grid_poset
from .randgen import random_normal_cover


def _thread_cap() -> int:
    raw = os.environ.get("TOPACTION_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"TOPACTION_THREADS must be a positive integer, got {raw!r}")
    if cap < 1:
        raise ValueError(f"TOPACTION_THREADS must be a positive integer, got {raw!r}")
    return cap


def _load_presheaf(path: str) -> ParsedPresheaf:
    file_path = Path(path)
    return parse_presheaf(
        file_path.read_text(encoding="utf-8"), base_dir=file_path.parent
    )


def _parse_bound(raw: str, num_objects: int) -> tuple[int, ...]:
    parts = raw.split(",")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ValueError(f"bound must be integers, got {raw!r}")
    if len(values) == 1:
        values = values * num_objects
    if len(values) != num_objects:
        raise ValueError(
            f"bound needs one entry or one per object ({num_objects}), got {len(values)}"
        )
    return tuple(values)


def _fmt_seq(values) -> str:
    return ",".join(str(v) for v in values)


def _compute_cover(parsed: ParsedPresheaf, method: str, bound) -> InitialNormalCover:
    x = parsed.presheaf
    if method == "arrow":
        return closed_form_arrow(x)
    if method == "boolean":
        return closed_form_boolean(x)
    default = generation_bound(x)
    effective = default if bound is None else bound
    extras = []
    if any(effective[c] < default[c] for c in x.shape.objects()):
        extras.extend(solution_set(x, default))
    rng = Random(7)
    extras.extend(random_normal_cover(x, rng) for _ in range(20))
    return initial_cover_generic(x, bound=effective, verify_against=extras)


def _run_cover(args) -> tuple[list[str], int]:
    parsed = _load_presheaf(args.x_file)
    x = parsed.presheaf
    bound = (
        _parse_bound(args.bound, x.shape.num_objects) if args.bound is not None else None
    )
    effective = generation_bound(x) if bound is None else bound
    lines = [
        "command: cover",
        f"input: {args.x_file}",
        f"shape: {parsed.shape_ref}",
        f"method: {args.method}",
        f"bound: {_fmt_seq(effective)}",
        f"threads: {_thread_cap()}",
    ]
    cov = _compute_cover(parsed, args.method, bound)
    lines.append(f"cover_levels: {_fmt_seq(cov.domain.level_sizes())}")
    lines.append(f"kernel_sizes: {_fmt_seq(len(m) for m in cov.kernel.membership)}")
    lines.append("status: ok")
    lines.append("---")
    lines.append("domain:")
    lines.extend(serialize_presheaf(cov.domain, parsed.shape_ref).rstrip("\n").splitlines())
    lines.append("---")
    lines.append("cover map:")
    lines.extend(serialize_morphism(cov.map).rstrip("\n").splitlines())
    return lines, 0


def _run_actions(args) -> tuple[list[str], int]:
    px = _load_presheaf(args.x_file)
    pg = _load_presheaf(args.g_file)
    if px.presheaf.shape != pg.presheaf.shape:
        raise ValueError("the two presheaves have different shapes")
    acts = actions_mod.enumerate_actions(px.presheaf, pg.presheaf, args.iso_mode)
    lines = [
        "command: actions",
        f"base: {args.x_file}",
        f"left: {args.g_file}",
        f"iso_mode: {args.iso_mode}",
        f"threads: {_thread_cap()}",
        f"act_count: {acts.count()}",
        "status: ok",
        "---",
    ]
    for i, seq in enumerate(acts.classes):
        free = []
        for f in seq.middle.shape.non_identity_morphisms():
            free.append(f"{f}:{_fmt_seq(seq.middle.restrict[f])}")
        retraction = ";".join(_fmt_seq(c) for c in seq.retraction.components)
        lines.append(
            f"class {i}: middle={_fmt_seq(seq.middle.level_sizes())}"
            f" retraction={retraction} restrictions={';'.join(free)}"
        )
    return lines, 0


def _run_verify(args) -> tuple[list[str], int]:
    px = _load_presheaf(args.x_file)
    x = px.presheaf
    pool_dir = Path(args.pool)
    pool_files = sorted(p for p in pool_dir.iterdir() if p.suffix == ".psh")
    if not pool_files:
        raise ValueError(f"no .psh files in pool directory {args.pool!r}")
    pool = []
    for p in pool_files:
        parsed = parse_presheaf(p.read_text(encoding="utf-8"), base_dir=p.parent)
        if parsed.presheaf.shape != x.shape:
            raise ValueError(f"pool member {p.name} has a different shape")
        pool.append(parsed.presheaf)
    bound = (
        _parse_bound(args.bound, x.shape.num_objects) if args.bound is not None else None
    )
    cov = _compute_cover(px, "generic", bound)
    report = actions_mod.verify_representability(x, pool, cov, args.iso_mode)
    lines = [
        "command: verify",
        f"base: {args.x_file}",
        f"pool: {args.pool}",
        f"iso_mode: {args.iso_mode}",
        f"bound: {_fmt_seq(generation_bound(x) if bound is None else bound)}",
        f"threads: {_thread_cap()}",
        f"status: {'ok' if report.ok else 'FAIL'}",
        "---",
    ]
    for name, entry in zip((p.name for p in pool_files), report.entries):
        roundtrip = "ok" if entry.roundtrip_ok else "FAIL"
        lines.append(
            f"G={name}: act_count={entry.act_count}, hom_count={entry.hom_count},"
            f" roundtrip={roundtrip}"
        )
    lines.append(f"naturality: checked={report.naturality_checked}")
    for violation in report.violations:
        lines.append(f"violation: {violation}")
    return lines, 0 if report.ok else 1


def _run_sheaf_demo(args) -> tuple[list[str], int]:
    n, max_index = args.grid, args.max_index
    if max_index > n:
        raise ValueError("max index cannot exceed the grid size")
    grid_site = site.build_site(n)
    target = site.build_target_sheaf(grid_site)
    lines = [
        "command: sheaf-demo",
        f"max_index: {max_index}",
        f"grid: {n}",
        f"threads: {_thread_cap()}",
    ]
    body = [f"target_is_sheaf={site.is_sheaf(grid_site, target.underlying)}"]
    ok = True
    for m in range(max_index + 1):
        sheaf_m = site.build_threshold_sheaf(grid_site, m)
        cover_m = site.build_threshold_cover(grid_site, m)
        checks = {
            "sheaf": site.is_sheaf(grid_site, sheaf_m.underlying),
            "normal_epi": site.sheaf_normal_epi(grid_site, cover_m),
            "kernel_retract": _kernel_retracts(cover_m),
        }
        ok = ok and all(checks.values())
        body.append(
            f"member {m}: sheaf={checks['sheaf']}"
            f" normal_epi={checks['normal_epi']}"
            f" kernel_retract={checks['kernel_retract']}"
        )
    escapes = [site.escape_index(m, n) for m in range(max_index + 1)]
    body.append("escape_sequence=" + _fmt_seq("escapes" if e is None else e for e in escapes))
    final = escapes[-1]
    body.append(f"escape_index={'escapes' if final is None else final}")
    ok = ok and escapes == list(range(max_index + 1))
    lines.append(f"status: {'ok' if ok else 'FAIL'}")
    lines.append("---")
    lines.extend(body)
    return lines, 0 if ok else 1


def _kernel_retracts(f) -> bool:
    from .exactness import kernel, retraction_onto

    return retraction_onto(kernel(f)) is not None


def _run_pare_demo(args) -> tuple[list[str], int]:
    k = args.k
    instance = separation.build_separation(k)
    size = separation.min_separator_size(k)
    ok = size == k + 1
    lines = [
        "command: pare-demo",
        f"k: {k}",
        f"threads: {_thread_cap()}",
        f"status: {'ok' if ok else 'FAIL'}",
        "---",
        f"witnesses={len(instance.witnesses)}",
        f"cover_levels={_fmt_seq(instance.cover.domain.level_sizes())}",
        f"min_separator_size={size}",
        f"expected={k + 1}",
    ]
    return lines, 0 if ok else 1


def _run_emit_grid(args) -> tuple[list[str], int]:
    cat, _ = build_grid_poset(args.n).to_category()
    return serialize_category(cat).rstrip("\n").splitlines(), 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topaction",
        description="initial normal covers, action classification and grid sheaves",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_cover = sub.add_parser("cover", help="compute the initial normal cover of a presheaf")
    p_cover.add_argument("x_file")
    p_cover.add_argument("--bound", default=None, help="per-object size bound, comma separated")
    p_cover.add_argument("--method", choices=("generic", "arrow", "boolean"), default="generic")
    p_cover.set_defaults(run=_run_cover)

    p_actions = sub.add_parser("actions", help="enumerate action classes over a base")
    p_actions.add_argument("x_file")
    p_actions.add_argument("g_file")
    p_actions.add_argument("--iso-mode", choices=("uvw", "uw"), default="uvw", dest="iso_mode")
    p_actions.set_defaults(run=_run_actions)

    p_verify = sub.add_parser("verify", help="verify the classification bijection over a pool")
    p_verify.add_argument("x_file")
    p_verify.add_argument("--pool", required=True)
    p_verify.add_argument("--bound", default=None)
    p_verify.add_argument("--iso-mode", choices=("uvw", "uw"), default="uvw", dest="iso_mode")
    p_verify.set_defaults(run=_run_verify)

    p_sheaf = sub.add_parser("sheaf-demo", help="grid sheaf checks and the escape index")
    p_sheaf.add_argument("--max-index", type=int, required=True, dest="max_index")
    p_sheaf.add_argument("--grid", type=int, required=True)
    p_sheaf.set_defaults(run=_run_sheaf_demo)

    p_pare = sub.add_parser("pare-demo", help="separator size growth on truncated bases")
    p_pare.add_argument("--k", type=int, required=True)
    p_pare.set_defaults(run=_run_pare_demo)

    p_grid = sub.add_parser("emit-grid", help="emit the category file of a grid poset")
    p_grid.add_argument("n", type=int)
    p_grid.set_defaults(run=_run_emit_grid)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lines, status = args.run(args)
    except ParseError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print("command: cover")
        print("status: FAIL")
        print(f"counterexample: {exc}")
        return 1
    sys.stdout.write("\n".join(lines) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
