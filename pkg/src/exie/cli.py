"""Command-line interface.

Machine-readable output goes to stdout as JSON, diagnostics to stderr.

Exit codes:
    0  success
    2  invalid arguments
    3  I/O error (missing, unreadable or unwritable file)
    4  unsupported or corrupt image file
    5  invalid sequence document
    6  image dimension mismatch
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import kernels
from .image import (DimensionMismatchError, EmptyImageError, ImageFormatError, ImageIOError,
                    load_image, save_image)
from .metrics import compute_all, delta_e, psnr
from .operators import OperatorError, apply_sequence, parse, serialize
from .pipeline import synthesize, trace
from .search import SearchConfig
from .stats import sequence_stats

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_PARSE = 5
EXIT_DIMENSION = 6

log = logging.getLogger("exie")


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")
    sys.stdout.flush()


def _write_bytes(path: Path, data: bytes) -> None:
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise ImageIOError(f"cannot write {path}: {exc}") from exc


def _read_sequence(path):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ImageIOError(f"cannot read {path}: {exc}") from exc
    return parse(data)


# --------------------------------------------------------------------------
# trace
# --------------------------------------------------------------------------

def _search_config(args, n_entries: int) -> SearchConfig:
    tau = args.tau * math.sqrt(n_entries) if args.tau_per_pixel else args.tau
    return SearchConfig(tau=tau, max_nodes=args.max_nodes, tie_break=args.tie_break,
                        dedup=args.dedup)


def run_trace(input_path, target_path, out_path, replay_path, args) -> dict:
    paths = [Path(p).resolve() for p in (input_path, target_path, out_path, replay_path) if p]
    if len(set(paths)) != len(paths):
        raise UsageError("input, target, sequence and replay paths must be distinct")
    if args.search_res is not None and args.search_res < 8:
        raise UsageError("--search-res must be at least 8")

    x = load_image(input_path)
    y = load_image(target_path)
    if args.search_res is None and x.shape != y.shape:
        raise DimensionMismatchError(f"input {x.shape[:2]} and target {y.shape[:2]} differ; "
                                     "pass --search-res to compare downsampled copies")
    n_entries = 3 * (args.search_res ** 2 if args.search_res else x.shape[0] * x.shape[1])
    cfg = _search_config(args, n_entries)
    res = trace(x, y, cfg, args.search_res)
    rep = res.report

    seq = rep.sequence
    # wall time is left out so that identical runs write identical files
    seq.meta = {
        "input": str(input_path),
        "target": str(target_path),
        "search_res": args.search_res,
        "config": cfg.to_dict(),
        "input_distance": rep.input_distance,
        "result_distance": rep.result_distance,
        "expanded": rep.expanded,
        "generated": rep.generated,
        "terminated_by": rep.terminated_by.value,
    }
    _write_bytes(Path(out_path), serialize(seq))
    if replay_path:
        save_image(res.replay, replay_path)
    summary = rep.summary()
    summary.update(sequence=str(seq), out=str(out_path), backend=kernels.BACKEND)
    return summary


def _trace_job(job, args):
    return run_trace(job["input"], job["target"], job["out"], job.get("replay"), args)


def cmd_trace(args) -> int:
    if args.manifest:
        try:
            jobs = json.loads(Path(args.manifest).read_text())
        except OSError as exc:
            raise ImageIOError(f"cannot read manifest {args.manifest}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"manifest is not valid JSON: {exc}") from exc
        if not isinstance(jobs, list) or not all(
                isinstance(j, dict) and {"input", "target", "out"} <= j.keys() for j in jobs):
            raise UsageError("manifest must be a list of {input, target, out[, replay]} objects")
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                results = list(pool.map(_trace_job, jobs, [args] * len(jobs)))
        else:
            results = [_trace_job(job, args) for job in jobs]
        _emit(results)
        return EXIT_OK
    if not (args.input and args.target and args.out):
        raise UsageError("trace needs --input, --target and --out (or --manifest)")
    _emit(run_trace(args.input, args.target, args.out, args.replay, args))
    return EXIT_OK


# --------------------------------------------------------------------------
# apply / metrics / synth / stats
# --------------------------------------------------------------------------

def cmd_apply(args) -> int:
    seq = _read_sequence(args.seq)
    x = load_image(args.input)
    out = apply_sequence(seq, x)
    save_image(out, args.out)
    _emit({"out": str(args.out), "length": len(seq), "height": out.shape[0], "width": out.shape[1]})
    return EXIT_OK


def cmd_metrics(args) -> int:
    a = load_image(args.a)
    b = load_image(args.b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"{args.a} is {a.shape[:2]}, {args.b} is {b.shape[:2]}")
    try:
        out = compute_all(a, b).to_dict()
    except ValueError as exc:
        # too small for the SSIM window
        log.warning("%s", exc)
        p = psnr(a, b)
        out = {"psnr": "inf" if math.isinf(p) else p, "ssim": None, "delta_e": delta_e(a, b)}
    _emit(out)
    return EXIT_OK


def cmd_synth(args) -> int:
    if not 1 <= args.len <= 5:
        raise UsageError("--len must be between 1 and 5")
    pair = synthesize(args.seed, args.len)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ImageIOError(f"cannot create {out}: {exc}") from exc
    save_image(pair.input, out / "input.png")
    save_image(pair.target, out / "target.png")
    _write_bytes(out / "truth.json", serialize(pair.truth))
    _emit({"input": str(out / "input.png"), "target": str(out / "target.png"),
           "truth": str(out / "truth.json"), "sequence": str(pair.truth)})
    return EXIT_OK


def cmd_stats(args) -> int:
    seqs, bad = [], []
    for p in args.sequences:
        try:
            seqs.append(_read_sequence(p))
        except (OperatorError, ImageIOError) as exc:
            bad.append({"file": str(p), "error": str(exc)})
    if bad:
        for b in bad:
            print(f"exie stats: {b['file']}: {b['error']}", file=sys.stderr)
        _emit({"errors": bad})
        return EXIT_PARSE
    _emit(sequence_stats(seqs))
    return EXIT_OK


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="exie", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("trace", help="find an operator sequence mapping input onto target")
    t.add_argument("--input")
    t.add_argument("--target")
    t.add_argument("--out", help="sequence JSON to write")
    t.add_argument("--replay", help="write the sequence applied to the full-resolution input")
    t.add_argument("--search-res", type=int, default=None,
                   help="search on N x N box-downsampled copies (32 for large images)")
    t.add_argument("--tau", type=float, default=2.0)
    t.add_argument("--tau-per-pixel", action="store_true",
                   help="treat --tau as an RMS value and scale it by sqrt(H*W*3)")
    t.add_argument("--max-nodes", type=int, default=7000)
    t.add_argument("--tie-break", choices=["lifo", "fifo"], default="lifo")
    t.add_argument("--dedup", choices=["none", "hash"], default="none")
    t.add_argument("--manifest", help="JSON list of {input, target, out[, replay]} jobs")
    t.add_argument("--jobs", type=int, default=1)
    t.set_defaults(func=cmd_trace)

    a = sub.add_parser("apply", help="apply a sequence file to an image")
    a.add_argument("--input", required=True)
    a.add_argument("--seq", required=True)
    a.add_argument("--out", required=True)
    a.set_defaults(func=cmd_apply)

    m = sub.add_parser("metrics", help="PSNR, SSIM and mean delta E between two images")
    m.add_argument("a")
    m.add_argument("b")
    m.set_defaults(func=cmd_metrics)

    s = sub.add_parser("synth", help="write a random input, planted sequence and target")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--len", type=int, required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    st = sub.add_parser("stats", help="operator histogram over sequence files")
    st.add_argument("sequences", nargs="+")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="exie: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"exie: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImageIOError as exc:
        print(f"exie: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ImageFormatError, EmptyImageError) as exc:
        print(f"exie: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except OperatorError as exc:
        print(f"exie: invalid sequence: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionMismatchError as exc:
        print(f"exie: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ValueError as exc:
        print(f"exie: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
