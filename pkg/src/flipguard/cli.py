"""Command-line front end.

Machine-readable output goes to stdout or to --out files; human summaries
go to stderr. Exit codes: 0 success, 1 bad input, 2 corruption detected.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from pathlib import Path

from .blob import (
    CorruptBlobError,
    EncodedBlob,
    decode_tensor,
    encode_tensor,
    overhead_report,
    verify_blob,
)
from .codes import CODE_IDS, code_shape
from .encoding import (
    DistanceMatrix,
    canonical_map,
    codebook_lines,
    distance_matrix,
    twos_complement_matrix,
)
from .quantize import value_range
from .traces import (
    AttackTrace,
    cost_of_trace,
    estimated_seconds,
    load_trace,
    pair_frequency,
    synthesize_trace,
    trace_stats,
    trace_to_json,
)


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for corruption here.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _matrix_lines(m: DistanceMatrix, fmt: str) -> list[str]:
    half = 1 << (m.b - 1)
    labels = [str(v) for v in range(-half, half)]
    if fmt == "csv":
        lines = ["," + ",".join(labels)]
        for lab, row in zip(labels, m.entries):
            lines.append(lab + "," + ",".join(str(x) for x in row))
        return lines
    width = max(len(lab) for lab in labels) + 1
    lines = [" " * width + "".join(f"{lab:>{width}}" for lab in labels)]
    for lab, row in zip(labels, m.entries):
        lines.append(f"{lab:>{width}}" + "".join(f"{x:>{width}}" for x in row))
    return lines


def _read_values(path: str) -> list[int]:
    tokens = Path(path).read_text(encoding="utf-8").split()
    try:
        return [int(t) for t in tokens]
    except ValueError as e:
        raise ValueError(f"{path}: {e}") from None


def _gather_traces(args) -> list[AttackTrace]:
    if args.infile:
        return [load_trace(args.infile)]
    paths = sorted(Path(args.trace_dir).glob("*.json"))
    if not paths:
        raise ValueError(f"no *.json traces under {args.trace_dir}")
    return [load_trace(p) for p in paths]


def _stats_dict(traces, encoding=None) -> dict:
    st = trace_stats(traces, encoding)
    return {
        "min": st.min_flips,
        "avg": float(st.avg_flips),
        "max": st.max_flips,
        "estimated_seconds_avg": estimated_seconds(float(st.avg_flips)),
    }


def cmd_codebook(args) -> int:
    m = canonical_map(args.code)
    _emit("\n".join(codebook_lines(m)) + "\n", args.out)
    return 0


def cmd_distances(args) -> int:
    if args.code:
        m = distance_matrix(canonical_map(args.code))
    else:
        m = twos_complement_matrix(args.bits)
    _emit("\n".join(_matrix_lines(m, args.format)) + "\n", args.out)
    return 0


def cmd_encode(args) -> int:
    m = canonical_map(args.code)
    values = _read_values(args.infile)
    blob = encode_tensor(m, values, args.layer)
    Path(args.out).write_bytes(blob.to_bytes())
    _say(f"encoded {len(values)} values with {args.code} into {args.out}")
    return 0


def cmd_decode(args) -> int:
    blob = EncodedBlob.from_bytes(Path(args.infile).read_bytes())
    m = canonical_map(blob.code_id)
    result = decode_tensor(m, blob)
    if isinstance(result, list):
        _emit("\n".join(str(v) for v in result) + ("\n" if result else ""), args.out)
        _say(f"decoded {len(result)} values, clean")
        return 0
    print(json.dumps({
        "clean": False,
        "corrupted_indices": list(result.corrupted_indices),
        "scanned": result.scanned,
    }, sort_keys=True))
    _say(f"corruption detected at {len(result.corrupted_indices)} of "
         f"{result.scanned} indices; no values written")
    return 2


def cmd_verify(args) -> int:
    blob = EncodedBlob.from_bytes(Path(args.infile).read_bytes())
    m = canonical_map(blob.code_id)
    report = verify_blob(m, blob)
    print(json.dumps({
        "clean": report.clean,
        "corrupted_indices": list(report.corrupted_indices),
        "scanned": report.scanned,
    }, sort_keys=True))
    if report.clean:
        _say(f"{args.infile}: clean ({report.scanned} codewords)")
        return 0
    _say(f"{args.infile}: {len(report.corrupted_indices)} corrupted of {report.scanned}")
    return 2


def cmd_analyze_trace(args) -> int:
    traces = _gather_traces(args)
    b = traces[0].meta.b
    if any(t.meta.b != b for t in traces):
        raise ValueError("traces mix bit widths")
    out = {
        "traces": len(traces),
        "changes": sum(len(t.changes) for t in traces),
        "b": b,
        "unprotected": _stats_dict(traces),
    }
    if args.code:
        m = canonical_map(args.code)
        out["code"] = args.code
        out["protected"] = _stats_dict(traces, m)
        if out["unprotected"]["avg"]:
            out["amplification"] = out["protected"]["avg"] / out["unprotected"]["avg"]
    print(json.dumps(out, sort_keys=True, indent=2))
    if args.pair_freq:
        counts = pair_frequency(traces)
        half = 1 << (b - 1)
        labels = [str(v) for v in range(-half, half)]
        lines = ["," + ",".join(labels)]
        for lab, row in zip(labels, counts):
            lines.append(lab + "," + ",".join(str(x) for x in row))
        Path(args.pair_freq).write_text("\n".join(lines) + "\n", encoding="utf-8")
        _say(f"pair frequencies written to {args.pair_freq}")
    _say(f"analyzed {len(traces)} trace(s), {out['changes']} changes")
    return 0


def cmd_simulate(args) -> int:
    trace = synthesize_trace(
        args.bits,
        args.changes,
        msb_fraction=args.msb_fraction,
        seed=args.seed,
    )
    _emit(trace_to_json(trace), args.out)
    cost = cost_of_trace(trace)
    _say(f"synthesized {args.changes} changes (b={args.bits}, seed={args.seed}), "
         f"{cost} unprotected flips")
    return 0


def cmd_overhead(args) -> int:
    ids = [args.code] if args.code else list(CODE_IDS)
    rows = []
    for cid in ids:
        b, n = code_shape(cid)
        rep = overhead_report(cid, b)
        rows.append((cid, b, n, f"{float(rep.memory_overhead_percent):g}",
                     rep.bits_per_weight))
    header = ("code", "b", "n", "overhead_percent", "bits_per_weight")
    if args.format == "csv":
        lines = [",".join(header)]
        lines += [",".join(str(x) for x in row) for row in rows]
    else:
        widths = [max(len(str(x)) for x in [h, *col])
                  for h, col in zip(header, zip(*rows))]
        def fmt(row):
            return "  ".join(f"{str(x):>{w}}" for x, w in zip(row, widths))
        lines = [fmt(header)] + [fmt(row) for row in rows]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_bench(args) -> int:
    m = canonical_map(args.code)
    lo, hi = value_range(m.b)
    rng = random.Random(args.seed)
    values = [rng.randint(lo, hi) for _ in range(args.count)]
    t0 = time.perf_counter()
    blob = encode_tensor(m, values, "bench")
    t1 = time.perf_counter()
    verify_blob(m, blob)
    t2 = time.perf_counter()
    decode_tensor(m, blob)
    t3 = time.perf_counter()
    print(f"code={args.code} count={args.count} "
          f"encode_s={t1 - t0:.4f} verify_s={t2 - t1:.4f} decode_s={t3 - t2:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="flipguard",
                     description="Protect quantized weights with bit-flip-resistant codes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        return p

    p = add("codebook", cmd_codebook, help="print a code's value-to-codeword table")
    p.add_argument("--code", required=True, choices=CODE_IDS)
    p.add_argument("--out")

    p = add("distances", cmd_distances, help="pairwise bit-flip cost matrix")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--code", choices=CODE_IDS)
    g.add_argument("--bits", type=int, choices=(4, 8),
                   help="plain two's-complement matrix instead of a code's")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--out")

    p = add("encode", cmd_encode, help="encode integer values into a blob")
    p.add_argument("--code", required=True, choices=CODE_IDS)
    p.add_argument("--in", dest="infile", required=True,
                   help="text file of whitespace-separated signed integers")
    p.add_argument("--out", required=True)
    p.add_argument("--layer", default="")

    p = add("decode", cmd_decode, help="decode a blob back to values")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")

    p = add("verify", cmd_verify, help="scan a blob for non-codeword slices")
    p.add_argument("--in", dest="infile", required=True)

    p = add("analyze-trace", cmd_analyze_trace, help="replay cost statistics")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--in", dest="infile", help="a single trace file")
    g.add_argument("--trace-dir", help="directory of *.json traces")
    p.add_argument("--code", choices=CODE_IDS,
                   help="also cost the traces under this code's map")
    p.add_argument("--pair-freq", help="write (old,new) counts as CSV here")

    p = add("simulate", cmd_simulate, help="synthesize a trace")
    p.add_argument("--bits", type=int, required=True, choices=(4, 8))
    p.add_argument("--changes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--msb-fraction", type=float, default=None)
    p.add_argument("--out")

    p = add("overhead", cmd_overhead, help="per-code storage overhead")
    p.add_argument("--code", choices=CODE_IDS)
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--out")

    p = add("bench", cmd_bench, help="time encode/verify/decode on random data")
    p.add_argument("--code", required=True, choices=CODE_IDS)
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except CorruptBlobError as e:
        _say(f"corrupt blob: {e}")
        return 2
    except (ValueError, OSError) as e:
        _say(f"error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
