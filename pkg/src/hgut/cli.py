"""Command line entry point: ``hgut {test,verify,corpus,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus, harness
from .testers import TesterConfig

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        harness._write(text, out)


def cmd_test(a) -> int:
    p = corpus.load(a.dist)
    cfg = TesterConfig.for_mode(a.mode, seed=a.seed)
    res = harness.run_trials(p, a.eps, cfg, a.trials, a.seed, a.threads)
    fmt = a.format or ("json" if a.out and a.out.endswith(".json") else "csv")
    _emit(harness.trials_text(res, fmt), a.out)
    acc = sum(r.verdict == "accept" for r in res)
    print(f"accepted {acc}/{a.trials}", file=sys.stderr)
    if a.expect == "accept" and 3 * acc < 2 * a.trials:
        return EXIT_FAIL
    if a.expect == "reject" and 3 * (a.trials - acc) < 2 * a.trials:
        return EXIT_FAIL
    return EXIT_OK


def cmd_verify(a) -> int:
    reports, code = harness.run_verification(a.suite, a.seed, a.corpus_size, a.max_cells,
                                             a.inject_fault)
    _emit(json.dumps(reports, indent=1, sort_keys=True) + "\n", a.out)
    failed = sum(1 for r in reports if r["kind"] != "monitored" and not r["holds"])
    print(f"{len(reports)} reports, {failed} hard failures", file=sys.stderr)
    return code


def cmd_corpus(a) -> int:
    params = json.loads(a.params) if a.params else {}
    params["shape"] = a.shape
    recs = corpus.generate_corpus(a.kind, params, a.seed, a.count, a.floor, a.out_dir)
    for j, r in enumerate(recs):
        print(f"{a.kind}_{j:03d}  d_tv={r['annotations']['d_tv']:.6f}")
    return EXIT_OK


def cmd_sweep(a) -> int:
    if a.config:
        spec = harness.ExperimentSpec.from_json(a.config)
        if a.out:
            spec.out = a.out
        rows, ok = harness.run_experiment(spec)
        if not spec.out:
            _emit(harness._csv_text(harness.RESULT_SCHEMA, harness.RESULT_COLUMNS,
                                    [r.row() for r in rows]), None)
        return EXIT_OK if ok else EXIT_FAIL
    rep = harness.sweep(a.n, a.eps, a.trials, a.seed, mode=a.mode)
    _emit(json.dumps(rep, indent=1) + "\n", a.out)
    print("queries/sqrt(n) relative: " + ", ".join(
        f"n={n}: {v:.3f}" for n, v in zip(rep["n"], rep["queries_over_sqrt_n_relative"])),
        file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hgut", description="Hypergrid uniformity testing toolkit")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run the tester on a distribution file")
    t.add_argument("--dist", required=True)
    t.add_argument("--eps", type=float, required=True)
    t.add_argument("--mode", choices=["theory", "practical"], default="practical")
    t.add_argument("--trials", type=int, default=10)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", help="csv or json file; stdout when omitted")
    t.add_argument("--format", choices=["csv", "json"])
    t.add_argument("--threads", type=int, help="overrides HGUT_THREADS")
    t.add_argument("--expect", choices=["accept", "reject"],
                   help="exit 1 unless this verdict has frequency >= 2/3")
    t.set_defaults(fn=cmd_test)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=["identities", "inequalities", "lemmas", "all"],
                   default="all")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--corpus-size", type=int)
    v.add_argument("--max-cells", type=int, default=36)
    v.add_argument("--inject-fault", action="store_true",
                   help="reverse the uneven arcs of every orientation in the lemma suite")
    v.add_argument("--out")
    v.set_defaults(fn=cmd_verify)

    c = sub.add_parser("corpus", help="generate annotated distribution files")
    c.add_argument("--kind", required=True, choices=sorted(corpus.GENERATORS))
    c.add_argument("--shape", type=int, nargs="+", required=True)
    c.add_argument("--params", help="JSON object of generator parameters")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--count", type=int, default=1)
    c.add_argument("--floor", type=float, help="minimum d_tv")
    c.add_argument("--out-dir", required=True)
    c.set_defaults(fn=cmd_corpus)

    s = sub.add_parser("sweep", help="query scaling sweep or experiment config")
    s.add_argument("--config", help="experiment spec JSON")
    s.add_argument("--n", type=int, nargs="+", default=[16, 64, 256])
    s.add_argument("--eps", type=float, default=0.25)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--mode", choices=["theory", "practical"], default="practical")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"hgut: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"hgut: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
