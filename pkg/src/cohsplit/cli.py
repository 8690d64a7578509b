"""Command line entry point.

Exit statuses: 0 success, 2 unreadable input, 3 unmet precondition
(including NoWitness), 4 internal invariant violation or failed
certificate verification.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .certificates import dump, greedy_certificate, load, seal, verify
from .coherent import AUTO, FINITE, INFINITE, coherent_split
from .exceptions import InvariantViolation, PreconditionError, VerificationError
from .generate import KINDS, generate_stream
from .group import GroupElement
from .oracle import FiniteValuedSequence, OracleState, p_limit
from .periodic import PeriodicSet
from .simulate import OpenBox, SimConfig, witness_no_convergence, witness_selective
from .splitter import SplitterState
from .validation import check_family


class InputError(Exception):
    pass


def _read_jsonl(path):
    rows = []
    try:
        fh = sys.stdin if path == "-" else open(path)
        with fh:
            for lineno, line in enumerate(fh, 1):
                if line.strip():
                    rows.append(json.loads(line))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None
    return rows


def _read_json(path):
    try:
        return load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_elements(path):
    try:
        return [GroupElement.from_json(row["element"] if isinstance(row, dict) else row)
                for row in _read_jsonl(path)]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad element: {exc}") from None


def _write_jsonl(rows, out):
    fh = sys.stdout if out in (None, "-") else open(out, "w")
    try:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def _manifest(args, command, inputs):
    return {
        "command": command,
        "inputs": inputs,
        "flags": {k: v for k, v in sorted(vars(args).items())
                  if k not in ("func", "command", "sim_command") and not k.startswith("_")},
        "version": __version__,
    }


def _emit_certificate(body, out):
    cert = seal(body)
    verify(cert)  # never write a certificate that does not replay
    if out in (None, "-"):
        json.dump(cert, sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")
    else:
        dump(cert, out)
    return cert


def cmd_split(args):
    elements = _read_elements(args.input)
    state = SplitterState()
    rows = []
    for a in check_family(elements, min_size=0):
        rows.append(state.feed(a).to_json())
    rows.append({"summary": state.summary()})
    _write_jsonl(rows, args.out)
    if args.certificate:
        body = greedy_certificate(state)
        body["manifest"] = _manifest(args, "split", [args.input])
        _emit_certificate(body, args.certificate)
    return 0


def cmd_coherent_split(args):
    elements = _read_elements(args.input)
    cutoff = args.cutoff if args.cutoff is not None else len(elements)
    cert = coherent_split(elements, cutoff, args.mode, {}, args.schedule_length, args.threshold)
    body = cert.to_json()
    body["manifest"] = _manifest(args, "coherent-split", [args.input])
    _emit_certificate(body, args.out)
    if args.out not in (None, "-"):
        print(json.dumps({"path": cert.path, "class_sizes": [len(cert.class0), len(cert.class1)]}))
    return 0


def cmd_oracle(args):
    """Answer membership queries and p-limit requests against one oracle."""
    state = OracleState(args.id)
    results = []
    try:
        for row in _read_jsonl(args.input):
            if "cells" in row:
                seq = FiniteValuedSequence([(lab, PeriodicSet.from_json(s)) for lab, s in row["cells"]])
                results.append({"p_limit": p_limit(state, seq)})
            else:
                results.append({"answer": state.query(PeriodicSet.from_json(row["query"]))})
    except (KeyError, TypeError) as exc:
        raise InputError(f"{args.input}: {exc}") from None
    _write_jsonl([e.to_json() for e in state.transcript], args.transcript)
    if args.transcript not in (None, "-"):
        _write_jsonl(results, None)
    return 0


def cmd_selective(args):
    cfg = SimConfig.from_json(_read_json(args.config))
    raw = _read_json(args.boxes)
    try:
        boxes = [OpenBox.from_json(b) for b in raw]
    except (TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{args.boxes}: {exc}") from None
    body = witness_selective(cfg, args.p, boxes)
    body["manifest"] = _manifest(args, "simulate selective", [args.config, args.boxes])
    _emit_certificate(body, args.out)
    return 0


def cmd_refute(args):
    cfg = SimConfig.from_json(_read_json(args.config))
    family = []
    try:
        for row in _read_jsonl(args.family):
            if isinstance(row, dict):
                E = GroupElement.from_json(row["E"])
                g = row.get("g")
                g = None if g is None else {str(b): int(v) for b, v in g.items()}
            else:
                E, g = GroupElement.from_json(row), None
            family.append((g, E))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InputError(f"{args.family}: {exc}") from None
    body = witness_no_convergence(cfg, family, args.mode, args.schedule_length)
    body["manifest"] = _manifest(args, "simulate refute", [args.config, args.family])
    _emit_certificate(body, args.out)
    return 0


def cmd_generate(args):
    stream = generate_stream(args.kind, args.size, args.seed, n_ultrafilters=args.ultrafilters,
                             n_generators=args.generators, depth=args.depth,
                             max_points=args.max_points)
    _write_jsonl([a.to_json() for a in stream], args.out)
    return 0


def cmd_verify(args):
    status = 0
    for path in args.certificates:
        cert = _read_json(path)
        try:
            summary = verify(cert)
        except VerificationError as exc:
            print(f"FAIL {path}: check '{exc.check}' {exc.detail}".rstrip())
            status = 4
        else:
            print(f"OK {path}: {json.dumps(summary, sort_keys=True)}")
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohsplit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="greedy split of a JSON-lines element stream")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--certificate", help="also write a replayable certificate here")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("coherent-split", help="coherent splitting map with certificate")
    p.add_argument("--input", required=True)
    p.add_argument("--cutoff", type=int)
    p.add_argument("--mode", choices=(AUTO, FINITE, INFINITE), default=AUTO)
    p.add_argument("--schedule-length", type=int, help="number of Hit goals (forcing route)")
    p.add_argument("--threshold", type=int, help="auto-mode star point threshold")
    p.add_argument("--out")
    p.set_defaults(func=cmd_coherent_split)

    p = sub.add_parser("oracle", help="query a fresh simulated ultrafilter")
    p.add_argument("--input", required=True,
                   help='JSON lines: {"query": set} or {"cells": [[label, set], ...]}')
    p.add_argument("--id", default="p")
    p.add_argument("--transcript")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("simulate", help="finite-stage group construction")
    simsub = p.add_subparsers(dest="sim_command", required=True)
    s = simsub.add_parser("selective")
    s.add_argument("--config", required=True)
    s.add_argument("--boxes", required=True)
    s.add_argument("--p", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_selective)
    s = simsub.add_parser("refute")
    s.add_argument("--config", required=True)
    s.add_argument("--family", required=True)
    s.add_argument("--mode", choices=(AUTO, FINITE, INFINITE), default=AUTO)
    s.add_argument("--schedule-length", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_refute)

    p = sub.add_parser("generate", help="reproducible distinct element streams")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ultrafilters", type=int, default=4)
    p.add_argument("--generators", type=int, default=25)
    p.add_argument("--depth", type=int, default=10)
    p.add_argument("--max-points", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="replay certificates")
    p.add_argument("certificates", nargs="+")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationError as exc:
        print(f"error: verification failed, check '{exc.check}': {exc.detail}", file=sys.stderr)
        return 4
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
