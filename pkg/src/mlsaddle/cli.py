"""Command line entry point.

Exit codes: 0 success, 1 invalid network or manifest, 2 runtime or numerical
failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys

from . import network as _network
from .experiments import ExperimentManifest, ManifestError, run_experiment, run_sweep
from .laplacian import NumericalError, build_laplacian, spectrum, spectrum_csv

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2, 64

GRAMMAR = """\
usage: mlsaddle <command> [args]

commands:
  run <manifest.json> [--seed N] [--output-dir DIR]   single experiment
  sweep <manifest.json> [--seed N] [--output-dir DIR] [--workers N]
  spectrum <network-file>                              eigenvalue CSV on stdout
  validate <network-file>                              invariant report
  builtin {two-layer,four-layer,multiplex-2x5}         print a network file

network file records (1-based indices):
  layers: N1 N2 ... NM
  dintra h D
  dinter h k D
  intra h i j w
  inter h i k j w
  gamma h i value
"""


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _parser():
    p = _Parser(prog="mlsaddle", add_help=True, usage=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    for name in ("run", "sweep"):
        s = sub.add_parser(name)
        s.add_argument("manifest")
        s.add_argument("--seed", type=int, default=None, help="override the manifest seed")
        s.add_argument("--output-dir", default=None)
        if name == "sweep":
            s.add_argument("--workers", type=int, default=1)
    sub.add_parser("spectrum").add_argument("network_file")
    sub.add_parser("validate").add_argument("network_file")
    sub.add_parser("builtin").add_argument("name", choices=_network.BUILTIN_NAMES)
    return p


def _load_manifest(args):
    m = ExperimentManifest.load(args.manifest)
    if args.seed is not None:
        m.seed = args.seed
    return m


def _validate(path, out):
    try:
        net, gamma = _network.read_network(path)
    except _network.NetworkParseError as exc:
        out.write(f"invalid: parse error: {exc}\n")
        return EXIT_INVALID
    except _network.NetworkValidationError as exc:
        out.write(f"invalid: {exc.invariant}: {exc}\n")
        return EXIT_INVALID
    lap = build_laplacian(net)
    eigs = spectrum(lap)
    connected = _network.is_connected(net)
    out.write("valid: true\n")
    out.write(f"layers: {' '.join(map(str, net.layers))}\n")
    out.write(f"node_layer_pairs: {net.n_total}\n")
    out.write(f"intra_edges: {len(net.intra_edges)}\n")
    out.write(f"inter_edges: {len(net.inter_edges)}\n")
    out.write(f"gamma_entries: {len(gamma)}\n")
    out.write(f"connected: {str(connected).lower()}\n")
    out.write(f"min_eigenvalue: {eigs[0]:.6g}\n")
    if eigs.size > 1:
        out.write(f"lambda2: {eigs[1]:.6g}\n")
    return EXIT_OK


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = _parser().parse_args(argv)
        if args.command is None:
            raise _UsageError("missing command")
    except _UsageError as exc:
        stderr.write(f"error: {exc}\n\n{GRAMMAR}")
        return EXIT_USAGE

    try:
        if args.command == "validate":
            return _validate(args.network_file, stdout)
        if args.command == "spectrum":
            net, _ = _network.read_network(args.network_file)
            stdout.write(spectrum_csv(spectrum(build_laplacian(net))))
            return EXIT_OK
        if args.command == "builtin":
            comments = []
            if args.name == "four-layer":
                comments = [f"assumed: dinter {h + 1} {k + 1} {d!r} (value not given for this pair)"
                            for (h, k), d in _network.ASSUMED_FOUR_LAYER_SCALES.items()]
            stdout.write(_network.dump_network(_network.build_paper_networks(args.name), comments=comments))
            return EXIT_OK
        manifest = _load_manifest(args)
        if args.command == "run":
            _, report = run_experiment(manifest, output_dir=args.output_dir)
            stdout.write(report.to_text())
            return EXIT_OK
        result = run_sweep(manifest, output_dir=args.output_dir, workers=args.workers)
        stdout.write(result.to_csv())
        return EXIT_OK
    except (_network.NetworkParseError, _network.NetworkValidationError, ManifestError) as exc:
        stderr.write(f"invalid input: {exc}\n")
        return EXIT_INVALID
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_RUNTIME
    except (NumericalError, ArithmeticError, ValueError) as exc:
        stderr.write(f"runtime failure: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
