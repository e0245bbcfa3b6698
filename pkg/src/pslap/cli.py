"""Command-line interface.

Subcommands:
  spectra    sweep one point cloud and emit the spectrum records as JSON
  featurize  mutation-site feature vectors from a wild-type/mutant PQR pair
  demo       run the built-in two-cluster example
  verify     randomized engine-versus-oracle self-check
  info       version, kernel backend, and defaults

Exit codes: 0 success, 1 verification failure, 2 bad input or parse
error, 3 numerical failure, 4 semantic mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .demo import run_demo
from .engine import (
    DEFAULT_TOL_ABS,
    DEFAULT_TOL_REL,
    psl_over_filtration,
    resolve_threads,
    sweep_to_json,
)
from .errors import InputError, MalformedRecord, NumericalError, PslapError, SemanticError
from .filtration import build_alpha, build_vr, dump_complex
from .geometry import DistanceSpec, LabeledPointCloud, pairwise_distances
from .kernels import BACKEND, available_backends
from .oracle import run_verification
from .protein import (
    LAYOUT_VERSION,
    FeatureConfig,
    MutationSpec,
    featurize_site,
    parse_pqr,
    write_features_csv,
)
from .sheaf import CONSTANT_ONE, PRODUCT_OF_PAIRWISE_DISTANCES, SheafWeighting

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_SEMANTIC = 4

CONFIG_KEYS = ("cutoff", "grid", "delta", "elements", "tol_rel", "tol_abs", "threads")


def read_points_file(path: str) -> LabeledPointCloud:
    """Point cloud from a text file: `x y z [charge]` per line, blank
    lines and `#` comments skipped. A missing charge column means 1."""
    coords, charges = [], []
    arity = None
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            tokens = text.split()
            if len(tokens) not in (3, 4):
                raise MalformedRecord(line_no, f"expected 3 or 4 columns, got {len(tokens)}")
            if arity is None:
                arity = len(tokens)
            elif len(tokens) != arity:
                raise MalformedRecord(line_no, "mixed column counts in one file")
            try:
                vals = [float(tok) for tok in tokens]
            except ValueError as exc:
                raise MalformedRecord(line_no, str(exc)) from exc
            coords.append(vals[:3])
            charges.append(vals[3] if len(vals) == 4 else 1.0)
    if not coords:
        raise InputError(f"no points in {path}")
    return LabeledPointCloud.from_arrays(np.array(coords), np.array(charges))


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        grid = tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise InputError(f"grid must be comma-separated numbers, got {text!r}") from None
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("grid must be nonempty and strictly ascending")
    return grid


def _parse_index_set(text: str) -> frozenset:
    try:
        return frozenset(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise InputError(f"expected comma-separated indices, got {text!r}") from None


def read_config_file(path: str) -> dict:
    """`key = value` lines; unknown keys are rejected rather than ignored."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise MalformedRecord(line_no, f"expected key=value, got {text!r}")
            key, _, value = text.partition("=")
            key, value = key.strip(), value.strip()
            if key not in CONFIG_KEYS:
                raise MalformedRecord(line_no, f"unknown config key {key!r}")
            out[key] = value
    return out


def _config_from(args, file_values: dict) -> FeatureConfig:
    """File values first, command-line flags override."""
    kwargs = {}
    if "cutoff" in file_values:
        kwargs["cutoff"] = float(file_values["cutoff"])
    if "grid" in file_values:
        kwargs["grid"] = _parse_grid(file_values["grid"])
    if "delta" in file_values:
        kwargs["delta"] = float(file_values["delta"])
    if "elements" in file_values:
        kwargs["elements"] = tuple(e.strip().upper() for e in file_values["elements"].split(","))
    if "tol_rel" in file_values:
        kwargs["tol_rel"] = float(file_values["tol_rel"])
    if "tol_abs" in file_values:
        kwargs["tol_abs"] = float(file_values["tol_abs"])
    if "threads" in file_values:
        kwargs["threads"] = int(file_values["threads"])
    if args.cutoff is not None:
        kwargs["cutoff"] = args.cutoff
    if args.grid is not None:
        kwargs["grid"] = _parse_grid(args.grid)
    if args.delta is not None:
        kwargs["delta"] = args.delta
    if args.threads is not None:
        kwargs["threads"] = args.threads
    try:
        return FeatureConfig(**kwargs)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _emit(text: str, out_path: Optional[str]):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _cmd_spectra(args) -> int:
    cloud = read_points_file(args.points)
    if args.unit_charges:
        cloud = LabeledPointCloud.from_arrays(cloud.coords, np.ones(len(cloud)))
    grid = _parse_grid(args.grid)

    if args.complex == "alpha":
        if args.metric == "bipartite":
            raise InputError("the bipartite metric applies to the vr complex only")
        fc = build_alpha(cloud)
    else:
        if args.metric == "bipartite":
            set_a = _parse_index_set(args.set_a or "")
            set_b = frozenset(range(len(cloud))) - set_a
            spec = DistanceSpec.bipartite(set_a, set_b)
        else:
            spec = DistanceSpec.euclidean()
        dist = pairwise_distances(cloud, spec)
        fc = build_vr(dist, max_dim=2, max_scale=max(grid) + args.delta)

    if args.dump_complex:
        _emit(dump_complex(fc), args.out)
        return EXIT_OK

    w = SheafWeighting(charges=cloud.charges, f_kind=args.f_kind)
    sweep = psl_over_filtration(
        fc, cloud, w, grid, delta=args.delta, q=args.q,
        tol_rel=args.tol_rel, tol_abs=args.tol_abs,
    )
    _emit(sweep_to_json(sweep, q=args.q, delta=args.delta), args.out)
    return EXIT_OK


def _cmd_featurize(args) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    config = _config_from(args, file_values)
    wt_atoms = parse_pqr(args.wt)
    mt_atoms = parse_pqr(args.mt)
    mutations = [MutationSpec.parse(m) for m in args.mutation]

    vectors = [featurize_site(wt_atoms, mt_atoms, m, config) for m in mutations]

    if args.format == "csv":
        import io

        buf = io.StringIO()
        write_features_csv(vectors, buf)
        _emit(buf.getvalue(), args.out)
    else:
        if len(vectors) == 1:
            _emit(vectors[0].to_json(), args.out)
        else:
            _emit(json.dumps([v.to_dict() for v in vectors], indent=2), args.out)
    return EXIT_OK


def _cmd_demo(args) -> int:
    if args.json:
        import io

        sink = io.StringIO()
        payload = run_demo(out=sink)
        _emit(json.dumps(payload, indent=2), args.out)
    else:
        run_demo(out=sys.stdout)
    return EXIT_OK


def _cmd_verify(args) -> int:
    outcome = run_verification(trials=args.trials, seed=args.seed)
    failures = 0
    for report in outcome.reports:
        if args.json:
            print(report.to_json())
        else:
            status = "ok  " if report.passed else "FAIL"
            inst = report.instance
            print(
                f"{status} trial={inst['trial']:<3} {inst['check']:<15} kind={inst['kind']:<9} "
                f"q={inst['q']} delta={inst['delta']:<3} max_rel={report.max_rel_err:.3e}"
            )
        failures += 0 if report.passed else 1
    total = len(outcome.reports)
    print(f"{total - failures}/{total} checks passed", file=sys.stderr)
    return EXIT_OK if outcome.ok else EXIT_VERIFY


def _cmd_info(args) -> int:
    payload = {
        "version": __version__,
        "layout_version": LAYOUT_VERSION,
        "kernel_backend": BACKEND,
        "kernel_backends_available": sorted(available_backends()),
        "threads": resolve_threads(),
        "defaults": {
            "cutoff": FeatureConfig().cutoff,
            "grid": list(FeatureConfig().grid),
            "delta": FeatureConfig().delta,
            "elements": list(FeatureConfig().elements),
            "tol_rel": DEFAULT_TOL_REL,
            "tol_abs": DEFAULT_TOL_ABS,
            "n_features": FeatureConfig().n_features,
        },
    }
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        print(f"pslap {payload['version']}")
        print(f"kernel backend: {payload['kernel_backend']}")
        print(f"available: {', '.join(payload['kernel_backends_available'])}")
        print(f"feature vector length: {payload['defaults']['n_features']}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pslap",
        description="Persistent sheaf Laplacian spectra and mutation-site features.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectra", help="sweep a point cloud, emit spectrum JSON")
    p.add_argument("--points", required=True, help="text file, `x y z [charge]` per line")
    p.add_argument("--complex", choices=("vr", "alpha"), default="vr")
    p.add_argument("--metric", choices=("euclidean", "bipartite"), default="euclidean")
    p.add_argument("--set-a", help="comma-separated point indices of the first bipartite set")
    p.add_argument("--q", type=int, choices=(0, 1), default=0)
    p.add_argument("--grid", default="3,4,5,6,7,8,9", help="comma-separated thresholds")
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument(
        "--f-kind",
        choices=(PRODUCT_OF_PAIRWISE_DISTANCES, CONSTANT_ONE),
        default=PRODUCT_OF_PAIRWISE_DISTANCES,
    )
    p.add_argument("--unit-charges", action="store_true", help="replace charges with 1")
    p.add_argument("--tol-rel", type=float, default=DEFAULT_TOL_REL)
    p.add_argument("--tol-abs", type=float, default=DEFAULT_TOL_ABS)
    p.add_argument("--dump-complex", action="store_true", help="print the filtered complex and stop")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=_cmd_spectra)

    p = sub.add_parser("featurize", help="feature vectors for point mutations")
    p.add_argument("--wt", required=True, help="wild-type PQR file")
    p.add_argument("--mt", required=True, help="mutant PQR file")
    p.add_argument(
        "--mutation", required=True, action="append",
        help="CHAIN:POS:WT:MT, repeatable for batch runs",
    )
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--cutoff", type=float, help="environment cutoff distance")
    p.add_argument("--grid", help="comma-separated thresholds")
    p.add_argument("--delta", type=float)
    p.add_argument("--threads", type=int)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("demo", help="run the built-in two-cluster example")
    p.add_argument("--json", action="store_true", help="emit sweep JSON instead of the table")
    p.add_argument("--out", help="write to this file instead of stdout")
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("verify", help="randomized self-check against brute-force references")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true", help="one JSON report per line")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("info", help="version, backend, defaults")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_info)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SemanticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PslapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
