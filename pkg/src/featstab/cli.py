"""Command-line client for the stability-measure service.

Files are parsed locally; the parsed payload is then handed to the service
handlers in-process (default) or POSTed to a running server (``--server``).
Both paths produce byte-identical records for identical flags and seed; the
only nondeterministic output field is ``median_seconds`` in ``bench`` rows.

On failure every command prints a single machine-parseable line to stderr,
``error=<Class> detail=<message>``, and exits nonzero.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

import httpx

from . import fileio
from .core import SelectionEnsemble, SimilarityMatrix
from .errors import InsufficientEnsembles, StabilityError
from .experiments import demo_similarity_matrix
from .service import handlers, schemas

_ROUTES = {
    "/compute": (handlers.compute, schemas.ComputeResponse),
    "/similarity": (handlers.similarity, schemas.SimilarityResponse),
    "/exhaustive": (handlers.exhaustive, schemas.ExhaustiveResponse),
    "/compare": (handlers.compare, schemas.CompareResponse),
    "/bench": (handlers.bench, schemas.BenchResponse),
}


class _RemoteFailure(Exception):
    def __init__(self, error_class: str, detail: str):
        super().__init__(detail)
        self.error_class = error_class
        self.detail = detail


def _dispatch(server: Optional[str], path: str, request):
    handler, response_model = _ROUTES[path]
    if server is None:
        return handler(request)
    response = httpx.post(
        server.rstrip("/") + path, json=request.model_dump(), timeout=None
    )
    if response.status_code != 200:
        try:
            payload = response.json()
        except ValueError:
            raise _RemoteFailure("HTTPError", f"status {response.status_code}")
        if "error" in payload:
            raise _RemoteFailure(payload["error"], payload.get("detail", ""))
        raise _RemoteFailure("RequestValidationError", str(payload.get("detail", "")))
    return response_model.model_validate(response.json())


# ---------------------------------------------------------------------------
# Payload construction from local files.
# ---------------------------------------------------------------------------


def _similarity_payload(sim: SimilarityMatrix) -> schemas.SimilarityPayload:
    return schemas.SimilarityPayload(
        ids=list(sim.universe.ids),
        values=[[float(v) for v in row] for row in sim.values],
    )


def _ensemble_payload(ensemble: SelectionEnsemble) -> schemas.EnsemblePayload:
    order = {fid: k for k, fid in enumerate(ensemble.universe.ids)}
    return schemas.EnsemblePayload(
        universe=list(ensemble.universe.ids),
        sets=[sorted(s.members, key=order.__getitem__) for s in ensemble.sets],
    )


def _data_payload(path: str) -> schemas.DataPayload:
    data = fileio.read_data_csv(path)
    return schemas.DataPayload(
        ids=list(data.universe.ids),
        rows=[[float(v) for v in row] for row in data.values],
    )


def _measure_names(arg: Optional[str]) -> list[str]:
    if arg is None:
        return list(schemas.DEFAULT_MEASURES)
    return [token.strip() for token in arg.split(",") if token.strip()]


def _expectation_mode(flag: str) -> str:
    return "monte_carlo" if flag == "mc" else "exact"


# ---------------------------------------------------------------------------
# Record rendering. Key order is fixed so output diffs stay meaningful.
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    return "undefined" if value is None else repr(float(value))


def _fmt_seed(seed: Optional[int]) -> str:
    return "-" if seed is None else str(seed)


def _render_compute(resp: schemas.ComputeResponse) -> str:
    lines = [
        f"measure={r.measure} value={_fmt(r.value)} "
        f"n_undefined_pairs={r.n_undefined_pairs} "
        f"expectation={r.expectation} seed={_fmt_seed(r.seed)}"
        for r in resp.results
    ]
    return "\n".join(lines) + "\n"


def _render_similarity(resp: schemas.SimilarityResponse) -> str:
    payload = resp.similarity
    lines = [",".join(payload.ids)]
    for row in payload.values:
        lines.append(",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def _correlation_entries(corr: schemas.CorrelationPayload) -> list[str]:
    names = corr.measures
    return [
        f"m1={names[i]} m2={names[j]} value={_fmt(corr.values[i][j])}"
        for i in range(len(names))
        for j in range(i, len(names))
    ]


def _render_exhaustive(resp: schemas.ExhaustiveResponse) -> str:
    names = resp.correlations.measures
    lines = [
        f"exhaustive p={resp.p} theta={_fmt(resp.theta)} "
        f"combinations={resp.combinations} "
        f"defined_combinations={resp.defined_combinations}"
    ]
    for row in resp.rows:
        values = " ".join(f"{name}={_fmt(row.values[name])}" for name in names)
        lines.append(
            f"combination index={row.index} "
            f"set_a={','.join(row.set_a)} set_b={','.join(row.set_b)} {values}"
        )
    lines.extend(f"correlation {entry}" for entry in _correlation_entries(resp.correlations))
    return "\n".join(lines) + "\n"


def _render_compare(resp: schemas.CompareResponse) -> str:
    lines = [
        f"compare datasets={len(resp.per_dataset)} "
        f"measures={','.join(resp.measures)}"
    ]
    for index, (matrix, used) in enumerate(zip(resp.per_dataset, resp.ensembles_used)):
        lines.append(f"dataset index={index} ensembles_used={used}")
        lines.extend(
            f"dataset_correlation dataset={index} {entry}"
            for entry in _correlation_entries(matrix)
        )
    lines.extend(f"mean_correlation {entry}" for entry in _correlation_entries(resp.mean))
    return "\n".join(lines) + "\n"


def _render_bench(resp: schemas.BenchResponse) -> str:
    lines = [
        f"bench p={resp.p} m={resp.m} set_size={resp.set_size} "
        f"repetitions={resp.repetitions} mc_samples={resp.mc_samples} "
        f"seed={resp.seed} theta={_fmt(resp.theta)}"
    ]
    for row in resp.rows:
        lines.append(
            f"bench_result measure={row.measure} "
            f"median_seconds={_fmt(row.median_seconds)} "
            f"value={_fmt(row.value)} n_undefined_pairs={row.n_undefined_pairs}"
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------


def _cmd_compute(args) -> int:
    ensemble = fileio.read_ensemble_file(args.ensemble)
    similarity = data = None
    if args.similarity is not None:
        similarity = _similarity_payload(fileio.read_similarity_csv(args.similarity))
    if args.data is not None:
        data = _data_payload(args.data)
    request = schemas.ComputeRequest(
        ensemble=_ensemble_payload(ensemble),
        similarity=similarity,
        data=data,
        measures=_measure_names(args.measures),
        config=schemas.ConfigPayload(
            theta=args.theta,
            expectation=_expectation_mode(args.expectation),
            mc_samples=args.mc_samples,
            seed=args.seed,
            enumeration_cap=args.enumeration_cap,
        ),
    )
    response = _dispatch(args.server, "/compute", request)
    _emit(_render_compute(response), args.output)
    return 0


def _cmd_similarity(args) -> int:
    request = schemas.SimilarityRequest(data=_data_payload(args.data))
    response = _dispatch(args.server, "/similarity", request)
    _emit(_render_similarity(response), args.output)
    return 0


def _cmd_exhaustive(args) -> int:
    if args.demo:
        sim = demo_similarity_matrix()
    else:
        sim = fileio.read_similarity_csv(args.similarity)
    request = schemas.ExhaustiveRequest(
        similarity=_similarity_payload(sim),
        theta=args.theta,
        measures=_measure_names(args.measures),
    )
    response = _dispatch(args.server, "/exhaustive", request)
    _emit(_render_exhaustive(response), args.output)
    return 0


def _cmd_compare(args) -> int:
    if not args.dataset:
        raise InsufficientEnsembles("need at least one --dataset")
    datasets = []
    for group in args.dataset:
        if len(group) < 2:
            raise InsufficientEnsembles(
                "each --dataset needs a matrix file and at least one ensemble file"
            )
        matrix_path, *ensemble_paths = group
        similarity = data = None
        if args.from_data:
            data = _data_payload(matrix_path)
        else:
            similarity = _similarity_payload(fileio.read_similarity_csv(matrix_path))
        ensembles = []
        for path in ensemble_paths:
            ensemble = fileio.read_ensemble_file(path)
            ensembles.append(_ensemble_payload(ensemble).sets)
        datasets.append(
            schemas.DatasetPayload(
                similarity=similarity, data=data, ensembles=ensembles
            )
        )
    request = schemas.CompareRequest(
        datasets=datasets,
        theta=args.theta,
        expectation=_expectation_mode(args.expectation),
        mc_samples=args.mc_samples,
        seed=args.seed,
        enumeration_cap=args.enumeration_cap,
        measures=_measure_names(args.measures),
    )
    response = _dispatch(args.server, "/compare", request)
    _emit(_render_compare(response), args.output)
    return 0


def _cmd_bench(args) -> int:
    sim = fileio.read_similarity_csv(args.similarity)
    request = schemas.BenchRequest(
        similarity=_similarity_payload(sim),
        m=args.m,
        set_size=args.set_size,
        repetitions=args.repetitions,
        mc_samples=args.mc_samples,
        seed=args.seed,
        theta=args.theta,
        measures=_measure_names(args.measures),
    )
    response = _dispatch(args.server, "/bench", request)
    _emit(_render_bench(response), args.output)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("featstab.service.app:app", host=args.host, port=args.port)
    return 0


def _add_common(parser: argparse.ArgumentParser, expectation_default: str) -> None:
    parser.add_argument(
        "--measures",
        help="comma-separated measures (default: all seven)",
    )
    parser.add_argument("--theta", type=float, default=0.9)
    parser.add_argument(
        "--expectation", choices=("exact", "mc"), default=expectation_default
    )
    parser.add_argument("--mc-samples", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--enumeration-cap", type=int, default=10_000_000)


def _add_io(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", help="write output to this path instead of stdout")
    parser.add_argument("--server", help="base URL of a running service")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="featstab",
        description="Feature-selection stability measures with similarity adjustments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    compute = sub.add_parser("compute", help="score an ensemble file")
    compute.add_argument("--ensemble", required=True)
    compute.add_argument("--similarity")
    compute.add_argument("--data")
    _add_common(compute, "exact")
    _add_io(compute)
    compute.set_defaults(func=_cmd_compute)

    similarity = sub.add_parser(
        "similarity", help="build a similarity matrix from a data CSV"
    )
    similarity.add_argument("--data", required=True)
    _add_io(similarity)
    similarity.set_defaults(func=_cmd_similarity)

    exhaustive = sub.add_parser(
        "exhaustive", help="score all subset pairs of a small universe"
    )
    group = exhaustive.add_mutually_exclusive_group(required=True)
    group.add_argument("--similarity")
    group.add_argument(
        "--demo",
        action="store_true",
        help="use the built-in 7-feature example matrix",
    )
    exhaustive.add_argument("--theta", type=float, default=0.9)
    exhaustive.add_argument("--measures")
    _add_io(exhaustive)
    exhaustive.set_defaults(func=_cmd_exhaustive)

    compare = sub.add_parser(
        "compare", help="correlate measures across data sets of ensembles"
    )
    compare.add_argument(
        "--dataset",
        nargs="+",
        action="append",
        metavar=("MATRIX", "ENSEMBLE"),
        help="a similarity (or data) file followed by its ensemble files",
    )
    compare.add_argument(
        "--from-data",
        action="store_true",
        help="treat each dataset's matrix file as a raw data CSV",
    )
    _add_common(compare, "mc")
    _add_io(compare)
    compare.set_defaults(func=_cmd_compare)

    bench = sub.add_parser("bench", help="time the measures on a random ensemble")
    bench.add_argument("--similarity", required=True)
    bench.add_argument("--m", type=int, default=10)
    bench.add_argument("--set-size", type=int, required=True)
    bench.add_argument("--repetitions", type=int, default=5)
    bench.add_argument("--mc-samples", type=int, default=10_000)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--theta", type=float, default=0.9)
    bench.add_argument("--measures")
    _add_io(bench)
    bench.set_defaults(func=_cmd_bench)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(func=_cmd_serve)

    return parser


def _error_line(error_class: str, detail: str) -> str:
    collapsed = " ".join(str(detail).split())
    return f"error={error_class} detail={collapsed}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StabilityError as exc:
        print(_error_line(type(exc).__name__, str(exc)), file=sys.stderr)
        return 1
    except _RemoteFailure as exc:
        print(_error_line(exc.error_class, exc.detail), file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(_error_line("ConnectionError", str(exc)), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
