"""demoselect command-line interface.

The CLI is a thin client over the HTTP service: every subcommand builds a
request, posts it to the service, and writes the response to JSON/CSV
files. By default an in-process instance of the service handles the
request (no setup needed, fully offline); pass --server to talk to a
running `demoselect serve` instance instead. Either way the same wire
format is exercised.

All randomness derives from --seed through named substreams (split,
kmeans, select, random-baseline, spectral-repeat), so any subcommand is
bitwise reproducible for a fixed seed; live LLM output is the only
nondeterministic ingredient, and mock-server runs reproduce exactly.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class _InProcessTransport(httpx.BaseTransport):
    """Sync httpx transport that drives an ASGI app directly."""

    def __init__(self, app):
        self._asgi = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        import asyncio

        async def run():
            response = await self._asgi.handle_async_request(request)
            await response.aread()
            return response

        response = asyncio.run(run())
        return httpx.Response(
            status_code=response.status_code,
            headers=response.headers,
            content=response.content,
        )


class ServiceClient:
    """Posts requests either to a remote service or an in-process app."""

    def __init__(self, server: str | None):
        if server:
            self._client = httpx.Client(base_url=server.rstrip("/"), timeout=None)
        else:
            from .service import create_app

            self._client = httpx.Client(
                transport=_InProcessTransport(create_app()),
                base_url="http://demoselect.internal",
                timeout=None,
            )

    def post(self, path: str, payload: dict) -> dict:
        try:
            resp = self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            raise RuntimeError(f"service unreachable: {exc}") from exc
        if resp.status_code != 200:
            try:
                detail = resp.json().get("detail")
            except ValueError:
                detail = resp.text[:200]
            if isinstance(detail, dict):
                raise RuntimeError(f"{detail.get('error', 'Error')}: {detail.get('message', '')}")
            raise RuntimeError(f"HTTP {resp.status_code}: {detail}")
        return resp.json()

    def close(self):
        self._client.close()


def _add_data_args(p: argparse.ArgumentParser):
    p.add_argument("--data", required=True, help="input CSV file (header row required)")
    p.add_argument("--label", default=None, help="label column name or index (default: last column)")
    p.add_argument("--seed", type=int, default=0, help="master seed for all randomness (default 0)")
    p.add_argument("--train-frac", type=float, default=0.8, help="training fraction (default 0.8)")
    p.add_argument(
        "--use-all-rows", action="store_true",
        help="estimate over every row instead of the training split",
    )


def _add_estimator_args(p: argparse.ArgumentParser):
    p.add_argument(
        "--tokenizer", required=True,
        help="tokenizer definition file, or builtin 'whitespace-hash' / 'byte-level'",
    )
    p.add_argument("--keep-special", action="store_true", help="keep special tokens when encoding")
    p.add_argument("--knn", type=int, default=10, help="kNN graph neighbor count (default 10)")
    p.add_argument("--horizon", type=int, default=50, help="eigengap search horizon (default 50)")
    p.add_argument(
        "--symmetrization", choices=["union", "mutual"], default="union",
        help="kNN graph symmetrization rule (default union)",
    )


def _add_llm_args(p: argparse.ArgumentParser):
    p.add_argument("--llm-url", required=True, help="OpenAI-compatible endpoint base URL")
    p.add_argument("--model", required=True, help="model identifier sent to the endpoint")
    p.add_argument("--temperature", type=float, default=0.1)
    p.add_argument("--max-tokens", type=int, default=16)
    p.add_argument("--timeout", type=float, default=30.0, help="per-request timeout in seconds")
    p.add_argument("--concurrency", type=int, default=4, help="max LLM requests in flight")
    p.add_argument("--retry-backoff", type=float, default=1.0, help="base retry backoff in seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demoselect",
        description="Estimate, select, and benchmark in-context demonstrations "
        "for tabular classification.",
        epilog="Randomness: one master --seed feeds named substreams "
        "(split, kmeans, select, random-baseline, spectral-repeat), so outputs "
        "are reproducible per seed.",
    )
    parser.add_argument("--server", default=None, help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="estimate d and pick one demonstration per cluster")
    _add_data_args(p_est)
    _add_estimator_args(p_est)
    p_est.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p_est.add_argument("--dump-graph", default=None, metavar="DIR",
                       help="also write dense.csv and edges.csv into DIR")
    p_est.add_argument("--dump-eigenvalues", default=None, metavar="PATH",
                       help="also write a rank,eigenvalue CSV")

    p_sel = sub.add_parser("select", help="print the selected demonstration texts")
    _add_data_args(p_sel)
    _add_estimator_args(p_sel)
    p_sel.add_argument("--out", default=None, help="output JSON path (default: stdout)")

    p_eig = sub.add_parser("eigens", help="dump the leading Laplacian eigenvalues")
    _add_data_args(p_eig)
    _add_estimator_args(p_eig)
    p_eig.add_argument("--out", required=True, help="output CSV path (rank,eigenvalue)")

    p_cls = sub.add_parser("classify", help="classify the test split with spectral-selected demos")
    _add_data_args(p_cls)
    _add_estimator_args(p_cls)
    _add_llm_args(p_cls)
    p_cls.add_argument("--out", default=None, help="output JSON path (default: stdout)")

    p_bench = sub.add_parser("bench", help="benchmark random shot counts vs spectral selection")
    _add_data_args(p_bench)
    _add_estimator_args(p_bench)
    _add_llm_args(p_bench)
    p_bench.add_argument("--mode", choices=["random", "spectral", "both"], default="both")
    p_bench.add_argument("--shots", default="0,2,4,6,8,10",
                         help="comma-separated shot counts for random mode")
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.add_argument("--out", required=True, help="report JSON path")

    p_srv = sub.add_parser("serve", help="run the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8008)

    return parser


def _data_payload(args) -> dict:
    csv_text = Path(args.data).read_text(encoding="utf-8")
    return {
        "csv_text": csv_text,
        "label": args.label,  # name-first, then index: resolved service-side
        "tokenizer": args.tokenizer,
        "keep_special": args.keep_special,
        "knn_k": args.knn,
        "horizon": args.horizon,
        "seed": args.seed,
        "train_frac": args.train_frac,
        "use_all_rows": args.use_all_rows,
        "symmetrization": args.symmetrization,
    }


def _llm_payload(args) -> dict:
    return {
        "base_url": args.llm_url,
        "model": args.model,
        "temperature": args.temperature,
        "max_tokens": args.max_tokens,
        "timeout": args.timeout,
    }


def _write_json(obj: dict, out: str | None):
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_eigen_csv(eigenvalues: list[float], path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rank", "eigenvalue"])
        for rank, value in enumerate(eigenvalues):
            writer.writerow([rank, repr(value)])


def cmd_estimate(client: ServiceClient, args) -> int:
    payload = _data_payload(args)
    payload["include_graph"] = bool(args.dump_graph)
    resp = client.post("/estimate", payload)
    _write_json(
        {
            "d": resp["d"],
            "chosen_row_indices": resp["chosen_row_indices"],
            "eigenvalues": resp["eigenvalues"],
            "cluster_sizes": resp["cluster_sizes"],
        },
        args.out,
    )
    if args.dump_eigenvalues:
        _write_eigen_csv(resp["eigenvalues"], args.dump_eigenvalues)
    if args.dump_graph:
        dump_dir = Path(args.dump_graph)
        dump_dir.mkdir(parents=True, exist_ok=True)
        with open(dump_dir / "dense.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            for row in resp["graph"]["dense"]:
                writer.writerow([repr(v) for v in row])
        with open(dump_dir / "edges.csv", "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["i", "j"])
            for i, j in resp["graph"]["edges"]:
                writer.writerow([i, j])
    return EXIT_OK


def cmd_select(client: ServiceClient, args) -> int:
    resp = client.post("/select", _data_payload(args))
    _write_json(resp, args.out)
    return EXIT_OK


def cmd_eigens(client: ServiceClient, args) -> int:
    resp = client.post("/eigens", _data_payload(args))
    _write_eigen_csv(resp["eigenvalues"], args.out)
    return EXIT_OK


def cmd_classify(client: ServiceClient, args) -> int:
    payload = _data_payload(args)
    payload["llm"] = _llm_payload(args)
    payload["concurrency"] = args.concurrency
    payload["retry_backoff"] = args.retry_backoff
    resp = client.post("/classify", payload)
    _write_json(resp, args.out)
    return EXIT_OK


def cmd_bench(client: ServiceClient, args) -> int:
    try:
        shots = [int(s) for s in args.shots.split(",") if s.strip() != ""]
    except ValueError:
        raise RuntimeError(f"invalid --shots value {args.shots!r}") from None
    payload = _data_payload(args)
    payload["llm"] = _llm_payload(args)
    payload["mode"] = args.mode
    payload["shots"] = shots
    payload["repeats"] = args.repeats
    payload["concurrency"] = args.concurrency
    payload["retry_backoff"] = args.retry_backoff
    resp = client.post("/bench", payload)

    out_path = Path(args.out)
    predictions_path = out_path.with_suffix(".predictions.json")
    csv_path = out_path.with_suffix(".csv")

    reports = []
    predictions: dict = {}
    csv_rows: list[tuple[int, int, float]] = []
    for rep in resp["reports"]:
        if rep["mode"] == "random":
            per_shot = {}
            predictions["random"] = {}
            for shot in sorted(rep["per_shot"], key=int):
                ev = rep["per_shot"][shot]
                per_shot[shot] = _eval_summary(ev)
                predictions["random"][shot] = {
                    str(r["repeat"]): r["predictions"] for r in ev["runs"]
                }
                csv_rows.extend((int(shot), r["repeat"], r["macro_f1"]) for r in ev["runs"])
            reports.append({"mode": "random", "per_shot": per_shot})
        else:
            ev = rep["result"]
            summary = _eval_summary(ev)
            reports.append({"mode": "spectral", "d": ev["d"], **summary})
            predictions["spectral"] = {str(r["repeat"]): r["predictions"] for r in ev["runs"]}
            csv_rows.extend((ev["d"], r["repeat"], r["macro_f1"]) for r in ev["runs"])

    report = {
        "dataset": Path(args.data).stem,
        "model": resp["model"],
        "mode": args.mode,
        "seed": resp["seed"],
        "reports": reports,
        "raw_predictions": predictions_path.name,
    }
    _write_json(report, str(out_path))
    _write_json(predictions, str(predictions_path))
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["shot", "repeat", "macro_f1"])
        for shot, repeat, score in csv_rows:
            writer.writerow([shot, repeat, repr(score)])
    print(f"report: {out_path}  predictions: {predictions_path}  curve: {csv_path}")
    return EXIT_OK


def _eval_summary(ev: dict) -> dict:
    return {
        "macro_f1_mean": ev["macro_f1_mean"],
        "macro_f1_std": ev["macro_f1_std"],
        "per_class_f1": ev["per_class_f1"],
        "n_unparsed": ev["n_unparsed"],
        "runs": [
            {k: r[k] for k in ("repeat", "seed", "n_demos", "demo_rows", "macro_f1")}
            for r in ev["runs"]
        ],
    }


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        return cmd_serve(args)

    handlers = {
        "estimate": cmd_estimate,
        "select": cmd_select,
        "eigens": cmd_eigens,
        "classify": cmd_classify,
        "bench": cmd_bench,
    }
    client = ServiceClient(args.server)
    try:
        return handlers[args.command](client, args)
    except (RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        client.close()


if __name__ == "__main__":
    sys.exit(main())
