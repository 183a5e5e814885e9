"""Command-line client for the toolkit service.

By default every subcommand talks to an in-process instance of the FastAPI
app; pass --server URL to target a running one (see ``mcis serve``).
Flags override config-file values, which override defaults; MCIS_SEED sets
the default seed.  Exit codes: 0 ok, 1 validation problem, 2 runtime or
domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .harness import RESULT_HEADER, row_from_dict
from .model import ConfigError, parse_config_text

# CLI flag -> config key
FLAG_KEYS = {
    "n": "n", "b": "b", "c": "C", "ca": "C_A", "ci": "C_I", "m": "m",
    "w": "W", "wa": "W_A", "wi": "W_I", "hops": "H", "delta": "delta",
    "r": "r", "seed": "seed", "c_service": "c_service",
}

TOPO_HEADER = ["kind", "x", "y", "cell", "bscell"]


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise CliError(message, 1)


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def build_parser() -> _Parser:
    parser = _Parser(prog="mcis", description=__doc__)
    parser.add_argument("--server", default=None, help="base URL of a running service")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_config=True):
        p.add_argument("--format", choices=["text", "csv", "json"], default="text")
        p.add_argument("--out", default=None, help="write output here instead of stdout")
        if with_config:
            p.add_argument("--config", default=None, help="key=value config file")
            for flag in FLAG_KEYS:
                p.add_argument(f"--{flag.replace('_', '-')}", default=None)

    p = sub.add_parser("classify", help="dominating-requirement classification")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--ca", required=True, type=int)
    p.add_argument("--hops", required=True, type=int)
    p.add_argument("--format", choices=["text", "csv", "json"], default="text")
    p.add_argument("--out", default=None)

    add_common(sub.add_parser("bounds", help="evaluate every closed-form bound"))
    add_common(sub.add_parser("topo", help="dump node/BS positions and grid cells"))

    p = sub.add_parser("simulate", help="run one full trial")
    add_common(p)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("sweep", help="run a parameter sweep")
    add_common(p)
    p.add_argument("--vary", action="append", default=[], metavar="KEY=V1,V2,...")
    p.add_argument("--seeds", default=None, help="comma-separated seed list")
    p.add_argument("--trials", type=int, default=None, help="seeds 0..K-1")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--preset", choices=["scah"], default=None)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 1,3,10")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette's httpx shim warning
        from fastapi.testclient import TestClient
    from .service import create_app

    return TestClient(create_app())


def _config_payload(args) -> dict:
    values: dict = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except FileNotFoundError:
            raise CliError(f"config file not found: {args.config}", 1)
        except ConfigError as exc:
            raise CliError(f"bad config file {args.config}: {exc}", 1)
    env_seed = os.environ.get("MCIS_SEED")
    if env_seed is not None and "seed" not in values:
        values["seed"] = int(env_seed)
    for flag, key in FLAG_KEYS.items():
        raw = getattr(args, flag, None)
        if raw is None:
            continue
        try:
            if key == "r":
                values[key] = None if raw.lower() in ("auto", "none") else float(raw)
            elif key in ("W", "W_A", "W_I", "delta", "c_service"):
                values[key] = float(raw)
            else:
                values[key] = int(raw)
        except ValueError:
            raise CliError(f"bad value for --{flag}: {raw!r}", 1)
    return values


def _post(client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code >= 500:
        raise CliError(f"{path}: {resp.text}", 2)
    if resp.status_code == 400:
        raise CliError(resp.json().get("detail", resp.text), 1)
    if resp.status_code >= 400:
        raise CliError(resp.json().get("detail", resp.text), 2)
    return resp.json()


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json_lines(rows: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in rows)


def cmd_classify(client, args) -> str:
    data = _post(client, "/classify", {"n": args.n, "C_A": args.ca, "H": args.hops})
    if args.format == "text":
        return f"Case {data['case']} / Sub-case {data['sub_case']} / {data['label']}\n"
    flat = {
        "case": data["case"], "sub_case": data["sub_case"], "condition": data["condition"],
        **{k: v for k, v in data["thresholds"].items()},
    }
    if args.format == "json":
        return _json_lines([flat])
    return _csv_text(list(flat), [[_fmt_value(v) for v in flat.values()]])


def cmd_bounds(client, args) -> str:
    data = _post(client, "/bounds", _config_payload(args))
    flat = {k: v for k, v in data.items() if k != "thresholds"}
    if args.format == "text":
        width = max(len(k) for k in flat)
        return "".join(f"{k:<{width}}  {_fmt_value(v)}\n" for k, v in flat.items())
    if args.format == "json":
        return _json_lines([flat])
    return _csv_text(list(flat), [[_fmt_value(v) for v in flat.values()]])


def cmd_topo(client, args) -> str:
    data = _post(client, "/topology", _config_payload(args))
    rows = data["rows"]
    if args.format == "json":
        return _json_lines(rows)
    # text and csv are the same dump
    return _csv_text(TOPO_HEADER, [[_fmt_value(r[k]) for k in TOPO_HEADER] for r in rows])


def _schema_row(row: dict) -> dict:
    """Restrict a result row to the CSV schema so csv and json carry the
    same fields."""
    return {key: row[key] for key in RESULT_HEADER}


def cmd_simulate(client, args) -> str:
    payload = {"config": _config_payload(args), "trial": args.trial}
    row = _post(client, "/simulate", payload)
    if args.format == "json":
        return _json_lines([_schema_row(row)])
    if args.format == "text":
        width = max(len(k) for k in row)
        return "".join(f"{k:<{width}}  {_fmt_value(v)}\n" for k, v in row.items())
    return _csv_text(list(RESULT_HEADER), [row_from_dict(row)])


def cmd_sweep(client, args) -> str:
    vary = []
    for spec in args.vary:
        if "=" not in spec:
            raise CliError(f"--vary expects KEY=V1,V2,... got {spec!r}", 1)
        key, _, vals = spec.partition("=")
        try:
            vary.append((key.strip(), [float(v) for v in vals.split(",") if v]))
        except ValueError:
            raise CliError(f"bad --vary values: {vals!r}", 1)
    if args.seeds is not None:
        try:
            seeds = [int(s) for s in args.seeds.split(",") if s]
        except ValueError:
            raise CliError(f"bad --seeds: {args.seeds!r}", 1)
    elif args.trials is not None:
        seeds = list(range(args.trials))
    else:
        seeds = [0]
    payload = {
        "config": _config_payload(args),
        "vary": vary,
        "seeds": seeds,
        "workers": args.workers,
        "preset": args.preset,
    }
    data = _post(client, "/sweep", payload)
    for failure in data["failures"]:
        print(f"trial failed: {failure}", file=sys.stderr)
    bad = [r["trial"] for r in data["rows"] if not r.get("feasible", True)]
    if bad:
        raise CliError(f"schedule audit failed for trials {bad}", 2)
    if args.format == "json":
        return _json_lines([_schema_row(r) for r in data["rows"]])
    return _csv_text(data["header"], [row_from_dict(r) for r in data["rows"]])


def cmd_verify(client, args) -> tuple[str, int]:
    criteria = None
    if args.criteria:
        try:
            criteria = [int(c) for c in args.criteria.split(",") if c]
        except ValueError:
            raise CliError(f"bad --criteria: {args.criteria!r}", 1)
    data = _post(client, "/verify", {"criteria": criteria})
    if args.format == "json":
        text = _json_lines(data["results"])
    else:
        lines = []
        for r in data["results"]:
            status = "PASS" if r["passed"] else "FAIL"
            lines.append(f"[{status}] criterion {r['number']:2d} {r['name']}: {r['detail']}\n")
        text = "".join(lines)
    return text, 0 if data["all_passed"] else 2


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    if args.command == "serve":
        import uvicorn

        from .service import create_app

        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    try:
        client = _client(args.server)
        try:
            if args.command == "classify":
                text = cmd_classify(client, args)
            elif args.command == "bounds":
                text = cmd_bounds(client, args)
            elif args.command == "topo":
                text = cmd_topo(client, args)
            elif args.command == "simulate":
                text = cmd_simulate(client, args)
            elif args.command == "sweep":
                text = cmd_sweep(client, args)
            elif args.command == "verify":
                text, code = cmd_verify(client, args)
                _emit(text, args.out)
                return code
            else:  # pragma: no cover
                raise CliError(f"unknown command {args.command!r}", 1)
            _emit(text, args.out)
            return 0
        finally:
            client.close()
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
