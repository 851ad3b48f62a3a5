"""Thin command-line client for the co-design service.

Every subcommand issues one HTTP request. By default the service app is
mounted in-process (no server needed, same filesystem, fully deterministic);
pass --server-url to talk to a running instance instead.

Exit codes: 0 success, 1 config/request error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import json
import sys

import httpx

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _client(server_url: str | None) -> httpx.Client:
    if server_url:
        return httpx.Client(base_url=server_url, timeout=None)
    from .service import app

    return httpx.Client(
        transport=httpx.ASGITransport(app=app), base_url="http://whegcd.local", timeout=None
    )


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="path to the YAML run configuration")
    p.add_argument("--seed", type=int, help="seed override for this run")
    p.add_argument("--out", help="output directory for artifacts")
    p.add_argument("--server-url", help="use a running service instead of in-process")
    p.add_argument("--json", action="store_true", help="print the raw JSON response")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="whegcd", description="co-design a wheg hexapod for one of four terrains"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run one co-design optimization")
    p.add_argument("terrain", choices=("flat", "rough", "stairs", "ramp"))
    p.add_argument("--budget", type=int, help="trial budget override")
    _common_flags(p)

    p = sub.add_parser("cross-eval", help="evaluate designs on every terrain")
    p.add_argument("design_files", nargs="*", help="design record files")
    p.add_argument(
        "--no-nominal", action="store_true", help="leave the nominal design out"
    )
    p.add_argument("--terrains", nargs="+", choices=("flat", "rough", "stairs", "ramp"))
    _common_flags(p)

    p = sub.add_parser("simulate", help="run one 10 s trial of a stored design")
    p.add_argument("design_file")
    p.add_argument("terrain", choices=("flat", "rough", "stairs", "ramp"))
    _common_flags(p)

    p = sub.add_parser("export", help="write wheg outline geometry for a design")
    p.add_argument("design_file")
    p.add_argument("--arc-points", type=int, default=64)
    _common_flags(p)

    p = sub.add_parser("report", help="summarize a run directory")
    p.add_argument("artifact_dir")
    _common_flags(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    return parser


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    resp = client.post(path, json=payload)
    if resp.status_code >= 400:
        detail = resp.json().get("detail", resp.text) if resp.content else resp.text
        code = EXIT_CONFIG if resp.status_code < 500 else EXIT_RUNTIME
        raise SystemExit(_fail(f"{path}: {detail}", code))
    return resp.json()


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _print(data: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(data, indent=2))
    else:
        print("\n".join(lines))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "serve":
        import uvicorn

        from .service import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    try:
        with _client(args.server_url) as client:
            if args.command == "optimize":
                data = _post(
                    client,
                    "/optimize",
                    {
                        "terrain": args.terrain,
                        "config_path": args.config,
                        "seed": args.seed,
                        "out_dir": args.out,
                        "budget": args.budget,
                    },
                )
                obj = data["best_objective"]
                _print(
                    data,
                    args.json,
                    [
                        f"artifacts: {data['artifact_dir']}",
                        f"best efficiency: {obj['efficiency_m_per_j']:.6g} m/J",
                        f"best speed: {obj['speed_m_per_s']:.6g} m/s",
                        "",
                        data["report"].rstrip("\n"),
                    ],
                )
            elif args.command == "cross-eval":
                data = _post(
                    client,
                    "/cross-eval",
                    {
                        "design_paths": args.design_files,
                        "include_nominal": not args.no_nominal,
                        "terrains": args.terrains,
                        "config_path": args.config,
                        "out_dir": args.out,
                    },
                )
                _print(data, args.json, [data["report"].rstrip("\n")])
            elif args.command == "simulate":
                data = _post(
                    client,
                    "/simulate",
                    {
                        "terrain": args.terrain,
                        "design_path": args.design_file,
                        "config_path": args.config,
                        "seed": args.seed,
                        "out_dir": args.out,
                    },
                )
                obj = data["objective"]
                _print(
                    data,
                    args.json,
                    [
                        f"outcome: {data['outcome']}",
                        f"efficiency: {obj['efficiency_m_per_j']:.6g} m/J",
                        f"speed: {obj['speed_m_per_s']:.6g} m/s",
                        f"displacement: {obj['displacement_m']:.6g} m",
                        f"avg power: {obj['avg_power_w']:.6g} W",
                    ]
                    + ([f"log: {data['log_path']}"] if data.get("log_path") else []),
                )
            elif args.command == "export":
                if args.out is None:
                    return _fail("export requires --out", EXIT_CONFIG)
                data = _post(
                    client,
                    "/export",
                    {
                        "design_path": args.design_file,
                        "out_dir": args.out,
                        "arc_points": args.arc_points,
                    },
                )
                _print(
                    data,
                    args.json,
                    [f"{k}: {v}" for k, v in data["files"].items()],
                )
            elif args.command == "report":
                data = _post(
                    client,
                    "/report",
                    {"artifact_dir": args.artifact_dir, "config_path": args.config},
                )
                _print(data, args.json, [data["text"].rstrip("\n")])
    except SystemExit as exc:
        return int(exc.code or 0)
    except httpx.HTTPError as exc:
        return _fail(f"request failed: {exc}", EXIT_RUNTIME)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
