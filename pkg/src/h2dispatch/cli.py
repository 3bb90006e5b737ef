"""Command-line client for the dispatch service.

The CLI reads scenario files locally, posts them to the HTTP API, and
writes the returned artifacts next to you. By default requests go to an
in-process instance of the service (no server needed); pass ``--server``
to talk to a running deployment instead. ``h2dispatch serve`` starts one.

Exit codes: 0 success, 2 model infeasible, 3 input error, 4 solver limit
reached.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .runner import write_run_files
from .scenario import ScenarioError, default_paths, load_scenario, scenario_to_dict

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_INPUT = 3
EXIT_SOLVER_LIMIT = 4


class InputError(Exception):
    pass


def _make_client(server: str | None):
    if server:
        import httpx
        return httpx.Client(base_url=server, timeout=None)
    # in-process ASGI transport: same requests, no socket
    from fastapi.testclient import TestClient
    from .service.app import app
    return TestClient(app)


def _scenario_payload(args) -> dict:
    config, prices, wind = default_paths()
    config = args.config or config
    prices = args.prices or prices
    wind = args.wind or wind
    for path in (config, prices, wind):
        if not os.path.exists(path):
            raise InputError(f"input file not found: {path}")
    scn = load_scenario(config, prices, wind)
    return scenario_to_dict(scn)


def _spec_payload(args, model: str | None = None, segments: int | None = None) -> dict:
    return {
        "model": model if model is not None else args.model,
        "segments": segments if segments is not None else args.segments,
        "gap": args.gap,
        "node_limit": args.node_limit,
        "horizon_start": args.horizon_start,
        "horizon_hours": args.horizon_hours,
        "deterministic": args.deterministic,
        "threads": args.threads,
    }


def _post(client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except Exception:
            detail = response.text
        raise InputError(f"{path} rejected the request ({response.status_code}): {detail}")
    return response.json()


def _status_to_exit(status: str) -> int:
    if status == "infeasible":
        return EXIT_INFEASIBLE
    if status == "node-limit":
        return EXIT_SOLVER_LIMIT
    return EXIT_OK


def _parse_spec_label(label: str) -> tuple[str, int]:
    try:
        model, seg_text = label.strip().lower().split("-")
        return model, int(seg_text)
    except ValueError:
        raise InputError(
            f"bad spec '{label}': expected MODEL-SEGMENTS like oos-12") from None


def cmd_run(args) -> int:
    client = _make_client(args.server)
    payload = {"scenario": _scenario_payload(args), "spec": _spec_payload(args)}
    body = _post(client, "/api/solve", payload)
    write_run_files(args.out, body["report"], body["bounds"], body["schedule"],
                    body["histogram"])
    summary = body["report"].get("profit_eur")
    if summary:
        print(f"{body['report']['run']['label']}: estimated {summary['estimated']:.2f} EUR, "
              f"realized {summary['realized_total']:.2f} EUR -> {args.out}")
    else:
        print(f"{body['report']['run']['label']}: {body['status']}")
    return _status_to_exit(body["status"])


def cmd_compare(args) -> int:
    client = _make_client(args.server)
    specs = [_spec_payload(args, model=m, segments=s)
             for m, s in (_parse_spec_label(lbl) for lbl in args.specs.split(","))]
    if len(specs) < 2:
        raise InputError("compare needs at least two specs, e.g. --specs oos-1,oos-12")
    payload = {"scenario": _scenario_payload(args), "specs": specs}
    body = _post(client, "/api/compare", payload)
    os.makedirs(args.out, exist_ok=True)
    table_path = os.path.join(args.out, "compare.json")
    with open(table_path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=1)
    csv_path = os.path.join(args.out, "compare.csv")
    if body["rows"]:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(body["rows"][0].keys()))
            writer.writeheader()
            writer.writerows(body["rows"])
    print(f"benchmark: {body['benchmark']}; {len(body['rows'])} rows, "
          f"{len(body['errors'])} errors -> {table_path}")
    for row in body["rows"]:
        pct = row.get("pct_of_best_realized")
        print(f"  {row['label']:>7}: realized {row['realized_profit_eur']:12.2f} EUR "
              f"({pct:6.2f}% of best)" if pct is not None else
              f"  {row['label']:>7}: realized {row['realized_profit_eur']:12.2f} EUR")
    if not body["rows"]:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args) -> int:
    client = _make_client(args.server)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"bad --values '{args.values}': expected comma-separated numbers")
    if not values:
        raise InputError("sweep needs at least one value")
    payload = {
        "scenario": _scenario_payload(args),
        "axis": args.axis,
        "values": values,
        "spec": _spec_payload(args, model="oos", segments=2),
        "segment_pair": [args.coarse_segments, args.fine_segments],
    }
    body = _post(client, "/api/sweep", payload)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "sweep.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=1)
    failures = [p for p in body["points"] if "error" in p]
    print(f"sweep over {args.axis}: {len(body['points']) - len(failures)} points, "
          f"{len(failures)} failed -> {path}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    client = _make_client(args.server)
    body = _post(client, "/api/bounds", {"scenario": _scenario_payload(args)})
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "bounds.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({k: body[k] for k in
                   ("price_range", "hours_below", "hours_inside", "hours_above")},
                  fh, indent=1)
    hist_path = os.path.join(args.out, "price_histogram.csv")
    with open(hist_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_lo_eur_mwh", "bin_hi_eur_mwh", "count"])
        writer.writerows(body["histogram"])
    rng = body["price_range"]
    print(f"price range [{rng['lower_eur_mwh']:.2f}, {rng['upper_eur_mwh']:.2f}] EUR/MWh; "
          f"{body['hours_inside']} hours inside -> {path}")
    return EXIT_OK


def cmd_segments(args) -> int:
    client = _make_client(args.server)
    body = _post(client, "/api/segments",
                 {"scenario": _scenario_payload(args), "segments": args.segments})
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "segments.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body["segments"], fh, indent=1)
    print(f"{args.segments} segments, breakpoints "
          f"{[round(b, 2) for b in body['segments']['breakpoints_mw']]} -> {path}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn
    uvicorn.run("h2dispatch.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def _add_scenario_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="plant config JSON (default: bundled scenario)")
    parser.add_argument("--prices", help="day-ahead price CSV")
    parser.add_argument("--wind", help="wind capacity-factor CSV")
    parser.add_argument("--out", default="out", help="output directory")


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gap", type=float, default=1e-4,
                        help="relative optimality gap (default 1e-4)")
    parser.add_argument("--horizon-start", type=int, default=0, dest="horizon_start")
    parser.add_argument("--horizon-hours", type=int, default=168, dest="horizon_hours",
                        help="hours to optimize (default 168)")
    parser.add_argument("--node-limit", type=int, default=50_000, dest="node_limit")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--deterministic", action=argparse.BooleanOptionalAction,
                        default=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="h2dispatch", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--server", help="base URL of a running service "
                                         "(default: solve in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one model variant and write reports")
    p_run.add_argument("--model", choices=("oos", "oo", "os"), default="oos")
    p_run.add_argument("--segments", type=int, choices=(1, 2, 4, 8, 12), default=2)
    _add_scenario_flags(p_run)
    _add_solver_flags(p_run)
    p_run.set_defaults(func=cmd_run)

    p_cmp = sub.add_parser("compare", help="run several variants on one scenario")
    p_cmp.add_argument("--specs", required=True,
                       help="comma-separated variants, e.g. oos-1,oos-12,oo-1")
    _add_scenario_flags(p_cmp)
    _add_solver_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_swp = sub.add_parser("sweep", help="sensitivity sweep along one input axis")
    p_swp.add_argument("--axis", choices=("wind_ratio", "demand", "hydrogen_price"),
                       required=True)
    p_swp.add_argument("--values", required=True,
                       help="comma-separated axis values, e.g. 1,2,8")
    p_swp.add_argument("--coarse-segments", type=int, choices=(1, 2, 4, 8, 12),
                       default=1, dest="coarse_segments")
    p_swp.add_argument("--fine-segments", type=int, choices=(1, 2, 4, 8, 12),
                       default=12, dest="fine_segments")
    _add_scenario_flags(p_swp)
    _add_solver_flags(p_swp)
    p_swp.set_defaults(func=cmd_sweep)

    p_bnd = sub.add_parser("bounds", help="price-range bounds and histogram only")
    _add_scenario_flags(p_bnd)
    p_bnd.set_defaults(func=cmd_bounds)

    p_seg = sub.add_parser("segments", help="piecewise curve coefficients only")
    p_seg.add_argument("--segments", type=int, choices=(1, 2, 4, 8, 12), default=2)
    _add_scenario_flags(p_seg)
    p_seg.set_defaults(func=cmd_segments)

    p_srv = sub.add_parser("serve", help="start the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)
    p_srv.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ScenarioError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
