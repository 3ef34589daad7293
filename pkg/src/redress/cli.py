"""Command line entry points: serve, simulate, verify-cert, replay."""

import argparse
import json
import sys
from pathlib import Path

from . import attest
from .config import load_config
from .errors import RedressError
from .eventlog import read_records
from .platform import replay as replay_records
from .simulator import run_scenario, scenario_from_dict


def _cmd_serve(args) -> int:
    from .service import serve

    serve(load_config(args.config), host=args.host, port=args.port)
    return 0


def _cmd_simulate(args) -> int:
    raw = json.loads(Path(args.scenario).read_text(encoding="utf-8"))
    if args.seed is not None:
        raw["seed"] = args.seed
    spec = scenario_from_dict(raw)
    log = None
    if args.log:
        from .eventlog import EventLog

        log = EventLog(args.log)
    report = run_scenario(spec, log=log)
    print(json.dumps(report.export(), indent=2))
    return 0


def _cmd_verify_cert(args) -> int:
    data = Path(args.certificate).read_bytes()
    if args.public_key:
        public_key = bytes.fromhex(args.public_key)
    elif args.config:
        public_key = load_config(args.config).platform.make_signing_key().public_bytes
    else:
        print("need --public-key or --config to know the platform key", file=sys.stderr)
        return 2
    try:
        valid = attest.verify(data, public_key)
    except RedressError as exc:
        print(f"Invalid: {exc}")
        return 1
    print("Valid" if valid else "Invalid")
    return 0 if valid else 1


def _cmd_replay(args) -> int:
    import hashlib

    records = read_records(args.log)
    config = load_config(args.config).platform if args.config else None
    if config is None:
        print(
            "note: no --config given; replaying under default policies "
            "(state matches the original only if it ran with defaults)",
            file=sys.stderr,
        )
    platform = replay_records(records, config)
    state = platform.export_state()
    state_bytes = json.dumps(state, sort_keys=True, separators=(",", ":")).encode()
    summary = {
        "records": len(records),
        "accounts": len(state["accounts"]),
        "cases": len(state["engine"]["cases"]),
        "certificates": len(state["engine"]["certificates"]),
        "ledger_trial_balance": platform.ledger.trial_balance(),
        "state_digest": hashlib.sha256(state_bytes).hexdigest(),
    }
    print(json.dumps(summary, indent=2))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="redress")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP gateway")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8800)
    p_serve.set_defaults(func=_cmd_serve)

    p_sim = sub.add_parser("simulate", help="run a deterministic scenario")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_sim.add_argument("--log", default=None, help="write the run's event log here")
    p_sim.set_defaults(func=_cmd_simulate)

    p_verify = sub.add_parser("verify-cert", help="check a certificate envelope")
    p_verify.add_argument("certificate")
    p_verify.add_argument("--public-key", default=None, help="hex Ed25519 public key")
    p_verify.add_argument("--config", default=None, help="service config to derive the key")
    p_verify.set_defaults(func=_cmd_verify_cert)

    p_replay = sub.add_parser("replay", help="rebuild state from an event log")
    p_replay.add_argument("log")
    p_replay.add_argument("--config", default=None)
    p_replay.set_defaults(func=_cmd_replay)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RedressError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
