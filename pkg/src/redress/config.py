"""Service configuration: one JSON file covering key material, policies,
retention, static auth tokens, and optional dev fixtures.
"""

import json
from dataclasses import dataclass, field
from datetime import timedelta
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .crowd import AggregationMode, AggregationPolicy
from .errors import ConfigInvalid
from .guard import RateLimitPolicy
from .ledger import PenaltySchedule
from .platform import PlatformConfig
from .vault import RetentionPolicy


def _fraction(value) -> Fraction:
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value).limit_denominator(10**6)


def policies_from_dict(policies: dict, error_cls=ConfigInvalid):
    """Build the four policy objects from a config/scenario 'policies' block.

    Durations are given as numbers: aggregation.deadline in hours,
    retention.retention_window in days.
    """

    def build(cls, key, **coercions):
        params = dict(policies.get(key, {}))
        for name, coerce in coercions.items():
            if name in params:
                try:
                    params[name] = coerce(params[name])
                except (TypeError, ValueError) as exc:
                    raise error_cls(f"bad {key}.{name}: {exc}") from exc
        try:
            return cls(**params)
        except (TypeError, ValueError) as exc:
            raise error_cls(f"bad {key} policy: {exc}") from exc

    aggregation = build(
        AggregationPolicy,
        "aggregation",
        mode=AggregationMode,
        theta=_fraction,
        deadline=lambda v: timedelta(hours=v),
    )
    penalty = build(
        PenaltySchedule,
        "penalty",
        multiplier=_fraction,
        victim_share_fraction=_fraction,
        pool_fraction=_fraction,
    )
    rate_limit = build(RateLimitPolicy, "rate_limit")
    retention = build(RetentionPolicy, "retention", retention_window=lambda v: timedelta(days=v))
    return aggregation, penalty, rate_limit, retention


@dataclass
class TokenEntry:
    account: str
    role: str  # victim | verifier | admin


@dataclass
class ServiceConfig:
    platform: PlatformConfig
    tokens: dict[str, TokenEntry] = field(default_factory=dict)
    event_log_path: Optional[Path] = None
    dev_mode: bool = False
    fixtures: dict = field(default_factory=dict)


def config_from_dict(raw: dict, base_dir: Path | None = None) -> ServiceConfig:
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must be a JSON object")
    aggregation, penalty, rate_limit, retention = policies_from_dict(raw.get("policies", {}))

    signing_key_bytes = None
    if raw.get("signing_key_hex"):
        try:
            signing_key_bytes = bytes.fromhex(raw["signing_key_hex"])
        except ValueError as exc:
            raise ConfigInvalid(f"signing_key_hex is not hex: {exc}") from exc
    elif raw.get("signing_key_path"):
        key_path = Path(raw["signing_key_path"])
        if base_dir is not None and not key_path.is_absolute():
            key_path = base_dir / key_path
        try:
            signing_key_bytes = bytes.fromhex(key_path.read_text().strip())
        except (OSError, ValueError) as exc:
            raise ConfigInvalid(f"cannot read signing key file: {exc}") from exc

    salt = raw.get("attribute_salt", "redress-dev-salt")
    platform = PlatformConfig(
        aggregation=aggregation,
        penalty=penalty,
        rate_limit=rate_limit,
        retention=retention,
        signing_seed=int(raw.get("signing_seed", 0)),
        signing_key_bytes=signing_key_bytes,
        attribute_salt=salt.encode("utf-8") if isinstance(salt, str) else salt,
        admins=set(raw.get("admins", ["admin"])),
        dispatch_seed=int(raw.get("dispatch_seed", 0)),
    )

    tokens = {}
    for token, entry in raw.get("tokens", {}).items():
        if not isinstance(entry, dict) or "account" not in entry or "role" not in entry:
            raise ConfigInvalid(f"token {token!r} needs 'account' and 'role'")
        if entry["role"] not in ("victim", "verifier", "admin"):
            raise ConfigInvalid(f"token {token!r} has unknown role {entry['role']!r}")
        tokens[token] = TokenEntry(entry["account"], entry["role"])

    log_path = raw.get("event_log")
    if log_path is not None:
        log_path = Path(log_path)
        if base_dir is not None and not log_path.is_absolute():
            log_path = base_dir / log_path

    return ServiceConfig(
        platform=platform,
        tokens=tokens,
        event_log_path=log_path,
        dev_mode=bool(raw.get("dev_mode", False)),
        fixtures=raw.get("fixtures", {}),
    )


def load_config(path) -> ServiceConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid(f"cannot load config {path}: {exc}") from exc
    return config_from_dict(raw, base_dir=path.parent)
