"""Engine configuration: one dataclass consumed by the service and CLI,
loadable from JSON with flag-level overrides.

Judge credentials never live in config files; the endpoint may be set here
or via QREWARD_JUDGE_URL, and the token always comes from the environment.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace

from .fusion import LambdaMap
from .judge import JudgeBackend, RemoteJudge, StubJudge
from .ses import CheckConfig

JUDGE_URL_ENV = "QREWARD_JUDGE_URL"
SERVICE_TOKEN_ENV = "QREWARD_BEARER_TOKEN"

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_MODEL_ERROR = 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    seed: int = 0
    lambda_fail: float = 0.05
    zeta: float = 0.8
    tau: float = 0.05
    upsilon: float = 0.85
    sample_fraction: float = 0.05
    mode: str = "vrm"  # vrm | passthrough
    judge_backend: str = "stub"  # stub | remote
    judge_endpoint: str | None = None
    judge_timeout: float = 30.0
    judge_max_inflight: int = 8
    model_path: str | None = None
    host: str = "127.0.0.1"
    port: int = 8710
    request_size_limit: int = 256 * 1024
    concurrency_cap: int = 16
    fock_dim: int = 16
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("vrm", "passthrough"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.judge_backend not in ("stub", "remote"):
            raise ConfigError(f"unknown judge backend {self.judge_backend!r}")
        if not 0.0 < self.lambda_fail < 0.5:
            raise ConfigError("lambda_fail must be in (0, 0.5)")
        if not 0.0 <= self.zeta <= 1.0:
            raise ConfigError("zeta must be in [0,1]")
        if not 0.0 < self.tau < 1.0:
            raise ConfigError("tau must be in (0,1)")
        if not 0.0 < self.upsilon <= 1.0:
            raise ConfigError("upsilon must be in (0,1]")
        unknown = set(self.tolerances) - {
            f.name for f in fields(CheckConfig)
        }
        if unknown:
            raise ConfigError(f"unknown tolerance overrides {sorted(unknown)}")

    @staticmethod
    def from_file(path: str) -> "EngineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        known = {f.name for f in fields(EngineConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        try:
            return EngineConfig(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def override(self, **kwargs) -> "EngineConfig":
        supplied = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **supplied) if supplied else self

    def check_config(self, seed: int | None = None) -> CheckConfig:
        kwargs = {"fock_dim": self.fock_dim, "seed": self.seed}
        kwargs.update(self.tolerances)
        if seed is not None:
            kwargs["seed"] = seed  # per-request seed outranks any override
        return CheckConfig(**kwargs)

    def lambda_map(self) -> LambdaMap:
        return LambdaMap(fail=self.lambda_fail)

    def make_backend(self) -> JudgeBackend:
        if self.judge_backend == "stub":
            return StubJudge(seed=self.seed)
        endpoint = self.judge_endpoint or os.environ.get(JUDGE_URL_ENV)
        if not endpoint:
            raise ConfigError(
                f"remote judge requires judge_endpoint or {JUDGE_URL_ENV}"
            )
        return RemoteJudge(
            endpoint,
            timeout=self.judge_timeout,
            max_inflight=self.judge_max_inflight,
        )
