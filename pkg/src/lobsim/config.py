"""Simulation configuration, shipped presets, and the run entry point.

A SimConfig can be loaded from / saved to a YAML file with a `session`
section, a `fundamental` section, kernel latency knobs, and an `agents`
list with one block per agent group. All parameter values in the shipped
presets are calibration choices documented in the README; only the agent
population counts are fixed by construction.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from random import Random

import yaml

from .agents import (FundamentalProcess, HBLAgent, HBLParams, MarketMakerAgent,
                     MMParams, MomentumAgent, MomentumParams, ZIAgent, ZIParams)
from .kernel import ExchangeAgent, Kernel

AGENT_KINDS = {
    "zi": (ZIParams, ZIAgent),
    "hbl": (HBLParams, HBLAgent),
    "market_maker": (MMParams, MarketMakerAgent),
    "momentum": (MomentumParams, MomentumAgent),
}


@dataclass
class FundamentalConfig:
    mean_cents: int = 100_000
    kappa: float = 1.0e-4            # reversion per step toward the mean
    shock_std_cents: float = 4.0
    step_ns: int = 100_000_000       # 100 ms
    start_value_cents: int | None = None


@dataclass
class AgentGroup:
    kind: str
    count: int
    params: object

    def __post_init__(self):
        if self.kind not in AGENT_KINDS:
            raise ValueError(f"unknown agent kind {self.kind!r}")
        if self.count < 0:
            raise ValueError("count must be >= 0")
        self.params.validate()


@dataclass
class SimConfig:
    session_open: str = "09:30:00"
    session_close: str = "16:30:00"
    latency_ns: int = 1000
    computation_delay_ns: int = 0
    fundamental: FundamentalConfig = field(default_factory=FundamentalConfig)
    agents: list[AgentGroup] = field(default_factory=list)
    name: str = "custom"

    def duration_ns(self) -> int:
        open_ns = _clock_to_ns(self.session_open)
        close_ns = _clock_to_ns(self.session_close)
        if close_ns <= open_ns:
            raise ValueError("session close must be after open")
        return close_ns - open_ns

    def n_trading_agents(self) -> int:
        return sum(g.count for g in self.agents)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "session": {"open": self.session_open, "close": self.session_close},
            "latency_ns": self.latency_ns,
            "computation_delay_ns": self.computation_delay_ns,
            "fundamental": dataclasses.asdict(self.fundamental),
            "agents": [{"type": g.kind, "count": g.count,
                        **dataclasses.asdict(g.params)} for g in self.agents],
        }


def _clock_to_ns(text: str) -> int:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected HH:MM:SS, got {text!r}")
    h, m, s = (int(p) for p in parts)
    return ((h * 60 + m) * 60 + s) * 1_000_000_000


def config_from_dict(data: dict) -> SimConfig:
    session = data.get("session", {})
    fund = FundamentalConfig(**data.get("fundamental", {}))
    groups = []
    for block in data.get("agents", []):
        block = dict(block)
        kind = block.pop("type")
        count = block.pop("count")
        params_cls = AGENT_KINDS[kind][0]
        groups.append(AgentGroup(kind, count, params_cls(**block)))
    return SimConfig(
        session_open=session.get("open", "09:30:00"),
        session_close=session.get("close", "16:30:00"),
        latency_ns=data.get("latency_ns", 1000),
        computation_delay_ns=data.get("computation_delay_ns", 0),
        fundamental=fund,
        agents=groups,
        name=data.get("name", "custom"),
    )


def load_config(path) -> SimConfig:
    with open(path) as fh:
        return config_from_dict(yaml.safe_load(fh))


def save_config(config: SimConfig, path):
    with open(path, "w") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)


# -- presets ---------------------------------------------------------------

def sparse_zi_100() -> SimConfig:
    return SimConfig(name="sparse_zi_100",
                     agents=[AgentGroup("zi", 100, ZIParams())])


def rmsc01() -> SimConfig:
    return SimConfig(name="rmsc01", agents=[
        AgentGroup("market_maker", 1, MMParams()),
        AgentGroup("zi", 50, ZIParams()),
        AgentGroup("hbl", 25, HBLParams()),
        AgentGroup("momentum", 24, MomentumParams(wake_interval_ns=5_000_000_000)),
    ])


PRESETS = {"sparse_zi_100": sparse_zi_100, "rmsc01": rmsc01}


def preset(name: str) -> SimConfig:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None


# -- simulation entry point -------------------------------------------------

def build_kernel(config: SimConfig, seed: int):
    """Instantiate exchange + agents wired to a fresh kernel."""
    fundamental = FundamentalProcess(
        mean=config.fundamental.mean_cents,
        kappa=config.fundamental.kappa,
        shock_std=config.fundamental.shock_std_cents,
        step_ns=config.fundamental.step_ns,
        rng=Random(f"{seed}:fundamental"),
        start_value=config.fundamental.start_value_cents,
    )
    max_memory = max((g.params.memory_length for g in config.agents
                      if g.kind == "hbl"), default=1)
    exchange = ExchangeAgent(event_memory=max_memory)
    agents = [exchange]
    next_id = 1
    for group in config.agents:
        agent_cls = AGENT_KINDS[group.kind][1]
        for _ in range(group.count):
            rng = Random(f"{seed}:{next_id}")
            if group.kind in ("zi", "hbl"):
                agent = agent_cls(next_id, group.params, fundamental, rng)
            else:
                agent = agent_cls(next_id, group.params, rng)
            agents.append(agent)
            next_id += 1
    kernel = Kernel(agents, open_ns=0, close_ns=config.duration_ns(),
                    latency_ns=config.latency_ns,
                    computation_delay_ns=config.computation_delay_ns)
    return kernel, exchange


def run_simulation(config: SimConfig, seed: int):
    """Run one session; returns the exchange-side EventTrace.

    The trace is a pure function of (config, seed): repeated calls produce
    identical event sequences.
    """
    kernel, exchange = build_kernel(config, seed)
    kernel.run()
    trace = exchange.trace
    trace.session_open_ns = 0
    trace.session_close_ns = config.duration_ns()
    trace.config = {"config": config.to_dict(), "seed": seed}
    return trace
