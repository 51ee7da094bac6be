"""Synchronous CONGEST round engine with bit accounting.

Every node program exposes ``step(t, inbox) -> outbox`` and ``done(t)``.
The inbox of round ``t`` holds exactly what the neighbors sent in round
``t - 1``. An outbox is a sequence of ``(neighbor, Message)`` pairs and may
use each incident edge at most once per round.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Protocol

from .graph import Graph, ceil_log2

log = logging.getLogger(__name__)

DLG_WAVE = "DlgWave"
AGG_WAVE = "AggWave"
CONTROL = "Control"
KIND_TAG_BITS = 2


class SimError(RuntimeError):
    pass


class BitBudgetExceeded(SimError):
    pass


class DuplicateSendOnEdge(SimError):
    pass


class MaxRoundsExceeded(SimError):
    pass


class NotANeighbor(SimError):
    pass


@dataclass(frozen=True)
class Message:
    kind: str
    root: int
    dist: int | None = None
    payload: Any = None
    payload_bits: int = 0


def id_bits(n: int) -> int:
    return ceil_log2(n)


def dist_bits(n: int, w_max: int) -> int:
    return ceil_log2(n * w_max + 1)


def bits_of(m: Message, n: int, w_max: int = 1) -> int:
    """Encoded size: kind tag, root ID, distance (DLG waves only) and payload."""
    size = KIND_TAG_BITS + id_bits(n) + m.payload_bits
    if m.kind == DLG_WAVE:
        size += dist_bits(n, w_max)
    return size


@dataclass
class SimConfig:
    bit_budget: int | None = None        # None: 8 * ceil(log2 n)
    max_rounds: int = 1_000_000
    seed: int = 0
    strict_bits: bool = False
    check_schedule: bool = True          # raise on schedule violations instead of repairing
    shuffle_seed: int | None = None      # permute node step order each round (testing aid)
    record: bool = True                  # keep per-message trace entries

    def budget(self, n: int) -> int:
        return self.bit_budget if self.bit_budget is not None else 8 * id_bits(n)


@dataclass
class RoundTrace:
    n: int
    budget: int
    entries: list = field(default_factory=list)      # (round, u, v, dir, bits, kind)
    completion: dict = field(default_factory=dict)   # phase -> completion round
    phase_rounds: dict = field(default_factory=dict)  # phase -> rounds executed
    max_bits: int = 0
    total_messages: int = 0
    over_budget: int = 0
    events: dict = field(default_factory=dict)       # counters such as distance resets
    rounds: int = 0

    def count(self, event: str, k: int = 1) -> None:
        self.events[event] = self.events.get(event, 0) + k

    def absorb(self, other: "RoundTrace", phase: str | None = None) -> None:
        """Append another trace after this one, shifting its rounds."""
        off = self.rounds
        self.entries.extend((r + off, *rest) for r, *rest in other.entries)
        for k, v in other.completion.items():
            self.completion[f"{phase}.{k}" if phase else k] = v
        for k, v in other.phase_rounds.items():
            self.phase_rounds[f"{phase}.{k}" if phase else k] = v
        self.max_bits = max(self.max_bits, other.max_bits)
        self.total_messages += other.total_messages
        self.over_budget += other.over_budget
        for k, v in other.events.items():
            self.count(k, v)
        self.rounds += other.rounds

    def digest(self) -> str:
        h = hashlib.sha256()
        for e in self.entries:
            h.update(repr(e).encode())
        h.update(repr(sorted(self.completion.items())).encode())
        h.update(repr((self.rounds, self.max_bits, self.total_messages)).encode())
        return h.hexdigest()

    def summary(self) -> dict:
        return {
            "completion_round": dict(self.completion),
            "rounds": self.rounds,
            "max_bits": self.max_bits,
            "bit_budget": self.budget,
            "total_messages": self.total_messages,
            "over_budget": self.over_budget,
            "events": dict(self.events),
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["round", "edge_u", "edge_v", "dir", "bits", "kind"])
            w.writerows(self.entries)

    def write_summary(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.summary(), f, indent=2, sort_keys=True)


class NodeProgram(Protocol):
    def step(self, t: int, inbox: dict[int, Message]) -> Iterable[tuple[int, Message]]: ...

    def done(self, t: int) -> bool: ...


def node_rng(seed: int, u: int) -> random.Random:
    return random.Random(seed ^ u)


def run(
    g: Graph,
    program: Callable[[int], NodeProgram] | dict[int, NodeProgram],
    cfg: SimConfig | None = None,
    phase: str = "run",
) -> tuple[dict[int, NodeProgram], RoundTrace]:
    """Drive the node programs round by round until all are done and nothing is in flight."""
    cfg = cfg or SimConfig()
    n, w_max = g.n, g.w_max
    budget = cfg.budget(n)
    if budget < id_bits(n) + dist_bits(n, w_max) + 1:
        raise ValueError(f"bit budget {budget} cannot hold a wave header")
    nodes = program if isinstance(program, dict) else {u: program(u) for u in g.nodes}
    adj = g.adj
    trace = RoundTrace(n=n, budget=budget)
    order = list(g.nodes)
    shuffler = random.Random(cfg.shuffle_seed) if cfg.shuffle_seed is not None else None
    inboxes: dict[int, dict[int, Message]] = {u: {} for u in order}
    last_delivery = -1
    t = 0
    while True:
        if t >= cfg.max_rounds:
            raise MaxRoundsExceeded(f"{phase}: no termination within {cfg.max_rounds} rounds")
        if shuffler is not None:
            shuffler.shuffle(order)
        sent: list[tuple[int, int, Message]] = []
        for u in order:
            out = nodes[u].step(t, inboxes[u])
            used = set()
            for v, m in out:
                if v not in adj[u]:
                    raise NotANeighbor(f"round {t}: {u} sent to non-neighbor {v}")
                if v in used:
                    raise DuplicateSendOnEdge(f"round {t}: {u} sent twice to {v}")
                used.add(v)
                sent.append((u, v, m))
        if inboxes and any(inboxes.values()):
            last_delivery = t
        inboxes = {u: {} for u in g.nodes}
        sent.sort(key=lambda e: (e[0], e[1]))
        for u, v, m in sent:
            b = bits_of(m, n, w_max)
            if b > budget:
                trace.over_budget += 1
                if cfg.strict_bits:
                    raise BitBudgetExceeded(f"round {t}: {m.kind} of {b} bits over budget {budget}")
            trace.max_bits = max(trace.max_bits, b)
            trace.total_messages += 1
            if cfg.record:
                a, c = (u, v) if u < v else (v, u)
                trace.entries.append((t, a, c, "+" if u < v else "-", b, m.kind))
            inboxes[v][u] = m
        finished = not sent and all(nodes[u].done(t) for u in g.nodes)
        t += 1
        if finished:
            break
    trace.rounds = t
    trace.phase_rounds[phase] = t
    trace.completion[phase] = last_delivery
    return nodes, trace
