"""Unit-cost hardware proxies and the design-space sweeps built on them.

Delay, energy and area are per-gate-type numbers summed over a netlist
(energy and area) or along its longest path (delay).  They stand in for
synthesis results, so only orderings between designs are meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .builders import build_design1, build_precise_chain_design, build_truncated_design
from .netlist import Netlist, elaborate
from .simulator import exhaustive_error_stats


@dataclass(frozen=True)
class GateCost:
    delay: float = 1.0
    energy: float = 1.0
    area: float = 1.0

    def __post_init__(self):
        if min(self.delay, self.energy, self.area) < 0:
            raise ValueError("gate costs must be nonnegative")


_FREE = GateCost(0.0, 0.0, 0.0)


def _default_table() -> dict[str, GateCost]:
    return {"AND": GateCost(), "OR": GateCost(), "NOT": GateCost(), "XOR": GateCost(delay=2.0),
            "BUF": _FREE, "CONST0": _FREE}


@dataclass(frozen=True)
class GateCosts:
    table: dict[str, GateCost] = field(default_factory=_default_table)

    def __getitem__(self, op: str) -> GateCost:
        return self.table[op]

    @classmethod
    def from_dict(cls, obj: dict) -> "GateCosts":
        """Override defaults with ``{gate_type: {delay, energy, area}}``."""
        table = _default_table()
        for op, vals in obj.items():
            if op not in table:
                raise ValueError(f"unknown gate type {op!r}")
            if not isinstance(vals, dict) or set(vals) - {"delay", "energy", "area"}:
                raise ValueError(f"costs for {op} must be an object with delay/energy/area")
            base = table[op]
            table[op] = GateCost(
                float(vals.get("delay", base.delay)),
                float(vals.get("energy", base.energy)),
                float(vals.get("area", base.area)),
            )
        return cls(table)

    @classmethod
    def load(cls, path: str | Path) -> "GateCosts":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class CostReport:
    gate_count: int
    depth: float
    energy: float
    area: float
    med: float

    @property
    def pdp(self) -> float:
        return self.energy * self.depth

    @property
    def pdap(self) -> float:
        return self.pdp * self.area

    @property
    def pdaep(self) -> float:
        return self.pdap * self.med


def critical_path(netlist: Netlist, costs: GateCosts | None = None) -> float:
    costs = costs or GateCosts()
    arrival: dict[str, float] = {}
    worst = 0.0
    for g in netlist.gates:
        t = max((arrival.get(i, 0.0) for i in g.ins), default=0.0) + costs[g.op].delay
        arrival[g.out] = t
        worst = max(worst, t)
    return worst


def cost_report(netlist: Netlist, costs: GateCosts | None = None, med: float | Fraction = 0.0) -> CostReport:
    costs = costs or GateCosts()
    return CostReport(
        gate_count=netlist.gate_count,
        depth=critical_path(netlist, costs),
        energy=sum(costs[g.op].energy for g in netlist.gates),
        area=sum(costs[g.op].area for g in netlist.gates),
        med=float(med),
    )


@dataclass(frozen=True)
class SweepRow:
    variant: str
    med: Fraction
    ned: Fraction
    error_rate: Fraction
    report: CostReport

    def csv(self) -> str:
        r = self.report
        return (f"{self.variant},{float(self.med):.6f},{float(self.ned):.6e},{float(self.error_rate):.6f},"
                f"{r.depth:g},{r.gate_count},{r.pdp:g},{r.pdap:g},{r.pdaep:.6g}")


SWEEP_CSV_HEADER = "variant,med,ned,er,depth,gates,pdp,pdap,pdaep"


def _row(variant: str, plan, costs) -> SweepRow:
    nl = elaborate(plan)
    st = exhaustive_error_stats(nl)
    return SweepRow(variant, st.med, st.ned, st.error_rate, cost_report(nl, costs, st.med))


def sweep_precise_chain(costs: GateCosts | None = None) -> list[SweepRow]:
    return [_row(f"chain:{p}", build_precise_chain_design(p), costs) for p in range(1, 8)]


def sweep_truncation(costs: GateCosts | None = None) -> list[SweepRow]:
    base = build_design1()
    return [_row(f"trunc:{t}", build_truncated_design(base, t), costs) for t in range(8)]


def sweep_csv(rows: list[SweepRow]) -> str:
    return "\n".join([SWEEP_CSV_HEADER] + [r.csv() for r in rows]) + "\n"
