"""Dot-diagram reduction plans.

A plan lists, stage by stage, which compressors consume which dots.  Dots
are named ``s{stage}c{col}r{row}``: stage 0 holds the partial products
(row ``r`` of column ``c`` is ``A_i & B_j`` with ``i`` ascending), and each
placement in stage ``s`` emits new dots ``s{s}c{col}r{row}`` in placement
order (sum, carry, then couts), rows counted per column.  Dots no placement
consumes pass through unchanged.  Lateral carries (couts) may be consumed by
a later placement of the same stage; anything else a stage produces only
becomes visible to the next stage.

After the last stage an optional ripple-carry adder sums columns
``lo_col..hi_col``; every column must then hold at most one dot, which
becomes output bit ``F_col`` (an empty column is a constant 0).
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .compressors import SPECS, CompressorKind


class PlanError(ValueError):
    """Malformed plan text or a plan that fails validation."""


def dot_id(stage: int, col: int, row: int) -> str:
    return f"s{stage}c{col}r{row}"


def port_columns(kind: CompressorKind, anchor: int) -> list[int]:
    """Columns of the ``(sum, carry, *couts)`` outputs of a placement."""
    sp = SPECS[kind]
    return [anchor, anchor + 1] + [anchor + sp.cout_shift] * sp.carries_out


@dataclass(frozen=True)
class Dot:
    id: str
    column: int
    stage: int
    source: str  # "pp:A{i}B{j}" or "port:{stage}.{index}.{port}" or "adder:{col}.{port}"


@dataclass(frozen=True)
class Placement:
    kind: CompressorKind
    anchor_column: int
    b_dots: tuple[str, ...] = ()
    a_dots: tuple[str, ...] = ()
    cin: tuple[str, ...] = ()
    precise: bool = False

    @property
    def inputs(self) -> tuple[str, ...]:
        return self.b_dots + self.a_dots + self.cin


@dataclass(frozen=True)
class Stage:
    placements: tuple[Placement, ...] = ()


@dataclass(frozen=True)
class FinalAdder:
    lo_col: int
    hi_col: int


@dataclass(frozen=True)
class ReductionPlan:
    width: int
    stages: tuple[Stage, ...]
    truncated_columns: int = 0
    final_adder: FinalAdder | None = None

    @property
    def columns(self) -> int:
        return 2 * self.width

    @property
    def is_approximate(self) -> bool:
        return any(not SPECS[p.kind].is_exact for s in self.stages for p in s.placements)

    def placements(self):
        for si, st in enumerate(self.stages, start=1):
            for p in st.placements:
                yield si, p


def partial_product_ids(width: int, truncated: int = 0) -> dict[int, list[tuple[str, int, int]]]:
    """Column -> ``[(dot id, i, j), ...]`` with ``i`` ascending."""
    cols: dict[int, list[tuple[str, int, int]]] = {}
    for c in range(2 * width - 1):
        lo = max(0, c - width + 1)
        hi = min(c, width - 1)
        cols[c] = [] if c < truncated else [(dot_id(0, c, r), i, c - i) for r, i in enumerate(range(lo, hi + 1))]
    return cols


def generate_partial_products(n: int) -> tuple[list[int], list[Dot]]:
    """Column heights and partial-product dots of an ``n x n`` multiplier."""
    if not 2 <= n <= 8:
        raise ValueError(f"width {n} outside [2, 8]")
    cols = partial_product_ids(n)
    heights = [len(cols[c]) for c in range(2 * n - 1)]
    dots = [Dot(d, c, 0, f"pp:A{i}B{j}") for c in cols for d, i, j in cols[c]]
    return heights, dots


@dataclass
class AdderCell:
    column: int
    inputs: tuple[str, ...]
    sum: str
    carry: str | None


@dataclass
class Trace:
    """Dot bookkeeping of a plan; ``violations`` is empty for a sound plan."""

    dots: dict[str, Dot] = field(default_factory=dict)
    entering: list[dict[int, list[str]]] = field(default_factory=list)
    ports: list[list[tuple[str, ...]]] = field(default_factory=list)
    remaining: dict[int, list[str]] = field(default_factory=dict)
    adder: list[AdderCell] = field(default_factory=list)
    result: dict[int, str | None] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    def heights(self, stage: int) -> list[int]:
        """Dot count per column entering 1-based ``stage``."""
        cols = self.entering[stage - 1]
        return [len(cols.get(c, [])) for c in range(max(cols, default=-1) + 1)]


def _stage_port_ids(stage_no: int, st: Stage) -> set[str]:
    rows: dict[int, int] = defaultdict(int)
    out = set()
    for p in st.placements:
        for col in port_columns(p.kind, p.anchor_column):
            out.add(dot_id(stage_no, col, rows[col]))
            rows[col] += 1
    return out


def trace(plan: ReductionPlan) -> Trace:
    t = Trace()
    bad = t.violations.append
    n = plan.width
    ncol = 2 * n
    if not 2 <= n <= 8:
        bad(f"width {n} outside [2, 8]")
        return t
    if not 0 <= plan.truncated_columns < ncol:
        bad(f"truncated_columns {plan.truncated_columns} outside [0, {ncol - 1}]")
        return t

    avail: dict[int, list[str]] = defaultdict(list)
    for c, items in partial_product_ids(n, plan.truncated_columns).items():
        for d, i, j in items:
            t.dots[d] = Dot(d, c, 0, f"pp:A{i}B{j}")
            avail[c].append(d)

    for si, st in enumerate(plan.stages, start=1):
        t.entering.append({c: list(v) for c, v in sorted(avail.items()) if v})
        pool = {d for v in avail.values() for d in v}
        lateral: dict[str, None] = {}
        consumed: set[str] = set()
        produced: list[str] = []
        rows: dict[int, int] = defaultdict(int)
        stage_ports = []
        future = _stage_port_ids(si, st)
        for pi, p in enumerate(st.placements):
            where = f"stage {si} placement {pi} ({p.kind}@{p.anchor_column})"
            sp = SPECS[p.kind]
            k = p.anchor_column
            if not 0 <= k < ncol:
                bad(f"{where}: anchor column out of range")
            if len(p.b_dots) > sp.m_high or len(p.a_dots) > sp.m_low or len(p.cin) > sp.carries_in:
                bad(f"{where}: arity violation, got {len(p.b_dots)}/{len(p.a_dots)}/{len(p.cin)} "
                    f"for {sp.m_high}/{sp.m_low}/{sp.carries_in} (b/a/cin)")
            if p.precise and not sp.is_exact:
                bad(f"{where}: inexact kind flagged precise")
            if not p.inputs:
                bad(f"{where}: placement has no inputs")
            for group, col in ((p.b_dots, k + 1), (p.a_dots, k), (p.cin, k)):
                for d in group:
                    if d in consumed:
                        bad(f"{where}: dot {d} consumed twice")
                        continue
                    if d not in pool and d not in lateral:
                        if d in future:
                            bad(f"{where}: dot {d} is not a lateral carry produced earlier (carry-chain order)")
                        else:
                            bad(f"{where}: unknown or unavailable dot {d}")
                        continue
                    if t.dots[d].column != col:
                        bad(f"{where}: dot {d} sits in column {t.dots[d].column}, expected {col}")
                    consumed.add(d)
            names = []
            for port, col in enumerate(port_columns(p.kind, k)):
                if col >= ncol:
                    bad(f"{where}: output lands beyond column {ncol - 1}")
                d = dot_id(si, col, rows[col])
                rows[col] += 1
                t.dots[d] = Dot(d, col, si, f"port:{si}.{pi}.{port}")
                names.append(d)
                if port >= 2:
                    lateral[d] = None
                else:
                    produced.append(d)
            stage_ports.append(tuple(names))
        t.ports.append(stage_ports)
        nxt: dict[int, list[str]] = defaultdict(list)
        for c in sorted(avail):
            nxt[c].extend(d for d in avail[c] if d not in consumed)
        for d in produced + [d for d in lateral if d not in consumed]:
            nxt[t.dots[d].column].append(d)
        avail = nxt

    t.remaining = {c: list(v) for c, v in sorted(avail.items()) if v}
    cols = {c: list(v) for c, v in avail.items()}
    fa = plan.final_adder
    last = len(plan.stages)
    if fa is not None:
        if not 0 <= fa.lo_col <= fa.hi_col < ncol - 1:
            bad(f"final adder span [{fa.lo_col}, {fa.hi_col}] invalid")
        else:
            rows = defaultdict(int)
            for d in t.dots.values():
                if d.stage == last:
                    rows[d.column] += 1
            carry: str | None = None
            for c in range(fa.lo_col, fa.hi_col + 1):
                ins = list(cols.get(c, []))
                limit = 3 if c == fa.lo_col else 2
                if len(ins) > limit:
                    bad(f"final adder column {c} holds {len(ins)} dots (max {limit})")
                if carry is not None:
                    ins.append(carry)
                s = dot_id(last, c, rows[c])
                rows[c] += 1
                t.dots[s] = Dot(s, c, last, f"adder:{c}.sum")
                carry = None
                if len(ins) >= 2:
                    carry = dot_id(last, c + 1, rows[c + 1])
                    rows[c + 1] += 1
                    t.dots[carry] = Dot(carry, c + 1, last, f"adder:{c}.carry")
                t.adder.append(AdderCell(c, tuple(ins), s, carry))
                cols[c] = [s]
            if carry is not None:
                if cols.get(fa.hi_col + 1):
                    bad(f"final adder carry collides with dots in column {fa.hi_col + 1}")
                cols.setdefault(fa.hi_col + 1, []).append(carry)

    for c in range(ncol):
        v = cols.get(c, [])
        if len(v) > 1:
            bad(f"column {c} ends with {len(v)} dots")
        t.result[c] = v[0] if v else None
    for c in cols:
        if c >= ncol and cols[c]:
            bad(f"dots overflow into column {c}")
    return t


def validate_plan(plan: ReductionPlan, proposed: bool | None = None) -> list[str]:
    """Return every rule violation; ``[]`` means the plan is sound.

    ``proposed`` plans (inferred: any inexact placement) must also finish in
    exactly two stages with at most three dots per column entering stage 2.
    """
    t = trace(plan)
    out = list(t.violations)
    if proposed is None:
        proposed = plan.is_approximate
    if proposed:
        if len(plan.stages) != 2:
            out.append(f"proposed plan has {len(plan.stages)} stages, expected 2")
        elif len(t.entering) >= 2:
            for c, v in t.entering[1].items():
                if len(v) > 3:
                    out.append(f"column {c} sends {len(v)} dots into stage 2 (max 3)")
    return out


# --- JSON -------------------------------------------------------------------

def _placement_json(p: Placement) -> dict:
    cin = None if not p.cin else (p.cin[0] if len(p.cin) == 1 else list(p.cin))
    return {"kind": p.kind.value, "anchor_column": p.anchor_column, "b_dots": list(p.b_dots),
            "a_dots": list(p.a_dots), "cin": cin, "precise": p.precise}


def plan_to_dict(plan: ReductionPlan) -> dict:
    fa = plan.final_adder
    return {
        "width": plan.width,
        "truncated_columns": plan.truncated_columns,
        "stages": [{"placements": [_placement_json(p) for p in s.placements]} for s in plan.stages],
        "final_adder": None if fa is None else {"lo_col": fa.lo_col, "hi_col": fa.hi_col},
    }


def serialize_plan(plan: ReductionPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=1)


def _need(obj: dict, key: str, types, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise PlanError(f"schema: missing field '{key}' in {where}")
    val = obj[key]
    if not isinstance(val, types) or (isinstance(val, bool) and bool not in (types if isinstance(types, tuple) else (types,))):
        raise PlanError(f"schema: field '{key}' in {where} has wrong type")
    return val


def _ids(val, where: str) -> tuple[str, ...]:
    if not isinstance(val, list) or not all(isinstance(x, str) for x in val):
        raise PlanError(f"schema: {where} must be a list of dot ids")
    return tuple(val)


def plan_from_dict(obj: dict) -> ReductionPlan:
    width = _need(obj, "width", int, "plan")
    trunc = _need(obj, "truncated_columns", int, "plan")
    stages_raw = _need(obj, "stages", list, "plan")
    if "final_adder" not in obj:
        raise PlanError("schema: missing field 'final_adder' in plan")
    stages = []
    for si, st in enumerate(stages_raw):
        pls = []
        for pi, raw in enumerate(_need(st, "placements", list, f"stage {si}")):
            where = f"stage {si} placement {pi}"
            kind_name = _need(raw, "kind", str, where)
            try:
                kind = CompressorKind(kind_name)
            except ValueError:
                raise PlanError(f"schema: unknown compressor kind '{kind_name}' in {where}") from None
            anchor = _need(raw, "anchor_column", int, where)
            b = _ids(_need(raw, "b_dots", list, where), f"{where} b_dots")
            a = _ids(_need(raw, "a_dots", list, where), f"{where} a_dots")
            if "cin" not in raw:
                raise PlanError(f"schema: missing field 'cin' in {where}")
            cin_raw = raw["cin"]
            if cin_raw is None:
                cin = ()
            elif isinstance(cin_raw, str):
                cin = (cin_raw,)
            else:
                cin = _ids(cin_raw, f"{where} cin")
            precise = _need(raw, "precise", bool, where)
            pls.append(Placement(kind, anchor, b, a, cin, precise))
        stages.append(Stage(tuple(pls)))
    fa_raw = obj["final_adder"]
    fa = None
    if fa_raw is not None:
        fa = FinalAdder(_need(fa_raw, "lo_col", int, "final_adder"), _need(fa_raw, "hi_col", int, "final_adder"))
    return ReductionPlan(width, tuple(stages), trunc, fa)


def deserialize_plan(text: str, validate: bool = True) -> ReductionPlan:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise PlanError(f"malformed JSON: {e}") from None
    plan = plan_from_dict(obj)
    if validate:
        problems = validate_plan(plan)
        if problems:
            raise PlanError("invalid plan: " + "; ".join(problems))
    return plan
