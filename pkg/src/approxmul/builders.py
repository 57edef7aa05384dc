"""Builders for exact and approximate 8x8 reduction plans.

Proposed designs reduce the partial products in two stages:

* Stage 1 optionally places a chain of precise components on the most
  significant populated columns, then covers every column that would send
  more than three dots to stage 2 with rows of multicolumn inexact
  compressors.  A row anchors its tiles on one column parity, feeds each
  tile's cout into the next tile's cin, and takes up to three dots per side.
  Rows alternate parity (odd first) until no column is over budget.
* Stage 2 runs one cout-chained row of inexact compressors over column pairs
  (1,2), (3,4), ... and, when precise components exist, a ripple-carry adder
  over the upper columns that hold at most two dots.
"""

from __future__ import annotations

from collections import defaultdict, deque

from .compressors import SPECS, CompressorKind, smallest_inexact_kind
from .plan import (FinalAdder, Placement, PlanError, ReductionPlan, Stage, dot_id,
                   partial_product_ids, port_columns, trace, validate_plan)

K = CompressorKind
WIDTH = 8
MAX_CHAIN = 7
STAGE2_BUDGET = 3
ADDER_STARTS = (9, 11, 13)


class _StageBuilder:
    """Appends placements and hands out their output dot ids."""

    def __init__(self, stage_no: int):
        self.stage_no = stage_no
        self.rows: dict[int, int] = defaultdict(int)
        self.placements: list[Placement] = []

    def place(self, kind, anchor, b=(), a=(), cin=()) -> tuple[str, ...]:
        kind = CompressorKind(kind)
        cin = tuple(x for x in cin if x is not None)
        self.placements.append(Placement(kind, anchor, tuple(b), tuple(a), cin, SPECS[kind].is_exact))
        ids = []
        for col in port_columns(kind, anchor):
            ids.append(dot_id(self.stage_no, col, self.rows[col]))
            self.rows[col] += 1
        return tuple(ids)

    def stage(self) -> Stage:
        return Stage(tuple(self.placements))


def _queues(width: int, truncated: int = 0) -> dict[int, deque]:
    return defaultdict(deque, {c: deque(d for d, _, _ in v) for c, v in partial_product_ids(width, truncated).items()})


def _take(q: deque, n: int) -> list[str]:
    return [q.popleft() for _ in range(min(n, len(q)))]


# --- Dadda -----------------------------------------------------------------

def dadda_targets(max_height: int) -> list[int]:
    seq = [2]
    while seq[-1] < max_height:
        seq.append(seq[-1] * 3 // 2)
    return [d for d in reversed(seq) if d < max_height]


def build_dadda(n: int = WIDTH) -> ReductionPlan:
    """Classic Dadda reduction with half/full adders and a ripple-carry adder."""
    if not 2 <= n <= 8:
        raise ValueError(f"width {n} outside [2, 8]")
    cols = {c: list(q) for c, q in _queues(n).items()}
    stages = []
    for si, target in enumerate(dadda_targets(n), start=1):
        sb = _StageBuilder(si)
        nxt: dict[int, list[str]] = defaultdict(list)
        for c in range(2 * n):
            q = deque(cols.get(c, []))
            height = len(q) + len(nxt[c])  # carries already headed here count too
            while height > target:
                if height - target >= 2:
                    s, cy = sb.place(K.FULL_ADDER, c, a=_take(q, 3))
                    height -= 2
                else:
                    s, cy = sb.place(K.HALF_ADDER, c, a=_take(q, 2))
                    height -= 1
                nxt[c].append(s)
                nxt[c + 1].append(cy)
            nxt[c] = list(q) + nxt[c]
        cols = nxt
        stages.append(sb.stage())
    populated = [c for c in range(2 * n) if len(cols.get(c, [])) >= 2]
    fa = FinalAdder(populated[0], 2 * n - 2) if populated else None
    return _checked(ReductionPlan(n, tuple(stages), 0, fa), proposed=False)


# --- proposed two-stage family ---------------------------------------------

def _precise_chain(p: int, queues, sb_reserve: list) -> None:
    """Reserve partial products for ``p`` precise components (list of jobs)."""
    if p == 1:
        sb_reserve.append((K.HALF_ADDER, 13, _take(queues[13], 2)))
    elif p == 2:
        sb_reserve.append((K.FULL_ADDER, 12, _take(queues[12], 3)))
        sb_reserve.append((K.HALF_ADDER, 13, _take(queues[13], 2)))
    elif p >= 3:
        for c in range(14 - p, 12):
            sb_reserve.append((K.EXACT_4_2, c, _take(queues[c], 4)))
        sb_reserve.append((K.EXACT_4_2, 12, _take(queues[12], 3)))  # three-input 4:2
        sb_reserve.append((K.FULL_ADDER, 13, _take(queues[13], 2)))


def _stage_one(p: int, adder_lo: int | None, width: int = WIDTH) -> Stage:
    """Precise chain plus inexact rows; columns from ``adder_lo`` up may send
    only two dots to stage 2 (they feed the ripple-carry adder)."""
    queues = _queues(width)
    jobs: list = []
    _precise_chain(p, queues, jobs)
    out = defaultdict(int)  # dots each column already sends to stage 2, besides leftovers
    for _, c, _ in jobs:
        out[c] += 1
        out[c + 1] += 1
    chain_start = jobs[0][1] if jobs and jobs[0][0] is K.EXACT_4_2 else None
    absorbed: list[str] = []  # cout offered to the first 4:2's carry-in

    sb = _StageBuilder(1)
    ncol = 2 * width
    budget = [STAGE2_BUDGET if adder_lo is None or c < adder_lo else 2 for c in range(ncol)]
    parity = 1
    for _ in range(6):
        over = [c for c in range(ncol) if out[c] + len(queues[c]) > budget[c]]
        if not over:
            break
        placed = len(sb.placements)
        lo, hi = min(over), max(over)
        k = lo if lo % 2 == parity else lo - 1
        prev_cout = None

        def spills(k):
            # a pending cout would push column k over budget: extend the row
            return (prev_cout is not None and k < ncol - 1
                    and out[k] + len(queues[k]) + 1 > budget[k]
                    and queues[k])

        while k <= hi or spills(k):
            b = _take(queues[k + 1], 3)
            a = _take(queues[k], 3)
            if not b and prev_cout is None:
                if len(a) >= 2:
                    sb.place(K.HALF_ADDER if len(a) == 2 else K.FULL_ADDER, k, a=a)
                    out[k] += 1
                    out[k + 1] += 1
                else:
                    queues[k].extendleft(reversed(a))
                k += 2
                continue
            kind = smallest_inexact_kind(len(b), len(a), prev_cout is not None)
            ports = sb.place(kind, k, b, a, (prev_cout,))
            out[k] += 1
            out[k + 1] += 1
            prev_cout = ports[2] if len(ports) > 2 else None
            if prev_cout is not None and k + 2 > hi and not spills(k + 2):
                if k + 2 == chain_start and not absorbed:
                    absorbed.append(prev_cout)
                else:
                    out[k + 2] += 1
            k += 2
        if len(sb.placements) == placed:
            raise PlanError("stage-1 tiling cannot meet the column budget")
        parity ^= 1
    else:
        raise PlanError("stage-1 tiling did not converge")

    carry = absorbed[0] if absorbed else None
    for kind, c, dots in jobs:
        if kind is K.EXACT_4_2:
            _, _, carry = sb.place(kind, c, a=dots, cin=(carry,))
        elif kind is K.FULL_ADDER and c == 13 and carry is not None:
            sb.place(kind, c, a=dots + [carry])
        else:
            sb.place(kind, c, a=dots)
    return sb.stage()


def _stage_two(remaining: dict[int, list[str]], lo: int | None, width: int = WIDTH):
    ncol = 2 * width
    dots = {c: list(remaining.get(c, [])) for c in range(ncol)}
    if lo is not None:
        chain_cout = lo >= 3 and len(dots[lo - 1]) >= 2
        if any(len(dots[x]) > 2 for x in range(lo + 1, ncol)) or len(dots[lo]) + chain_cout > 3:
            raise PlanError(f"columns from {lo} up do not suit a ripple-carry adder")
    top = lo if lo is not None else ncol - 1
    sb = _StageBuilder(2)
    cin = None
    for k in range(1, top, 2):
        a, b = dots[k], dots[k + 1]
        if len(b) == 0 or (len(a) <= 1 and len(b) <= 1 and cin is None):
            if len(a) + (cin is not None) >= 2:
                kind = K.HALF_ADDER if len(a) + (cin is not None) == 2 else K.FULL_ADDER
                sb.place(kind, k, a=a + ([cin] if cin else []))
            cin = None
            continue
        kind = smallest_inexact_kind(len(b), len(a), cin is not None)
        ports = sb.place(kind, k, b, a, (cin,))
        cin = ports[2] if len(ports) > 2 else None
    fa = FinalAdder(lo, ncol - 2) if lo is not None else None
    return sb.stage(), fa


def _build_proposed(p: int) -> ReductionPlan:
    # Prefer the longest adder (from column 9, where a four-component chain's
    # tiling first leaves two dots); longer chains crowd columns 9..10 with
    # their own outputs and fall back to a later start.
    for lo in ((None,) if p == 0 else ADDER_STARTS):
        try:
            s1 = _stage_one(p, lo)
            s2, fa = _stage_two(trace(ReductionPlan(WIDTH, (s1,), 0, None)).remaining, lo)
        except PlanError:
            continue
        return _checked(ReductionPlan(WIDTH, (s1, s2), 0, fa), proposed=True)
    raise PlanError(f"no two-stage layout found for {p} precise components")


def build_initial_design() -> ReductionPlan:
    """Inexact compressors only; no precise component and no final adder."""
    return _build_proposed(0)


def build_precise_chain_design(p: int) -> ReductionPlan:
    """Two-stage design with ``p`` successive precise components in stage 1."""
    if not 1 <= p <= MAX_CHAIN:
        raise ValueError(f"precise chain length {p} outside [1, {MAX_CHAIN}]")
    return _build_proposed(p)


def build_design1() -> ReductionPlan:
    return build_precise_chain_design(4)


def build_design2() -> ReductionPlan:
    return build_truncated_design(build_design1(), 6)


# --- truncation ------------------------------------------------------------

def _shrink(p: Placement, b, a, cin) -> CompressorKind:
    sp = SPECS[p.kind]
    if not sp.is_exact:
        return smallest_inexact_kind(len(b), len(a), bool(cin))
    if p.kind is K.FULL_ADDER and len(a) <= 2:
        return K.HALF_ADDER
    return p.kind


def build_truncated_design(base: ReductionPlan, t: int) -> ReductionPlan:
    """Drop partial products of columns ``0..t-1`` and simplify what remains.

    Placements lose the inputs that vanished, shrink to the smallest kind of
    their class that still hosts the rest, and disappear when nothing is left;
    output ports that no longer exist read as constant 0 downstream.
    """
    if not 0 <= t <= 7:
        raise ValueError(f"truncation {t} outside [0, 7]")
    if base.truncated_columns:
        raise ValueError("base plan is already truncated")
    alive = {d for v in partial_product_ids(base.width, t).values() for d, _, _ in v}
    rename: dict[str, str | None] = {}

    def live(ids):
        out = []
        for d in ids:
            d = rename.get(d, d)
            if d is not None and d in alive:
                out.append(d)
        return out

    base_ports = trace(base).ports
    stages = []
    for si, st in enumerate(base.stages, start=1):
        sb = _StageBuilder(si)
        for p, ports in zip(st.placements, base_ports[si - 1]):
            b, a, cin = live(p.b_dots), live(p.a_dots), live(p.cin)
            if not (b or a or cin):
                for d in ports:
                    rename[d] = None
                continue
            kind = _shrink(p, b, a, cin)
            new = sb.place(kind, p.anchor_column, b, a, cin)
            for i, d in enumerate(ports):
                if i < len(new):
                    rename[d] = new[i]
                    alive.add(new[i])
                else:
                    rename[d] = None
        stages.append(sb.stage())
    plan = ReductionPlan(base.width, tuple(stages), t, base.final_adder)
    return _checked(plan, proposed=True)


def _checked(plan: ReductionPlan, proposed: bool) -> ReductionPlan:
    problems = validate_plan(plan, proposed=proposed)
    if problems:
        raise PlanError("builder produced an invalid plan: " + "; ".join(problems))
    return plan


def design_from_selector(selector: str) -> ReductionPlan:
    """Map ``dadda|initial|chain:p|design1|design2|trunc:t|plan:<file>``."""
    from pathlib import Path
    from .plan import deserialize_plan

    if selector == "dadda":
        return build_dadda(WIDTH)
    if selector == "initial":
        return build_initial_design()
    if selector == "design1":
        return build_design1()
    if selector == "design2":
        return build_design2()
    name, _, arg = selector.partition(":")
    if name == "chain" and arg.isdigit():
        return build_precise_chain_design(int(arg))
    if name == "trunc" and arg.isdigit():
        return build_truncated_design(build_design1(), int(arg))
    if name == "plan" and arg:
        return deserialize_plan(Path(arg).read_text())
    raise ValueError(f"unknown design selector '{selector}'")
