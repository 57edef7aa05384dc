"""Flattening of reduction plans into boolean gate netlists.

Gates are two-input AND/OR/XOR plus NOT.  Construction folds constants and
shares structurally identical gates, then drops anything the outputs do not
reach, so truncated columns and zero-loaded compressor inputs cost nothing.
Nets are renumbered ``n0, n1, ...`` in topological order, which makes the
serialized text a deterministic function of the plan.
"""

from __future__ import annotations

from dataclasses import dataclass

from .compressors import compress_column, realize
from .plan import PlanError, ReductionPlan, trace

BINARY_OPS = ("AND", "OR", "XOR")
OPS = BINARY_OPS + ("NOT", "BUF", "CONST0")


@dataclass(frozen=True)
class Gate:
    out: str
    op: str
    ins: tuple[str, ...]


@dataclass(frozen=True)
class Netlist:
    """Gate DAG with primary inputs ``A0..`` / ``B0..`` and outputs ``F0..``.

    ``gates`` is topologically ordered; each output is driven by a ``BUF``
    or ``CONST0`` line so every output name appears in the text.
    """

    width: int
    gates: tuple[Gate, ...]

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(f"A{i}" for i in range(self.width)) + tuple(f"B{i}" for i in range(self.width))

    @property
    def outputs(self) -> tuple[str, ...]:
        return tuple(f"F{c}" for c in range(2 * self.width))

    @property
    def logic_gates(self) -> tuple[Gate, ...]:
        """Gates that cost hardware (output buffers and tie-offs excluded)."""
        return tuple(g for g in self.gates if g.op not in ("BUF", "CONST0"))

    @property
    def gate_count(self) -> int:
        return len(self.logic_gates)

    def op_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.logic_gates:
            out[g.op] = out.get(g.op, 0) + 1
        return out

    def serialize(self) -> str:
        return "".join(f"{g.out} = {g.op}({','.join(g.ins)})\n" for g in self.gates)


def parse_netlist(text: str, width: int = 8) -> Netlist:
    """Inverse of :meth:`Netlist.serialize`."""
    gates = []
    for ln, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            out, rhs = (s.strip() for s in line.split("=", 1))
            op, rest = rhs.split("(", 1)
            args = rest.rstrip(")").strip()
        except ValueError:
            raise PlanError(f"netlist line {ln}: cannot parse {line!r}") from None
        op = op.strip()
        if op not in OPS:
            raise PlanError(f"netlist line {ln}: unknown gate {op!r}")
        gates.append(Gate(out, op, tuple(a.strip() for a in args.split(",")) if args else ()))
    return Netlist(width, tuple(gates))


class _Sig:
    """A net inside a :class:`_Builder`; supports ``& | ^ ~`` with 0/1 ints."""

    __slots__ = ("b", "id")

    def __init__(self, builder: "_Builder", ident: int):
        self.b = builder
        self.id = ident

    def __and__(self, other):
        return self.b.gate("AND", self, other)

    def __or__(self, other):
        return self.b.gate("OR", self, other)

    def __xor__(self, other):
        return self.b.gate("XOR", self, other)

    __rand__, __ror__, __rxor__ = __and__, __or__, __xor__

    def __invert__(self):
        return self.b.gate("NOT", self)


class _Builder:
    def __init__(self):
        self.nodes: list[tuple[str, tuple]] = []  # (op, operand ids) or ("IN", (name,))
        self.table: dict[tuple, _Sig] = {}

    def _node(self, key: tuple) -> _Sig:
        if key not in self.table:
            self.nodes.append(key)
            self.table[key] = _Sig(self, len(self.nodes) - 1)
        return self.table[key]

    def input(self, name: str) -> _Sig:
        return self._node(("IN", (name,)))

    def gate(self, op: str, x, y=None):
        if op == "NOT":
            if isinstance(x, int):
                return 1 - x
            return self._node(("NOT", (x.id,)))
        if isinstance(x, int):
            x, y = y, x
        if isinstance(y, int):
            if isinstance(x, int):
                return {"AND": x & y, "OR": x | y, "XOR": x ^ y}[op]
            if op == "AND":
                return x if y else 0
            if op == "OR":
                return 1 if y else x
            return self.gate("NOT", x) if y else x
        if x.id == y.id:
            return {"AND": x, "OR": x, "XOR": 0}[op]
        return self._node((op, tuple(sorted((x.id, y.id)))))


def elaborate(plan: ReductionPlan) -> Netlist:
    """Expand every placement and the final adder into gates."""
    tr = trace(plan)
    if tr.violations:
        raise PlanError("cannot elaborate an invalid plan: " + "; ".join(tr.violations))
    bld = _Builder()
    a = [bld.input(f"A{i}") for i in range(plan.width)]
    b = [bld.input(f"B{i}") for i in range(plan.width)]
    net: dict[str, object] = {}
    for d in tr.dots.values():
        if d.source.startswith("pp:"):
            i, j = (int(x) for x in d.source[len("pp:A"):].split("B"))
            net[d.id] = a[i] & b[j]

    for st, ports in zip(plan.stages, tr.ports):
        for p, names in zip(st.placements, ports):
            s, c, couts = realize(p.kind, [net[d] for d in p.b_dots], [net[d] for d in p.a_dots],
                                  [net[d] for d in p.cin])
            for name, sig in zip(names, (s, c) + tuple(couts)):
                net[name] = sig
    for cell in tr.adder:
        carry, s = compress_column([net[d] for d in cell.inputs])
        net[cell.sum] = s
        if cell.carry is not None:
            net[cell.carry] = carry

    outs = [net[tr.result[c]] if tr.result[c] is not None else 0 for c in range(2 * plan.width)]
    return _emit(bld, outs, plan.width)


def _emit(bld: _Builder, outs: list, width: int) -> Netlist:
    # keep only what the outputs reach; node ids are already topological
    live: set[int] = set()
    stack = [o.id for o in outs if not isinstance(o, int)]
    while stack:
        i = stack.pop()
        if i in live:
            continue
        live.add(i)
        op, args = bld.nodes[i]
        if op != "IN":
            stack.extend(args)
    names: dict[int, str] = {}
    gates: list[Gate] = []
    for i, (op, args) in enumerate(bld.nodes):
        if op == "IN":
            names[i] = args[0]
        elif i in live:
            names[i] = f"n{len(gates)}"
            gates.append(Gate(names[i], op, tuple(names[x] for x in args)))
    for c, o in enumerate(outs):
        if isinstance(o, int):
            if o:
                raise PlanError(f"output F{c} is tied to constant 1")
            gates.append(Gate(f"F{c}", "CONST0", ()))
        else:
            gates.append(Gate(f"F{c}", "BUF", (names[o.id],)))
    return Netlist(width, tuple(gates))
