"""Netlist evaluation and exhaustive multiplier error analysis.

Evaluation is bit-parallel: every net holds a boolean vector with one lane
per operand pair, so the full 8x8 sweep is a single pass over the gates.
Pairs are laid out a-major (lane ``a * 2**n + b``).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .netlist import Netlist, elaborate
from .plan import ReductionPlan

_NP_OPS = {"AND": np.bitwise_and, "OR": np.bitwise_or, "XOR": np.bitwise_xor}


def as_netlist(design: Netlist | ReductionPlan) -> Netlist:
    return design if isinstance(design, Netlist) else elaborate(design)


def evaluate_vector(netlist: Netlist, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Products of equally shaped operand arrays, as ``int64``."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = netlist.width
    val: dict[str, np.ndarray] = {}
    for i in range(n):
        val[f"A{i}"] = ((a >> i) & 1).astype(bool)
        val[f"B{i}"] = ((b >> i) & 1).astype(bool)
    zero = np.zeros(np.broadcast(a, b).shape, dtype=bool)
    out = np.zeros(zero.shape, dtype=np.int64)
    for g in netlist.gates:
        if g.op in _NP_OPS:
            val[g.out] = _NP_OPS[g.op](val[g.ins[0]], val[g.ins[1]])
        elif g.op == "NOT":
            val[g.out] = ~val[g.ins[0]]
        elif g.op == "BUF":
            val[g.out] = val[g.ins[0]]
        else:
            val[g.out] = zero
    for c in range(2 * n):
        out |= val[f"F{c}"].astype(np.int64) << c
    return out


def evaluate(netlist: Netlist, a: int, b: int) -> int:
    """Product of one operand pair."""
    hi = 1 << netlist.width
    if not (0 <= a < hi and 0 <= b < hi):
        raise ValueError(f"operands must lie in [0, {hi - 1}]")
    return int(evaluate_vector(netlist, np.array([a]), np.array([b]))[0])


def operand_grid(n: int = 8) -> tuple[np.ndarray, np.ndarray]:
    v = np.arange(1 << n, dtype=np.int64)
    return np.repeat(v, 1 << n), np.tile(v, 1 << n)


def product_table(design: Netlist | ReductionPlan) -> np.ndarray:
    """``T[a, b]`` = approximate product, shape ``(2**n, 2**n)``."""
    nl = as_netlist(design)
    a, b = operand_grid(nl.width)
    side = 1 << nl.width
    return evaluate_vector(nl, a, b).reshape(side, side)


def signed_error_table(design: Netlist | ReductionPlan) -> np.ndarray:
    """``E[a, b]`` = approximate minus exact product."""
    t = product_table(design)
    v = np.arange(t.shape[0], dtype=np.int64)
    return t - np.outer(v, v)


@dataclass(frozen=True)
class MultiplierErrorStats:
    n: int
    total_abs_ed: int
    total_signed_ed: int
    errors: int
    max_abs_ed: int

    @property
    def pairs(self) -> int:
        return 1 << (2 * self.n)

    @property
    def med(self) -> Fraction:
        return Fraction(self.total_abs_ed, self.pairs)

    @property
    def ned(self) -> Fraction:
        return self.med / ((1 << self.n) - 1) ** 2

    @property
    def error_rate(self) -> Fraction:
        return Fraction(self.errors, self.pairs)

    @property
    def mean_signed_ed(self) -> Fraction:
        return Fraction(self.total_signed_ed, self.pairs)

    def csv_row(self, design: str) -> str:
        return (f"{design},{float(self.med):.6f},{float(self.ned):.6e},{float(self.error_rate):.6f},"
                f"{self.max_abs_ed},{float(self.mean_signed_ed):.6f}")


STATS_CSV_HEADER = "design,med,ned,er,max_abs_ed,mean_signed_ed"


def stats_from_errors(ed: np.ndarray, n: int) -> MultiplierErrorStats:
    ed = np.asarray(ed, dtype=np.int64)
    return MultiplierErrorStats(
        n=n,
        total_abs_ed=int(np.abs(ed).sum()),
        total_signed_ed=int(ed.sum()),
        errors=int(np.count_nonzero(ed)),
        max_abs_ed=int(np.abs(ed).max(initial=0)),
    )


def exhaustive_error_stats(design: Netlist | ReductionPlan) -> MultiplierErrorStats:
    nl = as_netlist(design)
    return stats_from_errors(signed_error_table(nl), nl.width)


@dataclass(frozen=True)
class Heatmap:
    matrix: np.ndarray  # |ED| at (a, b)
    design: str = ""

    @property
    def max_value(self) -> int:
        return int(self.matrix.max(initial=0))

    @property
    def mean(self) -> Fraction:
        return Fraction(int(self.matrix.sum()), self.matrix.size)

    def border_mean(self, margin: int = 16) -> Fraction:
        """Mean |ED| over cells with either operand below ``margin``."""
        m = self.matrix
        mask = np.zeros(m.shape, dtype=bool)
        mask[:margin, :] = True
        mask[:, :margin] = True
        return Fraction(int(m[mask].sum()), int(mask.sum()))

    def to_pgm_pixels(self) -> np.ndarray:
        top = self.max_value
        if top == 0:
            return np.zeros(self.matrix.shape, dtype=np.uint8)
        return (self.matrix * 255 // top).astype(np.uint8)

    def write_csv(self, path: str | Path) -> None:
        lines = (",".join(str(int(x)) for x in row) for row in self.matrix)
        Path(path).write_text("\n".join(lines) + "\n")

    def write_pgm(self, path: str | Path) -> None:
        px = self.to_pgm_pixels()
        h, w = px.shape
        header = f"P5\n# max_abs_ed {self.max_value}\n{w} {h}\n255\n".encode("ascii")
        Path(path).write_bytes(header + px.tobytes())


def heatmap(design: Netlist | ReductionPlan, name: str = "") -> Heatmap:
    return Heatmap(np.abs(signed_error_table(design)), name)


def signed_error_distribution(design: Netlist | ReductionPlan) -> dict[int, int]:
    """Histogram ``ED -> count`` over all operand pairs, keys ascending."""
    counts = Counter(signed_error_table(design).ravel().tolist())
    return dict(sorted(counts.items()))
