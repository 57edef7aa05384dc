"""Exact and inexact compressor primitives.

A multicolumn compressor anchored at column ``k`` takes ``m_high`` bits of
weight ``2**(k+1)`` (the *b* bits), ``m_low`` bits of weight ``2**k`` (the
*a* bits) and optional lateral input carries of weight ``2**k``.  It returns
``Sum`` at ``2**k``, ``Carry`` at ``2**(k+1)`` and, when present, output
carries ("couts").  For the multicolumn kinds the single cout sits at
``2**(k+2)``; for the exact single-column 4:2 and 6:2 compressors the couts
sit at ``2**(k+1)``.

Every gate-level recipe in this module is written with the ``^ & |``
operators only, so the same code evaluates plain ints, numpy boolean arrays
(one lane per input pattern) and symbolic netlist signals.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence


class InvalidInputError(ValueError):
    """Raised when bit vectors do not fit a compressor's arity."""


class CompressorKind(str, enum.Enum):
    HALF_ADDER = "HALF_ADDER"
    FULL_ADDER = "FULL_ADDER"
    EXACT_4_2 = "EXACT_4_2"
    EXACT_6_2 = "EXACT_6_2"
    C_3_3_2 = "C_3_3_2"
    C_3_3_2_NOCIN = "C_3_3_2_NOCIN"
    C_3_2_2_NOCIN = "C_3_2_2_NOCIN"
    C_2_3_2 = "C_2_3_2"
    C_2_2_2 = "C_2_2_2"
    C_1_3_2 = "C_1_3_2"
    C_1_2_2 = "C_1_2_2"
    C_1_2_2_NOCIN = "C_1_2_2_NOCIN"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class CompressorSpec:
    m_high: int
    m_low: int
    carries_in: int
    carries_out: int
    cout_shift: int
    is_exact: bool
    label: str

    @property
    def has_cin(self) -> bool:
        return self.carries_in > 0

    @property
    def has_cout(self) -> bool:
        return self.carries_out > 0

    @property
    def columns(self) -> int:
        return 2 if self.m_high else 1

    @property
    def inputs(self) -> int:
        """Total input count M (lateral carries included)."""
        return self.m_high + self.m_low + self.carries_in

    @property
    def max_input_value(self) -> int:
        return 2 * self.m_high + self.m_low + self.carries_in


K = CompressorKind

SPECS: dict[CompressorKind, CompressorSpec] = {
    K.HALF_ADDER: CompressorSpec(0, 2, 0, 0, 0, True, "HA"),
    K.FULL_ADDER: CompressorSpec(0, 3, 0, 0, 0, True, "FA"),
    K.EXACT_4_2: CompressorSpec(0, 4, 1, 1, 1, True, "4:2"),
    K.EXACT_6_2: CompressorSpec(0, 6, 3, 3, 1, True, "6:2"),
    K.C_3_3_2: CompressorSpec(3, 3, 1, 1, 2, False, "3,3:2"),
    K.C_3_3_2_NOCIN: CompressorSpec(3, 3, 0, 1, 2, False, "3,3:2 (without Cin)"),
    K.C_3_2_2_NOCIN: CompressorSpec(3, 2, 0, 1, 2, False, "3,2:2 (without Cin)"),
    K.C_2_3_2: CompressorSpec(2, 3, 1, 1, 2, False, "2,3:2"),
    K.C_2_2_2: CompressorSpec(2, 2, 1, 1, 2, False, "2,2:2"),
    K.C_1_3_2: CompressorSpec(1, 3, 1, 0, 2, False, "1,3:2"),
    K.C_1_2_2: CompressorSpec(1, 2, 1, 0, 2, False, "1,2:2"),
    K.C_1_2_2_NOCIN: CompressorSpec(1, 2, 0, 0, 2, False, "1,2:2 (without Cin)"),
}

INEXACT_KINDS = tuple(k for k, s in SPECS.items() if not s.is_exact)


def spec(kind: CompressorKind | str) -> CompressorSpec:
    return SPECS[CompressorKind(kind)]


# --- gate-level building blocks (operand-type agnostic) ---------------------

def half_add(x: Any, y: Any) -> tuple[Any, Any]:
    """Return ``(carry, sum)``."""
    return x & y, x ^ y


def full_add(x: Any, y: Any, z: Any) -> tuple[Any, Any]:
    """Return ``(carry, sum)``."""
    t = x ^ y
    return (x & y) | (z & t), t ^ z


def compress_column(bits: Sequence[Any]) -> tuple[Any, Any]:
    """Exactly add up to three equally weighted bits into ``(carry, sum)``."""
    if len(bits) == 3:
        return full_add(*bits)
    if len(bits) == 2:
        return half_add(*bits)
    if len(bits) == 1:
        return 0, bits[0]
    if not bits:
        return 0, 0
    raise InvalidInputError(f"cannot compress {len(bits)} bits with one adder")


def _as_tuple(cin: Any) -> tuple:
    if cin is None:
        return ()
    if isinstance(cin, (list, tuple)):
        return tuple(cin)
    return (cin,)


def _check_arity(kind: CompressorKind, b: Sequence, a: Sequence, cin: tuple, exact_fit: bool) -> CompressorSpec:
    sp = SPECS[kind]
    if exact_fit:
        # an omitted carry-in reads as 0
        ok = len(b) == sp.m_high and len(a) == sp.m_low and len(cin) in {0, sp.carries_in}
    else:
        ok = len(b) <= sp.m_high and len(a) <= sp.m_low and len(cin) <= sp.carries_in
    if not ok:
        raise InvalidInputError(
            f"{kind}: got {len(b)} b-bits, {len(a)} a-bits, {len(cin)} carries; "
            f"expects {sp.m_high}/{sp.m_low}/{sp.carries_in}"
        )
    return sp


def realize(kind: CompressorKind | str, b: Sequence[Any], a: Sequence[Any], cin: Any = None) -> tuple[Any, Any, tuple]:
    """Gate-level realization of ``kind``; returns ``(sum, carry, couts)``.

    Missing inputs (shorter ``b``/``a`` than the kind's arity, or no ``cin``)
    are tied to zero, which is how zero-loaded compressors behave.

    Inexact kinds: the a-bits go through a full/half adder (or pass), that
    sum is half-added with ``cin`` to give ``Sum``; the b-bits go through
    their own full/half adder.  ``Carry`` ORs the b-sum with both low-side
    carries and ``Cout`` is the b-side carry.
    """
    kind = CompressorKind(kind)
    cins = _as_tuple(cin)
    sp = _check_arity(kind, b, a, cins, exact_fit=False)
    a = list(a)
    if sp.is_exact:
        x = a + [0] * (sp.m_low - len(a))
        c = list(cins) + [0] * (sp.carries_in - len(cins))
        if kind is K.HALF_ADDER:
            carry, s = half_add(*x)
            return s, carry, ()
        if kind is K.FULL_ADDER:
            carry, s = full_add(*x)
            return s, carry, ()
        if kind is K.EXACT_4_2:
            co, s1 = full_add(x[0], x[1], x[2])
            carry, s = full_add(s1, x[3], c[0])
            return s, carry, (co,)
        # EXACT_6_2: two input FAs, then two FAs absorbing the three carries in
        co1, s1 = full_add(x[0], x[1], x[2])
        co2, s2 = full_add(x[3], x[4], x[5])
        co3, s3 = full_add(s1, s2, c[0])
        carry, s = full_add(s3, c[1], c[2])
        return s, carry, (co1, co2, co3)

    c_a, s_a = compress_column(a)
    if cins:
        c2, s = half_add(s_a, cins[0])
    else:
        c2, s = 0, s_a
    c_b, s_b = compress_column(list(b))
    carry = s_b | c_a | c2
    couts = (c_b,) if sp.has_cout else ()
    return s, carry, couts


# --- scalar evaluation -----------------------------------------------------

@dataclass(frozen=True)
class CompressorOutput:
    sum: int
    carry: int
    couts: tuple[int, ...] = ()
    cout_shift: int = 2

    @property
    def cout(self) -> int | None:
        return self.couts[0] if self.couts else None

    @property
    def value(self) -> int:
        """Output value relative to ``2**k``."""
        return self.sum + 2 * self.carry + sum(self.couts) * (1 << self.cout_shift)


def _bits(xs: Sequence[int], what: str) -> list[int]:
    out = [int(x) for x in xs]
    if any(x not in (0, 1) for x in out):
        raise InvalidInputError(f"{what} must be bits, got {list(xs)}")
    return out


def input_value(b_bits: Sequence[int], a_bits: Sequence[int], cin: Any = None,
                kind: CompressorKind | str | None = None) -> int:
    """Weighted input sum relative to ``2**k``: ``2*sum(b) + sum(a) + cin``."""
    b = _bits(b_bits, "b_bits")
    a = _bits(a_bits, "a_bits")
    c = _bits(_as_tuple(cin), "cin")
    if kind is not None:
        _check_arity(CompressorKind(kind), b, a, tuple(c), exact_fit=True)
    return 2 * sum(b) + sum(a) + sum(c)


def evaluate(kind: CompressorKind | str, b_bits: Sequence[int], a_bits: Sequence[int],
             cin: Any = None) -> CompressorOutput:
    kind = CompressorKind(kind)
    b = _bits(b_bits, "b_bits")
    a = _bits(a_bits, "a_bits")
    c = _bits(_as_tuple(cin), "cin")
    _check_arity(kind, b, a, tuple(c), exact_fit=True)
    s, carry, couts = realize(kind, b, a, c or None)
    return CompressorOutput(int(s), int(carry), tuple(int(x) for x in couts), SPECS[kind].cout_shift)


def error_distance(kind: CompressorKind | str, b_bits: Sequence[int], a_bits: Sequence[int],
                   cin: Any = None) -> int:
    """Signed error, approximate output minus exact input value (<= 0 here)."""
    out = evaluate(kind, b_bits, a_bits, cin)
    return out.value - input_value(b_bits, a_bits, cin)


def input_patterns(kind: CompressorKind | str):
    """Yield every ``(b, a, cin)`` combination in binary counting order."""
    sp = spec(kind)
    n = sp.m_high + sp.m_low + sp.carries_in
    for bits in itertools.product((0, 1), repeat=n):
        b = bits[: sp.m_high]
        a = bits[sp.m_high: sp.m_high + sp.m_low]
        c = bits[sp.m_high + sp.m_low:]
        yield b, a, (c if len(c) > 1 else (c[0] if c else None))


# --- exhaustive error analytics --------------------------------------------

@dataclass(frozen=True)
class CompressorErrorStats:
    kind: CompressorKind
    med_c: Fraction
    ned_c: Fraction
    error_rate: Fraction
    ed_histogram: dict[int, Fraction]
    max_input_value: int


def compressor_error_stats(kind: CompressorKind | str) -> CompressorErrorStats:
    kind = CompressorKind(kind)
    counts: dict[int, int] = {}
    total = 0
    for b, a, c in input_patterns(kind):
        ed = error_distance(kind, b, a, c)
        counts[ed] = counts.get(ed, 0) + 1
        total += 1
    med = Fraction(sum(abs(ed) * n for ed, n in counts.items()), total)
    wrong = sum(n for ed, n in counts.items() if ed)
    hist = {ed: Fraction(n, total) for ed, n in sorted(counts.items())}
    max_val = SPECS[kind].max_input_value
    return CompressorErrorStats(kind, med, med / max_val, Fraction(wrong, total), hist, max_val)


@dataclass(frozen=True)
class FigureOfMerit:
    fom1: float
    fom2: float


def figures_of_merit(kind: CompressorKind | str, delay: float, power: float,
                     outputs: int = 2) -> FigureOfMerit:
    """FOM1 = delay / (ln M - ln N) and FOM2 = delay*power / (1 - NED_C).

    M counts every input including lateral carries; N is the two output
    digits.  Natural log is used; the base only rescales FOM1.
    """
    if delay <= 0 or power <= 0:
        raise ValueError("delay and power must be positive")
    m = spec(kind).inputs
    if m <= outputs:
        raise ValueError(f"FOM1 undefined for M={m} <= N={outputs}")
    fom1 = delay / (math.log(m) - math.log(outputs))
    ned = compressor_error_stats(kind).ned_c
    fom2 = delay * power / float(1 - ned) if ned < 1 else math.inf
    return FigureOfMerit(fom1, fom2)


def smallest_inexact_kind(n_high: int, n_low: int, with_cin: bool) -> CompressorKind:
    """Cheapest inexact kind able to host the given input counts."""
    fits = [k for k in INEXACT_KINDS
            if SPECS[k].m_high >= max(n_high, 1) and SPECS[k].m_low >= n_low
            and (SPECS[k].has_cin or not with_cin)]
    if not fits:
        raise InvalidInputError(f"no inexact compressor hosts {n_high} high, {n_low} low bits")
    return min(fits, key=lambda k: (SPECS[k].inputs, SPECS[k].m_high, SPECS[k].has_cin, k.value))
