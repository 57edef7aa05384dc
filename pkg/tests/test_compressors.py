import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from approxmul.compressors import (
    INEXACT_KINDS,
    SPECS,
    CompressorKind as K,
    InvalidInputError,
    compressor_error_stats,
    error_distance,
    evaluate,
    figures_of_merit,
    input_patterns,
    input_value,
    realize,
    smallest_inexact_kind,
)

EXACT_KINDS = [k for k in K if SPECS[k].is_exact]

# (sum_b, sum_a, cin) -> (cout, carry, sum, ed, rows out of 128), transcribed row by row
TABLE_3_3_2 = {
    (0, 0, 0): (0, 0, 0, 0, 1), (0, 0, 1): (0, 0, 1, 0, 1), (0, 1, 0): (0, 0, 1, 0, 3),
    (0, 1, 1): (0, 1, 0, 0, 3), (0, 2, 0): (0, 1, 0, 0, 3), (1, 0, 0): (0, 1, 0, 0, 3),
    (0, 2, 1): (0, 1, 1, 0, 3), (0, 3, 0): (0, 1, 1, 0, 1), (1, 0, 1): (0, 1, 1, 0, 3),
    (1, 1, 0): (0, 1, 1, 0, 9), (0, 3, 1): (0, 1, 0, -2, 1), (1, 1, 1): (0, 1, 0, -2, 9),
    (1, 2, 0): (0, 1, 0, -2, 9), (2, 0, 0): (1, 0, 0, 0, 3), (1, 2, 1): (0, 1, 1, -2, 9),
    (1, 3, 0): (0, 1, 1, -2, 3), (2, 0, 1): (1, 0, 1, 0, 3), (2, 1, 0): (1, 0, 1, 0, 9),
    (1, 3, 1): (0, 1, 0, -4, 3), (2, 1, 1): (1, 1, 0, 0, 9), (2, 2, 0): (1, 1, 0, 0, 9),
    (3, 0, 0): (1, 1, 0, 0, 1), (2, 2, 1): (1, 1, 1, 0, 9), (2, 3, 0): (1, 1, 1, 0, 3),
    (3, 0, 1): (1, 1, 1, 0, 1), (3, 1, 0): (1, 1, 1, 0, 3), (2, 3, 1): (1, 1, 0, -2, 3),
    (3, 1, 1): (1, 1, 0, -2, 3), (3, 2, 0): (1, 1, 0, -2, 3), (3, 2, 1): (1, 1, 1, -2, 3),
    (3, 3, 0): (1, 1, 1, -2, 1), (3, 3, 1): (1, 1, 0, -4, 1),
}

TABLE_6_NED = {
    K.C_3_3_2: Fraction(13, 160),
    K.C_3_3_2_NOCIN: Fraction(1, 18),
    K.C_3_2_2_NOCIN: Fraction(1, 32),
    K.C_2_3_2: Fraction(13, 128),
    K.C_2_2_2: Fraction(1, 14),
    K.C_1_3_2: Fraction(13, 96),
    K.C_1_2_2: Fraction(1, 10),
    K.C_1_2_2_NOCIN: Fraction(1, 16),
}
# five-decimal references; the no-cin 3,3:2 entry is the repeating 0.0555... = 1/18
PRINTED_NED = {
    K.C_3_3_2: 0.08125, K.C_3_3_2_NOCIN: 0.05556, K.C_3_2_2_NOCIN: 0.03125, K.C_2_3_2: 0.10156,
    K.C_2_2_2: 0.07143, K.C_1_3_2: 0.13542, K.C_1_2_2: 0.1, K.C_1_2_2_NOCIN: 0.0625,
}


def random_inputs(kind):
    sp = SPECS[kind]
    bits = st.lists(st.integers(0, 1), min_size=sp.m_high, max_size=sp.m_high)
    lows = st.lists(st.integers(0, 1), min_size=sp.m_low, max_size=sp.m_low)
    cins = st.lists(st.integers(0, 1), min_size=sp.carries_in, max_size=sp.carries_in)
    return st.tuples(bits, lows, cins)


@st.composite
def kind_and_inputs(draw, kinds=tuple(K)):
    kind = draw(st.sampled_from(kinds))
    b, a, c = draw(random_inputs(kind))
    return kind, b, a, (c if len(c) > 1 else (c[0] if c else None))


class TestSpecs:
    def test_every_kind_has_one_spec(self):
        assert set(SPECS) == set(K)

    def test_max_input_value_of_3_3_2(self):
        assert SPECS[K.C_3_3_2].max_input_value == 10

    @pytest.mark.parametrize("kind", list(K))
    def test_column_span(self, kind):
        sp = SPECS[kind]
        assert 0 <= sp.m_high <= 6 and 0 <= sp.m_low <= 6
        assert (sp.columns == 2) == (sp.m_high > 0)
        assert sp.max_input_value == 2 * sp.m_high + sp.m_low + sp.carries_in


class TestInputValue:
    def test_all_ones(self):
        assert input_value((1, 1, 1), (1, 1, 1), 1) == 10

    def test_zero(self):
        assert input_value((0, 0, 0), (0, 0, 0), 0) == 0

    def test_mixed(self):
        assert input_value((1, 0, 0), (1, 1, 0), 1) == 5

    def test_arity_checked_against_kind(self):
        with pytest.raises(InvalidInputError):
            input_value((1, 1), (1, 1, 1), 1, kind=K.C_3_3_2)


class TestEvaluate:
    def test_table_row_sum_6(self):
        out = evaluate(K.C_3_3_2, (1, 0, 0), (1, 1, 1), 1)
        assert (out.cout, out.carry, out.sum, out.value) == (0, 1, 0, 2)
        assert error_distance(K.C_3_3_2, (1, 0, 0), (1, 1, 1), 1) == -4

    def test_table_row_sum_7(self):
        out = evaluate(K.C_3_3_2, (1, 1, 0), (1, 1, 0), 1)
        assert (out.cout, out.carry, out.sum, out.value) == (1, 1, 1, 7)

    def test_2_2_2_zero(self):
        out = evaluate(K.C_2_2_2, (0, 0), (0, 0), 0)
        assert (out.cout, out.carry, out.sum) == (0, 0, 0)

    def test_2_2_2_collision(self):
        assert evaluate(K.C_2_2_2, (1, 0), (1, 1), 0).value == 2
        assert error_distance(K.C_2_2_2, (1, 0), (1, 1), 0) == -2

    def test_1_2_2_nocin_single_error(self):
        eds = {(b, a): error_distance(K.C_1_2_2_NOCIN, b, a) for b, a, _ in input_patterns(K.C_1_2_2_NOCIN)}
        assert eds[((1,), (1, 1))] == -2
        assert sum(1 for v in eds.values() if v) == 1

    def test_table_sum_4_example(self):
        assert error_distance(K.C_3_3_2, (1, 0, 0), (1, 1, 0), 0) == -2

    def test_arity_mismatch(self):
        with pytest.raises(InvalidInputError):
            evaluate(K.C_3_3_2, (1, 1), (1, 1, 1), 0)
        with pytest.raises(InvalidInputError):
            evaluate(K.FULL_ADDER, (), (1, 1), None)

    def test_non_bit_rejected(self):
        with pytest.raises(InvalidInputError):
            evaluate(K.HALF_ADDER, (), (2, 0))

    def test_omitted_cin_reads_zero(self):
        assert evaluate(K.C_3_3_2, (1, 1, 1), (1, 1, 1)) == evaluate(K.C_3_3_2, (1, 1, 1), (1, 1, 1), 0)


def test_table1_conformance():
    seen = {}
    for b, a, c in input_patterns(K.C_3_3_2):
        key = (sum(b), sum(a), c)
        out = evaluate(K.C_3_3_2, b, a, c)
        row = (out.cout, out.carry, out.sum, error_distance(K.C_3_3_2, b, a, c))
        assert seen.setdefault(key, row) == row
        seen[key + ("n",)] = seen.get(key + ("n",), 0) + 1
    for key, (co, ca, su, ed, n) in TABLE_3_3_2.items():
        assert seen[key] == (co, ca, su, ed)
        assert seen[key + ("n",)] == n
    assert sum(v[4] for v in TABLE_3_3_2.values()) == 128


def test_48_of_128_rows_wrong():
    wrong = sum(1 for b, a, c in input_patterns(K.C_3_3_2) if error_distance(K.C_3_3_2, b, a, c))
    assert wrong == 48


class TestErrorStats:
    @pytest.mark.parametrize("kind", list(TABLE_6_NED))
    def test_ned_matches_table(self, kind):
        st_ = compressor_error_stats(kind)
        assert st_.ned_c == TABLE_6_NED[kind]
        assert abs(float(st_.ned_c) - PRINTED_NED[kind]) <= 5e-5

    def test_3_3_2_med(self):
        assert compressor_error_stats(K.C_3_3_2).med_c == Fraction(13, 16)

    def test_2_2_2_ned(self):
        assert compressor_error_stats(K.C_2_2_2).ned_c == Fraction(1, 14)

    @pytest.mark.parametrize("kind", EXACT_KINDS)
    def test_exact_components(self, kind):
        st_ = compressor_error_stats(kind)
        assert st_.med_c == 0 and st_.error_rate == 0

    @pytest.mark.parametrize("kind", list(K))
    def test_histogram_is_distribution(self, kind):
        st_ = compressor_error_stats(kind)
        assert sum(st_.ed_histogram.values()) == 1
        assert st_.ned_c == st_.med_c / st_.max_input_value


class TestProperties:
    @given(kind_and_inputs(), st.randoms())
    def test_permutation_symmetry(self, case, rnd):
        kind, b, a, c = case
        b2, a2 = list(b), list(a)
        rnd.shuffle(b2)
        rnd.shuffle(a2)
        x, y = evaluate(kind, b, a, c), evaluate(kind, b2, a2, c)
        if SPECS[kind].is_exact:
            # 4:2 and 6:2 may trade carry for cout (same weight); the value is fixed
            assert x.value == y.value
        else:
            assert x == y

    @given(kind_and_inputs(INEXACT_KINDS))
    def test_under_approximation(self, case):
        kind, b, a, c = case
        ed = error_distance(kind, b, a, c)
        assert ed in (0, -2, -4)

    @given(kind_and_inputs(tuple(k for k in INEXACT_KINDS if SPECS[k].has_cin and SPECS[k].has_cout)))
    def test_cout_ignores_cin(self, case):
        kind, b, a, _ = case
        assert evaluate(kind, b, a, 0).cout == evaluate(kind, b, a, 1).cout

    @given(kind_and_inputs(tuple(EXACT_KINDS)))
    def test_exact_kinds_are_exact(self, case):
        kind, b, a, c = case
        assert evaluate(kind, b, a, c).value == input_value(b, a, c)


class TestRealize:
    def test_zero_loaded_equals_smaller_kind(self):
        for b, a, c in input_patterns(K.C_2_2_2):
            big = realize(K.C_3_3_2, b, a, c)
            assert big == realize(K.C_2_2_2, b, a, c)

    def test_too_many_inputs(self):
        with pytest.raises(InvalidInputError):
            realize(K.C_1_2_2, (1, 1), (1,), 0)


class TestFiguresOfMerit:
    def test_fom1_counts_cin(self):
        f = figures_of_merit(K.C_3_3_2, 1.0, 1.0)
        assert f.fom1 == pytest.approx(1 / (math.log(7) - math.log(2)))

    def test_exact_fom2(self):
        assert figures_of_merit(K.FULL_ADDER, 3.0, 2.0).fom2 == pytest.approx(6.0)

    def test_fom2_grows_with_ned(self):
        kinds = sorted(INEXACT_KINDS, key=lambda k: compressor_error_stats(k).ned_c)
        vals = [figures_of_merit(k, 1.0, 1.0).fom2 for k in kinds]
        assert vals == sorted(vals)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            figures_of_merit(K.HALF_ADDER, 1.0, 1.0)
        with pytest.raises(ValueError):
            figures_of_merit(K.C_3_3_2, 0.0, 1.0)


def test_smallest_inexact_kind():
    assert smallest_inexact_kind(3, 3, True) is K.C_3_3_2
    assert smallest_inexact_kind(1, 2, False) is K.C_1_2_2_NOCIN
    assert smallest_inexact_kind(0, 1, True) is K.C_1_2_2
    with pytest.raises(ValueError):
        smallest_inexact_kind(4, 1, False)


def test_input_patterns_count():
    for kind in K:
        sp = SPECS[kind]
        assert sum(1 for _ in input_patterns(kind)) == 2 ** (sp.m_high + sp.m_low + sp.carries_in)
        assert len(set(itertools.islice(input_patterns(kind), 1000))) == min(1000, 2 ** (sp.m_high + sp.m_low + sp.carries_in))
