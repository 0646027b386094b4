import itertools

import pytest
from hypothesis import given, strategies as st

from flipguard.codes import (
    BinaryCode,
    BitWord,
    CODE_IDS,
    build_code,
    code_shape,
    construct_hamming,
    extend_code,
    hamming_distance,
    linear_subcode,
    min_distance,
    pairwise_min_distance,
    shorten_code,
    shorten_words,
)
from reference_tables import EXPECTED_SHAPES, HAMMING7_WORDS


def words(*strings):
    return [BitWord.from_string(s) for s in strings]


def word_set(code):
    return {str(w) for w in code.codewords}


class TestBitWord:
    def test_hex_renders_msb_first(self):
        assert BitWord.from_string("1111111").hex() == "7F"
        assert BitWord.from_string("000011111").hex() == "01F"
        assert BitWord(0, 9).hex() == "000"

    def test_str_round_trip(self):
        w = BitWord.from_string("1001011")
        assert str(w) == "1001011"
        assert w.weight == 4

    def test_coord_is_one_indexed_from_msb(self):
        w = BitWord.from_string("1000110")
        assert [w.coord(i) for i in range(1, 8)] == [1, 0, 0, 0, 1, 1, 0]

    def test_flip(self):
        w = BitWord.from_string("0000")
        assert str(w.flip(1)) == "1000"
        assert str(w.flip(4)) == "0001"
        assert w.flip(2).flip(2) == w

    def test_length_bounds(self):
        with pytest.raises(ValueError):
            BitWord(0, 0)
        with pytest.raises(ValueError):
            BitWord(0, 65)
        BitWord(2**64 - 1, 64)

    def test_bits_must_fit(self):
        with pytest.raises(ValueError):
            BitWord(8, 3)
        with pytest.raises(ValueError):
            BitWord(-1, 3)

    def test_xor_length_mismatch(self):
        with pytest.raises(ValueError):
            BitWord(0, 3) ^ BitWord(0, 4)

    def test_coord_out_of_range(self):
        w = BitWord(0, 4)
        for i in (0, 5):
            with pytest.raises(ValueError):
                w.coord(i)
            with pytest.raises(ValueError):
                w.flip(i)


class TestHammingDistance:
    def test_examples(self):
        u, v = words("01", "10")
        assert hamming_distance(u, v) == 2
        u, v = words("010101", "101010")
        assert hamming_distance(u, v) == 6
        assert hamming_distance(u, u) == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            hamming_distance(BitWord(0, 3), BitWord(0, 4))

    @given(st.integers(0, 2**9 - 1), st.integers(0, 2**9 - 1))
    def test_equals_weight_of_xor(self, a, b):
        u, v = BitWord(a, 9), BitWord(b, 9)
        assert hamming_distance(u, v) == (u ^ v).weight
        assert hamming_distance(u, v) == hamming_distance(v, u)

    @given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
    def test_triangle_inequality(self, a, b, c):
        u, v, w = BitWord(a, 8), BitWord(b, 8), BitWord(c, 8)
        assert hamming_distance(u, w) <= hamming_distance(u, v) + hamming_distance(v, w)


class TestConstructHamming:
    def test_r3_is_the_canonical_16_word_code(self):
        assert word_set(construct_hamming(3)) == HAMMING7_WORDS

    def test_r2_code(self):
        assert word_set(construct_hamming(2)) == {"000", "111"}

    def test_r2_is_the_only_such_code(self):
        # every 1-dimensional length-3 code with distance 3
        found = [g for g in range(1, 8) if bin(g).count("1") >= 3]
        assert found == [0b111]

    def test_r4_shape(self):
        c = construct_hamming(4)
        assert (c.n, c.size, c.min_distance) == (15, 2048, 3)

    def test_r_out_of_range(self):
        for r in (0, 1, 7):
            with pytest.raises(ValueError):
                construct_hamming(r)

    @pytest.mark.parametrize("r", [2, 3])
    def test_radius_one_balls_tile_the_space(self, r):
        c = construct_hamming(r)
        n = c.n
        seen = set()
        for w in c.codewords:
            ball = {w.bits} | {w.flip(i).bits for i in range(1, n + 1)}
            assert len(ball) == n + 1
            assert not (ball & seen)
            seen |= ball
        assert len(seen) == 1 << n

    def test_large_r_refuses_enumeration(self):
        c = construct_hamming(5)
        assert (c.n, c.dimension) == (31, 26)
        with pytest.raises(ValueError):
            c.codewords
        assert c.generator[0] in c
        assert BitWord(1 << 30, 31) not in c  # weight 1, below distance 3


class TestExtendCode:
    def test_extended_hamming_shape(self):
        c = extend_code(construct_hamming(3))
        assert (c.n, c.size, c.min_distance) == (8, 16, 4)

    def test_every_codeword_has_even_weight(self):
        c = extend_code(construct_hamming(3))
        assert all(w.weight % 2 == 0 for w in c.codewords)

    def test_repetition_code_example(self):
        c = BinaryCode(3, (BitWord.from_string("111"),))
        assert word_set(extend_code(c)) == {"0000", "1111"}

    def test_extension_matches_wordwise_parity(self):
        base = construct_hamming(3)
        ext = extend_code(base)
        expect = {((w.weight & 1) << 7) | w.bits for w in base.codewords}
        assert {w.bits for w in ext.codewords} == expect


class TestShorten:
    # the 4-bit set from the shortening walkthrough is deliberately non-linear
    EXAMPLE = ("0000", "1001", "1110")

    @pytest.mark.parametrize("pos,expect", [
        ([1], {"000"}),
        ([2], {"000", "101"}),
        ([3], {"000", "101"}),
        ([4], {"000", "111"}),
    ])
    def test_single_position_examples(self, pos, expect):
        got = shorten_words(words(*self.EXAMPLE), pos)
        assert {str(w) for w in got} == expect

    def test_positions_refer_to_original_coordinates(self):
        got = shorten_words(words(*self.EXAMPLE), [2, 4])
        # keep words with 0 at both original coordinates 2 and 4
        assert {str(w) for w in got} == {"00"}

    def test_position_validation(self):
        ws = words(*self.EXAMPLE)
        with pytest.raises(ValueError):
            shorten_words(ws, [1, 1])
        with pytest.raises(ValueError):
            shorten_words(ws, [0])
        with pytest.raises(ValueError):
            shorten_words(ws, [5])
        with pytest.raises(ValueError):
            shorten_words(ws, [1, 2, 3, 4])

    def test_shortened_extended_hamming(self):
        c = shorten_code(extend_code(construct_hamming(4)), range(10, 17))
        assert (c.n, c.size, c.min_distance) == (9, 16, 4)

    @given(st.sets(st.integers(1, 7), min_size=1, max_size=3))
    def test_distance_never_decreases(self, positions):
        base = construct_hamming(3)
        c = shorten_code(base, sorted(positions))
        assert c.min_distance >= base.min_distance
        assert c.size >= base.size >> len(positions)
        assert c.n == base.n - len(positions)

    def test_shortening_everything_away_fails(self):
        c = BinaryCode(3, (BitWord.from_string("111"),))
        with pytest.raises(ValueError):
            shorten_code(c, [1])  # only the zero word survives


class TestMinDistance:
    def test_two_word_code(self):
        c = BinaryCode(2, (BitWord.from_string("11"),))
        assert min_distance(c) == 2

    def test_nonlinear_pairwise_example(self):
        assert pairwise_min_distance(words("0000", "1111", "1110")) == 1

    def test_pairwise_needs_two_words(self):
        with pytest.raises(ValueError):
            pairwise_min_distance(words("0000"))

    @pytest.mark.parametrize("code_id", CODE_IDS)
    def test_pairwise_oracle_agrees_on_linear_codes(self, code_id):
        c = build_code(code_id)
        assert min_distance(c) == pairwise_min_distance(c.codewords)


class TestLinearSubcode:
    def parent(self):
        return shorten_code(extend_code(construct_hamming(4)), [15, 16])

    def test_deterministic_per_seed(self):
        p = self.parent()
        a = linear_subcode(p, 8, seed=7)
        b = linear_subcode(p, 8, seed=7)
        assert a.generator == b.generator
        assert linear_subcode(p, 8, seed=8).generator != a.generator

    def test_subcode_lives_inside_parent(self):
        p = self.parent()
        sub = linear_subcode(p, 8, seed=3)
        parent_bits = {w.bits for w in p.codewords}
        assert {w.bits for w in sub.codewords} <= parent_bits
        assert sub.size == 256
        assert sub.min_distance >= p.min_distance

    def test_dimension_validation(self):
        p = self.parent()
        for dim in (0, 10):
            with pytest.raises(ValueError):
                linear_subcode(p, dim)

    def test_full_dimension_returns_whole_code(self):
        c = construct_hamming(3)
        sub = linear_subcode(c, 4, seed=1)
        assert {w.bits for w in sub.codewords} == {w.bits for w in c.codewords}


class TestRegistry:
    @pytest.mark.parametrize("code_id,b,n,size,dist", EXPECTED_SHAPES)
    def test_frozen_shapes(self, code_id, b, n, size, dist):
        c = build_code(code_id)
        assert (c.n, c.size, c.min_distance) == (n, size, dist)
        assert code_shape(code_id) == (b, n)

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            build_code("C10_5")
        with pytest.raises(ValueError):
            code_shape("")

    def test_builds_are_cached(self):
        assert build_code("C7_3") is build_code("C7_3")


class TestBinaryCodeValidation:
    def test_dependent_rows_rejected(self):
        with pytest.raises(ValueError):
            BinaryCode(3, tuple(words("110", "011", "101")))

    def test_row_length_mismatch(self):
        with pytest.raises(ValueError):
            BinaryCode(3, tuple(words("110", "0110")))

    def test_empty_generator(self):
        with pytest.raises(ValueError):
            BinaryCode(3, ())

    @given(st.lists(st.integers(1, 255), min_size=1, max_size=6, unique=True))
    def test_span_is_closed_under_xor(self, rows):
        try:
            c = BinaryCode(8, tuple(BitWord(r, 8) for r in rows))
        except ValueError:
            return  # dependent draw
        bits = {w.bits for w in c.codewords}
        assert 0 in bits
        assert all(a ^ b in bits for a in bits for b in bits)
        assert len(bits) == 1 << c.dimension
