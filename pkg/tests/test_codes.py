import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldpcqubo.codes import (
    AlistError,
    NoCodeError,
    ParityCheckMatrix,
    codebook,
    derive_generator,
    encode,
    gf2_rank,
    load_code,
    parse_alist,
    parse_dense,
    resolve_code,
    syndrome,
    syndromes,
    to_alist,
)

from .conftest import all_words

SMALL_ALIST = """3 2
2 2
1 2 1
2 2
1 0
1 2
2 0
1 2
2 3
"""


def test_parse_small_alist():
    h = parse_alist(SMALL_ALIST)
    assert (h.rows, h.cols) == (2, 3)
    assert h.entries == frozenset({(0, 0), (0, 1), (1, 1), (1, 2)})
    np.testing.assert_array_equal(h.dense, [[1, 1, 0], [0, 1, 1]])


def test_alist_without_padding_is_accepted():
    text = SMALL_ALIST.replace("1 0\n1 2\n2 0\n", "1\n1 2\n2\n")
    assert parse_alist(text).entries == parse_alist(SMALL_ALIST).entries


@pytest.mark.parametrize(
    "text, lineno",
    [
        (SMALL_ALIST.replace("2 3\n", "2 4\n"), 9),  # variable n+1
        (SMALL_ALIST.replace("2 0\n", "3 0\n"), 7),  # check m+1
        (SMALL_ALIST.replace("1 2\n2 3\n", "1 3\n2 3\n"), None),  # row/column disagreement
        (SMALL_ALIST.replace("1 2 1\n", "1 2\n"), 3),
        ("3 2\n2 2\n", None),
        (SMALL_ALIST.replace("1 0\n", "0 1\n"), 5),
        (SMALL_ALIST.replace("3 2\n", "3 x\n"), 1),
    ],
)
def test_parse_alist_errors(text, lineno):
    with pytest.raises(AlistError) as exc:
        parse_alist(text)
    if lineno is not None:
        assert exc.value.lineno == lineno
        assert f"line {lineno}" in str(exc.value)


@pytest.mark.parametrize("name, shape", [("ldpc_32_16", (16, 32)), ("ldpc_96_48", (48, 96)), ("toy_8_4", (4, 8))])
def test_bundled_codes_match_their_degree_lists(name, shape):
    path = resolve_code(name)
    h = load_code(path)
    assert (h.rows, h.cols) == shape
    lines = [ln.split() for ln in path.read_text().splitlines() if ln.strip()]
    col_deg = [int(t) for t in lines[2]]
    row_deg = [int(t) for t in lines[3]]
    np.testing.assert_array_equal(h.variable_degrees, col_deg)
    np.testing.assert_array_equal(h.check_degrees, row_deg)
    assert sum(col_deg) == sum(row_deg) == len(h.entries)
    assert gf2_rank(h.dense) == h.rows


def test_alist_round_trip_bundled(h32):
    assert parse_alist(to_alist(h32)).entries == h32.entries


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(2, 9), st.data())
def test_alist_round_trip_random(m, n, data):
    dense = np.array(data.draw(st.lists(st.lists(st.integers(0, 1), min_size=n, max_size=n), min_size=m, max_size=m)))
    h = ParityCheckMatrix.from_dense(dense)
    assert parse_alist(to_alist(h)).entries == h.entries


def test_parse_dense_formats():
    a = parse_dense("1 1 0\n0 1 1\n")
    b = parse_dense("# comment\n110\n011\n")
    assert a.entries == b.entries == parse_alist(SMALL_ALIST).entries
    with pytest.raises(AlistError):
        parse_dense("1 2\n")


def test_load_code_by_suffix(tmp_path):
    (tmp_path / "h.alist").write_text(SMALL_ALIST)
    (tmp_path / "h.txt").write_text("110\n011\n")
    assert load_code(tmp_path / "h.alist").entries == load_code(tmp_path / "h.txt").entries


def test_resolve_unknown_code():
    with pytest.raises(FileNotFoundError):
        resolve_code("no_such_code")


def test_generator_single_check_pair():
    g = derive_generator(ParityCheckMatrix.from_dense([[1, 1]]))
    np.testing.assert_array_equal(g.rows, [[1, 1]])


def test_generator_two_checks_matches_enumeration():
    h = ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    words = all_words(3)
    null = words[(words.astype(int) @ h.dense.T % 2 == 0).all(axis=1)]
    null = null[null.any(axis=1)]
    np.testing.assert_array_equal(null, [[1, 1, 1]])
    np.testing.assert_array_equal(derive_generator(h).rows, null)


def test_generator_rows_satisfy_checks(h32, g32):
    assert g32.rows.shape == (16, 32)
    assert not (g32.rows.astype(int) @ h32.dense.T.astype(int) % 2).any()
    assert gf2_rank(g32.rows) == h32.cols - gf2_rank(h32.dense)


def test_generator_rank_deficient_warns():
    h = ParityCheckMatrix.from_dense([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0]])
    with pytest.warns(UserWarning):
        g = derive_generator(h)
    assert g.k == 2
    assert not (g.rows.astype(int) @ h.dense.T % 2).any()


def test_generator_full_rank_raises():
    with pytest.raises(NoCodeError):
        derive_generator(ParityCheckMatrix.from_dense(np.eye(3, dtype=np.uint8)))


def test_encode_linearity_basics(g32):
    np.testing.assert_array_equal(encode(np.zeros(16, dtype=np.uint8), g32), np.zeros(32))
    for j in range(16):
        e = np.zeros(16, dtype=np.uint8)
        e[j] = 1
        np.testing.assert_array_equal(encode(e, g32), g32.rows[j])


def test_encode_random_messages_have_zero_syndrome(h32, g32):
    rng = np.random.default_rng(11)
    msgs = rng.integers(0, 2, (1000, 16), dtype=np.uint8)
    words = np.array([encode(m, g32) for m in msgs])
    assert not syndromes(words, h32).any()


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=16, max_size=16), st.lists(st.integers(0, 1), min_size=16, max_size=16))
def test_encode_is_gf2_linear(g32, h32, m1, m2):
    m1, m2 = np.array(m1, dtype=np.uint8), np.array(m2, dtype=np.uint8)
    np.testing.assert_array_equal(encode(m1 ^ m2, g32), encode(m1, g32) ^ encode(m2, g32))
    assert not syndrome(encode(m1, g32), h32).any()


def test_encode_length_check(g32):
    with pytest.raises(ValueError):
        encode(np.zeros(15, dtype=np.uint8), g32)


def test_syndrome_hand_computed():
    h = ParityCheckMatrix.from_dense([[1, 1, 0], [0, 1, 1]])
    np.testing.assert_array_equal(syndrome([1, 0, 1], h), [1, 1])
    np.testing.assert_array_equal(syndrome([0, 0, 0], h), [0, 0])


def test_codebook_matches_brute_force(toy):
    from .conftest import brute_codewords

    book = codebook(derive_generator(toy))
    ref = brute_codewords(toy)
    assert {tuple(w) for w in book} == {tuple(w) for w in ref}
    assert len(book) == 16


def test_toy_code_minimum_distance(toy):
    book = codebook(derive_generator(toy))
    assert book[book.any(axis=1)].sum(axis=1).min() == 3


def test_matrix_views(h32):
    assert h32.n == 32
    assert 0 < h32.density < 0.5
    ptr, var = h32.edges
    assert ptr[-1] == var.size == len(h32.entries)
    with pytest.raises(ValueError):
        h32.dense[0, 0] = 1
