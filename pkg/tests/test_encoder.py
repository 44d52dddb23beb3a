"""Reference encoder vs the independent oracle implementation."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bimnav.errors import EmptyText
from bimnav.index import EMBEDDING_DIM, ReferenceEncoder, tokenize

from oracles import ENCODER_DIM, encode_text, fnv1a_64


def test_dimensions_agree():
    assert EMBEDDING_DIM == ENCODER_DIM == 768


@pytest.mark.parametrize(
    "text",
    [
        "coffee",
        "coffee shop",
        "Coffee Shop. cafe and cafeteria corner, serves drinks and snacks",
        "Men's Toilet",
        "a b c d e f g",
        "  mixed   CASE   with    123  numbers ",
        "unicode caffè über straße",
    ],
)
def test_matches_oracle(encoder, text):
    got = encoder.encode(text)
    want = np.asarray(encode_text(text))
    assert got.shape == (EMBEDDING_DIM,)
    np.testing.assert_array_equal(got, want)


@given(st.text(min_size=0, max_size=80))
def test_matches_oracle_on_arbitrary_text(text):
    encoder = ReferenceEncoder()
    if not tokenize(text):
        with pytest.raises(EmptyText):
            encoder.encode(text)
        return
    np.testing.assert_array_equal(encoder.encode(text), np.asarray(encode_text(text)))


@given(st.text(alphabet="abc xyz0", min_size=1, max_size=40).filter(lambda t: tokenize(t)))
def test_unit_norm_and_determinism(text):
    encoder = ReferenceEncoder()
    vec = encoder.encode(text)
    assert np.linalg.norm(vec) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_array_equal(vec, encoder.encode(text))


def test_token_order_is_irrelevant(encoder):
    np.testing.assert_array_equal(
        encoder.encode("coffee shop corner"), encoder.encode("corner shop coffee")
    )


def test_empty_text_rejected(encoder):
    for text in ("", "   ", "!!!", "—"):
        with pytest.raises(EmptyText):
            encoder.encode(text)


def test_zero_cancellation_escape(encoder):
    """'b' and 'ga' hash to the same bucket with opposite signs; the sum
    cancels and the escape pins the first token's bucket instead."""
    hb, hga = fnv1a_64(b"b"), fnv1a_64(b"ga")
    assert hb % 768 == hga % 768 == 421
    assert (hb >> 63) != (hga >> 63)

    vec = encoder.encode("b ga")
    want = np.zeros(768)
    want[421] = 1.0
    np.testing.assert_array_equal(vec, want)
    np.testing.assert_array_equal(vec, np.asarray(encode_text("b ga")))


def test_encode_batch(encoder):
    batch = encoder.encode_batch(["coffee", "toilet"])
    np.testing.assert_array_equal(batch[0], encoder.encode("coffee"))
    np.testing.assert_array_equal(batch[1], encoder.encode("toilet"))
