"""Digest primitive: published vectors, backend agreement, binding/hiding."""

import hashlib

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deepthought import keccak
from deepthought.keccak import keccak256

# Published Keccak-256 vectors (pre-NIST padding, as used on Ethereum).
KNOWN_VECTORS = [
    (b"", "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470"),
    (b"abc", "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45"),
    (
        b"The quick brown fox jumps over the lazy dog",
        "4d741b6f1eb29cb2a9b9911c82f56fa8d73b04959d3d9d222895df6c0b28aa15",
    ),
    (b"testing", "5f16f4c7f149ac4f9510d9cf8cf384038ad348b3bcdc01915f95de12df9d1b02"),
]


@pytest.mark.parametrize("message,expected", KNOWN_VECTORS)
def test_known_vectors(message, expected):
    assert keccak256(message).hex() == expected


def test_digest_is_32_bytes_and_pure():
    d1 = keccak256(b"\x00\x01\x02")
    d2 = keccak256(b"\x00\x01\x02")
    assert len(d1) == 32
    assert d1 == d2


@pytest.mark.parametrize("size", [0, 1, 16, 135, 136, 137, 271, 272, 273, 1000])
def test_backends_agree_across_block_boundaries(size):
    rng = np.random.default_rng(size)
    message = rng.bytes(size)
    via_numpy = keccak._sponge(message, keccak._DOMAIN_KECCAK, keccak._permute_numpy)
    assert keccak256(message) == via_numpy


@pytest.mark.parametrize("size", [0, 1, 135, 136, 137, 500, 2000])
def test_sha3_domain_matches_hashlib(size):
    # Same sponge and permutation as SHA3-256 apart from the domain byte, so
    # hashlib provides an independent oracle for every input length.
    rng = np.random.default_rng(1000 + size)
    message = rng.bytes(size)
    mine = keccak._sponge(message, keccak._DOMAIN_SHA3, keccak._permute)
    assert mine == hashlib.sha3_256(message).digest()


def test_padding_rule():
    # pad10*1: single 0x81 byte when one byte of room remains, full extra
    # block when the message fills the rate exactly.
    assert keccak._pad(b"x" * 135, 0x01)[-1] == 0x81
    assert len(keccak._pad(b"x" * 136, 0x01)) == 272
    tail = keccak._pad(b"x" * 136, 0x01)[136:]
    assert tail[0] == 0x01 and tail[-1] == 0x80
    assert all(b == 0 for b in tail[1:-1])


@settings(max_examples=50, deadline=None)
@given(st.binary(max_size=300), st.integers(min_value=0, max_value=299))
def test_flipping_one_byte_changes_digest(message, position):
    if not message:
        return
    position %= len(message)
    mutated = bytearray(message)
    mutated[position] ^= 0x5A
    assert keccak256(bytes(mutated)) != keccak256(message)


@settings(max_examples=30, deadline=None)
@given(st.binary(max_size=400))
def test_backend_agreement_property(message):
    via_numpy = keccak._sponge(message, keccak._DOMAIN_KECCAK, keccak._permute_numpy)
    assert keccak256(message) == via_numpy


def test_backend_name_reports_selection():
    assert keccak.backend_name() in ("numba", "numpy")
