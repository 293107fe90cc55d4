"""Keccak-256 hashing (original Keccak padding, as used by Ethereum).

This is *not* NIST SHA3-256: the domain byte is 0x01 instead of 0x06, so
digests match Ethereum's ``keccak256`` opcode and the usual published test
vectors (empty string -> c5d24601...).

The 24-round keccak-f[1600] permutation is the hot kernel: every ballot in a
simulation run is committed and verified through it. Two interchangeable
backends are provided:

* a numba ``@njit`` kernel (default when numba is importable), and
* a vectorized pure-numpy fallback.

Set ``DEEPTHOUGHT_NO_NUMBA=1`` to force the numpy path. Both backends are
exercised against each other and against published vectors in the test
suite; ``benchmarks/bench_keccak.py`` compares their throughput.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "DEEPTHOUGHT_NO_NUMBA"

_RATE = 136  # bytes per sponge block at capacity 512
_DOMAIN_KECCAK = 0x01  # original Keccak pad10*1 domain byte
_DOMAIN_SHA3 = 0x06  # NIST SHA-3 domain byte, used only for cross-checks

_ROUND_CONSTANTS = np.array(
    [
        0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
        0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
        0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
        0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
        0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
        0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
        0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
        0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
    ],
    dtype=np.uint64,
)

# Rotation offset of lane (x, y) at flat index x + 5*y.
_ROTATION = np.array(
    [
        0, 1, 62, 28, 27,
        36, 44, 6, 55, 20,
        3, 10, 43, 25, 39,
        41, 45, 15, 21, 8,
        18, 2, 61, 56, 14,
    ],
    dtype=np.uint64,
)

# rho/pi sends lane (x, y) to (y, 2x+3y mod 5); destination flat indices.
_PI_DEST = np.array(
    [(i // 5) + 5 * ((2 * (i % 5) + 3 * (i // 5)) % 5) for i in range(25)],
    dtype=np.int64,
)


def _permute_numpy(lanes: np.ndarray) -> np.ndarray:
    """keccak-f[1600] over a flat array of 25 uint64 lanes (numpy backend)."""
    rot = _ROTATION
    # (x >> 0) == x, so the zero-offset lane survives the shifted form
    inv = (np.uint64(64) - rot) % np.uint64(64)
    for rc in _ROUND_CONSTANTS:
        grid = lanes.reshape(5, 5)  # grid[y, x]
        c = np.bitwise_xor.reduce(grid, axis=0)
        c_next = np.roll(c, -1)
        d = np.roll(c, 1) ^ ((c_next << np.uint64(1)) | (c_next >> np.uint64(63)))
        grid ^= d[None, :]
        rotated = (lanes << rot) | (lanes >> inv)
        b = np.empty(25, dtype=np.uint64)
        b[_PI_DEST] = rotated
        bg = b.reshape(5, 5)
        grid = bg ^ (~np.roll(bg, -1, axis=1) & np.roll(bg, -2, axis=1))
        lanes = grid.reshape(25)
        lanes[0] ^= rc
    return lanes


try:  # pragma: no cover - exercised via backend selection
    if os.environ.get(_ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}:
        raise ImportError("numba disabled by environment flag")
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:
    njit = None
    _HAVE_NUMBA = False


def _build_numba_permute():
    rc_consts = _ROUND_CONSTANTS
    rot = _ROTATION
    pi_dest = _PI_DEST

    @njit(cache=True)
    def _permute(lanes):
        c = np.empty(5, dtype=np.uint64)
        d = np.empty(5, dtype=np.uint64)
        b = np.empty(25, dtype=np.uint64)
        one = np.uint64(1)
        sixty_three = np.uint64(63)
        sixty_four = np.uint64(64)
        for rnd in range(24):
            for x in range(5):
                c[x] = lanes[x] ^ lanes[x + 5] ^ lanes[x + 10] ^ lanes[x + 15] ^ lanes[x + 20]
            for x in range(5):
                t = c[(x + 1) % 5]
                d[x] = c[(x + 4) % 5] ^ ((t << one) | (t >> sixty_three))
            for i in range(25):
                lanes[i] ^= d[i % 5]
            for i in range(25):
                r = rot[i]
                v = lanes[i]
                if r != np.uint64(0):
                    v = (v << r) | (v >> (sixty_four - r))
                b[pi_dest[i]] = v
            for y in range(5):
                row = 5 * y
                for x in range(5):
                    lanes[row + x] = b[row + x] ^ (
                        ~b[row + (x + 1) % 5] & b[row + (x + 2) % 5]
                    )
            lanes[0] ^= rc_consts[rnd]
        return lanes

    return _permute


if _HAVE_NUMBA:
    _permute_njit = _build_numba_permute()
else:
    _permute_njit = None


def backend_name() -> str:
    """Name of the permutation backend in use: ``numba`` or ``numpy``."""
    return "numba" if _permute_njit is not None else "numpy"


def _permute(lanes: np.ndarray) -> np.ndarray:
    if _permute_njit is not None:
        return _permute_njit(lanes)
    return _permute_numpy(lanes)


def _pad(data: bytes, domain: int) -> bytes:
    """pad10*1 with the given domain byte, to a multiple of the sponge rate."""
    padded = bytearray(data)
    padded += b"\x00" * (_RATE - (len(data) % _RATE))
    padded[len(data)] ^= domain
    padded[-1] ^= 0x80
    return bytes(padded)


def _sponge(data: bytes, domain: int, permute) -> bytes:
    lanes = np.zeros(25, dtype=np.uint64)
    blocks = np.frombuffer(_pad(data, domain), dtype="<u8").reshape(-1, 17)
    for block in blocks:
        lanes[:17] ^= block
        lanes = permute(lanes)
    return lanes[:4].astype("<u8").tobytes()


def keccak256(data: bytes) -> bytes:
    """32-byte Keccak-256 digest of ``data``."""
    return _sponge(data, _DOMAIN_KECCAK, _permute)
