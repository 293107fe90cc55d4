"""Benchmark the keccak-f[1600] backends: numba kernel vs numpy fallback.

The digest is the hot kernel of a simulation run (two hashes per ballot:
commit and reveal verification), so this measures both raw permutation
throughput and the end-to-end commitment path.

Run directly:

    python benchmarks/bench_keccak.py

Set DEEPTHOUGHT_NO_NUMBA=1 to confirm the package itself runs on the
fallback; this script always measures both code paths explicitly.
"""

import time

import numpy as np

from deepthought import keccak
from deepthought.engine import compute_digest


def _bench_digest(permute, payload_sizes, repeats=2000):
    rows = []
    for size in payload_sizes:
        payload = np.random.default_rng(size).bytes(size)
        # warmup (also triggers JIT compilation for the numba path)
        keccak._sponge(payload, keccak._DOMAIN_KECCAK, permute)
        started = time.perf_counter()
        for _ in range(repeats):
            keccak._sponge(payload, keccak._DOMAIN_KECCAK, permute)
        elapsed = time.perf_counter() - started
        rows.append((size, repeats / elapsed, elapsed / repeats * 1e6))
    return rows


def _bench_commitments(repeats=5000):
    rng = np.random.default_rng(0)
    salts = [rng.bytes(16) for _ in range(repeats)]
    compute_digest(True, 0.8, salts[0])  # warmup
    started = time.perf_counter()
    for salt in salts:
        compute_digest(True, 0.8, salt)
    return repeats / (time.perf_counter() - started)


def main():
    sizes = [0, 32, 136, 512, 4096]
    print(f"selected backend: {keccak.backend_name()}")
    print()
    print(f"{'payload':>8}  {'numba hashes/s':>15}  {'numpy hashes/s':>15}  {'speedup':>8}")
    numba_rows = None
    if keccak._permute_njit is not None:
        numba_rows = _bench_digest(keccak._permute_njit, sizes)
    numpy_rows = _bench_digest(keccak._permute_numpy, sizes)
    for i, size in enumerate(sizes):
        np_rate = numpy_rows[i][1]
        if numba_rows is not None:
            nb_rate = numba_rows[i][1]
            print(f"{size:>8}  {nb_rate:>15.0f}  {np_rate:>15.0f}  {nb_rate / np_rate:>7.1f}x")
        else:
            print(f"{size:>8}  {'n/a':>15}  {np_rate:>15.0f}  {'':>8}")
    print()
    print(f"ballot commitment digests/s (selected backend): {_bench_commitments():.0f}")


if __name__ == "__main__":
    main()
