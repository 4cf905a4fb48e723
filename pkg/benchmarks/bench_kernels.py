"""Benchmark the numba kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
The backend under test is forced per measurement through the
HERITAGE_FORGE_NUMBA environment variable, the same switch users have.
"""

import os
import time

import numpy as np

from heritage_forge import _kernels as k


def _timeit(fn, *args, repeats=7):
    fn(*args)  # warmup (includes JIT on the numba path)
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def _with_backend(flag, fn, *args):
    previous = os.environ.get("HERITAGE_FORGE_NUMBA")
    os.environ["HERITAGE_FORGE_NUMBA"] = flag
    try:
        return _timeit(fn, *args)
    finally:
        if previous is None:
            del os.environ["HERITAGE_FORGE_NUMBA"]
        else:
            os.environ["HERITAGE_FORGE_NUMBA"] = previous


def bench_box_downsample():
    rng = np.random.default_rng(0)
    print("box_downsample (panorama-sized sources -> 1024 preview)")
    for h, w in [(1024, 2048), (2048, 4096), (4096, 8192)]:
        img = rng.uniform(0, 255, size=(h, w, 3))
        out_w = 1024
        out_h = max(1, round(h * out_w / w))
        t_nb = _with_backend("1", k.box_downsample, img, out_h, out_w)
        t_np = _with_backend("0", k.box_downsample, img, out_h, out_w)
        print(
            f"  {h}x{w}x3 -> {out_h}x{out_w}: numba {t_nb * 1e3:8.2f} ms"
            f"   numpy {t_np * 1e3:8.2f} ms   ratio {t_np / t_nb:5.2f}x"
        )


def bench_mercator():
    rng = np.random.default_rng(1)
    print("mercator_forward_many + mercator_inverse_many")
    for n in [10_000, 100_000, 1_000_000]:
        lon = rng.uniform(-180, 180, n)
        lat = rng.uniform(-85, 85, n)

        def roundtrip(lon=lon, lat=lat):
            x, y = k.mercator_forward_many(lon, lat)
            k.mercator_inverse_many(x, y)

        t_nb = _with_backend("1", roundtrip)
        t_np = _with_backend("0", roundtrip)
        print(
            f"  n={n:>9,}: numba {t_nb * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms"
            f"   ratio {t_np / t_nb:5.2f}x"
        )


if __name__ == "__main__":
    print(f"numba available: {k._HAVE_NUMBA}")
    bench_box_downsample()
    bench_mercator()
