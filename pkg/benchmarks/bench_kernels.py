"""Timing comparison of the compiled and pure mask kernels."""

from __future__ import annotations

import time

from cantordyn import _maskcore_py, kernels


def best_of(fn, *args, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    n = 8
    print(f"selected backend: {kernels.BACKEND}")
    t_active = best_of(kernels.min_image_table, n)
    print(f"min_image_table({n}) [{kernels.BACKEND}]: {t_active * 1000:8.1f} ms")
    t_pure = best_of(_maskcore_py.min_image_table, n)
    print(f"min_image_table({n}) [python reference]: {t_pure * 1000:8.1f} ms")
    if kernels.BACKEND == "compiled" and t_active > 0:
        print(f"speedup: {t_pure / t_active:.1f}x")
    if kernels.min_image_table(n) != _maskcore_py.min_image_table(n):
        raise SystemExit("backends disagree on the full table")
    print("backends agree on the full table")


if __name__ == "__main__":
    main()
