"""Compiled vs pure-Python kernels: agreement and speed.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Both
backends are imported directly, so the environment switch is not needed.
"""
import argparse
import time

from gcasimir import _purecore
from gcasimir.constants import HBAR_C, K_B

try:
    from gcasimir import _ccore
except ImportError:  # extension not built
    _ccore = None

T = 294.0
A = 250.0
TOL = 1e-9
# graphene on fused silica at the first Matsubara frequency, Drude Au at it too
ZETA = 2.0 * 3.141592653589793 * K_B * T
EPS_SIO2 = 1.0 + 1.098 / (1.0 + (ZETA / 13.38) ** 2) + 1.703 / (1.0 + (ZETA / 0.1237) ** 2)
EPS_AU = 1.0 + 81.0 / (ZETA * (ZETA + 0.035))
PLATE = (1, EPS_SIO2, EPS_SIO2 * (ZETA / HBAR_C) ** 2, 0.29, 0.24, 1.0 / 300.0, 0, 0.0)
SPHERE = (0, EPS_AU, (ZETA * ZETA + 81.0 * ZETA / (ZETA + 0.035)) / HBAR_C ** 2, 0.0, 0.0, 0.0, 0, 0.0)

CASES = {
    "thermal_exact": lambda m: m.thermal_exact(0.01, ZETA / HBAR_C, T, 0.29, 0.24, 1.0 / 300.0, TOL),
    "zero_t": lambda m: m.zero_t(0.01, ZETA / HBAR_C, 0.29, 0.24, 1.0 / 300.0),
    "l0": lambda m: m.l0(0.01, T, 0.29, 0.24, 1.0 / 300.0, TOL),
    "term_integrals": lambda m: m.term_integrals(ZETA, A, T, PLATE, SPHERE, TOL),
}


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def rel(x, y):
    x, y = (x,) if isinstance(x, float) else x, (y,) if isinstance(y, float) else y
    return max(abs(a - b) / max(abs(b), 1e-300) for a, b in zip(x[:2], y[:2]))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if _ccore is None:
        print("compiled extension not available; nothing to compare")
        return 1
    print(f"{'kernel':16s} {'cython [ms]':>12s} {'python [ms]':>12s} {'speed-up':>9s} {'max rel diff':>13s}")
    for name, fn in CASES.items():
        tc, oc = timeit(lambda: fn(_ccore), args.repeat)
        tp, op = timeit(lambda: fn(_purecore), args.repeat)
        print(f"{name:16s} {1e3 * tc:12.4f} {1e3 * tp:12.4f} {tp / tc:9.1f} {rel(oc, op):13.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
