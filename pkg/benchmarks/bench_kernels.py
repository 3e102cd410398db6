"""Numba vs numpy backends on the two hot kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

RK4 runs the Fig. 2(a) curve (a=0.4, chi=pi/2, v=5) to t=10 at dt_max;
expm exponentiates the 16x16 Liouvillian at t=1 many times. The first
numba call (JIT compile, or a cache load) is timed separately and excluded
from the per-call figure. Results of the two backends are compared too.
"""
import argparse
import math
import time

import numpy as np

from qubit_dyn import _accel
from qubit_dyn.core import ModelParams, WernerFamilyInit, to_density_matrix
from qubit_dyn.liouvillian import build_superoperator, lindblad_generator
from qubit_dyn.propagators import IntegratorConfig


def workloads():
    params = ModelParams.decay(v=5.0)
    rho0 = to_density_matrix(WernerFamilyInit(0.4, math.pi / 2))
    G, jumps = lindblad_generator(params)
    h, steps = IntegratorConfig.for_params(params, 10.0, sample_every=10).grid()
    L = build_superoperator(params).entries
    return {
        f"rk4 ({steps[-1]} steps)": lambda: _accel.rk4_lindblad(rho0, G, jumps, h, steps),
        "expm x200 (16x16)": lambda: [_accel.expm(L * (1 + k * 1e-3)) for k in range(200)][-1],
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAS_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare")

    print(f"{'kernel':<22s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s} "
          f"{'first numba call [s]':>21s} {'max |diff|':>11s}")
    for name, fn in workloads().items():
        _accel.use_numba(False)
        t_np, out_np = best_of(fn, args.repeat)
        _accel.use_numba(True)
        t0 = time.perf_counter()
        fn()
        first = time.perf_counter() - t0
        t_nb, out_nb = best_of(fn, args.repeat)
        diff = float(np.abs(np.asarray(out_np) - np.asarray(out_nb)).max())
        print(f"{name:<22s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x {first:21.3f} {diff:11.2e}")


if __name__ == "__main__":
    main()
