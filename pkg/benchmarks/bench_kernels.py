"""Time the compiled kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on identical inputs under both backends; the table reports
the best wall time of N repeats and the speedup. Outputs are compared so a
fast but wrong extension shows up here too.
"""
import argparse
import math
import timeit

import numpy as np

from bangbang._backend import available_backends
from bangbang.params import ProblemParams
from bangbang.synthesis import synthesize


def _cases():
    rng = np.random.default_rng(7)
    r = 0.85
    batch = np.ascontiguousarray(rng.uniform(0.1, 6.0, size=(20000, 3)))
    single = np.ascontiguousarray(batch[0])
    prefix = np.array([0.70353871531828882, math.pi])
    params = ProblemParams.from_ratio(r)
    report = synthesize(params)
    omegas = np.array([seg.amplitude for seg in report.sequence], dtype=float)
    durations = np.array([seg.duration for seg in report.sequence], dtype=float)
    dt = report.total_duration / 1e4
    return {
        "schedule_z_batch (20000 x 3)": lambda k: k.schedule_z_batch(batch, 1.0, r),
        "schedule_objective": lambda k: k.schedule_objective(single, 1.0, r, 1e-6, 1e3),
        "closing_on_duration": lambda k: k.closing_on_duration(prefix, 1.0, r),
        "rk4_bloch (1e4 steps)": lambda k: k.rk4_bloch(omegas, durations, 1.0, dt, (0.0, 0.0, 1.0)),
    }


def _flat(out):
    parts = out if isinstance(out, tuple) else (out,)
    return np.concatenate([np.ravel(np.asarray(p, dtype=float)) for p in parts])


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is available")
    names = sorted(backends, key=lambda n: n != "python")
    print(f"{'kernel':<30}" + "".join(f"{n + ' [ms]':>16}" for n in names) + f"{'speedup':>10}{'max diff':>12}")
    for label, fn in _cases().items():
        times, outs = {}, {}
        for name in names:
            mod = backends[name]
            outs[name] = _flat(fn(mod))
            number = 1 if name == "python" else 20
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat))
            times[name] = 1e3 * best / number
        row = f"{label:<30}" + "".join(f"{times[n]:>16.3f}" for n in names)
        if "compiled" in times:
            diff = float(np.max(np.abs(outs["python"] - outs["compiled"])))
            row += f"{times['python'] / times['compiled']:>9.1f}x{diff:>12.1e}"
        print(row)


if __name__ == "__main__":
    main()
