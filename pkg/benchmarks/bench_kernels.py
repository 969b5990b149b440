"""Compare the compiled and pure-python simulation backends.

Times circuit execution, expectation gradients, and shot-based estimation
on representative ansatz sizes, switching backends via aqgan.backend.use().

Run:  python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from aqgan import backend
from aqgan.ansatz import DiscriminatorSpec, GeneratorSpec, build_discriminator, build_generator
from aqgan.gradients import CircuitExpectation, parameter_shift_gradient
from aqgan.shots import NoiseModel, estimate_expectation_shots


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name, repeats):
    backend.use(name)
    rng = np.random.default_rng(0)
    rows = []

    for n in (3, 6, 10):
        circ = build_generator(GeneratorSpec(n, 3))
        params = rng.uniform(-np.pi, np.pi, circ.n_parameters)
        rows.append((f"run generator n={n}", timeit(lambda: circ.run(params), repeats)))

    n = 3
    gen = build_generator(GeneratorSpec(n, 3), prefix="G.")
    disc = build_discriminator(DiscriminatorSpec(n, 2), prefix="D.")
    composed = gen.compose(disc)
    params = rng.uniform(-np.pi, np.pi, composed.n_parameters)
    f = CircuitExpectation(composed)
    rows.append((
        f"parameter-shift gradient n={n} ({composed.n_parameters} params)",
        timeit(lambda: parameter_shift_gradient(f, params), repeats),
    ))

    noise = NoiseModel(0.001, 0.01, 0.001)
    shot_rng = np.random.default_rng(1)
    rows.append((
        f"10k-shot noisy estimate n={n}",
        timeit(lambda: estimate_expectation_shots(
            composed, params, 10_000, noise, shot_rng), repeats),
    ))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = ["python"]
    if backend.HAS_COMPILED:
        backends.insert(0, "compiled")
    else:
        print("compiled backend unavailable; timing pure python only")

    results = {b: bench_backend(b, args.repeats) for b in backends}
    backend.use("compiled" if backend.HAS_COMPILED else "python")

    labels = [label for label, _ in results[backends[0]]]
    width = max(len(label) for label in labels)
    header = f"{'benchmark':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for i, label in enumerate(labels):
        cells = [results[b][i][1] for b in backends]
        line = f"{label:<{width}}  " + "  ".join(f"{c * 1e3:>10.3f}ms" for c in cells)
        if len(cells) == 2:
            line += f"  {cells[1] / cells[0]:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
