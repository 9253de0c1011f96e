"""Compare the compiled propagation kernel with the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--steps N] [--traj M] [--repeat R]

Both backends evolve the same random Hamiltonian sequence, with and without
per-trajectory noise, and the script reports the best wall time of each and
the largest difference in the final states.
"""

import argparse
import time

import numpy as np

from dressmag import _fallback

try:
    from dressmag import _kernels
except ImportError:  # extension not built
    _kernels = None


def random_problem(n_steps, n_traj, n_hams=16, noisy=False, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n_hams, 4, 4)) + 1j * rng.normal(size=(n_hams, 4, 4))
    hams = 1e3 * (a + a.conj().transpose(0, 2, 1))
    index = rng.integers(0, n_hams, n_steps).astype(np.int64)
    widths = rng.uniform(1e-6, 5e-6, n_steps)
    psi0 = np.zeros((n_traj, 4), complex)
    psi0[:, 0] = 1.0
    if noisy:
        delta = 500.0 * rng.normal(size=(n_traj, n_steps))
        eps = np.zeros_like(delta)
    else:
        delta = eps = np.zeros((0, 0))
    record = np.array([n_steps // 2, n_steps], dtype=np.int64)
    return hams, index, widths, psi0, delta, eps, record


def best_time(fn, args, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20000)
    ap.add_argument("--traj", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"{'case':<24}{'numpy [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max |diff|':>12}")
    for label, noisy, n_traj in (("noiseless, 1 traj", False, 1), ("noiseless, batch", False, args.traj),
                                 ("noisy, batch", True, args.traj)):
        prob = random_problem(args.steps, n_traj, noisy=noisy)
        t_np, (fin_np, _) = best_time(_fallback.evolve, prob, args.repeat)
        if _kernels is None:
            print(f"{label:<24}{t_np:>12.4f}{'n/a':>14}{'':>10}{'':>12}")
            continue
        t_c, (fin_c, _) = best_time(_kernels.evolve, prob, args.repeat)
        diff = np.max(np.abs(fin_np - fin_c))
        print(f"{label:<24}{t_np:>12.4f}{t_c:>14.4f}{t_np / t_c:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
