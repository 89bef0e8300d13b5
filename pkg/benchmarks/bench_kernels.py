"""Compare the compiled and NumPy kernel backends.

Two measurements are reported. The micro section times the three hot
kernels directly against their NumPy reference implementations on
product-shaped inputs. The end-to-end section runs whole seeded trials
in subprocesses, once per backend, because the backend is chosen at
import time via the VLCRF_PURE_PYTHON environment variable.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 500 --trials 40
"""

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from vlcrf import _ratecore_py

try:
    from vlcrf import _ratecore
except ImportError:
    _ratecore = None


def _bench(func, repeats: int) -> float:
    """Best-of-five loop time for one call, in microseconds."""
    times = timeit.repeat(func, number=repeats, repeat=5)
    return min(times) / repeats * 1e6


def micro_benchmarks(repeats: int) -> None:
    rng = np.random.default_rng(7)
    hv = np.abs(rng.normal(2e-5, 1e-5, size=(12, 16)))
    hr = (rng.standard_normal((6, 9))
          + 1j * rng.standard_normal((6, 9))) * 1e-4
    tall = np.abs(rng.normal(2e-5, 1e-5, size=(20, 16)))
    pos_wide = np.arange(12, dtype=np.int64)
    pos_rf = np.arange(6, dtype=np.int64)
    pos_tall = np.arange(20, dtype=np.int64)
    wv = np.ascontiguousarray(_ratecore_py.zf_solve(hv, pos_wide))
    wr = np.ascontiguousarray(_ratecore_py.zf_solve(hr, pos_rf))
    gv = _ratecore_py.gain_table(hv, wv, 0.01, 140.45)
    gr = _ratecore_py.gain_table(hr, wr, 0.01, 5.0)
    gv30 = np.abs(rng.normal(1e-3, 1e-3, size=(30, 30)))
    gr30 = np.abs(rng.normal(1e-3, 1e-3, size=(30, 30)))
    b30 = (rng.random(30) < 0.5).astype(np.uint8)

    cases = [
        ("zf_solve real 12x16",
         lambda: _ratecore_py.zf_solve(hv, pos_wide),
         (lambda: _ratecore.zf_solve_real(hv, pos_wide))
         if _ratecore else None),
        ("zf_solve complex 6x9",
         lambda: _ratecore_py.zf_solve(hr, pos_rf),
         (lambda: _ratecore.zf_solve_complex(hr, pos_rf))
         if _ratecore else None),
        ("zf_solve real 20x16 tall",
         lambda: _ratecore_py.zf_solve(tall, pos_tall),
         (lambda: _ratecore.zf_solve_real(tall, pos_tall))
         if _ratecore else None),
        ("gain_table real 12x16",
         lambda: _ratecore_py.gain_table(hv, wv, 0.01, 140.45),
         (lambda: _ratecore.gain_table_real(hv, wv, 0.01, 140.45))
         if _ratecore else None),
        ("gain_table complex 6x9",
         lambda: _ratecore_py.gain_table(hr, wr, 0.01, 5.0),
         (lambda: _ratecore.gain_table_complex(hr, wr, 0.01, 5.0))
         if _ratecore else None),
        ("per_user_rates 30 users",
         lambda: _ratecore_py.per_user_rates(
             gv30, gr30, b30, 3.6e-14, 1.5e-12, 2.0e7, 1.5e7),
         (lambda: _ratecore.per_user_rates(
             gv30, gr30, b30, 3.6e-14, 1.5e-12, 2.0e7, 1.5e7))
         if _ratecore else None),
    ]
    del gv, gr  # shapes documented by the gain_table cases above

    print(f"kernel micro-benchmarks ({repeats} calls per timing, best of 5)")
    header = f"  {'kernel':<28}{'numpy us':>10}{'compiled us':>13}{'speedup':>9}"
    print(header)
    for name, numpy_call, compiled_call in cases:
        t_numpy = _bench(numpy_call, repeats)
        if compiled_call is None:
            print(f"  {name:<28}{t_numpy:>10.1f}{'n/a':>13}{'n/a':>9}")
            continue
        t_compiled = _bench(compiled_call, repeats)
        print(f"  {name:<28}{t_numpy:>10.1f}{t_compiled:>13.1f}"
              f"{t_numpy / t_compiled:>8.1f}x")


_TRIAL_SCRIPT = """
import json, time
from vlcrf import kernels
from vlcrf.harness import ExperimentConfig, run_trial

spec = json.loads({spec!r})
out = {{"backend": kernels.BACKEND}}
for solver in ("iterative", "gibbs"):
    cfg = ExperimentConfig(n_users=spec["users"], solver=solver, seed=1)
    run_trial(cfg, 0)  # warm caches before timing
    start = time.perf_counter()
    for t in range(spec["trials"]):
        run_trial(cfg, t)
    out[solver] = time.perf_counter() - start
print(json.dumps(out))
"""


def _run_trials(users: int, trials: int, pure: bool) -> dict:
    env = dict(os.environ)
    env.pop("VLCRF_PURE_PYTHON", None)
    if pure:
        env["VLCRF_PURE_PYTHON"] = "1"
    spec = json.dumps({"users": users, "trials": trials})
    script = _TRIAL_SCRIPT.format(spec=spec)
    proc = subprocess.run(
        [sys.executable, "-c", script],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(proc.stdout.strip().splitlines()[-1])


def end_to_end(users: int, trials: int) -> None:
    print(f"\nend-to-end: {trials} trials, {users} users, per solver")
    pure = _run_trials(users, trials, pure=True)
    assert pure["backend"] == "numpy"
    fast = _run_trials(users, trials, pure=False)
    print(f"  {'solver':<12}{'numpy s':>10}{fast['backend'] + ' s':>12}"
          f"{'speedup':>9}")
    for solver in ("iterative", "gibbs"):
        ratio = pure[solver] / fast[solver]
        print(f"  {solver:<12}{pure[solver]:>10.3f}{fast[solver]:>12.3f}"
              f"{ratio:>8.1f}x")
    if fast["backend"] == "numpy":
        print("  note: compiled extension unavailable, both runs used numpy")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="benchmark the compiled kernels against the "
        "NumPy fallback"
    )
    parser.add_argument("--repeats", type=int, default=200,
                        help="calls per micro-benchmark timing")
    parser.add_argument("--trials", type=int, default=20,
                        help="trials per end-to-end run")
    parser.add_argument("--users", type=int, default=20,
                        help="user count for the end-to-end run")
    parser.add_argument("--skip-end-to-end", action="store_true",
                        help="only run the kernel micro-benchmarks")
    args = parser.parse_args(argv)
    if _ratecore is None:
        print("compiled extension not importable; timing numpy only\n")
    micro_benchmarks(args.repeats)
    if not args.skip_end_to_end:
        end_to_end(args.users, args.trials)
    return 0


if __name__ == "__main__":
    sys.exit(main())
