#!/usr/bin/env python3
"""Compare the numba and numpy kernel backends.

Times one edge quantile table (the DP inner loop) for each backend and a full
DP run per backend in a fresh interpreter, since the backend is chosen at
import time from RISKPATH_DISABLE_NUMBA.

    python benchmarks/bench_backends.py [--samples N] [--buckets D] [--repeat R]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from riskpath.kernels import _numpy, get_backend
from riskpath.sampling import AgentSpec

DP_SCRIPT = """
import json, time
from riskpath.benchgen import make_diamond_sequence
from riskpath.bucketed import RiskConfig, bucketed_var
g = make_diamond_sequence({k})
cfg = RiskConfig(buckets={d}, samples={n}, seed=0)
bucketed_var(make_diamond_sequence(1), RiskConfig(buckets=2, samples=10))  # warm up
best = float("inf")
for _ in range({repeat}):
    r = bucketed_var(g, cfg)
    best = min(best, r.seconds)
print(json.dumps({{"backend": r.diagnostics["backend"], "seconds": best, "estimate": r.estimate}}))
"""


def time_table(backend, spec, n, d, repeat):
    m = spec.model
    rows = np.zeros((1, n))
    input_row = np.zeros(d + 1, dtype=np.int64)
    keys = np.random.default_rng(0).integers(0, 2**63, size=(d + 1, d + 1), dtype=np.uint64)
    ks = np.array([max(1, n - 10 * j) for j in range(d + 1)], dtype=np.int64)
    backend.quantile_table(m.kind, m.params, m.table, m.loss_code, rows, input_row, keys, ks)  # compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        q, _ = backend.quantile_table(m.kind, m.params, m.table, m.loss_code, rows, input_row, keys, ks)
        best = min(best, time.perf_counter() - t0)
    return best, q


def time_dp(disable_numba, k, d, n, repeat):
    env = dict(os.environ, RISKPATH_DISABLE_NUMBA="1" if disable_numba else "0")
    code = DP_SCRIPT.format(k=k, d=d, n=n, repeat=repeat)
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--buckets", type=int, default=50)
    ap.add_argument("--diamonds", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    n, d = args.samples, args.buckets
    combos = (d + 1) * (d + 2) // 2

    print(f"edge quantile table: n={n}, d={d} ({combos} bucket pairs)")
    print(f"{'agent':<22}{'numba s':>10}{'numpy s':>10}{'speedup':>9}{'max |diff|':>12}")
    numba_backend = get_backend("numba")
    for spec in (AgentSpec.make("uniform"), AgentSpec.make("gaussian"),
                 AgentSpec.make("latent-correlated", mu=0, sigma=1, rho=0.5),
                 AgentSpec.make("uniform", loss="carry", output_rule="accumulate")):
        t_nb, q_nb = time_table(numba_backend, spec, n, d, args.repeat)
        t_np, q_np = time_table(_numpy, spec, n, d, args.repeat)
        finite = np.isfinite(q_nb)
        diff = float(np.max(np.abs(q_nb[finite] - q_np[finite])))
        label = spec.kind if spec.loss == "identity" else f"{spec.kind}/{spec.loss}"
        print(f"{label:<22}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x{diff:>12.2e}")

    k = args.diamonds
    print(f"\nfull DP on {k} diamonds ({4 * k} edges), n={n}, d={d}")
    res = [time_dp(flag, k, d, n, args.repeat) for flag in (False, True)]
    for r in res:
        print(f"  {r['backend']:<6} {r['seconds']:.3f}s  estimate {r['estimate']!r}")
    print(f"  speedup {res[1]['seconds'] / res[0]['seconds']:.1f}x, "
          f"estimates {'identical' if res[0]['estimate'] == res[1]['estimate'] else 'differ'}")


if __name__ == "__main__":
    main()
