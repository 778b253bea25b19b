"""Compare the compiled and pure Python polynomial kernels.

Each backend runs in its own interpreter because the backend is chosen at
import time.  Usage:

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import textwrap

WORKER = textwrap.dedent(
    """
    import json, sys, timeit
    from hspgen import kernels
    from hspgen.hsp import PairFamily, build_sigma
    from hspgen.matrix import det_bareiss, pf_antidiag
    from hspgen.ring import VariableId, var

    repeat, quick = int(sys.argv[1]), sys.argv[2] == "1"
    xs = [var(VariableId("x", (i,))) for i in range(6)]
    a = (sum(xs[:4], xs[0] * 0) + 1) ** (5 if quick else 7)
    b = (xs[2] - 2 * xs[3] + xs[4] * xs[5] + 3) ** (4 if quick else 6)
    prod = a * b
    so = build_sigma(PairFamily.sostar(4 if quick else 5), deformed=True)
    su = build_sigma(PairFamily.su(2, 2) if quick else PairFamily.su(3, 2), deformed=True)
    cases = {
        "poly_mul": lambda: a * b,
        "exact_div": lambda: prod.exact_div(b),
        "pfaffian_sostar": lambda: pf_antidiag(so),
        "det_bareiss_su": lambda: det_bareiss(su),
    }
    out = {"backend": kernels.BACKEND, "terms": {"a": len(a), "b": len(b), "a*b": len(prod)}}
    for name, fn in cases.items():
        out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(json.dumps(out))
    """
)


def run_backend(pure: bool, repeat: int, quick: bool) -> dict:
    env = dict(os.environ)
    env.pop("HSPGEN_PURE_PYTHON", None)
    if pure:
        env["HSPGEN_PURE_PYTHON"] = "1"
    res = subprocess.run(
        [sys.executable, "-c", WORKER, str(repeat), "1" if quick else "0"],
        env=env,
        check=True,
        capture_output=True,
        text=True,
    )
    return json.loads(res.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args(argv)

    fast = run_backend(False, args.repeat, args.quick)
    slow = run_backend(True, args.repeat, args.quick)
    if fast["backend"] != "compiled":
        print("compiled extension not available; both runs used the Python kernels")
    print(f"operand sizes (terms): {fast['terms']}")
    print(f"{'case':<18}{'compiled s':>12}{'python s':>12}{'speedup':>10}")
    for name in ("poly_mul", "exact_div", "pfaffian_sostar", "det_bareiss_su"):
        c, p = fast[name], slow[name]
        print(f"{name:<18}{c:>12.4f}{p:>12.4f}{p / c:>9.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
