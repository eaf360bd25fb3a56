"""Time the numba kernels against the pure-Python fallback.

Each backend runs in its own subprocess, since the choice is made once at
import time from COMPETING_URNS_DISABLE_NUMBA. Kernels are warmed up
before timing so JIT compilation is excluded.

    python benchmarks/bench_kernels.py [--repeat 3]
"""
import argparse
import json
import os
import subprocess
import sys
import time


def _cases():
    from competing_urns import boundary as BD
    from competing_urns import conservative as C
    from competing_urns import growth as G
    from competing_urns import rng as R
    from competing_urns import urn as U
    from competing_urns.graph import cycle, risk
    from competing_urns.risk import initial_state, run_risk

    def urn_linear():
        s = U.from_signed(cycle(6), [3, 0, -2, 0, 1, 0])
        U.run_until(s, max_steps=20_000, rng=R.stream(1))

    def urn_tree():
        s = U.single_colour(cycle(200), [1] + [0] * 199)
        U.run_until(s, max_steps=20_000, rng=R.stream(2))

    def conservative():
        c = C.MarkedState(risk(3), [0, 2, 2, -2, -2, 1, 1])
        C.run_conservative(c, rng=R.stream(3), max_steps=20_000)

    def growth():
        g = G.init_growth({(0, 0): 0, (0, 3): 1}, track_steps=False)
        G.run_growth(g, rng=R.stream(4), max_steps=5_000)

    def boundary():
        st = G.init_growth({(0, 0): 0, (0, 3): 1})
        BD.coupled_equivalence_check(st, rng=R.stream(5), events=1_000)

    def risk_monitors():
        run_risk(initial_state(3, 20), n=20, rng=R.stream(6), max_steps=20_000)

    return {"urn_linear": urn_linear, "urn_tree": urn_tree, "conservative": conservative,
            "growth": growth, "boundary": boundary, "risk": risk_monitors}


def _worker(repeat: int) -> None:
    from competing_urns import _accel
    out = {"backend": _accel.backend(), "seconds": {}}
    for name, fn in _cases().items():
        fn()
        best = min(_timed(fn) for _ in range(repeat))
        out["seconds"][name] = best
    print(json.dumps(out))


def _timed(fn) -> float:
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def _run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("COMPETING_URNS_DISABLE_NUMBA", None)
    if disable:
        env["COMPETING_URNS_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        _worker(args.repeat)
        return
    fast, slow = _run(False, args.repeat), _run(True, args.repeat)
    print(f"{'kernel':<14}{fast['backend']:>12}{slow['backend']:>12}{'speedup':>10}")
    for name, t in fast["seconds"].items():
        p = slow["seconds"][name]
        print(f"{name:<14}{t:>11.4f}s{p:>11.4f}s{p / t:>9.1f}x")


if __name__ == "__main__":
    main()
