"""Command line entry point: ``competing-urns <subcommand> ...``.

Every subcommand prints one JSON document whose ``header`` holds the
resolved arguments and master seed. Exit status is 0 on success, 1 on a
domain error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from . import boundary as BD
from . import conservative as C
from . import experiment as E
from . import growth as G
from . import risk as RK
from . import rng as R
from . import urn as U
from ._accel import backend
from .errors import DomainError
from .graph import load_graph
from .spectral import perron_eigenpair


def _graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", help="standard family, e.g. cycle:4, path:3, complete:5, risk:3")
    p.add_argument("--graph", help="edge-list file")


def _seed_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (overridden by ${R.SEED_ENV}; default 0)")


def _graph(ns, parser):
    if bool(ns.family) == bool(ns.graph):
        parser.error("give exactly one of --family and --graph")
    return load_graph(ns.family or ns.graph)


def _seed(ns) -> int:
    return R.resolve_seed(0 if ns.seed is None else ns.seed)


def _header(ns, seed: int | None) -> dict:
    args = {k: v for k, v in vars(ns).items() if k not in ("func", "parser")}
    return {"command": ns.command, "args": args, "seed": seed, "version": __version__,
            "backend": backend()}


def _emit(doc: dict) -> None:
    sys.stdout.write(E.dumps(doc))


def _urn_init(ns, g, parser):
    if bool(ns.init) == bool(ns.z):
        parser.error("give exactly one of --init and --z")
    if ns.z:
        z = [int(v) for v in ns.z.split(",")]
        if len(z) != g.n:
            parser.error(f"--z has {len(z)} entries for a graph on {g.n} vertices")
        return U.from_signed(g, z)
    return U.read_init(ns.init, g)


def cmd_spectral(ns, parser) -> int:
    g = _graph(ns, parser)
    sd = perron_eigenpair(g, tol=ns.tol)
    _emit({"header": _header(ns, None), "lambda": sd.lam, "pi": sd.pi,
           "residual": sd.residual, "iterations": sd.iterations})
    return 0


def cmd_simulate_urn(ns, parser) -> int:
    g = _graph(ns, parser)
    state = _urn_init(ns, g, parser)
    seed = _seed(ns)
    if (ns.max_steps is None and ns.max_time is None and not ns.stop_when_monochromatic
            and not ns.min_total):
        parser.error("give a stop condition (--max-steps, --max-time, "
                     "--stop-when-monochromatic or --min-total)")
    sel, clk = R.streams(seed, ns.replica)
    cps = [float(t) for t in ns.checkpoints.split(",")] if ns.checkpoints else None
    tr = U.run_until(state, max_steps=ns.max_steps, max_time=ns.max_time,
                     stop_when_monochromatic=ns.stop_when_monochromatic, min_total=ns.min_total,
                     stride=max(ns.stride, 1), record=ns.stride > 0, rng=sel, clock=clk,
                     checkpoints=cps)
    doc = {"header": _header(ns, seed), "stop_reason": tr.stop_reason, "steps": state.step,
           "time": state.time, "total_balls": state.total_balls,
           "survivors": sorted(U.survivors(state)),
           "colours": [int(c) for c in state.colour], "counts": [int(c) for c in state.count],
           "extinction_steps": tr.extinction_steps}
    if state.n_colours <= 2:
        sd = perron_eigenpair(g)
        doc["Z"] = state.signed
        doc["W_estimate"] = E.estimate_W(tr, sd)
    if ns.out and ns.stride > 0:
        _write_trajectory(ns.out, tr, state.n_colours <= 2)
        doc["trajectory"] = ns.out
    _emit(doc)
    return 0


def _write_trajectory(path: str, tr: U.Trajectory, two_type: bool) -> None:
    """Signed counts for two types, ``colour:count`` tokens otherwise."""
    n = tr.initial.graph.n
    lines = ["step,time," + ",".join(f"vertex_{v}" for v in range(n))]
    sig = tr.signed()
    for i in range(len(tr)):
        if two_type:
            cells = [str(int(x)) for x in sig[i]]
        else:
            cells = [f"{int(c)}:{int(b)}" if b else "-:0" for c, b in zip(tr.colours[i], tr.counts[i])]
        lines.append(f"{tr.steps[i]},{E.fmt(float(tr.times[i]))}," + ",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_simulate_conservative(ns, parser) -> int:
    g = _graph(ns, parser)
    z0 = _urn_init(ns, g, parser).signed
    seed = _seed(ns)
    if ns.max_steps is None and ns.max_time is None:
        parser.error("give --max-steps or --max-time")
    state = C.init_conservative(g, z0, marking=ns.marking)
    sel, clk = R.streams(seed, ns.replica)
    _, steps, times, counts = C.run_conservative(state, rng=sel, clock=clk, max_steps=ns.max_steps,
                                                 max_time=ns.max_time, stride=ns.stride)
    doc = {"header": _header(ns, seed), "steps": state.step, "time": state.time,
           "R": state.R, "B": state.B, "P": state.P, "Z": state.Z, "merges": state.merges,
           "ledger_ok": C.check_ledger(state)}
    if ns.out and ns.stride > 0:
        cols = [f"{k}_{v}" for k in ("R", "B", "P", "Rstar", "Bstar", "Pstar") for v in range(g.n)]
        lines = ["step,time," + ",".join(cols)]
        for i in range(steps.size):
            lines.append(f"{steps[i]},{E.fmt(float(times[i]))},"
                         + ",".join(str(int(x)) for x in counts[i]))
        Path(ns.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        doc["trajectory"] = ns.out
    if ns.marking and state.mark_colour is not None:
        doc.update({"tau1": state.tau1, "mark_colour": state.mark_colour, "Y": state.Y,
                    "M": state.M, "Z_equals_Y_minus_M": C.check_identity_ZYM(state)})
    _emit(doc)
    return 0


def cmd_simulate_growth(ns, parser) -> int:
    init = G.read_growth_init(ns.init)
    seed = _seed(ns)
    if ns.max_steps is None and ns.max_time is None and not ns.single_colour_boundary:
        parser.error("give --max-steps, --max-time or --single-colour-boundary")
    state = G.init_growth(init, ns.geometry, track_steps=bool(ns.dump_sites))
    sel, clk = R.streams(seed, ns.replica)
    tr = G.run_growth(state, rng=sel, clock=clk, max_steps=ns.max_steps, max_time=ns.max_time,
                      single_colour_boundary=ns.single_colour_boundary)
    doc = {"header": _header(ns, seed), "stop_reason": tr.stop_reason, "steps": state.step,
           "time": state.time, "coloured_sites": state.n_coloured,
           "site_counts": state.scount, "boundary_edges": state.n_boundary,
           "edge_counts": state.ecount, "boundary_colours": sorted(state.boundary_colours()),
           "bbox": list(state.bbox)}
    if ns.dump_sites:
        rows = ["x,y,colour,step"] + [",".join(str(int(v)) for v in r) for r in state.sites()]
        Path(ns.dump_sites).write_text("\n".join(rows) + "\n", encoding="utf-8")
        doc["sites_file"] = ns.dump_sites
    _emit(doc)
    return 0


def cmd_verify(ns, parser) -> int:
    init = G.read_growth_init(ns.init)
    seed = _seed(ns)
    rep = BD.verify_correspondence(init, ns.geometry, events=ns.events, master_seed=seed)
    rep["divergence_count"] = len(rep["divergences"])
    _emit({"header": _header(ns, seed), **rep})
    return 0 if not rep["divergences"] else 1


def cmd_sweep(ns, parser) -> int:
    cfg = E.read_config(ns.config)
    res = E.run_ensemble(cfg, workers=ns.workers)
    out = Path(ns.out)
    paths = E.write_outputs(res, out)
    _emit({"header": _header(ns, R.resolve_seed(cfg.master_seed)), "config": cfg.to_dict(),
           "outputs": [str(p) for p in paths], "aggregates": res.aggregates})
    return 0


def cmd_risk(ns, parser) -> int:
    seed = _seed(ns)
    state = RK.initial_state(ns.s, ns.n)
    sel, clk = R.streams(seed, ns.replica)
    ks = tuple(int(k) for k in ns.sample_k.split(",")) if ns.sample_k else ()
    rep = RK.run_risk(state, n=ns.n, alpha=ns.alpha, rng=sel, clock=clk,
                      max_steps=ns.max_steps, stride=ns.stride, sample_k=ks)
    doc = {"header": _header(ns, seed), "T": rep.T, "first_hit": rep.first_hit,
           "all_alive": rep.all_alive, "extinction_steps": rep.extinction_steps,
           "final_counts": [int(c) for c in state.count],
           "final_colours": [int(c) for c in state.colour]}
    if ns.out:
        s = ns.s
        head = (["k", "A", "B"] + [f"r_v{v}" for v in range(1, 2 * s + 1)]
                + [f"r_j{j}" for j in range(s)] + ["f"] + [f"Y{j}" for j in range(s)])
        lines = [",".join(head)]
        for i in range(rep.steps.size):
            vals = ([str(int(rep.steps[i])), str(int(rep.A[i])), str(int(rep.B[i]))]
                    + [E.fmt(float(x)) for x in rep.r_v[i]] + [E.fmt(float(x)) for x in rep.r_j[i]]
                    + [E.fmt(float(rep.f[i]))] + [E.fmt(float(x)) for x in rep.Y[i]])
            lines.append(",".join(vals))
        Path(ns.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
        doc["series_file"] = ns.out
    _emit(doc)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="competing-urns",
                                description="Competing urn schemes and two-neighbour growth.")
    p.add_argument("--version", action="version",
                   version=f"competing-urns {__version__} rng {R.ALGORITHM}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectral", help="Perron eigenpair of a graph")
    _graph_args(s)
    s.add_argument("--tol", type=float, default=1e-12)
    s.set_defaults(func=cmd_spectral)

    for name, func in (("simulate-urn", cmd_simulate_urn),
                       ("simulate-conservative", cmd_simulate_conservative)):
        s = sub.add_parser(name, help=f"run one replica of the {name.split('-')[1]} process")
        _graph_args(s)
        s.add_argument("--init", help="file of 'vertex colour count' lines")
        s.add_argument("--z", help="signed two-type start, comma separated")
        _seed_arg(s)
        s.add_argument("--replica", type=int, default=0)
        s.add_argument("--max-steps", type=int)
        s.add_argument("--max-time", type=float)
        s.add_argument("--stride", type=int, default=0)
        s.add_argument("--out", help="trajectory CSV (needs --stride)")
        if name == "simulate-urn":
            s.add_argument("--stop-when-monochromatic", action="store_true")
            s.add_argument("--min-total", type=int)
            s.add_argument("--checkpoints", help="fixed times, comma separated")
        else:
            s.add_argument("--marking", "--marked", action="store_true",
                           help="track the marked balls of the first nucleation")
        s.set_defaults(func=func)

    s = sub.add_parser("simulate-growth", help="run one replica of the growth process")
    s.add_argument("--init", required=True, help="file of 'x y colour' lines")
    s.add_argument("--geometry", choices=(G.PLANE, G.HALFPLANE), default=G.PLANE)
    _seed_arg(s)
    s.add_argument("--replica", type=int, default=0)
    s.add_argument("--max-steps", type=int)
    s.add_argument("--max-time", type=float)
    s.add_argument("--single-colour-boundary", action="store_true")
    s.add_argument("--dump-sites", help="write x,y,colour,step CSV of the coloured sites")
    s.set_defaults(func=cmd_simulate_growth)

    s = sub.add_parser("verify-correspondence",
                       help="check boundary segment updates against the urn rule")
    s.add_argument("--init", required=True)
    s.add_argument("--geometry", choices=(G.PLANE, G.HALFPLANE), default=G.PLANE)
    s.add_argument("--events", type=int, default=10_000)
    _seed_arg(s)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="run an ensemble from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", default="sweep-out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("risk", help="one monitored run on the Risk graph")
    s.add_argument("--s", type=int, default=3, help="number of triangles")
    s.add_argument("--n", type=int, default=20, help="balls per periphery vertex")
    s.add_argument("--alpha", type=float, default=RK.DEFAULT_ALPHA)
    s.add_argument("--max-steps", type=int, default=100_000)
    s.add_argument("--stride", type=int, default=1000)
    s.add_argument("--sample-k", help="steps for Y increments, comma separated")
    s.add_argument("--out", help="monitor series CSV")
    _seed_arg(s)
    s.add_argument("--replica", type=int, default=0)
    s.set_defaults(func=cmd_risk)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[ns.command]  # noqa: SLF001
    try:
        return ns.func(ns, sub)
    except (DomainError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
