"""Command line entry point.

Exit status: 0 on success, 1 when an invariant check fails, 2 on usage
errors.  Output directories default to ``$PLANARMAPS_OUT`` when set.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .bijections import (bdg_build_map, bdg_inverse, js_forward_labelled, js_inverse_labelled)
from .boltzmann import (Conditioning, InfeasibleConditioningError, WeightSequence, classify,
                        sample_boltzmann_map, tilt_solve)
from .maps import PlanarMap, audit, sample_pointed
from .rng import GENERATOR_NAME, GENERATOR_VERSION, make_rng, spawn
from .sampling import LabelledTree, label_tree, sample_tree
from .stats import (bridge_maxgap_dichotomy, contour_height_gap, ks_two_sample,
                    lambda_linearity, two_point_identity)
from .trees import DegreeSequence

FORMAT_VERSION = "1"
OUT_ENV = "PLANARMAPS_OUT"


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def parse_preset(text: str, need_n: bool = True) -> tuple[int, Optional[int]]:
    """'2kappa:K:n' -> (K, n); n may be omitted when need_n is False."""
    parts = text.split(":")
    if parts[0] != "2kappa" or len(parts) not in (2, 3) or (need_n and len(parts) != 3):
        raise UsageError(f"preset must look like 2kappa:K{':n' if need_n else '[:n]'}, got {text!r}")
    try:
        k = int(parts[1])
        n = int(float(parts[2])) if len(parts) == 3 else None
    except ValueError:
        raise UsageError(f"bad numbers in preset {text!r}") from None
    if k < 1 or (n is not None and n < 1):
        raise UsageError("preset needs K >= 1 and n >= 1")
    return k, n


def read_degrees(path: str) -> DegreeSequence:
    counts = {}
    for line in Path(path).read_text().splitlines():
        line = line.split("#")[0].strip()
        if not line:
            continue
        try:
            i, c = (int(t) for t in line.split())
        except ValueError:
            raise UsageError(f"degree file lines must be 'i count': {line!r}") from None
        counts[i] = counts.get(i, 0) + c
    try:
        return DegreeSequence(counts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def degree_input(args) -> DegreeSequence:
    if getattr(args, "degrees", None):
        return read_degrees(args.degrees)
    if getattr(args, "preset", None):
        k, n = parse_preset(args.preset)
        return DegreeSequence.angulation(k, n)
    raise UsageError("give --degrees FILE or --preset 2kappa:K:n")


def weights_input(args) -> WeightSequence:
    if args.weights:
        try:
            return WeightSequence.from_text(Path(args.weights).read_text())
        except ValueError as exc:
            raise UsageError(f"bad weights file: {exc}") from None
    if args.preset == "all-ones":
        return WeightSequence.all_ones()
    if args.preset == "quad-critical":
        return WeightSequence.quad_critical()
    raise UsageError("give --weights FILE or --preset all-ones|quad-critical")


def add_input(sp: argparse.ArgumentParser, what: str) -> None:
    sp.add_argument("input", nargs="?", help=f"{what} (default stdin)")
    sp.add_argument("--in", dest="in_file", metavar="FILE", help=f"{what}, as an option")


def read_input(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def split_maps(text: str) -> list[PlanarMap]:
    rows = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    out, i = [], 0
    while i < len(rows):
        E = int(rows[i].split()[0])
        out.append(PlanarMap.from_string("\n".join(rows[i:i + 2 * E + 1])))
        i += 2 * E + 1
    return out


class Output:
    def __init__(self, path: Optional[str]):
        self.path = path
        self.fh = sys.stdout if path in (None, "-") else open(path, "w")

    def write(self, text: str) -> None:
        self.fh.write(text)

    def close(self) -> None:
        if self.fh is not sys.stdout:
            self.fh.close()


def out_dir(arg: Optional[str]) -> Path:
    d = arg or os.environ.get(OUT_ENV)
    if not d:
        raise UsageError(f"give --out DIR or set {OUT_ENV}")
    p = Path(d)
    p.mkdir(parents=True, exist_ok=True)
    return p


def manifest(command: str, args: argparse.Namespace, **extra) -> dict:
    inputs = {k: v for k, v in vars(args).items() if k not in ("func",) and not callable(v)}
    return {"command": command, "inputs": inputs, "package_version": __version__,
            "format_version": FORMAT_VERSION, "generator": GENERATOR_NAME,
            "generator_version": GENERATOR_VERSION, "numpy": np.__version__,
            "created_unix": int(time.time()), **extra}


def map_replicas(fn: Callable, tasks: Sequence, threads: int) -> list:
    """Apply fn to every task; results are in task order whatever the pool."""
    if threads <= 1 or len(tasks) < 2:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * threads))))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_sample_tree(args) -> int:
    ds = degree_input(args)
    out = Output(args.out)
    for ss in spawn(args.seed, args.count):
        rng = make_rng(ss)
        t = sample_tree(ds, rng)
        out.write((label_tree(t, rng).to_string() if args.labelled else t.to_string()) + "\n")
    out.close()
    return 0


def cmd_sample_map(args) -> int:
    ds = degree_input(args)
    if ds.n_edges < 1:
        raise UsageError("degree sequence has no edge")
    out = Output(args.out)
    for ss in spawn(args.seed, args.count):
        m = sample_pointed(ds, ss).map
        out.write(m.to_string() if not args.unpointed else m.forget_star().to_string())
    out.close()
    return 0


def cmd_audit(args) -> int:
    bad = 0
    for m in split_maps(read_input(args.in_file or args.input)):
        rep = audit(m)
        bad += not rep.ok
        print(rep.summary())
    if bad:
        print(f"{bad} map(s) failed the audit", file=sys.stderr)
        return 1
    return 0


def cmd_distances(args) -> int:
    maps = split_maps(read_input(args.in_file or args.input))
    for idx, m in enumerate(maps):
        if args.source == "star":
            if m.star is None:
                raise UsageError("map has no star vertex")
            src = m.star
        elif args.source == "root":
            src = m.root_vertex
        else:
            try:
                src = int(args.source)
            except ValueError:
                raise UsageError("--source must be star, root or a vertex id") from None
        d = m.distances_from(src)
        if len(maps) > 1:
            print(f"# map {idx}")
        for v, dv in enumerate(d.tolist()):
            print(v, dv)
    return 0


def cmd_convert(args) -> int:
    text = read_input(args.in_file or args.input)
    out = Output(args.out)
    if args.src == "map":
        items = split_maps(text)
    else:
        items = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    for item in items:
        if args.src == "map":
            lt2, eps = bdg_inverse(item)
        elif args.src == "tree1":
            lt = LabelledTree.from_string(item).validate()
            lt2, eps = js_inverse_labelled(lt), args.eps
        else:
            lt2, eps = LabelledTree.from_string(item, two_type=True).validate(), args.eps
        if args.dst == "map":
            out.write(bdg_build_map(lt2, eps).to_string())
        elif args.dst == "tree2":
            if args.src == "map":
                out.write(f"# eps {eps:+d}\n")
            out.write(lt2.to_string() + "\n")
        else:
            if args.src == "map":
                out.write(f"# eps {eps:+d}\n")
            out.write(js_forward_labelled(lt2).to_string() + "\n")
    out.close()
    return 0


def cmd_boltzmann_solve(args) -> int:
    q = weights_input(args)
    sol = classify(q)
    rec = sol.as_record()
    try:
        t = tilt_solve(q)
        rec["tiltX"] = t.x
        rec["tilt_constant"] = t.constant
        rec["tilt_rescale"] = t.rescale
    except ValueError:
        rec["tiltX"] = None
    if sol.generic_critical:
        rec["rescale_E"] = sol.rescale(Conditioning.E())
        rec["rescale_V"] = sol.rescale(Conditioning.V())
        rec["rescale_F"] = sol.rescale(Conditioning.F())
    print(json.dumps(rec))
    return 0


def cmd_boltzmann_sample(args) -> int:
    q = weights_input(args)
    try:
        S = Conditioning.parse(args.cond)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Output(args.out)
    for ss in spawn(args.seed, args.count):
        try:
            smp = sample_boltzmann_map(q, S, args.n, ss)
        except (InfeasibleConditioningError, ValueError) as exc:
            out.close()
            raise InvariantError(str(exc)) from None
        out.write(smp.map.to_string())
    out.close()
    return 0


def _scaling_replica(task) -> dict:
    kappa, n, idx, ss = task
    ds = DegreeSequence.angulation(kappa, n)
    rng = make_rng(ss)
    lt = label_tree(sample_tree(ds, rng), rng)
    N = ds.n_edges
    s2 = kappa - 1
    return {"kappa": kappa, "n_faces": n, "n_edges": N, "replica": idx,
            "seed_entropy": str(ss.entropy), "spawn_key": list(ss.spawn_key),
            "contour_height_gap": contour_height_gap(lt.tree),
            "lambda_linearity_leaves": lambda_linearity(lt.tree, {0}),
            "sup_label_rescaled": float(np.abs(lt.labels).max() * (9 / (4 * s2 * N)) ** 0.25),
            "sup_height_rescaled": float(lt.tree.depth.max() * (s2 / (4 * N)) ** 0.5)}


STAT_KEYS = ("contour_height_gap", "lambda_linearity_leaves", "sup_label_rescaled",
             "sup_height_rescaled")


def cmd_scaling_run(args) -> int:
    kappa, _ = parse_preset(args.preset, need_n=False)
    try:
        sizes = [int(float(s)) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError("--sizes must be a comma-separated list of numbers") from None
    d = out_dir(args.out)
    tasks = []
    for n, ss in zip(sizes, spawn(args.seed, len(sizes))):
        tasks += [(kappa, n, i, s) for i, s in enumerate(ss.spawn(args.replicas))]
    recs = map_replicas(_scaling_replica, tasks, args.threads)
    with open(d / "records.ndjson", "w") as fh:
        for r in recs:
            fh.write(json.dumps(r) + "\n")
    with open(d / "aggregates.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["kappa", "n_faces", "n_edges", "replicas"]
                   + [f"{k}_{s}" for k in STAT_KEYS for s in ("mean", "median")])
        for n in sizes:
            rows = [r for r in recs if r["n_faces"] == n]
            vals = []
            for k in STAT_KEYS:
                a = np.array([r[k] for r in rows])
                vals += [float(a.mean()), float(np.median(a))]
            w.writerow([kappa, n, rows[0]["n_edges"], len(rows)] + vals)
    (d / "manifest.json").write_text(json.dumps(manifest(
        "scaling run", args, tolerances="stability tolerances (10%) are engineering choices"),
        indent=2))
    return 0


def _read_numbers(path: str) -> np.ndarray:
    return np.array([float(t) for t in read_input(path).split()])


def cmd_scaling_ks(args) -> int:
    a, b = _read_numbers(args.a), _read_numbers(args.b)
    if not a.size or not b.size:
        raise UsageError("empty sample")
    D, p = ks_two_sample(a, b)
    print(json.dumps({"D": D, "p_value": p, "n_a": int(a.size), "n_b": int(b.size)}))
    return 0


def cmd_scaling_identity(args) -> int:
    ds = degree_input(args)
    dxy, dsy = two_point_identity(ds, args.replicas, args.seed)
    D, p = ks_two_sample(dxy, dsy)
    rec = {"D": D, "p_value": p, "replicas": args.replicas, "alpha": args.alpha,
           "mean_dxy": float(dxy.mean()), "mean_dstar": float(dsy.mean()),
           "pass": p > args.alpha}
    if args.out:
        d = out_dir(args.out)
        with open(d / "records.ndjson", "w") as fh:
            for i, (x, y) in enumerate(zip(dxy.tolist(), dsy.tolist())):
                fh.write(json.dumps({"replica": i, "d_xy": x, "d_star_y": y}) + "\n")
        (d / "manifest.json").write_text(json.dumps(manifest("scaling identity", args, result=rec),
                                                    indent=2))
    print(json.dumps(rec))
    return 0


def cmd_scaling_lemma_b(args) -> int:
    from .sampling import sample_label_bridge
    rng = make_rng(args.seed)
    bad = 0
    for _ in range(args.count):
        r = int(rng.integers(1, args.max_r + 1))
        b = sample_label_bridge(r, rng)
        x = int(rng.integers(1, args.max_x + 1))
        bad += not bridge_maxgap_dichotomy(b, x)
    print(json.dumps({"bridges": args.count, "counterexamples": bad}))
    return 1 if bad else 0


def cmd_verify(args) -> int:
    from .verify import run_exhaustive
    rep = run_exhaustive(args.max_edges)
    for k, v in rep.checks.items():
        print(f"{k}: {v}")
    for f in rep.failures:
        print("FAIL", f, file=sys.stderr)
    return 0 if rep.ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="planarmaps",
                                description="Random bipartite planar maps through labelled trees.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def ds_opts(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--degrees", metavar="FILE", help="degree file, lines 'i count'")
        g.add_argument("--preset", metavar="2kappa:K:n", help="n faces of degree 2K")

    def seed_opt(sp):
        sp.add_argument("--seed", type=int, default=0, help="root seed (default 0)")

    sp = sub.add_parser("sample-tree", help="uniform trees with a degree sequence")
    ds_opts(sp)
    sp.add_argument("--count", type=int, default=1, help="number of trees")
    seed_opt(sp)
    sp.add_argument("--labelled", action="store_true", help="also draw a uniform labelling")
    sp.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    sp.set_defaults(func=cmd_sample_tree)

    sp = sub.add_parser("sample-map", help="uniform pointed rooted maps")
    ds_opts(sp)
    sp.add_argument("--count", type=int, default=1, help="number of maps")
    seed_opt(sp)
    sp.add_argument("--unpointed", action="store_true", help="drop the distinguished vertex")
    sp.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    sp.set_defaults(func=cmd_sample_map)

    sp = sub.add_parser("audit", help="Euler, bipartite and face-degree audit of maps")
    add_input(sp, "map file")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("distances", help="BFS distances in a map")
    add_input(sp, "map file")
    sp.add_argument("--source", default="star", help="star, root or a vertex id")
    sp.set_defaults(func=cmd_distances)

    sp = sub.add_parser("convert", help="convert between labelled trees and maps")
    sp.add_argument("--from", dest="src", required=True, choices=["tree1", "tree2", "map"])
    sp.add_argument("--to", dest="dst", required=True, choices=["tree1", "tree2", "map"])
    sp.add_argument("--eps", type=int, default=1, choices=[-1, 1],
                    help="root orientation when building a map")
    add_input(sp, "input file")
    sp.add_argument("--out", metavar="FILE", help="output file (default stdout)")
    sp.set_defaults(func=cmd_convert)

    bz = sub.add_parser("boltzmann", help="Boltzmann weight sequences").add_subparsers(
        dest="bcommand", required=True)
    for name, fn in (("solve", cmd_boltzmann_solve), ("sample", cmd_boltzmann_sample)):
        sp = bz.add_parser(name)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--weights", metavar="FILE", help="lines 'k q_k'")
        g.add_argument("--preset", choices=["all-ones", "quad-critical"])
        sp.set_defaults(func=fn)
        if name == "sample":
            sp.add_argument("--cond", default="E", help="E, V, F or FA:k1,k2,...")
            sp.add_argument("--n", type=int, required=True, help="size parameter")
            sp.add_argument("--count", type=int, default=1)
            seed_opt(sp)
            sp.add_argument("--out", metavar="FILE")

    sc = sub.add_parser("scaling", help="scaling experiments").add_subparsers(
        dest="scommand", required=True)
    sp = sc.add_parser("run", help="per-replica statistics over sizes")
    sp.add_argument("--preset", required=True, metavar="2kappa:K")
    sp.add_argument("--sizes", required=True, help="numbers of faces, e.g. 1e3,1e4")
    sp.add_argument("--replicas", type=int, default=100)
    seed_opt(sp)
    sp.add_argument("--out", metavar="DIR")
    sp.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    sp.set_defaults(func=cmd_scaling_run)

    sp = sc.add_parser("ks", help="two-sample KS test on number files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.set_defaults(func=cmd_scaling_ks)

    sp = sc.add_parser("identity", help="two-point re-rooting identity")
    ds_opts(sp)
    sp.add_argument("--replicas", type=int, default=10000)
    sp.add_argument("--alpha", type=float, default=0.001)
    seed_opt(sp)
    sp.add_argument("--out", metavar="DIR")
    sp.set_defaults(func=cmd_scaling_identity)

    sp = sc.add_parser("lemma-b", help="half-minima dichotomy on random label bridges")
    sp.add_argument("--count", type=int, default=100000)
    sp.add_argument("--max-r", type=int, default=200)
    sp.add_argument("--max-x", type=int, default=5)
    seed_opt(sp)
    sp.set_defaults(func=cmd_scaling_lemma_b)

    sp = sub.add_parser("verify", help="exhaustive checks on all small trees")
    sp.add_argument("--max-edges", type=int, default=6)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
