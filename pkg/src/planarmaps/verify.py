"""Exhaustive self-checks over all small trees, run by ``planarmaps verify``."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bijections import (bdg_build_map, bdg_inverse, js_forward_labelled, js_inverse_labelled)
from .maps import audit
from .sampling import (count_label_bridges, count_labellings, count_trees,
                       enumerate_label_bridges, enumerate_labellings, enumerate_trees)
from .stats import bridge_maxgap_dichotomy
from .trees import DegreeSequence

__all__ = ["VerifyReport", "degree_sequences_up_to", "run_exhaustive"]


@dataclass
class VerifyReport:
    checks: dict[str, int] = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    def tick(self, name: str, n: int = 1) -> None:
        self.checks[name] = self.checks.get(name, 0) + n

    def fail(self, msg: str) -> None:
        if len(self.failures) < 50:
            self.failures.append(msg)

    @property
    def ok(self) -> bool:
        return not self.failures


def _partitions(n: int, max_part: int):
    """Partitions of n with parts <= max_part, as {part: multiplicity}."""
    if n == 0:
        yield {}
        return
    for p in range(min(n, max_part), 0, -1):
        for rest in _partitions(n - p, p):
            out = dict(rest)
            out[p] = out.get(p, 0) + 1
            yield out


def degree_sequences_up_to(max_edges: int):
    """Every degree sequence with 1..max_edges edges."""
    for N in range(1, max_edges + 1):
        for part in _partitions(N, N):
            yield DegreeSequence(part)


def run_exhaustive(max_edges: int) -> VerifyReport:
    rep = VerifyReport()
    for ds in degree_sequences_up_to(max_edges):
        trees = list(enumerate_trees(ds))
        if len(trees) != count_trees(ds) or len(set(trees)) != len(trees):
            rep.fail(f"count_trees({ds}) = {count_trees(ds)} but enumeration gives {len(trees)}")
        rep.tick("tree counts")
        keys = set()
        expected = 0
        for t in trees:
            expected += 2 * count_labellings(t)
            for lt in enumerate_labellings(t):
                lt2 = js_inverse_labelled(lt)
                if js_forward_labelled(lt2) != lt:
                    rep.fail(f"JS round trip failed on {lt.to_string()}")
                rep.tick("JS round trips")
                for eps in (1, -1):
                    m = bdg_build_map(lt2, eps)
                    a = audit(m)
                    if not (a.euler_ok and a.bipartite and a.F == ds.n_internal):
                        rep.fail(f"audit failed for {lt2.to_string()} eps={eps}: {a.summary()}")
                    back, e2 = bdg_inverse(m)
                    if back != lt2 or e2 != eps:
                        rep.fail(f"BDG round trip failed on {lt2.to_string()} eps={eps}")
                    keys.add(m.canonical_key())
                    rep.tick("BDG round trips")
        if len(keys) != expected:
            rep.fail(f"{ds}: {len(keys)} distinct pointed maps, expected {expected}")
        rep.tick("map counts")
    for r in range(1, max_edges + 1):
        listed = list(enumerate_label_bridges(r))
        if len(set(listed)) != count_label_bridges(r) or any(
                min(np.diff(b)) < -1 or b[0] or b[-1] for b in listed):
            rep.fail(f"label bridges of length {r} miscounted")
        rep.tick("bridge counts")
        for b in listed:
            for x in range(0, r + 1):
                if not bridge_maxgap_dichotomy(b, x):
                    rep.fail(f"half-minima dichotomy fails on {b} with x={x}")
                rep.tick("bridge dichotomy")
    return rep
