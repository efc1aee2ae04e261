"""Exact small/large Davenport constants by backtracking over multisets.

Multisets are generated with non-decreasing element index, so each one is
visited once.  For the small constant the only pruning is product-one
detection: a term ``g`` can extend a product-one free ``S`` exactly when
``g != 1`` and ``g^-1`` is not in ``Pi(S)``, because ``u*g*v = 1`` holds iff
``v*u = g^-1`` and ``v*u`` runs over orderings of the same sub-multiset.
No theorem about the groups is used while searching.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CapExceeded, CorruptCheckpoint, StateSpaceCapExceeded, VersionMismatch
from .groups import Group, automorphisms
from .sequences import DEFAULT_STATE_CAP, ProductTable, Sequence

CHECKPOINT_MAGIC = "davlab-ckpt"
CHECKPOINT_VERSION = "v1"


@dataclass
class SearchOptions:
    max_length: int | None = None
    state_cap: int = DEFAULT_STATE_CAP
    node_cap: int | None = None
    symmetry: bool = False
    jobs: int = 1
    checkpoint: str | os.PathLike | None = None
    checkpoint_every: int = 200_000


@dataclass
class SearchResult:
    kind: str
    value: int
    witnesses: list[Sequence]
    nodes: int
    elapsed: float
    exhaustive: bool
    sequences: list[Sequence] = field(default_factory=list)

    @property
    def witness(self) -> Sequence | None:
        return self.witnesses[0] if self.witnesses else None

    def require_exhaustive(self) -> "SearchResult":
        if not self.exhaustive:
            raise CapExceeded(f"{self.kind} search stopped early; {self.value} is a lower bound",
                              result=self)
        return self


class _Interrupted(Exception):
    pass


class _Walker:
    """One depth-first traversal, possibly restricted to a prefix or resumed."""

    def __init__(self, group: Group, kind: str, max_len: int, *, state_cap: int,
                 first: frozenset[int] | None = None, collect_best: bool = False,
                 collect_length: int | None = None, node_cap: int | None = None,
                 checkpoint: "_Checkpointer | None" = None):
        self.group = group
        self.kind = kind
        self.max_len = max_len
        self.table = ProductTable(group, state_cap)
        self.inv = group.inverses
        self.first = first
        self.collect_best = collect_best
        self.collect_length = collect_length
        self.node_cap = node_cap
        self.checkpoint = checkpoint
        self.nodes = 0
        self.best_len = 0
        self.best: list[tuple[int, ...]] = []
        self.found: list[tuple[int, ...]] = []
        self.complete = True
        self.path: list[int] = []

    # -- bookkeeping --------------------------------------------------------

    def _record(self, terms: tuple[int, ...]) -> None:
        n = len(terms)
        if n > self.best_len:
            self.best_len = n
            self.best = [terms]
        elif n == self.best_len and self.collect_best:
            self.best.append(terms)
        if self.collect_length is not None and n == self.collect_length:
            self.found.append(terms)

    def _visit(self) -> None:
        self.nodes += 1
        t = self.table
        if self.kind == "large":
            if t.is_minimal_product_one():
                self._record(tuple(self.path))
        else:
            self._record(tuple(self.path))
        if self.checkpoint is not None and self.nodes % self.checkpoint.every == 0:
            self.checkpoint.save(self, self.path)
        if self.node_cap is not None and self.nodes >= self.node_cap:
            raise _Interrupted

    def _push(self, g: int) -> bool:
        try:
            self.table.push(g)
        except StateSpaceCapExceeded:
            self.complete = False
            return False
        self.path.append(g)
        return True

    def _pop(self) -> None:
        self.table.pop()
        self.path.pop()

    # -- traversal ----------------------------------------------------------

    def _extendable(self) -> bool:
        if len(self.path) >= self.max_len:
            return False
        if self.kind == "large":
            e = self.group.identity
            if self.path and self.path[0] == e:
                return False
            if self.group.is_abelian and self.table.big_pi_mask() >> e & 1:
                # in an abelian group every proper part of a minimal
                # product-one sequence is product-one free
                return False
        return True

    def _allowed(self, g: int, forbidden: int) -> bool:
        if self.kind == "large":
            return True
        return not forbidden >> self.inv[g] & 1

    def explore(self, start: int, resume: list[int] | None = None) -> None:
        if not self._extendable():
            return
        t = self.table
        depth = len(self.path)
        forbidden = t.big_pi_mask() | 1 << self.group.identity
        first = start
        if resume:
            g = resume[0]
            if not self._push(g):
                raise CorruptCheckpoint("frontier cannot be rebuilt")
            self.explore(g, resume[1:])
            self._pop()
            first = g + 1
        for g in range(first, self.group.order):
            if depth == 0 and self.first is not None and g not in self.first:
                continue
            if not self._allowed(g, forbidden):
                continue
            if not self._push(g):
                continue
            self._visit()
            self.explore(g)
            self._pop()

    def run_prefix(self, prefix: tuple[int, ...], explore: bool) -> None:
        """Visit the node ``prefix`` (if admissible) and optionally its subtree."""
        for i, g in enumerate(prefix):
            if i and not self._extendable():
                return
            forbidden = self.table.big_pi_mask() | 1 << self.group.identity
            if not self._allowed(g, forbidden):
                return
            if not self._push(g):
                return
        self._visit()
        if explore:
            self.explore(prefix[-1])


# -- checkpoints ----------------------------------------------------------------

class _Checkpointer:
    def __init__(self, path, group: Group, kind: str, max_len: int, symmetry: bool,
                 every: int):
        if group.params is None:
            raise ValueError("checkpoints need a metacyclic group")
        self.path = Path(path)
        self.group = group
        self.kind = kind
        self.max_len = max_len
        self.symmetry = symmetry
        self.every = every
        self.started = time.perf_counter()
        self.elapsed_before = 0.0

    def header(self) -> str:
        m, n, s = self.group.params
        return f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION} {m} {n} {s} {self.max_len}"

    def save(self, walker: _Walker, frontier: list[int]) -> None:
        elapsed = self.elapsed_before + time.perf_counter() - self.started
        lines = [
            self.header(),
            " ".join(map(str, frontier)),
            f"kind {self.kind} symmetry {int(self.symmetry)} complete {int(walker.complete)}",
            f"nodes {walker.nodes} elapsed {elapsed:.6f}",
            " ".join(["best", str(walker.best_len)]),
        ]
        lines += ["b " + " ".join(map(str, terms)) for terms in walker.best]
        lines += ["f " + " ".join(map(str, terms)) for terms in walker.found]
        tmp = self.path.with_suffix(self.path.suffix + ".tmp")
        tmp.write_text("\n".join(lines) + "\n")
        tmp.replace(self.path)

    def load(self, walker: _Walker) -> list[int] | None:
        """Restore walker state; returns the frontier, or None if no file exists."""
        if not self.path.exists():
            return None
        lines = self.path.read_text().splitlines()
        if not lines or not lines[0].startswith(CHECKPOINT_MAGIC):
            raise CorruptCheckpoint(f"{self.path} is not a davlab checkpoint")
        if lines[0].split() != self.header().split():
            raise VersionMismatch(f"checkpoint header {lines[0]!r} != {self.header()!r}")
        try:
            frontier = [int(v) for v in lines[1].split()]
            meta = lines[2].split()
            if meta[1] != self.kind or int(meta[3]) != int(self.symmetry):
                raise VersionMismatch("checkpoint was written by a different search")
            walker.complete = bool(int(meta[5]))
            counters = lines[3].split()
            walker.nodes = int(counters[1])
            self.elapsed_before = float(counters[3])
            walker.best_len = int(lines[4].split()[1])
            walker.best, walker.found = [], []
            for line in lines[5:]:
                tag, *vals = line.split()
                terms = tuple(int(v) for v in vals)
                (walker.best if tag == "b" else walker.found).append(terms)
        except (IndexError, ValueError) as exc:
            raise CorruptCheckpoint(f"cannot parse {self.path}: {exc}") from exc
        if any(not 0 <= g < self.group.order for g in frontier) or frontier != sorted(frontier):
            raise CorruptCheckpoint("frontier is not a canonical multiset")
        return frontier


# -- parallel task split --------------------------------------------------------

_WORKER: dict = {}


def _init_worker(group, kind, max_len, state_cap, first, collect_best, collect_length):
    _WORKER.update(group=group, args=(kind, max_len, state_cap, first, collect_best,
                                      collect_length))


def _run_task(task):
    prefix, explore = task
    group = _WORKER["group"]
    kind, max_len, state_cap, first, collect_best, collect_length = _WORKER["args"]
    walker = _Walker(group, kind, max_len, state_cap=state_cap, first=first,
                     collect_best=collect_best, collect_length=collect_length)
    walker.run_prefix(prefix, explore)
    return walker.nodes, walker.best_len, walker.best, walker.found, walker.complete


def _tasks(group: Group, first: frozenset[int] | None) -> list[tuple[tuple[int, ...], bool]]:
    # singletons are visited alone; every pair (g, h) with g <= h is a subtree root
    out = []
    for g in range(group.order):
        if first is not None and g not in first:
            continue
        out.append(((g,), False))
        out.extend(((g, h), True) for h in range(g, group.order))
    return out


def _parallel(group, kind, max_len, state_cap, first, collect_best, collect_length, jobs):
    init = (group, kind, max_len, state_cap, first, collect_best, collect_length)
    tasks = _tasks(group, first)
    if jobs <= 1:
        _init_worker(*init)
        outputs = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=init) as pool:
            outputs = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    nodes = sum(o[0] for o in outputs)
    best_len = max((o[1] for o in outputs), default=0)
    best = [b for o in outputs if o[1] == best_len for b in o[2]]
    found = [f for o in outputs for f in o[3]]
    complete = all(o[4] for o in outputs)
    return nodes, best_len, best, found, complete


# -- public entry points --------------------------------------------------------

def _orbit_representatives(autos: list[tuple[int, ...]], order: int) -> frozenset[int]:
    return frozenset(min(sigma[g] for sigma in autos) for g in range(order))


def _close(autos: list[tuple[int, ...]], seqs: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    return sorted({tuple(sorted(sigma[g] for g in terms)) for terms in seqs for sigma in autos})


def _search(group: Group, kind: str, opts: SearchOptions, collect_length: int | None = None,
            max_len: int | None = None) -> SearchResult:
    started = time.perf_counter()
    if max_len is None:
        max_len = group.order if opts.max_length is None else min(opts.max_length, group.order)
    autos = automorphisms(group) if opts.symmetry else None
    first = _orbit_representatives(autos, group.order) if autos else None
    collect_best = autos is not None
    interrupted = False

    if opts.checkpoint is not None or opts.jobs <= 1 or opts.node_cap is not None:
        ckpt = None
        if opts.checkpoint is not None:
            ckpt = _Checkpointer(opts.checkpoint, group, kind, max_len, opts.symmetry,
                                 opts.checkpoint_every)
        walker = _Walker(group, kind, max_len, state_cap=opts.state_cap, first=first,
                         collect_best=collect_best, collect_length=collect_length,
                         node_cap=None, checkpoint=ckpt)
        frontier = ckpt.load(walker) if ckpt else None
        if frontier is not None:
            started -= ckpt.elapsed_before
        if opts.node_cap is not None:
            walker.node_cap = walker.nodes + opts.node_cap
        if frontier is None or frontier:
            try:
                walker.explore(0, frontier)
                frontier = []
            except _Interrupted:
                interrupted = True
                frontier = list(walker.path)
            if ckpt:
                ckpt.save(walker, frontier)
        nodes, best_len, best, found = walker.nodes, walker.best_len, walker.best, walker.found
        complete = walker.complete and not interrupted
    else:
        nodes, best_len, best, found, complete = _parallel(
            group, kind, max_len, opts.state_cap, first, collect_best, collect_length, opts.jobs)

    if autos:
        best = _close(autos, best)
        found = _close(autos, found)
    else:
        best = sorted(best)
        found = sorted(set(found))
    witnesses = [Sequence.of(best[0])] if best else []
    return SearchResult(kind=kind, value=best_len, witnesses=witnesses, nodes=nodes,
                        elapsed=time.perf_counter() - started, exhaustive=complete,
                        sequences=[Sequence.of(f) for f in found])


def small_davenport(group: Group, opts: SearchOptions | None = None) -> SearchResult:
    """Exact d(G): the longest product-one free sequence, with the lexicographically
    least witness in canonical order."""
    return _search(group, "small", opts or SearchOptions())


def large_davenport(group: Group, opts: SearchOptions | None = None) -> SearchResult:
    """Exact D(G): the longest minimal product-one sequence (lengths up to |G|)."""
    return _search(group, "large", opts or SearchOptions())


def enumerate_free(group: Group, length: int, opts: SearchOptions | None = None) -> list[Sequence]:
    """Every product-one free multiset of exactly ``length`` terms, sorted."""
    return enumerate_free_result(group, length, opts).sequences


def enumerate_free_result(group: Group, length: int,
                          opts: SearchOptions | None = None) -> SearchResult:
    opts = opts or SearchOptions()
    return _search(group, "enumerate", opts, collect_length=length,
                   max_len=min(length, group.order))


def free_search(group: Group, collect_length: int | None,
                opts: SearchOptions | None = None) -> SearchResult:
    """d(G) and, in the same traversal, all free multisets of ``collect_length`` terms."""
    return _search(group, "small", opts or SearchOptions(), collect_length=collect_length)
