"""Seeded randomized (and exhaustive) suites for the lemma checkers.

Every suite draws instances from a ``random.Random(seed)``, discards the ones
that miss the lemma's hypotheses, and keeps going until ``trials`` on-hypothesis
instances have been checked.  Failures are kept with the instance for replay.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .groups import Element, Group, MetacyclicParams, cyclic, divisors, make_metacyclic
from .oracles import (longest_part_check, cyclic_extremal_check, structure_check, conjugate_orbit_check,
                      quotient_minimal_check, coset_translate_check, normal_part_check, star_triples,
                      subgroup_of_n)
from .search import enumerate_free
from .sequences import ElementSet, ProductTable, Sequence
from .setalg import kneser_check, set_sequence_bound_check

LEMMAS = ("kneser", "set-bound", "longest-part", "cyclic-extremal", "structure", "conjugate-orbits", "quotient-minimal", "coset-translate", "normal-part")
MAX_ATTEMPT_FACTOR = 200


@dataclass
class SuiteResult:
    lemma: str
    seed: int
    trials: int = 0
    vacuous: int = 0
    failures: list[str] = field(default_factory=list)
    exhaustive: bool = False
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self) -> dict:
        return {
            "lemma": self.lemma,
            "seed": self.seed,
            "trials": self.trials,
            "vacuous": self.vacuous,
            "failures": len(self.failures),
            "exhaustive": self.exhaustive,
            "ok": self.ok,
            "first_failure": self.failures[0] if self.failures else None,
            "ms": round(self.elapsed * 1000),
        }


@lru_cache(maxsize=None)
def _group(params: tuple[int, int, int]) -> Group:
    return make_metacyclic(params)


@lru_cache(maxsize=None)
def _star_groups(max_order: int = 42) -> tuple[MetacyclicParams, ...]:
    return tuple(star_triples(max_order))


def _random_star_group(rng: random.Random) -> Group:
    return _group(tuple(rng.choice(_star_groups())))


def _random_subset(rng: random.Random, pool: list[int], size: int, order: int) -> ElementSet:
    return ElementSet.from_indices(order, rng.sample(pool, min(size, len(pool))))


# -- one generator per lemma; each returns (verdict, description) -------------

def _gen_kneser(rng):
    if rng.random() < 0.75:
        group = _group((1, rng.randint(1, 100), 1))
        pool, within = list(range(group.order)), None
    else:
        group = _random_star_group(rng)
        n = group.params.n
        pool = list(range(n))
        within = ElementSet.from_indices(group.order, pool)
    r = rng.randint(1, 4)
    sets = [_random_subset(rng, pool, rng.randint(1, 8), group.order) for _ in range(r)]
    check = kneser_check(group, sets, within)
    return check.holds, f"{group.name} sets={[A.indices() for A in sets]} -> {check}"


def _gen_set_sequence_bound(rng):
    if rng.random() < 0.5:
        group = _group((1, rng.randint(2, 100), 1))
        pool = list(range(1, group.order))
    else:
        group = _random_star_group(rng)
        pool = list(range(1, group.params.n))
    r = rng.randint(1, 4)
    sets = [_random_subset(rng, pool, rng.randint(1, 3), group.order) for _ in range(r)]
    return set_sequence_bound_check(group, sets), f"{group.name} sets={[A.indices() for A in sets]}"


def _gen_longest_part(rng):
    n = rng.randint(2, 10)
    group = _group((1, n, 1))
    g = rng.randrange(1, n)
    base = [g] * (n - 1) if rng.random() < 0.7 else []
    extra = [rng.randrange(n) for _ in range(rng.randint(0, 6))]
    seq = Sequence.of(base + extra)
    table = ProductTable.build(group, seq)
    e = group.identity
    longest = max(size for cell, size in zip(table.cells, table.sizes) if cell >> e & 1)
    cands = [c for c, (cell, size) in enumerate(zip(table.cells, table.sizes))
             if cell >> e & 1 and size == longest]
    c = rng.choice(cands)
    sub = Sequence(tuple((h, (c // st) % (k + 1))
                         for h, k, st in table.digits if (c // st) % (k + 1)))
    return longest_part_check(group, seq, sub), f"C_{n} S={seq.terms()} T={sub.terms()}"


def _gen_structure(rng):
    n = rng.randint(3, 10_000)
    s = rng.randint(2, n - 1)
    if math.gcd(s, n) != 1:
        return None, ""
    from .groups import multiplicative_order

    m = multiplicative_order(s, n)
    params = MetacyclicParams(m, n, s)
    if m < 2 or not params.star:
        return None, ""
    elements = [Element(rng.randrange(1, m), rng.randrange(n)) for _ in range(4)]
    return structure_check(params, elements), f"{params} elements={elements}"


def _gen_conjugate_orbit(rng):
    group = _random_star_group(rng)
    n = group.params.n
    d = rng.choice(divisors(n))
    M = subgroup_of_n(group, d)
    u = Element(0, rng.randrange(n))
    return conjugate_orbit_check(group, M, u), f"{group.name} |M|={d} u={u}"


def _gen_quotient_minimal(rng):
    group = _random_star_group(rng)
    m, n, _ = group.params
    t = rng.randint(1, m)
    if t == 1:
        images = [0]
    else:
        images = [rng.randrange(1, m) for _ in range(t - 1)]
        images.append(-sum(images) % m)
    seq = Sequence.of(group.index(Element(a, rng.randrange(n))) for a in images)
    return quotient_minimal_check(group, seq), f"{group.name} T={seq.terms()}"


def _gen_coset_translate(rng):
    group = _random_star_group(rng)
    m, n, _ = group.params
    a = rng.choice([a for a in range(1, m) if math.gcd(a, m) == 1])
    seq = Sequence.of(group.index(Element(a, rng.randrange(n))) for _ in range(m))
    u = Element(0, rng.randrange(n))
    return coset_translate_check(group, seq, u), f"{group.name} T={seq.terms()} u={u}"


def _random_free_walk(rng, group: Group, length: int) -> list[int]:
    """A random product-one free multiset built in canonical order."""
    table = ProductTable(group)
    inv = group.inverses
    path: list[int] = []
    while len(path) < length:
        forbidden = table.big_pi_mask() | 1 << group.identity
        start = path[-1] if path else 0
        options = [g for g in range(start, group.order) if not forbidden >> inv[g] & 1]
        if not options:
            break
        g = rng.choice(options[: max(1, len(options) // 2)] if rng.random() < 0.5 else options)
        table.push(g)
        path.append(g)
    return path


def _gen_normal_part(rng):
    group = _random_star_group(rng)
    m, n, _ = group.params
    path = _random_free_walk(rng, group, rng.randint(1, min(8, m + n - 2)))
    images = [group.element(g).a for g in path]
    # drop terms from the end until the image in G/N is product-one
    while path and sum(images) % m:
        path.pop()
        images.pop()
    if not path:
        return None, ""
    seq = Sequence.of(path)
    return normal_part_check(group, seq), f"{group.name} S={seq.terms()}"


_GENERATORS = {
    "kneser": _gen_kneser,
    "set-bound": _gen_set_sequence_bound,
    "longest-part": _gen_longest_part,
    "structure": _gen_structure,
    "conjugate-orbits": _gen_conjugate_orbit,
    "quotient-minimal": _gen_quotient_minimal,
    "coset-translate": _gen_coset_translate,
    "normal-part": _gen_normal_part,
}


def _cyclic_extremal_exhaustive(result: SuiteResult, max_n: int = 10) -> None:
    for n in range(3, max_n + 1):
        group = cyclic(n)
        for seq in enumerate_free(group, n - 1):
            verdict = cyclic_extremal_check(group, seq)
            result.trials += 1
            if not verdict:
                result.failures.append(f"C_{n} S={seq.terms()}: {verdict.detail}")
    result.exhaustive = True


def _structure_exhaustive(result: SuiteResult, max_order: int = 60) -> None:
    for params in star_triples(max_order):
        verdict = structure_check(params)
        result.trials += 1
        if not verdict:
            result.failures.append(f"{params}: {verdict.detail}")


def run_suite(lemma: str, trials: int = 10_000, seed: int = 0) -> SuiteResult:
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma {lemma!r}; choose from {', '.join(LEMMAS)}")
    started = time.perf_counter()
    result = SuiteResult(lemma, seed)
    if lemma == "cyclic-extremal":
        _cyclic_extremal_exhaustive(result)
    else:
        if lemma == "structure":
            _structure_exhaustive(result)
        rng = random.Random(f"{lemma}:{seed}")
        gen = _GENERATORS[lemma]
        target = result.trials + trials
        attempts = 0
        while result.trials < target and attempts < MAX_ATTEMPT_FACTOR * trials:
            attempts += 1
            verdict, description = gen(rng)
            if verdict is None or getattr(verdict, "vacuous", False):
                result.vacuous += 1
                continue
            result.trials += 1
            if not verdict:
                detail = getattr(verdict, "detail", "")
                result.failures.append(f"{description}: {detail}".rstrip(": "))
    result.elapsed = time.perf_counter() - started
    return result


def run_all(trials: int = 10_000, seed: int = 0, lemmas=LEMMAS) -> list[SuiteResult]:
    return [run_suite(lemma, trials, seed) for lemma in lemmas]
