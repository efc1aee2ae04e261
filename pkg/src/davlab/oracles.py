"""Executable statements of the product-one theorems for ``G_{m,n}`` under the
star condition, and checkers for the supporting lemmas.

Each lemma checker validates its hypotheses first.  Off-hypothesis instances
return a vacuous true :class:`Verdict` (or raise ``HypothesisViolated`` with
``strict=True``), so random generators may over-generate and filter.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field

from .errors import HypothesisViolated, NotStarGroup, WrongLength
from .groups import Element, Group, MetacyclicParams, divisors, factorize, make_metacyclic
from .search import SearchOptions, free_search, large_davenport
from .sequences import ElementSet, ProductTable, Sequence, big_pi, pi
from .setalg import Verdict, set_product


def predicted_d(m: int, n: int) -> int:
    return m + n - 2


def _vacuous(reason: str, strict: bool) -> Verdict:
    if strict:
        raise HypothesisViolated(reason)
    return Verdict(True, vacuous=True, detail=reason)


def _star_group(group: Group) -> bool:
    return group.params is not None and group.params.m >= 2 and group.params.star


# -- the inverse theorem ---------------------------------------------------------

@dataclass(frozen=True)
class FormMatch:
    variant: str  # "A" or "B"
    a: int
    b: tuple[int, ...]
    c: int | None


def _is_g23(group: Group) -> bool:
    m, n, _ = group.params
    return (m, n) == (2, 3)


def form_sequences(group: Group) -> list[Sequence]:
    """Every sequence of the extremal shapes, built from their parameters."""
    m, n, _ = group.params
    idx = group.index
    out = set()
    if _is_g23(group):
        out.add(Sequence.of([idx(Element(1, 0)), idx(Element(1, 1)), idx(Element(1, 2))]))
        for b in range(3):
            for c in (1, 2):
                out.add(Sequence.of([idx(Element(1, b))] + [idx(Element(0, c))] * 2))
        return sorted(out, key=Sequence.terms)
    units_m = [a for a in range(1, m) if math.gcd(a, m) == 1]
    units_n = [c for c in range(1, n) if math.gcd(c, n) == 1]
    for a in units_m:
        for bs in itertools.combinations_with_replacement(range(n), m - 1):
            head = [idx(Element(a, b)) for b in bs]
            for c in units_n:
                out.add(Sequence.of(head + [idx(Element(0, c))] * (n - 1)))
    return sorted(out, key=Sequence.terms)


def match_form(group: Group, seq: Sequence) -> FormMatch | None:
    """Read off the extremal-shape parameters of ``seq``, or None."""
    if not _star_group(group):
        raise NotStarGroup(f"{group.name} is not a star group with m >= 2")
    m, n, _ = group.params
    if len(seq) != m + n - 2:
        raise WrongLength(f"|S| = {len(seq)} but m+n-2 = {m + n - 2}")
    elems = [group.element(g) for g in seq]
    if _is_g23(group):
        if sorted(elems) == [(1, 0), (1, 1), (1, 2)]:
            return FormMatch("B", 1, (0, 1, 2), None)
        heads = [g for g in elems if g.a == 1]
        tail = [g for g in elems if g.a == 0]
        if len(heads) == 1 and len(tail) == 2 and tail[0] == tail[1] and tail[0].b:
            return FormMatch("B", 1, (heads[0].b,), tail[0].b)
        return None
    tail = [g for g in elems if g.a == 0]
    heads = [g for g in elems if g.a != 0]
    if len(tail) != n - 1 or len(set(tail)) != 1:
        return None
    c = tail[0].b
    if math.gcd(c, n) != 1:
        return None
    a_values = {g.a for g in heads}
    if len(a_values) != 1:
        return None
    a = a_values.pop()
    if math.gcd(a, m) != 1:
        return None
    return FormMatch("A", a, tuple(sorted(g.b for g in heads)), c)


@dataclass
class InverseCheck:
    ok: bool
    found: int
    predicted: int
    missing: list[Sequence] = field(default_factory=list)
    extra: list[Sequence] = field(default_factory=list)
    exhaustive: bool = True

    def __bool__(self) -> bool:
        return self.ok


def compare_forms(group: Group, free: list[Sequence], exhaustive: bool = True) -> InverseCheck:
    predicted = set(form_sequences(group))
    found = set(free)
    missing = sorted(predicted - found, key=Sequence.terms)
    extra = sorted(found - predicted, key=Sequence.terms)
    ok = exhaustive and not missing and not extra
    return InverseCheck(ok, len(found), len(predicted), missing, extra, exhaustive)


def verify_inverse_forms(group: Group, opts: SearchOptions | None = None) -> InverseCheck:
    """All free sequences of length m+n-2 versus the sequences of the extremal shapes."""
    if not _star_group(group):
        raise NotStarGroup(f"{group.name} is not a star group with m >= 2")
    m, n, _ = group.params
    result = free_search(group, m + n - 2, opts)
    return compare_forms(group, result.sequences, result.exhaustive)


# -- bounds ------------------------------------------------------------------------

def bound_checks(group: Group, d: int, D: int | None = None) -> Verdict:
    """``d+1 <= D <= |G|`` and, for non-cyclic groups, ``d <= |G|/p + p - 2``."""
    order = group.order
    problems = []
    if D is not None and not d + 1 <= D <= order:
        problems.append(f"d+1 <= D <= |G| fails: d={d}, D={D}, |G|={order}")
    if not group.is_cyclic:
        p = min(factorize(order))
        if d > order // p + p - 2:
            problems.append(f"d={d} > |G|/p+p-2 = {order // p + p - 2}")
    return Verdict(not problems, detail="; ".join(problems))


# -- lemmas on cyclic groups ---------------------------------------------------

def _require_cyclic(group: Group) -> int:
    if not group.is_cyclic:
        raise ValueError(f"{group.name} is not cyclic")
    return group.order


def longest_part_check(group: Group, seq: Sequence, sub: Sequence, strict: bool = False) -> Verdict:
    """T a longest product-one subsequence of S with ``|T| = |S| - d(C_n)`` leaves
    every non-identity support element of S in ``S * T^[-1]``."""
    n = _require_cyclic(group)
    e = group.identity
    if not sub.divides(seq):
        return _vacuous("T does not divide S", strict)
    if e not in pi(group, sub):
        return _vacuous("T is not product-one", strict)
    table = ProductTable.build(group, seq)
    longest = max(size for cell, size in zip(table.cells, table.sizes) if cell >> e & 1)
    if len(sub) != longest:
        return _vacuous("T is not a longest product-one subsequence", strict)
    if len(sub) != len(seq) - (n - 1):
        return _vacuous("|T| != |S| - d(G)", strict)
    rest = seq.without(sub)
    lost = [g for g in seq.support if g != e and rest.multiplicity(g) == 0]
    return Verdict(not lost, detail=f"support elements consumed by T: {lost}")


def cyclic_extremal_check(group: Group, seq: Sequence, strict: bool = False) -> Verdict:
    """A free sequence of length n-1 over C_n (n >= 3) is n-1 copies of one generator."""
    n = _require_cyclic(group)
    if n < 3:
        return _vacuous("n < 3", strict)
    if len(seq) != n - 1:
        return _vacuous("|S| != n-1", strict)
    if group.identity in big_pi(group, seq):
        return _vacuous("S is not product-one free", strict)
    support = seq.support
    ok = len(support) == 1 and group.element_orders[support[0]] == n
    return Verdict(ok, detail=f"support {support}")


# -- lemmas on G_{m,n} ---------------------------------------------------------

def _conjugates(group: Group, u: Element) -> list[Element]:
    """``u^(s^i)`` for i in [0, m)."""
    return [group.power(u, sp) for sp in group.s_powers]


def structure_check(params: MetacyclicParams | tuple[int, int, int],
                  elements: list[Element] | None = None, strict: bool = False) -> Verdict:
    """(i) n = 1 mod m; (ii) gcd(s^a - 1, n) = 1 when m does not divide a;
    (iii) powers of an element outside N meet N only in the identity.

    Part (iii) runs over ``elements`` if given, else over all of G when
    |G| <= 60; larger groups without ``elements`` only get (i) and (ii).
    """
    params = MetacyclicParams(*params)
    m, n, s = params
    if m < 2 or not params.valid or not params.star:
        return _vacuous("not a star-valid triple with m >= 2", strict)
    problems = []
    if n % m != 1 % m:
        problems.append(f"(i) n mod m = {n % m}")
    sa = 1
    for a in range(1, m):
        sa = sa * s % n
        if math.gcd(sa - 1, n) != 1:
            problems.append(f"(ii) gcd(s^{a}-1, n) = {math.gcd(sa - 1, n)}")
    group = make_metacyclic(params)
    one = Element(0, 0)
    if elements is None and params.order <= 60:
        # exhaustive: walk every power of every g outside N
        for g in (Element(a, b) for a in range(1, m) for b in range(n)):
            h = g
            while h != one:
                if h.a == 0:
                    problems.append(f"(iii) {g} has a power {h} in N other than 1")
                    break
                h = group.mul(h, g)
    for g in elements or ():
        if g.a % m == 0:
            continue
        # g^k lies in N iff k is a multiple of the order of g's image in G/N
        first = group.power(g, m // math.gcd(g.a, m))
        if first != one:
            problems.append(f"(iii) {g} has a power {first} in N other than 1")
    return Verdict(not problems, detail="; ".join(problems))


def subgroup_of_n(group: Group, order: int) -> ElementSet:
    """The unique subgroup of N = <y> of the given order."""
    n = group.params.n
    step = n // order
    return ElementSet.from_indices(group.order, (group.index(Element(0, k * step))
                                                 for k in range(order)))


def conjugate_orbit_check(group: Group, M: ElementSet, u: Element, strict: bool = False) -> Verdict:
    """Conjugation orbits ``u^(s^i)`` of u in N against a subgroup M of N."""
    if not _star_group(group):
        return _vacuous("not a star group", strict)
    n = group.params.n
    if u.a % group.params.m or M.size != group.order:
        return _vacuous("u not in N", strict)
    if not any(M == subgroup_of_n(group, d) for d in divisors(n)):
        return _vacuous("M is not a subgroup of N", strict)
    orbit = _conjugates(group, u)
    idx = [group.index(v) for v in orbit]
    u_in_m = group.index(u) in M
    problems = []
    if any(i in M for i in idx) and not u_in_m:
        problems.append("(i) a conjugate lies in M but u does not")
    for i, j in itertools.combinations(range(len(orbit)), 2):
        quotient = group.mul(orbit[i], group.inv(orbit[j]))
        if group.index(quotient) in M and not u_in_m:
            problems.append(f"(ii) u^(s^{i}), u^(s^{j}) share a coset of M")
            break
    if u != Element(0, 0):
        if len(set(orbit)) != len(orbit) or Element(0, 0) in orbit:
            problems.append("(iii) conjugates not pairwise distinct and nonidentity")
    return Verdict(not problems, detail="; ".join(problems))


def _minimal_zero_sum(values: list[int], m: int) -> bool:
    if sum(values) % m:
        return False
    for size in range(1, len(values)):
        for combo in itertools.combinations(values, size):
            if sum(combo) % m == 0:
                return False
    return True


def quotient_minimal_check(group: Group, seq: Sequence, strict: bool = False) -> Verdict:
    """For T with minimal product-one image in G/N: (i) each u != 1 in pi(T) has
    at least |T| distinct conjugates ``u^(s^r)`` in pi(T); (ii) every subgroup M
    of N missing pi(T) has ``|pi(T) M| >= |T| |M|``."""
    if not _star_group(group):
        return _vacuous("not a star group", strict)
    m = group.params.m
    t = len(seq)
    if t == 0 or t > m:
        return _vacuous("image in G/N cannot be minimal product-one", strict)
    if not _minimal_zero_sum([group.element(g).a for g in seq], m):
        return _vacuous("image in G/N is not minimal product-one", strict)
    P = pi(group, seq)
    problems = []
    for ui in P:
        if ui == group.identity:
            continue
        orbit = {group.index(v) for v in _conjugates(group, group.element(ui))}
        hits = sum(1 for v in orbit if v in P)
        if hits < t:
            problems.append(f"(i) u={group.element(ui)} has {hits} < {t} conjugates in pi(T)")
    for d in divisors(group.params.n):
        M = subgroup_of_n(group, d)
        if P & M:
            continue
        PM = set_product(group, P, M)
        if len(PM) < t * d:
            problems.append(f"(ii) |pi(T)M| = {len(PM)} < {t}*{d}")
    return Verdict(not problems, detail="; ".join(problems))


def coset_translate_check(group: Group, seq: Sequence, u: Element, strict: bool = False) -> Verdict:
    """T of m terms in one coset x^a N (gcd(a, m) = 1), u in N:
    ``pi(T) u^(s^i) is contained in pi(T * u)`` for every i."""
    if not _star_group(group):
        return _vacuous("not a star group", strict)
    m = group.params.m
    if len(seq) != m:
        return _vacuous("|T| != m", strict)
    cosets = {group.element(g).a for g in seq}
    if len(cosets) != 1:
        return _vacuous("terms of T in different cosets", strict)
    a = cosets.pop()
    if a == 0 or math.gcd(a, m) != 1:
        return _vacuous("coset exponent not a unit mod m", strict)
    if u.a % m:
        return _vacuous("u not in N", strict)
    P = pi(group, seq)
    bigger = pi(group, seq + Sequence.of([group.index(u)]))
    problems = []
    for i, v in enumerate(_conjugates(group, u)):
        shifted = ElementSet(group.rmul_mask(P.mask, group.index(v)), group.order)
        if not shifted.issubset(bigger):
            problems.append(f"pi(T) u^(s^{i}) not inside pi(T u)")
    return Verdict(not problems, detail="; ".join(problems))


def normal_part_check(group: Group, seq: Sequence, strict: bool = False) -> Verdict:
    """A product-one free S whose image in G/N is product-one has
    ``|Pi(S) cap N| >= |S|``."""
    if not _star_group(group):
        return _vacuous("not a star group", strict)
    m, n, _ = group.params
    if len(seq) == 0:
        return _vacuous("empty sequence", strict)
    if sum(group.element(g).a for g in seq) % m:
        return _vacuous("image in G/N is not product-one", strict)
    P = big_pi(group, seq)
    if group.identity in P:
        return _vacuous("S is not product-one free", strict)
    N = ElementSet.from_indices(group.order, range(n))
    hits = len(P & N)
    return Verdict(hits >= len(seq), detail=f"|Pi(S) cap N| = {hits}, |S| = {len(seq)}")


# -- the parameter sweep --------------------------------------------------------

def star_triples(max_order: int) -> list[MetacyclicParams]:
    """Star-valid (m, n, s) with m >= 2 and m*n <= max_order, sorted."""
    out = []
    for m in range(2, max_order // 2 + 1):
        for n in range(2, max_order // m + 1):
            for s in range(1, n):
                p = MetacyclicParams(m, n, s)
                if math.gcd(s, n) == 1 and p.valid and p.star:
                    out.append(p)
    return sorted(out)


def sweep_record(params: MetacyclicParams, opts: SearchOptions | None = None,
                 inverse: bool = True, large: bool = False) -> dict:
    """Search one group and compare with the predicted constant and shapes."""
    opts = opts or SearchOptions()
    group = make_metacyclic(params)
    m, n, s = params
    started = time.perf_counter()
    target = predicted_d(m, n)
    result = free_search(group, m + n - 2 if inverse else None, opts)
    nodes = result.nodes
    D = None
    if large:
        big = large_davenport(group, opts)
        nodes += big.nodes
        D = big.value if big.exhaustive else None
    record = {
        "m": m, "n": n, "s": s,
        "star": params.star,
        "order": group.order,
        "d_computed": result.value,
        "d_predicted": target,
        "match": result.value == target if result.exhaustive else None,
        "inverse_ok": compare_forms(group, result.sequences, result.exhaustive).ok
        if inverse and result.exhaustive else None,
        "exhaustive": result.exhaustive,
        "D_computed": D,
        "bounds_ok": bound_checks(group, result.value, D).ok if result.exhaustive else None,
        "nodes": nodes,
        "ms": round((time.perf_counter() - started) * 1000),
    }
    return record


def verify_conjecture_sweep(max_order: int = 42, opts: SearchOptions | None = None,
                            inverse_max_order: int | None = None,
                            large_max_order: int = 6) -> list[dict]:
    """Run :func:`sweep_record` for every star triple up to ``max_order``."""
    records = []
    for params in star_triples(max_order):
        order = params.order
        inverse = inverse_max_order is None or order <= inverse_max_order
        records.append(sweep_record(params, opts, inverse=inverse,
                                    large=order <= large_max_order))
    return sorted(records, key=lambda r: (r["m"], r["n"], r["s"]))
