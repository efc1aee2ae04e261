"""Set products, stabilizers and product sets of set sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence as Seq

from .errors import EmptySet, NonAbelianAmbient
from .groups import Group
from .sequences import ElementSet


def set_product(group: Group, A: ElementSet, B: ElementSet) -> ElementSet:
    """``AB = {a*b : a in A, b in B}``."""
    t = group.table
    mask = 0
    b_items = list(B)
    for a in A:
        row = t[a]
        for b in b_items:
            mask |= 1 << row[b]
    return ElementSet(mask, group.order)


def product_of_sets(group: Group, sets: Seq[ElementSet]) -> ElementSet:
    acc = sets[0]
    for A in sets[1:]:
        acc = set_product(group, acc, A)
    return acc


def _fixes(row: list[int], A: ElementSet) -> bool:
    mask = A.mask
    return all(mask >> row[a] & 1 for a in A)


def stabilizer(group: Group, A: ElementSet, within: ElementSet | None = None) -> ElementSet:
    """``{g : gA = A}``, optionally intersected with the subgroup ``within``."""
    if not A:
        raise EmptySet("stabilizer of the empty set")
    t = group.table
    a0 = next(iter(A))
    inv_a0 = group.inverses[a0]
    # g*a0 must land in A, so g ranges over A*a0^-1
    mask = 0
    for c in A:
        g = t[c][inv_a0]
        if within is not None and g not in within:
            continue
        if _fixes(t[g], A):
            mask |= 1 << g
    return ElementSet(mask, group.order)


def is_subgroup(group: Group, H: ElementSet) -> bool:
    if group.identity not in H:
        return False
    t = group.table
    items = list(H)
    return all(t[a][b] in H for a in items for b in items)


class KneserCheck(NamedTuple):
    holds: bool
    lhs: int
    rhs: int
    stabilizer: ElementSet


def kneser_check(group: Group, sets: Seq[ElementSet],
                 within: ElementSet | None = None) -> KneserCheck:
    """Compare ``|A_1...A_r|`` against ``sum |A_i H| - (r-1)|H|`` with ``H`` the
    stabilizer of the product.

    The ambient group (``group``, or the subgroup ``within``) must be abelian.
    """
    if within is None:
        if not group.is_abelian:
            raise NonAbelianAmbient(f"{group.name} is not abelian")
    else:
        t = group.table
        items = list(within)
        if not is_subgroup(group, within) or any(t[a][b] != t[b][a] for a in items for b in items):
            raise NonAbelianAmbient("ambient set is not an abelian subgroup")
        if any(not A.issubset(within) for A in sets):
            raise NonAbelianAmbient("sets leave the ambient subgroup")
    if not sets or any(not A for A in sets):
        raise EmptySet("Kneser needs nonempty sets")
    prod = product_of_sets(group, sets)
    H = stabilizer(group, prod, within)
    h = len(H)
    rhs = sum(len(set_product(group, A, H)) for A in sets) - (len(sets) - 1) * h
    return KneserCheck(len(prod) >= rhs, len(prod), rhs, H)


def pi_of_set_sequence(group: Group, sets: Seq[ElementSet]) -> ElementSet:
    """Products ``a_{i1}...a_{ik}`` over increasing index choices, one element per set.

    Keeps the set of products reachable with at least one chosen index; the
    empty choice is the implicit skip state.
    """
    reach = 0
    for A in sets:
        step = set_product(group, ElementSet(reach, group.order), A).mask if reach else 0
        reach |= step | A.mask
    return ElementSet(reach, group.order)


@dataclass
class Verdict:
    """Outcome of a lemma checker; truthy when the conclusion holds.

    ``vacuous`` marks instances that do not satisfy the lemma's hypotheses, for
    which the checker returns true without testing anything.
    """

    ok: bool
    vacuous: bool = False
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def set_sequence_bound_check(group: Group, sets: Seq[ElementSet], strict: bool = False) -> Verdict:
    """If ``1`` is not in ``Pi(A)`` then ``|Pi(A)| >= sum |A_i|``."""
    from .errors import HypothesisViolated

    P = pi_of_set_sequence(group, sets)
    if group.identity in P:
        if strict:
            raise HypothesisViolated("identity lies in Pi(A)")
        return Verdict(True, vacuous=True)
    total = sum(len(A) for A in sets)
    return Verdict(len(P) >= total, detail=f"|Pi(A)|={len(P)} sum={total}")
