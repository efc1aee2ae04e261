"""Sequences (finite multisets) over a group and their product sets.

The central object is :class:`ProductTable`, which stores ``pi(T)`` for
every sub-multiset ``T`` of a sequence.  Sub-multisets are addressed by a
mixed-radix integer whose digits are the multiplicities of the distinct
elements, in increasing element order; the most recently added element is
the most significant digit, so appending an element only appends cells.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import (LengthOutOfRange, QuotientNotProductOne, SequenceSyntaxError,
                     StateSpaceCapExceeded)
from .groups import Element, Group

DEFAULT_STATE_CAP = 1 << 22


@dataclass(frozen=True)
class Sequence:
    """An unordered sequence over a group, stored as sorted (index, count) pairs."""

    counts: tuple[tuple[int, int], ...] = ()

    @classmethod
    def of(cls, terms: Iterable[int]) -> "Sequence":
        acc: dict[int, int] = {}
        for g in terms:
            acc[g] = acc.get(g, 0) + 1
        return cls(tuple(sorted(acc.items())))

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "Sequence":
        if any(k < 0 for k in counts.values()):
            raise ValueError("multiplicities must be non-negative")
        return cls(tuple(sorted((g, k) for g, k in counts.items() if k)))

    def __len__(self) -> int:
        return sum(k for _, k in self.counts)

    @property
    def length(self) -> int:
        return len(self)

    def __iter__(self) -> Iterator[int]:
        for g, k in self.counts:
            for _ in range(k):
                yield g

    def terms(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(g for g, _ in self.counts)

    def multiplicity(self, g: int) -> int:
        return dict(self.counts).get(g, 0)

    @property
    def max_multiplicity(self) -> int:
        """``h(S)``; zero for the empty sequence."""
        return max((k for _, k in self.counts), default=0)

    def __add__(self, other: "Sequence") -> "Sequence":
        acc = dict(self.counts)
        for g, k in other.counts:
            acc[g] = acc.get(g, 0) + k
        return Sequence.from_counts(acc)

    def divides(self, other: "Sequence") -> bool:
        """True if self is a subsequence of ``other``."""
        mine = dict(other.counts)
        return all(mine.get(g, 0) >= k for g, k in self.counts)

    def without(self, other: "Sequence") -> "Sequence":
        """``S * T^[-1]``: delete the terms of ``other`` from self."""
        if not other.divides(self):
            raise ValueError("not a subsequence")
        acc = dict(self.counts)
        for g, k in other.counts:
            acc[g] -= k
        return Sequence.from_counts(acc)

    def sub_multisets(self) -> Iterator["Sequence"]:
        """All sub-multisets, the empty one first."""
        support = [g for g, _ in self.counts]
        for ks in itertools.product(*(range(k + 1) for _, k in self.counts)):
            yield Sequence(tuple((g, k) for g, k in zip(support, ks) if k))

    def lattice_size(self) -> int:
        size = 1
        for _, k in self.counts:
            size *= k + 1
        return size


@dataclass(frozen=True)
class ElementSet:
    """A subset of a group of the given order, as a bit mask over element indices."""

    mask: int
    size: int

    @classmethod
    def from_indices(cls, size: int, indices: Iterable[int]) -> "ElementSet":
        mask = 0
        for i in indices:
            if not 0 <= i < size:
                raise ValueError(f"element index {i} outside group of order {size}")
            mask |= 1 << i
        return cls(mask, size)

    @classmethod
    def full(cls, size: int) -> "ElementSet":
        return cls((1 << size) - 1, size)

    def __contains__(self, i: int) -> bool:
        return bool(self.mask >> i & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        while mask:
            low = mask & -mask
            yield low.bit_length() - 1
            mask ^= low

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask | other.mask, self.size)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask & other.mask, self.size)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        return ElementSet(self.mask & ~other.mask, self.size)

    def issubset(self, other: "ElementSet") -> bool:
        return self.mask & ~other.mask == 0

    def indices(self) -> list[int]:
        return list(self)


class ProductTable:
    """``pi(T)`` for every sub-multiset ``T`` of a sequence built by :meth:`push`.

    Elements must be pushed in non-decreasing index order.  ``pop`` undoes the
    last push, which is what the backtracking searches rely on.
    """

    def __init__(self, group: Group, cap: int = DEFAULT_STATE_CAP):
        self.group = group
        self.cap = cap
        self.cells: list[int] = [1 << group.identity]
        self.supp: list[tuple[tuple[int, int], ...]] = [()]
        self.sizes: list[int] = [0]
        self.digits: list[list[int]] = []  # [element, count, stride]
        self.unions: list[int] = [0]
        self._history: list[bool] = []

    @classmethod
    def build(cls, group: Group, seq: Sequence, cap: int = DEFAULT_STATE_CAP) -> "ProductTable":
        if seq.lattice_size() > cap:
            raise StateSpaceCapExceeded(
                f"sub-multiset lattice of size {seq.lattice_size()} exceeds cap {cap}")
        table = cls(group, cap)
        for g in seq:
            table.push(g)
        return table

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def length(self) -> int:
        return self.sizes[-1]

    @property
    def last(self) -> int:
        return self.digits[-1][0] if self.digits else -1

    def sequence(self) -> Sequence:
        return Sequence(tuple((g, k) for g, k, _ in self.digits))

    def pi_mask(self) -> int:
        return self.cells[-1]

    def big_pi_mask(self) -> int:
        return self.unions[-1]

    def push(self, g: int) -> None:
        digits = self.digits
        if digits and digits[-1][0] == g:
            top = digits[-1]
            stride, level = top[2], top[1] + 1
            new_digit = False
        elif not digits or g > digits[-1][0]:
            stride, level = len(self.cells), 1
            new_digit = True
        else:
            raise ValueError("elements must be pushed in non-decreasing order")
        if stride * (level + 1) > self.cap:
            raise StateSpaceCapExceeded(
                f"sub-multiset lattice of size {stride * (level + 1)} exceeds cap {self.cap}")
        if new_digit:
            digits.append([g, 1, stride])
        else:
            top[1] = level
        self._history.append(new_digit)

        cells, supp, sizes = self.cells, self.supp, self.sizes
        rtabs = self.group._rtabs
        tab_g = rtabs[g]
        base = stride * level
        union = self.unions[-1]
        for r in range(stride):
            c = base + r
            # P(T) = union over h in supp(T) of P(T - h) * h
            mask = cells[c - stride]
            acc = 0
            j = 0
            while mask:
                acc |= tab_g[j][mask & 0xFF]
                mask >>= 8
                j += 1
            sr = supp[r]
            for h, st in sr:
                mask = cells[c - st]
                tab = rtabs[h]
                j = 0
                while mask:
                    acc |= tab[j][mask & 0xFF]
                    mask >>= 8
                    j += 1
            cells.append(acc)
            supp.append(sr + ((g, stride),))
            sizes.append(sizes[r] + level)
            union |= acc
        self.unions.append(union)

    def pop(self) -> None:
        new_digit = self._history.pop()
        top = self.digits[-1]
        keep = top[2] * top[1]
        if new_digit:
            self.digits.pop()
        else:
            top[1] -= 1
        del self.cells[keep:]
        del self.supp[keep:]
        del self.sizes[keep:]
        self.unions.pop()

    def product_one_cells(self) -> list[int]:
        """Indices of nonempty cells whose product set contains the identity."""
        e = 1 << self.group.identity
        return [c for c in range(1, len(self.cells)) if self.cells[c] & e]

    def is_minimal_product_one(self) -> bool:
        cells = self.cells
        e = 1 << self.group.identity
        full = len(cells) - 1
        if full == 0 or not cells[full] & e:
            return False
        for c in range(1, full):
            if cells[c] & e and cells[full - c] & e:
                return False
        return True


def _table(group: Group, seq: Sequence, cap: int) -> ProductTable:
    return ProductTable.build(group, seq, cap)


def pi(group: Group, seq: Sequence, cap: int = DEFAULT_STATE_CAP) -> ElementSet:
    """Products of all of ``seq`` over all orderings; ``pi(empty) = {1}``."""
    return ElementSet(_table(group, seq, cap).pi_mask(), group.order)


def big_pi(group: Group, seq: Sequence, cap: int = DEFAULT_STATE_CAP) -> ElementSet:
    """Products over all nonempty sub-multisets."""
    return ElementSet(_table(group, seq, cap).big_pi_mask(), group.order)


def pi_n(group: Group, seq: Sequence, k: int, cap: int = DEFAULT_STATE_CAP) -> ElementSet:
    """Union of ``pi(T)`` over sub-multisets ``T`` with ``|T| = k``."""
    if not 1 <= k <= len(seq):
        raise LengthOutOfRange(f"k = {k} outside [1, {len(seq)}]")
    table = _table(group, seq, cap)
    mask = 0
    for cell, size in zip(table.cells, table.sizes):
        if size == k:
            mask |= cell
    return ElementSet(mask, group.order)


def is_product_one(group: Group, seq: Sequence, cap: int = DEFAULT_STATE_CAP) -> bool:
    return group.identity in pi(group, seq, cap)


def is_product_one_free(group: Group, seq: Sequence, cap: int = DEFAULT_STATE_CAP) -> bool:
    return group.identity not in big_pi(group, seq, cap)


def is_minimal_product_one(group: Group, seq: Sequence, cap: int = DEFAULT_STATE_CAP) -> bool:
    if len(seq) == 0:
        raise LengthOutOfRange("minimality is defined for nonempty sequences")
    return _table(group, seq, cap).is_minimal_product_one()


def factor_by_quotient(group: Group, seq: Sequence) -> list[Sequence]:
    """Split ``seq`` into parts whose images in G/N are minimal product-one.

    Repeatedly removes the first smallest zero-sum (mod m) choice of terms,
    scanning terms in canonical order.  A smallest zero-sum choice has no
    proper zero-sum part, so each extracted image is minimal.
    """
    m = group.params.m
    terms = list(seq)
    if sum(group.element(g).a for g in terms) % m:
        raise QuotientNotProductOne("image in G/N is not a product-one sequence")
    parts = []
    while terms:
        images = [group.element(g).a for g in terms]
        chosen = None
        for size in range(1, len(terms) + 1):
            for combo in itertools.combinations(range(len(terms)), size):
                if sum(images[i] for i in combo) % m == 0:
                    chosen = combo
                    break
            if chosen is not None:
                break
        parts.append(Sequence.of(terms[i] for i in chosen))
        drop = set(chosen)
        terms = [g for i, g in enumerate(terms) if i not in drop]
    return parts


# -- text and JSON forms ------------------------------------------------------

_TERM = re.compile(
    r"^(?:(?P<one>1|e)|(?P<g>g(?P<gi>\d+))|"
    r"(?P<x>x)(?:\^(?P<a>-?\d+))?(?:\*(?P<xy>y)(?:\^(?P<xb>-?\d+))?)?|"
    r"(?P<y>y)(?:\^(?P<b>-?\d+))?)"
    r"(?:\[\^(?P<k>\d+)\])?$")


def format_element(group: Group, g: int) -> str:
    if not group.is_metacyclic:
        return f"g{g}"
    a, b = group.element(g)
    parts = []
    if a:
        parts.append("x" if a == 1 else f"x^{a}")
    if b:
        parts.append("y" if b == 1 else f"y^{b}")
    return "*".join(parts) or "1"


def format_sequence(group: Group, seq: Sequence) -> str:
    """Space separated terms ``x^a*y^b[^k]`` in canonical order."""
    out = []
    for g, k in seq.counts:
        term = format_element(group, g)
        out.append(term if k == 1 else f"{term}[^{k}]")
    return " ".join(out)


def parse_sequence(group: Group, text: str) -> Sequence:
    acc: dict[int, int] = {}
    for token in text.split():
        match = _TERM.match(token)
        if match is None:
            raise SequenceSyntaxError(f"cannot parse term {token!r}")
        k = int(match["k"]) if match["k"] else 1
        if k < 1:
            raise SequenceSyntaxError(f"multiplicity must be positive in {token!r}")
        if match["g"]:
            idx = int(match["gi"])
            if idx >= group.order:
                raise SequenceSyntaxError(f"element {token!r} outside the group")
        elif match["one"]:
            idx = group.identity
        else:
            if not group.is_metacyclic:
                raise SequenceSyntaxError("x/y terms need a metacyclic group")
            a = (int(match["a"]) if match["a"] else 1) if match["x"] else 0
            if match["xy"]:
                b = int(match["xb"]) if match["xb"] else 1
            else:
                b = (int(match["b"]) if match["b"] else 1) if match["y"] else 0
            idx = group.index(Element(a, b))
        acc[idx] = acc.get(idx, 0) + k
    return Sequence.from_counts(acc)


def sequence_to_json(group: Group, seq: Sequence) -> str:
    if group.is_metacyclic:
        terms = [[*group.element(g), k] for g, k in seq.counts]
    else:
        terms = [[g, k] for g, k in seq.counts]
    return json.dumps({"terms": terms}, separators=(",", ":"))


def sequence_from_json(group: Group, text: str) -> Sequence:
    data = json.loads(text)
    acc: dict[int, int] = {}
    for term in data["terms"]:
        if group.is_metacyclic:
            a, b, k = term
            idx = group.index(Element(a, b))
        else:
            idx, k = term
        acc[idx] = acc.get(idx, 0) + k
    return Sequence.from_counts(acc)
