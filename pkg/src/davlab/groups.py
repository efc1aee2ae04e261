"""Finite groups for product-one computations.

Two kinds of group are supported:

* metacyclic groups ``G = <x, y | x^m = y^n = 1, x^-1 y x = y^s>`` whose
  elements are the exponent pairs ``x^a y^b``;
* explicit Cayley-table groups, used mainly to cross-check the search engine
  against an independent multiplication.

Every element has a linear index in ``[0, |G|)``.  For metacyclic groups the
index of ``x^a y^b`` is ``a*n + b``; this ordering is a convention of the
library and is what the canonical multiset order in the searches refers to.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property
from typing import NamedTuple, Sequence

from .errors import InvalidPresentation, OrderCapExceeded, ParamOutOfRange

DEFAULT_AUTOMORPHISM_CAP = 42


class MetacyclicParams(NamedTuple):
    m: int
    n: int
    s: int

    @property
    def order(self) -> int:
        return self.m * self.n

    @property
    def valid(self) -> bool:
        try:
            return multiplicative_order(self.s, self.n) == self.m
        except ValueError:
            return False

    @property
    def star(self) -> bool:
        return star_condition(self)

    def __str__(self):
        return f"G({self.m},{self.n},{self.s})"


class Element(NamedTuple):
    """The group element ``x^a y^b``."""

    a: int
    b: int


def factorize(n: int) -> dict[int, int]:
    """Prime factorisation by trial division."""
    if n < 1:
        raise ValueError("factorize needs a positive integer")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    phi = n
    for p in factorize(n):
        phi = phi // p * (p - 1)
    return phi


def multiplicative_order(s: int, n: int) -> int:
    """Least k >= 1 with s^k = 1 (mod n).  Raises ValueError unless gcd(s, n) = 1."""
    if n < 1:
        raise ValueError("modulus must be positive")
    if n == 1:
        return 1
    if math.gcd(s, n) != 1:
        raise ValueError(f"{s} is not a unit modulo {n}")
    k = euler_phi(n)
    for p in factorize(k):
        while k % p == 0 and pow(s, k // p, n) == 1:
            k //= p
    return k


def star_condition(params: MetacyclicParams) -> bool:
    """True iff s has order m modulo every prime divisor of n."""
    m, n, s = params
    for q in factorize(n):
        if s % q == 0 or multiplicative_order(s, q) != m:
            return False
    return True


class Group:
    """A finite group whose elements are the integers ``0 .. order-1``.

    Use :func:`make_metacyclic`, :func:`cyclic` or :func:`make_table_group`
    rather than calling the constructor directly.
    """

    def __init__(self, order: int, *, params: MetacyclicParams | None = None,
                 table: Sequence[Sequence[int]] | None = None, identity: int = 0,
                 name: str | None = None):
        self.order = order
        self.params = params
        self.identity = identity
        self.name = name or (str(params) if params else f"table group of order {order}")
        if params is not None:
            m, n, s = params
            spow = [1 % n]
            for _ in range(m - 1):
                spow.append(spow[-1] * s % n)
            self._spow = tuple(spow)
        if table is not None:
            self.__dict__["table"] = [list(row) for row in table]

    def __repr__(self):
        return f"Group({self.name})"

    def __getstate__(self):
        # the byte translation tables are cheap to rebuild and large to pickle
        state = dict(self.__dict__)
        state.pop("_rtabs", None)
        return state

    @property
    def is_metacyclic(self) -> bool:
        return self.params is not None

    @property
    def s_powers(self) -> tuple[int, ...]:
        """``s^a mod n`` for ``a`` in ``[0, m)``."""
        return self._spow

    # -- index level ------------------------------------------------------

    @cached_property
    def table(self) -> list[list[int]]:
        m, n, _ = self.params
        spow = self._spow
        rows = []
        for a in range(m):
            for b in range(n):
                row = []
                for c in range(m):
                    base = ((a + c) % m) * n
                    bs = b * spow[c]
                    row.extend(base + (bs + d) % n for d in range(n))
                rows.append(row)
        return rows

    @cached_property
    def inverses(self) -> list[int]:
        if self.params is not None:
            return [self.index(self.inv(self.element(i))) for i in range(self.order)]
        e = self.identity
        return [row.index(e) for row in self.table]

    def mul_idx(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv_idx(self, i: int) -> int:
        return self.inverses[i]

    def power_idx(self, i: int, k: int) -> int:
        if k < 0:
            i, k = self.inverses[i], -k
        result, base = self.identity, i
        while k:
            if k & 1:
                result = self.table[result][base]
            base = self.table[base][base]
            k >>= 1
        return result

    def order_idx(self, i: int) -> int:
        k, g = 1, i
        while g != self.identity:
            g = self.table[g][i]
            k += 1
        return k

    @cached_property
    def element_orders(self) -> list[int]:
        return [self.order_idx(i) for i in range(self.order)]

    @cached_property
    def is_abelian(self) -> bool:
        t = self.table
        return all(t[i][j] == t[j][i] for i in range(self.order) for j in range(i))

    @cached_property
    def is_cyclic(self) -> bool:
        return self.order in self.element_orders

    @cached_property
    def _rtabs(self) -> list[list[list[int]]]:
        # byte-chunk lookup tables for right translation of bit masks
        nchunks = (self.order + 7) // 8
        tabs = []
        for h in range(self.order):
            col = [row[h] for row in self.table]
            per_h = []
            for j in range(nchunks):
                entry = [0] * 256
                for v in range(1, 256):
                    low = (v & -v).bit_length() - 1
                    g = j * 8 + low
                    bit = 1 << col[g] if g < self.order else 0
                    entry[v] = entry[v & (v - 1)] | bit
                per_h.append(entry)
            tabs.append(per_h)
        return tabs

    def rmul_mask(self, mask: int, h: int) -> int:
        """Bit mask of ``{g*h : g in mask}``."""
        tabs = self._rtabs[h]
        out = 0
        j = 0
        while mask:
            out |= tabs[j][mask & 0xFF]
            mask >>= 8
            j += 1
        return out

    # -- element level (metacyclic groups only) ---------------------------

    def _require_params(self) -> MetacyclicParams:
        if self.params is None:
            raise TypeError("exponent-pair elements need a metacyclic group")
        return self.params

    def index(self, g: Element) -> int:
        m, n, _ = self._require_params()
        return (g[0] % m) * n + g[1] % n

    def element(self, i: int) -> Element:
        _, n, _ = self._require_params()
        return Element(*divmod(i, n))

    def elements(self) -> list[Element]:
        return [self.element(i) for i in range(self.order)]

    @property
    def x(self) -> Element:
        return Element(1 % self._require_params().m, 0)

    @property
    def y(self) -> Element:
        return Element(0, 1 % self._require_params().n)

    def mul(self, g: Element, h: Element) -> Element:
        m, n, _ = self._require_params()
        return Element((g.a + h.a) % m, (g.b * self._spow[h.a] + h.b) % n)

    def inv(self, g: Element) -> Element:
        m, n, _ = self._require_params()
        a = (m - g.a) % m
        return Element(a, (-g.b * self._spow[a]) % n)

    def power(self, g: Element, k: int) -> Element:
        if k < 0:
            g, k = self.inv(g), -k
        result, base = Element(0, 0), g
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def element_order(self, g: Element) -> int:
        m, n, _ = self._require_params()
        # g^j lies in N exactly when m | j*a; then the N-part has order dividing n
        j = m // math.gcd(g.a, m)
        h = self.power(g, j)
        return j * (n // math.gcd(h.b, n))

    def quotient_map(self, g: Element) -> int:
        """Image of ``g`` in ``G/N``, which is cyclic of order m."""
        return g.a % self._require_params().m

    def in_normal(self, g: Element) -> bool:
        return g.a % self._require_params().m == 0

    def normal_subgroup_indices(self) -> list[int]:
        n = self._require_params().n
        return list(range(n))


def make_metacyclic(params: MetacyclicParams | tuple[int, int, int]) -> Group:
    """Build ``G_{m,n}`` for the triple (m, n, s)."""
    m, n, s = params
    params = MetacyclicParams(m, n, s)
    if m < 1 or n < 1:
        raise ParamOutOfRange(f"m and n must be positive, got m={m}, n={n}")
    if not 1 <= s <= max(n - 1, 1):
        raise ParamOutOfRange(f"s must lie in [1, {max(n - 1, 1)}], got {s}")
    if math.gcd(s, n) != 1:
        raise InvalidPresentation(f"gcd(s, n) = {math.gcd(s, n)} != 1")
    order = multiplicative_order(s, n)
    if order != m:
        raise InvalidPresentation(f"ord_{n}({s}) = {order} != m = {m}")
    return Group(m * n, params=params)


def cyclic(n: int) -> Group:
    """The cyclic group C_n, realised as the degenerate triple (1, n, 1)."""
    return make_metacyclic((1, n, 1))


def make_table_group(table: Sequence[Sequence[int]], name: str | None = None) -> Group:
    """Wrap an explicit multiplication table after checking the group axioms."""
    order = len(table)
    if order == 0 or any(len(row) != order for row in table):
        raise ValueError("multiplication table must be square and nonempty")
    rng = range(order)
    if any(not 0 <= v < order for row in table for v in row):
        raise ValueError("table entries out of range")
    ids = [e for e in rng if all(table[e][g] == g and table[g][e] == g for g in rng)]
    if len(ids) != 1:
        raise ValueError("table has no two-sided identity")
    e = ids[0]
    for g in rng:
        if sorted(table[g]) != list(rng) or e not in table[g]:
            raise ValueError(f"row {g} is not a permutation")
    for g, h, k in itertools.product(rng, repeat=3):
        if table[table[g][h]][k] != table[g][table[h][k]]:
            raise ValueError(f"not associative at ({g}, {h}, {k})")
    return Group(order, table=table, identity=e, name=name)


def generators(group: Group) -> list[int]:
    """A small generating set, chosen greedily in index order."""
    if group.params is not None:
        gens = [i for i in (group.index(group.x), group.index(group.y)) if i != group.identity]
        return gens
    t = group.table
    gens: list[int] = []
    span = {group.identity}
    for g in range(group.order):
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        span = set(span)
        while frontier:
            nxt = []
            for a in frontier:
                for h in gens:
                    p = t[a][h]
                    if p not in span:
                        span.add(p)
                        nxt.append(p)
            frontier = nxt
        if len(span) == group.order:
            break
    return gens


def automorphisms(group: Group, cap: int = DEFAULT_AUTOMORPHISM_CAP) -> list[tuple[int, ...]]:
    """All automorphisms of ``group`` as index permutations, identity first.

    Brute force over images of a generating set with matching element orders.
    """
    if group.order > cap:
        raise OrderCapExceeded(f"|G| = {group.order} exceeds automorphism cap {cap}")
    t = group.table
    e = group.identity
    gens = generators(group)
    orders = group.element_orders
    # a spanning tree of the Cayley graph: each element = parent * generator
    tree: list[tuple[int, int, int]] = []
    seen = {e}
    frontier = [e]
    while frontier:
        nxt = []
        for a in frontier:
            for gi, h in enumerate(gens):
                p = t[a][h]
                if p not in seen:
                    seen.add(p)
                    tree.append((p, a, gi))
                    nxt.append(p)
        frontier = nxt
    candidates = [[g for g in range(group.order) if orders[g] == orders[h]] for h in gens]
    found = []
    for images in itertools.product(*candidates):
        sigma = [-1] * group.order
        sigma[e] = e
        for p, a, gi in tree:
            sigma[p] = t[sigma[a]][images[gi]]
        if len(set(sigma)) != group.order:
            continue
        if all(sigma[t[a][h]] == t[sigma[a]][images[gi]]
               for a in range(group.order) for gi, h in enumerate(gens)):
            found.append(tuple(sigma))
    found.sort(key=lambda p: p != tuple(range(group.order)))
    return found
