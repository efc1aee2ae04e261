"""Exact product-one (zero-sum) computations over finite metacyclic groups."""

from .groups import (Element, Group, MetacyclicParams, automorphisms, cyclic, make_metacyclic,
                     make_table_group, star_condition)
from .search import (SearchOptions, SearchResult, enumerate_free, large_davenport,
                     small_davenport)
from .sequences import (ElementSet, ProductTable, Sequence, big_pi, factor_by_quotient,
                        format_sequence, is_minimal_product_one, is_product_one_free,
                        parse_sequence, pi, pi_n)

__version__ = "0.1.0"
