"""Black-box query access to component mixers and labeling functions.

A :class:`MixerOracle` bundles the six classical query operations (membership
tests, samplers, forward/inverse application). Algorithms under test go
through a :class:`QuerySession`, which meters every query and can enforce a
budget. Privileged code (constructors, verifiers) may use the underscore-free
``*_int`` accessors, which do not count queries.
"""

from dataclasses import dataclass

import numpy as np

from .bits import as_int, from_bits, to_bits
from .errors import BudgetExhaustedError, InvalidArgumentError, MalformedQueryError


@dataclass(frozen=True)
class MixerIndex:
    """An index into the mixer family, as a fixed-width bit string."""

    bits: str

    def as_int(self) -> int:
        return from_bits(self.bits)


class MixerOracle:
    """An indexed family of maps on a subset S of n-bit strings.

    ``index_ints`` is the canonical enumeration of valid index encodings;
    its order defines the basis of the quantum index register. The first
    entry is the identity map for every construction in this package.
    """

    def __init__(
        self,
        n: int,
        index_width: int,
        members,
        index_ints,
        apply_fn,
        inverse_fn,
        name: str = "",
        on_metered_apply=None,
    ):
        self.n = n
        self.index_width = index_width
        self.members = tuple(sorted(members))
        self.index_ints = tuple(index_ints)
        self.name = name
        self._member_set = frozenset(self.members)
        self._index_set = frozenset(self.index_ints)
        self._apply_fn = apply_fn
        self._inverse_fn = inverse_fn
        # Side-channel accounting (e.g. point-function queries) charged only
        # when an application goes through a metered session.
        self._on_metered_apply = on_metered_apply
        self._perm_cache: dict[tuple[int, int], np.ndarray] = {}

    # -- privileged accessors (not metered) --------------------------------

    def is_member(self, x: int) -> bool:
        return x in self._member_set

    def is_index(self, enc: int) -> bool:
        return enc in self._index_set

    def apply_int(self, enc: int, x: int) -> int:
        if enc not in self._index_set:
            raise InvalidArgumentError(f"{enc} is not a valid index encoding")
        if x not in self._member_set:
            raise InvalidArgumentError(f"{x} is not a member of S")
        return self._apply_fn(enc, x)

    def inverse_int(self, enc: int, x: int) -> int:
        if enc not in self._index_set:
            raise InvalidArgumentError(f"{enc} is not a valid index encoding")
        if x not in self._member_set:
            raise InvalidArgumentError(f"{x} is not a member of S")
        return self._inverse_fn(enc, x)

    def permutation_table(self, enc: int, alpha: int = 1) -> np.ndarray:
        """Basis map of M_i^alpha on all 2^n strings; identity off S.

        Raises if the resulting table is not a bijection (exact mixers always
        are; the Grover embedding with a marked point is not).
        """
        key = (enc, alpha)
        table = self._perm_cache.get(key)
        if table is None:
            dim = 1 << self.n
            fn = {1: self._apply_fn, -1: self._inverse_fn}.get(alpha)
            if alpha == 0:
                table = np.arange(dim)
            else:
                table = np.array(
                    [fn(enc, s) if s in self._member_set else s for s in range(dim)]
                )
                if len(set(table.tolist())) != dim:
                    raise InvalidArgumentError(
                        f"mixer {self.name or '?'} index {enc} is not a bijection"
                    )
            self._perm_cache[key] = table
        return table

    # -- session factory ----------------------------------------------------

    def session(self, rng=None, budget=None, coherent=False) -> "QuerySession":
        return QuerySession(self, rng=rng, budget=budget, coherent=coherent)


class QuerySession:
    """Metered handle to a mixer oracle.

    One session per trial; a session must not be shared between concurrent
    activities. ``coherent=True`` routes applications through the oracle's
    coherent-evaluation path (relevant only where that path carries extra
    side-channel accounting, e.g. point-function queries).
    """

    def __init__(self, oracle: MixerOracle, rng=None, budget=None, coherent=False):
        self.oracle = oracle
        self.rng = rng if rng is not None else np.random.default_rng()
        self.budget = budget
        self.coherent = coherent
        self.classical_queries = 0
        self.quantum_queries = 0
        self.apply_calls = 0
        self.quantum_breakdown: dict[str, int] = {}

    def _charge(self):
        self.classical_queries += 1
        self._check_budget()

    def charge_quantum(self, kind: str, count: int = 1):
        self.quantum_queries += count
        self.quantum_breakdown[kind] = self.quantum_breakdown.get(kind, 0) + count
        self._check_budget()

    def _check_budget(self):
        if self.budget is not None:
            if self.classical_queries + self.quantum_queries > self.budget:
                raise BudgetExhaustedError(
                    f"query budget {self.budget} exhausted"
                )

    def _index_int(self, i) -> int:
        if isinstance(i, MixerIndex):
            i = i.bits
        return as_int(i, self.oracle.index_width)

    # -- the six query operations -------------------------------------------

    def test_membership_s(self, x) -> bool:
        self._charge()
        return as_int(x, self.oracle.n) in self.oracle._member_set

    def sample_s(self):
        self._charge()
        x = self.oracle.members[self.rng.integers(len(self.oracle.members))]
        return int(x)

    def sample_s_bits(self) -> str:
        return to_bits(self.sample_s(), self.oracle.n)

    def test_membership_ind(self, i) -> bool:
        self._charge()
        return self._index_int(i) in self.oracle._index_set

    def sample_ind(self) -> MixerIndex:
        self._charge()
        enc = self.oracle.index_ints[self.rng.integers(len(self.oracle.index_ints))]
        return MixerIndex(to_bits(enc, self.oracle.index_width))

    def apply(self, i, x):
        self._charge()
        self.apply_calls += 1
        enc = self._index_int(i)
        xi = as_int(x, self.oracle.n)
        if enc not in self.oracle._index_set:
            raise InvalidArgumentError(f"invalid index encoding {enc}")
        if xi not in self.oracle._member_set:
            raise InvalidArgumentError(f"{x!r} is not a member of S")
        if self.oracle._on_metered_apply is not None:
            self.oracle._on_metered_apply(enc, xi, self.coherent)
        out = self.oracle._apply_fn(enc, xi)
        return to_bits(out, self.oracle.n) if isinstance(x, str) else out

    def apply_inverse(self, i, x):
        self._charge()
        self.apply_calls += 1
        enc = self._index_int(i)
        xi = as_int(x, self.oracle.n)
        if enc not in self.oracle._index_set:
            raise InvalidArgumentError(f"invalid index encoding {enc}")
        if xi not in self.oracle._member_set:
            raise InvalidArgumentError(f"{x!r} is not a member of S")
        if self.oracle._on_metered_apply is not None:
            self.oracle._on_metered_apply(enc, xi, self.coherent)
        out = self.oracle._inverse_fn(enc, xi)
        return to_bits(out, self.oracle.n) if isinstance(x, str) else out


class LabelOracle:
    """A queryable labeling function with its own query counter.

    ``valid`` records whether the label is consistent with the mixer it was
    built for; it is constructor metadata, hidden from algorithms under test.
    """

    def __init__(self, width: int, label_width: int, fn, valid=None,
                 on_metered_query=None, name: str = ""):
        self.width = width
        self.label_width = label_width
        self._fn = fn
        self._valid = valid
        self._on_metered_query = on_metered_query
        self.name = name
        self.queries = 0

    @property
    def valid(self):
        return self._valid

    def label_int(self, x: int) -> int:
        """Privileged evaluation, not metered."""
        return self._fn(x)

    def query(self, x, coherent=False):
        self.queries += 1
        xi = as_int(x, self.width)
        if self._on_metered_query is not None:
            self._on_metered_query(xi, coherent)
        out = self._fn(xi)
        return to_bits(out, self.label_width) if isinstance(x, str) else out

    def session(self, budget=None, coherent=False) -> "LabelSession":
        return LabelSession(self, budget=budget, coherent=coherent)


class LabelSession:
    """Metered, optionally budgeted handle to a label oracle."""

    def __init__(self, label: LabelOracle, budget=None, coherent=False):
        self.label = label
        self.budget = budget
        self.coherent = coherent
        self.queries = 0

    def query(self, x):
        self.queries += 1
        if self.budget is not None and self.queries > self.budget:
            raise BudgetExhaustedError(f"label budget {self.budget} exhausted")
        return self.label.query(x, coherent=self.coherent)
