"""Concrete mixer families.

Four base families are provided:

* offset mixers: exact synthetic mixers shifting within each component's
  canonical ordering (TV = 0 by construction);
* graph-permutation mixers: graphs on v vertices under vertex permutations,
  components are isomorphism classes;
* coset mixers: Z_N under addition of subgroup elements, components are
  cosets of the generated subgroup;
* Grover-embedding mixers: modular shifts gated by a point function, so that
  distinguishing one component from two requires finding the marked point.

All constructions return oracles whose canonical index order starts with the
identity map.
"""

import itertools
from dataclasses import dataclass, field

from .errors import InvalidArgumentError
from .oracle import MixerOracle
from .partition import GroundTruthPartition


def _field_width(size: int) -> int:
    return max(1, (size - 1).bit_length())


# ---------------------------------------------------------------------------
# Offset mixers
# ---------------------------------------------------------------------------

def make_offset_mixer(truth: GroundTruthPartition) -> MixerOracle:
    """Exact mixer: index = one offset per component, applied cyclically.

    Ind is the set of tuples (k_1, ..., k_c) with k_a < |S_a|, encoded as
    concatenated fixed-width fields. Uniform offsets give exactly uniform
    outputs within each component.
    """
    c = truth.num_components
    comps = [truth.component_elements(a) for a in range(1, c + 1)]
    sizes = [len(comp) for comp in comps]
    widths = [_field_width(size) for size in sizes]
    index_width = sum(widths)
    pos = {x: (a, p) for a, comp in enumerate(comps) for p, x in enumerate(comp)}

    def encode(ks) -> int:
        enc = 0
        for k, w in zip(ks, widths):
            enc = (enc << w) | k
        return enc

    def decode(enc: int) -> tuple[int, ...]:
        ks = []
        for w in reversed(widths):
            ks.append(enc & ((1 << w) - 1))
            enc >>= w
        return tuple(reversed(ks))

    index_ints = [encode(ks) for ks in itertools.product(*(range(s) for s in sizes))]

    def apply_fn(enc: int, x: int) -> int:
        a, p = pos[x]
        k = decode(enc)[a]
        return comps[a][(p + k) % sizes[a]]

    def inverse_fn(enc: int, x: int) -> int:
        a, p = pos[x]
        k = decode(enc)[a]
        return comps[a][(p - k) % sizes[a]]

    return MixerOracle(
        n=truth.n,
        index_width=index_width,
        members=truth.members,
        index_ints=index_ints,
        apply_fn=apply_fn,
        inverse_fn=inverse_fn,
        name="offset",
    )


# ---------------------------------------------------------------------------
# Graph-permutation mixers
# ---------------------------------------------------------------------------

def _edge_pairs(v: int) -> list[tuple[int, int]]:
    return [(u, w) for u in range(v) for w in range(u + 1, v)]


def graph_apply_permutation(perm: tuple[int, ...], x: int, v: int) -> int:
    """Relabel the vertices of the edge-indicator graph ``x`` by ``perm``."""
    pairs = _edge_pairs(v)
    n = len(pairs)
    idx = {pq: k for k, pq in enumerate(pairs)}
    out = 0
    for k, (u, w) in enumerate(pairs):
        if (x >> (n - 1 - k)) & 1:
            a, b = perm[u], perm[w]
            if a > b:
                a, b = b, a
            k2 = idx[(a, b)]
            out |= 1 << (n - 1 - k2)
    return out


def make_graph_iso_mixer(v: int) -> tuple[MixerOracle, GroundTruthPartition]:
    """Graphs on v vertices under vertex permutations.

    S is every n-bit edge-indicator string (upper-triangular adjacency bits
    in row-major order), Ind is the full symmetric group, and components are
    isomorphism classes found by orbit enumeration. Each orbit element is hit
    |Aut(G)| times, so a uniform permutation mixes exactly (TV = 0).
    """
    if v < 2 or v > 5:
        raise InvalidArgumentError("vertex count must be between 2 and 5")
    n = v * (v - 1) // 2
    w = _field_width(v)
    index_width = v * w
    perms = sorted(itertools.permutations(range(v)))

    def encode(perm) -> int:
        enc = 0
        for image in perm:
            enc = (enc << w) | image
        return enc

    def decode(enc: int) -> tuple[int, ...] | None:
        fields = []
        for _ in range(v):
            fields.append(enc & ((1 << w) - 1))
            enc >>= w
        perm = tuple(reversed(fields))
        return perm if sorted(perm) == list(range(v)) else None

    index_ints = [encode(p) for p in perms]

    def apply_fn(enc: int, x: int) -> int:
        return graph_apply_permutation(decode(enc), x, v)

    def inverse_fn(enc: int, x: int) -> int:
        perm = decode(enc)
        inv = tuple(perm.index(u) for u in range(v))
        return graph_apply_permutation(inv, x, v)

    # orbit enumeration for the ground truth
    component_of: dict[int, int] = {}
    next_id = 1
    for x in range(1 << n):
        if x in component_of:
            continue
        orbit = {graph_apply_permutation(p, x, v) for p in perms}
        for y in sorted(orbit):
            component_of[y] = next_id
        next_id += 1
    truth = GroundTruthPartition(n, component_of)

    oracle = MixerOracle(
        n=n,
        index_width=index_width,
        members=range(1 << n),
        index_ints=index_ints,
        apply_fn=apply_fn,
        inverse_fn=inverse_fn,
        name=f"graphiso-v{v}",
    )
    return oracle, truth


# ---------------------------------------------------------------------------
# Coset mixers
# ---------------------------------------------------------------------------

def subgroup_closure(modulus: int, generators) -> tuple[int, ...]:
    """Closure of the generators under addition mod ``modulus``."""
    h = {0}
    frontier = [0]
    gens = [g % modulus for g in generators]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = (x + g) % modulus
            if y not in h:
                h.add(y)
                frontier.append(y)
    return tuple(sorted(h))


def make_coset_mixer(
    modulus: int, generators
) -> tuple[MixerOracle, GroundTruthPartition]:
    """Z_N under addition by elements of the subgroup H = <generators>.

    Components are the cosets of H; indices are the elements of H themselves,
    encoded in n bits. An empty generator set gives H = {0} and every element
    its own component.
    """
    if modulus < 1:
        raise InvalidArgumentError("modulus must be positive")
    n = _field_width(modulus)
    h = subgroup_closure(modulus, generators)
    hset = set(h)
    component_of: dict[int, int] = {}
    next_id = 1
    for x in range(modulus):
        if x in component_of:
            continue
        for e in hset:
            component_of[(x + e) % modulus] = next_id
        next_id += 1
    truth = GroundTruthPartition(n, component_of)

    def apply_fn(enc: int, x: int) -> int:
        return (x + enc) % modulus

    def inverse_fn(enc: int, x: int) -> int:
        return (x - enc) % modulus

    oracle = MixerOracle(
        n=n,
        index_width=n,
        members=range(modulus),
        index_ints=h,
        apply_fn=apply_fn,
        inverse_fn=inverse_fn,
        name=f"coset-N{modulus}",
    )
    return oracle, truth


# ---------------------------------------------------------------------------
# Grover-embedding mixers
# ---------------------------------------------------------------------------

@dataclass
class PointFunction:
    """A Boolean function that is 1 on at most one input, with a query meter."""

    n: int
    y: int | None = None
    queries: int = field(default=0)

    def __call__(self, r: int) -> int:
        self.queries += 1
        return 1 if self.y is not None and r == self.y else 0

    def peek(self, r: int) -> int:
        """Unmetered evaluation for privileged construction code."""
        return 1 if self.y is not None and r == self.y else 0


def make_grover_mixer(n: int, g: PointFunction) -> MixerOracle:
    """Modular-shift mixer gated by a point function.

    M_i(x) = (x + i) mod 2^n when g(x) = g(x + i) = 0, else x. With g all
    zeros this is a single exactly-mixing component; with a marked point y,
    {y} is its own component. Each application costs two queries to g.

    Note the case formula is only approximately invertible near the marked
    point; round-trip identities hold exactly only for g all zeros.
    """
    dim = 1 << n

    def apply_fn(enc: int, x: int) -> int:
        if g.peek(x) == 0 and g.peek((x + enc) % dim) == 0:
            return (x + enc) % dim
        return x

    def inverse_fn(enc: int, x: int) -> int:
        if g.peek(x) == 0 and g.peek((x - enc) % dim) == 0:
            return (x - enc) % dim
        return x

    def charge(enc: int, x: int, coherent: bool):
        g.queries += 2

    return MixerOracle(
        n=n,
        index_width=n,
        members=range(dim),
        index_ints=range(dim),
        apply_fn=apply_fn,
        inverse_fn=inverse_fn,
        name=f"grover-n{n}",
        on_metered_apply=charge,
    )


def make_grover_partition(n: int, y: int | None) -> GroundTruthPartition:
    """Ground truth for the Grover mixer: one component, or all-but-y + {y}."""
    dim = 1 << n
    if y is None:
        return GroundTruthPartition(n, {x: 1 for x in range(dim)})
    component_of = {x: 1 for x in range(dim) if x != y}
    component_of[y] = 2
    return GroundTruthPartition(n, component_of)


# ---------------------------------------------------------------------------
# Config loading
# ---------------------------------------------------------------------------

@dataclass
class InstanceBundle:
    """A constructed instance: oracle, ground truth, and optional extras."""

    oracle: MixerOracle
    truth: GroundTruthPartition
    point: PointFunction | None = None
    layered: object | None = None  # LayeredInstance when family == "layered"


def instance_from_config(spec: dict) -> InstanceBundle:
    """Build an instance from a JSON-style spec.

    Families: offset (explicit partition), graphiso (v), coset (modulus,
    generators), grover (n, point), layered (base spec + variant + hide).
    Construction is deterministic given the spec's seed.
    """
    import numpy as np

    spec = dict(spec)
    family = spec.pop("family", None)
    seed = spec.pop("seed", 0)
    if family == "offset":
        truth = GroundTruthPartition.from_json_dict(spec.pop("partition"))
        _reject_unknown(spec, "offset")
        return InstanceBundle(make_offset_mixer(truth), truth)
    if family == "graphiso":
        v = int(spec.pop("v"))
        _reject_unknown(spec, "graphiso")
        oracle, truth = make_graph_iso_mixer(v)
        return InstanceBundle(oracle, truth)
    if family == "coset":
        modulus = int(spec.pop("modulus"))
        generators = [int(g) for g in spec.pop("generators")]
        _reject_unknown(spec, "coset")
        oracle, truth = make_coset_mixer(modulus, generators)
        return InstanceBundle(oracle, truth)
    if family == "grover":
        n = int(spec.pop("n"))
        point = spec.pop("point", None)
        y = None if point is None else int(point, 2) if isinstance(point, str) else int(point)
        _reject_unknown(spec, "grover")
        g = PointFunction(n, y)
        return InstanceBundle(make_grover_mixer(n, g), make_grover_partition(n, y), point=g)
    if family == "layered":
        from .layered import hide_instance, make_layered_instance

        base = instance_from_config(spec.pop("base"))
        variant = spec.pop("variant")
        j = spec.pop("j", None)
        point = spec.pop("point", None)
        hide = bool(spec.pop("hide", False))
        _reject_unknown(spec, "layered")
        g = None
        if variant == "grover":
            y = None if point is None else int(point, 2) if isinstance(point, str) else int(point)
            g = PointFunction(base.truth.n, y)
        inst = make_layered_instance(
            base.oracle, base.truth, variant, j=None if j is None else int(j), g=g
        )
        if hide:
            inst = hide_instance(inst, np.random.default_rng([seed, 0x91D]))
        return InstanceBundle(inst.mixer2n, inst.truth2n, point=g, layered=inst)
    raise InvalidArgumentError(f"unknown instance family: {family!r}")


def _reject_unknown(leftover: dict, family: str):
    if leftover:
        raise InvalidArgumentError(
            f"unknown fields for family {family}: {sorted(leftover)}"
        )
