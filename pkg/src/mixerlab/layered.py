"""Layered 2n-bit instances: embedding an n-bit mixer into a grid.

A 2n-bit string is read as a pair (r, z) of n-bit numbers: r is the row, z
the column. The base problem is embedded in one or more rows; every other
element is its own component. Four variants are provided:

* ``row0``: the whole base problem lives in row 0, and the label collapses
  all of row 0 to a single value (an intentionally invalid label when the
  base has more than one component);
* ``row_j``: component 1 stays in row 0, everything else moves to row j;
* ``nowhere``: only component 1 is embedded; the label is valid;
* ``grover``: a point function g selects the embedding at query time
  (g identically zero gives ``nowhere``; g(j) = 1 gives ``row_j``).

The grover variant meters its point function: one g-query per classical
evaluation of the mixer or label, two per coherent evaluation.

The base mixer is only defined on S, but the row embeddings act on whole
rows; garbage columns are moved by a cyclic shift within the (sorted)
garbage set, keyed by the index's canonical rank. This keeps every variant
cross-mixing-free and fully connected on its garbage component.
"""

from dataclasses import dataclass

import numpy as np

from .bits import pair_decode, pair_encode
from .errors import InvalidArgumentError
from .instances import PointFunction
from .oracle import LabelOracle, MixerOracle
from .partition import GroundTruthPartition

VARIANTS = ("row0", "row_j", "nowhere", "grover")


@dataclass
class LayeredInstance:
    base_oracle: MixerOracle
    base_truth: GroundTruthPartition
    variant: str
    j: int | None
    g: PointFunction | None
    mixer2n: MixerOracle
    label2n: LabelOracle
    truth2n: GroundTruthPartition
    pi: np.ndarray | None = None     # hiding permutation on 2n-bit strings
    sigma: np.ndarray | None = None  # label-scrambling permutation

    @property
    def n(self) -> int:
        return self.base_truth.n

    def start_element(self, s: int) -> int:
        """The start element handed to a counterfeiter: pi((0, s))."""
        x = pair_encode(0, s, self.n)
        return int(self.pi[x]) if self.pi is not None else x


def _base_action(base_oracle: MixerOracle, base_truth: GroundTruthPartition):
    """Row action on all 2^n columns: the base mixer on S, a rank-keyed
    cyclic shift on garbage."""
    garbage = base_truth.garbage
    gpos = {z: p for p, z in enumerate(garbage)}
    rank = {enc: r for r, enc in enumerate(base_oracle.index_ints)}

    def act(enc: int, z: int, sign: int) -> int:
        if base_oracle.is_member(z):
            return (
                base_oracle._apply_fn(enc, z)
                if sign > 0
                else base_oracle._inverse_fn(enc, z)
            )
        shift = sign * rank[enc]
        return garbage[(gpos[z] + shift) % len(garbage)]

    return act


def make_layered_instance(
    base_oracle: MixerOracle,
    base_truth: GroundTruthPartition,
    variant: str,
    j: int | None = None,
    g: PointFunction | None = None,
) -> LayeredInstance:
    """Build the 2n-bit mixer, label, and ground truth for one variant."""
    if variant not in VARIANTS:
        raise InvalidArgumentError(f"unknown variant {variant!r}")
    n = base_truth.n
    dim = 1 << n
    if variant == "row_j":
        if j is None or j == 0:
            raise InvalidArgumentError("row_j requires j != 0")
        if not 0 < j < dim:
            raise InvalidArgumentError(f"row index {j} out of range")
    if variant == "grover":
        if g is None:
            raise InvalidArgumentError("grover variant requires a point function")
        if g.n != n:
            raise InvalidArgumentError("point function width must match base n")

    act = _base_action(base_oracle, base_truth)
    s1 = frozenset(base_truth.component_elements(1))

    def in_s1(z: int) -> bool:
        return z in s1

    # ---- mixer ------------------------------------------------------------

    def mixer_fn(enc: int, x: int, sign: int) -> int:
        r, z = pair_decode(x, n)
        if variant == "row0":
            return pair_encode(0, act(enc, z, sign), n) if r == 0 else x
        if variant == "nowhere":
            if r == 0 and in_s1(z):
                return pair_encode(0, act(enc, z, sign), n)
            return x
        if variant == "row_j":
            if r == 0 and in_s1(z):
                return pair_encode(0, act(enc, z, sign), n)
            if r == j and not in_s1(z):
                return pair_encode(j, act(enc, z, sign), n)
            return x
        # grover: the point function selects the embedding at query time
        if r == 0 and in_s1(z):
            return pair_encode(0, act(enc, z, sign), n)
        if g.peek(r) == 1 and not in_s1(z):
            return pair_encode(r, act(enc, z, sign), n)
        return x

    def charge_g(*_args, coherent=False):
        g.queries += 2 if coherent else 1

    mixer_hook = None
    if variant == "grover":
        mixer_hook = lambda enc, x, coherent: charge_g(coherent=coherent)

    mixer2n = MixerOracle(
        n=2 * n,
        index_width=base_oracle.index_width,
        members=range(dim * dim),
        index_ints=base_oracle.index_ints,
        apply_fn=lambda enc, x: mixer_fn(enc, x, +1),
        inverse_fn=lambda enc, x: mixer_fn(enc, x, -1),
        name=f"layered-{variant}({base_oracle.name})",
        on_metered_apply=mixer_hook,
    )

    # ---- label --------------------------------------------------------------

    def label_fn(x: int) -> int:
        r, z = pair_decode(x, n)
        if variant == "row0":
            return 0 if r == 0 else x
        if variant == "nowhere":
            return 0 if r == 0 and in_s1(z) else x
        if variant == "row_j":
            if (r == 0 and in_s1(z)) or (r == j and not in_s1(z)):
                return 0
            return x
        if r == 0 and in_s1(z):
            return 0
        if g.peek(r) == 1 and not in_s1(z):
            return 0
        return x

    label_hook = None
    if variant == "grover":
        label_hook = lambda x, coherent: charge_g(coherent=coherent)

    label2n = LabelOracle(
        width=2 * n,
        label_width=2 * n,
        fn=label_fn,
        valid=_label_is_valid(base_truth, variant, g),
        on_metered_query=label_hook,
        name=f"label-{variant}",
    )

    truth2n = _layered_truth(base_truth, variant, j, g)
    return LayeredInstance(
        base_oracle, base_truth, variant, j, g, mixer2n, label2n, truth2n
    )


def _label_is_valid(truth: GroundTruthPartition, variant, g) -> bool:
    whole_row0 = truth.num_components == 1 and not truth.garbage
    if variant == "nowhere":
        return True
    if variant == "row0":
        return whole_row0
    if variant == "row_j":
        return whole_row0
    # grover: all-zeros g means the nowhere label; otherwise a hidden row
    return g.y is None or whole_row0


def _layered_truth(
    truth: GroundTruthPartition, variant: str, j, g
) -> GroundTruthPartition:
    n = truth.n
    dim = 1 << n
    effective = variant
    if variant == "grover":
        if g.y is None:
            effective = "nowhere"
        elif g.y == 0:
            effective = "row0"
        else:
            effective, j = "row_j", g.y

    components: list[list[int]] = []
    placed: set[int] = set()

    def place(row: int, cols) -> None:
        elems = [pair_encode(row, z, n) for z in cols]
        components.append(elems)
        placed.update(elems)

    if effective == "row0":
        for a in range(1, truth.num_components + 1):
            place(0, truth.component_elements(a))
        if truth.garbage:
            place(0, truth.garbage)
    elif effective == "nowhere":
        place(0, truth.component_elements(1))
    else:  # row_j
        place(0, truth.component_elements(1))
        for a in range(2, truth.num_components + 1):
            place(j, truth.component_elements(a))
        if truth.garbage:
            place(j, truth.garbage)

    for x in range(dim * dim):
        if x not in placed:
            components.append([x])
    return GroundTruthPartition.from_components(2 * n, components)


def hide_instance(instance: LayeredInstance, rng) -> LayeredInstance:
    """Conjugate the mixer by a random permutation pi and scramble labels
    with an independent sigma, both stored as explicit tables."""
    if instance.pi is not None:
        raise InvalidArgumentError("instance is already hidden")
    d = 1 << (2 * instance.n)
    pi = rng.permutation(d)
    sigma = rng.permutation(d)
    return apply_hiding(instance, pi, sigma)


def apply_hiding(
    instance: LayeredInstance, pi: np.ndarray, sigma: np.ndarray
) -> LayeredInstance:
    """Hide with explicit permutation tables (identity tables leave the
    instance's behavior unchanged)."""
    pi = np.asarray(pi)
    sigma = np.asarray(sigma)
    pi_inv = np.argsort(pi)
    inner_m = instance.mixer2n
    inner_l = instance.label2n

    mixer2n = MixerOracle(
        n=inner_m.n,
        index_width=inner_m.index_width,
        members=inner_m.members,
        index_ints=inner_m.index_ints,
        apply_fn=lambda enc, x: int(pi[inner_m._apply_fn(enc, int(pi_inv[x]))]),
        inverse_fn=lambda enc, x: int(pi[inner_m._inverse_fn(enc, int(pi_inv[x]))]),
        name=f"hidden-{inner_m.name}",
        on_metered_apply=inner_m._on_metered_apply,
    )
    label2n = LabelOracle(
        width=inner_l.width,
        label_width=inner_l.label_width,
        fn=lambda x: int(sigma[inner_l._fn(int(pi_inv[x]))]),
        valid=inner_l._valid,
        on_metered_query=inner_l._on_metered_query,
        name=f"hidden-{inner_l.name}",
    )
    component_of = {
        int(pi[x]): cid for x, cid in instance.truth2n.component_of.items()
    }
    truth2n = GroundTruthPartition(2 * instance.n, component_of)
    return LayeredInstance(
        instance.base_oracle,
        instance.base_truth,
        instance.variant,
        instance.j,
        instance.g,
        mixer2n,
        label2n,
        truth2n,
        pi=pi,
        sigma=sigma,
    )
