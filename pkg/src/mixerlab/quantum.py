"""Dense state-vector engine for small-n quantum query experiments.

States are complex amplitude vectors shaped by a tuple of register
dimensions. All operators are applied exactly; measurement outcomes are
sampled from Born probabilities with a caller-supplied generator.

Quantum query accounting: preparing or projecting onto the uniform-S or
uniform-Ind state charges one query; a controlled-mixer application charges
one query; the component-projector measurement charges exactly two
controlled-mixer queries (compute and uncompute) plus two index-register
queries (prepare and reflect).
"""

from dataclasses import dataclass

import numpy as np

from .bits import as_int
from .errors import InvalidArgumentError
from .oracle import MixerOracle, QuerySession

NORM_TOL = 1e-12
PROJECTOR_TOL = 1e-9
TRACE_TOL = 1e-10

STATE_DIM_CAP = 1 << 22

ALPHA_VALUES = (-1, 0, 1)  # basis order of the control register


class QuantumState:
    """A unit-norm complex amplitude tensor over declared registers."""

    __slots__ = ("dims", "amp")

    def __init__(self, dims, amp, normalize=False):
        dims = tuple(int(d) for d in dims)
        amp = np.asarray(amp, dtype=complex).reshape(dims)
        if amp.size > STATE_DIM_CAP:
            raise InvalidArgumentError(f"state dimension {amp.size} exceeds cap")
        norm = np.linalg.norm(amp)
        if normalize:
            if norm == 0:
                raise InvalidArgumentError("cannot normalize the zero vector")
            amp = amp / norm
        elif abs(norm - 1.0) > 1e-9:
            raise InvalidArgumentError(f"state is not normalized (norm {norm})")
        self.dims = dims
        self.amp = amp

    @classmethod
    def basis(cls, dims, index) -> "QuantumState":
        amp = np.zeros(dims, dtype=complex)
        amp[index] = 1.0
        return cls(dims, amp)

    @classmethod
    def uniform(cls, dim: int, support) -> "QuantumState":
        amp = np.zeros(dim, dtype=complex)
        support = list(support)
        amp[support] = 1.0 / np.sqrt(len(support))
        return cls((dim,), amp)

    def tensor(self, other: "QuantumState") -> "QuantumState":
        amp = np.tensordot(self.amp, other.amp, axes=0)
        return QuantumState(self.dims + other.dims, amp)

    def overlap(self, other: "QuantumState") -> complex:
        return complex(np.vdot(self.amp, other.amp))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amp))

    def density(self) -> "DensityMatrix":
        v = self.amp.reshape(-1)
        return DensityMatrix(np.outer(v, v.conj()))

    def reduced_density(self, keep_axes) -> "DensityMatrix":
        """Partial trace down to the given axes (in their current order)."""
        keep = tuple(keep_axes)
        drop = tuple(a for a in range(len(self.dims)) if a not in keep)
        perm = keep + drop
        dk = int(np.prod([self.dims[a] for a in keep]))
        dd = int(np.prod([self.dims[a] for a in drop])) if drop else 1
        m = np.transpose(self.amp, perm).reshape(dk, dd)
        return DensityMatrix(m @ m.conj().T)

    def to_json_dict(self) -> dict:
        flat = self.amp.reshape(-1)
        return {
            "dims": list(self.dims),
            "amplitudes": [[float(a.real), float(a.imag)] for a in flat],
        }


class DensityMatrix:
    """Hermitian, PSD, trace-one matrix with tolerance checks."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        m = np.asarray(matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidArgumentError("density matrix must be square")
        if check:
            if np.max(np.abs(m - m.conj().T)) > 1e-8:
                raise InvalidArgumentError("density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL * max(1, m.shape[0]):
                raise InvalidArgumentError(f"trace {tr} is not 1")
            if np.min(np.linalg.eigvalsh(m)) < -1e-8:
                raise InvalidArgumentError("density matrix is not PSD")
        self.matrix = m

    @classmethod
    def average_of_states(cls, states) -> "DensityMatrix":
        vecs = [s.amp.reshape(-1) for s in states]
        acc = np.zeros((vecs[0].size, vecs[0].size), dtype=complex)
        for v in vecs:
            acc += np.outer(v, v.conj())
        return cls(acc / len(vecs))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def dominant_eigenvector(self) -> tuple[float, np.ndarray]:
        w, v = np.linalg.eigh(self.matrix)
        return float(w[-1]), v[:, -1]

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "matrix": [
                [[float(e.real), float(e.imag)] for e in row] for row in self.matrix
            ],
        }


def _as_matrix(obj) -> np.ndarray:
    if isinstance(obj, DensityMatrix):
        return obj.matrix
    if isinstance(obj, QuantumState):
        return obj.density().matrix
    return np.asarray(obj, dtype=complex)


def trace_distance(a, b) -> float:
    """(1/2) ||a - b||_1 via eigenvalues of the Hermitian difference."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise InvalidArgumentError("dimension mismatch")
    d = ma - mb
    if np.max(np.abs(d - d.conj().T)) > 1e-8:
        raise InvalidArgumentError("inputs are not Hermitian")
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(d))))


def state_fidelity(a: QuantumState, b: QuantumState) -> float:
    return float(abs(a.overlap(b)) ** 2)


# ---------------------------------------------------------------------------
# Quantum query access
# ---------------------------------------------------------------------------

def _uniform_s_vector(oracle: MixerOracle) -> np.ndarray:
    v = np.zeros(1 << oracle.n, dtype=complex)
    v[list(oracle.members)] = 1.0 / np.sqrt(len(oracle.members))
    return v


def prepare_uniform_s(oracle: MixerOracle, session: QuerySession | None = None):
    if session is not None:
        session.charge_quantum("prepare_S")
    return QuantumState((1 << oracle.n,), _uniform_s_vector(oracle))


def prepare_uniform_ind(oracle: MixerOracle, session: QuerySession | None = None):
    if session is not None:
        session.charge_quantum("prepare_Ind")
    k = len(oracle.index_ints)
    return QuantumState((k,), np.full(k, 1.0 / np.sqrt(k), dtype=complex))


def _project_onto_vector(state: QuantumState, vec: np.ndarray, axis: int, rng):
    amp = np.moveaxis(state.amp, axis, -1)
    comp = amp @ vec.conj()
    p1 = float(np.vdot(comp, comp).real)
    outcome = 1 if rng.random() < p1 else 0
    inside = comp[..., None] * vec
    post = inside if outcome == 1 else amp - inside
    norm = np.linalg.norm(post)
    if norm == 0:
        raise InvalidArgumentError("measurement collapsed to the zero vector")
    post = np.moveaxis(post / norm, -1, axis)
    return outcome, QuantumState(state.dims, post)


def project_uniform_s(
    state: QuantumState, oracle: MixerOracle, rng, axis: int = 0,
    session: QuerySession | None = None,
):
    """Projective measurement onto the uniform superposition over S."""
    if state.dims[axis] != 1 << oracle.n:
        raise InvalidArgumentError("axis dimension must be 2^n")
    if session is not None:
        session.charge_quantum("project_S")
    return _project_onto_vector(state, _uniform_s_vector(oracle), axis, rng)


def project_uniform_ind(
    state: QuantumState, oracle: MixerOracle, rng, axis: int = 0,
    session: QuerySession | None = None,
):
    """Projective measurement onto the uniform superposition over Ind."""
    k = len(oracle.index_ints)
    if state.dims[axis] != k:
        raise InvalidArgumentError("axis dimension must be |Ind|")
    if session is not None:
        session.charge_quantum("project_Ind")
    vec = np.full(k, 1.0 / np.sqrt(k), dtype=complex)
    return _project_onto_vector(state, vec, axis, rng)


def apply_cm(
    state: QuantumState,
    oracle: MixerOracle,
    alpha_axis: int,
    index_axis: int,
    element_axis: int,
    session: QuerySession | None = None,
) -> QuantumState:
    """The controlled-mixer unitary: |alpha, i, s> -> |alpha, i, M_i^alpha(s)>.

    The control register's basis order is (-1, 0, +1); the index register's
    basis is the canonical index enumeration; basis states outside S are
    left fixed.
    """
    if state.dims[alpha_axis] != 3:
        raise InvalidArgumentError("control register must have dimension 3")
    if state.dims[index_axis] != len(oracle.index_ints):
        raise InvalidArgumentError("index register must have dimension |Ind|")
    if state.dims[element_axis] != 1 << oracle.n:
        raise InvalidArgumentError("element register must have dimension 2^n")
    if session is not None:
        session.charge_quantum("CM")
        if oracle._on_metered_apply is not None:
            oracle._on_metered_apply(oracle.index_ints[0], 0, True)

    work = np.moveaxis(state.amp, (alpha_axis, index_axis, element_axis), (-3, -2, -1))
    out = work.copy()
    for ai, alpha in enumerate(ALPHA_VALUES):
        if alpha == 0:
            continue
        for ji, enc in enumerate(oracle.index_ints):
            fwd = oracle.permutation_table(enc, alpha)
            inv = np.argsort(fwd)
            out[..., ai, ji, :] = work[..., ai, ji, inv]
    out = np.moveaxis(out, (-3, -2, -1), (alpha_axis, index_axis, element_axis))
    return QuantumState(state.dims, out)


@dataclass
class ProjectorMeasurement:
    """Outcome of the component-projector measurement."""

    outcome: int
    state: QuantumState       # post-measurement state, ancillas removed
    probability_one: float    # Born probability of outcome 1
    ancilla_fidelity: float   # fidelity of the index register with |e0>


def measure_component_projector(
    state: QuantumState,
    oracle: MixerOracle,
    rng,
    axis: int = 0,
    session: QuerySession | None = None,
) -> ProjectorMeasurement:
    """Measure the projector onto the span of component superpositions.

    Four steps: adjoin an index register in the uniform state |e0> and a flag
    qubit; apply the controlled mixer; reflect the flag about |e0>; uncompute
    the controlled mixer; measure the flag. For an exactly mixing family the
    flag statistics equal <psi|P|psi> and the index register returns to |e0>
    unentangled. Garbage basis states (outside S) pass the measurement
    untouched, since every mixer application fixes them.
    """
    da = state.dims[axis]
    if da != 1 << oracle.n:
        raise InvalidArgumentError("axis dimension must be 2^n")
    k = len(oracle.index_ints)
    if session is not None:
        session.charge_quantum("CM", 2)
        session.charge_quantum("project_Ind", 2)
        if oracle._on_metered_apply is not None:
            oracle._on_metered_apply(oracle.index_ints[0], 0, True)
            oracle._on_metered_apply(oracle.index_ints[0], 0, True)

    amp = np.moveaxis(state.amp, axis, -1)
    rest_shape = amp.shape[:-1]
    amp = amp.reshape(-1, da)
    r = amp.shape[0]

    # step 1: adjoin B = |e0> and C = |0>
    work = np.zeros((r, da, k, 2), dtype=complex)
    work[:, :, :, 0] = amp[:, :, None] / np.sqrt(k)

    fwd_tables = [oracle.permutation_table(enc, 1) for enc in oracle.index_ints]
    inv_tables = [np.argsort(t) for t in fwd_tables]

    # step 2: U = sum_j Mtilde_j (x) |j><j|
    for ji in range(k):
        work[:, :, ji, :] = work[:, inv_tables[ji], ji, :]

    # step 3: flip C on the |e0> component of B
    mean = work.sum(axis=2) / np.sqrt(k)           # <e0|_B work
    e0_part = mean[:, :, None, :] / np.sqrt(k)     # |e0><e0| work
    work = (work - e0_part) + e0_part[..., ::-1]

    # step 4: uncompute with U^dagger
    for ji in range(k):
        work[:, :, ji, :] = work[:, fwd_tables[ji], ji, :]

    p1 = float(np.sum(np.abs(work[:, :, :, 1]) ** 2))
    outcome = 1 if rng.random() < p1 else 0
    kept = work[:, :, :, outcome]
    kept_norm = np.linalg.norm(kept)
    if kept_norm == 0:
        raise InvalidArgumentError("measurement collapsed to the zero vector")
    kept = kept / kept_norm

    # discard B by contracting with |e0>; exact for exactly mixing families
    proj_b = kept.sum(axis=2) / np.sqrt(k)
    fidelity = float(np.linalg.norm(proj_b))
    if fidelity == 0:
        raise InvalidArgumentError("index register lost all weight on |e0>")
    post = (proj_b / fidelity).reshape(rest_shape + (da,))
    post = np.moveaxis(post, -1, axis)
    return ProjectorMeasurement(
        outcome=outcome,
        state=QuantumState(state.dims, post),
        probability_one=p1,
        ancilla_fidelity=fidelity,
    )


def component_projector_matrix(oracle: MixerOracle) -> np.ndarray:
    """|Ind|^-1 sum_j Mtilde_j as a dense matrix on all 2^n basis states."""
    dim = 1 << oracle.n
    acc = np.zeros((dim, dim))
    for enc in oracle.index_ints:
        fwd = oracle.permutation_table(enc, 1)
        acc[fwd, np.arange(dim)] += 1.0
    return acc / len(oracle.index_ints)


def exact_component_projector(truth, include_garbage_identity=True) -> np.ndarray:
    """P = sum_k |S_k><S_k|, optionally plus the identity on garbage.

    The mixer acts as the identity on basis states outside S, so the
    averaged-mixer matrix equals P extended by the garbage identity.
    """
    dim = 1 << truth.n
    p = np.zeros((dim, dim))
    for cid in range(1, truth.num_components + 1):
        elems = list(truth.component_elements(cid))
        p[np.ix_(elems, elems)] = 1.0 / len(elems)
    if include_garbage_identity:
        for x in truth.garbage:
            p[x, x] = 1.0
    return p


def component_superposition_via_projection(
    oracle: MixerOracle, s, max_attempts: int, rng,
    session: QuerySession | None = None,
):
    """Repeat-until-success baseline for preparing a component superposition.

    Each attempt starts from the basis state |s> and measures the component
    projector; success probability is 1/|component|. Returns
    (state or None, attempts used).
    """
    si = as_int(s, oracle.n)
    if not oracle.is_member(si):
        raise InvalidArgumentError(f"{s!r} is not a member of S")
    dim = 1 << oracle.n
    for attempt in range(1, max_attempts + 1):
        trial = QuantumState.basis((dim,), si)
        result = measure_component_projector(trial, oracle, rng, session=session)
        if result.outcome == 1:
            return result.state, attempt
    return None, max_attempts


def swap_test(state: QuantumState, rng, axis1: int = 0, axis2: int = 1):
    """Swap test between two equal-dimension registers of a joint state.

    Returns ("different" | "same", post-state). "different" is reported with
    probability (1 - |<psi|phi>|^2) / 2 on product input.
    """
    if state.dims[axis1] != state.dims[axis2]:
        raise InvalidArgumentError("swap test requires equal dimensions")
    swapped = np.swapaxes(state.amp, axis1, axis2)
    anti = (state.amp - swapped) / 2.0
    p_diff = float(np.vdot(anti, anti).real)
    if rng.random() < p_diff:
        return "different", QuantumState(state.dims, anti, normalize=True)
    sym = (state.amp + swapped) / 2.0
    return "same", QuantumState(state.dims, sym, normalize=True)
