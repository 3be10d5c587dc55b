"""Counterfeiting reduction machinery.

A counterfeiter is a callable run against metered mixer and label sessions
for a hidden 2n-bit instance; it returns a quantum state over 2n bits and
may never touch ground truth. Two stand-ins are provided:

* the reference counterfeiter reconstructs its start element's component by
  applying every index, queries labels only on elements it reached, and
  outputs the uniform superposition over the reconstructed component;
* the label-scanning counterfeiter first samples random points and queries
  their labels, and switches to a fixed flag output if it catches the label
  assigning its component's value to an unreachable point.

Because the reference counterfeiter stays on its component, its entire query
transcript is identical under the collapsed-row-0 label and under the valid
embed-only label once both are hidden with the same permutations.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhaustedError, InvalidArgumentError
from .instances import PointFunction
from .layered import LayeredInstance, apply_hiding, hide_instance, make_layered_instance
from .oracle import LabelSession, MixerOracle, QuerySession
from .partition import GroundTruthPartition
from .quantum import DensityMatrix, QuantumState, trace_distance
from .trials import trial_rng


def _component_closure(mixer: QuerySession, label: LabelSession, start: int):
    """Reconstruct the start element's component through metered queries.

    Enumerates index encodings by membership testing, applies each valid
    index to the start element (full connectivity makes one pass complete),
    and keeps the elements sharing the start's label.
    """
    width = mixer.oracle.index_width
    valid = [e for e in range(1 << width) if mixer.test_membership_ind(e)]
    start_label = label.query(start)
    component = {start}
    for enc in valid:
        y = mixer.apply(enc, start)
        if y not in component and label.query(y) == start_label:
            component.add(y)
    return sorted(component), start_label


class ReferenceCounterfeiter:
    """Closure-based counterfeiter; never queries a label off its component."""

    def __init__(self, budget: int | None = None):
        self.budget = budget

    def __call__(
        self, mixer: QuerySession, label: LabelSession, start: int, rng
    ) -> QuantumState:
        if self.budget is not None and self.budget <= 0:
            raise BudgetExhaustedError("counterfeiter has no query budget")
        mixer.budget = self.budget
        label.budget = self.budget
        component, _ = _component_closure(mixer, label, start)
        return QuantumState.uniform(1 << mixer.oracle.n, component)


class LabelScanningCounterfeiter:
    """Adversarial foil: scans random label inputs before reconstructing.

    Detection rule: some scanned point outside the reconstructed component
    carries the component's label. On detection the output is the all-zeros
    flag state instead of the component superposition.
    """

    def __init__(self, scan_count: int, budget: int | None = None):
        self.scan_count = scan_count
        self.budget = budget
        self.last_detected = False

    def __call__(
        self, mixer: QuerySession, label: LabelSession, start: int, rng
    ) -> QuantumState:
        mixer.budget = self.budget
        label.budget = self.budget
        dim = 1 << mixer.oracle.n
        if self.scan_count >= dim:
            scanned = list(range(dim))
        else:
            scanned = [int(x) for x in rng.integers(dim, size=self.scan_count)]
        scan_labels = {x: label.query(x) for x in set(scanned)}
        component, start_label = _component_closure(mixer, label, start)
        in_component = set(component)
        self.last_detected = any(
            lab == start_label and x not in in_component
            for x, lab in scan_labels.items()
        )
        if self.last_detected:
            return QuantumState.basis((dim,), 0)
        return QuantumState.uniform(dim, component)


def run_counterfeiter(alg, instance: LayeredInstance, s: int, rng):
    """Run a counterfeiter against a (hidden) instance's metered sessions."""
    mixer = instance.mixer2n.session(rng=rng, coherent=True)
    label = instance.label2n.session(coherent=True)
    state = alg(mixer, label, instance.start_element(s), rng)
    return state, mixer, label


@dataclass
class SolveResult:
    density: DensityMatrix    # reduced state over the last n qubits
    state: QuantumState       # dominant eigenvector of the reduced state
    purity: float
    g_queries: int = 0


def solve_component_superposition_via_counterfeiter(
    base_oracle: MixerOracle,
    base_truth: GroundTruthPartition,
    s: int,
    alg,
    rng,
    pi=None,
    sigma=None,
) -> SolveResult:
    """Solve component superposition using a counterfeiter as a subroutine.

    Builds the collapsed-row-0 embedding, hides it with fresh permutations
    (or the explicit pair given), runs the counterfeiter from the hidden
    image of (0, s), undoes the hiding permutation coherently, and returns
    the last n qubits of the result.
    """
    if s not in base_truth:
        raise InvalidArgumentError(f"{s} is not a member of S")
    instance = make_layered_instance(base_oracle, base_truth, "row0")
    if pi is None:
        instance = hide_instance(instance, rng)
    else:
        instance = apply_hiding(instance, pi, sigma)
    output, _, _ = run_counterfeiter(alg, instance, s, rng)

    # undo pi coherently: |x> -> |pi^-1(x)>
    amp = output.amp.reshape(-1)[instance.pi]
    n = base_truth.n
    unhidden = QuantumState((1 << n, 1 << n), amp.reshape(1 << n, 1 << n))
    density = unhidden.reduced_density([1])
    weight, vec = density.dominant_eigenvector()
    return SolveResult(
        density=density,
        state=QuantumState(((1 << n),), vec, normalize=True),
        purity=density.purity(),
    )


@dataclass
class DistinguishingReport:
    """Estimated counterfeiter outputs under the two point-function regimes."""

    rho_zero: DensityMatrix
    rho_point: DensityMatrix
    distance: float
    g_queries_max: int
    trials: int
    detections_zero: int = 0
    detections_point: int = 0

    def to_json_dict(self) -> dict:
        return {
            "distance": self.distance,
            "g_queries_max": self.g_queries_max,
            "trials": self.trials,
            "detections_zero": self.detections_zero,
            "detections_point": self.detections_point,
        }


def distinguishing_experiment(
    base_oracle: MixerOracle,
    base_truth: GroundTruthPartition,
    s: int,
    alg_factory,
    trials: int,
    seed: int,
) -> DistinguishingReport:
    """Estimate the counterfeiter's output under g = 0 vs a random point g.

    Each trial draws fresh hiding permutations from its own seeded stream and
    uses the same pair for both regimes (common random numbers: both
    marginals stay exact, only the estimation error is correlated). The
    point row is drawn uniformly at random per trial.
    """
    n = base_truth.n
    d2 = 1 << (2 * n)
    acc_zero = np.zeros((d2, d2), dtype=complex)
    acc_point = np.zeros((d2, d2), dtype=complex)
    g_max = 0
    detections = [0, 0]

    for t in range(trials):
        rng = trial_rng(seed, t)
        pi = rng.permutation(d2)
        sigma = rng.permutation(d2)
        y = int(rng.integers(1 << n))
        for arm, g in enumerate(
            (PointFunction(n, None), PointFunction(n, y))
        ):
            instance = make_layered_instance(base_oracle, base_truth, "grover", g=g)
            instance = apply_hiding(instance, pi, sigma)
            alg = alg_factory()
            state, _, _ = run_counterfeiter(alg, instance, s, rng)
            v = state.amp.reshape(-1)
            if arm == 0:
                acc_zero += np.outer(v, v.conj())
            else:
                acc_point += np.outer(v, v.conj())
            g_max = max(g_max, g.queries)
            if getattr(alg, "last_detected", False):
                detections[arm] += 1

    rho_zero = DensityMatrix(acc_zero / trials)
    rho_point = DensityMatrix(acc_point / trials)
    return DistinguishingReport(
        rho_zero=rho_zero,
        rho_point=rho_point,
        distance=trace_distance(rho_zero, rho_point),
        g_queries_max=g_max,
        trials=trials,
        detections_zero=detections[0],
        detections_point=detections[1],
    )


def hiding_indistinguishability_check(
    base_oracle: MixerOracle,
    base_truth: GroundTruthPartition,
    seed: int,
    num_perms: int = 8,
) -> bool:
    """Exhaustive check that hidden collapsed-row-0 and embed-only instances
    agree everywhere except on the hidden images of the other components.

    For each seeded permutation pair: mixers and labels must agree pointwise
    off the revealing set pi({0} x (complement of component 1)), and the
    reference counterfeiter must produce identical output states.
    """
    n = base_truth.n
    d2 = 1 << (2 * n)
    dim = 1 << n
    s1 = set(base_truth.component_elements(1))
    revealing_cols = [z for z in range(dim) if z not in s1]
    start = base_truth.component_elements(1)[0]

    row0 = make_layered_instance(base_oracle, base_truth, "row0")
    nowhere = make_layered_instance(base_oracle, base_truth, "nowhere")
    for p in range(num_perms):
        rng = trial_rng(seed, p)
        pi = rng.permutation(d2)
        sigma = rng.permutation(d2)
        h_row0 = apply_hiding(row0, pi, sigma)
        h_nowhere = apply_hiding(nowhere, pi, sigma)
        revealing = {int(pi[z]) for z in revealing_cols}
        for x in range(d2):
            if x in revealing:
                continue
            if h_row0.label2n.label_int(x) != h_nowhere.label2n.label_int(x):
                return False
            for enc in base_oracle.index_ints:
                if h_row0.mixer2n._apply_fn(enc, x) != h_nowhere.mixer2n._apply_fn(enc, x):
                    return False
        out0, _, _ = run_counterfeiter(
            ReferenceCounterfeiter(), h_row0, start, trial_rng(seed, 10_000 + p)
        )
        out1, _, _ = run_counterfeiter(
            ReferenceCounterfeiter(), h_nowhere, start, trial_rng(seed, 10_000 + p)
        )
        if not np.allclose(out0.amp, out1.amp):
            return False
    return True


def scanning_detection_probability(
    base_oracle: MixerOracle,
    base_truth: GroundTruthPartition,
    j: int,
    seed: int,
) -> float:
    """Exact single-scan detection probability on a hidden shifted-row
    instance: the fraction of label inputs that reveal the invalidity."""
    n = base_truth.n
    d2 = 1 << (2 * n)
    rng = trial_rng(seed, 0)
    pi = rng.permutation(d2)
    sigma = rng.permutation(d2)
    instance = apply_hiding(
        make_layered_instance(base_oracle, base_truth, "row_j", j=j), pi, sigma
    )
    start = instance.start_element(base_truth.component_elements(1)[0])
    mixer = instance.mixer2n.session(rng=rng)
    label = instance.label2n.session()
    component, start_label = _component_closure(mixer, label, start)
    in_component = set(component)
    revealing = sum(
        1
        for x in range(d2)
        if instance.label2n.label_int(x) == instance.label2n.label_int(start)
        and x not in in_component
    )
    return revealing / d2


# ---------------------------------------------------------------------------
# Grover embedding query experiment
# ---------------------------------------------------------------------------

def fixed_point_probe_tester(session: QuerySession, n: int, q: int, rng) -> str:
    """Classical tester: q random applications; answer "multiple" iff any
    non-trivial shift leaves its input fixed."""
    dim = 1 << n
    for _ in range(q):
        x = int(rng.integers(dim))
        i = int(rng.integers(1, dim))
        if session.apply(i, x) == x:
            return "multiple"
    return "single"


@dataclass
class GroverEmbeddingReport:
    q: int
    trials: int
    success_rate: float
    ci95: float
    g_queries_mean: float
    g_queries_max: int

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "trials": self.trials,
            "success_rate": self.success_rate,
            "ci95": self.ci95,
            "g_queries_mean": self.g_queries_mean,
            "g_queries_max": self.g_queries_max,
        }


def grover_embedding_query_experiment(
    n: int, q: int, trials: int, seed: int, tester=fixed_point_probe_tester
) -> GroverEmbeddingReport:
    """Run a classical component-count tester against Grover-embedding mixers.

    Half the trials use an all-zeros point function ("single" is correct),
    half a uniformly random marked point ("multiple" is correct). Every
    mixer application costs two point-function queries.
    """
    from .instances import make_grover_mixer
    from .protocols import EstimatedProbability

    successes = 0
    g_total = 0
    g_max = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        marked = t % 2 == 1
        y = int(rng.integers(1 << n)) if marked else None
        g = PointFunction(n, y)
        oracle = make_grover_mixer(n, g)
        answer = tester(oracle.session(rng=rng), n, q, rng)
        expected = "multiple" if marked else "single"
        successes += answer == expected
        g_total += g.queries
        g_max = max(g_max, g.queries)
    est = EstimatedProbability(successes / trials, trials)
    return GroverEmbeddingReport(
        q=q,
        trials=trials,
        success_rate=est.estimate,
        ci95=est.ci95,
        g_queries_mean=g_total / trials,
        g_queries_max=g_max,
    )
