"""Interactive-proof simulations and statistical-difference reductions.

Arthur is query-bounded and goes through metered sessions; Merlin (honest or
cheating) is computationally unbounded and may hold the ground truth. The
balanced-components promise is checked up front and violations raise.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, PromiseViolationError
from .oracle import MixerOracle
from .partition import GroundTruthPartition
from .quantum import (
    QuantumState,
    measure_component_projector,
    swap_test,
)
from .trials import run_seeded_trials
from .verify import tv_distance

ARTHUR_QUERIES_PER_AM_TRIAL = 4  # two samples, one index draw, one apply


@dataclass(frozen=True)
class EstimatedProbability:
    """A Monte Carlo acceptance estimate with a 95% normal-approx interval."""

    estimate: float
    trials: int

    @property
    def ci95(self) -> float:
        p = self.estimate
        return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)

    def to_json_dict(self) -> dict:
        return {"estimate": self.estimate, "trials": self.trials, "ci95": self.ci95}


def _require_mbcp_promise(truth: GroundTruthPartition):
    if not truth.mbcp_promise_holds():
        raise PromiseViolationError(
            "instance violates the balanced-components promise"
        )


# ---------------------------------------------------------------------------
# AM protocol for multiple balanced components
# ---------------------------------------------------------------------------

def am_mbcp_trial(
    oracle: MixerOracle, truth: GroundTruthPartition, merlin: str, rng
) -> tuple[bool, int]:
    """One protocol round; returns (accepted, Arthur's query count)."""
    session = oracle.session(rng=rng)
    s1 = session.sample_s()
    s2 = session.sample_s()
    i = int(rng.integers(1, 3))
    j = session.sample_ind()
    t = session.apply(j, s1 if i == 1 else s2)

    if merlin == "honest":
        if truth.same_component(s1, s2):
            guess = int(rng.integers(1, 3))
        else:
            guess = 1 if truth.same_component(t, s1) else 2
    elif merlin == "optimal_cheat":
        # exact Bayes over the enumerable instance: the posterior for i is
        # proportional to the number of indices mapping s_i to t
        n1 = sum(1 for enc in oracle.index_ints if oracle.apply_int(enc, s1) == t)
        n2 = sum(1 for enc in oracle.index_ints if oracle.apply_int(enc, s2) == t)
        if n1 > n2:
            guess = 1
        elif n2 > n1:
            guess = 2
        else:
            guess = int(rng.integers(1, 3))
    else:
        raise InvalidArgumentError(f"unknown merlin strategy {merlin!r}")
    return guess == i, session.classical_queries


def run_am_mbcp(
    oracle: MixerOracle,
    truth: GroundTruthPartition,
    merlin: str,
    trials: int,
    seed: int,
    parallel: int = 1,
) -> EstimatedProbability:
    _require_mbcp_promise(truth)
    results = run_seeded_trials(
        lambda t, rng: am_mbcp_trial(oracle, truth, merlin, rng),
        trials, seed, parallel,
    )
    accepts = sum(1 for ok, _ in results if ok)
    return EstimatedProbability(accepts / trials, trials)


# ---------------------------------------------------------------------------
# co-AM protocol
# ---------------------------------------------------------------------------

def coam_mbcp_trial(oracle: MixerOracle, rng) -> bool:
    session = oracle.session(rng=rng)
    s1 = session.sample_s()
    s2 = session.sample_s()
    # Merlin is unbounded: brute-force search for a connecting index
    witness = None
    for enc in oracle.index_ints:
        if oracle.apply_int(enc, s1) == s2:
            witness = enc
            break
    if witness is None:
        witness = oracle.index_ints[0]
    return session.apply(witness, s1) == s2


def run_coam_mbcp(
    oracle: MixerOracle,
    truth: GroundTruthPartition,
    trials: int,
    seed: int,
    parallel: int = 1,
) -> EstimatedProbability:
    _require_mbcp_promise(truth)
    results = run_seeded_trials(
        lambda t, rng: coam_mbcp_trial(oracle, rng), trials, seed, parallel
    )
    return EstimatedProbability(sum(results) / trials, trials)


# ---------------------------------------------------------------------------
# QMA protocol for multiple components
# ---------------------------------------------------------------------------

def build_qma_witness(
    truth: GroundTruthPartition, k1: int, k2: int
) -> QuantumState:
    """Tensor product of the two component superpositions (the honest witness)."""
    if k1 == k2:
        raise InvalidArgumentError("witness components must be distinct")
    dim = 1 << truth.n
    a = QuantumState.uniform(dim, truth.component_elements(k1))
    b = QuantumState.uniform(dim, truth.component_elements(k2))
    return a.tensor(b)


def qma_verify_mc(witness: QuantumState, oracle: MixerOracle, rng) -> bool:
    """Project each register onto component superpositions, then swap test.

    Accepts iff both projections succeed and the swap test reports
    "different".
    """
    r1 = measure_component_projector(witness, oracle, rng, axis=0)
    if r1.outcome == 0:
        return False
    r2 = measure_component_projector(r1.state, oracle, rng, axis=1)
    if r2.outcome == 0:
        return False
    verdict, _ = swap_test(r2.state, rng, axis1=0, axis2=1)
    return verdict == "different"


def run_qma_mc(
    oracle: MixerOracle,
    witness: QuantumState,
    trials: int,
    seed: int,
    parallel: int = 1,
) -> EstimatedProbability:
    results = run_seeded_trials(
        lambda t, rng: qma_verify_mc(witness, oracle, rng), trials, seed, parallel
    )
    return EstimatedProbability(sum(results) / trials, trials)


# ---------------------------------------------------------------------------
# Amplification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplifiedDecision:
    accept: bool
    accept_fraction: float
    repetitions: int
    error_bound: float | None  # Hoeffding bound at the declared gap, if given


def hoeffding_error(repetitions: int, gap: float) -> float:
    """exp(-2 R gap^2): the two-sided threshold-vote error bound."""
    return math.exp(-2.0 * repetitions * gap * gap)


def amplify(
    trial_fn,
    repetitions: int,
    seed: int,
    threshold: float | None = None,
    mode: str = "threshold",
    gap: float | None = None,
) -> AmplifiedDecision:
    """Amplify a one-shot protocol by repetition.

    ``threshold`` mode takes a majority/threshold vote and reports the
    Hoeffding error bound for the declared gap between the completeness and
    soundness rates. ``and`` mode accepts only if every repetition accepts
    (for completeness-1 protocols, soundness decays as 2^-R).
    """
    if repetitions < 1:
        raise InvalidArgumentError("repetitions must be >= 1")
    results = run_seeded_trials(lambda t, rng: bool(trial_fn(rng)), repetitions, seed)
    fraction = sum(results) / repetitions
    if mode == "and":
        return AmplifiedDecision(all(results), fraction, repetitions, None)
    if mode != "threshold":
        raise InvalidArgumentError(f"unknown amplification mode {mode!r}")
    if threshold is None:
        threshold = 0.5
    bound = hoeffding_error(repetitions, gap) if gap is not None else None
    return AmplifiedDecision(fraction >= threshold, fraction, repetitions, bound)


# ---------------------------------------------------------------------------
# Statistical-difference reductions
# ---------------------------------------------------------------------------

def sd_reduction_scp(
    oracle: MixerOracle, truth: GroundTruthPartition, s, t
) -> float:
    """TV distance between the laws of M_I(s) and M_J(t), I, J uniform.

    Zero iff s and t share a component (for exact mixers); one when the
    components are disjoint.
    """
    from .bits import as_int

    si = as_int(s, oracle.n)
    ti = as_int(t, oracle.n)
    if si not in truth or ti not in truth:
        raise InvalidArgumentError("s and t must be members of S")
    k = len(oracle.index_ints)
    law_s: dict[int, float] = {}
    law_t: dict[int, float] = {}
    for enc in oracle.index_ints:
        y = oracle.apply_int(enc, si)
        law_s[y] = law_s.get(y, 0.0) + 1.0 / k
        y = oracle.apply_int(enc, ti)
        law_t[y] = law_t.get(y, 0.0) + 1.0 / k
    return tv_distance(law_s, law_t)


def sd_reduction_mbcp(oracle: MixerOracle, truth: GroundTruthPartition) -> float:
    """TV distance between (a, M_I(a), b, M_J(b)) and four independent
    uniform samples from S, exact by enumeration."""
    _require_mbcp_promise(truth)
    members = truth.members
    k = len(oracle.index_ints)
    images = {
        x: [oracle.apply_int(enc, x) for enc in oracle.index_ints] for x in members
    }
    weight = 1.0 / (len(members) ** 2 * k * k)
    law: dict[tuple, float] = {}
    for a in members:
        for ma in images[a]:
            for b in members:
                for mb in images[b]:
                    key = (a, ma, b, mb)
                    law[key] = law.get(key, 0.0) + weight
    uniform_mass = 1.0 / len(members) ** 4
    total_tuples = len(members) ** 4
    diff = sum(abs(p - uniform_mass) for p in law.values())
    diff += (total_tuples - len(law)) * uniform_mass
    return 0.5 * diff


def same_component_predicate_rate(truth: GroundTruthPartition) -> float:
    """Probability that four independent uniform samples (a, x, b, y) pair up
    with a~x and b~y in the same component."""
    sizes = np.array(truth.component_sizes(), dtype=float)
    total = sizes.sum()
    p_pair = float(np.sum((sizes / total) ** 2))
    return p_pair * p_pair
