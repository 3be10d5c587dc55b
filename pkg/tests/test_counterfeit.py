import numpy as np
import pytest

from mixerlab import (
    GroundTruthPartition,
    PointFunction,
    QuantumState,
    make_offset_mixer,
    state_fidelity,
)
from mixerlab.counterfeit import (
    LabelScanningCounterfeiter,
    ReferenceCounterfeiter,
    distinguishing_experiment,
    fixed_point_probe_tester,
    grover_embedding_query_experiment,
    hiding_indistinguishability_check,
    run_counterfeiter,
    scanning_detection_probability,
    solve_component_superposition_via_counterfeiter,
)
from mixerlab.layered import hide_instance, make_layered_instance


@pytest.fixture
def base():
    truth = GroundTruthPartition.from_components(2, [[0, 1], [2, 3]])
    return make_offset_mixer(truth), truth


def test_reference_counterfeiter_outputs_row_superposition(base):
    oracle, truth = base
    inst = make_layered_instance(oracle, truth, "row0")
    rng = np.random.default_rng(0)
    state, mixer, label = run_counterfeiter(ReferenceCounterfeiter(), inst, 0, rng)
    # row 0 carries the whole base problem; the output spans {(0, z): z in S_1}
    target = QuantumState.uniform(16, [0, 1])
    assert state_fidelity(state, target) == pytest.approx(1.0)
    assert mixer.classical_queries > 0 and label.queries > 0


def test_reference_counterfeiter_on_hidden_instance(base):
    oracle, truth = base
    inst = hide_instance(
        make_layered_instance(oracle, truth, "row0"), np.random.default_rng(1)
    )
    rng = np.random.default_rng(2)
    start = inst.start_element(0)
    state, _, _ = run_counterfeiter(ReferenceCounterfeiter(), inst, start, rng)
    target = QuantumState.uniform(16, [int(inst.pi[0]), int(inst.pi[1])])
    assert state_fidelity(state, target) == pytest.approx(1.0)


def test_solve_recovers_base_component_superposition(base):
    oracle, truth = base
    rng = np.random.default_rng(3)
    result = solve_component_superposition_via_counterfeiter(
        oracle, truth, 0, ReferenceCounterfeiter(), rng
    )
    target = QuantumState.uniform(4, [0, 1])
    assert result.purity == pytest.approx(1.0, abs=1e-9)
    assert state_fidelity(result.state, target) == pytest.approx(1.0, abs=1e-9)


def test_hiding_indistinguishability(base):
    oracle, truth = base
    assert hiding_indistinguishability_check(oracle, truth, seed=4, num_perms=4)


def test_reference_counterfeiter_cannot_distinguish_point_function(base):
    oracle, truth = base
    report = distinguishing_experiment(
        oracle, truth, 0, lambda: ReferenceCounterfeiter(), trials=200, seed=5
    )
    assert report.distance <= 1e-9
    assert report.detections_zero == 0 and report.detections_point == 0


def test_scanning_foil_distinguishes_point_function(base):
    oracle, truth = base
    report = distinguishing_experiment(
        oracle,
        truth,
        0,
        lambda: LabelScanningCounterfeiter(scan_count=16),
        trials=200,
        seed=6,
    )
    assert report.distance > 0.3
    assert report.detections_point > 0
    assert report.detections_zero == 0


def test_single_scan_detection_probability(base):
    oracle, truth = base
    # two of sixteen positions carry the start label but sit outside the
    # component, so a uniform scan reveals the shifted row 1/8 of the time
    assert scanning_detection_probability(oracle, truth, 1, seed=7) == pytest.approx(
        2 / 16
    )


def test_gated_mixer_coherent_query_accounting(base):
    oracle, truth = base
    g = PointFunction(2, 2)
    inst = make_layered_instance(oracle, truth, "grover", g=g)
    rng = np.random.default_rng(8)
    before = g.queries
    state, mixer, label = run_counterfeiter(ReferenceCounterfeiter(), inst, 0, rng)
    # coherent sessions charge exactly two g queries per metered evaluation;
    # membership tests never touch g, only apply/apply_inverse and the label do
    applies = mixer.apply_calls
    assert g.queries - before == 2 * (applies + label.queries)


def test_fixed_point_probe_never_false_positives():
    from mixerlab import make_grover_mixer

    g = PointFunction(4, None)
    oracle = make_grover_mixer(4, g)
    rng = np.random.default_rng(9)
    for _ in range(20):
        assert fixed_point_probe_tester(oracle.session(rng=rng), 4, 8, rng) == "single"


def test_gated_shift_distinguishing_is_query_limited():
    report = grover_embedding_query_experiment(n=6, q=2, trials=400, seed=10)
    # success stays close to the guessing rate when q << 2^(n/2)
    assert report.success_rate <= 0.5 + 2 * 2.0 ** -5 + 3 * report.ci95
    assert report.g_queries_max <= 2 * 2 + 1  # per trial: q applies, 2 g queries each
