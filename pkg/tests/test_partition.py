import pytest

from mixerlab import GroundTruthPartition
from mixerlab.errors import InvalidArgumentError


@pytest.fixture
def two_comp():
    return GroundTruthPartition.from_components(3, [[0, 1, 2], [5, 3]])


def test_component_ids_are_contiguous(two_comp):
    assert two_comp.num_components == 2
    assert two_comp.component_elements(1) == (0, 1, 2)
    assert two_comp.component_elements(2) == (3, 5)


def test_members_sorted_and_garbage(two_comp):
    assert two_comp.members == (0, 1, 2, 3, 5)
    assert two_comp.garbage == (4, 6, 7)
    assert 5 in two_comp
    assert 4 not in two_comp


def test_same_component(two_comp):
    assert two_comp.same_component(0, 2)
    assert not two_comp.same_component(0, 3)
    with pytest.raises(InvalidArgumentError):
        two_comp.component_id(7)


def test_balanced_promise():
    assert GroundTruthPartition.from_components(2, [[0, 1], [2, 3]]).mbcp_promise_holds()
    assert GroundTruthPartition.from_components(2, [[0, 1, 2, 3]]).mbcp_promise_holds()
    unbalanced = GroundTruthPartition.from_components(3, [[0, 1, 2, 3, 4], [5, 6]])
    assert not unbalanced.mbcp_promise_holds()


def test_json_round_trip(two_comp):
    doc = two_comp.to_json_dict()
    assert set(doc) == {"n", "members", "component_of"}
    assert all(len(b) == 3 for b in doc["members"])
    again = GroundTruthPartition.from_json_dict(doc)
    assert again.members == two_comp.members
    assert again.component_of == two_comp.component_of
    assert GroundTruthPartition.loads(two_comp.dumps()).dumps() == two_comp.dumps()


def test_rejects_out_of_range_members():
    with pytest.raises(InvalidArgumentError):
        GroundTruthPartition.from_components(2, [[0, 4]])
    with pytest.raises(InvalidArgumentError):
        GroundTruthPartition.from_components(2, [[0, 0]])
