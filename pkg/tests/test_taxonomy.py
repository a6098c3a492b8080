import pytest

from mrcaudit.taxonomy import (
    CORRECTNESS_SUB_REASONS,
    CORRECTNESS_VERDICTS,
    Label,
    Taxonomy,
    TaxonomyNode,
    taxonomy,
)


def test_taxonomy_is_stable_across_calls():
    assert taxonomy() is taxonomy()


def test_arithmetic_children():
    node = taxonomy().find(("Reasoning", "Arithmetic"))
    assert [c.name for c in node.children] == ["Subtraction", "Addition", "Ordering", "Counting", "OtherMath"]


def test_known_leaf_lookup_succeeds():
    label = Label.parse("LinguisticComplexity/SyntacticAmbiguity/CoordinationScope")
    assert taxonomy().contains(label)
    assert taxonomy().is_leaf(label)


def test_unknown_leaf_lookup_fails():
    assert not taxonomy().contains(Label.parse("Reasoning/Teleportation"))
    assert taxonomy().find(("Reasoning", "Teleportation")) is None


def test_interior_nodes_are_not_leaves():
    for path in [("Reasoning",), ("Reasoning", "Operational"), ("Knowledge", "Factual")]:
        assert not taxonomy().is_leaf(Label(path))


def test_expected_leaf_set_per_family():
    t = taxonomy()
    by_family = {family: {str(l) for l in t.leaves(family)} for family in t.families()}
    assert by_family["AnswerType"] == {
        "AnswerType/Span",
        "AnswerType/Paraphrasing",
        "AnswerType/Generated",
        "AnswerType/Unanswerable",
    }
    assert by_family["Correctness"] == {
        "Correctness/Debatable",
        "Correctness/Wrong",
        "Correctness/ArbitrarySelection",
        "Correctness/ArbitraryPrecision",
        "Correctness/ConjunctionOrIsolated",
        "Correctness/AnswerPresent",
        "Correctness/Other",
    }
    assert len(by_family["Reasoning"]) == 19
    assert len(by_family["Knowledge"]) == 5
    assert len(by_family["LinguisticComplexity"]) == 17
    assert by_family["SupportingFact"] == {"SupportingFact"}
    assert "Reasoning/Linguistic/Monotonicity" in by_family["Reasoning"]


def test_node_names_unique_within_parent():
    def check(node):
        names = [c.name for c in node.children]
        assert len(names) == len(set(names)), f"duplicate child under {node.name}"
        for child in node.children:
            check(child)

    for root in taxonomy().roots:
        check(root)


def test_duplicate_paths_rejected():
    dup = TaxonomyNode("A", children=(TaxonomyNode("B"), TaxonomyNode("B")))
    with pytest.raises(ValueError):
        Taxonomy((dup,))


def test_verdicts_and_sub_reasons_are_leaves():
    t = taxonomy()
    for label in CORRECTNESS_VERDICTS | CORRECTNESS_SUB_REASONS:
        assert t.is_leaf(label)


def test_label_rendering_round_trip():
    label = Label.parse("Reasoning/Operational/Bridge")
    assert str(label) == "Reasoning/Operational/Bridge"
    assert label.family == "Reasoning"
    assert label.name == "Bridge"
    assert Label.parse(str(label)) == label


def test_subtree_paths():
    paths = taxonomy().subtree_paths(("Reasoning", "Operational"))
    assert ("Reasoning", "Operational") in paths
    assert ("Reasoning", "Operational", "Bridge") in paths
    assert all(p[:2] == ("Reasoning", "Operational") for p in paths)
