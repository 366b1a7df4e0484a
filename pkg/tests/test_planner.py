import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invoicesynth.layout import BBox, ContentClass, LayoutDocument, TextFragment
from invoicesynth.planner import (
    PlanError,
    RuleAction,
    RuleKind,
    SelectionRule,
    classify_fragment,
    select_targets,
)


class TestClassify:
    @pytest.mark.parametrize(
        "text,expected",
        [
            ("12/03/2024", ContentClass.DATE),
            ("14-03-24", ContentClass.DATE),
            ("2024-03-14", ContentClass.DATE),
            ("5 Mar 2024", ContentClass.DATE),
            ("05 March 2024", ContentClass.DATE),
            ("$1,250.00", ContentClass.CURRENCY_AMOUNT),
            ("€ 99.00", ContentClass.CURRENCY_AMOUNT),
            ("£420", ContentClass.CURRENCY_AMOUNT),
            ("2,656.00", ContentClass.CURRENCY_AMOUNT),
            ("385.00", ContentClass.CURRENCY_AMOUNT),
            ("billing@example.com", ContentClass.EMAIL),
            ("a.b+c@mail.example.org", ContentClass.EMAIL),
            ("+1 (503) 555-0147", ContentClass.PHONE),
            ("0047 223344", ContentClass.PHONE),
            ("INV-2024-0832", ContentClass.NUMERIC_ID),
            ("88213", ContentClass.NUMERIC_ID),
            ("REF 12345", ContentClass.NUMERIC_ID),
            ("Acme Logistics Ltd.", ContentClass.FREE_TEXT),
            ("742 Lakeshore Avenue", ContentClass.FREE_TEXT),
            ("Total Due", ContentClass.FREE_TEXT),
        ],
    )
    def test_cases(self, text, expected):
        assert classify_fragment(text) is expected

    def test_whitespace_trimmed(self):
        assert classify_fragment("  12/03/2024  ") is ContentClass.DATE

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            classify_fragment("   ")

    def test_deterministic_and_total(self):
        texts = ["12/03/2024", "weird ☃ input", "#", "a" * 500]
        for t in texts:
            assert classify_fragment(t) is classify_fragment(t)
            assert isinstance(classify_fragment(t), ContentClass)


def make_doc(texts_flags):
    fragments = tuple(
        TextFragment(
            id=f"frag_{i:03d}",
            text=text,
            bbox=BBox(0, i * 12, 50, i * 12 + 10),
            replace=flag,
        )
        for i, (text, flag) in enumerate(texts_flags)
    )
    return LayoutDocument(200, 1000, "p.png", fragments)


class TestSelect:
    def test_by_class_include(self):
        doc = make_doc(
            [
                ("Acme Ltd.", False),
                ("Main Street", False),
                ("hello there", False),
                ("12/03/2024", False),
                ("13/03/2024", False),
            ]
        )
        rule = SelectionRule(RuleKind.BY_CLASS, ContentClass.FREE_TEXT)
        plan = select_targets(doc, [rule])
        assert plan.ids == ["frag_000", "frag_001", "frag_002"]

    def test_no_rules_uses_replace_flags(self):
        doc = make_doc([("a b", False), ("c d", True)])
        assert select_targets(doc, []).ids == ["frag_001"]

    def test_no_rules_no_flags_empty_plan(self):
        doc = make_doc([("a b", False), ("c d", False)])
        assert len(select_targets(doc, [])) == 0

    def test_pattern_include_then_id_exclude(self, sample_doc, sample_layout_text):
        # Oracle: enumerate pattern matches over the raw bundled layout.
        matching = [
            f.id for f in sample_doc.fragments if re.search("^INV-", f.text)
        ]
        assert matching, "sample layout must contain an INV- fragment"
        excluded = matching[0]
        rules = [
            SelectionRule(RuleKind.BY_PATTERN, "^INV-"),
            SelectionRule(RuleKind.BY_ID, [excluded], RuleAction.EXCLUDE),
        ]
        plan = select_targets(sample_doc, rules)
        assert excluded not in plan.ids
        # Fragments no rule matches fall back to their replace flag.
        flag_selected = {
            f.id for f in sample_doc.fragments if f.replace and f.id not in matching
        }
        assert set(plan.ids) == (set(matching) - {excluded}) | flag_selected

    def test_unknown_id_raises(self, sample_doc):
        rule = SelectionRule(RuleKind.BY_ID, ["frag_999"])
        with pytest.raises(PlanError, match="frag_999"):
            select_targets(sample_doc, [rule])

    def test_plan_order_matches_document_order(self, sample_doc):
        plan = select_targets(sample_doc, [SelectionRule(RuleKind.BY_CLASS, ContentClass.FREE_TEXT)])
        order = {f.id: i for i, f in enumerate(sample_doc.fragments)}
        positions = [order[i] for i in plan.ids]
        assert positions == sorted(positions)

    def test_role_label_attached(self):
        doc = make_doc([("Acme Ltd.", False)])
        rule = SelectionRule(RuleKind.BY_ID, ["frag_000"], role="recipient_name")
        plan = select_targets(doc, [rule])
        assert plan.entries[0].role == "recipient_name"

    def test_invalid_pattern_rejected(self):
        with pytest.raises(PlanError, match="pattern"):
            SelectionRule(RuleKind.BY_PATTERN, "([unclosed")

    def test_empty_payload_rejected(self):
        with pytest.raises(PlanError):
            SelectionRule(RuleKind.BY_ID, [])


# Last-rule-wins: appending an exclude for x removes exactly x.
@settings(max_examples=50, deadline=None)
@given(
    flags=st.lists(st.booleans(), min_size=1, max_size=8),
    target=st.integers(min_value=0, max_value=7),
    data=st.data(),
)
def test_last_rule_wins_property(flags, target, data):
    target %= len(flags)
    doc = make_doc([(f"word{i} text", flag) for i, flag in enumerate(flags)])
    base_rules = data.draw(
        st.lists(
            st.sampled_from(
                [
                    SelectionRule(RuleKind.BY_CLASS, ContentClass.FREE_TEXT),
                    SelectionRule(RuleKind.BY_PATTERN, "word[02468]"),
                    SelectionRule(RuleKind.BY_PATTERN, "word[13]", RuleAction.EXCLUDE),
                ]
            ),
            max_size=3,
        )
    )
    target_id = f"frag_{target:03d}"
    before = select_targets(doc, base_rules)
    after = select_targets(
        doc, base_rules + [SelectionRule(RuleKind.BY_ID, [target_id], RuleAction.EXCLUDE)]
    )
    assert set(after.ids) == set(before.ids) - {target_id}
    # Plan is always a subset of the document with no duplicates.
    assert len(set(after.ids)) == len(after.ids)
    assert set(after.ids) <= set(doc.fragment_ids)
