"""Built-in annotation label catalog.

The catalog is a fixed tree of six top-level families. Interior nodes group
related phenomena; only leaves may be attached to annotation records. Each
node carries a short guideline gloss that annotation front-ends can display
inline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence


@dataclass(frozen=True)
class Label:
    """A slash-renderable path from a family root down to one catalog node."""

    path: tuple[str, ...]

    def __post_init__(self):
        if not self.path or any(not part for part in self.path):
            raise ValueError(f"empty label path component in {self.path!r}")

    @classmethod
    def parse(cls, text: str) -> "Label":
        return cls(tuple(text.split("/")))

    @property
    def family(self) -> str:
        return self.path[0]

    @property
    def name(self) -> str:
        return self.path[-1]

    def __str__(self) -> str:
        return "/".join(self.path)


@dataclass(frozen=True)
class TaxonomyNode:
    name: str
    description: str = ""
    children: tuple["TaxonomyNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self, prefix: tuple[str, ...] = ()) -> Iterator[tuple[tuple[str, ...], "TaxonomyNode"]]:
        """Preorder traversal yielding (path, node) pairs."""
        path = prefix + (self.name,)
        yield path, self
        for child in self.children:
            yield from child.walk(path)


@dataclass(frozen=True)
class Taxonomy:
    roots: tuple[TaxonomyNode, ...]
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for root in self.roots:
            for path, node in root.walk():
                if path in index:
                    raise ValueError(f"duplicate node path {'/'.join(path)}")
                index[path] = node
        object.__setattr__(self, "_index", index)

    def find(self, path: Sequence[str]) -> Optional[TaxonomyNode]:
        return self._index.get(tuple(path))

    def contains(self, label: Label) -> bool:
        return label.path in self._index

    def is_leaf(self, label: Label) -> bool:
        node = self._index.get(label.path)
        return node is not None and node.is_leaf

    def leaves(self, family: str | None = None) -> tuple[Label, ...]:
        """All leaf labels, optionally restricted to one family root."""
        out = []
        for path, node in self._index.items():
            if node.is_leaf and (family is None or path[0] == family):
                out.append(Label(path))
        return tuple(out)

    def subtree_paths(self, path: Sequence[str]) -> tuple[tuple[str, ...], ...]:
        """Every node path at or below the given path, preorder."""
        node = self.find(path)
        if node is None:
            raise KeyError("/".join(path))
        return tuple(p for p, _ in node.walk(tuple(path[:-1])))

    def families(self) -> tuple[str, ...]:
        return tuple(root.name for root in self.roots)

    def to_dict(self) -> list[dict]:
        def convert(node: TaxonomyNode) -> dict:
            return {
                "name": node.name,
                "description": node.description,
                "children": [convert(c) for c in node.children],
            }

        return [convert(root) for root in self.roots]


def _leaf(name: str, description: str = "") -> TaxonomyNode:
    return TaxonomyNode(name, description)


def _node(name: str, description: str, *children: TaxonomyNode) -> TaxonomyNode:
    return TaxonomyNode(name, description, tuple(children))


SUPPORTING_FACT = "SupportingFact"
ANSWER_TYPE = "AnswerType"
CORRECTNESS = "Correctness"
REASONING = "Reasoning"
KNOWLEDGE = "Knowledge"
LINGUISTIC_COMPLEXITY = "LinguisticComplexity"

_TREE = (
    _leaf(
        SUPPORTING_FACT,
        "Sentence(s) holding the evidence required to produce the expected "
        "answer. Marked per sentence, not as a label toggle.",
    ),
    _node(
        ANSWER_TYPE,
        "Surface form of the expected answer. Exactly one per record.",
        _leaf("Span", "Answer is a contiguous excerpt of a passage."),
        _leaf("Paraphrasing", "Answer restates passage content in other words."),
        _leaf(
            "Generated",
            "Composed answer that is neither an excerpt nor a paraphrase of "
            "one. Restating the question or concatenating excerpts does not "
            "qualify.",
        ),
        _leaf("Unanswerable", "The passages do not contain the answer."),
    ),
    _node(
        CORRECTNESS,
        "Problems with the expected answer itself. Requires a free-text note "
        "describing the alternative or correction.",
        _leaf(
            "Debatable",
            "Multiple plausible answers, contradictory references, or a more "
            "specific answer is available.",
        ),
        _leaf(
            "Wrong",
            "The expected answer is factually wrong while a correct one is "
            "present in the context.",
        ),
        _leaf("ArbitrarySelection", "One of several equally valid spans was picked."),
        _leaf(
            "ArbitraryPrecision",
            "Expected answer granularity is arbitrary given what the passage "
            "states.",
        ),
        _leaf(
            "ConjunctionOrIsolated",
            "Unclear whether multiple correct choices are meant to hold "
            "jointly or each on its own.",
        ),
        _leaf(
            "AnswerPresent",
            "Marked unanswerable although the context does answer it.",
        ),
        _leaf("Other", "Correctness problem outside the named patterns."),
    ),
    _node(
        REASONING,
        "Inference needed to derive the answer. Not annotated when the "
        "answer is stated verbatim; use Retrieval for that case.",
        _node(
            "Operational",
            "Combining or selecting facts across sentences.",
            _leaf("Bridge", "Facts joined through a shared entity, concept, date, or event."),
            _leaf("Comparison", "Properties of several entities must be compared."),
            _leaf("Constraint", "Answer is the entity satisfying a stated constraint."),
            _leaf("Intersection", "Answer is what several entities have in common."),
        ),
        _node(
            "Arithmetic",
            "Simple mathematics over values from the text.",
            _leaf("Subtraction", "A difference must be computed."),
            _leaf("Addition", "A sum must be computed."),
            _leaf("Ordering", "Numeric values must be ranked to select the answer."),
            _leaf("Counting", "Entities or events must be enumerated."),
            _leaf("OtherMath", "Any other arithmetic, such as averages or ratios."),
        ),
        _node(
            "Linguistic",
            "Logical reading of specific constructions.",
            _leaf("Negation", "Passage content must be negated."),
            _leaf("Quantifiers", "Existential or universal quantification must be resolved."),
            _leaf("Conditional", "Answer guarded by a condition whose truth must be checked."),
            _leaf(
                "Monotonicity",
                "Monotone entailment over quantified statements. No dedicated "
                "written guideline; annotate sparingly.",
            ),
            _leaf("ConDisjunction", "Logical and/or must be resolved."),
        ),
        _leaf("Temporal", "Succession of events in time must be reasoned about."),
        _leaf("Spatial", "Directions or spatial layout must be reasoned about."),
        _leaf("Causal", "A cause-effect relation must be inferred, not read off."),
        _leaf("ByExclusion", "Answer only reachable by ruling out every other candidate."),
        _leaf("Retrieval", "Answer is stated directly; no abstract reasoning involved."),
    ),
    _node(
        KNOWLEDGE,
        "Information beyond the passages needed to answer as expected.",
        _node(
            "Factual",
            "Expressible as a set of facts about the world.",
            _leaf("CulturalHistoric", "Cultural or historic background facts."),
            _leaf("GeoPoliticalLegal", "Geographic, political, or legal facts."),
            _leaf("TechnicalScientific", "Technical or scientific facts."),
            _leaf("OtherDomainSpecific", "Facts from some other specific domain."),
        ),
        _leaf("Intuitive", "Common-sense knowledge that resists enumeration as facts."),
    ),
    _node(
        LINGUISTIC_COMPLEXITY,
        "Phenomena that vary or obscure the wording between the question and "
        "its supporting facts. May carry sentence references.",
        _node(
            "LexicalVariety",
            "Word-level variation between question and evidence.",
            _leaf("Redundancy", "Removable span that does not change the answer."),
            _leaf("LexicalEntailment", "Hypernym or hyponym relations must be navigated."),
            _leaf("Dative", "Dative construction swaps with a prepositional one."),
            _leaf("SynonymParaphrase", "Question wording replaced by synonyms or a paraphrase."),
            _leaf("Abbreviation", "A shortened form must be matched with its expansion."),
            _leaf("Symmetry", "Symmetric or ergative predicate collects its arguments differently."),
        ),
        _node(
            "SyntacticVariety",
            "Structural variation between question and evidence.",
            _leaf("Nominalisation", "Verbal wording swaps with nominal style."),
            _leaf("Genitive", "Possessive case swaps with a prepositional phrase."),
            _leaf("Voice", "Active/passive switch for a shared verb."),
        ),
        _node(
            "LexicalAmbiguity",
            "Word-level readings that must be disambiguated.",
            _leaf("Restrictivity", "A modifier narrows which statements actually apply."),
            _leaf("Factivity", "A modifier changes whether a statement holds as fact."),
            _leaf("Coreference", "Pronouns or mentions must be resolved within or across sentences."),
            _leaf("EllipsisImplicit", "Required information is only implicit or elided."),
        ),
        _node(
            "SyntacticAmbiguity",
            "Attachment and scope readings that must be disambiguated.",
            _leaf("Preposition", "An ambiguous preposition must be attached correctly."),
            _leaf("Listing", "Arguments collected by and/or must be mapped to the right predicate."),
            _leaf("CoordinationScope", "The scope of a coordination changes the reading."),
            _leaf("RelAdvApp", "Relative clause, adverbial phrase, or apposition must be resolved."),
        ),
    ),
)

_TAXONOMY = Taxonomy(_TREE)

# Leaves referenced by validation rules.
UNANSWERABLE = Label((ANSWER_TYPE, "Unanswerable"))
RETRIEVAL = Label((REASONING, "Retrieval"))
DEBATABLE = Label((CORRECTNESS, "Debatable"))
WRONG = Label((CORRECTNESS, "Wrong"))
CORRECTNESS_VERDICTS = frozenset({DEBATABLE, WRONG})
CORRECTNESS_SUB_REASONS = frozenset(
    Label((CORRECTNESS, name))
    for name in ("ArbitrarySelection", "ArbitraryPrecision", "ConjunctionOrIsolated", "AnswerPresent", "Other")
)


def taxonomy() -> Taxonomy:
    """The immutable built-in label tree. Same object on every call."""
    return _TAXONOMY
