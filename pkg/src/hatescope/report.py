"""Inspection artifacts: keyword word trees, decision-tree exports and a
corpus summary report."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from hatescope.classify import DecisionTreeModel, Leaf, TreeNode, node_from_dict, node_to_dict
from hatescope.corpus import Corpus, monthly_timeline
from hatescope.errors import ParameterError
from hatescope.features import surfaces
from hatescope.keywords import extract_keywords
from hatescope.lexicon import SentimentLexicon, negativity_markers, polarity

SENTENCE_END = frozenset(".!?")


@dataclass
class WordTreeNode:
    token: str
    count: int
    children: list["WordTreeNode"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"token": self.token, "count": self.count, "children": [c.to_dict() for c in self.children]}

    @classmethod
    def from_dict(cls, d: dict) -> "WordTreeNode":
        return cls(d["token"], d["count"], [cls.from_dict(c) for c in d["children"]])

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0) if self.children else 0


def _sentences(text: str) -> list[list[str]]:
    out, cur = [], []
    for tok in surfaces(text):
        if tok in SENTENCE_END:
            if cur:
                out.append(cur)
            cur = []
        else:
            cur.append(tok)
    if cur:
        out.append(cur)
    return out


def word_tree(
    corpus: Corpus,
    keyword: str,
    direction: str = "right",
    max_depth: int = 4,
    min_count: int = 1,
) -> WordTreeNode:
    """Aggregate the contexts following (``right``) or preceding (``left``)
    each occurrence of ``keyword`` into a frequency trie.

    Contexts stop at the end of a document or at a ``.``, ``!`` or ``?``
    token, and after ``max_depth`` tokens. Branches seen fewer than
    ``min_count`` times are pruned. Children are ordered by count
    descending, then token.
    """
    if direction not in ("right", "left"):
        raise ParameterError(f"direction must be 'right' or 'left', got {direction!r}")
    if max_depth < 1:
        raise ParameterError("max_depth must be >= 1")
    key = surfaces(keyword)
    key = key[0] if len(key) == 1 else keyword.casefold()
    contexts: list[list[str]] = []
    total = 0
    for doc in corpus:
        # sentence enders only cut contexts; a "." keyword still counts
        words = surfaces(doc.text)
        total += sum(1 for w in words if w == key)
        for sent in _sentences(doc.text):
            for i, w in enumerate(sent):
                if w != key:
                    continue
                ctx = sent[i + 1 : i + 1 + max_depth] if direction == "right" else sent[max(0, i - max_depth) : i][::-1]
                contexts.append(ctx)
    root = WordTreeNode(key, total)

    def grow(node: WordTreeNode, ctxs: list[list[str]], depth: int):
        if depth >= max_depth:
            return
        groups: dict[str, list[list[str]]] = {}
        for c in ctxs:
            if len(c) > depth:
                groups.setdefault(c[depth], []).append(c)
        for tok, members in sorted(groups.items(), key=lambda kv: (-len(kv[1]), kv[0])):
            if len(members) < min_count:
                continue
            child = WordTreeNode(tok, len(members))
            node.children.append(child)
            grow(child, members, depth + 1)

    grow(root, contexts, 0)
    return root


def export_tree(model: DecisionTreeModel, format: str = "dot") -> str:
    """Render a decision tree as Graphviz DOT or as JSON."""
    if format == "json":
        return json.dumps(node_to_dict(model.root), ensure_ascii=False, indent=2) + "\n"
    if format != "dot":
        raise ParameterError(f"format must be 'dot' or 'json', got {format!r}")
    lines = ["digraph tree {", "  node [shape=box];"]
    counter = [0]

    def esc(s: str) -> str:
        return s.replace("\\", "\\\\").replace('"', '\\"')

    def emit(node: TreeNode) -> str:
        name = f"n{counter[0]}"
        counter[0] += 1
        if isinstance(node, Leaf):
            lines.append(f'  {name} [label="{esc(node.label)} ({node.size})", style=rounded];')
            return name
        lines.append(f'  {name} [label="{esc(node.feature)}"];')
        a = emit(node.absent)
        lines.append(f'  {name} -> {a} [label="absent"];')
        p = emit(node.present)
        lines.append(f'  {name} -> {p} [label="present"];')
        return name

    emit(model.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_tree_json(s: str) -> TreeNode:
    return node_from_dict(json.loads(s))


def summary_report(
    corpus: Corpus,
    reference: Corpus | None = None,
    lexicon: SentimentLexicon | None = None,
    markers: bool = False,
    emoji=None,
    top_k: int = 20,
    min_count: int = 5,
    alpha: float = 0.05,
) -> dict:
    """Aggregate corpus statistics into one JSON-ready dict.

    Optional sections appear only when their input is given: ``keywords``
    (``reference`` corpus), ``polarity`` (``lexicon``) and ``negativity``
    (``markers=True``).
    """
    labels = Counter(d.label for d in corpus if d.label is not None)
    report: dict = {
        "counts": {
            "documents": len(corpus),
            "labeled": sum(labels.values()),
            "timestamped": sum(1 for d in corpus if d.timestamp is not None),
        },
        "label_distribution": dict(sorted(labels.items())),
        "timeline": monthly_timeline(corpus).to_list(),
    }
    if reference is not None:
        stats = extract_keywords(corpus, reference, min_count=min_count, alpha=alpha)
        report["keywords"] = [s.to_dict() for s in stats[:top_k]]
    if lexicon is not None:
        scores = [polarity(d.text, lexicon) for d in corpus]
        n = len(scores)
        report["polarity"] = {
            "mean": sum(s for s, _ in scores) / n if n else 0.0,
            "negative_share": sum(1 for s, _ in scores if s < 0) / n if n else 0.0,
            "subjective_share": sum(1 for _, m in scores if m > 0) / n if n else 0.0,
        }
    if markers:
        ms = [negativity_markers(d.text, emoji) for d in corpus]
        n = len(ms) or 1
        report["negativity"] = {
            "allcaps_ratio": sum(m.allcaps_ratio for m in ms) / n,
            "exclamation_density": sum(m.exclamation_density for m in ms) / n,
            "angry_emoji_count": sum(m.angry_emoji_count for m in ms) / n,
        }
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, ensure_ascii=False, indent=2) + "\n"

