"""Arc-standard transition-based dependency parser (greedy, averaged
perceptron).

The stack starts with the virtual root node 0; arcs to node 0 are only
allowed once the buffer is empty and exactly two elements remain, which
makes every parse a single-rooted acyclic tree by construction. The final
root attachment always uses the root label and skips scoring entirely, so
a one-token sentence parses without consulting weights.

Training follows the static oracle on a projectivized copy of the gold
trees (non-projective arcs are repeatedly lifted to the grandparent);
evaluation and reporting always use the original trees.
"""

import random
from dataclasses import dataclass, field

from .conllu import Document, Sentence
from .errors import DataError
from .perceptron import AveragedPerceptron, predict_with

SHIFT = "shift"
_NONE = "<none>"
_ROOT = "<root>"


def validate_tree(sent: Sentence) -> None:
    """Gold trees must be fully attached, single-rooted and acyclic."""
    label = sent.sent_id or "?"
    n = len(sent.tokens)
    heads = {}
    for tok in sent.tokens:
        if tok.head is None:
            raise DataError(f"sentence {label}: token {tok.id} has no head")
        heads[tok.id] = tok.head
    roots = [i for i, h in heads.items() if h == 0]
    if len(roots) != 1:
        raise DataError(
            f"sentence {label}: expected exactly one root, found {len(roots)}"
        )
    for start in range(1, n + 1):
        seen = set()
        node = start
        while node != 0:
            if node in seen:
                raise DataError(f"sentence {label}: head cycle through token {node}")
            seen.add(node)
            node = heads[node]


def is_projective(heads: list[int]) -> bool:
    """heads[0] unused; token i has head heads[i]."""
    n = len(heads) - 1
    for dep in range(1, n + 1):
        lo, hi = sorted((dep, heads[dep]))
        for k in range(lo + 1, hi):
            if not lo <= heads[k] <= hi:
                return False
    return True


def projectivize(heads: list[int]) -> list[int]:
    """Lift non-projective arcs to the grandparent until projective.

    Works on 1-based heads (heads[0] ignored). Among offending arcs the
    shortest span is lifted first, ties to the smaller dependent.
    """
    heads = list(heads)
    n = len(heads) - 1
    while True:
        offender: tuple[int, int] | None = None
        for dep in range(1, n + 1):
            h = heads[dep]
            if h == 0:
                continue
            lo, hi = sorted((dep, h))
            if all(lo <= heads[k] <= hi for k in range(lo + 1, hi)):
                continue
            key = (hi - lo, dep)
            if offender is None or key < offender:
                offender = key
        if offender is None:
            return heads
        dep = offender[1]
        heads[dep] = heads[heads[dep]]


@dataclass
class _State:
    n: int
    stack: list[int] = field(default_factory=lambda: [0])
    next_buf: int = 1
    heads: list[int] = field(init=False)
    deprels: list[str] = field(init=False)
    # leftmost / rightmost attached child label per node, for features
    lc: dict[int, tuple[int, str]] = field(default_factory=dict)
    rc: dict[int, tuple[int, str]] = field(default_factory=dict)

    def __post_init__(self):
        self.heads = [0] * (self.n + 1)
        self.deprels = [_NONE] * (self.n + 1)

    def buffer_first(self, offset: int = 0) -> int | None:
        pos = self.next_buf + offset
        return pos if pos <= self.n else None

    def buffer_empty(self) -> bool:
        return self.next_buf > self.n

    def terminal(self) -> bool:
        return self.buffer_empty() and len(self.stack) == 1

    def add_arc(self, head: int, dep: int, label: str) -> None:
        self.heads[dep] = head
        self.deprels[dep] = label
        if dep < head and (head not in self.lc or dep < self.lc[head][0]):
            self.lc[head] = (dep, label)
        if dep > head and (head not in self.rc or dep > self.rc[head][0]):
            self.rc[head] = (dep, label)

    def apply(self, move: str, root_label: str) -> None:
        if move == SHIFT:
            self.stack.append(self.next_buf)
            self.next_buf += 1
        elif move.startswith("left:"):
            s0 = self.stack.pop()
            s1 = self.stack.pop()
            self.add_arc(s0, s1, move[5:])
            self.stack.append(s0)
        elif move.startswith("right:"):
            s0 = self.stack.pop()
            head = self.stack[-1]
            self.add_arc(head, s0, root_label if head == 0 else move[6:])
        else:
            raise DataError(f"unknown transition {move!r}")


def _valid_moves(state: _State, arc_classes: list[str]) -> list[str]:
    moves: list[str] = []
    if not state.buffer_empty():
        moves.append(SHIFT)
    if len(state.stack) >= 2:
        if state.stack[-2] != 0:
            moves.extend(arc_classes)
        elif state.buffer_empty():
            moves.append("right:root")
    return moves


def _node_feats(state: _State, forms: list[str], tags: list[str]):
    def form(i: int | None) -> str:
        if i is None:
            return _NONE
        return _ROOT if i == 0 else forms[i - 1]

    def tag(i: int | None) -> str:
        if i is None:
            return _NONE
        return _ROOT if i == 0 else tags[i - 1]

    s = state.stack
    s0 = s[-1] if len(s) > 1 else None
    s1 = s[-2] if len(s) > 2 else None
    s2 = s[-3] if len(s) > 3 else None
    b0 = state.buffer_first(0)
    b1 = state.buffer_first(1)

    def child(table: dict, node: int | None) -> str:
        if node is None or node not in table:
            return _NONE
        return table[node][1]

    f = [
        "bias",
        "s0w=" + form(s0),
        "s0t=" + tag(s0),
        "s0wt=" + form(s0) + "/" + tag(s0),
        "s1w=" + form(s1),
        "s1t=" + tag(s1),
        "s1wt=" + form(s1) + "/" + tag(s1),
        "s2t=" + tag(s2),
        "b0w=" + form(b0),
        "b0t=" + tag(b0),
        "b0wt=" + form(b0) + "/" + tag(b0),
        "b1w=" + form(b1),
        "b1t=" + tag(b1),
        "s0s1t=" + tag(s0) + "+" + tag(s1),
        "s0s1w=" + form(s0) + "+" + form(s1),
        "s0b0t=" + tag(s0) + "+" + tag(b0),
        "s1b0t=" + tag(s1) + "+" + tag(b0),
        "s0s1b0t=" + tag(s0) + "+" + tag(s1) + "+" + tag(b0),
        "s0lc=" + child(state.lc, s0),
        "s0rc=" + child(state.rc, s0),
        "s1lc=" + child(state.lc, s1),
        "s1rc=" + child(state.rc, s1),
    ]
    if s0 is not None and s1 is not None:
        f.append("dist=" + str(min(s0 - s1, 5)))
    return f


def oracle_move(state: _State, heads: list[int], deprels: list[str], n_children: list[int]) -> str:
    if len(state.stack) >= 2:
        s1, s0 = state.stack[-2], state.stack[-1]
        if s1 != 0 and heads[s1] == s0:
            return "left:" + deprels[s1]
        if heads[s0] == s1:
            attached = sum(1 for d in range(1, len(heads)) if state.heads[d] == s0)
            if attached == n_children[s0]:
                return "right:" + deprels[s0]
    if state.buffer_empty():
        raise DataError("oracle stuck: tree is not projective")
    return SHIFT


@dataclass
class ParserModel:
    weights: dict[str, dict[str, float]] = field(default_factory=dict)
    classes: list[str] = field(default_factory=list)  # sorted, includes "shift"
    labels: list[str] = field(default_factory=list)
    root_label: str = "root"

    def parse(self, forms: list[str], tags: list[str]) -> tuple[list[int], list[str]]:
        """Greedy parse; returns 1-based heads and deprels per token."""
        n = len(forms)
        state = _State(n=n)
        arc_classes = [c for c in self.classes if c != SHIFT]
        while not state.terminal():
            moves = _valid_moves(state, arc_classes)
            if moves == ["right:root"]:
                state.apply("right:root", self.root_label)
                continue
            if len(moves) == 1:
                state.apply(moves[0], self.root_label)
                continue
            feats = _node_feats(state, forms, tags)
            move = predict_with(self.weights, feats, sorted(moves))
            state.apply(move, self.root_label)
        return state.heads[1:], state.deprels[1:]


def _sentence_arrays(sent: Sentence) -> tuple[list[str], list[str], list[int], list[str]]:
    forms = [t.form for t in sent.tokens]
    tags = []
    for t in sent.tokens:
        if t.upos is None:
            raise DataError(
                f"sentence {sent.sent_id}: token {t.id} ({t.form!r}) has no upos for parsing"
            )
        tags.append(t.upos)
    heads = [0] + [t.head for t in sent.tokens]
    deprels = [_NONE] + [t.deprel if t.deprel is not None else "dep" for t in sent.tokens]
    return forms, tags, heads, deprels


def train_parser(
    train: Document,
    dev: Document | None = None,
    epochs: int = 5,
    seed: int = 13,
) -> ParserModel:
    """Teacher-forced training along the static oracle.

    Gold trees are validated (errors name the sent_id) and projectivized
    for oracle purposes only. With a dev document, the epoch whose averaged
    snapshot scores the best dev UAS is kept.
    """
    if epochs < 1:
        raise DataError("epochs must be >= 1")
    if not train.sentences:
        raise DataError("empty training document")
    for sent in train.sentences:
        validate_tree(sent)
    if dev is not None:
        for sent in dev.sentences:
            validate_tree(sent)

    data = []
    root_counts: dict[str, int] = {}
    label_set: set[str] = set()
    for sent in train.sentences:
        forms, tags, heads, deprels = _sentence_arrays(sent)
        proj_heads = projectivize(heads)
        for dep in range(1, len(heads)):
            if proj_heads[dep] == 0:
                root_counts[deprels[dep]] = root_counts.get(deprels[dep], 0) + 1
            else:
                label_set.add(deprels[dep])
        data.append((forms, tags, proj_heads, deprels))
    root_label = min(
        root_counts, key=lambda lab: (-root_counts[lab], lab), default="root"
    )
    labels = sorted(label_set) if label_set else ["dep"]
    classes = sorted([SHIFT] + [f"left:{l}" for l in labels] + [f"right:{l}" for l in labels])
    arc_classes = [c for c in classes if c != SHIFT]

    model = AveragedPerceptron()
    rng = random.Random(seed)
    order = list(range(len(data)))
    best_uas = -1.0
    best_weights = None

    for _epoch in range(epochs):
        rng.shuffle(order)
        for idx in order:
            forms, tags, heads, deprels = data[idx]
            n_children = [0] * (len(heads))
            for d in range(1, len(heads)):
                n_children[heads[d]] += 1
            state = _State(n=len(forms))
            while not state.terminal():
                truth = oracle_move(state, heads, deprels, n_children)
                moves = _valid_moves(state, arc_classes)
                if moves == ["right:root"]:
                    state.apply(truth, root_label)
                    continue
                feats = _node_feats(state, forms, tags)
                guess = model.predict(feats, sorted(moves))
                model.update(truth, guess, feats)
                state.apply(truth, root_label)
        if dev is not None and dev.sentences:
            snapshot = ParserModel(
                weights=model.averaged(), classes=classes, labels=labels, root_label=root_label
            )
            correct = total = 0
            for sent in dev.sentences:
                forms, tags, gold_heads, _ = _sentence_arrays(sent)
                got_heads, _ = snapshot.parse(forms, tags)
                for d in range(len(forms)):
                    correct += got_heads[d] == gold_heads[d + 1]
                    total += 1
            uas = correct / total
            if uas > best_uas:
                best_uas = uas
                best_weights = snapshot.weights
    if best_weights is None:
        best_weights = model.averaged()
    return ParserModel(
        weights=best_weights, classes=classes, labels=labels, root_label=root_label
    )
