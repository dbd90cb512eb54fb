"""Greedy left-to-right averaged-perceptron tagger.

Three independent classifiers share one feature template: UPOS, XPOS, and
the FEATS bundle (the canonical sorted "k=v|k=v" string as an atomic
label). Features per token: the word form, its lowercase, prefixes and
suffixes of 1..4 characters, the neighbouring word forms, the previous two
predicted labels, and digit/capitalization flags.
"""

import random
from dataclasses import dataclass, field

from .conllu import Document
from .errors import DataError
from .perceptron import AveragedPerceptron, predict_with

ATTRIBUTES = ("upos", "xpos", "feats")

_PAD = "<s>"
_UNSET = "_"


def token_features(forms: list[str], i: int, prev: str, prev2: str) -> list[str]:
    w = forms[i]
    lw = w.lower()
    feats = ["bias", "w=" + w, "lw=" + lw]
    for k in (1, 2, 3, 4):
        feats.append(f"pre{k}={lw[:k]}")
        feats.append(f"suf{k}={lw[-k:]}")
    feats.append("pw=" + (forms[i - 1].lower() if i > 0 else _PAD))
    feats.append("nw=" + (forms[i + 1].lower() if i + 1 < len(forms) else _PAD))
    feats.append("pt=" + prev)
    feats.append("ppt=" + prev2 + "+" + prev)
    if any(ch.isdigit() for ch in w):
        feats.append("hasdigit")
    if w[:1].isupper():
        feats.append("cap")
    return feats


def _greedy(forms: list[str], weights: dict, classes: list[str]) -> list[str]:
    prev, prev2 = _PAD, _PAD
    out = []
    for i in range(len(forms)):
        guess = predict_with(weights, token_features(forms, i, prev, prev2), classes)
        out.append(guess)
        prev2, prev = prev, guess
    return out


@dataclass
class TaggerModel:
    weights: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)
    classes: dict[str, list[str]] = field(default_factory=dict)

    def predict_attribute(self, forms: list[str], attribute: str) -> list[str]:
        return _greedy(forms, self.weights[attribute], self.classes[attribute])

    def predict(self, forms: list[str]) -> dict[str, list[str]]:
        return {attr: self.predict_attribute(forms, attr) for attr in ATTRIBUTES}


def _gold_labels(doc: Document) -> list[tuple[list[str], dict[str, list[str]]]]:
    data = []
    for sent in doc.sentences:
        forms = [t.form for t in sent.tokens]
        labels: dict[str, list[str]] = {"upos": [], "xpos": [], "feats": []}
        for tok in sent.tokens:
            if tok.upos is None:
                raise DataError(
                    f"sentence {sent.sent_id}: token {tok.id} ({tok.form!r}) has no gold upos"
                )
            labels["upos"].append(tok.upos)
            labels["xpos"].append(tok.xpos if tok.xpos is not None else _UNSET)
            labels["feats"].append(tok.feats_string())
        data.append((forms, labels))
    return data


def train_tagger(
    train: Document,
    dev: Document | None = None,
    epochs: int = 5,
    seed: int = 13,
) -> TaggerModel:
    """Train the three attribute classifiers.

    Sentence order is reshuffled every epoch from `seed`. When a dev
    document is given, the averaged snapshot of the epoch with the best dev
    UPOS accuracy is returned (earliest epoch wins ties); otherwise the
    final epoch's snapshot.
    """
    if epochs < 1:
        raise DataError("epochs must be >= 1")
    data = _gold_labels(train)
    if not data:
        raise DataError("empty training document")
    dev_data = _gold_labels(dev) if dev is not None and dev.sentences else None

    classes = {
        attr: sorted({lab for _, labels in data for lab in labels[attr]})
        for attr in ATTRIBUTES
    }
    models = {attr: AveragedPerceptron() for attr in ATTRIBUTES}
    rng = random.Random(seed)
    order = list(range(len(data)))

    best_acc = -1.0
    best_weights: dict | None = None
    for _epoch in range(epochs):
        rng.shuffle(order)
        for idx in order:
            forms, labels = data[idx]
            for attr in ATTRIBUTES:
                model = models[attr]
                prev, prev2 = _PAD, _PAD
                for i in range(len(forms)):
                    feats = token_features(forms, i, prev, prev2)
                    guess = model.predict(feats, classes[attr])
                    model.update(labels[attr][i], guess, feats)
                    prev2, prev = prev, guess
        if dev_data is not None:
            snapshot = models["upos"].averaged()
            correct = total = 0
            for forms, labels in dev_data:
                for got, want in zip(_greedy(forms, snapshot, classes["upos"]), labels["upos"]):
                    correct += got == want
                    total += 1
            acc = correct / total
            if acc > best_acc:
                best_acc = acc
                best_weights = {attr: models[attr].averaged() for attr in ATTRIBUTES}
    if best_weights is None:
        best_weights = {attr: models[attr].averaged() for attr in ATTRIBUTES}
    return TaggerModel(weights=best_weights, classes=classes)
