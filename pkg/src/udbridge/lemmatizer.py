"""Suffix-rule lemmatizer.

Each (form, lemma) pair is compressed into an EditScript: optionally adjust
casing, strip N characters from the end, append a suffix. Scripts are
indexed under the form's final 1..4 characters plus the UPOS tag. At
prediction time the longest matching suffix key wins; within a key,
higher training frequency wins, then lexicographic script order. Unseen
(suffix, upos) combinations fall back to the identity lemma.
"""

from dataclasses import dataclass, field

from .conllu import Document
from .errors import DataError

CASING_OPS = ("keep", "lower_first", "lower_all")
MAX_SUFFIX = 4


@dataclass(frozen=True, order=True)
class EditScript:
    strip_suffix_len: int
    append_suffix: str
    casing_op: str = "keep"

    def apply(self, form: str) -> str | None:
        """None when the script does not fit the form."""
        if self.casing_op == "lower_first":
            base = form[:1].lower() + form[1:]
        elif self.casing_op == "lower_all":
            base = form.lower()
        else:
            base = form
        if self.strip_suffix_len > len(base):
            return None
        stem = base[: len(base) - self.strip_suffix_len] if self.strip_suffix_len else base
        return stem + self.append_suffix


def _common_prefix_len(a: str, b: str) -> int:
    n = min(len(a), len(b))
    i = 0
    while i < n and a[i] == b[i]:
        i += 1
    return i


def derive_script(form: str, lemma: str) -> EditScript:
    """Smallest script (fewest stripped, then shortest appended, then the
    mildest casing op) that maps form to lemma. Always succeeds."""
    best: tuple[tuple[int, int, int], EditScript] | None = None
    for rank, op in enumerate(CASING_OPS):
        if op == "lower_first":
            base = form[:1].lower() + form[1:]
        elif op == "lower_all":
            base = form.lower()
        else:
            base = form
        k = _common_prefix_len(base, lemma)
        script = EditScript(len(base) - k, lemma[k:], op)
        key = (script.strip_suffix_len, len(script.append_suffix), rank)
        if best is None or key < best[0]:
            best = (key, script)
    return best[1]


@dataclass
class LemmaRules:
    # (suffix, upos) -> {script: frequency}
    rules: dict[tuple[str, str], dict[EditScript, int]] = field(default_factory=dict)

    def add(self, form: str, upos: str, lemma: str) -> None:
        script = derive_script(form, lemma)
        for length in range(1, min(MAX_SUFFIX, len(form)) + 1):
            key = (form[-length:], upos)
            bucket = self.rules.setdefault(key, {})
            bucket[script] = bucket.get(script, 0) + 1

    def predict(self, form: str, upos: str | None) -> str:
        if upos is None:
            return form
        for length in range(min(MAX_SUFFIX, len(form)), 0, -1):
            bucket = self.rules.get((form[-length:], upos))
            if not bucket:
                continue
            # Highest frequency first, then lexicographic script order.
            for script, _freq in sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0])):
                result = script.apply(form)
                if result is not None:
                    return result
        return form


def train_lemmatizer(train: Document) -> LemmaRules:
    rules = LemmaRules()
    for sent in train.sentences:
        for tok in sent.tokens:
            if tok.lemma is None:
                raise DataError(
                    f"sentence {sent.sent_id}: token {tok.id} ({tok.form!r}) has no gold lemma"
                )
            if tok.upos is None:
                raise DataError(
                    f"sentence {sent.sent_id}: token {tok.id} ({tok.form!r}) has no gold upos"
                )
            rules.add(tok.form, tok.upos, tok.lemma)
    return rules
