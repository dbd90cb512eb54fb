"""Training pipeline: corpus splitting, the bundled model, annotation.

A PipelineModel carries everything needed to annotate raw text: tokenizer
configuration, the three tagger classifiers, the suffix lemmatizer and the
dependency parser. Models serialize to a versioned JSON container whose
floats round-trip exactly, so a saved and reloaded model predicts
identically.
"""

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum

from .conllu import Document, serialize_conllu
from .depparser import ParserModel, train_parser
from .errors import DataError
from .lemmatizer import EditScript, LemmaRules, train_lemmatizer
from .tagger import TaggerModel, train_tagger
from .tokenizer import TokenizerConfig, tokenize
from .util import short_hash

MODEL_FORMAT = "udbridge-pipeline"
MODEL_VERSION = 1


class EvalSetting(Enum):
    RAW_TEXT = "raw"
    GOLD_TOK = "goldtok"
    GOLD_TOK_MORPH = "goldtokmorph"

    @classmethod
    def parse(cls, name: str) -> "EvalSetting":
        for setting in cls:
            if setting.value == name:
                return setting
        raise DataError(
            f"unknown setting {name!r}, expected one of: "
            + ", ".join(s.value for s in cls)
        )


@dataclass
class SplitSpec:
    """Fixed 80/10/10 split; dev and test each get floor(n/10) sentences."""

    train_fraction: float = 0.8
    dev_fraction: float = 0.1
    test_fraction: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if abs(self.train_fraction + self.dev_fraction + self.test_fraction - 1.0) > 1e-9:
            raise DataError("split fractions must sum to 1")


def split_corpus(doc: Document, spec: SplitSpec | None = None) -> tuple[Document, Document, Document]:
    """Shuffle sentences once by seed and cut train/dev/test."""
    if spec is None:
        spec = SplitSpec()
    n = len(doc.sentences)
    if n < 10:
        raise DataError(f"need at least 10 sentences to split, got {n}")
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    n_dev = math.floor(n * spec.dev_fraction + 1e-9)
    n_test = math.floor(n * spec.test_fraction + 1e-9)
    n_train = n - n_dev - n_test

    def take(indices):
        return Document(sentences=[doc.sentences[i].copy() for i in indices])

    return (
        take(order[:n_train]),
        take(order[n_train : n_train + n_dev]),
        take(order[n_train + n_dev :]),
    )


@dataclass
class PipelineModel:
    tagger: TaggerModel
    lemma_rules: LemmaRules
    parser: ParserModel
    tokenizer_cfg: TokenizerConfig = field(default_factory=TokenizerConfig)
    metadata: dict = field(default_factory=dict)

    def require_trained(self) -> None:
        if not self.tagger.classes.get("upos"):
            raise DataError("model has no trained tagger")

    def save(self, path: str) -> None:
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "metadata": self.metadata,
            "tokenizer": {
                "abbreviations": sorted(self.tokenizer_cfg.abbreviations),
                "punctuation": "".join(sorted(self.tokenizer_cfg.punctuation)),
                "terminators": sorted(self.tokenizer_cfg.terminators),
            },
            "tagger": {
                "classes": self.tagger.classes,
                "weights": self.tagger.weights,
            },
            "lemmatizer": [
                [suffix, upos, s.strip_suffix_len, s.append_suffix, s.casing_op, freq]
                for (suffix, upos), bucket in sorted(self.lemma_rules.rules.items())
                for s, freq in sorted(bucket.items())
            ],
            "parser": {
                "classes": self.parser.classes,
                "labels": self.parser.labels,
                "root_label": self.parser.root_label,
                "weights": self.parser.weights,
            },
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path: str) -> "PipelineModel":
        try:
            with open(path, encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as err:
            raise DataError(f"cannot load model from {path}: {err}") from None
        if payload.get("format") != MODEL_FORMAT:
            raise DataError(f"{path}: not a {MODEL_FORMAT} file")
        if payload.get("version") != MODEL_VERSION:
            raise DataError(
                f"{path}: unsupported model version {payload.get('version')!r}"
            )
        rules = LemmaRules()
        for suffix, upos, strip, append, casing, freq in payload["lemmatizer"]:
            script = EditScript(strip, append, casing)
            rules.rules.setdefault((suffix, upos), {})[script] = freq
        return cls(
            tagger=TaggerModel(
                weights=payload["tagger"]["weights"],
                classes=payload["tagger"]["classes"],
            ),
            lemma_rules=rules,
            parser=ParserModel(
                weights=payload["parser"]["weights"],
                classes=payload["parser"]["classes"],
                labels=payload["parser"]["labels"],
                root_label=payload["parser"]["root_label"],
            ),
            tokenizer_cfg=TokenizerConfig(
                abbreviations=set(payload["tokenizer"]["abbreviations"]),
                punctuation=set(payload["tokenizer"]["punctuation"]),
                terminators=set(payload["tokenizer"]["terminators"]),
            ),
            metadata=payload.get("metadata", {}),
        )


def train_pipeline(
    train: Document,
    dev: Document | None = None,
    epochs: int = 5,
    seed: int = 13,
    tokenizer_cfg: TokenizerConfig | None = None,
) -> PipelineModel:
    """Train tagger, lemmatizer and parser on one gold corpus."""
    model = PipelineModel(
        tagger=train_tagger(train, dev, epochs=epochs, seed=seed),
        lemma_rules=train_lemmatizer(train),
        parser=train_parser(train, dev, epochs=epochs, seed=seed),
        tokenizer_cfg=tokenizer_cfg if tokenizer_cfg is not None else TokenizerConfig(),
        metadata={
            "seed": seed,
            "epochs": epochs,
            "train_sentences": len(train.sentences),
            "corpus_hash": short_hash(serialize_conllu(train).encode("utf-8")),
        },
    )
    return model


def _parse_feats_label(label: str) -> dict[str, str]:
    if label == "_":
        return {}
    out = {}
    for item in label.split("|"):
        key, _, value = item.partition("=")
        out[key] = value
    return out


def annotate(source, model: PipelineModel, setting: EvalSetting) -> Document:
    """Run the pipeline.

    RAW_TEXT takes a str and tokenizes it first. GOLD_TOK takes a Document
    and predicts everything above the token layer. GOLD_TOK_MORPH keeps
    gold lemma/upos/xpos/feats and only predicts heads and deprels.
    """
    model.require_trained()
    if setting is EvalSetting.RAW_TEXT:
        if not isinstance(source, str):
            raise DataError("RAW_TEXT setting needs a raw text string")
        doc = tokenize(source, model.tokenizer_cfg)
    else:
        if not isinstance(source, Document):
            raise DataError(f"{setting.value} setting needs a Document")
        doc = source.copy()

    for sent in doc.sentences:
        forms = [t.form for t in sent.tokens]
        if not forms:
            continue
        if setting is EvalSetting.GOLD_TOK_MORPH:
            for tok in sent.tokens:
                if tok.upos is None:
                    raise DataError(
                        f"sentence {sent.sent_id}: token {tok.id} has no gold upos"
                        " (required by the goldtokmorph setting)"
                    )
            tags = [t.upos for t in sent.tokens]
        else:
            predicted = model.tagger.predict(forms)
            tags = predicted["upos"]
            for i, tok in enumerate(sent.tokens):
                tok.upos = tags[i]
                xpos = predicted["xpos"][i]
                tok.xpos = None if xpos == "_" else xpos
                tok.feats = _parse_feats_label(predicted["feats"][i])
                tok.lemma = model.lemma_rules.predict(tok.form, tags[i])
        heads, deprels = model.parser.parse(forms, tags)
        for i, tok in enumerate(sent.tokens):
            tok.head = heads[i]
            tok.deprel = deprels[i]
    return doc
