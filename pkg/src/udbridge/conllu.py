"""CoNLL-U (UD v2) reading, writing and validation.

Supported surface: ten-column token lines with integer ids, multiword range
lines ("1-2"), comment lines, and the SpaceAfter=No convention in MISC.
Enhanced dependencies and empty nodes ("1.1") are out of scope and rejected
with a parse error.

Reading is lenient about comment spacing but strict about structure: every
malformed input raises ConlluParseError or ValidationError with a line
number, never a bare IndexError/ValueError. Writing normalizes whitespace,
sorts FEATS keys, and reconstructs the `text` comment from token forms plus
SpaceAfter, so serialize(parse(x)) is a fixpoint after one pass.
"""

from dataclasses import dataclass, field

from .errors import ConlluParseError, ValidationError

UPOS_TAGS = frozenset(
    "ADJ ADP ADV AUX CCONJ DET INTJ NOUN NUM PART PRON PROPN PUNCT SCONJ SYM VERB X".split()
)

# Comment keys that are parsed into key/value form; anything else is kept verbatim.
_KNOWN_COMMENT_KEYS = ("sent_id", "text", "genre")


@dataclass
class Token:
    """One syntactic word. Unset annotation fields are None (written as "_").

    char_span holds half-open offsets into the sentence text (whitespace
    excluded from the span). It is derived bookkeeping and excluded from
    equality so that round-tripping compares annotation content only.
    """

    id: int
    form: str
    lemma: str | None = None
    upos: str | None = None
    xpos: str | None = None
    feats: dict[str, str] = field(default_factory=dict)
    head: int | None = None
    deprel: str | None = None
    deps: str = "_"
    misc: str = "_"
    char_span: tuple[int, int] | None = field(default=None, compare=False)

    def feats_string(self) -> str:
        if not self.feats:
            return "_"
        return "|".join(f"{k}={self.feats[k]}" for k in sorted(self.feats))

    def space_after(self) -> bool:
        return "SpaceAfter=No" not in self.misc.split("|")

    def copy(self) -> "Token":
        return Token(
            id=self.id,
            form=self.form,
            lemma=self.lemma,
            upos=self.upos,
            xpos=self.xpos,
            feats=dict(self.feats),
            head=self.head,
            deprel=self.deprel,
            deps=self.deps,
            misc=self.misc,
            char_span=self.char_span,
        )


@dataclass
class MultiwordRange:
    """Surface token covering the syntactic words start..end inclusive."""

    start: int
    end: int
    surface_form: str
    misc: str = "_"

    def space_after(self) -> bool:
        return "SpaceAfter=No" not in self.misc.split("|")


@dataclass
class Sentence:
    tokens: list[Token]
    ranges: list[MultiwordRange] = field(default_factory=list)
    # (key, value) for sent_id/text/genre; (None, raw_line) for anything else.
    comments: list[tuple[str | None, str]] = field(default_factory=list)

    def _comment_value(self, key: str) -> str | None:
        for k, v in self.comments:
            if k == key:
                return v
        return None

    def _set_comment(self, key: str, value: str) -> None:
        for i, (k, _) in enumerate(self.comments):
            if k == key:
                self.comments[i] = (key, value)
                return
        # sent_id leads; text goes right after sent_id; others append.
        if key == "sent_id":
            self.comments.insert(0, (key, value))
        elif key == "text":
            pos = 1 if self.comments and self.comments[0][0] == "sent_id" else 0
            self.comments.insert(pos, (key, value))
        else:
            self.comments.append((key, value))

    @property
    def sent_id(self) -> str | None:
        return self._comment_value("sent_id")

    @sent_id.setter
    def sent_id(self, value: str) -> None:
        self._set_comment("sent_id", value)

    @property
    def genre(self) -> str | None:
        return self._comment_value("genre")

    @genre.setter
    def genre(self, value: str) -> None:
        self._set_comment("genre", value)

    def text(self) -> str:
        return _layout(self)[0]

    def assign_char_spans(self) -> None:
        _, spans = _layout(self)
        for tok, span in zip(self.tokens, spans):
            tok.char_span = span

    def copy(self) -> "Sentence":
        return Sentence(
            tokens=[t.copy() for t in self.tokens],
            ranges=[
                MultiwordRange(r.start, r.end, r.surface_form, r.misc) for r in self.ranges
            ],
            comments=list(self.comments),
        )


@dataclass
class Document:
    """An ordered list of sentences. metadata is caller-owned bookkeeping
    (source path, corpus label) and does not take part in equality."""

    sentences: list[Sentence] = field(default_factory=list)
    metadata: dict[str, str] = field(default_factory=dict, compare=False)

    def tokens(self):
        for sent in self.sentences:
            yield from sent.tokens

    def copy(self) -> "Document":
        return Document(
            sentences=[s.copy() for s in self.sentences], metadata=dict(self.metadata)
        )


def _layout(sentence: Sentence) -> tuple[str, list[tuple[int, int]]]:
    """Reconstruct sentence text from forms + SpaceAfter and give each token
    its char span. Tokens covered by a multiword range share the range's span."""
    range_at = {r.start: r for r in sentence.ranges}
    parts: list[str] = []
    spans: list[tuple[int, int]] = []
    pos = 0
    i = 0
    toks = sentence.tokens
    while i < len(toks):
        rng = range_at.get(toks[i].id)
        if rng is not None:
            start = pos
            pos += len(rng.surface_form)
            parts.append(rng.surface_form)
            covered = rng.end - rng.start + 1
            spans.extend([(start, pos)] * covered)
            i += covered
            last_unit_space = rng.space_after()
        else:
            start = pos
            pos += len(toks[i].form)
            parts.append(toks[i].form)
            spans.append((start, pos))
            last_unit_space = toks[i].space_after()
            i += 1
        if i < len(toks) and last_unit_space:
            parts.append(" ")
            pos += 1
    return "".join(parts), spans


def _parse_feats(text: str, line_no: int) -> dict[str, str]:
    if text == "_":
        return {}
    feats: dict[str, str] = {}
    for item in text.split("|"):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ConlluParseError(f"malformed FEATS item {item!r}", line_no)
        if key in feats:
            raise ValidationError(f"duplicate FEATS key {key!r}", line_no)
        feats[key] = value
    return feats


def _opt(column: str) -> str | None:
    return None if column == "_" else column


def parse_conllu(text: str) -> Document:
    """Parse CoNLL-U text into a Document.

    Raises ConlluParseError / ValidationError (both carry the offending line
    number) on structural problems: wrong column counts, non-integer ids,
    duplicate or non-consecutive ids, dangling heads, overlapping ranges,
    bad UPOS values, duplicate sent_ids.
    """
    doc = Document()
    sent_tokens: list[Token] = []
    sent_ranges: list[MultiwordRange] = []
    sent_comments: list[tuple[str | None, str]] = []
    token_lines: list[int] = []
    range_lines: list[int] = []
    first_line = 0

    def flush(end_line: int) -> None:
        nonlocal sent_tokens, sent_ranges, sent_comments, token_lines, range_lines
        if not sent_tokens and not sent_comments and not sent_ranges:
            return
        if not sent_tokens:
            raise ConlluParseError("comment block without token lines", first_line)
        sent = Sentence(tokens=sent_tokens, ranges=sent_ranges, comments=sent_comments)
        _check_sentence(sent, first_line, token_lines, range_lines)
        if sent.sent_id is None:
            sent.sent_id = str(len(doc.sentences) + 1)
        sent._set_comment("text", sent.text())
        sent.assign_char_spans()
        doc.sentences.append(sent)
        sent_tokens, sent_ranges, sent_comments = [], [], []
        token_lines, range_lines = [], []

    all_lines = text.split("\n")
    for line_no, raw in enumerate(all_lines, start=1):
        line = raw.rstrip("\r")
        if line.strip() == "":
            flush(line_no)
            continue
        if not sent_tokens and not sent_comments and not sent_ranges:
            first_line = line_no
        if line.startswith("#"):
            if sent_tokens:
                raise ConlluParseError("comment after token lines", line_no)
            body = line[1:].strip()
            key, sep, value = body.partition("=")
            key = key.strip()
            if sep and key in _KNOWN_COMMENT_KEYS:
                sent_comments.append((key, value.strip()))
            else:
                sent_comments.append((None, line))
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(
                f"expected 10 tab-separated columns, got {len(cols)}", line_no
            )
        tok_id, form, lemma, upos, xpos, feats, head, deprel, deps, misc = cols
        if form == "":
            raise ConlluParseError("empty FORM column", line_no)
        if "-" in tok_id:
            lo, _, hi = tok_id.partition("-")
            if not lo.isdigit() or not hi.isdigit():
                raise ConlluParseError(f"malformed range id {tok_id!r}", line_no)
            for name, col in (
                ("LEMMA", lemma),
                ("UPOS", upos),
                ("XPOS", xpos),
                ("FEATS", feats),
                ("HEAD", head),
                ("DEPREL", deprel),
                ("DEPS", deps),
            ):
                if col != "_":
                    raise ValidationError(
                        f"range line must leave {name} unset, got {col!r}", line_no
                    )
            sent_ranges.append(MultiwordRange(int(lo), int(hi), form, misc))
            range_lines.append(line_no)
            continue
        if not tok_id.isdigit():
            raise ConlluParseError(f"malformed token id {tok_id!r}", line_no)
        if upos != "_" and upos not in UPOS_TAGS:
            raise ValidationError(f"unknown UPOS tag {upos!r}", line_no)
        if head != "_" and not head.isdigit():
            raise ConlluParseError(f"malformed HEAD {head!r}", line_no)
        sent_tokens.append(
            Token(
                id=int(tok_id),
                form=form,
                lemma=_opt(lemma),
                upos=_opt(upos),
                xpos=_opt(xpos),
                feats=_parse_feats(feats, line_no),
                head=None if head == "_" else int(head),
                deprel=_opt(deprel),
                deps=deps,
                misc=misc,
            )
        )
        token_lines.append(line_no)
    flush(len(all_lines) + 1)
    _check_document(doc)
    return doc


def _check_sentence(
    sent: Sentence,
    line_no: int | None,
    token_lines: list[int] | None = None,
    range_lines: list[int] | None = None,
) -> None:
    n = len(sent.tokens)
    if n == 0:
        raise ValidationError("sentence without tokens", line_no)

    def tline(idx: int) -> int | None:
        return token_lines[idx] if token_lines else line_no

    for pos, tok in enumerate(sent.tokens):
        expect = pos + 1
        if tok.id == expect:
            continue
        if any(t.id == tok.id for t in sent.tokens[:pos]):
            raise ValidationError(f"duplicate token id {tok.id}", tline(pos))
        raise ValidationError(
            f"token ids must be consecutive from 1, got {tok.id} at position {expect}",
            tline(pos),
        )
    for pos, tok in enumerate(sent.tokens):
        if tok.head is None:
            continue
        if tok.head == tok.id:
            raise ValidationError(f"token {tok.id} is its own head", tline(pos))
        if not 0 <= tok.head <= n:
            raise ValidationError(
                f"token {tok.id} has head {tok.head} outside 0..{n}", tline(pos)
            )
    prev_end = 0
    indexed = sorted(enumerate(sent.ranges), key=lambda item: item[1].start)
    for idx, rng in indexed:
        rline = range_lines[idx] if range_lines else line_no
        if rng.start >= rng.end:
            raise ValidationError(
                f"range {rng.start}-{rng.end} must satisfy start < end", rline
            )
        if rng.start < 1 or rng.end > n:
            raise ValidationError(
                f"range {rng.start}-{rng.end} outside token ids 1..{n}", rline
            )
        if rng.start <= prev_end:
            raise ValidationError(
                f"range {rng.start}-{rng.end} overlaps a previous range", rline
            )
        prev_end = rng.end
    for key in _KNOWN_COMMENT_KEYS:
        if sum(1 for k, _ in sent.comments if k == key) > 1:
            raise ValidationError(f"duplicate {key} comment", line_no)


def _check_document(doc: Document) -> None:
    seen: dict[str, int] = {}
    for idx, sent in enumerate(doc.sentences, start=1):
        sid = sent.sent_id
        if sid in seen:
            raise ValidationError(
                f"sent_id {sid!r} used by sentences {seen[sid]} and {idx}"
            )
        seen[sid] = idx


def validate_document(doc: Document) -> None:
    """Check structural invariants of an in-memory document."""
    for sent in doc.sentences:
        label = sent.sent_id or "?"
        try:
            _check_sentence(sent, None)
        except ValidationError as err:
            raise ValidationError(f"sentence {label}: {err}") from None
    _check_document(doc)


def serialize_conllu(doc: Document) -> str:
    """Write a document back to CoNLL-U text.

    The `text` comment is recomputed from forms + SpaceAfter, FEATS keys are
    sorted, and a sent_id comment is guaranteed. Refuses invalid documents.
    """
    validate_document(doc)
    blocks: list[str] = []
    for idx, sent in enumerate(doc.sentences, start=1):
        lines: list[str] = []
        comments = list(sent.comments)
        if not any(k == "sent_id" for k, _ in comments):
            comments.insert(0, ("sent_id", str(idx)))
        if not any(k == "text" for k, _ in comments):
            pos = 1 if comments and comments[0][0] == "sent_id" else 0
            comments.insert(pos, ("text", ""))
        reconstructed = sent.text()
        for key, value in comments:
            if key is None:
                lines.append(value)
            elif key == "text":
                lines.append(f"# text = {reconstructed}")
            else:
                lines.append(f"# {key} = {value}")
        range_at = {r.start: r for r in sent.ranges}
        for tok in sent.tokens:
            rng = range_at.get(tok.id)
            if rng is not None:
                lines.append(
                    "\t".join(
                        [
                            f"{rng.start}-{rng.end}",
                            rng.surface_form,
                            "_", "_", "_", "_", "_", "_", "_",
                            rng.misc,
                        ]
                    )
                )
            lines.append(
                "\t".join(
                    [
                        str(tok.id),
                        tok.form,
                        tok.lemma if tok.lemma is not None else "_",
                        tok.upos if tok.upos is not None else "_",
                        tok.xpos if tok.xpos is not None else "_",
                        tok.feats_string(),
                        str(tok.head) if tok.head is not None else "_",
                        tok.deprel if tok.deprel is not None else "_",
                        tok.deps,
                        tok.misc,
                    ]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


TSV_HEADER = (
    "doc_id",
    "sent_id",
    "token_id",
    "form",
    "lemma",
    "upos",
    "xpos",
    "feats",
    "head",
    "deprel",
)


def serialize_tsv(doc: Document, doc_id: str | None = None) -> str:
    """Flat one-row-per-token spreadsheet export (range lines are not rows)."""
    validate_document(doc)
    if doc_id is None:
        doc_id = doc.metadata.get("doc_id", "")
    out = ["\t".join(TSV_HEADER)]
    for sent in doc.sentences:
        sid = sent.sent_id or ""
        for tok in sent.tokens:
            out.append(
                "\t".join(
                    [
                        doc_id,
                        sid,
                        str(tok.id),
                        tok.form,
                        tok.lemma if tok.lemma is not None else "_",
                        tok.upos if tok.upos is not None else "_",
                        tok.xpos if tok.xpos is not None else "_",
                        tok.feats_string(),
                        str(tok.head) if tok.head is not None else "_",
                        tok.deprel if tok.deprel is not None else "_",
                    ]
                )
            )
    return "\n".join(out) + "\n"


def read_conllu_file(path: str) -> Document:
    with open(path, encoding="utf-8") as fh:
        doc = parse_conllu(fh.read())
    doc.metadata["path"] = path
    return doc


def write_conllu_file(path: str, doc: Document) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_conllu(doc))
