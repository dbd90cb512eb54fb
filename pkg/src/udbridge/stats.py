"""Descriptive corpus statistics: genre distribution, tag frequencies,
frequent tokens per tag, and lemma co-occurrence edges for graph views.

Counting conventions: tokens = all surface tokens; words = tokens that are
not PUNCT. Genre percentages are integers rounded half away from zero.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .conllu import Document
from .errors import DataError
from .util import round_half_up


@dataclass
class GenreRow:
    genre: str
    tokens: int
    words: int
    sentences: int
    tokens_pct: int = 0
    words_pct: int = 0
    sentences_pct: int = 0


@dataclass
class GenreTable:
    rows: list[GenreRow] = field(default_factory=list)
    total_tokens: int = 0
    total_words: int = 0
    total_sentences: int = 0

    def to_tsv(self) -> str:
        lines = ["genre\ttokens\ttokens_pct\twords\twords_pct\tsentences\tsentences_pct"]
        for r in self.rows:
            lines.append(
                f"{r.genre}\t{r.tokens}\t{r.tokens_pct}\t{r.words}\t{r.words_pct}"
                f"\t{r.sentences}\t{r.sentences_pct}"
            )
        lines.append(
            f"total\t{self.total_tokens}\t100\t{self.total_words}\t100"
            f"\t{self.total_sentences}\t100"
        )
        return "\n".join(lines) + "\n"


def genre_table_from_counts(rows: list[tuple[str, int, int, int]]) -> GenreTable:
    """Build the distribution table from raw (genre, tokens, words,
    sentences) counts."""
    if not rows:
        raise DataError("no genre rows")
    table = GenreTable()
    table.total_tokens = sum(r[1] for r in rows)
    table.total_words = sum(r[2] for r in rows)
    table.total_sentences = sum(r[3] for r in rows)
    if min(table.total_tokens, table.total_words, table.total_sentences) <= 0:
        raise DataError("genre totals must be positive")
    for genre, tokens, words, sentences in rows:
        table.rows.append(
            GenreRow(
                genre=genre,
                tokens=tokens,
                words=words,
                sentences=sentences,
                tokens_pct=int(round_half_up(100.0 * tokens / table.total_tokens)),
                words_pct=int(round_half_up(100.0 * words / table.total_words)),
                sentences_pct=int(
                    round_half_up(100.0 * sentences / table.total_sentences)
                ),
            )
        )
    return table


def genre_distribution(docs: list[tuple[str, Document]]) -> GenreTable:
    """Count tokens/words/sentences per genre; words exclude PUNCT."""
    counted: dict[str, list[int]] = {}
    order: list[str] = []
    for genre, doc in docs:
        if genre not in counted:
            counted[genre] = [0, 0, 0]
            order.append(genre)
        bucket = counted[genre]
        for sent in doc.sentences:
            bucket[2] += 1
            for tok in sent.tokens:
                bucket[0] += 1
                if tok.upos != "PUNCT":
                    bucket[1] += 1
    return genre_table_from_counts([(g, *counted[g]) for g in order])


def split_by_genre(doc: Document, default: str = "all") -> list[tuple[str, Document]]:
    """Group sentences by their genre comment (document order preserved)."""
    grouped: dict[str, Document] = {}
    order: list[str] = []
    for sent in doc.sentences:
        genre = sent.genre or default
        if genre not in grouped:
            grouped[genre] = Document()
            order.append(genre)
        grouped[genre].sentences.append(sent)
    return [(g, grouped[g]) for g in order]


def upos_frequencies(doc: Document) -> list[tuple[str, int]]:
    """Tag counts, most frequent first, ties alphabetical. Untagged tokens
    are skipped."""
    counts: dict[str, int] = {}
    for tok in doc.tokens():
        if tok.upos is not None:
            counts[tok.upos] = counts.get(tok.upos, 0) + 1
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def top_tokens_per_upos(doc: Document, n: int = 10) -> dict[str, list[tuple[str, int]]]:
    """The n most frequent forms for every tag, same ordering rule."""
    if n < 1:
        raise DataError("n must be >= 1")
    per_tag: dict[str, dict[str, int]] = {}
    for tok in doc.tokens():
        if tok.upos is None:
            continue
        bucket = per_tag.setdefault(tok.upos, {})
        bucket[tok.form] = bucket.get(tok.form, 0) + 1
    return {
        tag: sorted(bucket.items(), key=lambda kv: (-kv[1], kv[0]))[:n]
        for tag, bucket in sorted(per_tag.items())
    }


@dataclass(frozen=True)
class CoocEdge:
    lemma_a: str
    lemma_b: str
    weight: int


def cooccurrence(doc: Document, upos_filter: str, min_weight: int = 1) -> list[CoocEdge]:
    """Sentence-level co-occurrence of lemmas with the given tag.

    Each unordered lemma pair counts at most once per sentence, pairs are
    stored with lemma_a < lemma_b, self-loops are impossible, and edges
    below min_weight are dropped. Sorted by weight desc, then lemmas.
    """
    if min_weight < 1:
        raise DataError("min_weight must be >= 1")
    weights: dict[tuple[str, str], int] = {}
    for sent in doc.sentences:
        lemmas = sorted(
            {t.lemma for t in sent.tokens if t.upos == upos_filter and t.lemma is not None}
        )
        for a, b in combinations(lemmas, 2):
            weights[(a, b)] = weights.get((a, b), 0) + 1
    edges = [
        CoocEdge(a, b, w) for (a, b), w in weights.items() if w >= min_weight
    ]
    edges.sort(key=lambda e: (-e.weight, e.lemma_a, e.lemma_b))
    return edges


def upos_freq_tsv(doc: Document) -> str:
    lines = ["upos\tcount"]
    lines += [f"{tag}\t{count}" for tag, count in upos_frequencies(doc)]
    return "\n".join(lines) + "\n"


def top_tokens_tsv(doc: Document, n: int = 10) -> str:
    lines = ["upos\trank\tform\tcount"]
    for tag, items in top_tokens_per_upos(doc, n).items():
        lines += [
            f"{tag}\t{rank}\t{form}\t{count}"
            for rank, (form, count) in enumerate(items, start=1)
        ]
    return "\n".join(lines) + "\n"


def cooc_edges_tsv(doc: Document, upos_filter: str, min_weight: int = 1) -> str:
    lines = ["lemma_a\tlemma_b\tweight"]
    lines += [
        f"{e.lemma_a}\t{e.lemma_b}\t{e.weight}"
        for e in cooccurrence(doc, upos_filter, min_weight)
    ]
    return "\n".join(lines) + "\n"
