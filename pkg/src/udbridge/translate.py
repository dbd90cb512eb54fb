"""Word-for-word pivot translation with pluggable backends.

A TranslatorClient turns words of the low-resource language into words of
the related pivot language, one word at a time, so sentence length is
always preserved. Backends: a remote HTTP service, a static lexicon, or
identity (for tests and for graceful degradation). Some remote engines only
translate faithfully when the word is sent inside quotes, so the client can
wrap requests in single or double quotes and strips them from responses.

Failures never raise: after the configured retries the word falls back to
itself and a fallback event is counted. Successful translations go through
a persistent TSV cache keyed case-sensitively by the source word.
"""

import json
import logging
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from enum import Enum

from .errors import DataError

log = logging.getLogger(__name__)


class Quoting(Enum):
    NONE = "none"
    SINGLE = "single"
    DOUBLE = "double"

    @property
    def char(self) -> str:
        return {"none": "", "single": "'", "double": '"'}[self.value]


class LexiconCache:
    """Word -> translation cache with hit/miss counters.

    Persistence is a two-column TSV (source<TAB>target). Reads are lock-free
    on the underlying dict; writes are serialized.
    """

    def __init__(self, path: str | None = None):
        self.path = path
        self._data: dict[str, str] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if path is not None:
            self._load(path)

    def _load(self, path: str) -> None:
        try:
            fh = open(path, encoding="utf-8")
        except FileNotFoundError:
            return
        with fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                if "\t" not in line:
                    raise DataError(f"lexicon line {line_no}: expected source<TAB>target")
                src, _, tgt = line.partition("\t")
                self._data[src] = tgt

    def lookup(self, word: str) -> str | None:
        value = self._data.get(word)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def store(self, word: str, translation: str) -> None:
        with self._lock:
            self._data[word] = translation

    def save(self, path: str | None = None) -> None:
        path = path or self.path
        if path is None:
            raise DataError("cache has no file path")
        with self._lock:
            lines = [f"{k}\t{self._data[k]}" for k in sorted(self._data)]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))

    def __len__(self) -> int:
        return len(self._data)


def load_lexicon(path: str) -> dict[str, str]:
    """Read a source<TAB>target TSV into a plain dict."""
    return dict(LexiconCache(path)._data)


@dataclass
class PivotSentence:
    """Length-preserving word-for-word translation of one sentence."""

    source_tokens: list[str]
    pivot_tokens: list[str]
    fallbacks: list[bool] | None = None  # True where the word fell back to itself

    def __post_init__(self):
        if len(self.source_tokens) != len(self.pivot_tokens):
            raise DataError(
                f"pivot sentence length mismatch: {len(self.source_tokens)} source"
                f" vs {len(self.pivot_tokens)} pivot tokens"
            )
        if self.fallbacks is not None and len(self.fallbacks) != len(self.source_tokens):
            raise DataError("fallback flags must align with the tokens")


class Backend:
    def translate(self, word: str) -> str:
        raise NotImplementedError


class IdentityBackend(Backend):
    def translate(self, word: str) -> str:
        return word


class StaticLexiconBackend(Backend):
    """Dictionary lookup; missing words raise so the client's fallback fires."""

    def __init__(self, lexicon: dict[str, str]):
        self.lexicon = dict(lexicon)

    def translate(self, word: str) -> str:
        try:
            return self.lexicon[word]
        except KeyError:
            raise DataError(f"word {word!r} not in lexicon") from None


class RemoteServiceBackend(Backend):
    """POSTs {"text": ..., "direction": ...} and reads {"translation": ...}."""

    def __init__(self, endpoint: str, direction: str = "src-pivot", timeout: float = 10.0):
        self.endpoint = endpoint
        self.direction = direction
        self.timeout = timeout

    def translate(self, word: str) -> str:
        payload = json.dumps({"text": word, "direction": self.direction}).encode("utf-8")
        request = urllib.request.Request(
            self.endpoint, data=payload, headers={"Content-Type": "application/json"}
        )
        with urllib.request.urlopen(request, timeout=self.timeout) as response:
            body = json.loads(response.read().decode("utf-8"))
        return str(body["translation"])


class TranslatorClient:
    def __init__(
        self,
        backend: Backend,
        quoting: Quoting = Quoting.NONE,
        cache: LexiconCache | None = None,
        max_retries: int = 2,
    ):
        self.backend = backend
        self.quoting = quoting
        self.cache = cache
        self.max_retries = max_retries
        self.fallback_count = 0
        self.remote_calls = 0

    def _strip_quotes(self, text: str) -> str:
        q = self.quoting.char
        if not q:
            return text
        while text.startswith(q) and len(text) > 1:
            text = text[1:]
        while text.endswith(q) and len(text) > 1:
            text = text[:-1]
        return text

    def translate_word(self, word: str) -> str:
        """Translate one word. Never raises on backend trouble: after
        max_retries+1 attempts the word is returned unchanged and a fallback
        event recorded. Multi-word answers collapse to their first item."""
        if word == "" or any(ch.isspace() for ch in word):
            raise DataError(f"translate_word needs a single non-empty word, got {word!r}")
        if self.cache is not None:
            cached = self.cache.lookup(word)
            if cached is not None:
                return cached
        request = self.quoting.char + word + self.quoting.char
        result: str | None = None
        for _ in range(self.max_retries + 1):
            try:
                self.remote_calls += 1
                result = self.backend.translate(request)
                break
            except Exception as err:  # noqa: BLE001 - degrade, never crash
                last_error = err
        if result is None:
            log.warning("translation fallback for %r: %s", word, last_error)
            self.fallback_count += 1
            return word
        result = self._strip_quotes(result.strip())
        if any(ch.isspace() for ch in result):
            first = result.split()[0]
            log.info("multi-word translation %r for %r collapsed to %r", result, word, first)
            result = first
        if result == "":
            self.fallback_count += 1
            return word
        if self.cache is not None:
            self.cache.store(word, result)
        return result

    def translate_sentence(self, tokens: list[str]) -> PivotSentence:
        pivots = []
        fallbacks = []
        for tok in tokens:
            before = self.fallback_count
            pivots.append(self.translate_word(tok))
            fallbacks.append(self.fallback_count > before)
        return PivotSentence(
            source_tokens=list(tokens), pivot_tokens=pivots, fallbacks=fallbacks
        )
