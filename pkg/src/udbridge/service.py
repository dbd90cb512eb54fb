"""HTTP annotation service.

Endpoints: POST /annotate, POST /stats, GET /health. Request bodies are
UTF-8 JSON. /annotate returns the annotated document itself (CoNLL-U or
TSV as plain text, "json" as a structured document); errors and the other
endpoints return JSON objects. The model is loaded once at startup and
never mutated, so worker threads share it freely.
"""

import json
import os
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .conllu import Document, parse_conllu, serialize_conllu, serialize_tsv
from .errors import DataError, UdbridgeError
from .pipeline import EvalSetting, PipelineModel, annotate
from .stats import cooccurrence, top_tokens_per_upos, upos_frequencies
from .util import short_hash

BIND_ENV_VAR = "UDBRIDGE_BIND"
FORMATS = ("conllu", "tsv", "json")

# config file keys -> ServiceConfig fields
_CONFIG_KEYS = {
    "bind": "bind",
    "model": "model_path",
    "max_request_bytes": "max_request_bytes",
    "format": "default_format",
    "workers": "workers",
}


@dataclass
class ServiceConfig:
    bind: str = "127.0.0.1:8570"
    model_path: str = ""
    max_request_bytes: int = 1 << 20
    default_format: str = "conllu"
    workers: int = 8

    def __post_init__(self):
        if not self.model_path:
            raise DataError("service config needs a model path")
        if self.max_request_bytes < 1024:
            raise DataError("max_request_bytes must be >= 1024")
        if self.default_format not in FORMATS:
            raise DataError(f"unknown output format {self.default_format!r}")
        if self.workers < 1:
            raise DataError("workers must be >= 1")
        host, _, port = self.bind.rpartition(":")
        if not host or not port.isdigit():
            raise DataError(f"bind address must be host:port, got {self.bind!r}")

    @property
    def host(self) -> str:
        return self.bind.rpartition(":")[0]

    @property
    def port(self) -> int:
        return int(self.bind.rpartition(":")[2])


def read_config_file(path: str) -> dict[str, str]:
    """Parse a key=value config file. '#' starts a comment line."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
            if key not in _CONFIG_KEYS:
                raise DataError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def build_config(config_path=None, overrides=None) -> ServiceConfig:
    """Merge defaults, config file, environment, and flag overrides.

    Precedence, lowest to highest: built-in defaults, config file, the
    bind-address environment variable, explicit overrides (flags).
    """
    merged: dict[str, object] = {}
    if config_path:
        for key, value in read_config_file(config_path).items():
            merged[_CONFIG_KEYS[key]] = value
    env_bind = os.environ.get(BIND_ENV_VAR)
    if env_bind:
        merged["bind"] = env_bind
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _CONFIG_KEYS:
            raise DataError(f"unknown config override {key!r}")
        merged[_CONFIG_KEYS[key]] = value
    for field in ("max_request_bytes", "workers"):
        if field in merged:
            try:
                merged[field] = int(merged[field])
            except (TypeError, ValueError):
                raise DataError(f"{field} must be an integer") from None
    return ServiceConfig(**merged)


def document_to_object(doc: Document) -> dict:
    """Structured form of a document: sentences -> tokens -> all ten fields."""
    sentences = []
    for sent in doc.sentences:
        tokens = []
        for tok in sent.tokens:
            tokens.append(
                {
                    "id": tok.id,
                    "form": tok.form,
                    "lemma": tok.lemma,
                    "upos": tok.upos,
                    "xpos": tok.xpos,
                    "feats": dict(tok.feats),
                    "head": tok.head,
                    "deprel": tok.deprel,
                    "deps": tok.deps,
                    "misc": tok.misc,
                }
            )
        ranges = [
            {"start": r.start, "end": r.end, "form": r.surface_form}
            for r in sent.ranges
        ]
        sentences.append(
            {
                "sent_id": sent.sent_id,
                "text": sent.text(),
                "tokens": tokens,
                "ranges": ranges,
            }
        )
    return {"sentences": sentences}


class _HttpError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    # quiet by default; the server object may carry a log stream
    def log_message(self, format, *args):
        stream = getattr(self.server, "log_stream", None)
        if stream is not None:
            stream.write(("%s - %s\n" % (self.address_string(), format % args)))

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        if status != 200:
            # error paths may leave the request body unread; a reused
            # connection would then misparse, so force a fresh one
            self.close_connection = True
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        if self.close_connection:
            self.send_header("Connection", "close")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self._send(status, body, "application/json; charset=utf-8")

    def _send_text(self, text: str) -> None:
        self._send(200, text.encode("utf-8"), "text/plain; charset=utf-8")

    def _read_body(self) -> dict:
        length_header = self.headers.get("Content-Length")
        if length_header is None:
            raise _HttpError(400, "missing Content-Length")
        try:
            length = int(length_header)
        except ValueError:
            raise _HttpError(400, "bad Content-Length") from None
        if length > self.server.config.max_request_bytes:
            raise _HttpError(413, "request body too large")
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            raise _HttpError(400, "body must be UTF-8 JSON") from None
        if not isinstance(payload, dict):
            raise _HttpError(400, "body must be a JSON object")
        return payload

    def do_GET(self):
        with self.server.worker_slots:
            if self.path == "/health":
                self._send_json(
                    200, {"status": "ok", "model": self.server.model_hash}
                )
            else:
                self._send_json(404, {"error": "not found"})

    def do_POST(self):
        with self.server.worker_slots:
            try:
                if self.path == "/annotate":
                    self._annotate()
                elif self.path == "/stats":
                    self._stats()
                else:
                    self._send_json(404, {"error": "not found"})
            except _HttpError as err:
                self._send_json(err.status, {"error": str(err)})
            except UdbridgeError as err:
                self._send_json(400, {"error": str(err)})
            except Exception:
                # nothing internal leaks to the client
                self._send_json(500, {"error": "internal error"})

    def _annotate(self) -> None:
        payload = self._read_body()
        text = payload.get("text")
        if not isinstance(text, str) or not text.strip():
            raise _HttpError(400, "empty text")
        fmt = payload.get("format", self.server.config.default_format)
        if fmt not in FORMATS:
            raise _HttpError(400, f"unknown format {fmt!r}")
        setting_name = payload.get("setting", EvalSetting.RAW_TEXT.value)
        try:
            setting = EvalSetting.parse(setting_name)
        except UdbridgeError as err:
            raise _HttpError(400, str(err)) from None
        source = text if setting is EvalSetting.RAW_TEXT else parse_conllu(text)
        doc = annotate(source, self.server.model, setting)
        if fmt == "json":
            self._send_json(200, document_to_object(doc))
        elif fmt == "tsv":
            self._send_text(serialize_tsv(doc))
        else:
            self._send_text(serialize_conllu(doc))

    def _stats(self) -> None:
        payload = self._read_body()
        text = payload.get("text")
        if not isinstance(text, str) or not text.strip():
            raise _HttpError(400, "empty text")
        report = payload.get("report")
        if report not in ("upos", "top", "cooc"):
            raise _HttpError(400, f"unknown report {report!r}")
        doc = annotate(text, self.server.model, EvalSetting.RAW_TEXT)
        if report == "upos":
            rows = [[tag, count] for tag, count in upos_frequencies(doc)]
        elif report == "top":
            top_n = payload.get("top_n", 10)
            if not isinstance(top_n, int) or top_n < 1:
                raise _HttpError(400, "top_n must be a positive integer")
            rows = []
            for tag, items in top_tokens_per_upos(doc, top_n).items():
                rows += [
                    [tag, rank, form, count]
                    for rank, (form, count) in enumerate(items, start=1)
                ]
        else:
            upos_filter = payload.get("upos_filter")
            if not isinstance(upos_filter, str) or not upos_filter:
                raise _HttpError(400, "report 'cooc' needs upos_filter")
            min_weight = payload.get("min_weight", 1)
            if not isinstance(min_weight, int) or min_weight < 1:
                raise _HttpError(400, "min_weight must be a positive integer")
            edges = cooccurrence(doc, upos_filter, min_weight)
            rows = [[e.lemma_a, e.lemma_b, e.weight] for e in edges]
        self._send_json(200, {"report": report, "rows": rows})


class AnnotationServer(ThreadingHTTPServer):
    daemon_threads = True
    # the default listen backlog of 5 drops connections under bursts
    request_queue_size = 128

    def __init__(self, config: ServiceConfig, log_stream=None):
        self.config = config
        self.model = PipelineModel.load(config.model_path)
        with open(config.model_path, "rb") as fh:
            self.model_hash = short_hash(fh.read())
        self.worker_slots = threading.BoundedSemaphore(config.workers)
        self.log_stream = log_stream
        super().__init__((config.host, config.port), _Handler)


def make_server(config: ServiceConfig, log_stream=None) -> AnnotationServer:
    """Load the model and bind the listening socket. Port 0 picks a free port."""
    return AnnotationServer(config, log_stream=log_stream)
