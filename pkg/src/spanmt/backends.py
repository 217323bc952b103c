"""Translation backends behind one contract: documents in, documents out.

Three implementations:

* IdentityBackend  — returns inputs verbatim (pipeline plumbing tests).
* MockBackend      — deterministic fake translator that can drop tags,
                     append commas inside tags and rewrite words, reproducing
                     the failure modes real services exhibit.
* RemoteBackend    — generic client for a markup-preserving MT service
                     (tag-handling mode), with batching, retries, backoff and
                     a client-side request-rate cap.

Backends never return partial output: the result is positionally aligned with
the request or an error is raised.
"""

from __future__ import annotations

import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from .markup import MarkupDocument

SUPPORTED_LANGUAGES: dict[str, str] = {
    "en": "English",
    "bg": "Bulgarian",
    "cs": "Czech",
    "da": "Danish",
    "de": "German",
    "el": "Greek",
    "es": "Spanish",
    "et": "Estonian",
    "fi": "Finnish",
    "fr": "French",
    "hu": "Hungarian",
    "id": "Indonesian",
    "it": "Italian",
    "ja": "Japanese",
    "lt": "Lithuanian",
    "lv": "Latvian",
    "nl": "Dutch",
    "pl": "Polish",
    "pt-BR": "Portuguese (Brazil)",
    "pt-PT": "Portuguese (Portugal)",
    "ro": "Romanian",
    "sk": "Slovak",
    "sl": "Slovenian",
    "sv": "Swedish",
    "tr": "Turkish",
    "uk": "Ukrainian",
    "zh": "Chinese",
}

WORD_TRANSFORMS = frozenset({"reverse_words_inside_tags", "dictionary_substitute", "identity"})


class BackendError(Exception):
    """Base class for translation-backend failures."""


class AuthenticationError(BackendError):
    pass


class RateLimitError(BackendError):
    pass


class TransportError(BackendError):
    pass


class ProviderError(BackendError):
    """Provider answered but the payload violates the contract."""


@dataclass(frozen=True)
class TranslationRequest:
    documents: tuple[MarkupDocument, ...]
    source_lang: str
    target_lang: str

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        if not self.documents:
            raise ValueError("request carries no documents")
        for lang in (self.source_lang, self.target_lang):
            if lang not in SUPPORTED_LANGUAGES:
                raise ValueError(f"unsupported language tag {lang!r}")


@dataclass(frozen=True)
class TranslationResult:
    documents: tuple[str, ...]
    provider_meta: dict[str, str] = field(default_factory=dict)


class TranslationBackend(Protocol):
    def translate(self, request: TranslationRequest) -> TranslationResult: ...

    def describe(self) -> str: ...


class IdentityBackend:
    def translate(self, request: TranslationRequest) -> TranslationResult:
        return TranslationResult(documents=tuple(d.text for d in request.documents),
                                 provider_meta={"backend": "identity"})

    def describe(self) -> str:
        return "identity"


# --------------------------------------------------------------------------
# Deterministic mock
# --------------------------------------------------------------------------

_TAGGED_SEGMENT = re.compile(r'<m id="([0-9]+)">(.*?)</m>', re.DOTALL)


@dataclass(frozen=True)
class MockBehavior:
    """Scripted per-entity corruption keyed by (sentence_id, entity_id)."""

    drop_tag_ids: frozenset[tuple[str, int]] = frozenset()
    append_comma_ids: frozenset[tuple[str, int]] = frozenset()
    word_transform: str = "identity"
    dictionary: dict[str, str] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.word_transform not in WORD_TRANSFORMS:
            raise ValueError(f"unknown word transform {self.word_transform!r}")
        object.__setattr__(self, "drop_tag_ids",
                           frozenset((str(s), int(e)) for s, e in self.drop_tag_ids))
        object.__setattr__(self, "append_comma_ids",
                           frozenset((str(s), int(e)) for s, e in self.append_comma_ids))

    @classmethod
    def from_json_file(cls, path: str | Path) -> "MockBehavior":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            drop_tag_ids=frozenset((s, e) for s, e in obj.get("drop", [])),
            append_comma_ids=frozenset((s, e) for s, e in obj.get("append_comma", [])),
            word_transform=obj.get("word_transform", "identity"),
            dictionary=dict(obj.get("dictionary", {})),
            seed=int(obj.get("seed", 0)),
        )


def _reverse_words(segment: str) -> str:
    # split("/join(" ") round-trips exactly, so applying this twice is identity
    return " ".join(reversed(segment.split(" ")))


def _substitute_words(segment: str, dictionary: dict[str, str]) -> str:
    return " ".join(dictionary.get(w, w) for w in segment.split(" "))


class MockBackend:
    """Applies a MockBehavior to well-formed (non-nested) markup documents."""

    def __init__(self, behavior: MockBehavior | None = None):
        self.behavior = behavior or MockBehavior()

    def _transform(self, segment: str, inside_tag: bool) -> str:
        b = self.behavior
        if b.word_transform == "reverse_words_inside_tags":
            return _reverse_words(segment) if inside_tag else segment
        if b.word_transform == "dictionary_substitute":
            return _substitute_words(segment, b.dictionary)
        return segment

    def _translate_document(self, doc: MarkupDocument) -> str:
        b = self.behavior
        out: list[str] = []
        pos = 0
        for m in _TAGGED_SEGMENT.finditer(doc.text):
            out.append(self._transform(doc.text[pos:m.start()], inside_tag=False))
            entity_id = int(m.group(1))
            inner = self._transform(m.group(2), inside_tag=True)
            key = (doc.source_sentence_id, entity_id)
            if key in b.append_comma_ids:
                inner += ","
            if key in b.drop_tag_ids:
                out.append(inner)
            else:
                out.append(f'<m id="{entity_id}">{inner}</m>')
            pos = m.end()
        out.append(self._transform(doc.text[pos:], inside_tag=False))
        return "".join(out)

    def translate(self, request: TranslationRequest) -> TranslationResult:
        docs = tuple(self._translate_document(d) for d in request.documents)
        return TranslationResult(documents=docs, provider_meta={"backend": self.describe()})

    def describe(self) -> str:
        b = self.behavior
        return (f"mock(transform={b.word_transform},seed={b.seed},"
                f"drops={len(b.drop_tag_ids)},commas={len(b.append_comma_ids)})")


# --------------------------------------------------------------------------
# Remote client
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RemoteConfig:
    endpoint: str
    credential_env: str = "SPANMT_API_KEY"
    max_batch_size: int = 50
    retry_limit: int = 3
    backoff_base: float = 0.5
    requests_per_second: float | None = None

    def __post_init__(self):
        if self.max_batch_size < 1:
            raise ValueError("max_batch_size must be >= 1")
        if self.retry_limit < 0:
            raise ValueError("retry_limit must be >= 0")


class RemoteBackend:
    """Minimal generic client for a tag-handling MT endpoint.

    Wire format: POST `{"texts": [...], "source_lang": ..., "target_lang": ...,
    "tag_handling": "xml"}` with the credential in an Authorization header; the
    response carries a `texts` array of equal length. A thin vendor adapter can
    map this onto a concrete provider.
    """

    def __init__(self, config: RemoteConfig, session=None,
                 sleep: Callable[[float], None] = time.sleep,
                 monotonic: Callable[[], float] = time.monotonic,
                 rng: random.Random | None = None):
        import requests  # deferred so offline use of the other backends stays import-free

        self.config = config
        self._session = session if session is not None else requests.Session()
        self._sleep = sleep
        self._monotonic = monotonic
        self._rng = rng or random.Random()
        self._dispatch_lock = threading.Lock()
        self._last_dispatch: float | None = None

    def describe(self) -> str:
        return f"remote({self.config.endpoint})"

    def _credential(self) -> str:
        key = os.environ.get(self.config.credential_env)
        if not key:
            raise AuthenticationError(
                f"credential environment variable {self.config.credential_env} is not set")
        return key

    def _respect_rate_cap(self) -> None:
        cap = self.config.requests_per_second
        if not cap:
            return
        min_interval = 1.0 / cap
        now = self._monotonic()
        if self._last_dispatch is not None:
            wait = self._last_dispatch + min_interval - now
            if wait > 0:
                self._sleep(wait)
        self._last_dispatch = self._monotonic()

    def _post_batch(self, texts: list[str], source_lang: str, target_lang: str,
                    headers: dict[str, str]) -> list[str]:
        import requests

        body = {"texts": texts, "source_lang": source_lang,
                "target_lang": target_lang, "tag_handling": "xml"}
        last_error: BackendError | None = None
        for attempt in range(self.config.retry_limit + 1):
            if attempt:
                backoff = self.config.backoff_base * (2 ** (attempt - 1))
                self._sleep(backoff * (0.5 + self._rng.random() / 2))
            with self._dispatch_lock:
                self._respect_rate_cap()
                try:
                    response = self._session.post(self.config.endpoint, json=body,
                                                  headers=headers, timeout=60)
                except requests.RequestException as exc:
                    last_error = TransportError(f"transport failure: {exc}")
                    continue
            if response.status_code in (401, 403):
                raise AuthenticationError(f"provider rejected credentials "
                                          f"(HTTP {response.status_code})")
            if response.status_code == 429:
                last_error = RateLimitError("provider rate limit (HTTP 429)")
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"provider failure (HTTP {response.status_code})")
                continue
            if response.status_code != 200:
                raise ProviderError(f"unexpected HTTP status {response.status_code}")
            try:
                payload = response.json()
                translated = list(payload["texts"])
            except (ValueError, KeyError, TypeError):
                raise ProviderError("response payload lacks a texts array") from None
            if len(translated) != len(texts):
                raise ProviderError(
                    f"provider returned {len(translated)} texts for a batch of {len(texts)}")
            return [str(t) for t in translated]
        assert last_error is not None
        raise last_error

    def translate(self, request: TranslationRequest) -> TranslationResult:
        headers = {"Authorization": f"Bearer {self._credential()}"}
        texts = [d.text for d in request.documents]
        size = self.config.max_batch_size
        translated: list[str] = []
        batches = 0
        for i in range(0, len(texts), size):
            translated.extend(self._post_batch(texts[i:i + size], request.source_lang,
                                               request.target_lang, headers))
            batches += 1
        return TranslationResult(
            documents=tuple(translated),
            provider_meta={"backend": "remote", "endpoint": self.config.endpoint,
                           "batches": str(batches)},
        )
