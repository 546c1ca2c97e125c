"""Keyword lists for captions and QA pairs.

Two sources: a remote chat-completion-style HTTP service (with retrying
client and a persistent JSONL cache), and a deterministic offline
fallback used for tests and air-gapped runs. Keywords are embedded
per phrase downstream, so extraction returns phrases verbatim apart
from trimming, lowercasing, and order-preserving deduplication.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import requests

from .errors import ConfigError, EvqaError, ExtractionParseError

ENDPOINT_ENV = "EVQA_LLM_ENDPOINT"
TOKEN_ENV = "EVQA_LLM_TOKEN"

PROMPT_SLOT = "{text}"

# The extraction prompt is data, not code: override it per run when the
# service expects different instructions. It must keep exactly one slot.
DEFAULT_PROMPT = (
    "Extract the key phrases from the following sentence: objects, actions, "
    "attributes, and named entities. Return ONLY a comma-separated list of "
    "short phrases, nothing else.\n\nSentence: " + PROMPT_SLOT
)

DEFAULT_STOPWORDS = frozenset(
    """
    a an the this that these those some any each
    i you he she it we they me him her us them my your his its our their
    am is are was were be been being do does did done have has had having
    will would shall should can could may might must
    and or but if then else when while of at by for with about against
    between into through during before after above below to from up down
    in out on off over under again further once here there all both few
    more most other such no nor not only own same so than too very just
    as what which who whom whose why how where
    """.split()
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _dedupe(keywords: Iterable[str]) -> list[str]:
    seen: dict[str, None] = {}
    for kw in keywords:
        if kw and kw not in seen:
            seen[kw] = None
    return list(seen)


def extract_fallback(text: str, stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Deterministic offline extraction.

    Lowercase, split on non-alphanumeric runs, drop stopwords and tokens
    shorter than 2 characters, dedupe preserving first occurrence.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    return _dedupe(t for t in tokens if len(t) >= 2 and t not in stopwords)


@dataclass(frozen=True)
class KeywordRequest:
    """One extraction request: the text, the guiding prompt, the model."""

    text: str
    prompt: str = DEFAULT_PROMPT
    model_tag: str = "default"

    def __post_init__(self):
        slots = self.prompt.count(PROMPT_SLOT)
        if slots != 1:
            raise ValueError(f"prompt must contain exactly one {PROMPT_SLOT} slot, found {slots}")

    def rendered_prompt(self) -> str:
        return self.prompt.replace(PROMPT_SLOT, self.text)

    def cache_key(self) -> str:
        payload = json.dumps([self.text, self.prompt, self.model_tag], ensure_ascii=False)
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class KeywordExtraction:
    """Extraction outcome; ``degenerate`` marks a remote miss patched offline."""

    keywords: tuple[str, ...]
    degenerate: bool = False


class KeywordCache:
    """Append-only JSONL cache keyed by (text, prompt, model) content hash.

    Identical keys always map to identical results, so concurrent
    last-write-wins appends are benign. Corrupt lines are skipped.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, KeywordExtraction] = {}
        self._lock = threading.Lock()
        if self.path.is_file():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                try:
                    d = json.loads(line)
                    self._entries[str(d["key"])] = KeywordExtraction(
                        keywords=tuple(str(k) for k in d["keywords"]),
                        degenerate=bool(d.get("degenerate", False)),
                    )
                except (json.JSONDecodeError, KeyError, TypeError):
                    continue

    def get(self, key: str) -> Optional[KeywordExtraction]:
        with self._lock:
            return self._entries.get(key)

    def put(self, key: str, result: KeywordExtraction) -> None:
        entry = {
            "key": key,
            "keywords": list(result.keywords),
            "created_at": datetime.now(timezone.utc).isoformat(),
            "degenerate": result.degenerate,
        }
        with self._lock:
            self._entries[key] = result
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry, ensure_ascii=False) + "\n")

    def __len__(self) -> int:
        return len(self._entries)


def parse_keyword_list(body: str) -> list[str]:
    """Split a comma-delimited keyword string; trim, lowercase, dedupe."""
    return _dedupe(part.strip().lower() for part in body.split(","))


class FallbackKeywordSource:
    """Offline source wrapping :func:`extract_fallback`."""

    def __init__(self, stopwords: frozenset[str] | set[str] = DEFAULT_STOPWORDS):
        self.stopwords = stopwords

    def extract(self, text: str) -> KeywordExtraction:
        return KeywordExtraction(keywords=tuple(extract_fallback(text, self.stopwords)))


class LLMKeywordSource:
    """Remote extraction over HTTP: POST {model, prompt}, response {text}.

    Network failures retry with bounded exponential backoff (3 attempts).
    An empty remote result falls through to the offline extractor and the
    outcome is flagged degenerate. Results are cached persistently, so a
    given (text, prompt, model) triggers at most one remote call ever.
    """

    def __init__(
        self,
        endpoint: str,
        model_tag: str = "default",
        prompt: str = DEFAULT_PROMPT,
        token: Optional[str] = None,
        cache: Optional[KeywordCache] = None,
        session=None,
        attempts: int = 3,
        backoff_base: float = 0.5,
        timeout: float = 30.0,
        sleep: Callable[[float], None] = time.sleep,
        fallback: Optional[FallbackKeywordSource] = None,
    ):
        self.endpoint = endpoint
        self.model_tag = model_tag
        self.prompt = prompt
        self.token = token
        self.cache = cache
        self.session = session or requests.Session()
        self.attempts = attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.sleep = sleep
        self.fallback = fallback or FallbackKeywordSource()

    def _post(self, rendered: str):
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        return self.session.post(
            self.endpoint,
            json={"model": self.model_tag, "prompt": rendered},
            headers=headers,
            timeout=self.timeout,
        )

    def _call_remote(self, rendered: str) -> str:
        last_error: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                self.sleep(min(self.backoff_base * 2 ** (attempt - 1), 8.0))
            try:
                resp = self._post(rendered)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if resp.status_code >= 500:
                last_error = EvqaError(f"keyword service returned {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise EvqaError(f"keyword service returned {resp.status_code}: {resp.text[:200]}")
            try:
                body = resp.json()
            except ValueError:
                raise ExtractionParseError("response is not JSON", resp.text)
            if not isinstance(body, dict) or not isinstance(body.get("text"), str):
                raise ExtractionParseError("response JSON has no string 'text' field", resp.text)
            return body["text"]
        raise EvqaError(f"keyword service unreachable after {self.attempts} attempts: {last_error}")

    def extract(self, text: str) -> KeywordExtraction:
        request = KeywordRequest(text=text, prompt=self.prompt, model_tag=self.model_tag)
        key = request.cache_key()
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        raw = self._call_remote(request.rendered_prompt())
        keywords = parse_keyword_list(raw)
        if keywords:
            result = KeywordExtraction(keywords=tuple(keywords))
        else:
            result = KeywordExtraction(
                keywords=self.fallback.extract(text).keywords, degenerate=True
            )
        if self.cache is not None:
            self.cache.put(key, result)
        return result

    def extract_many(self, texts: Sequence[str], max_in_flight: int = 4) -> list[KeywordExtraction]:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
            return list(pool.map(self.extract, texts))


def source_from_env(
    kind: str,
    cache_path: Optional[str | Path] = None,
    prompt: Optional[str] = None,
    model_tag: str = "default",
):
    """Build a keyword source for the CLI: 'fallback' or 'llm' (env-configured)."""
    if kind == "fallback":
        return FallbackKeywordSource()
    if kind == "llm":
        endpoint = os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            raise ConfigError(f"--keyword-source llm requires {ENDPOINT_ENV} to be set")
        cache = KeywordCache(cache_path) if cache_path else None
        return LLMKeywordSource(
            endpoint=endpoint,
            model_tag=model_tag,
            prompt=prompt or DEFAULT_PROMPT,
            token=os.environ.get(TOKEN_ENV),
            cache=cache,
        )
    raise ConfigError(f"unknown keyword source {kind!r}")
