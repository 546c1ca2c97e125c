"""Keyword extraction for the toolkit: offline rule or remote LLM service.

The wire contract matches the scoring engine's documented one: POST
{model, prompt} to EVQA_LLM_ENDPOINT, read a comma-separated list from
the response's string "text" field.
"""
from __future__ import annotations

import os
import re
import time

import requests

ENDPOINT_ENV = "EVQA_LLM_ENDPOINT"
TOKEN_ENV = "EVQA_LLM_TOKEN"

STOPWORDS = frozenset(
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

DEFAULT_PROMPT = (
    "Extract the key phrases from the following sentence: objects, actions, "
    "attributes, and named entities. Return ONLY a comma-separated list of "
    "short phrases, nothing else.\n\nSentence: {text}"
)

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _dedupe(parts):
    seen = {}
    for p in parts:
        if p and p not in seen:
            seen[p] = None
    return list(seen)


def fallback_keywords(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop stopwords and 1-char tokens."""
    tokens = _TOKEN_RE.findall(text.lower())
    return _dedupe(t for t in tokens if len(t) >= 2 and t not in STOPWORDS)


def llm_keywords(text: str, model_tag: str = "default", prompt: str = DEFAULT_PROMPT,
                 attempts: int = 3, timeout: float = 30.0) -> list[str]:
    """Remote extraction with bounded retries; empty results fall back offline."""
    endpoint = os.environ.get(ENDPOINT_ENV)
    if not endpoint:
        raise RuntimeError(f"llm keyword source requires {ENDPOINT_ENV}")
    headers = {}
    token = os.environ.get(TOKEN_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    payload = {"model": model_tag, "prompt": prompt.replace("{text}", text)}
    last = None
    for attempt in range(attempts):
        if attempt:
            time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
        try:
            resp = requests.post(endpoint, json=payload, headers=headers, timeout=timeout)
        except requests.RequestException as exc:
            last = exc
            continue
        if resp.status_code >= 500:
            last = RuntimeError(f"service returned {resp.status_code}")
            continue
        resp.raise_for_status()
        body = resp.json()
        if not isinstance(body, dict) or not isinstance(body.get("text"), str):
            raise RuntimeError(f"no string 'text' field in response: {resp.text[:200]}")
        parts = _dedupe(p.strip().lower() for p in body["text"].split(","))
        return parts or fallback_keywords(text)
    raise RuntimeError(f"keyword service unreachable after {attempts} attempts: {last}")


def build_keyword_fn(kind: str, model_tag: str = "default"):
    if kind == "fallback":
        return fallback_keywords
    if kind == "llm":
        return lambda text: llm_keywords(text, model_tag=model_tag)
    raise ValueError(f"unknown keyword source {kind!r}")
