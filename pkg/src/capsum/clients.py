"""External model clients and their deterministic offline substitutes.

Three services sit behind one wire contract (JSON over HTTP POST): frame
captioning, text summarization, and sentence embedding. Each live client
retries transient failures with exponential backoff and reads its API key
from an environment variable. The fixture clients are pure functions of
(seed, input) so offline runs are bit-reproducible.
"""

from __future__ import annotations

import hashlib
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import requests

from .bundle import Bundle, Caption
from .errors import ClientError, EmptyCaption
from .prompts import PromptTemplate, render_prompt

LLM_API_KEY_ENV = "SUMM_LLM_API_KEY"
CAPTION_API_KEY_ENV = "SUMM_CAPTION_API_KEY"

DEFAULT_CAPTION_PROMPT = "a photo of"


@dataclass(frozen=True)
class FrameRef:
    """Reference to one downsampled frame awaiting a caption.

    frame_index is the position in the downsampled sequence; ref is an
    opaque handle (path or URI) the captioning service understands.
    """

    frame_index: int
    time_sec: float
    ref: str


def _seeded_rng(seed: int, *parts: str) -> np.random.Generator:
    digest = hashlib.sha256()
    digest.update(str(seed).encode("utf-8"))
    for part in parts:
        digest.update(b"\x00")
        digest.update(part.encode("utf-8"))
    return np.random.default_rng(int.from_bytes(digest.digest()[:8], "little"))


def fixture_embed(text: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic unit-norm stand-in for a sentence encoder."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    rng = _seeded_rng(seed, "embed", text)
    vec = rng.standard_normal(dim)
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        vec[0] = 1.0
        norm = 1.0
    return vec / norm


class RetryingHttpClient:
    """POSTs JSON to one endpoint, retrying transient failures.

    Retries up to max_retries times after the first attempt, sleeping
    backoff_base * 2**attempt between tries. 4xx responses and malformed
    reply bodies fail immediately; transport errors and 5xx retry.
    """

    def __init__(
        self,
        endpoint: str,
        api_key_env: str,
        timeout: float = 30.0,
        max_retries: int = 3,
        backoff_base: float = 0.5,
        session=None,
    ):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._session = session if session is not None else requests.Session()

    def post_json(self, payload: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.api_key_env)
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        last_error = None
        for attempt in range(self.max_retries + 1):
            if attempt > 0:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._session.post(
                    self.endpoint, json=payload, headers=headers, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = f"transport failure: {exc}"
                continue
            if response.status_code >= 500:
                last_error = f"server error {response.status_code}"
                continue
            if response.status_code != 200:
                raise ClientError(
                    f"{self.endpoint}: request rejected with status {response.status_code}"
                )
            try:
                body = response.json()
            except ValueError as exc:
                raise ClientError(f"{self.endpoint}: non-JSON response ({exc})") from exc
            if not isinstance(body, dict):
                raise ClientError(f"{self.endpoint}: expected a JSON object response")
            return body
        raise ClientError(
            f"{self.endpoint}: giving up after {self.max_retries + 1} attempts ({last_error})"
        )


class HttpCaptionClient:
    """Captioning service: {frame_ref, prompt} in, {caption} out."""

    def __init__(self, endpoint: str, **kwargs):
        self._http = RetryingHttpClient(endpoint, CAPTION_API_KEY_ENV, **kwargs)

    def caption(self, ref: str, prompt: str) -> str:
        body = self._http.post_json({"frame_ref": ref, "prompt": prompt})
        text = body.get("caption")
        if not isinstance(text, str) or not text:
            raise ClientError(f"{self._http.endpoint}: response lacks a caption")
        return text


class HttpLLMClient:
    """Completion service: {prompt} in, {text} out."""

    def __init__(self, endpoint: str, **kwargs):
        self._http = RetryingHttpClient(endpoint, LLM_API_KEY_ENV, **kwargs)

    def complete(self, prompt: str) -> str:
        body = self._http.post_json({"prompt": prompt})
        text = body.get("text")
        if not isinstance(text, str) or not text:
            raise ClientError(f"{self._http.endpoint}: response lacks completion text")
        return text


class HttpEmbeddingClient:
    """Embedding service: {texts} in, {vectors} out.

    Shares the completion service's API key variable; both roles are
    usually served by the same provider account.
    """

    def __init__(self, endpoint: str, **kwargs):
        self._http = RetryingHttpClient(endpoint, LLM_API_KEY_ENV, **kwargs)

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        body = self._http.post_json({"texts": list(texts)})
        vectors = body.get("vectors")
        if not isinstance(vectors, list) or len(vectors) != len(texts):
            raise ClientError(f"{self._http.endpoint}: response lacks one vector per text")
        try:
            matrix = np.asarray(vectors, dtype=np.float64)
        except ValueError as exc:
            raise ClientError(f"{self._http.endpoint}: ragged vector response") from exc
        if matrix.ndim != 2:
            raise ClientError(f"{self._http.endpoint}: vectors are not a 2-d matrix")
        return matrix


_SUBJECTS = (
    "a dog", "a cyclist", "a street vendor", "a child", "a busker",
    "a gardener", "a skateboarder", "a tour group", "a waiter", "a painter",
)
_ACTIONS = (
    "running past", "standing near", "looking at", "moving along",
    "resting beside", "passing through", "gathering around", "working at",
)
_PLACES = (
    "a stone fountain", "a market stall", "a narrow alley", "a sunlit plaza",
    "a row of bicycles", "a cafe terrace", "an old bridge", "a flower bed",
)


class FixtureCaptionClient:
    """Offline captioner: caption text is a pure function of (seed, ref)."""

    def __init__(self, seed: int):
        self.seed = seed

    def caption(self, ref: str, prompt: str) -> str:
        rng = _seeded_rng(self.seed, "caption", ref)
        subject = _SUBJECTS[int(rng.integers(len(_SUBJECTS)))]
        action = _ACTIONS[int(rng.integers(len(_ACTIONS)))]
        place = _PLACES[int(rng.integers(len(_PLACES)))]
        return f"{prompt} {subject} {action} {place}"


_CAPTION_LINE = re.compile(r"^Frame \d+:\s+(.*\S)\s*$")
_REQUEST_LINE = re.compile(r"^Viewer request:\s+(.*\S)\s*$")


class FixtureLLMClient:
    """Offline summarizer: selects caption lines out of the prompt.

    Deterministic in (seed, prompt). When the prompt carries a viewer
    request the summary leads with it, so personalized prompts produce a
    different summary text than general ones.
    """

    def __init__(self, seed: int):
        self.seed = seed

    def complete(self, prompt: str) -> str:
        captions = []
        request = None
        for line in prompt.split("\n"):
            matched = _CAPTION_LINE.match(line)
            if matched:
                captions.append(matched.group(1))
                continue
            req = _REQUEST_LINE.match(line)
            if req:
                request = req.group(1)
        if not captions:
            words = [w for w in prompt.split() if len(w) > 3][:12]
            return " ".join(words) if words else "an empty video"
        rng = _seeded_rng(self.seed, "llm", prompt)
        k = min(3, len(captions))
        picks = sorted(int(i) for i in rng.choice(len(captions), size=k, replace=False))
        body = "; then ".join(captions[i] for i in picks)
        if request is not None:
            return f"Focusing on {request}: the video shows {body}."
        return f"The video shows {body}."


class FixtureEmbeddingClient:
    """Offline embedder built on fixture_embed."""

    def __init__(self, seed: int, dim: int):
        self.seed = seed
        self.dim = dim

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.vstack([fixture_embed(t, self.dim, self.seed) for t in texts])


def strip_caption_prompt(text: str, prompt: str) -> str:
    """Remove the generation prompt prefix from a raw caption."""
    if prompt and text.startswith(prompt):
        text = text[len(prompt):]
    return text.strip(" \t,:;-")


def fetch_captions(
    frames: Sequence[FrameRef],
    client,
    prompt: str = DEFAULT_CAPTION_PROMPT,
    max_in_flight: int = 4,
) -> list[Caption]:
    """Caption every frame, preserving order and stripping the prompt."""
    for prev, cur in zip(frames, frames[1:]):
        if cur.frame_index <= prev.frame_index:
            raise ClientError("frame references must have strictly increasing frame_index")
    with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
        raw = list(pool.map(lambda f: client.caption(f.ref, prompt), frames))
    records = []
    for frame, text in zip(frames, raw):
        stripped = strip_caption_prompt(text, prompt)
        if not stripped:
            raise EmptyCaption(f"frame {frame.frame_index}: caption empty after prompt strip")
        records.append(
            Caption(frame_index=frame.frame_index, time_sec=frame.time_sec, text=stripped)
        )
    return records


def generate_text_summary(
    bundle: Bundle,
    template: PromptTemplate,
    client,
    user_query: Optional[str] = None,
) -> str:
    """Render the summary prompt for a bundle and run it through the LLM."""
    prompt = render_prompt(template, bundle, user_query=user_query)
    summary = client.complete(prompt)
    if not isinstance(summary, str) or not summary.strip():
        raise ClientError("summarization client returned an empty summary")
    return summary
