"""Spotify Web API client for the 11 audio features, behind a swappable
transport.

All network behavior goes through a transport callable so tests run against
a deterministic in-memory fake. The client authenticates with the
client-credentials flow, resolves songs to track ids by fuzzy artist/title
search, and fetches audio features in batches of at most 100 ids into the
JSON audio store. Store writes are atomic (temp file + rename) and reruns
skip ids already present.
"""
from __future__ import annotations

import difflib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from songmood.dataset import AudioFeatureVector, SongRecord

log = logging.getLogger(__name__)

TOKEN_URL = "https://accounts.spotify.com/api/token"
API_BASE = "https://api.spotify.com/v1"
BATCH_LIMIT = 100
MATCH_THRESHOLD = 0.5
RETRY_ATTEMPTS = 3
BACKOFF_BASE = 1.0


class CredentialError(RuntimeError):
    """Authentication failed terminally (bad id/secret)."""


class TransientApiError(RuntimeError):
    """Retryable server-side failure that exhausted its retries."""


@dataclass
class TransportResponse:
    status: int
    payload: dict | None
    headers: dict = field(default_factory=dict)


# transport(method, url, *, params, data, auth, bearer) -> TransportResponse
Transport = Callable[..., TransportResponse]


def _requests_transport(method: str, url: str, *, params=None, data=None,
                        auth=None, bearer=None) -> TransportResponse:
    import requests

    headers = {}
    if bearer:
        headers["Authorization"] = f"Bearer {bearer}"
    resp = requests.request(
        method, url, params=params, data=data, auth=auth, headers=headers,
        timeout=30,
    )
    try:
        payload = resp.json() if resp.content else None
    except ValueError:
        payload = None
    return TransportResponse(
        status=resp.status_code, payload=payload, headers=dict(resp.headers),
    )


@dataclass(frozen=True)
class ApiCredentials:
    client_id: str
    client_secret: str

    @classmethod
    def from_env(cls) -> "ApiCredentials":
        client_id = os.environ.get("SPOTIFY_CLIENT_ID", "")
        secret = os.environ.get("SPOTIFY_CLIENT_SECRET", "")
        if not client_id or not secret:
            raise CredentialError(
                "SPOTIFY_CLIENT_ID / SPOTIFY_CLIENT_SECRET not set"
            )
        return cls(client_id=client_id, client_secret=secret)


@dataclass(frozen=True)
class TrackMatch:
    song_id: str
    spotify_track_id: str
    match_confidence: float


def _similarity(a: str, b: str) -> float:
    return difflib.SequenceMatcher(None, a.casefold(), b.casefold()).ratio()


def match_confidence(record: SongRecord, artist: str, title: str) -> float:
    """Mean case-folded string similarity of the (artist, title) pair."""
    return 0.5 * (
        _similarity(record.artist, artist) + _similarity(record.title, title)
    )


class SpotifyClient:
    def __init__(self, credentials: ApiCredentials,
                 transport: Transport | None = None,
                 token_url: str = TOKEN_URL, api_base: str = API_BASE,
                 max_in_flight: int = 4,
                 clock: Callable[[], float] = time.monotonic,
                 sleeper: Callable[[float], None] = time.sleep):
        self.credentials = credentials
        self.transport = transport or _requests_transport
        self.token_url = token_url
        self.api_base = api_base
        self.max_in_flight = max_in_flight
        self.clock = clock
        self.sleeper = sleeper
        self._token: str | None = None
        self._token_expiry: float = 0.0

    # -- auth ---------------------------------------------------------------

    def authenticate(self) -> str:
        """Fetch (or refresh) the client-credentials bearer token."""
        resp = self._retrying(
            "POST", self.token_url,
            data={"grant_type": "client_credentials"},
            auth=(self.credentials.client_id, self.credentials.client_secret),
            authorized=False,
        )
        if resp.status == 401 or resp.status == 400:
            raise CredentialError(f"token endpoint rejected credentials "
                                  f"(HTTP {resp.status})")
        payload = resp.payload or {}
        self._token = payload.get("access_token")
        if not self._token:
            raise CredentialError("token endpoint returned no access_token")
        self._token_expiry = self.clock() + float(payload.get("expires_in", 3600))
        return self._token

    def _bearer(self) -> str:
        if self._token is None or self.clock() >= self._token_expiry - 30:
            self.authenticate()
        return self._token

    # -- transport with retry policy ----------------------------------------

    def _retrying(self, method: str, url: str, *, params=None, data=None,
                  auth=None, authorized: bool = True) -> TransportResponse:
        refreshed = False
        for attempt in range(RETRY_ATTEMPTS + 1):
            bearer = self._bearer() if authorized else None
            resp = self.transport(
                method, url, params=params, data=data, auth=auth, bearer=bearer,
            )
            if resp.status == 401 and authorized and not refreshed:
                # expired token mid-run: one transparent refresh
                self.authenticate()
                refreshed = True
                continue
            if resp.status == 429:
                wait = float(resp.headers.get("Retry-After", 1))
                log.info("rate limited; honoring Retry-After=%.1fs", wait)
                self.sleeper(wait)
                continue
            if 500 <= resp.status < 600 and attempt < RETRY_ATTEMPTS:
                self.sleeper(BACKOFF_BASE * (2 ** attempt))
                continue
            if 500 <= resp.status < 600:
                raise TransientApiError(f"{url}: HTTP {resp.status} after retries")
            return resp
        raise TransientApiError(f"{url}: retry budget exhausted")

    # -- track resolution -----------------------------------------------------

    def resolve_tracks(self, records: Sequence[SongRecord]) -> tuple[
            list[TrackMatch], list[dict]]:
        """Search each song; returns (matches, unmatched report rows)."""
        matches: list[TrackMatch] = []
        unmatched: list[dict] = []
        for record in records:
            query = f"artist:{record.artist} track:{record.title}"
            resp = self._retrying(
                "GET", f"{self.api_base}/search",
                params={"q": query, "type": "track", "limit": 5},
            )
            items = (((resp.payload or {}).get("tracks") or {}).get("items")) or []
            best_id, best_conf = None, -1.0
            for item in items:
                artists = item.get("artists") or [{}]
                conf = match_confidence(
                    record, artists[0].get("name", ""), item.get("name", ""),
                )
                if conf > best_conf:
                    best_id, best_conf = item.get("id"), conf
            if best_id is not None and best_conf >= MATCH_THRESHOLD:
                matches.append(TrackMatch(
                    song_id=record.song_id, spotify_track_id=best_id,
                    match_confidence=best_conf,
                ))
            else:
                unmatched.append({
                    "song_id": record.song_id, "artist": record.artist,
                    "title": record.title,
                    "best_confidence": max(best_conf, 0.0),
                })
        return matches, unmatched

    # -- audio features -------------------------------------------------------

    def fetch_audio_features(self, matches: Sequence[TrackMatch],
                             store_path: str | Path) -> dict:
        """Fetch features for unseen matches into the JSON store.

        Returns a summary dict: fetched / skipped / invalid counts. Tracks
        with null or invalid feature payloads are stored as null entries so
        reruns do not refetch them; the dataset loader excludes them.
        """
        store_path = Path(store_path)
        store = _load_store(store_path)
        pending = [m for m in matches if m.song_id not in store]
        skipped = len(matches) - len(pending)
        if skipped:
            log.info("skipped %d cached", skipped)

        batches = [
            pending[i:i + BATCH_LIMIT]
            for i in range(0, len(pending), BATCH_LIMIT)
        ]
        invalid = 0
        fetched = 0

        def fetch_batch(batch: list[TrackMatch]):
            ids = ",".join(m.spotify_track_id for m in batch)
            resp = self._retrying(
                "GET", f"{self.api_base}/audio-features", params={"ids": ids},
            )
            return batch, ((resp.payload or {}).get("audio_features")) or []

        if not batches:
            _write_store_atomic(store_path, store)
            return {"fetched": 0, "skipped": skipped, "invalid": 0,
                    "requests": 0}

        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            # results merge and store writes stay on this thread
            for batch, features in pool.map(fetch_batch, batches):
                for m, feat in zip(batch, features):
                    if feat is None:
                        store[m.song_id] = None
                        invalid += 1
                        continue
                    try:
                        vec = AudioFeatureVector.from_mapping(feat)
                    except (KeyError, TypeError, ValueError) as exc:
                        log.warning("invalid features for %s: %s", m.song_id, exc)
                        store[m.song_id] = None
                        invalid += 1
                        continue
                    store[m.song_id] = vec.to_mapping()
                    fetched += 1
                _write_store_atomic(store_path, store)

        return {"fetched": fetched, "skipped": skipped, "invalid": invalid,
                "requests": len(batches)}


def _load_store(path: Path) -> dict:
    if path.is_file():
        return json.loads(path.read_text(encoding="utf-8"))
    return {}


def _write_store_atomic(path: Path, store: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(store, sort_keys=True, indent=0),
                   encoding="utf-8")
    os.replace(tmp, path)
