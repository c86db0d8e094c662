"""Content-addressed on-disk store for expensive results.

Layout::

    <root>/<kind>/<sha256(kind, params, version)>.bin

Each entry file is::

    b"ZSCACHE1"                 8-byte magic
    uint32 little-endian        header length H
    H bytes of UTF-8 JSON       {"kind", "params", "version", "sha256", "size"}
    payload bytes

The payload checksum is verified on every read; a mismatch is reported as a
miss (with a ``CacheWarning``) so callers simply recompute. Writers go through
a temporary file and ``os.replace`` so readers never see partial entries.
The root defaults to ``$ZETASUMS_CACHE_DIR`` or ``~/.cache/zetasums``.
"""
from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile
import warnings
from dataclasses import dataclass, field
from pathlib import Path

MAGIC = b"ZSCACHE1"
ENV_VAR = "ZETASUMS_CACHE_DIR"


class CacheWarning(UserWarning):
    pass


def default_root() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "zetasums"


def _canonical(params) -> str:
    return json.dumps(params, sort_keys=True, separators=(",", ":"), default=repr)


@dataclass(frozen=True)
class CacheKey:
    kind: str
    params: dict = field(default_factory=dict)

    def digest(self, version_tag: str) -> str:
        text = f"{self.kind}\n{_canonical(self.params)}\n{version_tag}"
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass(frozen=True)
class Receipt:
    path: Path
    sha256: str
    size: int


@dataclass
class CacheHandle:
    root_dir: Path | str | None = None
    version_tag: str = "1"
    hits: int = 0
    misses: int = 0

    def __post_init__(self):
        self.root_dir = Path(self.root_dir) if self.root_dir is not None else default_root()

    def path_for(self, key: CacheKey) -> Path:
        return Path(self.root_dir) / key.kind / f"{key.digest(self.version_tag)}.bin"

    def put(self, key: CacheKey, payload: bytes) -> Receipt:
        path = self.path_for(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        checksum = hashlib.sha256(payload).hexdigest()
        header = json.dumps(
            {
                "kind": key.kind,
                "params": json.loads(_canonical(key.params)),
                "version": self.version_tag,
                "sha256": checksum,
                "size": len(payload),
            },
            sort_keys=True,
        ).encode()
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(MAGIC)
                fh.write(struct.pack("<I", len(header)))
                fh.write(header)
                fh.write(payload)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return Receipt(path=path, sha256=checksum, size=len(payload))

    def get(self, key: CacheKey) -> bytes | None:
        path = self.path_for(key)
        try:
            raw = path.read_bytes()
        except FileNotFoundError:
            self.misses += 1
            return None
        payload = _unpack(raw, key, self.version_tag)
        if payload is None:
            warnings.warn(f"cache entry {path} failed verification; ignoring", CacheWarning)
            self.misses += 1
            return None
        self.hits += 1
        return payload

    def get_or_compute(self, key: CacheKey, compute, encode, decode):
        raw = self.get(key)
        if raw is not None:
            try:
                return decode(raw)
            except Exception as exc:  # noqa: BLE001 - any decode failure means recompute
                warnings.warn(f"cache entry for {key.kind} undecodable: {exc}", CacheWarning)
        value = compute()
        self.put(key, encode(value))
        return value


def _unpack(raw: bytes, key: CacheKey, version_tag: str) -> bytes | None:
    if len(raw) < 12 or raw[:8] != MAGIC:
        return None
    (hlen,) = struct.unpack("<I", raw[8:12])
    try:
        header = json.loads(raw[12 : 12 + hlen])
    except ValueError:
        return None
    payload = raw[12 + hlen :]
    if header.get("version") != version_tag or header.get("kind") != key.kind:
        return None
    if header.get("size") != len(payload):
        return None
    if hashlib.sha256(payload).hexdigest() != header.get("sha256"):
        return None
    return payload
