"""Log acquisition and per-transaction batching.

Logs come either from a JSON-RPC endpoint (``eth_getLogs`` over a block
range, with adaptive chunking and retry) or from local JSONL files in
the same wire shape.  Either way the downstream detector receives a
single stream ordered by (block_number, log_index), grouped into
per-transaction batches.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional

import requests

from tokengraph.evm_log_model import (
    TRANSFER_TOPIC,
    DecodeStats,
    RawLog,
    TransferEvent,
    decode_transfer,
    parse_raw_log,
)

DEFAULT_CHUNK_SIZE = 2000
DEFAULT_MAX_RETRIES = 5
DEFAULT_CONCURRENCY = 4


class TransportError(RuntimeError):
    """JSON-RPC request failed after exhausting retries."""


class ResponseTooLargeError(Exception):
    """Provider rejected the request window as too large."""


class OversizedBlockError(RuntimeError):
    """A single block's logs still exceed the provider limit."""


class OrderingError(RuntimeError):
    """Input log stream regressed in (block_number, log_index) order."""


@dataclass(frozen=True, slots=True)
class BlockRange:
    """Inclusive block range."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start > self.end:
            raise ValueError(f"invalid block range [{self.start}, {self.end}]")


@dataclass(slots=True)
class TxBatch:
    """All decoded Transfer events of one transaction, by log_index."""

    tx_hash: str
    block_number: int
    events: list[TransferEvent]


@dataclass(slots=True)
class IngestStats:
    malformed_lines: int = 0
    skipped_oversized_blocks: int = 0
    decode: DecodeStats = field(default_factory=DecodeStats)


# A transport takes (from_block, to_block) and returns raw eth_getLogs
# result objects, raising ResponseTooLargeError when the window is too big.
Transport = Callable[[int, int], list[dict]]

# Error markers providers use for oversized eth_getLogs responses.
_TOO_LARGE_MARKERS = (
    "response size",
    "query returned more than",
    "too large",
    "log response size exceeded",
    "result is too big",
)


class JsonRpcTransport:
    """eth_getLogs over HTTP JSON-RPC, filtered to Transfer events."""

    def __init__(self, url: str, timeout: float = 30.0, session=None):
        self.url = url
        self.timeout = timeout
        self.session = session or requests.Session()
        self._next_id = 0

    def __call__(self, from_block: int, to_block: int) -> list[dict]:
        self._next_id += 1
        payload = {
            "jsonrpc": "2.0",
            "id": self._next_id,
            "method": "eth_getLogs",
            "params": [
                {
                    "fromBlock": hex(from_block),
                    "toBlock": hex(to_block),
                    "topics": [TRANSFER_TOPIC],
                }
            ],
        }
        try:
            resp = self.session.post(self.url, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc
        if "error" in body:
            message = str(body["error"].get("message", "")).lower()
            if any(marker in message for marker in _TOO_LARGE_MARKERS):
                raise ResponseTooLargeError(message)
            raise TransportError(body["error"])
        return body["result"]


def _fetch_window(
    transport: Transport,
    start: int,
    end: int,
    max_retries: int,
    backoff: float,
    skip_oversized: bool,
    stats: Optional[IngestStats],
) -> list[dict]:
    """Fetch [start, end], halving the window on oversize rejections."""
    try:
        return _with_retries(transport, start, end, max_retries, backoff)
    except ResponseTooLargeError:
        if start == end:
            if skip_oversized:
                if stats is not None:
                    stats.skipped_oversized_blocks += 1
                return []
            raise OversizedBlockError(f"block {start} exceeds provider limit")
        mid = (start + end) // 2
        left = _fetch_window(transport, start, mid, max_retries, backoff, skip_oversized, stats)
        right = _fetch_window(transport, mid + 1, end, max_retries, backoff, skip_oversized, stats)
        return left + right


def _with_retries(
    transport: Transport, start: int, end: int, max_retries: int, backoff: float
) -> list[dict]:
    attempt = 0
    while True:
        try:
            return transport(start, end)
        except ResponseTooLargeError:
            raise
        except TransportError:
            attempt += 1
            if attempt > max_retries:
                raise
            time.sleep(backoff * (2 ** (attempt - 1)))


def fetch_logs(
    transport: Transport,
    block_range: BlockRange,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    max_retries: int = DEFAULT_MAX_RETRIES,
    backoff: float = 0.5,
    concurrency: int = DEFAULT_CONCURRENCY,
    skip_oversized: bool = False,
    stats: Optional[IngestStats] = None,
) -> Iterator[RawLog]:
    """Stream every Transfer log in the range in (block, log_index) order.

    Chunks may be fetched concurrently but are re-serialized into global
    order before being yielded, so consumers see a deterministic stream.
    """
    chunks = []
    start = block_range.start
    while start <= block_range.end:
        end = min(start + chunk_size - 1, block_range.end)
        chunks.append((start, end))
        start = end + 1

    def worker(chunk: tuple[int, int]) -> list[dict]:
        return _fetch_window(
            transport, chunk[0], chunk[1], max_retries, backoff, skip_oversized, stats
        )

    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        for raw_objs in pool.map(worker, chunks):
            logs = [parse_raw_log(obj) for obj in raw_objs]
            logs.sort(key=lambda lg: (lg.block_number, lg.log_index))
            yield from logs


def read_logs(
    path,
    strict: bool = False,
    stats: Optional[IngestStats] = None,
) -> Iterator[RawLog]:
    """Stream RawLogs from a JSONL file in file order.

    Malformed lines are counted and skipped; in strict mode they abort.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            # json.loads tolerates surrounding whitespace, so skip the
            # strip-copy on this hot path and only filter blank lines
            if not line or line.isspace():
                continue
            try:
                yield parse_raw_log(json.loads(line))
            except (ValueError, KeyError, TypeError, AttributeError) as exc:
                if strict:
                    raise ValueError(f"{path}:{lineno}: malformed log line") from exc
                if stats is not None:
                    stats.malformed_lines += 1


def group_by_tx(
    logs: Iterable[RawLog],
    strict: bool = False,
    stats: Optional[IngestStats] = None,
) -> Iterator[TxBatch]:
    """Group an ordered log stream into per-transaction batches.

    Transactions are contiguous in a (block, log_index)-ordered stream,
    so a batch closes when tx_hash changes.  Non-Transfer logs are
    dropped; transactions with no decoded Transfers yield no batch.
    """
    decode_stats = stats.decode if stats is not None else None
    current: Optional[TxBatch] = None
    last_key: Optional[tuple[int, int]] = None
    for log in logs:
        key = (log.block_number, log.log_index)
        if last_key is not None and key < last_key:
            raise OrderingError(f"log stream regressed at {key} after {last_key}")
        last_key = key
        if current is not None and log.tx_hash != current.tx_hash:
            if current.events:
                yield current
            current = None
        event = decode_transfer(log, strict=strict, stats=decode_stats)
        if current is None:
            current = TxBatch(tx_hash=log.tx_hash, block_number=log.block_number, events=[])
        if event is not None:
            current.events.append(event)
    if current is not None and current.events:
        yield current
