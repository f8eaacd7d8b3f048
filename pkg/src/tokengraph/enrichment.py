"""Snapshot metadata enrichment: market caps and liquidity-pool listings.

Offline CSV snapshots are the canonical input; the optional fetch
adapters write the same schema so every analysis stays reproducible
from committed files.  Symbols become display labels only — vertex
identity is always the contract address.
"""

from __future__ import annotations

import csv
import datetime
import io
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import requests

from tokengraph.analytics import ComponentReport
from tokengraph.evm_log_model import normalize_address
from tokengraph.token_graph import TokenGraph

SNAPSHOT_HEADER = ["token_address", "symbol", "market_cap_usd", "pool_count", "snapshot_date"]


@dataclass(frozen=True, slots=True)
class TokenMetadata:
    """Point-in-time market snapshot for one token.

    ``market_cap_usd`` is None when the token is not listed at all;
    an explicit zero means listed with zero cap.
    """

    token: str
    symbol: Optional[str]
    market_cap_usd: Optional[float]
    pool_count: int
    snapshot_date: datetime.date

    @property
    def listed(self) -> bool:
        return self.market_cap_usd is not None and self.market_cap_usd > 0

    @property
    def pooled(self) -> bool:
        return self.pool_count > 0


@dataclass(slots=True)
class SnapshotStats:
    duplicate_rows: int = 0


def load_snapshot(
    fh: io.TextIOBase, stats: Optional[SnapshotStats] = None
) -> dict[str, TokenMetadata]:
    """Load a snapshot CSV; later duplicate addresses override earlier."""
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return {}
    if header != SNAPSHOT_HEADER:
        raise ValueError(f"unexpected snapshot header: {header}")
    out: dict[str, TokenMetadata] = {}
    for lineno, row in enumerate(reader, start=2):
        try:
            addr_raw, symbol, cap_raw, pools_raw, date_raw = row
            addr = normalize_address(addr_raw)
            meta = TokenMetadata(
                token=addr,
                symbol=symbol or None,
                market_cap_usd=float(cap_raw) if cap_raw != "" else None,
                pool_count=int(pools_raw),
                snapshot_date=datetime.date.fromisoformat(date_raw),
            )
        except (ValueError, TypeError) as exc:
            raise ValueError(f"snapshot line {lineno}: {exc}") from exc
        if meta.market_cap_usd is not None and meta.market_cap_usd < 0:
            raise ValueError(f"snapshot line {lineno}: negative market cap")
        if meta.pool_count < 0:
            raise ValueError(f"snapshot line {lineno}: negative pool count")
        if addr in out:
            if stats is not None:
                stats.duplicate_rows += 1
        out[addr] = meta
    return out


def write_snapshot(metadata: Iterable[TokenMetadata], fh: io.TextIOBase) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SNAPSHOT_HEADER)
    for meta in metadata:
        writer.writerow(
            [
                meta.token,
                meta.symbol or "",
                "" if meta.market_cap_usd is None else repr(meta.market_cap_usd),
                meta.pool_count,
                meta.snapshot_date.isoformat(),
            ]
        )


@dataclass
class AnnotatedGraph:
    """A graph plus its metadata view; topology is never altered."""

    graph: TokenGraph
    metadata: dict[str, TokenMetadata] = field(default_factory=dict)

    def lookup(self, addr: str) -> Optional[TokenMetadata]:
        return self.metadata.get(addr)

    def is_listed(self, addr: str) -> bool:
        meta = self.metadata.get(addr)
        return meta is not None and meta.listed

    def labels(self) -> dict[str, str]:
        return {
            addr: meta.symbol
            for addr, meta in self.metadata.items()
            if meta.symbol and addr in self.graph.vertices
        }

    def unlisted_vertices(self) -> set[str]:
        return {v for v in self.graph.vertices if not self.is_listed(v)}


def annotate(graph: TokenGraph, metadata: dict[str, TokenMetadata]) -> AnnotatedGraph:
    """Join snapshot metadata onto graph vertices (view, not a copy)."""
    relevant = {a: m for a, m in metadata.items() if a in graph.vertices}
    return AnnotatedGraph(graph=graph, metadata=relevant)


def popularity_report(
    components: ComponentReport, metadata: dict[str, TokenMetadata]
) -> list[tuple[int, int]]:
    """(listed_count, pooled_count) for each component, in report order."""
    out = []
    for comp in components.components:
        listed = sum(1 for v in comp if (m := metadata.get(v)) and m.listed)
        pooled = sum(1 for v in comp if (m := metadata.get(v)) and m.pooled)
        out.append((listed, pooled))
    return out


# --- optional live fetch adapters ----------------------------------------
#
# These hit third-party HTTP APIs and are never used by tests or the
# analysis pipeline directly; they only write the snapshot CSV schema.

FetchFn = Callable[[str], tuple[Optional[str], Optional[float], int]]


def _coingecko_fetch(session, api_key: Optional[str]):
    def fetch(addr: str):
        headers = {"x-cg-demo-api-key": api_key} if api_key else {}
        resp = session.get(
            f"https://api.coingecko.com/api/v3/coins/ethereum/contract/{addr}",
            headers=headers,
            timeout=30,
        )
        if resp.status_code == 404:
            return None, None, 0
        resp.raise_for_status()
        body = resp.json()
        cap = body.get("market_data", {}).get("market_cap", {}).get("usd")
        return body.get("symbol"), cap, 0

    return fetch


def _dexscreener_fetch(session, api_key: Optional[str]):
    def fetch(addr: str):
        resp = session.get(
            f"https://api.dexscreener.com/latest/dex/tokens/{addr}", timeout=30
        )
        resp.raise_for_status()
        pairs = resp.json().get("pairs") or []
        symbol = pairs[0]["baseToken"]["symbol"] if pairs else None
        return symbol, None, len(pairs)

    return fetch


PROVIDERS = {
    "coingecko": _coingecko_fetch,
    "dexscreener": _dexscreener_fetch,
}


def fetch_snapshot(
    provider: str,
    tokens: Iterable[str],
    fh: io.TextIOBase,
    api_key: Optional[str] = None,
    session=None,
    min_interval: float = 1.5,
    today: Optional[datetime.date] = None,
) -> int:
    """Fetch metadata for each token and write a snapshot CSV.

    Rate-limited to one request per ``min_interval`` seconds.  Returns
    the number of rows written.
    """
    if provider not in PROVIDERS:
        raise ValueError(f"unknown provider {provider!r}; choose from {sorted(PROVIDERS)}")
    fetch = PROVIDERS[provider](session or requests.Session(), api_key)
    snapshot_date = today or datetime.date.today()
    rows = []
    last = 0.0
    for addr in tokens:
        wait = min_interval - (time.monotonic() - last)
        if rows and wait > 0:
            time.sleep(wait)
        last = time.monotonic()
        symbol, cap, pools = fetch(normalize_address(addr))
        rows.append(
            TokenMetadata(
                token=normalize_address(addr),
                symbol=symbol,
                market_cap_usd=cap,
                pool_count=pools,
                snapshot_date=snapshot_date,
            )
        )
    write_snapshot(rows, fh)
    return len(rows)
