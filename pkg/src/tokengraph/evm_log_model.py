"""Raw EVM log and decoded ERC-20 Transfer event types.

Addresses are plain lowercase ``0x``-prefixed 40-hex-char strings;
topics and transaction hashes are lowercase 32-byte hex words.  Amounts
stay raw uint256 — decimals scaling is a presentation concern.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import NamedTuple, Optional

# keccak-256 of "Transfer(address,address,uint256)"; verified against an
# independent keccak computation in the test suite.
TRANSFER_TOPIC = "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"

ZERO_ADDRESS = "0x" + "00" * 20

# single C-level matches keep the per-log decode cost low
_ADDR_RE = re.compile(r"0x[0-9a-f]{40}\Z")
_WORD_RE = re.compile(r"0x[0-9a-f]{64}\Z")
_ZERO_PAD = "000000000000000000000000"


class MalformedLogError(ValueError):
    """A log field violates the expected wire shape (strict mode only)."""


def normalize_address(value: str) -> str:
    """Canonicalize an address to lowercase ``0x`` + 40 hex chars."""
    v = value.lower()
    if not v.startswith("0x"):
        v = "0x" + v
    if _ADDR_RE.match(v) is None:
        raise MalformedLogError(f"not a 20-byte hex address: {value!r}")
    return v


def is_zero_address(addr: str) -> bool:
    return addr == ZERO_ADDRESS


def is_address(value: str) -> bool:
    try:
        normalize_address(value)
    except MalformedLogError:
        return False
    return True


def short_address(addr: str) -> str:
    """Abbreviate to the first 6 hex chars (``0xb18c87`` style)."""
    return addr[:8]


class _RawLogFields(NamedTuple):
    emitter: str
    topics: tuple[str, ...]
    data: str
    block_number: int
    tx_hash: str
    log_index: int
    tx_index: int


class RawLog(_RawLogFields):
    """One EVM log entry as returned by ``eth_getLogs``.

    ``topics`` are 0x-prefixed 64-hex-char words (at most 4);
    ``data`` is a 0x-prefixed hex string of the unindexed payload.
    A NamedTuple rather than a dataclass: construction is on the
    per-log hot path of ingestion.
    """

    __slots__ = ()

    def __new__(cls, emitter, topics, data, block_number, tx_hash, log_index, tx_index):
        if len(topics) > 4:
            raise MalformedLogError(f"log has {len(topics)} topics (max 4)")
        return super().__new__(
            cls, emitter, topics, data, block_number, tx_hash, log_index, tx_index
        )


class TransferKind(enum.Enum):
    MINT = "mint"
    BURN = "burn"
    MOVE = "move"


class TransferEvent(NamedTuple):
    """A decoded ERC-20 Transfer: ``token`` is the emitting contract."""

    token: str
    from_addr: str
    to_addr: str
    amount: int
    block_number: int
    tx_hash: str
    log_index: int

    def kind(self) -> TransferKind:
        return classify(self)


def classify(event: TransferEvent) -> TransferKind:
    """MINT iff from is zero, else BURN iff to is zero, else MOVE.

    The degenerate zero-to-zero transfer counts as MINT.
    """
    if event.from_addr == ZERO_ADDRESS:
        return TransferKind.MINT
    if event.to_addr == ZERO_ADDRESS:
        return TransferKind.BURN
    return TransferKind.MOVE


@dataclass(slots=True)
class DecodeStats:
    """Anomaly counters accumulated while decoding."""

    dirty_padding: int = 0


def decode_transfer(
    log: RawLog,
    strict: bool = False,
    stats: Optional[DecodeStats] = None,
) -> Optional[TransferEvent]:
    """Decode an ERC-20 Transfer from a raw log, or return None.

    Requires exactly 3 topics (the 4-topic ERC-721 shape is excluded)
    with topic[0] equal to the Transfer signature hash and a 32-byte
    data word.  Never raises on arbitrary bytes outside strict mode.
    """
    topics = log.topics
    if len(topics) != 3 or topics[0] != TRANSFER_TOPIC:
        return None
    data = log.data
    t1, t2 = topics[1], topics[2]
    if not (_WORD_RE.match(data) and _WORD_RE.match(t1) and _WORD_RE.match(t2)):
        return None
    # an address occupies the low 20 bytes of its indexed topic word
    if t1[2:26] != _ZERO_PAD or t2[2:26] != _ZERO_PAD:
        if strict:
            raise MalformedLogError(f"nonzero padding in address topic of {log.tx_hash}")
        if stats is not None:
            stats.dirty_padding += (t1[2:26] != _ZERO_PAD) + (t2[2:26] != _ZERO_PAD)
    return TransferEvent(
        token=log.emitter,
        from_addr="0x" + t1[26:],
        to_addr="0x" + t2[26:],
        amount=int(data, 16),
        block_number=log.block_number,
        tx_hash=log.tx_hash,
        log_index=log.log_index,
    )


def encode_transfer(event: TransferEvent, tx_index: int = 0) -> RawLog:
    """Re-encode a TransferEvent into RawLog wire form.

    Used by the synthetic scenario generators and round-trip tests.
    """
    return RawLog(
        emitter=event.token,
        topics=(
            TRANSFER_TOPIC,
            "0x" + "0" * 24 + event.from_addr[2:],
            "0x" + "0" * 24 + event.to_addr[2:],
        ),
        data="0x" + format(event.amount, "064x"),
        block_number=event.block_number,
        tx_hash=event.tx_hash,
        log_index=event.log_index,
        tx_index=tx_index,
    )


def parse_raw_log(obj: dict) -> RawLog:
    """Build a RawLog from one ``eth_getLogs`` result object.

    Quantities may be hex strings (the wire form) or plain ints.
    Raises on missing or malformed fields.
    """
    # quantity parsing is inlined: three calls per log add up at scale
    block_number = obj["blockNumber"]
    if block_number.__class__ is not int:
        block_number = int(block_number, 16) if block_number[:2] == "0x" else int(block_number)
    log_index = obj["logIndex"]
    if log_index.__class__ is not int:
        log_index = int(log_index, 16) if log_index[:2] == "0x" else int(log_index)
    tx_index = obj["transactionIndex"]
    if tx_index.__class__ is not int:
        tx_index = int(tx_index, 16) if tx_index[:2] == "0x" else int(tx_index)
    return RawLog(
        emitter=normalize_address(obj["address"]),
        topics=tuple(map(str.lower, obj["topics"])),
        data=obj["data"].lower(),
        block_number=block_number,
        tx_hash=obj["transactionHash"].lower(),
        log_index=log_index,
        tx_index=tx_index,
    )


def raw_log_to_json(log: RawLog) -> dict:
    """Serialize back to the ``eth_getLogs`` wire shape."""
    return {
        "address": log.emitter,
        "topics": list(log.topics),
        "data": log.data,
        "blockNumber": hex(log.block_number),
        "transactionHash": log.tx_hash,
        "logIndex": hex(log.log_index),
        "transactionIndex": hex(log.tx_index),
    }
