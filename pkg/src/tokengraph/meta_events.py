"""Tokenising meta-event detection and the two-way filter.

A tokenising meta-event pairs two Transfer events from one transaction:
a deposit of an underlying asset with a contract plus a mint of the
contract's own share token, or a burn of a share plus the withdrawal of
the underlying from the share's contract.  The linkage rule follows the
ERC-4626 vault shape: the deposit recipient (resp. withdrawal sender)
must be the share token's contract address.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional

from tokengraph.evm_log_model import TransferEvent, TransferKind
from tokengraph.ingestion import TxBatch


class ActionKind(enum.Enum):
    DEPOSIT_AND_MINT = "deposit_and_mint"
    WITHDRAW_AND_BURN = "withdraw_and_burn"


class PairingMode(enum.Enum):
    STRICT = "strict"
    LOOSE = "loose"


@dataclass(frozen=True, slots=True)
class PairingPolicy:
    """Knobs for the under-specified parts of the pairing heuristic.

    STRICT additionally requires the same user on both legs (depositor
    == mint recipient; burner == withdrawal recipient); LOOSE matches
    the observable behavior of the published extraction.
    """

    mode: PairingMode = PairingMode.LOOSE
    allow_self_wrap: bool = True
    max_events_per_tx: int = 512

    def __post_init__(self) -> None:
        if self.max_events_per_tx < 2:
            raise ValueError("max_events_per_tx must be >= 2")


class TokenisingMetaEvent(NamedTuple):
    """One detected deposit-&-mint or withdraw-&-burn pair.

    ``source_log_index`` identifies the asset-transfer leg (the deposit
    or withdrawal), ``target_log_index`` the mint or burn leg.  A
    NamedTuple: one is built per detected pair on the hot path.
    """

    source_token: str
    target_token: str
    action: ActionKind
    source_amount: int
    target_amount: int
    tx_hash: str
    block_number: int
    source_log_index: int
    target_log_index: int


@dataclass(slots=True)
class DetectionStats:
    deposit_and_mint: int = 0
    withdraw_and_burn: int = 0
    skipped_oversized_tx: int = 0
    self_wraps: int = 0

    def as_dict(self) -> dict:
        return {
            "deposit_and_mint": self.deposit_and_mint,
            "withdraw_and_burn": self.withdraw_and_burn,
            "skipped_oversized_tx": self.skipped_oversized_tx,
            "self_wraps": self.self_wraps,
        }


def _pair_deposit_mint(
    move: TransferEvent, mint: TransferEvent, policy: PairingPolicy
) -> Optional[TokenisingMetaEvent]:
    # deposit leg: MOVE of asset X from user U to contract C;
    # mint leg: MINT of share Y emitted by C itself.
    if move.to_addr != mint.token:
        return None
    if policy.mode is PairingMode.STRICT and mint.to_addr != move.from_addr:
        return None
    if move.token == mint.token and not policy.allow_self_wrap:
        return None
    return TokenisingMetaEvent(
        source_token=move.token,
        target_token=mint.token,
        action=ActionKind.DEPOSIT_AND_MINT,
        source_amount=move.amount,
        target_amount=mint.amount,
        tx_hash=move.tx_hash,
        block_number=move.block_number,
        source_log_index=move.log_index,
        target_log_index=mint.log_index,
    )


def _pair_withdraw_burn(
    burn: TransferEvent, move: TransferEvent, policy: PairingPolicy
) -> Optional[TokenisingMetaEvent]:
    # burn leg: BURN of share Y by user U;
    # withdrawal leg: MOVE of asset X out of Y's contract address.
    if move.from_addr != burn.token:
        return None
    if policy.mode is PairingMode.STRICT and move.to_addr != burn.from_addr:
        return None
    if move.token == burn.token and not policy.allow_self_wrap:
        return None
    return TokenisingMetaEvent(
        source_token=move.token,
        target_token=burn.token,
        action=ActionKind.WITHDRAW_AND_BURN,
        source_amount=move.amount,
        target_amount=burn.amount,
        tx_hash=burn.tx_hash,
        block_number=burn.block_number,
        source_log_index=move.log_index,
        target_log_index=burn.log_index,
    )


def match_pair(
    a: TransferEvent, b: TransferEvent, policy: PairingPolicy
) -> Optional[TokenisingMetaEvent]:
    """Try to form a meta-event from two events of one transaction.

    Role assignments are tried in a fixed order so detection is
    deterministic when a pair could match more than one way.
    """
    ka, kb = a.kind(), b.kind()
    if ka is TransferKind.MOVE and kb is TransferKind.MINT:
        hit = _pair_deposit_mint(a, b, policy)
        if hit:
            return hit
    if kb is TransferKind.MOVE and ka is TransferKind.MINT:
        hit = _pair_deposit_mint(b, a, policy)
        if hit:
            return hit
    if ka is TransferKind.BURN and kb is TransferKind.MOVE:
        hit = _pair_withdraw_burn(a, b, policy)
        if hit:
            return hit
    if kb is TransferKind.BURN and ka is TransferKind.MOVE:
        hit = _pair_withdraw_burn(b, a, policy)
        if hit:
            return hit
    return None


def detect(
    batch: TxBatch,
    policy: PairingPolicy = PairingPolicy(),
    stats: Optional[DetectionStats] = None,
) -> list[TokenisingMetaEvent]:
    """Greedy in-order pairing of one transaction's Transfer events.

    Each event is used in at most one meta-event.  Scanning events in
    log_index order and pairing each with the earliest compatible later
    event yields a maximal pairing deterministically.
    """
    events = batch.events
    if len(events) > policy.max_events_per_tx:
        if stats is not None:
            stats.skipped_oversized_tx += 1
        return []
    n = len(events)
    used = [False] * n
    found: list[TokenisingMetaEvent] = []
    for i in range(n):
        if used[i]:
            continue
        for j in range(i + 1, n):
            if used[j]:
                continue
            meta = match_pair(events[i], events[j], policy)
            if meta is None:
                continue
            used[i] = used[j] = True
            found.append(meta)
            if stats is not None:
                if meta.action is ActionKind.DEPOSIT_AND_MINT:
                    stats.deposit_and_mint += 1
                else:
                    stats.withdraw_and_burn += 1
                if meta.source_token == meta.target_token:
                    stats.self_wraps += 1
            break
    return found


def detect_all(
    batches: Iterable[TxBatch],
    policy: PairingPolicy = PairingPolicy(),
    stats: Optional[DetectionStats] = None,
) -> Iterator[TokenisingMetaEvent]:
    """Concatenated detection over an ordered batch stream."""
    for batch in batches:
        yield from detect(batch, policy, stats)


def apply_two_way_filter(
    events: list[TokenisingMetaEvent],
) -> list[TokenisingMetaEvent]:
    """Keep meta-events whose token pair shows both action kinds.

    A (source, target) pair survives only with at least one
    deposit & mint AND at least one withdraw & burn anywhere in the
    input; this drops one-way token upgrades and one-way burns.
    Idempotent; output order preserved.
    """
    actions: dict[tuple[str, str], set[ActionKind]] = {}
    for ev in events:
        actions.setdefault((ev.source_token, ev.target_token), set()).add(ev.action)
    return [
        ev
        for ev in events
        if len(actions[(ev.source_token, ev.target_token)]) == 2
    ]


CSV_HEADER = [
    "source_token",
    "target_token",
    "action",
    "source_amount",
    "target_amount",
    "tx_hash",
    "block_number",
]


def write_meta_events_csv(events: Iterable[TokenisingMetaEvent], fh: io.TextIOBase) -> None:
    """Write the meta-event CSV export (LF line endings, trailing newline)."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for ev in events:
        writer.writerow(
            [
                ev.source_token,
                ev.target_token,
                ev.action.value,
                str(ev.source_amount),
                str(ev.target_amount),
                ev.tx_hash,
                str(ev.block_number),
            ]
        )


def read_meta_events_csv(fh: io.TextIOBase) -> list[TokenisingMetaEvent]:
    """Read the CSV export back.

    Log indices are not part of the export; they are restored as 0/1
    placeholders, which downstream graph building never consults.
    """
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ValueError(f"unexpected meta-event CSV header: {header}")
    out = []
    for row in reader:
        src, tgt, action, s_amt, t_amt, tx, block = row
        out.append(
            TokenisingMetaEvent(
                source_token=src,
                target_token=tgt,
                action=ActionKind(action),
                source_amount=int(s_amt),
                target_amount=int(t_amt),
                tx_hash=tx,
                block_number=int(block),
                source_log_index=0,
                target_log_index=1,
            )
        )
    return out
