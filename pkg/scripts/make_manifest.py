#!/usr/bin/env python3
"""Build the ground-truth manifest for the JSONL log fixture.

A minimal, self-contained decoder and pairer over the fixture file —
deliberately independent of the tokengraph package, so the manifest can
serve as an oracle for the pipeline's replay tests.  Run once after
regenerating the fixture; the manifest is committed.
"""

import json
from pathlib import Path

TRANSFER = "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"
ZERO = "0x" + "00" * 20

fixture = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "transfers.jsonl"

lines_total = 0
malformed = 0
logs = []
for line in fixture.read_text().splitlines():
    if not line.strip():
        continue
    lines_total += 1
    try:
        obj = json.loads(line)
        obj["address"], obj["topics"], obj["data"]
        obj["blockNumber"], obj["transactionHash"], obj["logIndex"]
        obj["transactionIndex"]
    except (ValueError, KeyError):
        malformed += 1
        continue
    logs.append(obj)

transfers = []
for obj in logs:
    topics = obj["topics"]
    if len(topics) != 3 or topics[0] != TRANSFER:
        continue
    if len(obj["data"]) != 66:
        continue
    transfers.append(
        {
            "token": obj["address"].lower(),
            "from": "0x" + topics[1][26:].lower(),
            "to": "0x" + topics[2][26:].lower(),
            "amount": int(obj["data"], 16),
            "tx": obj["transactionHash"],
        }
    )

tx_hashes = []
for t in transfers:
    if t["tx"] not in tx_hashes:
        tx_hashes.append(t["tx"])

# greedy in-order pairing per transaction (loose policy re-derivation)
deposit_mint = withdraw_burn = 0
for txh in tx_hashes:
    events = [t for t in transfers if t["tx"] == txh]
    used = [False] * len(events)
    for i, a in enumerate(events):
        if used[i]:
            continue
        for j in range(i + 1, len(events)):
            if used[j]:
                continue
            b = events[j]
            hit = None
            for move, mint in ((a, b), (b, a)):
                if (
                    move["from"] != ZERO
                    and move["to"] != ZERO
                    and mint["from"] == ZERO
                    and move["to"] == mint["token"]
                ):
                    hit = "deposit_and_mint"
                    break
            if hit is None:
                for burn, move in ((a, b), (b, a)):
                    if (
                        burn["to"] == ZERO
                        and burn["from"] != ZERO
                        and move["from"] != ZERO
                        and move["to"] != ZERO
                        and move["from"] == burn["token"]
                    ):
                        hit = "withdraw_and_burn"
                        break
            if hit is None:
                continue
            used[i] = used[j] = True
            if hit == "deposit_and_mint":
                deposit_mint += 1
            else:
                withdraw_burn += 1
            break

manifest = {
    "lines_total": lines_total,
    "malformed_lines": malformed,
    "expected_logs": len(logs),
    "expected_transfers": len(transfers),
    "expected_tx_count": len(tx_hashes),
    "expected_meta_events": {
        "deposit_and_mint": deposit_mint,
        "withdraw_and_burn": withdraw_burn,
    },
}
out = fixture.parent / "manifest.json"
out.write_text(json.dumps(manifest, indent=2) + "\n")
print(json.dumps(manifest, indent=2))
