#!/usr/bin/env python3
"""Generate the captured-style JSONL log fixture used by the tests.

Writes tests/fixtures/transfers.jsonl.  Run once; the output is
committed.  Deliberately avoids importing the tokengraph package.
"""

import json
from pathlib import Path

TRANSFER = "0xddf252ad1be2c89b69c2b068fc378daa952ba7f163c4a11628f55a4df523b3ef"
APPROVAL = "0x8c5be1e5ebec7d5bd14f71427d1e84f3dd0314c0f7b2291e5b200ac8c7c3b925"

USDC = "0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48"
AUSDC = "0xbcca60bb61934080951369a648fb03df4f96263c"
DAI = "0x6b175474e89094c44da98b954eedeac495271d0f"
WETH = "0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2"
SHIB = "0x95ad61b0a150d79219dcf64e1e6cc01f0b64c4ce"
XSHIB = "0xb4a81261b16b92af0b9f7c4a83f1e885132d81e4"
NFT = "0xbc4ca0eda7647a8ab7c2061c2e118a18a936f13d"
U1 = "0x1111111111111111111111111111111111111111"
U2 = "0x2222222222222222222222222222222222222222"
ZERO = "0x" + "00" * 20


def pad_addr(addr):
    return "0x" + "0" * 24 + addr[2:]


def word(n):
    return "0x" + format(n, "064x")


def tx_hash(n):
    return "0x" + format(n, "064x")


def log(address, topics, data, block, txh, log_index, tx_index):
    return json.dumps(
        {
            "address": address,
            "topics": topics,
            "data": data,
            "blockNumber": hex(block),
            "transactionHash": txh,
            "logIndex": hex(log_index),
            "transactionIndex": hex(tx_index),
        }
    )


lines = []

# tx1, block 100: USDC deposit & aUSDC mint, plus an Approval log
t1 = tx_hash(0xA001)
lines.append(log(USDC, [TRANSFER, pad_addr(U1), pad_addr(AUSDC)], word(5_000_000), 100, t1, 0, 0))
lines.append(log(USDC, [APPROVAL, pad_addr(U1), pad_addr(AUSDC)], word(0), 100, t1, 1, 0))
lines.append(log(AUSDC, [TRANSFER, pad_addr(ZERO), pad_addr(U1)], word(5_000_000), 100, t1, 2, 0))

# tx2, block 100: plain WETH move
t2 = tx_hash(0xA002)
lines.append(log(WETH, [TRANSFER, pad_addr(U1), pad_addr(U2)], word(10**18), 100, t2, 3, 1))

# tx3, block 101: aUSDC burn & USDC withdrawal
t3 = tx_hash(0xA003)
lines.append(log(AUSDC, [TRANSFER, pad_addr(U1), pad_addr(ZERO)], word(2_000_000), 101, t3, 0, 0))
lines.append(log(USDC, [TRANSFER, pad_addr(AUSDC), pad_addr(U1)], word(2_000_000), 101, t3, 1, 0))

# tx4, block 102: ERC-721 Transfer (4 topics) -- excluded by shape
t4 = tx_hash(0xA004)
lines.append(log(NFT, [TRANSFER, pad_addr(U1), pad_addr(U2), word(1234)], "0x", 102, t4, 0, 0))

# tx5, block 102: lone DAI mint, no counterpart
t5 = tx_hash(0xA005)
lines.append(log(DAI, [TRANSFER, pad_addr(ZERO), pad_addr(U2)], word(7), 102, t5, 1, 1))

# tx6, block 103: dirty padding in the from-topic (tolerated, truncated)
t6 = tx_hash(0xA006)
dirty_from = "0x" + "ff" * 12 + U2[2:]
lines.append(log(WETH, [TRANSFER, dirty_from, pad_addr(U1)], word(55), 103, t6, 0, 0))

# tx7, block 103: Transfer topic but empty data word -- not decodable
t7 = tx_hash(0xA007)
lines.append(log(DAI, [TRANSFER, pad_addr(U1), pad_addr(U2)], "0x", 103, t7, 1, 1))

# malformed JSON line
lines.append('{"address": "0xdeadbeef", "topics": [')

# tx8, block 104: SHIB deposit & xSHIB mint
t8 = tx_hash(0xA008)
lines.append(log(SHIB, [TRANSFER, pad_addr(U2), pad_addr(XSHIB)], word(402186), 104, t8, 0, 0))
lines.append(log(XSHIB, [TRANSFER, pad_addr(ZERO), pad_addr(U2)], word(402186), 104, t8, 1, 0))

# tx9, block 105: uint256-max move
t9 = tx_hash(0xA009)
lines.append(log(USDC, [TRANSFER, pad_addr(U2), pad_addr(U1)], word(2**256 - 1), 105, t9, 0, 0))

out = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "transfers.jsonl"
out.parent.mkdir(parents=True, exist_ok=True)
out.write_text("\n".join(lines) + "\n")
print(f"wrote {out} ({len(lines)} lines)")
