"""Standalone SHAKE-128 built from the Keccak-f[1600] permutation.

Kept deliberately independent of the package (and of hashlib) so hash tests
have a second route: golden values were computed with this implementation
and the suite cross-checks it against the production path on random inputs.
"""

MASK64 = (1 << 64) - 1
_RATE = 168  # bytes; capacity 256 bits


def _rol64(a: int, n: int) -> int:
    n %= 64
    return ((a << n) | (a >> (64 - n))) & MASK64


def _keccak_f1600(lanes: list[list[int]]) -> list[list[int]]:
    lfsr = 1
    for _ in range(24):
        # theta
        c = [lanes[x][0] ^ lanes[x][1] ^ lanes[x][2] ^ lanes[x][3] ^ lanes[x][4] for x in range(5)]
        d = [c[(x + 4) % 5] ^ _rol64(c[(x + 1) % 5], 1) for x in range(5)]
        lanes = [[lanes[x][y] ^ d[x] for y in range(5)] for x in range(5)]
        # rho and pi
        x, y = 1, 0
        current = lanes[x][y]
        for t in range(24):
            x, y = y, (2 * x + 3 * y) % 5
            current, lanes[x][y] = lanes[x][y], _rol64(current, (t + 1) * (t + 2) // 2)
        # chi
        for j in range(5):
            row = [lanes[x][j] for x in range(5)]
            for x in range(5):
                lanes[x][j] = row[x] ^ ((~row[(x + 1) % 5]) & row[(x + 2) % 5])
        # iota
        for j in range(7):
            lfsr = ((lfsr << 1) ^ ((lfsr >> 7) * 0x71)) % 256
            if lfsr & 2:
                lanes[0][0] ^= 1 << ((1 << j) - 1)
    return lanes


def shake128(data: bytes, out_len: int) -> bytes:
    """SHAKE-128 extendable output over ``data``, truncated to ``out_len`` bytes."""
    block = bytearray(data)
    block.append(0x1F)  # domain suffix
    while len(block) % _RATE != 0:
        block.append(0x00)
    block[-1] ^= 0x80
    lanes = [[0] * 5 for _ in range(5)]
    for start in range(0, len(block), _RATE):
        chunk = block[start : start + _RATE]
        for i in range(_RATE // 8):
            x, y = i % 5, i // 5
            lanes[x][y] ^= int.from_bytes(chunk[8 * i : 8 * i + 8], "little")
        lanes = _keccak_f1600(lanes)
    out = bytearray()
    while len(out) < out_len:
        for i in range(_RATE // 8):
            x, y = i % 5, i // 5
            out += lanes[x][y].to_bytes(8, "little")
            if len(out) >= out_len:
                break
        if len(out) < out_len:
            lanes = _keccak_f1600(lanes)
    return bytes(out[:out_len])


def shake128_hex(text: str, nbytes: int = 4) -> str:
    return shake128(text.encode("utf-8"), nbytes).hex()
