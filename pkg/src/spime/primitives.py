"""Pure AES-128 building blocks shared by the FSM simulator and test oracles.

Everything here is combinational: total functions on bytes, 4x4 state
matrices, and 128-bit blocks. The only stateful object is
:class:`SubBytesPacket`, which models the packet-gated substitution
module's single data latch.

Conventions:
  * A 128-bit block is ``bytes`` of length 16 (hex form: 32 lowercase chars,
    byte 0 first).
  * The state is a 4x4 list of byte rows, indexed ``state[row][col]``, with
    the column-major block mapping ``block[4*col + row] == state[row][col]``.
  * A round-key schedule is a list of 11 blocks, ``keys[0]`` being the
    cipher key; its flat form is the 176-byte concatenation ``keys[0] ..
    keys[10]`` (352 hex chars).
"""

BLOCK_BYTES = 16
NUM_ROUND_KEYS = 11
SCHEDULE_BYTES = BLOCK_BYTES * NUM_ROUND_KEYS

ZERO_BLOCK = bytes(BLOCK_BYTES)

# Rijndael S-box (forward only; decryption is out of scope).
SBOX = [
    0x63, 0x7C, 0x77, 0x7B, 0xF2, 0x6B, 0x6F, 0xC5, 0x30, 0x01, 0x67, 0x2B, 0xFE, 0xD7, 0xAB, 0x76,
    0xCA, 0x82, 0xC9, 0x7D, 0xFA, 0x59, 0x47, 0xF0, 0xAD, 0xD4, 0xA2, 0xAF, 0x9C, 0xA4, 0x72, 0xC0,
    0xB7, 0xFD, 0x93, 0x26, 0x36, 0x3F, 0xF7, 0xCC, 0x34, 0xA5, 0xE5, 0xF1, 0x71, 0xD8, 0x31, 0x15,
    0x04, 0xC7, 0x23, 0xC3, 0x18, 0x96, 0x05, 0x9A, 0x07, 0x12, 0x80, 0xE2, 0xEB, 0x27, 0xB2, 0x75,
    0x09, 0x83, 0x2C, 0x1A, 0x1B, 0x6E, 0x5A, 0xA0, 0x52, 0x3B, 0xD6, 0xB3, 0x29, 0xE3, 0x2F, 0x84,
    0x53, 0xD1, 0x00, 0xED, 0x20, 0xFC, 0xB1, 0x5B, 0x6A, 0xCB, 0xBE, 0x39, 0x4A, 0x4C, 0x58, 0xCF,
    0xD0, 0xEF, 0xAA, 0xFB, 0x43, 0x4D, 0x33, 0x85, 0x45, 0xF9, 0x02, 0x7F, 0x50, 0x3C, 0x9F, 0xA8,
    0x51, 0xA3, 0x40, 0x8F, 0x92, 0x9D, 0x38, 0xF5, 0xBC, 0xB6, 0xDA, 0x21, 0x10, 0xFF, 0xF3, 0xD2,
    0xCD, 0x0C, 0x13, 0xEC, 0x5F, 0x97, 0x44, 0x17, 0xC4, 0xA7, 0x7E, 0x3D, 0x64, 0x5D, 0x19, 0x73,
    0x60, 0x81, 0x4F, 0xDC, 0x22, 0x2A, 0x90, 0x88, 0x46, 0xEE, 0xB8, 0x14, 0xDE, 0x5E, 0x0B, 0xDB,
    0xE0, 0x32, 0x3A, 0x0A, 0x49, 0x06, 0x24, 0x5C, 0xC2, 0xD3, 0xAC, 0x62, 0x91, 0x95, 0xE4, 0x79,
    0xE7, 0xC8, 0x37, 0x6D, 0x8D, 0xD5, 0x4E, 0xA9, 0x6C, 0x56, 0xF4, 0xEA, 0x65, 0x7A, 0xAE, 0x08,
    0xBA, 0x78, 0x25, 0x2E, 0x1C, 0xA6, 0xB4, 0xC6, 0xE8, 0xDD, 0x74, 0x1F, 0x4B, 0xBD, 0x8B, 0x8A,
    0x70, 0x3E, 0xB5, 0x66, 0x48, 0x03, 0xF6, 0x0E, 0x61, 0x35, 0x57, 0xB9, 0x86, 0xC1, 0x1D, 0x9E,
    0xE1, 0xF8, 0x98, 0x11, 0x69, 0xD9, 0x8E, 0x94, 0x9B, 0x1E, 0x87, 0xE9, 0xCE, 0x55, 0x28, 0xDF,
    0x8C, 0xA1, 0x89, 0x0D, 0xBF, 0xE6, 0x42, 0x68, 0x41, 0x99, 0x2D, 0x0F, 0xB0, 0x54, 0xBB, 0x16,
]

# Round constants for the key-expansion word recurrence (first word of each).
RCON = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36]


# ---------------------------------------------------------------------------
# Block / state / schedule plumbing
# ---------------------------------------------------------------------------

def block_from_hex(text: str) -> bytes:
    """Parse a 32-hex-char string into a 16-byte block."""
    text = text.strip()
    if len(text) != 2 * BLOCK_BYTES:
        raise ValueError(f"block hex must be {2 * BLOCK_BYTES} chars, got {len(text)}")
    try:
        return bytes.fromhex(text)
    except ValueError:
        raise ValueError(f"invalid block hex: {text!r}") from None


def block_to_hex(block: bytes) -> str:
    """Encode a 16-byte block as 32 lowercase hex chars, byte 0 first."""
    check_block(block)
    return block.hex()


def check_block(block: bytes) -> bytes:
    if not isinstance(block, (bytes, bytearray)) or len(block) != BLOCK_BYTES:
        raise ValueError(f"block must be {BLOCK_BYTES} bytes")
    return bytes(block)


def block_to_state(block: bytes) -> list:
    """Map a block to the 4x4 state: byte 4c+r lands at state[r][c]."""
    check_block(block)
    return [[block[4 * c + r] for c in range(4)] for r in range(4)]


def state_to_block(state: list) -> bytes:
    """Inverse of :func:`block_to_state`."""
    return bytes(state[r][c] for c in range(4) for r in range(4))


def schedule_to_flat(keys: list) -> bytes:
    """Concatenate the 11 round keys into the 176-byte flat layout."""
    if len(keys) != NUM_ROUND_KEYS:
        raise ValueError(f"schedule must hold {NUM_ROUND_KEYS} round keys")
    return b"".join(check_block(k) for k in keys)


def flat_to_schedule(flat: bytes) -> list:
    """Split the 176-byte flat layout back into 11 round keys."""
    if len(flat) != SCHEDULE_BYTES:
        raise ValueError(f"flat schedule must be {SCHEDULE_BYTES} bytes, got {len(flat)}")
    return [bytes(flat[16 * i:16 * i + 16]) for i in range(NUM_ROUND_KEYS)]


# ---------------------------------------------------------------------------
# Round transformations
# ---------------------------------------------------------------------------

def sub_byte(b: int) -> int:
    """S-box substitution of a single byte."""
    return SBOX[b]


def sub_bytes(state: list) -> list:
    """Apply the S-box to all 16 state bytes."""
    return [[SBOX[b] for b in row] for row in state]


def shift_rows(state: list) -> list:
    """Rotate row r left by r positions: out[r][c] = in[r][(c + r) % 4]."""
    return [[state[r][(c + r) % 4] for c in range(4)] for r in range(4)]


def mul_by_2(b: int) -> int:
    """GF(2^8) multiply by 2: shift left, XOR 0x1b if the old MSB was set."""
    shifted = (b << 1) & 0xFF
    return shifted ^ 0x1B if b & 0x80 else shifted


def mul_by_3(b: int) -> int:
    """GF(2^8) multiply by 3: mul_by_2(b) XOR b."""
    return mul_by_2(b) ^ b


# Lookup forms of the two multipliers keep mix_columns out of the
# per-byte branch; built from the defining functions above.
_MUL2 = [mul_by_2(b) for b in range(256)]
_MUL3 = [mul_by_3(b) for b in range(256)]


def mix_columns(state: list) -> list:
    """Mix each column with the (2, 3, 1, 1) circulant over GF(2^8)."""
    out = [[0] * 4 for _ in range(4)]
    for c in range(4):
        s0, s1, s2, s3 = state[0][c], state[1][c], state[2][c], state[3][c]
        out[0][c] = _MUL2[s0] ^ _MUL3[s1] ^ s2 ^ s3
        out[1][c] = s0 ^ _MUL2[s1] ^ _MUL3[s2] ^ s3
        out[2][c] = s0 ^ s1 ^ _MUL2[s2] ^ _MUL3[s3]
        out[3][c] = _MUL3[s0] ^ s1 ^ s2 ^ _MUL2[s3]
    return out


def add_round_key(state: list, round_key: bytes) -> list:
    """XOR the state with a round key (key mapped column-major like blocks)."""
    check_block(round_key)
    return [[state[r][c] ^ round_key[4 * c + r] for c in range(4)] for r in range(4)]


def expand_key(key: bytes) -> list:
    """Expand a 128-bit cipher key into the 11 round keys.

    Word recurrence: every 4th word applies RotWord, SubWord and the round
    constant; the rest XOR the previous word with the word 4 back.
    """
    check_block(key)
    words = [list(key[4 * i:4 * i + 4]) for i in range(4)]
    for i in range(4, 44):
        prev = words[i - 1]
        if i % 4 == 0:
            rotated = prev[1:] + prev[:1]
            prev = [SBOX[b] for b in rotated]
            prev[0] ^= RCON[i // 4 - 1]
        words.append([a ^ b for a, b in zip(words[i - 4], prev)])
    return [bytes(b for w in words[4 * k:4 * k + 4] for b in w) for k in range(NUM_ROUND_KEYS)]


def reference_encrypt(key: bytes, plaintext: bytes) -> bytes:
    """Straight-line AES-128 encryption composed from the primitives above.

    This is the combinational composition oracle: initial key addition,
    nine full rounds, one final round without mix_columns. The FSM core
    must agree with it bit-for-bit.
    """
    keys = expand_key(key)
    state = add_round_key(block_to_state(plaintext), keys[0])
    for rnd in range(1, 10):
        state = add_round_key(mix_columns(shift_rows(sub_bytes(state))), keys[rnd])
    state = add_round_key(shift_rows(sub_bytes(state)), keys[10])
    return state_to_block(state)


# ---------------------------------------------------------------------------
# Packet-gated SubBytes front end
# ---------------------------------------------------------------------------

SUB_BYTES_PACKET_TYPE = 2


class SubBytesPacket:
    """Synchronous packet filter in front of the substitution stage.

    Holds one 128-bit latch. A valid packet of type 2 is captured and
    flagged valid for that cycle; any other input leaves the latch at its
    previous value with the valid flag low. Reset clears the latch to zero.
    """

    def __init__(self):
        self.reset()

    def reset(self) -> None:
        self.temp_data = ZERO_BLOCK
        self.output_valid = False

    def step(self, input_valid: bool, packet_type: int, input_data: bytes):
        """Advance one clock cycle; returns (output_valid, output_data)."""
        check_block(input_data)
        if input_valid and packet_type == SUB_BYTES_PACKET_TYPE:
            self.temp_data = bytes(input_data)
            self.output_valid = True
        else:
            self.output_valid = False
        return self.output_valid, self.temp_data
