"""Cycle-accurate model of the iterative AES-128 encryption core.

The core is a four-state machine (IDLE, INIT, ROUND, FINAL) stepped one
clock at a time with synchronous semantics: every :meth:`AesCoreSim.step`
samples the inputs once, computes the next register values, and commits
them atomically. One encryption occupies exactly 11 non-idle cycles:
1 INIT (initial key add) + 9 ROUND (full rounds, keys 1..9) + 1 FINAL
(no column mix, key 10).

``done`` and ``data_out`` are registered outputs: they become visible
after the FINAL cycle commits and ``done`` drops again after the next
IDLE cycle.
"""

from dataclasses import dataclass, field

from .primitives import (
    NUM_ROUND_KEYS,
    ZERO_BLOCK,
    add_round_key,
    block_to_state,
    check_block,
    expand_key,
    mix_columns,
    shift_rows,
    state_to_block,
    sub_bytes,
)

IDLE = "IDLE"
INIT = "INIT"
ROUND = "ROUND"
FINAL = "FINAL"

CORE_CYCLES_PER_BLOCK = 11  # 1 INIT + 9 ROUND + 1 FINAL


def _zero_schedule():
    return [ZERO_BLOCK] * NUM_ROUND_KEYS


@dataclass
class AesCoreInputs:
    """Input port values sampled by the core at one cycle boundary.

    ``round_keys`` is the pre-unpacked view of the flat round-key bus;
    expansion happens upstream of the core. The raw ``key`` port is part
    of the core's pinout but unused here for the same reason.
    """

    start: bool = False
    data_in: bytes = ZERO_BLOCK
    round_keys: list = field(default_factory=_zero_schedule)
    key: bytes = ZERO_BLOCK

    def __post_init__(self):
        check_block(self.data_in)
        check_block(self.key)
        if len(self.round_keys) != NUM_ROUND_KEYS:
            raise ValueError(f"round_keys must carry {NUM_ROUND_KEYS} keys")


class AesCoreSim:
    """Registered state of one AES core, advanced one cycle per step."""

    def __init__(self, trace_enabled: bool = False):
        self.trace_enabled = trace_enabled
        self.trace = []  # rows: (cycle, state, round, done)
        self.reset()

    def reset(self) -> None:
        """Synchronous reset: clear the state machine, counters and outputs."""
        self.current_state = IDLE
        self.state_reg = block_to_state(ZERO_BLOCK)
        self.round = 0
        self.round_keys = _zero_schedule()
        self.done = False
        self.data_out = ZERO_BLOCK
        self.cycle_count = 0

    def step(self, inputs: AesCoreInputs) -> "AesCoreSim":
        """Advance exactly one clock cycle.

        The executing state is ``current_state`` as sampled at entry; all
        register updates commit together at the end of the call.
        """
        state = self.current_state
        self.round_keys = list(inputs.round_keys)
        keys = self.round_keys

        if state == IDLE:
            self.done = False
            if inputs.start:
                self.current_state = INIT
        elif state == INIT:
            self.round = 0
            self.state_reg = add_round_key(block_to_state(inputs.data_in), keys[0])
            self.current_state = ROUND
        elif state == ROUND:
            transformed = mix_columns(shift_rows(sub_bytes(self.state_reg)))
            self.state_reg = add_round_key(transformed, keys[self.round + 1])
            self.round += 1
            # 9 full rounds total: leave once the counter reaches 9.
            self.current_state = FINAL if self.round == 9 else ROUND
        elif state == FINAL:
            self.state_reg = add_round_key(shift_rows(sub_bytes(self.state_reg)), keys[10])
            self.data_out = state_to_block(self.state_reg)
            self.done = True
            self.current_state = IDLE
        else:
            raise AssertionError(f"unreachable state {state!r}")

        self.cycle_count += 1
        if self.trace_enabled:
            self.trace.append((self.cycle_count, state, self.round, int(self.done)))
        return self


def encrypt_block(key: bytes, plaintext: bytes):
    """Encrypt one block through a fresh core; returns (ciphertext, cycles).

    ``cycles`` counts the core-internal sequence from INIT entry to the
    done pulse (the IDLE cycle that consumes the start pulse is excluded)
    and is 11 for every input.
    """
    check_block(key)
    check_block(plaintext)
    schedule = expand_key(key)
    core = AesCoreSim()
    core.step(AesCoreInputs(start=True, data_in=plaintext, round_keys=schedule))
    hold = AesCoreInputs(start=False, data_in=plaintext, round_keys=schedule)
    cycles = 0
    while not core.done:
        core.step(hold)
        cycles += 1
        if cycles > 4 * CORE_CYCLES_PER_BLOCK:
            raise RuntimeError("core failed to assert done")
    return core.data_out, cycles
