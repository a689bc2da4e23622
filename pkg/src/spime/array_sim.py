"""Lockstep simulation of N parallel (controller, core) encryption units.

All units share one clock, one reset, and one start signal; plaintext,
key, and ciphertext buffers are per unit. A job preloads every unit with
the same number of 128-bit blocks; the array holds start high until each
unit has begun its last block and collects one ciphertext per done pulse.
Units share no state, so an N-unit run is bit-identical to N independent
single-unit runs with the same per-unit payloads.

Job file format (one line per unit, '#' comments allowed):

    <key-hex32> <block-hex32>[,<block-hex32>...]

Result files have the same shape with ciphertext blocks.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

from .controller import PimUnit, UNIT_CYCLES_PER_BLOCK
from .primitives import (
    BLOCK_BYTES,
    NUM_ROUND_KEYS,
    ZERO_BLOCK,
    block_from_hex,
    check_block,
    expand_key,
)

BLOCK_BITS = 8 * BLOCK_BYTES

_IDLE_SCHEDULE = [ZERO_BLOCK] * NUM_ROUND_KEYS

TRACE_HEADER = ["unit", "cycle", "ctrl_state", "aes_start", "core_state", "round", "aes_done", "done"]


class ConfigError(ValueError):
    """Invalid array configuration or job/config shape mismatch."""


class JobFormatError(ValueError):
    """Malformed job file; carries the offending 1-based line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass
class SpimeConfig:
    """Array shape: unit count and per-unit job size in bits."""

    num_pims: int
    per_pim_block_bits: int = BLOCK_BITS
    trace_enabled: bool = False

    def __post_init__(self):
        if self.num_pims < 1:
            raise ConfigError(f"num_pims must be >= 1, got {self.num_pims}")
        if self.per_pim_block_bits < 1 or self.per_pim_block_bits % BLOCK_BITS != 0:
            raise ConfigError(
                f"per_pim_block_bits must be a positive multiple of {BLOCK_BITS}, "
                f"got {self.per_pim_block_bits}"
            )

    @property
    def blocks_per_unit(self) -> int:
        return self.per_pim_block_bits // BLOCK_BITS


@dataclass
class SpimeJob:
    """Per-unit keys and input block sequences."""

    keys: list
    inputs: list

    def validate(self, cfg: SpimeConfig) -> None:
        if len(self.keys) != cfg.num_pims or len(self.inputs) != cfg.num_pims:
            raise ConfigError(
                f"job holds {len(self.keys)} keys / {len(self.inputs)} input rows "
                f"for {cfg.num_pims} units"
            )
        for u, seq in enumerate(self.inputs):
            if len(seq) != cfg.blocks_per_unit:
                raise ConfigError(
                    f"unit {u} has {len(seq)} blocks, config requires {cfg.blocks_per_unit}"
                )
            for block in seq:
                check_block(block)
        for key in self.keys:
            check_block(key)


@dataclass
class SpimeResult:
    """Collected ciphertexts plus the global cycle count at completion."""

    outputs: list
    total_cycles: int
    done_flags: list = field(default_factory=list)


class UnitObservation(NamedTuple):
    ctrl_state: str
    core_state: str
    aes_start: bool
    aes_done: bool
    done: bool
    round: int


class SpimeArraySim:
    """N (controller, core) pairs stepped in lockstep on a shared clock."""

    def __init__(self, cfg: SpimeConfig):
        self.cfg = cfg
        self.units = [PimUnit() for _ in range(cfg.num_pims)]
        self.trace_rows = []
        self.reset()

    def reset(self) -> None:
        """Global reset: all FSMs to IDLE, cycle counter and job cleared."""
        for unit in self.units:
            unit.reset()
        self.cycle = 0
        self.trace_rows = []
        self._job = None
        self._schedules = None
        self._outputs = None
        self._started = 0

    def load_job(self, job: SpimeJob) -> None:
        """Validate a job against the config and stage it for ticking."""
        job.validate(self.cfg)
        self._job = job
        self._schedules = [expand_key(k) for k in job.keys]
        self._outputs = [[] for _ in range(self.cfg.num_pims)]
        self._started = 0

    def job_complete(self) -> bool:
        """True once every block is captured and all FSMs are idle again."""
        if self._job is None:
            return False
        blocks = self.cfg.blocks_per_unit
        if any(len(out) < blocks for out in self._outputs):
            return False
        return all(
            u.ctrl.state == "IDLE" and u.core.current_state == "IDLE"
            and not u.ctrl.done and not u.ctrl.aes_start and not u.core.done
            for u in self.units
        )

    def tick(self) -> list:
        """Advance every unit exactly one global cycle; returns observations."""
        blocks = self.cfg.blocks_per_unit if self._job else 0
        start = self._job is not None and self._started < blocks
        accepted = start and self.units[0].ctrl.state == "IDLE"

        for u, unit in enumerate(self.units):
            if self._job is not None:
                pending = min(len(self._outputs[u]), blocks - 1)
                data_in = self._job.inputs[u][pending]
                schedule = self._schedules[u]
            else:
                data_in = ZERO_BLOCK
                schedule = _IDLE_SCHEDULE
            unit.tick(start=start, data_in=data_in, round_keys=schedule)

        self.cycle += 1
        if accepted:
            self._started += 1

        observations = []
        for u, unit in enumerate(self.units):
            if self._job is not None and unit.ctrl.done:
                self._outputs[u].append(unit.ctrl.data_out)
            observations.append(
                UnitObservation(
                    ctrl_state=unit.ctrl.state,
                    core_state=unit.core.current_state,
                    aes_start=unit.ctrl.aes_start,
                    aes_done=unit.core.done,
                    done=unit.ctrl.done,
                    round=unit.core.round,
                )
            )
            if self.cfg.trace_enabled:
                self.trace_rows.append(
                    [
                        u,
                        self.cycle,
                        unit.ctrl.state,
                        int(unit.ctrl.aes_start),
                        unit.core.current_state,
                        unit.core.round,
                        int(unit.core.done),
                        int(unit.ctrl.done),
                    ]
                )
        return observations

    def run_job(self, job: SpimeJob) -> SpimeResult:
        """Run a staged job to completion and collect all ciphertexts."""
        self.load_job(job)
        budget = self.cfg.blocks_per_unit * UNIT_CYCLES_PER_BLOCK + 64
        start_cycle = self.cycle
        while not self.job_complete():
            self.tick()
            if self.cycle - start_cycle > budget:
                raise RuntimeError("array failed to finish within the cycle budget")
        return SpimeResult(
            outputs=[list(out) for out in self._outputs],
            total_cycles=self.cycle - start_cycle,
            done_flags=[len(out) == self.cfg.blocks_per_unit for out in self._outputs],
        )


def build_array(cfg: SpimeConfig) -> SpimeArraySim:
    """Construct an array of independent, reset (controller, core) pairs."""
    return SpimeArraySim(cfg)


# ---------------------------------------------------------------------------
# Job / result file round-trip
# ---------------------------------------------------------------------------

def parse_job_lines(lines) -> SpimeJob:
    """Parse job-file lines; raises JobFormatError with a line number."""
    keys, inputs = [], []
    expected_blocks = None
    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise JobFormatError(lineno, "expected '<key-hex> <block-hex>[,<block-hex>...]'")
        try:
            key = block_from_hex(parts[0])
            blocks = [block_from_hex(tok) for tok in parts[1].split(",")]
        except ValueError as exc:
            raise JobFormatError(lineno, str(exc)) from None
        if expected_blocks is None:
            expected_blocks = len(blocks)
        elif len(blocks) != expected_blocks:
            raise JobFormatError(
                lineno, f"expected {expected_blocks} blocks per unit, got {len(blocks)}"
            )
        keys.append(key)
        inputs.append(blocks)
    if not keys:
        raise JobFormatError(0, "job file holds no units")
    return SpimeJob(keys=keys, inputs=inputs)


def format_result_lines(job: SpimeJob, result: SpimeResult) -> list:
    """Render a result in the job-file shape (key + ciphertext blocks)."""
    lines = []
    for key, out in zip(job.keys, result.outputs):
        lines.append(f"{key.hex()} {','.join(block.hex() for block in out)}")
    return lines
