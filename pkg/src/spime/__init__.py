"""SPiME: cycle-accurate simulator and analytical performance model for a
parallel array of AES-128 processing-in-memory units.

Layers, bottom up:
  * :mod:`spime.primitives` — pure AES-128 transformations and encodings.
  * :mod:`spime.aes_core` — the 11-cycle iterative encryption core FSM.
  * :mod:`spime.controller` — the per-unit control FSM and handshake.
  * :mod:`spime.array_sim` — N units stepped in lockstep on one clock.
  * :mod:`spime.perf` — latency / throughput / utilization equations.
  * :mod:`spime.cli` — the ``spime`` command.
"""

from .aes_core import AesCoreInputs, AesCoreSim, CORE_CYCLES_PER_BLOCK, encrypt_block
from .array_sim import (
    ConfigError,
    JobFormatError,
    SpimeArraySim,
    SpimeConfig,
    SpimeJob,
    SpimeResult,
    build_array,
    format_result_lines,
    parse_job_lines,
)
from .controller import PimControllerSim, PimUnit, UNIT_CYCLES_PER_BLOCK, run_block
from .perf import (
    DeviceSpec,
    PerfQuery,
    PerfResult,
    evaluate,
    latency_us,
    load_device_catalog,
    sweep,
    throughput_gbps,
    utilization_pct,
)
from .primitives import (
    SubBytesPacket,
    add_round_key,
    block_from_hex,
    block_to_hex,
    block_to_state,
    expand_key,
    flat_to_schedule,
    mix_columns,
    mul_by_2,
    mul_by_3,
    reference_encrypt,
    schedule_to_flat,
    shift_rows,
    state_to_block,
    sub_byte,
    sub_bytes,
)

__version__ = "0.1.0"
