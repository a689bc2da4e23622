"""Analytical latency, throughput, and FPGA-utilization model.

The model is deliberately simple: one encryption is a fixed 11-cycle
task, latency is cycles over clock frequency, throughput divides bits
encrypted by latency, and LUT/FF usage grows linearly with the number
of units.

Two throughput readings are provided because the headline formula
(bits / latency_us / 1e6) is ambiguous about what "bits" and which
latency it means:

  * ``aggregate`` (default): bits of one whole parallel batch
    (num_pims x block_bits) over the per-unit batch latency. This is the
    reading that yields ~23.8 at (4096 units, 1024-bit blocks, 500 MHz).
  * ``per-unit``: one unit's block_bits over the single-task latency,
    the formula applied verbatim; it grows with block size.

Utilization is calibrated from two measured operating points at 4096
units (datacenter parts: 3.65% LUT / <2% FF; embedded ZCU parts:
18.44% LUT / ~10% FF) and extrapolated linearly. FF anchors are upper
bounds, so FF percentages are approximate.
"""

import csv
import os
from dataclasses import dataclass
from importlib import resources

AGGREGATE = "aggregate"
PER_UNIT = "per-unit"

DEFAULT_CYCLES_PER_TASK = 11

ANCHOR_NUM_PIMS = 4096
# (lut_pct, ff_pct) measured at ANCHOR_NUM_PIMS units, per device family.
DATACENTER_ANCHORS = (3.65, 2.0)
EMBEDDED_ANCHORS = (18.44, 10.0)
_EMBEDDED_DEVICES = {"ZCU104", "ZCU106"}
# Family fallback for catalogs beyond the built-in one.
_EMBEDDED_LUT_LIMIT = 1_000_000

CATALOG_ENV_VAR = "SPIME_DEVICE_CATALOG"

CSV_HEADER = [
    "device", "num_pims", "fmax_mhz", "block_bits",
    "latency_us", "throughput_gbps", "lut_util_pct", "ff_util_pct",
]

PUBLISHED_NUM_PIMS = [256, 512, 1024, 2048, 4096]
PUBLISHED_FMAX_MHZ = [100, 300, 500]
PUBLISHED_BLOCK_BITS = [1024, 4096, 16384, 65536]


class SweepError(ValueError):
    """A sweep query failed; carries the 0-based query index."""

    def __init__(self, index: int, message: str):
        super().__init__(f"query {index}: {message}")
        self.index = index


@dataclass
class DeviceSpec:
    """One FPGA part: absolute resource counts plus calibrated per-unit costs."""

    name: str
    part: str
    luts: int
    ffs: int
    bram: int
    uram: int
    dsps: int
    per_pim_lut_cost: float = 0.0
    per_pim_ff_cost: float = 0.0

    def __post_init__(self):
        for label in ("luts", "ffs", "bram", "uram", "dsps"):
            if getattr(self, label) <= 0:
                raise ValueError(f"{self.name}: {label} must be positive")
        if self.per_pim_lut_cost <= 0.0 or self.per_pim_ff_cost <= 0.0:
            lut_pct, ff_pct = self._anchors()
            self.per_pim_lut_cost = self.luts * lut_pct / 100.0 / ANCHOR_NUM_PIMS
            self.per_pim_ff_cost = self.ffs * ff_pct / 100.0 / ANCHOR_NUM_PIMS

    def _anchors(self):
        if self.name in _EMBEDDED_DEVICES or self.luts < _EMBEDDED_LUT_LIMIT:
            return EMBEDDED_ANCHORS
        return DATACENTER_ANCHORS


@dataclass
class PerfQuery:
    """One operating point of the analytical model."""

    num_pims: int
    fmax_mhz: float
    block_bits: int = 1024
    cycles_per_task: int = DEFAULT_CYCLES_PER_TASK

    def __post_init__(self):
        if self.num_pims < 1:
            raise ValueError(f"num_pims must be positive, got {self.num_pims}")
        if self.fmax_mhz <= 0:
            raise ValueError(f"fmax_mhz must be positive, got {self.fmax_mhz}")
        if self.block_bits < 1:
            raise ValueError(f"block_bits must be positive, got {self.block_bits}")
        if self.cycles_per_task < 1:
            raise ValueError(f"cycles_per_task must be positive, got {self.cycles_per_task}")


@dataclass
class PerfResult:
    latency_us: float
    throughput_gbps: float
    lut_util_pct: float
    ff_util_pct: float


def latency_us(cycles: int, fmax_mhz: float) -> float:
    """Single-task latency in microseconds: cycles / fmax[MHz]."""
    if fmax_mhz <= 0:
        raise ValueError(f"fmax_mhz must be positive, got {fmax_mhz}")
    if cycles < 1:
        raise ValueError(f"cycles must be positive, got {cycles}")
    return cycles / fmax_mhz


def throughput_gbps(total_bits: float, lat_us: float) -> float:
    """Headline throughput figure: (bits / latency_us) / 1e6.

    Dimensionally this is Mbit/s / 1e6, not SI Gbps; kept verbatim so the
    published operating points reproduce exactly.
    """
    if lat_us <= 0:
        raise ValueError(f"latency must be positive, got {lat_us}")
    if total_bits <= 0:
        raise ValueError(f"total_bits must be positive, got {total_bits}")
    return (total_bits / lat_us) / 1e6


def utilization_pct(device: DeviceSpec, num_pims: int, resource: str) -> float:
    """Linear resource estimate: num_pims * per-unit cost / capacity * 100."""
    if num_pims < 1:
        raise ValueError(f"num_pims must be positive, got {num_pims}")
    kind = resource.upper()
    if kind == "LUT":
        return num_pims * device.per_pim_lut_cost / device.luts * 100.0
    if kind == "FF":
        return num_pims * device.per_pim_ff_cost / device.ffs * 100.0
    raise ValueError(f"unknown resource {resource!r}, expected LUT or FF")


def evaluate(query: PerfQuery, device: DeviceSpec, interpretation: str = AGGREGATE) -> PerfResult:
    """Evaluate one operating point into latency/throughput/utilization."""
    lat = latency_us(query.cycles_per_task, query.fmax_mhz)
    if interpretation == AGGREGATE:
        batch_latency = (query.block_bits / 128.0) * lat
        thr = throughput_gbps(query.num_pims * query.block_bits, batch_latency)
    elif interpretation == PER_UNIT:
        thr = throughput_gbps(query.block_bits, lat)
    else:
        raise ValueError(f"unknown interpretation {interpretation!r}")
    return PerfResult(
        latency_us=lat,
        throughput_gbps=thr,
        lut_util_pct=utilization_pct(device, query.num_pims, "LUT"),
        ff_util_pct=utilization_pct(device, query.num_pims, "FF"),
    )


def sweep(pairs, interpretation: str = AGGREGATE) -> list:
    """Evaluate (PerfQuery, DeviceSpec) pairs in order; errors carry the index."""
    results = []
    for index, (query, device) in enumerate(pairs):
        try:
            results.append(evaluate(query, device, interpretation))
        except ValueError as exc:
            raise SweepError(index, str(exc)) from exc
    return results


def sweep_csv_rows(pairs, interpretation: str = AGGREGATE) -> list:
    """Sweep and render rows matching CSV_HEADER (floats at 4 decimals)."""
    pairs = list(pairs)
    rows = []
    for (query, device), res in zip(pairs, sweep(pairs, interpretation)):
        rows.append(
            [
                device.name,
                query.num_pims,
                query.fmax_mhz,
                query.block_bits,
                round(res.latency_us, 4),
                round(res.throughput_gbps, 4),
                round(res.lut_util_pct, 4),
                round(res.ff_util_pct, 4),
            ]
        )
    return rows


# ---------------------------------------------------------------------------
# Device catalog
# ---------------------------------------------------------------------------

def load_device_catalog(path: str = None) -> dict:
    """Load the device catalog CSV; falls back to the packaged table.

    Explicit ``path`` wins, then the CATALOG_ENV_VAR environment variable,
    then the built-in file. Returns an ordered name -> DeviceSpec map.
    """
    if path is None:
        path = os.environ.get(CATALOG_ENV_VAR)
    if path is None:
        text = resources.files("spime").joinpath("data/devices.csv").read_text()
        lines = text.splitlines()
    else:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    catalog = {}
    for row in csv.DictReader(lines):
        spec = DeviceSpec(
            name=row["name"],
            part=row["part"],
            luts=int(row["luts"]),
            ffs=int(row["ffs"]),
            bram=int(row["bram"]),
            uram=int(row["uram"]),
            dsps=int(row["dsps"]),
        )
        catalog[spec.name] = spec
    return catalog


# ---------------------------------------------------------------------------
# Figure presets: the published sweep grids
# ---------------------------------------------------------------------------

def figure_grid(figure: int, catalog: dict):
    """Return (pairs, interpretation) for one published figure's data grid.

    3: LUT utilization vs unit count, all devices.
    4: FF utilization vs unit count, all devices.
    5: latency vs clock frequency, all unit counts (latency is unit-count
       independent, which the grid makes visible).
    6: aggregate throughput vs unit count at 1024-bit blocks.
    7: per-unit throughput vs block size at 4096 units.
    """
    devices = list(catalog.values())
    if not devices:
        raise ValueError("device catalog is empty")
    default = catalog.get("U55C", devices[0])
    pairs = []
    if figure in (3, 4):
        for device in devices:
            for n in PUBLISHED_NUM_PIMS:
                pairs.append((PerfQuery(num_pims=n, fmax_mhz=100.0), device))
        return pairs, AGGREGATE
    if figure == 5:
        for fmax in [100.0, 200.0, 300.0, 400.0, 500.0]:
            for n in PUBLISHED_NUM_PIMS:
                pairs.append((PerfQuery(num_pims=n, fmax_mhz=fmax), default))
        return pairs, AGGREGATE
    if figure == 6:
        for fmax in PUBLISHED_FMAX_MHZ:
            for n in [1024, 2048, 3072, 4096]:
                pairs.append((PerfQuery(num_pims=n, fmax_mhz=float(fmax)), default))
        return pairs, AGGREGATE
    if figure == 7:
        for fmax in PUBLISHED_FMAX_MHZ:
            for bits in PUBLISHED_BLOCK_BITS:
                pairs.append(
                    (PerfQuery(num_pims=4096, fmax_mhz=float(fmax), block_bits=bits), default)
                )
        return pairs, PER_UNIT
    raise ValueError(f"unknown figure {figure}, expected 3-7")
