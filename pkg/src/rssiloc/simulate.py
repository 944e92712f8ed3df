"""Scenario orchestration: deployment planning, coverage verification,
and the end-to-end localization pipeline.

A run executes, per trajectory step: one packet exchange on the active
channel (feeding the rescan state machine), an RSSI sampling window per
beacon, dB-domain aggregation, strongest-three anchor selection,
path-loss inversion to ranges, the lateration solve, and one Kalman
step. Three estimate flavors are recorded from the same random draws:

    raw       lateration on the first sample of each window
    averaged  lateration on the window means
    kalman    averaged estimate passed through the range filter

Time is virtual: the sampling/aggregation intervals are bookkeeping on
the records and a step counter advances the run, so equal scenarios
(seed included) reproduce bit-equal results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import ChannelMonitor, ScanConfig, scan_all_channels, select_channel
from .errors import CapacityError, NoResolvedStepsError
from .geometry import AnchorNode, Dbm, NodeId, Point2D, Rect
from .radio import PathLossParams, RadioSpec, ShadowingModel
from .spectrum import ChannelEnvironment, packet_success
from .tracking import KalmanConfig

__all__ = [
    "Scenario",
    "DeploymentPlan",
    "StepRecord",
    "RunResult",
    "Metrics",
    "plan_square_grid_deployment",
    "verify_three_coverage",
    "run_scenario",
    "compare_pipelines",
    "compute_metrics",
]

# Fig.-3 monitoring defaults used by runs; standalone ChannelMonitor
# instances take these as constructor arguments instead.
MONITOR_WINDOW = 20
MONITOR_FAILURE_THRESHOLD = 0.2

_MAX_PLANNED_BEACONS = 1_000_000


@dataclass(frozen=True)
class Scenario:
    """Complete simulation input; `seed` fixes every random draw."""

    roi: Rect
    beacons: tuple[AnchorNode, ...]
    trajectory: tuple[Point2D, ...]
    seed: int
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    radio: RadioSpec = field(default_factory=RadioSpec)
    shadowing: ShadowingModel = field(default_factory=ShadowingModel)
    environment: ChannelEnvironment = field(default_factory=ChannelEnvironment)
    scan: ScanConfig = field(default_factory=ScanConfig)
    kalman: KalmanConfig = field(default_factory=KalmanConfig)
    aggregation_window: int = 10

    def __post_init__(self):
        object.__setattr__(self, "beacons", tuple(self.beacons))
        object.__setattr__(self, "trajectory", tuple(self.trajectory))
        if not self.beacons:
            raise ValueError("scenario needs at least one beacon")
        if not self.trajectory:
            raise ValueError("scenario needs at least one trajectory point")
        if self.aggregation_window < 1:
            raise ValueError("aggregation_window must be >= 1")
        ids = [b.id for b in self.beacons]
        if len(set(ids)) != len(ids):
            raise ValueError("beacon ids must be unique within a scenario")
        for p in self.trajectory:
            if not self.roi.contains(p):
                raise ValueError(f"trajectory point ({p.x}, {p.y}) outside roi")


@dataclass(frozen=True)
class DeploymentPlan:
    """Planned beacon lattice. Spacing is recorded per axis because the
    snap-to-fit step quantizes each axis independently."""

    positions: tuple[Point2D, ...]
    spacing_x: float
    spacing_y: float


@dataclass(frozen=True)
class StepRecord:
    step: int
    true_position: Point2D
    raw: Point2D | None
    averaged: Point2D | None
    kalman: Point2D | None
    channel: int
    anchor_rssi: dict[NodeId, Dbm]
    resolved: bool


@dataclass(frozen=True)
class RunResult:
    steps: tuple[StepRecord, ...]


@dataclass(frozen=True)
class Metrics:
    rmse: float
    mean_error: float
    max_error: float
    error_cdf: tuple[float, ...]
    resolved_steps: int
    unresolved_steps: int


# ---------------------------------------------------------------------------
# deployment planning


def plan_square_grid_deployment(
    roi: Rect, radio_range: float, safety: float = 0.9
) -> DeploymentPlan:
    """Square-lattice beacon layout guaranteeing three-coverage of the roi.

    The target spacing is safety * radio_range / sqrt(2): a cell of that
    side has its full diagonal within radio_range, so every point of a
    cell reaches all four corner beacons. The spacing is then snapped
    down per axis so an integer number of cells spans the roi, boundary
    rows and columns included.
    """
    if radio_range <= 0.0:
        raise ValueError(f"radio_range must be > 0, got {radio_range}")
    if not 0.0 < safety <= 1.0:
        raise ValueError(f"safety must be in (0, 1], got {safety}")
    if roi.width <= 0.0 or roi.height <= 0.0:
        raise ValueError("roi must have positive width and height")

    nominal = safety * radio_range / math.sqrt(2.0)
    cells_x = max(1, math.ceil(roi.width / nominal))
    cells_y = max(1, math.ceil(roi.height / nominal))
    if (cells_x + 1) * (cells_y + 1) > _MAX_PLANNED_BEACONS:
        raise CapacityError(
            f"plan would need {(cells_x + 1) * (cells_y + 1)} beacons "
            f"(limit {_MAX_PLANNED_BEACONS})"
        )
    spacing_x = roi.width / cells_x
    spacing_y = roi.height / cells_y
    positions = tuple(
        Point2D(roi.x_min + ix * spacing_x, roi.y_min + iy * spacing_y)
        for iy in range(cells_y + 1)
        for ix in range(cells_x + 1)
    )
    return DeploymentPlan(positions, spacing_x, spacing_y)


def _lattice_1d(lo: float, hi: float, step: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    values = lo + step * np.arange(n)
    if values[-1] < hi - 1e-9:
        values = np.append(values, hi)
    return values


def verify_three_coverage(
    plan: DeploymentPlan, roi: Rect, radio_range: float, grid_step: float = 0.25
) -> tuple[bool, list[Point2D]]:
    """Brute-force check that every roi lattice point (grid_step pitch,
    boundaries included) lies within radio_range of at least three
    beacons. Returns the verdict and any uncovered sample points."""
    if grid_step <= 0.0:
        raise ValueError(f"grid_step must be > 0, got {grid_step}")
    xs = _lattice_1d(roi.x_min, roi.x_max, grid_step)
    ys = _lattice_1d(roi.y_min, roi.y_max, grid_step)
    gx, gy = np.meshgrid(xs, ys)
    px = gx.ravel()
    py = gy.ravel()
    bx = np.array([p.x for p in plan.positions])
    by = np.array([p.y for p in plan.positions])
    counts = kernels.coverage_counts(px, py, bx, by, float(radio_range), 3)
    uncovered_idx = np.flatnonzero(counts < 3)
    uncovered = [Point2D(float(px[i]), float(py[i])) for i in uncovered_idx]
    return len(uncovered) == 0, uncovered


# ---------------------------------------------------------------------------
# pipeline execution


def _top3(ids: np.ndarray, rssi: np.ndarray) -> np.ndarray:
    """Indices of the three strongest readings, RSSI descending, ties to
    the lower node id (same ordering as localization.select_anchors)."""
    order = np.lexsort((ids, -rssi))
    return order[:3]


def run_scenario(s: Scenario) -> RunResult:
    """Execute the full pipeline over the scenario trajectory.

    Steps where fewer than three beacons are heard degrade gracefully:
    they are recorded unresolved with absent estimates and the run
    continues. The Kalman chain initializes on the first averaged fix
    with zero covariance and advances once per resolved step.
    """
    rng = np.random.default_rng(s.seed)

    report = scan_all_channels(s.environment, s.scan, rng)
    monitor = ChannelMonitor(
        select_channel(report), MONITOR_WINDOW, MONITOR_FAILURE_THRESHOLD
    )

    beacon_x = np.array([b.position.x for b in s.beacons])
    beacon_y = np.array([b.position.y for b in s.beacons])
    beacon_ids = np.array([b.id for b in s.beacons])
    w = s.aggregation_window
    sigma = s.shadowing.sigma
    pl = s.path_loss
    ref = pl.rssi_at_ref
    ten_n = 10.0 * pl.exponent

    st = np.ascontiguousarray(s.kalman.state_transition)
    ctrl = np.ascontiguousarray(s.kalman.control)
    q = np.ascontiguousarray(s.kalman.process_noise)
    r = np.ascontiguousarray(s.kalman.measurement_noise)

    kf_pos: np.ndarray | None = None
    kf_cov: np.ndarray | None = None

    records = []
    for step, true_pt in enumerate(s.trajectory):
        # Fig.-3 loop: one packet exchange per step on the active channel,
        # rescan when the failure window trips.
        monitor.record_packet_outcome(
            packet_success(s.environment, monitor.active_channel, rng)
        )
        if monitor.should_rescan():
            report = scan_all_channels(s.environment, s.scan, rng)
            monitor.switch_to(select_channel(report))

        # One window of noisy readings per beacon. The (k, w) draw fills
        # row-major, consuming the stream exactly like per-beacon windows.
        dist = np.hypot(beacon_x - true_pt.x, beacon_y - true_pt.y)
        if np.any(dist <= 0.0):
            raise ValueError(f"trajectory point at step {step} coincides with a beacon")
        true_rssi = ref - ten_n * np.log10(dist / pl.ref_distance)
        readings = true_rssi[:, None] + rng.normal(0.0, sigma, size=(len(s.beacons), w))
        readings = np.where(readings < s.radio.sensitivity, np.nan, readings)

        present = ~np.isnan(readings)
        n_present = present.sum(axis=1)
        reachable = n_present > 0
        agg = np.where(reachable, np.nansum(readings, axis=1) / np.maximum(n_present, 1), np.nan)

        anchor_rssi = {
            int(beacon_ids[i]): float(agg[i]) for i in np.flatnonzero(reachable)
        }

        raw_pt = _estimate(
            beacon_x, beacon_y, beacon_ids, readings[:, 0], ~np.isnan(readings[:, 0]), pl
        )
        averaged = _estimate_with_anchors(beacon_x, beacon_y, beacon_ids, agg, reachable, pl)

        kf_pt: Point2D | None = None
        if averaged is not None:
            avg_pt, sel_idx, sel_ranges = averaged
            if kf_pos is None:
                # First fix seeds the filter: zero initial covariance, the
                # next prediction injects Q.
                kf_pos = np.array([avg_pt.x, avg_pt.y])
                kf_cov = np.zeros((2, 2))
                kf_pt = avg_pt
            else:
                ok, kf_pos_new, kf_cov_new = kernels.ekf_step(
                    kf_pos, kf_cov,
                    beacon_x[sel_idx], beacon_y[sel_idx], sel_ranges,
                    st, ctrl, q, r,
                )
                if ok == 0:
                    kf_pos, kf_cov = kf_pos_new, kf_cov_new
                    kf_pt = Point2D(float(kf_pos[0]), float(kf_pos[1]))
                # prediction landing on an anchor: keep the previous state,
                # leave this step's filtered estimate absent
            avg_point = avg_pt
        else:
            avg_point = None

        records.append(
            StepRecord(
                step=step,
                true_position=true_pt,
                raw=raw_pt,
                averaged=avg_point,
                kalman=kf_pt,
                channel=monitor.active_channel.index,
                anchor_rssi=anchor_rssi,
                resolved=avg_point is not None,
            )
        )
    return RunResult(tuple(records))


def _estimate(beacon_x, beacon_y, beacon_ids, rssi, usable, pl) -> Point2D | None:
    result = _estimate_with_anchors(beacon_x, beacon_y, beacon_ids, rssi, usable, pl)
    return None if result is None else result[0]


def _estimate_with_anchors(
    beacon_x, beacon_y, beacon_ids, rssi, usable, pl: PathLossParams
):
    """Top-3 selection, path-loss inversion, lateration. Returns
    (point, selected indices, ranges) or None when unresolvable."""
    idx = np.flatnonzero(usable)
    if idx.size < 3:
        return None
    sel = idx[_top3(beacon_ids[idx], rssi[idx])]
    ranges = pl.ref_distance * 10.0 ** ((pl.rssi_at_ref - rssi[sel]) / (10.0 * pl.exponent))
    status, x, y = kernels.lateration_solve(beacon_x[sel], beacon_y[sel], ranges)
    if status != 0:
        return None
    return Point2D(x, y), sel, ranges


# ---------------------------------------------------------------------------
# metrics


def compute_metrics(result: RunResult, flavor: str) -> Metrics:
    """Error statistics for one estimate flavor ('raw', 'averaged' or
    'kalman'); steps without that estimate are excluded and counted."""
    if flavor not in ("raw", "averaged", "kalman"):
        raise ValueError(f"unknown estimate flavor {flavor!r}")
    errors = []
    missing = 0
    for rec in result.steps:
        est: Point2D | None = getattr(rec, flavor)
        if est is None:
            missing += 1
            continue
        errors.append(math.hypot(est.x - rec.true_position.x, est.y - rec.true_position.y))
    if not errors:
        raise NoResolvedStepsError(f"no step carries a {flavor} estimate")
    arr = np.array(errors)
    return Metrics(
        rmse=float(np.sqrt(np.mean(arr * arr))),
        mean_error=float(arr.mean()),
        max_error=float(arr.max()),
        error_cdf=tuple(float(e) for e in np.sort(arr)),
        resolved_steps=len(errors),
        unresolved_steps=missing,
    )


def compare_pipelines(s: Scenario) -> tuple[Metrics, Metrics, Metrics]:
    """Metrics for raw, averaged, and averaged+Kalman estimates from one
    shared run (paired noise draws)."""
    result = run_scenario(s)
    return (
        compute_metrics(result, "raw"),
        compute_metrics(result, "averaged"),
        compute_metrics(result, "kalman"),
    )
