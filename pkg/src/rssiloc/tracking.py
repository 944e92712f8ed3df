"""Planar Kalman tracker driven by anchor-range measurements.

Prediction propagates position through the state-transition matrix and
inflates covariance with the process noise. Correction linearizes the
anchor-range map at the predicted position (extended-filter style): the
observation matrix is the Jacobian whose rows are unit vectors from
each anchor to the prediction, the gain is E H^T (H E H^T + R)^-1, and
the innovation is measured ranges minus ranges predicted from the
state. The covariance update (I - K H) E is symmetrized afterwards to
guard against drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularGeometryError
from .geometry import AnchorNode

__all__ = [
    "KalmanConfig",
    "KalmanState",
    "RangeMeasurement",
    "predict",
    "observation_jacobian",
    "gain",
    "update",
    "filter_step",
]

_ANCHOR_EPS = 1e-9


def _frozen_array(value, shape) -> np.ndarray:
    arr = np.array(value, dtype=float).reshape(shape)
    arr.flags.writeable = False
    return arr


def _check_symmetric(m: np.ndarray, name: str) -> None:
    if not np.allclose(m, m.T, atol=1e-12):
        raise ValueError(f"{name} must be symmetric")


@dataclass(frozen=True)
class KalmanConfig:
    """Filter matrices: transition, control offset, process noise Q and
    measurement noise R. Defaults model a quasi-static target with
    0.01 m^2 process noise and 1 m range-measurement noise."""

    state_transition: np.ndarray = field(default_factory=lambda: np.eye(2))
    control: np.ndarray = field(default_factory=lambda: np.zeros(2))
    process_noise: np.ndarray = field(default_factory=lambda: 0.01 * np.eye(2))
    measurement_noise: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        object.__setattr__(self, "state_transition", _frozen_array(self.state_transition, (2, 2)))
        object.__setattr__(self, "control", _frozen_array(self.control, (2,)))
        object.__setattr__(self, "process_noise", _frozen_array(self.process_noise, (2, 2)))
        r = np.array(self.measurement_noise, dtype=float)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise ValueError(f"measurement_noise must be square, got shape {r.shape}")
        r.flags.writeable = False
        object.__setattr__(self, "measurement_noise", r)
        _check_symmetric(self.process_noise, "process_noise")
        _check_symmetric(self.measurement_noise, "measurement_noise")
        if np.linalg.eigvalsh(self.process_noise).min() < -1e-9:
            raise ValueError("process_noise must be positive semidefinite")
        if np.linalg.eigvalsh(self.measurement_noise).min() <= 0.0:
            raise ValueError("measurement_noise must be positive definite")


@dataclass(frozen=True)
class KalmanState:
    """Position estimate with its error covariance."""

    position: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _frozen_array(self.position, (2,)))
        object.__setattr__(self, "covariance", _frozen_array(self.covariance, (2, 2)))
        _check_symmetric(self.covariance, "covariance")
        if np.linalg.eigvalsh(self.covariance).min() < -1e-9:
            raise ValueError("covariance must be (numerically) positive semidefinite")


@dataclass(frozen=True)
class RangeMeasurement:
    """Measured distances to three anchors, from inverted aggregated RSSI."""

    anchors: tuple[AnchorNode, AnchorNode, AnchorNode]
    ranges: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))
        object.__setattr__(self, "ranges", _frozen_array(self.ranges, (len(self.anchors),)))
        if len(self.anchors) != 3:
            raise ValueError(f"measurement takes exactly 3 anchors, got {len(self.anchors)}")
        if np.any(self.ranges <= 0.0):
            raise ValueError("ranges must be > 0")

    def anchor_xy(self) -> np.ndarray:
        return np.array([[a.position.x, a.position.y] for a in self.anchors])


def predict(state: KalmanState, cfg: KalmanConfig) -> KalmanState:
    """Prediction phase: propagate position, inflate covariance with Q."""
    position = cfg.state_transition @ state.position + cfg.control
    covariance = cfg.state_transition @ state.covariance @ cfg.state_transition.T + cfg.process_noise
    return KalmanState(position, covariance)


def observation_jacobian(predicted: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Jacobian of the anchor-range map at `predicted`.

    Row i is the unit vector from anchor i toward the predicted
    position; undefined (raises) when the prediction sits on an anchor.
    """
    predicted = np.asarray(predicted, dtype=float)
    anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
    diff = predicted[None, :] - anchors
    ranges = np.linalg.norm(diff, axis=1)
    if np.any(ranges < _ANCHOR_EPS):
        raise SingularGeometryError("predicted position coincides with an anchor")
    return diff / ranges[:, None]


def gain(covariance: np.ndarray, h: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Kalman gain E H^T (H E H^T + R)^-1."""
    covariance = np.asarray(covariance, dtype=float)
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    return covariance @ h.T @ np.linalg.inv(h @ covariance @ h.T + r)


def update(predicted: KalmanState, meas: RangeMeasurement, cfg: KalmanConfig) -> KalmanState:
    """Correction phase against measured anchor ranges.

    The innovation is the measured range triple minus the ranges the
    predicted state implies, so a measurement that matches the
    prediction leaves the position exactly unchanged.
    """
    anchors = meas.anchor_xy()
    h = observation_jacobian(predicted.position, anchors)
    predicted_ranges = np.linalg.norm(predicted.position[None, :] - anchors, axis=1)
    k = gain(predicted.covariance, h, cfg.measurement_noise)
    position = predicted.position + k @ (meas.ranges - predicted_ranges)
    covariance = (np.eye(2) - k @ h) @ predicted.covariance
    covariance = 0.5 * (covariance + covariance.T)
    return KalmanState(position, covariance)


def filter_step(state: KalmanState, meas: RangeMeasurement, cfg: KalmanConfig) -> KalmanState:
    """One full predict-then-correct cycle."""
    return update(predict(state, cfg), meas, cfg)
