"""Scenario configuration for the depth-camera inertial odometry simulator.

A scenario is a single YAML file; every field below can appear there and a
packaged default is used for anything omitted.  CLI flags override the file.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

import numpy as np
import yaml

from ..filters import FILTER_TYPES, NoiseConfig


@dataclass(frozen=True)
class TrajectoryParams:
    """Analytic helix: circle of given radius/angular rate plus steady climb."""

    radius: float = 5.0
    angular_rate: float = 0.5
    climb_rate: float = 0.2


@dataclass(frozen=True)
class ScenarioConfig:
    duration: float
    imu_rate: float
    cam_rate: float
    seed: int
    filters: tuple[str, ...]
    stochastic: bool
    trajectory: TrajectoryParams
    landmarks: np.ndarray          # (3, 3), one row per landmark
    ext_rot_axis_angle: np.ndarray  # true extrinsic rotation, axis-angle
    ext_pos: np.ndarray             # true extrinsic translation
    offset_rot_axis_angle: np.ndarray  # deliberate initial offset
    offset_pos: np.ndarray
    noise: NoiseConfig
    initial_cov_diag: np.ndarray   # 15 per-axis variances
    gravity: np.ndarray

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("duration must be nonnegative")
        if not (self.imu_rate >= self.cam_rate >= 1.0):
            raise ValueError("rates must satisfy imu_rate >= cam_rate >= 1 Hz")
        ratio = self.imu_rate / self.cam_rate
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("imu_rate must be an integer multiple of cam_rate")
        lm = np.asarray(self.landmarks, dtype=float)
        if lm.shape != (3, 3):
            raise ValueError("exactly 3 landmarks with 3 coordinates are required")
        object.__setattr__(self, "landmarks", lm)
        for name in ("ext_rot_axis_angle", "ext_pos", "offset_rot_axis_angle",
                     "offset_pos", "gravity"):
            vec = np.asarray(getattr(self, name), dtype=float).reshape(3)
            object.__setattr__(self, name, vec)
        cov = np.asarray(self.initial_cov_diag, dtype=float).reshape(15)
        if cov.min() < 0:
            raise ValueError("initial covariance diagonal must be nonnegative")
        object.__setattr__(self, "initial_cov_diag", cov)
        object.__setattr__(self, "filters", tuple(self.filters))
        for name in self.filters:
            if name not in FILTER_TYPES:
                raise ValueError(f"unknown filter {name!r}")
        if len(set(self.filters)) != len(self.filters):
            raise ValueError("duplicate filter names")


def _noise_from_dict(raw: dict) -> NoiseConfig:
    return NoiseConfig(
        gyro_cov=raw.get("gyro_cov", 1e-6),
        accel_cov=raw.get("accel_cov", 1e-5),
        ext_rot_cov=raw.get("ext_rot_cov", 1e-9),
        ext_pos_cov=raw.get("ext_pos_cov", 1e-9),
        meas_cov=raw.get("meas_cov", 1e-2),
    )


def _config_from_dict(raw: dict) -> ScenarioConfig:
    traj = raw.get("trajectory", {})
    init_cov = raw.get("initial_cov", {})
    diag = np.concatenate([
        np.full(3, float(init_cov.get("rot", 1e-6))),
        np.full(3, float(init_cov.get("pos", 1e-6))),
        np.full(3, float(init_cov.get("vel", 1e-6))),
        np.full(3, float(init_cov.get("ext_rot", 0.09))),
        np.full(3, float(init_cov.get("ext_pos", 0.04))),
    ])
    return ScenarioConfig(
        duration=float(raw.get("duration", 60.0)),
        imu_rate=float(raw.get("imu_rate", 200.0)),
        cam_rate=float(raw.get("cam_rate", 10.0)),
        seed=int(raw.get("seed", 7)),
        filters=tuple(raw.get("filters", ["mekf", "iekf", "mfg-iekf"])),
        stochastic=bool(raw.get("stochastic", False)),
        trajectory=TrajectoryParams(
            radius=float(traj.get("radius", 5.0)),
            angular_rate=float(traj.get("angular_rate", 0.5)),
            climb_rate=float(traj.get("climb_rate", 0.2)),
        ),
        landmarks=np.asarray(raw.get("landmarks",
                                     [[12.0, 0.0, 3.0],
                                      [-8.0, 9.0, 6.0],
                                      [-2.0, -11.0, 10.0]]), dtype=float),
        ext_rot_axis_angle=np.asarray(
            raw.get("extrinsics", {}).get("rotation_axis_angle",
                                          [0.10, -0.05, 0.08]), dtype=float),
        ext_pos=np.asarray(
            raw.get("extrinsics", {}).get("position",
                                          [0.08, -0.05, 0.12]), dtype=float),
        offset_rot_axis_angle=np.asarray(
            raw.get("initial_offset", {}).get("rotation_axis_angle",
                                              [0.2, -0.2, 0.1]), dtype=float),
        offset_pos=np.asarray(
            raw.get("initial_offset", {}).get("position",
                                              [0.4 / 3, 0.2 / 3, 0.4 / 3]),
            dtype=float),
        noise=_noise_from_dict(raw.get("noise", {})),
        initial_cov_diag=diag,
        gravity=np.asarray(raw.get("gravity", [0.0, 0.0, -9.81]), dtype=float),
    )


def load_config(path: str | None = None, overrides: dict | None = None
                ) -> ScenarioConfig:
    """Load a scenario YAML (the packaged default when path is None) and
    apply CLI-style overrides (seed, filters, stochastic, duration)."""
    if path is None:
        text = importlib.resources.files("framegroups.dcio") \
            .joinpath("default_scenario.yaml").read_text()
    else:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    raw = yaml.safe_load(text) or {}
    if overrides:
        raw.update({k: v for k, v in overrides.items() if v is not None})
    return _config_from_dict(raw)


def default_config(**overrides) -> ScenarioConfig:
    return load_config(None, overrides)
