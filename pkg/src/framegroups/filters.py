"""Extended Kalman filters for depth-camera inertial odometry.

State: IMU attitude/position/velocity (R, p, v) plus camera-to-IMU
extrinsics (R_c, p_c), driven by

    dR = R hat(omega),  dp = v,  dv = R a + g,  dR_c = 0,  dp_c = 0

(noise enters only the covariance propagation) and measured through three
landmark positions in the camera frame,

    z_j = R_c^-1 [ R^-1 (p_l,j - p) - p_c ] .

Three filters share this model and differ only in the 15-dimensional error
parameterization (order: dtheta, dp, dv, dtheta_c, dp_c):

* MfgIekf      - the multi-frame-group retraction: world-frame invariant
                 error on the IMU block and a relative, core-conjugated
                 error on the extrinsic block.  Its aligned measurement
                 Jacobian is constant in the state.
* ImperfectIekf- product-group SE2(3) x SE(3) exponential retraction; the
                 extrinsic part of the measurement Jacobian stays
                 state dependent.
* Mekf         - componentwise multiplicative/additive errors.

Mean propagation is the exact zero-order-hold flow and is identical across
filters; the covariance uses each filter's own exact discrete transition
(gated against finite differences in the tests) with Joseph-form updates.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import RankError
from .multiframe import MfgElement
from .rotations import gamma, hat, so_log
from .twoframe import TfgElement

GRAVITY = np.array([0.0, 0.0, -9.81])


def _psd3(mat) -> np.ndarray:
    out = np.asarray(mat, dtype=float)
    if out.shape == ():
        out = float(out) * np.eye(3)
    if out.shape != (3, 3):
        raise ValueError(f"expected a scalar or 3x3 matrix, got {out.shape}")
    if np.linalg.norm(out - out.T) > 1e-12 or np.linalg.eigvalsh(out).min() < -1e-12:
        raise ValueError("noise covariance must be symmetric PSD")
    return out


@dataclass(frozen=True)
class NoiseConfig:
    """Process/measurement covariances; scalars mean isotropic 3x3 blocks."""

    gyro_cov: np.ndarray
    accel_cov: np.ndarray
    ext_rot_cov: np.ndarray
    ext_pos_cov: np.ndarray
    meas_cov: np.ndarray

    def __post_init__(self):
        for name in ("gyro_cov", "accel_cov", "ext_rot_cov", "ext_pos_cov",
                     "meas_cov"):
            object.__setattr__(self, name, _psd3(getattr(self, name)))

    def process_diag(self) -> np.ndarray:
        out = np.zeros((12, 12))
        out[0:3, 0:3] = self.gyro_cov
        out[3:6, 3:6] = self.accel_cov
        out[6:9, 6:9] = self.ext_rot_cov
        out[9:12, 9:12] = self.ext_pos_cov
        return out


@dataclass(frozen=True)
class DcioState:
    """IMU pose/velocity plus camera extrinsics."""

    rot: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    ext_rot: np.ndarray
    ext_pos: np.ndarray

    def __post_init__(self):
        for name in ("rot", "pos", "vel", "ext_rot", "ext_pos"):
            object.__setattr__(self, name, np.asarray(getattr(self, name),
                                                      dtype=float))

    def to_mfg(self) -> MfgElement:
        """The state as an element of MFG(3, 2, 0, 0, 1)."""
        core = TfgElement(self.rot, np.column_stack([self.pos, self.vel]),
                          np.zeros((3, 0)))
        chain = TfgElement(self.ext_rot,
                           np.column_stack([self.ext_pos, np.zeros(3)]),
                           np.zeros((3, 0)))
        return MfgElement(core, (), (chain,))

    @staticmethod
    def from_mfg(chi: MfgElement) -> "DcioState":
        core = chi.core
        chain = chi.right[0]
        return DcioState(core.rot, core.world[:, 0], core.world[:, 1],
                         chain.rot, chain.world[:, 0])


@dataclass
class FilterState:
    """Mean and 15x15 error covariance."""

    mean: DcioState
    cov: np.ndarray

    def __post_init__(self):
        self.cov = np.asarray(self.cov, dtype=float)
        if self.cov.shape != (15, 15):
            raise ValueError(f"covariance must be 15x15, got {self.cov.shape}")

    def validate(self, tol: float = 1e-9) -> None:
        if np.linalg.norm(self.cov - self.cov.T) > tol:
            raise ValueError("covariance is not symmetric")
        if np.linalg.eigvalsh(self.cov).min() < -tol:
            raise ValueError("covariance is not PSD")


def propagate_mean(state: DcioState, omega: np.ndarray, acc: np.ndarray,
                   dt: float, gravity: np.ndarray = GRAVITY) -> DcioState:
    """Exact zero-order-hold flow of the noise-free process model."""
    phi = np.asarray(omega, dtype=float) * dt
    g0 = gamma(0, phi, 3)
    g1 = gamma(1, phi, 3)
    g2 = gamma(2, phi, 3)
    acc = np.asarray(acc, dtype=float)
    rot_new = state.rot @ g0
    vel_new = state.vel + gravity * dt + state.rot @ g1 @ acc * dt
    pos_new = state.pos + state.vel * dt + 0.5 * gravity * dt ** 2 \
        + state.rot @ g2 @ acc * dt ** 2
    return DcioState(rot_new, pos_new, vel_new, state.ext_rot, state.ext_pos)


def landmark_measurement(state: DcioState, landmark: np.ndarray) -> np.ndarray:
    """Camera-frame position of a landmark with known world position."""
    landmark = np.asarray(landmark, dtype=float)
    return state.ext_rot.T @ (state.rot.T @ (landmark - state.pos)
                              - state.ext_pos)


def _project_psd(cov: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    cov = 0.5 * (cov + cov.T)
    eigvals = np.linalg.eigvalsh(cov)
    if eigvals.min() < -tol:
        warnings.warn("covariance lost positive semidefiniteness; projecting",
                      RuntimeWarning)
        vals, vecs = np.linalg.eigh(cov)
        cov = vecs @ np.diag(np.clip(vals, 0.0, None)) @ vecs.T
        cov = 0.5 * (cov + cov.T)
    return cov


class DcioFilter:
    """Shared predict/update machinery; subclasses define the error chart."""

    name = "base"

    def __init__(self, state: FilterState, noise: NoiseConfig,
                 gravity: np.ndarray = GRAVITY):
        self.state = state
        self.noise = noise
        self.gravity = np.asarray(gravity, dtype=float)

    # -- error chart interface -------------------------------------------
    def retract(self, mean: DcioState, delta: np.ndarray) -> DcioState:
        raise NotImplementedError

    def error_coords(self, mean: DcioState, true: DcioState) -> np.ndarray:
        """Inverse of retract: coordinates with true = retract(mean, coords)."""
        raise NotImplementedError

    def transition(self, mean: DcioState, omega, acc, dt: float) -> np.ndarray:
        raise NotImplementedError

    def noise_jacobian(self, mean: DcioState) -> np.ndarray:
        raise NotImplementedError

    def measurement_jacobian(self, mean: DcioState, landmark: np.ndarray
                             ) -> tuple[np.ndarray, np.ndarray]:
        """Returns (H, C): aligned Jacobian and the innovation alignment
        rotation, so that C (z - z_hat) ~ H delta + C n."""
        raise NotImplementedError

    # -- shared filter steps ---------------------------------------------
    def predict(self, imu: tuple[np.ndarray, np.ndarray], dt: float
                ) -> FilterState:
        if dt <= 0:
            raise ValueError("dt must be positive")
        omega, acc = imu
        mean = self.state.mean
        phi = self.transition(mean, omega, acc, dt)
        g_mat = self.noise_jacobian(mean)
        cov = phi @ self.state.cov @ phi.T \
            + g_mat @ self.noise.process_diag() @ g_mat.T * dt
        self.state = FilterState(propagate_mean(mean, omega, acc, dt,
                                                self.gravity),
                                 _project_psd(cov))
        return self.state

    def update(self, landmarks, measurements) -> tuple[FilterState, float]:
        """Stacked landmark update; returns the new state and the raw
        innovation norm."""
        landmarks = [np.asarray(l, dtype=float) for l in landmarks]
        measurements = [np.asarray(z, dtype=float) for z in measurements]
        if not landmarks:
            raise ValueError("at least one landmark is required")
        if len(landmarks) != len(measurements):
            raise ValueError("measurement count must match landmark count")
        mean = self.state.mean
        cov = self.state.cov

        rows = 3 * len(landmarks)
        innov = np.empty(rows)
        raw_norm_sq = 0.0
        h_mat = np.empty((rows, 15))
        noise_mat = np.zeros((rows, rows))
        for j, (lm, z) in enumerate(zip(landmarks, measurements)):
            block = slice(3 * j, 3 * j + 3)
            h_j, align = self.measurement_jacobian(mean, lm)
            resid = z - landmark_measurement(mean, lm)
            raw_norm_sq += float(resid @ resid)
            innov[block] = align @ resid
            h_mat[block] = h_j
            noise_mat[block, block] = align @ self.noise.meas_cov @ align.T

        s_mat = h_mat @ cov @ h_mat.T + noise_mat
        if np.linalg.cond(s_mat) > 1e12:
            raise RankError("innovation covariance is singular")
        gain = np.linalg.solve(s_mat.T, (cov @ h_mat.T).T).T
        delta = gain @ innov
        joseph = np.eye(15) - gain @ h_mat
        cov_new = joseph @ cov @ joseph.T + gain @ noise_mat @ gain.T
        self.state = FilterState(self.retract(mean, delta),
                                 _project_psd(cov_new))
        return self.state, float(np.sqrt(raw_norm_sq))


def _coords(delta: np.ndarray):
    delta = np.asarray(delta, dtype=float).reshape(15)
    return delta[0:3], delta[3:6], delta[6:9], delta[9:12], delta[12:15]


class MfgIekf(DcioFilter):
    """Invariant EKF on the multi-frame group MFG(3, 2, 0, 0, 1).

    Retraction (exact group recovery in the right-invariant convention;
    the extrinsic correction is the core-conjugated relative error):

        R   = Gamma0(dtheta) R_hat
        p   = Gamma0(dtheta) p_hat + Gamma1(dtheta) dp      (v alike)
        R_c = Gamma0(R_hat^-1 dtheta_c) R_c_hat
        p_c = Gamma0(R_hat^-1 dtheta_c) p_c_hat
              + R_hat^-1 [ (Gamma0(dtheta_c) - I) p_hat
                           + Gamma1(dtheta_c) dp_c ]
    """

    name = "mfg-iekf"

    def retract(self, mean: DcioState, delta: np.ndarray) -> DcioState:
        dth, dp, dv, dthc, dpc = _coords(delta)
        g0 = gamma(0, dth, 3)
        g1 = gamma(1, dth, 3)
        rot = g0 @ mean.rot
        pos = g0 @ mean.pos + g1 @ dp
        vel = g0 @ mean.vel + g1 @ dv
        g0c = gamma(0, dthc, 3)
        g1c = gamma(1, dthc, 3)
        conj = mean.rot.T @ g0c @ mean.rot
        ext_rot = conj @ mean.ext_rot
        ext_pos = conj @ mean.ext_pos \
            + mean.rot.T @ ((g0c - np.eye(3)) @ mean.pos + g1c @ dpc)
        return DcioState(rot, pos, vel, ext_rot, ext_pos)

    def error_coords(self, mean: DcioState, true: DcioState) -> np.ndarray:
        dth = so_log(true.rot @ mean.rot.T)
        g0 = gamma(0, dth, 3)
        g1 = gamma(1, dth, 3)
        dp = np.linalg.solve(g1, true.pos - g0 @ mean.pos)
        dv = np.linalg.solve(g1, true.vel - g0 @ mean.vel)
        g0c = mean.rot @ true.ext_rot @ mean.ext_rot.T @ mean.rot.T
        dthc = so_log(g0c)
        g1c = gamma(1, dthc, 3)
        dpc = np.linalg.solve(
            g1c, mean.rot @ true.ext_pos - g0c @ mean.rot @ mean.ext_pos
            - (g0c - np.eye(3)) @ mean.pos)
        return np.concatenate([dth, dp, dv, dthc, dpc])

    def transition(self, mean: DcioState, omega, acc, dt: float) -> np.ndarray:
        phi = np.eye(15)
        g_hat = hat(self.gravity, 3)
        phi[3:6, 0:3] = 0.5 * dt ** 2 * g_hat
        phi[3:6, 6:9] = dt * np.eye(3)
        phi[6:9, 0:3] = dt * g_hat
        # extrinsic block: exact adjoint of the core increment
        prop = propagate_mean(mean, omega, acc, dt, self.gravity)
        rot_m = prop.rot @ mean.rot.T
        trans_m = prop.pos - rot_m @ mean.pos
        phi[9:12, 9:12] = rot_m
        phi[12:15, 9:12] = hat(trans_m, 3) @ rot_m
        phi[12:15, 12:15] = rot_m
        return phi

    def noise_jacobian(self, mean: DcioState) -> np.ndarray:
        g_mat = np.zeros((15, 12))
        rot = mean.rot
        rot_cam = mean.rot @ mean.ext_rot
        g_mat[0:3, 0:3] = rot
        g_mat[3:6, 0:3] = hat(mean.pos, 3) @ rot
        g_mat[6:9, 0:3] = hat(mean.vel, 3) @ rot
        g_mat[6:9, 3:6] = rot
        g_mat[9:12, 6:9] = rot_cam
        g_mat[12:15, 6:9] = hat(mean.pos + rot @ mean.ext_pos, 3) @ rot_cam
        g_mat[12:15, 9:12] = rot
        return g_mat

    def measurement_jacobian(self, mean: DcioState, landmark: np.ndarray
                             ) -> tuple[np.ndarray, np.ndarray]:
        lm_hat = hat(landmark, 3)
        h_j = np.hstack([lm_hat, -np.eye(3), np.zeros((3, 3)),
                         lm_hat, -np.eye(3)])
        return h_j, mean.rot @ mean.ext_rot


class ImperfectIekf(DcioFilter):
    """IEKF on the product group SE2(3) x SE(3) (no core/extrinsic coupling)."""

    name = "iekf"

    def retract(self, mean: DcioState, delta: np.ndarray) -> DcioState:
        dth, dp, dv, dthc, dpc = _coords(delta)
        g0 = gamma(0, dth, 3)
        g1 = gamma(1, dth, 3)
        rot = g0 @ mean.rot
        pos = g0 @ mean.pos + g1 @ dp
        vel = g0 @ mean.vel + g1 @ dv
        g0c = gamma(0, dthc, 3)
        g1c = gamma(1, dthc, 3)
        ext_rot = g0c @ mean.ext_rot
        ext_pos = g0c @ mean.ext_pos + g1c @ dpc
        return DcioState(rot, pos, vel, ext_rot, ext_pos)

    def error_coords(self, mean: DcioState, true: DcioState) -> np.ndarray:
        dth = so_log(true.rot @ mean.rot.T)
        g0 = gamma(0, dth, 3)
        g1 = gamma(1, dth, 3)
        dp = np.linalg.solve(g1, true.pos - g0 @ mean.pos)
        dv = np.linalg.solve(g1, true.vel - g0 @ mean.vel)
        dthc = so_log(true.ext_rot @ mean.ext_rot.T)
        g0c = gamma(0, dthc, 3)
        g1c = gamma(1, dthc, 3)
        dpc = np.linalg.solve(g1c, true.ext_pos - g0c @ mean.ext_pos)
        return np.concatenate([dth, dp, dv, dthc, dpc])

    def transition(self, mean: DcioState, omega, acc, dt: float) -> np.ndarray:
        phi = np.eye(15)
        g_hat = hat(self.gravity, 3)
        phi[3:6, 0:3] = 0.5 * dt ** 2 * g_hat
        phi[3:6, 6:9] = dt * np.eye(3)
        phi[6:9, 0:3] = dt * g_hat
        return phi

    def noise_jacobian(self, mean: DcioState) -> np.ndarray:
        g_mat = np.zeros((15, 12))
        rot = mean.rot
        g_mat[0:3, 0:3] = rot
        g_mat[3:6, 0:3] = hat(mean.pos, 3) @ rot
        g_mat[6:9, 0:3] = hat(mean.vel, 3) @ rot
        g_mat[6:9, 3:6] = rot
        g_mat[9:12, 6:9] = mean.ext_rot
        g_mat[12:15, 6:9] = hat(mean.ext_pos, 3) @ mean.ext_rot
        g_mat[12:15, 9:12] = np.eye(3)
        return g_mat

    def measurement_jacobian(self, mean: DcioState, landmark: np.ndarray
                             ) -> tuple[np.ndarray, np.ndarray]:
        h_j = np.hstack([hat(landmark, 3), -np.eye(3), np.zeros((3, 3)),
                         hat(landmark - mean.pos, 3) @ mean.rot, -mean.rot])
        return h_j, mean.rot @ mean.ext_rot


class Mekf(DcioFilter):
    """Multiplicative EKF on SO(3) x R^6 x SO(3) x R^3 (body-frame attitude
    errors, additive vector errors)."""

    name = "mekf"

    def retract(self, mean: DcioState, delta: np.ndarray) -> DcioState:
        dth, dp, dv, dthc, dpc = _coords(delta)
        return DcioState(mean.rot @ gamma(0, dth, 3),
                         mean.pos + dp, mean.vel + dv,
                         mean.ext_rot @ gamma(0, dthc, 3),
                         mean.ext_pos + dpc)

    def error_coords(self, mean: DcioState, true: DcioState) -> np.ndarray:
        return np.concatenate([
            so_log(mean.rot.T @ true.rot),
            true.pos - mean.pos,
            true.vel - mean.vel,
            so_log(mean.ext_rot.T @ true.ext_rot),
            true.ext_pos - mean.ext_pos,
        ])

    def transition(self, mean: DcioState, omega, acc, dt: float) -> np.ndarray:
        phi_vec = np.asarray(omega, dtype=float) * dt
        acc = np.asarray(acc, dtype=float)
        g0 = gamma(0, phi_vec, 3)
        g1 = gamma(1, phi_vec, 3)
        g2 = gamma(2, phi_vec, 3)
        phi = np.eye(15)
        phi[0:3, 0:3] = g0.T
        phi[3:6, 0:3] = -dt ** 2 * mean.rot @ hat(g2 @ acc, 3)
        phi[3:6, 6:9] = dt * np.eye(3)
        phi[6:9, 0:3] = -dt * mean.rot @ hat(g1 @ acc, 3)
        return phi

    def noise_jacobian(self, mean: DcioState) -> np.ndarray:
        g_mat = np.zeros((15, 12))
        g_mat[0:3, 0:3] = np.eye(3)
        g_mat[6:9, 3:6] = mean.rot
        g_mat[9:12, 6:9] = np.eye(3)
        g_mat[12:15, 9:12] = np.eye(3)
        return g_mat

    def measurement_jacobian(self, mean: DcioState, landmark: np.ndarray
                             ) -> tuple[np.ndarray, np.ndarray]:
        body = mean.rot.T @ (landmark - mean.pos)
        z_hat = landmark_measurement(mean, landmark)
        h_j = np.hstack([mean.ext_rot.T @ hat(body, 3),
                         -mean.ext_rot.T @ mean.rot.T,
                         np.zeros((3, 3)),
                         hat(z_hat, 3),
                         -mean.ext_rot.T])
        return h_j, np.eye(3)


FILTER_TYPES: dict[str, type[DcioFilter]] = {
    MfgIekf.name: MfgIekf,
    ImperfectIekf.name: ImperfectIekf,
    Mekf.name: Mekf,
}


def build_filters(initial: DcioState, offset_rot: np.ndarray,
                  offset_pos: np.ndarray, noise: NoiseConfig,
                  initial_cov: np.ndarray,
                  names=("mekf", "iekf", "mfg-iekf"),
                  gravity: np.ndarray = GRAVITY) -> dict[str, DcioFilter]:
    """Instantiate the requested filters with a shared offset initial state
    and identical covariance numbers.

    The deliberate extrinsic offset is applied as
    R_c <- R_c exp(hat(offset_rot)), p_c <- p_c + offset_pos.
    """
    offset_rot = np.asarray(offset_rot, dtype=float)
    offset_pos = np.asarray(offset_pos, dtype=float)
    start = DcioState(initial.rot, initial.pos, initial.vel,
                      initial.ext_rot @ gamma(0, offset_rot, 3),
                      initial.ext_pos + offset_pos)
    initial_cov = np.asarray(initial_cov, dtype=float)
    out = {}
    for name in names:
        if name not in FILTER_TYPES:
            raise ValueError(f"unknown filter {name!r}; "
                             f"choose from {sorted(FILTER_TYPES)}")
        out[name] = FILTER_TYPES[name](
            FilterState(start, initial_cov.copy()), noise, gravity)
    return out
