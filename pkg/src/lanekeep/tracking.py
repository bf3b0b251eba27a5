"""Linear Kalman filtering plus the two concrete trackers used per frame:

* a per-side lane tracker over [rho, theta, rho_rate, theta_rate]
* a scalar position tracker over [x, x_rate]

Both use a constant-velocity transition and seed their positional state
from the first measurement. After `miss_limit` consecutive missing
measurements a tracker discards its state and waits to re-seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ParameterError

POSITION_RANGE = (0.0, 320.0)
DEFAULT_MISS_LIMIT = 8
DEFAULT_INIT_VAR = 100.0


@dataclass
class KalmanState:
    x: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64).reshape(-1)
        self.P = np.asarray(self.P, dtype=np.float64)
        n = self.x.shape[0]
        if self.P.shape != (n, n):
            raise ParameterError(f"P must be {n}x{n}, got {self.P.shape}")

    def check(self, tol: float = 1e-9) -> None:
        if not np.allclose(self.P, self.P.T, atol=tol, rtol=0.0):
            raise NumericalError("covariance lost symmetry")
        if np.any(np.diag(self.P) < -tol):
            raise NumericalError("covariance has a negative diagonal entry")


@dataclass(frozen=True)
class KalmanModel:
    F: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        for name in "FHQR":
            object.__setattr__(
                self, name, np.asarray(getattr(self, name), dtype=np.float64)
            )
        n = self.F.shape[0]
        m = self.H.shape[0]
        if self.F.shape != (n, n) or self.H.shape != (m, n):
            raise ParameterError("F must be n x n and H m x n")
        if self.Q.shape != (n, n) or self.R.shape != (m, m):
            raise ParameterError("Q must be n x n and R m x m")


def _sym(P: np.ndarray) -> np.ndarray:
    return (P + P.T) * 0.5


def kf_predict(state: KalmanState, model: KalmanModel) -> KalmanState:
    """x <- F x, P <- F P F' + Q."""
    if model.F.shape[0] != state.x.shape[0]:
        raise ParameterError("state and model dimensions disagree")
    x = model.F @ state.x
    P = _sym(model.F @ state.P @ model.F.T + model.Q)
    return KalmanState(x=x, P=P)


def kf_update(state: KalmanState, model: KalmanModel, z) -> KalmanState:
    """Measurement update with gain from a linear solve of the innovation."""
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if model.H.shape != (z.shape[0], state.x.shape[0]):
        raise ParameterError("measurement and model dimensions disagree")
    PHt = state.P @ model.H.T
    S = model.H @ PHt + model.R
    try:
        K = np.linalg.solve(S.T, PHt.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"innovation covariance is singular: {exc}") from exc
    if not np.all(np.isfinite(K)):
        raise NumericalError("innovation solve produced non-finite gain")
    x = state.x + K @ (z - model.H @ state.x)
    P = _sym((np.eye(state.x.shape[0]) - K @ model.H) @ state.P)
    return KalmanState(x=x, P=P)


def constant_velocity_model(n_components: int, q, r) -> KalmanModel:
    """[value..., rate...] layout; each value advances by its rate per frame."""
    n = 2 * n_components
    F = np.eye(n)
    F[:n_components, n_components:] = np.eye(n_components)
    H = np.zeros((n_components, n))
    H[:, :n_components] = np.eye(n_components)
    return KalmanModel(F=F, H=H, Q=np.diag(q), R=np.diag(np.atleast_1d(r)))


def lane_tracker_model(
    q=(0.1, 0.01, 0.1, 0.01), r=(4.0, 1.0)
) -> KalmanModel:
    return constant_velocity_model(2, q, r)


def position_tracker_model(q=(1.0, 0.1), r=9.0) -> KalmanModel:
    return constant_velocity_model(1, q, r)


class _ConstantVelocityTrack:
    """Shared predict/seed/miss bookkeeping for both trackers."""

    def __init__(self, model: KalmanModel, init_var=DEFAULT_INIT_VAR,
                 miss_limit=DEFAULT_MISS_LIMIT):
        self.model = model
        self.init_var = float(init_var)
        self.miss_limit = int(miss_limit)
        self._n = model.F.shape[0]
        self._m = model.H.shape[0]
        self.seeded = False
        self.frames_since_measurement = 0
        self.state = self._prior()

    def _prior(self) -> KalmanState:
        return KalmanState(
            x=np.zeros(self._n), P=self.init_var * np.eye(self._n)
        )

    @property
    def live(self) -> bool:
        return self.seeded and self.frames_since_measurement < self.miss_limit

    def _step(self, z) -> np.ndarray:
        """Predict, then seed or update; returns the measured-subspace estimate."""
        if z is not None and not self.seeded:
            x = np.zeros(self._n)
            x[: self._m] = z
            self.state = KalmanState(x=x, P=self.init_var * np.eye(self._n))
            self.seeded = True
            self.frames_since_measurement = 0
            return self.state.x[: self._m].copy()
        self.state = kf_predict(self.state, self.model)
        if z is None:
            self.frames_since_measurement += 1
            est = self.state.x[: self._m].copy()
            if self.frames_since_measurement >= self.miss_limit:
                self.seeded = False
                self.state = self._prior()
            return est
        self.state = kf_update(self.state, self.model, z)
        self.frames_since_measurement = 0
        return self.state.x[: self._m].copy()


class LaneTrack(_ConstantVelocityTrack):
    """Tracks one lane's (rho, theta) across frames."""

    def __init__(self, model: KalmanModel | None = None, **kw):
        super().__init__(model or lane_tracker_model(), **kw)

    def step(self, measurement: tuple[float, float] | None) -> tuple[float, float]:
        """Advance one frame; measurement is (rho, theta) or None on a miss."""
        z = None if measurement is None else np.asarray(measurement, dtype=np.float64)
        est = self._step(z)
        return float(est[0]), float(est[1])


class PositionTrack(_ConstantVelocityTrack):
    """Tracks the vehicle's x position (pixels) across frames."""

    def __init__(self, model: KalmanModel | None = None, **kw):
        super().__init__(model or position_tracker_model(), **kw)

    def step(self, measurement: float | None) -> float:
        """Advance one frame; the returned estimate is clamped to [0, 320]."""
        if measurement is not None:
            lo, hi = POSITION_RANGE
            if not (lo <= measurement <= hi):
                raise ParameterError(f"position {measurement} outside [{lo}, {hi}]")
        z = None if measurement is None else np.asarray([measurement], dtype=np.float64)
        est = float(self._step(z)[0])
        return min(max(est, POSITION_RANGE[0]), POSITION_RANGE[1])
