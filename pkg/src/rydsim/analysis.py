"""Damped Rabi-oscillation fits and collective frequency-ratio extraction.

The model is A - B * exp(-t/tau) * cos(2*pi*omega*t), fitted by weighted
nonlinear least squares. omega is the ordinary frequency of the probability
oscillation in MHz (the quantity quoted as Rabi-frequency / 2*pi).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import least_squares

from .errors import ConfigError, FitError
from .measurement import DataSet

TWO_PI = 2.0 * np.pi

MIN_POINTS = 8
MIN_PERIODS = 1.5
MAX_ITERATIONS = 200
STEP_TOL = 1e-10

_ERR_COLUMN = {
    "p_a": "err_a",
    "p_b": "err_b",
    "p_both": "err_both",
    "p_exactly_one": "err_exactly_one",
}


@dataclass(frozen=True)
class FitResult:
    """Fitted damped-cosine parameters with covariance.

    Covariance row order is (a, b, tau_ns, omega_mhz); standard errors are
    the square roots of its diagonal.
    """

    a: float
    b: float
    tau_ns: float
    omega_mhz: float
    covariance: np.ndarray
    residual_norm: float

    def __post_init__(self):
        cov = np.array(self.covariance, dtype=float)
        if cov.shape != (4, 4):
            raise ValueError("covariance must be 4x4")
        cov.flags.writeable = False
        object.__setattr__(self, "covariance", cov)

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def omega_stderr_mhz(self) -> float:
        return float(self.stderr[3])

    def evaluate(self, t_ns) -> np.ndarray:
        t_us = np.asarray(t_ns, dtype=float) * 1e-3
        tau_us = self.tau_ns * 1e-3
        return self.a - self.b * np.exp(-t_us / tau_us) * np.cos(
            TWO_PI * self.omega_mhz * t_us
        )

    def to_report(self) -> dict:
        sa, sb, stau, somega = (float(s) for s in self.stderr)
        return {
            "model": "A - B * exp(-t/tau) * cos(2*pi*omega*t)",
            "a": self.a,
            "b": self.b,
            "tau_ns": self.tau_ns,
            "omega_mhz": self.omega_mhz,
            "stderr": {"a": sa, "b": sb, "tau_ns": stau, "omega_mhz": somega},
            "covariance": self.covariance.tolist(),
            "residual_norm": self.residual_norm,
        }

    def write_report(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_report(), fh, indent=2)
            fh.write("\n")


class FrequencyRatio(NamedTuple):
    ratio: float
    sigma: float


def _model_and_jacobian(theta, t_us):
    a, b, ln_tau, omega = theta
    tau = np.exp(ln_tau)
    decay = np.exp(-t_us / tau)
    phase = TWO_PI * omega * t_us
    cos_p, sin_p = np.cos(phase), np.sin(phase)
    f = a - b * decay * cos_p
    jac = np.empty((t_us.size, 4))
    jac[:, 0] = 1.0
    jac[:, 1] = -decay * cos_p
    jac[:, 2] = -b * decay * cos_p * (t_us / tau)   # d/d ln(tau)
    jac[:, 3] = b * decay * sin_p * TWO_PI * t_us
    return f, jac


def _initial_guess(t_us, y):
    """Spectral-peak frequency guess plus coarse amplitude estimates."""
    a0 = float(np.mean(y))
    b0 = float((np.max(y) - np.min(y)) / 2.0)
    dt = float(np.mean(np.diff(t_us)))
    spectrum = np.abs(np.fft.rfft(y - a0))
    freqs = np.fft.rfftfreq(y.size, dt)
    if spectrum.size < 2 or np.all(spectrum[1:] == 0):
        raise FitError(
            "oscillation frequency is unconstrained: flat spectrum",
            {"spectrum_max": float(spectrum[1:].max(initial=0.0))},
        )
    omega0 = float(freqs[1 + int(np.argmax(spectrum[1:]))])
    tau0 = float(t_us[-1] - t_us[0])
    return a0, b0, tau0, omega0, freqs[-1]


def fit_damped_cosine_xy(durations_ns, values, errors=None) -> FitResult:
    """Weighted least-squares fit of A - B exp(-t/tau) cos(2 pi omega t).

    Weights are 1/err^2; if every error is zero (or None) unit weights are
    used and the covariance is scaled by the residual variance instead.
    Zero errors among otherwise positive ones are floored to the smallest
    positive error. tau is fitted through its logarithm so it stays
    positive, and omega is bounded by the Nyquist frequency of the grid.
    """
    t_ns = np.asarray(durations_ns, dtype=float)
    y = np.asarray(values, dtype=float)
    if t_ns.ndim != 1 or t_ns.shape != y.shape:
        raise ConfigError("durations and values must be 1-d arrays of equal length")
    if t_ns.size < MIN_POINTS:
        raise ConfigError(f"need at least {MIN_POINTS} points, got {t_ns.size}")
    if np.any(np.diff(t_ns) <= 0):
        raise ConfigError("durations must be strictly increasing")
    t_us = t_ns * 1e-3

    if errors is None:
        sigma = None
    else:
        sigma = np.asarray(errors, dtype=float).copy()
        if np.all(sigma == 0):
            sigma = None
        else:
            sigma[sigma <= 0] = np.min(sigma[sigma > 0])
    weights = np.ones_like(y) if sigma is None else 1.0 / sigma

    if np.max(y) == np.min(y):
        raise FitError("oscillation amplitude is zero: constant data")
    a0, b0, tau0, omega0, f_nyquist = _initial_guess(t_us, y)
    span_us = t_us[-1] - t_us[0]
    if span_us * omega0 < MIN_PERIODS:
        raise FitError(
            f"scan spans {span_us * omega0:.2f} periods at the spectral-peak "
            f"frequency; need >= {MIN_PERIODS}",
            {"omega_guess_mhz": omega0, "span_us": span_us},
        )

    def residuals(theta):
        f, _ = _model_and_jacobian(theta, t_us)
        return (f - y) * weights

    def jacobian(theta):
        _, jac = _model_and_jacobian(theta, t_us)
        return jac * weights[:, None]

    theta0 = [a0, b0, np.log(tau0), omega0]
    lower = [-np.inf, -np.inf, np.log(span_us * 1e-4), 1e-9]
    upper = [np.inf, np.inf, np.log(span_us * 1e4), f_nyquist]
    result = least_squares(
        residuals,
        theta0,
        jac=jacobian,
        bounds=(lower, upper),
        xtol=STEP_TOL,
        ftol=None,
        gtol=None,
        max_nfev=MAX_ITERATIONS * t_us.size,
    )
    if not result.success:
        raise FitError(f"fit did not converge: {result.message}", {"status": result.status})

    a, b, ln_tau, omega = result.x
    tau_us = float(np.exp(ln_tau))
    residual_norm = float(np.linalg.norm(result.fun))

    jtj = result.jac.T @ result.jac
    try:
        cov = np.linalg.inv(jtj)
    except np.linalg.LinAlgError:
        raise FitError("singular normal equations at the optimum") from None
    if sigma is None:
        dof = max(t_us.size - 4, 1)
        cov = cov * (residual_norm**2 / dof)
    # transform ln(tau) -> tau, then (us, MHz, us) -> reported (ns, MHz, ns)
    scale = np.array([1.0, 1.0, tau_us * 1e3, 1.0])
    cov = cov * np.outer(scale, scale)

    fit = FitResult(
        a=float(a),
        b=float(b),
        tau_ns=tau_us * 1e3,
        omega_mhz=float(omega),
        covariance=cov,
        residual_norm=residual_norm,
    )
    rel_omega_err = fit.omega_stderr_mhz / fit.omega_mhz if fit.omega_mhz > 0 else np.inf
    if not np.isfinite(rel_omega_err) or rel_omega_err > 0.5:
        raise FitError(
            "oscillation frequency is unconstrained by the data",
            {"omega_mhz": fit.omega_mhz, "omega_stderr_mhz": fit.omega_stderr_mhz},
        )
    return fit


def fit_damped_cosine(data: DataSet, which: str = "p_a") -> FitResult:
    """Fit one observable column of a DataSet (errors taken from its pair)."""
    if which not in _ERR_COLUMN:
        raise KeyError(f"no fittable column {which!r}; have {tuple(_ERR_COLUMN)}")
    return fit_damped_cosine_xy(
        data.durations_ns, data.column(which), data.column(_ERR_COLUMN[which])
    )


def frequency_ratio(fit_collective: FitResult, fit_single: FitResult) -> FrequencyRatio:
    """Ratio of fitted frequencies with first-order error propagation."""
    om_c, om_s = fit_collective.omega_mhz, fit_single.omega_mhz
    s_c, s_s = fit_collective.omega_stderr_mhz, fit_single.omega_stderr_mhz
    ratio = om_c / om_s
    sigma = np.hypot(s_c / om_s, om_c * s_s / om_s**2)
    return FrequencyRatio(ratio=float(ratio), sigma=float(sigma))
