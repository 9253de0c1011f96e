"""Run configuration: a flat ``key = value`` document in Hz/second units.

Blank lines and ``#`` comments are ignored, ``[section]`` headers are allowed
for grouping but do not namespace keys. Every value is converted to angular
units exactly once, when the :class:`RunConfig` is built. Unknown keys,
duplicates and out-of-range values abort with the offending line number.
"""

import math
from dataclasses import dataclass, field

from .dynamics import DEFAULT_TAU_C, NoiseModel, calibrate_sigma
from .estimation import KAPPA_DEFAULT
from .model import TARGETS, SignalParams, SystemParams
from .protocols import DEFAULT_PULSE_RABI_HZ, StirapParams

TWO_PI = 2 * math.pi


class ConfigError(ValueError):
    """Invalid configuration; the message names the line when there is one."""


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {t!r}")
        return t
    return parse


def _optional_float(text):
    t = text.strip().lower()
    return None if t in ("", "none", "auto") else float(t)


POSITIVE, NON_NEGATIVE, ANY = "positive", "non-negative", "any"

# key -> (parser, default, constraint)
KEYS = {
    # system, Hz and tesla
    "omega0_hz": (float, 12.642812118e9, POSITIVE),
    "lambda_plus_hz": (float, 14.076e6, POSITIVE),
    "lambda_minus_hz": (float, 14.1e6, POSITIVE),
    "omega_hz": (float, 18e3, POSITIVE),
    "theta_rad": (float, math.pi, ANY),
    "bias_field_t": (float, 1e-3, NON_NEGATIVE),
    # signal
    "omega_g_hz": (float, 7.54, NON_NEGATIVE),
    "phi_rad": (float, 0.0, ANY),
    "signal_detuning_hz": (float, 0.0, ANY),
    "target": (_choice(*TARGETS), "plus", None),
    # noise
    "noise_enabled": (_bool, False, None),
    "sigma_delta_hz": (_optional_float, None, NON_NEGATIVE),
    "bare_t2_s": (float, 5.3e-3, POSITIVE),
    "tau_c_s": (float, DEFAULT_TAU_C, POSITIVE),
    "sigma_eps_hz": (float, 0.0, NON_NEGATIVE),
    # stirap and pulses
    "pulse_rabi_hz": (float, DEFAULT_PULSE_RABI_HZ, POSITIVE),
    "prepare": (_choice("stirap", "ideal"), "stirap", None),
    "stirap_hold_s": (float, 0.0, NON_NEGATIVE),
    "stirap_omega_min_hz": (float, 18e3, POSITIVE),
    "stirap_omega_max_hz": (float, 40e3, POSITIVE),
    "stirap_points": (int, 5, POSITIVE),
    # measurement and run control
    "n": (int, 30, POSITIVE),
    "T_add_s": (float, 0.028, NON_NEGATIVE),
    "seed": (int, 12345, NON_NEGATIVE),
    "trajectories": (int, 200, POSITIVE),
    "dt_s": (_optional_float, None, POSITIVE),
    "workers": (int, 1, POSITIVE),
    "kappa_t_per_rad_s": (float, KAPPA_DEFAULT, POSITIVE),
    "output_dir": (str, ".", None),
    # rabi scan (Fig. 3 geometry)
    "rabi_t_start_s": (float, 1e-4, NON_NEGATIVE),
    "rabi_t_stop_s": (float, 0.5, POSITIVE),
    "rabi_points": (int, 21, POSITIVE),
    # ramsey scan
    "ramsey_basis": (_choice("dressed", "bare"), "dressed", None),
    "ramsey_detuning_hz": (float, 0.52, ANY),
    "ramsey_rf_hz": (float, 100.0, POSITIVE),
    "ramsey_t_start_s": (float, 0.0, NON_NEGATIVE),
    "ramsey_t_stop_s": (float, 2.0, POSITIVE),
    "ramsey_points": (int, 21, POSITIVE),
    "ramsey_contrast": (_bool, False, None),
    # protection scan
    "protection_delta_max_hz": (float, 1e3, POSITIVE),
    "protection_points": (int, 21, POSITIVE),
    # compressed cross-validation of the rotating-wave model
    "rwa_omega0_hz": (float, 1e6, POSITIVE),
    "rwa_lambda_hz": (float, 2e5, POSITIVE),
    "rwa_omega_hz": (float, 2e3, NON_NEGATIVE),
    "rwa_omega_g_hz": (float, 100.0, NON_NEGATIVE),
    "rwa_duration_s": (float, 5e-3, POSITIVE),
    "rwa_steps_per_period": (int, 40, POSITIVE),
    "rwa_max_steps": (int, 5_000_000, POSITIVE),
}


def _check(key, value, constraint):
    if value is None or constraint in (None, ANY):
        return
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError("must be finite")
    if constraint == POSITIVE and not value > 0:
        raise ValueError("must be positive")
    if constraint == NON_NEGATIVE and not value >= 0:
        raise ValueError("must be non-negative")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration with the physics objects in angular units."""

    values: dict
    system: SystemParams = field(repr=False)
    signal: SignalParams = field(repr=False)
    noise: NoiseModel = field(repr=False)
    stirap: StirapParams = field(repr=False)

    @property
    def seed(self):
        return self.values["seed"]

    @property
    def output_path(self):
        return self.values["output_dir"]

    def __getitem__(self, key):
        return self.values[key]

    def with_overrides(self, **overrides):
        """Copy with raw (Hz-unit) values replaced and objects rebuilt."""
        values = dict(self.values)
        for k, v in overrides.items():
            if k not in KEYS:
                raise ConfigError(f"unknown key {k!r}")
            if v is not None:
                try:
                    _check(k, v, KEYS[k][2])
                except ValueError as e:
                    raise ConfigError(f"{k}: {e}") from None
                values[k] = v
        return build_config(values)


def build_config(values):
    v = values
    try:
        system = SystemParams(
            omega0=TWO_PI * v["omega0_hz"],
            lambda_plus=TWO_PI * v["lambda_plus_hz"],
            lambda_minus=TWO_PI * v["lambda_minus_hz"],
            Omega=TWO_PI * v["omega_hz"],
            theta=v["theta_rad"],
            bias_field=v["bias_field_t"],
        )
        signal = SignalParams(
            omega_g=TWO_PI * v["omega_g_hz"],
            phi=v["phi_rad"],
            detuning=TWO_PI * v["signal_detuning_hz"],
            target=v["target"],
        )
        if v["noise_enabled"]:
            sigma = v["sigma_delta_hz"]
            sigma = calibrate_sigma(v["bare_t2_s"], v["tau_c_s"]) if sigma is None else TWO_PI * sigma
            noise = NoiseModel(sigma, v["tau_c_s"], TWO_PI * v["sigma_eps_hz"], v["seed"])
        else:
            noise = NoiseModel(0.0, v["tau_c_s"], 0.0, v["seed"])
        stirap = StirapParams(v["omega_hz"], v["pulse_rabi_hz"])
        if v["rabi_t_stop_s"] < v["rabi_t_start_s"] or v["ramsey_t_stop_s"] < v["ramsey_t_start_s"]:
            raise ValueError("scan stop time precedes its start time")
        if v["stirap_omega_max_hz"] < v["stirap_omega_min_hz"]:
            raise ValueError("stirap_omega_max_hz is below stirap_omega_min_hz")
        if v["noise_enabled"] and v["dt_s"] is not None and v["dt_s"] > v["tau_c_s"] / 10:
            raise ValueError("dt_s must not exceed tau_c_s / 10")
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return RunConfig(dict(v), system, signal, noise, stirap)


def defaults():
    return {k: spec[1] for k, spec in KEYS.items()}


def parse_config(text):
    """Parse a configuration document; omitted keys take their defaults."""
    values = defaults()
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or (line.startswith("[") and line.endswith("]")):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        parser, _, constraint = KEYS[key]
        try:
            parsed = parser(value)
            _check(key, parsed, constraint)
        except ValueError as e:
            raise ConfigError(f"line {lineno}: {key}: {e}") from None
        values[key] = parsed
    return build_config(values)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
