"""Seeded data generators for the benchmark scenarios.

Each scenario id names one simulation design: covariate process, response
model (with its error family or discrete link) and the ground-truth active
set.  Generators are pure functions of (scenario, seed), driven by a
counter-based Philox stream, so identical inputs give bit-identical data.

Scenario ids
------------
``E1``              linear model, AR(1) Gaussian latent covariates with
                    Cauchy contamination, Cauchy response error.
``E2b1 .. E2b4``    four (non)linear models on the same covariate process.
``E3``              additive nonparametric model, equicorrelated uniform
                    covariates, four selectable error families.
``E4``              exposure-modulated model with signal strength calibrated
                    to a target variance-explained ratio.
``E5d1 .. E5d3``    exposure-modulated models on contaminated covariates.
``E6``              exposure correlated with the covariates.
``S1 .. S4``        Bernoulli / Poisson responses (append ``c1``-``c4`` for
                    the contamination case, e.g. ``S3c1``).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .errors import InvalidInput

__all__ = [
    "Scenario",
    "SimDataset",
    "make_scenario",
    "scenario_from_config",
    "list_scenario_ids",
    "simulate",
    "gen_ar1_gaussian",
    "gen_contaminated",
    "gen_equicorrelated_uniform",
    "gen_exposure_correlated",
    "gen_response",
    "response_mean",
    "draw_error",
    "active_set",
]

_PILOT_SEED = 20231115
_PILOT_SIZE = 100_000

ERROR_FAMILIES = ("cauchy", "cauchy3", "t3", "normal174", "mixnormal", "n51")

# 0-based active predictor indices per scenario id
_ACTIVE = {
    "E1": (0, 1, 2, 3, 4),
    "E2b1": (0, 1, 9),
    "E2b2": (0, 1, 2, 3),
    "E2b3": (0, 1, 2, 3),
    "E2b4": (0, 1, 2, 3),
    "E3": (0, 1, 2, 3),
    "E4": (0, 1, 2),
    "E5d1": (0, 1, 2),
    "E5d2": (0, 1, 2),
    "E5d3": (1, 99, 399, 599),
    "E6": (0, 1, 2, 3),
    "S1": (0, 1, 99, 399),
    "S2": (0, 1, 99, 399),
    "S3": (0, 1, 99, 399),
    "S4": (0, 1, 99, 399),
}

_DISCRETE = {"S1": "bernoulli", "S2": "bernoulli", "S3": "poisson",
             "S4": "poisson"}

_NEEDS_EXPOSURE = ("E4", "E5d1", "E5d2", "E5d3", "E6")

# published benchmark settings; all overridable
_DEFAULTS = {
    "E1": dict(n=100, p=1000, rho0=0.8, w0=0.8, error="cauchy"),
    "E2b1": dict(n=100, p=1000, rho0=0.5, w0=0.8, error="cauchy"),
    "E2b2": dict(n=200, p=1000, rho0=0.8, w0=0.8, error="cauchy"),
    "E2b3": dict(n=200, p=1000, rho0=0.8, w0=0.8, error="cauchy"),
    "E2b4": dict(n=200, p=1000, rho0=0.5, w0=0.8, error="cauchy"),
    "E3": dict(n=200, p=1000, rho0=0.4, w0=1.0, error="cauchy3"),
    "E4": dict(n=200, p=1000, rho0=0.8, w0=1.0, error="cauchy3", r2=0.3),
    "E5d1": dict(n=200, p=1000, rho0=0.8, w0=0.8, error="cauchy3"),
    "E5d2": dict(n=200, p=1000, rho0=0.8, w0=0.8, error="cauchy3"),
    "E5d3": dict(n=200, p=1000, rho0=0.8, w0=0.8, error="cauchy3"),
    "E6": dict(n=200, p=1000, rho0=0.4, w0=0.8, error="cauchy3"),
    "S1": dict(n=200, p=1000, rho0=0.4, case=1),
    "S2": dict(n=200, p=1000, rho0=0.4, case=1),
    "S3": dict(n=200, p=1000, rho0=0.4, case=1),
    "S4": dict(n=200, p=1000, rho0=0.4, case=1),
}

# contamination noise per discrete-response case
_CASE_NOISE = {2: "t3", 3: "cauchy3", 4: "n51"}


@dataclass(frozen=True)
class Scenario:
    """Fully resolved simulation settings."""

    id: str
    n: int
    p: int
    rho0: float
    w0: float = 1.0
    error: str = "cauchy"
    r2: float | None = None
    case: int | None = None

    def __post_init__(self):
        if self.id not in _ACTIVE:
            raise InvalidInput(
                f"unknown scenario '{self.id}'; valid ids: "
                f"{', '.join(list_scenario_ids())}"
            )
        if self.n < 2 or self.p < 1:
            raise InvalidInput("scenario needs n >= 2 and p >= 1")
        if self.p <= max(_ACTIVE[self.id]):
            raise InvalidInput(
                f"scenario {self.id} needs p > {max(_ACTIVE[self.id])}"
            )
        if self.error not in ERROR_FAMILIES:
            raise InvalidInput(
                f"unknown error family '{self.error}'; valid: "
                f"{', '.join(ERROR_FAMILIES)}"
            )
        if self.id in _DISCRETE and self.case not in (1, 2, 3, 4):
            raise InvalidInput("discrete scenarios need case in 1..4")

    @property
    def needs_exposure(self) -> bool:
        return self.id in _NEEDS_EXPOSURE


@dataclass(frozen=True)
class SimDataset:
    """Generated data plus the ground-truth active index set (0-based)."""

    dataset: Dataset
    active: np.ndarray
    scenario: Scenario


def list_scenario_ids() -> list[str]:
    ids = []
    for sid in _DEFAULTS:
        if sid in _DISCRETE:
            ids.extend(f"{sid}c{c}" for c in (1, 2, 3, 4))
        else:
            ids.append(sid)
    return ids


_S_CASE_RE = re.compile(r"^(S[1-4])c([1-4])$")


def make_scenario(scenario_id: str, **overrides) -> Scenario:
    """Resolve a scenario id (e.g. ``"E1"`` or ``"S3c1"``) with overrides."""
    sid = scenario_id.strip()
    m = _S_CASE_RE.match(sid)
    if m:
        sid = m.group(1)
        overrides.setdefault("case", int(m.group(2)))
    if sid not in _DEFAULTS:
        raise InvalidInput(
            f"unknown scenario '{scenario_id}'; valid ids: "
            f"{', '.join(list_scenario_ids())}"
        )
    params = dict(_DEFAULTS[sid])
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in ("n", "p", "rho0", "w0", "error", "r2", "case"):
            raise InvalidInput(f"unknown scenario parameter '{key}'")
        params[key] = value
    return Scenario(id=sid, **params)


def scenario_from_config(text: str) -> Scenario:
    """Parse a plain-text ``key = value`` scenario definition.

    Recognized keys: ``scenario`` (required id), ``n``, ``p``, ``rho0``,
    ``w0``, ``error``, ``r2``, ``case``.  Lines starting with ``#`` and blank
    lines are ignored.
    """
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidInput(f"config line {lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    if "scenario" not in values:
        raise InvalidInput("config is missing the 'scenario' key")
    sid = values.pop("scenario")
    overrides: dict = {}
    casters = {"n": int, "p": int, "case": int, "rho0": float, "w0": float,
               "r2": float, "error": str}
    for key, val in values.items():
        if key not in casters:
            raise InvalidInput(f"unknown scenario parameter '{key}'")
        try:
            overrides[key] = casters[key](val)
        except ValueError:
            raise InvalidInput(
                f"config value for '{key}' is not a {casters[key].__name__}"
            ) from None
    return make_scenario(sid, **overrides)


def active_set(scenario: Scenario) -> np.ndarray:
    return np.asarray(_ACTIVE[scenario.id], dtype=np.int64)


# ---------------------------------------------------------------------------
# low-level draws
# ---------------------------------------------------------------------------

def draw_error(family: str, size, rng: np.random.Generator) -> np.ndarray:
    """Sample one of the named error families.

    Cauchy draws go through the inverse CDF tan(pi*(U - 1/2)) so they are a
    deterministic transform of one uniform stream.
    """
    if family == "cauchy":
        return np.tan(np.pi * (rng.random(size) - 0.5))
    if family == "cauchy3":
        return np.tan(np.pi * (rng.random(size) - 0.5)) / 3.0
    if family == "t3":
        return rng.standard_t(3, size)
    if family == "normal174":
        return math.sqrt(1.74) * rng.standard_normal(size)
    if family == "mixnormal":
        signs = np.where(rng.random(size) < 0.5, -2.0, 2.0)
        return signs + rng.standard_normal(size)
    if family == "n51":
        return 5.0 + rng.standard_normal(size)
    raise InvalidInput(f"unknown error family '{family}'")


def gen_ar1_gaussian(n: int, p: int, rho0: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Rows i.i.d. centered Gaussian with covariance rho0**|i-j|.

    Sampled exactly through the AR(1) recursion across columns.
    """
    if not abs(rho0) < 1:
        raise InvalidInput("AR(1) parameter must satisfy |rho0| < 1")
    xi = rng.standard_normal((n, p))
    x = np.empty((n, p))
    x[:, 0] = xi[:, 0]
    scale = math.sqrt(1.0 - rho0 * rho0)
    for j in range(1, p):
        x[:, j] = rho0 * x[:, j - 1] + scale * xi[:, j]
    return x


def gen_contaminated(x0: np.ndarray, w0: float, noise_family: str,
                     rng: np.random.Generator) -> np.ndarray:
    """Weighted sum ``w0*x0 + (1-w0)*noise``; ``w0 == 1`` returns a copy."""
    if not 0.0 < w0 <= 1.0:
        raise InvalidInput("mixing weight w0 must be in (0, 1]")
    if w0 == 1.0:
        return x0.copy()
    noise = draw_error(noise_family, x0.shape, rng)
    return w0 * x0 + (1.0 - w0) * noise


def _bisect_increasing(func, target, lo, hi, iters: int = 200) -> float:
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _uniform_mix_weight(rho0: float) -> float:
    """t solving corr = t^2/(1+t^2) = rho0 for the shared-uniform mix."""
    if rho0 == 0.0:
        return 0.0
    return _bisect_increasing(lambda t: t * t / (1.0 + t * t), rho0, 0.0,
                              math.sqrt(rho0 / (1.0 - rho0)) + 1.0)


def gen_equicorrelated_uniform(n: int, p: int, rho0: float,
                               rng: np.random.Generator) -> np.ndarray:
    """Columns (T_j + t*U)/(1+t) with T_j, U iid uniform(0,1); pairwise
    correlation rho0."""
    if not 0.0 <= rho0 < 1.0:
        raise InvalidInput("equicorrelation must be in [0, 1)")
    t = _uniform_mix_weight(rho0)
    tj = rng.random((n, p))
    u = rng.random((n, 1))
    return (tj + t * u) / (1.0 + t)


def gen_exposure_correlated(n: int, p: int, rho0: float,
                            target_corr_xz: float,
                            rng: np.random.Generator):
    """Latent covariates plus an exposure sharing one uniform factor.

    ``x0[:, j] = (T_j + t1*U1)/(1 + t1)`` with standard normal T_j and
    ``z = (U2 + t2*U1)/(1 + t2)``; t1, t2 are solved by bisection so the
    covariate equicorrelation is rho0 and corr(x0_j, z) hits the target.
    The attainable supremum of corr(x0_j, z) is sqrt(rho0).
    """
    if not 0.0 <= rho0 < 1.0:
        raise InvalidInput("equicorrelation must be in [0, 1)")
    if target_corr_xz < 0.0:
        raise InvalidInput("target covariate-exposure correlation must be >= 0")
    if rho0 == 0.0:
        if target_corr_xz != 0.0:
            raise InvalidInput(
                "rho0 = 0 forces zero covariate-exposure correlation"
            )
        t1 = 0.0
        t2 = 0.0
    else:
        # corr(x_j, x_k) = (t1^2/12) / (1 + t1^2/12)
        t1 = _bisect_increasing(
            lambda t: (t * t / 12.0) / (1.0 + t * t / 12.0), rho0, 0.0,
            math.sqrt(12.0 * rho0 / (1.0 - rho0)) + 1.0)
        sup = math.sqrt(rho0)
        if target_corr_xz >= sup * (1.0 - 1e-9):
            raise InvalidInput(
                f"corr(x, z) target {target_corr_xz} is infeasible; "
                f"supremum for rho0={rho0} is {sup:.4f}"
            )

        def corr_xz(t2_):
            num = t1 * t2_ / 12.0
            den = math.sqrt((1.0 + t1 * t1 / 12.0) * (1.0 + t2_ * t2_) / 12.0)
            return num / den

        if target_corr_xz == 0.0:
            t2 = 0.0
        else:
            hi = 1.0
            while corr_xz(hi) < target_corr_xz:
                hi *= 2.0
            t2 = _bisect_increasing(corr_xz, target_corr_xz, 0.0, hi)
    t_mat = rng.standard_normal((n, p))
    u1 = rng.random((n, 1))
    u2 = rng.random(n)
    x0 = (t_mat + t1 * u1) / (1.0 + t1)
    z = (u2 + t2 * u1[:, 0]) / (1.0 + t2)
    return x0, z


# ---------------------------------------------------------------------------
# response models
# ---------------------------------------------------------------------------

def _g1(u):
    return u


def _g2(u):
    return (3.0 * u - 1.0) ** 2


def _g3(u):
    s = np.sin(2.0 * np.pi * u)
    return 2.0 * s / (2.0 - s)


def _g4(u):
    s = np.sin(2.0 * np.pi * u)
    c = np.cos(2.0 * np.pi * u)
    return 0.1 * s + 0.2 * c + 0.3 * s ** 2 + 0.4 * c ** 3 + 0.5 * s ** 3


def response_mean(scenario_id: str, x0: np.ndarray, z: np.ndarray | None = None,
                  theta: float = 1.0) -> np.ndarray:
    """Deterministic response part (or the link argument for the discrete
    scenarios), evaluated on the latent covariates."""
    x = x0
    if scenario_id == "E1":
        return (3.0 * x[:, 0] + 3.0 * x[:, 1] + 2.0 * x[:, 2]
                + 2.0 * x[:, 3] + 2.0 * x[:, 4])
    if scenario_id == "E2b1":
        return (5.0 * x[:, 0] * (x[:, 0] < 0) + 5.0 * x[:, 1] * (x[:, 1] > 0)
                + 5.0 * np.sin(x[:, 9]))
    if scenario_id == "E2b2":
        # model coefficients beta_1..beta_4 default to one
        return 5.0 * (x[:, 0] + x[:, 1] + x[:, 2] + x[:, 3])
    if scenario_id == "E2b3":
        return (5.0 * x[:, 0] ** 2 + 5.0 * x[:, 1] * x[:, 2]
                + 5.0 * (x[:, 3] > 0))
    if scenario_id == "E2b4":
        return (np.exp(3.0 * np.sin(x[:, 0])) + 2.0 * np.exp(x[:, 1])
                + 3.0 * (x[:, 2] > 0) + np.log(4.0 * np.abs(x[:, 3]) + 0.5))
    if scenario_id == "E3":
        return (6.0 * _g1(x[:, 0]) + 6.0 * _g2(x[:, 1]) + 3.0 * _g3(x[:, 2])
                + 6.0 * _g4(x[:, 3]))
    if scenario_id == "E4":
        return theta * (2.0 * np.exp(z) * x[:, 0]
                        + 5.0 * (2.0 * z - 1.0) ** 2 * np.exp(x[:, 1])
                        + 3.0 * np.sin(2.0 * np.pi * z) * x[:, 2] ** 2)
    if scenario_id in ("E5d1", "E5d2"):
        return (2.0 * z * x[:, 0] + 5.0 * (2.0 * z - 1.0) ** 2 * x[:, 1]
                + 3.0 * np.sin(2.0 * np.pi * z) * x[:, 2])
    if scenario_id == "E5d3":
        return (2.0 * (z > 0.4) * x[:, 1] + (1.0 + z) * x[:, 99]
                + (2.0 - 3.0 * z) ** 2 * x[:, 399]
                + np.exp(z / (1.0 + z)) * x[:, 599])
    if scenario_id == "E6":
        s = np.sin(2.0 * np.pi * z)
        return (3.0 * x[:, 0] + 4.0 * np.sqrt(z + 0.5) * x[:, 1]
                + 2.0 * np.exp(z) * x[:, 2] + 6.0 * s * x[:, 3] / (2.0 - s))
    if scenario_id in ("S1", "S3"):
        return (2.0 * x[:, 0] + 1.5 * x[:, 1] + 2.0 * x[:, 99]
                + 2.0 * x[:, 399])
    if scenario_id == "S2":
        return (2.0 * x[:, 0] + 2.0 * (x[:, 1] + 0.5) ** 2
                + 3.0 * np.exp(-x[:, 99]) + 6.0 * np.sin(np.pi * x[:, 399]))
    if scenario_id == "S4":
        return (1.5 * x[:, 0] + 0.5 * (x[:, 1] + 0.5) ** 2
                + 1.5 * np.exp(x[:, 99] ** 2)
                + 1.5 * np.sin(np.pi * x[:, 399]))
    raise InvalidInput(f"unknown scenario '{scenario_id}'")


_theta_cache: dict = {}


def _calibrated_theta(r2: float, error_family: str) -> float:
    """Signal scale for the exposure-modulated model so the explained
    variance ratio hits the target.

    The Cauchy-type error has no variance; its scale enters through the
    variance of the matched t(3) error, a documented proxy.  The latent-mean
    variance comes from a 100k pilot draw under a fixed internal seed and the
    scale solves theta^2 * var(mu0) = r2/(1-r2) * var_eps by bisection;
    results are cached per (r2, family).
    """
    key = (float(r2), error_family)
    if key in _theta_cache:
        return _theta_cache[key]
    if not 0.0 < r2 < 1.0:
        raise InvalidInput("target variance ratio must be in (0, 1)")
    var_eps = 3.0
    target = r2 / (1.0 - r2) * var_eps
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(_PILOT_SEED)))
    x0 = gen_ar1_gaussian(_PILOT_SIZE, 3, 0.8, rng)
    z = rng.random(_PILOT_SIZE)
    mu0 = response_mean("E4", x0, z, theta=1.0)
    v0 = float(np.var(mu0))
    hi = 2.0 * math.sqrt(target / v0) + 1.0
    theta = _bisect_increasing(lambda t: t * t * v0, target, 0.0, hi)
    _theta_cache[key] = theta
    return theta


def _noise_family(scenario: Scenario) -> str:
    if scenario.id in _DISCRETE:
        return _CASE_NOISE.get(scenario.case, "cauchy")
    return "cauchy"


def simulate(scenario: Scenario, seed) -> SimDataset:
    """Generate one dataset for a scenario.

    ``seed`` is an integer or a ``numpy.random.SeedSequence``.  The draw
    order is fixed: latent covariates, exposure, contamination noise,
    response error.
    """
    if isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(seed)
    rng = np.random.Generator(np.random.Philox(seq))
    n, p = scenario.n, scenario.p
    sid = scenario.id

    z = None
    if sid == "E3":
        x0 = gen_equicorrelated_uniform(n, p, scenario.rho0, rng)
    elif sid == "S4":
        x0 = gen_equicorrelated_uniform(n, p, scenario.rho0, rng)
    elif sid == "E6":
        x0, z = gen_exposure_correlated(n, p, scenario.rho0, 0.4, rng)
    else:
        x0 = gen_ar1_gaussian(n, p, scenario.rho0, rng)
    if sid in ("E4", "E5d1", "E5d2", "E5d3"):
        z = rng.random(n)

    if scenario.id in _DISCRETE and scenario.case == 1:
        x = x0.copy()
    elif scenario.id in _DISCRETE:
        x = gen_contaminated(x0, 0.95, _noise_family(scenario), rng)
    else:
        x = gen_contaminated(x0, scenario.w0, _noise_family(scenario), rng)

    y = gen_response(scenario, x0, z, rng)
    dataset = Dataset(y=y, x=x, z=z, z_name="z" if z is not None else None)
    return SimDataset(dataset=dataset, active=active_set(scenario),
                      scenario=scenario)


def gen_response(scenario: Scenario, x0: np.ndarray, z: np.ndarray | None,
                 rng: np.random.Generator) -> np.ndarray:
    """Draw the response for a scenario given latent covariates (and the
    exposure for the exposure-adjusted designs): deterministic part plus an
    error draw, or a Bernoulli/Poisson draw through the scenario's link."""
    sid = scenario.id
    kind = _DISCRETE.get(sid)
    if kind == "bernoulli":
        eta = response_mean(sid, x0)
        prob = 1.0 / (1.0 + np.exp(-eta))
        return (rng.random(eta.shape[0]) < prob).astype(float)
    if kind == "poisson":
        eta = response_mean(sid, x0)
        lam = np.exp(eta)
        if not np.all(np.isfinite(lam)):
            raise InvalidInput("Poisson rate overflowed; check the scenario")
        return rng.poisson(lam).astype(float)
    theta = 1.0
    if sid == "E4":
        if scenario.r2 is None:
            raise InvalidInput("scenario E4 needs a target r2")
        theta = _calibrated_theta(scenario.r2, scenario.error)
    mu = response_mean(sid, x0, z, theta=theta)
    eps = draw_error(scenario.error, mu.shape[0], rng)
    if sid == "E5d2":
        # invert log(0.5*exp(1.25*y) - 1) = mu + eps, stably
        return 0.8 * (math.log(2.0) + np.logaddexp(mu + eps, 0.0))
    return mu + eps
