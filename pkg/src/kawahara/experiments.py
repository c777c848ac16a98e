"""
Studies behind the `kawahara` subcommands.

Each study takes a fully materialized configuration dictionary, an output
directory and a seed, writes its CSV/JSON artifacts, and returns a
`StudyResult` holding one `Criterion` per checked property.  Defaults live in
`DEFAULTS` so a manifest can echo every value a run depended on.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from .dynamics import EvolutionForm, FormKind, State, conserved_E, conserved_H, conserved_M, rhs
from .estimators import (
    StrichartzEnsemble,
    counting_M_scan,
    linear_bound_fit,
    smoothing_functional,
    strichartz_ratio_study,
)
from .integrator import IntegratorConfig, Trajectory, evolve
from .io import atomic_write_json, export_trajectory, write_csv
from .rng import counter_rng
from .spectral import (
    PhysicalField,
    SpectralField,
    TorusGrid,
    dot_sobolev_norm,
    forward_transform,
    japanese,
    random_real_field,
    rescale,
    sobolev_norm,
    unscale,
)
from .symbols import (
    DispersionParams,
    PhaseKind,
    PhaseSymbol,
    Region,
    case_bound_scan,
    factorization_audit,
    phase_difference,
    quintic_resonance,
    scaled_resonance_direct,
    scaled_resonance_factored,
    sextic_family,
)


@dataclass(frozen=True)
class Criterion:
    """One pass/fail check with the measured value and the threshold it was held to."""

    name: str
    passed: bool
    value: Any
    threshold: Any
    relation: str
    note: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "value": self.value,
            "threshold": self.threshold,
            "relation": self.relation,
            "note": self.note,
        }


def at_most(name: str, value: float, threshold: float, note: str = "") -> Criterion:
    return Criterion(name, bool(value <= threshold), float(value), float(threshold), "<=", note)


def at_least(name: str, value: float, threshold: float, note: str = "") -> Criterion:
    return Criterion(name, bool(value >= threshold), float(value), float(threshold), ">=", note)


@dataclass
class StudyResult:
    criteria: list[Criterion]
    artifacts: list[str] = field(default_factory=list)
    report: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)


# ---------------------------------------------------------------------------
# configuration

_EQUATION = {"beta": 0.0, "gamma": 0.0, "mu": 1, "eps": 1.0, "lambda": 1.0}

DEFAULTS: dict[str, dict] = {
    "conservation": {
        **_EQUATION,
        "M": 16,
        "dt": 1e-3,
        "T": 1.0,
        "form": "full",
        "snapshot_stride": 100,
        "data": {"kind": "sine", "amplitude": 0.1, "mode": 1, "decay": 2.0},
        "tol_mass": 1e-8,
        "tol_hamiltonian": 1e-6,
        "tol_mean": 1e-14,
    },
    "scaling": {
        **_EQUATION,
        "beta": 1.0,
        "gamma": 0.5,
        "M": 16,
        "lambdas": [2, 4, 8],
        "s_values": [-1.0, 0.0, 0.25, 0.5, 1.0],
        "fields": 100,
        "tol_norm": 1e-12,
        "dynamic_lambdas": [1, 2, 3],
        "dynamic_M": 8,
        "dynamic_amplitude": 0.3,
        "T_prime": 1.0,
        "dt_prime": 1e-3,
        "tol_dynamic": 1e-6,
    },
    "smoothing": {
        **_EQUATION,
        "lambda": 4.0,
        "n_max": 8.0,
        "s": 0.0,
        "rho": 0.05,
        "members": 20,
        "dt": 1e-4,
        "T": 1.0,
        "t_fit": 0.01,
        "snapshot_stride": 10,
        "ceiling_constant": 1.0,
        "eps_control": True,
        "tol_control": 1e-10,
    },
    "illposed": {
        **_EQUATION,
        "s": 0.25,
        "vartheta": 0.2,
        "rho": 0.1,
        "K": [8, 16, 32, 64],
        "grid_factor": 3,
        "dt": 1e-4,
        "form": "full",
        "coupling": "phase_normalized",
        "dt_halving": True,
        "report_native": True,
        "tol_closed_form": 1e-12,
    },
    "strichartz": {
        **_EQUATION,
        "b": 0.31,
        "lambdas": [1, 2, 4, 8],
        "members": 100,
        "rho": 0.05,
        "n_max": 2.0,
        "T": 1.0,
        "modulation": 4.0,
        "n_modulations": 3,
        "samples_per_period": 16,
        "bootstrap": 2000,
        "confidence": 0.95,
    },
    "multiplier_scan": {
        "regions": ["I", "II", "III", "IV", "V"],
        "s": 0.0,
        "b": 0.5,
        "delta": 0.05,
        "lambdas": [1, 2],
        "M_max": 128,
    },
    "resonance_audit": {
        "box": 20,
        "betas": [0, 1, 2],
        "gammas": [0, 1],
        "lambdas": [1, 2],
        "rational_box": 5,
        "N_max": 64,
        "ab_max": 8,
    },
    "counting": {
        **_EQUATION,
        "b": 0.35,
        "lambdas": [1, 2, 4],
        "m_max": 256,
        "doubling": True,
        "tol_lambda_variation": 0.10,
        "tol_doubling": 0.05,
    },
}

EXPERIMENTS = tuple(DEFAULTS)


def _merge(base: dict, user: dict, path: str) -> dict:
    out = copy.deepcopy(base)
    for key, val in user.items():
        if key not in base:
            raise KeyError(f"unknown configuration key {path}{key}")
        if isinstance(base[key], dict):
            if not isinstance(val, dict):
                raise TypeError(f"{path}{key} must be an object")
            out[key] = _merge(base[key], val, f"{path}{key}.")
        else:
            out[key] = val
    return out


def materialize(experiment: str, user: Optional[dict] = None) -> dict:
    """Defaults for `experiment` overlaid with `user`; unknown keys are rejected."""
    if experiment not in DEFAULTS:
        raise KeyError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    user = dict(user or {})
    user.pop("experiment", None)
    return _merge(DEFAULTS[experiment], user, "")


def _params(cfg: dict, **override: Any) -> DispersionParams:
    vals = {k: cfg[k] for k in ("beta", "gamma", "mu", "eps")}
    vals.update(override)
    return DispersionParams(float(vals["beta"]), float(vals["gamma"]), int(vals["mu"]), float(vals["eps"]))


def _relative_drift(series: np.ndarray) -> float:
    ref = abs(float(series[0]))
    d = float(np.max(np.abs(series - series[0])))
    return d / ref if ref > 0 else d


# ---------------------------------------------------------------------------
# conservation


def initial_datum(grid: TorusGrid, data: dict, rng: np.random.Generator) -> SpectralField:
    """Datum described by a config block: zero, A sin(mode x / lambda), or random smooth."""
    kind = data["kind"]
    if kind == "zero":
        return SpectralField.zeros(grid)
    if kind == "sine":
        A, k = float(data["amplitude"]), int(data["mode"])
        return forward_transform(PhysicalField.from_function(grid, lambda x: A * np.sin(k * x / grid.lam)))
    if kind == "random":
        u = random_real_field(grid, rng, decay=float(data["decay"]), zero_mean=True)
        return u.scale(float(data["amplitude"]) / sobolev_norm(u, 2.0))
    raise ValueError(f"unknown data kind {kind!r}")


def run_conservation(cfg: dict, out: Path, seed: int) -> StudyResult:
    grid = TorusGrid(float(cfg["lambda"]), int(cfg["M"]))
    params = _params(cfg)
    u0 = initial_datum(grid, cfg["data"], counter_rng(seed, 0))
    form = EvolutionForm.build(cfg["form"], params, u0)
    traj = evolve(
        State(u0),
        IntegratorConfig(float(cfg["T"]), form, dt=float(cfg["dt"]), snapshot_stride=int(cfg["snapshot_stride"])),
    )
    fin = traj.final.field
    d = {
        "E": np.append(traj.diagnostics["E"], conserved_E(fin)),
        "M": np.append(traj.diagnostics["M"], conserved_M(fin)),
        "H": np.append(traj.diagnostics["H"], conserved_H(fin, params)),
    }
    m_drift = max(_relative_drift(d["M"]), traj.max_mass_drift)
    h_drift = _relative_drift(d["H"])
    e_drift = float(np.max(np.abs(d["E"] - d["E"][0])))
    e_scale = max(1.0, abs(float(d["E"][0])))
    arts = ["snapshots/" + n for n in export_trajectory(out / "snapshots", traj)]
    criteria = [
        at_most("mass_drift", m_drift, cfg["tol_mass"], "relative, every step and every snapshot"),
        at_most("hamiltonian_drift", h_drift, cfg["tol_hamiltonian"], "relative, at snapshots and the final state"),
        at_most("mean_drift", e_drift / e_scale, cfg["tol_mean"], "absolute, scaled by max(1, |E0|)"),
    ]
    report = {"steps": int(round(abs(cfg["T"]) / traj.dt)), "dt_used": traj.dt, "E0": d["E"][0], "M0": d["M"][0], "H0": d["H"][0]}
    return StudyResult(criteria, arts, report)


# ---------------------------------------------------------------------------
# scaling


def scaling_dynamic_gap(
    u1: SpectralField, params: DispersionParams, lam: float, T_prime: float, dt_prime: float
) -> float:
    """Relative max gap between u(lambda^-5 T') on T_1 and the inverse-scaled run on T_lambda."""
    k5 = lam**5
    small = evolve(
        State(u1),
        IntegratorConfig(T_prime / k5, EvolutionForm.full(params, 1.0), dt=dt_prime / k5, diagnostics=False,
                         snapshot_stride=10**9),
    ).final.field
    big = evolve(
        State(rescale(u1, lam)),
        IntegratorConfig(T_prime, EvolutionForm.full(params, lam), dt=dt_prime, diagnostics=False,
                         snapshot_stride=10**9),
    ).final.field
    back = unscale(big)
    return float(np.max(np.abs(back.coeffs - small.coeffs)) / np.max(np.abs(small.coeffs)))


def run_scaling(cfg: dict, out: Path, seed: int) -> StudyResult:
    grid = TorusGrid(1.0, int(cfg["M"]))
    rows, worst = [], 0.0
    fields = [random_real_field(grid, counter_rng(seed, 0, j), decay=1.0) for j in range(int(cfg["fields"]))]
    for lam in cfg["lambdas"]:
        scaled = [rescale(u, float(lam)) for u in fields]
        for s in cfg["s_values"]:
            expected = float(lam) ** (-1.5 - float(s))
            errs = [
                abs(dot_sobolev_norm(v, s) / dot_sobolev_norm(u, s) - expected) / expected
                for u, v in zip(fields, scaled)
            ]
            rows.append([float(lam), float(s), expected, float(max(errs))])
            worst = max(worst, max(errs))
    write_csv(out / "scaling_norms.csv", ["lambda", "s", "expected_ratio", "max_rel_error"], rows)

    params = _params(cfg)
    g1 = TorusGrid(1.0, int(cfg["dynamic_M"]))
    u1 = random_real_field(g1, counter_rng(seed, 1), decay=3.0, zero_mean=True)
    u1 = u1.scale(float(cfg["dynamic_amplitude"]) / sobolev_norm(u1, 0.0))
    dyn = []
    for lam in cfg["dynamic_lambdas"]:
        gap = scaling_dynamic_gap(u1, params, float(lam), float(cfg["T_prime"]), float(cfg["dt_prime"]))
        dyn.append([float(lam), gap])
    write_csv(out / "scaling_dynamic.csv", ["lambda", "relative_gap"], dyn)
    criteria = [at_most("norm_identity", worst, cfg["tol_norm"], "max relative error over fields, s and lambda")]
    criteria += [at_most(f"dynamic_lambda_{lam:g}", gap, cfg["tol_dynamic"]) for lam, gap in dyn]
    return StudyResult(criteria, ["scaling_norms.csv", "scaling_dynamic.csv"], {"norm_max_rel_error": worst})


# ---------------------------------------------------------------------------
# smoothing


def rough_datum(grid: TorusGrid, rng: np.random.Generator, s: float, rho: float, n_max: float) -> SpectralField:
    """Random datum with |c(m)| ~ <n>^-(s + 1/2), band-limited to |n| <= n_max, ||u||_{L^2} = rho."""
    u = random_real_field(grid, rng, decay=s + 0.5, n_max=n_max, zero_mean=True)
    return u.scale(rho / sobolev_norm(u, 0.0))


def _two_phase_run(u0: SpectralField, form: EvolutionForm, dt: float, t_fit: float, T: float, stride: int) -> Trajectory:
    """Every step up to t_fit, then every `stride` steps up to T, stitched into one trajectory."""
    first = evolve(State(u0), IntegratorConfig(t_fit, form, dt=dt, diagnostics=False))
    second = evolve(first.final, IntegratorConfig(T, form, dt=dt, snapshot_stride=stride, diagnostics=False))
    times = np.concatenate([first.times, second.times[1:]])
    coeffs = np.concatenate([first.coeffs, second.coeffs[1:]])
    return Trajectory(first.grid, times, coeffs, dt, form)


def modulus_rate(u: SpectralField, form: EvolutionForm, t: float) -> float:
    """lambda^-2 max_m |n| |d/dt |u(m)|^2|, the integrand of the time-integral bound."""
    du = rhs(State(u, t), form).coeffs
    rate = 2.0 * np.real(np.conj(u.coeffs) * du)
    return float(np.max(np.abs(u.grid.wavenumbers) * np.abs(rate)) / u.grid.lam**2)


def smoothing_ceiling(lam: float, u0: SpectralField, s: float, constant: float) -> float:
    """constant * lambda^-1 log(lambda) ||u0||_{H^s}^4, with log(lambda) read as 1 at lambda = 1."""
    log_term = math.log(lam) if lam > 1 else 1.0
    return constant * log_term / lam * sobolev_norm(u0, s) ** 4


def run_smoothing(cfg: dict, out: Path, seed: int) -> StudyResult:
    lam, s, rho = float(cfg["lambda"]), float(cfg["s"]), float(cfg["rho"])
    n_max = float(cfg["n_max"])
    grid = TorusGrid(lam, int(round(n_max * lam)))
    params = _params(cfg)
    dt, T, t_fit = float(cfg["dt"]), float(cfg["T"]), float(cfg["t_fit"])
    stride = int(cfg["snapshot_stride"])
    rows, arts = [], []
    f0_max, linear_ok, ceiling_ok = 0.0, True, True
    worst_linear, worst_ceiling = 0.0, 0.0
    for j in range(int(cfg["members"])):
        u0 = rough_datum(grid, counter_rng(seed, j), s, rho, n_max)
        form = EvolutionForm.build(FormKind.DATA_RENORMALIZED, params, u0)
        traj = _two_phase_run(u0, form, dt, t_fit, T, stride)
        series = smoothing_functional(traj)
        F = series.values
        fit = linear_bound_fit(series.times, F, t_fit)
        early = (series.times > 0) & (series.times <= t_fit + 1e-12)
        C_sup = float(np.max(F[early] / series.times[early]))
        G_sup = max(
            modulus_rate(traj.field_at(k), form, float(traj.times[k]))
            for k in np.flatnonzero(series.times <= t_fit + 1e-12)
        )
        ceiling = smoothing_ceiling(lam, u0, s, float(cfg["ceiling_constant"]))
        f0_max = max(f0_max, float(F[0]))
        worst_linear = max(worst_linear, C_sup / G_sup if G_sup > 0 else (0.0 if C_sup == 0 else math.inf))
        worst_ceiling = max(worst_ceiling, float(F.max()) / ceiling)
        rows.append([j, C_sup, fit["C"], G_sup, float(F.max()), ceiling])
        name = f"smoothing_member_{j:03d}.csv"
        keep = np.r_[np.flatnonzero(early | (series.times == 0))[:: max(1, stride)], np.flatnonzero(~early & (series.times > 0))]
        keep = np.unique(keep)
        header = ["t", "F"] + [f"block_{N}" for N in series.blocks]
        write_csv(
            out / name,
            header,
            [[float(series.times[k]), float(F[k])] + [float(series.blocks[N][k]) for N in series.blocks] for k in keep],
        )
        arts.append(name)
    write_csv(out / "smoothing_summary.csv", ["member", "C_sup", "C_lsq", "rate_sup", "F_max", "ceiling"], rows)
    arts.append("smoothing_summary.csv")

    criteria = [
        Criterion("F_at_zero", f0_max == 0.0, f0_max, 0.0, "==", "exact"),
        at_most(
            "linear_bound",
            worst_linear,
            1.0 + 1e-6,
            "max over members of sup F(t)/t on (0, t_fit] divided by sup of lambda^-2 |n| |d/dt |u|^2|",
        ),
        at_most("ceiling", worst_ceiling, 1.0, "max over members of max F / ceiling"),
    ]
    if cfg["eps_control"]:
        u0 = rough_datum(grid, counter_rng(seed, 0), s, rho, n_max)
        lin = EvolutionForm.build(FormKind.DATA_RENORMALIZED, _params(cfg, eps=0.0), u0)
        series = smoothing_functional(
            evolve(State(u0), IntegratorConfig(T, lin, dt=dt, snapshot_stride=stride, diagnostics=False))
        )
        scale = float(np.max(np.abs(grid.wavenumbers) * np.abs(u0.coeffs) ** 2)) / lam**2
        criteria.append(at_most("eps0_control", float(series.values.max()) / scale, cfg["tol_control"],
                                "max F relative to lambda^-2 max |n| |u0(m)|^2"))
    report = {"M": grid.M, "ceiling_formula": "ceiling_constant * log(lambda) / lambda * ||u0||_{H^s}^4"}
    return StudyResult(criteria, arts, report)


# ---------------------------------------------------------------------------
# ill-posedness


def coupling_eps(coupling: Any, rho: float) -> float:
    """Nonlinearity scale for the ill-posedness runs.

    "native" is the equation as written (eps = 1).  "phase_normalized" picks
    eps = 4 pi^2 / rho^2, for which the exact phase gap between the two data
    families at t_K is theta = pi, the value the construction assumes.
    A number is used as eps directly.
    """
    if coupling == "native":
        return 1.0
    if coupling == "phase_normalized":
        return 4.0 * math.pi**2 / rho**2
    return float(coupling)


@dataclass(frozen=True)
class IllPosedFamily:
    """The two data families at one K."""

    K: int
    s: float
    vartheta: float
    rho: float
    grid: TorusGrid

    @property
    def amplification(self) -> float:
        return math.sqrt(1.0 + math.pi * self.K ** (2 * self.s - 1 + self.vartheta))

    @property
    def t_K(self) -> float:
        return self.K ** (-self.vartheta)

    @property
    def v0(self) -> SpectralField:
        return SpectralField.from_modes(self.grid, {self.K: -1j * self.rho * self.K ** (-self.s)})

    @property
    def v0_star(self) -> SpectralField:
        return self.v0.scale(self.amplification)

    def theta(self, params: DispersionParams) -> float:
        """Exact phase gap p*(K) - p(K) at t_K: mu_eff rho^2 / (4 pi)."""
        return params.mu_eff * self.rho**2 / (4.0 * math.pi)

    def linear_closed_form(self, params: DispersionParams) -> float:
        a = self.rho * self.K ** (-self.s) * float(japanese(self.K)) ** self.s / math.sqrt(math.pi)
        return a * abs(1.0 - np.exp(1j * self.theta(params)) * self.amplification)

    def linear_direct(self, params: DispersionParams) -> float:
        """H^s norm of the two linear flows at t_K, each under its own DataCorrected symbol."""
        v, w = self.v0, self.v0_star
        p = PhaseSymbol.from_data(PhaseKind.DATA_CORRECTED, params, v)
        q = PhaseSymbol.from_data(PhaseKind.DATA_CORRECTED, params, w)
        gap = phase_difference(q, p, self.grid.indices)
        diff = v.coeffs - np.exp(1j * self.t_K * gap) * w.coeffs
        return sobolev_norm(v.with_coeffs(diff), self.s)


def nonlinear_separation(fam: IllPosedFamily, params: DispersionParams, form: str, dt: float) -> float:
    finals = []
    for u0 in (fam.v0, fam.v0_star):
        f = EvolutionForm.build(form, params, u0)
        cfg = IntegratorConfig(fam.t_K, f, dt=dt, snapshot_stride=10**9, diagnostics=False)
        finals.append(evolve(State(u0), cfg).final.field)
    return sobolev_norm(finals[0] - finals[1], fam.s)


def _illposed_table(cfg: dict, eps: float) -> list[dict]:
    params = _params(cfg, eps=eps)
    s, th, rho = float(cfg["s"]), float(cfg["vartheta"]), float(cfg["rho"])
    table = []
    for K in cfg["K"]:
        fam = IllPosedFamily(int(K), s, th, rho, TorusGrid(1.0, int(cfg["grid_factor"]) * int(K)))
        theta = fam.theta(params)
        row = {
            "K": fam.K,
            "t_K": fam.t_K,
            "amplification": fam.amplification,
            "theta": theta,
            "initial_distance": sobolev_norm(fam.v0 - fam.v0_star, s),
            "linear_closed_form": fam.linear_closed_form(params),
            "linear_direct": fam.linear_direct(params),
            "normalized_linear_sq": abs(1.0 - np.exp(1j * theta) * fam.amplification) ** 2,
            "coefficient_identity": fam.t_K * fam.K * abs(fam.v0.coefficient(fam.K)) ** 2,
            "nonlinear_separation": nonlinear_separation(fam, params, cfg["form"], float(cfg["dt"])),
        }
        if cfg["dt_halving"]:
            row["nonlinear_separation_half_dt"] = nonlinear_separation(fam, params, cfg["form"], 0.5 * float(cfg["dt"]))
        table.append(row)
    return table


def _illposed_criteria(table: list[dict], cfg: dict, prefix: str = "") -> list[Criterion]:
    rho = float(cfg["rho"])
    d0 = [r["initial_distance"] for r in table]
    sep = [r["nonlinear_separation"] for r in table]
    ratio = [a / b for a, b in zip(sep, d0)]
    theta = table[0]["theta"]
    floor = 2.0 * abs(math.sin(0.5 * theta)) * rho / math.sqrt(math.pi)
    closed_gap = max(abs(r["linear_closed_form"] - r["linear_direct"]) for r in table)
    lower = min(r["normalized_linear_sq"] / (4.0 * math.sin(0.5 * theta) ** 2) for r in table) if theta else 0.0
    return [
        Criterion(prefix + "initial_distance_decreasing", all(b < a for a, b in zip(d0, d0[1:])), d0, None,
                  "strictly decreasing in K"),
        at_most(prefix + "linear_closed_form_match", closed_gap, cfg["tol_closed_form"],
                "closed form vs direct evaluation of the two linear flows"),
        at_least(prefix + "linear_lower_bound", lower, 1.0,
                 "|1 - exp(i theta) A_K|^2 / (4 sin^2(theta/2)); equals the constant-4 bound at theta = pi"),
        at_least(prefix + "separation_floor", min(sep), floor, "2 |sin(theta/2)| rho / sqrt(pi)"),
        Criterion(prefix + "separation_over_distance_increasing", all(b > a for a, b in zip(ratio, ratio[1:])),
                  ratio, None, "strictly increasing in K"),
    ]


def run_illposed(cfg: dict, out: Path, seed: int) -> StudyResult:
    s, th = float(cfg["s"]), float(cfg["vartheta"])
    if not (0.0 <= s < 0.5 and 0.0 < th < 1.0 - 2.0 * s):
        raise ValueError("need 0 <= s < 1/2 and 0 < vartheta < 1 - 2s")
    eps = coupling_eps(cfg["coupling"], float(cfg["rho"]))
    table = _illposed_table(cfg, eps)
    cols = list(table[0])
    write_csv(out / "illposed.csv", cols, [[r[c] for c in cols] for r in table])
    arts = ["illposed.csv"]
    criteria = _illposed_criteria(table, cfg)
    report: dict = {"eps": eps, "coupling": cfg["coupling"], "table": table}
    if cfg["report_native"] and cfg["coupling"] != "native":
        native = _illposed_table({**cfg, "dt_halving": False}, 1.0)
        write_csv(out / "illposed_native.csv", list(native[0]), [list(r.values()) for r in native])
        arts.append("illposed_native.csv")
        report["native"] = {
            "table": native,
            "criteria": [c.to_json() for c in _illposed_criteria(native, cfg, "native_")],
            "note": "informational; at eps = 1 the phase gap is mu rho^2/(4 pi), far from pi",
        }
    return StudyResult(criteria, arts, report)


# ---------------------------------------------------------------------------
# Strichartz, multiplier bounds, counting, resonance audit


def run_strichartz(cfg: dict, out: Path, seed: int) -> StudyResult:
    rho = float(cfg["rho"])
    ens = StrichartzEnsemble(
        members=int(cfg["members"]),
        n_max=float(cfg["n_max"]),
        rho=rho,
        T=float(cfg["T"]),
        modulation=float(cfg["modulation"]),
        n_modulations=int(cfg["n_modulations"]),
        params=_params(cfg),
        samples_per_period=int(cfg["samples_per_period"]),
    )
    rep = strichartz_ratio_study(
        ens, float(cfg["b"]), [float(l) for l in cfg["lambdas"]], seed, int(cfg["bootstrap"]), float(cfg["confidence"])
    )
    rows = [[lam, j, float(r)] for lam, vals in rep.ratios.items() for j, r in enumerate(vals)]
    write_csv(out / "strichartz_ratios.csv", ["lambda", "member", "ratio"], rows)
    atomic_write_json(out / "strichartz_report.json", rep.to_json())
    criteria = [
        at_most("slope_band_nonpositive", rep.slope_ci[0], 0.0,
                "lower end of the bootstrap band for the slope of max ratio vs log lambda"),
        at_most("smallness", rho, 0.05, "||u(0)||_{L^2} = rho"),
    ]
    return StudyResult(criteria, ["strichartz_ratios.csv", "strichartz_report.json"], rep.to_json())


def run_multiplier_scan(cfg: dict, out: Path, seed: int) -> StudyResult:
    regions = [Region(r) for r in cfg["regions"]]
    reports, criteria = [], []
    for lam in cfg["lambdas"]:
        res = case_bound_scan(regions, float(cfg["s"]), float(cfg["b"]), float(cfg["delta"]), float(lam),
                              int(cfg["M_max"]))
        for r in regions:
            rep = res[r]
            reports.append(rep.to_json())
            if rep.empty:
                criteria.append(Criterion(f"region_{r.value}_lambda_{lam:g}", True, None, 1.0 + 1e-9, "<=",
                                          "empty region in the box"))
            else:
                criteria.append(at_most(f"region_{r.value}_lambda_{lam:g}", rep.max_ratio, 1.0 + 1e-9,
                                        f"argmax {list(rep.argmax_triple)}, {rep.count} triples"))
    atomic_write_json(out / "case_bounds.json", reports)
    return StudyResult(criteria, ["case_bounds.json"], {"reports": reports})


def run_counting(cfg: dict, out: Path, seed: int) -> StudyResult:
    params = _params(cfg)
    b, m_max = float(cfg["b"]), int(cfg["m_max"])
    sups, reports = {}, []
    doubling_gap = 0.0
    for lam in cfg["lambdas"]:
        sym = PhaseSymbol.bare(params, float(lam))
        rep = counting_M_scan(b, sym, m_max)
        sups[float(lam)] = rep.sup
        entry = rep.to_json()
        if cfg["doubling"]:
            rep2 = counting_M_scan(b, sym, 2 * m_max)
            entry["sup_doubled"] = rep2.sup
            doubling_gap = max(doubling_gap, abs(rep2.sup - rep.sup) / rep.sup)
        reports.append(entry)
    vals = np.array(list(sups.values()))
    variation = float((vals.max() - vals.min()) / vals.max())
    atomic_write_json(out / "counting_scan.json", reports)
    criteria = [
        Criterion("sup_finite", bool(np.all(np.isfinite(vals))), vals.tolist(), None, "finite"),
        at_most("lambda_variation", variation, cfg["tol_lambda_variation"], "(max - min) / max of the sup over lambda"),
    ]
    if cfg["doubling"]:
        criteria.append(at_most("m_range_doubling", doubling_gap, cfg["tol_doubling"], "relative change of the sup"))
    return StudyResult(criteria, ["counting_scan.json"], {"scans": reports})


def quintic_family_violations(sym: PhaseSymbol, N_max: int, ab_max: int) -> tuple[int, int]:
    """(violations, checked) of quintic_resonance == 0 on the degenerate family."""
    bad = checked = 0
    vals = [v for v in range(-ab_max, ab_max + 1) if v != 0]
    for N in range(1, N_max + 1):
        for a in vals:
            for b in vals:
                if a + b == 0:
                    continue
                outer, inner = sextic_family(N, a, b)
                checked += 1
                if quintic_resonance(outer, inner, sym) != 0.0:
                    bad += 1
    return bad, checked


def run_resonance_audit(cfg: dict, out: Path, seed: int) -> StudyResult:
    box, rbox = int(cfg["box"]), int(cfg["rational_box"])
    rows, int_bad, rat_bad = [], 0, 0
    r = range(-rbox, rbox + 1)
    for beta in cfg["betas"]:
        for gamma in cfg["gammas"]:
            for lam in cfg["lambdas"]:
                ib = factorization_audit(box, int(beta), int(gamma))
                rb = sum(
                    scaled_resonance_direct(a, b, c, beta, gamma, lam) != scaled_resonance_factored(a, b, c, beta, lam)
                    for a in r for b in r for c in r
                )
                int_bad += ib
                rat_bad += rb
                rows.append([beta, gamma, lam, ib, rb])
    write_csv(out / "factorization_audit.csv", ["beta", "gamma", "lambda", "violations_cleared", "violations_rational"], rows)
    family = {}
    for name, sym in (
        ("bare", PhaseSymbol.bare(DispersionParams())),
        ("data_corrected_zero", PhaseSymbol.data_corrected(DispersionParams(), 1.0, 0.0, {})),
    ):
        family[name] = quintic_family_violations(sym, int(cfg["N_max"]), int(cfg["ab_max"]))
    atomic_write_json(out / "quintic_family.json", {k: {"violations": v[0], "checked": v[1]} for k, v in family.items()})
    criteria = [
        Criterion("factorization_cleared", int_bad == 0, int_bad, 0, "==",
                  f"lambda^5-cleared integers, |m_j| <= {box}"),
        Criterion("factorization_rational", rat_bad == 0, rat_bad, 0, "==",
                  f"Fractions with explicit lambda, |m_j| <= {rbox}"),
    ]
    criteria += [
        Criterion(f"quintic_family_{k}", v[0] == 0, v[0], 0, "==", f"{v[1]} configurations") for k, v in family.items()
    ]
    return StudyResult(criteria, ["factorization_audit.csv", "quintic_family.json"], {})


STUDIES: dict[str, Callable[[dict, Path, int], StudyResult]] = {
    "conservation": run_conservation,
    "scaling": run_scaling,
    "smoothing": run_smoothing,
    "illposed": run_illposed,
    "strichartz": run_strichartz,
    "multiplier_scan": run_multiplier_scan,
    "resonance_audit": run_resonance_audit,
    "counting": run_counting,
}


def run_study(experiment: str, cfg: dict, out: Path, seed: int) -> StudyResult:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return STUDIES[experiment](cfg, out, seed)
