"""Config-driven command-line runner for the verification suites.

Each subcommand samples or constructs the relevant models, evaluates a
fixed battery of named checks against explicit numerical budgets, and
writes a JSON report (plus CSV tables for the studies) to the output
directory.  Exit status: 0 all checks passed, 1 check failures, 2
configuration errors, 3 internal errors.

Reports are deterministic: two runs with the same config and seed
produce byte-identical JSON apart from the ``timestamp`` field, which
carries the completion time and wall-clock duration.
"""

import argparse
import csv
import dataclasses
import json
import math
import os
import platform
import sys
import time
import traceback

import mpmath
import numpy as np
import scipy

from . import bgl
from . import fock
from . import mobius
from . import spacetime
from . import stdspace

EXIT_OK = 0
EXIT_CHECK_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_INTERNAL_ERROR = 3

REPORT_SCHEMA = "modnet-report/1"
OUT_ENV_VAR = "MODNET_OUT"
DEFAULT_OUT_DIR = "modnet-out"

COMMUTATION_BUDGET = 1e-11
IDENTITY_BUDGET = 1e-8
RECONSTRUCTION_BUDGET = 1e-7
HALPERIN_BUDGET = 1e-7
FORMULA_BUDGET = 1e-8
TRACE_REL_BUDGET = 1e-20
SPIN_BUDGET = 1e-9


class ConfigError(ValueError):
    """Raised when a run configuration cannot be parsed or validated."""


@dataclasses.dataclass(frozen=True)
class CheckResult:
    """One named check: measured residual against a cited budget."""

    name: str
    residual: float
    budget: float
    formula: str
    passed: bool


def _check(name, residual, budget, formula):
    residual = float(residual)
    budget = float(budget)
    return CheckResult(name, residual, budget, formula, residual <= budget)


# every check name a command may emit; docs/checks.md documents each one
CHECK_NAMES = {
    "verify-mobius": (
        "mobius-commutation",
        "mobius-group-law",
        "mobius-cover-consistency",
    ),
    "verify-stdspace": (
        "stdspace-tomita-involution",
        "stdspace-modular-balance",
        "stdspace-dual-tomita",
        "stdspace-conjugate-complement",
        "stdspace-flow-invariance",
        "stdspace-double-dual",
    ),
    "bgl-axioms": (
        "isotony",
        "poincare-covariance",
        "positivity-of-energy",
        "reeh-schlieder",
        "locality",
        "bisognano-wichmann",
        "dilation-covariance",
        "cone-standardness",
        "dilation-bisognano-wichmann",
        "modular-covariance",
        "strong-additivity",
    ),
    "reconstruct-mobius": (
        "reconstruction-identity",
        "reconstruction-commutator",
        "reconstruction-left-cancellation",
        "reconstruction-at-zero",
    ),
    "break-bw": (
        "counterexample-formula",
        "counterexample-wedge-roundtrip",
        "counterexample-gauge-invariance",
    ),
    "lightcone-defect": (
        "cone-defect-monotone",
        "cone-defect-below-frozen",
    ),
    "spin-statistics": (
        "spin-statistics-integer",
        "spin-statistics-violation-detected",
    ),
    "trace-class": (
        "trace-class-truncation",
        "trace-class-selfdual-value",
    ),
    "fock-checks": (
        "weyl-reduction-consistency",
        "weyl-gram-positivity",
        "exponential-overlap",
        "second-quantization-exponential",
        "second-quantization-functorial",
        "tomita-lift-consistency",
        "weyl-locality",
    ),
    "halperin-bench": (
        "halperin-agreement",
        "halperin-convergence",
    ),
}

DEFAULT_CONFIGS = {
    "verify-mobius": {"samples": 1000, "parameter_range": 2.0, "seed": 0},
    "verify-stdspace": {"dim": 8, "samples": 50, "seed": 0},
    "bgl-axioms": {
        "model": "chiralSum", "n": None, "h": None, "mass": 1.0,
        "charge": 1.0, "masses": 4, "mass_min": 0.5, "mass_max": 4.0,
        "seed": 0,
    },
    "reconstruct-mobius": {
        "n": 33, "h": math.pi, "t_values": [0.5, 1.0, 1.5, 2.0], "seed": 0,
    },
    "break-bw": {
        "charge": 1.0, "n": 33, "h": math.pi,
        "t_values": [0.5, 1.0, 1.5], "seed": 0,
    },
    "lightcone-defect": {
        "masses": [1.0], "ladder": [[17, 2], [33, 8], [65, 32]],
        "spacing": 0.4, "frozen": bgl.FROZEN_CONE_DEFECT, "seed": 0,
    },
    "spin-statistics": {"pairs": 50, "seed": 0},
    "trace-class": {
        "betas": [0.5, math.log(2.0), 2.0], "n_terms": 200, "seed": 0,
    },
    "fock-checks": {"modes": 3, "order": 10, "samples": 4, "seed": 0},
    "halperin-bench": {
        "dim": 8, "pairs": 20, "tol": 1e-9, "max_iter": 5000, "seed": 0,
    },
}


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def load_config(command, path):
    """Merge a JSON config file over the command defaults.

    ``path`` may be None (pure defaults).  Empty files, non-object
    payloads, unknown keys, and mismatched value types are rejected.
    """
    defaults = dict(DEFAULT_CONFIGS[command])
    if path is None:
        return defaults
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not text.strip():
        raise ConfigError(f"config file {path} is empty")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a key-value object")
    if not data:
        raise ConfigError(
            f"config file {path} is empty; omit --config to use defaults")
    for key, value in data.items():
        if key not in defaults:
            raise ConfigError(
                f"unknown config key {key!r} for command {command!r} "
                f"(known: {', '.join(sorted(defaults))})")
        base = defaults[key]
        if base is None or value is None:
            pass
        elif isinstance(base, bool) != isinstance(value, bool):
            raise ConfigError(f"config key {key!r} has the wrong type")
        elif isinstance(base, (int, float)) and not isinstance(
                value, (int, float)):
            raise ConfigError(f"config key {key!r} must be a number")
        elif isinstance(base, str) and not isinstance(value, str):
            raise ConfigError(f"config key {key!r} must be a string")
        elif isinstance(base, list) and not isinstance(value, list):
            raise ConfigError(f"config key {key!r} must be a list")
        defaults[key] = value
    return defaults


def _resolve_out_dir(arg):
    if arg:
        return arg
    env = os.environ.get(OUT_ENV_VAR)
    if env:
        return env
    return DEFAULT_OUT_DIR


# ---------------------------------------------------------------------------
# command runners: each returns (checks, tables); tables maps a table
# name to (fieldnames, rows)
# ---------------------------------------------------------------------------


def _run_verify_mobius(cfg, rng, scale):
    samples = int(cfg["samples"])
    span = float(cfg["parameter_range"])
    worst_comm = 0.0
    for pair in mobius.COMMUTATION_PAIRS:
        count = 0
        while count < samples:
            t, s = rng.uniform(-span, span, size=2)
            try:
                residual = mobius.commutation_residual(t, s, pair)
            except mobius.MobiusDomainError:
                continue
            count += 1
            worst_comm = max(worst_comm, residual)

    factories = (mobius.MobiusElement.rotation, mobius.MobiusElement.dilation,
                 mobius.MobiusElement.translation)
    worst_law = 0.0
    for _ in range(max(1, samples // 10)):
        word = [factories[int(rng.integers(3))](float(rng.uniform(-1.5, 1.5)))
                for _ in range(4)]
        combined = word[0]
        for g in word[1:]:
            combined = combined.compose(g)
        for u in rng.uniform(-math.pi, math.pi, size=8):
            stepped = u
            for g in reversed(word):
                stepped = g.act_angle(stepped)
            gap = mobius.wrap_angle(combined.act_angle(u) - stepped)
            worst_law = max(worst_law, abs(gap))

    cover_factories = (mobius.CoverElement.rotation, mobius.CoverElement.dilation,
                       mobius.CoverElement.translation)
    worst_cover = 0.0
    for _ in range(max(1, samples // 10)):
        params = rng.uniform(-1.5, 1.5, size=3)
        picks = rng.integers(3, size=3)
        lifted = cover_factories[picks[0]](params[0])
        base = factories[picks[0]](params[0])
        for k in (1, 2):
            lifted = lifted.compose(cover_factories[picks[k]](params[k]))
            base = base.compose(factories[picks[k]](params[k]))
        a, b = lifted.project().mat, base.mat
        worst_cover = max(worst_cover, min(
            np.max(np.abs(a - b)), np.max(np.abs(a + b))))

    return [
        _check("mobius-commutation", worst_comm, COMMUTATION_BUDGET * scale,
               "max flow-commutation residual over sampled (t, s) pairs "
               "<= 1e-11 * budget_scale"),
        _check("mobius-group-law", worst_law, 1e-10 * scale,
               "max boundary-action defect of composed words "
               "<= 1e-10 * budget_scale"),
        _check("mobius-cover-consistency", worst_cover, 1e-12 * scale,
               "max projection defect of lifted words "
               "<= 1e-12 * budget_scale"),
    ], {}


def _random_real_span(rng, parent, k):
    vecs = rng.normal(size=(k, parent.n)) + 1j * rng.normal(size=(k, parent.n))
    return stdspace.make_subspace(list(vecs), parent)


def _random_standard(rng, parent):
    # reject draws where H meets iH below 0.05 rad; the modular operator
    # norm grows like 4 / angle^2 there and the identity budgets cannot
    # be met in double precision
    while True:
        h = _random_real_span(rng, parent, parent.n)
        rep = stdspace.standardness(h)
        if rep.standard and rep.minimal_angle > 0.05:
            return h


def _run_verify_stdspace(cfg, rng, scale):
    parent = stdspace.ComplexSpace(int(cfg["dim"]))
    worst = dict.fromkeys(CHECK_NAMES["verify-stdspace"], 0.0)
    for _ in range(int(cfg["samples"])):
        h = _random_standard(rng, parent)
        s_real, md = stdspace.modular_data(h)
        dual = stdspace.symplectic_complement(h)
        s_dual, _ = stdspace.modular_data(dual)
        eye = np.eye(parent.real_dim)

        worst["stdspace-tomita-involution"] = max(
            worst["stdspace-tomita-involution"],
            np.linalg.norm(s_real @ s_real - eye, 2))
        balance = md.J @ md.Delta @ md.J @ md.Delta - eye
        worst["stdspace-modular-balance"] = max(
            worst["stdspace-modular-balance"],
            np.linalg.norm(balance, 2) / np.linalg.norm(md.Delta, 2))
        worst["stdspace-dual-tomita"] = max(
            worst["stdspace-dual-tomita"],
            np.linalg.norm(s_dual - s_real.T, 2))
        worst["stdspace-conjugate-complement"] = max(
            worst["stdspace-conjugate-complement"],
            stdspace.subspace_distance(h.transform(md.J), dual))
        for t in (0.37, 1.23):
            worst["stdspace-flow-invariance"] = max(
                worst["stdspace-flow-invariance"],
                stdspace.subspace_distance(h.transform(md.delta_it(t)), h))
        worst["stdspace-double-dual"] = max(
            worst["stdspace-double-dual"],
            stdspace.subspace_distance(
                stdspace.symplectic_complement(dual), h))

    formulas = {
        "stdspace-tomita-involution": "||S^2 - 1|| <= 1e-8 * budget_scale",
        "stdspace-modular-balance":
            "||J Delta J Delta - 1|| / ||Delta|| <= 1e-8 * budget_scale",
        "stdspace-dual-tomita":
            "||S_dual - S*|| <= 1e-8 * budget_scale",
        "stdspace-conjugate-complement":
            "distance(J H, H') <= 1e-8 * budget_scale",
        "stdspace-flow-invariance":
            "distance(Delta^{it} H, H) <= 1e-8 * budget_scale",
        "stdspace-double-dual":
            "distance(H'', H) <= 1e-8 * budget_scale",
    }
    checks = [_check(name, worst[name], IDENTITY_BUDGET * scale,
                     formulas[name])
              for name in CHECK_NAMES["verify-stdspace"]]
    return checks, {}


_KIND_GRID_DEFAULTS = {
    "chiralSum": (33, math.pi),
    "twisted": (33, math.pi),
    "massive": (128, 2.5),
    "directIntegral": (32, 2.5),
}


def _build_model(cfg):
    kind = cfg["model"]
    if kind not in _KIND_GRID_DEFAULTS:
        raise ConfigError(
            f"unknown model kind {kind!r} "
            f"(known: {', '.join(sorted(_KIND_GRID_DEFAULTS))})")
    n0, h0 = _KIND_GRID_DEFAULTS[kind]
    n = int(cfg["n"]) if cfg["n"] is not None else n0
    h = float(cfg["h"]) if cfg["h"] is not None else h0
    try:
        if kind == "chiralSum":
            return bgl.NetModel.chiral_sum(n=n, h=h)
        if kind == "twisted":
            return bgl.NetModel.twisted(n=n, h=h, charge=float(cfg["charge"]))
        if kind == "massive":
            return bgl.NetModel.massive(n=n, h=h, mass=float(cfg["mass"]))
        return bgl.NetModel.direct_integral(
            masses=int(cfg["masses"]), n=n, h=h,
            mass_min=float(cfg["mass_min"]), mass_max=float(cfg["mass_max"]))
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}") from exc


def _run_bgl_axioms(cfg, rng, scale):
    net = _build_model(cfg)
    report = bgl.axioms_report(net, tol=bgl.BLOCK_TOL * scale)
    checks = []
    for name, entry in report.entries.items():
        slug = name.lower().replace(" ", "-")
        formula = (f"residual <= {entry.tol:.3e} "
                   "(base tolerance 1e-8 * budget_scale; the "
                   "modular-consistency entries use max(tolerance, "
                   "model epsilon))")
        checks.append(_check(slug, entry.residual, entry.tol, formula))
    rows = [{"check": c.name, "residual": c.residual, "budget": c.budget,
             "passed": c.passed} for c in checks]
    return checks, {"entries": (("check", "residual", "budget", "passed"),
                                rows)}


def _run_reconstruct_mobius(cfg, rng, scale):
    try:
        net = bgl.NetModel.chiral_sum(n=int(cfg["n"]), h=float(cfg["h"]))
        report = bgl.reconstruct_ur(
            net, t_values=tuple(float(t) for t in cfg["t_values"]))
    except ValueError as exc:
        raise ConfigError(f"invalid reconstruction parameters: {exc}") from exc
    budget = RECONSTRUCTION_BUDGET * scale
    checks = [
        _check("reconstruction-identity", report.max_identity, budget,
               "max ||Delta_D^{it} - U_R(t) U_L(t)|| over the t ladder "
               "<= 1e-7 * budget_scale"),
        _check("reconstruction-commutator", report.max_commutator, budget,
               "max ||[U_R(t), U_L(t)]|| over the t ladder "
               "<= 1e-7 * budget_scale"),
        _check("reconstruction-left-cancellation",
               max(report.left_cancellation), budget,
               "max left-mover cancellation defect in U_R "
               "<= 1e-7 * budget_scale"),
        _check("reconstruction-at-zero", report.identity_at_zero,
               1e-10 * scale,
               "||U_R(0) U_L(0) - 1|| <= 1e-10 * budget_scale"),
    ]
    rows = [{"t": t, "identity_residual": a, "commutator_residual": b,
             "left_cancellation": c}
            for t, a, b, c in zip(report.t_values, report.identity_residuals,
                                  report.commutator_residuals,
                                  report.left_cancellation)]
    fields = ("t", "identity_residual", "commutator_residual",
              "left_cancellation")
    return checks, {"flow": (fields, rows)}


def _run_break_bw(cfg, rng, scale):
    try:
        net = bgl.NetModel.twisted(n=int(cfg["n"]), h=float(cfg["h"]),
                                   charge=float(cfg["charge"]))
        report = bgl.counterexample_bw(
            net, t_values=tuple(float(t) for t in cfg["t_values"]))
    except ValueError as exc:
        raise ConfigError(f"invalid counterexample parameters: {exc}") from exc
    checks = [
        _check("counterexample-formula", report.max_formula_residual,
               FORMULA_BUDGET * scale,
               "max | deviation(t) - |e^{2 pi i q t} - 1| | "
               "<= 1e-8 * budget_scale"),
        _check("counterexample-wedge-roundtrip", report.wedge_roundtrip,
               net.epsilon * scale,
               "wedge modular roundtrip <= model epsilon * budget_scale; "
               "epsilon = 10 * (flow residual + 1e-10)"),
        _check("counterexample-gauge-invariance", report.gauge_residual,
               1e-10 * scale,
               "inner-symmetry invariance of the wedge subspace "
               "<= 1e-10 * budget_scale"),
    ]
    rows = [{"t": t, "deviation": d, "predicted": p}
            for t, d, p in zip(report.t_values, report.deviations,
                               report.predicted)]
    return checks, {"deviation": (("t", "deviation", "predicted"), rows)}


def _run_lightcone_defect(cfg, rng, scale):
    try:
        ladder = tuple((int(n), int(c)) for n, c in cfg["ladder"])
        study = bgl.lightcone_separating_study(
            masses=tuple(float(m) for m in cfg["masses"]), ladder=ladder,
            spacing=float(cfg["spacing"]), frozen=float(cfg["frozen"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid study parameters: {exc}") from exc
    by_mass = {}
    for row in study.rows:
        by_mass.setdefault(row.mass, []).append(row.defect)
    rise = 0.0
    for defects in by_mass.values():
        for a, b in zip(defects, defects[1:]):
            rise = max(rise, b - a)
    checks = [
        _check("cone-defect-monotone", max(rise, 0.0), 1e-12 * scale,
               "max defect increase along the refinement ladder "
               "<= 1e-12 * budget_scale"),
        _check("cone-defect-below-frozen", study.finest_defect,
               study.frozen_value,
               "finest-level defect <= frozen comparison value "
               f"({study.frozen_value})"),
    ]
    rows = [dataclasses.asdict(row) for row in study.rows]
    fields = ("mass", "grid", "cones", "sum_dim", "defect")
    return checks, {"ladder": (fields, rows)}


def _run_spin_statistics(cfg, rng, scale):
    count = int(cfg["pairs"])
    base = rng.uniform(0.0, 3.0, size=count)
    steps = rng.integers(-3, 4, size=count)
    good = [(mu, mu + k) for mu, k in zip(base, steps)]
    bad = [(mu, mu + k + 0.5) for mu, k in zip(base, steps)]
    ok_good, worst_good = bgl.spin_statistics_spectrum_check(good)
    ok_bad, worst_bad = bgl.spin_statistics_spectrum_check(bad)
    violation = abs(worst_bad - 0.5) + (1.0 if ok_bad else 0.0)
    return [
        _check("spin-statistics-integer", worst_good, SPIN_BUDGET * scale,
               "max distance of spectrum differences from the integers "
               "<= 1e-9 * budget_scale"),
        _check("spin-statistics-violation-detected", violation,
               SPIN_BUDGET * scale,
               "half-integer-shifted battery must fail with worst defect "
               "1/2: |worst - 0.5| <= 1e-9 * budget_scale"),
    ], {}


def _run_trace_class(cfg, rng, scale):
    rows = []
    worst_rel = 0.0
    for beta in cfg["betas"]:
        try:
            value, closed, diff, tail = bgl.trace_class_partition(
                float(beta), n_terms=int(cfg["n_terms"]))
        except ValueError as exc:
            raise ConfigError(f"invalid inverse temperature: {exc}") from exc
        rel = diff / closed
        worst_rel = max(worst_rel, rel)
        rows.append({"beta": float(beta), "value": value,
                     "closed_form": closed, "abs_diff": diff,
                     "tail_bound": tail, "relative_error": rel})
    _, closed_ln2, _, _ = bgl.trace_class_partition(
        math.log(2.0), n_terms=int(cfg["n_terms"]))
    checks = [
        _check("trace-class-truncation", worst_rel, TRACE_REL_BUDGET * scale,
               "max relative truncation error over the sampled inverse "
               "temperatures <= 1e-20 * budget_scale"),
        _check("trace-class-selfdual-value", abs(closed_ln2 - 1.0), 0.0,
               "closed form equals 1 exactly at inverse temperature ln 2"),
    ]
    fields = ("beta", "value", "closed_form", "abs_diff", "tail_bound",
              "relative_error")
    return checks, {"partition": (fields, rows)}


def _run_fock_checks(cfg, rng, scale):
    modes = int(cfg["modes"])
    order = int(cfg["order"])
    samples = int(cfg["samples"])

    def amp(norm):
        f = rng.normal(size=modes) + 1j * rng.normal(size=modes)
        return f * (norm / np.linalg.norm(f))

    worst_word = 0.0
    for _ in range(samples):
        letters = [amp(0.6) for _ in range(4)]
        flat = fock.weyl_reduce(letters)
        nested = fock.weyl_compose(fock.weyl_reduce(letters[:2]),
                                   fock.weyl_reduce(letters[2:]))
        worst_word = max(worst_word, abs(flat[0] - nested[0]),
                         float(np.max(np.abs(flat[1] - nested[1]))))

    amps = [np.zeros(modes)] + [amp(0.7) for _ in range(4)]
    gram = np.array([[fock.vacuum_expectation(fock.WeylWord.of(-fi, fj))
                      for fj in amps] for fi in amps])
    eig = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    gram_tail = fock.tail_bound(0.7, order)

    worst_overlap = 0.0
    overlap_budget = 0.0
    worst_gamma = 0.0
    worst_funct = 0.0
    for _ in range(samples):
        f, g = amp(0.8), amp(0.7)
        ev_f = fock.exponential_vector(f, order)
        ev_g = fock.exponential_vector(g, order)
        pairing = complex(np.vdot(f, g))
        worst_overlap = max(worst_overlap,
                            abs(ev_f.inner(ev_g) - np.exp(pairing)))
        overlap_budget = max(
            overlap_budget,
            abs(pairing) ** (order + 1) / math.factorial(order + 1))
        a = rng.normal(size=(modes, modes)) + 1j * rng.normal(
            size=(modes, modes))
        a *= 0.9 / np.linalg.norm(a, 2)
        b = rng.normal(size=(modes, modes)) + 1j * rng.normal(
            size=(modes, modes))
        b *= 0.9 / np.linalg.norm(b, 2)
        worst_gamma = max(worst_gamma, (
            fock.gamma_apply(a, ev_g)
            - fock.exponential_vector(a @ g, order)).norm())
        worst_funct = max(worst_funct, (
            fock.gamma_apply(a @ b, ev_f)
            - fock.gamma_apply(a, fock.gamma_apply(b, ev_f))).norm())

    net = bgl.NetModel.massive(n=4, h=2.5)
    sub = net.wedge_subspace(spacetime.Region.wedge_right((0.0, 0.0)))
    f = net.parent.extract(sub.basis[:, 0]) * 0.8
    tomita_residual = fock.second_quantized_tomita_check(sub, f, order)
    tomita_budget = net.epsilon + fock.tail_bound(0.8, order) + 1e-8

    chiral = bgl.NetModel.chiral_sum(n=9)
    locality = fock.locality_commutation_check(
        chiral, spacetime.Region.wedge_right((0.0, 0.0)),
        spacetime.Region.wedge_left((0.0, 0.0)),
        rng=np.random.default_rng(int(rng.integers(1 << 31))))

    return [
        _check("weyl-reduction-consistency", worst_word, 1e-11 * scale,
               "bracketing-independence of reduced Weyl words "
               "<= 1e-11 * budget_scale"),
        _check("weyl-gram-positivity", max(0.0, -float(eig.min())),
               gram_tail * scale + 1e-12,
               "Gram matrix of Weyl states has min eigenvalue >= "
               "-truncation tail(0.7, order) * budget_scale"),
        _check("exponential-overlap", worst_overlap,
               overlap_budget * scale + 1e-10,
               "|<e(f), e(g)> - exp <f, g>| <= exp-series tail "
               "+ 1e-10, scaled by budget_scale"),
        _check("second-quantization-exponential", worst_gamma, 1e-10 * scale,
               "||Gamma(A) e(g) - e(A g)|| <= 1e-10 * budget_scale"),
        _check("second-quantization-functorial", worst_funct, 1e-10 * scale,
               "||Gamma(A B) - Gamma(A) Gamma(B)|| on sampled vectors "
               "<= 1e-10 * budget_scale"),
        _check("tomita-lift-consistency", tomita_residual, tomita_budget,
               "||Gamma(S) W(f) vac - W(-f) vac|| <= model epsilon "
               "+ truncation tail + 1e-8"),
        _check("weyl-locality", locality.max_form, 1e-9 * scale,
               "max |Im <f, g>| over spacelike one-particle pairs "
               "<= 1e-9 * budget_scale"),
    ], {}


def _run_halperin_bench(cfg, rng, scale):
    parent = stdspace.ComplexSpace(int(cfg["dim"]))
    n = parent.n
    tol = float(cfg["tol"])
    max_iter = int(cfg["max_iter"])
    caps = [c for c in (8, 32, 128, 512, 2048) if c < max_iter] + [max_iter]

    rows = []
    worst_distance = 0.0
    failures = 0
    for index in range(int(cfg["pairs"])):
        if index % 2 == 0:
            # generic pair with trivial intersection; dimensions kept away
            # from the marginal regime dim_a + dim_b = 2n, where principal
            # angles degenerate and alternating projections stall
            a = _random_real_span(rng, parent, int(rng.integers(3, n - 1)))
            b = _random_real_span(rng, parent, int(rng.integers(3, n - 1)))
        else:
            shared = _random_real_span(rng, parent, n // 2)
            a = stdspace.sum_closure(
                [shared, _random_real_span(rng, parent, n // 2)])
            b = stdspace.sum_closure(
                [shared, _random_real_span(rng, parent, n // 2)])
        exact = stdspace.intersect([a, b], method="exact")
        iterative = None
        used_cap = -1
        for cap in caps:
            try:
                iterative = stdspace.intersect(
                    [a, b], method="halperin", max_iter=cap, tol=tol)
                used_cap = cap
                break
            except stdspace.HalperinNonConvergence:
                continue
        if iterative is None:
            failures += 1
            distance = float("nan")
            dim_iter = -1
        else:
            distance = stdspace.subspace_distance(exact, iterative)
            worst_distance = max(worst_distance, distance)
            dim_iter = iterative.dim
        rows.append({"pair": index, "dim_a": a.dim, "dim_b": b.dim,
                     "dim_exact": exact.dim, "dim_halperin": dim_iter,
                     "distance": distance, "iteration_cap": used_cap})

    checks = [
        _check("halperin-agreement", worst_distance, HALPERIN_BUDGET * scale,
               "max distance between iterative and exact intersections "
               "<= 1e-7 * budget_scale"),
        _check("halperin-convergence", float(failures), 0.5,
               "every pair converges within the iteration cap "
               "(failure count = 0)"),
    ]
    fields = ("pair", "dim_a", "dim_b", "dim_exact", "dim_halperin",
              "distance", "iteration_cap")
    return checks, {"pairs": (fields, rows)}


RUNNERS = {
    "verify-mobius": _run_verify_mobius,
    "verify-stdspace": _run_verify_stdspace,
    "bgl-axioms": _run_bgl_axioms,
    "reconstruct-mobius": _run_reconstruct_mobius,
    "break-bw": _run_break_bw,
    "lightcone-defect": _run_lightcone_defect,
    "spin-statistics": _run_spin_statistics,
    "trace-class": _run_trace_class,
    "fock-checks": _run_fock_checks,
    "halperin-bench": _run_halperin_bench,
}


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _environment_fingerprint():
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "mpmath": mpmath.__version__,
        "platform": platform.platform(),
        "machine": platform.machine(),
    }


def run_command(command, config, seed, budget_scale):
    """Execute one command; returns (report dict, tables dict)."""
    rng = np.random.default_rng(seed)
    started = time.perf_counter()
    checks, tables = RUNNERS[command](config, rng, budget_scale)
    elapsed = time.perf_counter() - started
    for c in checks:
        if c.name not in CHECK_NAMES[command]:
            raise RuntimeError(f"undeclared check name {c.name!r}")
    report = {
        "schema": REPORT_SCHEMA,
        "command": command,
        "config": config,
        "seed": seed,
        "budget_scale": budget_scale,
        "checks": [dataclasses.asdict(c) for c in checks],
        "passed": all(c.passed for c in checks),
        "environment": _environment_fingerprint(),
        "timestamp": {
            "completed_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "wall_time_s": round(elapsed, 6),
        },
    }
    return report, tables


def write_report(report, tables, out_dir):
    """Write the JSON report and CSV tables; returns the JSON path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"{report['command']}.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for name, (fields, rows) in tables.items():
        table_path = os.path.join(out_dir,
                                  f"{report['command']}-{name}.csv")
        with open(table_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            writer.writerows(rows)
    return path


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="modnet",
        description="verification suites and numerical studies for "
                    "modular-theoretic lattice models")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in RUNNERS:
        p = sub.add_parser(command, help=f"run the {command} battery")
        p.add_argument("--config", default=None,
                       help="JSON config file (omit for defaults)")
        p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_ENV_VAR} "
                            f"or ./{DEFAULT_OUT_DIR})")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--budget-scale", type=float, default=1.0,
                       help="multiply all pass/fail budgets")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.command, args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    config["seed"] = seed
    try:
        report, tables = run_command(args.command, config, seed,
                                     args.budget_scale)
        path = write_report(report, tables, _resolve_out_dir(args.out))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL_ERROR
    for entry in report["checks"]:
        tag = "PASS" if entry["passed"] else "FAIL"
        print(f"{tag} {entry['name']}: residual {entry['residual']:.3e} "
              f"vs budget {entry['budget']:.3e}")
    n_pass = sum(1 for e in report["checks"] if e["passed"])
    verdict = "PASS" if report["passed"] else "FAIL"
    print(f"{args.command}: {verdict} ({n_pass}/{len(report['checks'])} "
          f"checks) -> {path}")
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILURE


if __name__ == "__main__":
    sys.exit(main())
