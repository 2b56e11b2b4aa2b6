"""Acceptance criteria 1-15, each run through the batch runner where one exists.

Every test gathers all of its sub-checks before failing, and the runtime
bound is one of them.  The terminal summary prints one pass/fail line per
criterion.
"""

import csv
import time

import numpy as np
import pytest

from geoparallels.chart_lab import CHARTS, TopologicalData, hitchin_thorpe
from geoparallels.cli_reports import ExperimentConfig, run, run_dir_for
from geoparallels.decomposition_lab import gauss_bonnet_mesh
from geoparallels.surface_core import genus2_mesh, icosphere, torus, triangulate


@pytest.fixture(scope="module")
def results(tmp_path_factory):
    return tmp_path_factory.mktemp("results")


class Ledger:
    """Sub-check collector for one criterion."""

    def __init__(self, results, seconds):
        self.results = results
        self.seconds = seconds
        self.failures = []
        self.start = time.perf_counter()

    def run(self, subcommand, target="", seed=0, **params):
        cfg = ExperimentConfig(subcommand, target, params, None, seed)
        m = run(cfg, self.results)
        return m, run_dir_for(cfg, self.results)

    def expect(self, ok, label):
        if not ok:
            self.failures.append(label)

    def manifest(self, m, *names):
        """Require the named checks, or every non-note check, to pass."""
        names = names or [k for k, v in m.checks.items() if v != "n/a"]
        for k in names:
            self.expect(m.checks.get(k) == "pass", f"{m.subcommand} {m.target}: {k} = {m.checks.get(k)}")

    def close(self):
        elapsed = time.perf_counter() - self.start
        self.expect(elapsed < self.seconds, f"runtime {elapsed:.1f} s exceeds {self.seconds} s")
        assert not self.failures, "; ".join(self.failures)


@pytest.fixture
def ledger(request, results):
    seconds = request.node.get_closest_marker("criterion").args[2]
    return Ledger(results, seconds)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.criterion(1, "minimality certification", 5)
def test_criterion_01_minimality(ledger):
    for name in ("catenoid", "enneper", "bour", "plane"):
        m, _ = ledger.run("verify-minimal", name, samples=1000, tol=1e-10)
        ledger.manifest(m, "analytic_max_abs_H")
    m, _ = ledger.run("verify-minimal", "scherk", samples=1000, msq_tol=1e-8)
    ledger.manifest(m, "msq_residual_max")
    ledger.close()


@pytest.mark.criterion(2, "discrete mean curvature convergence", 30)
def test_criterion_02_convergence(ledger):
    m, d = ledger.run("verify-minimal", "sphere-ladder", levels=[2, 3, 4], min_order=1.7)
    ledger.manifest(m)
    ledger.expect(len(read_csv(d / "ladder.csv")) == 3, "three-level ladder")
    ledger.close()


@pytest.mark.criterion(3, "mean curvature flow shrinker law", 60)
def test_criterion_03_mcf(ledger):
    m, d = ledger.run("mcf", "sphere", scheme="explicit", dt=1e-4, t_end=0.1, tol=1e-3)
    ledger.manifest(m, "mean_radius", "area_max_increase", "stop_reason")
    rows = read_csv(d / "trajectory.csv")
    ledger.expect(abs(float(rows[-1]["t"]) - 0.1) < 1e-12, "run reaches t = 0.1")
    ledger.close()


@pytest.mark.criterion(4, "Ricci flow families", 10)
def test_criterion_04_ricci(ledger):
    m, d = ledger.run("ricci", "s4", theta0=[1.0], dt=0.01, t_end=0.1, tol=1e-4)
    ledger.manifest(m, "closed_form_error")
    s = float(read_csv(d / "parameters.csv")[-1]["theta0"])
    ledger.expect(abs(s - 0.4) <= 1e-4, f"s(0.1) = {s}")
    m, d = ledger.run("ricci", "torus", dt=0.02, t_end=0.1)
    ledger.manifest(m, "torus_drift")
    m, d = ledger.run("ricci", "s4", theta0=[1.0], dt=0.01, t_end=0.1, normalized=True)
    drift = abs(float(read_csv(d / "parameters.csv")[-1]["theta0"]) - 1.0)
    ledger.expect(drift <= 1e-6, f"normalized drift {drift}")
    ledger.close()


@pytest.mark.criterion(5, "Morse index of disk and catenoids", 120)
def test_criterion_05_morse_index(ledger):
    m, _ = ledger.run("spectrum", "disk", n=40, rel_tol=0.01)
    ledger.manifest(m, "lambda_1_rel_error", "morse_index")
    for a in (0.5, 2.0):
        m, _ = ledger.run("spectrum", "catenoid", a=a, n=32)
        ledger.manifest(m, "morse_index")
    m, _ = ledger.run("spectrum", "catenoid-transition", lo=0.5, hi=2.0, n=32, transition_tol=0.02)
    ledger.manifest(m, "transition_rel_error")
    ledger.close()


@pytest.mark.criterion(6, "Lichnerowicz spectrum of the flat torus", 5)
def test_criterion_06_lichnerowicz(ledger):
    m, _ = ledger.run("spectrum", "lichnerowicz-torus", side=1.0)
    ledger.manifest(m, "zero_multiplicity", "first_positive", "tt_dims_nonzero_modes", "einstein_index")
    ledger.close()


@pytest.mark.criterion(7, "curvature oracle", 30)
def test_criterion_07_curvature(ledger):
    m, d = ledger.run("einstein-check", "s4", tol=1e-5)
    ledger.manifest(m, "lambda_hat", "einstein_residual")
    rm = [float(r["rm_norm2"]) for r in read_csv(d / "curvature.csv")]
    ledger.expect(max(abs(x - 24) for x in rm) <= 1e-3, f"|Rm|^2 on S^4 = {rm}")
    m, _ = ledger.run("einstein-check", "fs", tol=1e-4)
    ledger.manifest(m, "lambda_hat", "einstein_residual")
    for name in CHARTS:
        m, _ = ledger.run("einstein-check", name)
        ledger.manifest(m, "bianchi_residual")
    m, _ = ledger.run("einstein-check", "perturbed")
    ledger.manifest(m, "einstein_residual")
    ledger.close()


@pytest.mark.criterion(8, "local symmetry", 30)
def test_criterion_08_local_symmetry(ledger):
    for name in ("flat", "s4", "fs", "perturbed"):
        m, _ = ledger.run("einstein-check", name)
        ledger.manifest(m, "nabla_rm")
    ledger.close()


@pytest.mark.criterion(9, "Einstein-Hilbert functional", 20)
def test_criterion_09_einstein_hilbert(ledger):
    for name in CHARTS:
        m, d = ledger.run("einstein-check", name, einstein_hilbert=True, scale=2.0, seed=9)
        ledger.manifest(m, "eh_scale_invariance")
        if name == "s4":
            ledger.manifest(m, "eh_rel_error")
            value = float(read_csv(d / "einstein_hilbert.csv")[0]["value"])
            ledger.expect(abs(value - 61.56) / 61.56 <= 5e-3, f"S^4 value {value}")
    ledger.close()


@pytest.mark.criterion(10, "monotonicity profiles", 60)
def test_criterion_10_monotonicity(ledger):
    m, _ = ledger.run("monotonicity", "plane")
    ledger.manifest(m, "max_abs_ratio_minus_1")
    m, _ = ledger.run("monotonicity", "catenoid")
    ledger.manifest(m, "nondecreasing", "min_ratio")
    m, _ = ledger.run("monotonicity", "flat")
    ledger.manifest(m, "max_abs_ratio_minus_half_pi2", "verdict")
    for name in ("s4", "hyperbolic"):
        m, _ = ledger.run("monotonicity", name)
        ledger.manifest(m, "verdict")
    ledger.close()


@pytest.mark.criterion(11, "energy probes", 30)
def test_criterion_11_probes(ledger):
    m, _ = ledger.run("regularity", "catenoid", rel_tol=0.01)
    ledger.manifest(m, "energy_rel_error")
    m, _ = ledger.run("regularity", "s4", r=0.5, rel_tol=0.01)
    ledger.manifest(m, "energy_rel_error")
    ledger.close()


@pytest.mark.criterion(12, "sheeted and thick/thin decompositions", 120)
def test_criterion_12_decompositions(ledger):
    cases = [
        (("plane",), {"n0": 4.0}, "sheeted"),
        (("plane",), {"n0": 3.0}, "non_sheeted"),
        (("torus",), {"chart": {"side": 3.0}, "V0": 1.0}, "thick"),
        (("flat",), {"V0": 10.0}, "thin"),
        (("s4",), {"V0": 1.0, "eps": 1.0}, "thick"),
    ]
    for (target,), params, want in cases:
        m, d = ledger.run("decompose", target, **params)
        ledger.manifest(m)
        got = {r["label"] for r in read_csv(d / "labels.csv")}
        ledger.expect(got == {want}, f"{target} {params}: labels {got}, expected {want}")
        again, d2 = ledger.run("decompose", target, **params)
        ledger.expect((d2 / "labels.csv").read_bytes() == (d / "labels.csv").read_bytes(), f"{target} rerun")
    ledger.close()


@pytest.mark.criterion(13, "topology", 5)
def test_criterion_13_topology(ledger):
    for mesh, chi in ((icosphere(2), 2), (triangulate(torus(), 24, 12), 0), (genus2_mesh(), -2)):
        total, chi_hat = gauss_bonnet_mesh(mesh)
        ledger.expect(chi_hat == chi, f"chi {chi_hat} != {chi}")
    verdicts = [hitchin_thorpe(TopologicalData(tau, chi)) for tau, chi in ((0, 2), (1, 3), (5, 3))]
    ledger.expect(verdicts == [True, True, False], f"Hitchin-Thorpe verdicts {verdicts}")
    ledger.close()


@pytest.mark.criterion(14, "Veronese suite", 60)
def test_criterion_14_veronese(ledger):
    m, _ = ledger.run("veronese", "cp2", samples=1000)
    ledger.manifest(
        m, "lift_norm_error", "horizontality_max", "hopf_lift_equals_veronese", "projector_norm_error",
        "pullback_ratio_mean", "pullback_ratio_cv", "lambda_fit_rel_error", "fit_residual", "radius_check",
        "sphere_mean_curvature",
    )
    ledger.close()


@pytest.mark.criterion(15, "bitwise reproducibility", 5)
def test_criterion_15_reproducibility(ledger, tmp_path):
    configs = [
        ExperimentConfig("spectrum", "lichnerowicz-torus", {}, None, 11),
        ExperimentConfig("einstein-check", "fs", {}, None, 11),
        ExperimentConfig("ricci", "s2xs2", {"theta0": [1.0, 2.0]}, None, 11),
        ExperimentConfig("verify-minimal", "enneper", {"samples": 200, "mesh_n": 16}, None, 11),
    ]
    for cfg in configs:
        a, b = run(cfg, tmp_path / "a"), run(cfg, tmp_path / "b")
        csvs = sorted(k for k in a.artifacts if k.endswith(".csv"))
        ledger.expect(bool(csvs), f"{cfg.subcommand}: no CSV artifacts")
        for k in csvs:
            same = (run_dir_for(cfg, tmp_path / "a") / k).read_bytes() == (run_dir_for(cfg, tmp_path / "b") / k).read_bytes()
            ledger.expect(same and a.artifacts[k] == b.artifacts[k], f"{cfg.subcommand}: {k} differs")
    ledger.close()
