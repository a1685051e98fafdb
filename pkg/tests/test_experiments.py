import json

import numpy as np
import pytest

from walshlab.dyadic import IntInterval
from walshlab.experiments import (
    ExperimentConfig,
    random_function,
    random_interval_family,
    random_lattice_function,
    report_csv,
    report_json_lines,
    run_adjointness,
    run_lemma_square,
    run_pointwise,
    run_scalar_lpr,
    run_vector_lpr,
    run_weak11,
    verify_identities,
    czd_report,
    decompose_report,
)
from walshlab.walsh import analyze_values


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def test_random_function_determinism():
    f1 = random_function(42, 6, "gaussian-cells")
    f2 = random_function(42, 6, "gaussian-cells")
    np.testing.assert_array_equal(f1.values, f2.values)
    f3 = random_function(43, 6, "gaussian-cells")
    assert not np.array_equal(f1.values, f3.values)


def test_random_function_policies():
    rad = random_function(0, 5, "rademacher-cells")
    assert set(np.unique(rad.values)) <= {-1.0, 1.0}

    single = random_function(1, 5, "sparse-spectrum:1")
    coeffs = analyze_values(single.values)
    nz = np.flatnonzero(np.abs(coeffs) > 1e-12)
    assert nz.size == 1
    assert abs(coeffs[nz[0]]) == pytest.approx(1.0)
    assert set(np.unique(np.abs(single.values))) == {1.0}  # a Walsh function up to sign

    gauss = random_function(2, 8, "gaussian-cells")
    assert (gauss.values**2).mean() == pytest.approx(1.0, abs=0.2)

    with pytest.raises(ValueError):
        random_function(0, 4, "white-noise")
    with pytest.raises(ValueError):
        random_function(0, 4, "sparse-spectrum:0")


def test_random_lattice_function_shapes():
    f = random_lattice_function(3, 5, 4, 3.0, "gaussian-cells")
    assert f.values.shape == (32, 4)
    assert f.q == 3.0
    sparse = random_lattice_function(3, 5, 2, 2.0, "sparse-spectrum:2")
    coeffs = analyze_values(sparse.values)
    assert (np.abs(coeffs) > 1e-12).sum() <= 4


def test_random_interval_family_policies():
    fam = random_interval_family(0, 6, 4, "random")
    assert len(fam) == 4
    for prev, cur in zip(fam, fam[1:]):
        assert prev.hi <= cur.lo

    singles = random_interval_family(1, 6, 5, "singletons")
    assert all(iv.size == 1 for iv in singles)

    full = random_interval_family(2, 6, 1, "dyadic")
    assert full == [IntInterval(0, 64)]
    dy = random_interval_family(3, 6, 3, "dyadic")
    assert all(iv.size == 16 for iv in dy)

    mis = random_interval_family(4, 8, 3, "misaligned")
    for iv in mis:
        assert bin(iv.lo).count("1") >= 4
        assert bin(iv.hi).count("1") >= 4

    with pytest.raises(ValueError):
        random_interval_family(0, 3, 5, "random")
    with pytest.raises(ValueError):
        random_interval_family(0, 3, 0, "random")
    with pytest.raises(ValueError):
        random_interval_family(0, 6, 4, "bogus")


# ---------------------------------------------------------------------------
# campaigns
# ---------------------------------------------------------------------------


def test_scalar_p2_asserts_orthogonality():
    cfg = ExperimentConfig(kind="scalar", resolution=7, trials=40, seed=5, p=2)
    report = run_scalar_lpr(cfg)
    assert report.passed
    assert report.summary["max"] <= 1.0 + 1e-10


def test_scalar_covered_walsh_gives_ratio_one():
    for p in (2.0, 4.0, 8.0):
        cfg = ExperimentConfig(kind="scalar", resolution=6, trials=1, seed=0, p=p)
        report = run_scalar_lpr(cfg)
        probe = report.trials[0]
        assert probe["case"] == "walsh-covered"
        assert probe["ratio"] == pytest.approx(1.0, abs=1e-12)


def test_scalar_all_singletons_reproduce_parseval():
    cfg = ExperimentConfig(
        kind="scalar",
        resolution=5,
        trials=10,
        seed=6,
        p=2,
        family="singletons",
        count=32,
        probes=False,
    )
    report = run_scalar_lpr(cfg)
    assert report.passed
    for rec in report.trials:
        f = random_function((6, rec["trial"], 0), 5, "gaussian-cells")
        assert rec["lhs"] == pytest.approx(f.norm(2), abs=1e-10)
        assert rec["ratio"] == pytest.approx(1.0, abs=1e-10)


def test_scalar_report_only_below_p2():
    cfg = ExperimentConfig(kind="scalar", resolution=5, trials=5, seed=0, p=1.5)
    report = run_scalar_lpr(cfg)
    assert report.summary.get("regime") == "p<2 report-only"
    assert report.summary["asserted"] == []
    assert report.passed
    with pytest.raises(ValueError):
        run_scalar_lpr(ExperimentConfig(kind="scalar", p=0.5))


def test_pointwise_campaign():
    cfg = ExperimentConfig(kind="pointwise", resolution=7, trials=30, seed=7, count=3)
    report = run_pointwise(cfg)
    assert report.passed
    assert report.summary["max"] <= 1.0 + 1e-10
    assert report.summary["worst_excess"] <= 1e-10


def test_pointwise_full_interval_walsh_input_saturates():
    # one interval covering everything, input w_1: both sides are exactly one
    from walshlab.intervals import family_decompose
    from walshlab.operators import block_sum_family, rms_maximal, sharp_maximal
    from walshlab.walsh import walsh_eval

    decs = family_decompose([IntInterval(0, 64)])
    f = walsh_eval(1, 6)
    sharp = sharp_maximal(block_sum_family(f, decs)).values
    m2 = rms_maximal(f).values
    np.testing.assert_array_equal(sharp, np.ones(64))
    np.testing.assert_array_equal(m2, np.ones(64))


def test_vector_p2_q2_asserts():
    cfg = ExperimentConfig(
        kind="vector", resolution=6, trials=20, seed=8, p=2, q=2, dim=3, count=3
    )
    report = run_vector_lpr(cfg)
    assert report.passed
    assert report.summary["max"] <= 1.0 + 1e-10


def test_vector_single_interval_family_is_isometric():
    cfg = ExperimentConfig(
        kind="vector",
        resolution=5,
        trials=5,
        seed=9,
        p=4,
        q=3,
        dim=2,
        family="dyadic",
        count=1,
    )
    report = run_vector_lpr(cfg)
    for rec in report.trials:
        assert rec["ratio"] == pytest.approx(1.0, abs=1e-10)


def test_vector_d1_records_scalar_comparison():
    cfg = ExperimentConfig(
        kind="vector", resolution=6, trials=5, seed=10, p=4, q=2, dim=1, count=3
    )
    report = run_vector_lpr(cfg)
    for rec in report.trials:
        assert "scalar_lhs" in rec and "rad_over_scalar" in rec
        assert np.isfinite(rec["rad_over_scalar"])


def test_lemma_asserts_contraction_at_p2_d1():
    cfg = ExperimentConfig(
        kind="lemma", resolution=6, trials=25, seed=11, p=2, q=2, dim=1, components=4
    )
    report = run_lemma_square(cfg)
    assert report.passed
    assert report.summary["max"] <= 1.0 + 1e-10


def test_lemma_lattice_case_reports():
    cfg = ExperimentConfig(
        kind="lemma", resolution=5, trials=10, seed=12, p=4, q=4, dim=4, components=3
    )
    report = run_lemma_square(cfg)
    assert report.passed  # finiteness only
    assert np.isfinite(report.summary["max"])


def test_weak11_support_containment():
    cfg = ExperimentConfig(
        kind="weak11", resolution=6, trials=8, seed=13, dim=2, count=3
    )
    report = run_weak11(cfg)
    assert report.passed
    assert report.summary["worst_support_excess"] <= 1e-10
    assert np.isfinite(report.summary["max"])


def test_adjointness_campaign():
    cfg = ExperimentConfig(
        kind="adjoint", resolution=6, trials=25, seed=14, dim=2, count=4
    )
    report = run_adjointness(cfg)
    assert report.passed
    assert report.summary["max"] <= 1e-10
    with pytest.raises(ValueError):
        run_adjointness(ExperimentConfig(kind="adjoint", rad="mc:100"))


def test_adjointness_zero_input_pairs_to_zero():
    from walshlab.intervals import family_decompose
    from walshlab.lattice import (
        LatticeFunction,
        duality_pairing,
        segment_transform,
        segment_transform_adjoint,
    )

    decs = family_decompose([IntInterval(2, 9)])
    zero = LatticeFunction(5, np.zeros((32, 2)), 2)
    g = random_lattice_function(3, 5, 2, 2.0, "gaussian-cells")
    assert duality_pairing(zero, segment_transform_adjoint([g], decs)) == 0.0
    np.testing.assert_array_equal(segment_transform(zero, decs)[0].values, 0.0)


def test_weak11_spike_input_reports_finite_constant():
    from walshlab.intervals import family_decompose
    from walshlab.lattice import LatticeFunction, rad_norm_values, stopping_cells
    from walshlab.lattice import segment_transform_adjoint, split_at_cells

    decs = family_decompose([IntInterval(1, 6), IntInterval(8, 13)])
    spike_vals = np.zeros((64, 2))
    spike_vals[0] = 64.0
    gs = [LatticeFunction(6, spike_vals, 2), LatticeFunction(6, 0.5 * spike_vals, 2)]
    tstar = segment_transform_adjoint(gs, decs)
    leaf = rad_norm_values(gs, 2.0)
    l1 = leaf.mean()
    ratios = []
    for lam in (0.5 * l1, 2 * l1, 8 * l1):
        cells = stopping_cells(leaf, lam)
        mask = np.zeros(64, dtype=bool)
        for cell in cells:
            mask[cell.grid_slice(6)] = True
        bs = [
            LatticeFunction(6, split_at_cells(g.values, cells, 6)[0], 2) for g in gs
        ]
        tb = segment_transform_adjoint(bs, decs)
        if (~mask).any():
            assert float(tb.norm_values()[~mask].max()) <= 1e-10
        ratios.append(lam * float((tstar.norm_values() > lam).mean()) / l1)
    assert all(np.isfinite(r) for r in ratios)


def test_vector_mc_mode_is_seed_deterministic():
    cfg = ExperimentConfig(
        kind="vector", resolution=5, trials=5, seed=21, p=4, q=3, dim=2,
        count=3, rad="mc:500",
    )
    r1 = run_vector_lpr(cfg)
    r2 = run_vector_lpr(cfg)
    assert [t["ratio"] for t in r1.trials] == [t["ratio"] for t in r2.trials]


def test_report_determinism():
    cfg = ExperimentConfig(kind="scalar", resolution=6, trials=15, seed=15, p=4)
    text1 = report_json_lines(run_scalar_lpr(cfg), timestamp="T")
    text2 = report_json_lines(run_scalar_lpr(cfg), timestamp="T")
    assert text1 == text2
    other = report_json_lines(
        run_scalar_lpr(
            ExperimentConfig(kind="scalar", resolution=6, trials=15, seed=16, p=4)
        ),
        timestamp="T",
    )
    assert other != text1


def test_report_formats():
    cfg = ExperimentConfig(kind="scalar", resolution=5, trials=4, seed=0, p=2)
    report = run_scalar_lpr(cfg)
    lines = report_json_lines(report).strip().split("\n")
    assert len(lines) == 5
    for line in lines[:-1]:
        rec = json.loads(line)
        assert {"trial", "lhs", "rhs", "ratio"} <= set(rec)
    tail = json.loads(lines[-1])
    assert tail["config"]["seed"] == 0
    assert "timestamp" in tail

    csv_text = report_csv(report, timestamp="T")
    header, row = csv_text.strip().split("\n")
    assert "config.seed" in header and "summary.max" in header


def test_verify_identities_report():
    report = verify_identities(resolution=6, trials=10, seed=3)
    assert report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert "projection_identity" in names
    assert "pointwise_sharp_vs_rms" in names
    assert report["reported"]["norm_over_sharp"]["max"] > 0


def test_decompose_report_fields():
    report = decompose_report(1, 6)
    assert report["anchor"] == 1
    assert report["left"] == [{"level": 2, "lo": 2, "hi": 4}]
    assert report["right"] == [{"level": 2, "lo": 4, "hi": 6}]
    assert report["checks"]["passed"]


def test_czd_report():
    report = czd_report(resolution=6, dim=2, q=2.0, lam=1.5, seed=0)
    assert report["passed"]
    assert report["config"]["lam"] == 1.5
    with pytest.raises(ValueError):
        czd_report(resolution=6, dim=2, q=2.0, lam=0.0, seed=0)
