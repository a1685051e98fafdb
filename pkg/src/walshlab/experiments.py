"""Randomized verification campaigns and their machine-readable reports.

Every campaign is driven by an `ExperimentConfig` that fully determines the
run: per-trial generators are seeded by (master seed, trial index, stream),
so two runs with equal configs produce identical reports and the result does
not depend on scheduling.

Campaigns separate "asserted" bounds, where the underlying identity pins an
exact constant (orthogonality at p = 2, the pointwise sharp bound with
constant 1, adjointness, support containment), from "reported" empirical
constants, which are emitted with max / mean / 99th percentile and never
asserted to a specific value.

The ratio campaigns for p > 2 open with a fixed block of deterministic
adversarial probes (a covered Walsh function, anticorrelated cascade
functions against the block family, a spike, a Riesz product) before the
seeded random trials.  The probes anchor the reported maximum at a
known-bad configuration, which is what makes the running maximum settle
early; a random trial beating them would itself be a finding.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from .dyadic import IntInterval, delta_block
from .intervals import decompose, family_decompose, verify_decomposition
from .lattice import (
    LatticeFunction,
    cz_decompose,
    duality_pairing,
    lp_radx_norm,
    lp_x_norm,
    rad_norm_values,
    segment_transform,
    segment_transform_adjoint,
    split_at_cells,
    stopping_cells,
    verify_cz,
)
from .operators import (
    SeqFunction,
    block_sum,
    block_sum_family,
    rms_maximal,
    sharp_maximal,
    square_function,
)
from .walsh import (
    DyadicCell,
    DyadicFunction,
    analyze_values,
    mart_diff,
    project,
    restrict_rescale,
    synthesize_values,
    walsh_eval,
)

ASSERT_TOL = 1e-10


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a campaign needs; equal configs give identical reports."""

    kind: str
    resolution: int = 8
    trials: int = 100
    seed: int = 0
    p: float = 2.0            # Lebesgue exponent
    q: float = 2.0            # lattice exponent of l^q(d)
    dim: int = 1              # lattice dimension d
    family: str = "random"    # random | dyadic | misaligned | singletons
    count: int = 4            # intervals per family
    rad: str = "exact"        # exact | mc:<samples>
    policy: str = "gaussian-cells"
    components: int = 4       # sequence length for lemma / weak-type runs
    lam_halfspan: int = 6     # weak-type lambda grid: median * 2**(-h .. h)
    mean_zero: bool = True    # subtract cell means in the lemma campaign
    probes: bool = True       # deterministic adversarial prefix in ratio runs

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class RatioReport:
    config: dict
    trials: list[dict]
    summary: dict
    passed: bool


def rng_for(seed, *key) -> np.random.Generator:
    if isinstance(seed, (int, np.integer)):
        entropy = [int(seed)]
    else:
        entropy = [int(s) for s in seed]
    return np.random.default_rng(entropy + [int(k) for k in key])


# ---------------------------------------------------------------------------
# Seeded generators
# ---------------------------------------------------------------------------


def _sparse_arg(policy: str) -> int:
    k = int(policy.split(":", 1)[1])
    if k < 1:
        raise ValueError(f"sparse spectrum needs at least one coefficient, got {k}")
    return k


def random_function(seed, resolution: int, policy: str) -> DyadicFunction:
    """Seeded random grid function; deterministic in (seed, policy)."""
    rng = rng_for(seed)
    n = 1 << resolution
    if policy == "gaussian-cells":
        return DyadicFunction(resolution, rng.standard_normal(n))
    if policy == "rademacher-cells":
        return DyadicFunction(resolution, rng.choice([-1.0, 1.0], size=n))
    if policy.startswith("sparse-spectrum:"):
        k = _sparse_arg(policy)
        coeffs = np.zeros(n)
        idx = rng.choice(n, size=min(k, n), replace=False)
        coeffs[idx] = rng.choice([-1.0, 1.0], size=idx.size)
        return DyadicFunction(resolution, synthesize_values(coeffs))
    raise ValueError(f"unknown function policy {policy!r}")


def random_lattice_function(
    seed, resolution: int, dim: int, q: float, policy: str
) -> LatticeFunction:
    """Seeded lattice-valued grid function, coordinatewise by policy."""
    rng = rng_for(seed)
    n = 1 << resolution
    if policy == "gaussian-cells":
        return LatticeFunction(resolution, rng.standard_normal((n, dim)), q)
    if policy == "rademacher-cells":
        return LatticeFunction(resolution, rng.choice([-1.0, 1.0], size=(n, dim)), q)
    if policy.startswith("sparse-spectrum:"):
        k = _sparse_arg(policy)
        coeffs = np.zeros((n, dim))
        for c in range(dim):
            idx = rng.choice(n, size=min(k, n), replace=False)
            coeffs[idx, c] = rng.choice([-1.0, 1.0], size=idx.size)
        return LatticeFunction(resolution, synthesize_values(coeffs), q)
    raise ValueError(f"unknown function policy {policy!r}")


def random_interval_family(
    seed, resolution: int, count: int, policy: str = "random"
) -> list[IntInterval]:
    """Seeded family of pairwise disjoint index intervals inside [0, 2**N)."""
    if count < 1:
        raise ValueError("need at least one interval")
    rng = rng_for(seed)
    size = 1 << resolution
    if policy == "random":
        if 2 * count > size + 1:
            raise ValueError(f"cannot fit {count} disjoint intervals in [0, {size})")
        pts = np.sort(rng.choice(size + 1, size=2 * count, replace=False))
        return [
            IntInterval(int(pts[2 * i]), int(pts[2 * i + 1])) for i in range(count)
        ]
    if policy == "singletons":
        if count > size:
            raise ValueError(f"cannot fit {count} singletons in [0, {size})")
        pts = np.sort(rng.choice(size, size=count, replace=False))
        return [IntInterval(int(n), int(n) + 1) for n in pts]
    if policy == "dyadic":
        level = max(count - 1, 0).bit_length()
        if level > resolution:
            raise ValueError(f"cannot fit {count} dyadic pieces in [0, {size})")
        width = size >> level
        pos = np.sort(rng.choice(1 << level, size=count, replace=False))
        return [IntInterval(int(j) * width, (int(j) + 1) * width) for j in pos]
    if policy == "misaligned":
        need = (resolution + 1) // 2
        candidates = np.arange(1, size)
        eligible = candidates[np.bitwise_count(candidates) >= need]
        if 2 * count > eligible.size:
            raise ValueError(
                f"cannot pick {2 * count} misaligned endpoints in [0, {size})"
            )
        pts = np.sort(rng.choice(eligible, size=2 * count, replace=False))
        return [
            IntInterval(int(pts[2 * i]), int(pts[2 * i + 1])) for i in range(count)
        ]
    raise ValueError(f"unknown family policy {policy!r}")


# ---------------------------------------------------------------------------
# Shared campaign helpers
# ---------------------------------------------------------------------------


def _family_for_trial(cfg: ExperimentConfig, t: int) -> list[IntInterval]:
    return random_interval_family(
        (cfg.seed, t, 1), cfg.resolution, cfg.count, cfg.family
    )


def _sq_sum_of_projections(values: np.ndarray, intervals) -> np.ndarray:
    """Pointwise sum of squared spectral projections onto the intervals."""
    coeffs = analyze_values(values)
    acc = np.zeros_like(values)
    for iv in intervals:
        kept = np.zeros_like(coeffs)
        kept[iv.lo : iv.hi] = coeffs[iv.lo : iv.hi]
        acc += synthesize_values(kept) ** 2
    return acc


def _scalar_lhs(values: np.ndarray, intervals, p: float) -> float:
    sq = _sq_sum_of_projections(values, intervals)
    return float(np.mean(sq ** (p / 2.0)) ** (1.0 / p))


def _lp(values: np.ndarray, p: float) -> float:
    return float(np.mean(np.abs(values) ** p) ** (1.0 / p))


def _scalar_probes(resolution: int) -> list[tuple[str, np.ndarray, list[IntInterval]]]:
    """Deterministic adversarial cases anchoring the ratio maximum."""
    n = 1 << resolution
    blocks = [IntInterval(0, 1)] + [delta_block(k) for k in range(1, resolution + 1)]
    w = lambda m: walsh_eval(m, resolution).values
    cases: list[tuple[str, np.ndarray, list[IntInterval]]] = []
    mid = (1 << (resolution - 1)) + 1 if resolution >= 2 else n - 1
    cases.append(("walsh-covered", w(mid), blocks))
    if resolution >= 3:
        low_blocks = [delta_block(k) for k in (1, 2, 3)]
        for c in (1.0, 1.272, 2.0):
            vals = w(1) + w(2) + c * (w(4) - w(7))
            cases.append((f"cascade-{c}", vals, low_blocks))
    spike = np.zeros(n)
    spike[0] = float(n)
    cases.append(("spike", spike, blocks))
    riesz = np.ones(n)
    for k in range(1, resolution + 1):
        riesz = riesz * (1.0 + 0.9 * w(1 << (k - 1)))
    cases.append(("riesz-0.9", riesz, blocks))
    return cases


def _summarize(trials: list[dict], key: str = "ratio") -> dict:
    arr = np.array([t[key] for t in trials], dtype=float)
    return {
        "n_trials": int(arr.size),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
        "median": float(np.quantile(arr, 0.5)),
        "q99": float(np.quantile(arr, 0.99)),
        "argmax_trial": int(arr.argmax()),
    }


def _finish(cfg, trials, summary, asserted) -> RatioReport:
    summary["asserted"] = asserted
    passed = all(a["passed"] for a in asserted)
    return RatioReport(cfg.to_dict(), trials, summary, passed)


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------


def run_scalar_lpr(cfg: ExperimentConfig) -> RatioReport:
    """Square function of interval projections against the plain L^p norm.

    Asserts ratio <= 1 at p = 2 (orthogonality); for p != 2 the ratio is
    reported only (and for p < 2 the run is explicitly report-only, the
    inequality being false in general there).
    """
    if cfg.p < 1:
        raise ValueError(f"exponent must be >= 1, got {cfg.p}")
    probes = _scalar_probes(cfg.resolution) if cfg.probes else []
    trials = []
    worst = 0.0
    for t in range(cfg.trials):
        if t < len(probes):
            case, values, intervals = probes[t]
        else:
            case = cfg.policy
            values = random_function((cfg.seed, t, 0), cfg.resolution, cfg.policy).values
            intervals = _family_for_trial(cfg, t)
        lhs = _scalar_lhs(values, intervals, cfg.p)
        rhs = _lp(values, cfg.p)
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        trials.append(
            {"trial": t, "case": case, "lhs": lhs, "rhs": rhs, "ratio": ratio}
        )
    summary = _summarize(trials)
    asserted = []
    if cfg.p == 2:
        asserted.append(
            {
                "name": "ratio<=1 at p=2",
                "passed": worst <= 1.0 + ASSERT_TOL,
                "worst": worst,
            }
        )
    elif cfg.p > 2:
        asserted.append(
            {"name": "ratios finite", "passed": bool(np.isfinite(worst)), "worst": worst}
        )
    else:
        summary["regime"] = "p<2 report-only"
    return _finish(cfg, trials, summary, asserted)


def run_pointwise(cfg: ExperimentConfig) -> RatioReport:
    """Sharp function of the block transform against the rms maximal function.

    The bound holds pointwise with constant exactly one; every trial asserts
    it cellwise.
    """
    trials = []
    worst_ratio, worst_excess = 0.0, -np.inf
    for t in range(cfg.trials):
        f = random_function((cfg.seed, t, 0), cfg.resolution, cfg.policy)
        decs = family_decompose(_family_for_trial(cfg, t))
        sharp = sharp_maximal(block_sum_family(f, decs)).values
        m2 = rms_maximal(f).values
        excess = float((sharp - m2).max())
        pos = m2 > 0
        ratio = float((sharp[pos] / m2[pos]).max()) if pos.any() else 0.0
        worst_ratio = max(worst_ratio, ratio)
        worst_excess = max(worst_excess, excess)
        trials.append({"trial": t, "ratio": ratio, "excess": excess})
    summary = _summarize(trials)
    summary["worst_excess"] = worst_excess
    asserted = [
        {
            "name": "pointwise sharp <= rms maximal (constant 1)",
            "passed": worst_ratio <= 1.0 + ASSERT_TOL and worst_excess <= ASSERT_TOL,
            "worst": worst_ratio,
        }
    ]
    return _finish(cfg, trials, summary, asserted)


def _project_lattice(f: LatticeFunction, intervals) -> list[LatticeFunction]:
    coeffs = analyze_values(f.values)
    out = []
    for iv in intervals:
        kept = np.zeros_like(coeffs)
        kept[iv.lo : iv.hi] = coeffs[iv.lo : iv.hi]
        out.append(LatticeFunction(f.resolution, synthesize_values(kept), f.q))
    return out


def run_vector_lpr(cfg: ExperimentConfig) -> RatioReport:
    """Sign-averaged norm of lattice-valued interval projections vs the source norm.

    Asserts ratio <= 1 only in the exact-sign p = q = 2 case; other regimes
    are reported.  For d = 1 each trial also records the scalar square
    function value so the two formulations can be compared.
    """
    if cfg.p < 1:
        raise ValueError(f"exponent must be >= 1, got {cfg.p}")
    trials = []
    worst = 0.0
    for t in range(cfg.trials):
        f = random_lattice_function(
            (cfg.seed, t, 0), cfg.resolution, cfg.dim, cfg.q, cfg.policy
        )
        intervals = _family_for_trial(cfg, t)
        comps = _project_lattice(f, intervals)
        lhs = lp_radx_norm(comps, cfg.p, cfg.rad, seed=[cfg.seed, t, 2])
        rhs = lp_x_norm(f, cfg.p)
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        rec = {"trial": t, "lhs": lhs, "rhs": rhs, "ratio": ratio}
        if cfg.dim == 1:
            scalar = _scalar_lhs(f.values[:, 0], intervals, cfg.p)
            rec["scalar_lhs"] = scalar
            rec["rad_over_scalar"] = lhs / scalar if scalar > 0 else 0.0
        trials.append(rec)
    summary = _summarize(trials)
    asserted = []
    if cfg.p == 2 and cfg.q == 2 and cfg.rad == "exact":
        asserted.append(
            {
                "name": "ratio<=1 at p=q=2 exact signs",
                "passed": worst <= 1.0 + ASSERT_TOL,
                "worst": worst,
            }
        )
    else:
        asserted.append(
            {"name": "ratios finite", "passed": bool(np.isfinite(worst)), "worst": worst}
        )
    if cfg.p < 2:
        summary["regime"] = "p<2 report-only"
    return _finish(cfg, trials, summary, asserted)


def run_lemma_square(cfg: ExperimentConfig) -> RatioReport:
    """Coordinatewise martingale square function vs the l2-aggregated norm.

    Generates a family of lattice-valued components (cell means removed when
    mean_zero is set), applies the square function per coordinate across the
    family, and compares L^p(lattice) norms.  The d = 1, p = 2 mean-zero case
    asserts ratio <= 1; lattice cases are reported.
    """
    trials = []
    worst = 0.0
    for t in range(cfg.trials):
        comps = [
            random_lattice_function(
                (cfg.seed, t, s), cfg.resolution, cfg.dim, cfg.q, cfg.policy
            )
            for s in range(cfg.components)
        ]
        if cfg.mean_zero:
            comps = [
                LatticeFunction(
                    c.resolution, c.values - c.values.mean(axis=0), c.q
                )
                for c in comps
            ]
        stack = np.stack([c.values for c in comps])  # (S, cells, d)
        sq_cols = [
            square_function(SeqFunction(cfg.resolution, stack[:, :, c])).values
            for c in range(cfg.dim)
        ]
        s_fun = LatticeFunction(cfg.resolution, np.stack(sq_cols, axis=1), cfg.q)
        lhs = lp_x_norm(s_fun, cfg.p)
        rhs_fun = LatticeFunction(
            cfg.resolution, np.sqrt((stack**2).sum(axis=0)), cfg.q
        )
        rhs = lp_x_norm(rhs_fun, cfg.p)
        ratio = lhs / rhs if rhs > 0 else 0.0
        worst = max(worst, ratio)
        trials.append({"trial": t, "lhs": lhs, "rhs": rhs, "ratio": ratio})
    summary = _summarize(trials)
    asserted = []
    if cfg.dim == 1 and cfg.p == 2 and cfg.mean_zero:
        asserted.append(
            {
                "name": "square function contracts at p=2, d=1, mean zero",
                "passed": worst <= 1.0 + ASSERT_TOL,
                "worst": worst,
            }
        )
    else:
        asserted.append(
            {"name": "ratios finite", "passed": bool(np.isfinite(worst)), "worst": worst}
        )
    return _finish(cfg, trials, summary, asserted)


def run_weak11(cfg: ExperimentConfig) -> RatioReport:
    """Weak-type (1,1) behaviour of the adjoint segment transform.

    Per trial: draw a component family g, split it at each height of a
    geometric lambda grid around the median output norm with the shared
    stopping cells of its pointwise sign-averaged norm, and check that the
    adjoint transform of the bad part vanishes off the stopping cells.  The
    containment is asserted exactly; the weak-type constant
    lam * |{|T*g| > lam}| / ||g||_1 is reported over the grid.
    """
    trials = []
    worst_excess = 0.0
    for t in range(cfg.trials):
        decs = family_decompose(_family_for_trial(cfg, t))
        gs = [
            random_lattice_function(
                (cfg.seed, t, 10 + s), cfg.resolution, cfg.dim, cfg.q, cfg.policy
            )
            for s in range(len(decs))
        ]
        tstar = segment_transform_adjoint(gs, decs)
        out_norms = tstar.norm_values()
        leaf = rad_norm_values(gs, 2.0, cfg.rad, seed=[cfg.seed, t, 3])
        l1 = float(leaf.mean())
        med = float(np.median(out_norms))
        scale = med if med > 0 else (l1 if l1 > 0 else 1.0)
        weak_max, excess_max = 0.0, 0.0
        for e in range(-cfg.lam_halfspan, cfg.lam_halfspan + 1):
            lam = scale * 2.0**e
            cells = stopping_cells(leaf, lam)
            bs = []
            for g in gs:
                bad, _ = split_at_cells(g.values, cells, cfg.resolution)
                bs.append(LatticeFunction(cfg.resolution, bad, g.q))
            tstar_b = segment_transform_adjoint(bs, decs)
            mask = np.zeros(1 << cfg.resolution, dtype=bool)
            for cell in cells:
                mask[cell.grid_slice(cfg.resolution)] = True
            off = ~mask
            if off.any():
                excess_max = max(
                    excess_max, float(tstar_b.norm_values()[off].max())
                )
            level_measure = float((out_norms > lam).mean())
            if l1 > 0:
                weak_max = max(weak_max, lam * level_measure / l1)
        worst_excess = max(worst_excess, excess_max)
        trials.append(
            {"trial": t, "ratio": weak_max, "support_excess": excess_max}
        )
    summary = _summarize(trials)
    summary["worst_support_excess"] = worst_excess
    asserted = [
        {
            "name": "adjoint of bad part supported on stopping cells",
            "passed": worst_excess <= ASSERT_TOL,
            "worst": worst_excess,
        }
    ]
    return _finish(cfg, trials, summary, asserted)


def run_adjointness(cfg: ExperimentConfig) -> RatioReport:
    """Exact adjointness of the segment transform pair under sign averaging."""
    if cfg.rad != "exact":
        raise ValueError("adjointness requires exact sign mode")
    trials = []
    worst = 0.0
    for t in range(cfg.trials):
        decs = family_decompose(_family_for_trial(cfg, t))
        f = random_lattice_function(
            (cfg.seed, t, 0), cfg.resolution, cfg.dim, cfg.q, cfg.policy
        )
        gs = [
            random_lattice_function(
                (cfg.seed, t, 10 + s), cfg.resolution, cfg.dim, cfg.q, cfg.policy
            )
            for s in range(len(decs))
        ]
        tf = segment_transform(f, decs)
        rhs = duality_pairing(f, segment_transform_adjoint(gs, decs))
        count = len(decs)
        signs = 1.0 - 2.0 * ((np.arange(1 << count)[:, None] >> np.arange(count)) & 1)
        lhs = 0.0
        for row in signs:
            tsum = sum(float(row[s]) * tf[s].values for s in range(count))
            gsum = sum(float(row[s]) * gs[s].values for s in range(count))
            lhs += float((tsum * gsum).sum(axis=1).mean())
        lhs /= signs.shape[0]
        residual = abs(lhs - rhs) / (1.0 + abs(rhs))
        worst = max(worst, residual)
        trials.append({"trial": t, "lhs": lhs, "rhs": rhs, "residual": residual})
    summary = _summarize(trials, key="residual")
    asserted = [
        {
            "name": "adjointness residual",
            "passed": worst <= ASSERT_TOL,
            "worst": worst,
        }
    ]
    return _finish(cfg, trials, summary, asserted)


# ---------------------------------------------------------------------------
# Identity suite, decomposition driver, CZ driver (CLI backends)
# ---------------------------------------------------------------------------


def _all_cells(resolution: int):
    for level in range(resolution + 1):
        for pos in range(1 << level):
            yield DyadicCell(level, pos)


def verify_identities(resolution: int = 8, trials: int = 50, seed: int = 0) -> dict:
    """Run the operator-layer invariant battery; returns a JSON-able report.

    Asserted identities are exact up to float tolerance; the sharp-function
    lower bound for mean-zero families carries no usable constant and is
    reported as an empirical ratio distribution instead.
    """
    checks = {
        "projection_identity": 0.0,
        "pointwise_sharp_vs_rms": 0.0,
        "mean_subtraction_optimality": 0.0,
        "orthogonality_sum": 0.0,
        "mean_truncation": 0.0,
        "telescoping": 0.0,
        "locality": 0.0,
        "constancy": 0.0,
        "block_mean_zero": 0.0,
        "rescaling_identity": 0.0,
    }
    norm_ratios = []
    n = 1 << resolution
    for t in range(trials):
        rng = rng_for((seed, t))
        f = random_function((seed, t, 0), resolution, "gaussian-cells")
        count = int(rng.integers(1, 7))
        intervals = random_interval_family((seed, t, 1), resolution, count)
        decs = family_decompose(intervals)

        for dec in decs:
            for base, levels, union in (
                (dec.anchor, dec.left_levels, dec.left_union()),
                (dec.interval.hi, dec.right_levels, dec.right_union()),
            ):
                if not levels or base >= n:
                    continue
                lhs = project(sorted(union), f).values
                rhs = walsh_eval(base, resolution).values * block_sum(
                    f, base, levels
                ).values
                checks["projection_identity"] = max(
                    checks["projection_identity"], float(np.abs(lhs - rhs).max())
                )

        g = block_sum_family(f, decs)
        sharp = sharp_maximal(g).values
        m2 = rms_maximal(f).values
        checks["pointwise_sharp_vs_rms"] = max(
            checks["pointwise_sharp_vs_rms"], float((sharp - m2).max())
        )
        checks["block_mean_zero"] = max(
            checks["block_mean_zero"], float(np.abs(g.values.mean(axis=1)).max())
        )
        for p_exp in (2.0, 4.0):
            gp = float(np.mean(((g.values**2).sum(axis=0)) ** (p_exp / 2)) ** (1 / p_exp))
            sp = _lp(sharp, p_exp)
            if sp > 1e-12:
                norm_ratios.append(gp / sp)

        mean_vec = g.values.mean(axis=1)
        c = mean_vec + rng.standard_normal(mean_vec.shape)
        osc_mean = ((g.values - mean_vec[:, None]) ** 2).sum(axis=0).mean()
        osc_c = ((g.values - c[:, None]) ** 2).sum(axis=0).mean()
        checks["mean_subtraction_optimality"] = max(
            checks["mean_subtraction_optimality"], float(osc_mean - osc_c)
        )

        proj_sq = _sq_sum_of_projections(f.values, intervals)
        checks["orthogonality_sum"] = max(
            checks["orthogonality_sum"],
            float(proj_sq.mean() - (f.values**2).mean()),
        )

        total = np.zeros(n)
        for k in range(resolution + 1):
            total += mart_diff(k, f).values
        checks["telescoping"] = max(
            checks["telescoping"], float(np.abs(total - f.values).max())
        )

        level = int(rng.integers(1, resolution + 1))
        cell = DyadicCell(level, int(rng.integers(0, 1 << level)))
        sl = cell.grid_slice(resolution)
        outside = np.ones(n, dtype=bool)
        outside[sl] = False
        perturbed_vals = f.values.copy()
        perturbed_vals[outside] += rng.standard_normal(int(outside.sum()))
        perturbed = DyadicFunction(resolution, perturbed_vals)
        for j in range(cell.level + 1, resolution + 1):
            d_orig = mart_diff(j, f).values[sl]
            d_pert = mart_diff(j, perturbed).values[sl]
            checks["locality"] = max(
                checks["locality"], float(np.abs(d_orig - d_pert).max())
            )
        for j in range(0, cell.level + 1):
            vals = mart_diff(j, f).values[sl]
            checks["constancy"] = max(
                checks["constancy"], float(np.abs(vals - vals[0]).max())
            )

        a = int(rng.integers(0, n))
        m = cell.level
        wa_f = walsh_eval(a, resolution) * f
        f_tilde = restrict_rescale(f, cell)
        sign = walsh_eval(a & ((1 << m) - 1), m).values[cell.position]
        wa_tilde = walsh_eval(a >> m, resolution - m)
        for j in range(m + 1, resolution + 1):
            lhs = mart_diff(j, wa_f).values[sl]
            rhs = sign * mart_diff(j - m, wa_tilde * f_tilde).values
            checks["rescaling_identity"] = max(
                checks["rescaling_identity"], float(np.abs(lhs - rhs).max())
            )

    # mean truncation sweep at a coarse resolution, all dyadic cells
    res6 = min(resolution, 6)
    f6 = random_function((seed, trials, 0), res6, "gaussian-cells")
    intervals6 = random_interval_family((seed, trials, 1), res6, 2)
    for dec in family_decompose(intervals6):
        if not dec.left_levels:
            continue
        full = block_sum(f6, dec.anchor, dec.left_levels).values
        for cell in _all_cells(res6):
            inv_measure = 1 << cell.level
            kept = [j for j in dec.left_levels if (1 << j) <= inv_measure]
            truncated = block_sum(f6, dec.anchor, kept).values
            sl = cell.grid_slice(res6)
            checks["mean_truncation"] = max(
                checks["mean_truncation"],
                abs(float(full[sl].mean()) - float(truncated[sl].mean())),
            )

    ratios = np.array(norm_ratios) if norm_ratios else np.zeros(1)
    results = [
        {"name": name, "worst_residual": worst, "passed": worst <= ASSERT_TOL}
        for name, worst in checks.items()
    ]
    return {
        "config": {"resolution": resolution, "trials": trials, "seed": seed},
        "checks": results,
        "reported": {
            "norm_over_sharp": {
                "max": float(ratios.max()),
                "mean": float(ratios.mean()),
                "q99": float(np.quantile(ratios, 0.99)),
            }
        },
        "passed": all(r["passed"] for r in results),
    }


def decompose_report(a: int, b: int) -> dict:
    """Decomposition of [a, b) plus its elementwise verification, JSON-able."""
    dec = decompose(a, b)
    chk = verify_decomposition(dec, a, b)
    return {
        "a": a,
        "b": b,
        "anchor": dec.anchor,
        "left": [{"level": j, "lo": piece.lo, "hi": piece.hi} for j, piece in dec.left],
        "right": [
            {"level": i, "lo": piece.lo, "hi": piece.hi} for i, piece in dec.right
        ],
        "checks": chk.as_dict(),
        "passed": chk.passed,
    }


def czd_report(
    resolution: int, dim: int, q: float, lam: float, seed: int
) -> dict:
    """Splitting of a seeded random lattice function at an absolute height."""
    if lam <= 0:
        raise ValueError(f"threshold must be positive, got {lam}")
    g = random_lattice_function((seed, 0, 0), resolution, dim, q, "gaussian-cells")
    result = cz_decompose(g, lam)
    report = verify_cz(result, g)
    report["config"] = {
        "resolution": resolution,
        "dim": dim,
        "q": q,
        "lam": lam,
        "seed": seed,
    }
    return report


# ---------------------------------------------------------------------------
# Exhaustive basis sweep for the pointwise bound
# ---------------------------------------------------------------------------


def exhaustive_pointwise_basis_check(
    resolution: int = 5, max_intervals: int = 3, spot_checks: int = 200, seed: int = 0
) -> dict:
    """Pointwise sharp bound over every family of <= max_intervals intervals
    in [0, 2**resolution) with every Walsh basis function as input.

    On basis inputs all pipeline arithmetic is exact: the modulated function
    is again a basis function, its block restriction is either zero or that
    same function, so the sharp value is a table lookup once the single-input
    tables are computed through the real operators.  The sweep enumerates all
    families against those tables and asserts that at most one interval
    captures each basis index (pieces are disjoint across a family); a seeded
    subsample of (family, basis) pairs is re-run through the full pipeline to
    pin the tables to the real code path.
    """
    n = 1 << resolution
    ivs = [(a, b) for b in range(1, n + 1) for a in range(b)]
    capture = {}
    for a, b in ivs:
        dec = decompose(a, b)
        levels = set(dec.left_levels)
        row = np.full(n, -1, dtype=np.int64)
        for nn in range(n):
            m = a ^ nn
            if m.bit_length() in levels:
                row[nn] = m
        capture[(a, b)] = row

    # single-input tables through the real operators
    sharp_tab = np.zeros(n + 1)  # index m+1; slot 0 is the zero function
    for m in range(n):
        g = SeqFunction.from_components([walsh_eval(m, resolution)])
        sharp_tab[m + 1] = float(sharp_maximal(g).values.max())
    m2_tab = np.array(
        [float(rms_maximal(walsh_eval(nn, resolution)).values.min()) for nn in range(n)]
    )
    assert float(np.abs(m2_tab - 1.0).max()) == 0.0

    by_start: list[list[tuple[int, int]]] = [[] for _ in range(n + 1)]
    for a, b in ivs:
        by_start[a].append((a, b))
    starts_from = [
        [iv for lo in range(s, n + 1) for iv in by_start[lo]] for s in range(n + 1)
    ]

    families = 0
    worst = 0.0
    sampled: list[tuple[tuple[int, int], ...]] = []
    rng = rng_for((seed, 99))

    def visit(rows, family):
        nonlocal families, worst
        families += 1
        if len(rows) == 1:
            m_val = rows[0]
        else:
            stacked = np.stack(rows)
            if int((stacked >= 0).sum(axis=0).max()) > 1:
                raise RuntimeError(f"family {family} captures an index twice")
            m_val = stacked.max(axis=0)
        r = float(sharp_tab[m_val + 1].max())
        if r > worst:
            worst = r
        if rng.random() < spot_checks / 1.7e6:
            sampled.append(tuple(family))

    def extend(family, rows, min_start, depth):
        for a, b in starts_from[min_start]:
            fam = family + [(a, b)]
            rs = rows + [capture[(a, b)]]
            visit(rs, fam)
            if depth + 1 < max_intervals:
                extend(fam, rs, b, depth + 1)

    extend([], [], 0, 0)

    # spot checks through the full pipeline
    if len(sampled) < min(spot_checks, 50):
        for _ in range(min(spot_checks, 50) - len(sampled)):
            k = int(rng.integers(1, max_intervals + 1))
            fam, start = [], 0
            for _ in range(k):
                room = [iv for iv in starts_from[start]]
                if not room:
                    break
                a, b = room[int(rng.integers(0, len(room)))]
                fam.append((a, b))
                start = b
            if fam:
                sampled.append(tuple(fam))
    spot_worst = 0.0
    for fam in sampled:
        decs = family_decompose([IntInterval(a, b) for a, b in fam])
        nn = int(rng.integers(0, n))
        f = walsh_eval(nn, resolution)
        sharp = sharp_maximal(block_sum_family(f, decs)).values
        m2 = rms_maximal(f).values
        spot_worst = max(spot_worst, float((sharp - m2).max()))
        rows = np.stack([capture[fam_iv] for fam_iv in fam])
        m_val = int(rows[:, nn].max())
        table_value = sharp_tab[m_val + 1]
        if abs(float(sharp.max()) - table_value) > 1e-12:
            raise RuntimeError(f"pipeline disagrees with table on {fam}, n={nn}")

    passed = worst <= 1.0 + ASSERT_TOL and spot_worst <= ASSERT_TOL
    return {
        "config": {
            "resolution": resolution,
            "max_intervals": max_intervals,
            "seed": seed,
        },
        "families": families,
        "basis_functions": n,
        "max_ratio": worst,
        "spot_checks": len(sampled),
        "spot_worst_excess": spot_worst,
        "passed": passed,
    }


# ---------------------------------------------------------------------------
# Report serialization
# ---------------------------------------------------------------------------


def report_json_lines(report: RatioReport, timestamp: str | None = None) -> str:
    """One JSON line per trial followed by the summary object."""
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat()
    lines = [json.dumps(t) for t in report.trials]
    lines.append(
        json.dumps(
            {
                "summary": report.summary,
                "config": report.config,
                "passed": report.passed,
                "timestamp": timestamp,
            }
        )
    )
    return "\n".join(lines) + "\n"


def report_csv(report: RatioReport, timestamp: str | None = None) -> str:
    """Flat one-row summary, config columns first."""
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat()
    row: dict = {}
    for k, v in report.config.items():
        row[f"config.{k}"] = v
    for k, v in report.summary.items():
        if k == "asserted":
            continue
        row[f"summary.{k}"] = v
    row["passed"] = report.passed
    row["timestamp"] = timestamp
    header = ",".join(row)
    values = ",".join(str(v) for v in row.values())
    return header + "\n" + values + "\n"


def write_report(report: RatioReport, path: str, fmt: str = "json") -> None:
    if fmt == "json":
        text = report_json_lines(report)
    elif fmt == "csv":
        text = report_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)


RUNNERS = {
    "scalar": run_scalar_lpr,
    "vector": run_vector_lpr,
    "pointwise": run_pointwise,
    "lemma": run_lemma_square,
    "weak11": run_weak11,
    "adjoint": run_adjointness,
}
