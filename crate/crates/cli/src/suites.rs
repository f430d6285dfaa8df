//! The verification suites. Each writes its CSV/JSON files and returns a
//! pass/fail report with every threshold it applied.

use std::time::Instant;

use equidist::concentration::{
    default_tail_grid, discrepancy_batch, levy_tail_check, median_sorted, sample_stats_with, scaling_fit,
    variance_oracle, DiscrepancyReport, RECORD_CSV_HEADER,
};
use equidist::manifold::{Covering, Manifold, Point};
use equidist::randombasis::{
    ks_distance, ks_two_sample, random_basis, random_unit_coeffs, SeedSpec, SurvivalLaw,
};
use equidist::spectral::{ball_gram_at, eigenspace, kernel_deviation, BasisEvaluator, EigenspaceSpec};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, Csv, OutputDir};

const KERNEL_TAG: u64 = 1;
const LAW_TAG: u64 = 2;
const EQUIDIST_TAG: u64 = 3;
const SCALING_TAG: u64 = 4;
const COVERING_TAG: u64 = 5;
const LAW_BATCH: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: &'static str,
    pub pass: bool,
    pub seconds: f64,
    pub thresholds: Value,
    pub stats: Value,
    pub files: Vec<String>,
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    pub manifold: Manifold,
    pub seed: SeedSpec,
    pub out: &'a mut OutputDir,
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a RunConfig, out: &'a mut OutputDir) -> CliResult<Self> {
        Ok(Self {
            manifold: cfg.manifold()?,
            seed: SeedSpec::new(cfg.seed),
            cfg,
            out,
        })
    }

    /// A fixed evaluation point: the north pole, or the torus origin.
    fn reference_point(&self) -> Point {
        if self.manifold.is_sphere() {
            Point::north_pole()
        } else {
            Point::torus(&vec![0.0; self.manifold.dim()])
        }
    }
}

fn finish(
    name: &'static str,
    start: Instant,
    pass: bool,
    thresholds: Value,
    stats: Value,
    files: &[&str],
) -> SuiteReport {
    SuiteReport {
        name,
        pass,
        seconds: start.elapsed().as_secs_f64(),
        thresholds,
        stats,
        files: files.iter().map(|s| s.to_string()).collect(),
    }
}

pub fn kernel_check(ctx: &mut Ctx) -> CliResult<SuiteReport> {
    let start = Instant::now();
    let tol = ctx.cfg.kernel_tolerance()?;
    let points = ctx.cfg.kernel_check.points;
    let seed = ctx.seed.derive(KERNEL_TAG);
    let mut csv = Csv::new("k,m,max_rel_dev");
    let mut worst: f64 = 0.0;
    for k in ctx.cfg.kernel_indices()? {
        let spec = eigenspace(&ctx.manifold, k)?;
        let mut rng = seed.rng(k as u32, 0);
        let dev = (0..points)
            .map(|_| kernel_deviation(&spec, &ctx.manifold.sample_uniform(&mut rng)))
            .fold(0.0, f64::max);
        worst = worst.max(dev);
        csv.row(&[k.to_string(), spec.multiplicity().to_string(), num(dev)]);
    }
    ctx.out.write("kernel_check.csv", &csv.into_bytes())?;
    Ok(finish(
        "kernel-check",
        start,
        worst <= tol,
        json!({ "max_rel_dev": tol }),
        json!({ "max_rel_dev": worst, "points": points }),
        &["kernel_check.csv"],
    ))
}

fn pointwise_samples(spec: &EigenspaceSpec, x: &Point, n: usize, seed: &SeedSpec, label: u32) -> Vec<f64> {
    let e = BasisEvaluator::new(spec).eval(x);
    let m = spec.multiplicity();
    (0..n.div_ceil(LAW_BATCH))
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = seed.rng(label, b as u32);
            let count = LAW_BATCH.min(n - b * LAW_BATCH);
            let e = &e;
            (0..count).map(move |_| e.contract(&random_unit_coeffs(m, &mut rng)).norm())
        })
        .collect()
}

pub fn law_check(ctx: &mut Ctx) -> CliResult<SuiteReport> {
    let start = Instant::now();
    let lc = &ctx.cfg.law_check;
    let spec = eigenspace(&ctx.manifold, lc.index)?;
    let law = SurvivalLaw::for_spec(&spec);
    let n = lc.samples;
    let critical = lc.low_power_factor / (n as f64).sqrt();
    let threshold = lc.threshold.max(critical);
    let low_power = threshold > lc.threshold;
    let seed = ctx.seed.derive(LAW_TAG);
    let mut point_rng = seed.rng(u32::MAX, 0);
    let points: Vec<Point> = (0..lc.points).map(|_| ctx.manifold.sample_uniform(&mut point_rng)).collect();
    let mut csv = Csv::new("k,m,N,ks_distance,pass,point_index,threshold,low_power");
    let mut curve = Csv::new("point_index,t,empirical_survival,analytic_survival");
    let mut all_pass = true;
    let mut ks_values = Vec::new();
    let mut sample_sets = Vec::new();
    for (p, x) in points.iter().enumerate() {
        let mut xs = pointwise_samples(&spec, x, n, &seed, p as u32);
        let ks = ks_distance(&xs, &law)?;
        let pass = ks <= threshold;
        all_pass &= pass;
        ks_values.push(ks);
        csv.row(&[
            lc.index.to_string(),
            spec.multiplicity().to_string(),
            n.to_string(),
            num(ks),
            pass.to_string(),
            p.to_string(),
            num(threshold),
            low_power.to_string(),
        ]);
        xs.sort_by(f64::total_cmp);
        for i in 0..=100 {
            let t = law.cutoff() * i as f64 / 100.0;
            let above = xs.len() - xs.partition_point(|&v| v <= t);
            curve.row(&[
                p.to_string(),
                num(t),
                num(above as f64 / n as f64),
                num(law.survival(t)),
            ]);
        }
        sample_sets.push(xs);
    }
    let two_sample = if sample_sets.len() >= 2 {
        Some(ks_two_sample(&sample_sets[0], &sample_sets[1])?)
    } else {
        None
    };
    ctx.out.write("law_check.csv", &csv.into_bytes())?;
    ctx.out.write("law_survival.csv", &curve.into_bytes())?;
    Ok(finish(
        "law-check",
        start,
        all_pass,
        json!({ "ks_distance": threshold, "configured": lc.threshold, "low_power": low_power }),
        json!({ "ks_distance": ks_values, "two_sample_ks": two_sample, "m": spec.multiplicity(), "N": n }),
        &["law_check.csv", "law_survival.csv"],
    ))
}

#[derive(Debug, Clone, Serialize)]
struct EquidistSummary {
    k_or_e: u64,
    m: usize,
    r: f64,
    s: f64,
    centers: usize,
    bases: u32,
    median_max_defect: f64,
    max_max_defect: f64,
    median_defect: f64,
    center_term: f64,
    mean: f64,
    median: f64,
    variance: f64,
    mean_median_gap: f64,
    expected: f64,
    mean_error_se: f64,
    trace_identity_residual: f64,
    pass: bool,
}

pub fn equidist(ctx: &mut Ctx) -> CliResult<SuiteReport> {
    let start = Instant::now();
    let cfg = ctx.cfg;
    let ex = &cfg.experiment;
    let exp = cfg.experiment()?;
    let seed = ctx.seed.derive(EQUIDIST_TAG);
    let mut csv = Csv::new(&format!("{RECORD_CSV_HEADER},sample"));
    let mut summaries = Vec::new();
    for &k in &cfg.spectrum.indices {
        let spec = eigenspace(&ctx.manifold, k)?;
        let m = spec.multiplicity();
        let s = exp.covering_radius(spec.frequency(), ex.s_min);
        let covering = Covering::build_with_cap(&ctx.manifold, s, cfg.covering_check.max_centers)?;
        let bases: Vec<_> = (0..ex.bases).map(|i| random_basis(&spec, &seed, i)).collect();
        let reports: Vec<DiscrepancyReport> = discrepancy_batch(&spec, &bases, &covering, exp.alpha)?;
        let mut all_defects = Vec::new();
        for (b, rep) in reports.iter().enumerate() {
            for rec in &rep.records {
                csv.line(&format!("{},{b}", rec.csv_row(&ctx.manifold, cfg.seed)));
                all_defects.push(rec.defect_normalized);
            }
        }
        let mut maxes: Vec<f64> = reports.iter().map(|r| r.max_defect).collect();
        maxes.sort_by(f64::total_cmp);
        all_defects.sort_by(f64::total_cmp);

        let r = exp.radius(m);
        let gram = ball_gram_at(&spec, &ctx.reference_point(), r)?;
        let stats = sample_stats_with(&gram, ex.samples, &seed, &default_tail_grid())?;
        let expected = ctx.manifold.ball_volume(r)? / ctx.manifold.volume();
        let trace_residual = (gram.trace() / m as f64 - expected).abs() / expected;
        let mean_error_se = (stats.mean - expected).abs() / stats.std_error();
        let pass = trace_residual <= ex.trace_tolerance && mean_error_se <= ex.mean_tolerance_se;
        summaries.push(EquidistSummary {
            k_or_e: k,
            m,
            r,
            s: covering.radius(),
            centers: covering.len(),
            bases: ex.bases,
            median_max_defect: median_sorted(&maxes),
            max_max_defect: *maxes.last().expect("at least one basis"),
            median_defect: median_sorted(&all_defects),
            center_term: reports[0].center_term,
            mean: stats.mean,
            median: stats.median,
            variance: stats.variance,
            mean_median_gap: stats.mean_median_gap(),
            expected,
            mean_error_se,
            trace_identity_residual: trace_residual,
            pass,
        });
    }
    let trend = match (summaries.first(), summaries.last()) {
        (Some(a), Some(b)) if summaries.len() >= 2 => Some(b.median_max_defect < a.median_max_defect),
        _ => None,
    };
    let pass = summaries.iter().all(|s| s.pass) && (!ex.require_trend || trend.unwrap_or(true));
    ctx.out.write("equidist.csv", &csv.into_bytes())?;
    let summary = json!({ "eigenspaces": summaries, "trend_decreasing": trend });
    ctx.out.write_json("summary.json", &summary)?;
    Ok(finish(
        "equidist",
        start,
        pass,
        json!({
            "mean_error_se": ex.mean_tolerance_se,
            "trace_identity_residual": ex.trace_tolerance,
            "require_trend": ex.require_trend,
        }),
        summary,
        &["equidist.csv", "summary.json"],
    ))
}

pub fn scaling(ctx: &mut Ctx) -> CliResult<SuiteReport> {
    let start = Instant::now();
    let cfg = ctx.cfg;
    let sc = &cfg.scaling;
    let exp = cfg.experiment()?;
    let seed = ctx.seed.derive(SCALING_TAG);
    let mut rows = Vec::new();
    let mut tails = Csv::new("k_or_E,m,t,empirical,bound,se,violated");
    let mut violations = 0usize;
    for k in cfg.scaling_indices() {
        let spec = eigenspace(&ctx.manifold, k)?;
        let m = spec.multiplicity();
        if sc.synthetic {
            rows.push((k, m, 1.0 / m as f64, 1.0 / m as f64, 1.0 / m as f64));
            continue;
        }
        let gram = ball_gram_at(&spec, &ctx.reference_point(), exp.radius(m))?;
        let stats = sample_stats_with(&gram, sc.samples, &seed, &default_tail_grid())?;
        let levy = levy_tail_check(&stats, sc.lipschitz, m);
        for row in &levy.rows {
            violations += row.violated as usize;
            tails.row(&[
                k.to_string(),
                m.to_string(),
                num(row.t),
                num(row.empirical),
                num(row.bound),
                num(row.se),
                row.violated.to_string(),
            ]);
        }
        rows.push((k, m, stats.variance, variance_oracle(&gram.matrix, m), stats.mean_median_gap()));
    }
    let distinct = {
        let mut ms: Vec<usize> = rows.iter().map(|r| r.1).collect();
        ms.sort();
        ms.dedup();
        ms.len()
    };
    if distinct < 4 {
        return Err(CliError::Core(equidist::Error::DegenerateInput(format!(
            "scaling needs at least 4 distinct multiplicities, got {distinct}"
        ))));
    }
    let var_fit = scaling_fit(&rows.iter().map(|r| (r.1 as f64, r.2)).collect::<Vec<_>>())?;
    let exact_fit = scaling_fit(&rows.iter().map(|r| (r.1 as f64, r.3)).collect::<Vec<_>>())?;
    let gap_fit = scaling_fit(&rows.iter().map(|r| (r.1 as f64, r.4)).collect::<Vec<_>>())?;
    let mut csv = Csv::new("k_or_E,m,var,var_exact,gap,var_slope,var_r2,gap_slope,gap_r2");
    for &(k, m, var, exact, gap) in &rows {
        csv.row(&[
            k.to_string(),
            m.to_string(),
            num(var),
            num(exact),
            num(gap),
            num(var_fit.slope),
            num(var_fit.r_squared),
            num(gap_fit.slope),
            num(gap_fit.r_squared),
        ]);
    }
    ctx.out.write("scaling.csv", &csv.into_bytes())?;
    let mut files = vec!["scaling.csv"];
    if !sc.synthetic {
        ctx.out.write("levy_tails.csv", &tails.into_bytes())?;
        files.push("levy_tails.csv");
    }
    let [lo, hi] = sc.variance_slope.expect("resolved config");
    let pass = if sc.synthetic {
        (var_fit.slope + 1.0).abs() < 1e-9 && (var_fit.r_squared - 1.0).abs() < 1e-9
    } else {
        (lo..=hi).contains(&var_fit.slope) && gap_fit.slope <= sc.gap_slope_max && violations == 0
    };
    Ok(finish(
        "scaling",
        start,
        pass,
        json!({
            "variance_slope": sc.variance_slope,
            "gap_slope_max": sc.gap_slope_max,
            "levy_violations": 0,
            "lipschitz": sc.lipschitz,
            "synthetic": sc.synthetic,
        }),
        json!({
            "variance_slope": var_fit.slope,
            "variance_r2": var_fit.r_squared,
            "exact_variance_slope": exact_fit.slope,
            "gap_slope": gap_fit.slope,
            "gap_r2": gap_fit.r_squared,
            "levy_violations": violations,
        }),
        &files,
    ))
}

pub fn covering_check(ctx: &mut Ctx) -> CliResult<SuiteReport> {
    let start = Instant::now();
    let cc = &ctx.cfg.covering_check;
    let max_density = ctx.cfg.max_density()?;
    let n = ctx.manifold.dim() as i32;
    let mut csv = Csv::new("s,N,N_s_pow_n,max_uncovered");
    let mut pass = true;
    let mut stats = Vec::new();
    for (i, &s) in cc.radii.iter().enumerate() {
        let cov = Covering::build_with_cap(&ctx.manifold, s, cc.max_centers)?;
        let unc = cov.verify(cc.samples, ctx.seed.derive(COVERING_TAG + i as u64));
        let density = cov.len() as f64 * s.powi(n);
        pass &= unc <= s * (1.0 + 1e-12) && density <= max_density;
        csv.row(&[num(s), cov.len().to_string(), num(density), num(unc)]);
        stats.push(json!({ "s": s, "N": cov.len(), "density": density, "max_uncovered": unc }));
    }
    ctx.out.write("covering.csv", &csv.into_bytes())?;
    Ok(finish(
        "covering-check",
        start,
        pass,
        json!({ "max_uncovered": "s", "max_density": max_density }),
        Value::Array(stats),
        &["covering.csv"],
    ))
}
