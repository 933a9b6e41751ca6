//! The four subcommands.

use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use cfinsler_core::bergman::{kahler_curvatures, BergmanKernelModel, BergmanMetricField};
use cfinsler_core::directions::sphere_directions;
use cfinsler_core::equivalence::{
    build_h, caratheodory_h_check, completeness_probe, distance_comparison_check, kobayashi_kahler_equivalence,
    measure_curvature_window, schwarz_check, verify_sandwich, EquivalenceConfig, Verdict, SAMPLE_GAUGE,
};
use cfinsler_core::finsler::{hsc_chern_finsler, FinslerMetricModel, HermitianModel};
use cfinsler_core::invariant::{hyperbolicity_check, kobayashi_metric_seeded, DEFAULT_EFFORT};
use cfinsler_core::kahler::{pinching_constants_check, polarization_check, KahlerMetricField};
use cfinsler_core::metric_spec::{MetricDescriptor, DEFAULT_KERNEL_DEGREE};
use cfinsler_core::sampling::{point_vector_pairs, point_vector_triples, rng, substream};
use cfinsler_core::squeezing::{squeezing_constant_over, SqueezeMethod, DEFAULT_BUDGET};
use cfinsler_core::{CPoint, CTangent, DomainSpec, Error, Result};

use crate::config::{Command, Constants, Ref, RunConfig};
use crate::report::{CheckResult, Table};

/// Everything a subcommand needs, resolved from the config.
pub struct Context {
    pub config: RunConfig,
    pub domain: DomainSpec,
    pub seed: u64,
}

impl Context {
    pub fn new(config: &RunConfig, base: &Path, command: Command) -> Result<Self> {
        config.validate(command)?;
        let config = config.inline(base)?;
        let Ref::Inline(desc) = &config.domain else { unreachable!("inlined above") };
        let domain = DomainSpec::from_descriptor(desc)?;
        let seed = config.seed.expect("validated");
        Ok(Self { config, domain, seed })
    }

    fn metric_desc(&self, default: MetricDescriptor) -> MetricDescriptor {
        match &self.config.metric {
            Some(Ref::Inline(m)) => m.clone(),
            _ => default,
        }
    }

    fn kahler_desc(&self) -> MetricDescriptor {
        match &self.config.kahler {
            Some(Ref::Inline(m)) => m.clone(),
            _ => MetricDescriptor::Bergman { degree: None },
        }
    }

    fn kahler_field(&self) -> Result<Arc<dyn KahlerMetricField>> {
        let d = self.kahler_desc();
        d.kahler(&self.domain)?
            .ok_or_else(|| Error::Config(format!("{} is not a Kähler metric", d.label())))
    }

    /// Truncated kernels are only trusted away from the boundary.
    fn kahler_gauge(&self) -> f64 {
        match (self.kahler_desc(), BergmanKernelModel::closed_form(&self.domain)) {
            (MetricDescriptor::Bergman { .. }, Err(_)) => 0.6,
            _ => SAMPLE_GAUGE,
        }
    }

    fn bergman(&self) -> Result<BergmanMetricField> {
        let degree = match self.kahler_desc() {
            MetricDescriptor::Bergman { degree: Some(d) } => d,
            _ => DEFAULT_KERNEL_DEGREE,
        };
        Ok(BergmanMetricField::new(BergmanKernelModel::for_domain(&self.domain, degree)?))
    }

    fn tol(&self, default: f64) -> f64 {
        self.config.tolerance.unwrap_or(default)
    }

    fn stream(&self, k: u64) -> u64 {
        substream(self.seed, 100 + k)
    }

    fn selected(&self, name: &str, tag: &str) -> bool {
        match &self.config.checks {
            None => true,
            Some(list) => list.iter().any(|c| c.eq_ignore_ascii_case(name) || c.eq_ignore_ascii_case(tag)),
        }
    }
}

fn coord_columns(prefix: &str, n: usize) -> Vec<String> {
    (0..n).flat_map(|k| [format!("{prefix}{k}_re"), format!("{prefix}{k}_im")]).collect()
}

fn to_json<T: Serialize>(x: &T) -> Result<serde_json::Value> {
    Ok(serde_json::to_value(x)?)
}

type Outcome = Result<(Verdict, String, serde_json::Value)>;

/// Hypothesis failures become verdicts; numerical and I/O errors abort the run.
fn settle(tag: &str, name: &str, outcome: Outcome) -> Result<CheckResult> {
    let (verdict, message, data) = match outcome {
        Ok(x) => x,
        Err(Error::Config(m)) | Err(Error::Precondition(m)) | Err(Error::Input(m)) => {
            (Verdict::PreconditionViolation, m, serde_json::Value::Null)
        }
        Err(Error::UnsupportedDomain(m)) => (Verdict::Inconclusive, m, serde_json::Value::Null),
        Err(e) => return Err(e),
    };
    Ok(CheckResult { tag: tag.into(), name: name.into(), verdict, message, data })
}

fn bracket_check(ctx: &Context) -> Outcome {
    let field = ctx.bergman()?;
    let n = ctx.domain.dim();
    let points = ctx.config.grid.points(&ctx.domain)?;
    let sq = squeezing_constant_over(&ctx.domain, &points, DEFAULT_BUDGET, ctx.stream(0))?;
    let tol = ctx.tol(1e-6);
    let mut inside = true;
    let mut worst = None;
    for (z, v) in point_vector_pairs(&ctx.domain, ctx.config.samples, ctx.kahler_gauge(), ctx.stream(1)) {
        let r = kahler_curvatures(&field, &z, &v)?;
        if !r.within(sq.lower, n, tol)? {
            inside = false;
            worst.get_or_insert(r);
        }
    }
    let msg = format!("s >= {:.12} over {} grid points; curvature inside brackets: {inside}", sq.lower, points.len());
    Ok((Verdict::from_bool(inside), msg, serde_json::json!({ "squeezing_lower": sq.lower, "argmin": sq.argmin, "outside": worst })))
}

fn polarization(ctx: &Context) -> Outcome {
    let field = ctx.kahler_field()?;
    let tol = ctx.tol(1e-8);
    let mut worst: f64 = 0.0;
    for (z, x, y) in point_vector_triples(&ctx.domain, ctx.config.samples, ctx.kahler_gauge(), ctx.stream(2)) {
        let t = field.curvature_tensor(&z)?;
        worst = worst.max(polarization_check(&t, &x.coords, &y.coords).max());
    }
    Ok((Verdict::from_bool(worst < tol), format!("max residual {worst:.3e}"), serde_json::json!({ "max_residual": worst })))
}

fn pinching(ctx: &Context) -> Outcome {
    let field = ctx.kahler_field()?;
    let r = pinching_constants_check(field.as_ref(), &ctx.domain, ctx.kahler_gauge(), ctx.config.samples, ctx.stream(3))?;
    let msg = format!("C = {:.6}, max |real sectional| / C = {:.4}", r.c, r.observed_ratio);
    Ok((Verdict::from_bool(r.pass()), msg, to_json(&r)?))
}

fn schwarz(ctx: &Context, g: &dyn FinslerMetricModel) -> Outcome {
    let h = HermitianModel::new(ctx.kahler_field()?);
    let k1 = measure_curvature_window(&h, &ctx.domain, ctx.config.samples, ctx.stream(4))?.a();
    let k2 = measure_curvature_window(g, &ctx.domain, ctx.config.samples, ctx.stream(5))?.require_negative("T6.1 target metric")?;
    let r = schwarz_check(&ctx.domain, &h, k1, g, k2, ctx.config.samples, ctx.stream(6), ctx.tol(1e-8))?;
    let msg = format!("max G / ((K1/K2) h) = {:.9} with K1 = {k1:.6}, K2 = {k2:.6}", r.max_ratio.value);
    Ok((r.verdict, msg, to_json(&r)?))
}

fn sandwich_config(ctx: &Context, g: &dyn FinslerMetricModel, gb: &dyn FinslerMetricModel) -> Result<EquivalenceConfig> {
    let mut cfg = match ctx.config.constants {
        Constants::Supplied { k, a, b, c1 } => EquivalenceConfig { c: ctx.config.sandwich_fraction * k / b, k, a, b, c1 },
        Constants::Measured => {
            let wg = measure_curvature_window(g, &ctx.domain, ctx.config.samples, ctx.stream(7))?;
            let wb = measure_curvature_window(gb, &ctx.domain, ctx.config.samples, ctx.stream(8))?;
            let k = wg.require_negative("T6.4 finsler metric")?;
            let b = wb.require_negative("T6.4 bergman metric")?;
            EquivalenceConfig { c: ctx.config.sandwich_fraction * k / b, k, a: wb.a(), b, c1: wb.a() }
        }
    };
    if let Some(c) = ctx.config.c {
        cfg.c = c;
    }
    cfg.check_sandwich_window()?;
    Ok(cfg)
}

fn sandwich(ctx: &Context, g: Arc<dyn FinslerMetricModel>, gb: Arc<dyn FinslerMetricModel>) -> Outcome {
    let cfg = sandwich_config(ctx, g.as_ref(), gb.as_ref())?;
    let h = build_h(g, gb.clone(), &cfg)?;
    let r = verify_sandwich(&h, gb.as_ref(), &cfg, ctx.config.samples, ctx.stream(9))?;
    let msg = format!(
        "H/g_B in [{:.9}, {:.9}] vs [1, C2 = {:.9}]; max K_H {:.6} vs -K/C + B = {:.6}",
        r.ratio_min.value, r.ratio_max.value, r.c2, r.hsc_max.value, r.hsc_bound
    );
    Ok((r.verdict(), msg, to_json(&r)?))
}

fn completeness(ctx: &Context, g: Arc<dyn FinslerMetricModel>, gb: Arc<dyn FinslerMetricModel>) -> Outcome {
    let cfg = sandwich_config(ctx, g.as_ref(), gb.as_ref())?;
    let h = build_h(g, gb, &cfg)?;
    let eps: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let r = completeness_probe(&h, &ctx.domain, &sphere_directions(ctx.domain.dim(), 3), &eps)?;
    let msg = format!("min slope {:.6}, min R^2 {:.6}, divergent: {}", r.min_slope, r.min_r_squared, r.divergent);
    Ok((Verdict::from_bool(r.divergent), msg, to_json(&r)?))
}

fn hyperbolicity(ctx: &Context, g: &dyn FinslerMetricModel) -> Outcome {
    let b = match ctx.config.constants {
        Constants::Supplied { k, .. } => Some(k),
        Constants::Measured => None,
    };
    let r = hyperbolicity_check(&ctx.domain, g, b, ctx.config.samples, ctx.stream(10), ctx.tol(1e-8))?;
    let msg = format!("B = {:.6}, min margin {:.3e}", r.b, r.min_margin);
    Ok((Verdict::from_bool(r.pass), msg, to_json(&r)?))
}

fn distance(ctx: &Context, g: &dyn FinslerMetricModel) -> Outcome {
    let b = measure_curvature_window(g, &ctx.domain, ctx.config.samples, ctx.stream(11))?.require_negative("T6.5 metric")?;
    let mut r = rng(ctx.stream(12));
    let pairs: Vec<(CPoint, CPoint)> =
        (0..10).map(|_| (ctx.domain.sample_interior(&mut r, 0.8), ctx.domain.sample_interior(&mut r, 0.8))).collect();
    let rep = distance_comparison_check(&ctx.domain, g, b, &pairs, ctx.tol(1e-9))?;
    let certified = rep.pairs.iter().filter(|p| p.verdict.passed()).count();
    let msg = format!("{certified} of {} pairs certified with B = {b:.6}", rep.pairs.len());
    Ok((rep.verdict, msg, to_json(&rep)?))
}

fn kobayashi_kahler(ctx: &Context) -> Outcome {
    let r = kobayashi_kahler_equivalence(&ctx.domain, ctx.kahler_field()?, ctx.config.samples, ctx.kahler_gauge(), ctx.stream(13), ctx.tol(1e-6))?;
    let msg = match (&r.lower_ratio, &r.upper_ratio) {
        (Some(lo), Some(hi)) => format!(
            "K^2/h in [{:.9}, {:.9}] vs [B/4, A/4] = [{:.9}, {:.9}]",
            lo.value,
            hi.value,
            0.25 * r.window.b(),
            0.25 * r.window.a()
        ),
        _ => format!("T7.1 window not negative: sampled curvature reaches {:.6}", r.window.max.value),
    };
    Ok((r.verdict, msg, to_json(&r)?))
}

fn caratheodory(ctx: &Context) -> Outcome {
    let field = ctx.kahler_field()?;
    let c = match ctx.config.caratheodory_c {
        Some(c) => c,
        None => {
            let w = measure_curvature_window(&HermitianModel::new(field.clone()), &ctx.domain, ctx.config.samples, ctx.stream(14))?;
            0.9 * 4.0 / w.require_negative("T7.2 kähler metric")?
        }
    };
    let r = caratheodory_h_check(&ctx.domain, field, c, ctx.config.samples, ctx.stream(15), ctx.tol(1e-8))?;
    let msg = format!("H/h in [{:.9}, {:.9}] vs [1, C3 = {:.9}] at C = {c:.6}", r.ratio_min.value, r.ratio_max.value, r.c3);
    Ok((r.verdict(), msg, to_json(&r)?))
}

pub fn verify(ctx: &Context) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let g = ctx.metric_desc(MetricDescriptor::ExplicitFamily { a: 1.0, b: 0.5 }).finsler(&ctx.domain)?;
    let gb: Arc<dyn FinslerMetricModel> = Arc::new(HermitianModel::new(Arc::new(ctx.bergman()?)));
    let mut out = Vec::new();
    let mut run = |tag: &str, name: &str, f: &dyn Fn() -> Outcome| -> Result<()> {
        if ctx.selected(name, tag) {
            out.push(settle(tag, name, f())?);
        }
        Ok(())
    };
    run("T3.1", "bracket", &|| bracket_check(ctx))?;
    run("T4.1", "polarization", &|| polarization(ctx))?;
    run("T4.1", "pinching", &|| pinching(ctx))?;
    run("T6.1", "schwarz", &|| schwarz(ctx, g.as_ref()))?;
    run("T6.4", "sandwich", &|| sandwich(ctx, g.clone(), gb.clone()))?;
    run("T6.4", "completeness", &|| completeness(ctx, g.clone(), gb.clone()))?;
    run("T6.5", "hyperbolicity", &|| hyperbolicity(ctx, g.as_ref()))?;
    run("T6.5", "distance", &|| distance(ctx, g.as_ref()))?;
    run("T7.1", "kobayashi-kahler", &|| kobayashi_kahler(ctx))?;
    run("T7.2", "caratheodory", &|| caratheodory(ctx))?;
    if out.is_empty() {
        return Err(Error::Config("no check matches the --checks selection".into()));
    }
    Ok((out, Vec::new()))
}

fn directions_for(domain: &DomainSpec, count: usize, seed: u64) -> Vec<CTangent> {
    let mut r = rng(seed);
    (0..count).map(|_| domain.sample_direction(&mut r)).collect()
}

fn push_coords(row: &mut Vec<f64>, x: &[cfinsler_core::C64]) {
    row.extend(x.iter().flat_map(|c| [c.re, c.im]));
}

pub fn curvature(ctx: &Context) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let desc = ctx.metric_desc(MetricDescriptor::Bergman { degree: None });
    let n = ctx.domain.dim();
    let points = ctx.config.grid.points(&ctx.domain)?;
    let dirs = directions_for(&ctx.domain, points.len(), ctx.stream(20));
    let kahler = desc.kahler(&ctx.domain)?;
    let finsler = desc.finsler(&ctx.domain)?;
    let mut columns = coord_columns("z", n);
    columns.extend(coord_columns("v", n));
    if kahler.is_some() {
        columns.extend(["sec", "ric", "scal"].map(String::from));
    }
    columns.push("hsc".into());
    let mut table = Table::new("curvature", columns);
    let mut reports = Vec::new();
    for (z, v) in points.iter().zip(&dirs) {
        let mut row = Vec::new();
        push_coords(&mut row, &z.coords);
        push_coords(&mut row, &v.coords);
        if let Some(f) = &kahler {
            let r = kahler_curvatures(f.as_ref(), z, v)?;
            row.extend([r.sec, r.ric, r.scal]);
            reports.push(r);
        }
        row.push(hsc_chern_finsler(finsler.as_ref(), z, v)?);
        table.rows.push(row);
    }
    let mut checks = Vec::new();
    if matches!(desc, MetricDescriptor::Bergman { .. }) {
        let outcome = (|| -> Outcome {
            let sq = squeezing_constant_over(&ctx.domain, &points, DEFAULT_BUDGET, ctx.stream(21))?;
            let tol = ctx.tol(1e-6);
            let mut inside = 0;
            for r in &reports {
                if r.within(sq.lower, n, tol)? {
                    inside += 1;
                }
            }
            let msg = format!("{inside} of {} grid rows inside the brackets for s >= {:.12}", reports.len(), sq.lower);
            Ok((Verdict::from_bool(inside == reports.len()), msg, serde_json::json!({ "squeezing_lower": sq.lower, "argmin": sq.argmin })))
        })();
        checks.push(settle("T3.1", "bracket", outcome)?);
    }
    Ok((checks, vec![table]))
}

pub fn squeeze(ctx: &Context) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let n = ctx.domain.dim();
    let points = ctx.config.grid.points(&ctx.domain)?;
    let rep = squeezing_constant_over(&ctx.domain, &points, DEFAULT_BUDGET, ctx.stream(30))?;
    let mut columns = coord_columns("z", n);
    columns.extend(["lower", "method"].map(String::from));
    let mut table = Table::new("squeezing", columns);
    for e in &rep.estimates {
        let mut row = Vec::new();
        push_coords(&mut row, &e.point.coords);
        let method = match e.method {
            SqueezeMethod::InscribedEnclosing => 0.0,
            SqueezeMethod::AffineOptimized => 1.0,
            SqueezeMethod::BallAutomorphism => 2.0,
        };
        row.extend([e.lower, method]);
        table.rows.push(row);
    }
    let msg = format!("infimum {:.12} over {} points", rep.lower, points.len());
    let data = serde_json::json!({ "infimum": rep.lower, "argmin": rep.argmin, "witnesses": rep.estimates });
    let check = CheckResult { tag: "squeezing".into(), name: "positivity".into(), verdict: Verdict::from_bool(rep.lower > 0.0), message: msg, data };
    Ok((vec![check], vec![table]))
}

pub fn kobayashi(ctx: &Context) -> Result<(Vec<CheckResult>, Vec<Table>)> {
    let n = ctx.domain.dim();
    let points = ctx.config.grid.points(&ctx.domain)?;
    let dirs = directions_for(&ctx.domain, points.len(), ctx.stream(40));
    let mut columns = coord_columns("z", n);
    columns.extend(coord_columns("v", n));
    columns.extend(["lower", "upper", "width"].map(String::from));
    let mut table = Table::new("kobayashi", columns);
    let mut max_width: f64 = 0.0;
    let mut ordered = true;
    for (i, (z, v)) in points.iter().zip(&dirs).enumerate() {
        let iv = kobayashi_metric_seeded(&ctx.domain, z, v, DEFAULT_EFFORT, substream(ctx.stream(41), i as u64))?;
        ordered &= iv.lower <= iv.upper;
        max_width = max_width.max(iv.width());
        let mut row = Vec::new();
        push_coords(&mut row, &z.coords);
        push_coords(&mut row, &v.coords);
        row.extend([iv.lower, iv.upper, iv.width()]);
        table.rows.push(row);
    }
    let check = CheckResult {
        tag: "T5.1".into(),
        name: "interval".into(),
        verdict: Verdict::from_bool(ordered),
        message: format!("max width {max_width:.3e} over {} points", points.len()),
        data: serde_json::json!({ "max_width": max_width }),
    };
    Ok((vec![check], vec![table]))
}
