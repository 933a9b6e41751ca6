//! Equivalence of `H = C G + g_B` with the Bergman metric, and the
//! Kobayashi/Kähler comparisons.
//!
//! Curvatures here are Finsler holomorphic sectional curvatures (`K = 2R/h²`), so
//! the disk's Bergman metric sits at `-2` and the ball's in `C^n` at `-4/(n+1)`.
//! Curvature windows are measured on one seeded sample set and verified on a
//! disjoint one.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finsler::{hsc_chern_finsler, FinslerMetricModel, HermitianModel, SumModel};
use crate::geometry::{DomainKind, DomainSpec};
use crate::invariant::{caratheodory_lower_support, kobayashi_distance_upper, kobayashi_metric, DEFAULT_DIRECTION_BUDGET};
use crate::kahler::KahlerMetricField;
use crate::optim::linear_fit;
use crate::point::{CPoint, CTangent, C64};
use crate::quadrature::gauss_legendre_unit;
use crate::sampling::{point_vector_pairs, substream};

/// Sample points stay within this gauge; the curvature engines lose digits closer in.
pub const SAMPLE_GAUGE: f64 = 0.95;
const MEASURE_STREAM: u64 = 0;
const VERIFY_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
    PreconditionViolation,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

/// Constants for the sandwich (`c2`) and the Carathéodory comparison (`c3`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceConfig {
    pub c: f64,
    /// `-K` bounds the Finsler curvature from above.
    pub k: f64,
    /// `-A <= K_h <= -B` for the Kähler side.
    pub a: f64,
    pub b: f64,
    /// `-C1` bounds the Bergman curvature from below.
    pub c1: f64,
}

impl EquivalenceConfig {
    pub fn c2(&self) -> f64 {
        self.c1 / (self.k / self.c - self.b)
    }

    pub fn c3(&self) -> f64 {
        self.a / (4.0 / self.c - self.b)
    }

    fn positive(&self, names: &[(&str, f64)]) -> Result<()> {
        for (name, x) in names {
            if !(x.is_finite() && *x > 0.0) {
                return Err(Error::Config(format!("{name} = {x} must be positive")));
            }
        }
        Ok(())
    }

    /// `0 < C < K/B`.
    pub fn check_sandwich_window(&self) -> Result<()> {
        self.positive(&[("K", self.k), ("B", self.b), ("C1", self.c1)])?;
        if !(self.c > 0.0 && self.c < self.k / self.b) {
            return Err(Error::Config(format!(
                "T6.4 window violated: C = {} must lie in (0, K/B) = (0, {})",
                self.c,
                self.k / self.b
            )));
        }
        Ok(())
    }

    /// `0 < C < 4/B`.
    pub fn check_caratheodory_window(&self) -> Result<()> {
        self.positive(&[("A", self.a), ("B", self.b)])?;
        if !(self.c > 0.0 && self.c < 4.0 / self.b) {
            return Err(Error::Config(format!(
                "T7.2 window violated: C = {} must lie in (0, 4/B) = (0, {})",
                self.c,
                4.0 / self.b
            )));
        }
        Ok(())
    }
}

/// A sampled point/vector pair with the value attained there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub value: f64,
    pub point: CPoint,
    pub vector: CTangent,
}

fn extrema(pairs: &[(CPoint, CTangent)], values: &[f64]) -> (Extremum, Extremum) {
    let mut lo = 0;
    let mut hi = 0;
    for (i, x) in values.iter().enumerate() {
        if *x < values[lo] {
            lo = i;
        }
        if *x > values[hi] {
            hi = i;
        }
    }
    let mk = |i: usize| Extremum { value: values[i], point: pairs[i].0.clone(), vector: pairs[i].1.clone() };
    (mk(lo), mk(hi))
}

/// Range of the sampled holomorphic sectional curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureWindow {
    pub samples: usize,
    pub seed: u64,
    pub min: Extremum,
    pub max: Extremum,
}

impl CurvatureWindow {
    /// `-A <= K <= -B`.
    pub fn a(&self) -> f64 {
        -self.min.value
    }

    pub fn b(&self) -> f64 {
        -self.max.value
    }

    pub fn is_negative(&self) -> bool {
        self.max.value < 0.0
    }

    /// `B`, or a precondition error naming the offending sample.
    pub fn require_negative(&self, what: &str) -> Result<f64> {
        if self.is_negative() {
            Ok(self.b())
        } else {
            Err(Error::Precondition(format!(
                "{what}: sampled holomorphic sectional curvature reaches {} >= 0 at {:?}",
                self.max.value, self.max.point.coords
            )))
        }
    }
}

/// Sampled curvature window of `model`. Never fails on sign; see [`CurvatureWindow::is_negative`].
pub fn measure_curvature_window(model: &dyn FinslerMetricModel, domain: &DomainSpec, samples: usize, seed: u64) -> Result<CurvatureWindow> {
    window_within(model, domain, samples, SAMPLE_GAUGE, seed)
}

fn window_within(model: &dyn FinslerMetricModel, domain: &DomainSpec, samples: usize, max_gauge: f64, seed: u64) -> Result<CurvatureWindow> {
    if samples == 0 {
        return Err(Error::Input("curvature window needs at least one sample".into()));
    }
    let pairs = point_vector_pairs(domain, samples, max_gauge, seed);
    let k: Vec<f64> = pairs.par_iter().map(|(z, v)| hsc_chern_finsler(model, z, v)).collect::<Result<_>>()?;
    let (min, max) = extrema(&pairs, &k);
    Ok(CurvatureWindow { samples, seed, min, max })
}

/// Measures `K` from `g` and `B`, `C1` from `g_b` on the measuring stream of `seed`.
pub fn measure_sandwich_constants(
    g: &dyn FinslerMetricModel,
    g_b: &dyn FinslerMetricModel,
    domain: &DomainSpec,
    samples: usize,
    seed: u64,
) -> Result<(CurvatureWindow, CurvatureWindow)> {
    let s = substream(seed, MEASURE_STREAM);
    let wg = measure_curvature_window(g, domain, samples, s)?;
    let wb = measure_curvature_window(g_b, domain, samples, s ^ 1)?;
    Ok((wg, wb))
}

/// `EquivalenceConfig` from measured windows, with `C = fraction * K/B`.
pub fn measured_config(g: &CurvatureWindow, g_b: &CurvatureWindow, fraction: f64) -> Result<EquivalenceConfig> {
    let k = g.require_negative("finsler metric")?;
    let b = g_b.require_negative("bergman metric")?;
    let cfg = EquivalenceConfig { c: fraction * k / b, k, a: g_b.a(), b, c1: g_b.a() };
    cfg.check_sandwich_window()?;
    Ok(cfg)
}

/// `H = C G + g_B`, after checking the window.
pub fn build_h(g: Arc<dyn FinslerMetricModel>, g_b: Arc<dyn FinslerMetricModel>, config: &EquivalenceConfig) -> Result<SumModel> {
    config.check_sandwich_window()?;
    if g.dim() != g_b.dim() {
        return Err(Error::Input("G and g_B live in different dimensions".into()));
    }
    Ok(SumModel::new(vec![(config.c, g), (1.0, g_b)]))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub config: EquivalenceConfig,
    pub c2: f64,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub ratio_min: Extremum,
    pub ratio_max: Extremum,
    /// Smallest `H - g_B` seen; `C G >= 0` forces this nonnegative.
    pub min_excess: f64,
    pub lower: Verdict,
    pub upper: Verdict,
    /// Sampled HSC of `H` against `-K/C + B`.
    pub hsc_max: Extremum,
    pub hsc_bound: f64,
    pub curvature: Verdict,
}

impl EquivalenceReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.lower.passed() && self.upper.passed() && self.curvature.passed())
    }
}

/// Checks `1 <= H/g_B <= C2` and `K_H <= -K/C + B` on the verifying stream of `seed`.
pub fn verify_sandwich(
    h: &dyn FinslerMetricModel,
    g_b: &dyn FinslerMetricModel,
    config: &EquivalenceConfig,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    config.check_sandwich_window()?;
    let domain = h
        .domain()
        .or(g_b.domain())
        .ok_or_else(|| Error::Input("sandwich check needs a domain".into()))?
        .clone();
    if samples == 0 {
        return Err(Error::Input("sandwich check needs at least one sample".into()));
    }
    let tol = 1e-9;
    let pairs = point_vector_pairs(&domain, samples, SAMPLE_GAUGE, substream(seed, VERIFY_STREAM));
    let rows: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|(z, v)| {
            let hv = h.eval(z, v)?;
            let gv = g_b.eval(z, v)?;
            let k = hsc_chern_finsler(h, z, v)?;
            Ok((hv / gv, hv - gv, k))
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let curv: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let min_excess = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let (ratio_min, ratio_max) = extrema(&pairs, &ratios);
    let (_, hsc_max) = extrema(&pairs, &curv);
    let c2 = config.c2();
    let hsc_bound = -config.k / config.c + config.b;
    Ok(EquivalenceReport {
        config: *config,
        c2,
        samples,
        seed,
        tolerance: tol,
        lower: Verdict::from_bool(ratio_min.value >= 1.0 - tol),
        upper: Verdict::from_bool(ratio_max.value <= c2 * (1.0 + tol)),
        curvature: Verdict::from_bool(hsc_max.value <= hsc_bound + 1e-6),
        ratio_min,
        ratio_max,
        min_excess,
        hsc_max,
        hsc_bound,
    })
}

/// Measure, pick `C = fraction * K/B`, build `H` and verify.
pub fn sandwich_suite(
    g: Arc<dyn FinslerMetricModel>,
    g_b: Arc<dyn FinslerMetricModel>,
    domain: &DomainSpec,
    fraction: f64,
    samples: usize,
    seed: u64,
) -> Result<EquivalenceReport> {
    let (wg, wb) = measure_sandwich_constants(g.as_ref(), g_b.as_ref(), domain, samples, seed)?;
    let cfg = measured_config(&wg, &wb, fraction)?;
    let h = build_h(g, g_b.clone(), &cfg)?;
    verify_sandwich(&h, g_b.as_ref(), &cfg, samples, seed)
}

/// `𝔎²` (or `ℭ²`) as a Finsler metric, from the certified interval.
///
/// On balls and polydisks the interval collapses, so this is the metric itself.
/// Derivatives fall back to finite differences.
#[derive(Debug, Clone)]
pub struct InvariantSquared {
    domain: DomainSpec,
    upper: bool,
}

impl InvariantSquared {
    pub fn kobayashi(domain: DomainSpec) -> Self {
        Self { domain, upper: true }
    }

    pub fn caratheodory(domain: DomainSpec) -> Self {
        Self { domain, upper: false }
    }
}

impl FinslerMetricModel for InvariantSquared {
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> Option<&DomainSpec> {
        Some(&self.domain)
    }

    fn eval_unchecked(&self, z: &CPoint, v: &CTangent) -> f64 {
        if v.is_zero() {
            return 0.0;
        }
        match kobayashi_metric(&self.domain, z, v, 1) {
            Ok(i) if self.upper => i.upper * i.upper,
            Ok(i) => i.lower * i.lower,
            Err(_) => f64::NAN,
        }
    }

    fn label(&self) -> String {
        let name = if self.upper { "kobayashi" } else { "caratheodory" };
        format!("{name}^2({})", self.domain.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwarzReport {
    pub k1: f64,
    pub k2: f64,
    pub samples: usize,
    pub seed: u64,
    /// Largest `G / ((K1/K2) h)`.
    pub max_ratio: Extremum,
    pub tolerance: f64,
    pub verdict: Verdict,
}

/// Identity-map Schwarz inequality `G <= (K1/K2) h`.
#[allow(clippy::too_many_arguments)]
pub fn schwarz_check(
    domain: &DomainSpec,
    h: &dyn FinslerMetricModel,
    k1: f64,
    g: &dyn FinslerMetricModel,
    k2: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<SchwarzReport> {
    if !(k2 > 0.0) {
        return Err(Error::Input(format!("target curvature bound K2 = {k2} must be positive")));
    }
    if !(k1 >= 0.0) {
        return Err(Error::Input(format!("source curvature bound K1 = {k1} must be nonnegative")));
    }
    if samples == 0 {
        return Err(Error::Input("schwarz check needs at least one sample".into()));
    }
    let pairs = point_vector_pairs(domain, samples, SAMPLE_GAUGE, substream(seed, VERIFY_STREAM));
    let factor = k1 / k2;
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(z, v)| Ok(g.eval(z, v)? / (factor * h.eval(z, v)?)))
        .collect::<Result<_>>()?;
    let (_, max_ratio) = extrema(&pairs, &ratios);
    let verdict = Verdict::from_bool(max_ratio.value <= 1.0 + tol);
    Ok(SchwarzReport { k1, k2, samples, seed, max_ratio, tolerance: tol, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayLengths {
    pub direction: CTangent,
    pub epsilons: Vec<f64>,
    pub lengths: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub increasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub rays: Vec<RayLengths>,
    pub min_slope: f64,
    pub min_r_squared: f64,
    pub divergent: bool,
    pub warnings: Vec<String>,
}

pub const COMPLETENESS_R2: f64 = 0.99;
const PANEL_NODES: usize = 20;

/// Parameter `t` on the ray `t u` where the boundary distance drops to `eps`.
fn ray_parameter(domain: &DomainSpec, u: &CTangent, exit: f64, eps: f64) -> Result<f64> {
    let origin = CPoint::zeros(domain.dim());
    if domain.boundary_distance(&origin)? <= eps {
        return Err(Error::Input(format!("epsilon {eps} exceeds the boundary distance of the origin")));
    }
    let (mut lo, mut hi) = (0.0, exit);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if domain.boundary_distance(&CPoint::new(u.scale_re(mid).coords))? > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `∫_0^t √G(s u, u) ds`, with panels halving toward the exit point `exit`.
fn ray_length(metric: &dyn FinslerMetricModel, u: &CTangent, exit: f64, t: f64, nodes: &[(f64, f64)]) -> Result<f64> {
    let mut total = 0.0;
    let mut a = 0.0;
    let mut gap = exit;
    while a < t {
        gap *= 0.5;
        let b = (exit - gap).min(t);
        for &(x, w) in nodes {
            let s = a + (b - a) * x;
            let g = metric.eval(&CPoint::new(u.scale_re(s).coords), u)?;
            if !(g.is_finite() && g >= 0.0) {
                return Err(Error::Degenerate(format!("metric value {g} at ray parameter {s}")));
            }
            total += (b - a) * w * g.sqrt();
        }
        a = b;
    }
    Ok(total)
}

/// Lengths of rays from 0 to boundary distance `eps`, fitted against `log(1/eps)`.
pub fn completeness_probe(
    metric: &dyn FinslerMetricModel,
    domain: &DomainSpec,
    directions: &[CTangent],
    epsilons: &[f64],
) -> Result<CompletenessReport> {
    if directions.is_empty() || epsilons.len() < 2 {
        return Err(Error::Input("completeness probe needs a direction and at least two epsilons".into()));
    }
    if epsilons.windows(2).any(|w| !(w[1] < w[0])) || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::Input("epsilons must be positive and strictly decreasing".into()));
    }
    let nodes = gauss_legendre_unit(PANEL_NODES);
    let origin = CPoint::zeros(domain.dim());
    let mut rays = Vec::new();
    let mut warnings = Vec::new();
    for d in directions {
        let u = d.scale_re(1.0 / d.norm());
        let exit = domain.ray_exit(&origin, &u)?;
        let mut eps_used = Vec::new();
        let mut lengths = Vec::new();
        for &eps in epsilons {
            let t = ray_parameter(domain, &u, exit, eps)?;
            match ray_length(metric, &u, exit, t, &nodes) {
                Ok(l) => {
                    eps_used.push(eps);
                    lengths.push(l);
                }
                Err(e) => {
                    warnings.push(format!("ray {:?} truncated at eps = {eps}: {e}", u.coords));
                    break;
                }
            }
        }
        let x: Vec<f64> = eps_used.iter().map(|e| -e.ln()).collect();
        let (slope, intercept, r_squared) =
            if lengths.len() >= 2 { linear_fit(&x, &lengths) } else { (0.0, lengths.first().copied().unwrap_or(0.0), 0.0) };
        let increasing = lengths.windows(2).all(|w| w[1] > w[0]);
        rays.push(RayLengths { direction: u, epsilons: eps_used, lengths, slope, intercept, r_squared, increasing });
    }
    let min_slope = rays.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min);
    let min_r_squared = rays.iter().map(|r| r.r_squared).fold(f64::INFINITY, f64::min);
    let divergent = rays.iter().all(|r| r.increasing && r.slope > 0.0 && r.r_squared > COMPLETENESS_R2 && r.lengths.len() >= 2);
    Ok(CompletenessReport { rays, min_slope, min_r_squared, divergent, warnings })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KobayashiKahlerReport {
    pub window: CurvatureWindow,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// `min 𝔎²_lower / h`, to compare with `B/4`.
    pub lower_ratio: Option<Extremum>,
    /// `max 𝔎²_upper / h`, to compare with `A/4`.
    pub upper_ratio: Option<Extremum>,
    pub verdict: Verdict,
}

/// `(B/4) h <= 𝔎² <= (A/4) h` with the interval certificates of `𝔎`.
///
/// Samples stay within gauge `max_gauge`; truncated numerical kernels need it well below one.
pub fn kobayashi_kahler_equivalence(
    domain: &DomainSpec,
    h: Arc<dyn KahlerMetricField>,
    samples: usize,
    max_gauge: f64,
    seed: u64,
    tol: f64,
) -> Result<KobayashiKahlerReport> {
    let model = HermitianModel::new(h);
    let window = window_within(&model, domain, samples, max_gauge, substream(seed, MEASURE_STREAM))?;
    if !window.is_negative() {
        return Ok(KobayashiKahlerReport {
            window,
            samples,
            seed,
            tolerance: tol,
            lower_ratio: None,
            upper_ratio: None,
            verdict: Verdict::PreconditionViolation,
        });
    }
    let pairs = point_vector_pairs(domain, samples, max_gauge, substream(seed, VERIFY_STREAM));
    let rows: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|(z, v)| {
            let i = kobayashi_metric(domain, z, v, 1)?;
            let hv = model.eval(z, v)?;
            Ok((i.lower * i.lower / hv, i.upper * i.upper / hv))
        })
        .collect::<Result<_>>()?;
    let lows: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ups: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (lower_ratio, _) = extrema(&pairs, &lows);
    let (_, upper_ratio) = extrema(&pairs, &ups);
    let ok = lower_ratio.value >= 0.25 * window.b() * (1.0 - tol) && upper_ratio.value <= 0.25 * window.a() * (1.0 + tol);
    Ok(KobayashiKahlerReport {
        window,
        samples,
        seed,
        tolerance: tol,
        lower_ratio: Some(lower_ratio),
        upper_ratio: Some(upper_ratio),
        verdict: Verdict::from_bool(ok),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryReport {
    pub window: CurvatureWindow,
    pub c: f64,
    pub c3: f64,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Range of `H / h` with `H = C ℭ² + h`.
    pub ratio_min: Extremum,
    pub ratio_max: Extremum,
    pub lower: Verdict,
    pub upper: Verdict,
}

impl CaratheodoryReport {
    pub fn verdict(&self) -> Verdict {
        Verdict::from_bool(self.lower.passed() && self.upper.passed())
    }
}

/// `h <= C ℭ² + h <= C3 h` on balls and polydisks, where `ℭ` is known exactly.
pub fn caratheodory_h_check(
    domain: &DomainSpec,
    h: Arc<dyn KahlerMetricField>,
    c: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<CaratheodoryReport> {
    if !matches!(domain.kind(), DomainKind::Ball { .. } | DomainKind::Polydisk { .. }) {
        return Err(Error::UnsupportedDomain(format!("no exact Carathéodory metric on {}", domain.label())));
    }
    let model = HermitianModel::new(h);
    let window = measure_curvature_window(&model, domain, samples, substream(seed, MEASURE_STREAM))?;
    let b = window.require_negative("kähler metric")?;
    let cfg = EquivalenceConfig { c, k: f64::NAN, a: window.a(), b, c1: f64::NAN };
    cfg.check_caratheodory_window()?;
    let c3 = cfg.c3();
    let pairs = point_vector_pairs(domain, samples, SAMPLE_GAUGE, substream(seed, VERIFY_STREAM));
    let ratios: Vec<f64> = pairs
        .par_iter()
        .map(|(z, v)| {
            let (lo, _) = caratheodory_lower_support(domain, z, v, DEFAULT_DIRECTION_BUDGET)?;
            let hv = model.eval(z, v)?;
            Ok((c * lo * lo + hv) / hv)
        })
        .collect::<Result<_>>()?;
    let (ratio_min, ratio_max) = extrema(&pairs, &ratios);
    Ok(CaratheodoryReport {
        c,
        c3,
        samples,
        seed,
        tolerance: tol,
        lower: Verdict::from_bool(ratio_min.value >= 1.0 - tol),
        upper: Verdict::from_bool(ratio_max.value <= c3 * (1.0 + tol)),
        window,
        ratio_min,
        ratio_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistancePair {
    pub p: CPoint,
    pub q: CPoint,
    /// Kobayashi distance (exact on balls, an upper bound elsewhere).
    pub d_k: f64,
    /// Length of the segment `p → q` under `√H`, an upper bound for `d_H`.
    pub segment_length: f64,
    /// `d_K / (√(B/4) L)`.
    pub ratio: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub b: f64,
    pub pairs: Vec<DistancePair>,
    pub verdict: Verdict,
}

const SEGMENT_PANELS: usize = 8;

fn segment_length(h: &dyn FinslerMetricModel, p: &CPoint, q: &CPoint, nodes: &[(f64, f64)]) -> Result<f64> {
    let d = CTangent::new(q.coords.iter().zip(&p.coords).map(|(a, b)| a - b).collect());
    if d.is_zero() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for k in 0..SEGMENT_PANELS {
        for &(x, w) in nodes {
            let s = (k as f64 + x) / SEGMENT_PANELS as f64;
            total += w / SEGMENT_PANELS as f64 * h.eval(&p.displaced(&d, C64::new(s, 0.0)), &d)?.sqrt();
        }
    }
    Ok(total)
}

/// `d_K >= √(B/4) d_H` where it can be certified.
///
/// Only balls have an exact `d_K` here. Since `L >= d_H`, a pair passing with the
/// segment length passes outright; anything else is inconclusive, never a failure.
pub fn distance_comparison_check(
    domain: &DomainSpec,
    h: &dyn FinslerMetricModel,
    b: f64,
    pairs: &[(CPoint, CPoint)],
    tol: f64,
) -> Result<DistanceReport> {
    if !(b > 0.0) {
        return Err(Error::Input(format!("curvature bound B = {b} must be positive")));
    }
    let exact = matches!(domain.kind(), DomainKind::Ball { .. });
    let nodes = gauss_legendre_unit(PANEL_NODES);
    let out: Vec<DistancePair> = pairs
        .par_iter()
        .map(|(p, q)| {
            let d_k = kobayashi_distance_upper(domain, p, q, 1)?;
            let segment_length = segment_length(h, p, q, &nodes)?;
            let ratio = d_k / ((0.25 * b).sqrt() * segment_length);
            let verdict = if exact && ratio >= 1.0 - tol { Verdict::Pass } else { Verdict::Inconclusive };
            Ok(DistancePair { p: p.clone(), q: q.clone(), d_k, segment_length, ratio, verdict })
        })
        .collect::<Result<_>>()?;
    let verdict = if !out.is_empty() && out.iter().all(|x| x.verdict.passed()) { Verdict::Pass } else { Verdict::Inconclusive };
    Ok(DistanceReport { b, pairs: out, verdict })
}

#[cfg(test)]
mod tests;
