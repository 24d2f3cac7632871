//! Log-space adaptive Gauss–Legendre quadrature.
//!
//! Integrands are supplied as their logarithm and the result is the
//! logarithm of the integral, so magnitudes far outside the `f64` range are
//! fine as long as their logs are. Panels touching a finite endpoint of the
//! domain use the substitution `x = endpoint ± t²`, which turns power-law
//! endpoint singularities `|x - e|^{k - 1/2}` into smooth integrands.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_subdivisions: u32,
    /// Gauss–Legendre nodes per panel.
    pub panel_order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-12,
            max_subdivisions: 60,
            panel_order: 32,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Config(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.panel_order < 2 {
            return Err(Error::Config("panel_order must be at least 2".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::Config("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Cap on panel evaluations in one call, independent of the depth limit.
const MAX_PANEL_EVALUATIONS: usize = 200_000;

/// Where an integrand is evaluated. Near a finite endpoint the distance to
/// that endpoint is supplied exactly; `x` itself may round onto it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub x: f64,
    pub offset: Offset,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Offset {
    Interior,
    /// `x = lower + d`
    FromLower(f64),
    /// `x = upper − d`
    FromUpper(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval(f64, f64),
    HalfLine(f64),
}

/// Numerically stable `log Σ exp(v_i)`. Returns `-∞` for an empty slice or
/// when every term is `-∞`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let step = p1 / dp;
            z -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Debug, Clone, Copy)]
enum Chart {
    Linear,
    /// `x = a + p²`
    FromLower(f64),
    /// `x = b - p²`
    FromUpper(f64),
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    chart: Chart,
    p0: f64,
    p1: f64,
}

impl Panel {
    fn halves(&self) -> (Panel, Panel) {
        let mid = 0.5 * (self.p0 + self.p1);
        (
            Panel { p1: mid, ..*self },
            Panel { p0: mid, ..*self },
        )
    }
}

struct Integrator<'a, F> {
    f_log: &'a F,
    cfg: QuadratureConfig,
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
    evaluations: Cell<usize>,
}

impl<'a, F: Fn(Site) -> f64> Integrator<'a, F> {
    fn new(f_log: &'a F, cfg: QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        let (nodes, weights) = gauss_legendre(cfg.panel_order);
        Ok(Integrator {
            f_log,
            cfg,
            nodes,
            log_weights: weights.iter().map(|w| w.ln()).collect(),
            evaluations: Cell::new(0),
        })
    }

    fn panel_log(&self, panel: &Panel) -> Result<f64> {
        let used = self.evaluations.get() + 1;
        if used > MAX_PANEL_EVALUATIONS {
            return Err(Error::NonConvergence(format!(
                "gave up after {MAX_PANEL_EVALUATIONS} panel evaluations"
            )));
        }
        self.evaluations.set(used);
        let half = 0.5 * (panel.p1 - panel.p0);
        let mid = 0.5 * (panel.p1 + panel.p0);
        let log_half = half.ln();
        let mut terms = Vec::with_capacity(self.nodes.len());
        for (t, lw) in self.nodes.iter().zip(&self.log_weights) {
            let p = mid + half * t;
            let (site, log_jac) = match panel.chart {
                Chart::Linear => (Site { x: p, offset: Offset::Interior }, 0.0),
                Chart::FromLower(a) => {
                    let d = p * p;
                    (Site { x: a + d, offset: Offset::FromLower(d) }, (2.0 * p).ln())
                }
                Chart::FromUpper(b) => {
                    let d = p * p;
                    (Site { x: b - d, offset: Offset::FromUpper(d) }, (2.0 * p).ln())
                }
            };
            let x = site.x;
            let v = (self.f_log)(site);
            if v.is_nan() || v == f64::INFINITY {
                return Err(Error::Domain(format!("log-integrand is {v} at x = {x}")));
            }
            terms.push(lw + log_half + log_jac + v);
        }
        Ok(log_sum_exp(&terms))
    }

    fn refine(
        &self,
        panel: Panel,
        whole: f64,
        depth: u32,
        total: &mut f64,
        out: &mut Vec<f64>,
    ) -> Result<()> {
        let (left, right) = panel.halves();
        let ql = self.panel_log(&left)?;
        let qr = self.panel_log(&right)?;
        let fine = log_add(ql, qr);
        if fine > *total {
            *total = fine;
        }
        let err = if fine == f64::NEG_INFINITY && whole == f64::NEG_INFINITY {
            0.0
        } else {
            ((fine - *total).exp() - (whole - *total).exp()).abs()
        };
        if err <= self.cfg.rel_tol {
            out.push(fine);
            return Ok(());
        }
        if depth >= self.cfg.max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "panel [{}, {}] still has relative error {err:.3e} after {depth} bisections",
                panel.p0, panel.p1
            )));
        }
        self.refine(left, ql, depth + 1, total, out)?;
        self.refine(right, qr, depth + 1, total, out)
    }

    /// Integrates over `[lo, hi]`, substituting at the endpoints flagged as
    /// singular. `floor` is a log-magnitude already accumulated elsewhere
    /// that sets the absolute error scale.
    fn interval(
        &self,
        lo: f64,
        hi: f64,
        breaks: &[f64],
        singular: (bool, bool),
        floor: f64,
    ) -> Result<f64> {
        let mut cuts: Vec<f64> = breaks
            .iter()
            .copied()
            .filter(|b| b.is_finite() && *b > lo && *b < hi)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        if cuts.is_empty() {
            cuts.push(0.5 * (lo + hi));
        }
        let mut edges = Vec::with_capacity(cuts.len() + 2);
        edges.push(lo);
        edges.extend(cuts);
        edges.push(hi);

        let last = edges.len() - 2;
        let panels: Vec<Panel> = edges
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (a, b) = (w[0], w[1]);
                if i == 0 && singular.0 {
                    Panel { chart: Chart::FromLower(a), p0: 0.0, p1: (b - a).sqrt() }
                } else if i == last && singular.1 {
                    Panel { chart: Chart::FromUpper(b), p0: 0.0, p1: (b - a).sqrt() }
                } else {
                    Panel { chart: Chart::Linear, p0: a, p1: b }
                }
            })
            .collect();

        let coarse = panels
            .iter()
            .map(|p| self.panel_log(p))
            .collect::<Result<Vec<_>>>()?;
        let mut total = log_add(floor, log_sum_exp(&coarse));
        let mut accepted = Vec::new();
        for (panel, q) in panels.into_iter().zip(coarse) {
            self.refine(panel, q, 0, &mut total, &mut accepted)?;
        }
        Ok(log_sum_exp(&accepted))
    }
}

/// `log ∫ exp(f_log(x)) dx` over `domain`.
pub fn integrate_log<F: Fn(f64) -> f64>(f_log: F, domain: Domain, cfg: &QuadratureConfig) -> Result<f64> {
    integrate_log_sites(|site: Site| f_log(site.x), domain, &[], cfg)
}

/// Like [`integrate_log`], with initial panel boundaries at `breaks`.
///
/// Breakpoints are how callers point the adaptive scheme at narrow features
/// (a Gaussian bump far from the endpoints) that a coarse panel could miss.
/// Breakpoints outside the domain are ignored.
pub fn integrate_log_with_breaks<F: Fn(f64) -> f64>(
    f_log: F,
    domain: Domain,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    integrate_log_sites(|site: Site| f_log(site.x), domain, breaks, cfg)
}

/// Like [`integrate_log_with_breaks`], for integrands that need the exact
/// distance to an endpoint (e.g. `log(b − x)` when `x` is within rounding
/// of `b`).
pub fn integrate_log_sites<F: Fn(Site) -> f64>(
    f_log: F,
    domain: Domain,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let integ = Integrator::new(&f_log, *cfg)?;
    match domain {
        Domain::Interval(lo, hi) => {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Domain(format!("empty or invalid interval [{lo}, {hi}]")));
            }
            integ.interval(lo, hi, breaks, (true, true), f64::NEG_INFINITY)
        }
        Domain::HalfLine(lo) => {
            if !lo.is_finite() {
                return Err(Error::Domain(format!("invalid half-line start {lo}")));
            }
            let reach = breaks
                .iter()
                .copied()
                .filter(|b| b.is_finite() && *b > lo)
                .fold(lo, f64::max);
            let mut hi = reach.max(lo) + 1.0;
            let mut total = integ.interval(lo, hi, breaks, (true, false), f64::NEG_INFINITY)?;
            let mut previous = total;
            for _ in 0..64 {
                let next = hi + (hi - lo);
                let chunk = integ.interval(hi, next, &[], (false, false), total)?;
                total = log_add(total, chunk);
                hi = next;
                let small = chunk == f64::NEG_INFINITY || (chunk - total).exp() < cfg.rel_tol;
                if small && chunk <= previous {
                    return Ok(total);
                }
                previous = chunk;
            }
            Err(Error::NonConvergence(format!(
                "half-line integral from {lo} has not decayed by x = {hi}"
            )))
        }
    }
}
