//! Sampling, moment estimation, and simulation diagnostics.
//!
//! Sampling follows the conditional factorization of the model: `X₁` by
//! inverting its marginal survival, then `S` given `X₁` by inverting the
//! conditional survival, and `X₂ = S − X₁`. Both inversions reuse the
//! prediction machinery, so a sample is exactly the law the analytic
//! formulas describe, and the counter-based RNG makes it reproducible
//! per `(model, n, seed)`.
//!
//! Estimation implements the Clayton/Pareto moment pipeline: Kendall's τ
//! fixes the dependence parameter through `γ̂ = (1 − τ̂)/(2τ̂)`, and the
//! sample means fix the rates through `E(Xᵢ) = 1/(rate·(γ̂ − 1))`. A
//! pinball-loss linear quantile fit serves as the nonparametric comparator,
//! and numeric moments integrate survival representations directly against
//! the model.

use crate::error::{Error, Result};
use crate::model::{Margin, TteModel};
use crate::numeric::quad::{integrate_split, QuadratureCfg};
use crate::predict::{invert_generator_density, ConfidenceBand};
use crate::rng::CounterRng;
use std::cell::RefCell;

/// A reproducible sample of `(X₁, X₂, S)` triples.
#[derive(Debug, Clone)]
pub struct SamplePairs {
    pub seed: u64,
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    /// Componentwise sums: `s[i] = x1[i] + x2[i]` exactly.
    pub s: Vec<f64>,
}

impl SamplePairs {
    pub fn n(&self) -> usize {
        self.x1.len()
    }
}

/// Draw `n` pairs from the model by double inversion.
///
/// `X₁ᵢ = F̄₁⁻¹(Uᵢ)` and `X₂ᵢ` solves the conditional survival equation
/// `g(R₁(X₁ᵢ) + R₂(x₂)) = Vᵢ·g(R₁(X₁ᵢ))`, with `(Uᵢ, Vᵢ)` the `i`-th
/// uniform pair of a counter-based stream keyed by `seed`.
pub fn sample_pairs(m: &TteModel, n: usize, seed: u64) -> Result<SamplePairs> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            requirement: "at least one draw",
        });
    }
    let rng = CounterRng::new(seed);
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = rng.pair_u01(i as u64);
        let draw = (|| -> Result<(f64, f64)> {
            let a = (m.margins[0].inverse_cum_hazard)((m.generator.survival_inverse)(u)?)?;
            let t_lo = (m.margins[0].cum_hazard)(a);
            let den = (m.generator.density)(t_lo);
            if den <= 0.0 {
                return Err(Error::DegenerateConditioning {
                    value: a,
                    reason: "marginal density factor g(R₁(x₁)) vanishes",
                });
            }
            let (t, _) = invert_generator_density(&m.generator, v * den, t_lo)?;
            let b = (m.margins[1].inverse_cum_hazard)((t - t_lo).max(0.0))?;
            Ok((a, b))
        })();
        match draw {
            Ok((a, b)) => {
                x1.push(a);
                x2.push(b);
                s.push(a + b);
            }
            Err(e) => {
                return Err(Error::SampleInversion {
                    index: i,
                    u,
                    v,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(SamplePairs { seed, x1, x2, s })
}

/// Count inversions of `v` by merge sort (the discordant-pair count of a
/// sequence already ordered by the first coordinate).
fn count_inversions(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = v.split_at_mut(mid);
    let mut inv = count_inversions(left, buf) + count_inversions(right, buf);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            buf[k] = right[j];
            inv += (left.len() - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + left.len() - i].copy_from_slice(&left[i..]);
    buf[k + left.len() - i..n].copy_from_slice(&right[j..]);
    v.copy_from_slice(&buf[..n]);
    inv
}

fn has_ties(v: &[f64]) -> bool {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Kendall's τ of paired observations.
///
/// Tie-free samples use an `O(n log n)` merge count of discordant pairs;
/// with ties the exact `O(n²)` concordance sum is used, counting tied pairs
/// as neither concordant nor discordant (τ-a denominator `n(n−1)/2`).
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DegenerateSample {
            reason: "paired samples must have equal length",
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::DegenerateSample {
            reason: "Kendall's τ needs at least two pairs",
        });
    }
    if x.iter().chain(y.iter()).any(|t| !t.is_finite()) {
        return Err(Error::DegenerateSample {
            reason: "Kendall's τ needs finite observations",
        });
    }
    let pairs = (n * (n - 1) / 2) as f64;
    if has_ties(x) || has_ties(y) {
        let mut net = 0i64;
        for i in 0..n {
            for j in (i + 1)..n {
                let p = (x[i] - x[j]) * (y[i] - y[j]);
                if p > 0.0 {
                    net += 1;
                } else if p < 0.0 {
                    net -= 1;
                }
            }
        }
        return Ok(net as f64 / pairs);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut ys: Vec<f64> = order.into_iter().map(|i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let discordant = count_inversions(&mut ys, &mut buf) as f64;
    Ok((pairs - 2.0 * discordant) / pairs)
}

/// Result of the Clayton/Pareto moment fit.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub tau_hat: f64,
    pub gamma_hat: f64,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// Sample means used for the rate estimates.
    pub mean_x1: f64,
    pub mean_x2: f64,
}

impl FitResult {
    /// The fitted scale-parameter model.
    pub fn model(&self) -> Result<TteModel> {
        TteModel::gk(
            crate::generator::make_pareto_ii(self.gamma_hat)?,
            self.alpha_hat,
            self.beta_hat,
        )
    }
}

/// Moment fit from summary statistics: `γ̂ = (1 − τ̂)/(2τ̂)`, then
/// `rateᵢ = 1/((γ̂ − 1)·meanᵢ)`.
pub fn fit_from_summary(tau_hat: f64, mean_x1: f64, mean_x2: f64) -> Result<FitResult> {
    if !(tau_hat > 0.0 && tau_hat < 1.0) {
        return Err(Error::EstimationBoundary {
            reason: "Kendall's τ estimate outside (0, 1)",
            tau_hat,
        });
    }
    for (mean, name) in [(mean_x1, "mean_x1"), (mean_x2, "mean_x2")] {
        if !(mean > 0.0 && mean.is_finite()) {
            return Err(Error::InvalidParameter {
                name,
                value: mean,
                requirement: "positive finite sample mean",
            });
        }
    }
    let gamma_hat = (1.0 - tau_hat) / (2.0 * tau_hat);
    // the 1e-12 guard absorbs rounding of τ̂ near the boundary 1/3
    if gamma_hat <= 1.0 + 1e-12 {
        return Err(Error::EstimationBoundary {
            reason: "estimated γ ≤ 1 implies nonexistent marginal means",
            tau_hat,
        });
    }
    Ok(FitResult {
        tau_hat,
        gamma_hat,
        alpha_hat: 1.0 / ((gamma_hat - 1.0) * mean_x1),
        beta_hat: 1.0 / ((gamma_hat - 1.0) * mean_x2),
        mean_x1,
        mean_x2,
    })
}

/// Moment fit from a sample: Kendall's τ of `(X₁, X₂)` plus the two means.
pub fn fit_clayton_pareto(pairs: &SamplePairs) -> Result<FitResult> {
    let tau_hat = kendall_tau(&pairs.x1, &pairs.x2)?;
    let n = pairs.n() as f64;
    let mean_x1 = pairs.x1.iter().sum::<f64>() / n;
    let mean_x2 = pairs.x2.iter().sum::<f64>() / n;
    fit_from_summary(tau_hat, mean_x1, mean_x2)
}

/// Mean pinball (check) loss `ρ_q(y − ŷ)` with
/// `ρ_q(u) = u·(q − 1{u < 0})`.
pub fn pinball_loss(y: &[f64], y_hat: &[f64], q: f64) -> Result<f64> {
    if y.len() != y_hat.len() || y.is_empty() {
        return Err(Error::DegenerateSample {
            reason: "pinball loss needs equal-length nonempty samples",
        });
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutsideDomain {
            what: "pinball quantile level",
            value: q,
            domain: "(0, 1)",
        });
    }
    let total: f64 = y
        .iter()
        .zip(y_hat)
        .map(|(&yi, &hi)| {
            let u = yi - hi;
            if u >= 0.0 {
                q * u
            } else {
                (q - 1.0) * u
            }
        })
        .sum();
    Ok(total / y.len() as f64)
}

fn line_loss(xs: &[f64], ys: &[f64], q: f64, a: f64, b: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let u = y - a - b * x;
            if u >= 0.0 {
                q * u
            } else {
                (q - 1.0) * u
            }
        })
        .sum()
}

/// Exact linear quantile regression `(intercept, slope)` minimizing the
/// pinball loss at level `q`.
///
/// An optimal line interpolates two observations, so the minimizer is found
/// by scoring every candidate line through a pair of data points with
/// distinct abscissas. Ties go to the smaller loss, then smaller `|slope|`,
/// then smaller `|intercept|`.
pub fn linear_quantile_fit(xs: &[f64], ys: &[f64], q: f64) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DegenerateSample {
            reason: "paired samples must have equal length",
        });
    }
    if xs.len() < 3 {
        return Err(Error::DegenerateSample {
            reason: "quantile fit needs at least three points",
        });
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutsideDomain {
            what: "quantile level",
            value: q,
            domain: "(0, 1)",
        });
    }
    let n = xs.len();
    let mut best: Option<(f64, f64, f64)> = None; // (loss, slope, intercept)
    for i in 0..n {
        for j in (i + 1)..n {
            if xs[i] == xs[j] {
                continue;
            }
            let b = (ys[j] - ys[i]) / (xs[j] - xs[i]);
            let a = ys[i] - b * xs[i];
            let loss = line_loss(xs, ys, q, a, b);
            let better = match best {
                None => true,
                Some((l0, b0, a0)) => {
                    loss < l0
                        || (loss == l0
                            && (b.abs() < b0.abs()
                                || (b.abs() == b0.abs() && a.abs() < a0.abs())))
                }
            };
            if better {
                best = Some((loss, b, a));
            }
        }
    }
    match best {
        Some((_, b, a)) => Ok((a, b)),
        None => Err(Error::DegenerateSample {
            reason: "all abscissas equal; no line fits",
        }),
    }
}

/// Fraction of a fresh seeded sample falling inside the band, with band
/// limits evaluated exactly at each sampled conditioning value.
pub fn empirical_coverage(
    m: &TteModel,
    band: &ConfidenceBand,
    n: usize,
    seed: u64,
) -> Result<f64> {
    use crate::predict::{
        cond_quantile_s_given_x1, cond_quantile_x1_given_s, BandKind, Direction,
    };
    if n < 100 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            requirement: "at least 100 draws for a coverage estimate",
        });
    }
    let sample = sample_pairs(m, n, seed)?;
    let quantile = |q: f64, c: f64| match band.direction {
        Direction::SGivenX1 => cond_quantile_s_given_x1(m, q, c),
        Direction::X1GivenS => cond_quantile_x1_given_s(m, q, c),
    };
    let mut inside = 0usize;
    for i in 0..n {
        let (c, target) = match band.direction {
            Direction::SGivenX1 => (sample.x1[i], sample.s[i]),
            Direction::X1GivenS => (sample.s[i], sample.x1[i]),
        };
        let (lo, hi) = match band.kind {
            BandKind::Centered => (
                quantile(0.5 * (1.0 - band.level), c)?,
                quantile(0.5 * (1.0 + band.level), c)?,
            ),
            BandKind::Bottom => {
                let bottom = match band.direction {
                    Direction::SGivenX1 => c,
                    Direction::X1GivenS => 0.0,
                };
                (bottom, quantile(band.level, c)?)
            }
        };
        if target >= lo && target <= hi {
            inside += 1;
        }
    }
    Ok(inside as f64 / n as f64)
}

/// Two-sided Kolmogorov–Smirnov distance between a sample and a
/// distribution function.
pub fn ks_statistic<F>(xs: &[f64], mut df: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if xs.is_empty() {
        return Err(Error::DegenerateSample {
            reason: "Kolmogorov–Smirnov distance needs a nonempty sample",
        });
    }
    if xs.iter().any(|t| !t.is_finite()) {
        return Err(Error::DegenerateSample {
            reason: "Kolmogorov–Smirnov distance needs finite observations",
        });
    }
    let mut sorted = xs.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = df(x)?;
        d = d.max(((i + 1) as f64 / n - f).abs()).max((f - i as f64 / n).abs());
    }
    Ok(d)
}

/// A moment of `(X₁, X₂, S)` computed by quadrature of survival
/// representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moment {
    MeanX1,
    MeanX2,
    VarX1,
    VarX2,
    CovX1X2,
    CovX1S,
}

/// Smallest dyadic cutoff `T` with `F̄ᵢ(T)·T^(power+1) < 1e−10`, so the
/// discarded tail of `∫ tᵖ·F̄ᵢ` is negligible at test tolerances.
fn moment_cutoff(m: &TteModel, margin: Margin, power: i32) -> Result<f64> {
    let mut t = 1.0f64;
    for _ in 0..120 {
        let tail = m.marginal_survival(margin, t)? * t.powi(power + 1);
        if tail < 1e-10 {
            return Ok(t);
        }
        t *= 2.0;
    }
    Err(Error::TailNotNegligible {
        what: "moment integrand tail",
        at: t,
        value: m.marginal_survival(margin, t)? * t.powi(power + 1),
    })
}

fn raw_mean(m: &TteModel, margin: Margin) -> Result<f64> {
    let t = moment_cutoff(m, margin, 0)?;
    let captured = RefCell::new(None);
    let value = integrate_split(
        |x: f64| match m.marginal_survival(margin, x) {
            Ok(v) => v,
            Err(e) => {
                captured.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        t,
        &[t / 16.0, t / 4.0],
        &m.quad,
    );
    if let Some(e) = captured.into_inner() {
        return Err(e);
    }
    value
}

fn raw_second_moment(m: &TteModel, margin: Margin) -> Result<f64> {
    let t = moment_cutoff(m, margin, 1)?;
    let captured = RefCell::new(None);
    let value = integrate_split(
        |x: f64| match m.marginal_survival(margin, x) {
            Ok(v) => 2.0 * x * v,
            Err(e) => {
                captured.borrow_mut().get_or_insert(e);
                0.0
            }
        },
        0.0,
        t,
        &[t / 16.0, t / 4.0],
        &m.quad,
    );
    if let Some(e) = captured.into_inner() {
        return Err(e);
    }
    value
}

/// `E(X₁X₂) = ∫∫ P(X₁ > x, X₂ > y) dy dx` by nested quadrature.
fn raw_cross_moment(m: &TteModel) -> Result<f64> {
    let t1 = moment_cutoff(m, Margin::First, 1)?;
    let t2 = moment_cutoff(m, Margin::Second, 1)?;
    let cfg = QuadratureCfg {
        abs_tol: m.quad.abs_tol,
        rel_tol: m.quad.rel_tol,
        max_subdivisions: m.quad.max_subdivisions,
    };
    let captured = RefCell::new(None);
    let value = integrate_split(
        |x: f64| {
            let inner = integrate_split(
                |y: f64| match m.joint_survival(x, y) {
                    Ok(v) => v,
                    Err(e) => {
                        captured.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
                0.0,
                t2,
                &[t2 / 16.0, t2 / 4.0],
                &cfg,
            );
            match inner {
                Ok(v) => v,
                Err(e) => {
                    captured.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        t1,
        &[t1 / 16.0, t1 / 4.0],
        &m.quad,
    );
    if let Some(e) = captured.into_inner() {
        return Err(e);
    }
    value
}

/// Evaluate one moment of the model by quadrature.
///
/// Uses `E(X) = ∫ F̄`, `E(X²) = 2∫ t·F̄(t) dt`, and
/// `E(X₁X₂) = ∫∫ 𝐅̄(x, y) dx dy`; covariances are assembled from these,
/// with `Cov(X₁, S) = Var(X₁) + Cov(X₁, X₂)`.
pub fn numeric_moments(m: &TteModel, which: Moment) -> Result<f64> {
    match which {
        Moment::MeanX1 => raw_mean(m, Margin::First),
        Moment::MeanX2 => raw_mean(m, Margin::Second),
        Moment::VarX1 => {
            let mean = raw_mean(m, Margin::First)?;
            Ok(raw_second_moment(m, Margin::First)? - mean * mean)
        }
        Moment::VarX2 => {
            let mean = raw_mean(m, Margin::Second)?;
            Ok(raw_second_moment(m, Margin::Second)? - mean * mean)
        }
        Moment::CovX1X2 => Ok(raw_cross_moment(m)?
            - raw_mean(m, Margin::First)? * raw_mean(m, Margin::Second)?),
        Moment::CovX1S => {
            Ok(numeric_moments(m, Moment::VarX1)? + numeric_moments(m, Moment::CovX1X2)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{make_exponential, make_gumbel_barnett, make_pareto_ii};
    use crate::model::TteModel;
    use crate::predict::{confidence_band, BandKind, Direction};

    fn ex4_model() -> TteModel {
        TteModel::gk(make_gumbel_barnett(1.0).unwrap(), 3.0, 1.0).unwrap()
    }

    #[test]
    fn summary_fit_reproduces_reference_arithmetic() {
        let fit = fit_from_summary(0.158, 0.3880776, 0.8674393).unwrap();
        assert!((fit.gamma_hat - 2.6645569620253165).abs() < 1e-12);
        assert!((fit.alpha_hat - 1.5480420830106253).abs() < 1e-12);
        assert!((fit.beta_hat - 0.69256771773398353).abs() < 1e-12);
        let m = fit.model().unwrap();
        assert!(m.gk_params().is_some());
    }

    #[test]
    fn summary_fit_rejects_boundaries() {
        // τ = 1/3 gives γ = 1: marginal means do not exist
        let err = fit_from_summary(1.0 / 3.0, 0.5, 0.5).unwrap_err();
        assert!(matches!(err, Error::EstimationBoundary { .. }));
        assert!(fit_from_summary(0.4, 0.5, 0.5).is_err());
        assert!(fit_from_summary(0.0, 0.5, 0.5).is_err());
        assert!(fit_from_summary(1.0, 0.5, 0.5).is_err());
        assert!(fit_from_summary(0.2, -0.5, 0.5).is_err());
        assert!(fit_from_summary(0.2, 0.5, 0.0).is_err());
    }

    #[test]
    fn kendall_tau_on_toy_sets() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(kendall_tau(&x, &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&x, &[3.0, 2.0, 1.0]).unwrap(), -1.0);
        // one tied x-pair counts as neither concordant nor discordant
        let tau = kendall_tau(&[1.0, 1.0, 2.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((tau - 2.0 / 3.0).abs() < 1e-15);
        assert!(kendall_tau(&x, &[1.0]).is_err());
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn kendall_tau_merge_count_matches_direct_sum() {
        let rng = crate::rng::CounterRng::new(7);
        let x: Vec<f64> = (0..200).map(|i| rng.nth_u01(2 * i)).collect();
        let y: Vec<f64> = (0..200).map(|i| rng.nth_u01(2 * i + 1)).collect();
        let fast = kendall_tau(&x, &y).unwrap();
        let mut net = 0i64;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                let p = (x[i] - x[j]) * (y[i] - y[j]);
                net += if p > 0.0 { 1 } else { -1 };
            }
        }
        let slow = net as f64 / (x.len() * (x.len() - 1) / 2) as f64;
        assert!((fast - slow).abs() < 1e-15, "{fast} vs {slow}");
    }

    #[test]
    fn samples_are_reproducible_and_consistent() {
        let m = ex4_model();
        let a = sample_pairs(&m, 64, 99).unwrap();
        let b = sample_pairs(&m, 64, 99).unwrap();
        assert_eq!(a.x1, b.x1);
        assert_eq!(a.x2, b.x2);
        assert_eq!(a.s, b.s);
        let c = sample_pairs(&m, 64, 100).unwrap();
        assert_ne!(a.x1, c.x1);
        for i in 0..a.n() {
            assert!(a.x1[i] >= 0.0 && a.x2[i] >= 0.0);
            assert_eq!(a.s[i], a.x1[i] + a.x2[i]);
        }
        assert!(sample_pairs(&m, 0, 1).is_err());
    }

    #[test]
    fn sampled_tau_matches_clayton_theory() {
        // γ = 2 ⇒ τ = 1/(1 + 2γ) = 0.2
        let m = TteModel::gk(make_pareto_ii(2.0).unwrap(), 2.0, 1.0).unwrap();
        let sample = sample_pairs(&m, 10_000, 20260815).unwrap();
        let tau = kendall_tau(&sample.x1, &sample.x2).unwrap();
        assert!((tau - 0.2).abs() < 0.05, "tau = {tau}");
        let fit = fit_clayton_pareto(&sample).unwrap();
        assert!((fit.gamma_hat - 2.0).abs() < 0.5, "gamma = {}", fit.gamma_hat);
    }

    #[test]
    fn independent_model_has_negligible_tau() {
        let m = TteModel::gk(make_exponential(), 1.0, 1.0).unwrap();
        let sample = sample_pairs(&m, 4000, 5).unwrap();
        let tau = kendall_tau(&sample.x1, &sample.x2).unwrap();
        assert!(tau.abs() < 0.05, "tau = {tau}");
    }

    // Reference values computed with 60-digit arithmetic.
    #[test]
    fn ex4_moments_match_reference() {
        let m = ex4_model();
        let table = [
            (Moment::MeanX1, 0.19878245410773136, 1e-7),
            (Moment::MeanX2, 0.59634736232319407, 1e-7),
            (Moment::VarX1, 0.019588954834998606, 1e-7),
            (Moment::VarX2, 0.17630059351498745, 1e-7),
            (Moment::CovX1X2, -0.029888263839140577, 2e-6),
            (Moment::CovX1S, -0.010299309004141971, 2e-6),
        ];
        for (which, want, tol) in table {
            let got = numeric_moments(&m, which).unwrap();
            assert!((got - want).abs() < tol, "{which:?}: {got}, want {want}");
        }
    }

    #[test]
    fn independence_makes_cross_covariance_vanish() {
        let m = TteModel::gk(make_exponential(), 1.0, 1.0).unwrap();
        let cov = numeric_moments(&m, Moment::CovX1X2).unwrap();
        assert!(cov.abs() < 1e-8, "{cov}");
        let mean = numeric_moments(&m, Moment::MeanX1).unwrap();
        assert!((mean - 1.0).abs() < 1e-8);
        let var = numeric_moments(&m, Moment::VarX1).unwrap();
        assert!((var - 1.0).abs() < 1e-7);
    }

    #[test]
    fn pinball_fit_finds_zero_loss_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let (a, b) = linear_quantile_fit(&xs, &ys, 0.5).unwrap();
        assert!(a.abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
    }

    #[test]
    fn pinball_fit_picks_loss_minimizer_and_breaks_ties() {
        // best median line for a tent shape is the flat base
        let (a, b) = linear_quantile_fit(&[0.0, 1.0, 2.0], &[0.0, 1.0, 0.0], 0.5).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        // all candidate lines tie at loss 1: smaller |slope|, then |intercept|
        let (a, b) =
            linear_quantile_fit(&[0.0, 2.0, 0.0, 2.0], &[0.0, 0.0, 1.0, 1.0], 0.5).unwrap();
        assert_eq!((a, b), (0.0, 0.0));
        assert!(linear_quantile_fit(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0], 0.5).is_err());
        assert!(linear_quantile_fit(&[0.0, 1.0], &[0.0, 1.0], 0.5).is_err());
    }

    #[test]
    fn pinball_fit_is_optimal_over_candidate_lines() {
        let m = ex4_model();
        let sample = sample_pairs(&m, 40, 11).unwrap();
        let q = 0.25;
        let (a, b) = linear_quantile_fit(&sample.s, &sample.x1, q).unwrap();
        let best = line_loss(&sample.s, &sample.x1, q, a, b);
        for i in 0..sample.n() {
            for j in (i + 1)..sample.n() {
                if sample.s[i] == sample.s[j] {
                    continue;
                }
                let bb = (sample.x1[j] - sample.x1[i]) / (sample.s[j] - sample.s[i]);
                let aa = sample.x1[i] - bb * sample.s[i];
                assert!(
                    best <= line_loss(&sample.s, &sample.x1, q, aa, bb) + 1e-12,
                    "candidate through ({i},{j}) beats the fit"
                );
            }
        }
        let preds: Vec<f64> = sample.s.iter().map(|s| a + b * s).collect();
        let mean_loss = pinball_loss(&sample.x1, &preds, q).unwrap();
        assert!((mean_loss - best / sample.n() as f64).abs() < 1e-15);
    }

    #[test]
    fn coverage_of_centered_band_matches_level() {
        let m = TteModel::gk(make_pareto_ii(2.0).unwrap(), 2.0, 1.0).unwrap();
        let band = confidence_band(&m, Direction::SGivenX1, BandKind::Centered, 0.9, 5)
            .unwrap();
        let cov = empirical_coverage(&m, &band, 2000, 12).unwrap();
        assert!((cov - 0.9).abs() < 0.025, "coverage = {cov}");
        assert!(empirical_coverage(&m, &band, 50, 12).is_err());
    }

    #[test]
    fn ks_statistic_on_exact_grid() {
        let n = 50;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, Ok).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-15, "{d}");
        assert!(ks_statistic(&[], Ok).is_err());
    }

    #[test]
    fn sampled_sum_passes_ks_against_model() {
        let m = TteModel::gk(make_pareto_ii(2.0).unwrap(), 2.0, 1.0).unwrap();
        let law = crate::sum::SumLaw::new(&m);
        let sample = sample_pairs(&m, 2000, 31).unwrap();
        let d = ks_statistic(&sample.s, |s| law.df(s)).unwrap();
        // 1% critical value at n = 2000 is ≈ 0.0364
        assert!(d < 0.0364, "KS distance {d}");
    }
}
