//! Conditional laws of `(X₁, S)` and quantile prediction.
//!
//! Both conditionings have tractable forms under a TTE model:
//!
//! ```text
//! P(S > s | X₁ = x)  = g(R₁(x) + R₂(s − x)) / g(R₁(x)),   s ≥ x,
//! P(X₁ ≤ x | S = s)  = ∫₀ˣ r₁ r₂ (−g′) dy / f_S(s),
//! ```
//!
//! and for scale-parameter models the second is the closed ratio
//! `[g((α−β)x + βs) − g(βs)] / [g(αs) − g(βs)]` (uniform on `(0, s)` when
//! `α = β`). Quantiles invert these laws either through the generator's
//! closed-form density inverse or by bracketed root search; every public
//! entry point reports which path it used via [`MethodTag`].
//!
//! On top of the pointwise laws sit prediction utilities: quantile
//! regression curves on a conditioning grid, centered and bottom prediction
//! bands, and a probe that classifies pairs of conditional laws as
//! stochastically ordered or crossing.

use crate::error::{Error, Result};
use crate::generator::GeneratorSpec;
use crate::model::TteModel;
use crate::numeric::linspace;
use crate::numeric::quad::integrate_split;
use crate::numeric::root::{bracket_upward, brent};
use crate::sum::{sum_pdf_quadrature, SumLaw};

/// Which conditional law is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The law of `S` given `X₁ = x`.
    SGivenX1,
    /// The law of `X₁` given `S = s`.
    X1GivenS,
}

/// How a quantile was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodTag {
    /// Analytic inversion (closed-form density inverse or uniform law).
    ClosedForm,
    /// Bracketed root search on the conditional distribution function.
    RootFind,
}

/// Shape of a prediction band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandKind {
    /// Equal-tail band `[Q((1−p)/2), Q((1+p)/2)]`.
    Centered,
    /// One-sided band from the bottom of the support to `Q(p)`.
    Bottom,
}

/// Stochastic comparison of two conditional laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairOrdering {
    /// The law at the larger conditioning value dominates.
    Increasing,
    /// The law at the larger conditioning value is dominated.
    Decreasing,
    /// The distribution functions cross.
    Crossing,
}

fn check_nonneg(x: f64, what: &'static str) -> Result<()> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain {
            what,
            value: x,
            domain: "[0, ∞)",
        })
    }
}

fn check_open_unit(p: f64, what: &'static str) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain {
            what,
            value: p,
            domain: "(0, 1)",
        })
    }
}

/// Conditioning density scale `g(R₁(x₁))`, with the degeneracy check.
fn conditioning_scale(m: &TteModel, x1: f64) -> Result<f64> {
    let den = (m.generator.density)((m.margins[0].cum_hazard)(x1));
    if den > 0.0 {
        Ok(den)
    } else {
        Err(Error::DegenerateConditioning {
            value: x1,
            reason: "marginal density factor g(R₁(x₁)) vanishes",
        })
    }
}

/// `P(S > s | X₁ = x₁)`. Equals 1 for `s ≤ x₁` (the sum exceeds `X₁`).
pub fn cond_survival_s_given_x1(m: &TteModel, s: f64, x1: f64) -> Result<f64> {
    check_nonneg(x1, "conditional law of S, conditioning value")?;
    let den = conditioning_scale(m, x1)?;
    if s <= x1 {
        return Ok(1.0);
    }
    let t = (m.margins[0].cum_hazard)(x1) + (m.margins[1].cum_hazard)(s - x1);
    Ok((m.generator.density)(t) / den)
}

/// `P(S ≤ s | X₁ = x₁)`.
pub fn cond_df_s_given_x1(m: &TteModel, s: f64, x1: f64) -> Result<f64> {
    Ok(1.0 - cond_survival_s_given_x1(m, s, x1)?)
}

/// Smallest `t ≥ t_lo` with `g(t) = y` (requires `0 < y ≤ g(t_lo)`).
pub(crate) fn invert_generator_density(
    gen: &GeneratorSpec,
    y: f64,
    t_lo: f64,
) -> Result<(f64, MethodTag)> {
    if let Some(ginv) = &gen.density_inverse {
        return Ok(((ginv)(y)?.max(t_lo), MethodTag::ClosedForm));
    }
    let de = &gen.density;
    if (de)(t_lo) <= y {
        return Ok((t_lo, MethodTag::RootFind));
    }
    let f = |t: f64| Ok((de)(t) - y);
    let (lo, hi, _, _) = bracket_upward(
        f,
        t_lo,
        t_lo + 1.0,
        2.0f64.powi(127),
        "generator density inversion",
    )?;
    let t = brent(f, lo, hi, 1e-12, 0.0, "generator density inversion")?;
    Ok((t, MethodTag::RootFind))
}

/// Survival-level inverse: the `s` with `P(S > s | X₁ = x₁) = v`, `v ∈ (0,1)`.
///
/// Solves `g(R₁(x₁) + R₂(s − x₁)) = v·g(R₁(x₁))` for the second-margin
/// excess, i.e. `s = x₁ + R₂⁻¹(g⁻¹(v·g(R₁(x₁))) − R₁(x₁))`.
pub fn cond_survival_quantile_s_given_x1(m: &TteModel, v: f64, x1: f64) -> Result<f64> {
    check_open_unit(v, "conditional survival-quantile level")?;
    check_nonneg(x1, "conditional law of S, conditioning value")?;
    let den = conditioning_scale(m, x1)?;
    let t_lo = (m.margins[0].cum_hazard)(x1);
    let (t, _) = invert_generator_density(&m.generator, v * den, t_lo)?;
    Ok(x1 + (m.margins[1].inverse_cum_hazard)((t - t_lo).max(0.0))?)
}

/// Distribution-level quantile: the `s` with `P(S ≤ s | X₁ = x₁) = q`.
pub fn cond_quantile_s_given_x1(m: &TteModel, q: f64, x1: f64) -> Result<f64> {
    check_open_unit(q, "conditional quantile level")?;
    cond_survival_quantile_s_given_x1(m, 1.0 - q, x1)
}

/// `∫₀ˣ r₁(y) r₂(s−y) (−g′)(R₁(y) + R₂(s−y)) dy` — the unnormalized mass of
/// `{X₁ ≤ x}` on the section `S = s`.
fn x1_section_mass(m: &TteModel, x: f64, s: f64) -> Result<f64> {
    let dd = &m.generator.density_derivative;
    let r1 = &m.margins[0].hazard;
    let r2 = &m.margins[1].hazard;
    let ch1 = &m.margins[0].cum_hazard;
    let ch2 = &m.margins[1].cum_hazard;
    integrate_split(
        |y: f64| (r1)(y) * (r2)(s - y) * -(dd)((ch1)(y) + (ch2)(s - y)),
        0.0,
        x,
        &[0.5 * x],
        &m.quad,
    )
}

/// `P(X₁ ≤ x | S = s)`, closed for scale-parameter models and a quadrature
/// ratio otherwise.
pub fn cond_df_x1_given_s(m: &TteModel, x: f64, s: f64) -> Result<f64> {
    check_nonneg(x, "conditional law of X₁, argument")?;
    check_nonneg(s, "conditional law of X₁, conditioning value")?;
    if s == 0.0 {
        return Err(Error::DegenerateConditioning {
            value: s,
            reason: "conditioning on S = 0",
        });
    }
    if x >= s {
        return Ok(1.0);
    }
    if let Some(p) = m.gk_params() {
        if p.equal_rates() {
            return Ok(x / s);
        }
        let de = &m.generator.density;
        let den = (de)(p.alpha * s) - (de)(p.beta * s);
        if den == 0.0 {
            return Err(Error::DegenerateConditioning {
                value: s,
                reason: "sum density factor g(αs) − g(βs) vanishes",
            });
        }
        return Ok(((de)((p.alpha - p.beta) * x + p.beta * s) - (de)(p.beta * s)) / den);
    }
    let den = sum_pdf_quadrature(m, s)?;
    if den <= 0.0 {
        return Err(Error::DegenerateConditioning {
            value: s,
            reason: "sum density vanishes at the conditioning value",
        });
    }
    Ok((x1_section_mass(m, x, s)? / den).clamp(0.0, 1.0))
}

/// Quantile of `X₁` given `S = s`: the `x` with `P(X₁ ≤ x | S = s) = q`,
/// `q ∈ [0, 1]` (endpoints map to `0` and `s`).
///
/// Closed form for scale-parameter models with an invertible generator
/// density: `x = (g⁻¹(q·g(αs) + (1−q)·g(βs)) − βs)/(α − β)`, and `x = q·s`
/// when `α = β`. Otherwise a bracketed root search on the conditional df.
pub fn cond_quantile_x1_given_s(m: &TteModel, q: f64, s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::OutsideDomain {
            what: "conditional quantile level",
            value: q,
            domain: "[0, 1]",
        });
    }
    check_nonneg(s, "conditional law of X₁, conditioning value")?;
    if s == 0.0 {
        return Err(Error::DegenerateConditioning {
            value: s,
            reason: "conditioning on S = 0",
        });
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    if q == 1.0 {
        return Ok(s);
    }
    if let Some(p) = m.gk_params() {
        if p.equal_rates() {
            return Ok(q * s);
        }
        let de = &m.generator.density;
        let ga = (de)(p.alpha * s);
        let gb = (de)(p.beta * s);
        if ga == gb {
            return Err(Error::DegenerateConditioning {
                value: s,
                reason: "sum density factor g(αs) − g(βs) vanishes",
            });
        }
        if let Some(ginv) = &m.generator.density_inverse {
            let t = (ginv)(q * ga + (1.0 - q) * gb)?;
            return Ok(((t - p.beta * s) / (p.alpha - p.beta)).clamp(0.0, s));
        }
        // root search on the (cheap) closed-form df
        let f = |x: f64| Ok(cond_df_x1_given_s(m, x, s)? - q);
        return brent(f, 0.0, s, 1e-15, 1e-12, "conditional quantile of X₁ given S");
    }
    // general model: cache the normalizing sum density across iterations
    let den = sum_pdf_quadrature(m, s)?;
    if den <= 0.0 {
        return Err(Error::DegenerateConditioning {
            value: s,
            reason: "sum density vanishes at the conditioning value",
        });
    }
    let f = |x: f64| Ok(x1_section_mass(m, x, s)? / den - q);
    brent(f, 0.0, s, 1e-15, 1e-12, "conditional quantile of X₁ given S")
}

/// The quantile path a model uses for a given direction.
fn quantile_method(m: &TteModel, direction: Direction) -> MethodTag {
    match direction {
        Direction::SGivenX1 => {
            if m.generator.density_inverse.is_some() {
                MethodTag::ClosedForm
            } else {
                MethodTag::RootFind
            }
        }
        Direction::X1GivenS => match m.gk_params() {
            Some(p) if p.equal_rates() => MethodTag::ClosedForm,
            Some(_) if m.generator.density_inverse.is_some() => MethodTag::ClosedForm,
            _ => MethodTag::RootFind,
        },
    }
}

/// One conditional law, pinned to a direction and conditioning value.
#[derive(Debug, Clone)]
pub struct ConditionalLaw {
    model: TteModel,
    direction: Direction,
    at: f64,
}

impl ConditionalLaw {
    pub fn new(model: &TteModel, direction: Direction, at: f64) -> Result<Self> {
        match direction {
            Direction::SGivenX1 => {
                check_nonneg(at, "conditional law of S, conditioning value")?;
                conditioning_scale(model, at)?;
            }
            Direction::X1GivenS => {
                check_nonneg(at, "conditional law of X₁, conditioning value")?;
                if at == 0.0 {
                    return Err(Error::DegenerateConditioning {
                        value: at,
                        reason: "conditioning on S = 0",
                    });
                }
            }
        }
        Ok(Self {
            model: model.clone(),
            direction,
            at,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// The conditioning value.
    pub fn at(&self) -> f64 {
        self.at
    }

    pub fn df(&self, t: f64) -> Result<f64> {
        match self.direction {
            Direction::SGivenX1 => cond_df_s_given_x1(&self.model, t, self.at),
            Direction::X1GivenS => cond_df_x1_given_s(&self.model, t, self.at),
        }
    }

    pub fn survival(&self, t: f64) -> Result<f64> {
        Ok(1.0 - self.df(t)?)
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        match self.direction {
            Direction::SGivenX1 => cond_quantile_s_given_x1(&self.model, q, self.at),
            Direction::X1GivenS => cond_quantile_x1_given_s(&self.model, q, self.at),
        }
    }

    /// Quantile at survival level `v` (the `1 − v` distribution quantile).
    pub fn survival_quantile(&self, v: f64) -> Result<f64> {
        match self.direction {
            Direction::SGivenX1 => {
                cond_survival_quantile_s_given_x1(&self.model, v, self.at)
            }
            Direction::X1GivenS => {
                check_open_unit(v, "conditional survival-quantile level")?;
                cond_quantile_x1_given_s(&self.model, 1.0 - v, self.at)
            }
        }
    }

    pub fn method(&self) -> MethodTag {
        quantile_method(&self.model, self.direction)
    }
}

/// Grid of conditioning values: `n` equally spaced points between the 1%
/// and 99% quantiles of the conditioning variable's model marginal.
fn conditioning_grid(m: &TteModel, direction: Direction, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            requirement: "at least 2 grid points",
        });
    }
    let (lo, hi) = match direction {
        Direction::SGivenX1 => (
            m.marginal_quantile(crate::model::Margin::First, 0.01)?,
            m.marginal_quantile(crate::model::Margin::First, 0.99)?,
        ),
        Direction::X1GivenS => {
            let law = SumLaw::new(m);
            (law.quantile(0.01)?, law.quantile(0.99)?)
        }
    };
    Ok(linspace(lo, hi, n))
}

/// A quantile-regression curve: the conditional `level`-quantile as a
/// function of the conditioning value.
#[derive(Debug, Clone)]
pub struct QuantileCurve {
    pub direction: Direction,
    pub level: f64,
    /// Conditioning values (grid).
    pub conditioning: Vec<f64>,
    /// Conditional quantile at each grid point.
    pub predicted: Vec<f64>,
    pub method: MethodTag,
}

/// Evaluate the conditional `level`-quantile on an `n`-point conditioning
/// grid spanning the central 98% of the conditioning marginal.
pub fn quantile_curve(
    m: &TteModel,
    direction: Direction,
    level: f64,
    n: usize,
) -> Result<QuantileCurve> {
    check_open_unit(level, "quantile-curve level")?;
    let conditioning = conditioning_grid(m, direction, n)?;
    let mut predicted = Vec::with_capacity(conditioning.len());
    for &c in &conditioning {
        let q = match direction {
            Direction::SGivenX1 => cond_quantile_s_given_x1(m, level, c)?,
            Direction::X1GivenS => cond_quantile_x1_given_s(m, level, c)?,
        };
        predicted.push(q);
    }
    Ok(QuantileCurve {
        direction,
        level,
        conditioning,
        predicted,
        method: quantile_method(m, direction),
    })
}

/// Median-regression curve on the default 200-point grid.
pub fn median_regression(m: &TteModel, direction: Direction) -> Result<QuantileCurve> {
    quantile_curve(m, direction, 0.5, 200)
}

/// A prediction band around the conditional law.
#[derive(Debug, Clone)]
pub struct ConfidenceBand {
    pub direction: Direction,
    pub kind: BandKind,
    /// Nominal content of the band, e.g. `0.9`.
    pub level: f64,
    pub conditioning: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Level-`p` prediction band on an `n`-point conditioning grid.
///
/// `Centered` uses the equal-tail quantiles `(1±p)/2`. `Bottom` runs from
/// the lowest attainable value (`x₁` itself for `S | X₁ = x₁`, zero for
/// `X₁ | S = s`) up to the `p`-quantile, matching how prediction bands are
/// drawn from the bottom of the conditional support.
pub fn confidence_band(
    m: &TteModel,
    direction: Direction,
    kind: BandKind,
    level: f64,
    n: usize,
) -> Result<ConfidenceBand> {
    check_open_unit(level, "band level")?;
    let conditioning = conditioning_grid(m, direction, n)?;
    let mut lower = Vec::with_capacity(conditioning.len());
    let mut upper = Vec::with_capacity(conditioning.len());
    for &c in &conditioning {
        let quantile = |q: f64| match direction {
            Direction::SGivenX1 => cond_quantile_s_given_x1(m, q, c),
            Direction::X1GivenS => cond_quantile_x1_given_s(m, q, c),
        };
        match kind {
            BandKind::Centered => {
                lower.push(quantile(0.5 * (1.0 - level))?);
                upper.push(quantile(0.5 * (1.0 + level))?);
            }
            BandKind::Bottom => {
                lower.push(match direction {
                    Direction::SGivenX1 => c,
                    Direction::X1GivenS => 0.0,
                });
                upper.push(quantile(level)?);
            }
        }
    }
    Ok(ConfidenceBand {
        direction,
        kind,
        level,
        conditioning,
        lower,
        upper,
    })
}

/// Tolerance below which distribution-function differences do not count as
/// evidence of ordering or crossing.
const ORDER_TOL: f64 = 1e-9;

/// Classification of each conditioning pair probed by
/// [`stochastic_monotonicity_probe`].
#[derive(Debug, Clone)]
pub struct MonotonicityReport {
    pub direction: Direction,
    pub conditioning: Vec<f64>,
    pub fractions: Vec<f64>,
    /// `(smaller, larger, ordering)` for every pair of conditioning values.
    pub pairs: Vec<(f64, f64, PairOrdering)>,
}

impl MonotonicityReport {
    /// Ordering recorded for the pair `{a, b}`, if probed.
    pub fn ordering(&self, a: f64, b: f64) -> Option<PairOrdering> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.pairs
            .iter()
            .find(|&&(x, y, _)| x == lo && y == hi)
            .map(|&(_, _, o)| o)
    }

    /// All crossing pairs whose conditioning values both lie in `[lo, hi]`.
    pub fn crossings_within(&self, lo: f64, hi: f64) -> Vec<(f64, f64)> {
        self.pairs
            .iter()
            .filter(|&&(a, b, o)| o == PairOrdering::Crossing && a >= lo && b <= hi)
            .map(|&(a, b, _)| (a, b))
            .collect()
    }
}

/// Compare conditional distribution functions across pairs of conditioning
/// values and classify each pair as stochastically increasing, decreasing,
/// or crossing.
///
/// For `X₁ | S` the dfs of a pair `(sᵢ, sⱼ)` are compared at the points
/// `frac·sᵢ` for every probe fraction; for `S | X₁` at `xⱼ + frac·w`, where
/// `w` spans the conditional support. A pair is *increasing* when the df at
/// the larger conditioning value never exceeds the df at the smaller one by
/// more than `1e−9` (so the conditional law moves up), *decreasing* in the
/// mirrored case, and *crossing* otherwise.
pub fn stochastic_monotonicity_probe(
    m: &TteModel,
    direction: Direction,
    conditioning: &[f64],
    fractions: &[f64],
) -> Result<MonotonicityReport> {
    if conditioning.len() < 2 {
        return Err(Error::DegenerateSample {
            reason: "monotonicity probe needs at least two conditioning values",
        });
    }
    if fractions.is_empty() {
        return Err(Error::DegenerateSample {
            reason: "monotonicity probe needs at least one probe fraction",
        });
    }
    for &fr in fractions {
        check_open_unit(fr, "monotonicity probe fraction")?;
    }
    let mut cond = conditioning.to_vec();
    cond.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in cond.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DegenerateSample {
                reason: "monotonicity probe conditioning values must be distinct",
            });
        }
    }
    let span = match direction {
        Direction::SGivenX1 => {
            (m.margins[1].inverse_cum_hazard)(m.generator.support_hint)?
        }
        Direction::X1GivenS => 0.0,
    };

    let mut pairs = Vec::new();
    for i in 0..cond.len() {
        for j in (i + 1)..cond.len() {
            let (a, b) = (cond[i], cond[j]);
            let mut max_d = f64::NEG_INFINITY;
            let mut min_d = f64::INFINITY;
            for &fr in fractions {
                let (df_small, df_large) = match direction {
                    Direction::X1GivenS => {
                        let x = fr * a;
                        (
                            cond_df_x1_given_s(m, x, a)?,
                            cond_df_x1_given_s(m, x, b)?,
                        )
                    }
                    Direction::SGivenX1 => {
                        let s = b + fr * span;
                        (
                            cond_df_s_given_x1(m, s, a)?,
                            cond_df_s_given_x1(m, s, b)?,
                        )
                    }
                };
                let d = df_large - df_small;
                max_d = max_d.max(d);
                min_d = min_d.min(d);
            }
            let ordering = if max_d <= ORDER_TOL {
                PairOrdering::Increasing
            } else if min_d >= -ORDER_TOL {
                PairOrdering::Decreasing
            } else {
                PairOrdering::Crossing
            };
            pairs.push((a, b, ordering));
        }
    }
    Ok(MonotonicityReport {
        direction,
        conditioning: cond,
        fractions: fractions.to_vec(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{
        make_gumbel_barnett, make_pareto_ii, make_translated_erlang, make_truncated_normal,
    };
    use crate::model::{BaselineMarginal, TteModel};

    fn ex1_model() -> TteModel {
        TteModel::gk(
            make_pareto_ii(2.664557).unwrap(),
            1.548042,
            0.6925677,
        )
        .unwrap()
    }

    fn ex3_model() -> TteModel {
        TteModel::gk(make_translated_erlang(), 2.0, 1.0).unwrap()
    }

    fn ex4_model() -> TteModel {
        TteModel::gk(make_gumbel_barnett(1.0).unwrap(), 3.0, 1.0).unwrap()
    }

    fn ex2_model() -> TteModel {
        let base = make_truncated_normal();
        TteModel::new(
            make_truncated_normal(),
            BaselineMarginal::from_generator(&base),
            BaselineMarginal::from_generator(&base),
        )
    }

    // Reference values computed with 60-digit arithmetic.
    #[test]
    fn conditional_survival_matches_reference() {
        let m = ex3_model();
        let got = cond_survival_s_given_x1(&m, 1.2, 0.5).unwrap();
        assert!((got - 0.67039016011840284).abs() < 1e-14, "{got}");
        // below the conditioning value the sum has full mass
        assert_eq!(cond_survival_s_given_x1(&m, 0.3, 0.5).unwrap(), 1.0);
        assert_eq!(cond_survival_s_given_x1(&m, 0.5, 0.5).unwrap(), 1.0);
    }

    #[test]
    fn x1_given_s_df_matches_reference() {
        let m = ex4_model();
        let table = [
            (0.1, 0.6, 0.19343533714289169),
            (0.3, 0.6, 0.62278009451729054),
            (0.5, 2.0, 0.99999167694201393),
        ];
        for (x, s, want) in table {
            let got = cond_df_x1_given_s(&m, x, s).unwrap();
            assert!((got - want).abs() < 1e-13, "df({x}|{s}): {got}");
        }
        let got = cond_df_x1_given_s(&m, 1.0, 2.0).unwrap();
        assert!((got - 1.0).abs() < 1e-12, "{got}");
        assert_eq!(cond_df_x1_given_s(&m, 2.5, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn x1_given_s_quantiles_match_reference_closed_form() {
        let m = ex1_model();
        let table = [
            (0.5, 1.0, 0.28402413611929696),
            (0.1, 2.0, 0.069448065398650359),
            (0.9, 0.5, 0.41078860469459249),
        ];
        for (q, s, want) in table {
            let got = cond_quantile_x1_given_s(&m, q, s).unwrap();
            assert!((got - want).abs() < 1e-12, "quantile({q}|{s}): {got}");
            let back = cond_df_x1_given_s(&m, got, s).unwrap();
            assert!((back - q).abs() < 1e-12, "round trip at ({q},{s}): {back}");
        }
        assert_eq!(cond_quantile_x1_given_s(&m, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(cond_quantile_x1_given_s(&m, 1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn x1_given_s_quantiles_root_find_path() {
        // Gumbel–Barnett has no closed-form density inverse, so quantiles go
        // through the root search against the closed-form df.
        let m = ex4_model();
        let medians = [
            (0.1, 0.062386076377828412),
            (0.5, 0.24270551002791516),
            (2.0, 0.051117261013852834),
        ];
        for (s, want) in medians {
            let got = cond_quantile_x1_given_s(&m, 0.5, s).unwrap();
            assert!((got - want).abs() < 1e-9, "median at s={s}: {got}");
            let back = cond_df_x1_given_s(&m, got, s).unwrap();
            assert!((back - 0.5).abs() < 1e-10, "round trip at {s}: {back}");
        }
    }

    #[test]
    fn s_given_x1_survival_quantile_matches_reference() {
        let m = TteModel::gk(make_pareto_ii(2.0).unwrap(), 2.0, 1.0).unwrap();
        let got = cond_survival_quantile_s_given_x1(&m, 0.5, 0.3).unwrap();
        assert!((got - 0.71587367983179706).abs() < 1e-12, "{got}");
        let back = cond_survival_s_given_x1(&m, got, 0.3).unwrap();
        assert!((back - 0.5).abs() < 1e-12, "{back}");
    }

    #[test]
    fn general_tte_quantiles_match_reference() {
        // truncated-normal generator with the same survival as both
        // baselines: exercises the non-exponential-margin path end to end.
        let m = ex2_model();
        let table = [
            (0.5, 0.3, 0.55090758431392285),
            (0.1, 0.3, 0.92834242869427790),
            (0.5, 1.0, 1.1433090468652407),
            (0.9, 0.25, 0.29728243208696622),
        ];
        for (v, x, want) in table {
            let got = cond_survival_quantile_s_given_x1(&m, v, x).unwrap();
            assert!(
                (got - want).abs() < 1e-10,
                "survival quantile({v}|x={x}): {got}, want {want}"
            );
            let back = cond_survival_s_given_x1(&m, got, x).unwrap();
            assert!((back - v).abs() < 1e-10, "round trip: {back}");
        }
    }

    #[test]
    fn schur_constant_conditional_is_uniform() {
        let m = TteModel::gk(make_truncated_normal(), 1.5, 1.5).unwrap();
        for (x, s) in [(0.2, 1.0), (0.7, 1.0), (1.3, 2.6)] {
            let got = cond_df_x1_given_s(&m, x, s).unwrap();
            assert!((got - x / s).abs() < 1e-15, "df({x}|{s}) = {got}");
        }
        for (q, s) in [(0.25, 0.8), (0.5, 3.0)] {
            let got = cond_quantile_x1_given_s(&m, q, s).unwrap();
            assert!((got - q * s).abs() < 1e-15);
        }
    }

    #[test]
    fn conditional_law_wrapper_round_trips() {
        let m = ex3_model();
        let law = ConditionalLaw::new(&m, Direction::SGivenX1, 0.5).unwrap();
        assert_eq!(law.method(), MethodTag::RootFind);
        for q in [0.05, 0.5, 0.95] {
            let s = law.quantile(q).unwrap();
            assert!(s > 0.5);
            let back = law.df(s).unwrap();
            assert!((back - q).abs() < 1e-9, "q={q}: {back}");
        }
        let v = law.survival_quantile(0.25).unwrap();
        let q = law.quantile(0.75).unwrap();
        assert!((v - q).abs() < 1e-9);

        let law = ConditionalLaw::new(&m, Direction::X1GivenS, 1.5).unwrap();
        for q in [0.1, 0.5, 0.9] {
            let x = law.quantile(q).unwrap();
            assert!((0.0..=1.5).contains(&x));
            let back = law.df(x).unwrap();
            assert!((back - q).abs() < 1e-10, "q={q}: {back}");
        }
        assert!(ConditionalLaw::new(&m, Direction::X1GivenS, 0.0).is_err());
        assert!(ConditionalLaw::new(&m, Direction::SGivenX1, -1.0).is_err());
    }

    #[test]
    fn quantile_levels_are_validated() {
        let m = ex1_model();
        assert!(cond_quantile_s_given_x1(&m, 0.0, 0.5).is_err());
        assert!(cond_quantile_s_given_x1(&m, 1.0, 0.5).is_err());
        assert!(cond_survival_quantile_s_given_x1(&m, -0.2, 0.5).is_err());
        assert!(cond_quantile_x1_given_s(&m, 1.5, 1.0).is_err());
        assert!(cond_df_x1_given_s(&m, 0.5, 0.0).is_err());
    }

    #[test]
    fn median_regression_grid_shape() {
        let m = ex1_model();
        let curve = median_regression(&m, Direction::X1GivenS).unwrap();
        assert_eq!(curve.conditioning.len(), 200);
        assert_eq!(curve.predicted.len(), 200);
        assert_eq!(curve.level, 0.5);
        assert_eq!(curve.method, MethodTag::ClosedForm);
        // grid endpoints are the 1% and 99% sum quantiles
        let law = crate::sum::SumLaw::new(&m);
        assert!((curve.conditioning[0] - law.quantile(0.01).unwrap()).abs() < 1e-9);
        assert!(
            (curve.conditioning[199] - law.quantile(0.99).unwrap()).abs() < 1e-9
        );
        // every prediction lies inside (0, s)
        for (s, x) in curve.conditioning.iter().zip(&curve.predicted) {
            assert!(*x > 0.0 && x < s);
        }
    }

    #[test]
    fn bands_have_requested_content() {
        let m = ex3_model();
        let band =
            confidence_band(&m, Direction::SGivenX1, BandKind::Centered, 0.9, 10).unwrap();
        for i in [0, 4, 9] {
            let x = band.conditioning[i];
            let content = cond_df_s_given_x1(&m, band.upper[i], x).unwrap()
                - cond_df_s_given_x1(&m, band.lower[i], x).unwrap();
            assert!((content - 0.9).abs() < 1e-9, "content at {x}: {content}");
        }
        let bottom =
            confidence_band(&m, Direction::SGivenX1, BandKind::Bottom, 0.9, 10).unwrap();
        for i in [0, 9] {
            // bottom band starts on the diagonal s = x₁
            assert_eq!(bottom.lower[i], bottom.conditioning[i]);
            let content = cond_df_s_given_x1(&m, bottom.upper[i], bottom.conditioning[i])
                .unwrap();
            assert!((content - 0.9).abs() < 1e-9);
        }
        let bottom_x1 =
            confidence_band(&m, Direction::X1GivenS, BandKind::Bottom, 0.5, 5).unwrap();
        assert!(bottom_x1.lower.iter().all(|&l| l == 0.0));
    }

    #[test]
    fn monotonicity_probe_classifies_all_three_ways() {
        let m = ex4_model();
        let fractions: Vec<f64> = (1..121).map(|j| j as f64 / 121.0).collect();
        let report = stochastic_monotonicity_probe(
            &m,
            Direction::X1GivenS,
            &[0.2, 0.4, 2.0],
            &fractions,
        )
        .unwrap();
        assert_eq!(report.ordering(0.2, 0.4), Some(PairOrdering::Increasing));
        assert_eq!(report.ordering(0.2, 2.0), Some(PairOrdering::Crossing));
        assert_eq!(report.ordering(2.0, 0.4), Some(PairOrdering::Decreasing));
        assert_eq!(report.ordering(0.3, 0.4), None);
        let crossings = report.crossings_within(0.0, 3.0);
        assert_eq!(crossings, vec![(0.2, 2.0)]);
    }

    #[test]
    fn monotonicity_probe_validates_input() {
        let m = ex4_model();
        assert!(
            stochastic_monotonicity_probe(&m, Direction::X1GivenS, &[1.0], &[0.5]).is_err()
        );
        assert!(stochastic_monotonicity_probe(&m, Direction::X1GivenS, &[1.0, 1.0], &[0.5])
            .is_err());
        assert!(stochastic_monotonicity_probe(&m, Direction::X1GivenS, &[1.0, 2.0], &[])
            .is_err());
        assert!(
            stochastic_monotonicity_probe(&m, Direction::X1GivenS, &[1.0, 2.0], &[1.5])
                .is_err()
        );
    }

    #[test]
    fn s_given_x1_probe_is_increasing_for_independence() {
        // with an exponential generator S | X₁ = x shifts up with x
        let m = TteModel::gk(crate::generator::make_exponential(), 1.0, 1.0).unwrap();
        let report = stochastic_monotonicity_probe(
            &m,
            Direction::SGivenX1,
            &[0.2, 0.6, 1.4],
            &[0.1, 0.3, 0.5, 0.7, 0.9],
        )
        .unwrap();
        for &(_, _, o) in &report.pairs {
            assert_eq!(o, PairOrdering::Increasing);
        }
    }
}
