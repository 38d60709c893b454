//! The TTE model: baseline marginals, joint survival, distortion and copula.
//!
//! A model couples two baselines `H̄₁, H̄₂` through a generator `Ḡ`:
//!
//! ```text
//! F̄(x₁, x₂) = Ḡ(R₁(x₁) + R₂(x₂)),   Rᵢ = −ln H̄ᵢ.
//! ```
//!
//! The *model marginals* are the distorted baselines `F̄ᵢ(x) = Ḡ(Rᵢ(x))`,
//! not the baselines themselves (the two coincide only for `Ḡ = e^{−t}`).
//! When both baselines are exponential the model is the scale-parameter
//! family `F̄(x₁, x₂) = Ḡ(αx₁ + βx₂)`, for which sums and conditionals have
//! closed forms; [`TteModel::gk_params`] exposes the rates in that case, and
//! `α = β` is the Schur-constant (exchangeable) special case.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::generator::{GeneratorSpec, InverseFn, PointFn};
use crate::numeric::quad::QuadratureCfg;

/// Which of the two coordinates of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Margin {
    First,
    Second,
}

impl Margin {
    /// 0 for the first margin, 1 for the second.
    pub fn index(self) -> usize {
        match self {
            Margin::First => 0,
            Margin::Second => 1,
        }
    }
}

/// A baseline marginal: survival `H̄`, hazard `r`, cumulative hazard
/// `R = −ln H̄` and its inverse.
#[derive(Clone)]
pub struct BaselineMarginal {
    /// Label such as `"exponential(rate=2)"`.
    pub label: String,
    /// Baseline survival `H̄(x)`.
    pub survival: PointFn,
    /// Baseline hazard `r(x) = −d ln H̄/dx`.
    pub hazard: PointFn,
    /// Cumulative hazard `R(x) = −ln H̄(x)`.
    pub cum_hazard: PointFn,
    /// Inverse cumulative hazard `R⁻¹(y)` for `y ≥ 0`.
    pub inverse_cum_hazard: InverseFn,
}

impl std::fmt::Debug for BaselineMarginal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BaselineMarginal")
            .field("label", &self.label)
            .finish()
    }
}

impl BaselineMarginal {
    /// Exponential baseline with the given rate: `H̄(x) = e^{−rate·x}`.
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rate",
                value: rate,
                requirement: "finite and > 0",
            });
        }
        Ok(Self {
            label: format!("exponential(rate={rate})"),
            survival: Arc::new(move |x: f64| (-rate * x).exp()),
            hazard: Arc::new(move |_x: f64| rate),
            cum_hazard: Arc::new(move |x: f64| rate * x),
            inverse_cum_hazard: Arc::new(move |y: f64| {
                check_nonnegative(y, "exponential inverse cumulative hazard")?;
                Ok(y / rate)
            }),
        })
    }

    /// Use a generator's survival function as the baseline: `H̄ = Ḡ_b`.
    ///
    /// The hazard is `g_b/Ḡ_b` (infinite once `Ḡ_b` underflows to zero) and
    /// `R⁻¹(y) = Ḡ_b⁻¹(e^{−y})`.
    pub fn from_generator(base: &GeneratorSpec) -> Self {
        let sv = base.survival.clone();
        let sv2 = base.survival.clone();
        let de = base.density.clone();
        let inv = base.survival_inverse.clone();
        Self {
            label: format!("baseline[{}]", base.label),
            survival: base.survival.clone(),
            hazard: Arc::new(move |x: f64| {
                let s = (sv)(x);
                if s > 0.0 {
                    (de)(x) / s
                } else {
                    f64::INFINITY
                }
            }),
            cum_hazard: Arc::new(move |x: f64| -(sv2)(x).ln()),
            inverse_cum_hazard: Arc::new(move |y: f64| {
                check_nonnegative(y, "baseline inverse cumulative hazard")?;
                (inv)((-y).exp().max(f64::MIN_POSITIVE))
            }),
        }
    }

    /// Assemble a baseline from explicit maps.
    pub fn from_parts(
        label: impl Into<String>,
        survival: PointFn,
        hazard: PointFn,
        cum_hazard: PointFn,
        inverse_cum_hazard: InverseFn,
    ) -> Self {
        Self {
            label: label.into(),
            survival,
            hazard,
            cum_hazard,
            inverse_cum_hazard,
        }
    }
}

fn check_nonnegative(y: f64, what: &'static str) -> Result<()> {
    if y >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain {
            what,
            value: y,
            domain: "[0, ∞)",
        })
    }
}

/// Rates of the scale-parameter (both-baselines-exponential) specialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkParams {
    pub alpha: f64,
    pub beta: f64,
}

/// Relative tolerance under which the two rates count as equal.
pub const EQUAL_RATE_TOL: f64 = 1e-12;

impl GkParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        for (name, value) in [("alpha", alpha), ("beta", beta)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    requirement: "finite and > 0",
                });
            }
        }
        Ok(Self { alpha, beta })
    }

    /// True when `|α − β| ≤ 1e−12·max(α, β)`: the Schur-constant case, where
    /// the closed forms switch to their equal-rate limits.
    pub fn equal_rates(&self) -> bool {
        (self.alpha - self.beta).abs() <= EQUAL_RATE_TOL * self.alpha.max(self.beta)
    }

    /// Common rate used by the equal-rate limits.
    pub fn common_rate(&self) -> f64 {
        0.5 * (self.alpha + self.beta)
    }
}

/// A fully specified TTE model for the pair `(X₁, X₂)`.
#[derive(Clone)]
pub struct TteModel {
    pub generator: GeneratorSpec,
    pub margins: [BaselineMarginal; 2],
    gk: Option<GkParams>,
    pub quad: QuadratureCfg,
}

impl std::fmt::Debug for TteModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TteModel")
            .field("generator", &self.generator.label)
            .field("margin1", &self.margins[0].label)
            .field("margin2", &self.margins[1].label)
            .field("gk", &self.gk)
            .finish()
    }
}

impl TteModel {
    /// General model from a generator and two baselines.
    pub fn new(generator: GeneratorSpec, m1: BaselineMarginal, m2: BaselineMarginal) -> Self {
        Self {
            generator,
            margins: [m1, m2],
            gk: None,
            quad: QuadratureCfg::default(),
        }
    }

    /// Scale-parameter model `F̄(x₁, x₂) = Ḡ(αx₁ + βx₂)`.
    pub fn gk(generator: GeneratorSpec, alpha: f64, beta: f64) -> Result<Self> {
        let params = GkParams::new(alpha, beta)?;
        Ok(Self {
            generator,
            margins: [
                BaselineMarginal::exponential(alpha)?,
                BaselineMarginal::exponential(beta)?,
            ],
            gk: Some(params),
            quad: QuadratureCfg::default(),
        })
    }

    /// Replace the quadrature configuration.
    pub fn with_quadrature(mut self, cfg: QuadratureCfg) -> Self {
        self.quad = cfg;
        self
    }

    /// Rates of the scale-parameter specialization, if this model is one.
    pub fn gk_params(&self) -> Option<GkParams> {
        self.gk
    }

    /// True when the model is exchangeable with `F̄(x₁, x₂)` a function of
    /// `x₁ + x₂` alone (equal-rate scale-parameter case).
    pub fn is_schur_constant(&self) -> bool {
        self.gk.map(|p| p.equal_rates()).unwrap_or(false)
    }

    fn margin(&self, m: Margin) -> &BaselineMarginal {
        &self.margins[m.index()]
    }

    /// Joint survival `F̄(x₁, x₂) = Ḡ(R₁(x₁) + R₂(x₂))`.
    pub fn joint_survival(&self, x1: f64, x2: f64) -> Result<f64> {
        check_nonneg_arg(x1, "joint survival, first argument")?;
        check_nonneg_arg(x2, "joint survival, second argument")?;
        let t = (self.margins[0].cum_hazard)(x1) + (self.margins[1].cum_hazard)(x2);
        Ok((self.generator.survival)(t))
    }

    /// Joint density `f(x₁, x₂) = r₁(x₁) r₂(x₂) (−g′)(R₁(x₁) + R₂(x₂))`.
    pub fn joint_density(&self, x1: f64, x2: f64) -> Result<f64> {
        check_nonneg_arg(x1, "joint density, first argument")?;
        check_nonneg_arg(x2, "joint density, second argument")?;
        let t = (self.margins[0].cum_hazard)(x1) + (self.margins[1].cum_hazard)(x2);
        let r1 = (self.margins[0].hazard)(x1);
        let r2 = (self.margins[1].hazard)(x2);
        Ok(r1 * r2 * -(self.generator.density_derivative)(t))
    }

    /// Model marginal survival `F̄ᵢ(x) = Ḡ(Rᵢ(x))`.
    pub fn marginal_survival(&self, m: Margin, x: f64) -> Result<f64> {
        check_nonneg_arg(x, "marginal survival")?;
        Ok((self.generator.survival)((self.margin(m).cum_hazard)(x)))
    }

    /// Model marginal density `fᵢ(x) = rᵢ(x)·g(Rᵢ(x))`.
    pub fn marginal_density(&self, m: Margin, x: f64) -> Result<f64> {
        check_nonneg_arg(x, "marginal density")?;
        Ok((self.margin(m).hazard)(x) * (self.generator.density)((self.margin(m).cum_hazard)(x)))
    }

    /// Model marginal quantile `Fᵢ⁻¹(p) = Rᵢ⁻¹(Ḡ⁻¹(1 − p))`, `p ∈ [0, 1)`.
    pub fn marginal_quantile(&self, m: Margin, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::OutsideDomain {
                what: "marginal quantile level",
                value: p,
                domain: "[0, 1)",
            });
        }
        let t = (self.generator.survival_inverse)(1.0 - p)?;
        (self.margin(m).inverse_cum_hazard)(t)
    }

    /// Survival copula `Ĉ(u, v) = Ḡ(Ḡ⁻¹(u) + Ḡ⁻¹(v))` on `[0, 1]²`.
    pub fn survival_copula(&self, u: f64, v: f64) -> Result<f64> {
        for value in [u, v] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutsideDomain {
                    what: "survival copula argument",
                    value,
                    domain: "[0, 1]",
                });
            }
        }
        if u == 0.0 || v == 0.0 {
            return Ok(0.0);
        }
        let t = (self.generator.survival_inverse)(u)? + (self.generator.survival_inverse)(v)?;
        Ok((self.generator.survival)(t))
    }
}

fn check_nonneg_arg(x: f64, what: &'static str) -> Result<()> {
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

/// Bivariate distortion `D̂(u, v) = Ḡ(−ln(uv))` on `[0, 1]²`, so that the
/// joint survival is `D̂(H̄₁(x₁), H̄₂(x₂))`.
pub fn distortion(generator: &GeneratorSpec, u: f64, v: f64) -> Result<f64> {
    for value in [u, v] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutsideDomain {
                what: "distortion argument",
                value,
                domain: "[0, 1]",
            });
        }
    }
    if u == 0.0 || v == 0.0 {
        return Ok(0.0);
    }
    Ok((generator.survival)(-(u * v).ln()))
}
