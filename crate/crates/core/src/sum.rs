//! The law of the sum `S = X₁ + X₂` under a TTE model.
//!
//! For scale-parameter models `F̄(x₁,x₂) = Ḡ(αx₁ + βx₂)` the survival,
//! density and joint distribution of `(X₁, S)` have closed forms (with
//! separate equal-rate limits for `α = β`, the Schur-constant case). For
//! general baselines the same quantities are one-dimensional integrals
//! evaluated by adaptive quadrature:
//!
//! ```text
//! F̄_S(s) = Ḡ(R₁(s)) + ∫₀ˢ r₁(y) g(R₁(y) + R₂(s−y)) dy
//! f_S(s)  =           ∫₀ˢ r₁(y) r₂(s−y) (−g′)(R₁(y) + R₂(s−y)) dy
//! ```
//!
//! [`copula_convolution_oracle`] recomputes `F̄_S` by an independent route —
//! the convolution runs through the survival copula's partial derivative and
//! the generator inverses — and exists to cross-check the formulas above.

use std::cell::RefCell;

use crate::error::{Error, Result};
use crate::model::{Margin, TteModel};
use crate::numeric::quad::integrate_split;
use crate::numeric::root::{bracket_upward, brent};

/// How a [`SumLaw`] evaluates itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMethod {
    /// Scale-parameter closed forms (requires exponential baselines).
    ClosedForm,
    /// Adaptive quadrature of the general representation.
    Quadrature,
}

fn check_nonneg(s: f64, what: &'static str) -> Result<()> {
    if s >= 0.0 {
        Ok(())
    } else {
        Err(Error::OutsideDomain {
            what,
            value: s,
            domain: "[0, ∞)",
        })
    }
}

fn require_gk(m: &TteModel, what: &'static str) -> Result<crate::model::GkParams> {
    m.gk_params().ok_or(Error::NotAvailable { what })
}

/// Closed-form sum survival `F̄_S(s)` for scale-parameter models.
///
/// `F̄_S(s) = (αḠ(βs) − βḠ(αs))/(α − β)`, with the `α = β` limit
/// `Ḡ(αs) + αs·g(αs)`.
pub fn sum_survival_gk(m: &TteModel, s: f64) -> Result<f64> {
    let p = require_gk(m, "closed-form sum survival")?;
    check_nonneg(s, "sum survival")?;
    let sv = &m.generator.survival;
    if p.equal_rates() {
        let a = p.common_rate();
        Ok((sv)(a * s) + a * s * (m.generator.density)(a * s))
    } else {
        Ok((p.alpha * (sv)(p.beta * s) - p.beta * (sv)(p.alpha * s)) / (p.alpha - p.beta))
    }
}

/// Closed-form sum density `f_S(s)` for scale-parameter models.
///
/// `f_S(s) = αβ·(g(βs) − g(αs))/(α − β)`, with the `α = β` limit
/// `−α²·s·g′(αs)`.
pub fn sum_pdf_gk(m: &TteModel, s: f64) -> Result<f64> {
    let p = require_gk(m, "closed-form sum density")?;
    check_nonneg(s, "sum density")?;
    let de = &m.generator.density;
    if p.equal_rates() {
        let a = p.common_rate();
        Ok(-a * a * s * (m.generator.density_derivative)(a * s))
    } else {
        Ok(p.alpha * p.beta * ((de)(p.beta * s) - (de)(p.alpha * s)) / (p.alpha - p.beta))
    }
}

/// Sum survival by adaptive quadrature of the general representation.
pub fn sum_survival_quadrature(m: &TteModel, s: f64) -> Result<f64> {
    check_nonneg(s, "sum survival")?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let de = &m.generator.density;
    let r1 = &m.margins[0].hazard;
    let ch1 = &m.margins[0].cum_hazard;
    let ch2 = &m.margins[1].cum_hazard;
    let tail = (m.generator.survival)((ch1)(s));
    let integral = integrate_split(
        |y: f64| (r1)(y) * (de)((ch1)(y) + (ch2)(s - y)),
        0.0,
        s,
        &[0.5 * s],
        &m.quad,
    )?;
    Ok(tail + integral)
}

/// Sum density by adaptive quadrature of the general representation.
pub fn sum_pdf_quadrature(m: &TteModel, s: f64) -> Result<f64> {
    check_nonneg(s, "sum density")?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let dd = &m.generator.density_derivative;
    let r1 = &m.margins[0].hazard;
    let r2 = &m.margins[1].hazard;
    let ch1 = &m.margins[0].cum_hazard;
    let ch2 = &m.margins[1].cum_hazard;
    integrate_split(
        |y: f64| (r1)(y) * (r2)(s - y) * -(dd)((ch1)(y) + (ch2)(s - y)),
        0.0,
        s,
        &[0.5 * s],
        &m.quad,
    )
}

/// Hazard rate of the sum, `h_S(s) = f_S(s)/F̄_S(s)`, using closed forms
/// when the model admits them.
pub fn hazard_of_sum(m: &TteModel, s: f64) -> Result<f64> {
    let (sv, de) = if m.gk_params().is_some() {
        (sum_survival_gk(m, s)?, sum_pdf_gk(m, s)?)
    } else {
        (sum_survival_quadrature(m, s)?, sum_pdf_quadrature(m, s)?)
    };
    if sv <= 0.0 {
        return Err(Error::DegenerateConditioning {
            value: s,
            reason: "sum survival underflows to zero",
        });
    }
    Ok(de / sv)
}

/// Joint survival of the pair `(X₁, S)`: `P(X₁ > x, S > s)`.
///
/// For `x ≥ s` the sum constraint is implied and this is the marginal
/// `F̄₁(x)`; otherwise the tail of `X₁` beyond `s` plus an integral over
/// `y ∈ (x, s)` of the mass with `X₁ = y, X₂ > s − y`.
pub fn joint_survival_x1_s(m: &TteModel, x: f64, s: f64) -> Result<f64> {
    check_nonneg(x, "joint survival of (X₁, S), first argument")?;
    check_nonneg(s, "joint survival of (X₁, S), second argument")?;
    if x >= s {
        return m.marginal_survival(Margin::First, x);
    }
    let de = &m.generator.density;
    let r1 = &m.margins[0].hazard;
    let ch1 = &m.margins[0].cum_hazard;
    let ch2 = &m.margins[1].cum_hazard;
    let tail = (m.generator.survival)((ch1)(s));
    let integral = integrate_split(
        |y: f64| (r1)(y) * (de)((ch1)(y) + (ch2)(s - y)),
        x,
        s,
        &[0.5 * (x + s)],
        &m.quad,
    )?;
    Ok(tail + integral)
}

/// Joint density of `(X₁, S)` at `(x, s)`: `f(x, s − x)` for `0 ≤ x ≤ s`,
/// zero for `x > s`.
pub fn joint_pdf_x1_s(m: &TteModel, x: f64, s: f64) -> Result<f64> {
    check_nonneg(x, "joint density of (X₁, S), first argument")?;
    check_nonneg(s, "joint density of (X₁, S), second argument")?;
    if x > s {
        return Ok(0.0);
    }
    m.joint_density(x, s - x)
}

/// Closed-form joint distribution function `P(X₁ ≤ x, S ≤ s)` for
/// scale-parameter models (with `G = 1 − Ḡ`):
///
/// ```text
/// α ≠ β:  G(αx) − (α/(α−β))·[G((α−β)x + βs) − G(βs)]
/// α = β:  G(αx) − αx·g(αs)
/// ```
///
/// evaluated at `x` clamped to `[0, s]` (the pair satisfies `X₁ ≤ S`).
pub fn joint_df_gk(m: &TteModel, x: f64, s: f64) -> Result<f64> {
    let p = require_gk(m, "closed-form joint distribution of (X₁, S)")?;
    check_nonneg(x, "joint distribution of (X₁, S), first argument")?;
    check_nonneg(s, "joint distribution of (X₁, S), second argument")?;
    let x = x.min(s);
    let sv = &m.generator.survival;
    let df = |t: f64| 1.0 - (sv)(t);
    if p.equal_rates() {
        let a = p.common_rate();
        Ok(df(a * x) - a * x * (m.generator.density)(a * s))
    } else {
        let ratio = p.alpha / (p.alpha - p.beta);
        Ok(df(p.alpha * x) - ratio * (df((p.alpha - p.beta) * x + p.beta * s) - df(p.beta * s)))
    }
}

/// Independent cross-check of `F̄_S` through the survival copula.
///
/// Writes the sum survival as a convolution against the copula's partial
/// derivative, `F̄_S(s) = F̄₁(s) + ∫₀ˢ f₁(x)·∂₁Ĉ(F̄₁(x), F̄₂(s−x)) dx` with
/// `∂₁Ĉ(u, v) = g(Ḡ⁻¹(u) + Ḡ⁻¹(v))/g(Ḡ⁻¹(u))`, and evaluates everything
/// through the marginal survivals and generator inverses. The route is
/// deliberately different from [`sum_survival_quadrature`] (which never
/// inverts anything), so agreement between the two is a real consistency
/// check rather than the same code run twice.
pub fn copula_convolution_oracle(m: &TteModel, s: f64) -> Result<f64> {
    check_nonneg(s, "sum survival")?;
    if s == 0.0 {
        return Ok(1.0);
    }
    let gen = &m.generator;
    let ch1 = &m.margins[0].cum_hazard;
    let ch2 = &m.margins[1].cum_hazard;
    let r1 = &m.margins[0].hazard;
    let err_slot: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |x: f64| -> f64 {
        let eval = || -> Result<f64> {
            let sf1 = (gen.survival)((ch1)(x));
            let sf2 = (gen.survival)((ch2)(s - x));
            let t1 = (gen.survival_inverse)(sf1)?;
            let t2 = (gen.survival_inverse)(sf2)?;
            let den = (gen.density)(t1);
            if den <= 0.0 {
                return Err(Error::DegenerateConditioning {
                    value: x,
                    reason: "copula partial derivative has vanishing denominator",
                });
            }
            let f1 = (r1)(x) * (gen.density)((ch1)(x));
            Ok(f1 * (gen.density)(t1 + t2) / den)
        };
        match eval() {
            Ok(v) => v,
            Err(e) => {
                err_slot.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let tail = (gen.survival)((ch1)(s));
    let integral = integrate_split(integrand, 0.0, s, &[0.5 * s], &m.quad);
    if let Some(e) = err_slot.into_inner() {
        return Err(e);
    }
    Ok(tail + integral?)
}

/// The distribution of `S = X₁ + X₂`, with the evaluation method pinned.
#[derive(Debug, Clone)]
pub struct SumLaw {
    model: TteModel,
    method: SumMethod,
}

impl SumLaw {
    /// Wrap a model, choosing closed forms when available.
    pub fn new(model: &TteModel) -> Self {
        let method = if model.gk_params().is_some() {
            SumMethod::ClosedForm
        } else {
            SumMethod::Quadrature
        };
        Self {
            model: model.clone(),
            method,
        }
    }

    /// Wrap a model with an explicit method. Requesting closed forms on a
    /// model with non-exponential baselines fails.
    pub fn with_method(model: &TteModel, method: SumMethod) -> Result<Self> {
        if method == SumMethod::ClosedForm && model.gk_params().is_none() {
            return Err(Error::NotAvailable {
                what: "closed-form sum law (baselines are not exponential)",
            });
        }
        Ok(Self {
            model: model.clone(),
            method,
        })
    }

    pub fn method(&self) -> SumMethod {
        self.method
    }

    pub fn model(&self) -> &TteModel {
        &self.model
    }

    /// `F̄_S(s)`.
    pub fn survival(&self, s: f64) -> Result<f64> {
        match self.method {
            SumMethod::ClosedForm => sum_survival_gk(&self.model, s),
            SumMethod::Quadrature => sum_survival_quadrature(&self.model, s),
        }
    }

    /// `f_S(s)`.
    pub fn density(&self, s: f64) -> Result<f64> {
        match self.method {
            SumMethod::ClosedForm => sum_pdf_gk(&self.model, s),
            SumMethod::Quadrature => sum_pdf_quadrature(&self.model, s),
        }
    }

    /// `F_S(s) = 1 − F̄_S(s)`.
    pub fn df(&self, s: f64) -> Result<f64> {
        Ok(1.0 - self.survival(s)?)
    }

    /// `h_S(s) = f_S(s)/F̄_S(s)`.
    pub fn hazard(&self, s: f64) -> Result<f64> {
        let sv = self.survival(s)?;
        if sv <= 0.0 {
            return Err(Error::DegenerateConditioning {
                value: s,
                reason: "sum survival underflows to zero",
            });
        }
        Ok(self.density(s)? / sv)
    }

    /// Quantile `F_S⁻¹(p)`, `p ∈ [0, 1)`, by bracketed root search.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::OutsideDomain {
                what: "sum quantile level",
                value: p,
                domain: "[0, 1)",
            });
        }
        if p == 0.0 {
            return Ok(0.0);
        }
        let hint = self.model.generator.support_hint;
        let inv1 = &self.model.margins[0].inverse_cum_hazard;
        let inv2 = &self.model.margins[1].inverse_cum_hazard;
        // F̄(x₁, x₂) = 1 − p at (R₁⁻¹(t/2), R₂⁻¹(t/2)) forces F_S ≤ p there,
        // so the root lies above this starting point; the cap makes both
        // halves of the sum exceed the negligible-tail abscissa.
        let t = (self.model.generator.survival_inverse)(1.0 - p)?;
        let start = (inv1)(0.5 * t)? + (inv2)(0.5 * t)?;
        let cap = 2.0 * ((inv1)(hint)? + (inv2)(hint)?);
        let f = |s: f64| Ok(self.df(s)? - p);
        let (lo, hi, _, _) = bracket_upward(f, 0.0, start.max(1e-300), cap, "sum quantile")?;
        brent(f, lo, hi, 1e-12, 1e-12, "sum quantile")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{
        make_exponential, make_gumbel_barnett, make_pareto_ii, make_translated_erlang,
        make_truncated_normal,
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

    // Reference values computed with 60-digit arithmetic.
    #[test]
    fn closed_form_survival_and_density_match_reference() {
        let m = ex1_model();
        let table = [
            (0.5, 0.64362911159036897, 0.71450277967571306),
            (1.0, 0.37827559963310713, 0.37703169889707891),
            (2.0, 0.15960894783233518, 0.11907913945574603),
            (5.0, 0.031114939164858844, 0.012719416497736260),
        ];
        for (s, sv, de) in table {
            let got_sv = sum_survival_gk(&m, s).unwrap();
            let got_de = sum_pdf_gk(&m, s).unwrap();
            assert!((got_sv - sv).abs() < 1e-14, "survival({s}): {got_sv}");
            assert!((got_de - de).abs() < 1e-14, "density({s}): {got_de}");
        }

        let m = ex3_model();
        let table = [
            (0.5, 0.96450748752442008, 0.17403710722606549),
            (1.0, 0.83296775704110158, 0.32975303263304657),
            (2.0, 0.48639421628024823, 0.31442765526616717),
            (5.0, 0.046893229415023361, 0.039928282767125469),
            (30.0, 2.9944393500285844e-12, 2.9008631203399200e-12),
        ];
        for (s, sv, de) in table {
            let got_sv = sum_survival_gk(&m, s).unwrap();
            let got_de = sum_pdf_gk(&m, s).unwrap();
            assert!(
                ((got_sv - sv) / sv).abs() < 1e-12,
                "survival({s}): {got_sv:e}"
            );
            assert!(
                ((got_de - de) / de).abs() < 1e-12,
                "density({s}): {got_de:e}"
            );
        }
        let h = hazard_of_sum(&m, 30.0).unwrap();
        assert!((h - 0.96874999999990944).abs() < 1e-10, "{h}");
    }

    #[test]
    fn quadrature_agrees_with_closed_forms() {
        for (gen, alpha, beta) in [
            (make_truncated_normal(), 2.0, 1.0),
            (make_gumbel_barnett(1.0).unwrap(), 3.0, 1.0),
            (make_translated_erlang(), 1.0, 1.0),
        ] {
            let m = TteModel::gk(gen, alpha, beta).unwrap();
            for s in [0.2, 0.7, 1.5, 3.0] {
                let closed = sum_survival_gk(&m, s).unwrap();
                let quad = sum_survival_quadrature(&m, s).unwrap();
                assert!(
                    (closed - quad).abs() < 1e-9,
                    "{} survival at {s}: {closed} vs {quad}",
                    m.generator.label
                );
                let closed = sum_pdf_gk(&m, s).unwrap();
                let quad = sum_pdf_quadrature(&m, s).unwrap();
                assert!(
                    (closed - quad).abs() < 1e-9,
                    "{} density at {s}: {closed} vs {quad}",
                    m.generator.label
                );
            }
        }
    }

    #[test]
    fn equal_rate_limit_is_continuous() {
        // α → β: the two closed-form branches meet. The unequal branch
        // divides out α − β, so expect cancellation noise ~ε/(α − β).
        let near = TteModel::gk(make_truncated_normal(), 1.0 + 1e-9, 1.0).unwrap();
        let equal = TteModel::gk(make_truncated_normal(), 1.0, 1.0).unwrap();
        for s in [0.3, 1.0, 2.5] {
            let a = sum_survival_gk(&near, s).unwrap();
            let b = sum_survival_gk(&equal, s).unwrap();
            assert!((a - b).abs() < 1e-6, "at {s}: {a} vs {b}");
            let fa = sum_pdf_gk(&near, s).unwrap();
            let fb = sum_pdf_gk(&equal, s).unwrap();
            assert!((fa - fb).abs() < 1e-6, "pdf at {s}: {fa} vs {fb}");
        }
    }

    #[test]
    fn oracle_matches_closed_form() {
        let m = ex1_model();
        for s in [0.5, 1.0, 2.0, 5.0] {
            let oracle = copula_convolution_oracle(&m, s).unwrap();
            let closed = sum_survival_gk(&m, s).unwrap();
            assert!(
                (oracle - closed).abs() < 1e-8,
                "at {s}: oracle {oracle} vs closed {closed}"
            );
        }
        // and on a numeric-inverse generator
        let m = ex3_model();
        let oracle = copula_convolution_oracle(&m, 1.0).unwrap();
        assert!((oracle - 0.83296775704110158).abs() < 1e-8, "{oracle}");
    }

    #[test]
    fn joint_df_matches_reference() {
        let m = TteModel::gk(make_pareto_ii(2.0).unwrap(), 2.0, 1.0).unwrap();
        let table = [
            (0.5, 1.0, 0.57),
            (1.0, 2.0, 0.79166666666666667),
            (0.2, 3.0, 0.47817460317460317),
        ];
        for (x, s, want) in table {
            let got = joint_df_gk(&m, x, s).unwrap();
            assert!((got - want).abs() < 1e-14, "joint df({x},{s}): {got}");
        }
        // beyond the diagonal the df saturates at F_S(s)
        let fs = 1.0 - sum_survival_gk(&m, 2.0).unwrap();
        assert!((joint_df_gk(&m, 5.0, 2.0).unwrap() - fs).abs() < 1e-14);
    }

    #[test]
    fn joint_survival_consistency() {
        let m = ex1_model();
        // x = 0 recovers the sum survival
        for s in [0.4, 1.3] {
            let a = joint_survival_x1_s(&m, 0.0, s).unwrap();
            let b = sum_survival_gk(&m, s).unwrap();
            assert!((a - b).abs() < 1e-9, "at {s}: {a} vs {b}");
        }
        // x ≥ s collapses to the marginal
        let a = joint_survival_x1_s(&m, 2.0, 1.5).unwrap();
        let b = m.marginal_survival(Margin::First, 2.0).unwrap();
        assert!((a - b).abs() < 1e-15);
        // inclusion–exclusion against the closed-form joint df
        for (x, s) in [(0.3, 1.0), (0.8, 2.0), (1.0, 1.2)] {
            let lhs = joint_df_gk(&m, x, s).unwrap();
            let rhs = 1.0 - m.marginal_survival(Margin::First, x).unwrap()
                - sum_survival_gk(&m, s).unwrap()
                + joint_survival_x1_s(&m, x, s).unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "at ({x},{s}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn joint_pdf_integrates_to_sum_density() {
        let m = ex3_model();
        let s = 1.5;
        let cfg = m.quad;
        let got = crate::numeric::quad::integrate(
            |x| joint_pdf_x1_s(&m, x, s).unwrap(),
            0.0,
            s,
            &cfg,
        )
        .unwrap();
        let want = sum_pdf_gk(&m, s).unwrap();
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        assert_eq!(joint_pdf_x1_s(&m, 2.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn sum_law_quantile_round_trips() {
        let closed = SumLaw::new(&ex1_model());
        assert_eq!(closed.method(), SumMethod::ClosedForm);
        for p in [0.05, 0.25, 0.5, 0.75, 0.95] {
            let s = closed.quantile(p).unwrap();
            let back = closed.df(s).unwrap();
            assert!((back - p).abs() < 1e-10, "p={p}: {back}");
        }
        assert_eq!(closed.quantile(0.0).unwrap(), 0.0);
        assert!(closed.quantile(1.0).is_err());

        // general model goes through quadrature
        let base = make_truncated_normal();
        let m = TteModel::new(
            make_truncated_normal(),
            BaselineMarginal::from_generator(&base),
            BaselineMarginal::from_generator(&base),
        );
        let law = SumLaw::new(&m);
        assert_eq!(law.method(), SumMethod::Quadrature);
        let s = law.quantile(0.5).unwrap();
        let back = law.df(s).unwrap();
        assert!((back - 0.5).abs() < 1e-9, "{back}");
    }

    #[test]
    fn closed_forms_refuse_general_baselines() {
        let base = make_truncated_normal();
        let m = TteModel::new(
            make_truncated_normal(),
            BaselineMarginal::from_generator(&base),
            BaselineMarginal::from_generator(&base),
        );
        assert!(matches!(
            sum_survival_gk(&m, 1.0).unwrap_err(),
            Error::NotAvailable { .. }
        ));
        assert!(sum_pdf_gk(&m, 1.0).is_err());
        assert!(joint_df_gk(&m, 0.5, 1.0).is_err());
        assert!(SumLaw::with_method(&m, SumMethod::ClosedForm).is_err());
        // but quadrature on a closed-form-capable model is allowed
        let law = SumLaw::with_method(&ex1_model(), SumMethod::Quadrature).unwrap();
        let a = law.survival(1.0).unwrap();
        assert!((a - 0.37827559963310713).abs() < 1e-9);
    }

    #[test]
    fn independence_reduces_to_classical_convolution() {
        // exponential generator, rates 2 and 1: S is hypoexponential.
        let m = TteModel::gk(make_exponential(), 2.0, 1.0).unwrap();
        for s in [0.5f64, 1.0, 3.0] {
            let want = 2.0 * (-s).exp() - (-2.0 * s).exp();
            let got = sum_survival_gk(&m, s).unwrap();
            assert!((got - want).abs() < 1e-14, "at {s}: {got}");
        }
    }

    #[test]
    fn negative_arguments_rejected() {
        let m = ex1_model();
        assert!(sum_survival_gk(&m, -0.5).is_err());
        assert!(sum_pdf_quadrature(&m, -0.5).is_err());
        assert!(joint_survival_x1_s(&m, -0.1, 1.0).is_err());
        assert!(copula_convolution_oracle(&m, -1.0).is_err());
    }
}
