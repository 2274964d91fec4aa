//! Degree-by-degree solvers for the flat-connection equations and the
//! operators built from a solved connection form.
//!
//! Every fixed point `a = x + δ⁻¹(…)` handled here has a right-hand side that
//! raises total degree by at least one, so the homogeneous part of degree
//! `d` only depends on parts of degree `< d` and is computed exactly once.

use crate::error::Result;
use crate::geometry::{connection, BundleAction};
use crate::geometry::{BundleChart, KaehlerChart};
use crate::scalar::Rational;
use crate::weyl::ops::{delta, delta_inverse, pi_antiholomorphic, pi_holomorphic};
use crate::weyl::product::{circ, graded_two_sided, InverseMetric};
use crate::weyl::{Coeff, Compose, Split, WeylElement, UNBOUNDED};

fn sum_parts<V: Coeff>(dim: usize, parts: Vec<WeylElement<V>>, cap: u32) -> WeylElement<V> {
    let mut out = WeylElement::zero_with_cap(dim, UNBOUNDED);
    for p in &parts {
        out.add_assign(p);
    }
    out.with_cap(cap)
}

/// Solves `δr = source + D r + (i/λ) r ∘_κ r`, `δ⁻¹r = 0` through total
/// degree `cap`. The source must consist of 2-forms of total degree ≥ 2.
pub fn solve_connection_form<V>(
    source: &WeylElement<V>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
    kappa: &Rational,
    cap: u32,
) -> Result<WeylElement<V>>
where
    V: BundleAction + Compose<V, Output = V>,
{
    let dim = chart.dim();
    let metric = chart.inverse_metric();
    let mut parts: Vec<WeylElement<V>> = vec![WeylElement::zero_with_cap(dim, UNBOUNDED); cap as usize + 1];
    for d in 3..=cap {
        let mut arg = source.homogeneous(d - 1).uncapped();
        arg.add_assign(&connection(&parts[d as usize - 1], chart, bundle, Split::Full)?);
        let mut quad = WeylElement::zero_with_cap(dim, UNBOUNDED);
        for j in 3..=d.saturating_sub(2) {
            let k = d + 1 - j;
            quad.add_assign(&circ(&parts[j as usize], &parts[k as usize], kappa, metric, d + 1));
        }
        arg.add_assign(&quad.divide_lambda()?.mul_i());
        parts[d as usize] = delta_inverse(&arg, Split::Full).uncapped();
    }
    Ok(sum_parts(dim, parts, cap))
}

/// `−δr + source + D r + (i/λ) r ∘_κ r`; vanishes through `r.cap() − 1`
/// for a solution of [`solve_connection_form`].
pub fn connection_form_residual<V>(
    r: &WeylElement<V>,
    source: &WeylElement<V>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
    kappa: &Rational,
) -> Result<WeylElement<V>>
where
    V: BundleAction + Compose<V, Output = V>,
{
    let cap = r.cap().saturating_sub(1);
    let quad = circ(r, r, kappa, chart.inverse_metric(), cap + 2)
        .divide_lambda()?
        .mul_i();
    // the top homogeneous part only enters through δ
    let lower = r.filter(|k| k.total_degree() <= cap).with_cap(cap);
    let out = source
        .sub(&delta(r, Split::Full))
        .add(&connection(&lower, chart, bundle, Split::Full)?)
        .add(&quad);
    Ok(out.filter(|k| k.total_degree() <= cap).with_cap(cap))
}

/// `a ↦ −δa + D a + (i/λ)(left ∘_κ a − (−1)^{|a|} a ∘_κ right)`.
///
/// With `left = right = r` this is the Fedosov derivation of a solved
/// connection form; with `left = r′` and `right = r` it is the module
/// derivation `−δ + D^E + (i/λ)ad(r) + r_E` on sections.
#[derive(Clone, Copy)]
pub struct TwistedDerivation<'a, L: Coeff, R: Coeff> {
    pub chart: &'a KaehlerChart,
    pub bundle: Option<&'a BundleChart>,
    pub left: &'a WeylElement<L>,
    pub right: &'a WeylElement<R>,
    pub kappa: &'a Rational,
    pub metric: &'a InverseMetric,
}

impl<L: Coeff, R: Coeff> TwistedDerivation<'_, L, R> {
    /// The inner part `(i/λ)(left ∘ a − (−1)^{|a|} a ∘ right)`.
    pub fn inner<V>(&self, a: &WeylElement<V>) -> Result<WeylElement<V>>
    where
        V: Compose<R, Output = V>,
        L: Compose<V, Output = V>,
    {
        let limit = a.cap().saturating_add(2);
        Ok(
            graded_two_sided(self.left, a, self.right, self.kappa, self.metric, limit)
                .divide_lambda()?
                .mul_i(),
        )
    }

    pub fn apply<V>(&self, a: &WeylElement<V>) -> Result<WeylElement<V>>
    where
        V: BundleAction + Compose<R, Output = V>,
        L: Compose<V, Output = V>,
    {
        Ok(connection(a, self.chart, self.bundle, Split::Full)?
            .sub(&delta(a, Split::Full))
            .add(&self.inner(a)?))
    }

    /// The unique flat lift `τ = x + δ⁻¹(D τ + inner(τ))` of a `σ`-datum `x`
    /// (only the form-degree-0, symmetric-degree-0 keys of `x` are used; the
    /// two-sided forms must start in total degree 2 or higher),
    /// through total degree `cap`.
    pub fn taylor<V>(&self, x: &WeylElement<V>, cap: u32) -> Result<WeylElement<V>>
    where
        V: BundleAction + Compose<R, Output = V>,
        L: Compose<V, Output = V>,
    {
        let dim = x.dim();
        let x = crate::weyl::ops::sigma(x);
        let left = self.left.by_degree(cap + 1);
        let right = self.right.by_degree(cap + 1);
        let x_parts = x.by_degree(cap);
        let mut parts: Vec<WeylElement<V>> = Vec::with_capacity(cap as usize + 1);
        parts.push(x_parts[0].clone());
        for d in 1..=cap {
            let prev = &parts[d as usize - 1];
            let mut arg = connection(prev, self.chart, self.bundle, Split::Full)?;
            let mut two_sided = WeylElement::zero_with_cap(dim, UNBOUNDED);
            for j in 2..=d + 1 {
                let e = (d + 1 - j) as usize;
                let (l, r) = (&left[j as usize], &right[j as usize]);
                if l.is_empty() && r.is_empty() {
                    continue;
                }
                two_sided.add_assign(&graded_two_sided(l, &parts[e], r, self.kappa, self.metric, d + 1));
            }
            arg.add_assign(&two_sided.divide_lambda()?.mul_i());
            let mut next = delta_inverse(&arg, Split::Full).uncapped();
            next.add_assign(&x_parts[d as usize]);
            parts.push(next);
        }
        Ok(sum_parts(dim, parts, cap))
    }
}

/// Holomorphically projected lift at κ = 1:
/// `u = x + δ_z⁻¹(D_z u − (i/λ) π_z(u ∘ right))`, which reproduces `π_z τ`.
pub fn holomorphic_projection<V, R>(
    x: &WeylElement<V>,
    right: &WeylElement<R>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
    cap: u32,
) -> Result<WeylElement<V>>
where
    V: BundleAction + Compose<R, Output = V>,
    R: Coeff,
{
    let dim = x.dim();
    let one = Rational::from_integer(1.into());
    let metric = chart.inverse_metric();
    let right = right.by_degree(cap + 1);
    let x_parts = crate::weyl::ops::sigma(x).by_degree(cap);
    let mut parts: Vec<WeylElement<V>> = vec![x_parts[0].clone()];
    for d in 1..=cap {
        let mut arg = connection(&parts[d as usize - 1], chart, bundle, Split::Holo)?;
        let mut prod = WeylElement::zero_with_cap(dim, UNBOUNDED);
        for j in 2..=d + 1 {
            let e = (d + 1 - j) as usize;
            prod.add_assign(&circ(&parts[e], &right[j as usize], &one, metric, d + 1));
        }
        arg.add_assign(&pi_holomorphic(&prod).divide_lambda()?.mul_i().neg());
        let mut next = delta_inverse(&arg, Split::Holo).uncapped();
        next.add_assign(&x_parts[d as usize]);
        parts.push(next);
    }
    Ok(sum_parts(dim, parts, cap))
}

/// Anti-holomorphically projected lift at κ = 1:
/// `v = x + δ_z̄⁻¹(D_z̄ v + (i/λ) π_z̄(left ∘ v))`, which reproduces `π_z̄ τ`.
pub fn antiholomorphic_projection<L, V>(
    x: &WeylElement<V>,
    left: &WeylElement<L>,
    chart: &KaehlerChart,
    bundle: Option<&BundleChart>,
    cap: u32,
) -> Result<WeylElement<V>>
where
    V: BundleAction,
    L: Compose<V, Output = V>,
{
    let dim = x.dim();
    let one = Rational::from_integer(1.into());
    let metric = chart.inverse_metric();
    let left = left.by_degree(cap + 1);
    let x_parts = crate::weyl::ops::sigma(x).by_degree(cap);
    let mut parts: Vec<WeylElement<V>> = vec![x_parts[0].clone()];
    for d in 1..=cap {
        let mut arg = connection(&parts[d as usize - 1], chart, bundle, Split::AntiHolo)?;
        let mut prod = WeylElement::zero_with_cap(dim, UNBOUNDED);
        for j in 2..=d + 1 {
            let e = (d + 1 - j) as usize;
            prod.add_assign(&circ(&left[j as usize], &parts[e], &one, metric, d + 1));
        }
        arg.add_assign(&pi_antiholomorphic(&prod).divide_lambda()?.mul_i());
        let mut next = delta_inverse(&arg, Split::AntiHolo).uncapped();
        next.add_assign(&x_parts[d as usize]);
        parts.push(next);
    }
    Ok(sum_parts(dim, parts, cap))
}
