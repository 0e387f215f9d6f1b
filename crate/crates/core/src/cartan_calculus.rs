//! Cartan calculus on Lie algebroid forms, the Koszul–Brylinski operator and
//! the higher Koszul–Schouten brackets.
//!
//! A form operator is stored as a normal-ordered symbol on T*(ΠE): coefficients
//! in (x, ξ) on the left, p_A standing for ∂/∂x^A and π_α for ∂/∂ξ^α on the right.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebroid::{Algebroid, Side, TotalSpace};
use crate::error::{Error, Result};
use crate::graded_algebra::{Chart, Monomial, Parity, Poly, Role};
use crate::report::{Check, Report};
use crate::tulczyjew::canonical_r;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormOperator {
    symbol: Poly,
    parity: Parity,
}

fn momenta_of(chart: &Chart) -> Vec<usize> {
    chart.indices_with_role(Role::Momentum)
}

/// ∂_u∘N for a symbol N, where `m` is the momentum conjugate to u.
fn derivative_then(n: &Poly, m: usize) -> Poly {
    let chart = n.chart();
    let u = chart.partner(m).expect("momentum has a conjugate");
    n.derivative(u) + Poly::var_at(chart, m) * n
}

/// Applies ∂^m (momentum monomial read as derivatives, rightmost acting first) to `f`,
/// where `step(f, momentum)` realizes one derivative.
fn apply_tail(
    tail: &Monomial,
    f: &Poly,
    momenta: &[usize],
    step: impl Fn(&Poly, usize) -> Poly,
) -> Poly {
    let mut acc = f.clone();
    for &m in momenta.iter().rev() {
        for _ in 0..tail.exponent(m) {
            if acc.is_zero() {
                return acc;
            }
            acc = step(&acc, m);
        }
    }
    acc
}

impl FormOperator {
    pub fn new(symbol: Poly, parity: Parity) -> Self {
        FormOperator { symbol, parity }
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        FormOperator::new(Poly::zero(chart), Parity::Even)
    }

    pub fn identity(chart: &Arc<Chart>) -> Self {
        FormOperator::new(Poly::one(chart), Parity::Even)
    }

    /// Multiplication by a form.
    pub fn multiplication(form: &Poly) -> Self {
        FormOperator::new(form.clone(), form.parity().unwrap_or(Parity::Even))
    }

    pub fn symbol(&self) -> &Poly {
        &self.symbol
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_zero()
    }

    /// Highest number of derivatives.
    pub fn order(&self) -> u32 {
        self.symbol.max_degree_in(&momenta_of(self.symbol.chart()))
    }

    pub fn apply(&self, form: &Poly) -> Poly {
        let chart = self.symbol.chart();
        let momenta = momenta_of(chart);
        let mut out = Poly::zero(chart);
        for (tail, coeff) in self.symbol.group_by_tail(&momenta) {
            let d = apply_tail(&tail, form, &momenta, |f, m| {
                f.derivative(chart.partner(m).expect("paired"))
            });
            if !d.is_zero() {
                out = out + coeff * d;
            }
        }
        out
    }

    pub fn compose(&self, other: &FormOperator) -> FormOperator {
        let chart = self.symbol.chart();
        let momenta = momenta_of(chart);
        let mut out = Poly::zero(chart);
        for (tail, coeff) in self.symbol.group_by_tail(&momenta) {
            let d = apply_tail(&tail, &other.symbol, &momenta, derivative_then);
            if !d.is_zero() {
                out = out + coeff * d;
            }
        }
        FormOperator::new(out, self.parity + other.parity)
    }

    pub fn add(&self, other: &FormOperator) -> FormOperator {
        FormOperator::new(&self.symbol + &other.symbol, self.parity)
    }

    pub fn scale_int(&self, c: i64) -> FormOperator {
        FormOperator::new(self.symbol.scale_int(c), self.parity)
    }

    /// [A, B] = A∘B − (−1)^{ÃB̃} B∘A.
    pub fn commutator(&self, other: &FormOperator) -> FormOperator {
        let ab = self.compose(other);
        let ba = other.compose(self);
        let s = self.parity.koszul(other.parity) as i64;
        FormOperator::new(
            ab.symbol - ba.symbol.scale_int(s),
            self.parity + other.parity,
        )
    }

    /// Terms with exactly k derivatives.
    pub fn order_component(&self, k: u32) -> Poly {
        self.symbol
            .degree_component(&momenta_of(self.symbol.chart()), k)
    }
}

fn forms_space(alg: &Algebroid) -> &TotalSpace {
    &alg.charts().forms
}

fn check_form(alg: &Algebroid, w: &Poly) -> Result<Poly> {
    let space = forms_space(alg);
    let w = w.embed(&space.chart)?;
    if w.involves_any(&space.momenta()) {
        return Err(Error::InvalidData(format!("`{w}` is not a form")));
    }
    Ok(w)
}

fn check_multivector(alg: &Algebroid, x: &Poly) -> Result<Poly> {
    let space = &alg.charts().multivectors;
    let x = x.embed(&space.chart)?;
    if x.involves_any(&space.momenta()) {
        return Err(Error::InvalidData(format!("`{x}` is not a multivector")));
    }
    Ok(x)
}

/// d_E, with symbol H_Q.
pub fn de_rham_operator(alg: &Algebroid) -> FormOperator {
    FormOperator::new(alg.encodings().h_q.clone(), Parity::Odd)
}

pub fn de_rham(alg: &Algebroid, w: &Poly) -> Result<Poly> {
    Ok(de_rham_operator(alg).apply(&check_form(alg, w)?))
}

/// i_X = X(x, ∂/∂ξ): each η_α becomes ∂/∂ξ^α in the same order.
/// No (−1)^X̃ prefactor, otherwise i_[[X,Y]] = [i_X, L_Y] fails by a sign.
pub fn interior_operator(alg: &Algebroid, x: &Poly) -> Result<FormOperator> {
    let x = check_multivector(alg, x)?;
    let r_inv = canonical_r(alg, Side::Schouten)?
        .inverse()
        .ok_or_else(|| Error::Convention("R is not invertible".into()))?;
    Ok(FormOperator::new(
        r_inv.pullback(&x)?,
        x.parity().unwrap_or(Parity::Even),
    ))
}

pub fn interior(alg: &Algebroid, x: &Poly, w: &Poly) -> Result<Poly> {
    Ok(interior_operator(alg, x)?.apply(&check_form(alg, w)?))
}

/// L_X = [d_E, i_X], applied per parity component of X.
pub fn lie_derivative_operator(alg: &Algebroid, x: &Poly) -> Result<FormOperator> {
    let x = check_multivector(alg, x)?;
    let d = de_rham_operator(alg);
    let chart = &forms_space(alg).chart;
    let mut sym = Poly::zero(chart);
    for (_, part) in x.homogeneous_parts() {
        let i = interior_operator(alg, &part)?;
        sym = sym + d.commutator(&i).symbol;
    }
    Ok(FormOperator::new(
        sym,
        x.parity().unwrap_or(Parity::Even).flip(),
    ))
}

pub fn lie_derivative(alg: &Algebroid, x: &Poly, w: &Poly) -> Result<Poly> {
    Ok(lie_derivative_operator(alg, x)?.apply(&check_form(alg, w)?))
}

/// Δ_𝒫 = L_𝒫.
pub fn koszul_brylinski(alg: &Algebroid, p: &Poly) -> Result<FormOperator> {
    let p = check_multivector(alg, p)?;
    if !p.is_zero() && p.parity() != Some(Parity::Even) {
        return Err(Error::InvalidData(
            "a higher Poisson structure must be even".into(),
        ));
    }
    lie_derivative_operator(alg, &p)
}

/// [⋯[[Δ, α₁], α₂]⋯, α_r] applied to 1.
pub fn generated_brackets(op: &FormOperator, args: &[Poly]) -> Poly {
    let mut acc = op.clone();
    for a in args {
        if acc.is_zero() {
            break;
        }
        acc = acc.commutator(&FormOperator::multiplication(a));
    }
    acc.apply(&Poly::one(op.symbol().chart()))
}

/// Higher Koszul–Schouten brackets of 𝒫.
pub fn koszul_schouten_brackets(alg: &Algebroid, p: &Poly, args: &[Poly]) -> Result<Poly> {
    let op = koszul_brylinski(alg, p)?;
    let args = args
        .iter()
        .map(|a| check_form(alg, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(generated_brackets(&op, &args))
}

/// η-degree components of a multivector.
fn fiber_degree_parts(alg: &Algebroid, x: &Poly) -> BTreeMap<u32, Poly> {
    let fiber = &alg.charts().multivectors.fiber;
    let mut out = BTreeMap::new();
    for k in 0..=x.max_degree_in(fiber) {
        let c = x.degree_component(fiber, k);
        if !c.is_zero() {
            out.insert(k, c);
        }
    }
    out
}

/// Total symbol of L_X: for each η-degree-k component of X, the k-derivative
/// part of L_{X_k}.
pub fn total_symbol(alg: &Algebroid, x: &Poly) -> Result<Poly> {
    let x = check_multivector(alg, x)?;
    let mut out = Poly::zero(&forms_space(alg).chart);
    for (k, part) in fiber_degree_parts(alg, &x) {
        out = out + lie_derivative_operator(alg, &part)?.order_component(k);
    }
    Ok(out)
}

/// 𝒫[ℏ]: η_α ↦ ℏη_α on the algebroid extended by the even central parameter `hbar`.
pub fn deform(alg_hbar: &Algebroid, p: &Poly, hbar: &str) -> Result<Poly> {
    let mv = &alg_hbar.charts().multivectors;
    let p = p.embed(&mv.chart)?;
    let h = mv.chart.index_of(hbar)?;
    let mut out = Poly::zero(&mv.chart);
    for (m, c) in p.terms() {
        let k = m.degree_in(&mv.fiber);
        let mut exps = m.exponents().to_vec();
        exps[h] += k as u16;
        out = out + Poly::from_terms(&mv.chart, [(Monomial::from_exponents(exps), c.clone())])?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalLimit {
    /// ℏ^r coefficient of the deformed Koszul–Schouten bracket.
    pub limit: Poly,
    /// Higher Schouten bracket of the forms, from the lifted structure.
    pub schouten: Poly,
    /// ℏ^k coefficients for k < r that do not vanish.
    pub lower_powers: Vec<(u32, Poly)>,
}

impl ClassicalLimit {
    pub fn holds(&self) -> bool {
        self.lower_powers.is_empty() && self.limit == self.schouten
    }
}

pub const HBAR: &str = "hbar";

/// Compares lim ℏ^{−r}[α₁,…,α_r]_{𝒫[ℏ]} with (α₁,…,α_r)_𝒫.
pub fn classical_limit(alg: &Algebroid, p: &Poly, args: &[Poly]) -> Result<ClassicalLimit> {
    use crate::higher_structures::{forms_brackets, HigherStructure, Kind};
    let deformed_alg = alg.with_parameter(HBAR, Parity::Even)?;
    let ph = deform(&deformed_alg, p, HBAR)?;
    let args_h = args
        .iter()
        .map(|a| check_form(&deformed_alg, a))
        .collect::<Result<Vec<_>>>()?;
    let br = koszul_schouten_brackets(&deformed_alg, &ph, &args_h)?;
    let h = br.chart().index_of(HBAR)?;
    let r = args.len() as u32;
    let mut lower = Vec::new();
    for k in 0..r {
        let c = br.coefficient_in(h, k as u16)?;
        if !c.is_zero() {
            lower.push((k, c));
        }
    }
    let limit = br.coefficient_in(h, r as u16)?;
    let hs = HigherStructure::new(alg, Kind::Poisson, p.clone())?;
    let schouten = forms_brackets(alg, &hs, args)?.embed(limit.chart())?;
    Ok(ClassicalLimit {
        limit,
        schouten,
        lower_powers: lower,
    })
}

/// All monomials in (x, ξ) of base degree ≤ `base_degree` and ξ-degree ≤ `xi_degree`
/// (odd variables at most linearly).
pub fn spanning_set(alg: &Algebroid, base_degree: u32, xi_degree: u32) -> Vec<Poly> {
    let space = forms_space(alg);
    let chart = &space.chart;
    let mut exps: Vec<Vec<u16>> = vec![vec![0; chart.len()]];
    for (vars, cap) in [(&space.base, base_degree), (&space.fiber, xi_degree)] {
        for &v in vars.iter() {
            let max_here = if chart.parity(v).is_odd() { 1 } else { cap };
            let mut next = Vec::new();
            for e in &exps {
                let used: u32 = vars.iter().map(|&b| e[b] as u32).sum();
                for k in 0..=max_here.min(cap.saturating_sub(used)) {
                    let mut e2 = e.clone();
                    e2[v] = k as u16;
                    next.push(e2);
                }
            }
            exps = next;
        }
    }
    exps.into_iter()
        .map(|e| Poly::monomial_poly(chart, Monomial::from_exponents(e)))
        .collect()
}

/// ξ-degree needed to separate operators of the given order: at least the number of
/// odd ξ, so every top form is included.
pub fn xi_degree_for(alg: &Algebroid, order: u32) -> u32 {
    (alg.data().fiber_dim() as u32).max(order)
}

/// Operator equality on the spanning set; returns the first nonzero difference.
pub fn compare_on(span: &[Poly], a: &FormOperator, b: &FormOperator) -> Option<Poly> {
    span.iter()
        .map(|w| a.apply(w) - b.apply(w))
        .find(|r| !r.is_zero())
}

/// Compares two operators on the spanning set of the given base degree, with the ξ-degree
/// chosen from their orders.
pub fn equal_on_span(
    alg: &Algebroid,
    a: &FormOperator,
    b: &FormOperator,
    base_degree: u32,
) -> Option<Poly> {
    let xi = xi_degree_for(alg, a.order().max(b.order()));
    compare_on(&spanning_set(alg, base_degree, xi), a, b)
}

fn identity_check(
    name: &str,
    alg: &Algebroid,
    a: &FormOperator,
    b: &FormOperator,
    base_degree: u32,
) -> Check {
    match equal_on_span(alg, a, b, base_degree) {
        None => Check::flag(name, true),
        Some(r) => Check::residual(name, &r),
    }
}

/// The six Cartan identities for homogeneous X, Y, checked on the spanning set.
pub fn verify_cartan_identities(
    alg: &Algebroid,
    x: &Poly,
    y: &Poly,
    base_degree: u32,
) -> Result<Report> {
    let x = check_multivector(alg, x)?;
    let y = check_multivector(alg, y)?;
    let zero = FormOperator::zero(&forms_space(alg).chart);
    let d = de_rham_operator(alg);
    let ix = interior_operator(alg, &x)?;
    let iy = interior_operator(alg, &y)?;
    let lx = lie_derivative_operator(alg, &x)?;
    let ly = lie_derivative_operator(alg, &y)?;
    let xy = alg.algebroid_bracket(Side::Schouten, &x, &y)?;
    let yx_prod = &y * &x;
    let py = y.parity().unwrap_or(Parity::Even);

    let mut rep = Report::default();
    rep.push(identity_check(
        "(a) d² = 0",
        alg,
        &d.compose(&d),
        &zero,
        base_degree,
    ));
    rep.push(identity_check(
        "(b) [d, L_X] = 0",
        alg,
        &d.commutator(&lx),
        &zero,
        base_degree,
    ));
    rep.push(identity_check(
        "(c) [i_X, i_Y] = 0",
        alg,
        &ix.commutator(&iy),
        &zero,
        base_degree,
    ));
    rep.push(identity_check(
        "(d) i_[[X,Y]] = [i_X, L_Y]",
        alg,
        &interior_operator(alg, &xy)?,
        &ix.commutator(&ly),
        base_degree,
    ));
    rep.push(identity_check(
        "(e) L_[[X,Y]] = [L_X, L_Y]",
        alg,
        &lie_derivative_operator(alg, &xy)?,
        &lx.commutator(&ly),
        base_degree,
    ));
    let rhs = ly
        .compose(&ix)
        .add(&iy.compose(&lx).scale_int(py.sign() as i64));
    rep.push(identity_check(
        "(f) L_YX = L_Y∘i_X + (−1)^Ỹ i_Y∘L_X",
        alg,
        &lie_derivative_operator(alg, &yx_prod)?,
        &rhs,
        base_degree,
    ));
    Ok(rep)
}

/// [α₁,…,α_{r−1}, α_r α_{r+1}] − [α₁,…,α_r]α_{r+1}
/// − (−1)^{(α̃₁+…+α̃_{r−1}+1)α̃_r} α_r[α₁,…,α_{r−1}, α_{r+1}] − [α₁,…,α_{r+1}].
pub fn recursive_relation_residual(
    op: &FormOperator,
    head: &[Poly],
    ar: &Poly,
    ar1: &Poly,
) -> Poly {
    let with = |tail: &[Poly]| {
        let mut v = head.to_vec();
        v.extend_from_slice(tail);
        generated_brackets(op, &v)
    };
    let sum: u32 = head
        .iter()
        .map(|a| a.parity().unwrap_or(Parity::Even).bit())
        .sum();
    let s = ar
        .parity()
        .unwrap_or(Parity::Even)
        .koszul(Parity::from_bit(sum + 1)) as i64;
    with(&[ar * ar1])
        - with(std::slice::from_ref(ar)) * ar1
        - (ar * with(std::slice::from_ref(ar1))).scale_int(s)
        - with(&[ar.clone(), ar1.clone()])
}

/// Δ_𝒫² against ½L_[[𝒫,𝒫]] and against 0 on the spanning set.
pub fn verify_koszul_brylinski(alg: &Algebroid, p: &Poly, base_degree: u32) -> Result<Report> {
    let delta = koszul_brylinski(alg, p)?;
    let sq = delta.compose(&delta);
    let pp = alg.algebroid_bracket(Side::Schouten, p, p)?;
    let half = lie_derivative_operator(alg, &pp.scale(&crate::graded_algebra::rat(1, 2)))?;
    let zero = FormOperator::zero(&forms_space(alg).chart);
    let mut rep = Report::default();
    rep.push(Check::residual("[[𝒫,𝒫]]_S = 0", &pp));
    rep.push(identity_check(
        "Δ² = ½L_[[𝒫,𝒫]]",
        alg,
        &sq,
        &half,
        base_degree,
    ));
    rep.push(identity_check("Δ² = 0", alg, &sq, &zero, base_degree));
    Ok(rep)
}
