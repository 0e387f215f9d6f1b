//! The two graded Tulczyjew triples: R, the anchors φ and their composites ψ = φ∘R⁻¹.

use crate::algebroid::{Algebroid, Side, TotalSpace};
use crate::bracket_engine::canonical_bracket;
use crate::error::{Error, Result};
use crate::graded_algebra::{Morphism, Poly};
use crate::report::{Check, Report};

fn name_of(space: &TotalSpace, idx: usize) -> String {
    space.chart.var(idx).name().to_string()
}

/// R: T*(ΠE*) → T*(ΠE) (Schouten side) or ΠT*(E*) → ΠT*(ΠE) (Poisson side).
pub fn canonical_r(alg: &Algebroid, side: Side) -> Result<Morphism> {
    let c = alg.charts();
    let d = alg.data();
    let mut asg = Vec::new();
    match side {
        Side::Schouten => {
            let (src, tgt) = (&c.multivectors, &c.forms);
            for a in 0..d.fiber_dim() {
                let s = d.fiber_parity(a).sign() as i64;
                asg.push((name_of(tgt, tgt.fiber[a]), src.fconj(a).scale_int(s)));
                asg.push((name_of(tgt, tgt.fiber_conj[a]), src.fib(a)));
            }
            Morphism::new("R_S", &src.chart, &tgt.chart, asg)
        }
        Side::Poisson => {
            let (src, tgt) = (&c.dual, &c.odd_forms);
            for a in 0..d.fiber_dim() {
                asg.push((name_of(tgt, tgt.fiber[a]), src.fconj(a)));
                asg.push((name_of(tgt, tgt.fiber_conj[a]), -src.fib(a)));
            }
            Morphism::new("R_P", &src.chart, &tgt.chart, asg)
        }
    }
}

/// The anchor φ into the middle space ΠT(ΠE*)[−1] or ΠT(E*)[−1].
pub fn anchor(alg: &Algebroid, side: Side) -> Result<Morphism> {
    let c = alg.charts();
    let d = alg.data();
    let mut asg = Vec::new();
    match side {
        Side::Schouten => {
            let (src, tgt) = (&c.multivectors, &c.schouten_middle);
            let s = &alg.encodings().s;
            for a in 0..d.base_dim() {
                asg.push((
                    name_of(tgt, tgt.base_conj[a]),
                    s.derivative(src.base_conj[a]),
                ));
            }
            for a in 0..d.fiber_dim() {
                asg.push((
                    name_of(tgt, tgt.fiber_conj[a]),
                    s.derivative(src.fiber_conj[a]),
                ));
            }
            Morphism::new("φ_S", &src.chart, &tgt.chart, asg)
        }
        Side::Poisson => {
            let (src, tgt) = (&c.dual, &c.poisson_middle);
            let p = &alg.encodings().p;
            for a in 0..d.base_dim() {
                let s = d.base_parity(a).flip().sign() as i64;
                asg.push((
                    name_of(tgt, tgt.base_conj[a]),
                    p.derivative(src.base_conj[a]).scale_int(s),
                ));
            }
            for a in 0..d.fiber_dim() {
                let s = d.fiber_parity(a).flip().sign() as i64;
                asg.push((
                    name_of(tgt, tgt.fiber_conj[a]),
                    p.derivative(src.fiber_conj[a]).scale_int(s),
                ));
            }
            Morphism::new("φ_P", &src.chart, &tgt.chart, asg)
        }
    }
}

/// ψ = φ∘R⁻¹, so ψ* = (R⁻¹)*∘φ*.
pub fn tulczyjew_morphism(alg: &Algebroid, side: Side) -> Result<Morphism> {
    let r = canonical_r(alg, side)?;
    let r_inv = r
        .inverse()
        .ok_or_else(|| Error::Convention(format!("{} is not invertible", r.name())))?;
    let phi = anchor(alg, side)?;
    let mut psi = r_inv.then(&phi)?;
    psi = Morphism::new(
        match side {
            Side::Schouten => "ψ_S",
            Side::Poisson => "ψ_P",
        },
        psi.source(),
        psi.target(),
        psi.target()
            .vars()
            .iter()
            .zip(psi.images())
            .map(|(v, img)| (v.name().to_string(), img.clone()))
            .collect(),
    )?;
    Ok(psi)
}

/// Bracket on the middle space induced by an invertible morphism m into it:
/// {u, v} = (m⁻¹)*{m*u, m*v}.
pub fn induced_bracket(m: &Morphism, u: &Poly, v: &Poly) -> Result<Option<Poly>> {
    let Some(inv) = m.inverse() else {
        return Ok(None);
    };
    let b = canonical_bracket(&m.pullback(u)?, &m.pullback(v)?)?;
    Ok(Some(inv.pullback(&b)?))
}

fn bidegree_violations(m: &Morphism) -> Vec<String> {
    let tgt = m.target();
    let src = m.source();
    m.images()
        .iter()
        .enumerate()
        .filter(|(j, img)| {
            img.terms()
                .any(|(mono, _)| mono.bidegree(src) != tgt.bidegree(*j))
        })
        .map(|(j, _)| tgt.var(j).name().to_string())
        .collect()
}

/// Commutativity, bracket preservation by R, R*H_Q = S (or R*X_Q = P),
/// parity/weight preservation and bilinearity (bidegree preservation).
pub fn verify_triple(alg: &Algebroid, side: Side) -> Result<Report> {
    let r = canonical_r(alg, side)?;
    let phi = anchor(alg, side)?;
    let psi = tulczyjew_morphism(alg, side)?;
    let mut rep = Report::default();
    rep.note(
        "double vector bundle morphisms are checked operationally: parity and weight \
         preservation on generators plus bidegree homogeneity of every image",
    );

    // (i) ψ∘R = φ
    let comp = r.then(&psi)?;
    let diffs: Vec<Poly> = comp
        .images()
        .iter()
        .zip(phi.images())
        .map(|(a, b)| a - b)
        .collect();
    rep.push(Check::residuals("diagram commutes (ψ∘R = φ)", &diffs));

    // (ii) R preserves the canonical bracket on generators
    let tgt = r.target().clone();
    let mut brs = Vec::new();
    for i in 0..tgt.len() {
        for j in 0..tgt.len() {
            let u = Poly::var_at(&tgt, i);
            let v = Poly::var_at(&tgt, j);
            let lhs = r.pullback(&canonical_bracket(&u, &v)?)?;
            let rhs = canonical_bracket(&r.pullback(&u)?, &r.pullback(&v)?)?;
            brs.push(lhs - rhs);
        }
    }
    rep.push(Check::residuals("R preserves the canonical bracket", &brs));

    // (iii) R*H_Q = S or R*X_Q = P
    let enc = alg.encodings();
    match side {
        Side::Schouten => rep.push(Check::equal("R*H_Q = S", &r.pullback(&enc.h_q)?, &enc.s)),
        Side::Poisson => rep.push(Check::equal("R*X_Q = P", &r.pullback(&enc.x_q)?, &enc.p)),
    }

    // (iv), (v)
    for m in [&r, &phi, &psi] {
        let w = m.weight_violations();
        rep.push(
            Check::flag(format!("{} preserves weight", m.name()), w.is_empty())
                .with_detail(w.join(", ")),
        );
        let b = bidegree_violations(m);
        rep.push(
            Check::flag(format!("{} preserves bidegree", m.name()), b.is_empty())
                .with_detail(b.join(", ")),
        );
    }

    // middle-space brackets when the anchor is invertible
    if phi.inverse().is_some() && psi.inverse().is_some() {
        let mid = phi.target().clone();
        let mut diffs = Vec::new();
        for i in 0..mid.len() {
            for j in 0..mid.len() {
                let u = Poly::var_at(&mid, i);
                let v = Poly::var_at(&mid, j);
                let a = induced_bracket(&phi, &u, &v)?.expect("invertible");
                let b = induced_bracket(&psi, &u, &v)?.expect("invertible");
                diffs.push(a - b);
            }
        }
        rep.push(Check::residuals(
            "φ and ψ induce the same middle bracket",
            &diffs,
        ));
    } else {
        rep.note("anchor not invertible: no bracket on the middle space");
    }
    Ok(rep)
}
