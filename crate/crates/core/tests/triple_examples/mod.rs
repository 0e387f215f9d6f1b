//! Coordinate displays of the triple morphisms for the tangent algebroid and for
//! Lie superalgebras over a point, compared with the engine's pullbacks.
#![allow(dead_code)]

use tulczyjew_core::algebroid::{Algebroid, Side};
use tulczyjew_core::graded_algebra::{rat, Morphism, Poly};
use tulczyjew_core::tulczyjew::{anchor, canonical_r, tulczyjew_morphism};

/// Collected mismatches; empty means every display was reproduced.
#[derive(Debug, Default)]
pub struct Diff(pub Vec<String>);

impl Diff {
    fn eq(&mut self, what: impl AsRef<str>, got: &Poly, want: &Poly) {
        if got != want {
            self.0
                .push(format!("{}: got {got}, want {want}", what.as_ref()));
        }
    }

    pub fn extend(&mut self, other: Diff) {
        self.0.extend(other.0);
    }
}

fn img(m: &Morphism, name: &str) -> Poly {
    m.image_of(name).unwrap().clone()
}

fn sgn(odd: bool) -> i64 {
    if odd {
        -1
    } else {
        1
    }
}

fn names(a: &Algebroid) -> Vec<(String, bool)> {
    a.data()
        .base()
        .iter()
        .map(|v| (v.name().to_string(), v.parity().is_odd()))
        .collect()
}

/// φ_S, R_S, ψ_S, S and H_Q for a tangent algebroid.
pub fn tangent_schouten(a: &Algebroid) -> Diff {
    let mut d = Diff::default();
    let c = a.charts();
    let (mv, fs) = (&c.multivectors, &c.forms);
    let phi = anchor(a, Side::Schouten).unwrap();
    let r = canonical_r(a, Side::Schouten).unwrap();
    let psi = tulczyjew_morphism(a, Side::Schouten).unwrap();
    let (mut s, mut h) = (Poly::zero(&mv.chart), Poly::zero(&fs.chart));
    for (n, odd) in names(a) {
        let sg = sgn(odd);
        let p = |sp: &tulczyjew_core::algebroid::TotalSpace, t: &str| {
            sp.parse(&format!("{t}_{n}")).unwrap()
        };
        d.eq(
            format!("φ_S*(nu_{n})"),
            &img(&phi, &format!("nu_{n}")),
            &p(mv, "pi").scale_int(sg),
        );
        d.eq(
            format!("φ_S*(theta_{n})"),
            &img(&phi, &format!("theta_{n}")),
            &p(mv, "p").scale_int(sg),
        );
        d.eq(
            format!("R_S*(pi_{n})"),
            &img(&r, &format!("pi_{n}")),
            &p(mv, "eta"),
        );
        d.eq(
            format!("R_S*(xi_{n})"),
            &img(&r, &format!("xi_{n}")),
            &p(mv, "pi").scale_int(sg),
        );
        d.eq(
            format!("ψ_S*(eta_{n})"),
            &img(&psi, &format!("eta_{n}")),
            &p(fs, "pi"),
        );
        d.eq(
            format!("ψ_S*(nu_{n})"),
            &img(&psi, &format!("nu_{n}")),
            &p(fs, "xi"),
        );
        d.eq(
            format!("ψ_S*(theta_{n})"),
            &img(&psi, &format!("theta_{n}")),
            &p(fs, "p").scale_int(sg),
        );
        s = s + (p(mv, "pi") * p(mv, "p")).scale_int(sg);
        h = h + p(fs, "xi") * p(fs, "p");
    }
    let enc = a.encodings();
    d.eq("S", &enc.s, &s);
    d.eq("H_Q", &enc.h_q, &h);
    d.eq("R*H_Q = S", &r.pullback(&enc.h_q).unwrap(), &enc.s);
    d
}

/// φ_P, R_P, ψ_P, P and X_Q for a tangent algebroid.
pub fn tangent_poisson(a: &Algebroid) -> Diff {
    let mut d = Diff::default();
    let c = a.charts();
    let (du, of) = (&c.dual, &c.odd_forms);
    let phi = anchor(a, Side::Poisson).unwrap();
    let r = canonical_r(a, Side::Poisson).unwrap();
    let psi = tulczyjew_morphism(a, Side::Poisson).unwrap();
    let (mut p_enc, mut x_q) = (Poly::zero(&du.chart), Poly::zero(&of.chart));
    for (n, odd) in names(a) {
        let s1 = sgn(!odd);
        let p = |sp: &tulczyjew_core::algebroid::TotalSpace, t: &str| {
            sp.parse(&format!("{t}_{n}")).unwrap()
        };
        d.eq(
            format!("φ_P*(xi_{n})"),
            &img(&phi, &format!("xi_{n}")),
            &p(du, "es"),
        );
        d.eq(
            format!("φ_P*(theta_{n})"),
            &img(&phi, &format!("theta_{n}")),
            &p(du, "xs").scale_int(s1),
        );
        d.eq(
            format!("R_P*(eta_{n})"),
            &img(&r, &format!("eta_{n}")),
            &p(du, "es"),
        );
        d.eq(
            format!("R_P*(etas_{n})"),
            &img(&r, &format!("etas_{n}")),
            &-p(du, "e"),
        );
        d.eq(
            format!("ψ_P*(e_{n})"),
            &img(&psi, &format!("e_{n}")),
            &-p(of, "etas"),
        );
        d.eq(
            format!("ψ_P*(xi_{n})"),
            &img(&psi, &format!("xi_{n}")),
            &p(of, "eta"),
        );
        d.eq(
            format!("ψ_P*(theta_{n})"),
            &img(&psi, &format!("theta_{n}")),
            &p(of, "xs").scale_int(s1),
        );
        p_enc = p_enc + p(du, "es") * p(du, "xs");
        x_q = x_q + p(of, "eta") * p(of, "xs");
    }
    let enc = a.encodings();
    d.eq("P", &enc.p, &p_enc);
    d.eq("X_Q", &enc.x_q, &x_q);
    d.eq("R*X_Q = P", &r.pullback(&enc.x_q).unwrap(), &enc.p);
    d
}

/// Structure-constant displays of φ_S*, ψ_S*, φ_P*, ψ_P* over a point.
pub fn lie_algebra_pullbacks(a: &Algebroid) -> Diff {
    let mut diff = Diff::default();
    let d = a.data();
    let c = a.charts();
    let n = d.fiber_dim();
    let par = |i: usize| d.fiber_parity(i).is_odd();
    let phi_s = anchor(a, Side::Schouten).unwrap();
    let psi_s = tulczyjew_morphism(a, Side::Schouten).unwrap();
    let phi_p = anchor(a, Side::Poisson).unwrap();
    let psi_p = tulczyjew_morphism(a, Side::Poisson).unwrap();
    let (mv, fs, du, of) = (&c.multivectors, &c.forms, &c.dual, &c.odd_forms);
    for al in 0..n {
        let mut phs = Poly::zero(&mv.chart);
        let mut pss = Poly::zero(&fs.chart);
        let mut php = Poly::zero(&du.chart);
        let mut psp = Poly::zero(&of.chart);
        for be in 0..n {
            for ga in 0..n {
                let q = d.structure(be, al, ga);
                if q.is_zero() {
                    continue;
                }
                let qm = q.embed(&mv.chart).unwrap();
                phs = phs + (mv.fconj(be) * qm * mv.fib(ga)).scale_int(sgn(par(al) ^ par(be)));
                let qf = q.embed(&fs.chart).unwrap();
                pss = pss + (fs.fib(be) * qf * fs.fconj(ga)).scale_int(sgn(par(al)));
                let qd = q.embed(&du.chart).unwrap();
                php = php + (du.fconj(be) * qd * du.fib(ga)).scale_int(sgn(par(al)));
                let qo = q.embed(&of.chart).unwrap();
                psp = psp + (of.fib(be) * qo * of.fconj(ga)).scale_int(sgn(!par(al)));
            }
        }
        let l = &d.fiber()[al].name;
        diff.eq(
            format!("φ_S*(theta_{l})"),
            &img(&phi_s, &format!("theta_{l}")),
            &phs,
        );
        diff.eq(
            format!("ψ_S*(eta_{l})"),
            &img(&psi_s, &format!("eta_{l}")),
            &fs.fconj(al),
        );
        diff.eq(
            format!("ψ_S*(theta_{l})"),
            &img(&psi_s, &format!("theta_{l}")),
            &pss,
        );
        diff.eq(
            format!("φ_P*(theta_{l})"),
            &img(&phi_p, &format!("theta_{l}")),
            &php,
        );
        diff.eq(
            format!("ψ_P*(e_{l})"),
            &img(&psi_p, &format!("e_{l}")),
            &-of.fconj(al),
        );
        diff.eq(
            format!("ψ_P*(theta_{l})"),
            &img(&psi_p, &format!("theta_{l}")),
            &psp,
        );
    }
    diff
}

/// S and P over a point from the structure constants, plus R*H_Q = S and R*X_Q = P.
pub fn lie_algebra_encodings(a: &Algebroid) -> Diff {
    let mut diff = Diff::default();
    let d = a.data();
    let c = a.charts();
    let n = d.fiber_dim();
    let (mv, du) = (&c.multivectors, &c.dual);
    let mut s = Poly::zero(&mv.chart);
    let mut p = Poly::zero(&du.chart);
    for al in 0..n {
        for be in 0..n {
            for ga in 0..n {
                let q = d.structure(be, al, ga);
                let odd = d.fiber_parity(al).is_odd() ^ d.fiber_parity(be).is_odd();
                s = s
                    + (mv.fconj(al) * mv.fconj(be) * q.embed(&mv.chart).unwrap() * mv.fib(ga))
                        .scale_int(sgn(odd));
                p = p - du.fconj(al) * du.fconj(be) * q.embed(&du.chart).unwrap() * du.fib(ga);
            }
        }
    }
    let half = rat(1, 2);
    let enc = a.encodings();
    diff.eq("S", &enc.s, &s.scale(&half));
    diff.eq("P", &enc.p, &p.scale(&half));
    let rs = canonical_r(a, Side::Schouten).unwrap();
    let rp = canonical_r(a, Side::Poisson).unwrap();
    diff.eq("R*H_Q = S", &rs.pullback(&enc.h_q).unwrap(), &enc.s);
    diff.eq("R*X_Q = P", &rp.pullback(&enc.x_q).unwrap(), &enc.p);
    diff
}
