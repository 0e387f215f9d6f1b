//! Independent oracles shared by integration tests: literal component displays of
//! the two algebroid brackets, generic symbolic data and random structure constants.
#![allow(dead_code)]

use tulczyjew_core::algebroid::{base_chart_for, Algebroid, AlgebroidData, FiberLabel, TotalSpace};
use tulczyjew_core::fixtures::{self, BracketEntry};
use tulczyjew_core::graded_algebra::{int, GradedVariable, Parity, Poly, Rational};
use tulczyjew_core::sampling::Sampler;

use Parity::{Even, Odd};

fn sign(bits: u32) -> i64 {
    if bits % 2 == 1 {
        -1
    } else {
        1
    }
}

fn lift(space: &TotalSpace, f: &Poly) -> Poly {
    f.embed(&space.chart).unwrap()
}

/// Schouten bracket written out term by term, with S_α^A = (−1)^α̃ Q_α^A and
/// S_{αβ}^γ = (−1)^{α̃+β̃} Q_{αβ}^γ.
pub fn schouten_display(a: &Algebroid, x: &Poly, y: &Poly) -> Poly {
    let d = a.data();
    let sp = &a.charts().multivectors;
    let n = d.fiber_dim();
    let mut out = Poly::zero(&sp.chart);
    for (px, xh) in x.homogeneous_parts() {
        let xt = px.bit();
        for al in 0..n {
            let at = d.fiber_parity(al).bit();
            for aa in 0..d.base_dim() {
                let q = d.anchor(al, aa);
                if q.is_zero() {
                    continue;
                }
                let bt = d.base_parity(aa).bit();
                let s = lift(sp, q).scale_int(sign(at));
                let t1 = (xh.derivative(sp.fiber[al]) * y.derivative(sp.base[aa]))
                    .scale_int(sign((xt + 1) * (bt + 1) + bt * at));
                let t2 = (xh.derivative(sp.base[aa]) * y.derivative(sp.fiber[al]))
                    .scale_int(sign(xt * at));
                out = out + s * (t1 - t2);
            }
            for be in 0..n {
                let btt = d.fiber_parity(be).bit();
                for ga in 0..n {
                    let q = d.structure(al, be, ga);
                    if q.is_zero() {
                        continue;
                    }
                    let s = lift(sp, q).scale_int(sign(at + btt));
                    let t =
                        s * sp.fib(ga) * xh.derivative(sp.fiber[be]) * y.derivative(sp.fiber[al]);
                    out = out - t.scale_int(sign(xt * at));
                }
            }
        }
    }
    out
}

/// Poisson bracket written out term by term with P_α^A = Q_α^A and P_{βα}^γ = −Q_{βα}^γ.
/// `literal` uses the printed sign (−1)^{F̃α̃+α̃} on the structure term; otherwise
/// (−1)^{F̃β̃+α̃}.
pub fn poisson_display(a: &Algebroid, f: &Poly, g: &Poly, literal: bool) -> Poly {
    let d = a.data();
    let sp = &a.charts().dual;
    let n = d.fiber_dim();
    let mut out = Poly::zero(&sp.chart);
    for (pf, fh) in f.homogeneous_parts() {
        let ft = pf.bit();
        for al in 0..n {
            let at = d.fiber_parity(al).bit();
            for aa in 0..d.base_dim() {
                let q = d.anchor(al, aa);
                if q.is_zero() {
                    continue;
                }
                let bt = d.base_parity(aa).bit();
                let t1 = (fh.derivative(sp.fiber[al]) * g.derivative(sp.base[aa]))
                    .scale_int(sign(ft * bt + bt * at));
                let t2 = (fh.derivative(sp.base[aa]) * g.derivative(sp.fiber[al]))
                    .scale_int(sign(ft * at));
                out = out + lift(sp, q) * (t1 - t2);
            }
            for be in 0..n {
                let btt = d.fiber_parity(be).bit();
                for ga in 0..n {
                    let q = d.structure(be, al, ga);
                    if q.is_zero() {
                        continue;
                    }
                    let s = if literal {
                        sign(ft * at + at)
                    } else {
                        sign(ft * btt + at)
                    };
                    let t = -lift(sp, q)
                        * sp.fib(ga)
                        * fh.derivative(sp.fiber[al])
                        * g.derivative(sp.fiber[be]);
                    out = out + t.scale_int(s);
                }
            }
        }
    }
    out
}

/// Algebroid over ℝ^{2|1} (x, y, th) with the given fiber parities, whose anchor and
/// structure functions are generic affine functions with symbolic coefficients.
/// The data need not satisfy the structure equations.
pub fn generic_algebroid(fiber: &[Parity]) -> Algebroid {
    let base = [("x", Even), ("y", Even), ("th", Odd)];
    let n = fiber.len();
    let mut params = Vec::new();
    let mut next = 0usize;
    let mut fresh = |params: &mut Vec<GradedVariable>, p: Parity| {
        next += 1;
        let name = format!("c{next}");
        params.push(GradedVariable::new(&name, p, 0));
        name
    };
    // entry of parity `p` as text
    let mut entry = |params: &mut Vec<GradedVariable>, p: Parity| -> String {
        match p {
            Even => {
                let (a, b, c, e) = (
                    fresh(params, Even),
                    fresh(params, Even),
                    fresh(params, Even),
                    fresh(params, Odd),
                );
                format!("{a} + {b}*x + {c}*y + {e}*th")
            }
            Odd => {
                let (a, b, e) = (fresh(params, Odd), fresh(params, Even), fresh(params, Even));
                format!("{a} + {b}*th + {e}*x*th")
            }
        }
    };
    let mut anchor_txt = Vec::new();
    for (al, &pa) in fiber.iter().enumerate() {
        for (b, &(_, pb)) in base.iter().enumerate() {
            anchor_txt.push((al, b, entry(&mut params, pa + pb)));
        }
    }
    let mut structure_txt = Vec::new();
    for al in 0..n {
        for be in al..n {
            for ga in 0..n {
                let same_even_diag = al == be && fiber[al] == Even;
                if same_even_diag {
                    continue;
                }
                structure_txt.push((
                    al,
                    be,
                    ga,
                    entry(&mut params, fiber[al] + fiber[be] + fiber[ga]),
                ));
            }
        }
    }
    let vars: Vec<_> = base
        .iter()
        .map(|&(n, p)| GradedVariable::new(n, p, 0))
        .collect();
    let chart = base_chart_for(&params, &vars).unwrap();
    let parse = |t: &str| tulczyjew_core::expr::parse(t, &chart).unwrap();
    let anchor = anchor_txt
        .iter()
        .map(|(a, b, t)| ((*a, *b), parse(t)))
        .collect();
    let structure = structure_txt
        .iter()
        .map(|(a, b, c, t)| ((*a, *b, *c), parse(t)))
        .collect();
    let labels = fiber
        .iter()
        .enumerate()
        .map(|(i, &p)| FiberLabel::new((i + 1).to_string(), p))
        .collect();
    Algebroid::new(AlgebroidData::new(params, vars, labels, anchor, structure).unwrap()).unwrap()
}

/// Generic function of the base and fiber coordinates of `space`: every monomial up to
/// fiber degree 2 and base degree 1 with a fresh symbolic coefficient, split by parity.
pub fn generic_function(a: &Algebroid, space: &TotalSpace, prefix: &str, parity: Parity) -> Poly {
    let _ = a;
    let chart = &space.chart;
    let mut monos: Vec<Poly> = vec![Poly::one(chart)];
    for &v in space.base.iter() {
        let more: Vec<Poly> = monos.iter().map(|m| m * &Poly::var_at(chart, v)).collect();
        monos.extend(
            more.into_iter()
                .filter(|m| m.terms().all(|(mm, _)| mm.degree_in(&space.base) <= 1)),
        );
    }
    let mut with_fiber = monos.clone();
    for &v in space.fiber.iter() {
        let more: Vec<Poly> = with_fiber
            .iter()
            .map(|m| m * &Poly::var_at(chart, v))
            .collect();
        with_fiber.extend(
            more.into_iter().filter(|m| {
                !m.is_zero() && m.terms().all(|(mm, _)| mm.degree_in(&space.fiber) <= 2)
            }),
        );
    }
    // symbolic coefficients live in the params already present; use index-based
    // rationals as stand-ins when none are available
    let params = chart.indices_with_role(tulczyjew_core::graded_algebra::Role::Central);
    let mut out = Poly::zero(chart);
    for (k, m) in with_fiber.iter().enumerate() {
        let Some(mp) = m.parity() else { continue };
        let coeff = if params.is_empty() {
            Poly::constant(chart, int((k as i64 % 7) + 1))
        } else {
            // an even parameter, so m's parity is kept
            let evens: Vec<usize> = params
                .iter()
                .copied()
                .filter(|&p| !chart.parity(p).is_odd())
                .collect();
            Poly::var_at(chart, evens[(k + prefix.len()) % evens.len()])
                + Poly::constant(chart, int(k as i64 + 1))
        };
        if mp == parity {
            out = out + coeff * m;
        }
    }
    out
}

/// Random graded-antisymmetric, parity-respecting bracket constants c_ab^c.
pub fn random_constants(
    s: &mut Sampler,
    parities: &[Parity],
    density: f64,
) -> Vec<BracketEntry> {
    use rand::Rng;
    let n = parities.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            if a == b && parities[a] == Even {
                continue;
            }
            let mut terms = Vec::new();
            for c in 0..n {
                if parities[a] + parities[b] != parities[c] {
                    continue;
                }
                if s.rng().gen_bool(density) {
                    terms.push((c, s.small_int(-2, 2)));
                }
            }
            out.push((a, b, terms));
        }
    }
    out
}

/// Valid Lie superalgebra: a known fixture's constants in a random parity-preserving basis.
pub fn random_valid_constants(
    s: &mut Sampler,
) -> (Vec<Parity>, Vec<BracketEntry>) {
    use rand::Rng;
    let which = s.rng().gen_range(0..5);
    let (par, consts): (Vec<Parity>, Vec<BracketEntry>) = match which {
        0 => (
            vec![Even, Even, Even],
            vec![
                (0, 1, vec![(1, int(2))]),
                (0, 2, vec![(2, int(-2))]),
                (1, 2, vec![(0, int(1))]),
            ],
        ),
        1 => (vec![Even, Even, Even], vec![(0, 1, vec![(2, int(1))])]),
        2 => (vec![Even, Odd], vec![(1, 1, vec![(0, int(1))])]),
        3 => (
            vec![Even, Odd, Odd],
            vec![(0, 1, vec![(1, int(1))]), (0, 2, vec![(2, int(-1))])],
        ),
        _ => (
            vec![Even, Even, Odd],
            vec![
                (0, 1, vec![(1, int(1))]),
                (0, 2, vec![(2, tulczyjew_core::graded_algebra::rat(1, 2))]),
                (2, 2, vec![(1, int(1))]),
            ],
        ),
    };
    let n = par.len();
    // full bracket table c[a][b][c]
    let mut c = vec![vec![vec![int(0); n]; n]; n];
    for (a, b, terms) in &consts {
        let sw = if par[*a].is_odd() && par[*b].is_odd() {
            1
        } else {
            -1
        };
        for (k, v) in terms {
            c[*a][*b][*k] = v.clone();
            c[*b][*a][*k] = v * int(sw);
        }
    }
    // block-diagonal g, retried until invertible
    let (g, ginv) = loop {
        let mut g = vec![vec![int(0); n]; n];
        for i in 0..n {
            for j in 0..n {
                if par[i] == par[j] {
                    g[i][j] = s.small_int(-2, 2);
                }
            }
        }
        if let Some(inv) = invert(&g) {
            break (g, inv);
        }
    };
    // s'_a = Σ g[a][i] s_i ; [s'_a, s'_b] = Σ g[a][i] g[b][j] c[i][j][k] s_k = Σ ... ginv[k][m] s'_m
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            if a == b && par[a] == Even {
                continue;
            }
            let mut terms = Vec::new();
            for m in 0..n {
                let mut v = int(0);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            v += &g[a][i] * &g[b][j] * &c[i][j][k] * &ginv[k][m];
                        }
                    }
                }
                if v != int(0) {
                    terms.push((m, v));
                }
            }
            out.push((a, b, terms));
        }
    }
    (par, out)
}

fn invert(g: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = g.len();
    let mut m: Vec<Vec<Rational>> = g
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { int(1) } else { int(0) }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != int(0))?;
        m.swap(col, piv);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && m[r][col] != int(0) {
                let f = m[r][col].clone();
                for k in 0..2 * n {
                    let sub = &f * &m[col][k];
                    m[r][k] -= sub;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn lie_from(par: &[Parity], consts: &[BracketEntry]) -> Algebroid {
    let names: Vec<String> = (1..=par.len()).map(|i| i.to_string()).collect();
    let labels: Vec<(&str, Parity)> = names
        .iter()
        .map(String::as_str)
        .zip(par.iter().copied())
        .collect();
    fixtures::lie_algebra(&labels, consts).unwrap()
}
