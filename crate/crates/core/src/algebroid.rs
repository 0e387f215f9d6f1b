//! Lie algebroid data, the six canonical total-space charts, the four
//! equivalent encodings and the structure equations.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bracket_engine::{canonical_bracket, master_residual, BracketReport};
use crate::error::{Error, Result};
use crate::graded_algebra::{rat, Chart, ChartBuilder, GradedVariable, Parity, Poly};

/// Which of the two triples (odd-bracket side or even-bracket side) an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Schouten structure S on T*(ΠE*); multivectors in (x, η).
    Schouten,
    /// Poisson structure P on ΠT*(E*); symmetric tensors in (x, e).
    Poisson,
}

/// A basis label of the fiber with its parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberLabel {
    pub name: String,
    pub parity: Parity,
}

impl FiberLabel {
    pub fn new(name: impl Into<String>, parity: Parity) -> Self {
        FiberLabel {
            name: name.into(),
            parity,
        }
    }
}

/// What happened to the structure functions on ingestion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestionReport {
    /// Entries Q_{αβ}^γ filled in from their graded-symmetric partner.
    pub completed: Vec<(String, String, String)>,
    /// Entries given inconsistently with their partner and replaced by the graded average.
    pub symmetrized: Vec<(String, String, String)>,
}

impl IngestionReport {
    pub fn already_symmetric(&self) -> bool {
        self.symmetrized.is_empty()
    }
}

/// Anchor components Q_α^A(x) and structure functions Q_{αβ}^γ(x), all
/// polynomials on the base chart (parameters first, then base coordinates).
#[derive(Debug, Clone)]
pub struct AlgebroidData {
    base_chart: Arc<Chart>,
    params: Vec<GradedVariable>,
    base: Vec<GradedVariable>,
    fiber: Vec<FiberLabel>,
    anchor: Vec<Vec<Poly>>,
    structure: Vec<Vec<Vec<Poly>>>,
    ingestion: IngestionReport,
}

/// Chart for coefficient functions: central parameters then base coordinates.
pub fn base_chart_for(params: &[GradedVariable], base: &[GradedVariable]) -> Result<Arc<Chart>> {
    let mut b = ChartBuilder::new("M");
    for p in params {
        b = b.central(GradedVariable::new(p.name(), p.parity(), 0));
    }
    for v in base {
        b = b.coordinate(GradedVariable::new(v.name(), v.parity(), 0));
    }
    b.build()
}

fn graded_swap_sign(a: Parity, b: Parity) -> i64 {
    // Q_{αβ} = (−1)^{(α̃+1)(β̃+1)} Q_{βα}
    a.flip().koszul(b.flip()) as i64
}

impl AlgebroidData {
    /// Builds validated data. Missing anchor/structure entries are zero; a
    /// structure entry given for only one ordering is completed by graded
    /// symmetry, and inconsistent pairs are replaced by their graded average.
    pub fn new(
        params: Vec<GradedVariable>,
        base: Vec<GradedVariable>,
        fiber: Vec<FiberLabel>,
        anchor: Vec<((usize, usize), Poly)>,
        structure: Vec<((usize, usize, usize), Poly)>,
    ) -> Result<Self> {
        let chart = base_chart_for(&params, &base)?;
        let mut seen = std::collections::HashSet::new();
        for f in &fiber {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::InvalidData(format!(
                    "fiber label `{}` declared twice",
                    f.name
                )));
            }
        }
        let n = fiber.len();
        let d = base.len();
        let zero = Poly::zero(&chart);
        let mut anc = vec![vec![zero.clone(); d]; n];
        for ((a, b), p) in anchor {
            if a >= n || b >= d {
                return Err(Error::InvalidData(format!(
                    "anchor index ({a}, {b}) out of range"
                )));
            }
            let p = p.embed(&chart)?;
            let want = fiber[a].parity + base[b].parity();
            if !p.is_zero() && p.parity() != Some(want) {
                return Err(Error::InvalidData(format!(
                    "anchor component ({}, {}) must be {want}",
                    fiber[a].name,
                    base[b].name()
                )));
            }
            anc[a][b] = p;
        }
        let mut given: BTreeMap<(usize, usize, usize), Poly> = BTreeMap::new();
        for ((a, b, c), p) in structure {
            if a >= n || b >= n || c >= n {
                return Err(Error::InvalidData(format!(
                    "structure index ({a}, {b}, {c}) out of range"
                )));
            }
            let p = p.embed(&chart)?;
            let want = fiber[a].parity + fiber[b].parity + fiber[c].parity;
            if !p.is_zero() && p.parity() != Some(want) {
                return Err(Error::InvalidData(format!(
                    "structure function ({}, {}, {}) must be {want}",
                    fiber[a].name, fiber[b].name, fiber[c].name
                )));
            }
            let entry = given.entry((a, b, c)).or_insert_with(|| zero.clone());
            *entry = &*entry + &p;
        }
        let mut report = IngestionReport::default();
        let mut st = vec![vec![vec![zero.clone(); n]; n]; n];
        let label = |a: usize, b: usize, c: usize| {
            (
                fiber[a].name.clone(),
                fiber[b].name.clone(),
                fiber[c].name.clone(),
            )
        };
        for a in 0..n {
            for b in a..n {
                let s = graded_swap_sign(fiber[a].parity, fiber[b].parity);
                for c in 0..n {
                    let ab = given.get(&(a, b, c));
                    let ba = given.get(&(b, a, c));
                    let value = match (ab, ba) {
                        (None, None) => continue,
                        (Some(x), None) if a == b => {
                            if s == -1 && !x.is_zero() {
                                report.symmetrized.push(label(a, b, c));
                                zero.clone()
                            } else {
                                x.clone()
                            }
                        }
                        (Some(x), None) => {
                            if !x.is_zero() {
                                report.completed.push(label(b, a, c));
                            }
                            x.clone()
                        }
                        (None, Some(y)) => {
                            if !y.is_zero() {
                                report.completed.push(label(a, b, c));
                            }
                            y.scale_int(s)
                        }
                        (Some(x), Some(y)) => {
                            let y = y.scale_int(s);
                            if *x == y {
                                x.clone()
                            } else {
                                report.symmetrized.push(label(a, b, c));
                                (x + &y).scale(&rat(1, 2))
                            }
                        }
                    };
                    st[b][a][c] = value.scale_int(s);
                    st[a][b][c] = value;
                }
            }
        }
        Ok(AlgebroidData {
            base_chart: chart,
            params,
            base,
            fiber,
            anchor: anc,
            structure: st,
            ingestion: report,
        })
    }

    pub fn base_chart(&self) -> &Arc<Chart> {
        &self.base_chart
    }

    pub fn params(&self) -> &[GradedVariable] {
        &self.params
    }

    pub fn base(&self) -> &[GradedVariable] {
        &self.base
    }

    pub fn fiber(&self) -> &[FiberLabel] {
        &self.fiber
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.len()
    }

    pub fn base_dim(&self) -> usize {
        self.base.len()
    }

    pub fn fiber_parity(&self, a: usize) -> Parity {
        self.fiber[a].parity
    }

    pub fn base_parity(&self, a: usize) -> Parity {
        self.base[a].parity()
    }

    /// Q_α^A.
    pub fn anchor(&self, alpha: usize, a: usize) -> &Poly {
        &self.anchor[alpha][a]
    }

    /// Q_{αβ}^γ after ingestion.
    pub fn structure(&self, alpha: usize, beta: usize, gamma: usize) -> &Poly {
        &self.structure[alpha][beta][gamma]
    }

    pub fn ingestion(&self) -> &IngestionReport {
        &self.ingestion
    }

    /// Base chart index of the A-th base coordinate.
    pub fn base_index(&self, a: usize) -> usize {
        self.params.len() + a
    }

    /// Same data over a coefficient ring extended by one central variable.
    pub fn with_parameter(&self, name: &str, parity: Parity) -> Result<AlgebroidData> {
        let mut params = self.params.clone();
        params.push(GradedVariable::new(name, parity, 0));
        let mut anchor = Vec::new();
        for (a, row) in self.anchor.iter().enumerate() {
            for (b, p) in row.iter().enumerate() {
                if !p.is_zero() {
                    anchor.push(((a, b), p.clone()));
                }
            }
        }
        let mut structure = Vec::new();
        for a in 0..self.fiber_dim() {
            for b in 0..self.fiber_dim() {
                for c in 0..self.fiber_dim() {
                    let p = &self.structure[a][b][c];
                    if !p.is_zero() {
                        structure.push(((a, b, c), p.clone()));
                    }
                }
            }
        }
        let params_chart = base_chart_for(&params, &self.base)?;
        let anchor = anchor
            .into_iter()
            .map(|(k, p)| Ok((k, p.embed(&params_chart)?)))
            .collect::<Result<Vec<_>>>()?;
        let structure = structure
            .into_iter()
            .map(|(k, p)| Ok((k, p.embed(&params_chart)?)))
            .collect::<Result<Vec<_>>>()?;
        AlgebroidData::new(
            params,
            self.base.clone(),
            self.fiber.clone(),
            anchor,
            structure,
        )
    }

    /// a(s_α) applied to a base function: Σ_A Q_α^A ∂_A f.
    pub fn anchor_apply(&self, alpha: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero(&self.base_chart);
        for a in 0..self.base_dim() {
            let q = &self.anchor[alpha][a];
            if q.is_zero() {
                continue;
            }
            let df = f.derivative(self.base_index(a));
            if !df.is_zero() {
                out = out + q * &df;
            }
        }
        out
    }

    fn section_parts(u: &[Poly], labels: &[FiberLabel]) -> Vec<(usize, Parity, Poly)> {
        let mut out = Vec::new();
        for (a, f) in u.iter().enumerate() {
            for (p, part) in f.homogeneous_parts() {
                out.push((a, p + labels[a].parity, part));
            }
        }
        out
    }

    /// Bracket of sections Σ f^α s_α, with [s_α, s_β] = (−1)^β̃ Q_{αβ}^γ s_γ.
    pub fn section_bracket(&self, u: &[Poly], v: &[Poly]) -> Vec<Poly> {
        let n = self.fiber_dim();
        let mut out = vec![Poly::zero(&self.base_chart); n];
        let up = Self::section_parts(u, &self.fiber);
        let vp = Self::section_parts(v, &self.fiber);
        for (a, _, f) in &up {
            let pa = self.fiber[*a].parity;
            let pf = f.parity().unwrap();
            for (b, _, g) in &vp {
                let pb = self.fiber[*b].parity;
                let pg = g.parity().unwrap();
                // f a_α(g) s_β
                let ag = self.anchor_apply(*a, g);
                if !ag.is_zero() {
                    out[*b] = &out[*b] + &(f * &ag);
                }
                // (−1)^{g̃α̃} f g [s_α, s_β]
                let fg = f * g;
                if !fg.is_zero() {
                    let s = pg.koszul(pa) * pb.sign();
                    for c in 0..n {
                        let q = &self.structure[*a][*b][c];
                        if !q.is_zero() {
                            out[c] = &out[c] + &(&fg * q).scale_int(s as i64);
                        }
                    }
                }
                // −(−1)^{(f̃+α̃)(g̃+β̃)} g a_β(f) s_α
                let bf = self.anchor_apply(*b, f);
                if !bf.is_zero() {
                    let s = -((pf + pa).koszul(pg + pb));
                    out[*a] = &out[*a] + &(g * &bf).scale_int(s as i64);
                }
            }
        }
        out
    }

    pub fn basis_section(&self, alpha: usize) -> Vec<Poly> {
        let mut s = vec![Poly::zero(&self.base_chart); self.fiber_dim()];
        s[alpha] = Poly::one(&self.base_chart);
        s
    }
}

/// One total-space chart with its four variable groups (plus parameters).
#[derive(Debug, Clone)]
pub struct TotalSpace {
    pub chart: Arc<Chart>,
    pub params: Vec<usize>,
    pub base: Vec<usize>,
    /// Fiber-linear coordinates indexed by α (η_α, ξ^α, e_α or η^α).
    pub fiber: Vec<usize>,
    /// Coordinates indexed by base index A (p_A, x*_A, ν^A or ξ^A).
    pub base_conj: Vec<usize>,
    /// Coordinates indexed by α on the other side bundle (π, e_*, η*, θ).
    pub fiber_conj: Vec<usize>,
}

impl TotalSpace {
    pub fn x(&self, a: usize) -> Poly {
        Poly::var_at(&self.chart, self.base[a])
    }

    pub fn fib(&self, alpha: usize) -> Poly {
        Poly::var_at(&self.chart, self.fiber[alpha])
    }

    pub fn bconj(&self, a: usize) -> Poly {
        Poly::var_at(&self.chart, self.base_conj[a])
    }

    pub fn fconj(&self, alpha: usize) -> Poly {
        Poly::var_at(&self.chart, self.fiber_conj[alpha])
    }

    /// Variables outside (parameters, base, fiber).
    pub fn momenta(&self) -> Vec<usize> {
        self.base_conj
            .iter()
            .chain(self.fiber_conj.iter())
            .copied()
            .collect()
    }

    /// Variables outside (parameters, base).
    pub fn off_base(&self) -> Vec<usize> {
        self.fiber
            .iter()
            .chain(self.base_conj.iter())
            .chain(self.fiber_conj.iter())
            .copied()
            .collect()
    }

    pub fn parse(&self, text: &str) -> Result<Poly> {
        crate::expr::parse(text, &self.chart)
    }
}

struct Group {
    prefix: &'static str,
    shift: Parity,
    weight: i32,
    bidegree: (u32, u32),
}

fn total_space(
    name: &str,
    data: &AlgebroidData,
    groups: [Group; 3],
    epsilon: Option<Parity>,
) -> Result<TotalSpace> {
    let mut b = ChartBuilder::new(name);
    for p in &data.params {
        b = b.central(GradedVariable::new(p.name(), p.parity(), 0));
    }
    for v in &data.base {
        b = b.coordinate(GradedVariable::new(v.name(), v.parity(), 0));
    }
    let [gf, gb, gc] = groups;
    let fiber_name = |g: &Group, f: &FiberLabel| format!("{}{}", g.prefix, f.name);
    let base_name = |g: &Group, v: &GradedVariable| format!("{}{}", g.prefix, v.name());
    for f in &data.fiber {
        let v = GradedVariable::new(fiber_name(&gf, f), f.parity + gf.shift, gf.weight);
        b = b.coordinate_with_bidegree(v, gf.bidegree);
    }
    for v in &data.base {
        let w = GradedVariable::new(base_name(&gb, v), v.parity() + gb.shift, gb.weight);
        b = if epsilon.is_some() {
            b.momentum(w, gb.bidegree)
        } else {
            b.coordinate_with_bidegree(w, gb.bidegree)
        };
    }
    for f in &data.fiber {
        let w = GradedVariable::new(fiber_name(&gc, f), f.parity + gc.shift, gc.weight);
        b = if epsilon.is_some() {
            b.momentum(w, gc.bidegree)
        } else {
            b.coordinate_with_bidegree(w, gc.bidegree)
        };
    }
    if let Some(eps) = epsilon {
        for v in &data.base {
            b = b.pair(v.name(), &base_name(&gb, v));
        }
        for f in &data.fiber {
            b = b.pair(&fiber_name(&gf, f), &fiber_name(&gc, f));
        }
        b = b.bracket(eps);
    }
    let chart = b.build()?;
    let np = data.params.len();
    let d = data.base.len();
    let n = data.fiber.len();
    Ok(TotalSpace {
        chart,
        params: (0..np).collect(),
        base: (np..np + d).collect(),
        fiber: (np + d..np + d + n).collect(),
        base_conj: (np + d + n..np + 2 * d + n).collect(),
        fiber_conj: (np + 2 * d + n..np + 2 * d + 2 * n).collect(),
    })
}

const E: Parity = Parity::Even;
const O: Parity = Parity::Odd;

/// The six total spaces of the two triples.
#[derive(Debug, Clone)]
pub struct ChartCatalog {
    /// T*(ΠE*): x, η_α, p_A, π^α; even bracket.
    pub multivectors: TotalSpace,
    /// T*(ΠE): x, ξ^α, p_A, π_α; even bracket.
    pub forms: TotalSpace,
    /// ΠT(ΠE*)[−1]: x, η_α, ν^A, θ_α; no bracket.
    pub schouten_middle: TotalSpace,
    /// ΠT*(E*): x, e_α, x*_A, e_*^α; odd bracket.
    pub dual: TotalSpace,
    /// ΠT*(ΠE): x, η^α, x*_A, η*_α; odd bracket.
    pub odd_forms: TotalSpace,
    /// ΠT(E*)[−1]: x, e_α, ξ^A, θ_α; no bracket.
    pub poisson_middle: TotalSpace,
}

impl ChartCatalog {
    pub fn build(data: &AlgebroidData) -> Result<Self> {
        let g = |prefix, shift, weight, bidegree| Group {
            prefix,
            shift,
            weight,
            bidegree,
        };
        Ok(ChartCatalog {
            multivectors: total_space(
                "T*(ΠE*)",
                data,
                [
                    g("eta_", O, 1, (1, 0)),
                    g("p_", E, 0, (1, 1)),
                    g("pi_", O, -1, (0, 1)),
                ],
                Some(E),
            )?,
            forms: total_space(
                "T*(ΠE)",
                data,
                [
                    g("xi_", O, -1, (0, 1)),
                    g("p_", E, 0, (1, 1)),
                    g("pi_", O, 1, (1, 0)),
                ],
                Some(E),
            )?,
            schouten_middle: total_space(
                "ΠT(ΠE*)[-1]",
                data,
                [
                    g("eta_", O, 1, (1, 0)),
                    g("nu_", O, -1, (0, 1)),
                    g("theta_", E, 0, (1, 1)),
                ],
                None,
            )?,
            dual: total_space(
                "ΠT*(E*)",
                data,
                [
                    g("e_", E, 1, (1, 0)),
                    g("xs_", O, 0, (1, 1)),
                    g("es_", O, -1, (0, 1)),
                ],
                Some(O),
            )?,
            odd_forms: total_space(
                "ΠT*(ΠE)",
                data,
                [
                    g("eta_", O, -1, (0, 1)),
                    g("xs_", O, 0, (1, 1)),
                    g("etas_", E, 1, (1, 0)),
                ],
                Some(O),
            )?,
            poisson_middle: total_space(
                "ΠT(E*)[-1]",
                data,
                [
                    g("e_", E, 1, (1, 0)),
                    g("xi_", O, -1, (0, 1)),
                    g("theta_", O, 0, (1, 1)),
                ],
                None,
            )?,
        })
    }

    pub fn all(&self) -> [&TotalSpace; 6] {
        [
            &self.multivectors,
            &self.forms,
            &self.schouten_middle,
            &self.dual,
            &self.odd_forms,
            &self.poisson_middle,
        ]
    }

    /// Space carrying the algebroid bracket for the side: T*(ΠE*) or ΠT*(E*).
    pub fn structure_space(&self, side: Side) -> &TotalSpace {
        match side {
            Side::Schouten => &self.multivectors,
            Side::Poisson => &self.dual,
        }
    }

    /// Space carrying the forms picture for the side: T*(ΠE) or ΠT*(ΠE).
    pub fn forms_space(&self, side: Side) -> &TotalSpace {
        match side {
            Side::Schouten => &self.forms,
            Side::Poisson => &self.odd_forms,
        }
    }

    pub fn middle_space(&self, side: Side) -> &TotalSpace {
        match side {
            Side::Schouten => &self.schouten_middle,
            Side::Poisson => &self.poisson_middle,
        }
    }
}

/// S, P, H_Q and X_Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureEncodings {
    /// Schouten structure on T*(ΠE*).
    pub s: Poly,
    /// Poisson structure on ΠT*(E*).
    pub p: Poly,
    /// Linear Hamiltonian of Q on T*(ΠE).
    pub h_q: Poly,
    /// One-vector of Q on ΠT*(ΠE).
    pub x_q: Poly,
}

/// Residuals of the two structure equations, keyed by index labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationReport {
    pub holds: bool,
    pub residuals: Vec<(String, Poly)>,
}

impl EquationReport {
    fn collect(items: Vec<(String, Poly)>) -> Self {
        let residuals: Vec<_> = items.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        EquationReport {
            holds: residuals.is_empty(),
            residuals,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureReport {
    /// Anchor is a morphism of brackets.
    pub anchor_equation: EquationReport,
    /// Graded Jacobi identity on basis sections.
    pub jacobi_equation: EquationReport,
    /// {S,S}, [[P,P]], {H_Q,H_Q}, [[X_Q,X_Q]] in that order.
    pub masters: Vec<(&'static str, BracketReport)>,
}

impl StructureReport {
    pub fn structure_equations_hold(&self) -> bool {
        self.anchor_equation.holds && self.jacobi_equation.holds
    }

    /// All five verdicts (structure equations jointly, then each master equation).
    pub fn verdicts(&self) -> Vec<bool> {
        let mut v = vec![self.structure_equations_hold()];
        v.extend(self.masters.iter().map(|(_, r)| r.holds));
        v
    }

    pub fn agree(&self) -> bool {
        let v = self.verdicts();
        v.iter().all(|&b| b == v[0])
    }

    pub fn holds(&self) -> bool {
        self.verdicts().iter().all(|&b| b)
    }
}

/// Algebroid data together with its charts and encodings.
#[derive(Debug, Clone)]
pub struct Algebroid {
    data: AlgebroidData,
    charts: ChartCatalog,
    enc: StructureEncodings,
}

impl Algebroid {
    pub fn new(data: AlgebroidData) -> Result<Self> {
        let charts = ChartCatalog::build(&data)?;
        let enc = encode(&data, &charts)?;
        Ok(Algebroid { data, charts, enc })
    }

    pub fn data(&self) -> &AlgebroidData {
        &self.data
    }

    pub fn charts(&self) -> &ChartCatalog {
        &self.charts
    }

    pub fn encodings(&self) -> &StructureEncodings {
        &self.enc
    }

    pub fn with_parameter(&self, name: &str, parity: Parity) -> Result<Algebroid> {
        Algebroid::new(self.data.with_parameter(name, parity)?)
    }

    /// Embeds a coefficient function into one of the total spaces.
    fn coeff(&self, f: &Poly, space: &TotalSpace) -> Poly {
        f.embed(&space.chart)
            .expect("base chart embeds into every total space")
    }

    pub fn verify_structure_equations(&self) -> Result<StructureReport> {
        let d = &self.data;
        let n = d.fiber_dim();
        let mut anchor_items = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for bb in 0..d.base_dim() {
                    let mut r = d.anchor_apply(a, d.anchor(b, bb))
                        - d.anchor_apply(b, d.anchor(a, bb))
                            .scale_int(d.fiber_parity(a).koszul(d.fiber_parity(b)) as i64);
                    let s = d.fiber_parity(b).sign() as i64;
                    for c in 0..n {
                        let q = d.structure(a, b, c);
                        if !q.is_zero() {
                            r = r - (q * d.anchor(c, bb)).scale_int(s);
                        }
                    }
                    anchor_items.push((
                        format!(
                            "({}, {}; {})",
                            d.fiber[a].name,
                            d.fiber[b].name,
                            d.base[bb].name()
                        ),
                        r,
                    ));
                }
            }
        }
        let mut jac_items = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (sa, sb, sc) = (d.basis_section(a), d.basis_section(b), d.basis_section(c));
                    let t1 = d.section_bracket(&sa, &d.section_bracket(&sb, &sc));
                    let t2 = d.section_bracket(&d.section_bracket(&sa, &sb), &sc);
                    let t3 = d.section_bracket(&sb, &d.section_bracket(&sa, &sc));
                    let s = d.fiber_parity(a).koszul(d.fiber_parity(b)) as i64;
                    for g in 0..n {
                        let r = &t1[g] - &t2[g] - t3[g].scale_int(s);
                        jac_items.push((
                            format!(
                                "({}, {}, {}; {})",
                                d.fiber[a].name, d.fiber[b].name, d.fiber[c].name, d.fiber[g].name
                            ),
                            r,
                        ));
                    }
                }
            }
        }
        let masters = vec![
            ("{S,S}", master_residual(&self.enc.s)?),
            ("[[P,P]]", master_residual(&self.enc.p)?),
            ("{H_Q,H_Q}", master_residual(&self.enc.h_q)?),
            ("[[X_Q,X_Q]]", master_residual(&self.enc.x_q)?),
        ];
        Ok(StructureReport {
            anchor_equation: EquationReport::collect(anchor_items),
            jacobi_equation: EquationReport::collect(jac_items),
            masters,
        })
    }

    /// The algebroid bracket on multivectors (Schouten side, functions of x, η on
    /// T*(ΠE*)) or on symmetric tensors (Poisson side, functions of x, e on ΠT*(E*)).
    /// Evaluated both from the component formula and as a nested canonical bracket;
    /// disagreement is a calibration fault.
    pub fn algebroid_bracket(&self, side: Side, f: &Poly, g: &Poly) -> Result<Poly> {
        let nested = self.algebroid_bracket_nested(side, f, g)?;
        let components = self.algebroid_bracket_components(side, f, g)?;
        if nested != components {
            return Err(Error::Calibration {
                identity: match side {
                    Side::Schouten => "Schouten bracket component formula".into(),
                    Side::Poisson => "Poisson bracket component formula".into(),
                },
                detail: format!("nested = {nested}, components = {components}"),
            });
        }
        Ok(nested)
    }

    fn check_structure_args(&self, side: Side, f: &Poly, g: &Poly) -> Result<()> {
        let space = self.charts.structure_space(side);
        for h in [f, g] {
            if **h.chart() != *space.chart {
                return Err(Error::ChartMismatch {
                    left: h.chart().name().to_string(),
                    right: space.chart.name().to_string(),
                });
            }
            if h.involves_any(&space.momenta()) {
                return Err(Error::Projector(format!(
                    "`{h}` is not a function on the base of {}",
                    space.chart.name()
                )));
            }
        }
        Ok(())
    }

    /// (−1)^{X̃+1}{{S,X},Y} or (−1)^{F̃+1}[[[[P,F]],G]].
    pub fn algebroid_bracket_nested(&self, side: Side, f: &Poly, g: &Poly) -> Result<Poly> {
        self.check_structure_args(side, f, g)?;
        let theta = match side {
            Side::Schouten => &self.enc.s,
            Side::Poisson => &self.enc.p,
        };
        let mut out = Poly::zero(f.chart());
        for (pf, fh) in f.homogeneous_parts() {
            let inner = canonical_bracket(theta, &fh)?;
            let outer = canonical_bracket(&inner, g)?;
            out = out + outer.scale_int(pf.flip().sign() as i64);
        }
        Ok(out)
    }

    /// The bracket written out in components.
    pub fn algebroid_bracket_components(&self, side: Side, f: &Poly, g: &Poly) -> Result<Poly> {
        self.check_structure_args(side, f, g)?;
        let d = &self.data;
        let space = self.charts.structure_space(side);
        let n = d.fiber_dim();
        let mut out = Poly::zero(&space.chart);
        for (pf, fh) in f.homogeneous_parts() {
            for alpha in 0..n {
                let pa = d.fiber_parity(alpha);
                let df_fib = fh.derivative(space.fiber[alpha]);
                let dg_fib = g.derivative(space.fiber[alpha]);
                for a in 0..d.base_dim() {
                    let q = d.anchor(alpha, a);
                    if q.is_zero() {
                        continue;
                    }
                    let pa_base = d.base_parity(a);
                    let dg_x = g.derivative(space.base[a]);
                    let df_x = fh.derivative(space.base[a]);
                    let (coef, s1, s2) = match side {
                        Side::Schouten => (
                            self.coeff(q, space).scale_int(pa.sign() as i64),
                            pf.flip().koszul(pa_base.flip()) * pa_base.koszul(pa),
                            pf.koszul(pa),
                        ),
                        Side::Poisson => (
                            self.coeff(q, space),
                            pf.koszul(pa_base) * pa_base.koszul(pa),
                            pf.koszul(pa),
                        ),
                    };
                    let term = (&df_fib * &dg_x).scale_int(s1 as i64)
                        - (&df_x * &dg_fib).scale_int(s2 as i64);
                    out = out + &coef * &term;
                }
                for beta in 0..n {
                    let pb = d.fiber_parity(beta);
                    for gamma in 0..n {
                        match side {
                            Side::Schouten => {
                                // −(−1)^{X̃α̃} S_{αβ}^γ η_γ ∂X/∂η_β ∂Y/∂η_α
                                let q = d.structure(alpha, beta, gamma);
                                if q.is_zero() {
                                    continue;
                                }
                                let s_comp =
                                    self.coeff(q, space).scale_int((pa + pb).sign() as i64);
                                let t = s_comp
                                    * space.fib(gamma)
                                    * fh.derivative(space.fiber[beta])
                                    * &dg_fib;
                                out = out - t.scale_int(pf.koszul(pa) as i64);
                            }
                            Side::Poisson => {
                                // (−1)^{F̃β̃+α̃} P_{βα}^γ e_γ ∂F/∂e_α ∂G/∂e_β
                                let q = d.structure(beta, alpha, gamma);
                                if q.is_zero() {
                                    continue;
                                }
                                let p_comp = -self.coeff(q, space);
                                let t = p_comp
                                    * space.fib(gamma)
                                    * &df_fib
                                    * g.derivative(space.fiber[beta]);
                                out = out + t.scale_int((pf.koszul(pb) * pa.sign()) as i64);
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

fn encode(d: &AlgebroidData, c: &ChartCatalog) -> Result<StructureEncodings> {
    let n = d.fiber_dim();
    let half = rat(1, 2);
    let mv = &c.multivectors;
    let fm = &c.forms;
    let du = &c.dual;
    let of = &c.odd_forms;
    let mut s = Poly::zero(&mv.chart);
    let mut h = Poly::zero(&fm.chart);
    let mut p = Poly::zero(&du.chart);
    let mut x = Poly::zero(&of.chart);
    for alpha in 0..n {
        let pa = d.fiber_parity(alpha);
        for a in 0..d.base_dim() {
            let q = d.anchor(alpha, a);
            if q.is_zero() {
                continue;
            }
            s = s + mv.fconj(alpha) * q.embed(&mv.chart)?.scale_int(pa.sign() as i64) * mv.bconj(a);
            h = h + fm.fib(alpha) * q.embed(&fm.chart)? * fm.bconj(a);
            p = p + du.fconj(alpha) * q.embed(&du.chart)? * du.bconj(a);
            x = x + of.fib(alpha) * q.embed(&of.chart)? * of.bconj(a);
        }
        for beta in 0..n {
            let pb = d.fiber_parity(beta);
            for gamma in 0..n {
                // ½ (prefix)^α (prefix)^β Q_{βα}^γ (suffix)_γ
                let q = d.structure(beta, alpha, gamma);
                if q.is_zero() {
                    continue;
                }
                s = s
                    + (mv.fconj(alpha)
                        * mv.fconj(beta)
                        * q.embed(&mv.chart)?.scale_int((pa + pb).sign() as i64)
                        * mv.fib(gamma))
                    .scale(&half);
                h = h
                    + (fm.fib(alpha) * fm.fib(beta) * q.embed(&fm.chart)? * fm.fconj(gamma))
                        .scale(&half);
                p = p
                    - (du.fconj(alpha) * du.fconj(beta) * q.embed(&du.chart)? * du.fib(gamma))
                        .scale(&half);
                x = x
                    + (of.fib(alpha) * of.fib(beta) * q.embed(&of.chart)? * of.fconj(gamma))
                        .scale(&half);
            }
        }
    }
    for (name, poly) in [("S", &s), ("P", &p), ("H_Q", &h), ("X_Q", &x)] {
        if !poly.is_zero() && poly.weight() != Some(-1) {
            return Err(Error::Calibration {
                identity: format!("weight of {name}"),
                detail: format!("expected weight -1, got {:?}", poly.weights()),
            });
        }
    }
    Ok(StructureEncodings {
        s,
        p,
        h_q: h,
        x_q: x,
    })
}
