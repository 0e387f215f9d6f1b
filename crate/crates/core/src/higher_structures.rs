//! Higher Poisson structures on ΠE* and higher Schouten structures on E*,
//! their lifts, L∞-algebroid fields and the higher brackets they generate.

use crate::algebroid::{Algebroid, Side, TotalSpace};
use crate::bracket_engine::{
    canonical_bracket, derived_bracket, nested, shuffle_jacobiator, BracketReport, Projector,
};
use crate::error::{Error, Result};
use crate::graded_algebra::{Parity, Poly};
use crate::tulczyjew::canonical_r;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Even function 𝒫(x, η) with [[𝒫,𝒫]]_S = 0.
    Poisson,
    /// Odd function 𝒮(x, e) with {𝒮,𝒮}_P = 0.
    Schouten,
}

impl Kind {
    /// The algebroid bracket the structure lives under.
    pub fn side(self) -> Side {
        match self {
            Kind::Poisson => Side::Schouten,
            Kind::Schouten => Side::Poisson,
        }
    }

    /// The bracket side of the forms picture.
    pub fn parity(self) -> Parity {
        match self {
            Kind::Poisson => Parity::Even,
            Kind::Schouten => Parity::Odd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HigherStructure {
    kind: Kind,
    body: Poly,
}

impl HigherStructure {
    /// `body` must be a function of (x, η) on T*(ΠE*) for the Poisson kind, or of
    /// (x, e) on ΠT*(E*) for the Schouten kind, of the matching parity.
    pub fn new(alg: &Algebroid, kind: Kind, body: Poly) -> Result<Self> {
        let space = alg.charts().structure_space(kind.side());
        let body = body.embed(&space.chart)?;
        if body.involves_any(&space.momenta()) {
            return Err(Error::InvalidData(format!(
                "higher structure `{body}` involves momenta of {}",
                space.chart.name()
            )));
        }
        if !body.is_zero() && body.parity() != Some(kind.parity()) {
            return Err(Error::InvalidData(format!(
                "higher {kind:?} structure must be {}",
                kind.parity()
            )));
        }
        Ok(HigherStructure { kind, body })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn body(&self) -> &Poly {
        &self.body
    }

    /// Weight-w component as a structure of the same kind.
    pub fn weight_component(&self, w: i32) -> HigherStructure {
        HigherStructure {
            kind: self.kind,
            body: self.body.weight_component(w),
        }
    }
}

/// [[𝒫,𝒫]]_S or {𝒮,𝒮}_P.
pub fn higher_master_residual(alg: &Algebroid, h: &HigherStructure) -> Result<BracketReport> {
    let r = alg.algebroid_bracket(h.kind.side(), &h.body, &h.body)?;
    Ok(BracketReport::from_residual(r))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedStructure {
    /// H_𝒫 = {S, 𝒫} on T*(ΠE*) or H_𝒮 = [[P, 𝒮]] on ΠT*(E*).
    pub hamiltonian: Poly,
    /// 𝒮_𝒫 on T*(ΠE) or 𝒫_𝒮 on ΠT*(ΠE), the pullback of the Hamiltonian along R⁻¹.
    pub forms_structure: Poly,
}

pub fn lift(alg: &Algebroid, h: &HigherStructure) -> Result<LiftedStructure> {
    let enc = alg.encodings();
    let (theta, side) = match h.kind {
        Kind::Poisson => (&enc.s, Side::Schouten),
        Kind::Schouten => (&enc.p, Side::Poisson),
    };
    let ham = canonical_bracket(theta, &h.body)?;
    // self-bracket of the structure recovered from the Hamiltonian
    let via_ham = match h.kind {
        Kind::Poisson => canonical_bracket(&h.body, &ham)?,
        Kind::Schouten => canonical_bracket(&ham, &h.body)?,
    };
    let direct = alg.algebroid_bracket(side, &h.body, &h.body)?;
    if via_ham != direct {
        return Err(Error::Calibration {
            identity: "self-bracket through the lifted Hamiltonian".into(),
            detail: format!("direct = {direct}, via Hamiltonian = {via_ham}"),
        });
    }
    if canonical_bracket(theta, theta)?.is_zero() {
        let c = canonical_bracket(theta, &ham)?;
        if !c.is_zero() {
            return Err(Error::Calibration {
                identity: "structure commutes with the lifted Hamiltonian".into(),
                detail: c.to_string(),
            });
        }
    }
    let r = canonical_r(alg, side)?;
    let r_inv = r
        .inverse()
        .ok_or_else(|| Error::Convention("R is not invertible".into()))?;
    let forms_structure = r_inv.pullback(&ham)?;
    Ok(LiftedStructure {
        hamiltonian: ham,
        forms_structure,
    })
}

/// A derivation given by its values on the generators of (x, η) or (x, e).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinftyField {
    pub generators: Vec<usize>,
    pub images: Vec<Poly>,
}

impl LinftyField {
    /// D(f) = Σ_z D(z) ∂f/∂z.
    pub fn apply(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(f.chart());
        for (z, img) in self.generators.iter().zip(&self.images) {
            if img.is_zero() {
                continue;
            }
            let d = f.derivative(*z);
            if !d.is_zero() {
                out = out + img * &d;
            }
        }
        out
    }

    /// Q(Q(z)) for every generator.
    pub fn square_residuals(&self) -> Vec<Poly> {
        self.images.iter().map(|img| self.apply(img)).collect()
    }

    pub fn squares_to_zero(&self) -> bool {
        self.square_residuals().iter().all(Poly::is_zero)
    }
}

/// Q_𝒫 = −[[𝒫, ·]]_S on ΠE*, or Q_𝒮 = {𝒮, ·}_P on E*.
pub fn linfty_field(alg: &Algebroid, h: &HigherStructure) -> Result<LinftyField> {
    let space = alg.charts().structure_space(h.kind.side());
    let generators: Vec<usize> = space
        .base
        .iter()
        .chain(space.fiber.iter())
        .copied()
        .collect();
    let mut images = Vec::new();
    for &z in &generators {
        let zv = Poly::var_at(&space.chart, z);
        let b = alg.algebroid_bracket(h.kind.side(), &h.body, &zv)?;
        images.push(match h.kind {
            Kind::Poisson => -b,
            Kind::Schouten => b,
        });
    }
    Ok(LinftyField { generators, images })
}

fn base_projector(space: &TotalSpace) -> Projector {
    Projector::new(&space.chart, space.off_base())
}

/// Higher brackets of base functions: nested algebroid brackets with 𝒫 (or 𝒮),
/// restricted to the zero section of the fiber.
pub fn base_brackets(alg: &Algebroid, h: &HigherStructure, args: &[Poly]) -> Result<Poly> {
    let side = h.kind.side();
    let space = alg.charts().structure_space(side);
    let pr = base_projector(space);
    let args = args
        .iter()
        .map(|a| a.embed(&space.chart))
        .collect::<Result<Vec<_>>>()?;
    for a in &args {
        pr.check(a)?;
    }
    let acc = nested(&h.body, &args, |a, b| alg.algebroid_bracket(side, a, b))?;
    Ok(pr.apply(&acc))
}

/// Parity entering Koszul signs of the base brackets.
pub fn base_lie_parity(kind: Kind, a: &Poly) -> Parity {
    let p = a.parity().unwrap_or(Parity::Even);
    match kind {
        Kind::Poisson => p.flip(),
        Kind::Schouten => p,
    }
}

/// Jacobiator of the base brackets assembled from the brackets themselves.
pub fn base_jacobiator(alg: &Algebroid, h: &HigherStructure, args: &[Poly]) -> Result<Poly> {
    shuffle_jacobiator(
        args,
        |a| base_lie_parity(h.kind, a),
        |list| base_brackets(alg, h, list),
    )
}

/// Projector onto forms: kills the momenta of T*(ΠE) or ΠT*(ΠE).
pub fn forms_projector(alg: &Algebroid, kind: Kind) -> Projector {
    let space = alg.charts().forms_space(kind.side());
    Projector::new(&space.chart, space.momenta())
}

/// Higher brackets of forms generated by the lifted structure.
pub fn forms_brackets(alg: &Algebroid, h: &HigherStructure, args: &[Poly]) -> Result<Poly> {
    let lifted = lift(alg, h)?;
    forms_brackets_with(alg, h.kind, &lifted.forms_structure, args)
}

/// Same as [`forms_brackets`] with a precomputed lifted structure.
pub fn forms_brackets_with(
    alg: &Algebroid,
    kind: Kind,
    lifted: &Poly,
    args: &[Poly],
) -> Result<Poly> {
    let pr = forms_projector(alg, kind);
    let args = args
        .iter()
        .map(|a| a.embed(pr.chart()))
        .collect::<Result<Vec<_>>>()?;
    derived_bracket(lifted, &args, &pr)
}

/// Parity entering Koszul signs of the forms brackets (parity + ε of the forms chart).
pub fn forms_lie_parity(kind: Kind, a: &Poly) -> Parity {
    let p = a.parity().unwrap_or(Parity::Even);
    match kind {
        Kind::Poisson => p,
        Kind::Schouten => p.flip(),
    }
}

pub fn forms_jacobiator(alg: &Algebroid, kind: Kind, lifted: &Poly, args: &[Poly]) -> Result<Poly> {
    shuffle_jacobiator(
        args,
        |a| forms_lie_parity(kind, a),
        |list| forms_brackets_with(alg, kind, lifted, list),
    )
}

/// Which multiderivation rule a bracket family obeys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeibnizType {
    /// Sign exponent ã_r(ã₁ + … + ã_{r−1} + 1).
    Schouten,
    /// Sign exponent ã_r(ã₁ + … + ã_{r−1} + r).
    Poisson,
}

/// (a₁,…,a_{r−1}, a_r a_{r+1}) − (a₁,…,a_r) a_{r+1} − (±) a_r (a₁,…,a_{r−1}, a_{r+1}).
pub fn leibniz_defect<B>(
    ty: LeibnizType,
    head: &[Poly],
    ar: &Poly,
    ar1: &Poly,
    bracket: B,
) -> Result<Poly>
where
    B: Fn(&[Poly]) -> Result<Poly>,
{
    let r = head.len() + 1;
    let sum: u32 = head
        .iter()
        .map(|a| a.parity().unwrap_or(Parity::Even).bit())
        .sum();
    let pr = ar.parity().unwrap_or(Parity::Even);
    let extra = match ty {
        LeibnizType::Schouten => 1,
        LeibnizType::Poisson => r as u32,
    };
    let sign = pr.koszul(Parity::from_bit(sum + extra)) as i64;
    let with = |x: &Poly| {
        let mut v = head.to_vec();
        v.push(x.clone());
        v
    };
    let lhs = bracket(&with(&(ar * ar1)))?;
    let t1 = bracket(&with(ar))? * ar1;
    let t2 = (ar * &bracket(&with(ar1))?).scale_int(sign);
    Ok(lhs - t1 - t2)
}

/// Leibniz type of the base brackets and of the forms brackets for each kind.
pub fn base_leibniz_type(kind: Kind) -> LeibnizType {
    match kind {
        Kind::Poisson => LeibnizType::Poisson,
        Kind::Schouten => LeibnizType::Schouten,
    }
}

pub fn forms_leibniz_type(kind: Kind) -> LeibnizType {
    match kind {
        Kind::Poisson => LeibnizType::Schouten,
        Kind::Schouten => LeibnizType::Poisson,
    }
}
