//! Canonical even/odd brackets, master equations and higher derived brackets.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded_algebra::{rat, Chart, Parity, Poly};

fn bracket_epsilon(chart: &Chart) -> Result<Parity> {
    chart
        .epsilon()
        .ok_or_else(|| Error::NoBracket(chart.name().to_string()))
}

/// Parity of `f` as an element of the bracket's Lie superalgebra (parity + ε).
pub fn lie_parity(f: &Poly) -> Option<Parity> {
    Some(f.parity()? + f.chart().epsilon()?)
}

/// Canonical bracket on a paired chart, normalized by `{p, q} = 1` on every
/// conjugate pair and extended as a graded biderivation.
pub fn canonical_bracket(f: &Poly, g: &Poly) -> Result<Poly> {
    let chart = f.chart().clone();
    let eps = bracket_epsilon(&chart)?;
    if **g.chart() != *chart {
        return Err(Error::ChartMismatch {
            left: chart.name().to_string(),
            right: g.chart().name().to_string(),
        });
    }
    let mut out = Poly::zero(&chart);
    for (fp, fh) in f.homogeneous_parts() {
        let lf = fp + eps;
        for &(q, p) in chart.pairs() {
            let lq = chart.parity(q) + eps;
            let lp = chart.parity(p) + eps;
            let dq_f = fh.derivative(q);
            if !dq_f.is_zero() {
                let dp_g = g.derivative(p);
                if !dp_g.is_zero() {
                    let t = dq_f * dp_g;
                    out = out + t.scale_int(-(lf.koszul(lp) as i64));
                }
            }
            let dp_f = fh.derivative(p);
            if !dp_f.is_zero() {
                let dq_g = g.derivative(q);
                if !dq_g.is_zero() {
                    let s = lf.koszul(lq) * lq.koszul(lp);
                    out = out + (dp_f * dq_g).scale_int(s as i64);
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of a self-bracket test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketReport {
    pub residual: Poly,
    pub holds: bool,
    /// Set when the structure does not have the parity the master equation expects.
    pub warning: Option<String>,
}

impl BracketReport {
    pub fn from_residual(residual: Poly) -> Self {
        BracketReport {
            holds: residual.is_zero(),
            residual,
            warning: None,
        }
    }
}

/// `{Θ, Θ}` together with a parity sanity check (Θ should have parity ε + 1).
pub fn master_residual(theta: &Poly) -> Result<BracketReport> {
    let eps = bracket_epsilon(theta.chart())?;
    let residual = canonical_bracket(theta, theta)?;
    let mut report = BracketReport::from_residual(residual);
    match theta.parity() {
        Some(p) if theta.is_zero() || p == eps.flip() => {}
        Some(p) => {
            report.warning = Some(format!(
                "structure has parity {p}, expected {} on chart {}; the self-bracket vanishes identically",
                eps.flip(),
                theta.chart().name()
            ))
        }
        None => {
            report.warning = Some("structure is not parity-homogeneous".to_string());
        }
    }
    Ok(report)
}

/// Restriction to the zero section of a set of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projector {
    chart: Arc<Chart>,
    killed: Vec<usize>,
}

impl Projector {
    pub fn new(chart: &Arc<Chart>, killed: Vec<usize>) -> Self {
        Projector {
            chart: chart.clone(),
            killed,
        }
    }

    /// Kills every momentum of the chart.
    pub fn momenta(chart: &Arc<Chart>) -> Self {
        Projector::new(chart, chart.momenta())
    }

    pub fn by_names(chart: &Arc<Chart>, names: &[&str]) -> Result<Self> {
        let killed = names
            .iter()
            .map(|n| chart.index_of(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Projector::new(chart, killed))
    }

    pub fn killed(&self) -> &[usize] {
        &self.killed
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn apply(&self, f: &Poly) -> Poly {
        f.restrict_zero(&self.killed)
    }

    pub fn admits(&self, f: &Poly) -> bool {
        !f.involves_any(&self.killed)
    }

    pub fn check(&self, f: &Poly) -> Result<()> {
        if self.admits(f) {
            Ok(())
        } else {
            Err(Error::Projector(format!(
                "`{f}` involves variables set to zero on {}",
                self.chart.name()
            )))
        }
    }
}

/// `start` bracketed successively with each argument, innermost first.
pub fn nested<B>(start: &Poly, args: &[Poly], bracket: B) -> Result<Poly>
where
    B: Fn(&Poly, &Poly) -> Result<Poly>,
{
    let mut acc = start.clone();
    for a in args {
        if acc.is_zero() {
            break;
        }
        acc = bracket(&acc, a)?;
    }
    Ok(acc)
}

/// π[…[[Δ, a₁], a₂]…, aₙ] with the canonical bracket of Δ's chart.
pub fn derived_bracket(delta: &Poly, args: &[Poly], projector: &Projector) -> Result<Poly> {
    for a in args {
        projector.check(a)?;
    }
    let acc = nested(delta, args, canonical_bracket)?;
    Ok(projector.apply(&acc))
}

/// n-th Jacobiator as the derived bracket generated by ½{Δ, Δ}.
pub fn jacobiator(delta: &Poly, args: &[Poly], projector: &Projector) -> Result<Poly> {
    let half_square = canonical_bracket(delta, delta)?.scale(&rat(1, 2));
    derived_bracket(&half_square, args, projector)
}

/// Koszul sign of moving the entries selected by `mask` to the front,
/// keeping the relative order inside both groups.
pub fn unshuffle_sign(mask: u32, parities: &[Parity]) -> i32 {
    let mut sign = 1;
    for i in 0..parities.len() {
        if mask & (1 << i) == 0 {
            continue;
        }
        for j in 0..i {
            if mask & (1 << j) == 0 {
                sign *= parities[i].koszul(parities[j]);
            }
        }
    }
    sign
}

/// n-th Jacobiator assembled from the brackets themselves:
/// Σ over unshuffles (I, J) of ±( (a_I), a_J ), including the empty and full index sets.
/// `bracket(args)` must evaluate the derived bracket of the given list, and
/// `lie_parity(a)` the parity entering the Koszul signs.
pub fn shuffle_jacobiator<B, L>(args: &[Poly], lie_parity: L, bracket: B) -> Result<Poly>
where
    B: Fn(&[Poly]) -> Result<Poly>,
    L: Fn(&Poly) -> Parity,
{
    let n = args.len();
    assert!(n < 31, "too many arguments");
    let parities: Vec<Parity> = args.iter().map(&lie_parity).collect();
    let mut acc: Option<Poly> = None;
    for mask in 0u32..(1 << n) {
        let inner: Vec<Poly> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| args[i].clone())
            .collect();
        let inner_value = bracket(&inner)?;
        let mut outer = vec![inner_value];
        outer.extend(
            (0..n)
                .filter(|i| mask & (1 << i) == 0)
                .map(|i| args[i].clone()),
        );
        let term = bracket(&outer)?.scale_int(unshuffle_sign(mask, &parities) as i64);
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    Ok(acc.expect("at least the empty subset"))
}

/// The shuffle Jacobiator for derived brackets of Δ on its own chart.
pub fn shuffle_jacobiator_canonical(
    delta: &Poly,
    args: &[Poly],
    projector: &Projector,
) -> Result<Poly> {
    for a in args {
        projector.check(a)?;
    }
    let eps = bracket_epsilon(delta.chart())?;
    shuffle_jacobiator(
        args,
        |a| a.parity().unwrap_or(Parity::Even) + eps,
        |list| derived_bracket(delta, list, projector),
    )
}

/// Residuals of the bracket axioms for homogeneous f, g, h, all with Lie parities
/// (parity + ε). Each is zero for a genuine graded Lie bracket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomResiduals {
    /// Parity of {f,g} is f̃ + g̃ + ε.
    pub grading: bool,
    /// {f,g} + (−1)^{(f̃+ε)(g̃+ε)}{g,f}.
    pub skew: Poly,
    /// {f,gh} − {f,g}h − (−1)^{(f̃+ε)g̃} g{f,h}.
    pub leibniz: Poly,
    /// {f,{g,h}} − {{f,g},h} − (−1)^{(f̃+ε)(g̃+ε)}{g,{f,h}}.
    pub jacobi: Poly,
}

impl AxiomResiduals {
    pub fn hold(&self) -> bool {
        self.grading && self.skew.is_zero() && self.leibniz.is_zero() && self.jacobi.is_zero()
    }
}

pub fn axiom_residuals(f: &Poly, g: &Poly, h: &Poly) -> Result<AxiomResiduals> {
    let eps = bracket_epsilon(f.chart())?;
    let par = |a: &Poly| a.parity().unwrap_or(Parity::Even);
    let (lf, lg) = (par(f) + eps, par(g) + eps);
    let b = canonical_bracket;
    let fg = b(f, g)?;
    let grading = fg.is_zero() || fg.parity() == Some(par(f) + par(g) + eps);
    let skew = &fg + &b(g, f)?.scale_int(lf.koszul(lg) as i64);
    let leibniz = b(f, &(g * h))? - &fg * h - (g * &b(f, h)?).scale_int(lf.koszul(par(g)) as i64);
    let jacobi = b(f, &b(g, h)?)? - b(&fg, h)? - b(g, &b(f, h)?)?.scale_int(lf.koszul(lg) as i64);
    Ok(AxiomResiduals {
        grading,
        skew,
        leibniz,
        jacobi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_algebra::{int, ChartBuilder, GradedVariable};

    fn even_chart() -> Arc<Chart> {
        ChartBuilder::new("T*R")
            .coordinate(GradedVariable::new("x", Parity::Even, 0))
            .momentum(GradedVariable::new("p", Parity::Even, 0), (1, 1))
            .pair("x", "p")
            .bracket(Parity::Even)
            .build()
            .unwrap()
    }

    #[test]
    fn generator_pairing() {
        let c = even_chart();
        let x = Poly::var(&c, "x").unwrap();
        let p = Poly::var(&c, "p").unwrap();
        assert_eq!(canonical_bracket(&p, &x).unwrap(), Poly::one(&c));
        assert_eq!(
            canonical_bracket(&x, &p).unwrap(),
            Poly::constant(&c, int(-1))
        );
    }

    #[test]
    fn chart_without_bracket() {
        let c = ChartBuilder::new("plain")
            .coordinate(GradedVariable::new("x", Parity::Even, 0))
            .build()
            .unwrap();
        let x = Poly::var(&c, "x").unwrap();
        assert!(matches!(
            canonical_bracket(&x, &x),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn projector_rejects_momenta() {
        let c = even_chart();
        let p = Poly::var(&c, "p").unwrap();
        let pr = Projector::momenta(&c);
        assert!(matches!(
            derived_bracket(&p, std::slice::from_ref(&p), &pr),
            Err(Error::Projector(_))
        ));
    }

    #[test]
    fn unshuffle_signs() {
        let odd = [Parity::Odd, Parity::Odd, Parity::Even];
        assert_eq!(unshuffle_sign(0b010, &odd), -1);
        assert_eq!(unshuffle_sign(0b100, &odd), 1);
        assert_eq!(unshuffle_sign(0b011, &odd), 1);
    }
}
