//! Named example algebroids used by tests, the CLI and documentation.

use crate::algebroid::{Algebroid, AlgebroidData, FiberLabel};
use crate::error::Result;
use crate::expr::parse;
use crate::graded_algebra::{int, rat, GradedVariable, Parity, Poly, Rational};

use Parity::{Even, Odd};

/// Tangent algebroid of ℝ^{p|q}: fiber labels equal to base names, identity anchor.
pub fn tangent(base: &[(&str, Parity)]) -> Result<Algebroid> {
    let vars: Vec<_> = base
        .iter()
        .map(|&(n, p)| GradedVariable::new(n, p, 0))
        .collect();
    let fiber: Vec<_> = base.iter().map(|&(n, p)| FiberLabel::new(n, p)).collect();
    let chart = crate::algebroid::base_chart_for(&[], &vars)?;
    let anchor = (0..base.len())
        .map(|i| ((i, i), Poly::one(&chart)))
        .collect();
    Algebroid::new(AlgebroidData::new(vec![], vars, fiber, anchor, vec![])?)
}

/// One bracket [e_a, e_b] = Σ c e_c as (a, b, [(c, coefficient)]).
pub type BracketEntry = (usize, usize, Vec<(usize, Rational)>);

/// Lie superalgebra over a point from brackets [e_a, e_b] = Σ c e_c; only one
/// ordering of each pair needs to be listed.
pub fn lie_algebra(
    labels: &[(&str, Parity)],
    brackets: &[BracketEntry],
) -> Result<Algebroid> {
    let fiber: Vec<_> = labels.iter().map(|&(n, p)| FiberLabel::new(n, p)).collect();
    let chart = crate::algebroid::base_chart_for(&[], &[])?;
    let mut structure = Vec::new();
    for (a, b, terms) in brackets {
        for (c, k) in terms {
            // [s_a, s_b] = (−1)^b̃ Q_{ab}^c s_c
            let q = k * int(fiber[*b].parity.sign() as i64);
            structure.push(((*a, *b, *c), Poly::constant(&chart, q)));
        }
    }
    Algebroid::new(AlgebroidData::new(
        vec![],
        vec![],
        fiber,
        vec![],
        structure,
    )?)
}

/// Anchored algebroid from expressions in the base variables.
pub fn from_expressions(
    base: &[(&str, Parity)],
    fiber: &[(&str, Parity)],
    anchor: &[(usize, usize, &str)],
    structure: &[(usize, usize, usize, &str)],
) -> Result<Algebroid> {
    let vars: Vec<_> = base
        .iter()
        .map(|&(n, p)| GradedVariable::new(n, p, 0))
        .collect();
    let chart = crate::algebroid::base_chart_for(&[], &vars)?;
    let anchor = anchor
        .iter()
        .map(|&(a, b, e)| Ok(((a, b), parse(e, &chart)?)))
        .collect::<Result<Vec<_>>>()?;
    let structure = structure
        .iter()
        .map(|&(a, b, c, e)| Ok(((a, b, c), parse(e, &chart)?)))
        .collect::<Result<Vec<_>>>()?;
    let fiber = fiber.iter().map(|&(n, p)| FiberLabel::new(n, p)).collect();
    Algebroid::new(AlgebroidData::new(vec![], vars, fiber, anchor, structure)?)
}

/// Two-dimensional non-abelian Lie algebra, [e₁, e₂] = e₂.
pub fn affine_lie_algebra() -> Result<Algebroid> {
    lie_algebra(&[("1", Even), ("2", Even)], &[(0, 1, vec![(1, int(1))])])
}

/// Heisenberg algebra, [e₁, e₂] = e₃.
pub fn heisenberg_algebra() -> Result<Algebroid> {
    lie_algebra(
        &[("1", Even), ("2", Even), ("3", Even)],
        &[(0, 1, vec![(2, int(1))])],
    )
}

/// sl(2) in the basis h, e, f.
pub fn sl2() -> Result<Algebroid> {
    lie_algebra(
        &[("h", Even), ("e", Even), ("f", Even)],
        &[
            (0, 1, vec![(1, int(2))]),
            (0, 2, vec![(2, int(-2))]),
            (1, 2, vec![(0, int(1))]),
        ],
    )
}

/// so(3), [e_i, e_j] = ε_ijk e_k.
pub fn so3() -> Result<Algebroid> {
    lie_algebra(
        &[("1", Even), ("2", Even), ("3", Even)],
        &[
            (0, 1, vec![(2, int(1))]),
            (1, 2, vec![(0, int(1))]),
            (2, 0, vec![(1, int(1))]),
        ],
    )
}

/// (1|1): [θ, θ] = e.
pub fn lie_super_11() -> Result<Algebroid> {
    lie_algebra(&[("e", Even), ("t", Odd)], &[(1, 1, vec![(0, int(1))])])
}

/// (1|2): [h, θ±] = ±θ±.
pub fn lie_super_12() -> Result<Algebroid> {
    lie_algebra(
        &[("h", Even), ("tp", Odd), ("tm", Odd)],
        &[(0, 1, vec![(1, int(1))]), (0, 2, vec![(2, int(-1))])],
    )
}

/// (2|1): [e₁, e₂] = e₂, [e₁, θ] = ½θ, [θ, θ] = e₂.
pub fn lie_super_21() -> Result<Algebroid> {
    lie_algebra(
        &[("1", Even), ("2", Even), ("t", Odd)],
        &[
            (0, 1, vec![(1, int(1))]),
            (0, 2, vec![(2, rat(1, 2))]),
            (2, 2, vec![(1, int(1))]),
        ],
    )
}

/// Constants that break the Jacobi identity: [e₁, e₂] = e₁, [e₁, e₃] = e₂.
pub fn jacobi_violating() -> Result<Algebroid> {
    lie_algebra(
        &[("1", Even), ("2", Even), ("3", Even)],
        &[(0, 1, vec![(0, int(1))]), (0, 2, vec![(1, int(1))])],
    )
}

/// Left-invariant frame of the Heisenberg group on ℝ³:
/// s₁ = ∂x, s₂ = ∂y + x∂z, s₃ = ∂z.
pub fn heisenberg_frame() -> Result<Algebroid> {
    from_expressions(
        &[("x", Even), ("y", Even), ("z", Even)],
        &[("1", Even), ("2", Even), ("3", Even)],
        &[(0, 0, "1"), (1, 1, "1"), (1, 2, "x"), (2, 2, "1")],
        &[(0, 1, 2, "1")],
    )
}

/// Action algebroid of the affine algebra on the line: a(e₁) = −x∂, a(e₂) = ∂.
pub fn affine_action() -> Result<Algebroid> {
    from_expressions(
        &[("x", Even)],
        &[("1", Even), ("2", Even)],
        &[(0, 0, "-x"), (1, 0, "1")],
        &[(0, 1, 1, "1")],
    )
}

/// Frame of ℝ^{1|1}: s₁ = ∂x, s₂ = ∂θ + θ∂x with [s₂, s₂] = 2s₁.
pub fn super_line_frame() -> Result<Algebroid> {
    from_expressions(
        &[("x", Even), ("th", Odd)],
        &[("1", Even), ("2", Odd)],
        &[(0, 0, "1"), (1, 1, "1"), (1, 0, "th")],
        &[(1, 1, 0, "-2")],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valid_fixtures_satisfy_structure_equations() {
        for (name, a) in [
            ("tangent", tangent(&[("x", Even), ("y", Even), ("th", Odd)])),
            ("affine", affine_lie_algebra()),
            ("heisenberg", heisenberg_algebra()),
            ("sl2", sl2()),
            ("so3", so3()),
            ("11", lie_super_11()),
            ("12", lie_super_12()),
            ("21", lie_super_21()),
            ("frame", heisenberg_frame()),
            ("action", affine_action()),
            ("superline", super_line_frame()),
        ] {
            let r = a.unwrap().verify_structure_equations().unwrap();
            assert!(r.holds(), "{name}: {r:?}");
        }
    }

    #[test]
    fn violating_fixture_fails_everywhere() {
        let r = jacobi_violating()
            .unwrap()
            .verify_structure_equations()
            .unwrap();
        assert!(r.agree());
        assert!(!r.structure_equations_hold());
    }
}
