use std::collections::HashMap;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Z₂ grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Parity {
    #[default]
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Self {
        if bit.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Self {
        self + Parity::Odd
    }

    /// (−1) raised to `self · other`.
    pub fn koszul(self, other: Parity) -> i32 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }

    /// (−1) raised to `self`.
    pub fn sign(self) -> i32 {
        if self.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

/// A coordinate symbol with its Grassmann parity and weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedVariable {
    name: String,
    parity: Parity,
    weight: i32,
}

impl GradedVariable {
    pub fn new(name: impl Into<String>, parity: Parity, weight: i32) -> Self {
        GradedVariable {
            name: name.into(),
            parity,
            weight,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn weight(&self) -> i32 {
        self.weight
    }
}

/// Role of a variable inside a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Bracket-inert constant of the coefficient algebra (symbolic coefficients, ℏ).
    Central,
    /// Position half of a conjugate pair, or any coordinate of a chart without bracket.
    Coordinate,
    /// Momentum half of a conjugate pair.
    Momentum,
}

/// An ordered list of graded variables, optionally equipped with conjugate
/// pairs and a bracket parity ε. The declared order is the canonical factor
/// order of every monomial on the chart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chart {
    name: String,
    vars: Vec<GradedVariable>,
    roles: Vec<Role>,
    bidegree: Vec<(u32, u32)>,
    index: HashMap<String, usize>,
    pairs: Vec<(usize, usize)>,
    partner: Vec<Option<usize>>,
    epsilon: Option<Parity>,
}

impl Chart {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[GradedVariable] {
        &self.vars
    }

    pub fn var(&self, idx: usize) -> &GradedVariable {
        &self.vars[idx]
    }

    pub fn parity(&self, idx: usize) -> Parity {
        self.vars[idx].parity
    }

    pub fn weight(&self, idx: usize) -> i32 {
        self.vars[idx].weight
    }

    pub fn role(&self, idx: usize) -> Role {
        self.roles[idx]
    }

    /// Double-vector-bundle bidegree (degree along each side bundle).
    pub fn bidegree(&self, idx: usize) -> (u32, u32) {
        self.bidegree[idx]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable {
                name: name.to_string(),
                chart: self.name.clone(),
            })
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Bracket parity, `None` for charts without a canonical bracket.
    pub fn epsilon(&self) -> Option<Parity> {
        self.epsilon
    }

    /// Conjugate pairs as (position, momentum).
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn partner(&self, idx: usize) -> Option<usize> {
        self.partner[idx]
    }

    pub fn momenta(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(_, p)| p).collect()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(q, _)| q).collect()
    }

    pub fn indices_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.roles[i] == role).collect()
    }

    /// Weight shift of the canonical bracket: w({f,g}) = w(f) + w(g) + pairing_weight.
    pub fn pairing_weight(&self) -> Option<i32> {
        let mut it = self
            .pairs
            .iter()
            .map(|&(q, p)| -(self.vars[q].weight + self.vars[p].weight));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }
}

/// Incremental construction of a [`Chart`].
#[derive(Debug, Clone)]
pub struct ChartBuilder {
    name: String,
    vars: Vec<GradedVariable>,
    roles: Vec<Role>,
    bidegree: Vec<(u32, u32)>,
    pairs: Vec<(String, String)>,
    epsilon: Option<Parity>,
}

impl ChartBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ChartBuilder {
            name: name.into(),
            vars: Vec::new(),
            roles: Vec::new(),
            bidegree: Vec::new(),
            pairs: Vec::new(),
            epsilon: None,
        }
    }

    pub fn central(mut self, var: GradedVariable) -> Self {
        self.vars.push(var);
        self.roles.push(Role::Central);
        self.bidegree.push((0, 0));
        self
    }

    pub fn coordinate(self, var: GradedVariable) -> Self {
        self.coordinate_with_bidegree(var, (0, 0))
    }

    pub fn coordinate_with_bidegree(mut self, var: GradedVariable, bideg: (u32, u32)) -> Self {
        self.vars.push(var);
        self.roles.push(Role::Coordinate);
        self.bidegree.push(bideg);
        self
    }

    pub fn momentum(mut self, var: GradedVariable, bideg: (u32, u32)) -> Self {
        self.vars.push(var);
        self.roles.push(Role::Momentum);
        self.bidegree.push(bideg);
        self
    }

    pub fn pair(mut self, position: &str, momentum: &str) -> Self {
        self.pairs
            .push((position.to_string(), momentum.to_string()));
        self
    }

    pub fn bracket(mut self, epsilon: Parity) -> Self {
        self.epsilon = Some(epsilon);
        self
    }

    pub fn build(self) -> Result<Arc<Chart>> {
        let mut index = HashMap::new();
        for (i, v) in self.vars.iter().enumerate() {
            if index.insert(v.name.clone(), i).is_some() {
                return Err(Error::DuplicateVariable {
                    name: v.name.clone(),
                    chart: self.name.clone(),
                });
            }
        }
        let mut chart = Chart {
            name: self.name,
            vars: self.vars,
            roles: self.roles,
            bidegree: self.bidegree,
            index,
            pairs: Vec::new(),
            partner: Vec::new(),
            epsilon: self.epsilon,
        };
        chart.partner = vec![None; chart.vars.len()];
        for (q, p) in &self.pairs {
            let qi = chart.index_of(q)?;
            let pi = chart.index_of(p)?;
            if chart.partner[qi].is_some() || chart.partner[pi].is_some() {
                return Err(Error::Convention(format!(
                    "variable paired twice in chart {}: ({q}, {p})",
                    chart.name
                )));
            }
            if chart.roles[pi] != Role::Momentum || chart.roles[qi] != Role::Coordinate {
                return Err(Error::Convention(format!(
                    "pair ({q}, {p}) must join a coordinate to a momentum"
                )));
            }
            if let Some(eps) = chart.epsilon {
                if chart.parity(pi) != chart.parity(qi) + eps {
                    return Err(Error::Convention(format!(
                        "pair ({q}, {p}) violates parity(p) = parity(q) + ε in chart {}",
                        chart.name
                    )));
                }
            }
            chart.partner[qi] = Some(pi);
            chart.partner[pi] = Some(qi);
            chart.pairs.push((qi, pi));
        }
        if chart.epsilon.is_some() {
            if let Some(i) = (0..chart.len())
                .find(|&i| chart.roles[i] != Role::Central && chart.partner[i].is_none())
            {
                return Err(Error::Convention(format!(
                    "variable `{}` has no conjugate in chart {}",
                    chart.vars[i].name, chart.name
                )));
            }
        }
        Ok(Arc::new(chart))
    }
}
