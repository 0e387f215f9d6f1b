use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::chart::{Chart, Parity};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exponent vector in chart order. Odd exponents never exceed one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn unit(len: usize) -> Self {
        Monomial(vec![0; len].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exponent(&self, idx: usize) -> u16 {
        self.0[idx]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn parity(&self, chart: &Chart) -> Parity {
        let odd = self
            .0
            .iter()
            .enumerate()
            .filter(|&(i, &e)| e > 0 && chart.parity(i).is_odd())
            .count();
        Parity::from_bit(odd as u32)
    }

    pub fn weight(&self, chart: &Chart) -> i32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| chart.weight(i) * e as i32)
            .sum()
    }

    pub fn bidegree(&self, chart: &Chart) -> (u32, u32) {
        self.0.iter().enumerate().fold((0, 0), |(a, b), (i, &e)| {
            let (da, db) = chart.bidegree(i);
            (a + da * e as u32, b + db * e as u32)
        })
    }

    /// Degree counted only over the listed variables.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&i| self.0[i] as u32).sum()
    }

    /// Product in canonical order together with its Koszul sign, or `None`
    /// if an odd variable would be squared.
    pub fn mul(&self, other: &Monomial, chart: &Chart) -> Option<(Monomial, bool)> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut seen_other_odd = 0u32;
        let mut swaps = 0u32;
        for i in 0..self.0.len() {
            let (a, b) = (self.0[i], other.0[i]);
            if chart.parity(i).is_odd() {
                if a > 0 && b > 0 {
                    return None;
                }
                if a > 0 {
                    swaps += seen_other_odd;
                }
                if b > 0 {
                    seen_other_odd += 1;
                }
            }
            out.push(a + b);
        }
        Some((Monomial::from_exponents(out), swaps % 2 == 1))
    }

    /// Number of odd factors strictly before `idx`.
    fn odd_before(&self, idx: usize, chart: &Chart) -> u32 {
        (0..idx)
            .filter(|&i| self.0[i] > 0 && chart.parity(i).is_odd())
            .count() as u32
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Supercommutative polynomial with exact rational coefficients.
#[derive(Clone)]
pub struct Poly {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart)
            && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.chart.name(), self)
    }
}

impl Poly {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        Poly {
            chart: chart.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(chart: &Arc<Chart>, c: Rational) -> Self {
        let mut p = Poly::zero(chart);
        if !c.is_zero() {
            p.terms.insert(Monomial::unit(chart.len()), c);
        }
        p
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Poly::constant(chart, Rational::one())
    }

    pub fn var_at(chart: &Arc<Chart>, idx: usize) -> Self {
        let mut exps = vec![0; chart.len()];
        exps[idx] = 1;
        let mut p = Poly::zero(chart);
        p.terms
            .insert(Monomial::from_exponents(exps), Rational::one());
        p
    }

    pub fn var(chart: &Arc<Chart>, name: &str) -> Result<Self> {
        Ok(Poly::var_at(chart, chart.index_of(name)?))
    }

    /// Builds a polynomial from (monomial, coefficient) pairs; odd squares are rejected.
    pub fn from_terms(
        chart: &Arc<Chart>,
        terms: impl IntoIterator<Item = (Monomial, Rational)>,
    ) -> Result<Self> {
        let mut p = Poly::zero(chart);
        for (m, c) in terms {
            if m.exponents().len() != chart.len() {
                return Err(Error::Convention(format!(
                    "monomial length {} does not match chart {}",
                    m.exponents().len(),
                    chart.name()
                )));
            }
            if m.exponents()
                .iter()
                .enumerate()
                .any(|(i, &e)| e > 1 && chart.parity(i).is_odd())
            {
                continue;
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::unit(self.chart.len()))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_chart(&self, other: &Poly) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || *self.chart == *other.chart {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                left: self.chart.name().to_string(),
                right: other.chart.name().to_string(),
            })
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.same_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.same_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.same_chart(other)?;
        let mut out = Poly::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, neg)) = ma.mul(mb, &self.chart) {
                    let c = ca * cb;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.chart);
        }
        Poly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> Poly {
        self.scale(&int(c))
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::one(&self.chart);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Left partial derivative: the variable is moved to the front before it is removed.
    pub fn derivative(&self, idx: usize) -> Poly {
        let odd = self.chart.parity(idx).is_odd();
        let mut out = Poly::zero(&self.chart);
        for (m, c) in &self.terms {
            let e = m.exponent(idx);
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[idx] -= 1;
            let mut coeff = c * int(e as i64);
            if odd && m.odd_before(idx, &self.chart) % 2 == 1 {
                coeff = -coeff;
            }
            out.add_term(Monomial::from_exponents(exps), coeff);
        }
        out
    }

    pub fn derivative_by(&self, name: &str) -> Result<Poly> {
        Ok(self.derivative(self.chart.index_of(name)?))
    }

    /// Parity when homogeneous. The zero polynomial counts as even.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.chart));
        let first = it.next().unwrap_or(Parity::Even);
        it.all(|p| p == first).then_some(first)
    }

    /// (even part, odd part).
    pub fn parity_parts(&self) -> (Poly, Poly) {
        let mut even = Poly::zero(&self.chart);
        let mut odd = Poly::zero(&self.chart);
        for (m, c) in &self.terms {
            if m.parity(&self.chart).is_odd() {
                odd.terms.insert(m.clone(), c.clone());
            } else {
                even.terms.insert(m.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// Nonzero homogeneous parts tagged by parity.
    pub fn homogeneous_parts(&self) -> Vec<(Parity, Poly)> {
        let (e, o) = self.parity_parts();
        let mut out = Vec::new();
        if !e.is_zero() {
            out.push((Parity::Even, e));
        }
        if !o.is_zero() {
            out.push((Parity::Odd, o));
        }
        out
    }

    pub fn weights(&self) -> BTreeSet<i32> {
        self.terms.keys().map(|m| m.weight(&self.chart)).collect()
    }

    pub fn weight(&self) -> Option<i32> {
        let w = self.weights();
        match w.len() {
            0 => Some(0),
            1 => w.into_iter().next(),
            _ => None,
        }
    }

    pub fn weight_component(&self, w: i32) -> Poly {
        self.filter(|m| m.weight(&self.chart) == w)
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Poly {
        Poly {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Substitutes zero for every listed variable.
    pub fn restrict_zero(&self, vars: &[usize]) -> Poly {
        self.filter(|m| vars.iter().all(|&i| m.exponent(i) == 0))
    }

    pub fn involves(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.exponent(idx) > 0)
    }

    pub fn involves_any(&self, vars: &[usize]) -> bool {
        vars.iter().any(|&i| self.involves(i))
    }

    pub fn max_degree_in(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| m.degree_in(vars))
            .max()
            .unwrap_or(0)
    }

    /// Homogeneous component of the given degree in the listed variables.
    pub fn degree_component(&self, vars: &[usize], k: u32) -> Poly {
        self.filter(|m| m.degree_in(vars) == k)
    }

    /// Coefficient of `var^k` for an even variable, as a polynomial free of `var`.
    pub fn coefficient_in(&self, idx: usize, k: u16) -> Result<Poly> {
        if self.chart.parity(idx).is_odd() {
            return Err(Error::Convention(format!(
                "coefficient extraction needs an even variable, `{}` is odd",
                self.chart.var(idx).name()
            )));
        }
        let mut out = Poly::zero(&self.chart);
        for (m, c) in &self.terms {
            if m.exponent(idx) == k {
                let mut exps = m.exponents().to_vec();
                exps[idx] = 0;
                out.add_term(Monomial::from_exponents(exps), c.clone());
            }
        }
        Ok(out)
    }

    /// Re-expresses the polynomial on a chart containing every variable it uses
    /// (matched by name). Parities must agree.
    pub fn embed(&self, target: &Arc<Chart>) -> Result<Poly> {
        if Arc::ptr_eq(&self.chart, target) {
            return Ok(self.clone());
        }
        let mut map = vec![None; self.chart.len()];
        for (i, slot) in map.iter_mut().enumerate() {
            if !self.involves(i) {
                continue;
            }
            let v = self.chart.var(i);
            let j = target.index_of(v.name())?;
            if target.parity(j) != v.parity() {
                return Err(Error::Convention(format!(
                    "variable `{}` changes parity between {} and {}",
                    v.name(),
                    self.chart.name(),
                    target.name()
                )));
            }
            *slot = Some(j);
        }
        let mut out = Poly::zero(target);
        for (m, c) in &self.terms {
            // build the target monomial as an ordered product to pick up reordering signs
            let mut acc = Monomial::unit(target.len());
            let mut neg = false;
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let mut exps = vec![0u16; target.len()];
                exps[map[i].unwrap()] = e;
                let (next, s) = acc
                    .mul(&Monomial::from_exponents(exps), target)
                    .expect("distinct variables cannot collide");
                acc = next;
                neg ^= s;
            }
            out.add_term(acc, if neg { -c.clone() } else { c.clone() });
        }
        Ok(out)
    }

    /// Variables actually occurring.
    pub fn support(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for m in self.terms.keys() {
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    s.insert(i);
                }
            }
        }
        s
    }

    /// Splits every term as (coefficient part, part in `vars`), grouping by the latter.
    /// Requires the `vars` to come after all other variables occurring in the polynomial.
    pub fn group_by_tail(&self, vars: &[usize]) -> BTreeMap<Monomial, Poly> {
        let mut out: BTreeMap<Monomial, Poly> = BTreeMap::new();
        let n = self.chart.len();
        for (m, c) in &self.terms {
            let mut head = m.exponents().to_vec();
            let mut tail = vec![0u16; n];
            for &i in vars {
                tail[i] = head[i];
                head[i] = 0;
            }
            out.entry(Monomial::from_exponents(tail))
                .or_insert_with(|| Poly::zero(&self.chart))
                .add_term(Monomial::from_exponents(head), c.clone());
        }
        out
    }

    pub fn monomial_poly(chart: &Arc<Chart>, m: Monomial) -> Poly {
        let mut p = Poly::zero(chart);
        p.add_term(m, Rational::one());
        p
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

fn fmt_monomial(m: &Monomial, chart: &Chart) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(chart.var(i).name().to_string()),
            _ => parts.push(format!("{}^{}", chart.var(i).name(), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let body = fmt_monomial(m, &self.chart);
            if body.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&body)?;
            } else {
                write!(f, "{a}*{body}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                self.$imp(rhs).expect("polynomials on different charts")
            }
        }
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$imp(&rhs).expect("polynomials on different charts")
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$imp(rhs).expect("polynomials on different charts")
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$imp(&rhs).expect("polynomials on different charts")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale_int(-1)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale_int(-1)
    }
}
