//! Seeded random polynomials for property suites.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graded_algebra::{rat, Chart, Monomial, Parity, Poly, Rational};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Small nonzero rational.
    pub fn coefficient(&mut self) -> Rational {
        let mut n = self.rng.gen_range(-3i64..=3);
        if n == 0 {
            n = 1;
        }
        let d = self.rng.gen_range(1i64..=2);
        rat(n, d)
    }

    pub fn small_int(&mut self, lo: i64, hi: i64) -> Rational {
        rat(self.rng.gen_range(lo..=hi), 1)
    }

    /// Random monomial in `vars` of total degree at most `max_degree`.
    pub fn monomial(&mut self, chart: &Chart, vars: &[usize], max_degree: u32) -> Monomial {
        let mut exps = vec![0u16; chart.len()];
        if vars.is_empty() {
            return Monomial::from_exponents(exps);
        }
        let deg = self.rng.gen_range(0..=max_degree);
        for _ in 0..deg {
            let v = vars[self.rng.gen_range(0..vars.len())];
            if chart.parity(v).is_odd() && exps[v] > 0 {
                continue;
            }
            exps[v] += 1;
        }
        Monomial::from_exponents(exps)
    }

    /// Random polynomial in `vars` with up to `terms` terms.
    pub fn poly(
        &mut self,
        chart: &Arc<Chart>,
        vars: &[usize],
        max_degree: u32,
        terms: usize,
    ) -> Poly {
        let mut out = Poly::zero(chart);
        for _ in 0..terms {
            let m = self.monomial(chart, vars, max_degree);
            let c = self.coefficient();
            out = out + Poly::from_terms(chart, [(m, c)]).expect("monomial fits chart");
        }
        out
    }

    /// Random polynomial of the given parity.
    pub fn homogeneous(
        &mut self,
        chart: &Arc<Chart>,
        vars: &[usize],
        max_degree: u32,
        terms: usize,
        parity: Parity,
    ) -> Poly {
        let (e, o) = self.poly(chart, vars, max_degree, terms * 2).parity_parts();
        match parity {
            Parity::Even => e,
            Parity::Odd => o,
        }
    }

    /// Random parity, then a polynomial of that parity.
    pub fn any_homogeneous(
        &mut self,
        chart: &Arc<Chart>,
        vars: &[usize],
        max_degree: u32,
        terms: usize,
    ) -> Poly {
        let p = if self.rng.gen_bool(0.5) {
            Parity::Odd
        } else {
            Parity::Even
        };
        self.homogeneous(chart, vars, max_degree, terms, p)
    }
}
