use std::sync::Arc;

use num_traits::{One, Zero};

use super::chart::{Chart, Role};
use super::poly::{Poly, Rational};
use crate::error::{Error, Result};

/// A map `source → target` given by the pullbacks of the target coordinates.
#[derive(Debug, Clone)]
pub struct Morphism {
    name: String,
    source: Arc<Chart>,
    target: Arc<Chart>,
    images: Vec<Poly>,
}

/// (source generators, target generators, coefficient rows).
type LinearPart = (Vec<usize>, Vec<usize>, Vec<Vec<Rational>>);

impl Morphism {
    /// Target variables without an explicit assignment are pulled back to the
    /// source variable of the same name.
    pub fn new(
        name: impl Into<String>,
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        assignments: Vec<(String, Poly)>,
    ) -> Result<Self> {
        let name = name.into();
        let mut images: Vec<Option<Poly>> = vec![None; target.len()];
        for (var, img) in assignments {
            let j = target.index_of(&var)?;
            let img = img.embed(source)?;
            images[j] = Some(img);
        }
        let mut out = Vec::with_capacity(target.len());
        for (j, img) in images.into_iter().enumerate() {
            let v = target.var(j);
            let img = match img {
                Some(p) => p,
                None => {
                    let i = source.lookup(v.name()).ok_or_else(|| {
                        Error::Convention(format!(
                            "{name}: no image for `{}` and no variable of that name in {}",
                            v.name(),
                            source.name()
                        ))
                    })?;
                    Poly::var_at(source, i)
                }
            };
            if let Some(p) = img.parity() {
                if !img.is_zero() && p != v.parity() {
                    return Err(Error::Convention(format!(
                        "{name}: image of `{}` has parity {p}, expected {}",
                        v.name(),
                        v.parity()
                    )));
                }
            } else {
                return Err(Error::Convention(format!(
                    "{name}: image of `{}` is not parity-homogeneous",
                    v.name()
                )));
            }
            out.push(img);
        }
        Ok(Morphism {
            name,
            source: source.clone(),
            target: target.clone(),
            images: out,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image_of(&self, name: &str) -> Result<&Poly> {
        Ok(&self.images[self.target.index_of(name)?])
    }

    /// Target variables whose image does not have the variable's weight.
    pub fn weight_violations(&self) -> Vec<String> {
        self.images
            .iter()
            .enumerate()
            .filter(|(j, img)| !img.is_zero() && img.weight() != Some(self.target.weight(*j)))
            .map(|(j, _)| self.target.var(j).name().to_string())
            .collect()
    }

    /// Pullback of a function on the target.
    pub fn pullback(&self, f: &Poly) -> Result<Poly> {
        if !Arc::ptr_eq(f.chart(), &self.target) && **f.chart() != *self.target {
            return Err(Error::ChartMismatch {
                left: f.chart().name().to_string(),
                right: self.target.name().to_string(),
            });
        }
        let mut powers: Vec<Vec<Poly>> = vec![Vec::new(); self.target.len()];
        let mut out = Poly::zero(&self.source);
        for (m, c) in f.terms() {
            let mut acc = Poly::constant(&self.source, c.clone());
            for (j, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[j];
                if cache.is_empty() {
                    cache.push(Poly::one(&self.source));
                }
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &self.images[j];
                    cache.push(next);
                }
                acc = &acc * &cache[e as usize];
                if acc.is_zero() {
                    break;
                }
            }
            out = out + acc;
        }
        Ok(out)
    }

    /// `self` followed by `then`: pullback is `self* ∘ then*`.
    pub fn then(&self, then: &Morphism) -> Result<Morphism> {
        if *self.target != *then.source {
            return Err(Error::ChartMismatch {
                left: self.target.name().to_string(),
                right: then.source.name().to_string(),
            });
        }
        let images = then
            .images
            .iter()
            .map(|img| self.pullback(img))
            .collect::<Result<Vec<_>>>()?;
        Ok(Morphism {
            name: format!("{}∘{}", then.name, self.name),
            source: self.source.clone(),
            target: then.target.clone(),
            images,
        })
    }

    /// Linear coefficient matrix when every image is a constant-coefficient
    /// combination of source generators. Central variables must map to themselves.
    fn linear_matrix(&self) -> Option<LinearPart> {
        let src_gen: Vec<usize> = (0..self.source.len())
            .filter(|&i| self.source.role(i) != Role::Central)
            .collect();
        let tgt_gen: Vec<usize> = (0..self.target.len())
            .filter(|&j| self.target.role(j) != Role::Central)
            .collect();
        for j in 0..self.target.len() {
            if self.target.role(j) == Role::Central {
                let i = self.source.lookup(self.target.var(j).name())?;
                if self.images[j] != Poly::var_at(&self.source, i) {
                    return None;
                }
            }
        }
        let mut mat = vec![vec![Rational::zero(); src_gen.len()]; tgt_gen.len()];
        for (r, &j) in tgt_gen.iter().enumerate() {
            for (m, c) in self.images[j].terms() {
                if m.degree() != 1 {
                    return None;
                }
                let i = m.exponents().iter().position(|&e| e == 1)?;
                let col = src_gen.iter().position(|&s| s == i)?;
                mat[r][col] = c.clone();
            }
        }
        Some((src_gen, tgt_gen, mat))
    }

    pub fn is_linear(&self) -> bool {
        self.linear_matrix().is_some()
    }

    /// Inverse of a generator-linear map with constant coefficients, by
    /// Gauss–Jordan elimination. `None` when the map is nonlinear or singular.
    pub fn inverse(&self) -> Option<Morphism> {
        let (src_gen, tgt_gen, mat) = self.linear_matrix()?;
        let n = src_gen.len();
        if tgt_gen.len() != n {
            return None;
        }
        let inv = invert(mat)?;
        // source generator s = Σ_t inv[s][t] · target generator t
        let mut images = Vec::with_capacity(self.source.len());
        for i in 0..self.source.len() {
            if self.source.role(i) == Role::Central {
                let j = self.target.lookup(self.source.var(i).name())?;
                images.push(Poly::var_at(&self.target, j));
                continue;
            }
            let s = src_gen.iter().position(|&x| x == i)?;
            let mut p = Poly::zero(&self.target);
            for (t, &j) in tgt_gen.iter().enumerate() {
                if !inv[s][t].is_zero() {
                    p = p + Poly::var_at(&self.target, j).scale(&inv[s][t]);
                }
            }
            if !p.is_zero() && p.parity() != Some(self.source.parity(i)) {
                return None;
            }
            images.push(p);
        }
        Some(Morphism {
            name: format!("{}⁻¹", self.name),
            source: self.target.clone(),
            target: self.source.clone(),
            images,
        })
    }
}

fn invert(mut a: Vec<Vec<Rational>>) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col].clone();
        for k in 0..n {
            a[col][k] = &a[col][k] / &d;
            inv[col][k] = &inv[col][k] / &d;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in 0..n {
                    let t = &f * &a[col][k];
                    a[r][k] -= t;
                    let t = &f * &inv[col][k];
                    inv[r][k] -= t;
                }
            }
        }
    }
    Some(inv)
}
