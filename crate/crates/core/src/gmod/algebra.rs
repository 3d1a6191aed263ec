use serde::{Deserialize, Serialize};

use super::{GradedModule, ModuleMap};
use crate::comb::choose;
use crate::error::{Error, Result};
use crate::linalg::{is_prime, neg_mod, Matrix};

/// Largest supported `r`; the monomial basis has `2^(r+1)` elements.
pub const MAX_R: usize = 7;

/// Exterior algebra on `r+1` variables over `F_p`.
///
/// Monomials are bitmasks `S`; within a degree they are ordered by numeric
/// value of the mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Algebra {
    r: usize,
    p: u32,
}

impl Algebra {
    pub fn new(r: usize, p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidModule(format!("p = {p} is not prime")));
        }
        if r > MAX_R {
            return Err(Error::InvalidModule(format!("r = {r} exceeds {MAX_R}")));
        }
        Ok(Algebra { r, p })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.r + 1
    }

    /// `dim Λ_d = C(r+1, d)`.
    pub fn dim(&self, d: i32) -> usize {
        if d < 0 {
            0
        } else {
            choose(self.nvars(), d as usize)
        }
    }

    pub fn total_dim(&self) -> usize {
        1 << self.nvars()
    }

    pub fn monomials(&self, d: i32) -> Vec<u32> {
        if d < 0 || d as usize > self.nvars() {
            return Vec::new();
        }
        (0..1u32 << self.nvars())
            .filter(|m| m.count_ones() as i32 == d)
            .collect()
    }

    /// Position of `mask` among the monomials of its degree (colex rank).
    pub fn monomial_index(&self, mask: u32) -> usize {
        let mut idx = 0;
        let mut k = 0;
        for s in 0..self.nvars() {
            if mask >> s & 1 == 1 {
                k += 1;
                idx += choose(s, k);
            }
        }
        idx
    }

    /// `x_i · e_S = sign(i,S) e_{S∪i}`, with sign `(-1)^{#{j∈S : j<i}}`.
    /// Returns the target mask and whether the sign is negative.
    pub fn left_mul(&self, i: usize, mask: u32) -> Option<(u32, bool)> {
        if mask >> i & 1 == 1 {
            return None;
        }
        let below = (mask & ((1u32 << i) - 1)).count_ones();
        Some((mask | 1 << i, below % 2 == 1))
    }

    /// `e_S · x_i = (-1)^{|S|} x_i · e_S`.
    pub fn right_mul(&self, i: usize, mask: u32) -> Option<(u32, bool)> {
        let (t, neg) = self.left_mul(i, mask)?;
        Some((t, neg ^ (mask.count_ones() % 2 == 1)))
    }

    /// Matrix of left multiplication by `x_i` from `Λ_d` to `Λ_{d+1}`.
    pub fn left_mul_matrix(&self, i: usize, d: i32) -> Matrix {
        self.mul_matrix(i, d, false)
    }

    /// Matrix of right multiplication by `x_i` from `Λ_d` to `Λ_{d+1}`.
    pub fn right_mul_matrix(&self, i: usize, d: i32) -> Matrix {
        self.mul_matrix(i, d, true)
    }

    fn mul_matrix(&self, i: usize, d: i32, right: bool) -> Matrix {
        let p = self.p;
        let mut m = Matrix::zeros(p, self.dim(d + 1), self.dim(d));
        for (c, &s) in self.monomials(d).iter().enumerate() {
            let hit = if right {
                self.right_mul(i, s)
            } else {
                self.left_mul(i, s)
            };
            if let Some((t, neg)) = hit {
                m.set(self.monomial_index(t), c, if neg { neg_mod(1, p) } else { 1 });
            }
        }
        m
    }

    /// Λ itself, generated in degree 0.
    pub fn regular(&self) -> GradedModule {
        FreeModule::new(*self, vec![0]).module()
    }

    /// `Λ[-g]`: free of rank one with generator in degree `g`.
    pub fn free(&self, g: i32) -> GradedModule {
        FreeModule::new(*self, vec![g]).module()
    }

    /// The simple module `K` concentrated in degree `d`.
    pub fn simple(&self, d: i32) -> GradedModule {
        GradedModule::from_fn(*self, d, d, |_| 1, |_, _| Matrix::zeros(self.p, 0, 1))
    }
}

/// A free module `⊕ Λ[-g_i]`, basis ordered by generator then monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeModule {
    alg: Algebra,
    gens: Vec<i32>,
}

impl FreeModule {
    pub fn new(alg: Algebra, gens: Vec<i32>) -> Self {
        FreeModule { alg, gens }
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn generator_degrees(&self) -> &[i32] {
        &self.gens
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn dim(&self, d: i32) -> usize {
        self.gens.iter().map(|&g| self.alg.dim(d - g)).sum()
    }

    /// Offset of generator `i`'s block in degree `d`.
    pub fn offset(&self, d: i32, i: usize) -> usize {
        self.gens[..i].iter().map(|&g| self.alg.dim(d - g)).sum()
    }

    /// Coordinate of the basis element `e_S · gen_i`.
    pub fn index(&self, i: usize, mask: u32) -> usize {
        let d = self.gens[i] + mask.count_ones() as i32;
        self.offset(d, i) + self.alg.monomial_index(mask)
    }

    /// Basis elements of degree `d` as `(generator, mask)` pairs.
    pub fn basis(&self, d: i32) -> Vec<(usize, u32)> {
        let mut out = Vec::new();
        for (i, &g) in self.gens.iter().enumerate() {
            for s in self.alg.monomials(d - g) {
                out.push((i, s));
            }
        }
        out
    }

    /// Whether the coordinate lies in `J^j · F` (monomial length at least `j`).
    pub fn in_radical_power(&self, d: i32, j: usize) -> Vec<bool> {
        self.basis(d)
            .iter()
            .map(|&(_, s)| s.count_ones() as usize >= j)
            .collect()
    }

    pub fn module(&self) -> GradedModule {
        let alg = self.alg;
        if self.gens.is_empty() {
            return GradedModule::zero(alg);
        }
        let lo = *self.gens.iter().min().unwrap();
        let hi = *self.gens.iter().max().unwrap() + alg.nvars() as i32;
        GradedModule::from_fn(
            alg,
            lo,
            hi,
            |d| self.dim(d),
            |i, d| {
                let mut m = Matrix::zeros(alg.p(), self.dim(d + 1), self.dim(d));
                for (c, (g, s)) in self.basis(d).into_iter().enumerate() {
                    if let Some((t, neg)) = alg.left_mul(i, s) {
                        m.set(self.index(g, t), c, if neg { alg.p() - 1 } else { 1 });
                    }
                }
                m
            },
        )
    }

    /// The map `F → target` sending generator `i` to `images[i]`, a vector of
    /// `target` in degree `g_i + shift`.
    pub fn map_to(&self, target: &GradedModule, images: &[Vec<u32>], shift: i32) -> ModuleMap {
        assert_eq!(images.len(), self.gens.len());
        let src = self.module();
        let mono = target.monomial_images(&self.gens, images, shift);
        ModuleMap::from_fn(&src, target, shift, |d| {
            let mut m = Matrix::zeros(self.alg.p(), target.dim(d + shift), self.dim(d));
            for (c, (g, s)) in self.basis(d).into_iter().enumerate() {
                let v = &mono[g][s as usize];
                for (row, &x) in v.iter().enumerate() {
                    m.set(row, c, x);
                }
            }
            m
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_of_free_modules() {
        let a1 = Algebra::new(1, 7).unwrap();
        let f = a1.free(0);
        assert_eq!((f.d_min(), f.d_max()), (0, 2));
        assert_eq!(f.dims_vec(), vec![1, 2, 1]);
        let a2 = Algebra::new(2, 7).unwrap();
        assert_eq!(a2.free(0).dims_vec(), vec![1, 3, 3, 1]);
        let f3 = a1.free(3);
        assert_eq!((f3.d_min(), f3.d_max()), (3, 5));
        assert_eq!(f3.dims_vec(), vec![1, 2, 1]);
    }

    #[test]
    fn relations_hold_on_basis() {
        for r in 0..4 {
            let a = Algebra::new(r, 32003).unwrap();
            for i in 0..a.nvars() {
                for j in 0..a.nvars() {
                    for s in 0..(1u32 << a.nvars()) {
                        let ij = a
                            .left_mul(j, s)
                            .and_then(|(t, n1)| a.left_mul(i, t).map(|(u, n2)| (u, n1 ^ n2)));
                        let ji = a
                            .left_mul(i, s)
                            .and_then(|(t, n1)| a.left_mul(j, t).map(|(u, n2)| (u, n1 ^ n2)));
                        if i == j {
                            assert!(ij.is_none());
                        } else {
                            match (ij, ji) {
                                (Some((u, n1)), Some((v, n2))) => {
                                    assert_eq!(u, v);
                                    assert_ne!(n1, n2);
                                }
                                (None, None) => {}
                                _ => panic!("asymmetric vanishing"),
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn colex_rank_matches_listing() {
        let a = Algebra::new(3, 5).unwrap();
        for d in 0..=4 {
            for (k, m) in a.monomials(d).into_iter().enumerate() {
                assert_eq!(a.monomial_index(m), k);
            }
        }
    }
}
