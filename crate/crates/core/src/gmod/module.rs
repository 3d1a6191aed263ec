use std::collections::HashMap;

use serde::Serialize;

use super::{Algebra, GradedSubspace, ModuleMap};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A finite-dimensional graded left Λ-module.
///
/// `actions[i][k]` is `X_i` from degree `d_min + k` to `d_min + k + 1`. The
/// degree window is always tight; the zero module has an empty window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    alg: Algebra,
    d_min: i32,
    dims: Vec<usize>,
    actions: Vec<Vec<Matrix>>,
}

/// One failed relation: `i == j` for `x_i² = 0`, otherwise the
/// anticommutator of `x_i` and `x_j`, starting in degree `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub i: usize,
    pub j: usize,
    pub d: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validation {
    pub shape_errors: Vec<String>,
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.shape_errors.is_empty() && self.violations.is_empty()
    }
}

impl GradedModule {
    pub fn zero(alg: Algebra) -> Self {
        GradedModule {
            alg,
            d_min: 0,
            dims: Vec::new(),
            actions: vec![Vec::new(); alg.nvars()],
        }
    }

    /// Build over degrees `lo..=hi` from a dimension function and action
    /// blocks `act(i, d): dim(d) → dim(d+1)`; the window is then trimmed.
    pub fn from_fn(
        alg: Algebra,
        lo: i32,
        hi: i32,
        dim: impl Fn(i32) -> usize,
        act: impl Fn(usize, i32) -> Matrix,
    ) -> Self {
        if hi < lo {
            return Self::zero(alg);
        }
        let dims: Vec<usize> = (lo..=hi).map(&dim).collect();
        let actions = (0..alg.nvars())
            .map(|i| {
                (lo..=hi)
                    .map(|d| {
                        let rows = if d < hi { dims[(d - lo + 1) as usize] } else { 0 };
                        let cols = dims[(d - lo) as usize];
                        if rows == 0 || cols == 0 {
                            Matrix::zeros(alg.p(), rows, cols)
                        } else {
                            let m = act(i, d);
                            assert_eq!(
                                (m.rows(), m.cols()),
                                (rows, cols),
                                "action block x_{i} at degree {d} has wrong shape"
                            );
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        let mut m = GradedModule {
            alg,
            d_min: lo,
            dims,
            actions,
        };
        m.trim();
        m
    }

    /// Build from raw parts, checking shapes. Missing action blocks are zero.
    pub fn from_parts(
        alg: Algebra,
        d_min: i32,
        dims: Vec<usize>,
        actions: HashMap<(usize, i32), Matrix>,
    ) -> Result<Self> {
        let hi = d_min + dims.len() as i32 - 1;
        for (&(i, d), m) in &actions {
            if i >= alg.nvars() {
                return Err(Error::InvalidModule(format!("variable index {i} out of range")));
            }
            let cols = if d >= d_min && d <= hi { dims[(d - d_min) as usize] } else { 0 };
            let rows = if d + 1 >= d_min && d < hi { dims[(d + 1 - d_min) as usize] } else { 0 };
            if (m.rows(), m.cols()) != (rows, cols) {
                return Err(Error::InvalidModule(format!(
                    "action x_{i} at degree {d} is {}x{}, expected {rows}x{cols}",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.p() != alg.p() {
                return Err(Error::ContextMismatch("matrix modulus".into()));
            }
        }
        Ok(Self::from_fn(
            alg,
            d_min,
            hi,
            |d| dims[(d - d_min) as usize],
            |i, d| {
                actions.get(&(i, d)).cloned().unwrap_or_else(|| {
                    let rows = if d < hi { dims[(d + 1 - d_min) as usize] } else { 0 };
                    Matrix::zeros(alg.p(), rows, dims[(d - d_min) as usize])
                })
            },
        ))
    }

    fn trim(&mut self) {
        let first = self.dims.iter().position(|&n| n > 0);
        let Some(first) = first else {
            *self = Self::zero(self.alg);
            return;
        };
        let last = self.dims.iter().rposition(|&n| n > 0).unwrap();
        if first == 0 && last + 1 == self.dims.len() {
            return;
        }
        self.dims = self.dims[first..=last].to_vec();
        for acts in &mut self.actions {
            let mut kept: Vec<Matrix> = acts.drain(first..=last).collect();
            // The last kept block now maps into the zero space.
            let l = kept.len() - 1;
            kept[l] = Matrix::zeros(self.alg.p(), 0, self.dims[l]);
            *acts = kept;
        }
        self.d_min += first as i32;
    }

    pub fn algebra(&self) -> Algebra {
        self.alg
    }

    pub fn p(&self) -> u32 {
        self.alg.p()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    /// Lowest nonzero degree (0 for the zero module).
    pub fn d_min(&self) -> i32 {
        self.d_min
    }

    /// Highest nonzero degree (`d_min - 1` for the zero module).
    pub fn d_max(&self) -> i32 {
        self.d_min + self.dims.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.d_min()..=self.d_max()
    }

    pub fn dim(&self, d: i32) -> usize {
        if d < self.d_min || d > self.d_max() {
            0
        } else {
            self.dims[(d - self.d_min) as usize]
        }
    }

    pub fn dims_vec(&self) -> Vec<usize> {
        self.dims.clone()
    }

    /// `(degree, dim)` pairs over the window.
    pub fn dims_by_degree(&self) -> Vec<(i32, usize)> {
        self.degrees().map(|d| (d, self.dim(d))).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn action_ref(&self, i: usize, d: i32) -> Option<&Matrix> {
        if d < self.d_min || d > self.d_max() {
            None
        } else {
            Some(&self.actions[i][(d - self.d_min) as usize])
        }
    }

    /// `X_i: M_d → M_{d+1}` (a zero matrix of the right shape off the window).
    pub fn action(&self, i: usize, d: i32) -> Matrix {
        match self.action_ref(i, d) {
            Some(m) => m.clone(),
            None => Matrix::zeros(self.p(), self.dim(d + 1), self.dim(d)),
        }
    }

    /// All actions out of degree `d` stacked vertically.
    pub fn stacked_action(&self, d: i32) -> Matrix {
        let mut out = Matrix::zeros(self.p(), 0, self.dim(d));
        for i in 0..self.alg.nvars() {
            out = out.vstack(&self.action(i, d));
        }
        out
    }

    /// Checks both relation families exactly and lists every failure.
    pub fn validate(&self) -> Validation {
        let mut shape_errors = Vec::new();
        for i in 0..self.alg.nvars() {
            for d in self.degrees() {
                let m = &self.actions[i][(d - self.d_min) as usize];
                if (m.rows(), m.cols()) != (self.dim(d + 1), self.dim(d)) {
                    shape_errors.push(format!("x_{i} at degree {d}"));
                }
            }
        }
        let mut violations = Vec::new();
        if shape_errors.is_empty() {
            let n = self.alg.nvars();
            for d in self.degrees() {
                if self.dim(d + 2) == 0 {
                    continue;
                }
                for i in 0..n {
                    for j in i..n {
                        let a = self.action(i, d + 1).mul(&self.action(j, d));
                        let bad = if i == j {
                            !a.is_zero()
                        } else {
                            let b = self.action(j, d + 1).mul(&self.action(i, d));
                            !a.add(&b).is_zero()
                        };
                        if bad {
                            violations.push(Violation { i, j, d });
                        }
                    }
                }
            }
        }
        Validation {
            shape_errors,
            violations,
        }
    }

    /// `M[s]`, with `(M[s])_d = M_{d+s}`.
    pub fn shift(&self, s: i32) -> GradedModule {
        let mut m = self.clone();
        if !m.is_zero() {
            m.d_min -= s;
        }
        m
    }

    /// `M_{≥k}`.
    pub fn truncate(&self, k: i32) -> GradedModule {
        let lo = self.d_min.max(k);
        GradedModule::from_fn(self.alg, lo, self.d_max(), |d| self.dim(d), |i, d| self.action(i, d))
    }

    /// `M_{≤k}` as a quotient module.
    pub fn truncate_above(&self, k: i32) -> GradedModule {
        let hi = self.d_max().min(k);
        GradedModule::from_fn(self.alg, self.d_min, hi, |d| self.dim(d), |i, d| {
            if d == hi {
                Matrix::zeros(self.p(), 0, self.dim(d))
            } else {
                self.action(i, d)
            }
        })
    }

    /// `D(M)`: `D(M)_d = (M_{-d})^*` with `(x_i f)(v) = f(x_i v)`.
    pub fn dual(&self) -> GradedModule {
        if self.is_zero() {
            return self.clone();
        }
        GradedModule::from_fn(
            self.alg,
            -self.d_max(),
            -self.d_min,
            |d| self.dim(-d),
            |i, d| self.action(i, -d - 1).transpose(),
        )
    }

    /// Direct sum with the two canonical injections.
    pub fn direct_sum(&self, other: &GradedModule) -> Result<(GradedModule, ModuleMap, ModuleMap)> {
        if self.alg != other.alg {
            return Err(Error::ContextMismatch(format!(
                "direct sum of modules over {:?} and {:?}",
                self.alg, other.alg
            )));
        }
        let sum = direct_sum_all(self.alg, &[self, other]);
        let inj_a = ModuleMap::from_fn(self, &sum, 0, |d| {
            Matrix::identity(self.p(), self.dim(d)).vstack(&Matrix::zeros(self.p(), other.dim(d), self.dim(d)))
        });
        let inj_b = ModuleMap::from_fn(other, &sum, 0, |d| {
            Matrix::zeros(self.p(), self.dim(d), other.dim(d)).vstack(&Matrix::identity(self.p(), other.dim(d)))
        });
        Ok((sum, inj_a, inj_b))
    }

    /// `M^{⊕n}`.
    pub fn power(&self, n: usize) -> GradedModule {
        let parts: Vec<&GradedModule> = (0..n).map(|_| self).collect();
        direct_sum_all(self.alg, &parts)
    }

    /// Iterated images of monomials on given vectors: `out[g][S]` is
    /// `e_S · v_g`, where `v_g` lives in degree `degs[g] + shift`.
    pub fn monomial_images(&self, degs: &[i32], vectors: &[Vec<u32>], shift: i32) -> Vec<Vec<Vec<u32>>> {
        let n = self.alg.nvars();
        let mut out = Vec::with_capacity(vectors.len());
        for (g, v) in vectors.iter().enumerate() {
            let base = degs[g] + shift;
            assert_eq!(v.len(), self.dim(base), "generator image has wrong length");
            let mut imgs: Vec<Vec<u32>> = vec![Vec::new(); 1 << n];
            imgs[0] = v.clone();
            // Masks in increasing numeric order visit every S after S minus its
            // lowest bit.
            for s in 1u32..(1 << n) {
                let low = s.trailing_zeros() as usize;
                let prev = s & (s - 1);
                let d = base + prev.count_ones() as i32;
                let src = &imgs[prev as usize];
                imgs[s as usize] = if self.dim(d + 1) == 0 || src.is_empty() {
                    vec![0; self.dim(d + 1)]
                } else {
                    self.action_ref(low, d).unwrap().mul_vec(src)
                };
            }
            out.push(imgs);
        }
        out
    }

    /// Matrix of `e_S` acting from degree `d`.
    pub fn monomial_action(&self, mask: u32, d: i32) -> Matrix {
        let mut m = Matrix::identity(self.p(), self.dim(d));
        let mut deg = d;
        // e_S = x_{s_1} x_{s_2} ... x_{s_k}; apply the highest variable first.
        for i in (0..self.alg.nvars()).rev() {
            if mask >> i & 1 == 1 {
                m = self.action(i, deg).mul(&m);
                deg += 1;
            }
        }
        m
    }

    /// Per-degree bases of `J^j M`.
    pub fn radical_subspace(&self, j: usize) -> GradedSubspace {
        let mut cur = GradedSubspace::full(self);
        for _ in 0..j {
            cur = self.radical_of(&cur);
        }
        cur
    }

    /// `J · U` for a subspace `U` (need not be a submodule).
    pub fn radical_of(&self, sub: &GradedSubspace) -> GradedSubspace {
        GradedSubspace::from_fn(self, |d| {
            let prev = sub.basis(d - 1);
            let mut span = Matrix::zeros(self.p(), self.dim(d), 0);
            if prev.cols() > 0 {
                for i in 0..self.alg.nvars() {
                    span = span.hstack(&self.action(i, d - 1).mul(&prev));
                }
            }
            span.image_basis()
        })
    }

    /// `J^j M` with its inclusion.
    pub fn radical_power(&self, j: usize) -> (GradedModule, ModuleMap) {
        self.submodule(&self.radical_subspace(j))
    }

    /// Socle subspace: joint kernel of all `X_i`.
    pub fn socle_subspace(&self) -> GradedSubspace {
        GradedSubspace::from_fn(self, |d| self.stacked_action(d).kernel_basis())
    }

    pub fn socle(&self) -> (GradedModule, ModuleMap) {
        self.submodule(&self.socle_subspace())
    }

    /// `soc^k M`: `soc^{k+1}/soc^k = soc(M/soc^k)`, pulled back.
    pub fn socle_power_subspace(&self, k: usize) -> GradedSubspace {
        let mut cur = GradedSubspace::zero(self);
        for _ in 0..k {
            // v ∈ soc^{k+1} iff x_i v ∈ soc^k for all i.
            let prev = cur.clone();
            cur = GradedSubspace::from_fn(self, |d| {
                let target = prev.basis(d + 1);
                let x = self.stacked_action(d);
                let n = self.alg.nvars();
                let blocks = target.cols();
                // Solve x v = diag(target) c.
                let mut big = x.clone();
                let mut diag = Matrix::zeros(self.p(), x.rows(), n * blocks);
                for i in 0..n {
                    diag.set_block(i * target.rows(), i * blocks, target);
                }
                big = big.hstack(&diag.neg());
                let k = big.kernel_basis();
                k.block(0, 0, self.dim(d), k.cols()).image_basis()
            });
        }
        cur
    }

    /// `M / JM` with the projection.
    pub fn top(&self) -> (GradedModule, ModuleMap) {
        self.quotient(&self.radical_subspace(1))
    }

    /// `M / J²M`.
    pub fn loewy2(&self) -> GradedModule {
        self.quotient(&self.radical_subspace(2)).0
    }

    /// Least `L` with `J^L M = 0`.
    pub fn loewy_length(&self) -> usize {
        let mut cur = GradedSubspace::full(self);
        let mut l = 0;
        while cur.total_dim() > 0 {
            cur = self.radical_of(&cur);
            l += 1;
        }
        l
    }

    /// Generators: lifts of a basis of `M/JM`, as standard basis vectors,
    /// lowest degree first.
    pub fn generators(&self) -> Vec<(i32, Vec<u32>)> {
        let rad = self.radical_subspace(1);
        let mut out = Vec::new();
        for d in self.degrees() {
            for c in rad.basis(d).complement_coordinates() {
                let mut v = vec![0; self.dim(d)];
                v[c] = 1;
                out.push((d, v));
            }
        }
        out
    }

    /// Degrees of a minimal generating set, with multiplicity.
    pub fn generator_degrees(&self) -> Vec<i32> {
        let rad = self.radical_subspace(1);
        let mut out = Vec::new();
        for d in self.degrees() {
            for _ in 0..self.dim(d) - rad.dim(d) {
                out.push(d);
            }
        }
        out
    }

    /// Degrees of a basis of the socle, with multiplicity.
    pub fn socle_degrees(&self) -> Vec<i32> {
        let soc = self.socle_subspace();
        let mut out = Vec::new();
        for d in self.degrees() {
            for _ in 0..soc.dim(d) {
                out.push(d);
            }
        }
        out
    }

    /// Minimal generators of a submodule given by a subspace, in ambient
    /// coordinates.
    pub fn subspace_generators(&self, sub: &GradedSubspace) -> Vec<(i32, Vec<u32>)> {
        let rad = self.radical_of(sub);
        let mut out = Vec::new();
        for d in self.degrees() {
            let u = sub.basis(d);
            if u.cols() == 0 {
                continue;
            }
            let r = rad.basis(d);
            let (_, piv) = r.hstack(u).rref();
            for c in piv.into_iter().filter(|&c| c >= r.cols()) {
                out.push((d, u.column(c - r.cols())));
            }
        }
        out
    }

    /// Submodule generated by the given homogeneous vectors.
    pub fn generated_by(&self, vectors: &[(i32, Vec<u32>)]) -> GradedSubspace {
        let degs: Vec<i32> = vectors.iter().map(|(d, _)| *d).collect();
        let vecs: Vec<Vec<u32>> = vectors.iter().map(|(_, v)| v.clone()).collect();
        let imgs = self.monomial_images(&degs, &vecs, 0);
        GradedSubspace::from_fn(self, |d| {
            let mut cols = Vec::new();
            for (g, &dg) in degs.iter().enumerate() {
                let k = d - dg;
                if k < 0 {
                    continue;
                }
                for s in self.alg.monomials(k) {
                    cols.push(imgs[g][s as usize].clone());
                }
            }
            Matrix::from_columns(self.p(), self.dim(d), &cols).image_basis()
        })
    }

    /// Whether a per-degree subspace is closed under every `X_i`.
    pub fn is_submodule(&self, sub: &GradedSubspace) -> bool {
        self.degrees().all(|d| {
            let b = sub.basis(d);
            (0..self.alg.nvars()).all(|i| sub.basis(d + 1).spans(&self.action(i, d).mul(b)))
        })
    }

    /// The submodule on a closed subspace, with its inclusion.
    pub fn submodule(&self, sub: &GradedSubspace) -> (GradedModule, ModuleMap) {
        let m = GradedModule::from_fn(
            self.alg,
            self.d_min,
            self.d_max(),
            |d| sub.dim(d),
            |i, d| {
                let rhs = self.action(i, d).mul(sub.basis(d));
                sub.basis(d + 1)
                    .solve_matrix(&rhs)
                    .expect("subspace is not closed under the action")
            },
        );
        let inc = ModuleMap::from_fn(&m, self, 0, |d| sub.basis(d).clone());
        (m, inc)
    }

    /// `M / U` with the projection; `U` must be a submodule.
    pub fn quotient(&self, sub: &GradedSubspace) -> (GradedModule, ModuleMap) {
        let p = self.p();
        let mut proj: HashMap<i32, Matrix> = HashMap::new();
        let mut lift: HashMap<i32, Matrix> = HashMap::new();
        for d in self.degrees() {
            let u = sub.basis(d);
            let comp = u.complement_coordinates();
            let mut e = Matrix::zeros(p, self.dim(d), comp.len());
            for (k, &c) in comp.iter().enumerate() {
                e.set(c, k, 1);
            }
            let full = u.hstack(&e);
            let inv = full.inverse().expect("subspace basis is not independent");
            let q = inv.block(u.cols(), 0, comp.len(), self.dim(d));
            proj.insert(d, q);
            lift.insert(d, e);
        }
        let qdim = |d: i32| proj.get(&d).map_or(0, |q| q.rows());
        let m = GradedModule::from_fn(self.alg, self.d_min, self.d_max(), qdim, |i, d| {
            proj[&(d + 1)].mul(&self.action(i, d)).mul(&lift[&d])
        });
        let pi = ModuleMap::from_fn(self, &m, 0, |d| {
            proj.get(&d).cloned().unwrap_or_else(|| Matrix::zeros(p, m.dim(d), self.dim(d)))
        });
        (m, pi)
    }
}

/// Direct sum of several modules over the same algebra.
pub fn direct_sum_all(alg: Algebra, parts: &[&GradedModule]) -> GradedModule {
    let nonzero: Vec<&&GradedModule> = parts.iter().filter(|m| !m.is_zero()).collect();
    if nonzero.is_empty() {
        return GradedModule::zero(alg);
    }
    let lo = nonzero.iter().map(|m| m.d_min()).min().unwrap();
    let hi = nonzero.iter().map(|m| m.d_max()).max().unwrap();
    GradedModule::from_fn(
        alg,
        lo,
        hi,
        |d| parts.iter().map(|m| m.dim(d)).sum(),
        |i, d| {
            let mut acc = Matrix::zeros(alg.p(), 0, 0);
            for m in parts {
                acc = acc.direct_sum(&m.action(i, d));
            }
            acc
        },
    )
}
