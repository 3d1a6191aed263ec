use super::{GradedModule, GradedSubspace};
use crate::linalg::Matrix;

/// A graded Λ-linear map of internal degree `shift`: blocks
/// `f_d: source_d → target_{d+shift}` over the source window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    p: u32,
    shift: i32,
    src_min: i32,
    src_dims: Vec<usize>,
    tgt_min: i32,
    tgt_dims: Vec<usize>,
    blocks: Vec<Matrix>,
}

fn dim_at(min: i32, dims: &[usize], d: i32) -> usize {
    let k = d - min;
    if k < 0 || k as usize >= dims.len() {
        0
    } else {
        dims[k as usize]
    }
}

impl ModuleMap {
    pub fn from_fn(src: &GradedModule, tgt: &GradedModule, shift: i32, f: impl Fn(i32) -> Matrix) -> Self {
        let blocks = src
            .degrees()
            .map(|d| {
                let b = f(d);
                assert_eq!(
                    (b.rows(), b.cols()),
                    (tgt.dim(d + shift), src.dim(d)),
                    "map block at degree {d} has wrong shape"
                );
                b
            })
            .collect();
        ModuleMap {
            p: src.p(),
            shift,
            src_min: src.d_min(),
            src_dims: src.dims_vec(),
            tgt_min: tgt.d_min(),
            tgt_dims: tgt.dims_vec(),
            blocks,
        }
    }

    pub fn zero(src: &GradedModule, tgt: &GradedModule, shift: i32) -> Self {
        Self::from_fn(src, tgt, shift, |d| Matrix::zeros(src.p(), tgt.dim(d + shift), src.dim(d)))
    }

    pub fn identity(m: &GradedModule) -> Self {
        Self::from_fn(m, m, 0, |d| Matrix::identity(m.p(), m.dim(d)))
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn src_dim(&self, d: i32) -> usize {
        dim_at(self.src_min, &self.src_dims, d)
    }

    pub fn tgt_dim(&self, d: i32) -> usize {
        dim_at(self.tgt_min, &self.tgt_dims, d)
    }

    pub fn src_degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.src_min..=self.src_min + self.src_dims.len() as i32 - 1
    }

    /// `f_d` (a zero matrix off the source window).
    pub fn block(&self, d: i32) -> Matrix {
        let k = d - self.src_min;
        if k < 0 || k as usize >= self.blocks.len() {
            Matrix::zeros(self.p, self.tgt_dim(d + self.shift), 0)
        } else {
            self.blocks[k as usize].clone()
        }
    }

    pub fn block_ref(&self, d: i32) -> Option<&Matrix> {
        let k = d - self.src_min;
        if k < 0 || k as usize >= self.blocks.len() {
            None
        } else {
            Some(&self.blocks[k as usize])
        }
    }

    /// `self ∘ f`.
    pub fn compose(&self, f: &ModuleMap) -> ModuleMap {
        let shift = f.shift + self.shift;
        let blocks = f
            .src_degrees()
            .map(|d| {
                let e = d + f.shift;
                let inner = f.block(d);
                if self.src_dim(e) == 0 {
                    Matrix::zeros(self.p, self.tgt_dim(e + self.shift), inner.cols())
                } else {
                    self.block(e).mul(&inner)
                }
            })
            .collect();
        ModuleMap {
            p: self.p,
            shift,
            src_min: f.src_min,
            src_dims: f.src_dims.clone(),
            tgt_min: self.tgt_min,
            tgt_dims: self.tgt_dims.clone(),
            blocks,
        }
    }

    pub fn add(&self, other: &ModuleMap) -> ModuleMap {
        assert_eq!((self.shift, self.src_min, &self.src_dims), (other.shift, other.src_min, &other.src_dims));
        let mut out = self.clone();
        for (a, b) in out.blocks.iter_mut().zip(&other.blocks) {
            *a = a.add(b);
        }
        out
    }

    pub fn scale(&self, c: u32) -> ModuleMap {
        let mut out = self.clone();
        for a in &mut out.blocks {
            *a = a.scale(c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    /// Concatenated row-major entries of all blocks.
    pub fn flatten(&self) -> Vec<u32> {
        self.blocks.iter().flat_map(|b| b.data().iter().copied()).collect()
    }

    /// Rebuild a map with the same shape from flattened entries.
    pub fn with_flat(&self, flat: &[u32]) -> ModuleMap {
        let mut out = self.clone();
        let mut pos = 0;
        for b in &mut out.blocks {
            let n = b.rows() * b.cols();
            *b = Matrix::from_vec(self.p, b.rows(), b.cols(), flat[pos..pos + n].to_vec());
            pos += n;
        }
        out
    }

    /// Λ-linearity `f_{d+1} X_i = X_i f_d` against the given modules.
    pub fn is_linear(&self, src: &GradedModule, tgt: &GradedModule) -> bool {
        src.degrees().all(|d| {
            (0..src.algebra().nvars()).all(|i| {
                let lhs = self.block(d + 1).mul(&src.action(i, d));
                let rhs = tgt.action(i, d + self.shift).mul(&self.block(d));
                lhs == rhs
            })
        })
    }

    pub fn kernel(&self, src: &GradedModule) -> GradedSubspace {
        GradedSubspace::from_fn(src, |d| self.block(d).kernel_basis())
    }

    /// Image as a subspace of `tgt` (only meaningful for `shift == 0`).
    pub fn image(&self, tgt: &GradedModule) -> GradedSubspace {
        GradedSubspace::from_fn(tgt, |d| {
            let s = d - self.shift;
            if self.src_dim(s) == 0 {
                Matrix::zeros(self.p, tgt.dim(d), 0)
            } else {
                self.block(s).image_basis()
            }
        })
    }

    pub fn is_injective(&self) -> bool {
        self.src_degrees().all(|d| self.block(d).rank() == self.src_dim(d))
    }

    pub fn is_surjective(&self) -> bool {
        let lo = self.tgt_min;
        let hi = self.tgt_min + self.tgt_dims.len() as i32 - 1;
        (lo..=hi).all(|e| {
            let n = self.tgt_dim(e);
            n == 0 || self.block(e - self.shift).rank() == n
        })
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// `D(f): D(tgt) → D(src)`, given the two dual modules.
    pub fn dual(&self, dual_tgt: &GradedModule, dual_src: &GradedModule) -> ModuleMap {
        let s = self.shift;
        ModuleMap::from_fn(dual_tgt, dual_src, s, |d| self.block(-d - s).transpose())
    }

    /// Restrict the source to a submodule given by its inclusion.
    pub fn restrict(&self, inclusion: &ModuleMap) -> ModuleMap {
        self.compose(inclusion)
    }
}
