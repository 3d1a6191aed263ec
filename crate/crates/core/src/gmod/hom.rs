//! Graded Hom spaces computed from a presentation of the source: a map is
//! determined by the images of generators, subject to the relations.

use std::collections::HashMap;

use super::{FreeModule, GradedModule, GradedSubspace, ModuleMap};
use crate::linalg::Matrix;

/// Generators, the free cover, and the minimal relations of a module.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub generators: Vec<(i32, Vec<u32>)>,
    pub free: FreeModule,
    pub free_module: GradedModule,
    pub cover: ModuleMap,
    pub kernel: GradedSubspace,
    pub relations: Vec<(i32, Vec<u32>)>,
    sections: HashMap<i32, Matrix>,
}

impl Presentation {
    pub fn new(a: &GradedModule) -> Self {
        let generators = a.generators();
        let degs: Vec<i32> = generators.iter().map(|(d, _)| *d).collect();
        let images: Vec<Vec<u32>> = generators.iter().map(|(_, v)| v.clone()).collect();
        let free = FreeModule::new(a.algebra(), degs);
        let free_module = free.module();
        let cover = free.map_to(a, &images, 0);
        let kernel = cover.kernel(&free_module);
        let relations = free_module.subspace_generators(&kernel);
        let mut sections = HashMap::new();
        for d in a.degrees() {
            let c = cover.block(d);
            let s = c
                .solve_matrix(&Matrix::identity(a.p(), a.dim(d)))
                .expect("cover is surjective");
            sections.insert(d, s);
        }
        Presentation {
            generators,
            free,
            free_module,
            cover,
            kernel,
            relations,
            sections,
        }
    }

    /// Right inverse of the cover in degree `d`.
    pub fn section(&self, d: i32) -> Option<&Matrix> {
        self.sections.get(&d)
    }

    fn layout(&self, b: &GradedModule, s: i32) -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(self.free.rank());
        let mut n = 0;
        for &g in self.free.generator_degrees() {
            offsets.push(n);
            n += b.dim(g + s);
        }
        (offsets, n)
    }

    /// Solutions of the relation system: columns are generator-value vectors
    /// (generator `i`'s image occupies a block of length `dim b_{g_i+s}`).
    pub fn hom_values(&self, b: &GradedModule, s: i32) -> Matrix {
        let p = b.p();
        let (offsets, n) = self.layout(b, s);
        if n == 0 {
            return Matrix::zeros(p, 0, 0);
        }
        let gdeg = self.free.generator_degrees();
        let mut cache: HashMap<(u32, i32), Matrix> = HashMap::new();
        let mut blocks: Vec<Matrix> = Vec::new();
        for (d, rho) in &self.relations {
            let rows = b.dim(d + s);
            if rows == 0 {
                continue;
            }
            let mut eq = Matrix::zeros(p, rows, n);
            for (c, (i, mask)) in self.free.basis(*d).into_iter().enumerate() {
                let coef = rho[c];
                if coef == 0 {
                    continue;
                }
                let e = gdeg[i] + s;
                let w = b.dim(e);
                if w == 0 {
                    continue;
                }
                let xs = cache
                    .entry((mask, e))
                    .or_insert_with(|| b.monomial_action(mask, e));
                let contrib = xs.scale(coef);
                let cur = eq.block(0, offsets[i], rows, w);
                eq.set_block(0, offsets[i], &cur.add(&contrib));
            }
            blocks.push(eq);
        }
        let mut system = Matrix::zeros(p, 0, n);
        for blk in blocks {
            system = system.vstack(&blk);
        }
        system.kernel_basis()
    }

    /// The map determined by generator values (which must satisfy the
    /// relations).
    pub fn map_from_values(&self, src: &GradedModule, b: &GradedModule, s: i32, values: &[u32]) -> ModuleMap {
        let (offsets, _) = self.layout(b, s);
        let gdeg = self.free.generator_degrees();
        let images: Vec<Vec<u32>> = (0..self.free.rank())
            .map(|i| values[offsets[i]..offsets[i] + b.dim(gdeg[i] + s)].to_vec())
            .collect();
        let phi = self.free.map_to(b, &images, s);
        ModuleMap::from_fn(src, b, s, |d| phi.block(d).mul(&self.sections[&d]))
    }
}

/// Basis of `Hom_Λ(a, b)_s`: maps with `f(a_d) ⊆ b_{d+s}`.
pub fn hom_space(a: &GradedModule, b: &GradedModule, s: i32) -> Vec<ModuleMap> {
    if a.is_zero() || b.is_zero() {
        return Vec::new();
    }
    let pres = Presentation::new(a);
    hom_space_with(&pres, a, b, s)
}

pub fn hom_space_with(pres: &Presentation, a: &GradedModule, b: &GradedModule, s: i32) -> Vec<ModuleMap> {
    let sols = pres.hom_values(b, s);
    (0..sols.cols())
        .map(|k| pres.map_from_values(a, b, s, &sols.column(k)))
        .collect()
}

/// `End(M)_0` with structure constants: `basis[i] ∘ basis[j] = Σ_k table[i][j][k] basis[k]`.
#[derive(Clone, Debug)]
pub struct EndAlgebra {
    pub basis: Vec<ModuleMap>,
    pub table: Vec<Vec<Vec<u32>>>,
    flat: Matrix,
}

impl EndAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of an endomorphism in the basis.
    pub fn coords(&self, f: &ModuleMap) -> Vec<u32> {
        self.flat.solve(&f.flatten()).expect("not an endomorphism of degree 0")
    }

    /// The endomorphism with the given coordinates.
    pub fn element(&self, c: &[u32]) -> ModuleMap {
        let flat = self.flat.mul_vec(c);
        self.basis[0].with_flat(&flat)
    }

    /// Matrix of left multiplication by the element with coordinates `c`.
    pub fn left_mult_matrix(&self, c: &[u32]) -> Matrix {
        let n = self.dim();
        let p = self.flat.p();
        let mut m = Matrix::zeros(p, n, n);
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    let v = crate::linalg::mul_mod(ci, self.table[i][j][k], p);
                    m.set(k, j, crate::linalg::add_mod(m.get(k, j), v, p));
                }
            }
        }
        m
    }

    pub fn multiply(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        self.left_mult_matrix(a).mul_vec(b)
    }
}

pub fn end_algebra(m: &GradedModule) -> EndAlgebra {
    let basis = hom_space(m, m, 0);
    let p = m.p();
    let flat_cols: Vec<Vec<u32>> = basis.iter().map(|f| f.flatten()).collect();
    let len = flat_cols.first().map_or(0, |c| c.len());
    let flat = Matrix::from_columns(p, len, &flat_cols);
    let n = basis.len();
    let mut table = vec![vec![Vec::new(); n]; n];
    if n > 0 {
        let mut products = Vec::with_capacity(n * n);
        for bi in &basis {
            for bj in &basis {
                products.push(bi.compose(bj).flatten());
            }
        }
        let rhs = Matrix::from_columns(p, len, &products);
        let coords = flat.solve_matrix(&rhs).expect("End is closed under composition");
        for i in 0..n {
            for j in 0..n {
                table[i][j] = coords.column(i * n + j);
            }
        }
    }
    EndAlgebra { basis, table, flat }
}

/// Presentation of `m` and, per degree `n`, a basis of `Hom(m, Λ)_n` as
/// generator-value columns.
fn star_bases(m: &GradedModule) -> (Presentation, HashMap<i32, Matrix>) {
    let alg = m.algebra();
    let pres = Presentation::new(m);
    let lam = alg.regular();
    let gdeg = pres.free.generator_degrees();
    let lo = -gdeg.iter().max().unwrap();
    let hi = alg.nvars() as i32 - gdeg.iter().min().unwrap();
    let bases = (lo..=hi).map(|n| (n, pres.hom_values(&lam, n))).collect();
    (pres, bases)
}

/// `M^* = Hom_Λ(M, Λ)` as a graded left module: degree `n` holds maps with
/// `f(M_i) ⊆ Λ_{i+n}`, and `(x_j f)(v) = f(v) x_j`.
pub fn star(m: &GradedModule) -> GradedModule {
    let alg = m.algebra();
    if m.is_zero() {
        return GradedModule::zero(alg);
    }
    let (pres, bases) = star_bases(m);
    let gdeg: Vec<i32> = pres.free.generator_degrees().to_vec();
    let lo = *bases.keys().min().unwrap();
    let hi = *bases.keys().max().unwrap();
    let right = |j: usize, n: i32| {
        let mut r = Matrix::zeros(alg.p(), 0, 0);
        for &g in &gdeg {
            r = r.direct_sum(&alg.right_mul_matrix(j, g + n));
        }
        r
    };
    GradedModule::from_fn(
        alg,
        lo,
        hi,
        |n| bases[&n].cols(),
        |j, n| {
            let rhs = right(j, n).mul(&bases[&n]);
            bases[&(n + 1)]
                .solve_matrix(&rhs)
                .expect("right multiplication preserves linearity")
        },
    )
}

/// `f^*: b^* → a^*`, `φ ↦ φ ∘ f`, for a degree-0 map `f: a → b`; `sa`, `sb`
/// are `star(a)`, `star(b)`.
pub fn star_map(f: &ModuleMap, a: &GradedModule, b: &GradedModule, sa: &GradedModule, sb: &GradedModule) -> ModuleMap {
    assert_eq!(f.shift(), 0, "star_map expects a degree-0 map");
    if a.is_zero() || b.is_zero() {
        return ModuleMap::zero(sb, sa, 0);
    }
    let lam = a.algebra().regular();
    let (pres_a, bases_a) = star_bases(a);
    let (pres_b, bases_b) = star_bases(b);
    ModuleMap::from_fn(sb, sa, 0, |n| {
        let p = a.p();
        let cols: Vec<Vec<u32>> = (0..bases_b[&n].cols())
            .map(|k| {
                let phi = pres_b.map_from_values(b, &lam, n, &bases_b[&n].column(k));
                let mut vals = Vec::new();
                for (g, v) in &pres_a.generators {
                    vals.extend(phi.block(*g).mul(&f.block(*g)).mul_vec(v));
                }
                vals
            })
            .collect();
        let target = bases_a.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(p, 0, 0));
        if cols.is_empty() || target.cols() == 0 {
            return Matrix::zeros(p, sa.dim(n), cols.len());
        }
        let rhs = Matrix::from_columns(p, target.rows(), &cols);
        target.solve_matrix(&rhs).expect("precomposition stays Λ-linear")
    })
}
