//! Naive reference computations that share no code with the resolution,
//! Koszul or sheaf engines: monomial counts for the cohomology of `O(n)`,
//! Ext through two unrelated routes, and the Kronecker dimension recurrence.
//!
//! Only the matrix layer and the module type are reused.

use serde::Serialize;

use crate::gmod::{Algebra, GradedModule};
use crate::linalg::{Matrix, DEFAULT_P};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub value: u64,
    pub method: &'static str,
}

/// Monomials of degree `n` in `vars` variables, by enumeration.
fn count_monomials(vars: usize, n: i64) -> u64 {
    if n < 0 {
        return 0;
    }
    if vars == 0 {
        return (n == 0) as u64;
    }
    (0..=n).map(|a| count_monomials(vars - 1, n - a)).sum()
}

/// `h^q(P^r, O(n))` by counting Laurent monomials in the Čech complex:
/// global sections are monomials of degree `n`, top cohomology is spanned by
/// monomials with every exponent negative.
pub fn cech_o(r: usize, n: i64, q: usize) -> OracleResult {
    let value = if q == 0 {
        count_monomials(r + 1, n)
    } else if q == r {
        // x^a with every a_i ≤ -1 and Σ a_i = n: shift exponents by one.
        count_monomials(r + 1, -n - (r as i64 + 1))
    } else {
        0
    };
    OracleResult {
        value,
        method: "cech_monomials",
    }
}

/// Dimension vectors `(dim M_0, dim M_1)` of the preinjective modules over the
/// separated quiver with `r+1` arrows: `X_0 = K`, `X_1 = soc² Λ` normalized to
/// start in degree 0, then `d_{k+1} = (r+1) d_k - d_{k-1}`.
pub fn kronecker_dims(r: usize, k: usize) -> (u64, u64) {
    let a = r as i64 + 1;
    let (mut prev, mut cur) = ((1i64, 0i64), (a, 1i64));
    if k == 0 {
        return (1, 0);
    }
    for _ in 1..k {
        let next = (a * cur.0 - prev.0, a * cur.1 - prev.1);
        prev = cur;
        cur = next;
    }
    (cur.0 as u64, cur.1 as u64)
}

/// Left multiplication `x_i · e_S` on subsets, as (target, sign).
fn left_mult(i: usize, s: u32) -> Option<(u32, bool)> {
    if s >> i & 1 == 1 {
        return None;
    }
    let below = (s & ((1u32 << i) - 1)).count_ones();
    Some((s | 1 << i, below % 2 == 1))
}

/// A free module with generators in the given degrees, built directly from
/// the multiplication rule; basis ordered by generator, then subset value.
struct Free {
    alg: Algebra,
    gens: Vec<i32>,
}

impl Free {
    fn basis(&self, d: i32) -> Vec<(usize, u32)> {
        let n = self.alg.nvars();
        let mut out = Vec::new();
        for (g, &gd) in self.gens.iter().enumerate() {
            for s in 0u32..(1 << n) {
                if gd + s.count_ones() as i32 == d {
                    out.push((g, s));
                }
            }
        }
        out
    }

    fn module(&self) -> GradedModule {
        let alg = self.alg;
        if self.gens.is_empty() {
            return GradedModule::zero(alg);
        }
        let lo = *self.gens.iter().min().unwrap();
        let hi = *self.gens.iter().max().unwrap() + alg.nvars() as i32;
        let p = alg.p();
        GradedModule::from_fn(
            alg,
            lo,
            hi,
            |d| self.basis(d).len(),
            |i, d| {
                let src = self.basis(d);
                let tgt = self.basis(d + 1);
                let mut m = Matrix::zeros(p, tgt.len(), src.len());
                for (c, &(g, s)) in src.iter().enumerate() {
                    if let Some((t, neg)) = left_mult(i, s) {
                        let row = tgt.iter().position(|&b| b == (g, t)).unwrap();
                        m.set(row, c, if neg { p - 1 } else { 1 });
                    }
                }
                m
            },
        )
    }
}

/// `e_S · v` for `v` in degree `d`, applying variables from the highest index
/// down (so `e_S = x_{s_1} ⋯ x_{s_k}` with `s_1 < ⋯ < s_k`).
fn apply_monomial(m: &GradedModule, s: u32, d: i32, v: &[u32]) -> Vec<u32> {
    let mut cur = v.to_vec();
    let mut deg = d;
    for i in (0..m.algebra().nvars()).rev() {
        if s >> i & 1 == 1 {
            if m.dim(deg + 1) == 0 {
                return Vec::new();
            }
            cur = m.action(i, deg).mul_vec(&cur);
            deg += 1;
        }
    }
    cur
}

/// The map `F → M` sending generator `g` to `images[g]`, as per-degree blocks.
fn free_map(f: &Free, fm: &GradedModule, target: &GradedModule, images: &[Vec<u32>]) -> Vec<(i32, Matrix)> {
    let p = target.p();
    fm.degrees()
        .map(|d| {
            let basis = f.basis(d);
            let mut blk = Matrix::zeros(p, target.dim(d), basis.len());
            for (c, &(g, s)) in basis.iter().enumerate() {
                let v = apply_monomial(target, s, f.gens[g], &images[g]);
                for (row, &x) in v.iter().enumerate() {
                    blk.set(row, c, x);
                }
            }
            (d, blk)
        })
        .collect()
}

/// Greedy minimal generators: walk degrees upward and keep basis vectors
/// outside the span of what the chosen ones already generate.
fn naive_generators(m: &GradedModule) -> Vec<(i32, Vec<u32>)> {
    let mut chosen: Vec<(i32, Vec<u32>)> = Vec::new();
    let p = m.p();
    for d in m.degrees() {
        let mut span: Vec<Vec<u32>> = Vec::new();
        for (gd, v) in &chosen {
            let k = d - gd;
            if k < 0 {
                continue;
            }
            for s in 0u32..(1 << m.algebra().nvars()) {
                if s.count_ones() as i32 == k {
                    let w = apply_monomial(m, s, *gd, v);
                    if !w.is_empty() {
                        span.push(w);
                    }
                }
            }
        }
        let n = m.dim(d);
        for c in 0..n {
            let mut e = vec![0; n];
            e[c] = 1;
            let before = Matrix::from_columns(p, n, &span).rank();
            span.push(e.clone());
            if Matrix::from_columns(p, n, &span).rank() > before {
                chosen.push((d, e));
            } else {
                span.pop();
            }
        }
    }
    chosen
}

/// Minimal resolution data: free terms and differentials (`d_k: F_k → F_{k-1}`
/// given by generator images in `F_{k-1}`), built without the engine.
struct NaiveResolution {
    terms: Vec<Free>,
    /// `images[k]`: images of generators of `F_{k+1}` inside `F_k`.
    images: Vec<Vec<Vec<u32>>>,
}

fn naive_resolution(m: &GradedModule, length: usize) -> NaiveResolution {
    let alg = m.algebra();
    let mut terms = Vec::new();
    let mut images = Vec::new();
    // Current module to cover, with an embedding into the previous free term.
    let mut cur = m.clone();
    let mut embed: Option<Vec<(i32, Matrix)>> = None;
    for _ in 0..=length {
        let gens = naive_generators(&cur);
        let f = Free {
            alg,
            gens: gens.iter().map(|(d, _)| *d).collect(),
        };
        let imgs: Vec<Vec<u32>> = gens.iter().map(|(_, v)| v.clone()).collect();
        if let Some(e) = &embed {
            let pushed: Vec<Vec<u32>> = gens
                .iter()
                .map(|(d, v)| {
                    let blk = &e.iter().find(|(dd, _)| dd == d).unwrap().1;
                    blk.mul_vec(v)
                })
                .collect();
            images.push(pushed);
        }
        let fm = f.module();
        let blocks = free_map(&f, &fm, &cur, &imgs);
        // Kernel with its action, in plain kernel-basis coordinates.
        let kers: Vec<(i32, Matrix)> = blocks.iter().map(|(d, b)| (*d, b.kernel_basis())).collect();
        let kdim = |d: i32| kers.iter().find(|(dd, _)| *dd == d).map_or(0, |(_, k)| k.cols());
        let kb = |d: i32| kers.iter().find(|(dd, _)| *dd == d).unwrap().1.clone();
        let next = if fm.is_zero() {
            GradedModule::zero(alg)
        } else {
            GradedModule::from_fn(alg, fm.d_min(), fm.d_max(), kdim, |i, d| {
                let img = fm.action(i, d).mul(&kb(d));
                kb(d + 1).solve_matrix(&img).expect("kernel is a submodule")
            })
        };
        let emb: Vec<(i32, Matrix)> = next.degrees().map(|d| (d, kb(d))).collect();
        terms.push(f);
        cur = next;
        embed = Some(emb);
    }
    NaiveResolution { terms, images }
}

/// Degree-0 maps `a → b` as flattened block vectors: solve the commutation
/// equations `f_{d+1} X_i^a = X_i^b f_d` for all blocks at once.
fn naive_hom(a: &GradedModule, b: &GradedModule) -> (Vec<i32>, Matrix) {
    let p = a.p();
    let degs: Vec<i32> = a.degrees().filter(|&d| b.dim(d) > 0).collect();
    let mut offset = std::collections::HashMap::new();
    let mut n = 0;
    for &d in &degs {
        offset.insert(d, n);
        n += b.dim(d) * a.dim(d);
    }
    if n == 0 {
        return (degs, Matrix::zeros(p, 0, 0));
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for d in a.degrees() {
        for i in 0..a.algebra().nvars() {
            // Entry (s,t) of f_{d+1} X_i^a(d) - X_i^b(d) f_d, with X from degree d.
            let (ad, ad1, bd1) = (a.dim(d), a.dim(d + 1), b.dim(d + 1));
            if ad == 0 || bd1 == 0 {
                continue;
            }
            let xa = a.action(i, d);
            let xb = b.action(i, d);
            for s in 0..bd1 {
                for t in 0..ad {
                    let mut row = vec![0u32; n];
                    if let Some(&o) = offset.get(&(d + 1)) {
                        for u in 0..ad1 {
                            let c = xa.get(u, t);
                            if c != 0 {
                                let idx = o + s * ad1 + u;
                                row[idx] = (row[idx] + c) % p;
                            }
                        }
                    }
                    if let Some(&o) = offset.get(&d) {
                        for u in 0..b.dim(d) {
                            let c = xb.get(s, u);
                            if c != 0 {
                                let idx = o + u * ad + t;
                                row[idx] = (row[idx] + p - c) % p;
                            }
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    let sys = Matrix::from_vec(p, rows.len(), n, rows.concat());
    (degs, sys.kernel_basis())
}

/// Dimension of the homology `ker(next) / im(prev)` at a term of dimension
/// `dim`, from matrices of the adjacent maps (`prev` into, `next` out of).
fn homology(dim: usize, prev: Option<&Matrix>, next: Option<&Matrix>) -> u64 {
    let z = dim - next.map_or(0, |m| m.rank());
    let b = prev.map_or(0, |m| m.rank());
    (z - b) as u64
}

/// `dim Ext^k(a, b)_0` through a projective resolution of `a`:
/// `Hom(F_j, b)_0 = ⊕_generators b_{g}`.
fn ext_via_projective(a: &GradedModule, b: &GradedModule, k: usize) -> u64 {
    let res = naive_resolution(a, k + 1);
    let p = a.p();
    let hom_dim = |f: &Free| f.gens.iter().map(|&g| b.dim(g)).sum::<usize>();
    // Matrix of Hom(F_j, b) → Hom(F_{j+1}, b), φ ↦ φ ∘ d_{j+1}.
    let cochain = |j: usize| -> Matrix {
        let src = &res.terms[j];
        let tgt = &res.terms[j + 1];
        let mut m = Matrix::zeros(p, hom_dim(tgt), hom_dim(src));
        let mut col = 0;
        for (g, &gd) in src.gens.iter().enumerate() {
            for c in 0..b.dim(gd) {
                // φ sends generator g to the unit vector c of b_{gd}.
                let mut row = 0;
                for (h, &hd) in tgt.gens.iter().enumerate() {
                    let img = &res.images[j][h];
                    let basis = src.basis(hd);
                    let mut acc = vec![0u32; b.dim(hd)];
                    for (idx, &(gg, s)) in basis.iter().enumerate() {
                        if gg != g || img[idx] == 0 {
                            continue;
                        }
                        let mut e = vec![0; b.dim(gd)];
                        e[c] = 1;
                        let w = apply_monomial(b, s, gd, &e);
                        for (t, &x) in w.iter().enumerate() {
                            acc[t] = (acc[t] as u64 + img[idx] as u64 * x as u64 % p as u64) as u32 % p;
                        }
                    }
                    for (t, &x) in acc.iter().enumerate() {
                        m.set(row + t, col, x);
                    }
                    row += b.dim(hd);
                }
                col += 1;
            }
        }
        m
    };
    let next = cochain(k);
    let prev = if k > 0 { Some(cochain(k - 1)) } else { None };
    homology(hom_dim(&res.terms[k]), prev.as_ref(), Some(&next))
}

/// `dim Ext^k(a, b)_0` through an injective coresolution of `b`, obtained by
/// dualizing a naive resolution of `D(b)`; cochains are `Hom(a, I^j)_0`.
fn ext_via_injective(a: &GradedModule, b: &GradedModule, k: usize) -> u64 {
    let db = b.dual();
    let res = naive_resolution(&db, k + 1);
    let p = a.p();
    let frees: Vec<GradedModule> = res.terms.iter().map(|f| f.module()).collect();
    let injs: Vec<GradedModule> = frees.iter().map(|f| f.dual()).collect();
    // Differential F_{j+1} → F_j as blocks, then dualized to I^j → I^{j+1}.
    let diff_blocks = |j: usize, d: i32| -> Matrix {
        let src = &res.terms[j + 1];
        let tgt_mod = &frees[j];
        let imgs = &res.images[j];
        let blocks = free_map(src, &frees[j + 1], tgt_mod, imgs);
        blocks
            .into_iter()
            .find(|(dd, _)| *dd == d)
            .map(|(_, m)| m)
            .unwrap_or_else(|| Matrix::zeros(p, tgt_mod.dim(d), frees[j + 1].dim(d)))
    };
    // Hom(a, I^j)_0 basis and the induced map to Hom(a, I^{j+1})_0.
    let homs: Vec<(Vec<i32>, Matrix)> = (0..=k + 1).map(|j| naive_hom(a, &injs[j])).collect();
    let flat_len = |j: usize| -> usize { homs[j].0.iter().map(|&d| injs[j].dim(d) * a.dim(d)).sum() };
    let induced = |j: usize| -> Matrix {
        let (degs_s, basis_s) = &homs[j];
        let (degs_t, basis_t) = &homs[j + 1];
        let mut cols = Vec::new();
        for c in 0..basis_s.cols() {
            let v = basis_s.column(c);
            let mut out = vec![0u32; flat_len(j + 1)];
            let mut pos_s = 0;
            let mut pos_t_of = std::collections::HashMap::new();
            let mut acc = 0;
            for &d in degs_t {
                pos_t_of.insert(d, acc);
                acc += injs[j + 1].dim(d) * a.dim(d);
            }
            for &d in degs_s {
                let rows = injs[j].dim(d);
                let cols_a = a.dim(d);
                let f = Matrix::from_vec(p, rows, cols_a, v[pos_s..pos_s + rows * cols_a].to_vec());
                pos_s += rows * cols_a;
                if let Some(&o) = pos_t_of.get(&d) {
                    // I^j_d → I^{j+1}_d is the transpose of F_{j+1,-d} → F_{j,-d}.
                    let g = diff_blocks(j, -d).transpose().mul(&f);
                    out[o..o + g.rows() * g.cols()].copy_from_slice(g.data());
                }
            }
            cols.push(out);
        }
        let target_basis = basis_t;
        if cols.is_empty() || target_basis.cols() == 0 {
            return Matrix::zeros(p, target_basis.cols(), cols.len());
        }
        let rhs = Matrix::from_columns(p, flat_len(j + 1), &cols);
        target_basis.solve_matrix(&rhs).expect("composite is a module map")
    };
    let dim_k = homs[k].1.cols();
    let next = induced(k);
    let prev = if k > 0 { Some(induced(k - 1)) } else { None };
    homology(dim_k, prev.as_ref(), Some(&next))
}

/// `dim Ext^k_Λ(a, b)_0`, once through a projective resolution of `a` and
/// once through an injective coresolution of `b`.
pub fn ext_two_ways(a: &GradedModule, b: &GradedModule, k: usize) -> (u64, u64) {
    (ext_via_projective(a, b, k), ext_via_injective(a, b, k))
}

/// The residue field over `r+1` variables, built without the module
/// constructors of the engine.
pub fn residue_field(r: usize) -> GradedModule {
    let alg = Algebra::new(r, DEFAULT_P).expect("valid algebra");
    Free { alg, gens: vec![0] }.module().truncate_above(0)
}
