//! Randomized isomorphism tests and idempotent splitting of modules.
//!
//! A positive isomorphism verdict is always exact (an invertible degree-0 map
//! was found). Indecomposability is exact when `End(M)_0` modulo its radical
//! is one-dimensional; otherwise splitting is searched with random elements
//! and Fitting decompositions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{end_algebra, hom_space, EndAlgebra, GradedModule, GradedSubspace, ModuleMap};
use crate::linalg::{add_mod, inv_mod, mul_mod, neg_mod, sub_mod, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub value: bool,
    /// False when the answer rests on an exhausted random search.
    pub certain: bool,
}

impl Verdict {
    pub fn exact(value: bool) -> Self {
        Verdict { value, certain: true }
    }
}

pub(crate) fn random_combination(rng: &mut ChaCha8Rng, basis: &[ModuleMap], p: u32) -> ModuleMap {
    let mut acc = basis[0].scale(rng.gen_range(0..p));
    for b in &basis[1..] {
        acc = acc.add(&b.scale(rng.gen_range(0..p)));
    }
    acc
}

/// Search for a degree-0 isomorphism `a → b`.
pub fn find_isomorphism(a: &GradedModule, b: &GradedModule, seed: u64, trials: usize) -> Option<ModuleMap> {
    if a.dims_by_degree() != b.dims_by_degree() {
        return None;
    }
    if a.is_zero() {
        return Some(ModuleMap::zero(a, b, 0));
    }
    let basis = hom_space(a, b, 0);
    if basis.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials.max(1) {
        let f = random_combination(&mut rng, &basis, a.p());
        if f.is_isomorphism() {
            return Some(f);
        }
    }
    None
}

pub fn is_isomorphic(a: &GradedModule, b: &GradedModule, seed: u64, trials: usize) -> Verdict {
    if a.algebra() != b.algebra() || a.dims_by_degree() != b.dims_by_degree() {
        return Verdict::exact(false);
    }
    if find_isomorphism(a, b, seed, trials).is_some() {
        return Verdict::exact(true);
    }
    // With no maps at all the answer is exact too.
    let certain = hom_space(a, b, 0).is_empty();
    Verdict { value: false, certain }
}

fn radical_dim(e: &EndAlgebra, p: u32) -> Option<usize> {
    radical_basis(e, p).map(|b| b.cols())
}

/// Coordinates (as columns) of a basis of the Jacobson radical of `End`,
/// from the kernel of the trace form; `None` when `p ≤ dim End`.
pub fn radical_basis(e: &EndAlgebra, p: u32) -> Option<Matrix> {
    let n = e.dim();
    if (p as usize) <= n {
        return None;
    }
    let lm: Vec<Matrix> = (0..n)
        .map(|i| {
            let mut c = vec![0; n];
            c[i] = 1;
            e.left_mult_matrix(&c)
        })
        .collect();
    let mut t = Matrix::zeros(p, n, n);
    for i in 0..n {
        for j in 0..n {
            let prod = lm[i].mul(&lm[j]);
            let mut tr = 0;
            for k in 0..n {
                tr = add_mod(tr, prod.get(k, k), p);
            }
            t.set(i, j, tr);
        }
    }
    Some(t.kernel_basis())
}

/// A direct summand with its inclusion into and projection from the parent.
#[derive(Clone, Debug)]
pub struct Summand {
    pub module: GradedModule,
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

/// Look for an endomorphism whose Fitting decomposition is nontrivial.
fn find_split(m: &GradedModule, e: &EndAlgebra, seed: u64, trials: usize) -> Option<(GradedSubspace, GradedSubspace)> {
    let p = m.p();
    let n = e.dim();
    if n <= 1 {
        return None;
    }
    let id = e.coords(&ModuleMap::identity(m));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let power = m.degrees().map(|d| m.dim(d)).max().unwrap_or(1).max(1);
    for _ in 0..trials.max(1) {
        let c: Vec<u32> = (0..n).map(|_| rng.gen_range(0..p)).collect();
        let mu = min_poly(e, &c, &id, p);
        for lambda in roots(&mu, p, &mut rng) {
            // (x - λ)^k == μ means f - λ is nilpotent: no split from λ.
            if mu.len() - 1 == multiplicity(&mu, lambda, p) {
                continue;
            }
            let f = e.element(&c);
            let g = ModuleMap::from_fn(m, m, 0, |d| {
                let b = f.block(d).sub(&Matrix::identity(p, m.dim(d)).scale(lambda));
                matrix_power(&b, power)
            });
            let im = g.image(m);
            let ker = g.kernel(m);
            if im.total_dim() > 0 && ker.total_dim() > 0 {
                return Some((im, ker));
            }
        }
    }
    None
}

pub fn is_indecomposable(m: &GradedModule, seed: u64, trials: usize) -> Verdict {
    if m.is_zero() {
        return Verdict::exact(false);
    }
    let e = end_algebra(m);
    if let Some(rad) = radical_dim(&e, m.p()) {
        if e.dim() - rad == 1 {
            return Verdict::exact(true);
        }
    }
    match find_split(m, &e, seed, trials) {
        Some(_) => Verdict::exact(false),
        None => Verdict {
            value: true,
            certain: false,
        },
    }
}

/// Split into indecomposable summands. The flag is false if any summand's
/// indecomposability rests on an exhausted search.
pub fn decompose(m: &GradedModule, seed: u64, trials: usize) -> (Vec<Summand>, bool) {
    if m.is_zero() {
        return (Vec::new(), true);
    }
    let e = end_algebra(m);
    if let Some(rad) = radical_dim(&e, m.p()) {
        if e.dim() - rad == 1 {
            return (vec![trivial_summand(m)], true);
        }
    }
    let Some((u, w)) = find_split(m, &e, seed, trials) else {
        return (vec![trivial_summand(m)], false);
    };
    let (mu, inc_u) = m.submodule(&u);
    let (mw, inc_w) = m.submodule(&w);
    let proj_u = ModuleMap::from_fn(m, &mu, 0, |d| {
        let full = u.basis(d).hstack(w.basis(d));
        let inv = full.inverse().expect("Fitting decomposition is direct");
        inv.block(0, 0, u.dim(d), m.dim(d))
    });
    let proj_w = ModuleMap::from_fn(m, &mw, 0, |d| {
        let full = u.basis(d).hstack(w.basis(d));
        let inv = full.inverse().expect("Fitting decomposition is direct");
        inv.block(u.dim(d), 0, w.dim(d), m.dim(d))
    });
    let mut out = Vec::new();
    let mut sure = true;
    for (sub, inc, proj) in [(mu, inc_u, proj_u), (mw, inc_w, proj_w)] {
        let (parts, ok) = decompose(&sub, seed.wrapping_add(1), trials);
        sure &= ok;
        for s in parts {
            out.push(Summand {
                module: s.module,
                inclusion: inc.compose(&s.inclusion),
                projection: s.projection.compose(&proj),
            });
        }
    }
    (out, sure)
}

fn trivial_summand(m: &GradedModule) -> Summand {
    Summand {
        module: m.clone(),
        inclusion: ModuleMap::identity(m),
        projection: ModuleMap::identity(m),
    }
}

fn matrix_power(b: &Matrix, mut e: usize) -> Matrix {
    let mut acc = Matrix::identity(b.p(), b.rows());
    let mut base = b.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    acc
}

/// Minimal polynomial (monic, low degree first) of the element `c`.
fn min_poly(e: &EndAlgebra, c: &[u32], id: &[u32], p: u32) -> Vec<u32> {
    let lm = e.left_mult_matrix(c);
    let mut krylov: Vec<Vec<u32>> = vec![id.to_vec()];
    loop {
        let next = lm.mul_vec(krylov.last().unwrap());
        let basis = Matrix::from_columns(p, id.len(), &krylov);
        if let Ok(a) = basis.solve(&next) {
            let mut mu: Vec<u32> = a.iter().map(|&x| neg_mod(x, p)).collect();
            mu.push(1);
            return mu;
        }
        krylov.push(next);
    }
}

fn multiplicity(f: &[u32], lambda: u32, p: u32) -> usize {
    let mut k = 0;
    let mut cur = f.to_vec();
    loop {
        let (q, r) = div_linear(&cur, lambda, p);
        if r != 0 {
            return k;
        }
        k += 1;
        cur = q;
        if cur.len() <= 1 {
            return k;
        }
    }
}

/// Synthetic division by `x - λ`: quotient and remainder.
fn div_linear(f: &[u32], lambda: u32, p: u32) -> (Vec<u32>, u32) {
    let n = f.len();
    if n == 0 {
        return (Vec::new(), 0);
    }
    let mut q = vec![0; n - 1];
    let mut acc = 0;
    for k in (0..n).rev() {
        acc = add_mod(mul_mod(acc, lambda, p), f[k], p);
        if k > 0 {
            q[k - 1] = acc;
        }
    }
    (q, acc)
}

fn trim(mut f: Vec<u32>) -> Vec<u32> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let m = trim(m.to_vec());
    let lead_inv = inv_mod(*m.last().unwrap(), p);
    while r.len() >= m.len() {
        let shift = r.len() - m.len();
        let f = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (k, &c) in m.iter().enumerate() {
            r[shift + k] = sub_mod(r[shift + k], mul_mod(f, c, p), p);
        }
        r = trim(r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(x, y, p), p);
        }
    }
    out
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&l) = a.last() {
        let li = inv_mod(l, p);
        for c in &mut a {
            *c = mul_mod(*c, li, p);
        }
    }
    a
}

fn poly_powmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![1];
    let mut b = poly_rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b, p), m, p);
        }
        b = poly_rem(&poly_mul(&b, &b, p), m, p);
        e >>= 1;
    }
    acc
}

/// Distinct roots in `F_p` of a monic polynomial.
fn roots(f: &[u32], p: u32, rng: &mut ChaCha8Rng) -> Vec<u32> {
    if p == 2 {
        return (0..2).filter(|&x| div_linear(f, x, p).1 == 0).collect();
    }
    // g = gcd(f, x^p - x) is the product of the distinct linear factors.
    let xp = poly_powmod(&[0, 1], p as u64, f, p);
    let mut xp_minus_x = xp.clone();
    xp_minus_x.resize(xp_minus_x.len().max(2), 0);
    xp_minus_x[1] = sub_mod(xp_minus_x[1], 1, p);
    let g = poly_gcd(f, &xp_minus_x, p);
    let mut out = Vec::new();
    split_roots(&g, p, rng, &mut out);
    out.sort_unstable();
    out
}

fn split_roots(g: &[u32], p: u32, rng: &mut ChaCha8Rng, out: &mut Vec<u32>) {
    match g.len() {
        0 | 1 => {}
        2 => out.push(neg_mod(mul_mod(g[0], inv_mod(g[1], p), p), p)),
        _ => loop {
            let delta = rng.gen_range(0..p);
            let h = poly_powmod(&[delta, 1], (p as u64 - 1) / 2, g, p);
            let mut h1 = h.clone();
            if h1.is_empty() {
                h1.push(0);
            }
            h1[0] = sub_mod(h1[0], 1, p);
            let d = poly_gcd(g, &h1, p);
            if d.len() > 1 && d.len() < g.len() {
                let rest = poly_div_exact(g, &d, p);
                split_roots(&d, p, rng, out);
                split_roots(&rest, p, rng, out);
                return;
            }
        },
    }
}

fn poly_div_exact(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let mut q = vec![0; r.len() + 1 - b.len()];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = mul_mod(*r.last().unwrap(), lead_inv, p);
        q[shift] = f;
        for (k, &c) in b.iter().enumerate() {
            r[shift + k] = sub_mod(r[shift + k], mul_mod(f, c, p), p);
        }
        r = trim(r);
    }
    q
}
