//! Minimal projective covers, syzygies, injective envelopes and cosyzygies,
//! with Betti tables and the complete (two-sided) resolution.
//!
//! Injective modules over Λ are free, and the injective side is computed
//! through the duality: `Ω^{-k} M = D Ω^k D M`, `I_k(M) = D P_k(D M)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::gmod::{FreeModule, GradedModule, GradedSubspace, ModuleMap};
use crate::linalg::Matrix;

/// One step of a minimal resolution: `0 → Ω^{k+1} → P_k → Ω^k → 0`.
#[derive(Clone, Debug)]
pub struct Step {
    /// `Ω^k M`.
    pub module: GradedModule,
    pub free: FreeModule,
    /// `P_k` as a module.
    pub cover_module: GradedModule,
    /// `P_k ↠ Ω^k M`.
    pub cover: ModuleMap,
    /// `Ω^{k+1} M`.
    pub kernel: GradedModule,
    /// `Ω^{k+1} M ↪ P_k`.
    pub inclusion: ModuleMap,
}

impl Step {
    /// Minimality: the kernel lies in `J · P_k`.
    pub fn is_minimal(&self) -> bool {
        self.kernel.degrees().all(|d| {
            let b = self.inclusion.block(d);
            let in_rad = self.free.in_radical_power(d, 1);
            (0..b.rows()).all(|i| in_rad[i] || b.row(i).iter().all(|&x| x == 0))
        })
    }

    /// `Ω^{k+1} M` as a subspace of `P_k`.
    pub fn kernel_subspace(&self) -> GradedSubspace {
        self.inclusion.image(&self.cover_module)
    }
}

/// One step of a minimal coresolution: `0 → Ω^{-k} → I_k → Ω^{-k-1} → 0`.
#[derive(Clone, Debug)]
pub struct CoStep {
    /// `Ω^{-k} M`.
    pub module: GradedModule,
    /// `I_k`.
    pub envelope: GradedModule,
    /// Socle degrees of `I_k`, with multiplicity.
    pub cogenerators: Vec<i32>,
    /// `Ω^{-k} M ↪ I_k`.
    pub embedding: ModuleMap,
    /// `Ω^{-k-1} M`.
    pub cokernel: GradedModule,
    /// `I_k ↠ Ω^{-k-1} M`.
    pub projection: ModuleMap,
}

/// Kernel of a degree-0 map as a module in kernel coordinates, with its
/// inclusion.
pub fn kernel_module(f: &ModuleMap, src: &GradedModule) -> (GradedModule, ModuleMap) {
    let alg = src.algebra();
    if src.is_zero() {
        return (GradedModule::zero(alg), ModuleMap::zero(&GradedModule::zero(alg), src, 0));
    }
    let ks: HashMap<i32, (Matrix, Vec<usize>)> = src.degrees().map(|d| (d, f.block(d).kernel_with_free())).collect();
    let module = GradedModule::from_fn(
        alg,
        src.d_min(),
        src.d_max(),
        |d| ks[&d].0.cols(),
        |i, d| src.action(i, d).mul(&ks[&d].0).select_rows(&ks[&(d + 1)].1),
    );
    let inclusion = ModuleMap::from_fn(&module, src, 0, |d| ks[&d].0.clone());
    (module, inclusion)
}

pub fn projective_cover(m: &GradedModule) -> Step {
    let alg = m.algebra();
    let gens = m.generators();
    let degs: Vec<i32> = gens.iter().map(|(d, _)| *d).collect();
    let images: Vec<Vec<u32>> = gens.into_iter().map(|(_, v)| v).collect();
    let free = FreeModule::new(alg, degs);
    let cover_module = free.module();
    let cover = free.map_to(m, &images, 0);
    let (kernel, inclusion) = kernel_module(&cover, &cover_module);
    Step {
        module: m.clone(),
        free,
        cover_module,
        cover,
        kernel,
        inclusion,
    }
}

/// A lazily extended minimal projective resolution.
#[derive(Clone, Debug)]
pub struct Resolution {
    steps: Vec<Step>,
    start: GradedModule,
}

impl Resolution {
    pub fn new(m: &GradedModule) -> Self {
        Resolution {
            steps: Vec::new(),
            start: m.clone(),
        }
    }

    pub fn module(&self) -> &GradedModule {
        &self.start
    }

    /// Make sure steps `0..=k` exist.
    pub fn extend_to(&mut self, k: usize) {
        while self.steps.len() <= k {
            let next = match self.steps.last() {
                Some(s) => s.kernel.clone(),
                None => self.start.clone(),
            };
            self.steps.push(projective_cover(&next));
        }
    }

    pub fn step(&mut self, k: usize) -> &Step {
        self.extend_to(k);
        &self.steps[k]
    }

    /// Steps computed so far.
    pub fn computed(&self) -> &[Step] {
        &self.steps
    }

    pub fn syzygy(&mut self, k: usize) -> GradedModule {
        if k == 0 {
            return self.start.clone();
        }
        self.step(k - 1).kernel.clone()
    }

    /// Generator degrees of `P_k`.
    pub fn generator_degrees(&mut self, k: usize) -> Vec<i32> {
        self.step(k).free.generator_degrees().to_vec()
    }

    pub fn betti(&mut self, length: usize) -> BettiTable {
        let entries = (0..=length).map(|k| count_degrees(&self.generator_degrees(k))).collect();
        BettiTable {
            kind: BettiKind::Projective,
            entries,
        }
    }
}

/// A lazily extended minimal injective coresolution, computed as the dual of
/// a resolution of `D(M)`.
#[derive(Clone, Debug)]
pub struct Coresolution {
    dual: Resolution,
    steps: Vec<CoStep>,
}

impl Coresolution {
    pub fn new(m: &GradedModule) -> Self {
        Coresolution {
            dual: Resolution::new(&m.dual()),
            steps: Vec::new(),
        }
    }

    pub fn extend_to(&mut self, k: usize) {
        while self.steps.len() <= k {
            let j = self.steps.len();
            let s = self.dual.step(j).clone();
            self.steps.push(dualize_step(&s));
        }
    }

    pub fn step(&mut self, k: usize) -> &CoStep {
        self.extend_to(k);
        &self.steps[k]
    }

    pub fn cosyzygy(&mut self, k: usize) -> GradedModule {
        self.dual.syzygy(k).dual()
    }

    /// Socle degrees of `I_k`.
    pub fn cogenerator_degrees(&mut self, k: usize) -> Vec<i32> {
        self.dual.generator_degrees(k).into_iter().map(|g| -g).collect()
    }

    pub fn betti(&mut self, length: usize) -> BettiTable {
        let entries = (0..=length).map(|k| count_degrees(&self.cogenerator_degrees(k))).collect();
        BettiTable {
            kind: BettiKind::Injective,
            entries,
        }
    }
}

fn dualize_step(s: &Step) -> CoStep {
    let module = s.module.dual();
    let envelope = s.cover_module.dual();
    let cokernel = s.kernel.dual();
    let embedding = s.cover.dual(&module, &envelope);
    let projection = s.inclusion.dual(&envelope, &cokernel);
    CoStep {
        module,
        envelope,
        cogenerators: s.free.generator_degrees().iter().map(|g| -g).collect(),
        embedding,
        cokernel,
        projection,
    }
}

/// Lift of a degree-0 map `g: X → Y` to the covers, `P_X → P_Y`, with
/// `π_Y ∘ F = g ∘ π_X`.
pub fn lift_to_covers(x: &Step, y: &Step, g: &ModuleMap) -> ModuleMap {
    let images: Vec<Vec<u32>> = x
        .free
        .generator_degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let v = g.block(d).mul_vec(&x.cover.block(d).column(x.free.index(i, 0)));
            y.cover.block(d).solve(&v).expect("cover is surjective")
        })
        .collect();
    x.free.map_to(&y.cover_module, &images, 0)
}

/// `Ω(g): ΩX → ΩY` induced by a lift of `g` to the covers.
pub fn syzygy_of_map(x: &Step, y: &Step, g: &ModuleMap) -> ModuleMap {
    let f = lift_to_covers(x, y, g);
    ModuleMap::from_fn(&x.kernel, &y.kernel, 0, |d| {
        let img = f.block(d).mul(&x.inclusion.block(d));
        y.inclusion
            .block(d)
            .solve_matrix(&img)
            .expect("the lift maps syzygies into syzygies")
    })
}

/// `Ω^k(g)` along the two resolutions.
pub fn syzygy_map(rx: &mut Resolution, ry: &mut Resolution, g: &ModuleMap, k: usize) -> ModuleMap {
    let mut cur = g.clone();
    for i in 0..k {
        let (sx, sy) = (rx.step(i).clone(), ry.step(i).clone());
        cur = syzygy_of_map(&sx, &sy, &cur);
    }
    cur
}

pub fn syzygy(m: &GradedModule, k: usize) -> GradedModule {
    Resolution::new(m).syzygy(k)
}

pub fn cosyzygy(m: &GradedModule, k: usize) -> GradedModule {
    Coresolution::new(m).cosyzygy(k)
}

pub fn injective_envelope(m: &GradedModule) -> CoStep {
    Coresolution::new(m).step(0).clone()
}

pub fn min_resolution(m: &GradedModule, length: usize) -> (BettiTable, Resolution) {
    let mut res = Resolution::new(m);
    let t = res.betti(length);
    (t, res)
}

pub fn min_coresolution(m: &GradedModule, length: usize) -> (BettiTable, Coresolution) {
    let mut res = Coresolution::new(m);
    let t = res.betti(length);
    (t, res)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BettiKind {
    Projective,
    Injective,
}

/// `β_{k,d}`: generators (or cogenerators) of the `k`-th term in degree `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiTable {
    pub kind: BettiKind,
    pub entries: Vec<BTreeMap<i32, usize>>,
}

fn count_degrees(degs: &[i32]) -> BTreeMap<i32, usize> {
    let mut out = BTreeMap::new();
    for &d in degs {
        *out.entry(d).or_insert(0) += 1;
    }
    out
}

impl BettiTable {
    pub fn length(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    pub fn get(&self, k: usize, d: i32) -> usize {
        self.entries.get(k).and_then(|e| e.get(&d)).copied().unwrap_or(0)
    }

    pub fn total(&self, k: usize) -> usize {
        self.entries.get(k).map_or(0, |e| e.values().sum())
    }

    /// Row of the Macaulay grid holding `β_{k,d}`.
    pub fn row_of(&self, k: usize, d: i32) -> i32 {
        match self.kind {
            BettiKind::Projective => d - k as i32,
            BettiKind::Injective => -d - k as i32,
        }
    }

    /// Nonzero entries as `(k, d, β)`.
    pub fn nonzero(&self) -> Vec<(usize, i32, usize)> {
        let mut out = Vec::new();
        for (k, e) in self.entries.iter().enumerate() {
            for (&d, &n) in e {
                out.push((k, d, n));
            }
        }
        out
    }

    /// Grid with rows `d - k` (or `-d - k` for coresolutions) and columns `k`.
    pub fn render(&self) -> String {
        let nz = self.nonzero();
        let mut out = String::new();
        let width = 6;
        let _ = write!(out, "{:>5}:", "");
        for k in 0..self.entries.len() {
            let _ = write!(out, "{:>width$}", k);
        }
        out.push('\n');
        let _ = write!(out, "{:>5}:", "total");
        for k in 0..self.entries.len() {
            let _ = write!(out, "{:>width$}", self.total(k));
        }
        out.push('\n');
        if nz.is_empty() {
            return out;
        }
        let rows: Vec<i32> = nz.iter().map(|&(k, d, _)| self.row_of(k, d)).collect();
        let (lo, hi) = (*rows.iter().min().unwrap(), *rows.iter().max().unwrap());
        for row in lo..=hi {
            let _ = write!(out, "{:>5}:", row);
            for (k, e) in self.entries.iter().enumerate() {
                let n: usize = e.iter().filter(|(&d, _)| self.row_of(k, d) == row).map(|(_, &n)| n).sum();
                if n == 0 {
                    let _ = write!(out, "{:>width$}", "-");
                } else {
                    let _ = write!(out, "{:>width$}", n);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Matrix of `Hom(P_j, b)_s → Hom(P_{j+1}, b)_s`, `φ ↦ φ ∘ d_{j+1}`, where
/// `Hom(P_j, b)_s = ⊕_g b_{g+s}` over the generators of `P_j`.
fn hom_cochain(res: &mut Resolution, b: &GradedModule, j: usize, s: i32) -> Matrix {
    let p = b.p();
    let src = res.step(j).clone();
    let tgt = res.step(j + 1).clone();
    let sg = src.free.generator_degrees().to_vec();
    let tg = tgt.free.generator_degrees().to_vec();
    let off = |gens: &[i32], i: usize| -> usize { gens[..i].iter().map(|&g| b.dim(g + s)).sum() };
    let rows: usize = tg.iter().map(|&g| b.dim(g + s)).sum();
    let cols: usize = sg.iter().map(|&g| b.dim(g + s)).sum();
    let mut m = Matrix::zeros(p, rows, cols);
    let mut cache: HashMap<(u32, i32), Matrix> = HashMap::new();
    for (h, &gh) in tg.iter().enumerate() {
        let bh = b.dim(gh + s);
        if bh == 0 {
            continue;
        }
        // d(gen_h) in the coordinates of P_j at degree gh.
        let col = tgt.free.index(h, 0);
        let omega = tgt.cover.block(gh).column(col);
        let image = src.inclusion.block(gh).mul_vec(&omega);
        for (idx, (g, mask)) in src.free.basis(gh).into_iter().enumerate() {
            let c = image[idx];
            let e = sg[g] + s;
            if c == 0 || b.dim(e) == 0 {
                continue;
            }
            let act = cache.entry((mask, e)).or_insert_with(|| b.monomial_action(mask, e));
            let (r0, c0) = (off(&tg, h), off(&sg, g));
            let cur = m.block(r0, c0, bh, b.dim(e));
            m.set_block(r0, c0, &cur.add(&act.scale(c)));
        }
    }
    m
}

/// `dim Ext^k_Λ(a, b)_s`, with `a` given by its resolution.
pub fn ext_dim(res: &mut Resolution, b: &GradedModule, k: usize, s: i32) -> usize {
    let dim: usize = res.generator_degrees(k).iter().map(|&g| b.dim(g + s)).sum();
    if dim == 0 {
        return 0;
    }
    let out = hom_cochain(res, b, k, s).rank();
    let into = if k > 0 { hom_cochain(res, b, k - 1, s).rank() } else { 0 };
    dim - out - into
}

/// Index of the product of all variables.
fn top_mask(m: &GradedModule) -> u32 {
    (1u32 << m.algebra().nvars()) - 1
}

/// Remove free summands: a vector `v` with `x_0⋯x_r v ≠ 0` generates a free
/// (hence injective) submodule, which splits off. Returns the complement and
/// the generator degrees of the removed summands.
pub fn strip_projective(m: &GradedModule) -> (GradedModule, Vec<i32>) {
    let mut cur = m.clone();
    let mut removed = Vec::new();
    let top = top_mask(m);
    'outer: loop {
        for d in cur.degrees() {
            let t = cur.monomial_action(top, d);
            if t.is_zero() {
                continue;
            }
            let (_, piv) = t.rref();
            let mut v = vec![0; cur.dim(d)];
            v[piv[0]] = 1;
            let sub = cur.generated_by(&[(d, v)]);
            cur = cur.quotient(&sub).0;
            removed.push(d);
            continue 'outer;
        }
        break;
    }
    (cur, removed)
}

pub fn is_projective(m: &GradedModule) -> bool {
    strip_projective(m).0.is_zero()
}

/// The spliced acyclic complex of free modules through `M` (free summands
/// removed): position `k ≥ 0` is `P_k`, position `k < 0` is `I_{-k-1}`.
#[derive(Clone, Debug)]
pub struct CompleteResolution {
    pub module: GradedModule,
    /// Generator degrees of free summands removed from the input.
    pub removed: Vec<i32>,
    pub resolution: Resolution,
    pub coresolution: Coresolution,
    window: usize,
}

impl CompleteResolution {
    pub fn new(m: &GradedModule, window: usize) -> Self {
        let (module, removed) = strip_projective(m);
        let mut out = CompleteResolution {
            resolution: Resolution::new(&module),
            coresolution: Coresolution::new(&module),
            module,
            removed,
            window: 0,
        };
        out.extend_to(window);
        out
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn extend_to(&mut self, window: usize) {
        if self.module.is_zero() {
            self.window = self.window.max(window);
            return;
        }
        self.resolution.extend_to(window);
        self.coresolution.extend_to(window);
        self.window = self.window.max(window);
    }

    /// Generator degrees (as free modules `Λ[-g]`) of the term at `position`.
    pub fn generator_degrees(&mut self, position: i32) -> Vec<i32> {
        if self.module.is_zero() {
            return Vec::new();
        }
        let need = if position >= 0 { position } else { -position - 1 } as usize;
        if need > self.window {
            self.extend_to(need);
        }
        let r1 = self.module.algebra().nvars() as i32;
        if position >= 0 {
            self.resolution.generator_degrees(position as usize)
        } else {
            self.coresolution
                .cogenerator_degrees((-position - 1) as usize)
                .into_iter()
                .map(|c| c - r1)
                .collect()
        }
    }

    /// Number of generators of degree `g` at `position`.
    pub fn count(&mut self, position: i32, g: i32) -> usize {
        self.generator_degrees(position).into_iter().filter(|&x| x == g).count()
    }

    /// Exactness at the splice: `ker(P_0 → I_0) = im(P_1 → P_0)`.
    pub fn splice_exact(&mut self) -> bool {
        if self.module.is_zero() {
            return true;
        }
        let p0 = self.resolution.step(0).clone();
        let p1 = self.resolution.step(1).clone();
        let i0 = self.coresolution.step(0).clone();
        let through = i0.embedding.compose(&p0.cover);
        let ker = through.kernel(&p0.cover_module);
        let d1 = p0.inclusion.compose(&p1.cover);
        let im = d1.image(&p0.cover_module);
        ker.same_as(&im)
    }
}

pub fn complete_resolution(m: &GradedModule, window: usize) -> CompleteResolution {
    CompleteResolution::new(m, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comb::choose;
    use crate::gmod::{is_isomorphic, Algebra};

    fn alg(r: usize) -> Algebra {
        Algebra::new(r, 32003).unwrap()
    }

    #[test]
    fn covers() {
        let a = alg(1);
        let k = a.simple(0);
        let s = projective_cover(&k);
        assert_eq!(s.free.generator_degrees(), &[0]);
        assert_eq!(s.kernel, a.regular().truncate(1));
        assert!(s.is_minimal());
        let j = a.regular().truncate(1);
        let s = projective_cover(&j);
        assert_eq!(s.free.generator_degrees(), &[1, 1]);
        assert_eq!(s.kernel.dims_by_degree(), vec![(2, 3), (3, 2)]);
        let s = projective_cover(&a.regular());
        assert!(s.kernel.is_zero());
    }

    #[test]
    fn syzygies() {
        let a = alg(1);
        let k = a.simple(0);
        assert_eq!(syzygy(&k, 1).dims_by_degree(), vec![(1, 2), (2, 1)]);
        assert_eq!(syzygy(&k, 2).dims_by_degree(), vec![(2, 3), (3, 2)]);
        assert!(syzygy(&a.regular(), 1).is_zero());
        assert!(syzygy(&a.regular(), 3).is_zero());
    }

    #[test]
    fn envelopes_and_cosyzygies() {
        let a = alg(1);
        let k = a.simple(0);
        let e = injective_envelope(&k);
        assert!(is_isomorphic(&e.envelope, &a.regular().shift(2), 0, 20).value);
        assert_eq!(e.cogenerators, vec![0]);
        assert!(cosyzygy(&a.regular(), 1).is_zero());
        // Cokernel of K ↪ Λ[2]: dims 1, 2 in degrees -2, -1.
        assert_eq!(cosyzygy(&k, 1).dims_by_degree(), vec![(-2, 1), (-1, 2)]);
        assert!(e.embedding.is_injective());
        assert!(e.projection.is_surjective());
    }

    #[test]
    fn betti_numbers_of_the_residue_field() {
        for r in 1..=2 {
            let a = alg(r);
            let (t, _) = min_resolution(&a.simple(0), 6);
            for k in 0..=6 {
                assert_eq!(t.total(k), choose(k + r, r));
                assert_eq!(t.get(k, k as i32), t.total(k));
            }
        }
        let a = alg(2);
        let (t, _) = min_resolution(&a.regular(), 4);
        assert_eq!(t.nonzero(), vec![(0, 0, 1)]);
    }

    #[test]
    fn coresolution_table_is_dual_resolution_table() {
        let a = alg(2);
        let m = a.regular().truncate(1).shift(1).loewy2();
        let (ct, _) = min_coresolution(&m, 4);
        let (pt, _) = min_resolution(&m.dual(), 4);
        for k in 0..=4 {
            for (&d, &n) in &pt.entries[k] {
                assert_eq!(ct.get(k, -d), n);
            }
            assert_eq!(ct.total(k), pt.total(k));
        }
    }

    #[test]
    fn dimensions_telescope() {
        let a = alg(2);
        let m = a.regular().truncate(1).shift(1);
        let mut res = Resolution::new(&m);
        for k in 0..4 {
            let s = res.step(k).clone();
            for d in s.cover_module.degrees() {
                assert_eq!(s.cover_module.dim(d), s.module.dim(d) + s.kernel.dim(d));
            }
            assert!(s.is_minimal());
            assert!(s.inclusion.is_linear(&s.kernel, &s.cover_module));
        }
    }

    #[test]
    fn syzygy_and_cosyzygy_are_inverse() {
        let a = alg(1);
        let k = a.simple(0);
        let up = cosyzygy(&syzygy(&k, 1), 1);
        assert!(is_isomorphic(&up, &k, 0, 20).value);
        let j = a.regular().truncate(1);
        let down = syzygy(&cosyzygy(&j, 2), 2);
        assert!(is_isomorphic(&down, &j, 0, 20).value);
    }

    #[test]
    fn free_summands_are_stripped() {
        let a = alg(2);
        let k = a.simple(0);
        let (sum, _, _) = k.direct_sum(&a.free(1)).unwrap();
        let (rest, removed) = strip_projective(&sum);
        assert_eq!(removed, vec![1]);
        assert!(is_isomorphic(&rest, &k, 0, 20).value);
        assert!(is_projective(&a.free(3).power(2)));
    }

    #[test]
    fn ext_matches_oracle() {
        let a = alg(1);
        let k = a.simple(0);
        let mut res = Resolution::new(&k);
        for e in 0..=3 {
            assert_eq!(ext_dim(&mut res, &k, e, -(e as i32)), e + 1);
            assert_eq!(ext_dim(&mut res, &k, e, 0), (e == 0) as usize);
        }
        let m = a.regular().truncate(1).shift(1);
        let mut res = Resolution::new(&m);
        for e in 0..=2 {
            for s in -3..=1 {
                let (x, _) = crate::oracle::ext_two_ways(&m, &k.shift(s), e);
                assert_eq!(ext_dim(&mut res, &k.shift(s), e, 0) as u64, x);
            }
        }
    }

    #[test]
    fn complete_resolution_of_residue_field() {
        let a = alg(1);
        let mut c = complete_resolution(&a.simple(0), 3);
        assert!(c.splice_exact());
        for k in 0..=3 {
            assert_eq!(c.count(k, k), k as usize + 1);
        }
        // I_j is cogenerated in degree -j: generators in degree -j-2.
        for j in 0..=3i32 {
            assert_eq!(c.count(-j - 1, -j - 2), j as usize + 1);
        }
        let mut free = complete_resolution(&a.regular(), 2);
        assert!(free.generator_degrees(0).is_empty());
    }
}
