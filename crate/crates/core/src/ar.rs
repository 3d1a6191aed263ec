//! Almost split sequences in the category of Koszul modules.
//!
//! `τ(M) = Ω²D(M^*)`; the sequence ending at `M` is built in all graded
//! modules from an extension class in `Ext¹(M, τM)_0` that is killed by
//! the radical of `End(M)_0`, then truncated to degrees `≥ 0`. The left
//! term is `σ(M) = (τM)_{≥0}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmod::{
    decompose, end_algebra, hom_space, is_indecomposable, is_isomorphic, radical_basis, star, star_map, GradedModule,
    GradedSubspace, ModuleMap, DEFAULT_SEED, DEFAULT_TRIALS,
};
use crate::gmod::random_combination;
use crate::koszul::{is_koszul, single_generator_degree, DEFAULT_BOUND};
use crate::linalg::Matrix;
use crate::oracle::kronecker_dims;
use crate::resolve::{
    cosyzygy, is_projective, kernel_module, projective_cover, strip_projective, syzygy, syzygy_map, syzygy_of_map,
    Resolution,
};
use crate::sheaf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArConfig {
    pub bound: usize,
    pub seed: u64,
    pub trials: usize,
    /// Largest Hom system (number of unknowns) the construction will set up.
    pub max_unknowns: usize,
    /// Nodes up to this total dimension also get their rank from a
    /// resolution, as a cross-check of the Hilbert-series rank.
    pub rank_check_dim: usize,
}

impl Default for ArConfig {
    fn default() -> Self {
        ArConfig {
            bound: DEFAULT_BOUND,
            seed: DEFAULT_SEED,
            trials: DEFAULT_TRIALS,
            max_unknowns: 8000,
            rank_check_dim: 24,
        }
    }
}

fn non_projective(m: &GradedModule) -> Result<()> {
    if m.is_zero() || is_projective(m) {
        return Err(Error::Precondition("module is projective".into()));
    }
    Ok(())
}

/// `Ω²D(M^*)`. Second syzygies carry no free summands.
pub fn tau(m: &GradedModule) -> Result<GradedModule> {
    non_projective(m)?;
    Ok(syzygy(&star(m).dual(), 2))
}

/// `(D(Ω^{-2} Y))^*`, free summands removed.
pub fn tau_inverse(y: &GradedModule) -> Result<GradedModule> {
    non_projective(y)?;
    Ok(strip_projective(&star(&cosyzygy(y, 2).dual())).0)
}

/// `(τM)_{≥0}` with the comparison against `J^{r-1} τM`.
#[derive(Clone, Debug)]
pub struct Sigma {
    pub module: GradedModule,
    pub tau: GradedModule,
    /// `(τM)_{≥0} = J^{r-1}τM` as subspaces of `τM`.
    pub radical_agrees: bool,
}

fn nonnegative_part(m: &GradedModule) -> GradedSubspace {
    GradedSubspace::from_fn(m, |d| {
        if d >= 0 {
            Matrix::identity(m.p(), m.dim(d))
        } else {
            Matrix::zeros(m.p(), m.dim(d), 0)
        }
    })
}

fn sigma_of_tau(t: GradedModule) -> Sigma {
    let r = t.algebra().r();
    let radical_agrees = t.radical_subspace(r - 1).same_as(&nonnegative_part(&t));
    Sigma {
        module: t.truncate(0),
        tau: t,
        radical_agrees,
    }
}

pub fn sigma_with_check(m: &GradedModule) -> Result<Sigma> {
    Ok(sigma_of_tau(tau(m)?))
}

pub fn sigma(m: &GradedModule) -> Result<GradedModule> {
    Ok(sigma_with_check(m)?.module)
}

fn truncate_map(f: &ModuleMap, src: &GradedModule, tgt: &GradedModule) -> ModuleMap {
    ModuleMap::from_fn(src, tgt, f.shift(), |d| f.block(d))
}

/// Degreewise exactness of `0 → a → b → c → 0`.
pub fn is_short_exact(a: &GradedModule, b: &GradedModule, c: &GradedModule, f: &ModuleMap, g: &ModuleMap) -> bool {
    let lo = a.d_min().min(b.d_min()).min(c.d_min());
    let hi = a.d_max().max(b.d_max()).max(c.d_max());
    if a.is_zero() && b.is_zero() && c.is_zero() {
        return true;
    }
    (lo..=hi).all(|d| {
        let (fd, gd) = (f.block(d), g.block(d));
        b.dim(d) == a.dim(d) + c.dim(d)
            && fd.rank() == a.dim(d)
            && gd.rank() == c.dim(d)
            && (a.dim(d) == 0 || gd.mul(&fd).is_zero())
    })
}

/// Whether `g: b → c` has a section, i.e. `id_c ∈ g ∘ Hom(c, b)_0`.
pub fn splits(b: &GradedModule, c: &GradedModule, g: &ModuleMap) -> bool {
    let id = ModuleMap::identity(c).flatten();
    let cols: Vec<Vec<u32>> = hom_space(c, b, 0).iter().map(|h| g.compose(h).flatten()).collect();
    if cols.is_empty() {
        return id.iter().all(|&x| x == 0);
    }
    Matrix::from_columns(c.p(), id.len(), &cols).solve(&id).is_ok()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Certificates {
    /// `0 → left → middle → right → 0` exact in every degree.
    pub exact: bool,
    pub ext_class_nonzero: bool,
    /// The class is killed by every radical endomorphism of the right term.
    pub rad_annihilates: bool,
    /// `id` of the right term does not factor through the middle.
    pub non_split: bool,
    /// The left term equals `(τM)_{≥0} = J^{r-1}τM`.
    pub left_is_sigma: bool,
}

impl Certificates {
    pub fn all(&self) -> bool {
        self.exact && self.ext_class_nonzero && self.rad_annihilates && self.non_split && self.left_is_sigma
    }
}

#[derive(Clone, Debug)]
pub struct ArSequence {
    pub left: GradedModule,
    pub middle: GradedModule,
    pub right: GradedModule,
    pub f: ModuleMap,
    pub g: ModuleMap,
    /// `η: ΩM → τM` representing the extension.
    pub ext_class: ModuleMap,
    pub ext_dim: usize,
    pub tau: GradedModule,
    /// The untruncated middle term.
    pub full_middle: GradedModule,
    pub certificates: Certificates,
}

fn require_koszul_indecomposable(m: &GradedModule, cfg: &ArConfig) -> Result<()> {
    non_projective(m)?;
    if single_generator_degree(m) != Some(0) {
        return Err(Error::Precondition("module is not generated in degree 0".into()));
    }
    if !is_koszul(m, cfg.bound)?.holds {
        return Err(Error::Precondition("module is not Koszul".into()));
    }
    let v = is_indecomposable(m, cfg.seed, cfg.trials);
    if !v.value {
        return Err(Error::Precondition("module is decomposable".into()));
    }
    Ok(())
}

fn flat_matrix(p: u32, maps: &[ModuleMap], len: usize) -> Matrix {
    let cols: Vec<Vec<u32>> = maps.iter().map(|f| f.flatten()).collect();
    Matrix::from_columns(p, len, &cols)
}

/// Rows spanning the linear forms vanishing on the columns of `b`.
fn annihilator(b: &Matrix, len: usize) -> Matrix {
    if b.cols() == 0 {
        return Matrix::identity(b.p(), len);
    }
    b.transpose().kernel_basis().transpose()
}

/// Unknowns of the linear system for `Hom(a, b)_0`.
fn hom_unknowns(a: &GradedModule, b: &GradedModule) -> usize {
    a.generator_degrees().iter().map(|&g| b.dim(g)).sum()
}

fn guard(a: &GradedModule, b: &GradedModule, cfg: &ArConfig, what: &str) -> Result<()> {
    let n = hom_unknowns(a, b);
    if n > cfg.max_unknowns {
        return Err(Error::Inconclusive(format!(
            "{what} needs {n} unknowns, above the limit {}",
            cfg.max_unknowns
        )));
    }
    Ok(())
}

/// The almost split sequence in Koszul modules ending at `m`.
pub fn ar_sequence(m: &GradedModule, cfg: &ArConfig) -> Result<ArSequence> {
    require_koszul_indecomposable(m, cfg)?;
    ar_sequence_unchecked(m, cfg)
}

/// As `ar_sequence`, for modules already known to be indecomposable,
/// Koszul and non-projective (nodes of a computed component).
fn ar_sequence_unchecked(m: &GradedModule, cfg: &ArConfig) -> Result<ArSequence> {
    let p = m.p();
    guard(m, m, cfg, "End(M)_0")?;
    let n = tau(m)?;
    let cover = projective_cover(m);
    let (om, iota) = (&cover.kernel, &cover.inclusion);
    guard(om, &n, cfg, "Hom(ΩM, τM)_0")?;
    guard(&cover.cover_module, &n, cfg, "Hom(P_0, τM)_0")?;

    let homs = hom_space(om, &n, 0);
    if homs.is_empty() {
        return Err(Error::Internal("Ext¹(M, τM)_0 vanishes".into()));
    }
    let len = homs[0].flatten().len();
    let through_cover: Vec<ModuleMap> = hom_space(&cover.cover_module, &n, 0)
        .iter()
        .map(|h| h.compose(iota))
        .collect();
    let b = flat_matrix(p, &through_cover, len);
    let ann = annihilator(&b, len);
    // Greedy basis of Hom(ΩM, τM)_0 modulo B: pivots of the images under the annihilator.
    let (_, pivots) = ann.mul(&flat_matrix(p, &homs, len)).rref();
    let ext_basis: Vec<ModuleMap> = pivots.iter().map(|&i| homs[i].clone()).collect();
    if ext_basis.is_empty() {
        return Err(Error::Internal("Ext¹(M, τM)_0 vanishes".into()));
    }

    let e = end_algebra(m);
    let rad = radical_basis(&e, p).ok_or_else(|| Error::Inconclusive("field too small for the trace form".into()))?;
    let rad_lifts: Vec<ModuleMap> = (0..rad.cols())
        .map(|k| syzygy_of_map(&cover, &cover, &e.element(&rad.column(k))))
        .collect();

    // Coefficients c with Σ c_i e_i ∘ Ω(f) ∈ B for every radical f.
    let k = ext_basis.len();
    let mut system = Matrix::zeros(p, 0, k);
    for lift in &rad_lifts {
        let cols: Vec<Vec<u32>> = ext_basis
            .iter()
            .map(|ei| ann.mul_vec(&ei.compose(lift).flatten()))
            .collect();
        system = system.vstack(&Matrix::from_columns(p, ann.rows(), &cols));
    }
    let sols = if system.rows() == 0 { Matrix::identity(p, k) } else { system.kernel_basis() };
    if sols.cols() == 0 {
        return Err(Error::Internal("no extension class is killed by the radical".into()));
    }
    let c = sols.column(0);
    let mut eta = ext_basis[0].scale(c[0]);
    for (ei, &ci) in ext_basis.iter().zip(&c).skip(1) {
        eta = eta.add(&ei.scale(ci));
    }

    // Pushout (τM ⊕ P_0) / {(η(w), -ι(w))}.
    let (sum, inc_n, inc_p) = n.direct_sum(&cover.cover_module)?;
    let rel = inc_n.compose(&eta).add(&inc_p.compose(iota).scale(p - 1));
    let (full, q) = sum.quotient(&rel.image(&sum));
    let f_full = q.compose(&inc_n);
    let to_m = ModuleMap::from_fn(&sum, m, 0, |d| {
        Matrix::zeros(p, m.dim(d), n.dim(d)).hstack(&cover.cover.block(d))
    });
    let g_full = ModuleMap::from_fn(&full, m, 0, |d| {
        let s = q.block(d).solve_matrix(&Matrix::identity(p, full.dim(d))).expect("quotient map is onto");
        to_m.block(d).mul(&s)
    });

    let left = n.truncate(0);
    let middle = full.truncate(0);
    let f = truncate_map(&f_full, &left, &middle);
    let g = truncate_map(&g_full, &middle, m);

    let rad_annihilates = rad_lifts
        .iter()
        .all(|lift| ann.mul_vec(&eta.compose(lift).flatten()).iter().all(|&x| x == 0));
    let eta_flat = eta.flatten();
    let ext_class_nonzero = ann.mul_vec(&eta_flat).iter().any(|&x| x != 0);
    let certificates = Certificates {
        exact: is_short_exact(&left, &middle, m, &f, &g),
        ext_class_nonzero,
        rad_annihilates,
        non_split: !splits(&middle, m, &g),
        left_is_sigma: sigma_of_tau(n.clone()).radical_agrees,
    };
    Ok(ArSequence {
        left,
        middle,
        right: m.clone(),
        f,
        g,
        ext_class: eta,
        ext_dim: ext_basis.len(),
        tau: n,
        full_middle: full,
        certificates,
    })
}

/// `Ω` of a short exact sequence `0 → x → y → z → 0` by the horseshoe
/// construction: `y` is covered by the images of the generators of `x` and
/// lifts of those of `z`. The cover of `y` is minimal exactly when the tops
/// form an exact sequence.
struct Horseshoe {
    x: GradedModule,
    y: GradedModule,
    z: GradedModule,
    f: ModuleMap,
    g: ModuleMap,
    minimal: bool,
}

fn horseshoe(x: &GradedModule, y: &GradedModule, z: &GradedModule, f: &ModuleMap, g: &ModuleMap) -> Horseshoe {
    let alg = x.algebra();
    let p = x.p();
    let sx = projective_cover(x);
    let sz = projective_cover(z);
    let mut degs: Vec<i32> = sx.free.generator_degrees().to_vec();
    degs.extend_from_slice(sz.free.generator_degrees());
    let nx = sx.free.rank();
    let mut images = Vec::new();
    for (i, &d) in sx.free.generator_degrees().iter().enumerate() {
        let v = sx.cover.block(d).column(sx.free.index(i, 0));
        images.push(f.block(d).mul_vec(&v));
    }
    for (j, &d) in sz.free.generator_degrees().iter().enumerate() {
        let v = sz.cover.block(d).column(sz.free.index(j, 0));
        images.push(g.block(d).solve(&v).expect("g is onto"));
    }
    let free_y = crate::gmod::FreeModule::new(alg, degs);
    let py = free_y.module();
    let cover_y = free_y.map_to(y, &images, 0);
    let (ky, inc_y) = kernel_module(&cover_y, &py);
    let minimal = free_y.rank() == y.generator_degrees().len();
    let unit = |len: usize, i: usize, d: i32, fm: &crate::gmod::FreeModule| {
        let mut v = vec![0; len];
        v[fm.index(i, 0)] = 1;
        let _ = d;
        v
    };
    let incl_images: Vec<Vec<u32>> = sx
        .free
        .generator_degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| unit(py.dim(d), i, d, &free_y))
        .collect();
    let incl = sx.free.map_to(&py, &incl_images, 0);
    let proj_images: Vec<Vec<u32>> = free_y
        .generator_degrees()
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            if i < nx {
                vec![0; sz.cover_module.dim(d)]
            } else {
                unit(sz.cover_module.dim(d), i - nx, d, &sz.free)
            }
        })
        .collect();
    let proj = free_y.map_to(&sz.cover_module, &proj_images, 0);
    let restrict = |big: &ModuleMap, src_inc: &ModuleMap, tgt_inc: &ModuleMap, src: &GradedModule, tgt: &GradedModule| {
        ModuleMap::from_fn(src, tgt, 0, |d| {
            let img = big.block(d).mul(&src_inc.block(d));
            tgt_inc.block(d).solve_matrix(&img).expect("restriction to syzygies")
        })
    };
    let of = restrict(&incl, &sx.inclusion, &inc_y, &sx.kernel, &ky);
    let og = restrict(&proj, &inc_y, &sz.inclusion, &ky, &sz.kernel);
    let _ = p;
    Horseshoe {
        x: sx.kernel,
        y: ky,
        z: sz.kernel,
        f: of,
        g: og,
        minimal,
    }
}

/// Verdict of applying `σ` to a non-split short exact sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SigmaExactness {
    pub exact: bool,
    /// Every cover in the horseshoe steps was minimal.
    pub minimal_covers: bool,
    /// The three terms have the dimensions of `σ` of the inputs.
    pub terms_match: bool,
}

/// `0 → σa → σb → σc → 0` from `0 → a → b → c → 0` through
/// `c^* → b^* → a^*`, duality, and two horseshoe syzygy steps.
pub fn sigma_exact_check(
    a: &GradedModule,
    b: &GradedModule,
    c: &GradedModule,
    f: &ModuleMap,
    g: &ModuleMap,
) -> Result<SigmaExactness> {
    if !is_short_exact(a, b, c, f, g) {
        return Err(Error::Precondition("input sequence is not exact".into()));
    }
    if splits(b, c, g) {
        return Err(Error::Precondition("input sequence splits".into()));
    }
    let (sa, sb, sc) = (star(a), star(b), star(c));
    let gs = star_map(g, b, c, &sb, &sc);
    let fs = star_map(f, a, b, &sa, &sb);
    let (da, db, dc) = (sa.dual(), sb.dual(), sc.dual());
    // D(f^*): D(a^*) → D(b^*), D(g^*): D(b^*) → D(c^*).
    let dfs = fs.dual(&da, &db);
    let dgs = gs.dual(&db, &dc);
    let h1 = horseshoe(&da, &db, &dc, &dfs, &dgs);
    let h2 = horseshoe(&h1.x, &h1.y, &h1.z, &h1.f, &h1.g);
    let (ta, tb, tc) = (h2.x.truncate(0), h2.y.truncate(0), h2.z.truncate(0));
    let tf = truncate_map(&h2.f, &ta, &tb);
    let tg = truncate_map(&h2.g, &tb, &tc);
    let exact = is_short_exact(&ta, &tb, &tc, &tf, &tg);
    let dims = |m: &GradedModule| -> Result<Vec<(i32, usize)>> {
        Ok(if is_projective(m) { Vec::new() } else { sigma(m)?.dims_by_degree() })
    };
    let terms_match = ta.dims_by_degree() == dims(a)? && tc.dims_by_degree() == dims(c)? && {
        let sb_parts = strip_projective(b).0;
        tb.dims_by_degree() == dims(&sb_parts)?
    };
    Ok(SigmaExactness {
        exact,
        minimal_covers: h1.minimal && h2.minimal,
        terms_match,
    })
}

/// An indecomposable summand `E_i` of the middle term with `f_i = π_i f`,
/// `g_i = g ι_i`.
#[derive(Clone, Debug)]
pub struct MiddleSummand {
    pub module: GradedModule,
    pub f: ModuleMap,
    pub g: ModuleMap,
    pub f_mono: bool,
    pub f_epi: bool,
    pub g_mono: bool,
    pub g_epi: bool,
    pub composite_nonzero: bool,
}

impl MiddleSummand {
    /// Both maps are a monomorphism or an epimorphism.
    pub fn mono_or_epi(&self) -> bool {
        (self.f_mono || self.f_epi) && (self.g_mono || self.g_epi)
    }
}

#[derive(Clone, Debug)]
pub struct MiddleDecomposition {
    pub summands: Vec<MiddleSummand>,
    /// Isomorphism classes: index of a representative summand and its
    /// multiplicity.
    pub classes: Vec<(usize, usize)>,
    /// False if some indecomposability verdict rests on random search.
    pub certain: bool,
}

fn classes_of(mods: &[GradedModule], cfg: &ArConfig) -> Vec<(usize, usize)> {
    let mut classes: Vec<(usize, usize)> = Vec::new();
    for (i, m) in mods.iter().enumerate() {
        match classes
            .iter_mut()
            .find(|(rep, _)| is_isomorphic(&mods[*rep], m, cfg.seed, cfg.trials).value)
        {
            Some(c) => c.1 += 1,
            None => classes.push((i, 1)),
        }
    }
    classes
}

pub fn middle_summands(seq: &ArSequence, cfg: &ArConfig) -> MiddleDecomposition {
    let (parts, certain) = decompose(&seq.middle, cfg.seed, cfg.trials);
    let summands: Vec<MiddleSummand> = parts
        .into_iter()
        .map(|s| {
            let f = s.projection.compose(&seq.f);
            let g = seq.g.compose(&s.inclusion);
            MiddleSummand {
                f_mono: f.is_injective(),
                f_epi: f.is_surjective(),
                g_mono: g.is_injective(),
                g_epi: g.is_surjective(),
                composite_nonzero: !g.compose(&f).is_zero(),
                module: s.module,
                f,
                g,
            }
        })
        .collect();
    let mods: Vec<GradedModule> = summands.iter().map(|s| s.module.clone()).collect();
    MiddleDecomposition {
        classes: classes_of(&mods, cfg),
        summands,
        certain,
    }
}

/// `M → M/J²M` with the projection.
fn loewy2_projection(m: &GradedModule) -> (GradedModule, ModuleMap) {
    m.quotient(&m.radical_subspace(2))
}

/// The map induced by `h: a → b` on the quotients `a/J²a → b/J²b`.
fn induced(h: &ModuleMap, qa: &(GradedModule, ModuleMap), qb: &(GradedModule, ModuleMap)) -> ModuleMap {
    let p = qa.0.p();
    ModuleMap::from_fn(&qa.0, &qb.0, 0, |d| {
        let s = qa.1.block(d).solve_matrix(&Matrix::identity(p, qa.0.dim(d))).expect("projection is onto");
        qb.1.block(d).mul(&h.block(d)).mul(&s)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Loewy2Comparison {
    pub exact: bool,
    pub summands: usize,
    pub summands_mod_j2: usize,
    /// Monomorphism and epimorphism flags of every `f_i`, `g_i` agree with
    /// those of the induced maps.
    pub mono_epi_preserved: bool,
    pub certain: bool,
}

impl Loewy2Comparison {
    pub fn holds(&self) -> bool {
        self.exact && self.summands == self.summands_mod_j2 && self.mono_epi_preserved
    }
}

/// Reduce the sequence modulo `J²` and compare it with the original.
pub fn loewy2_compare(seq: &ArSequence, cfg: &ArConfig) -> Loewy2Comparison {
    let ql = loewy2_projection(&seq.left);
    let qe = loewy2_projection(&seq.middle);
    let qm = loewy2_projection(&seq.right);
    let fbar = induced(&seq.f, &ql, &qe);
    let gbar = induced(&seq.g, &qe, &qm);
    let exact = is_short_exact(&ql.0, &qe.0, &qm.0, &fbar, &gbar);
    let mid = middle_summands(seq, cfg);
    let (bar_parts, bar_certain) = decompose(&qe.0, cfg.seed, cfg.trials);
    let mut preserved = true;
    for s in &mid.summands {
        let qs = loewy2_projection(&s.module);
        let fi = induced(&s.f, &ql, &qs);
        let gi = induced(&s.g, &qs, &qm);
        preserved &= fi.is_injective() == s.f_mono
            && fi.is_surjective() == s.f_epi
            && gi.is_injective() == s.g_mono
            && gi.is_surjective() == s.g_epi;
    }
    Loewy2Comparison {
        exact,
        summands: mid.summands.len(),
        summands_mod_j2: bar_parts.len(),
        mono_epi_preserved: preserved,
        certain: mid.certain && bar_certain,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentShape {
    PreinjectiveOfLoewy2,
    ZaInfinityCone,
    ProjectiveComponent,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: usize,
    pub label: String,
    pub dims: Vec<(i32, usize)>,
    pub loewy_length: usize,
    /// Rank of the associated sheaf, when it could be computed.
    pub rank: Option<i128>,
}

/// An irreducible map `from → to` with multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub shape: ComponentShape,
    pub nodes: Vec<Node>,
    pub arrows: Vec<Arrow>,
    /// Every computed sequence has `rk(middle) = rk(left) + rk(right)`.
    pub mesh_additive: bool,
    /// Every sequence passed its certificates.
    pub certified: bool,
    pub certain: bool,
}

impl ComponentReport {
    /// Graphviz description: nodes labelled by dimensions and rank, arrows
    /// by multiplicity.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph component {\n");
        for n in &self.nodes {
            let dims: Vec<String> = n.dims.iter().map(|(d, k)| format!("{d}:{k}")).collect();
            let rank = n.rank.map_or("?".to_string(), |r| r.to_string());
            let _ = writeln!(
                out,
                "  n{} [label=\"{}\\n{}\\nrk {}\"];",
                n.id,
                n.label,
                dims.join(" "),
                rank
            );
        }
        for a in &self.arrows {
            if a.multiplicity == 1 {
                let _ = writeln!(out, "  n{} -> n{};", a.from, a.to);
            } else {
                let _ = writeln!(out, "  n{} -> n{} [label=\"{}\"];", a.from, a.to, a.multiplicity);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Index `k` with `dims(M) = kronecker_dims(r, k)` for a module in degrees
/// 0 and 1.
pub fn kronecker_index(m: &GradedModule, max_k: usize) -> Option<usize> {
    if m.is_zero() || m.d_min() != 0 || m.d_max() > 1 || m.loewy_length() > 2 {
        return None;
    }
    let r = m.algebra().r();
    let dims = (m.dim(0) as u64, m.dim(1) as u64);
    (0..=max_k).find(|&k| kronecker_dims(r, k) == dims)
}

pub fn classify_component(m: &GradedModule) -> ComponentShape {
    if is_projective(m) {
        ComponentShape::ProjectiveComponent
    } else if kronecker_index(m, 64).is_some() {
        ComponentShape::PreinjectiveOfLoewy2
    } else {
        ComponentShape::ZaInfinityCone
    }
}

struct Graph<'a> {
    cfg: &'a ArConfig,
    modules: Vec<GradedModule>,
    nodes: Vec<Node>,
    arrows: BTreeMap<(usize, usize), usize>,
}

impl<'a> Graph<'a> {
    fn node(&mut self, m: &GradedModule, label: &str) -> usize {
        for (i, n) in self.modules.iter().enumerate() {
            if is_isomorphic(n, m, self.cfg.seed, self.cfg.trials).value {
                return i;
            }
        }
        let id = self.modules.len();
        self.modules.push(m.clone());
        self.nodes.push(Node {
            id,
            label: label.to_string(),
            dims: m.dims_by_degree(),
            loewy_length: m.loewy_length(),
            rank: sheaf::rank_from_dims(m).ok(),
        });
        id
    }

    /// Record the mesh of one sequence; returns rank additivity.
    fn mesh(&mut self, seq: &ArSequence, right: usize, left_label: &str) -> (bool, bool) {
        let left = self.node(&seq.left, left_label);
        let dec = middle_summands(seq, self.cfg);
        for &(rep, mult) in &dec.classes {
            let s = self.node(&dec.summands[rep].module, &format!("E({})", self.nodes[right].label));
            *self.arrows.entry((left, s)).or_insert(0) += mult;
            *self.arrows.entry((s, right)).or_insert(0) += mult;
        }
        let rank = |m: &GradedModule| sheaf::rank_from_dims(m).ok();
        let additive = match (rank(&seq.left), rank(&seq.middle), rank(&seq.right)) {
            (Some(a), Some(b), Some(c)) => b == a + c,
            _ => false,
        };
        (additive, dec.certain)
    }

    fn finish(self, shape: ComponentShape, mesh_additive: bool, certified: bool, certain: bool) -> ComponentReport {
        ComponentReport {
            shape,
            nodes: self.nodes,
            arrows: self
                .arrows
                .into_iter()
                .map(|((from, to), multiplicity)| Arrow { from, to, multiplicity })
                .collect(),
            mesh_additive,
            certified,
            certain,
        }
    }
}

fn node_label(i: usize, j: usize) -> String {
    match (i, j) {
        (0, 0) => "M".to_string(),
        (0, 1) => "σM".to_string(),
        (0, j) => format!("σ^{j}M"),
        (i, 0) => format!("M_{i}"),
        (i, 1) => format!("σM_{i}"),
        (i, j) => format!("σ^{j}M_{i}"),
    }
}

/// A complement of a summand isomorphic to the indecomposable `k` in `e`:
/// random `φ: k → e`, `ψ: e → k` with `ψφ` invertible make `ker ψ` one.
fn split_complement(e: &GradedModule, k: &GradedModule, cfg: &ArConfig) -> Result<Option<GradedModule>> {
    guard(k, e, cfg, "Hom(K, E)_0")?;
    guard(e, k, cfg, "Hom(E, K)_0")?;
    let into = hom_space(k, e, 0);
    let back = hom_space(e, k, 0);
    if into.is_empty() || back.is_empty() {
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.trials.max(1) {
        let phi = random_combination(&mut rng, &into, e.p());
        let psi = random_combination(&mut rng, &back, e.p());
        if psi.compose(&phi).is_isomorphism() {
            return Ok(Some(kernel_module(&psi, e).0));
        }
    }
    Ok(None)
}

/// Nodes `σ^j M_i` for `i + j ≤ depth` and the sequences ending at those
/// with `i + j < depth`: `M_1` is the middle term at `M`, and `M_{i+1}` is
/// the complement of `σM_{i-1}` in the middle term at `M_i`.
#[derive(Clone, Debug)]
pub struct Cone {
    pub depth: usize,
    pub nodes: BTreeMap<(usize, usize), GradedModule>,
    pub sequences: BTreeMap<(usize, usize), ArSequence>,
    pub certain: bool,
}

pub fn cone(m: &GradedModule, depth: usize, cfg: &ArConfig) -> Result<Cone> {
    let mut nodes = BTreeMap::new();
    let mut sequences = BTreeMap::new();
    let mut certain = true;
    nodes.insert((0, 0), m.clone());
    for s in 0..depth {
        for i in 0..=s {
            let j = s - i;
            let x = nodes[&(i, j)].clone();
            let seq = if (i, j) == (0, 0) { ar_sequence(&x, cfg)? } else { ar_sequence_unchecked(&x, cfg)? };
            nodes.entry((i, j + 1)).or_insert_with(|| seq.left.clone());
            let next = if i == 0 {
                seq.middle.clone()
            } else {
                let known = &nodes[&(i - 1, j + 1)];
                split_complement(&seq.middle, known, cfg)?.ok_or_else(|| {
                    certain = false;
                    Error::Internal(format!("middle term at {} lacks σM_{}", node_label(i, j), i - 1))
                })?
            };
            nodes.insert((i + 1, j), next);
            sequences.insert((i, j), seq);
        }
    }
    Ok(Cone {
        depth,
        nodes,
        sequences,
        certain,
    })
}

/// Walk the component of `m` for `steps` layers and classify it.
pub fn sigma_orbit(m: &GradedModule, steps: usize, cfg: &ArConfig) -> Result<ComponentReport> {
    let shape = classify_component(m);
    let mut graph = Graph {
        cfg,
        modules: Vec::new(),
        nodes: Vec::new(),
        arrows: BTreeMap::new(),
    };
    if shape == ComponentShape::ProjectiveComponent {
        graph.node(m, "P");
        return Ok(graph.finish(shape, true, true, true));
    }
    require_koszul_indecomposable(m, cfg)?;
    let (mut additive, mut certified, mut certain) = (true, true, true);
    match shape {
        ComponentShape::PreinjectiveOfLoewy2 => {
            let mut cur = m.clone();
            let mut right = graph.node(&cur, "M");
            for j in 0..steps {
                let seq = if j == 0 { ar_sequence(&cur, cfg)? } else { ar_sequence_unchecked(&cur, cfg)? };
                certified &= seq.certificates.all();
                let (a, c) = graph.mesh(&seq, right, &node_label(0, j + 1));
                additive &= a;
                certain &= c;
                cur = seq.left.clone();
                right = graph.node(&cur, &node_label(0, j + 1));
            }
        }
        _ => {
            let cone = cone(m, steps, cfg)?;
            certain &= cone.certain;
            for (&(i, j), x) in &cone.nodes {
                graph.node(x, &node_label(i, j));
            }
            for (&(i, j), seq) in &cone.sequences {
                certified &= seq.certificates.all();
                let right = graph.node(&cone.nodes[&(i, j)], &node_label(i, j));
                let (a, c) = graph.mesh(seq, right, &node_label(i, j + 1));
                additive &= a;
                certain &= c;
            }
        }
    }
    Ok(graph.finish(shape, additive, certified, certain))
}

/// Ranks of `πF(σ^j M_i)` for `i + j ≤ depth`, filled by the recursion
/// `rk(σ^j M_{i+1}) = rk(σ^j M_i) + rk(σ^{i+j+1} M)` from the σ-orbit column
/// and, independently, from the Hilbert polynomial of every node.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankTable {
    pub depth: usize,
    /// `direct[i][j]`.
    pub direct: Vec<Vec<i128>>,
    pub recursion: Vec<Vec<i128>>,
    pub agrees: bool,
    pub strictly_increasing: bool,
    /// Nodes whose rank was also computed from a minimal resolution, and
    /// whether all of those agreed.
    pub resolution_checked: usize,
    pub resolution_agrees: bool,
    pub dims: Vec<Vec<Vec<(i32, usize)>>>,
}

impl RankTable {
    /// Rows `i`, columns `j`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>6}", "i\\j");
        for j in 0..=self.depth {
            let _ = write!(out, "{:>8}", j);
        }
        out.push('\n');
        for (i, row) in self.direct.iter().enumerate() {
            let _ = write!(out, "{:>6}", i);
            for (j, v) in row.iter().enumerate() {
                let mark = if self.recursion[i][j] == *v { "" } else { "!" };
                let _ = write!(out, "{:>8}", format!("{v}{mark}"));
            }
            out.push('\n');
        }
        out
    }
}

pub fn rank_recursion(m: &GradedModule, depth: usize, cfg: &ArConfig) -> Result<RankTable> {
    let soc = m.socle_subspace();
    if soc.dim(1) > 0 {
        let v = soc.basis(1).column(0);
        return Err(Error::Precondition(format!(
            "Hom(Λ_0[-1], M)_0 ≠ 0: socle vector {v:?} in degree 1"
        )));
    }
    let cone = cone(m, depth, cfg)?;
    let mut direct = vec![Vec::new(); depth + 1];
    let mut dims = vec![Vec::new(); depth + 1];
    let (mut checked, mut resolution_agrees) = (0, true);
    for i in 0..=depth {
        for j in 0..=depth - i {
            let x = &cone.nodes[&(i, j)];
            let rk = sheaf::rank_from_dims(x)?;
            if x.total_dim() <= cfg.rank_check_dim {
                checked += 1;
                resolution_agrees &= sheaf::rank(x, cfg.bound)? == rk;
            }
            direct[i].push(rk);
            dims[i].push(x.dims_by_degree());
        }
    }
    let mut recursion = vec![Vec::new(); depth + 1];
    recursion[0] = direct[0].clone();
    for i in 1..=depth {
        for j in 0..=depth - i {
            let v = recursion[i - 1][j] + recursion[0][i + j];
            recursion[i].push(v);
        }
    }
    let strictly_increasing = (1..=depth).all(|i| (0..=depth - i).all(|j| direct[i - 1][j] < direct[i][j]));
    Ok(RankTable {
        depth,
        agrees: direct == recursion,
        direct,
        recursion,
        strictly_increasing,
        resolution_checked: checked,
        resolution_agrees,
        dims,
    })
}

/// `τ` applied to a degree-0 map, through `f^*`, duality and `Ω²`.
pub fn tau_map(f: &ModuleMap, a: &GradedModule, b: &GradedModule) -> ModuleMap {
    let (sa, sb) = (star(a), star(b));
    let fs = star_map(f, a, b, &sa, &sb);
    let (da, db) = (sa.dual(), sb.dual());
    let dfs = fs.dual(&da, &db);
    let mut ra = Resolution::new(&da);
    let mut rb = Resolution::new(&db);
    syzygy_map(&mut ra, &mut rb, &dfs, 2)
}
