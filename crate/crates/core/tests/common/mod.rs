//! Module builders and seeded samplers shared by the integration tests.
#![allow(dead_code)]

use koszul_core::gmod::{direct_sum_all, hom_space, Algebra, GradedModule, ModuleMap};
use koszul_core::koszul::is_koszul;
use koszul_core::linalg::DEFAULT_P;
use koszul_core::resolve::{projective_cover, strip_projective, syzygy};
use koszul_core::sheaf::{self, LocalFreeness, SheafConfig};
use proptest::test_runner::{Config, RngAlgorithm, RngSeed, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod properties;

pub const SAMPLE_BOUND: usize = 6;

pub fn alg(r: usize) -> Algebra {
    Algebra::new(r, DEFAULT_P).unwrap()
}

pub fn j1(a: &Algebra) -> GradedModule {
    a.regular().truncate(1).shift(1)
}

/// `soc² Λ` moved to start in degree 0.
pub fn soc2(a: &Algebra) -> GradedModule {
    let l = a.regular();
    l.submodule(&l.socle_power_subspace(2)).0.shift(a.r() as i32)
}

pub fn loewy2(a: &Algebra) -> GradedModule {
    a.regular().loewy2()
}

/// `Ω^k Λ_0 [k]`.
pub fn omega_k(a: &Algebra, k: usize) -> GradedModule {
    syzygy(&a.simple(0), k).shift(k as i32)
}

/// `Λ / (ℓ_1, …)` for linear forms given by coordinates in `x_0, …, x_r`.
pub fn linear_quotient(a: &Algebra, forms: &[Vec<u32>]) -> GradedModule {
    let l = a.regular();
    let gens: Vec<(i32, Vec<u32>)> = forms.iter().map(|f| (1, f.clone())).collect();
    l.quotient(&l.generated_by(&gens)).0
}

pub fn sheaf_cfg() -> SheafConfig {
    SheafConfig {
        summandwise: true,
        bound: SAMPLE_BOUND,
        ..SheafConfig::default()
    }
}

pub fn locally_free(m: &GradedModule) -> bool {
    let v = sheaf::is_locally_free(m, &sheaf_cfg()).unwrap();
    assert_ne!(v.status, LocalFreeness::Inconclusive, "inconclusive on {:?}", m.dims_by_degree());
    v.status == LocalFreeness::LocallyFree
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize, p: u32) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..p)).collect()
}

/// `F / (relations)` with `F` free on `degs` and a few random homogeneous
/// relations of degree at least `min_rel`.
fn random_quotient(rng: &mut ChaCha8Rng, a: &Algebra, degs: &[i32], min_rel: i32, rels: std::ops::RangeInclusive<usize>) -> GradedModule {
    let parts: Vec<GradedModule> = degs.iter().map(|&d| a.regular().shift(-d)).collect();
    let refs: Vec<&GradedModule> = parts.iter().collect();
    let f = direct_sum_all(*a, &refs);
    let candidates: Vec<i32> = f.degrees().filter(|&d| d >= min_rel && f.dim(d) > 0).collect();
    let n = rng.gen_range(rels);
    let mut rels = Vec::new();
    for _ in 0..n {
        if candidates.is_empty() {
            break;
        }
        let d = candidates[rng.gen_range(0..candidates.len())];
        rels.push((d, random_vector(rng, f.dim(d), a.p())));
    }
    f.quotient(&f.generated_by(&rels)).0
}

/// A small nonzero module, not necessarily Koszul.
pub fn random_module(rng: &mut ChaCha8Rng, r: usize) -> GradedModule {
    let a = alg(r);
    loop {
        let g = rng.gen_range(1..=2);
        let degs: Vec<i32> = (0..g).map(|_| rng.gen_range(0..=1)).collect();
        let mut m = random_quotient(rng, &a, &degs, 1, 0..=3);
        if rng.gen_bool(0.3) {
            m = m.truncate_above(rng.gen_range(1..=r as i32 + 1));
        }
        if !m.is_zero() {
            return m;
        }
    }
}

/// A nonzero module generated in the single degree `g`, with a number of
/// relations in `rels`, all of degree at least `g + gap`.
pub fn random_generated_in(
    rng: &mut ChaCha8Rng,
    r: usize,
    g: i32,
    gap: i32,
    rels: std::ops::RangeInclusive<usize>,
) -> GradedModule {
    let a = alg(r);
    loop {
        let n = rng.gen_range(1..=2);
        let m = random_quotient(rng, &a, &vec![g; n], g + gap, rels.clone());
        if !m.is_zero() {
            return m;
        }
    }
}

/// `Ω^k K[k]` and its direct sums and twists; all have locally free sheaves.
pub fn random_locally_free(rng: &mut ChaCha8Rng, r: usize) -> GradedModule {
    let a = alg(r);
    let pick = |rng: &mut ChaCha8Rng| omega_k(&a, rng.gen_range(0..=2));
    let mut m = pick(rng);
    if rng.gen_bool(0.3) {
        m = m.direct_sum(&pick(rng)).unwrap().0;
    }
    if rng.gen_bool(0.3) {
        m = sheaf::twist(&m, 1);
    }
    m
}

/// A nonzero non-projective Koszul module generated in degree 0.
pub fn random_koszul(rng: &mut ChaCha8Rng, r: usize) -> GradedModule {
    let a = alg(r);
    loop {
        let m = match rng.gen_range(0..5) {
            0 => omega_k(&a, rng.gen_range(0..=2)),
            1 => {
                let n = rng.gen_range(1..=r);
                let forms: Vec<Vec<u32>> = (0..n).map(|_| random_vector(rng, r + 1, a.p())).collect();
                linear_quotient(&a, &forms)
            }
            2 => {
                let n = rng.gen_range(1..=2);
                random_quotient(rng, &a, &vec![0; n], 1, 0..=2)
            }
            3 => random_locally_free(rng, r).truncate(0),
            _ => {
                let x = random_koszul(rng, r);
                let y = omega_k(&a, rng.gen_range(0..=1));
                x.direct_sum(&y).unwrap().0
            }
        };
        let (m, _) = strip_projective(&m);
        if m.is_zero() || m.d_min() != 0 {
            continue;
        }
        if is_koszul(&m, SAMPLE_BOUND).map(|v| v.holds).unwrap_or(false) {
            return m;
        }
    }
}

/// `0 → x → y → z → 0` from a random class `η: Ωz → x`, as the pushout of
/// `Ωz → P_0(z)` along `η`.
pub fn random_extension(rng: &mut ChaCha8Rng, x: &GradedModule, z: &GradedModule) -> (GradedModule, ModuleMap, ModuleMap) {
    let p = x.p();
    let cover = projective_cover(z);
    let homs = hom_space(&cover.kernel, x, 0);
    let mut eta = ModuleMap::zero(&cover.kernel, x, 0);
    for h in &homs {
        eta = eta.add(&h.scale(rng.gen_range(0..p)));
    }
    let (sum, inc_x, inc_p) = x.direct_sum(&cover.cover_module).unwrap();
    let rel = inc_x.compose(&eta).add(&inc_p.compose(&cover.inclusion).scale(p - 1));
    let (y, q) = sum.quotient(&rel.image(&sum));
    let f = q.compose(&inc_x);
    let to_z = ModuleMap::from_fn(&sum, z, 0, |d| {
        koszul_core::linalg::Matrix::zeros(p, z.dim(d), x.dim(d)).hstack(&cover.cover.block(d))
    });
    let g = ModuleMap::from_fn(&y, z, 0, |d| {
        let s = q.block(d).solve_matrix(&koszul_core::linalg::Matrix::identity(p, y.dim(d))).unwrap();
        to_z.block(d).mul(&s)
    });
    (y, f, g)
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A runner with a pinned seed and `cases` cases.
pub fn runner(cases: u32, seed: u64) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(seed),
        ..Config::default()
    };
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &bytes))
}

pub fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}
