//! Koszulness verdicts and the dimension data of the Koszul dual module.
//!
//! Every verdict is only valid up to `checked_up_to`; a witness, once found,
//! is permanent.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gmod::{GradedModule, GradedSubspace, ModuleMap};
use crate::linalg::{intersect_columns, Matrix};
use crate::resolve::{Coresolution, Resolution};

pub const DEFAULT_BOUND: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KoszulKind {
    None,
    Quasi,
    Weakly,
    Koszul,
}

/// Where a check first failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    /// `P_k` has a generator in degree `d` (normalized so `M` starts in 0).
    Generator { k: usize, d: i32 },
    /// The radical-layer condition fails for `J^j Ω^k`.
    Layer { j: usize, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulVerdict {
    /// The property that was tested.
    pub property: KoszulKind,
    pub holds: bool,
    pub checked_up_to: usize,
    pub witness: Option<Witness>,
}

impl KoszulVerdict {
    fn pass(property: KoszulKind, bound: usize) -> Self {
        KoszulVerdict {
            property,
            holds: true,
            checked_up_to: bound,
            witness: None,
        }
    }

    fn fail(property: KoszulKind, bound: usize, w: Witness) -> Self {
        KoszulVerdict {
            property,
            holds: false,
            checked_up_to: bound,
            witness: Some(w),
        }
    }
}

/// The single degree `m` is generated in, if any.
pub fn single_generator_degree(m: &GradedModule) -> Option<i32> {
    let degs = m.generator_degrees();
    match degs.first() {
        None => Some(0),
        Some(&g) if degs.iter().all(|&d| d == g) => Some(g),
        _ => None,
    }
}

/// Linear resolution up to `bound`: `P_k` generated in degree `k + g`.
pub fn is_koszul(m: &GradedModule, bound: usize) -> Result<KoszulVerdict> {
    let mut res = Resolution::new(m);
    is_koszul_with(&mut res, bound)
}

pub fn is_koszul_with(res: &mut Resolution, bound: usize) -> Result<KoszulVerdict> {
    let g = single_generator_degree(res.module())
        .ok_or_else(|| Error::Precondition("module is not generated in one degree".into()))?;
    for k in 0..=bound {
        let degs = res.generator_degrees(k);
        if degs.is_empty() {
            break;
        }
        if let Some(&d) = degs.iter().filter(|&&d| d != k as i32 + g).min() {
            let w = Witness::Generator { k, d: d - g };
            return Ok(KoszulVerdict::fail(KoszulKind::Koszul, bound, w));
        }
    }
    Ok(KoszulVerdict::pass(KoszulKind::Koszul, bound))
}

/// `J^j Ω^k = Ω^k ∩ J^{j+1} P_{k-1}` for `1 ≤ k ≤ bound` and every `j`.
pub fn is_weakly_koszul(m: &GradedModule, bound: usize) -> KoszulVerdict {
    layer_check(&mut Resolution::new(m), bound, None, KoszulKind::Weakly)
}

/// The `j = 1` case of the weakly Koszul condition.
pub fn is_quasi_koszul(m: &GradedModule, bound: usize) -> KoszulVerdict {
    layer_check(&mut Resolution::new(m), bound, Some(1), KoszulKind::Quasi)
}

pub fn is_weakly_koszul_with(res: &mut Resolution, bound: usize) -> KoszulVerdict {
    layer_check(res, bound, None, KoszulKind::Weakly)
}

fn radical_coordinates(step: &crate::resolve::Step, j: usize) -> GradedSubspace {
    let p = step.cover_module.p();
    GradedSubspace::from_fn(&step.cover_module, |d| {
        let mask = step.free.in_radical_power(d, j);
        let idx: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
        let mut e = Matrix::zeros(p, mask.len(), idx.len());
        for (c, &i) in idx.iter().enumerate() {
            e.set(i, c, 1);
        }
        e
    })
}

fn layer_check(res: &mut Resolution, bound: usize, only: Option<usize>, property: KoszulKind) -> KoszulVerdict {
    let r1 = res.module().algebra().nvars();
    for k in 1..=bound {
        let step = res.step(k - 1).clone();
        if step.kernel.is_zero() {
            break;
        }
        let omega = step.kernel_subspace();
        let ambient = &step.cover_module;
        let mut layer = omega.clone();
        let js: Vec<usize> = match only {
            Some(j) => vec![j],
            None => (0..=r1 + 1).collect(),
        };
        let mut done = 0;
        for j in js {
            while done < j {
                layer = ambient.radical_of(&layer);
                done += 1;
            }
            let rad = radical_coordinates(&step, j + 1);
            let cap = GradedSubspace::from_fn(ambient, |d| intersect_columns(omega.basis(d), rad.basis(d)));
            if !cap.same_as(&layer) {
                return KoszulVerdict::fail(property, bound, Witness::Layer { j, k });
            }
        }
    }
    KoszulVerdict::pass(property, bound)
}

/// Strongest of koszul, weakly, quasi that holds up to `bound`.
pub fn classify(m: &GradedModule, bound: usize) -> KoszulKind {
    let mut res = Resolution::new(m);
    if let Ok(v) = is_koszul_with(&mut res, bound) {
        if v.holds {
            return KoszulKind::Koszul;
        }
    }
    if layer_check(&mut res, bound, None, KoszulKind::Weakly).holds {
        return KoszulKind::Weakly;
    }
    if layer_check(&mut res, bound, Some(1), KoszulKind::Quasi).holds {
        return KoszulKind::Quasi;
    }
    KoszulKind::None
}

/// `m` is co-Koszul iff `D(m)` is Koszul; requires the socle in one degree.
pub fn is_co_koszul(m: &GradedModule, bound: usize) -> Result<KoszulVerdict> {
    is_koszul(&m.dual(), bound)
        .map_err(|_| Error::Precondition("module is not cogenerated in one degree".into()))
}

pub fn is_weakly_co_koszul(m: &GradedModule, bound: usize) -> KoszulVerdict {
    is_weakly_koszul(&m.dual(), bound)
}

pub fn is_quasi_co_koszul(m: &GradedModule, bound: usize) -> KoszulVerdict {
    is_quasi_koszul(&m.dual(), bound)
}

/// Which term supplies the denominator in the socle-quotient form of the
/// co-Koszul conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DenominatorIndex {
    /// `soc^{k+1} I_{j-2}`, mapped into `I_{j-1}` by the differential
    /// (`I_{-1}` is the module itself).
    TwoBack,
    /// `soc^{k+1} I_{j-1}`.
    OneBack,
}

/// Outcome of the socle-quotient check at one `(j, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiteralEntry {
    pub j: usize,
    pub k: usize,
    /// The denominator lies in the numerator and maps into `soc^k Ω^{-j}`.
    pub well_defined: bool,
    /// `soc^{k+2} I_{j-1} → soc^{k+1}Ω^{-j} / soc^k Ω^{-j}` is onto.
    pub surjective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LiteralReport {
    pub index: DenominatorIndex,
    pub verdict: KoszulVerdict,
    pub entries: Vec<LiteralEntry>,
}

fn image_of(f: &ModuleMap, sub: &GradedSubspace, tgt: &GradedModule) -> GradedSubspace {
    GradedSubspace::from_fn(tgt, |d| {
        let b = sub.basis(d);
        if b.cols() == 0 {
            Matrix::zeros(tgt.p(), tgt.dim(d), 0)
        } else {
            f.block(d).mul(b).image_basis()
        }
    })
}

/// The socle-quotient form of (weakly or quasi) co-Koszulness, computed
/// directly on the injective coresolution: for `1 ≤ j ≤ bound` and each `k`
/// (only `k = 0` when `quasi`), the map
/// `soc^{k+2} I_{j-1} / (denominator) → soc^{k+1}Ω^{-j} / soc^k Ω^{-j}`.
pub fn co_koszul_literal(m: &GradedModule, bound: usize, index: DenominatorIndex, quasi: bool) -> LiteralReport {
    let property = if quasi { KoszulKind::Quasi } else { KoszulKind::Weakly };
    let mut cores = Coresolution::new(m);
    let r1 = m.algebra().nvars();
    let mut entries = Vec::new();
    let mut witness = None;
    for j in 1..=bound {
        let step = cores.step(j - 1).clone();
        if step.envelope.is_zero() {
            break;
        }
        let inj = &step.envelope;
        let omega = &step.cokernel;
        let pi = &step.projection;
        // Differential into I_{j-1} and its source.
        let (prev_src, diff) = if j == 1 {
            (m.clone(), step.embedding.clone())
        } else {
            let before = cores.step(j - 2).clone();
            (before.envelope.clone(), step.embedding.compose(&before.projection))
        };
        let ks: Vec<usize> = if quasi { vec![0] } else { (0..=r1).collect() };
        for k in ks {
            let num = inj.socle_power_subspace(k + 2);
            let den = match index {
                DenominatorIndex::TwoBack => image_of(&diff, &prev_src.socle_power_subspace(k + 1), inj),
                DenominatorIndex::OneBack => inj.socle_power_subspace(k + 1),
            };
            let soc_k = omega.socle_power_subspace(k);
            let soc_k1 = omega.socle_power_subspace(k + 1);
            let well_defined = num.contains(&den) && soc_k.contains(&image_of(pi, &den, omega));
            let reached = image_of(pi, &num, omega).sum(&soc_k);
            let surjective = reached.contains(&soc_k1);
            entries.push(LiteralEntry {
                j,
                k,
                well_defined,
                surjective,
            });
            if !surjective && witness.is_none() {
                witness = Some(Witness::Layer { j: k, k: j });
            }
        }
    }
    let verdict = match witness {
        Some(w) => KoszulVerdict::fail(property, bound, w),
        None => KoszulVerdict::pass(property, bound),
    };
    LiteralReport { index, verdict, entries }
}

/// Hilbert function `f_k = dim Ext^k(M, Λ_0)` of the Koszul dual module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KoszulDualData {
    pub f: Vec<usize>,
    pub generator_degree: i32,
    pub checked_up_to: usize,
}

pub fn koszul_dual_data(m: &GradedModule, bound: usize) -> Result<KoszulDualData> {
    let mut res = Resolution::new(m);
    koszul_dual_data_with(&mut res, bound)
}

pub fn koszul_dual_data_with(res: &mut Resolution, bound: usize) -> Result<KoszulDualData> {
    let v = is_koszul_with(res, bound)?;
    if !v.holds {
        return Err(Error::Precondition(format!(
            "module is not Koszul (witness {:?})",
            v.witness.unwrap()
        )));
    }
    let g = single_generator_degree(res.module()).unwrap();
    let f = (0..=bound).map(|k| res.generator_degrees(k).len()).collect();
    Ok(KoszulDualData {
        f,
        generator_degree: g,
        checked_up_to: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmod::Algebra;
    use crate::resolve::syzygy;

    fn alg(r: usize) -> Algebra {
        Algebra::new(r, 32003).unwrap()
    }

    #[test]
    fn residue_field_and_syzygies_are_koszul() {
        for r in 1..=2 {
            let a = alg(r);
            let k = a.simple(0);
            assert!(is_koszul(&k, 6).unwrap().holds);
            let o3 = syzygy(&k, 3).shift(3);
            assert!(is_koszul(&o3, 5).unwrap().holds);
        }
    }

    #[test]
    fn truncated_free_module_is_not_koszul() {
        let a = alg(2);
        let m = a.regular().loewy2();
        let v = is_koszul(&m, 8).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::Generator { k: 1, d: 2 }));
    }

    #[test]
    fn mixed_generators_are_rejected() {
        let a = alg(1);
        let (m, _, _) = a.simple(0).direct_sum(&a.simple(1)).unwrap();
        assert!(is_koszul(&m, 3).is_err());
    }

    #[test]
    fn implication_chain() {
        let a = alg(2);
        for m in [a.simple(0), a.regular().truncate(1).shift(1), a.regular()] {
            assert!(is_koszul(&m, 5).unwrap().holds);
            assert!(is_weakly_koszul(&m, 5).holds);
            assert!(is_quasi_koszul(&m, 5).holds);
        }
    }

    #[test]
    fn weakly_koszul_non_example() {
        // Over two variables, Λ/J² has syzygy J² = soc Λ, generated in
        // degree 2 but lying in J P_0 only.
        let a = alg(1);
        let m = a.regular().loewy2();
        let v = is_weakly_koszul(&m, 4);
        assert!(!v.holds);
        assert_eq!(v.witness, Some(Witness::Layer { j: 1, k: 1 }));
        assert!(!is_quasi_koszul(&m, 4).holds);
        assert_eq!(classify(&m, 4), KoszulKind::None);
    }

    #[test]
    fn co_variants() {
        let a = alg(2);
        assert!(is_co_koszul(&a.simple(0), 5).unwrap().holds);
        assert!(is_co_koszul(&a.regular(), 5).unwrap().holds);
    }

    #[test]
    fn literal_and_dual_routes_agree() {
        for r in 1..=2 {
            let a = alg(r);
            let samples = [
                a.simple(0),
                a.regular().truncate(1).shift(1),
                a.regular().loewy2(),
                syzygy(&a.simple(0), 2).shift(2),
            ];
            for m in samples {
                let dual = is_weakly_co_koszul(&m, 3).holds;
                for idx in [DenominatorIndex::TwoBack, DenominatorIndex::OneBack] {
                    let lit = co_koszul_literal(&m, 3, idx, false);
                    assert_eq!(lit.verdict.holds, dual, "r={r} {:?} {idx:?}", m.dims_by_degree());
                }
                let q = is_quasi_co_koszul(&m, 3).holds;
                assert_eq!(co_koszul_literal(&m, 3, DenominatorIndex::OneBack, true).verdict.holds, q);
            }
        }
    }

    #[test]
    fn dual_data() {
        let a = alg(2);
        let d = koszul_dual_data(&a.simple(0), 4).unwrap();
        assert_eq!(d.f, vec![1, 3, 6, 10, 15]);
        let d = koszul_dual_data(&a.regular(), 3).unwrap();
        assert_eq!(d.f, vec![1, 0, 0, 0]);
        let a1 = alg(1);
        let j1 = a1.regular().truncate(1).shift(1);
        let d = koszul_dual_data(&j1, 4).unwrap();
        let k = koszul_dual_data(&a1.simple(0), 5).unwrap();
        assert_eq!(d.f, k.f[1..].to_vec());
        assert!(koszul_dual_data(&alg(2).regular().loewy2(), 3).is_err());
    }
}
