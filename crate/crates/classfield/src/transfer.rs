//! Pretransfer and transfer maps, the λ-presentation, and abelianization systems.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::abelian::{AbHom, AbelianError};
use crate::group::{
    transversal_in, validate_double_coset_reps_in, AbelianQuotient, Elem, FiniteGroup, GroupError, Side, Subgroup,
    Transversal,
};
use crate::report::Report;
use crate::system::{SubId, SubgroupSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("pretransfer of {0} lies outside the target coabelian subgroup")]
    NotTransferInducing(Elem),
    #[error("{0:?} is not a subgroup of the outer group")]
    NotContained(Vec<Elem>),
    #[error("transversal is not a right transversal of the inner group in the outer group")]
    WrongTransversal,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// `∏ κ_T(tᵢ·x)` over the representatives in their stored order.
pub fn pretransfer(g: &FiniteGroup, t: &Transversal, x: Elem) -> Elem {
    debug_assert_eq!(t.side(), Side::Right);
    t.reps().iter().fold(0, |acc, &ti| g.mul(acc, t.remover(g, g.mul(ti, x))))
}

type PairKey = (u64, Vec<Elem>, Vec<Elem>, Vec<Elem>, Vec<Elem>);

fn pair_cache() -> &'static Mutex<HashMap<PairKey, Option<Elem>>> {
    static CACHE: OnceLock<Mutex<HashMap<PairKey, Option<Elem>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Checks `V^T(R_outer) ⊆ R_inner` for the canonical transversal; memoized per group and subgroups.
pub fn check_transfer_pair(
    g: &FiniteGroup,
    outer: &Subgroup,
    inner: &Subgroup,
    r_outer: &Subgroup,
    r_inner: &Subgroup,
) -> Result<(), TransferError> {
    if !inner.is_subgroup_of(outer) {
        return Err(TransferError::NotContained(inner.elements().to_vec()));
    }
    let key = (
        g.tag(),
        outer.elements().to_vec(),
        inner.elements().to_vec(),
        r_outer.elements().to_vec(),
        r_inner.elements().to_vec(),
    );
    if let Some(hit) = pair_cache().lock().unwrap().get(&key) {
        return hit.map_or(Ok(()), |x| Err(TransferError::NotTransferInducing(x)));
    }
    let t = transversal_in(g, outer, inner, Side::Right);
    let bad = r_outer.elements().iter().copied().find(|&r| !r_inner.contains(pretransfer(g, &t, r)));
    pair_cache().lock().unwrap().insert(key, bad);
    bad.map_or(Ok(()), |x| Err(TransferError::NotTransferInducing(x)))
}

/// The transfer `K/R_K → H/R_H` as a homomorphism with explicit quotient witnesses.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub source: AbelianQuotient,
    pub target: AbelianQuotient,
    pub hom: AbHom,
    transversal: Transversal,
}

impl Transfer {
    pub fn new(g: &FiniteGroup, source: AbelianQuotient, target: AbelianQuotient) -> Result<Transfer, TransferError> {
        let t = transversal_in(g, &source.domain, &target.domain, Side::Right);
        Transfer::with_transversal(g, source, target, t)
    }

    pub fn with_transversal(
        g: &FiniteGroup,
        source: AbelianQuotient,
        target: AbelianQuotient,
        t: Transversal,
    ) -> Result<Transfer, TransferError> {
        if t.side() != Side::Right || t.ambient() != &source.domain || t.subgroup() != &target.domain {
            return Err(TransferError::WrongTransversal);
        }
        check_transfer_pair(g, &source.domain, &target.domain, &source.kernel, &target.kernel)?;
        let images: Vec<Vec<i64>> = (0..source.group.ngens())
            .map(|j| target.image(pretransfer(g, &t, source.generator_lift(j))).to_vec())
            .collect();
        let hom = AbHom::from_images(source.group.clone(), target.group.clone(), &images)?;
        Ok(Transfer { source, target, hom, transversal: t })
    }

    /// Transfer of an element of the outer group, computed from the pretransfer.
    pub fn of_element(&self, g: &FiniteGroup, x: Elem) -> Vec<i64> {
        self.target.image(pretransfer(g, &self.transversal, x)).to_vec()
    }

    pub fn transversal(&self) -> &Transversal {
        &self.transversal
    }
}

/// Transfer of one element: `K → H/R_H`, after checking the pair `(R_K, R_H)`.
pub fn transfer(
    g: &FiniteGroup,
    outer: &Subgroup,
    inner: &Subgroup,
    r_inner: &Subgroup,
    r_outer: &Subgroup,
    x: Elem,
) -> Result<Vec<i64>, TransferError> {
    if !outer.contains(x) {
        return Err(TransferError::Group(GroupError::UnknownElement(x)));
    }
    check_transfer_pair(g, outer, inner, r_outer, r_inner)?;
    let q = g.abelian_quotient(inner, r_inner)?;
    let t = transversal_in(g, outer, inner, Side::Right);
    Ok(q.image(pretransfer(g, &t, x)).to_vec())
}

/// Result of the λ-presentation: the value and the exponents `λ_x(ρ)` per representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaTransfer {
    pub value: Vec<i64>,
    pub lambdas: Vec<usize>,
}

/// `∏_ρ ρ x^{λ(ρ)} ρ⁻¹ mod R_H` over representatives of `H\K/⟨x⟩`.
pub fn transfer_via_lambda(
    g: &FiniteGroup,
    outer: &Subgroup,
    target: &AbelianQuotient,
    x: Elem,
    reps: &[Elem],
) -> Result<LambdaTransfer, TransferError> {
    let inner = &target.domain;
    if !inner.is_subgroup_of(outer) {
        return Err(TransferError::NotContained(inner.elements().to_vec()));
    }
    let cyc = g.cyclic_subgroup(x);
    validate_double_coset_reps_in(g, outer, inner, &cyc, reps)?;
    let mut value = target.group.zero();
    let mut lambdas = Vec::with_capacity(reps.len());
    for &rho in reps {
        let mut j = 1;
        let mut p = x;
        while !inner.contains(g.mul(g.mul(rho, p), g.inv(rho))) {
            p = g.mul(p, x);
            j += 1;
        }
        lambdas.push(j);
        value = target.group.add(&value, target.image(g.conj(rho, p)));
    }
    Ok(LambdaTransfer { value, lambdas })
}

/// A family `H ↦ R(H)` of coabelian normal subgroups over a subgroup system.
#[derive(Debug, Clone)]
pub struct AbelianizationSystem {
    system: Arc<SubgroupSystem>,
    assignment: Vec<Subgroup>,
}

impl AbelianizationSystem {
    pub fn new(system: Arc<SubgroupSystem>, assignment: Vec<Subgroup>) -> Result<Self, Report> {
        let report = validate_abelianization_system(&system, &assignment);
        if report.passed() {
            Ok(AbelianizationSystem { system, assignment })
        } else {
            Err(report)
        }
    }

    /// `R(H) = [H,H]`.
    pub fn commutators(system: Arc<SubgroupSystem>) -> Self {
        let g = system.group();
        let assignment = system.base().iter().map(|h| g.commutator_subgroup(h)).collect();
        AbelianizationSystem { system, assignment }
    }

    /// `R(H) = H`.
    pub fn total(system: Arc<SubgroupSystem>) -> Self {
        let assignment = system.base().to_vec();
        AbelianizationSystem { system, assignment }
    }

    pub fn system(&self) -> &Arc<SubgroupSystem> {
        &self.system
    }

    pub fn of(&self, h: SubId) -> &Subgroup {
        &self.assignment[h]
    }

    pub fn assignment(&self) -> &[Subgroup] {
        &self.assignment
    }

    pub fn quotient(&self, h: SubId) -> AbelianQuotient {
        self.system
            .group()
            .abelian_quotient(self.system.subgroup(h), &self.assignment[h])
            .expect("validated abelianization system")
    }
}

/// Checks normality, abelian quotients, conjugation equivariance, transfer compatibility and inclusion.
pub fn validate_abelianization_system(system: &SubgroupSystem, assignment: &[Subgroup]) -> Report {
    let mut report = Report::new();
    let g = system.group();
    if assignment.len() != system.len() {
        report.fail("shape", format!("expected {} subgroups, got {}", system.len(), assignment.len()));
        return report;
    }
    let coabelian = system.ids().find_map(|h| {
        let r = &assignment[h];
        let hh = system.subgroup(h);
        if !r.belongs_to(g) || !g.is_normal_in(r, hh) {
            return Some(format!("R(H)={:?} is not normal in H={}", r, system.label(h)));
        }
        let ok = hh.elements().iter().all(|&a| hh.elements().iter().all(|&b| r.contains(g.commutator(a, b))));
        (!ok).then(|| format!("H={}/R(H) is not abelian", system.label(h)))
    });
    report.record("coabelian", coabelian);
    if !report.passed() {
        return report;
    }
    let equi = g.elements().find_map(|x| {
        system.ids().find_map(|h| {
            let moved = g.conjugate(x, &assignment[h]);
            (moved != assignment[system.conj(x, h)]).then(|| format!("g={x} H={}", system.label(h)))
        })
    });
    report.record("conjugation", equi);
    let compat = system.ids().find_map(|h| {
        system.res_set(h).iter().find_map(|&i| {
            check_transfer_pair(g, system.subgroup(h), system.subgroup(i), &assignment[h], &assignment[i])
                .err()
                .map(|_| format!("H={} I={}", system.label(h), system.label(i)))
        })
    });
    report.record("transfer", compat);
    let incl = system.ids().find_map(|h| {
        system
            .ind_set(h)
            .iter()
            .find(|&&i| !assignment[i].is_subgroup_of(&assignment[h]))
            .map(|&i| format!("H={} I={}", system.label(h), system.label(i)))
    });
    report.record("inclusion", incl);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abelian::FgAbGroup;
    use crate::catalog;
    use crate::group::{double_coset_reps_in, random_transversal};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn c4_pretransfer_and_transfer() {
        let g = catalog::cyclic(4);
        let h = g.cyclic_subgroup(2);
        let t = transversal_in(&g, &g.whole(), &h, Side::Right);
        assert_eq!(t.reps(), &[0, 1]);
        assert_eq!(pretransfer(&g, &t, 1), 2);
        assert_eq!(pretransfer(&g, &t, 0), 0);
        let one = g.trivial_subgroup();
        let v = transfer(&g, &g.whole(), &h, &one, &one, 1).unwrap();
        let q = g.abelian_quotient(&h, &one).unwrap();
        assert_eq!(v, q.image(2));
    }

    #[test]
    fn s3_to_a3_transfer_is_trivial() {
        let g = catalog::by_name("S3").unwrap();
        let whole = g.whole();
        let a3 = g.commutator_subgroup(&whole);
        let qg = g.abelianization();
        let qa = g.abelian_quotient(&a3, &g.trivial_subgroup()).unwrap();
        assert_eq!(qa.group, FgAbGroup::cyclic(3));
        let tr = Transfer::new(&g, qg, qa).unwrap();
        assert!(tr.hom.is_zero());
        for x in g.elements() {
            assert!(tr.target.group.is_zero(&tr.of_element(&g, x)));
        }
    }

    #[test]
    fn transfer_to_self_is_identity() {
        let g = catalog::by_name("D4").unwrap();
        let tr = Transfer::new(&g, g.abelianization(), g.abelianization()).unwrap();
        assert_eq!(tr.hom, AbHom::identity(&tr.source.group));
    }

    #[test]
    fn non_inducing_pair_is_rejected() {
        // C4 -> <g^2> with R_G = G but R_H = 1: the pretransfer of g is g^2
        let g = catalog::cyclic(4);
        let h = g.cyclic_subgroup(2);
        let r = check_transfer_pair(&g, &g.whole(), &h, &g.whole(), &g.trivial_subgroup());
        assert_eq!(r, Err(TransferError::NotTransferInducing(1)));
    }

    #[test]
    fn lambda_presentation() {
        let g = catalog::cyclic(4);
        let h = g.cyclic_subgroup(2);
        let q = g.abelian_quotient(&h, &g.trivial_subgroup()).unwrap();
        let reps = double_coset_reps_in(&g, &g.whole(), &h, &g.cyclic_subgroup(1));
        assert_eq!(reps, vec![0]);
        let l = transfer_via_lambda(&g, &g.whole(), &q, 1, &reps).unwrap();
        assert_eq!(l.lambdas, vec![2]);
        assert_eq!(l.value, q.image(2));
        let reps0 = double_coset_reps_in(&g, &g.whole(), &h, &g.trivial_subgroup());
        let l0 = transfer_via_lambda(&g, &g.whole(), &q, 0, &reps0).unwrap();
        assert!(l0.lambdas.iter().all(|&l| l == 1));
        assert!(q.group.is_zero(&l0.value));
        assert!(transfer_via_lambda(&g, &g.whole(), &q, 1, &[0, 1]).is_err());
    }

    #[test]
    fn random_transversals_agree() {
        let g = catalog::symmetric4();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for h in g.all_subgroups() {
            let qg = g.abelianization();
            let qh = g.abelian_quotient(&h, &g.commutator_subgroup(&h)).unwrap();
            let base = Transfer::new(&g, qg.clone(), qh.clone()).unwrap();
            for _ in 0..3 {
                let t = random_transversal(&g, &g.whole(), &h, Side::Right, false, &mut rng);
                let other = Transfer::with_transversal(&g, qg.clone(), qh.clone(), t).unwrap();
                assert_eq!(base.hom, other.hom);
                for x in g.elements() {
                    assert_eq!(base.of_element(&g, x), other.of_element(&g, x));
                }
            }
        }
    }

    #[test]
    fn abelianization_system_checks() {
        let g = Arc::new(catalog::by_name("S3").unwrap());
        let sys = Arc::new(SubgroupSystem::full(g.clone()));
        let comm = AbelianizationSystem::commutators(sys.clone());
        assert!(validate_abelianization_system(&sys, comm.assignment()).passed());
        let total = AbelianizationSystem::total(sys.clone());
        assert!(validate_abelianization_system(&sys, total.assignment()).passed());
        // a non-normal R(G)
        let mut bad = comm.assignment().to_vec();
        let t = g.elements().find(|&x| g.element_order(x) == 2).unwrap();
        let whole = sys.whole_id().unwrap();
        bad[whole] = g.cyclic_subgroup(t);
        let r = validate_abelianization_system(&sys, &bad);
        assert!(!r.passed());
        assert!(r.first_failure().unwrap().witness.is_some());
    }
}
