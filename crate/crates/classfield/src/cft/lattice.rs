//! Norm-subgroup lattices `U ↦ Φ(H, U)` and the reduced-versus-full isomorphy checks.

use std::sync::Arc;

use super::representation::{validate_rep_morphism, RepMorphism, Tautological};
use super::spectrum::{PairId, Spectrum};
use super::tate::check_class_field_axiom;
use super::CftError;
use crate::abelian::{Biproduct, FgAbGroup, Order};
use crate::mackey::RicFunctor;
use crate::ramification::factorize;
use crate::report::Report;
use crate::transfer::AbelianizationSystem;

/// `Φ(H, U) ≤ A(H)` given by generators, one entry per pair of the spectrum.
#[derive(Debug, Clone)]
pub struct NormAssignment {
    pub spectrum: Arc<Spectrum>,
    /// `A(H)`, indexed by subgroup id.
    pub ambient: Vec<FgAbGroup>,
    pub generators: Vec<Vec<Vec<i64>>>,
}

impl NormAssignment {
    /// `Φ(H, U) = U·R(H)/R(H) ≤ H/R(H)`.
    pub fn tautological(taut: &Tautological) -> NormAssignment {
        let sp = taut.spectrum().clone();
        let s = sp.system();
        let g = s.group();
        let rq: Vec<_> = s.ids().map(|h| taut.abelianization.quotient(h)).collect();
        let generators = sp
            .ids()
            .map(|p| {
                let (h, u) = sp.pair(p);
                g.generating_set(s.subgroup(u)).iter().map(|&x| rq[h].image(x).to_vec()).collect()
            })
            .collect();
        NormAssignment { ambient: rq.into_iter().map(|q| q.group).collect(), spectrum: sp, generators }
    }

    /// `Φ(H, U) = ind_{H,U} C(U) ≤ C(H)`.
    pub fn induction(c: &RicFunctor, spectrum: Arc<Spectrum>) -> Result<NormAssignment, CftError> {
        let s = spectrum.system();
        if s.base() != c.system().base() {
            return Err(CftError::Structure("functor and spectrum live on different subgroup systems".into()));
        }
        let generators = spectrum
            .ids()
            .map(|p| {
                let (h, u) = spectrum.pair(p);
                let ind = c.try_ind(h, u).ok_or_else(|| {
                    CftError::NotMackeyCover(format!("U={} is not in 𝔖_i(H={})", s.label(u), s.label(h)))
                })?;
                Ok((0..c.value(u).ngens()).map(|j| ind.apply(&c.value(u).generator(j))).collect())
            })
            .collect::<Result<Vec<_>, CftError>>()?;
        Ok(NormAssignment { ambient: c.values().to_vec(), spectrum, generators })
    }

    fn ambient_of(&self, p: PairId) -> &FgAbGroup {
        &self.ambient[self.spectrum.pair(p).0]
    }

    fn contains(a: &FgAbGroup, outer: &[Vec<i64>], inner: &[Vec<i64>]) -> bool {
        let q = a.quotient(outer);
        inner.iter().all(|x| q.group.is_zero(&q.project(x)))
    }

    fn equal(a: &FgAbGroup, x: &[Vec<i64>], y: &[Vec<i64>]) -> bool {
        Self::contains(a, x, y) && Self::contains(a, y, x)
    }

    fn intersection(a: &FgAbGroup, x: &[Vec<i64>], y: &[Vec<i64>]) -> Vec<Vec<i64>> {
        let (ex, ey) = (a.subgroup(x), a.subgroup(y));
        let bp = Biproduct::new(&ex.group, &ey.group);
        let diff = bp.proj[0].then(&ex.embedding).sub(&bp.proj[1].then(&ey.embedding));
        let k = diff.kernel();
        (0..k.group.ngens())
            .map(|j| ex.embedding.apply(&bp.proj[0].apply(&k.embedding.apply(&k.group.generator(j)))))
            .collect()
    }
}

/// Monotonicity, `Φ(U₁U₂) = Φ(U₁)Φ(U₂)`, `Φ(U₁∩U₂) = Φ(U₁)∩Φ(U₂)` and injectivity over pairs
/// of extensions in `ℰ(H)`. Intersection and injectivity are checked on `R`-lattices
/// (`U ⊇ R(H)`), where `Φ(H, ·)` sees the whole of `U`.
pub fn lattice_property_check(phi: &NormAssignment, r: &AbelianizationSystem) -> Report {
    let sp = &phi.spectrum;
    let s = sp.system();
    let g = s.group();
    let mut report = Report::new();
    let mut monotone = None;
    let mut product = None;
    let mut intersection = None;
    let mut injective = None;
    let r_lattice = |h, u| r.of(h).is_subgroup_of(s.subgroup(u));
    'outer: for h in s.ids() {
        let ext: Vec<PairId> = sp.extensions(h).into_iter().map(|u| sp.id_of(h, u).expect("extension")).collect();
        for &p1 in &ext {
            for &p2 in &ext {
                let (u1, u2) = (sp.pair(p1).1, sp.pair(p2).1);
                let (s1, s2) = (s.subgroup(u1), s.subgroup(u2));
                let a = phi.ambient_of(p1);
                let (x1, x2) = (&phi.generators[p1], &phi.generators[p2]);
                let witness = || format!("H={} U1={} U2={}", s.label(h), s.label(u1), s.label(u2));
                if monotone.is_none() && s1.is_subgroup_of(s2) && !NormAssignment::contains(a, x2, x1) {
                    monotone = Some(witness());
                }
                if product.is_none() {
                    let join = g.join(s1, s2);
                    if let Some(q) = s.id_of(&join).and_then(|j| sp.id_of(h, j)) {
                        let sum: Vec<Vec<i64>> = x1.iter().chain(x2).cloned().collect();
                        if !NormAssignment::equal(a, &phi.generators[q], &sum) {
                            product = Some(witness());
                        }
                    }
                }
                if !(r_lattice(h, u1) && r_lattice(h, u2)) {
                    continue;
                }
                if intersection.is_none() {
                    let meet = g.intersection(s1, s2);
                    if let Some(q) = s.id_of(&meet).and_then(|m| sp.id_of(h, m)) {
                        let both = NormAssignment::intersection(a, x1, x2);
                        if !NormAssignment::equal(a, &phi.generators[q], &both) {
                            intersection = Some(witness());
                        }
                    }
                }
                if injective.is_none() && u1 != u2 && NormAssignment::equal(a, x1, x2) {
                    injective = Some(witness());
                }
                if monotone.is_some() && product.is_some() && intersection.is_some() && injective.is_some() {
                    break 'outer;
                }
            }
        }
    }
    report.record("lattice.monotone", monotone);
    report.record("lattice.product", product);
    report.record("lattice.intersection", intersection);
    report.record("lattice.injective", injective);
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionMode {
    /// Isomorphy on prime-index pairs plus the class field axiom there.
    Prime,
    /// Isomorphy on pairs with cyclic quotient of prime-power order.
    PrimePower,
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub report: Report,
    pub hypotheses: bool,
    pub reduced: bool,
    pub full: bool,
}

fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, k)] => Some((*p, *k)),
        _ => None,
    }
}

/// Compares isomorphy of `θ: π_𝔎 → Φ` on the reduced set of pairs with isomorphy everywhere.
/// `class_field` supplies the functor whose class field axiom is assumed in prime mode.
pub fn reduced_verification(
    taut: &Tautological,
    theta: &RepMorphism,
    mode: ReductionMode,
    class_field: Option<&RicFunctor>,
) -> ReductionOutcome {
    let sp = taut.spectrum();
    let mut report = Report::new();
    let morphism = validate_rep_morphism(theta);
    let source_ok = Arc::ptr_eq(&theta.source, &taut.representation);
    report.record(
        "hypothesis.morphism",
        if !source_ok {
            Some("θ does not start at the tautological representation".into())
        } else {
            morphism.first_failure().map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()))
        },
    );
    let coherence = sp.coherence();
    report.record("hypothesis.coherent", coherence.i_witness.clone().or_else(|| coherence.l_witness.clone()));

    let r_pairs: Vec<PairId> = sp.ids().filter(|&p| taut.is_r_pair(p)).collect();
    let order = |p: PairId| taut.representation.value(p).order().finite().unwrap_or(0);
    let reduced_pairs: Vec<PairId> = r_pairs
        .iter()
        .copied()
        .filter(|&p| {
            let n = order(p);
            match mode {
                ReductionMode::PrimePower => taut.representation.value(p).is_cyclic() && prime_power(n).is_some(),
                ReductionMode::Prime => prime_power(n).is_some_and(|(_, k)| k == 1),
            }
        })
        .collect();

    if mode == ReductionMode::Prime {
        match class_field {
            None => report.skip("hypothesis.class_field_axiom", "no class functor supplied"),
            Some(c) => {
                let s = sp.system();
                let bad = reduced_pairs.iter().find_map(|&p| {
                    let (h, u) = sp.pair(p);
                    match check_class_field_axiom(c, h, u) {
                        Ok(true) => None,
                        Ok(false) => Some(format!("fails at {}", sp.label(p))),
                        Err(e) => Some(format!("{e} at H={} U={}", s.label(h), s.label(u))),
                    }
                });
                report.record("hypothesis.class_field_axiom", bad);
            }
        }
    }
    let hypotheses = report.passed();

    let not_iso = |p: &PairId| !theta.components[*p].is_isomorphism();
    let reduced = reduced_pairs.iter().find(|p| not_iso(p)).map(|&p| format!("not an isomorphism at {}", sp.label(p)));
    report.record("reduced", reduced.clone());
    let full =
        r_pairs.iter().find(|p| not_iso(p)).map(|&p| format!("not an isomorphism at {}", sp.label(p))).or_else(|| {
            sp.ids().find(|&p| !theta.components[p].is_injective()).map(|p| format!("not injective at {}", sp.label(p)))
        });
    report.record("full", full.clone());
    let (reduced, full) = (reduced.is_none(), full.is_none());
    report.record(
        "agreement",
        (hypotheses && reduced && !full).then(|| "reduced check passes but the full check fails".to_string()),
    );
    ReductionOutcome { report, hypotheses, reduced, full }
}

/// `Φ(H, U)` has index `[H:U]` in `A(H)` wherever `A(H)` is finite.
pub fn norm_index_report(phi: &NormAssignment) -> Report {
    let sp = &phi.spectrum;
    let mut report = Report::new();
    let bad = sp.ids().find(|&p| {
        let a = phi.ambient_of(p);
        a.order() != Order::Infinite
            && a.quotient(&phi.generators[p]).group.order() != Order::Finite(sp.index(p) as u64)
    });
    report.record("lattice.norm_index", bad.map(|p| sp.label(p)));
    report
}
