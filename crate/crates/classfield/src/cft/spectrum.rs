//! Spectra `Sp(𝔖, ℰ)`: pairs `(H, U)` with `U ⊴ H`, and their edge sets.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::CftError;
use crate::group::Elem;
use crate::ramification::RamificationDatum;
use crate::system::{SubId, SubgroupSystem};

/// Index of a pair in a [`Spectrum`].
pub type PairId = usize;

/// Verdicts for the coherence conditions; `None` means the condition holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coherence {
    pub l_witness: Option<String>,
    pub i_witness: Option<String>,
}

impl Coherence {
    pub fn l_coherent(&self) -> bool {
        self.l_witness.is_none()
    }

    pub fn i_coherent(&self) -> bool {
        self.i_witness.is_none()
    }

    pub fn coherent(&self) -> bool {
        self.l_coherent() && self.i_coherent()
    }
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    system: Arc<SubgroupSystem>,
    pairs: Vec<(SubId, SubId)>,
    index: BTreeMap<(SubId, SubId), PairId>,
    res: Vec<Vec<PairId>>,
    ind: Vec<Vec<PairId>>,
    conj: Vec<PairId>,
    coherence: Coherence,
}

impl Spectrum {
    /// Checks `U ⊴ H`, `H ∈ ℰ(H)` for every `H`, and conjugation closure.
    pub fn new(system: Arc<SubgroupSystem>, pairs: &[(SubId, SubId)]) -> Result<Spectrum, CftError> {
        let g = system.group();
        let n = system.len();
        let set: BTreeSet<(SubId, SubId)> = pairs.iter().copied().collect();
        for &(h, u) in &set {
            if h >= n || u >= n {
                return Err(CftError::InvalidSpectrum(format!("pair ({h},{u}) names an unknown subgroup")));
            }
            let (hs, us) = (system.subgroup(h), system.subgroup(u));
            if !us.is_subgroup_of(hs) || !g.is_normal_in(us, hs) {
                return Err(CftError::InvalidSpectrum(format!(
                    "U={} is not normal in H={}",
                    system.label(u),
                    system.label(h)
                )));
            }
        }
        if let Some(h) = system.ids().find(|&h| !set.contains(&(h, h))) {
            return Err(CftError::InvalidSpectrum(format!("H={} is missing from ℰ(H)", system.label(h))));
        }
        for &(h, u) in &set {
            for x in g.elements() {
                if !set.contains(&(system.conj(x, h), system.conj(x, u))) {
                    return Err(CftError::InvalidSpectrum(format!(
                        "ℰ is not conjugation-equivariant at g={x}, H={}, U={}",
                        system.label(h),
                        system.label(u)
                    )));
                }
            }
        }
        let pairs: Vec<(SubId, SubId)> = set.into_iter().collect();
        let index: BTreeMap<(SubId, SubId), PairId> = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        let res = pairs
            .iter()
            .map(|&(h, u)| system.res_set(h).iter().filter_map(|&i| index.get(&(i, u)).copied()).collect())
            .collect();
        let ind = pairs
            .iter()
            .map(|&(h, u)| {
                let us = system.subgroup(u);
                pairs
                    .iter()
                    .enumerate()
                    .filter(|(_, &(i, v))| system.in_ind(h, i) && system.subgroup(v).is_subgroup_of(us))
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        let mut conj = Vec::with_capacity(g.order() * pairs.len());
        for x in g.elements() {
            for &(h, u) in &pairs {
                conj.push(index[&(system.conj(x, h), system.conj(x, u))]);
            }
        }
        let mut s = Spectrum { system, pairs, index, res, ind, conj, coherence: Coherence::default() };
        s.coherence = s.compute_coherence();
        Ok(s)
    }

    /// The smallest spectrum containing `seeds`: adds `(H, H)` and all conjugates.
    pub fn generated(system: Arc<SubgroupSystem>, seeds: &[(SubId, SubId)]) -> Result<Spectrum, CftError> {
        let n = system.len();
        let mut set: BTreeSet<(SubId, SubId)> = system.ids().map(|h| (h, h)).collect();
        for &(h, u) in seeds {
            if h >= n || u >= n {
                return Err(CftError::InvalidSpectrum(format!("pair ({h},{u}) names an unknown subgroup")));
            }
            for x in system.group().elements() {
                set.insert((system.conj(x, h), system.conj(x, u)));
            }
        }
        let pairs: Vec<_> = set.into_iter().collect();
        Spectrum::new(system, &pairs)
    }

    /// Every `(H, U)` with `U ⊴ H` and `U` in the induction set of `H`.
    pub fn normal(system: Arc<SubgroupSystem>) -> Spectrum {
        let g = system.group();
        let pairs: Vec<(SubId, SubId)> = system
            .ids()
            .flat_map(|h| {
                let s = &system;
                s.ind_set(h)
                    .iter()
                    .filter(move |&&u| g.is_normal_in(s.subgroup(u), s.subgroup(h)))
                    .map(move |&u| (h, u))
            })
            .collect();
        Spectrum::new(system.clone(), &pairs).expect("normal pairs form a spectrum")
    }

    /// Normal pairs with `I_U = I_H`.
    pub fn unramified(system: Arc<SubgroupSystem>, datum: &RamificationDatum) -> Spectrum {
        Spectrum::normal(system).restrict(|s, (h, u)| datum.inertia(s.subgroup(h)) == datum.inertia(s.subgroup(u)))
    }

    /// The sub-spectrum of pairs satisfying `keep`; `(H, H)` is always kept.
    pub fn restrict(&self, keep: impl Fn(&SubgroupSystem, (SubId, SubId)) -> bool) -> Spectrum {
        let pairs: Vec<(SubId, SubId)> =
            self.pairs.iter().copied().filter(|&(h, u)| h == u || keep(&self.system, (h, u))).collect();
        Spectrum::new(self.system.clone(), &pairs).expect("conjugation-stable predicate keeps a spectrum")
    }

    pub fn system(&self) -> &Arc<SubgroupSystem> {
        &self.system
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn ids(&self) -> std::ops::Range<PairId> {
        0..self.pairs.len()
    }

    pub fn pair(&self, p: PairId) -> (SubId, SubId) {
        self.pairs[p]
    }

    pub fn pairs(&self) -> &[(SubId, SubId)] {
        &self.pairs
    }

    pub fn id_of(&self, h: SubId, u: SubId) -> Option<PairId> {
        self.index.get(&(h, u)).copied()
    }

    pub fn require(&self, h: SubId, u: SubId) -> Result<PairId, CftError> {
        self.id_of(h, u).ok_or(CftError::UnknownPair(h, u))
    }

    /// `E_r(H, U) = {(I, U) : I ∈ 𝔖_r(H), U ∈ ℰ(I)}`.
    pub fn res_set(&self, p: PairId) -> &[PairId] {
        &self.res[p]
    }

    /// `E_i(H, U) = {(I, V) : I ∈ 𝔖_i(H), V ∈ ℰ(I), V ≤ U}`.
    pub fn ind_set(&self, p: PairId) -> &[PairId] {
        &self.ind[p]
    }

    pub fn conj(&self, g: Elem, p: PairId) -> PairId {
        self.conj[g * self.pairs.len() + p]
    }

    /// `ℰ(H)`.
    pub fn extensions(&self, h: SubId) -> Vec<SubId> {
        self.pairs.iter().filter(|&&(a, _)| a == h).map(|&(_, u)| u).collect()
    }

    pub fn index(&self, p: PairId) -> usize {
        let (h, u) = self.pairs[p];
        self.system.index(h, u)
    }

    pub fn coherence(&self) -> &Coherence {
        &self.coherence
    }

    pub fn label(&self, p: PairId) -> String {
        let (h, u) = self.pairs[p];
        format!("({}, {})", self.system.label(h), self.system.label(u))
    }

    fn has(&self, h: SubId, u: SubId) -> bool {
        self.index.contains_key(&(h, u))
    }

    fn compute_coherence(&self) -> Coherence {
        let s = &self.system;
        let g = s.group();
        // with D = ℤ only the two-dimensional induction condition is left
        let l_witness = s.ids().find_map(|h| {
            let ext = self.extensions(h);
            ext.iter().find_map(|&u1| {
                let q = self.index[&(h, u1)];
                ext.iter()
                    .filter(|&&u2| s.subgroup(u2).is_subgroup_of(s.subgroup(u1)))
                    .find(|&&u2| !self.ind[q].contains(&self.index[&(h, u2)]))
                    .map(|&u2| format!("H={} U1={} U2={}", s.label(h), s.label(u1), s.label(u2)))
            })
        });
        let subgroups = g.all_subgroups();
        let i_witness = s.ids().find_map(|h| {
            let hs = s.subgroup(h);
            for u in self.extensions(h) {
                let us = s.subgroup(u);
                if !s.in_ind(h, u) {
                    return Some(format!("U={} is not in 𝔖_i(H={})", s.label(u), s.label(h)));
                }
                for between in subgroups.iter().filter(|k| us.is_subgroup_of(k) && k.is_subgroup_of(hs)) {
                    let Some(k) = s.id_of(between) else {
                        return Some(format!(
                            "{:?} between U={} and H={} is not in the system",
                            between.elements(),
                            s.label(u),
                            s.label(h)
                        ));
                    };
                    if g.is_normal_in(between, hs) && !(self.has(h, k) && self.has(k, u)) {
                        return Some(format!(
                            "U1={} above U={} in H={} is not an extension",
                            s.label(k),
                            s.label(u),
                            s.label(h)
                        ));
                    }
                    if !(s.in_ind(h, k) && self.has(k, u)) {
                        return Some(format!(
                            "(I={}, U={}) is not an induction edge of H={}",
                            s.label(k),
                            s.label(u),
                            s.label(h)
                        ));
                    }
                }
            }
            None
        });
        Coherence { l_witness, i_witness }
    }
}
