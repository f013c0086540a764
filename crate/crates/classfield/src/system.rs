//! Conjugation-closed families of subgroups with restriction and induction sets.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{Elem, FiniteGroup, GroupError, Subgroup};
use crate::report::Report;

/// Index of a subgroup in the base of a [`SubgroupSystem`].
pub type SubId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SystemError {
    #[error("subgroup {0:?} is not in the system")]
    UnknownSubgroup(Vec<Elem>),
    #[error("invalid subgroup system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone)]
pub struct SubgroupSystem {
    group: Arc<FiniteGroup>,
    base: Vec<Subgroup>,
    index: HashMap<Vec<Elem>, SubId>,
    res_sets: Vec<Vec<SubId>>,
    ind_sets: Vec<Vec<SubId>>,
    res_mask: Vec<Vec<bool>>,
    ind_mask: Vec<Vec<bool>>,
    conj: Vec<SubId>,
    is_mackey: bool,
    is_arithmetic: bool,
}

/// Unvalidated system data; `res_sets[i]` and `ind_sets[i]` index into `base`.
#[derive(Debug, Clone)]
pub struct SystemCandidate {
    pub group: Arc<FiniteGroup>,
    pub base: Vec<Subgroup>,
    pub res_sets: Vec<Vec<SubId>>,
    pub ind_sets: Vec<Vec<SubId>>,
}

impl SystemCandidate {
    /// Restriction and induction sets are all base members inside each `H`.
    pub fn from_base(group: Arc<FiniteGroup>, base: Vec<Subgroup>) -> Self {
        let sets: Vec<Vec<SubId>> =
            base.iter().map(|h| (0..base.len()).filter(|&i| base[i].is_subgroup_of(h)).collect()).collect();
        SystemCandidate { group, base, res_sets: sets.clone(), ind_sets: sets }
    }
}

fn label(h: &Subgroup) -> String {
    format!("{:?}", h.elements())
}

/// Checks the subgroup-system axioms and, on success, builds the system.
/// The Mackey and arithmetic properties are reported as flags, not failures.
pub fn validate_subgroup_system(c: &SystemCandidate) -> (Report, Option<SubgroupSystem>) {
    let mut report = Report::new();
    let g = &*c.group;
    let n = c.base.len();
    if c.res_sets.len() != n || c.ind_sets.len() != n {
        report.fail("shape", "restriction/induction sets must have one entry per base subgroup");
        return (report, None);
    }
    let mut index = HashMap::new();
    let mut shape = None;
    for (i, h) in c.base.iter().enumerate() {
        if !h.belongs_to(g) {
            shape = Some(format!("{} belongs to another group", label(h)));
        } else if index.insert(h.elements().to_vec(), i).is_some() {
            shape = Some(format!("{} listed twice", label(h)));
        }
    }
    if shape.is_none() {
        if let Some(bad) = c.res_sets.iter().chain(&c.ind_sets).flatten().find(|&&j| j >= n) {
            shape = Some(format!("set member {bad} out of range"));
        }
    }
    if let Some(w) = shape {
        report.fail("shape", w);
        return (report, None);
    }
    report.pass("shape");

    let mut conj = vec![usize::MAX; g.order() * n];
    let mut conj_witness = None;
    'outer: for x in g.elements() {
        for (i, h) in c.base.iter().enumerate() {
            match index.get(g.conjugate(x, h).elements()) {
                Some(&j) => conj[x * n + i] = j,
                None => {
                    conj_witness = Some(format!("g={x} H={}", label(h)));
                    break 'outer;
                }
            }
        }
    }
    report.record("conjugation_closed", conj_witness.clone());
    if conj_witness.is_some() {
        return (report, None);
    }

    let sets =
        |s: &Vec<Vec<SubId>>| -> Vec<BTreeSet<SubId>> { s.iter().map(|v| v.iter().copied().collect()).collect() };
    let (res, ind) = (sets(&c.res_sets), sets(&c.ind_sets));
    for (name, fam) in [("res", &res), ("ind", &ind)] {
        let refl = (0..n).find(|&i| !fam[i].contains(&i)).map(|i| format!("H={}", label(&c.base[i])));
        report.record(format!("{name}.reflexive"), refl);
        let sub = (0..n)
            .flat_map(|i| fam[i].iter().map(move |&j| (i, j)))
            .find(|&(i, j)| !c.base[j].is_subgroup_of(&c.base[i]))
            .map(|(i, j)| format!("H={} I={}", label(&c.base[i]), label(&c.base[j])));
        report.record(format!("{name}.members_are_subgroups"), sub);
        let trans = (0..n)
            .flat_map(|i| fam[i].iter().map(move |&j| (i, j)))
            .find(|&(i, j)| !fam[j].is_subset(&fam[i]))
            .map(|(i, j)| format!("H={} I={}", label(&c.base[i]), label(&c.base[j])));
        report.record(format!("{name}.transitive"), trans);
        let mut equi = None;
        'eq: for x in g.elements() {
            for i in 0..n {
                let moved: BTreeSet<SubId> = fam[i].iter().map(|&j| conj[x * n + j]).collect();
                if moved != fam[conj[x * n + i]] {
                    equi = Some(format!("g={x} H={}", label(&c.base[i])));
                    break 'eq;
                }
            }
        }
        report.record(format!("{name}.equivariant"), equi);
    }
    if !report.passed() {
        return (report, None);
    }

    let mut mackey_witness = None;
    'mk: for h in 0..n {
        for &i in &res[h] {
            for &j in &ind[h] {
                let meet = g.intersection(&c.base[i], &c.base[j]);
                let ok = index.get(meet.elements()).is_some_and(|k| res[j].contains(k) && ind[i].contains(k));
                if !ok {
                    mackey_witness =
                        Some(format!("H={} I={} J={}", label(&c.base[h]), label(&c.base[i]), label(&c.base[j])));
                    break 'mk;
                }
            }
        }
    }
    let is_mackey = mackey_witness.is_none();
    match &mackey_witness {
        None => report.pass("mackey"),
        Some(w) => report.skip("mackey", format!("not a Mackey system: {w}")),
    }
    let all = g.all_subgroups();
    let mut arith_witness = None;
    'ar: for h in 0..n {
        for k in all.iter().filter(|k| k.is_subgroup_of(&c.base[h])) {
            let ok = index.get(k.elements()).is_some_and(|j| res[h].contains(j) && ind[h].contains(j));
            if !ok {
                arith_witness = Some(format!("H={} K={}", label(&c.base[h]), label(k)));
                break 'ar;
            }
        }
    }
    let is_arithmetic = arith_witness.is_none();
    match &arith_witness {
        None => report.pass("arithmetic"),
        Some(w) => report.skip("arithmetic", format!("not arithmetic: {w}")),
    }

    let mask = |fam: &Vec<BTreeSet<SubId>>| -> Vec<Vec<bool>> {
        fam.iter().map(|s| (0..n).map(|j| s.contains(&j)).collect()).collect()
    };
    let system = SubgroupSystem {
        group: c.group.clone(),
        base: c.base.clone(),
        index,
        res_mask: mask(&res),
        ind_mask: mask(&ind),
        res_sets: res.into_iter().map(|s| s.into_iter().collect()).collect(),
        ind_sets: ind.into_iter().map(|s| s.into_iter().collect()).collect(),
        conj,
        is_mackey,
        is_arithmetic,
    };
    (report, Some(system))
}

impl SubgroupSystem {
    /// All subgroups, with every subgroup of `H` in both sets of `H`.
    pub fn full(group: Arc<FiniteGroup>) -> SubgroupSystem {
        let base = group.all_subgroups();
        let cand = SystemCandidate::from_base(group, base);
        let (_, sys) = validate_subgroup_system(&cand);
        sys.expect("the full system is valid")
    }

    pub fn from_candidate(c: &SystemCandidate) -> Result<SubgroupSystem, SystemError> {
        match validate_subgroup_system(c) {
            (_, Some(s)) => Ok(s),
            (r, None) => {
                let f = r.first_failure().expect("failure recorded");
                Err(SystemError::Invalid(format!("{}: {}", f.name, f.witness.clone().unwrap_or_default())))
            }
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn group_arc(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn ids(&self) -> std::ops::Range<SubId> {
        0..self.base.len()
    }

    pub fn subgroup(&self, id: SubId) -> &Subgroup {
        &self.base[id]
    }

    pub fn base(&self) -> &[Subgroup] {
        &self.base
    }

    pub fn id_of(&self, h: &Subgroup) -> Option<SubId> {
        if !h.belongs_to(&self.group) {
            return None;
        }
        self.index.get(h.elements()).copied()
    }

    pub fn require(&self, h: &Subgroup) -> Result<SubId, SystemError> {
        self.id_of(h).ok_or_else(|| SystemError::UnknownSubgroup(h.elements().to_vec()))
    }

    pub fn id_of_elements(&self, elems: &[Elem]) -> Option<SubId> {
        let mut e = elems.to_vec();
        e.sort_unstable();
        self.index.get(&e).copied()
    }

    pub fn res_set(&self, h: SubId) -> &[SubId] {
        &self.res_sets[h]
    }

    pub fn ind_set(&self, h: SubId) -> &[SubId] {
        &self.ind_sets[h]
    }

    pub fn in_res(&self, h: SubId, i: SubId) -> bool {
        self.res_mask[h][i]
    }

    pub fn in_ind(&self, h: SubId, i: SubId) -> bool {
        self.ind_mask[h][i]
    }

    /// Id of `^gH`.
    pub fn conj(&self, g: Elem, h: SubId) -> SubId {
        self.conj[g * self.base.len() + h]
    }

    pub fn index(&self, h: SubId, i: SubId) -> usize {
        self.base[h].order() / self.base[i].order()
    }

    pub fn is_mackey(&self) -> bool {
        self.is_mackey
    }

    pub fn is_arithmetic(&self) -> bool {
        self.is_arithmetic
    }

    pub fn whole_id(&self) -> Option<SubId> {
        self.id_of(&self.group.whole())
    }

    pub fn trivial_id(&self) -> Option<SubId> {
        self.id_of(&self.group.trivial_subgroup())
    }

    pub fn label(&self, id: SubId) -> String {
        label(&self.base[id])
    }

    pub fn to_spec(&self) -> SystemSpec {
        SystemSpec::Explicit {
            base: self.base.iter().map(|h| h.elements().to_vec()).collect(),
            res: Some(self.res_sets.clone()),
            ind: Some(self.ind_sets.clone()),
        }
    }
}

/// JSON form of a subgroup system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Full {
        full: bool,
    },
    Explicit {
        base: Vec<Vec<Elem>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        res: Option<Vec<Vec<SubId>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ind: Option<Vec<Vec<SubId>>>,
    },
}

impl SystemSpec {
    pub fn candidate(&self, group: Arc<FiniteGroup>) -> Result<SystemCandidate, SystemError> {
        match self {
            SystemSpec::Full { .. } => {
                let base = group.all_subgroups();
                Ok(SystemCandidate::from_base(group, base))
            }
            SystemSpec::Explicit { base, res, ind } => {
                let subs = base.iter().map(|e| group.subgroup_from_elements(e)).collect::<Result<Vec<_>, _>>()?;
                let mut c = SystemCandidate::from_base(group, subs);
                if let Some(r) = res {
                    c.res_sets = r.clone();
                }
                if let Some(i) = ind {
                    c.ind_sets = i.clone();
                }
                Ok(c)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::report::Status;

    #[test]
    fn full_system_is_mackey_and_arithmetic() {
        let g = Arc::new(catalog::by_name("S3").unwrap());
        let s = SubgroupSystem::full(g);
        assert_eq!(s.len(), 6);
        assert!(s.is_mackey());
        assert!(s.is_arithmetic());
    }

    #[test]
    fn missing_reflexivity_fails() {
        let g = Arc::new(catalog::by_name("C4").unwrap());
        let mut c = SystemCandidate::from_base(g.clone(), g.all_subgroups());
        c.res_sets[2].retain(|&j| j != 2);
        let (r, s) = validate_subgroup_system(&c);
        assert!(s.is_none());
        assert_eq!(r.status_of("res.reflexive"), Some(Status::Fail));
    }

    #[test]
    fn non_conjugation_closed_base_fails() {
        let g = Arc::new(catalog::by_name("S3").unwrap());
        let t = g.elements().find(|&x| g.element_order(x) == 2).unwrap();
        let base = vec![g.trivial_subgroup(), g.cyclic_subgroup(t), g.whole()];
        let (r, s) = validate_subgroup_system(&SystemCandidate::from_base(g, base));
        assert!(s.is_none());
        let f = r.first_failure().unwrap();
        assert_eq!(f.name, "conjugation_closed");
        assert!(f.witness.as_ref().unwrap().contains("g="));
    }

    #[test]
    fn small_non_mackey_system() {
        // {1, G} for G = C2 x C2 is Mackey, but {V1, V2, G} without 1 is not
        let g = Arc::new(catalog::by_name("C2xC2").unwrap());
        let all = g.all_subgroups();
        let base: Vec<Subgroup> = all.iter().filter(|h| h.order() >= 2).cloned().collect();
        let (r, s) = validate_subgroup_system(&SystemCandidate::from_base(g, base));
        assert!(r.passed());
        let s = s.unwrap();
        assert!(!s.is_mackey());
        assert!(!s.is_arithmetic());
    }

    #[test]
    fn spec_roundtrip() {
        let g = Arc::new(catalog::by_name("C4").unwrap());
        let s = SubgroupSystem::full(g.clone());
        let json = serde_json::to_string(&s.to_spec()).unwrap();
        let spec: SystemSpec = serde_json::from_str(&json).unwrap();
        let t = SubgroupSystem::from_candidate(&spec.candidate(g.clone()).unwrap()).unwrap();
        assert_eq!(t.len(), s.len());
        let spec: SystemSpec = serde_json::from_str(r#"{"full":true}"#).unwrap();
        assert_eq!(SubgroupSystem::from_candidate(&spec.candidate(g).unwrap()).unwrap().len(), 3);
    }
}
