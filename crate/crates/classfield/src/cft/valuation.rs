//! Valuations `v: C → Ω_d` and families induced from a single valuation on `C(G)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::CftError;
use crate::abelian::{gcd, AbHom, FgAbGroup};
use crate::mackey::RicFunctor;
use crate::matrix::IntMatrix;
use crate::ramification::RamificationDatum;
use crate::report::Report;
use crate::system::SubId;

/// Components `v_H: C(H) → Ω` with `Ω` cyclic (`ℤ` or `ℤ/m`) and `ω = 1`.
#[derive(Debug, Clone)]
pub struct ValuationFamily {
    pub functor: Arc<RicFunctor>,
    pub omega: FgAbGroup,
    pub components: Vec<AbHom>,
}

/// `modulus = 0` stands for `ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaSpec {
    pub modulus: i64,
}

impl OmegaSpec {
    pub fn group(&self) -> Result<FgAbGroup, CftError> {
        match self.modulus {
            0 => Ok(FgAbGroup::integers()),
            m if m > 0 => Ok(FgAbGroup::cyclic(m)),
            m => Err(CftError::InvalidValuation(format!("modulus {m} is negative"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValuationSpec {
    pub omega: OmegaSpec,
    pub components: BTreeMap<SubId, IntMatrix>,
}

impl ValuationFamily {
    pub fn new(functor: Arc<RicFunctor>, omega: FgAbGroup, components: Vec<AbHom>) -> Result<Self, CftError> {
        if omega.ngens() > 1 {
            return Err(CftError::InvalidValuation(format!("Ω = {omega} is not cyclic")));
        }
        let s = functor.system();
        if components.len() != s.len() {
            return Err(CftError::InvalidValuation("one component per subgroup is required".into()));
        }
        for (h, v) in components.iter().enumerate() {
            if v.domain() != functor.value(h) || v.codomain() != &omega {
                return Err(CftError::InvalidValuation(format!("component at H={} is mistyped", s.label(h))));
            }
        }
        Ok(ValuationFamily { functor, omega, components })
    }

    pub fn from_spec(functor: Arc<RicFunctor>, spec: &ValuationSpec) -> Result<Self, CftError> {
        let omega = spec.omega.group()?;
        let s = functor.system().clone();
        let components = s
            .ids()
            .map(|h| {
                let m = spec
                    .components
                    .get(&h)
                    .ok_or_else(|| CftError::InvalidValuation(format!("missing component for subgroup {h}")))?;
                Ok(AbHom::new(functor.value(h).clone(), omega.clone(), m.clone())?)
            })
            .collect::<Result<Vec<_>, CftError>>()?;
        ValuationFamily::new(functor, omega, components)
    }

    pub fn to_spec(&self) -> ValuationSpec {
        let modulus =
            if self.omega.free_rank() == 1 { 0 } else { self.omega.invariant_factors().first().copied().unwrap_or(1) };
        ValuationSpec {
            omega: OmegaSpec { modulus },
            components: self.components.iter().map(|v| v.matrix().clone()).enumerate().collect(),
        }
    }

    /// `v_H = id` for a functor whose values are all `Ω`.
    pub fn identity(functor: Arc<RicFunctor>, omega: FgAbGroup) -> Result<Self, CftError> {
        let components = functor.values().iter().map(AbHom::identity).collect();
        ValuationFamily::new(functor, omega, components)
    }

    /// `ω` in coordinates of `Ω`.
    pub fn omega_generator(&self) -> Vec<i64> {
        if self.omega.ngens() == 0 {
            Vec::new()
        } else {
            self.omega.generator(0)
        }
    }

    pub fn component(&self, h: SubId) -> &AbHom {
        &self.components[h]
    }

    /// Some `π ∈ C(H)` with `v_H(π) = ω`.
    pub fn prime_element(&self, h: SubId) -> Option<Vec<i64>> {
        self.components[h].preimage(&self.omega_generator())
    }
}

/// Morphism conditions into `Ω_d` and `ω ∈ Im(v_H)`.
pub fn validate_valuation(v: &ValuationFamily, d: &RamificationDatum) -> Report {
    let c = &v.functor;
    let s = c.system();
    let g = s.group();
    let mut report = Report::new();
    if !Arc::ptr_eq(d.group(), s.group_arc()) && **d.group() != *g {
        report.fail("valuation.datum", "ramification datum lives on a different group");
        return report;
    }
    let deg = |h: SubId, i: SubId| d.degrees(s.subgroup(h), s.subgroup(i)).expect("edges go to subgroups");
    let res = c.res_edges().find_map(|(&(h, i), m)| {
        let (e, _) = deg(h, i);
        (m.then(&v.components[i]) != v.components[h].scaled(e as i64))
            .then(|| format!("H={} I={} e={e}", s.label(h), s.label(i)))
    });
    report.record("valuation.res", res);
    let ind = c.ind_edges().find_map(|(&(h, i), m)| {
        let (_, f) = deg(h, i);
        (m.then(&v.components[h]) != v.components[i].scaled(f))
            .then(|| format!("H={} I={} f={f}", s.label(h), s.label(i)))
    });
    report.record("valuation.ind", ind);
    let con = g.elements().find_map(|x| {
        s.ids()
            .find(|&h| c.con(x, h).then(&v.components[s.conj(x, h)]) != v.components[h])
            .map(|h| format!("g={x} H={}", s.label(h)))
    });
    report.record("valuation.con", con);
    let generator = s.ids().find(|&h| v.prime_element(h).is_none()).map(|h| format!("ω ∉ Im(v_H) at H={}", s.label(h)));
    report.record("valuation.generator", generator);
    report
}

/// `v_H = (1/f_H)·v∘ind_{G,H}` for `Ω = ℤ`. Fails when `v(ind_{G,H} C(H))` is not inside
/// `f_H·ℤ`; equality is left to the generator condition of [`validate_valuation`].
pub fn induce_valuation_family(
    functor: Arc<RicFunctor>,
    top_valuation: &AbHom,
    d: &RamificationDatum,
) -> Result<ValuationFamily, CftError> {
    let s = functor.system().clone();
    let omega = FgAbGroup::integers();
    if top_valuation.codomain() != &omega {
        return Err(CftError::InvalidValuation("induced families need Ω = ℤ".into()));
    }
    let top = s.whole_id().ok_or_else(|| CftError::InvalidValuation("the system does not contain G".into()))?;
    if top_valuation.domain() != functor.value(top) {
        return Err(CftError::InvalidValuation("v is not defined on C(G)".into()));
    }
    let mut components = Vec::with_capacity(s.len());
    for h in s.ids() {
        let ind = functor
            .try_ind(top, h)
            .ok_or_else(|| CftError::InvalidValuation(format!("H={} is not in 𝔖_i(G)", s.label(h))))?;
        let w = ind.then(top_valuation);
        let f = d.f(s.subgroup(h));
        let found = (0..w.matrix().cols()).fold(0, |acc, j| gcd(acc, w.matrix()[(0, j)]));
        if found % f != 0 {
            return Err(CftError::ImageMismatch { subgroup: s.label(h), expected: f, found });
        }
        let cols: Vec<Vec<i64>> = (0..w.matrix().cols()).map(|j| vec![w.matrix()[(0, j)] / f]).collect();
        components.push(AbHom::from_images(functor.value(h).clone(), omega.clone(), &cols)?);
    }
    ValuationFamily::new(functor, omega, components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::gmodule::GModule;
    use crate::mackey::fixed_point_functor;
    use crate::system::{SubgroupSystem, SystemCandidate};

    fn trivial_z(system: Arc<SubgroupSystem>) -> Arc<RicFunctor> {
        let g = system.group_arc().clone();
        Arc::new(fixed_point_functor(&GModule::trivial(g, FgAbGroup::integers()), system).unwrap().functor)
    }

    #[test]
    fn identity_valuation_on_unramified_cyclic() {
        let g = Arc::new(catalog::cyclic(4));
        let d = RamificationDatum::cyclic_identity(g.clone(), 1).unwrap();
        let c = trivial_z(Arc::new(SubgroupSystem::full(g)));
        let v = ValuationFamily::identity(c.clone(), FgAbGroup::integers()).unwrap();
        let r = validate_valuation(&v, &d);
        assert!(r.passed(), "{r}");
        let top = c.system().whole_id().unwrap();
        let induced = induce_valuation_family(c.clone(), v.component(top), &d).unwrap();
        for h in c.system().ids() {
            assert_eq!(induced.component(h), v.component(h));
        }
    }

    #[test]
    fn ramified_edge_breaks_identity_valuation() {
        let g = Arc::new(catalog::by_name("C2xC2").unwrap());
        let d = RamificationDatum::new(g.clone(), 2, vec![0, 0, 1, 1], None).unwrap();
        let c = trivial_z(Arc::new(SubgroupSystem::full(g)));
        let v = ValuationFamily::identity(c, FgAbGroup::integers()).unwrap();
        let r = validate_valuation(&v, &d);
        assert!(!r.passed());
        assert_eq!(r.status_of("valuation.res"), Some(crate::report::Status::Fail));
    }

    #[test]
    fn zero_family_fails_generator_condition() {
        let g = Arc::new(catalog::cyclic(2));
        let d = RamificationDatum::cyclic_identity(g.clone(), 1).unwrap();
        let c = trivial_z(Arc::new(SubgroupSystem::full(g)));
        let z = FgAbGroup::integers();
        let comps = c.values().iter().map(|a| AbHom::zero(a, &z)).collect();
        let v = ValuationFamily::new(c, z, comps).unwrap();
        let r = validate_valuation(&v, &d);
        assert_eq!(r.status_of("valuation.generator"), Some(crate::report::Status::Fail));
    }

    #[test]
    fn doubled_valuation_is_induced_but_not_a_valuation() {
        let g = Arc::new(catalog::cyclic(2));
        let d = RamificationDatum::cyclic_identity(g.clone(), 1).unwrap();
        let c = trivial_z(Arc::new(SubgroupSystem::full(g)));
        let two = AbHom::scalar(&FgAbGroup::integers(), 2);
        let v = induce_valuation_family(c, &two, &d).unwrap();
        let r = validate_valuation(&v, &d);
        assert_eq!(r.status_of("valuation.generator"), Some(crate::report::Status::Fail));
    }

    #[test]
    fn image_outside_f_omega_is_rejected() {
        // C4 with d iso: f_{⟨g²⟩} = 2, but v∘ind = id on C(⟨g²⟩) = ℤ for the index functor
        let g = Arc::new(catalog::cyclic(4));
        let d = RamificationDatum::cyclic_identity(g.clone(), 1).unwrap();
        let c = Arc::new(crate::mackey::index_functor(Arc::new(SubgroupSystem::full(g))).unwrap());
        let id = AbHom::identity(&FgAbGroup::integers());
        assert!(matches!(induce_valuation_family(c, &id, &d), Err(CftError::ImageMismatch { .. })));
    }

    #[test]
    fn klein_on_unramified_subsystem() {
        let g = Arc::new(catalog::by_name("C2xC2").unwrap());
        let d = RamificationDatum::new(g.clone(), 2, vec![0, 0, 1, 1], None).unwrap();
        let base: Vec<_> = g.all_subgroups().into_iter().filter(|h| d.kernel().is_subgroup_of(h)).collect();
        let s = Arc::new(SubgroupSystem::from_candidate(&SystemCandidate::from_base(g, base)).unwrap());
        let v = ValuationFamily::identity(trivial_z(s), FgAbGroup::integers()).unwrap();
        assert!(validate_valuation(&v, &d).passed());
        let spec = v.to_spec();
        assert_eq!(spec.omega.modulus, 0);
        let back = ValuationFamily::from_spec(v.functor.clone(), &spec).unwrap();
        assert_eq!(back.components, v.components);
    }
}
