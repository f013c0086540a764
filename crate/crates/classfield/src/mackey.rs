//! RIC-functors over subgroup systems: tables, axiom checkers, built-in functors,
//! morphisms, quotients, Galois descent and the module/functor adjunction.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbHom, AbelianError, FgAbGroup, QuotientMap, SubgroupEmbedding};
use crate::gmodule::{common_fixed, GModule, GModuleSpec};
use crate::group::{double_coset_reps_in, AbelianQuotient, Elem, FiniteGroup, GroupError};
use crate::matrix::IntMatrix;
use crate::report::Report;
use crate::system::{SubId, SubgroupSystem, SystemError, SystemSpec};
use crate::transfer::{AbelianizationSystem, Transfer, TransferError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MackeyError {
    #[error("functor table is incomplete or mistyped: {0}")]
    Structure(String),
    #[error("the subgroup system is not a Mackey system")]
    NotMackeySystem,
    #[error("not a subfunctor: {0}")]
    NotSubfunctor(String),
    #[error("invalid descent basis: {0}")]
    InvalidDescentBasis(String),
    #[error("functor is not stable: {0}")]
    NotStable(String),
    #[error("invalid G-module: {0}")]
    InvalidModule(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
}

/// A materialized RIC-functor: values, restrictions, inductions and conjugations.
#[derive(Debug, Clone)]
pub struct RicFunctor {
    system: Arc<SubgroupSystem>,
    values: Vec<FgAbGroup>,
    /// `(H, I) ↦ C(H) → C(I)` for `I ∈ 𝔖_r(H)`.
    res: BTreeMap<(SubId, SubId), AbHom>,
    /// `(H, I) ↦ C(I) → C(H)` for `I ∈ 𝔖_i(H)`.
    ind: BTreeMap<(SubId, SubId), AbHom>,
    /// `g·n + H ↦ C(H) → C(^gH)`.
    con: Vec<AbHom>,
}

impl RicFunctor {
    pub fn build<R, I, C>(
        system: Arc<SubgroupSystem>,
        values: Vec<FgAbGroup>,
        mut res: R,
        mut ind: I,
        mut con: C,
    ) -> Result<RicFunctor, MackeyError>
    where
        R: FnMut(SubId, SubId) -> Result<AbHom, MackeyError>,
        I: FnMut(SubId, SubId) -> Result<AbHom, MackeyError>,
        C: FnMut(Elem, SubId) -> Result<AbHom, MackeyError>,
    {
        let mut r = BTreeMap::new();
        let mut d = BTreeMap::new();
        for h in system.ids() {
            for &i in system.res_set(h) {
                r.insert((h, i), res(h, i)?);
            }
            for &i in system.ind_set(h) {
                d.insert((h, i), ind(h, i)?);
            }
        }
        let mut c = Vec::with_capacity(system.group().order() * system.len());
        for g in system.group().elements() {
            for h in system.ids() {
                c.push(con(g, h)?);
            }
        }
        RicFunctor::from_parts(system, values, r, d, c)
    }

    pub fn from_parts(
        system: Arc<SubgroupSystem>,
        values: Vec<FgAbGroup>,
        res: BTreeMap<(SubId, SubId), AbHom>,
        ind: BTreeMap<(SubId, SubId), AbHom>,
        con: Vec<AbHom>,
    ) -> Result<RicFunctor, MackeyError> {
        let f = RicFunctor { system, values, res, ind, con };
        f.check_structure()?;
        Ok(f)
    }

    fn check_structure(&self) -> Result<(), MackeyError> {
        let s = &self.system;
        let n = s.len();
        if self.values.len() != n {
            return Err(MackeyError::Structure(format!("{} values for {} subgroups", self.values.len(), n)));
        }
        let typed =
            |m: &AbHom, dom: SubId, cod: SubId| m.domain() == &self.values[dom] && m.codomain() == &self.values[cod];
        let expected_res: usize = s.ids().map(|h| s.res_set(h).len()).sum();
        let expected_ind: usize = s.ids().map(|h| s.ind_set(h).len()).sum();
        if self.res.len() != expected_res || self.ind.len() != expected_ind {
            return Err(MackeyError::Structure("edge maps do not match the system".into()));
        }
        for (&(h, i), m) in &self.res {
            if h >= n || i >= n || !s.in_res(h, i) || !typed(m, h, i) {
                return Err(MackeyError::Structure(format!("res ({h},{i})")));
            }
        }
        for (&(h, i), m) in &self.ind {
            if h >= n || i >= n || !s.in_ind(h, i) || !typed(m, i, h) {
                return Err(MackeyError::Structure(format!("ind ({h},{i})")));
            }
        }
        if self.con.len() != s.group().order() * n {
            return Err(MackeyError::Structure("conjugation table has the wrong size".into()));
        }
        for g in s.group().elements() {
            for h in s.ids() {
                if !typed(&self.con[g * n + h], h, s.conj(g, h)) {
                    return Err(MackeyError::Structure(format!("con (g={g}, H={h})")));
                }
            }
        }
        Ok(())
    }

    pub fn system(&self) -> &Arc<SubgroupSystem> {
        &self.system
    }

    pub fn group(&self) -> &FiniteGroup {
        self.system.group()
    }

    pub fn value(&self, h: SubId) -> &FgAbGroup {
        &self.values[h]
    }

    pub fn values(&self) -> &[FgAbGroup] {
        &self.values
    }

    /// `res_{I,H}: C(H) → C(I)`.
    pub fn res(&self, h: SubId, i: SubId) -> &AbHom {
        &self.res[&(h, i)]
    }

    pub fn try_res(&self, h: SubId, i: SubId) -> Option<&AbHom> {
        self.res.get(&(h, i))
    }

    /// `ind_{H,I}: C(I) → C(H)`.
    pub fn ind(&self, h: SubId, i: SubId) -> &AbHom {
        &self.ind[&(h, i)]
    }

    pub fn try_ind(&self, h: SubId, i: SubId) -> Option<&AbHom> {
        self.ind.get(&(h, i))
    }

    /// `con_{g,H}: C(H) → C(^gH)`.
    pub fn con(&self, g: Elem, h: SubId) -> &AbHom {
        &self.con[g * self.system.len() + h]
    }

    pub fn res_edges(&self) -> impl Iterator<Item = (&(SubId, SubId), &AbHom)> {
        self.res.iter()
    }

    pub fn ind_edges(&self) -> impl Iterator<Item = (&(SubId, SubId), &AbHom)> {
        self.ind.iter()
    }

    pub fn set_res(&mut self, h: SubId, i: SubId, m: AbHom) -> Result<(), MackeyError> {
        let old = self.res.insert((h, i), m);
        self.check_structure().inspect_err(|_| {
            if let Some(o) = old {
                self.res.insert((h, i), o);
            }
        })
    }

    pub fn set_ind(&mut self, h: SubId, i: SubId, m: AbHom) -> Result<(), MackeyError> {
        let old = self.ind.insert((h, i), m);
        self.check_structure().inspect_err(|_| {
            if let Some(o) = old {
                self.ind.insert((h, i), o);
            }
        })
    }

    pub fn set_con(&mut self, g: Elem, h: SubId, m: AbHom) -> Result<(), MackeyError> {
        let k = g * self.system.len() + h;
        let old = std::mem::replace(&mut self.con[k], m);
        self.check_structure().inspect_err(|_| self.con[k] = old)
    }

    pub fn to_spec(&self) -> FunctorSpec {
        let n = self.system.len();
        FunctorSpec {
            system: self.system.to_spec(),
            values: self.values.iter().cloned().enumerate().collect(),
            res: self.res.iter().map(|(&(h, i), m)| EdgeSpec { from: h, to: i, matrix: m.matrix().clone() }).collect(),
            ind: self.ind.iter().map(|(&(h, i), m)| EdgeSpec { from: i, to: h, matrix: m.matrix().clone() }).collect(),
            con: self
                .con
                .iter()
                .enumerate()
                .map(|(k, m)| ConSpec { g: k / n, h: k % n, matrix: m.matrix().clone() })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub from: SubId,
    pub to: SubId,
    pub matrix: IntMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConSpec {
    pub g: Elem,
    #[serde(rename = "H")]
    pub h: SubId,
    pub matrix: IntMatrix,
}

/// JSON table form of a functor. `res` edges go from `H` to `I`, `ind` edges from `I` to `H`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctorSpec {
    pub system: SystemSpec,
    pub values: BTreeMap<SubId, FgAbGroup>,
    pub res: Vec<EdgeSpec>,
    pub ind: Vec<EdgeSpec>,
    pub con: Vec<ConSpec>,
}

/// A functor given as a table or by naming a built-in construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctorSource {
    Builtin {
        builtin: Builtin,
        #[serde(default)]
        system: Option<SystemSpec>,
        #[serde(default)]
        module: Option<GModuleSpec>,
    },
    Table(FunctorSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    /// `π_[·,·]`
    Abelianization,
    /// `A_*` of the given module.
    FixedPoints,
    /// Fixed points of trivial `ℤ`.
    TrivialZ,
    /// `ℤ` with `res = ×index`, `ind = id`.
    IndexZ,
}

impl FunctorSource {
    pub fn build(&self, group: Arc<FiniteGroup>) -> Result<RicFunctor, MackeyError> {
        match self {
            FunctorSource::Table(spec) => spec.build(group),
            FunctorSource::Builtin { builtin, system, module } => {
                let sys = match system {
                    Some(s) => SubgroupSystem::from_candidate(&s.candidate(group.clone())?)?,
                    None => SubgroupSystem::full(group.clone()),
                };
                let sys = Arc::new(sys);
                match builtin {
                    Builtin::Abelianization => abelianization_functor(&AbelianizationSystem::commutators(sys)),
                    Builtin::TrivialZ => {
                        Ok(fixed_point_functor(&GModule::trivial(group, FgAbGroup::integers()), sys)?.functor)
                    }
                    Builtin::IndexZ => index_functor(sys),
                    Builtin::FixedPoints => {
                        let spec = module
                            .as_ref()
                            .ok_or_else(|| MackeyError::InvalidModule("fixed_points needs a module".into()))?;
                        let m = GModule::from_spec(group, spec)?;
                        Ok(fixed_point_functor(&m, sys)?.functor)
                    }
                }
            }
        }
    }
}

impl FunctorSpec {
    pub fn build(&self, group: Arc<FiniteGroup>) -> Result<RicFunctor, MackeyError> {
        let system = Arc::new(SubgroupSystem::from_candidate(&self.system.candidate(group)?)?);
        let n = system.len();
        let mut values = Vec::with_capacity(n);
        for h in 0..n {
            values.push(
                self.values.get(&h).cloned().ok_or_else(|| MackeyError::Structure(format!("missing value for {h}")))?,
            );
        }
        let hom = |dom: SubId, cod: SubId, m: &IntMatrix| -> Result<AbHom, MackeyError> {
            let d = values.get(dom).ok_or_else(|| MackeyError::Structure(format!("unknown subgroup {dom}")))?;
            let c = values.get(cod).ok_or_else(|| MackeyError::Structure(format!("unknown subgroup {cod}")))?;
            Ok(AbHom::new(d.clone(), c.clone(), m.clone())?)
        };
        let mut res = BTreeMap::new();
        for e in &self.res {
            res.insert((e.from, e.to), hom(e.from, e.to, &e.matrix)?);
        }
        let mut ind = BTreeMap::new();
        for e in &self.ind {
            ind.insert((e.to, e.from), hom(e.from, e.to, &e.matrix)?);
        }
        let mut con: Vec<Option<AbHom>> = vec![None; system.group().order() * n];
        for c in &self.con {
            if c.g >= system.group().order() || c.h >= n {
                return Err(MackeyError::Structure(format!("con entry (g={}, H={})", c.g, c.h)));
            }
            con[c.g * n + c.h] = Some(hom(c.h, system.conj(c.g, c.h), &c.matrix)?);
        }
        let con = con
            .into_iter()
            .enumerate()
            .map(|(k, m)| m.ok_or_else(|| MackeyError::Structure(format!("missing con (g={}, H={})", k / n, k % n))))
            .collect::<Result<Vec<_>, _>>()?;
        RicFunctor::from_parts(system, values, res, ind, con)
    }
}

// ---------------------------------------------------------------- checkers

/// Triviality, transitivity and equivariance.
pub fn validate_ric_functor(f: &RicFunctor) -> Report {
    let s = &f.system;
    let g = s.group();
    let mut report = Report::new();

    let triv = s.ids().find_map(|h| {
        let id = AbHom::identity(f.value(h));
        if f.try_res(h, h) != Some(&id) {
            Some(format!("res H={}", s.label(h)))
        } else if f.try_ind(h, h) != Some(&id) {
            Some(format!("ind H={}", s.label(h)))
        } else if f.con(0, h) != &id {
            Some(format!("con e H={}", s.label(h)))
        } else {
            None
        }
    });
    report.record("triviality", triv);

    let mut trans = None;
    'tr: for h in s.ids() {
        for &i in s.res_set(h) {
            for &j in s.res_set(i) {
                if f.res(h, i).then(f.res(i, j)) != *f.res(h, j) {
                    trans = Some(format!("res H={} I={} J={}", s.label(h), s.label(i), s.label(j)));
                    break 'tr;
                }
            }
        }
        for &i in s.ind_set(h) {
            for &j in s.ind_set(i) {
                if f.ind(i, j).then(f.ind(h, i)) != *f.ind(h, j) {
                    trans = Some(format!("ind H={} I={} J={}", s.label(h), s.label(i), s.label(j)));
                    break 'tr;
                }
            }
        }
    }
    if trans.is_none() {
        'con: for x in g.elements() {
            for y in g.elements() {
                for h in s.ids() {
                    let lhs = f.con(x, h).then(f.con(y, s.conj(x, h)));
                    if lhs != *f.con(g.mul(y, x), h) {
                        trans = Some(format!("con g={x} g'={y} H={}", s.label(h)));
                        break 'con;
                    }
                }
            }
        }
    }
    report.record("transitivity", trans);

    let mut equi = None;
    'eq: for x in g.elements() {
        for h in s.ids() {
            let gh = s.conj(x, h);
            for &i in s.res_set(h) {
                let gi = s.conj(x, i);
                if f.res(h, i).then(f.con(x, i)) != f.con(x, h).then(f.res(gh, gi)) {
                    equi = Some(format!("res g={x} H={} I={}", s.label(h), s.label(i)));
                    break 'eq;
                }
            }
            for &i in s.ind_set(h) {
                let gi = s.conj(x, i);
                if f.ind(h, i).then(f.con(x, h)) != f.con(x, i).then(f.ind(gh, gi)) {
                    equi = Some(format!("ind g={x} H={} I={}", s.label(h), s.label(i)));
                    break 'eq;
                }
            }
        }
    }
    report.record("equivariance", equi);
    report
}

/// `con_{h,H} = id` for `h ∈ H`.
pub fn check_stability(f: &RicFunctor) -> Report {
    let s = &f.system;
    let mut report = Report::new();
    let w = s.ids().find_map(|h| {
        let id = AbHom::identity(f.value(h));
        s.subgroup(h).elements().iter().find(|&&x| f.con(x, h) != &id).map(|&x| format!("g={x} H={}", s.label(h)))
    });
    report.record("stability", w);
    report
}

/// Right-hand side of the Mackey formula for `(H, I, J)` with the given representatives of `I\H/J`.
pub fn mackey_sum(f: &RicFunctor, h: SubId, i: SubId, j: SubId, reps: &[Elem]) -> Result<AbHom, MackeyError> {
    let s = &f.system;
    let g = s.group();
    let mut total = AbHom::zero(f.value(j), f.value(i));
    for &rho in reps {
        let i_rho = g.conjugate_right(s.subgroup(i), rho);
        let k = s.require(&g.intersection(&i_rho, s.subgroup(j)))?;
        let k_moved = s.conj(rho, k);
        let (Some(r), Some(d)) = (f.try_res(j, k), f.try_ind(i, k_moved)) else {
            return Err(MackeyError::NotMackeySystem);
        };
        total = total.add(&r.then(f.con(rho, k)).then(d));
    }
    let _ = h;
    Ok(total)
}

/// `res_{I,H}∘ind_{H,J} = Σ_ρ ind∘con_ρ∘res` for every `H`, `I ∈ 𝔖_r(H)`, `J ∈ 𝔖_i(H)`.
pub fn check_mackey_formula(f: &RicFunctor) -> Result<Report, MackeyError> {
    let s = &f.system;
    if !s.is_mackey() {
        return Err(MackeyError::NotMackeySystem);
    }
    let g = s.group();
    let mut report = Report::new();
    let mut witness = None;
    'outer: for h in s.ids() {
        for &i in s.res_set(h) {
            for &j in s.ind_set(h) {
                let lhs = f.ind(h, j).then(f.res(h, i));
                let reps = double_coset_reps_in(g, s.subgroup(h), s.subgroup(i), s.subgroup(j));
                let rhs = mackey_sum(f, h, i, j, &reps)?;
                if lhs != rhs {
                    witness = Some(format!("H={} I={} J={}", s.label(h), s.label(i), s.label(j)));
                    break 'outer;
                }
            }
        }
    }
    report.record("mackey_formula", witness);
    Ok(report)
}

/// `ind_{H,I}∘res_{I,H} = [H:I]`.
pub fn check_cohomological(f: &RicFunctor) -> Report {
    let s = &f.system;
    let mut report = Report::new();
    let w = s.ids().find_map(|h| {
        s.res_set(h).iter().filter(|&&i| s.in_ind(h, i)).find_map(|&i| {
            let comp = f.res(h, i).then(f.ind(h, i));
            (comp != AbHom::scalar(f.value(h), s.index(h, i) as i64))
                .then(|| format!("H={} I={}", s.label(h), s.label(i)))
        })
    });
    report.record("cohomological", w);
    report
}

/// All checks: RIC axioms, stability, Mackey formula (when the system allows it) and cohomologicality.
pub fn full_check(f: &RicFunctor) -> Report {
    let mut r = validate_ric_functor(f);
    r.extend(check_stability(f));
    match check_mackey_formula(f) {
        Ok(m) => r.extend(m),
        Err(_) => r.skip("mackey_formula", "not a Mackey system"),
    }
    r.extend(check_cohomological(f));
    r
}

// ---------------------------------------------------------------- built-in functors

/// `π_R`: values `H/R(H)`, restriction by transfer, induction and conjugation induced by the maps on elements.
pub fn abelianization_functor(r: &AbelianizationSystem) -> Result<RicFunctor, MackeyError> {
    let s = r.system().clone();
    let g = s.group();
    let quotients: Vec<AbelianQuotient> = s.ids().map(|h| r.quotient(h)).collect();
    let values = quotients.iter().map(|q| q.group.clone()).collect();
    let via_elements = |from: &AbelianQuotient, to: &AbelianQuotient, map: &dyn Fn(Elem) -> Elem| {
        let images: Vec<Vec<i64>> =
            (0..from.group.ngens()).map(|j| to.image(map(from.generator_lift(j))).to_vec()).collect();
        AbHom::from_images(from.group.clone(), to.group.clone(), &images)
    };
    RicFunctor::build(
        s.clone(),
        values,
        |h, i| Ok(Transfer::new(g, quotients[h].clone(), quotients[i].clone())?.hom),
        |h, i| Ok(via_elements(&quotients[i], &quotients[h], &|x| x)?),
        |x, h| Ok(via_elements(&quotients[h], &quotients[s.conj(x, h)], &|y| g.conj(x, y))?),
    )
}

/// `A_*` together with the embeddings `A^H → A`.
#[derive(Debug, Clone)]
pub struct FixedPointFunctor {
    pub functor: RicFunctor,
    pub embeddings: Vec<SubgroupEmbedding>,
}

/// Hom between two subgroups of `A` induced by a map on `A`.
fn restrict_to(
    source: &SubgroupEmbedding,
    target: &SubgroupEmbedding,
    f: impl Fn(&[i64]) -> Vec<i64>,
) -> Result<AbHom, MackeyError> {
    let images = (0..source.group.ngens())
        .map(|j| {
            let y = f(&source.embedding.apply(&source.group.generator(j)));
            target.pull(&y).ok_or_else(|| MackeyError::Structure("image leaves the target subgroup".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AbHom::from_images(source.group.clone(), target.group.clone(), &images)?)
}

/// `A_*(H) = A^H`, restriction = inclusion, induction = norm over left cosets, conjugation = action.
pub fn fixed_point_functor(a: &GModule, system: Arc<SubgroupSystem>) -> Result<FixedPointFunctor, MackeyError> {
    let emb: Vec<SubgroupEmbedding> = system.ids().map(|h| a.fixed_points(system.subgroup(h))).collect();
    let values = emb.iter().map(|e| e.group.clone()).collect();
    let s = system.clone();
    let functor = RicFunctor::build(
        system,
        values,
        |h, i| restrict_to(&emb[h], &emb[i], |x| x.to_vec()),
        |h, i| restrict_to(&emb[i], &emb[h], |x| a.norm(s.subgroup(h), s.subgroup(i), x)),
        |g, h| restrict_to(&emb[h], &emb[s.conj(g, h)], |x| a.apply(g, x)),
    )?;
    Ok(FixedPointFunctor { functor, embeddings: emb })
}

/// Constant functor with every map the identity.
pub fn constant_functor(system: Arc<SubgroupSystem>, value: FgAbGroup) -> Result<RicFunctor, MackeyError> {
    let n = system.len();
    let id = AbHom::identity(&value);
    RicFunctor::build(system, vec![value; n], |_, _| Ok(id.clone()), |_, _| Ok(id.clone()), |_, _| Ok(id.clone()))
}

/// `ℤ` everywhere with `res_{I,H} = ×[H:I]`, `ind = id`, `con = id`: a cohomological Mackey
/// functor without Galois descent.
pub fn index_functor(system: Arc<SubgroupSystem>) -> Result<RicFunctor, MackeyError> {
    let n = system.len();
    let z = FgAbGroup::integers();
    let s = system.clone();
    RicFunctor::build(
        system,
        vec![z.clone(); n],
        |h, i| Ok(AbHom::scalar(&z, s.index(h, i) as i64)),
        |_, _| Ok(AbHom::identity(&z)),
        |_, _| Ok(AbHom::identity(&z)),
    )
}

// ---------------------------------------------------------------- morphisms

/// A family of component maps `Φ(H) → Ψ(H)`.
#[derive(Debug, Clone)]
pub struct FunctorMorphism {
    pub source: Arc<RicFunctor>,
    pub target: Arc<RicFunctor>,
    pub components: Vec<AbHom>,
}

impl FunctorMorphism {
    pub fn new(source: Arc<RicFunctor>, target: Arc<RicFunctor>, components: Vec<AbHom>) -> Result<Self, MackeyError> {
        let n = source.system.len();
        if !Arc::ptr_eq(&source.system, &target.system) && source.system.base() != target.system.base() {
            return Err(MackeyError::Structure("morphism between functors on different systems".into()));
        }
        if components.len() != n {
            return Err(MackeyError::Structure("one component per subgroup is required".into()));
        }
        for (h, c) in components.iter().enumerate() {
            if c.domain() != source.value(h) || c.codomain() != target.value(h) {
                return Err(MackeyError::Structure(format!("component {h} is mistyped")));
            }
        }
        Ok(FunctorMorphism { source, target, components })
    }

    pub fn identity(f: Arc<RicFunctor>) -> Self {
        let components = f.values.iter().map(AbHom::identity).collect();
        FunctorMorphism { source: f.clone(), target: f, components }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().all(AbHom::is_isomorphism)
    }

    /// First subgroup whose component is not injective or not surjective.
    pub fn iso_witness(&self) -> Option<String> {
        let s = &self.source.system;
        self.components.iter().enumerate().find_map(|(h, c)| {
            if !c.is_injective() {
                Some(format!("not injective at H={}", s.label(h)))
            } else if !c.is_surjective() {
                Some(format!("not surjective at H={}", s.label(h)))
            } else {
                None
            }
        })
    }
}

/// The res, ind and con squares commute.
pub fn validate_morphism(m: &FunctorMorphism) -> Report {
    let (a, b) = (&m.source, &m.target);
    let s = &a.system;
    let c = &m.components;
    let mut report = Report::new();
    let res = s.ids().find_map(|h| {
        s.res_set(h)
            .iter()
            .find(|&&i| a.res(h, i).then(&c[i]) != c[h].then(b.res(h, i)))
            .map(|&i| format!("H={} I={}", s.label(h), s.label(i)))
    });
    report.record("morphism.res", res);
    let ind = s.ids().find_map(|h| {
        s.ind_set(h)
            .iter()
            .find(|&&i| a.ind(h, i).then(&c[h]) != c[i].then(b.ind(h, i)))
            .map(|&i| format!("H={} I={}", s.label(h), s.label(i)))
    });
    report.record("morphism.ind", ind);
    let con = s.group().elements().find_map(|x| {
        s.ids()
            .find(|&h| a.con(x, h).then(&c[s.conj(x, h)]) != c[h].then(b.con(x, h)))
            .map(|h| format!("g={x} H={}", s.label(h)))
    });
    report.record("morphism.con", con);
    report
}

// ---------------------------------------------------------------- subfunctors and quotients

/// Generators of `Φ′(H) ≤ Φ(H)` for each `H`.
#[derive(Debug, Clone)]
pub struct Subfunctor {
    pub generators: Vec<Vec<Vec<i64>>>,
}

impl Subfunctor {
    pub fn zero(f: &RicFunctor) -> Self {
        Subfunctor { generators: vec![Vec::new(); f.system.len()] }
    }

    pub fn everything(f: &RicFunctor) -> Self {
        Subfunctor { generators: f.values.iter().map(|v| (0..v.ngens()).map(|j| v.generator(j)).collect()).collect() }
    }
}

fn in_span(q: &QuotientMap, x: &[i64]) -> bool {
    q.group.is_zero(&q.project(x))
}

/// `Φ/Φ′` with induced maps, after checking that every map preserves `Φ′`.
pub fn quotient_functor(f: &RicFunctor, sub: &Subfunctor) -> Result<(RicFunctor, Vec<QuotientMap>), MackeyError> {
    let s = f.system.clone();
    if sub.generators.len() != s.len() {
        return Err(MackeyError::Structure("one generator list per subgroup is required".into()));
    }
    let q: Vec<QuotientMap> = s.ids().map(|h| f.value(h).quotient(&sub.generators[h])).collect();
    let preserved =
        |m: &AbHom, from: SubId, to: SubId| sub.generators[from].iter().all(|x| in_span(&q[to], &m.apply(x)));
    for (&(h, i), m) in &f.res {
        if !preserved(m, h, i) {
            return Err(MackeyError::NotSubfunctor(format!("res H={} I={}", s.label(h), s.label(i))));
        }
    }
    for (&(h, i), m) in &f.ind {
        if !preserved(m, i, h) {
            return Err(MackeyError::NotSubfunctor(format!("ind H={} I={}", s.label(h), s.label(i))));
        }
    }
    for x in s.group().elements() {
        for h in s.ids() {
            if !preserved(f.con(x, h), h, s.conj(x, h)) {
                return Err(MackeyError::NotSubfunctor(format!("con g={x} H={}", s.label(h))));
            }
        }
    }
    let induced = |m: &AbHom, from: SubId, to: SubId| -> Result<AbHom, MackeyError> {
        m.induced(&q[from], &q[to]).ok_or_else(|| MackeyError::NotSubfunctor("induced map undefined".into()))
    };
    let values = q.iter().map(|x| x.group.clone()).collect();
    let out = RicFunctor::build(
        s.clone(),
        values,
        |h, i| induced(f.res(h, i), h, i),
        |h, i| induced(f.ind(h, i), i, h),
        |x, h| induced(f.con(x, h), h, s.conj(x, h)),
    )?;
    Ok((out, q))
}

// ---------------------------------------------------------------- descent and adjunction

/// Fixed points of `Φ(U)` under the `H/U`-action by conjugation, for `U ⊴ H`.
fn quotient_invariants(f: &RicFunctor, h: SubId, u: SubId) -> Result<SubgroupEmbedding, MackeyError> {
    let s = &f.system;
    let g = s.group();
    let id = AbHom::identity(f.value(u));
    if let Some(&x) = s.subgroup(u).elements().iter().find(|&&x| f.con(x, u) != &id) {
        return Err(MackeyError::NotStable(format!("con g={x} acts non-trivially on U={}", s.label(u))));
    }
    let maps: Vec<AbHom> = g.generating_set(s.subgroup(h)).iter().map(|&x| f.con(x, u).clone()).collect();
    Ok(common_fixed(f.value(u), &maps))
}

/// Whether `res_{U,H}: Φ(H) → Φ(U)^{H/U}` is an isomorphism.
pub fn check_galois_descent(f: &RicFunctor, h: SubId, u: SubId) -> Result<bool, MackeyError> {
    let s = &f.system;
    let g = s.group();
    if !s.in_res(h, u) || !g.is_normal_in(s.subgroup(u), s.subgroup(h)) {
        return Err(MackeyError::Structure(format!(
            "U={} is not normal in H={} or not restrictable",
            s.label(u),
            s.label(h)
        )));
    }
    let fixed = quotient_invariants(f, h, u)?;
    let res = f.res(h, u);
    if !res.is_injective() {
        return Ok(false);
    }
    let all_in = (0..f.value(h).ngens()).all(|j| fixed.pull(&res.apply(&f.value(h).generator(j))).is_some());
    let onto =
        (0..fixed.group.ngens()).all(|j| res.preimage(&fixed.embedding.apply(&fixed.group.generator(j))).is_some());
    Ok(all_in && onto)
}

/// Minimum of a descent basis, after checking the basis conditions at finite level.
pub fn descent_minimum(system: &SubgroupSystem, basis: &[SubId]) -> Result<SubId, MackeyError> {
    let g = system.group();
    if basis.is_empty() {
        return Err(MackeyError::InvalidDescentBasis("empty basis".into()));
    }
    for &n in basis {
        if n >= system.len() || !g.is_normal(system.subgroup(n)) {
            return Err(MackeyError::InvalidDescentBasis(format!("{n} is not a normal subgroup in the system")));
        }
    }
    for &a in basis {
        for &b in basis {
            let meet = g.intersection(system.subgroup(a), system.subgroup(b));
            if !basis.iter().any(|&c| system.subgroup(c).is_subgroup_of(&meet)) {
                return Err(MackeyError::InvalidDescentBasis(format!(
                    "no member below {} and {}",
                    system.label(a),
                    system.label(b)
                )));
            }
        }
    }
    for h in system.ids() {
        let below: Vec<SubId> =
            basis.iter().copied().filter(|&n| system.subgroup(n).is_subgroup_of(system.subgroup(h))).collect();
        if below.is_empty() {
            return Err(MackeyError::InvalidDescentBasis(format!("not cofinal at H={}", system.label(h))));
        }
        if let Some(&n) = below.iter().find(|&&n| !system.in_res(h, n)) {
            return Err(MackeyError::InvalidDescentBasis(format!(
                "{} is not in the restriction set of {}",
                system.label(n),
                system.label(h)
            )));
        }
    }
    let min = basis
        .iter()
        .copied()
        .find(|&m| basis.iter().all(|&n| system.subgroup(m).is_subgroup_of(system.subgroup(n))))
        .expect("a filter basis of a finite poset has a minimum");
    Ok(min)
}

/// `Φ* = Φ(N₀)` with `g` acting by `con_{g,N₀}`, where `N₀` is the minimum of the basis.
pub fn functor_colimit(f: &RicFunctor, basis: &[SubId]) -> Result<(GModule, SubId), MackeyError> {
    let s = &f.system;
    let n0 = descent_minimum(s, basis)?;
    let g = s.group_arc().clone();
    let gens = g.generating_set(&g.whole());
    let images: Vec<AbHom> = gens.iter().map(|&x| f.con(x, n0).clone()).collect();
    let m = GModule::new(g, f.value(n0).clone(), &gens, &images)?;
    Ok((m, n0))
}

/// Counit and unit of the adjunction together with their verdicts.
#[derive(Debug, Clone)]
pub struct Adjunction {
    /// `ε(A): (A_*)* → A`.
    pub epsilon: AbHom,
    pub epsilon_iso: bool,
    /// `η(Φ): Φ → (Φ*)_*`.
    pub eta: FunctorMorphism,
    pub eta_iso: bool,
    pub eta_witness: Option<String>,
    pub identities: Report,
}

/// `η(Φ)_H(a) = res_{N₀,H}(a)` read in `(Φ*)^H`.
pub fn unit(f: &Arc<RicFunctor>, basis: &[SubId]) -> Result<(FunctorMorphism, GModule, SubId), MackeyError> {
    let (star, n0) = functor_colimit(f, basis)?;
    let fp = fixed_point_functor(&star, f.system.clone())?;
    let comps = f
        .system
        .ids()
        .map(|h| {
            let r = f.res(h, n0);
            let images = (0..f.value(h).ngens())
                .map(|j| {
                    fp.embeddings[h].pull(&r.apply(&f.value(h).generator(j))).ok_or_else(|| {
                        MackeyError::NotStable(format!("restriction from H={} is not invariant", f.system.label(h)))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AbHom::from_images(f.value(h).clone(), fp.embeddings[h].group.clone(), &images)?)
        })
        .collect::<Result<Vec<_>, MackeyError>>()?;
    let eta = FunctorMorphism::new(f.clone(), Arc::new(fp.functor), comps)?;
    Ok((eta, star, n0))
}

pub fn adjunction_maps(a: &GModule, f: &Arc<RicFunctor>, basis: &[SubId]) -> Result<Adjunction, MackeyError> {
    let system = f.system.clone();
    let mut identities = Report::new();

    // counit for A: (A_*)* = A^{N₀} embedded in A
    let a_star = Arc::new(fixed_point_functor(a, system.clone())?.functor);
    let (a_star_star, n0) = functor_colimit(&a_star, basis)?;
    let fixed_n0 = a.fixed_points(system.subgroup(n0));
    let epsilon = fixed_n0.embedding.clone();
    let epsilon_iso = epsilon.is_isomorphism();
    debug_assert_eq!(a_star_star.underlying(), &fixed_n0.group);

    // ε(A)_* ∘ η(A_*) = id on A_*
    let (eta_a, _, _) = unit(&a_star, basis)?;
    let a_emb: Vec<SubgroupEmbedding> = system.ids().map(|h| a.fixed_points(system.subgroup(h))).collect();
    let star_emb: Vec<SubgroupEmbedding> = system.ids().map(|h| a_star_star.fixed_points(system.subgroup(h))).collect();
    let tri_a = system.ids().find_map(|h| {
        let eps_h = restrict_to(&star_emb[h], &a_emb[h], |x| epsilon.apply(x)).ok()?;
        (eta_a.components[h].then(&eps_h) != AbHom::identity(a_star.value(h))).then(|| format!("H={}", system.label(h)))
    });
    identities.record("triangle.module", tri_a);

    // unit for Φ and ε(Φ*) ∘ η(Φ)_{N₀} = id on Φ*
    let (eta, phi_star, m0) = unit(f, basis)?;
    let phi_star_fixed = phi_star.fixed_points(system.subgroup(m0));
    let tri_f = eta.components[m0].then(&phi_star_fixed.embedding) != AbHom::identity(phi_star.underlying());
    identities.record("triangle.functor", tri_f.then(|| format!("N0={}", system.label(m0))));

    let eta_witness = eta.iso_witness();
    Ok(Adjunction { epsilon, epsilon_iso, eta_iso: eta_witness.is_none(), eta_witness, eta, identities })
}

/// All normal subgroups in the system.
pub fn normal_basis(system: &SubgroupSystem) -> Vec<SubId> {
    system.ids().filter(|&h| system.group().is_normal(system.subgroup(h))).collect()
}
