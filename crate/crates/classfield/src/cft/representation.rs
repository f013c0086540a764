//! Representations of a spectrum as pair-indexed functor tables, the tautological
//! theory `Π_𝔎` and induction representations `Ĥ⁰_ℰ(C)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::spectrum::{PairId, Spectrum};
use super::CftError;
use crate::abelian::{AbHom, FgAbGroup, QuotientMap};
use crate::group::{AbelianQuotient, Elem};
use crate::mackey::{abelianization_functor, RicFunctor};
use crate::report::Report;
use crate::transfer::{AbelianizationSystem, Transfer};

/// Values on pairs with `res: Φ(p) → Φ(q)` for `q ∈ E_r(p)`, `ind: Φ(q) → Φ(p)` for
/// `q ∈ E_i(p)`, and `con_{g,p}: Φ(p) → Φ(^g p)`.
#[derive(Debug, Clone)]
pub struct Representation {
    spectrum: Arc<Spectrum>,
    values: Vec<FgAbGroup>,
    res: BTreeMap<(PairId, PairId), AbHom>,
    ind: BTreeMap<(PairId, PairId), AbHom>,
    con: Vec<AbHom>,
}

impl Representation {
    pub fn build<R, I, C>(
        spectrum: Arc<Spectrum>,
        values: Vec<FgAbGroup>,
        mut res: R,
        mut ind: I,
        mut con: C,
    ) -> Result<Representation, CftError>
    where
        R: FnMut(PairId, PairId) -> Result<AbHom, CftError>,
        I: FnMut(PairId, PairId) -> Result<AbHom, CftError>,
        C: FnMut(Elem, PairId) -> Result<AbHom, CftError>,
    {
        let mut r = BTreeMap::new();
        let mut d = BTreeMap::new();
        for p in spectrum.ids() {
            for &q in spectrum.res_set(p) {
                r.insert((p, q), res(p, q)?);
            }
            for &q in spectrum.ind_set(p) {
                d.insert((p, q), ind(p, q)?);
            }
        }
        let mut c = Vec::with_capacity(spectrum.system().group().order() * spectrum.len());
        for x in spectrum.system().group().elements() {
            for p in spectrum.ids() {
                c.push(con(x, p)?);
            }
        }
        let out = Representation { spectrum, values, res: r, ind: d, con: c };
        out.check_structure()?;
        Ok(out)
    }

    fn check_structure(&self) -> Result<(), CftError> {
        let sp = &self.spectrum;
        if self.values.len() != sp.len() {
            return Err(CftError::Structure(format!("{} values for {} pairs", self.values.len(), sp.len())));
        }
        let typed =
            |m: &AbHom, dom: PairId, cod: PairId| m.domain() == &self.values[dom] && m.codomain() == &self.values[cod];
        for (&(p, q), m) in &self.res {
            if !typed(m, p, q) {
                return Err(CftError::Structure(format!("res {} → {}", sp.label(p), sp.label(q))));
            }
        }
        for (&(p, q), m) in &self.ind {
            if !typed(m, q, p) {
                return Err(CftError::Structure(format!("ind {} → {}", sp.label(q), sp.label(p))));
            }
        }
        for x in sp.system().group().elements() {
            for p in sp.ids() {
                if !typed(self.con(x, p), p, sp.conj(x, p)) {
                    return Err(CftError::Structure(format!("con g={x} at {}", sp.label(p))));
                }
            }
        }
        Ok(())
    }

    pub fn spectrum(&self) -> &Arc<Spectrum> {
        &self.spectrum
    }

    pub fn value(&self, p: PairId) -> &FgAbGroup {
        &self.values[p]
    }

    pub fn values(&self) -> &[FgAbGroup] {
        &self.values
    }

    pub fn res(&self, p: PairId, q: PairId) -> &AbHom {
        &self.res[&(p, q)]
    }

    pub fn ind(&self, p: PairId, q: PairId) -> &AbHom {
        &self.ind[&(p, q)]
    }

    pub fn con(&self, g: Elem, p: PairId) -> &AbHom {
        &self.con[g * self.spectrum.len() + p]
    }

    /// Value-wise quotient by the subgroups generated by `generators[p]`.
    pub fn quotient(&self, generators: &[Vec<Vec<i64>>]) -> Result<(Representation, Vec<QuotientMap>), CftError> {
        let sp = self.spectrum.clone();
        if generators.len() != sp.len() {
            return Err(CftError::Structure("one generator list per pair is required".into()));
        }
        let q: Vec<QuotientMap> = sp.ids().map(|p| self.values[p].quotient(&generators[p])).collect();
        let induced = |m: &AbHom, from: PairId, to: PairId, what: &str| -> Result<AbHom, CftError> {
            m.induced(&q[from], &q[to])
                .ok_or_else(|| CftError::NotSubfunctor(format!("{what} {} → {}", sp.label(from), sp.label(to))))
        };
        let values = q.iter().map(|x| x.group.clone()).collect();
        let out = Representation::build(
            sp.clone(),
            values,
            |p, r| induced(self.res(p, r), p, r, "res"),
            |p, r| induced(self.ind(p, r), r, p, "ind"),
            |x, p| induced(self.con(x, p), p, sp.conj(x, p), "con"),
        )?;
        Ok((out, q))
    }
}

/// Triviality, transitivity, equivariance and stability of a representation.
pub fn validate_representation(r: &Representation) -> Report {
    let sp = &r.spectrum;
    let s = sp.system();
    let g = s.group();
    let mut report = Report::new();

    let triv = sp.ids().find_map(|p| {
        let id = AbHom::identity(r.value(p));
        if r.res.get(&(p, p)).is_some_and(|m| m != &id) || r.ind.get(&(p, p)).is_some_and(|m| m != &id) {
            Some(format!("self edge at {}", sp.label(p)))
        } else if r.con(0, p) != &id {
            Some(format!("con e at {}", sp.label(p)))
        } else {
            None
        }
    });
    report.record("triviality", triv);

    let mut trans = None;
    'tr: for p in sp.ids() {
        for &q in sp.res_set(p) {
            for &t in sp.res_set(q) {
                if let Some(direct) = r.res.get(&(p, t)) {
                    if r.res(p, q).then(r.res(q, t)) != *direct {
                        trans = Some(format!("res {} {} {}", sp.label(p), sp.label(q), sp.label(t)));
                        break 'tr;
                    }
                }
            }
        }
        for &q in sp.ind_set(p) {
            for &t in sp.ind_set(q) {
                if let Some(direct) = r.ind.get(&(p, t)) {
                    if r.ind(q, t).then(r.ind(p, q)) != *direct {
                        trans = Some(format!("ind {} {} {}", sp.label(p), sp.label(q), sp.label(t)));
                        break 'tr;
                    }
                }
            }
        }
    }
    if trans.is_none() {
        'con: for x in g.elements() {
            for y in g.elements() {
                for p in sp.ids() {
                    if r.con(x, p).then(r.con(y, sp.conj(x, p))) != *r.con(g.mul(y, x), p) {
                        trans = Some(format!("con g={x} g'={y} at {}", sp.label(p)));
                        break 'con;
                    }
                }
            }
        }
    }
    report.record("transitivity", trans);

    let mut equi = None;
    'eq: for x in g.elements() {
        for p in sp.ids() {
            let gp = sp.conj(x, p);
            for &q in sp.res_set(p) {
                if r.res(p, q).then(r.con(x, q)) != r.con(x, p).then(r.res(gp, sp.conj(x, q))) {
                    equi = Some(format!("res g={x} {} → {}", sp.label(p), sp.label(q)));
                    break 'eq;
                }
            }
            for &q in sp.ind_set(p) {
                if r.ind(p, q).then(r.con(x, p)) != r.con(x, q).then(r.ind(gp, sp.conj(x, q))) {
                    equi = Some(format!("ind g={x} {} → {}", sp.label(q), sp.label(p)));
                    break 'eq;
                }
            }
        }
    }
    report.record("equivariance", equi);

    let stab = sp.ids().find_map(|p| {
        let (h, _) = sp.pair(p);
        let id = AbHom::identity(r.value(p));
        s.subgroup(h).elements().iter().find(|&&x| r.con(x, p) != &id).map(|&x| format!("con g={x} at {}", sp.label(p)))
    });
    report.record("stability", stab);
    report
}

/// `C^ℰ`: the value `C(H)` at `(H, U)` with the maps of `C`.
pub fn lift_functor(c: &RicFunctor, spectrum: Arc<Spectrum>) -> Result<Representation, CftError> {
    same_system(c, &spectrum)?;
    let sp = spectrum.clone();
    let sub = |p: PairId| sp.pair(p).0;
    let values = sp.ids().map(|p| c.value(sub(p)).clone()).collect();
    Representation::build(
        spectrum.clone(),
        values,
        |p, q| Ok(c.res(sub(p), sub(q)).clone()),
        |p, q| Ok(c.ind(sub(p), sub(q)).clone()),
        |x, p| Ok(c.con(x, sub(p)).clone()),
    )
}

fn same_system(c: &RicFunctor, spectrum: &Spectrum) -> Result<(), CftError> {
    if Arc::ptr_eq(c.system(), spectrum.system()) || c.system().base() == spectrum.system().base() {
        Ok(())
    } else {
        Err(CftError::Structure("functor and spectrum live on different subgroup systems".into()))
    }
}

// ---------------------------------------------------------------- morphisms

#[derive(Debug, Clone)]
pub struct RepMorphism {
    pub source: Arc<Representation>,
    pub target: Arc<Representation>,
    pub components: Vec<AbHom>,
}

impl RepMorphism {
    pub fn new(
        source: Arc<Representation>,
        target: Arc<Representation>,
        components: Vec<AbHom>,
    ) -> Result<Self, CftError> {
        if source.spectrum.pairs() != target.spectrum.pairs() || components.len() != source.spectrum.len() {
            return Err(CftError::Structure("morphism between representations of different spectra".into()));
        }
        for (p, c) in components.iter().enumerate() {
            if c.domain() != source.value(p) || c.codomain() != target.value(p) {
                return Err(CftError::Structure(format!("component at {} is mistyped", source.spectrum.label(p))));
            }
        }
        Ok(RepMorphism { source, target, components })
    }

    pub fn identity(r: Arc<Representation>) -> Self {
        let components = r.values.iter().map(AbHom::identity).collect();
        RepMorphism { source: r.clone(), target: r, components }
    }

    pub fn is_isomorphism(&self) -> bool {
        self.components.iter().all(AbHom::is_isomorphism)
    }

    pub fn iso_witness(&self) -> Option<String> {
        let sp = &self.source.spectrum;
        self.components.iter().enumerate().find_map(|(p, c)| {
            if !c.is_injective() {
                Some(format!("not injective at {}", sp.label(p)))
            } else if !c.is_surjective() {
                Some(format!("not surjective at {}", sp.label(p)))
            } else {
                None
            }
        })
    }
}

/// The res, ind and con squares commute.
pub fn validate_rep_morphism(m: &RepMorphism) -> Report {
    let (a, b) = (&m.source, &m.target);
    let sp = &a.spectrum;
    let c = &m.components;
    let mut report = Report::new();
    let res = sp.ids().find_map(|p| {
        sp.res_set(p)
            .iter()
            .find(|&&q| a.res(p, q).then(&c[q]) != c[p].then(b.res(p, q)))
            .map(|&q| format!("{} → {}", sp.label(p), sp.label(q)))
    });
    report.record("morphism.res", res);
    let ind = sp.ids().find_map(|p| {
        sp.ind_set(p)
            .iter()
            .find(|&&q| a.ind(p, q).then(&c[p]) != c[q].then(b.ind(p, q)))
            .map(|&q| format!("{} → {}", sp.label(q), sp.label(p)))
    });
    report.record("morphism.ind", ind);
    let con = sp.system().group().elements().find_map(|x| {
        sp.ids()
            .find(|&p| a.con(x, p).then(&c[sp.conj(x, p)]) != c[p].then(b.con(x, p)))
            .map(|p| format!("g={x} at {}", sp.label(p)))
    });
    report.record("morphism.con", con);
    report
}

// ---------------------------------------------------------------- the tautological theory

/// `Π_𝔎(H, U) = H/U·R(H)` with the quotient witnesses `H → Π_𝔎(H, U)`.
#[derive(Debug, Clone)]
pub struct Tautological {
    pub abelianization: AbelianizationSystem,
    pub representation: Arc<Representation>,
    pub quotients: Vec<AbelianQuotient>,
}

impl Tautological {
    pub fn spectrum(&self) -> &Arc<Spectrum> {
        self.representation.spectrum()
    }

    /// Whether `U ⊇ R(H)` at the pair.
    pub fn is_r_pair(&self, p: PairId) -> bool {
        let sp = self.spectrum();
        let (h, u) = sp.pair(p);
        self.abelianization.of(h).is_subgroup_of(sp.system().subgroup(u))
    }
}

pub fn tautological_cft(spectrum: Arc<Spectrum>, r: &AbelianizationSystem) -> Result<Tautological, CftError> {
    let s = spectrum.system().clone();
    if !Arc::ptr_eq(r.system(), &s) && r.system().base() != s.base() {
        return Err(CftError::Structure("abelianization system lives on a different subgroup system".into()));
    }
    let g = s.group();
    let quotients = spectrum
        .ids()
        .map(|p| {
            let (h, u) = spectrum.pair(p);
            let n = g.join(s.subgroup(u), r.of(h));
            g.abelian_quotient(s.subgroup(h), &n)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let via_elements =
        |from: &AbelianQuotient, to: &AbelianQuotient, map: &dyn Fn(Elem) -> Elem| -> Result<AbHom, CftError> {
            let images: Vec<Vec<i64>> =
                (0..from.group.ngens()).map(|j| to.image(map(from.generator_lift(j))).to_vec()).collect();
            Ok(AbHom::from_images(from.group.clone(), to.group.clone(), &images)?)
        };
    let values = quotients.iter().map(|q| q.group.clone()).collect();
    let sp = spectrum.clone();
    let rep = Representation::build(
        spectrum,
        values,
        |p, q| Ok(Transfer::new(g, quotients[p].clone(), quotients[q].clone())?.hom),
        |p, q| via_elements(&quotients[q], &quotients[p], &|x| x),
        |x, p| via_elements(&quotients[p], &quotients[sp.conj(x, p)], &|y| g.conj(x, y)),
    )?;
    Ok(Tautological { abelianization: r.clone(), representation: Arc::new(rep), quotients })
}

/// Builds `π_R^ℰ / Φ_taut` with `Φ_taut(H, U) = U·R(H)/R(H)` and the element-induced
/// comparison with the tautological theory; reports whether it is an isomorphism of
/// representations.
pub fn tautological_comparison(taut: &Tautological) -> Result<Report, CftError> {
    let sp = taut.spectrum().clone();
    let s = sp.system();
    let g = s.group();
    let pi = abelianization_functor(&taut.abelianization)?;
    let lifted = lift_functor(&pi, sp.clone())?;
    let rq: Vec<AbelianQuotient> = s.ids().map(|h| taut.abelianization.quotient(h)).collect();
    let gens: Vec<Vec<Vec<i64>>> = sp
        .ids()
        .map(|p| {
            let (h, u) = sp.pair(p);
            g.generating_set(s.subgroup(u)).iter().map(|&x| rq[h].image(x).to_vec()).collect()
        })
        .collect();
    let (quot, maps) = lifted.quotient(&gens)?;
    let components = sp
        .ids()
        .map(|p| {
            let h = sp.pair(p).0;
            let images: Vec<Vec<i64>> = (0..maps[p].group.ngens())
                .map(|j| {
                    let y = maps[p].lift(&maps[p].group.generator(j));
                    taut.quotients[p].image(rq[h].lift(&y)).to_vec()
                })
                .collect();
            AbHom::from_images(maps[p].group.clone(), taut.quotients[p].group.clone(), &images)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let m = RepMorphism::new(Arc::new(quot), taut.representation.clone(), components)?;
    let mut report = validate_rep_morphism(&m);
    report.record("comparison.iso", m.iso_witness());
    Ok(report)
}

// ---------------------------------------------------------------- induction representations

/// `Ĥ⁰_ℰ(C)` with the quotient maps `C(H) → C(H)/ind_{H,U} C(U)`.
#[derive(Debug, Clone)]
pub struct InductionRepresentation {
    pub lifted: Arc<Representation>,
    pub representation: Arc<Representation>,
    pub quotients: Vec<QuotientMap>,
}

pub fn induction_representation(c: &RicFunctor, spectrum: Arc<Spectrum>) -> Result<InductionRepresentation, CftError> {
    same_system(c, &spectrum)?;
    let s = spectrum.system();
    if !s.is_mackey() {
        return Err(CftError::NotMackeyCover("the subgroup system is not a Mackey system".into()));
    }
    for p in spectrum.ids() {
        let (h, u) = spectrum.pair(p);
        if !s.in_ind(h, u) {
            return Err(CftError::NotMackeyCover(format!("U={} is not in 𝔖_i(H={})", s.label(u), s.label(h))));
        }
        for &q in spectrum.ind_set(p) {
            let v = spectrum.pair(q).1;
            if !s.in_ind(u, v) {
                return Err(CftError::NotMackeyCover(format!(
                    "edge {} → {}: V is not in 𝔖_i(U)",
                    spectrum.label(q),
                    spectrum.label(p)
                )));
            }
        }
    }
    let lifted = lift_functor(c, spectrum.clone())?;
    let gens: Vec<Vec<Vec<i64>>> = spectrum
        .ids()
        .map(|p| {
            let (h, u) = spectrum.pair(p);
            let ind = c.ind(h, u);
            (0..c.value(u).ngens()).map(|j| ind.apply(&c.value(u).generator(j))).collect()
        })
        .collect();
    let (rep, quotients) = lifted.quotient(&gens)?;
    Ok(InductionRepresentation { lifted: Arc::new(lifted), representation: Arc::new(rep), quotients })
}
