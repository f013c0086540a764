//! Whole-pipeline runs over a JSON scenario, and the bundled fixtures.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::lattice::{lattice_property_check, reduced_verification, NormAssignment, ReductionMode};
use super::reciprocity::{ReciprocityData, ReciprocityTable};
use super::spectrum::Spectrum;
use super::valuation::{OmegaSpec, ValuationFamily, ValuationSpec};
use super::CftError;
use crate::abelian::{AbHom, FgAbGroup};
use crate::catalog;
use crate::gmodule::GModule;
use crate::group::GroupSpec;
use crate::mackey::{full_check, Builtin, FunctorSource};
use crate::ramification::{RamificationDatum, RamificationSpec};
use crate::report::{Check, Report, Status};
use crate::system::{SubId, SubgroupSystem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumSpec {
    /// Seed pairs `(H, U)`; diagonal pairs and conjugates are added.
    pub pairs: Vec<(SubId, SubId)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub group: GroupSpec,
    pub ramification: RamificationSpec,
    pub functor: FunctorSource,
    pub valuation: ValuationSpec,
    pub spectrum: SpectrumSpec,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub checks: Vec<Check>,
    pub tables: Vec<ReciprocityTable>,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}

/// Everything a scenario builds before any verdict is taken.
pub struct Prepared {
    pub data: ReciprocityData,
    pub functor_report: Report,
}

pub fn prepare(spec: &ScenarioSpec) -> Result<Prepared, CftError> {
    let g = Arc::new(spec.group.build()?);
    if let Some(own) = &spec.ramification.group {
        if own.build()? != *g {
            return Err(CftError::Scenario("ramification group differs from the scenario group".into()));
        }
    }
    let datum = RamificationDatum::from_spec(g.clone(), &spec.ramification)?;
    let functor = Arc::new(spec.functor.build(g)?);
    let functor_report = full_check(&functor);
    let system = functor.system().clone();
    if let Some(&(h, u)) = spec.spectrum.pairs.iter().find(|&&(h, u)| h >= system.len() || u >= system.len()) {
        return Err(CftError::Scenario(format!("pair ({h}, {u}) names an unknown subgroup")));
    }
    let spectrum = Arc::new(Spectrum::generated(system, &spec.spectrum.pairs)?);
    let valuation = ValuationFamily::from_spec(functor, &spec.valuation)?;
    let data = ReciprocityData::new(valuation, datum, spectrum)?;
    Ok(Prepared { data, functor_report })
}

/// Functor axioms, FND validation, `Υ` with its certificates, and both reductions.
/// `certify` computes `Υ` even when FND validation fails.
pub fn run_scenario(spec: &ScenarioSpec, certify: bool) -> Result<ScenarioReport, CftError> {
    let Prepared { data, functor_report } = prepare(spec)?;
    let mut report = Report::new();
    report.extend_prefixed("functor", functor_report);
    let coherence = data.spectrum.coherence();
    report.record("spectrum.l_coherent", coherence.l_witness.clone());
    report.record("spectrum.i_coherent", coherence.i_witness.clone());
    let fnd = data.validate_fnd();
    let fnd_ok = fnd.passed();
    report.extend(fnd);
    report.extend(data.fesenko_criterion());
    let phi = NormAssignment::induction(data.functor(), data.spectrum.clone())?;
    report.extend(lattice_property_check(&phi, &data.tautological.abelianization));

    let mut tables = Vec::new();
    if fnd_ok || certify {
        let m = data.upsilon_morphism(!fnd_ok)?;
        report.extend(m.report.clone());
        for (mode, name) in
            [(ReductionMode::Prime, "reduction.prime"), (ReductionMode::PrimePower, "reduction.prime_power")]
        {
            let out = reduced_verification(&data.tautological, &m.morphism, mode, Some(data.functor()));
            report.extend_prefixed(name, out.report);
        }
        tables = m.tables;
    } else {
        report.skip("upsilon", "FND validation failed; rerun with certification to force");
    }
    Ok(ScenarioReport { checks: report.checks, tables })
}

fn identity_valuation(system: &SubgroupSystem) -> ValuationSpec {
    let one = crate::matrix::IntMatrix::identity(1);
    ValuationSpec { omega: OmegaSpec { modulus: 0 }, components: system.ids().map(|h| (h, one.clone())).collect() }
}

fn unramified_seeds(system: Arc<SubgroupSystem>, datum: &RamificationDatum) -> SpectrumSpec {
    SpectrumSpec { pairs: Spectrum::unramified(system, datum).pairs().to_vec() }
}

/// Cyclic `G` of order `n` with `d` injective, trivial `ℤ`, `v = id` on every unramified pair.
pub fn cyclic_fixture(n: usize) -> ScenarioSpec {
    let g = Arc::new(catalog::cyclic(n));
    let datum = RamificationDatum::cyclic_identity(g.clone(), 1).expect("1 generates");
    let system = Arc::new(SubgroupSystem::full(g));
    ScenarioSpec {
        group: GroupSpec::Named { catalog: format!("C{n}") },
        ramification: datum.to_spec(),
        functor: FunctorSource::Builtin { builtin: Builtin::TrivialZ, system: None, module: None },
        valuation: identity_valuation(&system),
        spectrum: unramified_seeds(system, &datum),
    }
}

/// `C₂×C₂` with `d` a projection onto `ℤ/2`, on the subgroups containing `ker d`.
pub fn klein_fixture() -> ScenarioSpec {
    let g = Arc::new(catalog::by_name("C2xC2").expect("catalog"));
    let datum = RamificationDatum::new(g.clone(), 2, vec![0, 0, 1, 1], None).expect("projection");
    let base = g.all_subgroups().into_iter().filter(|h| datum.kernel().is_subgroup_of(h)).collect();
    let system = Arc::new(
        SubgroupSystem::from_candidate(&crate::system::SystemCandidate::from_base(g, base)).expect("subsystem"),
    );
    ScenarioSpec {
        group: GroupSpec::Named { catalog: "C2xC2".into() },
        ramification: datum.to_spec(),
        functor: FunctorSource::Builtin { builtin: Builtin::TrivialZ, system: Some(system.to_spec()), module: None },
        valuation: identity_valuation(&system),
        spectrum: unramified_seeds(system, &datum),
    }
}

/// `C₂` acting on `ℤ` by negation with the zero valuation into `ℤ/1`; not an FND.
pub fn negation_fixture() -> ScenarioSpec {
    let g = Arc::new(catalog::cyclic(2));
    let datum = RamificationDatum::cyclic_identity(g.clone(), 1).expect("1 generates");
    let module = GModule::sign(g.clone(), &g.trivial_subgroup(), 0).expect("sign module");
    let system = Arc::new(SubgroupSystem::full(g.clone()));
    let c = crate::mackey::fixed_point_functor(&module, system.clone()).expect("fixed points").functor;
    let omega = FgAbGroup::trivial();
    let components = system.ids().map(|h| (h, AbHom::zero(c.value(h), &omega).matrix().clone())).collect();
    ScenarioSpec {
        group: GroupSpec::Named { catalog: "C2".into() },
        ramification: datum.to_spec(),
        functor: FunctorSource::Builtin { builtin: Builtin::FixedPoints, system: None, module: Some(module.to_spec()) },
        valuation: ValuationSpec { omega: OmegaSpec { modulus: 1 }, components },
        spectrum: SpectrumSpec { pairs: Spectrum::normal(system).pairs().to_vec() },
    }
}

/// Every bundled scenario by name.
pub fn bundled() -> Vec<(String, ScenarioSpec)> {
    let mut out: Vec<(String, ScenarioSpec)> =
        [2, 3, 4, 5, 8, 9].into_iter().map(|n| (format!("cyclic_c{n}"), cyclic_fixture(n))).collect();
    out.push(("klein_projection".into(), klein_fixture()));
    out.push(("negation_c2".into(), negation_fixture()));
    out
}
