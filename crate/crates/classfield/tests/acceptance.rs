//! Acceptance run: one PASS/FAIL line per criterion. Every criterion is exact; the runtime
//! budgets below are part of the criterion.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Display;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use classfield::abelian::{gcd, AbHom, FgAbGroup};
use classfield::catalog;
use classfield::cft::scenario::{bundled, prepare, run_scenario, ScenarioSpec};
use classfield::cft::{
    lattice_property_check, norm_index_report, reduced_verification, tate_h0, tate_hminus1, tautological_cft,
    validate_rep_morphism, NormAssignment, ReciprocityData, ReductionMode, RepMorphism, Spectrum,
};
use classfield::gmodule::GModule;
use classfield::group::{double_coset_reps_in, random_transversal, AbelianQuotient, Elem, FiniteGroup, Side, Subgroup};
use classfield::hrv::{
    rank_n_valuation, sample_rng, stack_roundtrip, valuation_axiom_sampler, LaurentElement, LaurentField,
    RankNValuation, RloVec,
};
use classfield::mackey::{
    abelianization_functor, adjunction_maps, fixed_point_functor, full_check, index_functor, normal_basis, RicFunctor,
};
use classfield::ramification::RamificationDatum;
use classfield::report::{Report, Status};
use classfield::system::SubgroupSystem;
use classfield::transfer::{transfer_via_lambda, AbelianizationSystem, Transfer};
use rand::seq::SliceRandom;
use rand::Rng;

type Verdict = Result<String, String>;

trait Ctx<T> {
    fn at(self, what: impl Display) -> Result<T, String>;
}

impl<T, E: Display> Ctx<T> for Result<T, E> {
    fn at(self, what: impl Display) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn first_failure(r: &Report) -> String {
    r.first_failure().map(|c| format!("{} ({})", c.name, c.witness.clone().unwrap_or_default())).unwrap_or_default()
}

fn name_of(g: &FiniteGroup) -> String {
    g.name().map(str::to_string).unwrap_or_else(|| format!("order {}", g.order()))
}

fn full_system(g: &Arc<FiniteGroup>) -> Arc<SubgroupSystem> {
    Arc::new(SubgroupSystem::full(g.clone()))
}

fn ab_quotient(g: &FiniteGroup, h: &Subgroup) -> Result<AbelianQuotient, String> {
    g.abelian_quotient(h, &g.commutator_subgroup(h)).at("abelian quotient")
}

// ---------------------------------------------------------------- 1

fn transfer_correctness() -> Verdict {
    let mut rng = sample_rng(1);
    let (mut pairs, mut chains) = (0, 0);
    for g in catalog::all() {
        let gname = name_of(&g);
        let whole = g.whole();
        let source = g.abelianization();
        let subs: Vec<Subgroup> = g.all_subgroups().into_iter().filter(|h| g.order() / h.order() <= 8).collect();
        let quotients = subs.iter().map(|h| ab_quotient(&g, h)).collect::<Result<Vec<_>, _>>()?;
        for (h, q) in subs.iter().zip(&quotients) {
            let at = || format!("{gname} H={:?}", h.elements());
            let base = Transfer::new(&g, source.clone(), q.clone()).at(at())?;
            let table: Vec<Vec<i64>> = g.elements().map(|x| base.of_element(&g, x)).collect();
            for x in g.elements() {
                ensure!(
                    base.hom.apply(source.image(x)) == table[x],
                    "{}: matrix disagrees with pretransfer at {x}",
                    at()
                );
            }
            for _ in 0..5 {
                let t = random_transversal(&g, &whole, h, Side::Right, false, &mut rng);
                let reps = t.reps().to_vec();
                let other = Transfer::with_transversal(&g, source.clone(), q.clone(), t).at(at())?;
                ensure!(other.hom == base.hom, "{}: transversal {reps:?} changes the transfer", at());
                if let Some(x) = g.elements().find(|&x| other.of_element(&g, x) != table[x]) {
                    return Err(format!("{}: transversal {reps:?} changes V({x})", at()));
                }
            }
            for x in g.elements() {
                for y in g.elements() {
                    ensure!(
                        table[g.mul(x, y)] == q.group.add(&table[x], &table[y]),
                        "{}: V({x}·{y}) ≠ V({x}) + V({y})",
                        at()
                    );
                }
            }
            for x in g.elements() {
                let reps = double_coset_reps_in(&g, &whole, h, &g.cyclic_subgroup(x));
                let l = transfer_via_lambda(&g, &whole, q, x, &reps).at(at())?;
                ensure!(l.value == table[x], "{}: λ-presentation differs at {x}", at());
            }
            pairs += 1;
        }
        for (k_id, k) in subs.iter().enumerate() {
            let outer = Transfer::new(&g, source.clone(), quotients[k_id].clone()).at(&gname)?;
            for (h_id, h) in subs.iter().enumerate() {
                if h_id == k_id || !h.is_subgroup_of(k) {
                    continue;
                }
                let inner = Transfer::new(&g, quotients[k_id].clone(), quotients[h_id].clone()).at(&gname)?;
                let direct = Transfer::new(&g, source.clone(), quotients[h_id].clone()).at(&gname)?;
                ensure!(
                    outer.hom.then(&inner.hom) == direct.hom,
                    "{gname}: transfer is not transitive on {:?} ≤ {:?}",
                    h.elements(),
                    k.elements()
                );
                chains += 1;
            }
        }
    }
    Ok(format!("{pairs} subgroups, {chains} chains"))
}

// ---------------------------------------------------------------- 2

fn mackey_suite() -> Verdict {
    const AXIOMS: [&str; 6] =
        ["triviality", "transitivity", "equivariance", "stability", "mackey_formula", "cohomological"];
    let mut rng = sample_rng(2);
    let mut count = 0;
    for g in catalog::all() {
        let gname = name_of(&g);
        let g = Arc::new(g);
        let s = full_system(&g);
        let mut functors = vec![(
            "π_ab".to_string(),
            abelianization_functor(&AbelianizationSystem::commutators(s.clone())).at(&gname)?,
        )];
        for k in 0..3 {
            let m = GModule::random(g.clone(), &mut rng);
            functors.push((
                format!("module {k} over {}", m.underlying()),
                fixed_point_functor(&m, s.clone()).at(&gname)?.functor,
            ));
        }
        for (label, f) in functors {
            let rep = full_check(&f);
            for axiom in AXIOMS {
                ensure!(
                    rep.status_of(axiom) == Some(Status::Pass),
                    "{gname}, {label}: {axiom} is {:?}: {}",
                    rep.status_of(axiom),
                    first_failure(&rep)
                );
            }
            ensure!(rep.passed(), "{gname}, {label}: {}", first_failure(&rep));
            count += 1;
        }
    }
    Ok(format!("{count} functors"))
}

// ---------------------------------------------------------------- 3

fn module_fixtures(g: &Arc<FiniteGroup>) -> Vec<(String, GModule)> {
    let mut out = vec![
        ("ℤ".to_string(), GModule::trivial(g.clone(), FgAbGroup::integers())),
        ("ℤ/3".to_string(), GModule::trivial(g.clone(), FgAbGroup::cyclic(3))),
        ("ℤ[G]".to_string(), GModule::permutation(g.clone(), &g.trivial_subgroup(), 0)),
    ];
    let subs = g.all_subgroups();
    for k in subs.iter().filter(|k| k.order() * 2 == g.order()) {
        out.push((format!("sign {:?}", k.elements()), GModule::sign(g.clone(), k, 0).expect("index two")));
    }
    if let Some(h) = subs.iter().find(|h| h.order() > 1 && h.order() < g.order() && !g.is_normal(h)) {
        out.push((format!("ℤ/2[G/{:?}]", h.elements()), GModule::permutation(g.clone(), h, 2)));
    }
    out
}

fn adjunction_descent() -> Verdict {
    let mut modules = 0;
    for g in catalog::all() {
        let gname = name_of(&g);
        let g = Arc::new(g);
        let s = full_system(&g);
        let basis = normal_basis(&s);
        for (label, a) in module_fixtures(&g) {
            let f = Arc::new(fixed_point_functor(&a, s.clone()).at(&gname)?.functor);
            let adj = adjunction_maps(&a, &f, &basis).at(format!("{gname} {label}"))?;
            ensure!(adj.epsilon_iso, "{gname} {label}: ε(A) is not an isomorphism");
            ensure!(adj.eta_iso, "{gname} {label}: η(A_*) fails: {:?}", adj.eta_witness);
            ensure!(adj.identities.passed(), "{gname} {label}: {}", first_failure(&adj.identities));
            modules += 1;
        }
        if g.order() > 1 {
            let bad = Arc::new(index_functor(s.clone()).at(&gname)?);
            let a = GModule::trivial(g.clone(), FgAbGroup::integers());
            let adj = adjunction_maps(&a, &bad, &basis).at(&gname)?;
            ensure!(!adj.eta_iso && adj.eta_witness.is_some(), "{gname}: η of the index functor is an isomorphism");
        }
    }
    Ok(format!("{modules} modules, non-descent functor rejected on every nontrivial group"))
}

// ---------------------------------------------------------------- 4, 5

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Every surjection onto `ℤ/m` for `m > 1` dividing the exponent of `G^ab`.
fn admissible_data(g: &Arc<FiniteGroup>) -> Vec<RamificationDatum> {
    let exponent = g.abelianization().group.invariant_factors().last().copied().unwrap_or(1);
    divisors(exponent as u64)
        .into_iter()
        .filter(|&m| m > 1)
        .flat_map(|m| RamificationDatum::all_surjections(g.clone(), m as i64))
        .collect()
}

/// `I_H`, `f_H` and `d(H)` straight from the table of `d`.
struct Oracle {
    inertia: Vec<Vec<Elem>>,
    f: Vec<i64>,
}

impl Oracle {
    fn new(datum: &RamificationDatum, subs: &[Subgroup]) -> Oracle {
        let m = datum.modulus();
        let inertia =
            subs.iter().map(|h| h.elements().iter().copied().filter(|&x| datum.d(x) == 0).collect()).collect();
        let f = subs
            .iter()
            .map(|h| {
                let image: HashSet<i64> = h.elements().iter().map(|&x| datum.d(x)).collect();
                m / image.len() as i64
            })
            .collect();
        Oracle { inertia, f }
    }
}

fn product_set(g: &FiniteGroup, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
    let mut out: Vec<Elem> = a.iter().flat_map(|&x| b.iter().map(move |&y| g.mul(x, y))).collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn ramification_laws() -> Verdict {
    let (mut data, mut pairs, mut towers) = (0, 0, 0);
    for g in catalog::all() {
        let gname = name_of(&g);
        let g = Arc::new(g);
        let subs = g.all_subgroups();
        let below: Vec<Vec<usize>> =
            subs.iter().map(|h| (0..subs.len()).filter(|&k| subs[k].is_subgroup_of(h)).collect()).collect();
        for datum in admissible_data(&g) {
            let oracle = Oracle::new(&datum, &subs);
            let mut deg: HashMap<(usize, usize), (usize, i64)> = HashMap::new();
            for (h, hs) in subs.iter().enumerate() {
                for &k in &below[h] {
                    let ks = &subs[k];
                    let at = || {
                        format!(
                            "{gname} d={:?} H={:?} K={:?}",
                            (0..g.order()).map(|x| datum.d(x)).collect::<Vec<_>>(),
                            hs.elements(),
                            ks.elements()
                        )
                    };
                    let (e, f) = datum.degrees(hs, ks).at(at())?;
                    let want_e = oracle.inertia[h].len() / oracle.inertia[k].len();
                    let want_f = oracle.f[k] / oracle.f[h];
                    ensure!((e, f) == (want_e, want_f), "{}: (e, f) = ({e}, {f}), expected ({want_e}, {want_f})", at());
                    ensure!(e as i64 * f == (hs.order() / ks.order()) as i64, "{}: e·f ≠ [H:K]", at());
                    let unram = oracle.inertia[h].iter().all(|&x| ks.contains(x));
                    ensure!(datum.is_unramified(hs, ks).at(at())? == unram, "{}: unramified criterion", at());
                    let total = product_set(&g, ks.elements(), &oracle.inertia[h]) == hs.elements();
                    ensure!(
                        datum.is_totally_ramified(hs, ks).at(at())? == total,
                        "{}: totally ramified criterion",
                        at()
                    );
                    deg.insert((h, k), (e, f));
                    pairs += 1;
                }
            }
            for (h, _) in subs.iter().enumerate() {
                for &l in &below[h] {
                    for &k in &below[l] {
                        let (outer, upper, lower) = (deg[&(h, k)], deg[&(h, l)], deg[&(l, k)]);
                        ensure!(
                            outer == (upper.0 * lower.0, upper.1 * lower.1),
                            "{gname}: tower {:?} ≥ {:?} ≥ {:?} is not multiplicative",
                            subs[h].elements(),
                            subs[l].elements(),
                            subs[k].elements()
                        );
                        towers += 1;
                    }
                }
            }
            data += 1;
        }
    }
    Ok(format!("{data} data, {pairs} pairs, {towers} towers"))
}

fn p_part(mut n: u64, primes: &std::collections::BTreeSet<u64>) -> u64 {
    let mut part = 1;
    for &p in primes {
        while n.is_multiple_of(p) {
            n /= p;
            part *= p;
        }
    }
    part
}

fn frobenius_law() -> Verdict {
    let (mut validated, mut refused) = (0, 0);
    for g in catalog::all() {
        let gname = name_of(&g);
        let g = Arc::new(g);
        let subs = g.all_subgroups();
        for datum in admissible_data(&g) {
            let oracle = Oracle::new(&datum, &subs);
            for (h, hs) in subs.iter().enumerate() {
                let horizon = datum.modulus() / oracle.f[h];
                if horizon <= 1 {
                    continue;
                }
                for (u, us) in subs.iter().enumerate().filter(|(_, us)| us.is_subgroup_of(hs)) {
                    for &x in hs.elements() {
                        let mult = datum.d(x) / oracle.f[h];
                        if mult == 0 {
                            continue;
                        }
                        let at = || format!("{gname} H={:?} U={:?} h={x}", hs.elements(), us.elements());
                        let Ok(fg) = datum.frobenius_group(x, hs, us, false) else {
                            refused += 1;
                            continue;
                        };
                        if !fg.report.passed() {
                            refused += 1;
                            continue;
                        }
                        ensure!(fg.multiplicity == mult, "{}: multiplicity {} ≠ {mult}", at(), fg.multiplicity);
                        let powers: Vec<Elem> = (0..g.element_order(x)).map(|k| g.pow(x, k as i64)).collect();
                        let product = product_set(&g, &powers, &oracle.inertia[u]);
                        ensure!(fg.sigma.elements() == product, "{}: Σ ≠ ⟨h⟩·I_U", at());
                        let depth = p_part(mult as u64, datum.primes()) as i64;
                        let candidates: Vec<usize> = (0..subs.len())
                            .filter(|&s| {
                                subs[s].is_subgroup_of(hs)
                                    && subs[s].contains(x)
                                    && oracle.f[s] == depth * oracle.f[h]
                                    && oracle.inertia[s] == oracle.inertia[u]
                            })
                            .collect();
                        ensure!(
                            candidates.len() == 1 && subs[candidates[0]] == fg.sigma,
                            "{}: {} subgroups satisfy the Frobenius axioms",
                            at(),
                            candidates.len()
                        );
                        validated += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{validated} Frobenius groups unique, {refused} candidates refused"))
}

// ---------------------------------------------------------------- 6

const TATE_LIMIT: u64 = 10_000;

fn canonical(g: &FgAbGroup, x: Vec<i64>) -> Vec<i64> {
    g.reduced(x)
}

/// `#{x ∈ ambient : kx ∈ sub}` for every `k` dividing `n`; this determines `ambient/sub`.
fn profile(g: &FgAbGroup, ambient: &[Vec<i64>], sub: &HashSet<Vec<i64>>, n: u64) -> Vec<usize> {
    divisors(n)
        .into_iter()
        .map(|k| ambient.iter().filter(|x| sub.contains(&canonical(g, g.scale(k as i64, x)))).count() / sub.len())
        .collect()
}

fn closure(g: &FgAbGroup, gens: &[Vec<i64>]) -> HashSet<Vec<i64>> {
    let zero = g.zero();
    let mut seen: HashSet<Vec<i64>> = HashSet::from([zero.clone()]);
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for s in gens {
            let y = canonical(g, g.add(&x, s));
            if seen.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    seen
}

fn finite_order(g: &FgAbGroup) -> Option<u64> {
    g.order().finite()
}

fn tate_fixture_functors(
    g: &Arc<FiniteGroup>,
    s: &Arc<SubgroupSystem>,
    rng: &mut classfield::hrv::SampleRng,
) -> Result<Vec<(String, RicFunctor)>, String> {
    let mut modules = vec![
        ("ℤ/4".to_string(), GModule::trivial(g.clone(), FgAbGroup::cyclic(4))),
        ("𝔽₂[G]".to_string(), GModule::permutation(g.clone(), &g.trivial_subgroup(), 2)),
        ("ℤ/3[G]".to_string(), GModule::permutation(g.clone(), &g.trivial_subgroup(), 3)),
    ];
    let subs = g.all_subgroups();
    if let Some(k) = subs.iter().find(|k| k.order() * 2 == g.order()) {
        modules.push(("sign mod 3".to_string(), GModule::sign(g.clone(), k, 3).expect("index two")));
    }
    if let Some(h) = subs.iter().find(|h| h.order() > 1 && h.order() < g.order() && !g.is_normal(h)) {
        modules.push(("ℤ/4[G/H]".to_string(), GModule::permutation(g.clone(), h, 4)));
    }
    for k in 0..2 {
        let m = GModule::random(g.clone(), rng);
        if m.underlying().is_finite() {
            modules.push((format!("random {k}"), m));
        }
    }
    let mut out =
        vec![("π_ab".to_string(), abelianization_functor(&AbelianizationSystem::commutators(s.clone())).at("π_ab")?)];
    for (label, m) in modules {
        out.push((label, fixed_point_functor(&m, s.clone()).at("fixed points")?.functor));
    }
    Ok(out)
}

fn tate_oracle() -> Verdict {
    let mut rng = sample_rng(6);
    let mut compared = 0;
    for g in catalog::all() {
        let gname = name_of(&g);
        let g = Arc::new(g);
        let s = full_system(&g);
        for (label, c) in tate_fixture_functors(&g, &s, &mut rng)? {
            for h in s.ids() {
                let Some(nh) = finite_order(c.value(h)).filter(|&n| n <= TATE_LIMIT) else { continue };
                for u in s.ids() {
                    if u == h || !s.in_ind(h, u) || !g.is_normal_in(s.subgroup(u), s.subgroup(h)) {
                        continue;
                    }
                    let Some(nu) = finite_order(c.value(u)).filter(|&n| n <= TATE_LIMIT) else { continue };
                    let at = || format!("{gname} {label} H={} U={}", s.label(h), s.label(u));
                    let (ch, cu) = (c.value(h), c.value(u));
                    let ind = c.ind(h, u);
                    let cu_elems = cu.elements();
                    let ch_elems = ch.elements();

                    // Ĥ⁰: C(H) modulo the image of the norm
                    let image: HashSet<Vec<i64>> = cu_elems.iter().map(|y| canonical(ch, ind.apply(y))).collect();
                    let h0 = tate_h0(&c, h, u).at(at())?;
                    let lib: Vec<Vec<i64>> = h0.group.elements();
                    let lib_zero = HashSet::from([h0.group.zero()]);
                    ensure!(
                        profile(ch, &ch_elems, &image, nh) == profile(&h0.group, &lib, &lib_zero, nh),
                        "{}: Ĥ⁰ = {} disagrees with the brute-force quotient of order {}",
                        at(),
                        h0.group,
                        nh as usize / image.len()
                    );

                    // Ĥ⁻¹: the norm kernel modulo the augmentation image
                    let kernel: Vec<Vec<i64>> =
                        cu_elems.iter().filter(|y| ch.is_zero(&ind.apply(y))).cloned().collect();
                    let mut gens = Vec::new();
                    for &x in s.subgroup(h).elements() {
                        for j in 0..cu.ngens() {
                            let e = cu.generator(j);
                            gens.push(canonical(cu, cu.sub(&c.con(x, u).apply(&e), &e)));
                        }
                    }
                    let aug = closure(cu, &gens);
                    ensure!(
                        aug.iter().all(|y| ch.is_zero(&ind.apply(y))),
                        "{}: augmentation leaves the norm kernel",
                        at()
                    );
                    let hm1 = tate_hminus1(&c, h, u).at(at())?;
                    let q = &hm1.quotient.group;
                    let lib: Vec<Vec<i64>> = q.elements();
                    let lib_zero = HashSet::from([q.zero()]);
                    ensure!(
                        profile(cu, &kernel, &aug, nu) == profile(q, &lib, &lib_zero, nu),
                        "{}: Ĥ⁻¹ = {q} disagrees with |ker| = {}, |aug| = {}",
                        at(),
                        kernel.len(),
                        aug.len()
                    );
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} normal pairs"))
}

// ---------------------------------------------------------------- 7, 8, 9

fn unramified_fixtures() -> Vec<(String, ScenarioSpec)> {
    bundled().into_iter().filter(|(n, _)| n != "negation_c2").collect()
}

fn unramified_reciprocity() -> Verdict {
    let mut pairs = 0;
    let fixtures = unramified_fixtures();
    for (name, spec) in &fixtures {
        let data = prepare(spec).at(name)?.data;
        let ur = data.validate_urfnd();
        ensure!(ur.passed(), "{name}: {}", first_failure(&ur));
        let sp = &data.spectrum;
        let s = sp.system();
        let mut maps = Vec::new();
        for p in sp.ids() {
            let (h, u) = sp.pair(p);
            ensure!(
                data.datum.inertia(s.subgroup(h)) == data.datum.inertia(s.subgroup(u)),
                "{name}: {} is ramified",
                sp.label(p)
            );
            let t = data.unramified_upsilon(p).at(format!("{name} {}", sp.label(p)))?;
            let index = (s.subgroup(h).order() / s.subgroup(u).order()) as u64;
            ensure!(t.is_iso, "{name}: Υ is not an isomorphism at {}", sp.label(p));
            ensure!(t.prime_independent, "{name}: Υ depends on the prime element at {}", sp.label(p));
            ensure!(
                t.source.order().finite() == Some(index) && t.target.order().finite() == Some(index),
                "{name}: |source| or |target| ≠ [H:U] at {}",
                sp.label(p)
            );
            maps.push(t.map);
            pairs += 1;
        }
        let m = RepMorphism::new(data.tautological.representation.clone(), data.induction.representation.clone(), maps)
            .at(name)?;
        let natural = validate_rep_morphism(&m);
        ensure!(natural.passed(), "{name}: {}", first_failure(&natural));
    }
    Ok(format!("{} fixtures, {pairs} unramified pairs", fixtures.len()))
}

fn full_upsilon() -> Verdict {
    let (mut scenarios, mut lifts) = (0, 0);
    for (name, spec) in bundled() {
        let data = prepare(&spec).at(&name)?.data;
        if !data.validate_fnd().passed() {
            continue;
        }
        let m = data.upsilon_morphism(false).at(&name)?;
        ensure!(m.report.passed(), "{name}: {}", first_failure(&m.report));
        let sp = &data.spectrum;
        let s = sp.system();
        let g = s.group();
        for (p, t) in m.tables.iter().enumerate() {
            ensure!(t.lift_independent && t.multiplicative, "{name}: table flags fail at {}", sp.label(p));
            let (h, u) = sp.pair(p);
            if h == u {
                continue;
            }
            let hs = s.subgroup(h);
            let horizon = datum_horizon(&data.datum, hs);
            let source = &data.tautological.quotients[p];
            let target = &t.target;
            let mut tilde: BTreeMap<Elem, (i64, Vec<i64>)> = BTreeMap::new();
            for &x in hs.elements() {
                if let Ok(v) = data.upsilon_tilde(x, p) {
                    // every represented lift factors through the table on (H/U)^ab
                    ensure!(
                        v.value == t.map.apply(source.image(x)),
                        "{name}: Υ̃({x}) disagrees with Υ at {}",
                        sp.label(p)
                    );
                    tilde.insert(x, (v.multiplicity, v.value));
                    lifts += 1;
                }
            }
            for (&a, (ma, va)) in &tilde {
                for (&b, (mb, vb)) in &tilde {
                    if ma + mb >= horizon {
                        continue;
                    }
                    if let Some((_, vab)) = tilde.get(&g.mul(a, b)) {
                        ensure!(*vab == target.add(va, vb), "{name}: Υ̃({a}·{b}) is not additive at {}", sp.label(p));
                    }
                }
            }
        }
        scenarios += 1;
    }
    ensure!(scenarios > 0, "no bundled scenario passes FND validation");
    Ok(format!("{scenarios} scenarios, {lifts} Frobenius lifts"))
}

fn datum_horizon(d: &RamificationDatum, h: &Subgroup) -> i64 {
    d.modulus() / d.f(h)
}

struct Subject {
    name: String,
    data: ReciprocityData,
    theta: RepMorphism,
}

fn reduction_consistency() -> Verdict {
    let mut subjects = Vec::new();
    for (name, spec) in bundled() {
        let data = prepare(&spec).at(&name)?.data;
        let force = !data.validate_fnd().passed();
        let theta = data.upsilon_morphism(force).at(&name)?.morphism;
        subjects.push(Subject { name, data, theta });
    }
    let judge = |sub: &Subject, theta: &RepMorphism, label: &str| -> Result<bool, String> {
        let mut caught = false;
        for mode in [ReductionMode::Prime, ReductionMode::PrimePower] {
            let out = reduced_verification(&sub.data.tautological, theta, mode, Some(sub.data.functor()));
            ensure!(
                !(out.hypotheses && out.reduced && !out.full),
                "{} {label} ({mode:?}): reduced check passes but the full check fails on hypothesis-satisfying data",
                sub.name
            );
            caught |= !out.hypotheses || !out.full;
        }
        Ok(caught)
    };
    for sub in &subjects {
        judge(sub, &sub.theta, "unmutated")?;
    }

    let mut rng = sample_rng(9);
    let mut mutations = 0;
    let candidates: Vec<(usize, usize)> = subjects
        .iter()
        .enumerate()
        .flat_map(|(i, sub)| {
            let sp = sub.theta.source.spectrum().clone();
            sp.ids()
                .filter(|&p| sp.pair(p).0 != sp.pair(p).1 && !sub.theta.source.value(p).is_trivial())
                .map(move |p| (i, p))
                .collect::<Vec<_>>()
        })
        .collect();
    while mutations < 100 {
        let &(i, p) = candidates.choose(&mut rng).expect("nontrivial pairs");
        let sub = &subjects[i];
        let original = &sub.theta.components[p];
        let order = sub.theta.source.value(p).order().finite().expect("finite source");
        let primes: Vec<u64> = (2..=order).filter(|q| order % q == 0 && (2..*q).all(|r| q % r != 0)).collect();
        let (kind, mutated) = if rng.gen_bool(0.5) {
            ("zero".to_string(), AbHom::zero(original.domain(), original.codomain()))
        } else {
            let k = *primes.choose(&mut rng).unwrap() as i64 * rng.gen_range(1..=3);
            (format!("×{k}"), original.scaled(k))
        };
        if mutated == *original {
            continue;
        }
        let mut comps = sub.theta.components.clone();
        comps[p] = mutated;
        let theta = RepMorphism::new(sub.theta.source.clone(), sub.theta.target.clone(), comps).at(&sub.name)?;
        let label = format!("mutation {mutations} ({kind} at {})", sub.theta.source.spectrum().label(p));
        ensure!(judge(sub, &theta, &label)?, "{} {label}: not caught", sub.name);
        mutations += 1;
    }
    Ok(format!("{} fixtures, {mutations} mutations caught", subjects.len()))
}

// ---------------------------------------------------------------- 10

fn lattice_properties() -> Verdict {
    let mut checked = 0;
    for g in catalog::all().into_iter().filter(|g| g.order() <= 12) {
        let gname = name_of(&g);
        let g = Arc::new(g);
        let s = full_system(&g);
        let sp = Arc::new(Spectrum::normal(s.clone()));
        let r = AbelianizationSystem::commutators(s.clone());
        let taut = tautological_cft(sp, &r).at(&gname)?;
        let rep = lattice_property_check(&NormAssignment::tautological(&taut), &r);
        ensure!(rep.passed(), "{gname} tautological: {}", first_failure(&rep));
        checked += 1;
    }
    for n in 1..=16 {
        let g = Arc::new(catalog::cyclic(n));
        let s = full_system(&g);
        let sp = Arc::new(Spectrum::normal(s.clone()));
        let c = fixed_point_functor(&GModule::trivial(g, FgAbGroup::integers()), s.clone()).at(n)?.functor;
        let phi = NormAssignment::induction(&c, sp.clone()).at(n)?;
        let rep = lattice_property_check(&phi, &AbelianizationSystem::commutators(s.clone()));
        ensure!(rep.passed(), "C{n} Ĥ⁰ of ℤ: {}", first_failure(&rep));
        let idx = norm_index_report(&phi);
        ensure!(idx.passed(), "C{n} Ĥ⁰ of ℤ: {}", first_failure(&idx));
        // the norm group of (H, U) in ℤ is [H:U]ℤ
        for p in sp.ids() {
            let (h, u) = sp.pair(p);
            let index = (s.subgroup(h).order() / s.subgroup(u).order()) as i64;
            let generated = phi.generators[p].iter().fold(0, |acc, v| gcd(acc, v[0]));
            ensure!(generated == index, "C{n}: Φ({}) = {generated}ℤ, expected {index}ℤ", sp.label(p));
        }
        checked += 1;
    }
    Ok(format!("{checked} lattices"))
}

// ---------------------------------------------------------------- 11

fn hrv_roundtrips() -> Verdict {
    const SAMPLES: usize = 1000;
    let mut skipped = 0;
    for p in [2, 3] {
        for n in 1..=3 {
            let at = format!("F{p} rank {n}");
            let field = LaurentField::symmetric(p, n, 4).at(&at)?;
            let mut rng = sample_rng(1100 + 10 * p + n as u64);
            let rt = stack_roundtrip(&field, None, SAMPLES, &mut rng).at(&at)?;
            ensure!(rt.samples == SAMPLES, "{at}: only {} roundtrip samples", rt.samples);
            ensure!(rt.report.passed(), "{at}: {}", first_failure(&rt.report));
            let ax = valuation_axiom_sampler(&RankNValuation::standard(n), &field, SAMPLES, &mut rng);
            ensure!(ax.pairs == SAMPLES, "{at}: only {} sampled pairs", ax.pairs);
            ensure!(ax.report.passed(), "{at}: {}", first_failure(&ax.report));
            skipped += ax.skipped;
            for i in 0..n {
                let t = LaurentElement::variable(&field, i).at(&at)?;
                ensure!(rank_n_valuation(&t).at(&at)? == RloVec::unit(n, i), "{at}: v(T{}) ≠ e{}", i + 1, i + 1);
            }
        }
    }
    Ok(format!("6 fields × {SAMPLES} samples, {skipped} inexact or zero-sum pairs left out of the ultrametric law"))
}

// ---------------------------------------------------------------- 12

fn determinism() -> Verdict {
    let mut compared = 0;
    for (name, spec) in bundled() {
        let json = |certify| -> Result<String, String> {
            let r = run_scenario(&spec, certify).at(&name)?;
            serde_json::to_string(&r).at(&name)
        };
        for certify in [false, true] {
            ensure!(json(certify)? == json(certify)?, "{name}: two runs differ");
            compared += 1;
        }
    }
    let field = LaurentField::symmetric(3, 2, 4).at("field")?;
    let run = || -> Result<String, String> {
        let mut rng = sample_rng(12);
        let rt = stack_roundtrip(&field, None, 200, &mut rng).at("roundtrip")?;
        let ax = valuation_axiom_sampler(&RankNValuation::standard(2), &field, 200, &mut rng);
        serde_json::to_string(&(&rt.report.checks, &ax.report.checks, ax.pairs, ax.skipped)).at("serialize")
    };
    ensure!(run()? == run()?, "seeded HRV runs differ");
    Ok(format!("{compared} scenario reports and one seeded sampler run byte-identical"))
}

// ----------------------------------------------------------------

struct Criterion {
    id: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn() -> Verdict,
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion { id: 1, title: "transfer correctness", budget: Some(secs(60)), run: transfer_correctness },
        Criterion { id: 2, title: "Mackey/cohomological suite", budget: Some(secs(120)), run: mackey_suite },
        Criterion { id: 3, title: "adjunction and descent", budget: None, run: adjunction_descent },
        Criterion { id: 4, title: "ramification laws", budget: None, run: ramification_laws },
        Criterion { id: 5, title: "Frobenius-group law", budget: None, run: frobenius_law },
        Criterion { id: 6, title: "Tate oracle equivalence", budget: None, run: tate_oracle },
        Criterion { id: 7, title: "unramified reciprocity", budget: Some(secs(10)), run: unramified_reciprocity },
        Criterion { id: 8, title: "full reciprocity map", budget: None, run: full_upsilon },
        Criterion { id: 9, title: "reduction consistency", budget: None, run: reduction_consistency },
        Criterion { id: 10, title: "lattice properties", budget: None, run: lattice_properties },
        Criterion { id: 11, title: "HRV roundtrips", budget: Some(secs(30)), run: hrv_roundtrips },
        Criterion { id: 12, title: "determinism", budget: None, run: determinism },
    ];
    let only: Option<u32> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|v| v.parse().ok());
    let mut failed = 0;
    for c in criteria.iter().filter(|c| only.is_none_or(|k| k == c.id)) {
        let start = Instant::now();
        let verdict = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match (verdict, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => {
                Err(format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), b.as_secs()))
            }
            (v, _) => v,
        };
        let (tag, detail) = match &verdict {
            Ok(d) => ("PASS", d),
            Err(w) => ("FAIL", w),
        };
        if verdict.is_err() {
            failed += 1;
        }
        println!("{tag} criterion {:>2} {:<28} {:>7.2}s  {detail}", c.id, c.title, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
