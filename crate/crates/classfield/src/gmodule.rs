//! Finitely generated abelian groups with a left action of a finite group.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::abelian::{AbHom, Biproduct, FgAbGroup, SubgroupEmbedding};
use crate::group::{left_transversal, Elem, FiniteGroup, Subgroup};
use crate::mackey::MackeyError;
use crate::matrix::IntMatrix;

#[derive(Debug, Clone)]
pub struct GModule {
    group: Arc<FiniteGroup>,
    underlying: FgAbGroup,
    action: Vec<AbHom>,
}

/// JSON form: generator elements and the automorphisms they act by.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GModuleSpec {
    pub underlying: FgAbGroup,
    pub generators: Vec<Elem>,
    pub matrices: Vec<IntMatrix>,
}

impl GModule {
    /// Extends the action of `generators` to all of `G`, checking it respects every product.
    pub fn new(
        group: Arc<FiniteGroup>,
        underlying: FgAbGroup,
        generators: &[Elem],
        images: &[AbHom],
    ) -> Result<GModule, MackeyError> {
        if generators.len() != images.len() {
            return Err(MackeyError::InvalidModule("one matrix per generator is required".into()));
        }
        for (s, m) in generators.iter().zip(images) {
            if *s >= group.order() {
                return Err(MackeyError::InvalidModule(format!("generator {s} is not a group element")));
            }
            if m.domain() != &underlying || m.codomain() != &underlying || !m.is_isomorphism() {
                return Err(MackeyError::InvalidModule(format!("generator {s} does not act by an automorphism")));
            }
        }
        let mut action: Vec<Option<AbHom>> = vec![None; group.order()];
        action[0] = Some(AbHom::identity(&underlying));
        let mut queue = vec![0];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            for (&s, m) in generators.iter().zip(images) {
                let y = group.mul(x, s);
                if action[y].is_none() {
                    action[y] = Some(action[x].as_ref().unwrap().compose(m).unwrap());
                    queue.push(y);
                }
            }
            i += 1;
        }
        if queue.len() != group.order() {
            return Err(MackeyError::InvalidModule("generators do not generate the group".into()));
        }
        let action: Vec<AbHom> = action.into_iter().map(Option::unwrap).collect();
        for x in group.elements() {
            for (&s, m) in generators.iter().zip(images) {
                if action[group.mul(x, s)] != action[x].compose(m).unwrap() {
                    return Err(MackeyError::InvalidModule(format!("action violates the relation at ({x}, {s})")));
                }
            }
        }
        Ok(GModule { group, underlying, action })
    }

    pub fn from_spec(group: Arc<FiniteGroup>, spec: &GModuleSpec) -> Result<GModule, MackeyError> {
        let images = spec
            .matrices
            .iter()
            .map(|m| AbHom::new(spec.underlying.clone(), spec.underlying.clone(), m.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        GModule::new(group, spec.underlying.clone(), &spec.generators, &images)
    }

    pub fn to_spec(&self) -> GModuleSpec {
        let generators = self.group.generating_set(&self.group.whole());
        GModuleSpec {
            underlying: self.underlying.clone(),
            matrices: generators.iter().map(|&s| self.action[s].matrix().clone()).collect(),
            generators,
        }
    }

    pub fn trivial(group: Arc<FiniteGroup>, underlying: FgAbGroup) -> GModule {
        let id = AbHom::identity(&underlying);
        GModule { action: vec![id; group.order()], group, underlying }
    }

    /// `ℤ` (or `ℤ/modulus`) with `g` acting by `-1` exactly when `g ∉ kernel`; `kernel` must have index 2.
    pub fn sign(group: Arc<FiniteGroup>, kernel: &Subgroup, modulus: i64) -> Result<GModule, MackeyError> {
        if kernel.order() * 2 != group.order() {
            return Err(MackeyError::InvalidModule("sign kernel must have index 2".into()));
        }
        let a = if modulus == 0 { FgAbGroup::integers() } else { FgAbGroup::cyclic(modulus) };
        let action = group.elements().map(|x| AbHom::scalar(&a, if kernel.contains(x) { 1 } else { -1 })).collect();
        Ok(GModule { group, underlying: a, action })
    }

    /// Permutation module on the left cosets `G/H` over `ℤ` (`modulus = 0`) or `ℤ/modulus`.
    pub fn permutation(group: Arc<FiniteGroup>, h: &Subgroup, modulus: i64) -> GModule {
        let t = left_transversal(&group, h);
        let k = t.len();
        let underlying = if modulus == 0 {
            FgAbGroup::new(k, vec![]).unwrap()
        } else if modulus == 1 {
            FgAbGroup::trivial()
        } else {
            FgAbGroup::new(0, vec![modulus; k]).unwrap()
        };
        let action = group
            .elements()
            .map(|x| {
                if underlying.is_trivial() {
                    return AbHom::identity(&underlying);
                }
                let sigma = t.permutation(&group, x);
                let mut m = IntMatrix::zeros(k, k);
                for (i, &j) in sigma.iter().enumerate() {
                    m[(j, i)] = 1;
                }
                AbHom::new(underlying.clone(), underlying.clone(), m).unwrap()
            })
            .collect();
        GModule { group, underlying, action }
    }

    pub fn direct_sum(&self, other: &GModule) -> GModule {
        let b = Biproduct::new(&self.underlying, &other.underlying);
        let action = self.action.iter().zip(&other.action).map(|(f, g)| Biproduct::block(&b, &b, f, g)).collect();
        GModule { group: self.group.clone(), underlying: b.group, action }
    }

    /// A random module: a direct sum of one or two permutation, sign or trivial pieces.
    pub fn random<R: Rng>(group: Arc<FiniteGroup>, rng: &mut R) -> GModule {
        let pieces = rng.gen_range(1..=2);
        let mut out: Option<GModule> = None;
        for _ in 0..pieces {
            let piece = random_piece(&group, rng);
            out = Some(match out {
                None => piece,
                Some(m) => m.direct_sum(&piece),
            });
        }
        out.unwrap()
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn underlying(&self) -> &FgAbGroup {
        &self.underlying
    }

    pub fn act(&self, g: Elem) -> &AbHom {
        &self.action[g]
    }

    pub fn apply(&self, g: Elem, a: &[i64]) -> Vec<i64> {
        self.action[g].apply(a)
    }

    /// `A^H` with its embedding into `A`.
    pub fn fixed_points(&self, h: &Subgroup) -> SubgroupEmbedding {
        let maps: Vec<AbHom> = self.group.generating_set(h).iter().map(|&s| self.action[s].clone()).collect();
        common_fixed(&self.underlying, &maps)
    }

    /// `Σ_{t ∈ H/I} t·a` over left coset representatives of `I` in `H`.
    pub fn norm(&self, h: &Subgroup, i: &Subgroup, a: &[i64]) -> Vec<i64> {
        let t = crate::group::transversal_in(&self.group, h, i, crate::group::Side::Left);
        t.reps().iter().fold(self.underlying.zero(), |acc, &r| self.underlying.add(&acc, &self.apply(r, a)))
    }
}

fn random_piece<R: Rng>(group: &Arc<FiniteGroup>, rng: &mut R) -> GModule {
    let subs: Vec<Subgroup> = group.all_subgroups().into_iter().filter(|h| group.order() / h.order() <= 6).collect();
    let modulus = *[0i64, 0, 2, 3, 4].choose(rng).unwrap();
    match rng.gen_range(0..4) {
        0 | 1 => {
            let h = subs.choose(rng).unwrap();
            GModule::permutation(group.clone(), h, modulus)
        }
        2 => {
            let index_two: Vec<&Subgroup> = subs.iter().filter(|h| h.order() * 2 == group.order()).collect();
            match index_two.choose(rng) {
                Some(k) => GModule::sign(group.clone(), k, modulus).unwrap(),
                None => GModule::trivial(group.clone(), FgAbGroup::integers()),
            }
        }
        _ => {
            let a = match modulus {
                0 => FgAbGroup::integers(),
                n => FgAbGroup::cyclic(n),
            };
            GModule::trivial(group.clone(), a)
        }
    }
}

/// Elements of `A` fixed by every map in `maps`.
pub fn common_fixed(a: &FgAbGroup, maps: &[AbHom]) -> SubgroupEmbedding {
    let mut emb = AbHom::identity(a);
    let mut sub = a.clone();
    for m in maps {
        let delta = m.sub(&AbHom::identity(a)).compose(&emb).unwrap();
        let k = delta.kernel();
        emb = emb.compose(&k.embedding).unwrap();
        sub = k.group;
    }
    SubgroupEmbedding { group: sub, embedding: emb }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn negation_module_fixed_points() {
        let g = Arc::new(catalog::cyclic(2));
        let m = GModule::sign(g.clone(), &g.trivial_subgroup(), 0).unwrap();
        assert!(m.fixed_points(&g.whole()).group.is_trivial());
        assert_eq!(m.fixed_points(&g.trivial_subgroup()).group, FgAbGroup::integers());
    }

    #[test]
    fn permutation_module_is_valid() {
        let g = Arc::new(catalog::symmetric4());
        let h = g.cyclic_subgroup(1);
        let m = GModule::permutation(g.clone(), &h, 0);
        let spec = m.to_spec();
        let back = GModule::from_spec(g.clone(), &spec).unwrap();
        for x in g.elements() {
            assert_eq!(back.act(x), m.act(x));
        }
        // fixed points of the whole group on a transitive permutation module are Z
        assert_eq!(m.fixed_points(&g.whole()).group, FgAbGroup::integers());
    }

    #[test]
    fn bad_action_is_rejected() {
        let g = Arc::new(catalog::cyclic(3));
        let z = FgAbGroup::integers();
        let neg = AbHom::scalar(&z, -1);
        // -1 has order 2, incompatible with an element of order 3
        assert!(GModule::new(g, z, &[1], &[neg]).is_err());
    }

    #[test]
    fn random_modules_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for name in ["S3", "D4", "Q8", "C2xC2"] {
            let g = Arc::new(catalog::by_name(name).unwrap());
            for _ in 0..4 {
                let m = GModule::random(g.clone(), &mut rng);
                let spec = m.to_spec();
                assert!(GModule::from_spec(g.clone(), &spec).is_ok(), "{name}");
            }
        }
    }
}
