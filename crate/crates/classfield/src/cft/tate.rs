//! `Ĥ⁰` and `Ĥ⁻¹` of a stable functor at a normal pair, the class field axiom and Hilbert 90.

use super::CftError;
use crate::abelian::{AbHom, Order, QuotientMap, SubgroupEmbedding};
use crate::group::Elem;
use crate::mackey::RicFunctor;
use crate::system::SubId;

/// `ker(ind_{H,U}) / I_{(H,U)}` with both witnesses.
#[derive(Debug, Clone)]
pub struct TateMinusOne {
    /// `ker(ind_{H,U}) ≤ C(U)`.
    pub kernel: SubgroupEmbedding,
    /// Quotient of the kernel by the augmentation image.
    pub quotient: QuotientMap,
}

fn require_normal_pair(c: &RicFunctor, h: SubId, u: SubId) -> Result<(), CftError> {
    let s = c.system();
    if !s.in_ind(h, u) || !s.group().is_normal_in(s.subgroup(u), s.subgroup(h)) {
        return Err(CftError::Structure(format!(
            "U={} is not a normal induction subgroup of H={}",
            s.label(u),
            s.label(h)
        )));
    }
    Ok(())
}

/// `C(H)/ind_{H,U} C(U)`.
pub fn tate_h0(c: &RicFunctor, h: SubId, u: SubId) -> Result<QuotientMap, CftError> {
    require_normal_pair(c, h, u)?;
    Ok(c.ind(h, u).cokernel())
}

/// Elements of `H` whose `con - 1` generate `I_{(H,U)}`: one generator of `H/U` when it is
/// cyclic, a generating set of `H` otherwise.
fn augmentation_elements(c: &RicFunctor, h: SubId, u: SubId) -> Vec<Elem> {
    let s = c.system();
    let g = s.group();
    let (hs, us) = (s.subgroup(h), s.subgroup(u));
    let index = s.index(h, u);
    let in_u = |x: Elem| us.contains(x);
    let cyclic = hs.elements().iter().copied().find(|&x| {
        let mut y = x;
        for k in 1..=index {
            if in_u(y) {
                return k == index;
            }
            y = g.mul(y, x);
        }
        false
    });
    match cyclic {
        Some(x) => vec![x],
        None => g.generating_set(hs),
    }
}

pub fn tate_hminus1(c: &RicFunctor, h: SubId, u: SubId) -> Result<TateMinusOne, CftError> {
    require_normal_pair(c, h, u)?;
    let cu = c.value(u);
    let kernel = c.ind(h, u).kernel();
    let id = AbHom::identity(cu);
    let mut gens = Vec::new();
    for x in augmentation_elements(c, h, u) {
        let delta = c.con(x, u).sub(&id);
        for j in 0..cu.ngens() {
            let y = delta.apply(&cu.generator(j));
            let pulled = kernel.pull(&y).ok_or_else(|| {
                CftError::Mackey(crate::mackey::MackeyError::NotStable(format!(
                    "(con_{x} - 1) leaves ker(ind) at H={}",
                    c.system().label(h)
                )))
            })?;
            gens.push(pulled);
        }
    }
    let quotient = kernel.group.quotient(&gens);
    Ok(TateMinusOne { kernel, quotient })
}

/// `|Ĥ⁰| = [H:U]` and `Ĥ⁻¹ = 1`.
pub fn check_class_field_axiom(c: &RicFunctor, h: SubId, u: SubId) -> Result<bool, CftError> {
    let index = c.system().index(h, u) as u64;
    let h0 = tate_h0(c, h, u)?;
    Ok(h0.group.order() == Order::Finite(index) && check_hilbert90(c, h, u)?)
}

/// `Ĥ⁻¹ = 1`.
pub fn check_hilbert90(c: &RicFunctor, h: SubId, u: SubId) -> Result<bool, CftError> {
    Ok(tate_hminus1(c, h, u)?.quotient.group.is_trivial())
}
