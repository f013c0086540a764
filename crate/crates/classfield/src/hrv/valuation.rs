//! Rank-`n` valuations: the standard one, projections, pushforward along the outer order and
//! pullback through a uniformizer.

use super::laurent::{LaurentElement, LaurentField};
use super::rlo::RloVec;
use super::HrvError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RankNValuation {
    /// The RLO-minimal exponent on `F_p((T₁))…((T_n))`.
    Standard { rank: usize },
    /// `v^{(r)}`: the last `r` components of `base`.
    Projected { base: Box<RankNValuation>, r: usize },
    /// `ṽ(x̄) = v(x)` minus its outer coordinate, for a unit lift `x` into `ambient`.
    Pushforward { base: Box<RankNValuation>, ambient: LaurentField },
    /// `(v∘w)_t(x) = (v(q(x·t^{-w(x)})), w(x))` with `w` the outer order.
    Pullback { base: Box<RankNValuation>, uniformizer: LaurentElement },
}

/// `(v¹, …, vⁿ)` of the standard valuation.
pub fn rank_n_valuation(x: &LaurentElement) -> Result<RloVec, HrvError> {
    x.leading().map(|(e, _)| e.clone()).ok_or(HrvError::ZeroValuation)
}

/// `v^{(r)}`.
pub fn project_valuation(v: &RloVec, r: usize) -> Result<RloVec, HrvError> {
    if r > v.len() {
        return Err(HrvError::RankMismatch { expected: v.len(), found: r });
    }
    Ok(v.project(r))
}

impl RankNValuation {
    pub fn standard(rank: usize) -> Self {
        RankNValuation::Standard { rank }
    }

    pub fn projected(self, r: usize) -> Result<Self, HrvError> {
        if r > self.rank() {
            return Err(HrvError::RankMismatch { expected: self.rank(), found: r });
        }
        Ok(RankNValuation::Projected { base: Box::new(self), r })
    }

    /// Pushforward along the outer order of `ambient`; `self` must live on `ambient`.
    pub fn pushforward(self, ambient: &LaurentField) -> Result<Self, HrvError> {
        if self.domain_rank() != ambient.rank || ambient.rank == 0 {
            return Err(HrvError::RankMismatch { expected: self.domain_rank(), found: ambient.rank });
        }
        if self.rank() == 0 {
            return Err(HrvError::NotFiner("a rank-0 valuation is coarser than the outer order".into()));
        }
        Ok(RankNValuation::Pushforward { base: Box::new(self), ambient: ambient.clone() })
    }

    /// Pullback to the field whose residue field carries `self`, through `t` with `w(t) = 1`.
    pub fn pullback(self, t: &LaurentElement) -> Result<Self, HrvError> {
        if t.field().rank != self.domain_rank() + 1 {
            return Err(HrvError::RankMismatch { expected: self.domain_rank() + 1, found: t.field().rank });
        }
        if t.outer_order() != Some(1) {
            return Err(HrvError::NotUniformizer);
        }
        Ok(RankNValuation::Pullback { base: Box::new(self), uniformizer: t.clone() })
    }

    /// Iterated pullbacks from the trivial valuation of `F_p`, with `uniformizers[i]` in the
    /// field of the first `i + 1` variables.
    pub fn stack(uniformizers: &[LaurentElement]) -> Result<Self, HrvError> {
        uniformizers.iter().try_fold(RankNValuation::standard(0), |v, t| v.pullback(t))
    }

    /// Rank of the value group.
    pub fn rank(&self) -> usize {
        match self {
            RankNValuation::Standard { rank } => *rank,
            RankNValuation::Projected { r, .. } => *r,
            RankNValuation::Pushforward { base, .. } => base.rank() - 1,
            RankNValuation::Pullback { base, .. } => base.rank() + 1,
        }
    }

    /// Number of variables of the field the valuation lives on.
    pub fn domain_rank(&self) -> usize {
        match self {
            RankNValuation::Standard { rank } => *rank,
            RankNValuation::Projected { base, .. } => base.domain_rank(),
            RankNValuation::Pushforward { ambient, .. } => ambient.rank - 1,
            RankNValuation::Pullback { base, .. } => base.domain_rank() + 1,
        }
    }

    pub fn value(&self, x: &LaurentElement) -> Result<RloVec, HrvError> {
        if x.field().rank != self.domain_rank() {
            return Err(HrvError::RankMismatch { expected: self.domain_rank(), found: x.field().rank });
        }
        if x.is_zero() {
            return Err(HrvError::ZeroValuation);
        }
        match self {
            RankNValuation::Standard { .. } => rank_n_valuation(x),
            RankNValuation::Projected { base, r } => project_valuation(&base.value(x)?, *r),
            RankNValuation::Pushforward { ambient, .. } => self.pushforward_at(&LaurentElement::lift(x, ambient)?),
            RankNValuation::Pullback { base, uniformizer } => {
                let w = x.outer_order().ok_or(HrvError::ZeroValuation)?;
                let unit = x.mul(&uniformizer.pow(-w)?)?;
                let q = unit.residue()?;
                Ok(base.value(&q)?.extend_outer(w))
            }
        }
    }

    /// Pushforward evaluated on any unit representative `x` of the ambient field.
    pub fn pushforward_at(&self, x: &LaurentElement) -> Result<RloVec, HrvError> {
        let RankNValuation::Pushforward { base, ambient } = self else {
            return Err(HrvError::NotFiner("not a pushforward".into()));
        };
        if x.field() != ambient {
            return Err(HrvError::FieldMismatch);
        }
        if x.outer_order() != Some(0) {
            return Err(HrvError::NotUnit);
        }
        let v = base.value(x)?;
        if v.last() != Some(0) {
            return Err(HrvError::NotFiner(format!("v = {v} on an outer unit")));
        }
        Ok(v.inner())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u64, n: usize) -> LaurentField {
        LaurentField::symmetric(p, n, 4).unwrap()
    }

    fn t(f: &LaurentField, i: usize) -> LaurentElement {
        LaurentElement::variable(f, i).unwrap()
    }

    #[test]
    fn standard_values() {
        let f = k(2, 2);
        let x = t(&f, 0).add(&t(&f, 1)).unwrap();
        assert_eq!(rank_n_valuation(&x).unwrap(), RloVec(vec![1, 0]));
        assert_eq!(rank_n_valuation(&t(&f, 1)).unwrap(), RloVec(vec![0, 1]));
        let unit = LaurentElement::one(&f).unwrap().add(&t(&f, 0)).unwrap();
        assert_eq!(rank_n_valuation(&unit).unwrap(), RloVec(vec![0, 0]));
        assert_eq!(rank_n_valuation(&LaurentElement::zero(&f)), Err(HrvError::ZeroValuation));
        assert_eq!(project_valuation(&RloVec(vec![1, 0]), 1).unwrap(), RloVec(vec![0]));
    }

    #[test]
    fn pullback_of_inner_order() {
        let f = k(2, 2);
        let v = RankNValuation::standard(1).pullback(&t(&f, 1)).unwrap();
        let x = t(&f, 0).add(&t(&f, 1)).unwrap();
        assert_eq!(v.value(&x).unwrap(), RloVec(vec![1, 0]));
        assert_eq!(v.value(&t(&f, 1)).unwrap(), RloVec(vec![0, 1]));
        let squared = t(&f, 1).mul(&t(&f, 1)).unwrap();
        assert_eq!(RankNValuation::standard(1).pullback(&squared), Err(HrvError::NotUniformizer));
    }

    #[test]
    fn rank_one_stack_is_the_order() {
        let f = k(3, 1);
        let v = RankNValuation::stack(&[t(&f, 0)]).unwrap();
        for e in -4..=4 {
            let x = LaurentElement::monomial(&f, RloVec(vec![e]), 2).unwrap();
            assert_eq!(v.value(&x).unwrap(), RloVec(vec![e]));
        }
    }

    #[test]
    fn pushforward_of_t1_class() {
        let f = k(2, 2);
        let v = RankNValuation::standard(2).pushforward(&f).unwrap();
        let rf = f.residue_field().unwrap();
        assert_eq!(v.value(&t(&rf, 0)).unwrap(), RloVec(vec![1]));
        assert_eq!(v.value(&LaurentElement::one(&rf).unwrap()).unwrap(), RloVec(vec![0]));
        assert_eq!(v.pushforward_at(&t(&f, 1)), Err(HrvError::NotUnit));
    }

    #[test]
    fn wrong_uniformizer_shifts_values() {
        let f = k(2, 2);
        let bad = t(&f, 0).mul(&t(&f, 1)).unwrap();
        let v = RankNValuation::standard(1).pullback(&bad).unwrap();
        assert_eq!(v.value(&t(&f, 1)).unwrap(), RloVec(vec![-1, 1]));
    }
}
