//! Seeded checks of the valuation axioms and of pushforward/pullback inversion.

use rand::Rng;

use super::laurent::{LaurentElement, LaurentField};
use super::rlo::RloVec;
use super::valuation::RankNValuation;
use super::HrvError;
use crate::report::Report;

#[derive(Debug, Clone)]
pub struct SamplerOutcome {
    pub report: Report,
    pub pairs: usize,
    /// Pairs left out of the ultrametric check: zero sums or truncated inputs.
    pub skipped: usize,
}

fn first<T>(slot: &mut Option<String>, r: Result<T, HrvError>, what: impl FnOnce() -> String) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            slot.get_or_insert_with(|| format!("{}: {e}", what()));
            None
        }
    }
}

/// Multiplicativity, the ultrametric law with its equality case, and `v(x·x⁻¹) = 0`, on
/// `budget` random pairs of `field`.
pub fn valuation_axiom_sampler<R: Rng>(
    v: &RankNValuation,
    field: &LaurentField,
    budget: usize,
    rng: &mut R,
) -> SamplerOutcome {
    let (mut mult, mut ultra, mut strict, mut inverse) = (None, None, None, None);
    let mut skipped = 0;
    let zero = RloVec::zero(v.rank());
    for i in 0..budget {
        let x = LaurentElement::random(field, rng, 4);
        let y = LaurentElement::random(field, rng, 4);
        let witness = || format!("pair {i}: x={:?} y={:?}", x.to_spec().support, y.to_spec().support);
        let (Some(vx), Some(vy)) = (first(&mut mult, v.value(&x), witness), first(&mut mult, v.value(&y), witness))
        else {
            continue;
        };
        if let Some(vxy) = first(&mut mult, x.mul(&y).and_then(|p| v.value(&p)), witness) {
            if mult.is_none() && vxy != &vx + &vy {
                mult = Some(format!("{}: v(xy)={vxy} ≠ {vx}+{vy}", witness()));
            }
        }
        let s = x.add(&y).expect("same field");
        if s.is_zero() || !(x.is_exact() && y.is_exact()) {
            skipped += 1;
        } else if let Some(vs) = first(&mut ultra, v.value(&s), witness) {
            let m = vx.clone().min(vy.clone());
            if ultra.is_none() && vs < m {
                ultra = Some(format!("{}: v(x+y)={vs} < {m}", witness()));
            }
            if strict.is_none() && vx != vy && vs != m {
                strict = Some(format!("{}: v(x+y)={vs} ≠ min {m}", witness()));
            }
        }
        if let Some(one) = first(&mut inverse, x.inv().and_then(|xi| x.mul(&xi)), witness) {
            if let Some(val) = first(&mut inverse, v.value(&one), witness) {
                if inverse.is_none() && val != zero {
                    inverse = Some(format!("{}: v(x·x⁻¹)={val}", witness()));
                }
            }
        }
    }
    let mut report = Report::new();
    report.record("axioms.multiplicative", mult);
    report.record("axioms.ultrametric", ultra);
    report.record("axioms.strict_min", strict);
    report.record("axioms.inverse", inverse);
    SamplerOutcome { report, pairs: budget, skipped }
}

#[derive(Debug, Clone)]
pub struct RoundtripOutcome {
    pub report: Report,
    pub samples: usize,
}

/// Pushforward-then-pullback and pullback-then-pushforward against the standard valuation
/// of `field`, the full stack of pullbacks, representative independence and `v(T_i) = e_i`.
/// `uniformizer` replaces `T_n` in every pullback through the outer variable.
pub fn stack_roundtrip<R: Rng>(
    field: &LaurentField,
    uniformizer: Option<&LaurentElement>,
    samples: usize,
    rng: &mut R,
) -> Result<RoundtripOutcome, HrvError> {
    let n = field.rank;
    if n == 0 {
        return Err(HrvError::InvalidField("roundtrips need at least one variable".into()));
    }
    let tn = LaurentElement::variable(field, n - 1)?;
    let t = uniformizer.unwrap_or(&tn);
    if t.field() != field {
        return Err(HrvError::FieldMismatch);
    }
    let std = RankNValuation::standard(n);
    let residue = field.residue_field()?;
    let push_pull = std.clone().pushforward(field)?.pullback(t)?;
    let pull_push = RankNValuation::standard(n - 1).pullback(t)?.pushforward(field)?;
    let mut params = (0..n - 1)
        .map(|i| field.truncated(i + 1).and_then(|f| LaurentElement::variable(&f, i)))
        .collect::<Result<Vec<_>, _>>()?;
    params.push(t.clone());
    let stack = RankNValuation::stack(&params)?;
    let pushed = std.clone().pushforward(field)?;

    let (mut a, mut b, mut c, mut d) = (None, None, None, None);
    let mismatch = |slot: &mut Option<String>, i: usize, got: Result<RloVec, HrvError>, want: &RloVec| {
        if slot.is_none() {
            match got {
                Ok(g) if g == *want => {}
                Ok(g) => *slot = Some(format!("sample {i}: {g} ≠ {want}")),
                Err(e) => *slot = Some(format!("sample {i}: {e}")),
            }
        }
    };
    for i in 0..samples {
        let x = LaurentElement::random(field, rng, 4);
        let want = std.value(&x)?;
        mismatch(&mut a, i, push_pull.value(&x), &want);
        mismatch(&mut c, i, stack.value(&x), &want);
        let xb = LaurentElement::random(&residue, rng, 4);
        let want = RankNValuation::standard(n - 1).value(&xb)?;
        mismatch(&mut b, i, pull_push.value(&xb), &want);
        // x̄ and x̄·(1 + m) with w(m) ≥ 1 have the same pushforward
        let lift = LaurentElement::lift(&xb, field)?;
        let r = LaurentElement::random(field, rng, 3);
        let w = r.outer_order().unwrap_or(0);
        let m = r.shift(&RloVec::unit(n, n - 1).scale(1 - w));
        let other = lift.mul(&LaurentElement::one(field)?.add(&m)?)?;
        let want = pushed.pushforward_at(&lift)?;
        mismatch(&mut d, i, pushed.pushforward_at(&other), &want);
    }
    let units = (0..n).find_map(|i| {
        let ti = LaurentElement::variable(field, i).ok()?;
        let e = RloVec::unit(n, i);
        match stack.value(&ti) {
            Ok(v) if v == e => None,
            Ok(v) => Some(format!("v(T{}) = {v} ≠ {e}", i + 1)),
            Err(err) => Some(format!("v(T{}): {err}", i + 1)),
        }
    });
    let mut report = Report::new();
    report.record("roundtrip.pullback_of_pushforward", a);
    report.record("roundtrip.pushforward_of_pullback", b);
    report.record("roundtrip.stack", c);
    report.record("roundtrip.representatives", d);
    report.record("roundtrip.parameters", units);
    Ok(RoundtripOutcome { report, samples })
}
