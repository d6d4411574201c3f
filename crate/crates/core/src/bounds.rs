//! Inequality-chain reports: each chain is a list of steps whose values are
//! derived from earlier steps by recorded operations, so a report can be
//! replayed mechanically. All arithmetic on rational inputs stays exact;
//! floats appear only where a square root does.

use num::{Signed, ToPrimitive, Zero};

use crate::arith::MollifierSpec;
use crate::closed::{
    display_rational, exact_pseudo_moment, lambda2_even_moment, mean_square_closed, rat, rat_int,
    simplex_moment, FlipWindow, Rational, SimplexIntegrand,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum StepValue {
    Exact(Rational),
    Real(f64),
}

impl StepValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            StepValue::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            StepValue::Real(x) => *x,
        }
    }

    pub fn render(&self) -> String {
        match self {
            StepValue::Exact(q) => display_rational(q),
            StepValue::Real(x) => format!("{x}"),
        }
    }
}

/// How a step's value arises from earlier steps (indices into the chain).
#[derive(Debug, Clone, PartialEq)]
pub enum StepOp {
    /// an input constant (from a closed form elsewhere in the crate)
    Input,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Neg(usize),
    Square(usize),
    Sqrt(usize),
    /// value = scale * step
    Scale(Rational, usize),
    /// value = step + |other|
    AddAbs(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    AtLeast,
    Greater,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::AtLeast => ">=",
            Relation::Greater => ">",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundStep {
    pub label: String,
    pub relation: Relation,
    pub value: StepValue,
    pub op: StepOp,
    /// anchor text tying the step to its source display
    pub anchor: String,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub title: String,
    pub steps: Vec<BoundStep>,
    /// index of the step holding the final bound
    pub final_step: usize,
}

impl BoundReport {
    pub fn final_value(&self) -> &StepValue {
        &self.steps[self.final_step].value
    }

    /// Re-derive every step from its operands; exact equality for rationals,
    /// 1e-12 relative for reals. Returns the first inconsistent step.
    pub fn replay(&self) -> std::result::Result<(), usize> {
        for (i, step) in self.steps.iter().enumerate() {
            let get = |j: usize| -> &StepValue { &self.steps[j].value };
            let expect: Option<StepValue> = match &step.op {
                StepOp::Input => None,
                StepOp::Add(a, b) => Some(binary(get(*a), get(*b), |x, y| x + y, |x, y| x + y)),
                StepOp::Sub(a, b) => Some(binary(get(*a), get(*b), |x, y| x - y, |x, y| x - y)),
                StepOp::Mul(a, b) => Some(binary(get(*a), get(*b), |x, y| x * y, |x, y| x * y)),
                StepOp::Neg(a) => Some(match get(*a) {
                    StepValue::Exact(q) => StepValue::Exact(-q.clone()),
                    StepValue::Real(x) => StepValue::Real(-x),
                }),
                StepOp::Square(a) => Some(binary(get(*a), get(*a), |x, y| x * y, |x, y| x * y)),
                StepOp::Sqrt(a) => Some(StepValue::Real(get(*a).to_f64().sqrt())),
                StepOp::Scale(q, a) => Some(match get(*a) {
                    StepValue::Exact(v) => StepValue::Exact(q * v),
                    StepValue::Real(x) => StepValue::Real(q.to_f64().unwrap() * x),
                }),
                StepOp::AddAbs(a, b) => Some(match (get(*a), get(*b)) {
                    (StepValue::Exact(x), StepValue::Exact(y)) => {
                        StepValue::Exact(x + y.abs())
                    }
                    (x, y) => StepValue::Real(x.to_f64() + y.to_f64().abs()),
                }),
            };
            if let Some(e) = expect {
                let consistent = match (&e, &step.value) {
                    (StepValue::Exact(a), StepValue::Exact(b)) => a == b,
                    (a, b) => {
                        let (x, y) = (a.to_f64(), b.to_f64());
                        (x - y).abs() <= 1e-12 * x.abs().max(1.0)
                    }
                };
                if !consistent {
                    return Err(i);
                }
            }
        }
        Ok(())
    }
}

fn binary(
    a: &StepValue,
    b: &StepValue,
    fq: impl Fn(&Rational, &Rational) -> Rational,
    ff: impl Fn(f64, f64) -> f64,
) -> StepValue {
    match (a, b) {
        (StepValue::Exact(x), StepValue::Exact(y)) => StepValue::Exact(fq(x, y)),
        (x, y) => StepValue::Real(ff(x.to_f64(), y.to_f64())),
    }
}

struct ChainBuilder {
    steps: Vec<BoundStep>,
}

impl ChainBuilder {
    fn new() -> Self {
        ChainBuilder { steps: Vec::new() }
    }

    fn input(&mut self, label: &str, rel: Relation, q: Rational, anchor: &str) -> usize {
        self.push(label, rel, StepValue::Exact(q), StepOp::Input, anchor)
    }

    fn push(
        &mut self,
        label: &str,
        rel: Relation,
        value: StepValue,
        op: StepOp,
        anchor: &str,
    ) -> usize {
        self.steps.push(BoundStep {
            label: label.into(),
            relation: rel,
            value,
            op,
            anchor: anchor.into(),
        });
        self.steps.len() - 1
    }

    fn exact(&self, i: usize) -> Rational {
        match &self.steps[i].value {
            StepValue::Exact(q) => q.clone(),
            StepValue::Real(_) => unreachable!("exact step expected"),
        }
    }

    fn add(&mut self, label: &str, rel: Relation, a: usize, b: usize, anchor: &str) -> usize {
        let v = StepValue::Exact(self.exact(a) + self.exact(b));
        self.push(label, rel, v, StepOp::Add(a, b), anchor)
    }

    fn sub(&mut self, label: &str, rel: Relation, a: usize, b: usize, anchor: &str) -> usize {
        let v = StepValue::Exact(self.exact(a) - self.exact(b));
        self.push(label, rel, v, StepOp::Sub(a, b), anchor)
    }

    fn scale(&mut self, label: &str, rel: Relation, q: Rational, a: usize, anchor: &str) -> usize {
        let v = StepValue::Exact(&q * self.exact(a));
        self.push(label, rel, v, StepOp::Scale(q, a), anchor)
    }

    fn square(&mut self, label: &str, rel: Relation, a: usize, anchor: &str) -> usize {
        let x = self.exact(a);
        self.push(label, rel, StepValue::Exact(&x * &x), StepOp::Square(a), anchor)
    }

    fn sqrt(&mut self, label: &str, rel: Relation, a: usize, anchor: &str) -> usize {
        let v = StepValue::Real(self.exact(a).to_f64().unwrap().sqrt());
        self.push(label, rel, v, StepOp::Sqrt(a), anchor)
    }
}

/// Variance/second-moment chain for the supported mollifiers.
pub fn second_moment_chain(spec: MollifierSpec, alpha: &Rational) -> Result<BoundReport> {
    let mut c = ChainBuilder::new();
    match spec {
        MollifierSpec::Liouville => {
            let re_z2 = c.input(
                "Re-part of second pseudo-moment",
                Relation::Equal,
                exact_pseudo_moment(2, alpha),
                "second-moment closed form",
            );
            let re_half = c.scale(
                "half Re-part (Z^2/4 + conj/4)",
                Relation::Equal,
                rat(1, 2),
                re_z2,
                "split of C^2 into Z^2/4 + conj/4 + |Z|^2/2",
            );
            let zsq = c.input(
                "|Z|^2 lower bound",
                Relation::AtLeast,
                mean_square_closed(alpha, 1, 0)?,
                "mean-square closed form (head sum)",
            );
            let zsq_half = c.scale("half |Z|^2 bound", Relation::AtLeast, rat(1, 2), zsq, "");
            let c2 = c.add(
                "C^2 lower bound",
                Relation::AtLeast,
                re_half,
                zsq_half,
                "C^2 = Re(Z^2)/2 + |Z|^2/2",
            );
            let im2 = c.sub(
                "Im^2 lower bound",
                Relation::AtLeast,
                c2,
                re_z2,
                "Im^2 = C^2 - Re(Z^2)",
            );
            let sup = c.sqrt("sup |C| lower bound", Relation::AtLeast, c2, "sqrt of C^2 bound");
            let _ = (im2, sup);
            Ok(BoundReport {
                title: format!("second-moment chain: liouville, alpha = {alpha}"),
                final_step: c2,
                steps: c.steps,
            })
        }
        MollifierSpec::LiouvilleDivisor { r: 2 } => {
            if alpha != &rat_int(1) {
                return Err(Error::UnsupportedSpec(
                    "divisor-weighted chain is built at alpha = 1".into(),
                ));
            }
            let m1 = simplex_value(1)?;
            let m2 = simplex_value(2)?;
            let m1_step = c.input(
                "first moment",
                Relation::Equal,
                m1,
                "divisor-weighted first moment 2/3",
            );
            let c2 = c.square(
                "C^2 lower bound (variance route)",
                Relation::AtLeast,
                m1_step,
                "variance >= mean square",
            );
            let re_z2 = c.input(
                "Re-part of second pseudo-moment",
                Relation::Equal,
                m2,
                "divisor-weighted second moment 41/105",
            );
            let im2 = c.sub(
                "Im^2 lower bound",
                Relation::AtLeast,
                c2,
                re_z2,
                "Im^2 = C^2 - Re(Z^2)",
            );
            let zsq = c.add(
                "|Z|^2 lower bound",
                Relation::Greater,
                c2,
                im2,
                "|Z|^2 = C^2 + Im^2",
            );
            Ok(BoundReport {
                title: "second-moment chain: lambda * d_2, alpha = 1".into(),
                final_step: zsq,
                steps: c.steps,
            })
        }
        MollifierSpec::LiouvilleK(2) => {
            let z2 = c.input(
                "second pseudo-moment (sign-flipped)",
                Relation::Equal,
                lambda2_even_moment(1, alpha),
                "even-moment sign flip",
            );
            let re_half = c.scale(
                "half Re-part",
                Relation::Equal,
                rat(1, 2),
                z2,
                "Z^2/4 + conj/4",
            );
            let zsq = c.input(
                "|Z|^2 lower bound",
                Relation::AtLeast,
                mean_square_closed(alpha, 1, 0)?,
                "mean-square closed form (head sum carries over: signs square away)",
            );
            let zsq_half = c.scale("half |Z|^2 bound", Relation::AtLeast, rat(1, 2), zsq, "");
            let im2 = c.sub(
                "Im^2 lower bound",
                Relation::AtLeast,
                zsq_half,
                re_half,
                "Im^2 = |Z|^2/2 - Re(Z^2)/2",
            );
            let neg = c.scale(
                "Im^2 - C^2",
                Relation::Equal,
                rat_int(-1),
                z2,
                "Im^2 - C^2 = -Re(Z^2)",
            );
            let sup = c.sqrt("sup |Im| lower bound", Relation::AtLeast, im2, "sqrt of Im^2 bound");
            let _ = (neg, sup);
            Ok(BoundReport {
                title: format!("second-moment chain: lambda_2, alpha = {alpha}"),
                final_step: im2,
                steps: c.steps,
            })
        }
        other => Err(Error::UnsupportedSpec(format!("{other:?} has no closed-form chain"))),
    }
}

fn simplex_value(k: u32) -> Result<Rational> {
    let m = simplex_moment(&SimplexIntegrand {
        k,
        r: 2,
        eta: 0,
        alpha: rat_int(1),
        flip: FlipWindow::Full,
    })?;
    m.exact.ok_or_else(|| Error::InvalidParameter("expected exact simplex value".into()))
}

/// Fourth-moment chain at alpha = 1: from the squared second-moment bounds
/// and the fourth-moment combination to the mixed-term lower bound.
pub fn fourth_moment_chain(alpha: &Rational) -> Result<BoundReport> {
    if alpha != &rat_int(1) {
        return Err(Error::UnsupportedSpec("fourth-moment chain is built at alpha = 1".into()));
    }
    let second = second_moment_chain(MollifierSpec::Liouville, alpha)?;
    let c2_bound = match second.final_value() {
        StepValue::Exact(q) => q.clone(),
        _ => unreachable!(),
    };
    let mut c = ChainBuilder::new();
    let c2 = c.input("C^2 lower bound", Relation::AtLeast, c2_bound, "second-moment chain");
    // Im^2 >= C^2bound - Re(Z^2)
    let im2_val = c.exact(c2) - exact_pseudo_moment(2, alpha);
    let im2 = c.push(
        "Im^2 lower bound",
        Relation::AtLeast,
        StepValue::Exact(im2_val.clone()),
        StepOp::Input,
        "second-moment chain",
    );
    let c4 = c.square(
        "C^4 lower bound",
        Relation::Greater,
        c2,
        "positivity of (C^2 - bound)^2",
    );
    let im4 = c.square(
        "Im^4 lower bound",
        Relation::Greater,
        im2,
        "positivity of (Im^2 - bound)^2",
    );
    let combo = c.input(
        "C^4 - 6 C^2 Im^2 + Im^4",
        Relation::Equal,
        exact_pseudo_moment(4, alpha),
        "fourth-moment combination 1405/22680",
    );
    let s = c.add("C^4 + Im^4 bound", Relation::AtLeast, c4, im4, "");
    let six_mixed = c.sub(
        "6 C^2 Im^2 lower bound",
        Relation::AtLeast,
        s,
        combo,
        "rearranged combination",
    );
    let mixed = c.scale(
        "C^2 Im^2 lower bound",
        Relation::AtLeast,
        rat(1, 6),
        six_mixed,
        "final mixed bound",
    );
    Ok(BoundReport {
        title: "fourth-moment chain: liouville, alpha = 1".into(),
        final_step: mixed,
        steps: c.steps,
    })
}

/// Tail lower bound chain: |Z|^2 bound minus the head closed form, emitted in
/// both normalizations (the corrected total mass and the quarter-mass
/// convention the reference display divides by; the discrepancy is flagged
/// in the step labels).
pub fn tail_lower_bound_chain() -> Result<BoundReport> {
    let one = rat_int(1);
    let second = second_moment_chain(MollifierSpec::LiouvilleDivisor { r: 2 }, &one)?;
    let zsq = match second.final_value() {
        StepValue::Exact(q) => q.clone(),
        _ => unreachable!(),
    };
    let mut c = ChainBuilder::new();
    let z = c.input("|Z|^2 lower bound", Relation::AtLeast, zsq, "second-moment chain, r = 2");
    let head = c.input(
        "head mean square",
        Relation::Equal,
        mean_square_closed(&one, 2, 0)?,
        "head closed form 97/210",
    );
    let tail = c.sub(
        "tail / (corrected mass normalization)",
        Relation::AtLeast,
        z,
        head,
        "tail = |Z|^2 - head",
    );
    let quarter = c.scale(
        "tail / (quarter-mass normalization, as printed)",
        Relation::AtLeast,
        rat(1, 4),
        tail,
        "printed display divides by the un-corrected quarter mass; discrepancy flagged",
    );
    let printed = c.input(
        "printed tail constant",
        Relation::Greater,
        rat(9, 1000),
        "printed lower bound 0.009",
    );
    let _ = printed;
    Ok(BoundReport {
        title: "tail lower bound chain: lambda * d_2, alpha = 1".into(),
        final_step: quarter,
        steps: c.steps,
    })
}

/// The general two-moment lower bound: (rho1^2 + |rho2 - rho1^2|) * mass.
pub fn general_lower_bound(rho1: f64, rho2: f64, mass: f64) -> Result<f64> {
    if mass <= 0.0 {
        return Err(Error::InvalidParameter(format!("mass = {mass} must be positive")));
    }
    let r1sq = rho1 * rho1;
    Ok((r1sq + (rho2 - r1sq).abs()) * mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn liouville_chain_constants() {
        let rep = second_moment_chain(MollifierSpec::Liouville, &rat_int(1)).unwrap();
        assert!(rep.replay().is_ok());
        let by_label = |l: &str| {
            rep.steps
                .iter()
                .find(|s| s.label.contains(l))
                .unwrap_or_else(|| panic!("missing step {l}"))
        };
        assert_eq!(by_label("C^2").value, StepValue::Exact(rat(7, 15)));
        assert_eq!(by_label("Im^2").value, StepValue::Exact(rat(1, 10)));
        let sup = by_label("sup |C|").value.to_f64();
        assert!((sup - 0.683130).abs() < 1e-6, "sup = {sup}");
    }

    #[test]
    fn liouville_alpha2_chain() {
        let rep = second_moment_chain(MollifierSpec::Liouville, &rat_int(2)).unwrap();
        assert!(rep.replay().is_ok());
        let c2 = rep.steps.iter().find(|s| s.label.contains("C^2")).unwrap();
        assert_eq!(c2.value, StepValue::Exact(rat(7, 40)));
    }

    #[test]
    fn divisor_weighted_chain() {
        let rep =
            second_moment_chain(MollifierSpec::LiouvilleDivisor { r: 2 }, &rat_int(1)).unwrap();
        assert!(rep.replay().is_ok());
        let find = |l: &str| {
            rep.steps.iter().find(|s| s.label.contains(l)).unwrap().value.clone()
        };
        assert_eq!(find("C^2"), StepValue::Exact(rat(4, 9)));
        assert_eq!(find("Im^2"), StepValue::Exact(rat(17, 315)));
        assert_eq!(find("|Z|^2"), StepValue::Exact(rat(157, 315)));
    }

    #[test]
    fn lambda2_chain() {
        let rep = second_moment_chain(MollifierSpec::LiouvilleK(2), &rat_int(1)).unwrap();
        assert!(rep.replay().is_ok());
        let find = |l: &str| {
            rep.steps.iter().find(|s| s.label.contains(l)).unwrap().value.clone()
        };
        assert_eq!(find("Im^2 lower"), StepValue::Exact(rat(7, 15)));
        assert_eq!(find("Im^2 - C^2"), StepValue::Exact(rat(11, 30)));
    }

    #[test]
    fn fourth_moment_chain_final_bound() {
        let rep = fourth_moment_chain(&rat_int(1)).unwrap();
        assert!(rep.replay().is_ok());
        let fin = rep.final_value();
        assert_eq!(*fin, StepValue::Exact(rat(3761, 136_080)));
        let v = fin.to_f64();
        assert!(v >= 0.0276381 && v >= 0.02763, "v = {v}");
        let c4 = rep.steps.iter().find(|s| s.label.contains("C^4")).unwrap();
        assert_eq!(c4.value, StepValue::Exact(rat(49, 225)));
    }

    #[test]
    fn tail_chain_both_normalizations() {
        let rep = tail_lower_bound_chain().unwrap();
        assert!(rep.replay().is_ok());
        let find = |l: &str| {
            rep.steps.iter().find(|s| s.label.contains(l)).unwrap().value.clone()
        };
        assert_eq!(find("corrected mass"), StepValue::Exact(rat(23, 630)));
        let printed_side = find("quarter-mass");
        assert_eq!(printed_side, StepValue::Exact(rat(23, 2520)));
        let v = printed_side.to_f64();
        assert!(v > 0.009 && (v - 0.00913).abs() < 1e-5, "v = {v}");
    }

    #[test]
    fn general_bound_cases() {
        // rho1 = 2/3, rho2 = 11/30 -> 4/9 + 7/90 = 47/90
        let v = general_lower_bound(2.0 / 3.0, 11.0 / 30.0, 1.0).unwrap();
        assert!((v - 47.0 / 90.0).abs() < 1e-15);
        // sigma = 0 collapses to rho1^2 * mass
        let v = general_lower_bound(0.5, 0.25, 2.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        // rho2 > rho1^2 gives rho2 * mass
        let v = general_lower_bound(0.5, 0.4, 1.0).unwrap();
        assert!((v - 0.4).abs() < 1e-15);
        assert!(general_lower_bound(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn improvement_guarantee() {
        // the C^2 bound always dominates the squared first moment
        for alpha in [rat_int(1), rat(3, 2), rat_int(2)] {
            let rep = second_moment_chain(MollifierSpec::Liouville, &alpha).unwrap();
            let c2 = rep.final_value().to_f64();
            let m1 = exact_pseudo_moment(1, &alpha).to_f64().unwrap();
            assert!(c2 >= m1 * m1 - 1e-15, "alpha = {alpha}");
        }
    }

    #[test]
    fn monotone_in_alpha() {
        let vals: Vec<f64> = [rat_int(1), rat(3, 2), rat_int(2)]
            .iter()
            .map(|a| second_moment_chain(MollifierSpec::Liouville, a).unwrap().final_value().to_f64())
            .collect();
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2], "{vals:?}");
    }

    #[test]
    fn tampered_report_fails_replay() {
        let mut rep = second_moment_chain(MollifierSpec::Liouville, &rat_int(1)).unwrap();
        let idx = rep.final_step;
        rep.steps[idx].value = StepValue::Exact(rat(1, 2));
        assert_eq!(rep.replay(), Err(idx));
    }

    #[test]
    fn unsupported_spec_rejected() {
        assert!(matches!(
            second_moment_chain(MollifierSpec::Unit, &rat_int(1)),
            Err(Error::UnsupportedSpec(_))
        ));
    }
}
