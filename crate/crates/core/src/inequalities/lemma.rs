use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eight numbers `a_i, b_i, α_i, β_i` (`i = 1, 2`) with positive weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EightTuple {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
}

impl EightTuple {
    pub fn new(a: [f64; 2], b: [f64; 2], alpha: [f64; 2], beta: [f64; 2]) -> Result<Self> {
        let t = Self { a, b, alpha, beta };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.alpha.iter().chain(&self.beta).any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::NonPositiveWeight);
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tuple entries must be finite".into()));
        }
        Ok(())
    }

    /// The tuple with indices 1 and 2 exchanged.
    pub fn swapped(&self) -> Self {
        let sw = |p: [f64; 2]| [p[1], p[0]];
        Self { a: sw(self.a), b: sw(self.b), alpha: sw(self.alpha), beta: sw(self.beta) }
    }

    /// `δ_i = b_i/β_i - a_i/α_i`.
    pub fn delta(&self, i: usize) -> f64 {
        self.b[i] / self.beta[i] - self.a[i] / self.alpha[i]
    }

    /// `δ_{aα} = a_2/α_2 - a_1/α_1`.
    pub fn delta_a_alpha(&self) -> f64 {
        self.a[1] / self.alpha[1] - self.a[0] / self.alpha[0]
    }

    /// `δ_{αβ} = β_2/α_2 - β_1/α_1`.
    pub fn delta_alpha_beta(&self) -> f64 {
        self.beta[1] / self.alpha[1] - self.beta[0] / self.alpha[0]
    }

    /// `(a_1+a_2)/(α_1+α_2)`.
    pub fn aggregate_a(&self) -> f64 {
        (self.a[0] + self.a[1]) / (self.alpha[0] + self.alpha[1])
    }

    /// `(b_1+b_2)/(β_1+β_2)`.
    pub fn aggregate_b(&self) -> f64 {
        (self.b[0] + self.b[1]) / (self.beta[0] + self.beta[1])
    }
}

/// Result of checking the aggregation lemma on one tuple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub hypothesis_holds: bool,
    pub conclusion_holds: bool,
    /// `|lhs - rhs|` of the decomposition identity, relative to the largest
    /// term on either side.
    pub identity_residual: f64,
    /// `(b_1+b_2)/(β_1+β_2) - (a_1+a_2)/(α_1+α_2)`.
    pub gap: f64,
}

impl LemmaCheck {
    /// A counterexample has the hypothesis without the conclusion.
    pub fn is_counterexample(&self) -> bool {
        self.hypothesis_holds && !self.conclusion_holds
    }
}

/// Relative tolerance used for the conclusion comparison.
pub const CONCLUSION_TOLERANCE: f64 = 1e-12;

fn check(t: &EightTuple, reversed: bool) -> Result<LemmaCheck> {
    t.validate()?;
    let ratio_a = [t.a[0] / t.alpha[0], t.a[1] / t.alpha[1]];
    let ratio_b = [t.b[0] / t.beta[0], t.b[1] / t.beta[1]];
    let pointwise = ratio_a[0] <= ratio_b[0] && ratio_a[1] <= ratio_b[1];
    let (middle, right) = if reversed {
        (ratio_a[0] >= ratio_a[1], t.alpha[1] / t.alpha[0] >= t.beta[1] / t.beta[0])
    } else {
        (ratio_a[0] <= ratio_a[1], t.alpha[1] / t.alpha[0] <= t.beta[1] / t.beta[0])
    };

    let (agg_a, agg_b) = (t.aggregate_a(), t.aggregate_b());
    let gap = agg_b - agg_a;
    let beta_sum = t.beta[0] + t.beta[1];
    let terms = [
        t.beta[0] * t.delta(0) / beta_sum,
        t.beta[1] * t.delta(1) / beta_sum,
        t.alpha[0] * t.alpha[1] / (t.alpha[0] + t.alpha[1]) * t.delta_a_alpha() * t.delta_alpha_beta() / beta_sum,
    ];
    let decomposed: f64 = terms.iter().sum();
    let scale = [agg_a, agg_b, terms[0], terms[1], terms[2], ratio_a[0], ratio_a[1], ratio_b[0], ratio_b[1]]
        .iter()
        .fold(f64::MIN_POSITIVE, |m, v| m.max(v.abs()));
    Ok(LemmaCheck {
        hypothesis_holds: pointwise && middle && right,
        conclusion_holds: gap >= -CONCLUSION_TOLERANCE * scale,
        identity_residual: (gap - decomposed).abs() / scale,
        gap,
    })
}

/// Checks `a_i/α_i <= b_i/β_i`, `a_1/α_1 <= a_2/α_2`, `α_2/α_1 <= β_2/β_1`
/// against `(a_1+a_2)/(α_1+α_2) <= (b_1+b_2)/(β_1+β_2)`, and the residual of
/// the exact decomposition of the difference of the two aggregates.
pub fn simpson_antidote(t: &EightTuple) -> Result<LemmaCheck> {
    check(t, false)
}

/// As [`simpson_antidote`] with the middle and right hypotheses reversed.
pub fn reversed_simpson_antidote(t: &EightTuple) -> Result<LemmaCheck> {
    check(t, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_ones_is_equality() {
        let t = EightTuple::new([1.0; 2], [1.0; 2], [1.0; 2], [1.0; 2]).unwrap();
        for c in [simpson_antidote(&t).unwrap(), reversed_simpson_antidote(&t).unwrap()] {
            assert!(c.hypothesis_holds && c.conclusion_holds);
            assert_eq!(c.gap, 0.0);
            assert_eq!(c.identity_residual, 0.0);
        }
    }

    #[test]
    fn worked_example_and_its_mirror() {
        let t = EightTuple::new([1.0, 4.0], [2.0, 9.0], [1.0, 2.0], [1.0, 3.0]).unwrap();
        let c = simpson_antidote(&t).unwrap();
        assert!(c.hypothesis_holds && c.conclusion_holds);
        assert!((c.gap - (11.0 / 4.0 - 5.0 / 3.0)).abs() < 1e-15);
        let m = reversed_simpson_antidote(&t.swapped()).unwrap();
        assert!(m.hypothesis_holds && m.conclusion_holds);
        assert!(!simpson_antidote(&t.swapped()).unwrap().hypothesis_holds);
    }

    #[test]
    fn nonpositive_weights_are_rejected() {
        assert!(matches!(EightTuple::new([1.0; 2], [1.0; 2], [0.0, 1.0], [1.0; 2]), Err(Error::NonPositiveWeight)));
        let bad = EightTuple { a: [1.0; 2], b: [1.0; 2], alpha: [1.0; 2], beta: [1.0, -2.0] };
        assert!(matches!(simpson_antidote(&bad), Err(Error::NonPositiveWeight)));
    }

    #[test]
    fn hypotheses_matter() {
        // b beats a in both groups, but a puts its weight on the better group
        let t = EightTuple::new([0.1, 300.0], [10.0, 31.0], [1.0, 10.0], [10.0, 1.0]).unwrap();
        let c = simpson_antidote(&t).unwrap();
        assert!(t.delta(0) > 0.0 && t.delta(1) > 0.0 && t.delta_a_alpha() > 0.0);
        assert!(!c.hypothesis_holds);
        assert!(!c.conclusion_holds);
        assert!(c.identity_residual < 1e-12);
    }
}
