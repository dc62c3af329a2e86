//! Two-tier zero test: exact on the canonical form, sampled otherwise.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EvalError, Scalar};

/// Sampling parameters for the numeric tier. Points are drawn as rationals
/// `k/64` in `[-2, 2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPolicy {
    pub points: usize,
    pub tolerance: f64,
    pub guard: f64,
    pub seed: u64,
}

impl Default for SamplingPolicy {
    fn default() -> Self {
        SamplingPolicy {
            points: 16,
            tolerance: 1e-9,
            guard: 1e-6,
            seed: 0x5eed_0f_9a06e,
        }
    }
}

impl SamplingPolicy {
    pub fn with_seed(seed: u64) -> Self {
        SamplingPolicy {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ZeroTestError> {
        if self.points == 0 || !(self.tolerance > 0.0) || !(self.guard > 0.0) {
            return Err(ZeroTestError::InvalidPolicy);
        }
        Ok(())
    }

    // Whether a sample residual counts as vanishing.
    fn accepts(&self, residual: f64) -> bool {
        residual <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroVerdict {
    ZeroExact,
    ZeroNumeric { max_residual: f64 },
    NonZero { witness: Vec<f64>, residual: f64 },
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero { .. })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ZeroVerdict::ZeroExact)
    }

    /// Verdict for a conjunction of zero claims: the first failure wins,
    /// otherwise numeric beats exact and residuals take their maximum.
    pub fn and(self, other: ZeroVerdict) -> ZeroVerdict {
        use ZeroVerdict::*;
        match (self, other) {
            (n @ NonZero { .. }, _) | (_, n @ NonZero { .. }) => n,
            (ZeroNumeric { max_residual: a }, ZeroNumeric { max_residual: b }) => ZeroNumeric {
                max_residual: a.max(b),
            },
            (z @ ZeroNumeric { .. }, ZeroExact) | (ZeroExact, z @ ZeroNumeric { .. }) => z,
            (ZeroExact, ZeroExact) => ZeroExact,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ZeroTestError {
    #[error("only {accepted} admissible sample points after {attempts} attempts; the nonvanishing set may vanish identically")]
    SamplingExhausted { accepted: usize, attempts: usize },
    #[error("sampling policy needs points >= 1, tolerance > 0 and guard > 0")]
    InvalidPolicy,
}

const ATTEMPTS_PER_POINT: usize = 64;

/// Decides whether `e` vanishes identically on the region where every
/// element of `nonvanishing` is bounded away from zero.
pub fn is_zero(
    e: &Scalar,
    policy: &SamplingPolicy,
    nonvanishing: &[Scalar],
) -> Result<ZeroVerdict, ZeroTestError> {
    policy.validate()?;
    if e.is_zero() {
        return Ok(ZeroVerdict::ZeroExact);
    }
    let exact = e.is_rational();
    let dim = core::iter::once(e)
        .chain(nonvanishing)
        .filter_map(Scalar::max_coord)
        .max()
        .map_or(0, |m| m + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut point = alloc::vec![0.0; dim];
    let mut accepted = 0;
    let mut max_residual: f64 = 0.0;
    let mut best: Option<(Vec<f64>, f64)> = None;
    // The exact tier already knows the answer is nonzero; sampling only looks
    // for a convincing witness and may spend the whole budget doing so.
    let budget = policy.points * ATTEMPTS_PER_POINT;
    let mut attempts = 0;
    while attempts < budget {
        attempts += 1;
        for x in point.iter_mut() {
            *x = f64::from(rng.random_range(-128i32..=128)) / 64.0;
        }
        if !admissible(&point, policy.guard, nonvanishing) {
            continue;
        }
        let (v, scale) = match e.eval_with_scale(&point, policy.guard) {
            Ok(r) => r,
            Err(EvalError::NearSingular { .. }) => continue,
            Err(EvalError::DimensionMismatch { .. }) => unreachable!("point covers every coordinate"),
        };
        let residual = if v.is_finite() { v.abs() / (1.0 + scale) } else { f64::INFINITY };
        if !policy.accepts(residual) {
            return Ok(ZeroVerdict::NonZero {
                witness: point,
                residual,
            });
        }
        if best.as_ref().is_none_or(|(_, r)| residual > *r) {
            best = Some((point.clone(), residual));
        }
        max_residual = max_residual.max(residual);
        accepted += 1;
        if !exact && accepted >= policy.points {
            return Ok(ZeroVerdict::ZeroNumeric { max_residual });
        }
    }
    match best {
        Some((witness, residual)) if exact => Ok(ZeroVerdict::NonZero { witness, residual }),
        _ => Err(ZeroTestError::SamplingExhausted { accepted, attempts }),
    }
}

/// Zero test of every scalar in `items`, stopping at the first failure.
pub fn all_zero<'a>(
    items: impl IntoIterator<Item = &'a Scalar>,
    policy: &SamplingPolicy,
    nonvanishing: &[Scalar],
) -> Result<ZeroVerdict, ZeroTestError> {
    let mut acc = ZeroVerdict::ZeroExact;
    for e in items {
        acc = acc.and(is_zero(e, policy, nonvanishing)?);
        if !acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

fn admissible(point: &[f64], guard: f64, nonvanishing: &[Scalar]) -> bool {
    nonvanishing
        .iter()
        .all(|g| matches!(g.eval(point, guard), Ok(v) if v.abs() >= guard))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn s(text: &str) -> Scalar {
        parse_expr(text, &["x1", "x2", "x3"]).unwrap().to_scalar().unwrap()
    }

    #[test]
    fn polynomial_identity_is_exact() {
        let v = is_zero(&s("(x1+x2)^2 - x1^2 - 2*x1*x2 - x2^2"), &SamplingPolicy::default(), &[]).unwrap();
        assert_eq!(v, ZeroVerdict::ZeroExact);
    }

    #[test]
    fn exponential_law_is_numeric() {
        let v = is_zero(&s("exp(x1+x2) - exp(x1)*exp(x2)"), &SamplingPolicy::default(), &[]).unwrap();
        assert!(matches!(v, ZeroVerdict::ZeroNumeric { .. }), "{v:?}");
    }

    #[test]
    fn nonzero_has_witness() {
        let e = s("x1*x2 - x2");
        let v = is_zero(&e, &SamplingPolicy::default(), &[]).unwrap();
        let ZeroVerdict::NonZero { witness, residual } = v else {
            panic!("expected a witness");
        };
        let (val, scale) = e.eval_with_scale(&witness, 1e-6).unwrap();
        assert!(val.abs() > 1e-9 * (1.0 + scale));
        assert!(residual > 1e-9);
    }

    #[test]
    fn nonvanishing_guard_is_respected() {
        let e = s("sin(x1)*x2");
        let guard = s("x2");
        if let ZeroVerdict::NonZero { witness, .. } = is_zero(&e, &SamplingPolicy::default(), &[guard]).unwrap() {
            assert!(witness[1].abs() >= 1e-6);
        } else {
            panic!("expected nonzero");
        }
    }

    #[test]
    fn identically_vanishing_guard_exhausts_sampling() {
        let err = is_zero(&s("exp(x1) - 1"), &SamplingPolicy::default(), &[s("x1 - x1")]);
        assert!(matches!(err, Err(ZeroTestError::SamplingExhausted { .. })));
    }

    #[test]
    fn verdicts_combine() {
        let n = ZeroVerdict::ZeroNumeric { max_residual: 1e-12 };
        assert_eq!(ZeroVerdict::ZeroExact.and(n.clone()), n);
        assert!(!n.and(ZeroVerdict::NonZero { witness: Vec::new(), residual: 1.0 }).is_zero());
    }
}
