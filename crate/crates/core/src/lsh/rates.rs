//! Closed-form error rates of the m-of-L matching rule.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Probability that one w-bit coordinate projection agrees on two n-bit
/// templates at Hamming distance `d`, under the independent-bits model:
/// `(1 - d/n)^w`.
pub fn collision_prob(d: f64, n: usize, w: usize) -> Result<f64> {
    if n == 0 || !(0.0..=n as f64).contains(&d) {
        return Err(Error::param(format!("distance {d} outside [0, {n}]")));
    }
    Ok((1.0 - d / n as f64).powi(w as i32))
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("probability {p} outside [0, 1]")))
    }
}

/// `P[X = i]` for `X ~ Binomial(trials, p)`, `i = 0..=trials`.
///
/// Uses the ratio recurrence `pmf(i+1) = pmf(i) * (n-i)/(i+1) * p/(1-p)`
/// from `pmf(0) = (1-p)^n`, and switches to log-space terms when that
/// starting value underflows.
pub fn binomial_pmf(trials: usize, p: f64) -> Vec<f64> {
    let mut pmf = vec![0.0; trials + 1];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[trials] = 1.0;
        return pmf;
    }
    let q = 1.0 - p;
    let start = q.powi(trials as i32);
    if start > 1e-280 {
        let ratio = p / q;
        pmf[0] = start;
        for i in 0..trials {
            pmf[i + 1] = pmf[i] * ((trials - i) as f64 / (i + 1) as f64) * ratio;
        }
    } else {
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let mut ln_choose = 0.0;
        for (i, slot) in pmf.iter_mut().enumerate() {
            if i > 0 {
                ln_choose += ((trials - i + 1) as f64 / i as f64).ln();
            }
            *slot = (ln_choose + i as f64 * lp + (trials - i) as f64 * lq).exp();
        }
    }
    pmf
}

/// Probability that fewer than `m` of `L` independent projections collide
/// when each collides with probability `p1`: the false reject rate.
pub fn frr(l_count: usize, m: usize, p1: f64) -> Result<f64> {
    check_prob(p1)?;
    if m > l_count {
        return Err(Error::param(format!(
            "order {m} exceeds family size {l_count}"
        )));
    }
    Ok(binomial_pmf(l_count, p1)[..m]
        .iter()
        .fold(0.0, |a, b| a + b)
        .min(1.0))
}

/// Probability that at least `m` of `L` projections collide when each
/// collides with probability `p2`: the false accept rate.
pub fn far(l_count: usize, m: usize, p2: f64) -> Result<f64> {
    check_prob(p2)?;
    if m > l_count {
        return Err(Error::param(format!(
            "order {m} exceeds family size {l_count}"
        )));
    }
    if m == 0 {
        return Ok(1.0);
    }
    // summed from the top so the tail is monotone in m term by term
    Ok(binomial_pmf(l_count, p2)[m..]
        .iter()
        .rev()
        .sum::<f64>()
        .min(1.0))
}

/// Hamming thresholds and the collision probabilities they induce.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateModel {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub p1: f64,
    pub p2: f64,
}

impl RateModel {
    pub fn new(lambda_min: f64, lambda_max: f64, p1: f64, p2: f64) -> Result<Self> {
        check_prob(p1)?;
        check_prob(p2)?;
        if lambda_min.partial_cmp(&lambda_max) != Some(Ordering::Less) {
            return Err(Error::param("lambda_min must be below lambda_max"));
        }
        if p1.partial_cmp(&p2) != Some(Ordering::Greater) {
            return Err(Error::param("p1 must exceed p2"));
        }
        Ok(RateModel {
            lambda_min,
            lambda_max,
            p1,
            p2,
        })
    }

    /// The model for w-bit projections of n-bit templates.
    pub fn for_projections(lambda_min: f64, lambda_max: f64, n: usize, w: usize) -> Result<Self> {
        let p1 = collision_prob(lambda_min, n, w)?;
        let p2 = collision_prob(lambda_max, n, w)?;
        Self::new(lambda_min, lambda_max, p1, p2)
    }

    pub fn frr(&self, l_count: usize, m: usize) -> Result<f64> {
        frr(l_count, m, self.p1)
    }

    pub fn far(&self, l_count: usize, m: usize) -> Result<f64> {
        far(l_count, m, self.p2)
    }
}
