use num_bigint::BigUint;

use super::Variant;
use crate::error::{Error, Result};
use crate::lsh::combin::binomial_big;
use crate::lsh::{far, frr};

/// Error rates of a population check over `population` enrolled templates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemRates {
    /// An enrolled user is rejected: `P_fr * (1 - P_fa)^(N-1)`.
    pub false_not_member: f64,
    /// A non-enrolled capture is accepted against at least one of the
    /// `population` templates: `1 - (1 - P_fa)^N`.
    pub false_member: f64,
}

pub fn predicted_rates(
    l_count: usize,
    m: usize,
    p1: f64,
    p2: f64,
    population: u64,
) -> Result<SystemRates> {
    if population == 0 {
        return Err(Error::param("population must be at least 1"));
    }
    let p_fr = frr(l_count, m, p1)?;
    let p_fa = far(l_count, m, p2)?;
    let others = (population - 1) as f64;
    let (survive_others, false_member) = if p_fa >= 1.0 {
        (if population == 1 { 1.0 } else { 0.0 }, 1.0)
    } else {
        let ln_q = (-p_fa).ln_1p();
        // 1 - (1 - p_fa)^N without cancellation
        ((others * ln_q).exp(), -(population as f64 * ln_q).exp_m1())
    };
    Ok(SystemRates {
        false_not_member: p_fr * survive_others,
        false_member: false_member.clamp(0.0, 1.0),
    })
}

/// Worst-case size in bits of a negative database over the chains of
/// `population` templates: `N * C(L, m)` chains, each contributing at most
/// `l` entries of `l` symbols (times `l` more for the randomized
/// construction), each symbol costing two bits.
pub fn size_bound(
    population: u64,
    l_count: usize,
    m: usize,
    chain_length: usize,
    variant: Variant,
) -> BigUint {
    let l = chain_length as u64;
    let per_chain = match variant {
        Variant::Deterministic => l * l,
        Variant::Randomized => l * l * l,
    };
    binomial_big(l_count, m) * population * per_chain * 2u32
}

/// `size / (N * n)`: stored bits per bit of plain template.
pub fn expansion_factor(size: &BigUint, population: u64, n: usize) -> f64 {
    2f64.powf(log2_big(size) - ((population as f64) * n as f64).log2())
}

pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    let drop = bits.saturating_sub(64);
    let top = (x >> drop).to_u64_digits().first().copied().unwrap_or(0) as f64;
    top.log2() + drop as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_rates() {
        let single = predicted_rates(128, 4, 0.0563, 0.0135, 1).unwrap();
        assert_eq!(single.false_not_member, frr(128, 4, 0.0563).unwrap());
        let p_fa = far(128, 4, 0.0135).unwrap();
        assert!((single.false_member - p_fa).abs() <= 1e-15 * p_fa.max(1.0));

        let many = predicted_rates(128, 4, 0.0563, 0.0135, 100).unwrap();
        assert!((many.false_member - (1.0 - (1.0 - p_fa).powi(100))).abs() < 1e-12);
        assert!((many.false_member - 0.99996).abs() < 5e-6);
        let p_fr = frr(128, 4, 0.0563).unwrap();
        assert!((many.false_not_member - p_fr * (1.0 - p_fa).powi(99)).abs() < 1e-15);

        let all = predicted_rates(8, 0, 0.5, 0.5, 3).unwrap();
        assert_eq!((all.false_not_member, all.false_member), (0.0, 1.0));
        for n in [1, 2, 50] {
            assert_eq!(
                predicted_rates(8, 2, 0.5, 0.0, n).unwrap().false_member,
                0.0
            );
        }
        assert!(predicted_rates(8, 2, 0.5, 0.5, 0).is_err());
    }

    #[test]
    fn size_examples() {
        // chain length 51: 7 index bits + 10 value bits, three per chain
        let bits = size_bound(100, 128, 3, 51, Variant::Deterministic);
        assert_eq!(bits, BigUint::from(177_583_795_200u64));
        let gib = log2_big(&bits) - 33.0;
        assert!((2f64.powf(gib) - 20.673).abs() < 0.001);

        let det = size_bound(100, 128, 4, 68, Variant::Deterministic);
        let rnd = size_bound(100, 128, 4, 68, Variant::Randomized);
        assert!(
            (log2_big(&det)
                - log2_big(&(BigUint::from(2u32) * 10_668_000u64 * 100u64 * 68u64 * 68u64)))
            .abs()
                < 1e-12
        );
        assert!((log2_big(&rnd) - log2_big(&det) - 68f64.log2()).abs() < 1e-9);
        assert!((expansion_factor(&det, 100, 2048).log2() - 25.5217).abs() < 1e-3);
        assert!((expansion_factor(&rnd, 100, 2048).log2() - 31.6092).abs() < 1e-3);
    }

    #[test]
    fn log2_of_large_and_small() {
        assert_eq!(log2_big(&BigUint::from(1u32)), 0.0);
        assert_eq!(log2_big(&BigUint::from(1024u32)), 10.0);
        assert!((log2_big(&(BigUint::from(3u32) << 500u32)) - (500.0 + 3f64.log2())).abs() < 1e-12);
        assert_eq!(log2_big(&BigUint::from(0u32)), f64::NEG_INFINITY);
    }
}
