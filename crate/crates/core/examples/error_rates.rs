//! Closed-form rates and sizes for 2048-bit iris codes.

use negbio::bio::{expansion_factor, log2_big, predicted_rates, size_bound, Variant};
use negbio::lsh::{binomial, RateModel};

fn main() -> negbio::Result<()> {
    let (n, l_count, w, m) = (2048, 128, 10, 4);
    let model = RateModel::for_projections(0.25 * n as f64, 0.35 * n as f64, n, w)?;
    println!("p1 = {:.4}, p2 = {:.4}", model.p1, model.p2);
    println!(
        "P_fr = {:.4}, P_fa = {:.4}",
        model.frr(l_count, m)?,
        model.far(l_count, m)?
    );

    println!("\n  m   P_fr     P_fa");
    for m in 1..=8 {
        println!(
            "{m:>3}   {:.4}   {:.4}",
            model.frr(l_count, m)?,
            model.far(l_count, m)?
        );
    }

    for population in [1, 10, 100] {
        let r = predicted_rates(l_count, m, model.p1, model.p2, population)?;
        println!(
            "N = {population:>3}: false not-member {:.3e}, false member {:.5}",
            r.false_not_member, r.false_member
        );
    }

    let l = m * (7 + w);
    println!(
        "\n{} chains per template, {l} bits each",
        binomial(l_count, m).unwrap()
    );
    for variant in [Variant::Deterministic, Variant::Randomized] {
        let size = size_bound(1, l_count, m, l, variant);
        println!(
            "{variant}: expansion 2^{:.2}",
            expansion_factor(&size, 1, n).log2()
        );
    }
    let size = size_bound(100, l_count, 3, 3 * (7 + w), Variant::Deterministic);
    println!(
        "m = 3, N = 100: {size} bits, {:.1} GiB",
        2f64.powf(log2_big(&size) - 33.0)
    );
    Ok(())
}
