//! Bit-sampling hash functions and the binary encoding of hash chains.

use negbio::lsh::{Combinations, LshFamily};
use negbio::synth::DatasetSpec;

fn main() -> negbio::Result<()> {
    let family = LshFamily::new(32, 6, 3, 2024)?;
    for (i, set) in family.index_sets().iter().enumerate() {
        println!("h{i} samples {set:?}");
    }

    let spec = DatasetSpec::iris_like(32, 1, 5)?;
    let b = spec.references().remove(0);
    let b2 = spec.genuine(&b, 0)?;
    println!("b  = {b}");
    println!("b' = {b2} (distance {})", b.hamming_distance(&b2)?);
    for i in 0..family.count() {
        println!(
            "h{i}: {} vs {}",
            family.apply(i, &b)?,
            family.apply(i, &b2)?
        );
    }
    println!("functions that agree: {:?}", family.agreements(&b, &b2)?);

    let m = 2;
    println!(
        "order-{m} chains are {} bits long; first three:",
        family.chain_length(m)
    );
    for (combo, bits) in family.encoded_chains(m, &b)?.take(3) {
        let chain = family.decode_chain(&bits, m)?;
        let values: Vec<String> = chain.values.iter().map(ToString::to_string).collect();
        println!("  {combo:?} -> {bits} -> values {}", values.join(" "));
    }
    println!(
        "C({}, {m}) = {}",
        family.count(),
        Combinations::new(family.count(), m).count()
    );
    Ok(())
}
