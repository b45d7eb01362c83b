//! Seeded synthetic templates and a check of the distance thresholds.

use negbio::synth::{verify_condition1, DatasetSpec};

fn main() -> negbio::Result<()> {
    let spec = DatasetSpec::iris_like(2048, 500, 1)?;
    println!("{}", spec.manifest());
    let refs = spec.references();

    let genuine: Vec<_> = refs
        .iter()
        .enumerate()
        .map(|(k, b)| Ok((b.clone(), spec.genuine(b, k as u64)?)))
        .collect::<negbio::Result<_>>()?;
    let impostor: Vec<_> = refs
        .iter()
        .enumerate()
        .map(|(k, b)| (b.clone(), spec.impostor(k as u64)))
        .collect();
    let report = verify_condition1(&genuine, &impostor, spec.lambda_min, spec.lambda_max)?;
    println!(
        "genuine pairs within {}: {:.3} (mean distance {:.1})",
        spec.lambda_min, report.genuine_within, report.genuine_mean
    );
    println!(
        "impostor pairs beyond {}: {:.3} (mean distance {:.1})",
        spec.lambda_max, report.impostor_beyond, report.impostor_mean
    );
    println!("thresholds hold at 0.999: {}", report.holds(0.999));

    let b = &refs[0];
    let near = spec.at_distance(b, 300, 0)?;
    println!("exact-distance capture: d = {}", b.hamming_distance(&near)?);
    Ok(())
}
