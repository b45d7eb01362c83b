//! Anonymous authorization against a population, with enrollment and a
//! revocation blacklist.

use negbio::bio::{decide_with_blacklist, oracle_authorize, revoke, DEFAULT_CHAIN_BUDGET};
use negbio::lsh::LshFamily;
use negbio::synth::DatasetSpec;
use negbio::{BioNdb, BioNdbParams, BuildOptions, Variant};

fn main() -> negbio::Result<()> {
    let spec = DatasetSpec::with_epsilon(128, 4, 16.0, 40.0, 0.05, 12)?;
    let refs = spec.references();
    let params = BioNdbParams::new(LshFamily::new(128, 12, 4, 3)?, 3)?;
    let mut db = BioNdb::build(
        params.clone(),
        &refs[..3],
        Variant::Randomized,
        &BuildOptions::default(),
    )?;
    println!(
        "{} users, {} entries over {}-bit chains",
        db.enrolled_count(),
        db.ndb().len(),
        params.chain_length()
    );

    for (k, b) in refs[..3].iter().enumerate() {
        let capture = spec.genuine(b, k as u64)?;
        println!("genuine capture of user {k}: {}", db.authorize(&capture)?);
    }
    let stranger = spec.impostor(0);
    println!("impostor: {}", db.authorize(&stranger)?);
    assert_eq!(
        db.authorize(&stranger)?,
        oracle_authorize(&refs[..3], params.family(), 3, &stranger)?
    );

    println!("user 3 before enrollment: {}", db.authorize(&refs[3])?);
    db.enroll(&refs[3], DEFAULT_CHAIN_BUDGET)?;
    println!("user 3 after enrollment: {}", db.authorize(&refs[3])?);

    let mut blacklist = BioNdb::empty(params, Variant::Deterministic)?;
    let stolen = spec.genuine(&refs[1], 100)?;
    revoke(&mut blacklist, &stolen, DEFAULT_CHAIN_BUDGET)?;
    println!(
        "revoked capture: {}",
        decide_with_blacklist(&db, &blacklist, &stolen)?
    );
    let later = spec.genuine(&refs[1], 101)?;
    println!(
        "later capture of user 1: {}",
        decide_with_blacklist(&db, &blacklist, &later)?
    );
    println!(
        "user 0: {}",
        decide_with_blacklist(&db, &blacklist, &spec.genuine(&refs[0], 102)?)?
    );
    Ok(())
}
