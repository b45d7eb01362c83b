//! Per-user databases: verify a claimed identity, or list candidates.

use negbio::lsh::LshFamily;
use negbio::synth::DatasetSpec;
use negbio::{AuthNdb, BioNdbParams, BuildOptions};

fn main() -> negbio::Result<()> {
    let spec = DatasetSpec::iris_like(128, 5, 21)?;
    let refs = spec.references();
    let params = BioNdbParams::new(LshFamily::new(128, 10, 4, 8)?, 2)?;
    let db = AuthNdb::build(
        params,
        &refs,
        &BuildOptions {
            seed: 9,
            ..Default::default()
        },
    )?;
    for (k, ndb) in db.users() {
        println!("user {k}: {} entries", ndb.len());
    }

    let capture = spec.genuine(&refs[2], 0)?;
    println!(
        "capture of user 2 claiming 2: {}",
        db.authenticate(&capture, 2)?
    );
    println!(
        "capture of user 2 claiming 4: {}",
        db.authenticate(&capture, 4)?
    );
    println!("candidates for the capture: {:?}", db.identify(&capture)?);
    println!(
        "candidates for an impostor: {:?}",
        db.identify(&spec.impostor(0))?
    );
    match db.authenticate(&capture, 17) {
        Err(e) => println!("claim 17: {e}"),
        Ok(d) => println!("claim 17: {d}"),
    }
    Ok(())
}
