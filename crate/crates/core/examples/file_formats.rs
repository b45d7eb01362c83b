//! Every text format the command line reads and writes.

use negbio::bio::Sidecar;
use negbio::lsh::{parse_family, write_family, LshFamily};
use negbio::ndb::{parse_ndb, write_ndb, write_tagged_ndb};
use negbio::synth::{parse_templates, write_templates, DatasetSpec};
use negbio::{AuthNdb, BioNdb, BioNdbParams, BuildOptions, Variant};

fn main() -> negbio::Result<()> {
    let spec = DatasetSpec::iris_like(16, 2, 3)?;
    let refs = spec.references();
    let tpl = write_templates(16, &refs)?;
    print!("--- templates\n{tpl}--- manifest\n{}", spec.manifest());
    assert_eq!(parse_templates(&tpl)?.1, refs);

    let family = LshFamily::new(16, 3, 2, 5)?;
    let lsh = write_family(&family);
    print!("--- family\n{lsh}");
    assert_eq!(parse_family(&lsh)?, family);

    let params = BioNdbParams::new(family, 2)?;
    let db = BioNdb::build(
        params.clone(),
        &refs,
        Variant::Deterministic,
        &BuildOptions::default(),
    )?;
    let ndb = write_ndb(db.ndb());
    print!(
        "--- authorization database\n{ndb}--- sidecar\n{}",
        db.sidecar().to_text()
    );
    assert_eq!(parse_ndb(&ndb)?.to_text(), ndb);
    assert_eq!(Sidecar::parse(&db.sidecar().to_text())?.params()?, params);

    let auth = AuthNdb::build(params.clone(), &refs, &BuildOptions::default())?;
    let tagged = write_tagged_ndb(
        params.chain_length(),
        auth.users().iter().map(|(k, v)| (*k, v)),
    );
    println!(
        "--- authentication database: {} lines",
        tagged.lines().count()
    );
    for line in tagged.lines().take(4) {
        println!("{line}");
    }
    assert_eq!(parse_ndb(&tagged)?.to_text(), tagged);
    Ok(())
}
