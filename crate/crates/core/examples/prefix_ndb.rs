//! Build a negative database for a small set of 4-bit records.

use negbio::{BinaryTemplate, NegativeDatabase};

fn main() -> negbio::Result<()> {
    let db: Vec<BinaryTemplate> = ["0010", "0111", "1100"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();

    let (ndb, report) = NegativeDatabase::build_prefix(&db, 4)?;
    println!(
        "prefix construction, {} entries ({} bits):",
        report.entry_count, report.bit_size
    );
    for p in ndb.entries() {
        println!("  {p}");
    }

    let (rnd, report) = NegativeDatabase::build_randomized_prefix(&db, 4, 42, 6)?;
    println!("randomized construction, {} entries:", report.entry_count);
    for p in rnd.entries() {
        println!("  {p}");
    }

    for x in ["0010", "0011", "1100", "1111"] {
        let x: BinaryTemplate = x.parse().unwrap();
        println!(
            "{x}: in db = {}, in db (randomized) = {}",
            !ndb.is_member(&x)?,
            !rnd.is_member(&x)?
        );
    }
    assert_eq!(ndb.represented_complement()?, db);
    assert_eq!(rnd.represented_complement()?, db);
    Ok(())
}
