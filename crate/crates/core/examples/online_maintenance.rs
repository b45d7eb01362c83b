//! Insert and delete records in place, then clean up and morph.

use negbio::{BinaryTemplate, NegativeDatabase};

fn show(label: &str, ndb: &NegativeDatabase) -> negbio::Result<()> {
    let positive: Vec<String> = ndb
        .represented_complement()?
        .iter()
        .map(ToString::to_string)
        .collect();
    println!(
        "{label}: {} entries, positive set {{{}}}",
        ndb.len(),
        positive.join(", ")
    );
    Ok(())
}

fn main() -> negbio::Result<()> {
    let l = 4;
    let mut ndb = NegativeDatabase::new(l)?;
    // an empty negative database represents every string
    show("start", &ndb)?;

    for s in ["1010", "0000", "1110"] {
        ndb.delete_positive(&s.parse::<BinaryTemplate>().unwrap())?;
    }
    show("after deleting three strings", &ndb)?;

    ndb.insert_positive(&"0000".parse().unwrap())?;
    show("after re-inserting 0000", &ndb)?;

    let (mut ndb, _) = NegativeDatabase::build_prefix(&["0110".parse().unwrap()], l)?;
    for s in ["0111", "0100"] {
        ndb.insert_positive(&s.parse().unwrap())?;
    }
    show("prefix build plus two inserts", &ndb)?;

    let report = ndb.cleanup();
    println!("cleanup left {} entries", report.entry_count);
    let rounds = ndb.morph(7, 25);
    show(&format!("after {rounds} morph rounds"), &ndb)?;
    for p in ndb.entries() {
        println!("  {p}");
    }
    Ok(())
}
