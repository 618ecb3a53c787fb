//! Runs the enumeration for one shape (default: the `r = 3` case (ii)) and
//! compares the survivors with the bundled table.
//!
//! `cargo run --release --example classify_case -- iv`

use antican::classify::table::reference_table;
use antican::classify::{diff_table, run_classification, CaseId, RunConfig};
use antican::exact::rat_to_string;

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "ii".into());
    let case = CaseId::parse(&arg).expect("case among i..viii");
    let mut cfg = RunConfig::new(vec![case]);
    cfg.workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let res = run_classification(&cfg).unwrap();
    println!("generated {} candidates, rejections {:?}", res.stats.generated, res.stats.rejected);
    for c in &res.classes {
        println!(
            "{} | {} | {} | {} | {}",
            c.row.relations,
            c.row.class_group,
            c.row.degree_matrix,
            rat_to_string(&c.row.antican_cube),
            c.row.gorenstein_index
        );
    }
    let reference = reference_table();
    let rep = diff_table(&res.table(), &reference).unwrap();
    let hits: Vec<usize> = rep.matched.iter().map(|m| m.0).collect();
    println!("matches reference rows {hits:?}; {} unmatched", rep.extra.len());
}
