//! Recomputes (−K)³ and the Gorenstein index for the bundled realizing data
//! and prints them next to the reference table.

use antican::classify::table::reference_table;
use antican::exact::rat_to_string;
use antican::invariants::{antican_cube, class_group_string, gorenstein_index};
use antican::rap::{cox_presentation, grading, DefiningData};

#[derive(serde::Deserialize)]
struct Entry {
    no: usize,
    data: DefiningData,
}

fn main() {
    let entries: Vec<Entry> = serde_json::from_str(include_str!("../data/realizing.json")).unwrap();
    let table = reference_table();
    let mut agree = 0;
    for e in &entries {
        let g = grading(&e.data).unwrap();
        let cube = rat_to_string(&antican_cube(&e.data, &g).unwrap());
        let iota = gorenstein_index(&e.data, &g).unwrap().to_string();
        let row = &table[e.no - 1];
        let ok = cube == row.antican_cube && iota == row.gorenstein_index;
        agree += usize::from(ok);
        println!(
            "{:>2} {:<28} {:<7} (-K)^3 = {:<8} iota = {:<3} {}",
            e.no,
            cox_presentation(&e.data).unwrap().render(),
            class_group_string(g.free_rank, &g.torsion),
            cube,
            iota,
            if ok { "" } else { "<- differs from table" }
        );
    }
    println!("{agree}/{} rows agree with the table", entries.len());
}
