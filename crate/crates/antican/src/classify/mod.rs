//! Bounded enumeration of terminal Fano threefolds of Picard number one
//! with an action of a two-dimensional torus.
//!
//! Candidates come from [`bounds`] shard by shard, pass [`filter_pipeline`]
//! (cheap gates first) and are merged by normal form. Shard results can be
//! checkpointed to a directory so an interrupted run resumes where it
//! stopped; the final table does not depend on scheduling.

pub mod bounds;
pub mod fast;
pub mod table;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use num::{BigInt, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acomplex::{build_complex, verdict_from_complex, AcError, Witness};
use crate::exact::{rat_to_string, Rat};
use crate::invariants::{
    antican_cube, class_group_string, distinctness_key_with, gorenstein_index, DistinctnessKey,
};
use crate::rap::{cox_presentation, grading, is_fano_graded, normalize, DefiningData, Grading, RapError};
use crate::tropfan::is_simplicial;

pub use bounds::{CaseId, Shard, BOUND_RECORDS};
pub use table::{diff_table, DiffReport, TableRow};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("checkpoint {path} is corrupt: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },
    #[error("table schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// The filter stages, in the order they run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Validity,
    Irredundancy,
    FreeRank,
    Fano,
    Simplicial,
    LogTerminal,
    Terminal,
    Invariants,
}

impl Gate {
    pub fn name(self) -> &'static str {
        match self {
            Gate::Validity => "validity",
            Gate::Irredundancy => "irredundancy",
            Gate::FreeRank => "free_rank",
            Gate::Fano => "fano",
            Gate::Simplicial => "simplicial",
            Gate::LogTerminal => "log_terminal",
            Gate::Terminal => "terminal",
            Gate::Invariants => "invariants",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub gate: Gate,
    pub witness: Option<Witness>,
}

fn reject(gate: Gate) -> Rejection {
    Rejection { gate, witness: None }
}

/// A surviving candidate with its invariants.
#[derive(Clone, Debug)]
pub struct ClassRow {
    /// Normal form of the data.
    pub data: DefiningData,
    pub relations: String,
    pub class_group: String,
    pub degree_matrix: String,
    pub antican_cube: Rat,
    pub gorenstein_index: BigInt,
    pub key: DistinctnessKey,
}

impl ClassRow {
    pub fn table_row(&self, no: usize) -> TableRow {
        TableRow {
            no,
            relations: self.relations.clone(),
            class_group: self.class_group.clone(),
            degree_matrix: self.degree_matrix.clone(),
            antican_cube: rat_to_string(&self.antican_cube),
            gorenstein_index: self.gorenstein_index.to_string(),
        }
    }
}

/// Free rows, then torsion rows, `" / "`-separated.
pub fn degree_matrix_string(g: &Grading) -> String {
    let mut rows: Vec<String> = Vec::new();
    for k in 0..g.free_rank {
        rows.push(g.degrees.iter().map(|c| c.free[k].to_string()).collect::<Vec<_>>().join(" "));
    }
    for k in 0..g.torsion.len() {
        rows.push(g.degrees.iter().map(|c| c.torsion[k].to_string()).collect::<Vec<_>>().join(" "));
    }
    rows.join(" / ")
}

/// Invariants and presentation of data already known to pass all gates.
pub fn class_row(dd: &DefiningData) -> Result<ClassRow, Rejection> {
    let data = normalize(dd);
    let g = grading(&data).map_err(|_| reject(Gate::Validity))?;
    let cube = antican_cube(&data, &g).map_err(|_| reject(Gate::Invariants))?;
    let iota = gorenstein_index(&data, &g).map_err(|_| reject(Gate::Invariants))?;
    let cox = cox_presentation(&data).map_err(|_| reject(Gate::Validity))?;
    let key = distinctness_key_with(&data, &g, cube.clone(), iota.clone());
    Ok(ClassRow {
        relations: cox.render(),
        class_group: class_group_string(g.free_rank, &g.torsion),
        degree_matrix: degree_matrix_string(&g),
        antican_cube: cube,
        gorenstein_index: iota,
        key,
        data,
    })
}

/// Validity → irredundancy → free rank one → Fano → simplicial → log
/// terminal → terminal → invariants. Returns the first failing gate, with a
/// witness where one exists.
pub fn filter_pipeline(dd: &DefiningData) -> Result<ClassRow, Rejection> {
    if let Err((gate, pt)) = fast::fast_gate(dd) {
        return Err(Rejection {
            gate,
            witness: pt.map(|point| Witness::Point { flag: "terminal".into(), point }),
        });
    }
    exact_pipeline(dd)
}

/// The same gates without the machine-integer prefilter.
pub fn exact_pipeline(dd: &DefiningData) -> Result<ClassRow, Rejection> {
    match dd.validate(true) {
        Err(RapError::Redundant(_)) => return Err(reject(Gate::Irredundancy)),
        Err(_) => return Err(reject(Gate::Validity)),
        Ok(_) => {}
    }
    let g = grading(dd).map_err(|_| reject(Gate::Validity))?;
    if g.free_rank != 1 {
        return Err(reject(Gate::FreeRank));
    }
    if !is_fano_graded(&g) {
        return Err(reject(Gate::Fano));
    }
    if !is_simplicial(dd, &g) {
        return Err(reject(Gate::Simplicial));
    }
    let cx = match build_complex(dd, &g) {
        Ok(cx) => cx,
        Err(AcError::NotLogTerminal(c)) => {
            return Err(Rejection {
                gate: Gate::LogTerminal,
                witness: Some(Witness::Cone { cols: c.cols.clone(), l: c.l.clone(), ell: c.ell.to_string() }),
            })
        }
        Err(AcError::NotFano) => return Err(reject(Gate::Fano)),
        Err(_) => return Err(reject(Gate::Validity)),
    };
    let v = verdict_from_complex(dd, &cx, None);
    if !v.terminal {
        let w = v.witnesses.into_iter().find(|w| matches!(w, Witness::Point { flag, .. } if flag == "terminal"));
        return Err(Rejection { gate: Gate::Terminal, witness: w });
    }
    if g.degrees.iter().any(|c| !c.free[0].is_positive()) {
        return Err(reject(Gate::Validity));
    }
    class_row(dd)
}

/// Candidate counts of a run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub generated: u64,
    /// Invalid assemblies (imprimitive or repeated columns).
    pub skipped: u64,
    pub rejected: BTreeMap<String, u64>,
    pub accepted: u64,
    pub generated_per_subcase: BTreeMap<String, u64>,
    pub shards: u64,
}

impl RunStats {
    fn merge(&mut self, o: &RunStats) {
        self.generated += o.generated;
        self.skipped += o.skipped;
        self.accepted += o.accepted;
        self.shards += o.shards;
        for (k, v) in &o.rejected {
            *self.rejected.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &o.generated_per_subcase {
            *self.generated_per_subcase.entry(k.clone()).or_default() += v;
        }
    }
}

/// What a shard contributes: counts and the normal forms it accepted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardResult {
    pub shard: Shard,
    pub stats: RunStats,
    pub accepted: BTreeSet<DefiningData>,
}

pub fn run_shard(sh: &Shard) -> ShardResult {
    let mut stats = RunStats { shards: 1, ..Default::default() };
    let mut accepted = BTreeSet::new();
    bounds::enumerate_shard(sh, &mut |dd| {
        stats.generated += 1;
        match filter_pipeline(&dd) {
            Ok(row) => {
                stats.accepted += 1;
                accepted.insert(row.data);
            }
            Err(r) if r.gate == Gate::Validity => stats.skipped += 1,
            Err(r) => *stats.rejected.entry(r.gate.name().to_string()).or_default() += 1,
        }
    });
    stats.generated_per_subcase.insert(sh.subcase.clone(), stats.generated);
    ShardResult { shard: sh.clone(), stats, accepted }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub cases: Vec<CaseId>,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Restricts the run to these shards (all shards of `cases` otherwise).
    pub shards: Option<Vec<Shard>>,
    pub progress: bool,
}

impl RunConfig {
    pub fn new(cases: Vec<CaseId>) -> Self {
        RunConfig { cases, workers: 1, checkpoint: None, shards: None, progress: false }
    }
}

/// One equivalence class: its representative row and every normal form seen.
#[derive(Clone, Debug)]
pub struct ClassEntry {
    pub row: ClassRow,
    pub normal_forms: Vec<DefiningData>,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub classes: Vec<ClassEntry>,
    pub stats: RunStats,
    /// Cases that were requested but have no shards.
    pub empty_cases: Vec<CaseId>,
}

impl RunResult {
    pub fn table(&self) -> Vec<TableRow> {
        self.classes.iter().enumerate().map(|(i, c)| c.row.table_row(i + 1)).collect()
    }
}

fn checkpoint_file(dir: &Path, sh: &Shard) -> PathBuf {
    let name: String =
        sh.id().chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' }).collect();
    dir.join(format!("{name}.json"))
}

fn load_checkpoint(path: &Path, sh: &Shard) -> Result<Option<ShardResult>, ClassifyError> {
    if !path.exists() {
        return Ok(None);
    }
    let corrupt = |reason: String| ClassifyError::CheckpointCorrupt { path: path.to_path_buf(), reason };
    let text = fs::read_to_string(path)?;
    let res: ShardResult = serde_json::from_str(&text).map_err(|e| corrupt(e.to_string()))?;
    if res.shard != *sh {
        return Err(corrupt(format!("holds shard {}", res.shard.id())));
    }
    Ok(Some(res))
}

fn store_checkpoint(path: &Path, res: &ShardResult) -> Result<(), ClassifyError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_string(res).expect("serializable"))?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs the selected cases and merges the survivors into equivalence
/// classes (equal [`DistinctnessKey`]), sorted by key.
pub fn run_classification(cfg: &RunConfig) -> Result<RunResult, ClassifyError> {
    let shards: Vec<Shard> = match &cfg.shards {
        Some(s) => s.clone(),
        None => cfg.cases.iter().flat_map(|&c| bounds::shards(c)).collect(),
    };
    let empty_cases: Vec<CaseId> = cfg.cases.iter().copied().filter(|c| c.is_empty_case()).collect();
    if let Some(dir) = &cfg.checkpoint {
        fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| ClassifyError::Pool(e.to_string()))?;
    let done = AtomicUsize::new(0);
    let total = shards.len();
    let results: Vec<Result<ShardResult, ClassifyError>> = pool.install(|| {
        shards
            .par_iter()
            .map(|sh| {
                let path = cfg.checkpoint.as_ref().map(|d| checkpoint_file(d, sh));
                if let Some(p) = &path {
                    if let Some(r) = load_checkpoint(p, sh)? {
                        return Ok(r);
                    }
                }
                let r = run_shard(sh);
                if let Some(p) = &path {
                    store_checkpoint(p, &r)?;
                }
                let k = done.fetch_add(1, Ordering::Relaxed) + 1;
                if cfg.progress {
                    eprintln!("[{k}/{total}] {} generated={} accepted={}", sh.id(), r.stats.generated, r.stats.accepted);
                }
                Ok(r)
            })
            .collect()
    });
    let mut stats = RunStats::default();
    let mut forms = BTreeSet::new();
    for r in results {
        let r = r?;
        stats.merge(&r.stats);
        forms.extend(r.accepted);
    }
    let rows: Vec<ClassRow> = pool.install(|| {
        forms.par_iter().map(|dd| class_row(dd).expect("accepted data has invariants")).collect()
    });
    let mut by_key: BTreeMap<DistinctnessKey, ClassEntry> = BTreeMap::new();
    for row in rows {
        let nf = row.data.clone();
        by_key
            .entry(row.key.clone())
            .and_modify(|e| e.normal_forms.push(nf.clone()))
            .or_insert(ClassEntry { row, normal_forms: vec![nf] });
    }
    let classes = by_key
        .into_values()
        .map(|mut e| {
            e.normal_forms.sort();
            e.row = class_row(&e.normal_forms[0]).expect("accepted");
            e
        })
        .collect();
    Ok(RunResult { classes, stats, empty_cases })
}

/// JSON record of a result row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub no: usize,
    pub data: DefiningData,
    pub normal_forms: usize,
    pub relations: String,
    pub class_group: String,
    pub degree_matrix: String,
    pub antican_cube: String,
    pub gorenstein_index: String,
}

pub fn records(res: &RunResult) -> Vec<ClassRecord> {
    res.classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let t = c.row.table_row(i + 1);
            ClassRecord {
                no: t.no,
                data: c.row.data.clone(),
                normal_forms: c.normal_forms.len(),
                relations: t.relations,
                class_group: t.class_group,
                degree_matrix: t.degree_matrix,
                antican_cube: t.antican_cube,
                gorenstein_index: t.gorenstein_index,
            }
        })
        .collect()
}

/// Exhaustive check of a small box in one of the shapes without terminal
/// members; returns the terminal candidates found (expected: none).
pub fn spot_check_empty(case: CaseId, lmax: i64, b: i64) -> (u64, Vec<DefiningData>) {
    let mut n = 0;
    let mut found = Vec::new();
    bounds::spot_box(case, lmax, b, &mut |dd| {
        n += 1;
        if let Ok(row) = filter_pipeline(&dd) {
            found.push(row.data);
        }
    });
    (n, found)
}
