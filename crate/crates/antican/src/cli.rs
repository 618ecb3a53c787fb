//! Command-line frontend: `check`, `invariants`, `acomplex`, `classify`, `diff`.
//!
//! Every subcommand writes to a caller-supplied sink so it can be driven
//! from tests. Exit status reflects operational success only.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::acomplex::{
    anticanonical_polyhedron, build_complex, oracle_complex, verdict_from_complex, AcError, ACComplex,
    SingularityVerdict, Witness,
};
use crate::classify::table::{read_table, reference_table, write_table};
use crate::classify::{
    diff_table, records, run_classification, spot_check_empty, CaseId, ClassifyError, DiffReport, RunConfig,
    RunResult, TableRow,
};
use crate::exact::{parse_rat, rat_to_string, Rat};
use crate::invariants::{class_group_string, distinctness_key, invariant_set, InvError};
use crate::rap::{cox_presentation, from_json, grading, is_fano_graded, Class, DefiningData, Grading, RapError};
use crate::tropfan::{elementary_big_cones, ElemBigCone};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "ANTICAN_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse input: {0}")]
    Parse(String),
    #[error("data does not define a Fano variety")]
    NotFano,
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Rap(#[from] RapError),
    #[error(transparent)]
    Complex(#[from] AcError),
    #[error(transparent)]
    Invariants(#[from] InvError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    /// Stable error tag for structured output.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "ParseError",
            CliError::NotFano => "NotFano",
            CliError::Argument(_) => "InvalidArgument",
            CliError::Rap(_) => "InvalidData",
            CliError::Complex(_) => "ComplexError",
            CliError::Invariants(_) => "InvariantError",
            CliError::Classify(_) => "ClassifyError",
            CliError::Io(_) => "IoError",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Argument(_) => 2,
            CliError::NotFano => 3,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": self.kind(), "message": self.to_string() })
    }
}

#[derive(Debug, Parser)]
#[command(name = "antican", version, about = "Anticanonical complexes of Fano varieties with complexity-one torus action")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fano test, singularity verdict with witnesses, elementary big cones.
    Check {
        /// Defining data JSON (`-` for stdin).
        input: PathBuf,
        /// Also decide ε-log-terminality, e.g. `1/2`.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Class group, degrees, Cox ring, (−K)³ and Gorenstein index.
    Invariants {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Anticanonical polyhedron and complex as JSON.
    Acomplex {
        input: PathBuf,
        /// Dump all lattice points of `A⁰` and of each leaf.
        #[arg(long)]
        lattice_points: bool,
        #[arg(long)]
        eps: Option<String>,
        /// Build the complex by dual-polytope refinement instead of the closed formulas.
        #[arg(long)]
        oracle: bool,
    },
    /// Bounded enumeration; prints a diff against the expected table.
    Classify {
        /// Comma-separated cases among i…viii.
        #[arg(long, value_delimiter = ',', default_value = "i,ii,iii,iv,v,vi,vii,viii")]
        cases: Vec<String>,
        #[arg(long, env = WORKERS_ENV)]
        workers: Option<usize>,
        /// Directory of per-shard checkpoints; rerunning resumes.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
        #[arg(long)]
        out_json: Option<PathBuf>,
        /// Print per-gate rejection counts.
        #[arg(long)]
        stats: bool,
        #[arg(long)]
        progress: bool,
        /// Expected table CSV (the bundled copy by default).
        #[arg(long)]
        seed_table: Option<PathBuf>,
    },
    /// Compares a result CSV against the expected table.
    Diff {
        result: PathBuf,
        #[arg(long)]
        seed_table: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

/// Small exhaustive boxes for the shapes without terminal members.
pub fn spot_box_params(case: CaseId) -> (i64, i64) {
    match case {
        CaseId::III => (2, 1),
        CaseId::V | CaseId::VII => (3, 1),
        _ => (4, 2),
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Check { input, eps, json } => cmd_check(&read_data(input)?, parse_eps(eps.as_deref())?.as_ref(), *json, out),
        Command::Invariants { input, json } => cmd_invariants(&read_data(input)?, *json, out),
        Command::Acomplex { input, lattice_points, eps, oracle } => {
            cmd_acomplex(&read_data(input)?, *lattice_points, parse_eps(eps.as_deref())?.as_ref(), *oracle, out)
        }
        Command::Classify { cases, workers, checkpoint, out_csv, out_json, stats, progress, seed_table } => {
            let cases = cases
                .iter()
                .map(|c| CaseId::parse(c).ok_or_else(|| CliError::Argument(format!("unknown case {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            let expected = load_expected(seed_table.as_deref())?;
            for p in [out_csv, out_json].into_iter().flatten() {
                check_parent(p)?;
            }
            let mut cfg = RunConfig::new(cases);
            cfg.workers = workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            cfg.checkpoint = checkpoint.clone();
            cfg.progress = *progress;
            cmd_classify(&cfg, &expected, out_csv.as_deref(), out_json.as_deref(), *stats, out)
        }
        Command::Diff { result, seed_table, json } => {
            let expected = load_expected(seed_table.as_deref())?;
            let res = read_table(File::open(result)?)?;
            cmd_diff(&res, &expected, *json, out)
        }
    }
}

fn read_data(path: &Path) -> Result<DefiningData, CliError> {
    let mut s = String::new();
    if path.as_os_str() == "-" {
        io::stdin().read_to_string(&mut s)?;
    } else {
        s = std::fs::read_to_string(path)?;
    }
    from_json(&s).map_err(CliError::Parse)
}

fn parse_eps(eps: Option<&str>) -> Result<Option<Rat>, CliError> {
    let Some(s) = eps else { return Ok(None) };
    let q = parse_rat(s).ok_or_else(|| CliError::Argument(format!("ε must be p/q, got {s:?}")))?;
    if q <= Rat::from_integer(0.into()) || q > Rat::from_integer(1.into()) {
        return Err(CliError::Argument(format!("ε must lie in (0, 1], got {s}")));
    }
    Ok(Some(q))
}

fn check_parent(p: &Path) -> Result<(), CliError> {
    match p.parent() {
        Some(d) if !d.as_os_str().is_empty() && !d.is_dir() => {
            Err(CliError::Argument(format!("output directory {} does not exist", d.display())))
        }
        _ => Ok(()),
    }
}

fn load_expected(seed: Option<&Path>) -> Result<Vec<TableRow>, CliError> {
    Ok(match seed {
        Some(p) => read_table(File::open(p)?)?,
        None => reference_table(),
    })
}

fn fano_grading(dd: &DefiningData) -> Result<Grading, CliError> {
    dd.validate(false)?;
    let g = grading(dd)?;
    if !is_fano_graded(&g) {
        return Err(CliError::NotFano);
    }
    Ok(g)
}

fn class_json(c: &Class) -> Value {
    json!({
        "free": c.free.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "torsion": c.torsion.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

fn cone_json(c: &ElemBigCone) -> Value {
    json!({
        "cols": c.cols,
        "l": c.l,
        "ell_rho": c.ell_rho.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "ell": c.ell.to_string(),
        "v": c.v.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "c": c.c.to_string(),
        "v_prime": c.v_prime.as_ref().map(|v| v.iter().map(rat_to_string).collect::<Vec<_>>()),
        "discrepancy": (!num::Zero::is_zero(&c.c)).then(|| rat_to_string(&c.discrepancy())),
    })
}

fn witness_line(w: &Witness) -> String {
    match w {
        Witness::Cone { cols, l, ell } => format!("witness cone cols={cols:?} l={l:?} ell={ell}"),
        Witness::Point { flag, point } => format!("witness {flag} point={point:?}"),
    }
}

fn verdict_of(dd: &DefiningData, g: &Grading, eps: Option<&Rat>) -> Result<SingularityVerdict, CliError> {
    Ok(crate::acomplex::classify(dd, g, eps)?)
}

/// Fano flag, verdict with witnesses and the elementary big cones.
pub fn cmd_check(dd: &DefiningData, eps: Option<&Rat>, as_json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let g = fano_grading(dd)?;
    let v = verdict_of(dd, &g, eps)?;
    let cones = elementary_big_cones(dd, &g);
    if as_json {
        let doc = json!({
            "fano": true,
            "verdict": v,
            "elementary_big_cones": cones.iter().map(cone_json).collect::<Vec<_>>(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        return Ok(());
    }
    writeln!(out, "fano: true")?;
    writeln!(out, "log_terminal: {}", v.log_terminal)?;
    writeln!(out, "canonical: {}", v.canonical)?;
    writeln!(out, "terminal: {}", v.terminal)?;
    if let Some((e, ok)) = &v.eps_log_terminal {
        writeln!(out, "eps_log_terminal({e}): {ok}")?;
    }
    for w in &v.witnesses {
        writeln!(out, "{}", witness_line(w))?;
    }
    writeln!(out, "elementary big cones: {}", cones.len())?;
    for c in &cones {
        let disc = if num::Zero::is_zero(&c.c) { "-".to_string() } else { rat_to_string(&c.discrepancy()) };
        writeln!(
            out,
            "  cols={:?} l={:?} ell_sigma={} c_sigma={} discrepancy={}",
            c.cols, c.l, c.ell, c.c, disc
        )?;
    }
    Ok(())
}

pub fn cmd_invariants(dd: &DefiningData, as_json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let g = fano_grading(dd)?;
    let inv = invariant_set(dd, &g)?;
    let cox = cox_presentation(dd)?;
    let key = distinctness_key(dd, &g)?;
    let cg = class_group_string(g.free_rank, &g.torsion);
    let cube = rat_to_string(&inv.antican_cube);
    let degrees = crate::classify::degree_matrix_string(&g);
    if as_json {
        let doc = json!({
            "class_group": cg,
            "degrees": g.degrees.iter().map(class_json).collect::<Vec<_>>(),
            "degree_matrix": degrees,
            "kappa": class_json(&g.kappa),
            "relations": cox.render(),
            "antican_cube": cube,
            "gorenstein_index": inv.gorenstein_index,
            "key": key.describe(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
        return Ok(());
    }
    writeln!(out, "class_group: {cg}")?;
    writeln!(out, "degree_matrix: {degrees}")?;
    writeln!(out, "relations: {}", cox.render())?;
    writeln!(out, "antican_cube: {cube}")?;
    writeln!(out, "gorenstein_index: {}", inv.gorenstein_index)?;
    writeln!(out, "key: {}", key.describe())?;
    Ok(())
}

fn points_json(pts: &[Vec<i64>]) -> Value {
    json!(pts)
}

/// JSON document for the complex of `dd`.
pub fn acomplex_json(dd: &DefiningData, lattice_points: bool, eps: Option<&Rat>, oracle: bool) -> Result<Value, CliError> {
    let g = fano_grading(dd)?;
    let cx: ACComplex = if oracle { oracle_complex(dd, &g)? } else { build_complex(dd, &g)? };
    let ax = anticanonical_polyhedron(dd, &g)?;
    let verdict = verdict_from_complex(dd, &cx, eps);
    let mut doc = json!({
        "r": cx.r,
        "s": cx.s,
        "construction": if oracle { "oracle" } else { "formula" },
        "anticanonical_polyhedron": {
            "vertices": ax.vertices.iter().map(|v| v.iter().map(rat_to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        },
        "dimension": cx.dimension(),
        "complex": cx.to_json(),
        "verdict": verdict,
    });
    if lattice_points {
        let parts = cx.lattice_points_by_part();
        doc["lattice_points"] = json!({
            "lineality": points_json(&parts[0]),
            "leaves": parts[1..].iter().map(|p| points_json(p)).collect::<Vec<_>>(),
        });
    }
    Ok(doc)
}

pub fn cmd_acomplex(
    dd: &DefiningData,
    lattice_points: bool,
    eps: Option<&Rat>,
    oracle: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let doc = acomplex_json(dd, lattice_points, eps, oracle)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"))?;
    Ok(())
}

pub fn cmd_classify(
    cfg: &RunConfig,
    expected: &[TableRow],
    out_csv: Option<&Path>,
    out_json: Option<&Path>,
    stats: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let res: RunResult = run_classification(cfg)?;
    for &case in &res.empty_cases {
        let (lmax, b) = spot_box_params(case);
        let (n, found) = spot_check_empty(case, lmax, b);
        writeln!(out, "case ({}): spot box lmax={lmax} b={b}: {n} candidates, {} terminal", case.name(), found.len())?;
    }
    let table = res.table();
    if let Some(p) = out_csv {
        write_table(File::create(p)?, &table)?;
    }
    if let Some(p) = out_json {
        serde_json::to_writer_pretty(File::create(p)?, &records(&res)).map_err(|e| CliError::Io(e.into()))?;
    }
    if stats {
        writeln!(out, "{}", serde_json::to_string_pretty(&res.stats).expect("json"))?;
    }
    writeln!(out, "classes: {}", table.len())?;
    let rep = diff_table(&table, expected)?;
    print_diff(&rep, &table, out)
}

fn print_diff(rep: &DiffReport, result: &[TableRow], out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "{}", rep.summary())?;
    for no in &rep.missing {
        writeln!(out, "missing: expected row {no}")?;
    }
    for no in &rep.extra {
        let row = result.iter().find(|r| r.no == *no);
        match row {
            Some(r) => writeln!(
                out,
                "extra: row {no}: {} | {} | {} | {} | {}",
                r.relations, r.class_group, r.degree_matrix, r.antican_cube, r.gorenstein_index
            )?,
            None => writeln!(out, "extra: row {no}")?,
        }
    }
    for d in &rep.field_diffs {
        writeln!(
            out,
            "field diff: expected row {} vs row {}: {} expected {} got {}",
            d.expected_no, d.result_no, d.field, d.expected, d.actual
        )?;
    }
    Ok(())
}

pub fn cmd_diff(result: &[TableRow], expected: &[TableRow], as_json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let rep = diff_table(result, expected)?;
    if as_json {
        writeln!(out, "{}", serde_json::to_string_pretty(&rep).expect("json"))?;
        return Ok(());
    }
    print_diff(&rep, result, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rap::tests::{e6, quadric};
    use crate::rap::to_json;
    use crate::tropfan::tests::triple_three;

    fn text(f: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> String {
        let mut buf = Vec::new();
        f(&mut buf).expect("command succeeds");
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn check_reports_terminal_quadric() {
        let s = text(|o| cmd_check(&quadric(), None, false, o));
        assert!(s.contains("terminal: true"), "{s}");
        assert!(s.contains("fano: true"));
    }

    #[test]
    fn check_reports_non_log_terminal_with_cone() {
        let dd = triple_three();
        match fano_grading(&dd) {
            Ok(_) => {
                let s = text(|o| cmd_check(&dd, None, false, o));
                assert!(s.contains("log_terminal: false"), "{s}");
                assert!(s.contains("witness cone"), "{s}");
            }
            Err(e) => assert_eq!(e.kind(), "NotFano"),
        }
    }

    #[test]
    fn malformed_input_is_parse_error() {
        let dir = std::env::temp_dir().join(format!("antican-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.json");
        std::fs::write(&p, "{ not json").unwrap();
        let cli = Cli::parse_from(["antican", "check", p.to_str().unwrap()]);
        let err = run(&cli, &mut Vec::new()).unwrap_err();
        assert_eq!(err.kind(), "ParseError");
        assert_ne!(err.exit_code(), 0);
    }

    #[test]
    fn eps_must_be_positive() {
        assert!(parse_eps(Some("0/1")).is_err());
        assert!(parse_eps(Some("abc")).is_err());
        assert_eq!(parse_eps(Some("1/2")).unwrap(), Some(crate::exact::rat(1, 2)));
    }

    #[test]
    fn acomplex_output_reparses() {
        let doc = acomplex_json(&e6(), true, Some(&crate::exact::rat(1, 2)), false).unwrap();
        let s = serde_json::to_string(&doc).unwrap();
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back["anticanonical_polyhedron"]["vertices"].as_array().unwrap().len(), 6);
        assert_eq!(back["lattice_points"]["leaves"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn invariants_json_round_trip() {
        let s = text(|o| cmd_invariants(&quadric(), true, o));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["antican_cube"], "54");
        assert_eq!(v["gorenstein_index"], "1");
        let dd2 = from_json(&to_json(&quadric())).unwrap();
        assert_eq!(dd2, quadric());
    }

    #[test]
    fn diff_of_reference_is_clean() {
        let t = reference_table();
        let s = text(|o| cmd_diff(&t, &t, false, o));
        assert!(s.starts_with("40/40 matched"), "{s}");
    }
}
