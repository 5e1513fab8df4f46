//! Command-line driver: table conversion, J-function construction,
//! verification suites, and invariant extraction.
//!
//! Exit-code contract (stable, scriptable):
//! * 0 — success, all checks passed
//! * 1 — input error (bad file, bad JSON, bad flag value)
//! * 2 — integrality warning (non-integer entries after `gw2gv`)
//! * 3 — pole-order violation in a constructed J-function
//! * 4 — verification failure (a check in a `verify` suite failed)
//! * 5 — theorem-violation signal (non-integer extracted invariant from
//!   integer input)

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigInt, BigRational};

use crate::arith::rat_i64;
use crate::conifold;
use crate::formats::{
    parse_basis_label, rational_string, read_json, write_json, GeometryFile, JFunctionFile,
    QKEntryJson, QKTableFile, TableFile,
};
use crate::geometry::{gv_from_gw, gw_from_gv, total_degree, CY3Data, GVTable};
use crate::jfunction::{
    build_jtilde, extract_qk, gv_from_qk, pole_report, qk_leading_table, verify_expansion_lemmas,
    verify_fake_identity, JFunction,
};
use crate::report::{CheckItem, Report};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INTEGRALITY: i32 = 2;
pub const EXIT_POLE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;
pub const EXIT_THEOREM: i32 = 5;

/// Exact-arithmetic toolkit for the genus-zero correspondence between
/// Gopakumar-Vafa invariants and quantum K-theory.
#[derive(Parser, Debug)]
#[command(name = "qkgv", version, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Convert between Gopakumar-Vafa and genus-zero Gromov-Witten tables.
    Convert(ConvertArgs),
    /// Build the q-deformed generating function from a geometry and GV table.
    Jfun(JfunArgs),
    /// Run a machine-verification suite and emit a JSON report.
    Verify(VerifyArgs),
    /// Extract quantum K invariants into an integer table.
    QkTable(QkTableArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Direction {
    Gv2gw,
    Gw2gv,
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    /// Conversion direction.
    #[arg(value_enum)]
    pub direction: Direction,
    /// Input table (JSON).
    pub input: PathBuf,
    /// Output table (JSON).
    pub output: PathBuf,
    /// Class-degree cutoff.
    #[arg(long, default_value_t = 5)]
    pub d_max: u32,
}

#[derive(Args, Debug)]
pub struct JfunArgs {
    /// Geometry description (JSON).
    #[arg(long)]
    pub geometry: PathBuf,
    /// Gopakumar-Vafa table (JSON).
    #[arg(long)]
    pub gv: PathBuf,
    /// Class-degree cutoff.
    #[arg(long, default_value_t = 3)]
    pub d_max: u32,
    /// t-degree cutoff for the divisor-insertion expansion.
    #[arg(long, default_value_t = 2)]
    pub dt_max: u32,
    /// Serialized J-function output path.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    /// Pole-expansion closed forms of the kernel sums.
    Lemmas,
    /// Fake-limit identity: value at q -> 1 against the cubing transform.
    Fake,
    /// Pole-order bounds of a constructed or supplied J-function.
    Poles,
    /// Rank-6 ring model of the resolved geometry, end to end.
    Conifold,
    /// GV <-> GW and GV <-> leading-invariant round trips.
    Roundtrip,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    pub suite: Suite,
    /// Geometry description (JSON); defaults to the built-in rank-1 fixture.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Gopakumar-Vafa table (JSON); defaults to the built-in fixture.
    #[arg(long)]
    pub gv: Option<PathBuf>,
    /// Serialized J-function input (poles suite only).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Class-degree cutoff.
    #[arg(long, default_value_t = 3)]
    pub d_max: u32,
    /// t-degree cutoff.
    #[arg(long, default_value_t = 2)]
    pub dt_max: u32,
    /// Laurent expansion order for the fake suite.
    #[arg(long, default_value_t = 4)]
    pub order: i64,
    /// Class-degree cutoff for the conifold suite.
    #[arg(long, default_value_t = 3)]
    pub r_max: u32,
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct QkTableArgs {
    /// Geometry description (JSON).
    #[arg(long)]
    pub geometry: PathBuf,
    /// Gopakumar-Vafa table (JSON).
    #[arg(long)]
    pub gv: PathBuf,
    /// Dual-basis insertion: `phi01` or `phi1_<j>`.
    #[arg(long, default_value = "phi01")]
    pub alpha: String,
    /// Largest q-power to extract.
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    /// Class-degree cutoff.
    #[arg(long, default_value_t = 3)]
    pub d_max: u32,
    /// Output table path.
    #[arg(long)]
    pub output: PathBuf,
}

// ---------------------------------------------------------------------------
// Built-in fixture used when `verify` is run without input files: the rank-1
// geometry with triple intersection 5 and the degree-1 table {1 -> 1}, whose
// closed forms are known exactly.

fn fixture_geometry() -> CY3Data {
    CY3Data::rank1(rat_i64(5))
}

fn fixture_gv() -> GVTable {
    GVTable::rank1(vec![(1, 1)])
}

fn load_geometry(path: &Option<PathBuf>) -> Result<CY3Data> {
    match path {
        Some(p) => read_json::<GeometryFile>(p)?.to_geometry(),
        None => Ok(fixture_geometry()),
    }
}

fn load_gv(path: &Option<PathBuf>) -> Result<GVTable> {
    match path {
        Some(p) => read_json::<TableFile>(p)?.to_gv(),
        None => Ok(fixture_gv()),
    }
}

fn is_integer(r: &BigRational) -> bool {
    r.denom() == &BigInt::from(1)
}

// ---------------------------------------------------------------------------
// Subcommand bodies.  Each returns `Ok(exit_code)`; `Err` maps to a code in
// `run`.

fn cmd_convert(args: &ConvertArgs) -> Result<i32> {
    let table: TableFile = read_json(&args.input)?;
    match args.direction {
        Direction::Gv2gw => {
            let gv = table.to_gv()?;
            let rank = gv
                .entries
                .keys()
                .next()
                .map(|c| c.len())
                .unwrap_or(1);
            let gw = gw_from_gv(&gv, rank, args.d_max);
            write_json(&args.output, &TableFile::from_gw(&gw))?;
            Ok(EXIT_OK)
        }
        Direction::Gw2gv => {
            let gw = table.to_gw()?;
            let rank = gw
                .entries
                .keys()
                .next()
                .map(|c| c.len())
                .unwrap_or(1);
            let gv = gv_from_gw(&gw, rank, args.d_max);
            let warnings = gv.integrality_warnings();
            write_json(&args.output, &TableFile::from_gv(&gv))?;
            if warnings.is_empty() {
                Ok(EXIT_OK)
            } else {
                for c in &warnings {
                    eprintln!(
                        "warning: non-integer invariant at class {:?}: {}",
                        c,
                        rational_string(&gv.get(c))
                    );
                }
                Ok(EXIT_INTEGRALITY)
            }
        }
    }
}

fn cmd_jfun(args: &JfunArgs) -> Result<i32> {
    let geom: CY3Data = read_json::<GeometryFile>(&args.geometry)?.to_geometry()?;
    let gv = read_json::<TableFile>(&args.gv)?.to_gv()?;
    let j = build_jtilde(&geom, &gv, args.d_max, args.dt_max)?;
    write_json(&args.output, &JFunctionFile::from_jfunction(&j))?;
    let checks = pole_report(&j);
    let report = Report::new("jfun", checks);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.all_pass() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_POLE)
    }
}

fn suite_roundtrip(geom: &CY3Data, gv: &GVTable, d: u32) -> Result<Vec<CheckItem>> {
    let mut out = Vec::new();
    let rank = geom.h2rank;
    let gw = gw_from_gv(gv, rank, d);
    let back = gv_from_gw(&gw, rank, d);
    let mut ok = true;
    for (c, v) in &gv.entries {
        if total_degree(c) <= d && &back.get(c) != v {
            ok = false;
            out.push(CheckItem::fail(
                "multiple-cover round trip",
                format!("{:?}", c),
                format!("{} vs {}", rational_string(v), rational_string(&back.get(c))),
            ));
        }
    }
    if ok {
        out.push(CheckItem::pass("multiple-cover round trip", format!("degrees <= {}", d)));
    }
    let j = build_jtilde(geom, gv, d, 0)?;
    let qk = qk_leading_table(&j)?;
    let back2 = gv_from_qk(&qk, geom, d)?;
    let mut ok2 = true;
    for (c, v) in &gv.entries {
        if total_degree(c) <= d && &back2.get(c) != v {
            ok2 = false;
            out.push(CheckItem::fail(
                "leading-invariant round trip",
                format!("{:?}", c),
                format!("{} vs {}", rational_string(v), rational_string(&back2.get(c))),
            ));
        }
    }
    if ok2 {
        out.push(CheckItem::pass(
            "leading-invariant round trip",
            format!("degrees <= {}", d),
        ));
    }
    Ok(out)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let checks = match args.suite {
        Suite::Lemmas => {
            let geom = load_geometry(&args.geometry)?;
            let gv = load_gv(&args.gv)?;
            verify_expansion_lemmas(&geom, &gv, args.d_max, args.dt_max)?
        }
        Suite::Fake => {
            let geom = load_geometry(&args.geometry)?;
            let gv = load_gv(&args.gv)?;
            verify_fake_identity(&geom, &gv, args.d_max, args.dt_max, args.order)?
        }
        Suite::Poles => {
            let j: JFunction = match &args.input {
                Some(p) => read_json::<JFunctionFile>(p)?.to_jfunction()?,
                None => {
                    let geom = load_geometry(&args.geometry)?;
                    let gv = load_gv(&args.gv)?;
                    build_jtilde(&geom, &gv, args.d_max, args.dt_max)?
                }
            };
            pole_report(&j)
        }
        Suite::Conifold => {
            let mut checks = conifold::validate_presentation();
            checks.extend(conifold::verify_small_j_t0(args.r_max)?);
            checks.extend(conifold::verify_small_j_t(
                args.r_max as usize,
                args.dt_max,
            )?);
            checks.extend(conifold::conifold_gv_check(args.d_max.max(6)));
            checks
        }
        Suite::Roundtrip => {
            let geom = load_geometry(&args.geometry)?;
            let gv = load_gv(&args.gv)?;
            suite_roundtrip(&geom, &gv, args.d_max)?
        }
    };
    let name = format!("verify {:?}", args.suite).to_lowercase();
    let report = Report::new(name, checks);
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(out) = &args.output {
        write_json(out, &report)?;
    }
    if report.all_pass() {
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_VERIFICATION)
    }
}

fn cmd_qk_table(args: &QkTableArgs) -> Result<i32> {
    let geom: CY3Data = read_json::<GeometryFile>(&args.geometry)?.to_geometry()?;
    let gv = read_json::<TableFile>(&args.gv)?.to_gv()?;
    let alpha = parse_basis_label(&args.alpha)?;
    let input_integral = gv.entries.values().all(is_integer);
    let j = build_jtilde(&geom, &gv, args.d_max, 0)?;
    let m = vec![0u32; geom.n1];
    let mut entries = Vec::new();
    let mut non_integer = Vec::new();
    for beta in j.instanton.keys() {
        if total_degree(beta) > args.d_max {
            continue;
        }
        let mut values = Vec::new();
        let mut bad = false;
        for k in 0..=args.k_max {
            let v = extract_qk(&j, alpha, k, beta, &m)?;
            if !is_integer(&v) {
                bad = true;
            }
            values.push(rational_string(&v));
        }
        if bad {
            non_integer.push(beta.clone());
        }
        entries.push(QKEntryJson {
            beta: beta.clone(),
            values,
        });
    }
    let table = QKTableFile {
        alpha: args.alpha.clone(),
        k_max: args.k_max,
        entries,
        non_integer: non_integer.clone(),
    };
    write_json(&args.output, &table)?;
    if non_integer.is_empty() || !input_integral {
        Ok(EXIT_OK)
    } else {
        for c in &non_integer {
            eprintln!(
                "theorem violation: non-integer invariant at class {:?} despite integer input",
                c
            );
        }
        Ok(EXIT_THEOREM)
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::PoleOrder { .. } | Error::PoleAtZero => EXIT_POLE,
        Error::VerificationFailed(_) => EXIT_VERIFICATION,
        _ => EXIT_INPUT,
    }
}

/// Run one parsed command; used by `main` and by integration tests.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Convert(a) => cmd_convert(a),
        Command::Jfun(a) => cmd_jfun(a),
        Command::Verify(a) => cmd_verify(a),
        Command::QkTable(a) => cmd_qk_table(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            exit_code_for(&e)
        }
    }
}

/// Parse `std::env::args` and run; returns the process exit code.
pub fn run_from_env() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli),
        Err(e) => {
            // --help / --version are successful outcomes.
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::path::Path;

    fn tmpdir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!("qkgv-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn write_fixture_inputs(dir: &Path) -> (PathBuf, PathBuf) {
        let geo = dir.join("geom.json");
        let gvp = dir.join("gv.json");
        write_json(&geo, &GeometryFile::from_geometry(&fixture_geometry())).unwrap();
        write_json(&gvp, &TableFile::from_gv(&fixture_gv())).unwrap();
        (geo, gvp)
    }

    #[test]
    fn convert_round_trip_files() {
        let dir = tmpdir();
        let input = dir.join("conv-gv.json");
        let mid = dir.join("conv-gw.json");
        let back = dir.join("conv-back.json");
        write_json(&input, &TableFile::from_gv(&fixture_gv())).unwrap();
        let code = cmd_convert(&ConvertArgs {
            direction: Direction::Gv2gw,
            input: input.clone(),
            output: mid.clone(),
            d_max: 5,
        })
        .unwrap();
        assert_eq!(code, EXIT_OK);
        let gw: TableFile = read_json(&mid).unwrap();
        let gwm = gw.to_map().unwrap();
        assert_eq!(gwm[&vec![2u32]], BigRational::new(1.into(), 8.into()));
        assert_eq!(gwm[&vec![5u32]], BigRational::new(1.into(), 125.into()));
        let code = cmd_convert(&ConvertArgs {
            direction: Direction::Gw2gv,
            input: mid,
            output: back.clone(),
            d_max: 5,
        })
        .unwrap();
        assert_eq!(code, EXIT_OK);
        let gv2: TableFile = read_json(&back).unwrap();
        assert_eq!(gv2.to_gv().unwrap().entries, fixture_gv().entries);
    }

    #[test]
    fn convert_flags_non_integer() {
        let dir = tmpdir();
        let input = dir.join("bad-gw.json");
        let out = dir.join("bad-gv.json");
        // GW_4 = 1/63 is not the multiple-cover value of any integer table.
        let mut m = BTreeMap::new();
        m.insert(vec![1u32], rat_i64(1));
        m.insert(vec![4u32], BigRational::new(1.into(), 63.into()));
        write_json(&input, &TableFile::from_map(&m)).unwrap();
        let code = cmd_convert(&ConvertArgs {
            direction: Direction::Gw2gv,
            input,
            output: out,
            d_max: 4,
        })
        .unwrap();
        assert_eq!(code, EXIT_INTEGRALITY);
    }

    #[test]
    fn convert_rejects_bad_file() {
        let dir = tmpdir();
        let input = dir.join("missing-field.json");
        std::fs::write(&input, "{\"entries\": []}").unwrap();
        let out = dir.join("never.json");
        let err = cmd_convert(&ConvertArgs {
            direction: Direction::Gv2gw,
            input,
            output: out,
            d_max: 3,
        });
        assert!(err.is_err());
        assert_eq!(exit_code_for(&err.unwrap_err()), EXIT_INPUT);
    }

    #[test]
    fn jfun_writes_readable_output() {
        let dir = tmpdir();
        let (geo, gvp) = write_fixture_inputs(&dir);
        let out = dir.join("jfun.json");
        let code = cmd_jfun(&JfunArgs {
            geometry: geo,
            gv: gvp,
            d_max: 2,
            dt_max: 1,
            output: out.clone(),
        })
        .unwrap();
        assert_eq!(code, EXIT_OK);
        let file: JFunctionFile = read_json(&out).unwrap();
        let j = file.to_jfunction().unwrap();
        assert_eq!(j.instanton.len(), 2);
    }

    #[test]
    fn verify_suites_pass_on_fixture() {
        for suite in [Suite::Lemmas, Suite::Fake, Suite::Poles, Suite::Roundtrip] {
            let code = cmd_verify(&VerifyArgs {
                suite,
                geometry: None,
                gv: None,
                input: None,
                d_max: 2,
                dt_max: 1,
                order: 3,
                r_max: 2,
                output: None,
            })
            .unwrap();
            assert_eq!(code, EXIT_OK, "suite {:?}", suite);
        }
    }

    #[test]
    fn verify_poles_rejects_corrupted_input() {
        let dir = tmpdir();
        let (geo, gvp) = write_fixture_inputs(&dir);
        let out = dir.join("jfun-corrupt.json");
        cmd_jfun(&JfunArgs {
            geometry: geo,
            gv: gvp,
            d_max: 2,
            dt_max: 0,
            output: out.clone(),
        })
        .unwrap();
        // Raise one pole order beyond the structural bound.
        let mut file: JFunctionFile = read_json(&out).unwrap();
        let term = &mut file.classes[0].components[0].terms[0];
        for d in &mut term.value.den {
            d.mult += 4;
        }
        write_json(&out, &file).unwrap();
        let code = cmd_verify(&VerifyArgs {
            suite: Suite::Poles,
            geometry: None,
            gv: None,
            input: Some(out),
            d_max: 2,
            dt_max: 0,
            order: 3,
            r_max: 2,
            output: None,
        })
        .unwrap();
        assert_eq!(code, EXIT_VERIFICATION);
    }

    #[test]
    fn qk_table_matches_geometric_series_oracle() {
        let dir = tmpdir();
        let (geo, gvp) = write_fixture_inputs(&dir);
        let out = dir.join("qk.json");
        let code = cmd_qk_table(&QkTableArgs {
            geometry: geo,
            gv: gvp,
            alpha: "phi01".into(),
            k_max: 3,
            d_max: 1,
            output: out.clone(),
        })
        .unwrap();
        assert_eq!(code, EXIT_OK);
        let table: QKTableFile = read_json(&out).unwrap();
        let row = table
            .entries
            .iter()
            .find(|e| e.beta == vec![1u32])
            .unwrap();
        // 3/(1-q) - 2/(1-q)^2 expands to 3 - 2(k+1) at q^k.
        assert_eq!(row.values, vec!["1", "-1", "-3", "-5"]);
    }
}
