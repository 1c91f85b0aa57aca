//! The `opcmlink` command line: law checking, natural join of CSV files,
//! hierarchy generalization, frequency queries along the information order,
//! and uniqueness audits.
//!
//! Everything runs in process and returns an [`Outcome`], so the binary is a
//! thin wrapper and tests can call [`run`] directly.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;
use serde::Serialize;

use crate::error::Error;
use crate::grothendieck::{check_completion_props, check_functor, groth_opcm};
use crate::instances::{flat, possibility_of_opcm, possibility_of_set, prefix_opcm, PrefixCodeSet};
use crate::opcm::{check_opcm_laws, product, FiniteOpcm};
use crate::relational::{
    check_join_is_boxplus, natural_join, relational_family, AttributeSchema, Hierarchy, Relation,
};
use crate::report::LawReport;

pub const EXIT_OK: i32 = 0;
/// A law failed, the join was inconsistent, or a value was not covered.
pub const EXIT_FAILURE: i32 = 1;
/// Bad arguments, unreadable input or malformed files.
pub const EXIT_USAGE: i32 = 2;

/// Value written in place of a suppressed cell.
pub const SUPPRESSED: &str = "*";

#[derive(Debug, Parser)]
#[command(
    name = "opcmlink",
    version,
    about = "Information-order algebra for linking and generalizing tabular data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the OPCM laws of a built-in or file-backed instance.
    ///
    /// Targets: flat:<n>, prefix:<codes file>, possibility:<n>,
    /// possibility-opcm:<codes or dump file>, product:<target>,<target>,
    /// groth:<schema file>, table:<dump file>.
    CheckLaws(CheckLawsArgs),
    /// Natural join of two CSV files on their shared columns.
    ///
    /// Inputs are read as sets: duplicate rows collapse, and every output
    /// row appears exactly once. Output rows are sorted; columns are those
    /// of A followed by the new columns of B.
    Join(JoinArgs),
    /// Replace a column by its ancestors at a hierarchy level.
    ///
    /// Row order and multiplicities are kept.
    Generalize(GeneralizeArgs),
    /// Fraction of rows whose value lies above a code in the hierarchy.
    Freq(FreqArgs),
    /// Equivalence-class sizes over a set of quasi-identifier columns.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct CheckLawsArgs {
    pub target: String,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
    /// Print the canonical table dump instead of checking.
    #[arg(long)]
    pub dump: bool,
}

#[derive(Debug, Args)]
pub struct JoinArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Output file; the joined CSV goes to stdout when omitted.
    pub out: Option<PathBuf>,
    /// Attribute domains as JSON `{attr: [values]}`; inferred from the data otherwise.
    #[arg(long)]
    pub schema: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GeneralizeArgs {
    pub data: PathBuf,
    /// Output file; stdout when omitted.
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub attr: String,
    /// Level name or number (0 is the root).
    #[arg(long)]
    pub level: String,
    #[arg(long)]
    pub hierarchy: PathBuf,
    /// Columns to suppress with `*`.
    #[arg(long)]
    pub drop: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub attr: String,
    #[arg(long = "at-least")]
    pub at_least: String,
    #[arg(long)]
    pub hierarchy: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    pub data: PathBuf,
    /// Quasi-identifier columns, repeated or comma separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub quasi: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }

    fn note(mut self, notes: &[String]) -> Self {
        for n in notes {
            self.stderr.push_str(&format!("note: {n}\n"));
        }
        self
    }
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EXIT_USAGE, e.to_string())
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure(EXIT_USAGE, message.into())
}

fn semantic(message: impl Into<String>) -> Failure {
    Failure(EXIT_FAILURE, message.into())
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            }
        }
    }
}

pub fn execute(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::CheckLaws(a) => cmd_check_laws(&a),
        Command::Join(a) => cmd_join(&a),
        Command::Generalize(a) => cmd_generalize(&a),
        Command::Freq(a) => cmd_freq(&a),
        Command::Audit(a) => cmd_audit(&a),
    };
    result.unwrap_or_else(|Failure(code, msg)| Outcome::fail(code, msg))
}

/// A CSV file with a header; rows keep their order and multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub source: Option<PathBuf>,
}

impl Dataset {
    pub fn parse(text: &str) -> crate::Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader
            .headers()
            .map_err(|e| crate::error::structural(format!("CSV header: {e}")))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut seen = BTreeSet::new();
        if let Some(dup) = header.iter().find(|h| !seen.insert(h.as_str())) {
            return Err(crate::error::structural(format!(
                "column {dup:?} appears twice"
            )));
        }
        let rows = reader
            .records()
            .map(|r| {
                r.map(|r| r.iter().map(str::to_string).collect())
                    .map_err(|e| crate::error::structural(format!("CSV: {e}")))
            })
            .collect::<crate::Result<Vec<Vec<String>>>>()?;
        Ok(Dataset {
            header,
            rows,
            source: None,
        })
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            crate::error::structural(format!("cannot read {}: {e}", path.display()))
        })?;
        let mut d = Self::parse(&text)?;
        d.source = Some(path.to_path_buf());
        Ok(d)
    }

    pub fn column(&self, name: &str) -> crate::Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| crate::error::structural(format!("no column {name:?}")))
    }

    /// Values observed per column.
    pub fn observed(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (c, h) in self.header.iter().enumerate() {
            out.entry(h.clone())
                .or_default()
                .extend(self.rows.iter().map(|r| r[c].clone()));
        }
        out
    }

    /// The set of rows as a relation, and the number of duplicates dropped.
    pub fn to_relation(&self, schema: &AttributeSchema) -> crate::Result<(Relation, usize)> {
        let r = Relation::from_rows(schema, &self.header, &self.rows)?;
        let dropped = self.rows.len() - r.len();
        Ok((r, dropped))
    }

    /// Renders a relation with columns in `header` order, rows sorted.
    pub fn from_relation(r: &Relation, header: &[String]) -> crate::Result<Self> {
        let attrs = r.attrs();
        let cols: Vec<usize> = header
            .iter()
            .map(|h| {
                attrs
                    .iter()
                    .position(|a| a == h)
                    .ok_or_else(|| crate::error::structural(format!("no column {h:?}")))
            })
            .collect::<crate::Result<_>>()?;
        let mut rows: Vec<Vec<String>> = r
            .tuples()
            .iter()
            .map(|t| cols.iter().map(|&c| t[c].clone()).collect())
            .collect();
        rows.sort();
        Ok(Dataset {
            header: header.to_vec(),
            rows,
            source: None,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for r in &self.rows {
            w.write_record(r).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("CSV of UTF-8 fields")
    }
}

/// Builds the OPCM named by a check-laws target.
pub fn build_target(target: &str) -> crate::Result<FiniteOpcm> {
    let (kind, arg) = target
        .split_once(':')
        .ok_or_else(|| crate::error::structural(format!("target {target:?} has no kind")))?;
    let count = |arg: &str| {
        arg.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| {
            crate::error::structural(format!("{kind}: expected a positive count, found {arg:?}"))
        })
    };
    match kind {
        "flat" => flat((1..=count(arg)?).map(|i| format!("v{i}"))),
        "possibility" => possibility_of_set((1..=count(arg)?).map(|i| i.to_string())),
        "prefix" => prefix_opcm(&PrefixCodeSet::load(Path::new(arg))?),
        "possibility-opcm" => possibility_of_opcm(&load_opcm(Path::new(arg))?),
        "table" => FiniteOpcm::parse_dump(&read(Path::new(arg))?),
        "product" => {
            let (l, r) = split_product(arg).ok_or_else(|| {
                crate::error::structural(format!("product needs two targets, found {arg:?}"))
            })?;
            product(&build_target(l)?, &build_target(r)?)
        }
        _ => Err(crate::error::structural(format!(
            "unknown target kind {kind:?}"
        ))),
    }
}

/// Splits `a,b` at the comma that leaves a well-formed left target, so
/// nested products work as `product:product:flat:1,flat:2,flat:3`.
fn split_product(arg: &str) -> Option<(&str, &str)> {
    let mut depth = 0usize;
    for (i, c) in arg.char_indices() {
        if arg[i..].starts_with("product:") {
            depth += 1;
        }
        if c == ',' {
            if depth == 0 {
                return Some((&arg[..i], &arg[i + 1..]));
            }
            depth -= 1;
        }
    }
    None
}

fn read(path: &Path) -> crate::Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| crate::error::structural(format!("cannot read {}: {e}", path.display())))
}

/// A canonical dump, or else a prefix-code file.
fn load_opcm(path: &Path) -> crate::Result<FiniteOpcm> {
    let text = read(path)?;
    if text.trim_start().starts_with("# opcm") {
        FiniteOpcm::parse_dump(&text)
    } else {
        prefix_opcm(&PrefixCodeSet::parse(&text)?)
    }
}

fn render(report: &LawReport, json: bool) -> String {
    if json {
        serde_json::to_string_pretty(report).expect("reports serialize") + "\n"
    } else {
        format!("{report}\n")
    }
}

fn cmd_check_laws(a: &CheckLawsArgs) -> CliResult<Outcome> {
    let report = if let Some(path) = a.target.strip_prefix("groth:") {
        if a.dump {
            let rf = relational_family(&AttributeSchema::load(Path::new(path))?)?;
            return Ok(Outcome::ok(groth_opcm(rf.family())?.dump()));
        }
        let schema = AttributeSchema::load(Path::new(path))?;
        let rf = relational_family(&schema)?;
        let mut report = LawReport::new(format!("completion over {}", schema.attrs().join(", ")));
        report.extend(check_functor(rf.family())?);
        report.extend(check_completion_props(rf.family())?);
        report.extend(check_opcm_laws(&groth_opcm(rf.family())?)?);
        report.extend(check_join_is_boxplus(&schema)?);
        report
    } else {
        let m = build_target(&a.target)?;
        if a.dump {
            return Ok(Outcome::ok(m.dump()));
        }
        let mut report = check_opcm_laws(&m)?;
        report.subject = a.target.clone();
        report
    };
    let code = if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    Ok(Outcome {
        code,
        stdout: render(&report, a.json),
        stderr: String::new(),
    })
}

fn inferred_schema(inputs: &[&Dataset]) -> CliResult<AttributeSchema> {
    let mut domains: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for d in inputs {
        for (attr, values) in d.observed() {
            domains.entry(attr).or_default().extend(values);
        }
    }
    Ok(AttributeSchema::new(
        domains
            .into_iter()
            .map(|(a, v)| (a, v.into_iter().collect::<Vec<_>>())),
    )?)
}

fn nonempty(d: &Dataset, what: &Path) -> CliResult<()> {
    if d.rows.is_empty() {
        return Err(usage(format!("{} has no rows", what.display())));
    }
    Ok(())
}

fn cmd_join(a: &JoinArgs) -> CliResult<Outcome> {
    let left = Dataset::load(&a.a)?;
    let right = Dataset::load(&a.b)?;
    nonempty(&left, &a.a)?;
    nonempty(&right, &a.b)?;
    let schema = match &a.schema {
        Some(p) => AttributeSchema::load(p)?,
        None => inferred_schema(&[&left, &right])?,
    };
    let mut notes = Vec::new();
    let (r, dr) = left.to_relation(&schema)?;
    let (s, ds) = right.to_relation(&schema)?;
    for (n, path) in [(dr, &a.a), (ds, &a.b)] {
        if n > 0 {
            log::warn!("{}: {n} duplicate rows collapsed", path.display());
            notes.push(format!("{}: {n} duplicate rows collapsed", path.display()));
        }
    }
    let Some(joined) = natural_join(&r, &s)? else {
        return Ok(Outcome::fail(EXIT_FAILURE, "inconsistent: empty join").note(&notes));
    };
    let mut header = left.header.clone();
    header.extend(
        right
            .header
            .iter()
            .filter(|h| !left.header.contains(h))
            .cloned(),
    );
    let out = Dataset::from_relation(&joined, &header)?.to_csv();
    let counts = format!(
        "{}: {} rows, {}: {} rows, join: {} rows\n",
        a.a.display(),
        r.len(),
        a.b.display(),
        s.len(),
        joined.len()
    );
    let outcome = match &a.out {
        Some(path) => {
            write(path, &out)?;
            Outcome::ok(counts)
        }
        None => Outcome {
            code: EXIT_OK,
            stdout: out,
            stderr: counts,
        },
    };
    Ok(outcome.note(&notes))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
}

fn hierarchy_for(path: &Path, attr: &str) -> CliResult<Hierarchy> {
    let mut all = Hierarchy::load(path)?;
    all.remove(attr)
        .ok_or_else(|| usage(format!("{} has no hierarchy for {attr:?}", path.display())))
}

fn cmd_generalize(a: &GeneralizeArgs) -> CliResult<Outcome> {
    let mut data = Dataset::load(&a.data)?;
    let col = data.column(&a.attr)?;
    let drops = a
        .drop
        .iter()
        .map(|d| data.column(d))
        .collect::<crate::Result<Vec<_>>>()?;
    let h = hierarchy_for(&a.hierarchy, &a.attr)?;
    let level = h.level(&a.level)?;
    for row in &mut data.rows {
        let up = h
            .ancestor(&row[col], level)
            .map_err(|e| semantic(e.to_string()))?;
        row[col] = up.to_string();
        for &d in &drops {
            row[d] = SUPPRESSED.to_string();
        }
    }
    let out = data.to_csv();
    match &a.out {
        Some(path) => {
            write(path, &out)?;
            Ok(Outcome::ok(format!(
                "{} rows written to {}\n",
                data.rows.len(),
                path.display()
            )))
        }
        None => Ok(Outcome::ok(out)),
    }
}

fn decimal(r: Ratio<usize>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Serialize)]
struct FreqJson {
    attr: String,
    at_least: String,
    matching: usize,
    total: usize,
    probability: String,
    decimal: f64,
}

/// `Σ_{code ⪯ Q} count(Q) / total` over the column's values.
pub fn frequency_at_least(
    data: &Dataset,
    attr: &str,
    code: &str,
    h: &Hierarchy,
) -> crate::Result<(usize, usize)> {
    let col = data.column(attr)?;
    if h.level_of(code).is_none() {
        return Err(crate::error::precondition(format!(
            "{code:?} is not a hierarchy node"
        )));
    }
    let mut matching = 0;
    for row in &data.rows {
        if h.level_of(&row[col]).is_none() {
            return Err(crate::error::precondition(format!(
                "value {:?} is not a hierarchy node",
                row[col]
            )));
        }
        if h.leq(code, &row[col]) {
            matching += 1;
        }
    }
    Ok((matching, data.rows.len()))
}

fn cmd_freq(a: &FreqArgs) -> CliResult<Outcome> {
    let data = Dataset::load(&a.data)?;
    nonempty(&data, &a.data)?;
    data.column(&a.attr)?;
    let h = hierarchy_for(&a.hierarchy, &a.attr)?;
    let (matching, total) =
        frequency_at_least(&data, &a.attr, &a.at_least, &h).map_err(|e| semantic(e.to_string()))?;
    let p = Ratio::new(matching, total);
    let text = if a.json {
        let j = FreqJson {
            attr: a.attr.clone(),
            at_least: a.at_least.clone(),
            matching,
            total,
            probability: p.to_string(),
            decimal: decimal(p),
        };
        serde_json::to_string_pretty(&j).expect("plain struct") + "\n"
    } else {
        format!("{p} ({})\n", decimal(p))
    };
    Ok(Outcome::ok(text))
}

/// Class sizes of the projection onto the quasi-identifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Audit {
    pub quasi: Vec<String>,
    pub rows: usize,
    pub classes: usize,
    /// Class size to number of classes of that size.
    pub histogram: BTreeMap<usize, usize>,
    /// Rows alone in their class.
    pub unique: usize,
}

pub fn audit(data: &Dataset, quasi: &[String]) -> crate::Result<Audit> {
    let cols = quasi
        .iter()
        .map(|q| data.column(q))
        .collect::<crate::Result<Vec<_>>>()?;
    let mut classes: BTreeMap<Vec<&str>, usize> = BTreeMap::new();
    for row in &data.rows {
        *classes
            .entry(cols.iter().map(|&c| row[c].as_str()).collect())
            .or_default() += 1;
    }
    let mut histogram = BTreeMap::new();
    for &size in classes.values() {
        *histogram.entry(size).or_default() += 1;
    }
    Ok(Audit {
        quasi: quasi.to_vec(),
        rows: data.rows.len(),
        classes: classes.len(),
        unique: histogram.get(&1).copied().unwrap_or(0),
        histogram,
    })
}

fn cmd_audit(a: &AuditArgs) -> CliResult<Outcome> {
    let data = Dataset::load(&a.data)?;
    nonempty(&data, &a.data)?;
    let report = audit(&data, &a.quasi)?;
    if a.json {
        return Ok(Outcome::ok(
            serde_json::to_string_pretty(&report).expect("plain struct") + "\n",
        ));
    }
    let mut s = String::new();
    writeln!(s, "quasi-identifiers: {}", report.quasi.join(", ")).unwrap();
    writeln!(s, "rows: {}", report.rows).unwrap();
    writeln!(s, "classes: {}", report.classes).unwrap();
    for (size, n) in &report.histogram {
        writeln!(s, "  size {size}: {n} classes").unwrap();
    }
    let fraction = decimal(Ratio::new(report.unique, report.rows));
    writeln!(
        s,
        "unique rows: {}/{} ({fraction})",
        report.unique, report.rows
    )
    .unwrap();
    Ok(Outcome::ok(s))
}
