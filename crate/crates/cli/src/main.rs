use std::io::{self, Write};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use ussort_core::bijections::{self, AntichainMap, CellMatrix, PalloDecomposition, ParkingFunction};
use ussort_core::dyck::{self, DyckPath};
use ussort_core::harness::{self, FormulaId, Lattice, Suite};
use ussort_core::noncross::{self, NCInterval};
use ussort_core::perm::{self, format_patterns, parse_patterns, Pattern};
use ussort_core::series::{self, SeriesKind};
use ussort_core::sliding::{self, SlideOp};
use ussort_core::stacksort::{self, FertilityMethod};
use ussort_core::{limits, Error, Limits, Permutation};

#[derive(Parser)]
#[command(name = "ussort", version, about = "Stack-sorting, uniquely sorted permutations, and Catalan interval bijections")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Raise every resource guard to this value.
    #[arg(long, env = limits::LIMIT_ENV, global = true)]
    limit: Option<usize>,
    /// Worker threads for parallel enumeration.
    #[arg(long, global = true)]
    parallel: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the stack-sorting map.
    Sort { perm: Permutation },
    /// Count preimages under the stack-sorting map.
    Fertility {
        perm: Permutation,
        #[arg(long, default_value = "census")]
        method: FertilityMethod,
    },
    /// Canonical hook configuration.
    Chc { perm: Permutation },
    /// Apply a sliding operator (swu, swd, swl, swr).
    Slide {
        op: SlideOp,
        perm: Permutation,
        /// Apply only the indexed operator.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Permutations of length n avoiding the patterns.
    Avoiders {
        n: usize,
        #[command(flatten)]
        select: Selection,
    },
    /// Uniquely sorted permutations of length 2k+1 avoiding the patterns.
    Unique {
        k: usize,
        #[command(flatten)]
        select: Selection,
    },
    /// Intervals of a Catalan poset (stanley, tamari, pallo, antichain, kreweras).
    Intervals {
        poset: Lattice,
        k: usize,
        /// List the intervals instead of counting them.
        #[arg(long)]
        list: bool,
    },
    /// Apply a named bijection or its inverse.
    Bijection {
        map: MapName,
        input: String,
        #[arg(long)]
        inverse: bool,
    },
    /// Counts of uniquely sorted permutations in a class for k = 0..=max_k.
    Sequence {
        patterns: String,
        #[arg(long, default_value_t = 5)]
        max_k: usize,
        /// Compare with the bundled reference counts and the published prefix.
        #[arg(long)]
        check: bool,
    },
    /// Coefficients of C or C_of_xC, or values of a closed form.
    Series { which: String, order: usize },
    /// Run verification suites.
    Verify {
        #[arg(default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 5)]
        max_k: usize,
    },
}

#[derive(Args)]
struct Selection {
    /// Patterns separated by `;`, e.g. `231;4123`.
    #[arg(long, short, default_value = "")]
    patterns: String,
    /// Print the count only.
    #[arg(long)]
    count: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapName {
    Dl,
    Tamari,
    Upsilon,
    UpsilonDirect,
    Pallo,
    Parking,
    #[value(name = "layered_312_231")]
    Layered,
    #[value(name = "swl_132_231")]
    Swl,
    #[value(name = "swd_132_312")]
    Swd,
    Cells,
    Margins,
    Valley,
}

impl MapName {
    fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// One output record.
struct Record {
    input: String,
    operation: String,
    output: Option<String>,
    k: Option<usize>,
    count: Option<BigUint>,
    provenance: &'static str,
    extra: Vec<(&'static str, Value)>,
}

impl Record {
    fn new(input: impl ToString, operation: impl ToString) -> Self {
        Self {
            input: input.to_string(),
            operation: operation.to_string(),
            output: None,
            k: None,
            count: None,
            provenance: "computed",
            extra: Vec::new(),
        }
    }

    fn output(mut self, out: impl ToString) -> Self {
        self.output = Some(out.to_string());
        self
    }

    fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    fn count(mut self, c: impl Into<BigUint>) -> Self {
        self.count = Some(c.into());
        self
    }

    fn provenance(mut self, p: &'static str) -> Self {
        self.provenance = p;
        self
    }

    fn extra(mut self, key: &'static str, v: Value) -> Self {
        self.extra.push((key, v));
        self
    }

    fn failed(&self) -> bool {
        self.extra.iter().any(|(k, v)| *k == "passed" && *v == json!(false))
    }

    fn json(&self) -> Value {
        let count = self.count.as_ref().map(|c| match u64::try_from(c) {
            Ok(v) => json!(v),
            Err(_) => json!(c.to_string()),
        });
        let mut obj = json!({
            "input": self.input,
            "operation": self.operation,
            "output": self.output,
            "k": self.k,
            "count": count,
        });
        for (key, v) in &self.extra {
            obj[*key] = v.clone();
        }
        obj
    }

    fn text(&self) -> String {
        match (&self.output, &self.k, &self.count) {
            (Some(o), _, _) => o.clone(),
            (None, Some(k), Some(c)) => format!("k={k} count={c}"),
            (None, None, Some(c)) => c.to_string(),
            _ => String::new(),
        }
    }
}

type Outcome = Result<Vec<Record>, Error>;

fn emit(records: &[Record], format: Format) -> io::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Text => {
            for r in records {
                writeln!(out, "{}", r.text())?;
            }
        }
        Format::Json => {
            for r in records {
                writeln!(out, "{}", r.json())?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["class", "k", "count", "provenance"])?;
            for r in records {
                let k = r.k.map(|k| k.to_string()).unwrap_or_default();
                let c = r.count.as_ref().map(|c| c.to_string()).unwrap_or_default();
                w.write_record([r.input.as_str(), &k, &c, r.provenance])?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn counting(command: &Command) -> bool {
    match command {
        Command::Avoiders { select, .. } | Command::Unique { select, .. } => select.count,
        Command::Intervals { list, .. } => !list,
        Command::Fertility { .. } | Command::Sequence { .. } | Command::Series { .. } => true,
        _ => false,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.parallel {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if cli.format == Format::Csv && !counting(&cli.command) {
        eprintln!("error: csv output is available for counting commands only");
        return ExitCode::from(2);
    }
    let limits = Limits::new(cli.limit);
    let records = match run(&cli.command, &limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let failed = records.iter().any(Record::failed);
    if let Err(e) = emit(&records, cli.format) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if failed { 1 } else { 0 })
}

fn run(command: &Command, limits: &Limits) -> Outcome {
    match command {
        Command::Sort { perm } => Ok(vec![Record::new(perm, "sort").output(stacksort::stack_sort(perm))]),
        Command::Fertility { perm, method } => {
            let f = stacksort::fertility(perm, *method, limits)?;
            Ok(vec![Record::new(perm, format!("fertility:{method}")).count(f)])
        }
        Command::Chc { perm } => {
            let out = match stacksort::canonical_hooks(perm) {
                Ok(h) => h
                    .hooks
                    .iter()
                    .map(|h| format!("({},{})", h.sw, h.ne))
                    .collect::<Vec<_>>()
                    .join(" "),
                Err(u) => format!("unsorted: no hook for the descent at {}", u.descent_top),
            };
            Ok(vec![Record::new(perm, "chc").output(out)])
        }
        Command::Slide { op, perm, index } => {
            let out = match index {
                Some(i) => sliding::slide_indexed(perm, *op, *i)?,
                None => {
                    perm.require_normalized()?;
                    sliding::slide(perm, *op)
                }
            };
            Ok(vec![Record::new(perm, op).output(out)])
        }
        Command::Avoiders { n, select } => {
            let pats = patterns(&select.patterns)?;
            let class = format_patterns(&pats);
            if select.count {
                let c = perm::par_count_avoiders(*n, &pats, false, |_| true);
                return Ok(vec![Record::new(class, "avoiders").k(*n).count(c).provenance("enumeration")]);
            }
            Ok(perm::enumerate_avoiders(*n, &pats)
                .map(|p| Record::new(&class, "avoiders").output(p).k(*n))
                .collect())
        }
        Command::Unique { k, select } => {
            let pats = patterns(&select.patterns)?;
            let class = format_patterns(&pats);
            if select.count {
                let c = stacksort::count_uniquely_sorted(*k, &pats, limits)?;
                return Ok(vec![Record::new(class, "unique").k(*k).count(c).provenance("enumeration")]);
            }
            Ok(stacksort::enumerate_uniquely_sorted(*k, &pats, limits)?
                .map(|p| Record::new(&class, "unique").output(p).k(*k))
                .collect())
        }
        Command::Intervals { poset, k, list } => {
            if *list {
                let rows: Vec<String> = match poset {
                    Lattice::Path(kind) => dyck::enumerate_intervals(*k, *kind, limits)?
                        .iter()
                        .map(ToString::to_string)
                        .collect(),
                    Lattice::Kreweras => {
                        limits.check("interval scan semilength", *k, limits::INTERVAL_SCAN_MAX_K)?;
                        noncross::enumerate_nc_intervals(*k).iter().map(ToString::to_string).collect()
                    }
                };
                return Ok(rows
                    .into_iter()
                    .map(|r| Record::new(poset, "intervals").output(r).k(*k))
                    .collect());
            }
            let got = harness::count_lattice_intervals(*poset, *k, limits)?;
            let want = harness::closed_form(poset.formula(), *k as u64);
            let agree = BigUint::from(got) == want;
            Ok(vec![Record::new(poset, "intervals")
                .k(*k)
                .count(got)
                .provenance("pairwise scan")
                .extra("closed_form", json!(want.to_string()))
                .extra("passed", json!(agree))])
        }
        Command::Bijection { map, input, inverse } => {
            let out = apply_map(*map, input, *inverse)?;
            let op = if *inverse { format!("{}^-1", map.name()) } else { map.name() };
            Ok(vec![Record::new(input, op).output(out)])
        }
        Command::Sequence { patterns: p, max_k, check } => sequence(p, *max_k, *check, limits),
        Command::Series { which, order } => series_cmd(which, *order),
        Command::Verify { suite, max_k } => {
            let report = harness::verify(*suite, *max_k);
            Ok(report
                .checks
                .iter()
                .map(|c| {
                    Record::new(suite, "verify")
                        .output(c.to_string())
                        .k(*max_k)
                        .extra("check", json!(c.name))
                        .extra("suite", json!(c.suite))
                        .extra("anchor", json!(c.anchor))
                        .extra("passed", json!(c.passed))
                        .extra("detail", json!(c.detail))
                        .extra("millis", json!(c.millis as u64))
                })
                .collect())
        }
    }
}

fn patterns(s: &str) -> Result<Vec<Pattern>, Error> {
    parse_patterns(s)
}

fn parse<T: FromStr<Err = Error>>(s: &str) -> Result<T, Error> {
    s.parse()
}

fn interval_parts(s: &str) -> Result<(DyckPath, DyckPath), Error> {
    let (a, b) = s.split_once(';').ok_or_else(|| Error::Parse {
        what: "interval",
        input: s.into(),
        reason: "expected lower;upper".into(),
    })?;
    Ok((parse(a)?, parse(b)?))
}

fn numbers(s: &str) -> Result<Vec<u32>, Error> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim().parse().map_err(|_| Error::Parse {
                what: "number list",
                input: s.into(),
                reason: format!("bad entry {t:?}"),
            })
        })
        .collect()
}

fn parse_matrix(s: &str) -> Result<CellMatrix, Error> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    let rows = body.split(';').map(numbers).collect::<Result<Vec<_>, _>>()?;
    CellMatrix::from_rows(&rows)
}

fn parse_pallo(s: &str) -> Result<PalloDecomposition, Error> {
    let bad = || Error::Parse {
        what: "Pallo decomposition",
        input: s.into(),
        reason: "expected nice(a | b) or split(a | b)".into(),
    };
    let s = s.trim();
    let (tag, rest) = s.split_once('(').ok_or_else(bad)?;
    let (a, b) = rest.strip_suffix(')').ok_or_else(bad)?.split_once('|').ok_or_else(bad)?;
    let (a, b): (Permutation, Permutation) = (parse(a)?, parse(b)?);
    match tag.trim() {
        "nice" => Ok(PalloDecomposition::Nice { rest: a, tau: b }),
        "split" => Ok(PalloDecomposition::Split { left: a, right: b }),
        _ => Err(bad()),
    }
}

fn no_inverse(map: MapName) -> Error {
    Error::Unknown {
        what: "inverse map",
        name: map.name(),
    }
}

fn apply_map(map: MapName, input: &str, inverse: bool) -> Result<String, Error> {
    let antichain = |m: AntichainMap| -> Result<String, Error> {
        if inverse {
            Ok(m.inverse(&parse(input)?)?.to_string())
        } else {
            Ok(m.forward(&parse(input)?)?.to_string())
        }
    };
    Ok(match (map, inverse) {
        (MapName::Dl, false) => bijections::dl_forward(&parse(input)?)?.to_string(),
        (MapName::Dl, true) => {
            let (a, b) = interval_parts(input)?;
            bijections::dl_inverse(&a, &b)?.to_string()
        }
        (MapName::Tamari, false) => bijections::tamari_forward(&parse(input)?)?.to_string(),
        (MapName::Tamari, true) => {
            let (a, b) = interval_parts(input)?;
            bijections::tamari_inverse(&a, &b)?.to_string()
        }
        (MapName::Upsilon, false) => bijections::upsilon_tree(&parse(input)?)?.to_string(),
        (MapName::Upsilon, true) => bijections::upsilon_tree_inverse(&NCInterval::parse(input)?)?.to_string(),
        (MapName::UpsilonDirect, false) => bijections::upsilon_direct(&parse(input)?)?.to_string(),
        (MapName::Pallo, false) => bijections::pallo_decompose(&parse(input)?)?.to_string(),
        (MapName::Pallo, true) => bijections::pallo_recompose(&parse_pallo(input)?)?.to_string(),
        (MapName::Parking, false) => bijections::parking_forward(&parse(input)?)?.to_string(),
        (MapName::Parking, true) => bijections::parking_inverse(&parse::<ParkingFunction>(input)?).to_string(),
        (MapName::Layered, _) => antichain(AntichainMap::Layered)?,
        (MapName::Swl, _) => antichain(AntichainMap::Swl)?,
        (MapName::Swd, _) => antichain(AntichainMap::Swd)?,
        (MapName::Cells, false) => bijections::cell_matrix(&parse(input)?)?.to_string(),
        (MapName::Cells, true) => bijections::permutation_from_cells(&parse_matrix(input)?).to_string(),
        (MapName::Margins, false) => {
            let (a, b) = input.split_once(';').ok_or_else(|| Error::Parse {
                what: "margins",
                input: input.into(),
                reason: "expected a1,..,ak;b1,..,bk".into(),
            })?;
            let (m, energies) = bijections::solve_margins_traced(&numbers(a)?, &numbers(b)?)?;
            let e: Vec<String> = energies.iter().map(ToString::to_string).collect();
            format!("{m} energies {}", e.join(","))
        }
        (MapName::Valley, false) => bijections::valley_word(&parse(input)?)?
            .iter()
            .map(|&u| if u { 'U' } else { 'D' })
            .collect(),
        (m, true) => return Err(no_inverse(m)),
    })
}

fn sequence(p: &str, max_k: usize, check: bool, limits: &Limits) -> Outcome {
    let pats = patterns(p)?;
    let recs = harness::compute_sequence(&pats, max_k, limits)?;
    let class = format_patterns(&pats);
    let mut failed = false;
    if check {
        let reference = harness::reference_rows();
        for r in &recs {
            let stored = reference.iter().find(|row| row.class == class && row.k == r.k);
            if let Some(row) = stored {
                if row.count != r.count {
                    eprintln!("drift: {class} k={}: {} vs reference {}", r.k, r.count, row.count);
                    failed = true;
                }
            }
            if class == harness::PUBLISHED_CLASS {
                if let Some(&want) = harness::PUBLISHED_COUNTS.get(r.k) {
                    if r.count != BigUint::from(want) {
                        eprintln!("mismatch: {class} k={}: {} vs published {want}", r.k, r.count);
                        failed = true;
                    }
                }
            }
        }
    }
    let records = recs
        .into_iter()
        .map(|r| {
            Record::new(&r.class, "sequence")
                .k(r.k)
                .count(r.count)
                .provenance("enumeration")
                .extra("passed", json!(!failed))
        })
        .collect();
    Ok(records)
}

fn series_cmd(which: &str, order: usize) -> Outcome {
    if let Ok(kind) = which.parse::<SeriesKind>() {
        return Ok(series::series_coefficients(kind, order)
            .into_iter()
            .enumerate()
            .map(|(k, c)| Record::new(kind, "series").k(k).count(c).provenance("power series"))
            .collect());
    }
    let f: FormulaId = which.parse().map_err(|_| Error::Unknown {
        what: "series or formula",
        name: which.into(),
    })?;
    Ok((0..=order)
        .map(|k| Record::new(f, "closed_form").k(k).count(harness::closed_form(f, k as u64)).provenance("closed form"))
        .collect())
}
