//! Batch CLI over the library: sampling, gap reports, region utilities,
//! partition tables, covering-net verification, and Monte Carlo sweeps.
//!
//! Exit codes are a stable contract: 0 success, 1 assertion failure,
//! 2 usage error, 3 resource cap.

use clap::{Args, Parser, Subcommand, ValueEnum};
use gnslab::error::Error;
use gnslab::experiments::{
    sweep, BoxPolicy, Model, SweepCell, TrialConfig,
};
use gnslab::hyperboloid::{
    hyperplane_net, lattice_count_sandwich, region_volume, verify_box_cover,
    verify_hyperplane_cover, HyperboloidRegion,
};
use gnslab::lattice::GridBox;
use gnslab::limits::Limits;
use gnslab::partitions::{meinardus_exponent_fit, ptn_table};
use gnslab::sample::{sample, RandomSetSpec, SampleResult};
use gnslab::schema::{
    self, parse_seed, CoverFile, FitEcho, GapReportFile, PartitionsFile, RegionFile, SampleFile,
    SandwichEcho, SweepSummaryFile,
};
use gnslab::semigroup::{closure_in_box, gap_report, subset_sums_in_box};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gnslab", version, about = "Random generalized numerical semigroup laboratory")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a p-random subset of a box and write the point list as JSON.
    Sample(SampleArgs),
    /// Gap report of the semigroup and/or subset-sum set of a sample.
    Gaps(GapsArgs),
    /// Shifted-hyperboloid region utilities: volume, enumeration, count sandwich.
    Region(RegionArgs),
    /// Exact colored-partition tables and the growth-exponent fit.
    Partitions(PartitionsArgs),
    /// Enumerate a dyadic covering net and verify the covering property.
    Cover(CoverArgs),
    /// Monte Carlo sweep over a (d, p) grid.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: f64,
    /// Decimal or 0x-hex.
    #[arg(long)]
    seed: String,
    /// Comma-separated extents, or "auto" for the experiment box policy.
    #[arg(long = "box")]
    boxx: String,
    #[arg(long, default_value_t = 20.0)]
    outer_c: f64,
    #[arg(long)]
    include_origin: bool,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Semigroup,
    Fs,
    Both,
}

#[derive(Args)]
struct GapsArgs {
    /// Sample file produced by `gnslab sample`.
    #[arg(long = "in", conflicts_with_all = ["d", "p", "seed", "a"])]
    input: Option<PathBuf>,
    #[arg(long, requires_all = ["p", "seed"])]
    d: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long = "box")]
    boxx: Option<String>,
    #[arg(long, value_delimiter = ',')]
    a: Option<Vec<u64>>,
    #[arg(long, value_enum, default_value_t = ModelArg::Semigroup)]
    model: ModelArg,
    #[arg(long, default_value_t = 20.0)]
    outer_c: f64,
    /// Fail (exit 1) unless the completeness certificate passes.
    #[arg(long)]
    require_certificate: bool,
    /// Include the gap point list in the report (capped; counts stay exact).
    #[arg(long)]
    collect_gaps: bool,
    /// Also write gap points as CSV (useful for d=2 scatter plots).
    #[arg(long)]
    gaps_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, conflicts_with = "l")]
    p: Option<f64>,
    /// Level constant; the region level is C * p^-1 (log p^-1)^(d+1).
    #[arg(long = "C")]
    c: Option<f64>,
    /// Explicit shift (natural-log scale).
    #[arg(long = "L")]
    l: Option<f64>,
    /// Explicit level.
    #[arg(long = "Z")]
    z: Option<f64>,
    #[arg(long)]
    volume: bool,
    #[arg(long)]
    enumerate: bool,
    #[arg(long)]
    sandwich: bool,
    #[arg(long)]
    points_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionsArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    nmax: u64,
    /// Fit window "lo:hi" for the growth exponent.
    #[arg(long)]
    fit: Option<String>,
    /// CSV path for the table (stdout when no JSON output is requested).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum NetArg {
    Hyperplane,
    Box,
}

#[derive(Args)]
struct CoverArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    p: f64,
    #[arg(long = "Z")]
    z: f64,
    #[arg(long, value_enum, default_value_t = NetArg::Hyperplane)]
    net: NetArg,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Probe-box extent for the box-net cover scan.
    #[arg(long, default_value_t = 256)]
    probe: u64,
    /// Exit 1 unless the covering holds.
    #[arg(long)]
    assert: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON grid file: [{"d":1,"p":0.05}, ...]
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, default_value_t = 10)]
    trials: u64,
    #[arg(long, default_value = "0")]
    seed_base: String,
    /// Worker threads (wall time only; output bytes never change).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Semigroup)]
    model: ModelArg,
    #[arg(long, default_value_t = 0.05)]
    inner_c: f64,
    #[arg(long, default_value_t = 20.0)]
    outer_c: f64,
    #[arg(long = "box", default_value = "auto")]
    boxx: String,
    #[arg(long)]
    collect_embedding: bool,
    /// Named assertions, repeatable: no-errors, slope=LO:HI,
    /// certified-min=FRAC. Exit 1 when any fails.
    #[arg(long = "assert")]
    asserts: Vec<String>,
    /// Output prefix; writes <prefix>.csv and <prefix>.json.
    #[arg(long)]
    out_prefix: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    let limits = Limits::from_env();
    match cli.cmd {
        Cmd::Sample(a) => cmd_sample(a, &limits),
        Cmd::Gaps(a) => cmd_gaps(a, &limits),
        Cmd::Region(a) => cmd_region(a, &limits),
        Cmd::Partitions(a) => cmd_partitions(a),
        Cmd::Cover(a) => cmd_cover(a, &limits),
        Cmd::Sweep(a) => cmd_sweep(a, &limits),
    }
}

fn parse_box(spec: &str, d: usize, p: f64, outer_c: f64, limits: &Limits) -> Result<GridBox, Error> {
    if spec == "auto" {
        let mut config = TrialConfig::new(d, p, 0);
        config.outer_c = outer_c;
        config.resolve_box(limits)
    } else {
        let extents: Result<Vec<u64>, _> = spec.split(',').map(|s| s.trim().parse::<u64>()).collect();
        let extents =
            extents.map_err(|_| Error::InvalidParameter(format!("bad box spec '{spec}'")))?;
        if extents.len() == 1 && d > 1 {
            return GridBox::new(vec![extents[0]; d]);
        }
        if extents.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: extents.len(),
            });
        }
        GridBox::new(extents)
    }
}

fn write_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Error> {
    let body = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}"))),
        None => {
            std::io::stdout()
                .write_all(body.as_bytes())
                .map_err(|e| Error::InvalidParameter(format!("cannot write output: {e}")))
        }
    }
}

fn write_csv_file<F: FnOnce(&mut dyn Write) -> csv::Result<()>>(
    path: &Path,
    f: F,
) -> Result<(), Error> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot create {}: {e}", path.display())))?;
    f(&mut file).map_err(|e| Error::InvalidParameter(format!("csv write failed: {e}")))
}

fn make_sample(
    d: usize,
    p: f64,
    seed: u64,
    boxx: GridBox,
    include_origin: bool,
) -> Result<SampleResult, Error> {
    if boxx.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: boxx.dim(),
        });
    }
    let mut spec = RandomSetSpec::new(p, boxx, seed)?;
    spec.include_origin = include_origin;
    sample(&spec)
}

fn cmd_sample(a: SampleArgs, limits: &Limits) -> Result<ExitCode, Error> {
    let seed = parse_seed(&a.seed)?;
    let boxx = parse_box(&a.boxx, a.d, a.p, a.outer_c, limits)?;
    let s = make_sample(a.d, a.p, seed, boxx, a.include_origin)?;
    write_json(&a.out, &SampleFile::from_sample(&s))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_gaps(a: GapsArgs, limits: &Limits) -> Result<ExitCode, Error> {
    // the generating set either comes from a sample file, inline --a, or fresh sampling
    let (points, boxx, config_echo) = if let Some(path) = &a.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read input: {e}")))?;
        let file: SampleFile = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidParameter(format!("bad sample file: {e}")))?;
        let boxx = GridBox::new(file.config.box_extents.clone())?;
        let echo = serde_json::to_value(&file.config).unwrap();
        (file.to_points(), boxx, echo)
    } else if let Some(gens) = &a.a {
        // inline 1-d generator list
        let boxx = match &a.boxx {
            Some(spec) => parse_box(spec, 1, 0.5, a.outer_c, limits)?,
            None => GridBox::new(vec![gens.iter().max().copied().unwrap_or(1) * 4])?,
        };
        let points: Vec<gnslab::Point> =
            gens.iter().map(|&g| gnslab::Point::new(vec![g])).collect();
        let echo = serde_json::json!({"inline_a": gens, "box_extents": boxx.extents()});
        (points, boxx, echo)
    } else {
        let d = a.d.ok_or_else(|| {
            Error::InvalidParameter("need --in, --a, or --d/--p/--seed".into())
        })?;
        let p = a.p.unwrap();
        let seed = parse_seed(a.seed.as_deref().unwrap())?;
        let box_spec = a.boxx.clone().unwrap_or_else(|| "auto".to_string());
        let boxx = parse_box(&box_spec, d, p, a.outer_c, limits)?;
        let s = make_sample(d, p, seed, boxx.clone(), false)?;
        let echo = serde_json::to_value(&SampleFile::from_sample(&s).config).unwrap();
        (s.points(), boxx, echo)
    };

    let mut reports = Vec::new();
    let mut all_certified = true;
    if matches!(a.model, ModelArg::Semigroup | ModelArg::Both) {
        let grid = closure_in_box(&points, &boxx)?;
        let rep = gap_report(&grid, a.collect_gaps, limits);
        all_certified &= rep.certified;
        if let Some(csv_path) = &a.gaps_csv {
            let full = gap_report(&grid, true, limits);
            write_csv_file(csv_path, |w| {
                schema::write_points_csv(full.gaps.as_deref().unwrap_or(&[]), w)
            })?;
        }
        reports.push(GapReportFile::from_report(
            "semigroup",
            config_echo.clone(),
            &rep,
            None,
        ));
    }
    if matches!(a.model, ModelArg::Fs | ModelArg::Both) {
        let grid = subset_sums_in_box(&points, &boxx)?;
        let rep = gap_report(&grid, a.collect_gaps, limits);
        let shell = gnslab::experiments::shell_contained(grid.grid());
        reports.push(GapReportFile::from_report(
            "fs",
            config_echo.clone(),
            &rep,
            Some(shell),
        ));
    }
    if reports.len() == 1 {
        write_json(&a.out, &reports[0])?;
    } else {
        write_json(&a.out, &reports)?;
    }
    if a.require_certificate && matches!(a.model, ModelArg::Semigroup | ModelArg::Both) && !all_certified
    {
        eprintln!("certificate failed");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_region(a: RegionArgs, limits: &Limits) -> Result<ExitCode, Error> {
    let (region, echo) = match (a.p, a.l, a.z) {
        (Some(p), None, None) => {
            let c = a
                .c
                .ok_or_else(|| Error::InvalidParameter("--p needs --C".into()))?;
            let r = HyperboloidRegion::from_density(a.d, p, c)?;
            let echo = serde_json::json!({"d": a.d, "p": p, "C": c,
                "shift": r.shift(), "level": r.level()});
            (r, echo)
        }
        (None, Some(l), Some(z)) => {
            let r = HyperboloidRegion::new(a.d, l, z)?;
            let echo = serde_json::json!({"d": a.d, "L": l, "Z": z});
            (r, echo)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give either --p with --C, or --L with --Z".into(),
            ))
        }
    };
    let mut file = RegionFile {
        schema_version: schema::SCHEMA_VERSION.to_string(),
        kind: "region".to_string(),
        config: echo,
        volume: None,
        point_count: None,
        sandwich: None,
        points: None,
    };
    if a.volume {
        file.volume = Some(region_volume(a.d, region.shift(), region.level())?);
    }
    if a.enumerate || a.points_csv.is_some() {
        let pts = region.enumerate(limits)?;
        file.point_count = Some(pts.len() as u64);
        if let Some(csv_path) = &a.points_csv {
            write_csv_file(csv_path, |w| schema::write_points_csv(&pts, w))?;
        }
        if a.enumerate {
            file.points = Some(pts.iter().map(|p| p.coords().to_vec()).collect());
        }
    }
    if a.sandwich {
        let p = a
            .p
            .ok_or_else(|| Error::InvalidParameter("--sandwich needs --p and --C".into()))?;
        let c = a.c.unwrap_or(1.0);
        let s = lattice_count_sandwich(a.d, p, c, limits)?;
        file.sandwich = Some(SandwichEcho {
            lower: s.lower,
            upper: s.upper,
            exact: s.exact,
        });
    }
    write_json(&a.out, &file)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_partitions(a: PartitionsArgs) -> Result<ExitCode, Error> {
    let table = ptn_table(a.d, a.nmax);
    let fit = match &a.fit {
        Some(spec) => {
            let (lo, hi) = spec
                .split_once(':')
                .ok_or_else(|| Error::InvalidParameter("fit window must be lo:hi".into()))?;
            let lo: u64 = lo
                .parse()
                .map_err(|_| Error::InvalidParameter("bad fit lo".into()))?;
            let hi: u64 = hi
                .parse()
                .map_err(|_| Error::InvalidParameter("bad fit hi".into()))?;
            Some(FitEcho::new(lo, hi, &meinardus_exponent_fit(&table, lo, hi)?))
        }
        None => None,
    };
    if let Some(csv_path) = &a.csv {
        write_csv_file(csv_path, |w| schema::write_partition_csv(&table, w))?;
    }
    if a.out.is_some() || fit.is_some() {
        let file = PartitionsFile {
            schema_version: schema::SCHEMA_VERSION.to_string(),
            kind: "partitions".to_string(),
            config: serde_json::json!({"d": a.d, "nmax": a.nmax}),
            n_max: table.n_max(),
            fit,
        };
        write_json(&a.out, &file)?;
    } else if a.csv.is_none() {
        // no destination given: table CSV to stdout
        let mut stdout = std::io::stdout();
        schema::write_partition_csv(&table, &mut stdout)
            .map_err(|e| Error::InvalidParameter(format!("csv write failed: {e}")))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_cover(a: CoverArgs, limits: &Limits) -> Result<ExitCode, Error> {
    let (holds, witness, tuple_count, net_name) = match a.net {
        NetArg::Hyperplane => {
            let net = hyperplane_net(a.d, a.p, a.z)?;
            let (holds, witness) = verify_hyperplane_cover(a.d, a.p, a.z, limits)?;
            (holds, witness, net.exponent_tuples.len(), "hyperplane")
        }
        NetArg::Box => {
            let net = gnslab::hyperboloid::box_net(a.d, a.p, a.z, a.kappa)?;
            let (holds, witness) = verify_box_cover(a.d, a.p, a.z, a.kappa, a.probe)?;
            (holds, witness, net.exponent_tuples.len(), "box")
        }
    };
    let file = CoverFile {
        schema_version: schema::SCHEMA_VERSION.to_string(),
        kind: "cover".to_string(),
        config: serde_json::json!({"d": a.d, "p": a.p, "Z": a.z,
            "kappa": a.kappa, "probe": a.probe}),
        net: net_name.to_string(),
        tuple_count,
        holds,
        witness: witness.map(|p| p.coords().to_vec()),
    };
    write_json(&a.out, &file)?;
    if a.assert && !holds {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(a: SweepArgs, limits: &Limits) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&a.grid)
        .map_err(|e| Error::InvalidParameter(format!("cannot read grid: {e}")))?;
    let cells: Vec<SweepCell> = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("bad grid file: {e}")))?;
    let seed_base = parse_seed(&a.seed_base)?;
    let mut template = TrialConfig::new(1, 0.5, 0);
    template.model = match a.model {
        ModelArg::Semigroup => Model::Semigroup,
        ModelArg::Fs => Model::SubsetSums,
        ModelArg::Both => Model::Both,
    };
    template.inner_c = a.inner_c;
    template.outer_c = a.outer_c;
    template.collect_embedding = a.collect_embedding;
    if a.boxx != "auto" {
        let extents: Result<Vec<u64>, _> =
            a.boxx.split(',').map(|s| s.trim().parse::<u64>()).collect();
        template.box_policy = BoxPolicy::Extents(
            extents.map_err(|_| Error::InvalidParameter(format!("bad box spec '{}'", a.boxx)))?,
        );
    }

    let run = || sweep(&cells, a.trials, seed_base, &template, limits);
    let table = if a.jobs > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(a.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(run)?
    } else {
        run()?
    };

    let csv_path = a.out_prefix.with_extension("csv");
    let json_path = a.out_prefix.with_extension("json");
    write_csv_file(&csv_path, |w| schema::write_sweep_csv(&table, w))?;
    let model_name = match a.model {
        ModelArg::Semigroup => "semigroup",
        ModelArg::Fs => "fs",
        ModelArg::Both => "both",
    };
    let config_echo = serde_json::json!({
        "grid": cells, "trials": a.trials, "seed_base": seed_base,
        "model": model_name, "inner_c": a.inner_c, "outer_c": a.outer_c,
        "box": a.boxx, "collect_embedding": a.collect_embedding,
    });
    write_json(
        &Some(json_path),
        &SweepSummaryFile::from_table(config_echo, &table),
    )?;

    for assertion in &a.asserts {
        if !check_assertion(assertion, &table)? {
            eprintln!("assertion failed: {assertion}");
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn check_assertion(spec: &str, table: &gnslab::experiments::SweepTable) -> Result<bool, Error> {
    if spec == "no-errors" {
        return Ok(table.rows.iter().all(|r| r.error.is_none()));
    }
    if let Some(range) = spec.strip_prefix("slope=") {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| Error::InvalidParameter("slope=LO:HI".into()))?;
        let lo: f64 = lo.parse().map_err(|_| Error::InvalidParameter("bad slope lo".into()))?;
        let hi: f64 = hi.parse().map_err(|_| Error::InvalidParameter("bad slope hi".into()))?;
        return Ok(!table.fits.is_empty()
            && table.fits.iter().all(|f| f.slope >= lo && f.slope <= hi));
    }
    if let Some(frac) = spec.strip_prefix("certified-min=") {
        let f: f64 = frac
            .parse()
            .map_err(|_| Error::InvalidParameter("bad fraction".into()))?;
        return Ok(table.aggregates.iter().all(|a| {
            a.trials == 0 || (a.certified_count as f64 / a.trials as f64) >= f
        }));
    }
    Err(Error::InvalidParameter(format!("unknown assertion '{spec}'")))
}
