//! Serialization schemas for the CLI: JSON for structured reports, CSV for
//! bulk point and row data. Every file carries the schema version and a full
//! config echo so any figure can be regenerated from its data file alone.

use crate::error::{Error, Result};
use crate::experiments::{SweepTable, TrialResult};
use crate::lattice::Point;
use crate::partitions::{ln_big, ExponentFit, PartitionTable};
use crate::sample::SampleResult;
use crate::semigroup::GapReport;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

/// Seeds are accepted as decimal or 0x-prefixed hex strings.
pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let parsed = if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        t.parse::<u64>()
    };
    parsed.map_err(|_| Error::InvalidParameter(format!("bad seed '{s}'")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleConfigEcho {
    pub dimension: usize,
    pub p: f64,
    pub seed: u64,
    pub seed_hex: String,
    pub box_extents: Vec<u64>,
    pub include_origin: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleFile {
    pub schema_version: String,
    pub kind: String,
    pub config: SampleConfigEcho,
    pub points: Vec<Vec<u64>>,
}

impl SampleFile {
    pub fn from_sample(s: &SampleResult) -> SampleFile {
        SampleFile {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: "sample".to_string(),
            config: SampleConfigEcho {
                dimension: s.spec.dimension,
                p: s.spec.p,
                seed: s.spec.seed,
                seed_hex: format!("{:#x}", s.spec.seed),
                box_extents: s.spec.boxx.extents().to_vec(),
                include_origin: s.spec.include_origin,
            },
            points: s.points().iter().map(|p| p.coords().to_vec()).collect(),
        }
    }

    pub fn to_points(&self) -> Vec<Point> {
        self.points.iter().map(|c| Point::new(c.clone())).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReportFile {
    pub schema_version: String,
    pub kind: String,
    pub model: String,
    pub config: serde_json::Value,
    pub gap_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_gap_norm: Option<u64>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_threshold: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis_frobenius: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_reason: Option<String>,
    /// Present for the subset-sums model only; a diagnostic, not a certificate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shell_contained: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps_truncated: Option<bool>,
}

impl GapReportFile {
    pub fn from_report(
        model: &str,
        config: serde_json::Value,
        rep: &GapReport,
        shell_contained: Option<bool>,
    ) -> GapReportFile {
        GapReportFile {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: "gap_report".to_string(),
            model: model.to_string(),
            config,
            gap_count: rep.gap_count,
            max_gap_norm: rep.max_gap_norm,
            certified: rep.certified,
            certificate_threshold: rep.certificate_threshold,
            axis_frobenius: rep.axis_frobenius.clone(),
            certificate_reason: rep.certificate_reason.clone(),
            shell_contained,
            gaps: rep
                .gaps
                .as_ref()
                .map(|g| g.iter().map(|p| p.coords().to_vec()).collect()),
            gaps_truncated: rep.gaps.as_ref().map(|_| rep.gaps_truncated),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionFile {
    pub schema_version: String,
    pub kind: String,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sandwich: Option<SandwichEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandwichEcho {
    pub lower: f64,
    pub upper: f64,
    pub exact: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverFile {
    pub schema_version: String,
    pub kind: String,
    pub config: serde_json::Value,
    pub net: String,
    pub tuple_count: usize,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionsFile {
    pub schema_version: String,
    pub kind: String,
    pub config: serde_json::Value,
    pub n_max: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitEcho>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitEcho {
    pub n_lo: u64,
    pub n_hi: u64,
    pub alpha: f64,
    pub kappa_hat: f64,
    pub r2: f64,
}

impl FitEcho {
    pub fn new(n_lo: u64, n_hi: u64, fit: &ExponentFit) -> FitEcho {
        FitEcho {
            n_lo,
            n_hi,
            alpha: fit.alpha,
            kappa_hat: fit.kappa_hat,
            r2: fit.r2,
        }
    }
}

/// Partition-table CSV rows: `n, digit_count, leading_mantissa, exponent`
/// with `value = leading_mantissa * 10^exponent`.
pub fn partition_csv_rows(table: &PartitionTable) -> Vec<(u64, u64, f64, i64)> {
    let mut out = Vec::new();
    for n in 0..=table.n_max() {
        let v = table.value(n);
        let ln10 = std::f64::consts::LN_10;
        let log10 = ln_big(v) / ln10;
        let exponent = log10.floor() as i64;
        let mantissa = 10f64.powf(log10 - exponent as f64);
        let digits = exponent as u64 + 1;
        out.push((n, digits, mantissa, exponent));
    }
    out
}

pub fn write_partition_csv<W: std::io::Write>(table: &PartitionTable, w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["n", "digit_count", "leading_mantissa", "exponent"])?;
    for (n, digits, mantissa, exponent) in partition_csv_rows(table) {
        wtr.write_record([
            n.to_string(),
            digits.to_string(),
            format!("{mantissa:.6}"),
            exponent.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_points_csv<W: std::io::Write>(points: &[Point], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if let Some(first) = points.first() {
        let header: Vec<String> = (0..first.dim()).map(|i| format!("x{i}")).collect();
        wtr.write_record(&header)?;
    }
    for p in points {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummaryFile {
    pub schema_version: String,
    pub kind: String,
    pub config: serde_json::Value,
    pub table: SweepTableEcho,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTableEcho {
    pub seed_base: u64,
    pub trials_per_cell: u64,
    pub cells: Vec<serde_json::Value>,
    pub aggregates: serde_json::Value,
    pub fits: serde_json::Value,
}

impl SweepSummaryFile {
    pub fn from_table(config: serde_json::Value, table: &SweepTable) -> SweepSummaryFile {
        SweepSummaryFile {
            schema_version: SCHEMA_VERSION.to_string(),
            kind: "sweep_summary".to_string(),
            config,
            table: SweepTableEcho {
                seed_base: table.seed_base,
                trials_per_cell: table.trials_per_cell,
                cells: table
                    .cells
                    .iter()
                    .map(|c| serde_json::json!({"d": c.d, "p": c.p}))
                    .collect(),
                aggregates: serde_json::to_value(&table.aggregates).unwrap(),
                fits: serde_json::to_value(&table.fits).unwrap(),
            },
        }
    }
}

/// One CSV row per trial; errors keep their row with an error column.
pub fn write_sweep_csv<W: std::io::Write>(table: &SweepTable, w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "cell_index",
        "d",
        "p",
        "trial_index",
        "seed",
        "sample_size",
        "gap_count_semigroup",
        "certified",
        "gap_count_fs_in_box",
        "shell_contained",
        "inner_fraction",
        "outer_violations_semigroup",
        "outer_violations_fs",
        "embedding_dimension",
        "wall_ms",
        "error",
    ])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for row in &table.rows {
        let cell = table.cells[row.cell_index];
        let r: Option<&TrialResult> = row.result.as_ref();
        wtr.write_record([
            row.cell_index.to_string(),
            cell.d.to_string(),
            cell.p.to_string(),
            row.trial_index.to_string(),
            row.seed.to_string(),
            opt(r.map(|t| t.sample_size.to_string())),
            opt(r.and_then(|t| t.gap_count_semigroup.map(|g| g.to_string()))),
            opt(r.and_then(|t| t.certified.map(|c| c.to_string()))),
            opt(r.and_then(|t| t.gap_count_fs_in_box.map(|g| g.to_string()))),
            opt(r.and_then(|t| t.shell_contained.map(|c| c.to_string()))),
            opt(r.and_then(|t| t.shape_semigroup.map(|s| format!("{:.6}", s.inner_fraction)))),
            opt(r.and_then(|t| t.shape_semigroup.map(|s| s.outer_violations.to_string()))),
            opt(r.and_then(|t| t.shape_fs.map(|s| s.outer_violations.to_string()))),
            opt(r.and_then(|t| t.embedding_dimension.map(|e| e.to_string()))),
            opt(r.map(|t| t.wall_ms.to_string())),
            row.error.clone().unwrap_or_default(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
