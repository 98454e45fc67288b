//! Restart-matrix entropy test, per-row IID tests and the password
//! character-uniformity test.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::bits::BitStream;
use crate::engine::EngineDescriptor;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::passgen::{
    password_from_bits, required_length, Charset, PasswordSpec, DEFAULT_STRENGTH_BITS,
};
use crate::stats::{
    binomial_upper_p, chi_square_p, longest_repeated_substring, lrs_p_value, median, PValue,
};

pub const MATRIX_ROWS: usize = 1000;
pub const MATRIX_COLS: usize = 1000;
pub const ROW_BYTES: usize = MATRIX_COLS / 8;
pub const MATRIX_BYTES: usize = MATRIX_ROWS * ROW_BYTES;

pub const ENTROPY_P_THRESHOLD: f64 = 0.000_005;
pub const IID_P_THRESHOLD: f64 = 0.001;
pub const CHAR_P_THRESHOLD: f64 = 0.01;
/// Longest repeated substring still passing at `IID_P_THRESHOLD` for 1000 bits.
pub const LRS_MAX_PASSING_LENGTH: usize = 28;
/// z-score of the 99% upper bound used by the MCV min-entropy estimate.
pub const MCV_CONFIDENCE_Z: f64 = 2.576;

const IND_CHUNKS: usize = 10;
const IND_CHUNK_BITS: usize = MATRIX_COLS / IND_CHUNKS;
const GF_PAIRS: usize = MATRIX_COLS / 2;

/// 1000 restarts by 1000 bits, packed row-major and MSB-first.
#[derive(Clone, PartialEq, Eq)]
pub struct RestartMatrix {
    bytes: Vec<u8>,
}

impl std::fmt::Debug for RestartMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RestartMatrix({MATRIX_ROWS}x{MATRIX_COLS})")
    }
}

impl RestartMatrix {
    pub fn from_bytes(bytes: Vec<u8>) -> Result<Self> {
        if bytes.len() != MATRIX_BYTES {
            return Err(Error::MatrixSize {
                expected: MATRIX_BYTES,
                actual: bytes.len(),
            });
        }
        Ok(Self { bytes })
    }

    pub fn from_rows(rows: &[BitStream]) -> Result<Self> {
        if rows.len() != MATRIX_ROWS {
            return Err(Error::LengthMismatch {
                expected: MATRIX_ROWS,
                actual: rows.len(),
            });
        }
        let mut bytes = Vec::with_capacity(MATRIX_BYTES);
        for row in rows {
            if row.len() != MATRIX_COLS {
                return Err(Error::LengthMismatch {
                    expected: MATRIX_COLS,
                    actual: row.len(),
                });
            }
            bytes.extend_from_slice(row.as_bytes());
        }
        Ok(Self { bytes })
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn row(&self, i: usize) -> BitStream {
        BitStream::from_bytes(self.bytes[i * ROW_BYTES..(i + 1) * ROW_BYTES].to_vec())
    }

    pub fn bit(&self, row: usize, col: usize) -> bool {
        self.bytes[row * ROW_BYTES + col / 8] >> (7 - col % 8) & 1 == 1
    }

    pub fn transpose(&self) -> Self {
        let rows: Vec<BitStream> = (0..MATRIX_COLS)
            .map(|c| (0..MATRIX_ROWS).map(|r| self.bit(r, c)).collect())
            .collect();
        Self::from_rows(&rows).expect("square matrix")
    }

    pub fn row_ones(&self) -> Vec<usize> {
        self.bytes
            .chunks_exact(ROW_BYTES)
            .map(|r| r.iter().map(|b| b.count_ones() as usize).sum())
            .collect()
    }

    pub fn column_ones(&self) -> Vec<usize> {
        let mut ones = vec![0usize; MATRIX_COLS];
        for row in self.bytes.chunks_exact(ROW_BYTES) {
            for (c, count) in ones.iter_mut().enumerate() {
                *count += (row[c / 8] >> (7 - c % 8) & 1) as usize;
            }
        }
        ones
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_bytes(std::fs::read(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.bytes)?;
        Ok(())
    }
}

/// Row `i` is a 1000-bit fill from `desc.restart(i)`.
pub fn build_restart_matrix(desc: &EngineDescriptor, exec: Execution) -> Result<RestartMatrix> {
    build_restart_matrix_with(exec, |i| desc.restart(i)?.fill(MATRIX_COLS))
}

pub fn build_restart_matrix_with<F>(exec: Execution, row: F) -> Result<RestartMatrix>
where
    F: Fn(u32) -> Result<BitStream> + Sync + Send,
{
    let rows = exec.try_map_range(MATRIX_ROWS, |i| row(i as u32))?;
    RestartMatrix::from_rows(&rows)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum McvAggregation {
    /// One binomial test on the largest count over all lines.
    #[default]
    Max,
    /// A binomial test on every line; all 2000 must pass.
    PerLine,
}

impl FromStr for McvAggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(McvAggregation::Max),
            "per-line" => Ok(McvAggregation::PerLine),
            other => Err(Error::InvalidArgument(format!(
                "unknown MCV aggregation {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyReport {
    pub mcv: usize,
    pub p_hat: f64,
    pub min_entropy: f64,
    pub p_value: PValue,
    pub pass: bool,
    pub aggregation: McvAggregation,
    /// Lines whose own binomial p-value is below the threshold.
    pub failing_lines: usize,
}

/// Most-common-value entropy test over the 1000 rows and 1000 columns.
///
/// Both aggregations reach the same decision: the binomial tail is
/// decreasing in the count, so the smallest per-line p-value belongs to the
/// line holding the global MCV.
pub fn entropy_test(m: &RestartMatrix, aggregation: McvAggregation) -> EntropyReport {
    let n = MATRIX_COLS as u64;
    let line_mcv: Vec<usize> = m
        .row_ones()
        .into_iter()
        .chain(m.column_ones())
        .map(|ones| ones.max(MATRIX_COLS - ones))
        .collect();
    let tail = |count: usize| binomial_upper_p(n, 0.5, count as u64).expect("count within trials");

    let mcv = *line_mcv.iter().max().expect("2000 lines");
    let failing_lines = line_mcv
        .iter()
        .filter(|&&c| tail(c).value() < ENTROPY_P_THRESHOLD)
        .count();
    let p_value = tail(mcv);
    let pass = match aggregation {
        McvAggregation::Max => p_value.value() >= ENTROPY_P_THRESHOLD,
        McvAggregation::PerLine => failing_lines == 0,
    };

    let p_hat = mcv as f64 / n as f64;
    let upper =
        (p_hat + MCV_CONFIDENCE_Z * (p_hat * (1.0 - p_hat) / (n - 1) as f64).sqrt()).min(1.0);
    EntropyReport {
        mcv,
        p_hat,
        min_entropy: -upper.log2(),
        p_value,
        pass,
        aggregation,
        failing_lines,
    }
}

fn check_row(row: &BitStream) -> Result<()> {
    if row.len() != MATRIX_COLS {
        return Err(Error::LengthMismatch {
            expected: MATRIX_COLS,
            actual: row.len(),
        });
    }
    Ok(())
}

/// Sum over ten 100-bit chunks of `(O0 - 50)^2/50 + (O1 - 50)^2/50`.
pub fn independence_statistic(row: &BitStream) -> Result<f64> {
    check_row(row)?;
    let expected = IND_CHUNK_BITS as f64 / 2.0;
    Ok((0..IND_CHUNKS)
        .map(|c| {
            let ones = row
                .slice(c * IND_CHUNK_BITS, (c + 1) * IND_CHUNK_BITS)
                .count_ones() as f64;
            let zeros = IND_CHUNK_BITS as f64 - ones;
            (zeros - expected).powi(2) / expected + (ones - expected).powi(2) / expected
        })
        .sum())
}

pub fn independence_test(row: &BitStream) -> Result<PValue> {
    chi_square_p(independence_statistic(row)?, IND_CHUNKS as u32)
}

/// Chi-square of the 500 disjoint 2-bit patterns against 125 each.
pub fn gf_statistic(row: &BitStream) -> Result<f64> {
    check_row(row)?;
    let mut counts = [0u64; 4];
    for i in 0..GF_PAIRS {
        counts[row.read_uint(2 * i, 2) as usize] += 1;
    }
    Ok(uniform_chi_square(&counts))
}

pub fn gf_test(row: &BitStream) -> Result<PValue> {
    chi_square_p(gf_statistic(row)?, 3)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LrsOutcome {
    pub length: usize,
    pub p_value: PValue,
}

pub fn lrs_test(row: &BitStream) -> Result<LrsOutcome> {
    check_row(row)?;
    let length = longest_repeated_substring(row)?;
    // A zero-length repeat cannot occur in 1000 bits; treat it as length 1.
    let p_value = lrs_p_value(length.max(1), MATRIX_COLS)?;
    Ok(LrsOutcome { length, p_value })
}

/// Per-row p-values of one IID test with their summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestSummary {
    #[serde(skip)]
    pub p_values: Vec<f64>,
    pub median: f64,
    pub min: f64,
    pub failing_rows: usize,
    pub pass: bool,
}

impl TestSummary {
    fn new(p_values: Vec<f64>, threshold: f64) -> Self {
        let failing_rows = p_values.iter().filter(|&&p| p < threshold).count();
        Self {
            median: median(&p_values),
            min: p_values.iter().copied().fold(f64::INFINITY, f64::min),
            failing_rows,
            pass: failing_rows == 0,
            p_values,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IidReport {
    pub independence: TestSummary,
    pub goodness_of_fit: TestSummary,
    pub lrs: TestSummary,
    #[serde(skip)]
    pub lrs_lengths: Vec<usize>,
    pub max_lrs_length: usize,
}

impl IidReport {
    pub fn pass(&self) -> bool {
        self.independence.pass && self.goodness_of_fit.pass && self.lrs.pass
    }
}

/// Runs the three row tests over every row of the matrix.
pub fn run_iid_suite(m: &RestartMatrix, exec: Execution) -> IidReport {
    let rows: Vec<(f64, f64, LrsOutcome)> = exec.map_range(MATRIX_ROWS, |i| {
        let row = m.row(i);
        let ind = independence_test(&row).expect("row length");
        let gf = gf_test(&row).expect("row length");
        let lrs = lrs_test(&row).expect("row length");
        (ind.value(), gf.value(), lrs)
    });
    let lrs_lengths: Vec<usize> = rows.iter().map(|r| r.2.length).collect();
    IidReport {
        independence: TestSummary::new(rows.iter().map(|r| r.0).collect(), IID_P_THRESHOLD),
        goodness_of_fit: TestSummary::new(rows.iter().map(|r| r.1).collect(), IID_P_THRESHOLD),
        lrs: TestSummary::new(
            rows.iter().map(|r| r.2.p_value.value()).collect(),
            IID_P_THRESHOLD,
        ),
        max_lrs_length: lrs_lengths.iter().copied().max().unwrap_or(0),
        lrs_lengths,
    }
}

/// `sum (O - E)^2 / E` against equal expected counts.
pub fn uniform_chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharUniformity {
    pub trials: usize,
    pub password_length: usize,
    pub counts: Vec<u64>,
    pub statistic: f64,
    pub df: u32,
    pub p_value: PValue,
    pub pass: bool,
}

/// Generates `trials` passwords (trial `j` uses restart `j`) at the length
/// matching 128-bit strength and tests the pooled characters for uniformity.
pub fn char_uniformity_test(
    desc: &EngineDescriptor,
    charset: &Charset,
    trials: usize,
    char_bits: u32,
    exec: Execution,
) -> Result<CharUniformity> {
    char_uniformity_with(charset, trials, char_bits, exec, |j, bits| {
        desc.restart(j)?.fill(bits)
    })
}

/// As [`char_uniformity_test`] with a caller-supplied bit source
/// `(trial, bits) -> stream`.
pub fn char_uniformity_with<F>(
    charset: &Charset,
    trials: usize,
    char_bits: u32,
    exec: Execution,
    source: F,
) -> Result<CharUniformity>
where
    F: Fn(u32, usize) -> Result<BitStream> + Sync + Send,
{
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    let n = required_length(charset.size(), DEFAULT_STRENGTH_BITS)?;
    let spec = PasswordSpec::new(charset.clone(), n, char_bits)?;
    let passwords = exec.try_map_range(trials, |j| {
        let bits = source(j as u32, spec.total_bits())?;
        password_from_bits(&bits, &spec)
    })?;
    let mut counts = vec![0u64; charset.size()];
    for pw in &passwords {
        for c in pw.as_str().chars() {
            counts[charset.index_of(c).expect("mapped from charset")] += 1;
        }
    }
    let statistic = uniform_chi_square(&counts);
    let df = charset.size() as u32 - 1;
    let p_value = chi_square_p(statistic, df)?;
    Ok(CharUniformity {
        trials,
        password_length: n,
        counts,
        statistic,
        df,
        pass: p_value.value() > CHAR_P_THRESHOLD,
        p_value,
    })
}

/// Full battery result for one engine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub engine: String,
    pub entropy: EntropyReport,
    pub iid: IidReport,
}

/// Flat record with the report's machine-readable fields.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRecord {
    pub engine: String,
    pub mcv: usize,
    pub p_hat: f64,
    pub min_entropy: f64,
    pub entropy_p: f64,
    pub entropy_pass: bool,
    pub ind_median: f64,
    pub gf_median: f64,
    pub lrs_median: f64,
    pub ind_pass: bool,
    pub gf_pass: bool,
    pub lrs_pass: bool,
}

impl ValidationReport {
    pub fn run(
        engine: impl Into<String>,
        m: &RestartMatrix,
        aggregation: McvAggregation,
        exec: Execution,
    ) -> Self {
        Self {
            engine: engine.into(),
            entropy: entropy_test(m, aggregation),
            iid: run_iid_suite(m, exec),
        }
    }

    pub fn pass(&self) -> bool {
        self.entropy.pass && self.iid.pass()
    }

    pub fn record(&self) -> ReportRecord {
        ReportRecord {
            engine: self.engine.clone(),
            mcv: self.entropy.mcv,
            p_hat: self.entropy.p_hat,
            min_entropy: self.entropy.min_entropy,
            entropy_p: self.entropy.p_value.value(),
            entropy_pass: self.entropy.pass,
            ind_median: self.iid.independence.median,
            gf_median: self.iid.goodness_of_fit.median,
            lrs_median: self.iid.lrs.median,
            ind_pass: self.iid.independence.pass,
            gf_pass: self.iid.goodness_of_fit.pass,
            lrs_pass: self.iid.lrs.pass,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&self.record()).expect("plain record")
    }

    pub fn to_text(&self) -> String {
        let r = self.record();
        let iid = &self.iid;
        let mut s = String::new();
        let _ = writeln!(s, "engine: {}", r.engine);
        let _ = writeln!(s, "mcv: {}", r.mcv);
        let _ = writeln!(s, "p_hat: {:.3}", r.p_hat);
        let _ = writeln!(s, "min_entropy: {:.6}", r.min_entropy);
        let _ = writeln!(s, "entropy_p: {:.6e}", r.entropy_p);
        let _ = writeln!(s, "entropy_pass: {}", r.entropy_pass);
        let _ = writeln!(s, "ind_median: {:.3}", r.ind_median);
        let _ = writeln!(s, "gf_median: {:.3}", r.gf_median);
        let _ = writeln!(s, "lrs_median: {:.3}", r.lrs_median);
        let _ = writeln!(
            s,
            "ind_pass: {} ({} failing rows)",
            r.ind_pass, iid.independence.failing_rows
        );
        let _ = writeln!(
            s,
            "gf_pass: {} ({} failing rows)",
            r.gf_pass, iid.goodness_of_fit.failing_rows
        );
        let _ = writeln!(
            s,
            "lrs_pass: {} ({} failing rows, max length {})",
            r.lrs_pass, iid.lrs.failing_rows, iid.max_lrs_length
        );
        s
    }
}
