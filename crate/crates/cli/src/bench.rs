//! Password-generation timing: one record per generated password.

use std::fmt::Write as _;
use std::time::Instant;

use keyedgen::passgen::{generate_password, PasswordSpec};
use keyedgen::{Charset, EngineDescriptor, EngineKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRecord {
    pub engine: EngineKind,
    pub charset: u8,
    pub run_index: usize,
    pub elapsed_nanos: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiveNumber {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile with linear interpolation between order statistics.
fn quantile(sorted: &[u64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] as f64 + (sorted[hi] as f64 - sorted[lo] as f64) * (pos - lo as f64)
}

pub fn five_number(samples: &[u64]) -> FiveNumber {
    assert!(!samples.is_empty());
    let mut s = samples.to_vec();
    s.sort_unstable();
    FiveNumber {
        min: s[0] as f64,
        q1: quantile(&s, 0.25),
        median: quantile(&s, 0.5),
        q3: quantile(&s, 0.75),
        max: s[s.len() - 1] as f64,
    }
}

/// Times `trials` generations for one engine and charset. Run `j` uses
/// restart `j`; building the engine is outside the timed region.
pub fn time_group(
    desc: &EngineDescriptor,
    charset_id: u8,
    spec: &PasswordSpec,
    trials: usize,
) -> keyedgen::Result<Vec<BenchRecord>> {
    let mut records = Vec::with_capacity(trials);
    for run in 0..trials {
        let mut engine = desc.restart(run as u32)?;
        let start = Instant::now();
        let pw = generate_password(&mut engine, spec)?;
        let elapsed = start.elapsed().as_nanos() as u64;
        std::hint::black_box(pw);
        records.push(BenchRecord {
            engine: desc.kind(),
            charset: charset_id,
            run_index: run,
            // below clock resolution still took time
            elapsed_nanos: elapsed.max(1),
        });
    }
    Ok(records)
}

pub fn spec_for(charset_id: u8, char_bits: u32) -> keyedgen::Result<PasswordSpec> {
    let charset = Charset::preset(charset_id)?;
    let n = keyedgen::passgen::required_length(
        charset.size(),
        keyedgen::passgen::DEFAULT_STRENGTH_BITS,
    )?;
    PasswordSpec::new(charset, n, char_bits)
}

pub fn runs_csv(records: &[BenchRecord]) -> String {
    let mut s = String::from("engine,charset,run,nanos\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            r.engine, r.charset, r.run_index, r.elapsed_nanos
        );
    }
    s
}

/// Groups are summarised in first-appearance order.
pub fn summary(records: &[BenchRecord]) -> Vec<(EngineKind, u8, FiveNumber)> {
    let mut keys: Vec<(EngineKind, u8)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.engine, r.charset)) {
            keys.push((r.engine, r.charset));
        }
    }
    keys.into_iter()
        .map(|(e, c)| {
            let samples: Vec<u64> = records
                .iter()
                .filter(|r| r.engine == e && r.charset == c)
                .map(|r| r.elapsed_nanos)
                .collect();
            (e, c, five_number(&samples))
        })
        .collect()
}

pub fn summary_csv(rows: &[(EngineKind, u8, FiveNumber)]) -> String {
    let mut s = String::from("engine,charset,min,q1,median,q3,max\n");
    for (e, c, f) in rows {
        let _ = writeln!(
            s,
            "{e},{c},{},{},{},{},{}",
            f.min, f.q1, f.median, f.q3, f.max
        );
    }
    s
}

/// Notes on the median ordering, per charset. Informational only.
pub fn ordering_notes(rows: &[(EngineKind, u8, FiveNumber)]) -> Vec<String> {
    let mut notes = Vec::new();
    let mut charsets: Vec<u8> = rows.iter().map(|r| r.1).collect();
    charsets.sort_unstable();
    charsets.dedup();
    for c in charsets {
        let mut group: Vec<(EngineKind, f64)> = rows
            .iter()
            .filter(|r| r.1 == c)
            .map(|r| (r.0, r.2.median))
            .collect();
        group.sort_by(|a, b| a.1.total_cmp(&b.1));
        let order: Vec<String> = group
            .iter()
            .map(|(e, m)| format!("{e} ({m:.0} ns)"))
            .collect();
        let lcg_fastest = group.first().is_some_and(|g| g.0 == EngineKind::Lcg);
        let kmac_first_secure = group
            .iter()
            .find(|g| g.0 != EngineKind::Lcg)
            .is_some_and(|g| g.0 == EngineKind::Kmac);
        notes.push(format!(
            "charset {c}: median order {}; lcg fastest: {}; kmac fastest secure engine: {}",
            order.join(" < "),
            if lcg_fastest { "yes" } else { "no" },
            if kmac_first_secure { "yes" } else { "no" },
        ));
    }
    notes
}
