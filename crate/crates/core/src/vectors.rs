//! Known-answer files: one line per case, tab separated,
//! `key_hex  msg_hex  [L_bits  S_utf8]  tag_hex`.
//!
//! The suite is taken from the file name (`hmac-sha256.txt`, `kmac128.txt`,
//! ...). KMAC files carry the two bracketed columns; hash files leave the key
//! column empty; AES files hold `key  plaintext  ciphertext`. Blank lines and
//! lines starting with `#` are skipped.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mac::{
    aes_encrypt_block, cmac, hmac, kmac, CmacCipher, CmacParams, HashFunction, HmacParams,
    KmacParams, KmacVariant, MacKey,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VectorSuite {
    HmacSha256,
    HmacSha3_256,
    CmacAes128,
    CmacAes256,
    Kmac128,
    Kmac256,
    Sha256,
    Sha3_256,
    Aes128,
    Aes256,
}

impl VectorSuite {
    const ALL: [(VectorSuite, &'static str); 10] = [
        (VectorSuite::HmacSha256, "hmac-sha256"),
        (VectorSuite::HmacSha3_256, "hmac-sha3-256"),
        (VectorSuite::CmacAes128, "cmac-aes128"),
        (VectorSuite::CmacAes256, "cmac-aes256"),
        (VectorSuite::Kmac128, "kmac128"),
        (VectorSuite::Kmac256, "kmac256"),
        (VectorSuite::Sha256, "sha256"),
        (VectorSuite::Sha3_256, "sha3-256"),
        (VectorSuite::Aes128, "aes128"),
        (VectorSuite::Aes256, "aes256"),
    ];

    pub fn name(self) -> &'static str {
        Self::ALL
            .iter()
            .find(|(s, _)| *s == self)
            .expect("listed")
            .1
    }

    pub fn from_file_name(name: &str) -> Option<Self> {
        let stem = name.strip_suffix(".txt").unwrap_or(name);
        Self::ALL.iter().find(|(_, n)| *n == stem).map(|(s, _)| *s)
    }

    fn is_kmac(self) -> bool {
        matches!(self, VectorSuite::Kmac128 | VectorSuite::Kmac256)
    }
}

/// A vector file held in memory.
#[derive(Clone, Debug)]
pub struct VectorFile {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorCase {
    pub suite: VectorSuite,
    pub line: usize,
    pub key: Vec<u8>,
    pub message: Vec<u8>,
    pub output_bits: Option<usize>,
    pub customization: Vec<u8>,
    pub expected: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VectorOutcome {
    pub file: String,
    pub line: usize,
    pub suite: VectorSuite,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

macro_rules! bundle {
    ($($dir:literal / $file:literal),* $(,)?) => {
        vec![$(VectorFile {
            name: concat!($dir, "/", $file).to_string(),
            contents: include_str!(concat!("../vectors/", $dir, "/", $file)).to_string(),
        }),*]
    };
}

/// The vector files compiled into the crate.
pub fn bundled() -> Vec<VectorFile> {
    bundle![
        "hmac" / "hmac-sha256.txt",
        "hmac" / "hmac-sha3-256.txt",
        "cmac" / "cmac-aes128.txt",
        "cmac" / "cmac-aes256.txt",
        "kmac" / "kmac128.txt",
        "kmac" / "kmac256.txt",
        "sha" / "sha256.txt",
        "sha" / "sha3-256.txt",
        "aes" / "aes128.txt",
        "aes" / "aes256.txt",
    ]
}

/// Collects `*.txt` files in `dir` and its immediate subdirectories.
pub fn load_dir(dir: &Path) -> Result<Vec<VectorFile>> {
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            for sub in std::fs::read_dir(&path)? {
                paths.push(sub?.path());
            }
        } else {
            paths.push(path);
        }
    }
    paths.retain(|p| p.extension().is_some_and(|e| e == "txt"));
    paths.sort();
    if paths.is_empty() {
        return Err(Error::NoVectors(dir.to_path_buf()));
    }
    paths
        .into_iter()
        .map(|p| {
            Ok(VectorFile {
                name: p.strip_prefix(dir).unwrap_or(&p).display().to_string(),
                contents: std::fs::read_to_string(&p)?,
            })
        })
        .collect()
}

pub fn parse(file: &VectorFile) -> Result<Vec<VectorCase>> {
    let base = Path::new(&file.name)
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or(&file.name);
    let suite = VectorSuite::from_file_name(base).ok_or_else(|| Error::VectorFormat {
        path: file.name.clone(),
        line: 0,
        reason: "unrecognised suite name".into(),
    })?;
    let bad = |line: usize, reason: String| Error::VectorFormat {
        path: file.name.clone(),
        line,
        reason,
    };
    let mut cases = Vec::new();
    for (idx, raw) in file.contents.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        let want = if suite.is_kmac() { 5 } else { 3 };
        if fields.len() != want {
            return Err(bad(
                line,
                format!(
                    "expected {want} tab-separated fields, found {}",
                    fields.len()
                ),
            ));
        }
        let decode = |s: &str| hex::decode(s.trim()).map_err(|e| bad(line, e.to_string()));
        let (output_bits, customization) = if suite.is_kmac() {
            let bits = fields[2]
                .trim()
                .parse()
                .map_err(|_| bad(line, format!("bad length {:?}", fields[2])))?;
            (Some(bits), fields[3].as_bytes().to_vec())
        } else {
            (None, Vec::new())
        };
        cases.push(VectorCase {
            suite,
            line,
            key: decode(fields[0])?,
            message: decode(fields[1])?,
            output_bits,
            customization,
            expected: decode(fields[want - 1])?,
        });
    }
    Ok(cases)
}

/// Computes the output for one case.
pub fn evaluate(case: &VectorCase) -> Result<Vec<u8>> {
    let key = MacKey::new(case.key.clone());
    let m = &case.message;
    let kmac_params = |variant| {
        KmacParams::new(variant, case.output_bits.unwrap_or(256))
            .with_customization(case.customization.clone())
    };
    let tag = match case.suite {
        VectorSuite::HmacSha256 => hmac(&key, m, &HmacParams::default()),
        VectorSuite::HmacSha3_256 => hmac(
            &key,
            m,
            &HmacParams {
                hash: HashFunction::Sha3_256,
            },
        ),
        VectorSuite::CmacAes128 => cmac(&key, m, &CmacParams::default())?,
        VectorSuite::CmacAes256 => cmac(
            &key,
            m,
            &CmacParams {
                cipher: CmacCipher::Aes256,
            },
        )?,
        VectorSuite::Kmac128 => kmac(&key, m, &kmac_params(KmacVariant::Kmac128))?,
        VectorSuite::Kmac256 => kmac(&key, m, &kmac_params(KmacVariant::Kmac256))?,
        VectorSuite::Sha256 => return Ok(HashFunction::Sha256.digest(&[m])),
        VectorSuite::Sha3_256 => return Ok(HashFunction::Sha3_256.digest(&[m])),
        VectorSuite::Aes128 | VectorSuite::Aes256 => {
            let block: [u8; 16] = m
                .as_slice()
                .try_into()
                .map_err(|_| Error::InvalidArgument("AES vectors hold one 16-byte block".into()))?;
            return Ok(aes_encrypt_block(&key, &block)?.to_vec());
        }
    };
    Ok(tag.bits.into_bytes())
}

/// Parses and evaluates every file. A malformed file is an error; a wrong
/// answer is a failed outcome.
pub fn run(files: &[VectorFile]) -> Result<Vec<VectorOutcome>> {
    let mut outcomes = Vec::new();
    for file in files {
        for case in parse(file)? {
            let actual = evaluate(&case)?;
            outcomes.push(VectorOutcome {
                file: file.name.clone(),
                line: case.line,
                suite: case.suite,
                pass: actual == case.expected,
                expected: hex::encode(&case.expected),
                actual: hex::encode(actual),
            });
        }
    }
    Ok(outcomes)
}
