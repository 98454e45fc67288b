use keyedgen::mac::MacKey;
use keyedgen::passgen::required_length;
use keyedgen::stats::{binomial_upper_p, chi_square_p};
use keyedgen::validation::{
    build_restart_matrix, build_restart_matrix_with, char_uniformity_test, char_uniformity_with,
    entropy_test, gf_statistic, gf_test, independence_statistic, independence_test, lrs_test,
    run_iid_suite, McvAggregation, RestartMatrix, ValidationReport, MATRIX_BYTES, MATRIX_COLS,
};
use keyedgen::{BitStream, Charset, EngineDescriptor, EngineKind, Execution, PrngEngine};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn descriptor(kind: EngineKind) -> EngineDescriptor {
    EngineDescriptor::new(
        kind,
        MacKey::new(vec![0x5a; kind.key_bits() / 8]),
        b"battery".to_vec(),
    )
}

fn random_matrix(seed: u64) -> RestartMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bytes = vec![0u8; MATRIX_BYTES];
    rng.fill_bytes(&mut bytes);
    RestartMatrix::from_bytes(bytes).unwrap()
}

fn random_row(rng: &mut ChaCha8Rng) -> BitStream {
    let mut b = vec![0u8; MATRIX_COLS / 8];
    rng.fill_bytes(&mut b);
    BitStream::from_bytes(b)
}

#[test]
fn builds_are_deterministic_and_rows_differ() {
    for kind in [EngineKind::Hmac, EngineKind::Kmac] {
        let a = build_restart_matrix(&descriptor(kind), Execution::default()).unwrap();
        let b = build_restart_matrix(&descriptor(kind), Execution::default()).unwrap();
        assert_eq!(a, b);
        let rows: std::collections::HashSet<BitStream> = (0..1000).map(|i| a.row(i)).collect();
        assert_eq!(rows.len(), 1000);
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let desc = descriptor(EngineKind::Cmac);
    let s = build_restart_matrix(&desc, Execution::Sequential).unwrap();
    let p = build_restart_matrix(&desc, Execution::Parallel).unwrap();
    assert_eq!(s, p);
    assert_eq!(
        run_iid_suite(&s, Execution::Sequential),
        run_iid_suite(&p, Execution::Parallel)
    );
    let q2 = Charset::preset(2).unwrap();
    assert_eq!(
        char_uniformity_test(&desc, &q2, 300, 32, Execution::Sequential).unwrap(),
        char_uniformity_test(&desc, &q2, 300, 32, Execution::Parallel).unwrap()
    );
}

#[test]
fn matrix_file_round_trip() {
    let m = random_matrix(1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.bin");
    m.write(&path).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), MATRIX_BYTES as u64);
    assert_eq!(RestartMatrix::read(&path).unwrap(), m);
    std::fs::write(&path, vec![0u8; MATRIX_BYTES - 1]).unwrap();
    assert!(RestartMatrix::read(&path).is_err());
}

#[test]
fn row_and_column_layout() {
    let m = random_matrix(2);
    for (r, c) in [(0, 0), (0, 999), (999, 0), (412, 7), (3, 998)] {
        let byte = m.as_bytes()[r * 125 + c / 8];
        assert_eq!(m.bit(r, c), byte >> (7 - c % 8) & 1 == 1);
        assert_eq!(m.transpose().bit(c, r), m.bit(r, c));
    }
}

#[test]
fn entropy_is_transpose_invariant() {
    for seed in 0..5 {
        let m = random_matrix(seed);
        for agg in [McvAggregation::Max, McvAggregation::PerLine] {
            assert_eq!(entropy_test(&m, agg), entropy_test(&m.transpose(), agg));
        }
    }
}

#[test]
fn entropy_degenerate_and_balanced() {
    let ones = RestartMatrix::from_bytes(vec![0xff; MATRIX_BYTES]).unwrap();
    let r = entropy_test(&ones, McvAggregation::Max);
    assert_eq!(r.mcv, 1000);
    assert_eq!(r.min_entropy, 0.0);
    assert!(r.p_value.value() < 1e-300 && !r.pass);

    // Alternating rows of 0x55/0xaa: every row and column is 500/500.
    let bytes: Vec<u8> = (0..1000)
        .flat_map(|i| vec![if i % 2 == 0 { 0x55 } else { 0xaa }; 125])
        .collect();
    let r = entropy_test(
        &RestartMatrix::from_bytes(bytes).unwrap(),
        McvAggregation::Max,
    );
    assert_eq!(r.mcv, 500);
    assert!((r.p_value.value() - 0.512_612_509_089_180_4).abs() < 1e-12);
    assert!(r.pass);
}

#[test]
fn entropy_p_decreases_strictly_in_mcv() {
    let ps: Vec<f64> = (500..=1000)
        .map(|k| binomial_upper_p(1000, 0.5, k).unwrap().value())
        .collect();
    assert!(ps.windows(2).all(|w| w[1] < w[0]));
    assert!(binomial_upper_p(1000, 0.5, 570).unwrap().value() >= 0.000_005);
    assert!(binomial_upper_p(1000, 0.5, 571).unwrap().value() < 0.000_005);
}

#[test]
fn aggregations_agree() {
    for seed in 0..3 {
        let m = random_matrix(seed);
        assert_eq!(
            entropy_test(&m, McvAggregation::Max).pass,
            entropy_test(&m, McvAggregation::PerLine).pass
        );
    }
    let ones = RestartMatrix::from_bytes(vec![0xff; MATRIX_BYTES]).unwrap();
    let r = entropy_test(&ones, McvAggregation::PerLine);
    assert!(!r.pass);
    assert_eq!(r.failing_lines, 2000);
}

fn spreadsheet_ind(bits: &[bool]) -> f64 {
    let mut stat = 0.0;
    for chunk in bits.chunks(100) {
        let ones = chunk.iter().filter(|&&b| b).count() as f64;
        let zeros = 100.0 - ones;
        stat += (zeros - 50.0) * (zeros - 50.0) / 50.0 + (ones - 50.0) * (ones - 50.0) / 50.0;
    }
    stat
}

fn spreadsheet_gf(bits: &[bool]) -> f64 {
    let mut counts = [0.0f64; 4];
    for pair in bits.chunks(2) {
        counts[(pair[0] as usize) << 1 | pair[1] as usize] += 1.0;
    }
    counts
        .iter()
        .map(|o| (o - 125.0) * (o - 125.0) / 125.0)
        .sum()
}

#[test]
fn row_tests_match_independent_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x90b);
    for _ in 0..200 {
        let row = random_row(&mut rng);
        let bits: Vec<bool> = row.iter().collect();
        let ind = spreadsheet_ind(&bits);
        let gf = spreadsheet_gf(&bits);
        assert!((independence_statistic(&row).unwrap() - ind).abs() < 1e-9);
        assert!((gf_statistic(&row).unwrap() - gf).abs() < 1e-9);
        assert!(
            (independence_test(&row).unwrap().value() - chi_square_p(ind, 10).unwrap().value())
                .abs()
                < 1e-12
        );
        assert!(
            (gf_test(&row).unwrap().value() - chi_square_p(gf, 3).unwrap().value()).abs() < 1e-12
        );
    }
}

#[test]
fn row_test_fixtures() {
    let balanced = BitStream::from_bit_str(&"01".repeat(500)).unwrap();
    assert_eq!(independence_statistic(&balanced).unwrap(), 0.0);
    assert_eq!(independence_test(&balanced).unwrap().value(), 1.0);
    assert_eq!(gf_statistic(&balanced).unwrap(), 1500.0);
    assert!(gf_test(&balanced).unwrap().value() < 1e-300);

    let zeros = BitStream::from_bytes(vec![0; 125]);
    assert_eq!(independence_statistic(&zeros).unwrap(), 1000.0);
    assert!(independence_test(&zeros).unwrap().value() < 1e-200);

    let perfect = BitStream::from_bit_str(&"00011011".repeat(125)).unwrap();
    assert_eq!(gf_test(&perfect).unwrap().value(), 1.0);

    assert!(independence_test(&BitStream::from_bytes(vec![0; 124])).is_err());
    assert!(gf_test(&BitStream::from_bytes(vec![0; 126])).is_err());
    assert!(lrs_test(&BitStream::from_bytes(vec![0; 100])).is_err());
}

#[test]
fn lrs_threshold_boundary() {
    // A random row with a planted repeat of exactly `w` bits.
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for (w, pass) in [(28usize, true), (29, false)] {
        loop {
            let mut bits: Vec<bool> = (0..1000).map(|_| rng.random::<bool>()).collect();
            let src: Vec<bool> = bits[100..100 + w].to_vec();
            bits[600..600 + w].copy_from_slice(&src);
            let row: BitStream = bits.into_iter().collect();
            let r = lrs_test(&row).unwrap();
            if r.length != w {
                continue;
            }
            assert_eq!(r.p_value.value() >= 0.001, pass, "w={w}");
            break;
        }
    }
}

#[test]
fn constant_rows_fail_the_suite() {
    let bytes: Vec<u8> = (0..1000)
        .flat_map(|i| vec![if i % 2 == 0 { 0x00 } else { 0xff }; 125])
        .collect();
    let report = run_iid_suite(
        &RestartMatrix::from_bytes(bytes).unwrap(),
        Execution::default(),
    );
    assert!(report.independence.median < 1e-100);
    assert!(report.goodness_of_fit.median < 1e-100);
    assert!(!report.pass());
    assert_eq!(report.independence.failing_rows, 1000);
}

#[test]
fn suite_shapes() {
    let report = run_iid_suite(&random_matrix(4), Execution::default());
    for s in [&report.independence, &report.goodness_of_fit, &report.lrs] {
        assert_eq!(s.p_values.len(), 1000);
        assert!((0.0..=1.0).contains(&s.median));
    }
    assert_eq!(report.lrs_lengths.len(), 1000);
}

#[test]
fn consecutive_lcg_seeds_are_visibly_biased() {
    // Seeds k, k+1, ... give first states that differ only in their low
    // bits, so the leading columns of the matrix are nearly constant.
    let m = build_restart_matrix_with(Execution::default(), |i| {
        PrngEngine::lcg(i as u64).fill(1000)
    })
    .unwrap();
    assert!(!entropy_test(&m, McvAggregation::Max).pass);
    let hashed = build_restart_matrix(&descriptor(EngineKind::Lcg), Execution::default()).unwrap();
    assert!(entropy_test(&hashed, McvAggregation::Max).pass);
}

#[test]
fn char_uniformity_conservation_and_rigged_source() {
    let q1 = Charset::preset(1).unwrap();
    let r = char_uniformity_test(
        &descriptor(EngineKind::Kmac),
        &q1,
        500,
        32,
        Execution::default(),
    )
    .unwrap();
    assert_eq!(
        r.counts.iter().sum::<u64>(),
        500 * required_length(52, 128).unwrap() as u64
    );
    assert_eq!(r.df, 51);

    let rigged = char_uniformity_with(&q1, 500, 32, Execution::default(), |_, bits| {
        Ok(BitStream::from_bytes(vec![0; bits / 8]))
    })
    .unwrap();
    assert_eq!(rigged.counts[0], 500 * 23);
    assert!(rigged.p_value.value() < 1e-100 && !rigged.pass);
    assert!(char_uniformity_test(
        &descriptor(EngineKind::Kmac),
        &q1,
        0,
        32,
        Execution::default()
    )
    .is_err());
}

#[test]
fn report_fields_and_determinism() {
    let m = build_restart_matrix(&descriptor(EngineKind::Hmac), Execution::default()).unwrap();
    let a = ValidationReport::run("hmac", &m, McvAggregation::Max, Execution::Sequential);
    let b = ValidationReport::run("hmac", &m, McvAggregation::Max, Execution::Parallel);
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a.to_json_line()).unwrap();
    for key in [
        "engine",
        "mcv",
        "p_hat",
        "min_entropy",
        "entropy_p",
        "entropy_pass",
        "ind_median",
        "gf_median",
        "lrs_median",
        "ind_pass",
        "gf_pass",
        "lrs_pass",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!(a.to_text().contains("engine"));
}
