//! Regenerates the frozen calibration constants in
//! `fixtures/calibration.json`. Run manually with
//! `cargo test -p mfcz --test calibration -- --ignored --nocapture`
//! and paste the printed JSON into the fixture when the corpus or the
//! generating seed changes.

use mfcz::corpus;
use mfcz::czdecomp;
use mfcz::grid::SampledSignal;
use mfcz::multifreq::{
    lepingle_ratio, orthsums_ratio, scaling_scan, variational_exponent, vets_ratio,
    weak_type_corpus_scan, KRange, ScanConfig, SmoothingKernel,
};
use mfcz::variation::VectorSequence;
use num_complex::Complex64;
use rand::Rng;

const SEED: u64 = 7;

#[test]
#[ignore]
fn regenerate_calibration() {
    // orthsums: 100 random coefficient vectors against gap ≥ 1 frequencies.
    let mut orthsums_max = 0.0f64;
    {
        let mut rng = corpus::trial_rng(SEED, 300);
        for _ in 0..100 {
            let n = rng.gen_range(2..=8);
            let xi = corpus::random_frequencies(&mut rng, n, 0.0, 64.0, 1.0).unwrap();
            let d: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            orthsums_max = orthsums_max.max(orthsums_ratio(&d, &xi, 1024).unwrap());
        }
    }

    // vets: 100 random (c, xi) with N in {2,4,8}, r = 2.5, q = 4.
    let mut vets_max = 0.0f64;
    {
        let mut rng = corpus::trial_rng(SEED, 301);
        for case in 0..100 {
            let n = [2usize, 4, 8][case % 3];
            let xi = corpus::random_frequencies(&mut rng, n, 0.0, 64.0, 1.0).unwrap();
            let len = rng.gen_range(3..=8);
            let keys: Vec<i64> = (0..len as i64).collect();
            let values: Vec<Vec<Complex64>> = (0..len)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        })
                        .collect()
                })
                .collect();
            let c = VectorSequence::new(keys, values).unwrap();
            vets_max = vets_max.max(vets_ratio(&c, &xi, 2.5, 4.0, 512).unwrap());
        }
    }

    // lepingle: 50 random signals.
    let mut lepingle_max = 0.0f64;
    {
        let kernel = SmoothingKernel;
        let ks = KRange::new(3, 10).unwrap();
        for trial in 0..50 {
            let mut rng = corpus::trial_rng(SEED, 400 + trial);
            let n = 1 << 12;
            let g: SampledSignal = corpus::random_signal(&mut rng, n, 0.0, 1.0 / n as f64).unwrap();
            lepingle_max = lepingle_max.max(lepingle_ratio(&g, &ks, 2.5, &kernel).unwrap());
        }
    }

    // Weak-type corpus scan at the acceptance parameters.
    let cfg = ScanConfig::new(vec![2, 4, 8, 16, 32], 20, 4.0, 2.5, SEED).unwrap();
    let weak = weak_type_corpus_scan(&cfg, 0.5 + 0.35).unwrap();
    let weak_max = weak.records.iter().map(|r| r.s).fold(0.0f64, f64::max);

    // Operator-norm scan at the acceptance parameters.
    let vmt = scaling_scan(&cfg, variational_exponent(2.5, 4.0) + 0.35).unwrap();
    let vmt_max = vmt.records.iter().map(|r| r.s).fold(0.0f64, f64::max);

    // Decomposition corpus: max diagnostic ratios over the 50-signal corpus.
    let ns = [1usize, 2, 4, 8, 16];
    let grid = 1 << 14;
    let dx = 1.0 / grid as f64;
    let (mut r_cover, mut r_good, mut r_fi, mut r_proj, mut overlap) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0usize);
    for trial in 0..50u64 {
        let mut rng = corpus::trial_rng(SEED, 200 + trial);
        let f = corpus::random_signal(&mut rng, grid, 0.0, dx).unwrap();
        let n = ns[trial as usize % ns.len()];
        let xi = corpus::random_frequencies(&mut rng, n, 0.0, 64.0, 1.0).unwrap();
        let lambda = rng.gen_range(0.5..4.0);
        let out = czdecomp::cz_decompose(&f, &xi, lambda).unwrap();
        let d = &out.diagnostics;
        r_cover = r_cover.max(d.r_cover);
        r_good = r_good.max(d.r_good);
        r_fi = r_fi.max(d.r_fi);
        r_proj = r_proj.max(d.r_proj);
        overlap = overlap.max(d.overlap_max);
    }

    // Frozen bounds carry 25% headroom over the observed maxima.
    let pad = |v: f64| (v * 1.25 * 1e6).ceil() / 1e6;
    println!(
        "{{\n  \"seed\": {SEED},\n  \"orthsums_c_meas\": {},\n  \"vets_c_meas\": {},\n  \"lepingle_c_meas\": {},\n  \"weak_c_cal\": {},\n  \"vmt_s_max\": {},\n  \"cz_r_cover\": {},\n  \"cz_r_good\": {},\n  \"cz_r_fi\": {},\n  \"cz_r_proj\": {},\n  \"cz_overlap_max\": {}\n}}",
        pad(orthsums_max),
        pad(vets_max),
        pad(lepingle_max),
        pad(weak_max),
        pad(vmt_max),
        pad(r_cover),
        pad(r_good),
        pad(r_fi),
        pad(r_proj),
        overlap
    );
    println!(
        "observed: orthsums {orthsums_max:.6} vets {vets_max:.6} lepingle {lepingle_max:.6} \
         weak {weak_max:.6} vmt {vmt_max:.6}; slopes weak {:?} vmt {:?}",
        weak.summary.slope, vmt.summary.slope
    );
}
