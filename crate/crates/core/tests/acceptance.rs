//! Acceptance gate: one test per shipped guarantee. Each test prints a
//! single `criterion N (<label>): PASS` line, so
//! `cargo test --test acceptance -- --nocapture` reads as a checklist.
//! Tolerances are pinned here rather than imported, so a library-side
//! regression cannot silently relax the gate.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use groupoid_rd::algebra::{
    convolve, involution, reduced_norm, rep_matrix, weighted_seminorm, GFunction, SeminormMode,
};
use groupoid_rd::groupoid::{n_regularity, Groupoid, GroupoidAction};
use groupoid_rd::length::{growth_profile, word_length, LengthFunction};
use groupoid_rd::metric::{bs_norm, roe_norm, space_growth, BsMode, FiniteMetricSpace, Kernel};
use groupoid_rd::permanence::{check_pullback, lift_function};
use groupoid_rd::rd::{rd_scan_with, witness_construct, ScanConfig, TestFamily};
use groupoid_rd::twist::{perturb, pullback_cocycle, Cocycle};

/// Pointwise algebraic identities (associativity, multiplicativity of
/// the representation, adjointness) on fibers of dimension at most 18.
const ALG_TOL: f64 = 1e-10;
/// The C*-identity compares two independently computed spectra.
const CSTAR_TOL: f64 = 1e-8;
/// Norm inequalities across independent eigensolves.
const NORM_TOL: f64 = 1e-9;
/// Slack when re-checking certified witness bounds numerically.
const CERT_SLACK: f64 = 1e-6;
/// Exact lift identities (intertwining, norm scaling) after rounding.
const EXACT_TOL: f64 = 1e-12;
/// Relative spread allowed between scan maxima on growing paths.
const SCAN_REL_TOL: f64 = 0.10;
/// Relative agreement with the closed-form witness ratio at depth 12.
const WITNESS_REL_TOL: f64 = 0.05;

fn random_function(g: &Groupoid, rng: &mut ChaCha8Rng) -> GFunction {
    let coeffs: Vec<Complex64> = (0..g.num_arrows())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    GFunction::from_coeffs(g, coeffs).expect("matching coefficient count")
}

/// Unimodular phases, pinned to 1 on units, as a coboundary seed.
fn random_unit_phases(g: &Groupoid, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..g.num_arrows() as u32)
        .map(|a| {
            if g.is_unit(a) {
                Complex64::ONE
            } else {
                Complex64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU)
            }
        })
        .collect()
}

fn max_coeff_diff(a: &GFunction, b: &GFunction) -> f64 {
    a.coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// The transformation groupoid of Z₂ swapping two points.
fn swap_transformation() -> Groupoid {
    let g = Groupoid::cyclic(2).expect("order 2");
    let unit = g.units()[0];
    let mut map = std::collections::BTreeMap::new();
    map.insert((unit, 0), 0);
    map.insert((unit, 1), 1);
    map.insert((1, 0), 1);
    map.insert((1, 1), 0);
    let action = GroupoidAction {
        anchor: vec![unit, unit],
        map,
    };
    let (tg, _) = Groupoid::transformation(&g, &action).expect("valid action");
    tg
}

fn algebra_suite() -> Vec<(&'static str, Groupoid, Cocycle)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pair3 = Groupoid::pair(3).expect("pair groupoid");
    let cob3 = Cocycle::coboundary(&pair3, random_unit_phases(&pair3, &mut rng))
        .expect("unimodular phases");
    let z6 = Groupoid::cyclic(6).expect("cyclic group");
    let cob6 =
        Cocycle::coboundary(&z6, random_unit_phases(&z6, &mut rng)).expect("unimodular phases");
    let (klein, anticommuting) = Cocycle::heisenberg_z2z2();
    let z3 = Groupoid::cyclic(3).expect("cyclic group");
    let u3 = z3.units()[0];
    let (blow, _) = Groupoid::blow_up(&z3, &[u3, u3]).expect("two-fold blow-up");
    vec![
        (
            "pair groupoid on 2 points",
            Groupoid::pair(2).expect("pair groupoid"),
            Cocycle::trivial(),
        ),
        ("pair groupoid on 3 points", pair3, cob3),
        (
            "cyclic group of order 2",
            Groupoid::cyclic(2).expect("cyclic group"),
            Cocycle::trivial(),
        ),
        ("cyclic group of order 6", z6, cob6),
        (
            "Klein four-group with anticommuting twist",
            klein,
            anticommuting,
        ),
        (
            "two-fold blow-up of the cyclic group of order 3",
            blow,
            Cocycle::trivial(),
        ),
        (
            "transformation groupoid of the two-point swap",
            swap_transformation(),
            Cocycle::trivial(),
        ),
    ]
}

#[test]
fn criterion_1_twisted_algebra_soundness() {
    let started = Instant::now();
    for (label, g, sigma) in algebra_suite() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for trial in 0..100u32 {
            let f1 = random_function(&g, &mut rng);
            let f2 = random_function(&g, &mut rng);
            let f3 = random_function(&g, &mut rng);

            let f12 = convolve(&g, &f1, &f2, &sigma).expect("convolution");
            let left = convolve(&g, &f12, &f3, &sigma).expect("convolution");
            let right = convolve(
                &g,
                &f1,
                &convolve(&g, &f2, &f3, &sigma).expect("convolution"),
                &sigma,
            )
            .expect("convolution");
            let assoc_err = max_coeff_diff(&left, &right);
            assert!(
                assoc_err < ALG_TOL,
                "{label} trial {trial}: associativity off by {assoc_err:e}"
            );

            let f1_star = involution(&g, &f1, &sigma).expect("involution");
            for x in g.units() {
                let rep1 = rep_matrix(&g, &f1, x, &sigma).expect("fiber operator").matrix;
                let rep2 = rep_matrix(&g, &f2, x, &sigma).expect("fiber operator").matrix;
                let rep12 = rep_matrix(&g, &f12, x, &sigma)
                    .expect("fiber operator")
                    .matrix;
                let prod = &rep1 * &rep2;
                let mult_err = rep12
                    .iter()
                    .zip(prod.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(
                    mult_err < ALG_TOL,
                    "{label} trial {trial} unit {x}: multiplicativity off by {mult_err:e}"
                );

                let rep_star = rep_matrix(&g, &f1_star, x, &sigma)
                    .expect("fiber operator")
                    .matrix;
                let adj = rep1.adjoint();
                let adj_err = rep_star
                    .iter()
                    .zip(adj.iter())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(
                    adj_err < ALG_TOL,
                    "{label} trial {trial} unit {x}: adjointness off by {adj_err:e}"
                );
            }

            let norm = reduced_norm(&g, &f1, &sigma).expect("reduced norm");
            let gram = convolve(&g, &f1_star, &f1, &sigma).expect("convolution");
            let gram_norm = reduced_norm(&g, &gram, &sigma).expect("reduced norm");
            assert!(
                (gram_norm - norm * norm).abs() < CSTAR_TOL,
                "{label} trial {trial}: C*-identity {gram_norm} vs {norm}^2"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "algebra suite took {elapsed:?}"
    );
    println!("criterion 1 (twisted algebra soundness): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_twist_domination() {
    let (klein, anticommuting) = Cocycle::heisenberg_z2z2();
    let pool: Vec<(Groupoid, Option<Cocycle>)> = vec![
        (Groupoid::pair(2).expect("pair groupoid"), None),
        (Groupoid::pair(3).expect("pair groupoid"), None),
        (Groupoid::cyclic(2).expect("cyclic group"), None),
        (Groupoid::cyclic(4).expect("cyclic group"), None),
        (Groupoid::cyclic(6).expect("cyclic group"), None),
        (klein.clone(), Some(anticommuting.clone())),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for draw in 0..200u32 {
        let (g, base) = &pool[draw as usize % pool.len()];
        let sigma = match (draw % 3, base) {
            (0, _) => Cocycle::trivial(),
            (_, Some(tw)) => {
                perturb(g, tw, &random_unit_phases(g, &mut rng)).expect("perturbed twist")
            }
            _ => Cocycle::coboundary(g, random_unit_phases(g, &mut rng))
                .expect("unimodular phases"),
        };
        let f = random_function(g, &mut rng);
        let twisted = reduced_norm(g, &f, &sigma).expect("reduced norm");
        let dominating =
            reduced_norm(g, &f.modulus(), &Cocycle::trivial()).expect("reduced norm");
        assert!(
            twisted <= dominating + NORM_TOL,
            "draw {draw}: twisted norm {twisted} exceeds modulus norm {dominating}"
        );
    }

    // Pinned example: the sum of the two anticommuting reflections has
    // twisted norm sqrt(2) but untwisted norm 2.
    let f = GFunction::from_entries(&klein, &[(1, Complex64::ONE), (2, Complex64::ONE)])
        .expect("two generators");
    let twisted = reduced_norm(&klein, &f, &anticommuting).expect("reduced norm");
    let untwisted =
        reduced_norm(&klein, &f.modulus(), &Cocycle::trivial()).expect("reduced norm");
    assert!(
        (twisted - 2f64.sqrt()).abs() < NORM_TOL,
        "twisted norm {twisted} should be sqrt(2)"
    );
    assert!(
        (untwisted - 2.0).abs() < NORM_TOL,
        "untwisted norm {untwisted} should be 2"
    );
    assert!(twisted <= untwisted + NORM_TOL);
    println!(
        "criterion 2 (twists only lower the norm): PASS ({twisted:.12} <= {untwisted:.12})"
    );
}

#[test]
fn criterion_3_tree_witness_certificates() {
    let started = Instant::now();
    for depth in 3..=12u32 {
        let n = (1u32 << (depth + 1)) - 1;
        let space = Arc::new(FiniteMetricSpace::binary_tree(depth).expect("tree"));
        let g = Groupoid::pair(n).expect("pair groupoid");
        let l = LengthFunction::pair_metric(space);
        let mut cocycles = vec![("trivial", Cocycle::trivial())];
        // Keep the dense phase vector out of the two largest instances;
        // the certificates are cocycle-independent either way.
        if depth <= 10 {
            let mut rng = ChaCha8Rng::seed_from_u64(300 + u64::from(depth));
            cocycles.push((
                "coboundary",
                Cocycle::coboundary(&g, random_unit_phases(&g, &mut rng))
                    .expect("unimodular phases"),
            ));
        }
        for (kind, sigma) in &cocycles {
            let w = witness_construct(&g, sigma, &l, 0, f64::from(depth)).expect("ball witness");
            assert_eq!(
                w.fiber_size(),
                u64::from(n),
                "depth {depth} ({kind}): the root ball must exhaust the tree"
            );
            assert!(
                w.verified_norm_lower >= w.norm_lower_bound() - CERT_SLACK,
                "depth {depth} ({kind}): verified norm {} under certified {}",
                w.verified_norm_lower,
                w.norm_lower_bound()
            );
            for t in [0.5, 1.0, 2.0] {
                let semi = weighted_seminorm(&g, &w.function, &l, t, SeminormMode::Symmetric)
                    .expect("seminorm");
                assert!(
                    semi <= w.seminorm_upper_bound(t) + CERT_SLACK,
                    "depth {depth} ({kind}) t={t}: seminorm {semi} above certified {}",
                    w.seminorm_upper_bound(t)
                );
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "witness sweep took {elapsed:?}"
    );
    println!("criterion 3 (tree ball witnesses): PASS in {elapsed:?}");
}

#[test]
fn criterion_4_growth_separates_scan_from_witnesses() {
    // Polynomial growth: the ball-indicator scan maximum on paths is
    // stable as the path doubles.
    let mut max_ratios = Vec::new();
    for n in [32u32, 64] {
        let space = Arc::new(FiniteMetricSpace::path(n).expect("path"));
        let g = Groupoid::pair(n).expect("pair groupoid");
        let l = LengthFunction::pair_metric(space);
        let scan = rd_scan_with(
            &g,
            &Cocycle::trivial(),
            &l,
            1.0,
            TestFamily::parse("balls").expect("family"),
            &ScanConfig::default(),
        )
        .expect("scan");
        max_ratios.push(scan.max_ratio);
    }
    let spread =
        (max_ratios[0] - max_ratios[1]).abs() / max_ratios[0].max(max_ratios[1]);
    assert!(
        spread < SCAN_REL_TOL,
        "path scan maxima {max_ratios:?} spread by {spread}"
    );

    // Exponential growth: certified witness ratios keep climbing.
    let mut bounds = Vec::new();
    for depth in [8u32, 10, 12] {
        let n = (1u32 << (depth + 1)) - 1;
        let space = Arc::new(FiniteMetricSpace::binary_tree(depth).expect("tree"));
        let g = Groupoid::pair(n).expect("pair groupoid");
        let l = LengthFunction::pair_metric(space);
        let w = witness_construct(&g, &Cocycle::trivial(), &l, 0, f64::from(depth))
            .expect("ball witness");
        assert!(
            w.verified_norm_lower >= w.norm_lower_bound() - CERT_SLACK,
            "depth {depth}: witness certificate must be backed numerically"
        );
        bounds.push(w.ratio_lower_bound(1.0));
    }
    assert!(
        bounds[0] < bounds[1] && bounds[1] < bounds[2],
        "witness ratio bounds must increase with depth: {bounds:?}"
    );
    let analytic = f64::from((1u32 << 13) - 1).sqrt() / 25.0;
    let rel = (bounds[2] - analytic).abs() / analytic;
    assert!(
        rel < WITNESS_REL_TOL,
        "depth-12 ratio bound {} vs closed form {analytic}",
        bounds[2]
    );
    println!(
        "criterion 4 (growth separates scan from witnesses): PASS \
         (path maxima {:.6}/{:.6}, tree bounds {:.4} < {:.4} < {:.4})",
        max_ratios[0], max_ratios[1], bounds[0], bounds[1], bounds[2]
    );
}

#[test]
fn criterion_5_lift_permanence() {
    let (klein, anticommuting) = Cocycle::heisenberg_z2z2();
    let z6 = Groupoid::cyclic(6).expect("cyclic group");
    let pair2 = Groupoid::pair(2).expect("pair groupoid");
    let trivial = Cocycle::trivial();
    let klein_length = word_length(&klein, &[1, 2]).expect("generators");
    let z6_length = word_length(&z6, &[1]).expect("generator");
    let pair_length =
        LengthFunction::pair_metric(Arc::new(FiniteMetricSpace::path(2).expect("path")));
    let examples: Vec<(&str, &Groupoid, &Cocycle, &LengthFunction)> = vec![
        ("cyclic group of order 6", &z6, &trivial, &z6_length),
        (
            "Klein four-group with anticommuting twist",
            &klein,
            &anticommuting,
            &klein_length,
        ),
        (
            "pair groupoid on 2 points",
            &pair2,
            &trivial,
            &pair_length,
        ),
    ];
    for (label, g, sigma, l) in examples {
        for npts in 1..=3u32 {
            let mut p = Vec::new();
            for u in g.units() {
                p.extend(std::iter::repeat(u).take(npts as usize));
            }
            let (h, phi) = Groupoid::blow_up(g, &p).expect("blow-up");
            assert_eq!(n_regularity(&phi, &h, g).expect("regular"), npts);

            let mut rng = ChaCha8Rng::seed_from_u64(500 + u64::from(npts));
            let f0 = random_function(g, &mut rng);
            let report = check_pullback(&phi, &h, g, sigma, l, &f0, 1.0).expect("pullback check");
            assert!(report.pass(), "{label}, n = {npts}: {:?}", report.rows);
            for row in &report.rows {
                if row.tol <= EXACT_TOL {
                    assert!(
                        (row.lhs - row.rhs).abs() <= EXACT_TOL,
                        "{label}, n = {npts}: {} off by {:e}",
                        row.check,
                        (row.lhs - row.rhs).abs()
                    );
                }
            }

            let sigma_h = pullback_cocycle(&phi, &h, g, sigma).expect("pulled-back twist");
            for trial in 0..100u32 {
                let f = random_function(g, &mut rng);
                let fhat = lift_function(&phi, &h, g, &f).expect("lift");
                let norm_g = reduced_norm(g, &f, sigma).expect("reduced norm");
                let norm_h = reduced_norm(&h, &fhat, &sigma_h).expect("reduced norm");
                assert!(
                    norm_g <= norm_h / f64::from(npts) + NORM_TOL,
                    "{label}, n = {npts}, trial {trial}: {norm_g} > {norm_h}/{npts}"
                );
            }
        }
    }
    println!("criterion 5 (lift permanence): PASS");
}

#[test]
fn criterion_6_metric_groupoid_bridge() {
    let spaces: Vec<(&str, FiniteMetricSpace)> = vec![
        (
            "path on 256 points",
            FiniteMetricSpace::path(256).expect("path"),
        ),
        (
            "16-by-16 grid",
            FiniteMetricSpace::grid(16, 16).expect("grid"),
        ),
        (
            "binary tree of depth 7",
            FiniteMetricSpace::binary_tree(7).expect("tree"),
        ),
    ];
    for (label, space) in spaces {
        let space = Arc::new(space);
        let n = space.len() as u32;
        let g = Groupoid::pair(n).expect("pair groupoid");
        let l = LengthFunction::pair_metric(space.clone());

        let radii: Vec<f64> = (0..=4).map(f64::from).collect();
        let sg = space_growth(&space, &radii).expect("space growth");
        let gp = growth_profile(&g, &l, &radii).expect("groupoid growth");
        assert_eq!(sg.rows.len(), gp.rows.len(), "{label}: growth row count");
        for (srow, grow) in sg.rows.iter().zip(&gp.rows) {
            assert_eq!(grow.unit, srow.unit * n + srow.unit, "{label}: unit ids");
            assert_eq!(srow.r, grow.r, "{label}: radii");
            assert_eq!(srow.count, grow.count, "{label}: ball sizes");
        }
        assert_eq!(sg.exponent, gp.exponent, "{label}: growth exponent");

        let mut rng = ChaCha8Rng::seed_from_u64(606);
        let mut kernels = Vec::new();
        for _ in 0..3 {
            let vals: Vec<Complex64> = (0..n as usize * n as usize)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            kernels.push(Kernel::from_fn(n as usize, |x, y| {
                vals[(x * n + y) as usize]
            }));
        }
        kernels.push(Kernel::ball_ones(&space, 0, 3.0));

        for (idx, kernel) in kernels.iter().enumerate() {
            // f(arrow y*n + x) = k(y, x): the fiber operator of f at any
            // unit is then the kernel matrix itself.
            let coeffs: Vec<Complex64> =
                (0..n * n).map(|a| kernel.entry(a / n, a % n)).collect();
            let f = GFunction::from_coeffs(&g, coeffs).expect("matching count");

            let roe = roe_norm(kernel).expect("kernel norm").value;
            let red = reduced_norm(&g, &f, &Cocycle::trivial()).expect("reduced norm");
            assert!(
                (roe - red).abs() < NORM_TOL,
                "{label} kernel {idx}: Roe norm {roe} vs reduced norm {red}"
            );

            for t in [0.5, 1.0, 2.0] {
                let star = bs_norm(&space, kernel, t, BsMode::Star).expect("kernel seminorm");
                let semi = weighted_seminorm(&g, &f, &l, t, SeminormMode::Symmetric)
                    .expect("seminorm");
                assert!(
                    (star - semi).abs() <= EXACT_TOL,
                    "{label} kernel {idx} t={t}: {star} vs {semi}"
                );
            }
        }
    }
    println!("criterion 6 (metric pictures agree with the pair groupoid): PASS");
}

#[test]
fn criterion_7_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_groupoid-rd");
    let jobs: Vec<(&str, Vec<&str>)> = vec![
        (
            "scan",
            vec![
                "rd-scan",
                "--groupoid",
                "builtin:path:8",
                "--length",
                "metric",
                "--t",
                "0.5,1",
                "--family",
                "random",
                "--trials",
                "20",
                "--seed",
                "11",
            ],
        ),
        (
            "growth",
            vec![
                "growth",
                "--groupoid",
                "builtin:cyclic:12",
                "--length",
                "word:1",
            ],
        ),
    ];
    for (name, args) in jobs {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let dir = tempfile::tempdir().expect("temp dir");
            let out = dir.path().join(format!("{name}.csv"));
            let status = std::process::Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(&out)
                .status()
                .expect("spawn CLI");
            assert!(status.success(), "{name} run {run}: {status}");
            let csv = std::fs::read(&out).expect("CSV written");
            let manifest =
                std::fs::read(out.with_extension("csv.manifest")).expect("manifest written");
            outputs.push((csv, manifest));
        }
        assert_eq!(outputs[0].0, outputs[1].0, "{name}: CSV bytes differ");
        assert_eq!(outputs[0].1, outputs[1].1, "{name}: manifest bytes differ");
    }
    println!("criterion 7 (deterministic outputs): PASS");
}
