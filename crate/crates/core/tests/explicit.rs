mod common;

use common::zeros;
use mertens_core::arith::MangoldtTable;
use mertens_core::error::Error;
use mertens_core::explicit::*;
use mertens_core::quadrature::QuadConfig;
use mertens_core::selberg::{SelbergPair, Sign};
use mertens_core::zeros::ZeroTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Shared calibrated budget for the zero-count sandwich over Δ ∈ [2, 3].
/// The first calibration run measured budgets up to 0.54.
const SANDWICH_BUDGET: f64 = 1.0;

/// Λ up to e^{6π}, the support limit at Δ = 3.
fn mangoldt() -> &'static MangoldtTable {
    static M: OnceLock<MangoldtTable> = OnceLock::new();
    M.get_or_init(|| MangoldtTable::new(support_limit(&SelbergPair::new(1.0, 3.0).unwrap()) + 1).unwrap())
}

/// The generated zeros cut at height 1000.
fn zeros_to_thousand() -> &'static ZeroTable {
    static T: OnceLock<ZeroTable> = OnceLock::new();
    T.get_or_init(|| {
        let g: Vec<f64> = zeros().ordinates().iter().copied().filter(|&g| g <= 1000.0).collect();
        ZeroTable::new(g, "generated, cut at 1000", Some(1000.0)).unwrap()
    })
}

#[test]
fn guinand_weil_residual_table() {
    let table = zeros_to_thousand();
    for (h, d) in [(1.0, 2.0), (0.5, 3.0)] {
        let pair = SelbergPair::new(h, d).unwrap();
        for t in [50.0, 200.0, 500.0] {
            for sign in [Sign::Plus, Sign::Minus] {
                let r = guinand_weil(&pair, sign, t, table, mangoldt(), &ExplicitConfig::default()).unwrap();
                println!("h={h} Δ={d} t={t} {sign:?}: residual {:.2e} budget {:.2e}", r.residual.abs(), r.error_budget());
                assert!(r.residual.abs() <= 1e-2);
                assert!(r.residual.abs() <= r.error_budget());
                let direct = guinand_weil_residual(&pair, sign, t, table, mangoldt()).unwrap();
                assert_eq!(direct, r.residual.abs());
            }
        }
    }
}

#[test]
fn zero_window_doubling() {
    let pair = SelbergPair::new(1.0, 2.0).unwrap();
    let t = 500.0;
    let (full, _, _) = zero_side(&pair, Sign::Plus, t, zeros(), None).unwrap();
    let mut prev: Option<(f64, f64, f64)> = None;
    for w in [25.0, 50.0, 100.0, 200.0] {
        let cfg = ExplicitConfig {
            zero_window: Some(w),
            max_zero_tail: 1.0,
            ..Default::default()
        };
        let r = guinand_weil(&pair, Sign::Plus, t, zeros(), mangoldt(), &cfg).unwrap();
        let (inside, _, _) = zero_side(&pair, Sign::Plus, t, zeros(), Some(w)).unwrap();
        let outside = (full - inside).abs();
        if let Some((p_out, p_res, p_bound)) = prev {
            println!(
                "window {w}: outside {p_out:.3e} -> {outside:.3e} ({:.3}), bound ratio {:.3}, residual {p_res:.2e} -> {:.2e}",
                outside / p_out,
                r.zero_tail_bound / p_bound,
                r.residual.abs()
            );
            assert!(outside <= 0.5 * p_out, "contribution ratio {}", outside / p_out);
            assert!(r.residual.abs() <= p_res + 1e-6);
        }
        prev = Some((outside, r.residual.abs(), r.zero_tail_bound));
    }
}

#[test]
fn insufficient_coverage_is_rejected() {
    let pair = SelbergPair::new(1.0, 2.0).unwrap();
    let short = ZeroTable::new(zeros().ordinates()[..40].to_vec(), "short", None).unwrap();
    let e = guinand_weil(&pair, Sign::Plus, 100.0, &short, mangoldt(), &ExplicitConfig::default()).unwrap_err();
    assert!(matches!(e, Error::Coverage { .. }), "{e}");
    let small = MangoldtTable::new(1000).unwrap();
    assert!(guinand_weil(&pair, Sign::Plus, 100.0, zeros(), &small, &ExplicitConfig::default()).is_err());
}

#[test]
fn quadrature_refinement_does_not_worsen_the_residual() {
    let pair = SelbergPair::new(1.0, 2.0).unwrap();
    let coarse = ExplicitConfig::default();
    let fine = ExplicitConfig {
        quad: QuadConfig {
            abs_tol: coarse.quad.abs_tol / 2.0,
            ..coarse.quad
        },
        ..coarse
    };
    for t in [50.0, 500.0] {
        let a = guinand_weil(&pair, Sign::Plus, t, zeros_to_thousand(), mangoldt(), &coarse).unwrap();
        let b = guinand_weil(&pair, Sign::Plus, t, zeros_to_thousand(), mangoldt(), &fine).unwrap();
        println!("t={t}: {:.3e} -> {:.3e}", a.residual.abs(), b.residual.abs());
        assert!(b.residual.abs() <= 1.1 * a.residual.abs());
    }
}

#[test]
fn prime_side_is_exactly_invariant_beyond_the_support() {
    for (h, d) in [(1.0, 2.0), (0.3, 2.5)] {
        let pair = SelbergPair::new(h, d).unwrap();
        let lim = support_limit(&pair);
        for sign in [Sign::Plus, Sign::Minus] {
            let a = prime_side(&pair, sign, 321.0, mangoldt(), lim).unwrap();
            let b = prime_side(&pair, sign, 321.0, mangoldt(), 2 * lim).unwrap();
            assert_eq!(a.0.to_bits(), b.0.to_bits());
            assert!(b.1 > a.1);
        }
    }
}

#[test]
fn archimedean_gap_at_one_thousand() {
    let pair = SelbergPair::new(1.0, 2.0).unwrap();
    for sign in [Sign::Plus, Sign::Minus] {
        let a = archimedean_integral(1e3, &pair, sign).unwrap();
        let model = (2.0 + sign.factor() * 0.5) * (1e3f64 / 2.0).ln();
        assert!((a.model - model).abs() <= 1e-12);
        println!("{sign:?}: value {:.6} model {:.6} gap {:.3e}", a.value, a.model, a.gap());
        assert!(a.gap().abs() <= 5.0);
    }
}

#[test]
fn archimedean_gap_has_no_trend() {
    let pair = SelbergPair::new(1.0, 2.0).unwrap();
    let pts: Vec<(f64, f64)> = [1e2f64, 1e3, 1e4]
        .iter()
        .map(|&t| (t.ln(), archimedean_integral(t, &pair, Sign::Plus).unwrap().gap()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 3.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 3.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("gap vs log t slope {slope:.3e}");
    assert!(slope.abs() <= 0.1);
}

#[test]
fn archimedean_domain() {
    let pair = SelbergPair::new(1.0, 2.0).unwrap();
    assert!(archimedean_integral(3.0, &pair, Sign::Plus).is_err());
    assert!(archimedean_integral(100.0, &SelbergPair::new(1.0, 0.5).unwrap(), Sign::Plus).is_err());
    assert!(archimedean_integral(100.0, &SelbergPair::new(11.0, 2.0).unwrap(), Sign::Plus).is_err());
}

#[test]
fn coefficient_bound_and_calibrated_sandwich() {
    let r = zero_count_sandwich(1e3, 1.0, 2.5, zeros(), mangoldt()).unwrap();
    println!("{r:?}");
    assert!(r.coefficient_max <= 4.0);
    assert!(r.lower <= r.upper);
    assert!(r.holds_with(10.0));
    assert!(r.holds_with(r.residual_budget));
    let expected = r.window_count as f64 - 1.0 / PI * (1e3f64 / (2.0 * PI)).ln();
    assert!((r.deviation - expected).abs() < 1e-12);
}

#[test]
fn coefficient_bound_for_every_prime_in_support() {
    for d in [2.0, 2.5, 3.0] {
        for h in [0.1, 1.0, 5.0] {
            let pair = SelbergPair::new(h, d).unwrap();
            let primes = mangoldt().primes_upto(support_limit(&pair)).unwrap();
            for sign in [Sign::Plus, Sign::Minus] {
                let worst = primes
                    .iter()
                    .map(|&p| {
                        let lp = (p as f64).ln();
                        (lp / PI * pair.eval_fourier(sign, lp / (2.0 * PI))).abs()
                    })
                    .fold(0.0, f64::max);
                assert!(worst <= 4.0, "h={h} Δ={d}: {worst}");
            }
        }
    }
}

#[test]
fn empty_window_sandwich() {
    // no ordinate within 1e-4 of 17
    let r = zero_count_sandwich(17.0, 1e-4, 2.0, zeros(), mangoldt()).unwrap();
    assert_eq!(r.window_count, 0);
    assert!((r.deviation + 1e-4 / PI * (17.0 / (2.0 * PI)).ln()).abs() < 1e-15);
    assert!(r.holds_with(r.residual_budget));
}

#[test]
fn sandwich_domain() {
    assert!(zero_count_sandwich(3.0, 1.0, 2.0, zeros(), mangoldt()).is_err());
    assert!(zero_count_sandwich(100.0, 1.0, 1.5, zeros(), mangoldt()).is_err());
    assert!(zero_count_sandwich(100.0, 11.0, 2.0, zeros(), mangoldt()).is_err());
    assert!(zero_count_sandwich(100.0, 0.0, 2.0, zeros(), mangoldt()).is_err());
}

#[test]
fn sandwich_at_random_desk_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut worst_budget: f64 = 0.0;
    for _ in 0..100 {
        let t: f64 = rng.gen_range(100.0..=1000.0);
        let h: f64 = rng.gen_range(1e-3..=5.0);
        let d: f64 = rng.gen_range(2.0..=3.0);
        let r = zero_count_sandwich(t, h, d, zeros(), mangoldt()).unwrap();
        worst_budget = worst_budget.max(r.residual_budget);
        assert!(r.coefficient_max <= 4.0);
        assert!(r.holds_with(r.residual_budget), "{r:?}");
        assert!(r.holds_with(SANDWICH_BUDGET), "{r:?}");
    }
    println!("largest measured budget {worst_budget:.3}");
}
