use mertens_core::contour::check_calculus_lemma;
use mertens_core::typicality::{auxiliary_grid, auxiliary_inequality, lorentz_sum_bound};
use mertens_core::Result;
use serde::Serialize;

/// Points, violations and the smallest slack seen on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOutcome {
    pub points: usize,
    pub violations: usize,
    pub min_slack: f64,
}

impl GridOutcome {
    fn new() -> Self {
        Self {
            points: 0,
            violations: 0,
            min_slack: f64::INFINITY,
        }
    }

    fn record(&mut self, slack: f64) {
        self.points += 1;
        if !(slack >= 0.0) {
            self.violations += 1;
        }
        self.min_slack = self.min_slack.min(slack);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaGridReport {
    /// rhs − lhs of the auxiliary inequality over [(log log T)², log T / log log T].
    pub auxiliary: GridOutcome,
    /// (1/a + π/2c) − Σ a/(a² + (cn)²).
    pub lorentz: GridOutcome,
    /// log slack of f(V) ≤ e^A A^C.
    pub calculus: GridOutcome,
    pub total_points: usize,
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub fn run_lemma_grids() -> Result<LemmaGridReport> {
    let mut auxiliary = GridOutcome::new();
    for (log_t, v) in auxiliary_grid() {
        let (lhs, rhs) = auxiliary_inequality(log_t, v);
        auxiliary.record(rhs - lhs);
    }

    let mut lorentz = GridOutcome::new();
    let scales = log_space(1e-2, 1e2, 10);
    for &a in &scales {
        for &c in &scales {
            for n in [0u64, 1, 10, 100, 10_000] {
                let (lhs, rhs) = lorentz_sum_bound(a, c, n);
                lorentz.record(rhs - lhs);
            }
        }
    }

    let mut calculus = GridOutcome::new();
    for c in [0.25f64, 0.5, 1.0, 1.5, 2.0] {
        let a0 = 4.0 * c.powi(4) + 1.0;
        let grid = log_space(c.exp() * 1.0001, 1e40, 1000);
        for a in [a0, 2.0 * a0, 10.0 * a0] {
            let r = check_calculus_lemma(a, c, &grid)?;
            calculus.points += r.points;
            calculus.violations += r.violations;
            calculus.min_slack = calculus.min_slack.min(r.min_log_slack);
        }
    }

    Ok(LemmaGridReport {
        auxiliary,
        lorentz,
        calculus,
        total_points: auxiliary.points + lorentz.points + calculus.points,
    })
}
