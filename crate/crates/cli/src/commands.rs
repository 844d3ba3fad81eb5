use crate::{lemmas, Cli, CliError, CliResult, Command, Global};
use clap::{Args, ValueEnum};
use mertens_core::arith::{build_tables, mertens, theorem_envelope, MangoldtTable, MertensSeries, DEFAULT_BUDGET};
use mertens_core::contour::{
    b_n_sum, build_contour, contour_integral, envelope_ratio_report, perron_line_integral, ContourOptions, PerronOptions,
    SegmentKind,
};
use mertens_core::explicit::{guinand_weil, support_limit, zero_count_sandwich, ExplicitConfig};
use mertens_core::selberg::{SelbergPair, Sign};
use mertens_core::typicality::{
    atypical_census, check_typical, CensusConfig, Criterion, RangePolicy, TypicalityParams, UnitGrid,
};
use mertens_core::zeros::{generate_zeros, load_zeros, von_mangoldt_deviation, GeneratorConfig, ZeroTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Outcome of one in-run assertion.
#[derive(Debug, Clone, Serialize)]
struct Check {
    name: String,
    passed: bool,
    witness: Value,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, witness: Value) -> Self {
        Self {
            name: name.into(),
            passed,
            witness,
        }
    }
}

/// Write the report line, then fail on the first failed check.
fn emit(out: &mut dyn Write, cli: &Cli, result: Value, checks: Vec<Check>) -> CliResult<()> {
    let report = json!({
        "config": {
            "global": &cli.global,
            "command": &cli.command,
        },
        "seed": cli.global.seed,
        "result": result,
        "checks": &checks,
        "passed": checks.iter().all(|c| c.passed),
    });
    writeln!(out, "{}", serde_json::to_string(&report).map_err(|e| CliError::Io(e.to_string()))?)?;
    match checks.into_iter().find(|c| !c.passed) {
        Some(c) => Err(CliError::Assertion {
            name: c.name,
            witness: c.witness,
        }),
        None => Ok(()),
    }
}

pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let g = &cli.global;
    let (result, checks) = match &cli.command {
        Command::Sieve(a) => sieve(a, g)?,
        Command::ZerosGenerate(a) => zeros_generate(a, g)?,
        Command::ZerosImport(a) => zeros_import(a, g)?,
        Command::Classify(a) => classify(a, g)?,
        Command::Census(a) => census(a, g)?,
        Command::Contour(a) => contour(a, g)?,
        Command::Perron(a) => perron(a, g)?,
        Command::ExplicitFormula(a) => explicit(a, g)?,
        Command::SelbergCheck(a) => selberg(a)?,
        Command::Lemmas(_) => lemma_grids()?,
        Command::Report(a) => report(a)?,
    };
    emit(out, cli, result, checks)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn range(cond: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Range(msg()))
    }
}

fn default_zeros(g: &Global) -> PathBuf {
    g.data_dir.join("zeros.txt")
}

fn open_input(path: &Path) -> CliResult<BufReader<File>> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(CliError::MissingFile(path.to_path_buf())),
        Err(e) => Err(e.into()),
    }
}

fn load_table(path: &Option<PathBuf>, g: &Global) -> CliResult<ZeroTable> {
    let p = path.clone().unwrap_or_else(|| default_zeros(g));
    Ok(load_zeros(open_input(&p)?)?)
}

fn write_zero_file(table: &ZeroTable, path: &Path) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    table.export(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_csv<S: Serialize>(path: &Option<PathBuf>, header: &[&str], rows: impl IntoIterator<Item = S>) -> CliResult<()> {
    if let Some(p) = path {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(p)?;
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyArg {
    Desk,
    Strict,
}

impl From<PolicyArg> for RangePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Desk => RangePolicy::Desk,
            PolicyArg::Strict => RangePolicy::Strict,
        }
    }
}

/// A Beurling–Selberg pair written `h:delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairArg {
    pub h: f64,
    pub delta: f64,
}

fn parse_pair(s: &str) -> Result<PairArg, String> {
    let (h, d) = s.split_once(':').ok_or_else(|| format!("`{s}` is not of the form h:delta"))?;
    let h = h.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let delta = d.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok(PairArg { h, delta })
}

fn mangoldt_for(limit: u64) -> CliResult<MangoldtTable> {
    Ok(MangoldtTable::new(limit)?)
}

// ---------------------------------------------------------------- sieve

#[derive(Debug, Args, Serialize)]
pub struct SieveArgs {
    #[arg(long)]
    pub limit: u64,
    /// CSV with columns n, mu, lambda, mertens.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Compare against trial division for every n <= 10^4 and for
    /// `--verify-random` random n.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, default_value_t = 100)]
    pub verify_random: usize,
}

#[derive(Serialize)]
struct SieveRow {
    n: u64,
    mu: i8,
    lambda: f64,
    mertens: i64,
}

fn mu_trial(mut n: u64) -> i8 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        -mu
    } else {
        mu
    }
}

fn sieve(a: &SieveArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    range(a.limit >= 1 && a.limit <= DEFAULT_BUDGET, || format!("--limit {} outside [1, {DEFAULT_BUDGET}]", a.limit))?;
    let (mu, lambda, series) = build_tables(a.limit)?;
    let prefix = series.prefix_sums();
    if a.out.is_some() {
        let rows = (1..=a.limit).map(|n| SieveRow {
            n,
            mu: mu.values()[n as usize],
            lambda: lambda.lambda(n).expect("inside table"),
            mertens: prefix[n as usize],
        });
        write_csv(&a.out, &["n", "mu", "lambda", "mertens"], rows)?;
    }
    let mut checks = Vec::new();
    let mut verified = json!(null);
    if a.verify {
        let mut oracle = vec![0i64; a.limit as usize + 1];
        for n in 1..=a.limit as usize {
            oracle[n] = oracle[n - 1] + mu_trial(n as u64) as i64;
        }
        let exhaustive = a.limit.min(10_000);
        let mismatch = (1..=exhaustive).find(|&n| prefix[n as usize] != oracle[n as usize]);
        checks.push(Check::new(
            "sieve-matches-trial-division",
            mismatch.is_none(),
            json!(mismatch.map(|n| json!({"n": n, "sieve": prefix[n as usize], "oracle": oracle[n as usize]}))),
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        let picks: Vec<u64> = (0..a.verify_random).map(|_| rng.gen_range(1..=a.limit)).collect();
        let bad = picks.iter().copied().find(|&n| prefix[n as usize] != oracle[n as usize]);
        checks.push(Check::new(
            "random-points-match-trial-division",
            bad.is_none(),
            json!(bad.map(|n| json!({"n": n, "sieve": prefix[n as usize], "oracle": oracle[n as usize]}))),
        ));
        verified = json!({"exhaustive_upto": exhaustive, "random_points": picks.len()});
    }
    let result = json!({
        "limit": a.limit,
        "mertens_at_limit": prefix[a.limit as usize],
        "primes": lambda.primes().len(),
        "verified": verified,
    });
    Ok((result, checks))
}

// ---------------------------------------------------------------- zeros

#[derive(Debug, Args, Serialize)]
pub struct ZerosGenerateArgs {
    #[arg(long)]
    pub t_max: f64,
    #[arg(long, default_value_t = 0.01)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Defaults to zeros.txt in the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn table_summary(t: &ZeroTable) -> CliResult<Value> {
    Ok(json!({
        "count": t.len(),
        "span": t.span(),
        "source": t.source(),
        "first": &t.ordinates()[..t.len().min(5)],
        "s_sup": t.s_sup(),
        "counting_deviation": von_mangoldt_deviation(t, 1000)?,
    }))
}

fn zeros_generate(a: &ZerosGenerateArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    range(a.t_max.is_finite() && a.t_max > 11.0, || format!("--t-max {} must exceed 11", a.t_max))?;
    range(a.step > 0.0 && a.step <= 0.1, || format!("--step {} outside (0, 0.1]", a.step))?;
    range(a.tol > 0.0 && a.tol < 1e-3, || format!("--tol {} outside (0, 1e-3)", a.tol))?;
    let cfg = GeneratorConfig {
        step: a.step,
        tol: a.tol,
        ..GeneratorConfig::default()
    };
    let table = generate_zeros(a.t_max, &cfg)?;
    let path = a.out.clone().unwrap_or_else(|| default_zeros(g));
    write_zero_file(&table, &path)?;
    let mut summary = table_summary(&table)?;
    summary["path"] = to_value(&path);
    let first_ok = table.ordinates().first().is_some_and(|&g| (g - 14.134725141734693).abs() < 1e-6);
    Ok((summary, vec![Check::new("first-zero", first_ok, json!(table.ordinates().first()))]))
}

#[derive(Debug, Args, Serialize)]
pub struct ZerosImportArgs {
    /// One ordinate per line; `#` comments allowed.
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to zeros.txt in the data directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn zeros_import(a: &ZerosImportArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    let table = load_zeros(open_input(&a.input)?)?;
    let path = a.out.clone().unwrap_or_else(|| default_zeros(g));
    write_zero_file(&table, &path)?;
    let mut summary = table_summary(&table)?;
    summary["path"] = to_value(&path);
    Ok((summary, Vec::new()))
}

// ----------------------------------------------------------- typicality

fn typicality_params(t_scale: f64, v: f64, delta: f64, policy: PolicyArg) -> CliResult<TypicalityParams> {
    range(t_scale.is_finite() && t_scale >= 16.0, || format!("--t-scale {t_scale} below 16"))?;
    range(delta > 0.0 && delta < 1.0, || format!("--delta {delta} outside (0, 1)"))?;
    Ok(TypicalityParams::new(t_scale, v, delta, policy.into())?)
}

fn weighted_sum_table(params: &TypicalityParams) -> CliResult<MangoldtTable> {
    mangoldt_for(params.x().ceil() as u64 + 2)
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub t_scale: f64,
    #[arg(long)]
    pub v: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Desk)]
    pub policy: PolicyArg,
    /// Ordinates to classify, inside [T, 2T].
    #[arg(long = "t")]
    pub t: Vec<f64>,
    /// Additional ordinates drawn uniformly from [T, 2T].
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 64)]
    pub sigma_grid: usize,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// CSV with one row per ordinate.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn criterion_label(c: Option<Criterion>) -> &'static str {
    match c {
        None => "",
        Some(Criterion::I) => "i",
        Some(Criterion::II) => "ii",
        Some(Criterion::III) => "iii",
    }
}

const VERDICT_HEADER: &[&str] = &["t", "typical", "failed_criterion", "margin_i", "margin_ii", "margin_iii"];

#[derive(Serialize)]
struct VerdictRow {
    t: f64,
    typical: bool,
    failed_criterion: &'static str,
    margin_i: f64,
    margin_ii: f64,
    margin_iii: f64,
}

fn classify(a: &ClassifyArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    let params = typicality_params(a.t_scale, a.v, a.delta, a.policy)?;
    range(a.sigma_grid > 0, || "--sigma-grid must be positive".into())?;
    let lo = a.t_scale;
    let hi = 2.0 * a.t_scale;
    if let Some(t) = a.t.iter().find(|&&t| !(t >= lo && t <= hi)) {
        return Err(CliError::Range(format!("--t {t} outside [{lo}, {hi}]")));
    }
    range(!a.t.is_empty() || a.random > 0, || "give --t or --random".into())?;
    let table = load_table(&a.zeros, g)?;
    let lam = weighted_sum_table(&params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let mut ts = a.t.clone();
    ts.extend((0..a.random).map(|_| rng.gen_range(lo..=hi)));
    let verdicts = ts
        .iter()
        .map(|&t| check_typical(t, &params, &table, &lam, a.sigma_grid))
        .collect::<mertens_core::Result<Vec<_>>>()?;
    write_csv(
        &a.out,
        VERDICT_HEADER,
        verdicts.iter().map(|v| VerdictRow {
            t: v.t,
            typical: v.typical,
            failed_criterion: criterion_label(v.failed_criterion),
            margin_i: v.margins[0],
            margin_ii: v.margins[1],
            margin_iii: v.margins[2],
        }),
    )?;
    let typical = verdicts.iter().filter(|v| v.typical).count();
    let result = json!({
        "T": a.t_scale,
        "V": a.v,
        "delta": a.delta,
        "x": params.x(),
        "in_paper_range": params.in_paper_range(),
        "typical": typical,
        "total": verdicts.len(),
        "pass_rate": typical as f64 / verdicts.len() as f64,
        "verdicts": verdicts,
    });
    Ok((result, Vec::new()))
}

#[derive(Debug, Args, Serialize)]
pub struct CensusArgs {
    #[arg(long)]
    pub t_scale: f64,
    #[arg(long)]
    pub v: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Desk)]
    pub policy: PolicyArg,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    #[arg(long, default_value_t = 64)]
    pub sigma_grid: usize,
    #[arg(long, default_value_t = 0.0)]
    pub bound_constant: f64,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// CSV of the selected atypical ordinates.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn census(a: &CensusArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    let params = typicality_params(a.t_scale, a.v, a.delta, a.policy)?;
    range(a.spacing >= 1.0, || format!("--spacing {} below 1", a.spacing))?;
    range(a.step > 0.0 && a.step <= a.spacing, || format!("--step {} outside (0, spacing]", a.step))?;
    range(a.sigma_grid > 0, || "--sigma-grid must be positive".into())?;
    let table = load_table(&a.zeros, g)?;
    let lam = weighted_sum_table(&params)?;
    let cfg = CensusConfig {
        spacing: a.spacing,
        step: a.step,
        sigma_grid: a.sigma_grid,
        bound_constant: a.bound_constant,
    };
    let r = atypical_census(&params, &table, &lam, &cfg)?;
    write_csv(
        &a.out,
        VERDICT_HEADER,
        r.selected.iter().map(|v| VerdictRow {
            t: v.t,
            typical: v.typical,
            failed_criterion: criterion_label(v.failed_criterion),
            margin_i: v.margins[0],
            margin_ii: v.margins[1],
            margin_iii: v.margins[2],
        }),
    )?;
    Ok((to_value(&r), Vec::new()))
}

// -------------------------------------------------------------- contour

#[derive(Debug, Args, Serialize)]
pub struct ContourArgs {
    #[arg(long)]
    pub n: u64,
    /// Exponent c in the lowest dyadic level.
    #[arg(long, default_value_t = 2.5)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    #[arg(long)]
    pub kappa: Option<u32>,
    /// Fail instead of lowering K to the zero-table coverage.
    #[arg(long)]
    pub no_cap: bool,
    #[arg(long)]
    pub t_points: Option<usize>,
    #[arg(long)]
    pub sigma_grid: Option<usize>,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// CSV of the upper-half segments.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SegmentRow {
    index: usize,
    kind: &'static str,
    start_sigma: f64,
    start_t: f64,
    end_sigma: f64,
    end_t: f64,
}

fn contour_options(c: f64, delta: f64, kappa: Option<u32>, no_cap: bool, t_points: Option<usize>, sigma_grid: Option<usize>) -> CliResult<ContourOptions> {
    range(c.is_finite() && c > 0.0, || format!("--c {c} must be positive"))?;
    range(delta > 0.0 && delta < 1.0, || format!("--delta {delta} outside (0, 1)"))?;
    let mut grid = UnitGrid::default();
    if let Some(p) = t_points {
        range(p >= 2, || "--t-points below 2".into())?;
        grid.t_points = p;
    }
    if let Some(s) = sigma_grid {
        range(s > 0, || "--sigma-grid must be positive".into())?;
        grid.sigma_grid = s;
    }
    Ok(ContourOptions {
        c_exponent: c,
        delta,
        kappa_override: kappa,
        cap_k_to_coverage: !no_cap,
        grid,
    })
}

/// Λ far enough for the weighted sums of every dyadic level below N.
fn contour_mangoldt(n: u64) -> CliResult<MangoldtTable> {
    mangoldt_for(((n as f64).sqrt().ceil() as u64 + 16).max(1000))
}

fn contour(a: &ContourArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    range(a.n >= 16, || format!("--n {} below 16", a.n))?;
    let opts = contour_options(a.c, a.delta, a.kappa, a.no_cap, a.t_points, a.sigma_grid)?;
    let table = load_table(&a.zeros, g)?;
    let lam = contour_mangoldt(a.n)?;
    let spec = build_contour(a.n, &opts, &table, &lam)?;
    write_csv(
        &a.out,
        &["index", "kind", "start_sigma", "start_t", "end_sigma", "end_t"],
        spec.segments.iter().enumerate().map(|(i, s)| SegmentRow {
            index: i,
            kind: match s.kind {
                SegmentKind::Vertical => "vertical",
                SegmentKind::Horizontal => "horizontal",
            },
            start_sigma: s.start.sigma,
            start_t: s.start.t,
            end_sigma: s.end.sigma,
            end_t: s.end.t,
        }),
    )?;
    let b_n = if spec.offsets.is_empty() {
        Value::Null
    } else {
        to_value(&b_n_sum(&spec, a.delta)?)
    };
    let result = json!({ "contour": &spec, "b_n": b_n });
    let checks = vec![Check::new("contour-valid", spec.validate().is_ok(), json!(null))];
    Ok((result, checks))
}

// --------------------------------------------------------------- perron

#[derive(Debug, Args, Serialize)]
pub struct PerronArgs {
    #[arg(long = "n", default_values_t = [100u64, 1000, 10_000])]
    pub n: Vec<u64>,
    /// Height of the vertical line; defaults to N.
    #[arg(long = "t")]
    pub t: Option<f64>,
    /// Allowed |A_N − M(N)| in units of N log T / T.
    #[arg(long, default_value_t = 5.0)]
    pub guard: f64,
    /// Also integrate along the dyadic contour and compare.
    #[arg(long)]
    pub contour: bool,
    #[arg(long, default_value_t = 2.5)]
    pub c: f64,
    #[arg(long, default_value_t = 0.5)]
    pub delta: f64,
    /// Integrate the full line instead of using conjugate symmetry.
    #[arg(long)]
    pub no_symmetry: bool,
    #[arg(long, default_value_t = 1e-8)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1.0)]
    pub panel_density: f64,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// CSV with columns N, A_N_real, A_N_imag, M_N, error_budget, ratio.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PerronRow {
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "A_N_real")]
    re: f64,
    #[serde(rename = "A_N_imag")]
    im: f64,
    #[serde(rename = "M_N")]
    m: i64,
    error_budget: f64,
    ratio: f64,
}

fn perron(a: &PerronArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    range(!a.n.is_empty(), || "no --n given".into())?;
    let floor = if a.contour { 16 } else { 3 };
    for &n in &a.n {
        range(n >= floor && n <= DEFAULT_BUDGET, || format!("--n {n} outside [{floor}, {DEFAULT_BUDGET}]"))?;
        if let Some(t) = a.t {
            range(t >= 3.0 && t <= n as f64, || format!("--t {t} outside [3, {n}]"))?;
        }
    }
    range(a.guard > 0.0, || "--guard must be positive".into())?;
    range(a.abs_tol > 0.0, || "--abs-tol must be positive".into())?;
    range(a.panel_density > 0.0, || "--panel-density must be positive".into())?;
    let copts = if a.contour {
        Some(contour_options(a.c, a.delta, None, false, None, None)?)
    } else {
        None
    };
    let mut opts = PerronOptions {
        use_symmetry: !a.no_symmetry,
        panel_density: a.panel_density,
        ..PerronOptions::default()
    };
    opts.quad.abs_tol = a.abs_tol;
    let table = if a.contour { Some(load_table(&a.zeros, g)?) } else { None };
    let n_max = *a.n.iter().max().expect("non-empty");
    let series = MertensSeries::new(n_max)?;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut contours = Vec::new();
    let mut checks = Vec::new();
    for &n in &a.n {
        let t = a.t.unwrap_or(n as f64);
        let r = perron_line_integral(n, t, &series, &opts)?;
        checks.push(Check::new(
            format!("line-within-guard-N{n}"),
            r.ratio() <= a.guard,
            json!({"N": n, "ratio": r.ratio(), "guard": a.guard}),
        ));
        rows.push(PerronRow {
            n,
            re: r.integral.re,
            im: r.integral.im,
            m: r.mertens_exact,
            error_budget: r.error_budget,
            ratio: r.ratio(),
        });
        lines.push(r);
        if let (Some(co), Some(tab)) = (&copts, &table) {
            let lam = contour_mangoldt(n)?;
            let spec = build_contour(n, co, tab, &lam)?;
            let c = contour_integral(&spec, tab, &series, &opts)?;
            let line = perron_line_integral(n, spec.top(), &series, &opts)?;
            let diff = (c.result.integral.re - line.integral.re).abs();
            let tol = c.result.quadrature_error + line.quadrature_error;
            checks.push(Check::new(
                format!("contour-matches-line-N{n}"),
                diff <= tol,
                json!({"N": n, "difference": diff, "quadrature_budget": tol}),
            ));
            checks.push(Check::new(
                format!("contour-within-guard-N{n}"),
                c.result.ratio() <= a.guard,
                json!({"N": n, "ratio": c.result.ratio(), "guard": a.guard}),
            ));
            contours.push(json!({
                "N": n,
                "kappa": spec.kappa,
                "K": spec.k_top,
                "segments": spec.segments.len(),
                "contour": &c.result,
                "line_at_top": &line,
                "difference": diff,
                "quadrature_budget": tol,
            }));
        }
    }
    write_csv(&a.out, &["N", "A_N_real", "A_N_imag", "M_N", "error_budget", "ratio"], rows)?;
    Ok((json!({ "line": lines, "contour": contours }), checks))
}

// ------------------------------------------------------ explicit formula

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplicitMode {
    Gw,
    Sandwich,
    Both,
}

#[derive(Debug, Args, Serialize)]
pub struct ExplicitArgs {
    #[arg(long, value_enum, default_value_t = ExplicitMode::Gw)]
    pub mode: ExplicitMode,
    /// Test pairs as h:delta.
    #[arg(long = "pair", value_parser = parse_pair, default_values = ["1:2", "0.5:3"])]
    pub pairs: Vec<PairArg>,
    #[arg(long = "t-center", default_values_t = [50.0, 200.0, 500.0])]
    pub t_center: Vec<f64>,
    /// Allowed |residual| of the explicit formula.
    #[arg(long, default_value_t = 1e-2)]
    pub tolerance: f64,
    /// Random (t, h, Δ) in [100, 1000] × [10⁻³, 5] × [2, 3].
    #[arg(long, default_value_t = 100)]
    pub sandwich_samples: usize,
    /// Calibrated slack allowed on each side of the sandwich.
    #[arg(long, default_value_t = 1.0)]
    pub sandwich_budget: f64,
    #[arg(long)]
    pub zeros: Option<PathBuf>,
    /// CSV of the explicit-formula rows.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct GwRow {
    h: f64,
    delta: f64,
    t_center: f64,
    sign: &'static str,
    zero_side: f64,
    right_side: f64,
    residual: f64,
    error_budget: f64,
}

const SANDWICH_DELTA_MAX: f64 = 3.0;

fn explicit(a: &ExplicitArgs, g: &Global) -> CliResult<(Value, Vec<Check>)> {
    let gw = a.mode != ExplicitMode::Sandwich;
    let sw = a.mode != ExplicitMode::Gw;
    let mut pairs = Vec::new();
    if gw {
        for p in &a.pairs {
            pairs.push(SelbergPair::new(p.h, p.delta)?);
        }
        for &t in &a.t_center {
            range(t.is_finite() && t > 0.0, || format!("--t-center {t} must be positive"))?;
        }
    }
    range(a.tolerance > 0.0, || "--tolerance must be positive".into())?;
    range(a.sandwich_budget >= 0.0, || "--sandwich-budget must be non-negative".into())?;
    let table = load_table(&a.zeros, g)?;
    let mut d_max: f64 = if sw { SANDWICH_DELTA_MAX } else { 0.0 };
    for p in &pairs {
        d_max = d_max.max(p.delta());
    }
    let lam = mangoldt_for(support_limit(&SelbergPair::new(1.0, d_max.max(1.0))?) + 1)?;
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for pair in &pairs {
        for &t in &a.t_center {
            for sign in [Sign::Plus, Sign::Minus] {
                let r = guinand_weil(pair, sign, t, &table, &lam, &ExplicitConfig::default())?;
                let label = match sign {
                    Sign::Plus => "plus",
                    Sign::Minus => "minus",
                };
                checks.push(Check::new(
                    format!("gw-residual-h{}-d{}-t{t}-{label}", pair.h(), pair.delta()),
                    r.residual.abs() <= a.tolerance,
                    to_value(&r),
                ));
                rows.push(GwRow {
                    h: pair.h(),
                    delta: pair.delta(),
                    t_center: t,
                    sign: label,
                    zero_side: r.zero_side,
                    right_side: r.right_side(),
                    residual: r.residual,
                    error_budget: r.error_budget(),
                });
            }
        }
    }
    write_csv(
        &a.out,
        &["h", "delta", "t_center", "sign", "zero_side", "right_side", "residual", "error_budget"],
        &rows,
    )?;
    let mut sandwich = Value::Null;
    if sw {
        let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
        let mut worst_budget: f64 = 0.0;
        let mut worst_coeff: f64 = 0.0;
        let mut failures = 0;
        let mut samples = Vec::with_capacity(a.sandwich_samples);
        for _ in 0..a.sandwich_samples {
            let t: f64 = rng.gen_range(100.0..=1000.0);
            let h: f64 = rng.gen_range(1e-3..=5.0);
            let d: f64 = rng.gen_range(2.0..=SANDWICH_DELTA_MAX);
            let r = zero_count_sandwich(t, h, d, &table, &lam)?;
            worst_budget = worst_budget.max(r.residual_budget);
            worst_coeff = worst_coeff.max(r.coefficient_max);
            let holds = r.holds_with(a.sandwich_budget);
            if !holds || r.coefficient_max > 4.0 {
                failures += 1;
                checks.push(Check::new(format!("sandwich-t{t}"), false, to_value(&r)));
            }
            samples.push(r);
        }
        checks.push(Check::new(
            "sandwich-all-samples",
            failures == 0,
            json!({"failures": failures, "samples": samples.len()}),
        ));
        sandwich = json!({
            "samples": samples.len(),
            "budget": a.sandwich_budget,
            "largest_measured_budget": worst_budget,
            "largest_coefficient": worst_coeff,
            "failures": failures,
            "results": samples,
        });
    }
    let gw_len = rows.len();
    let result = json!({
        "explicit_formula": rows,
        "rows": gw_len,
        "zeros": {"count": table.len(), "span": table.span()},
        "sandwich": sandwich,
    });
    Ok((result, checks))
}

// -------------------------------------------------------------- selberg

#[derive(Debug, Args, Serialize)]
pub struct SelbergArgs {
    /// Pairs as h:delta.
    #[arg(long = "pair", value_parser = parse_pair, default_values = ["1:2", "0.5:4", "13.643:3"])]
    pub pairs: Vec<PairArg>,
    /// Points of the time-side grid on [−10h, 10h].
    #[arg(long, default_value_t = 10_000)]
    pub grid: usize,
    /// Points of the Fourier-side grid on (−Δ, Δ).
    #[arg(long, default_value_t = 1000)]
    pub fourier_grid: usize,
}

fn selberg(a: &SelbergArgs) -> CliResult<(Value, Vec<Check>)> {
    range(a.grid >= 2 && a.fourier_grid >= 1, || "grids too small".into())?;
    let mut checks = Vec::new();
    let mut results = Vec::new();
    for p in &a.pairs {
        let pair = SelbergPair::new(p.h, p.delta)?;
        let (h, d) = (pair.h(), pair.delta());
        let mut sandwich_violations = 0usize;
        let mut first_bad = Value::Null;
        for k in 0..a.grid {
            let u = -10.0 * h + 20.0 * h * k as f64 / (a.grid - 1) as f64;
            let chi = if u.abs() <= h { 1.0 } else { 0.0 };
            let lo = pair.eval_time(Sign::Minus, u);
            let hi = pair.eval_time(Sign::Plus, u);
            if !(lo <= chi && chi <= hi) {
                sandwich_violations += 1;
                if first_bad.is_null() {
                    first_bad = json!({"u": u, "minus": lo, "plus": hi});
                }
            }
        }
        let origin_err = (pair.eval_fourier(Sign::Plus, 0.0) - (2.0 * h + 1.0 / d))
            .abs()
            .max((pair.eval_fourier(Sign::Minus, 0.0) - (2.0 * h - 1.0 / d)).abs());
        let mut support_violations = 0usize;
        let mut coeff_max: f64 = 0.0;
        let mut coeff_violations = 0usize;
        for s in [Sign::Plus, Sign::Minus] {
            for k in 0..=100 {
                let x = d * (1.0 + k as f64 / 20.0);
                if pair.eval_fourier(s, x) != 0.0 || pair.eval_fourier(s, -x) != 0.0 {
                    support_violations += 1;
                }
            }
            for k in 0..a.fourier_grid {
                let x = -d + 2.0 * d * (k as f64 + 0.5) / a.fourier_grid as f64;
                let v = (x * pair.eval_fourier(s, x)).abs();
                coeff_max = coeff_max.max(v);
                if v > 2.0 {
                    coeff_violations += 1;
                }
            }
        }
        let tag = format!("h{h}-d{d}");
        checks.push(Check::new(format!("sandwich-{tag}"), sandwich_violations == 0, first_bad));
        checks.push(Check::new(format!("fourier-origin-{tag}"), origin_err <= 1e-10, json!(origin_err)));
        checks.push(Check::new(format!("support-{tag}"), support_violations == 0, json!(support_violations)));
        checks.push(Check::new(format!("coefficient-{tag}"), coeff_violations == 0, json!(coeff_max)));
        results.push(json!({
            "h": h,
            "delta": d,
            "grid_points": a.grid,
            "sandwich_violations": sandwich_violations,
            "fourier_origin_error": origin_err,
            "support_violations": support_violations,
            "max_abs_x_fourier": coeff_max,
            "coefficient_violations": coeff_violations,
        }));
    }
    Ok((json!({ "pairs": results }), checks))
}

// --------------------------------------------------------------- lemmas

#[derive(Debug, Args, Serialize)]
pub struct LemmasArgs {}

fn lemma_grids() -> CliResult<(Value, Vec<Check>)> {
    let r = lemmas::run_lemma_grids()?;
    let checks = vec![
        Check::new("auxiliary-inequality", r.auxiliary.violations == 0, to_value(&r.auxiliary)),
        Check::new("lorentz-sum", r.lorentz.violations == 0, to_value(&r.lorentz)),
        Check::new("calculus-lemma", r.calculus.violations == 0, to_value(&r.calculus)),
    ];
    Ok((to_value(&r), checks))
}

// --------------------------------------------------------------- report

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub limit: u64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// CSV of the checkpoints.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct CheckpointRow {
    #[serde(rename = "N")]
    n: u64,
    #[serde(rename = "M_N")]
    m: i64,
    envelope: f64,
    ratio: f64,
}

fn report(a: &ReportArgs) -> CliResult<(Value, Vec<Check>)> {
    range(a.limit >= 16 && a.limit <= DEFAULT_BUDGET, || format!("--limit {} outside [16, {DEFAULT_BUDGET}]", a.limit))?;
    range(a.epsilon > 0.0 && a.epsilon.is_finite(), || format!("--epsilon {} must be positive", a.epsilon))?;
    let series = MertensSeries::new(a.limit)?;
    let r = envelope_ratio_report(&series, a.limit, a.epsilon)?;
    let rows = r
        .checkpoints
        .iter()
        .map(|&(n, m, ratio)| {
            Ok(CheckpointRow {
                n,
                m,
                envelope: theorem_envelope(n, a.epsilon)?,
                ratio,
            })
        })
        .collect::<mertens_core::Result<Vec<_>>>()?;
    write_csv(&a.out, &["N", "M_N", "envelope", "ratio"], rows)?;
    let m_limit = mertens(&series, a.limit)?;
    let checks = vec![Check::new("ratio-finite", r.all_finite, json!({"max_ratio": r.max_ratio, "argmax": r.argmax}))];
    Ok((json!({ "envelope": &r, "mertens_at_limit": m_limit }), checks))
}
