use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use hpwin_core::adversary::{BobConfig, BobKind};
use hpwin_core::arith::{int, ratio, to_f64};
use hpwin_core::game::{adjudicate_potential, Adjudication, ProductBall};
use hpwin_core::geometry::{covering_direction, RationalDirection, DEFAULT_Q_BUDGET};
use hpwin_core::lattice::{systole_at, FlowTime};
use hpwin_core::lemmas::{certified_initial, demo_initial, run_suite};
use hpwin_core::strategy::{setup_constants, setup_demo_constants, Mode};
use hpwin_core::transcript::{load_bob_script, play as play_game, save_transcript, write_audit, PlaySetup};
use hpwin_core::{CertInterval, Error};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{opt_rational, parse_pair, parse_triple, rational, rational_triple, RunConfig, Q};
use crate::exit;
use crate::{PlayArgs, ScanArgs, SystoleArgs, VerifyArgs};

/// Denominator cap for the end-of-game target test.
const ADJUDICATION_Q_MAX: u64 = 10_000;

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::BudgetExceeded { .. } => exit::BUDGET,
                Error::PrecisionExhausted { .. } => exit::PRECISION,
                Error::Io(_) => exit::IO,
                Error::InvalidInput(_) | Error::Parse(_) => exit::USAGE,
                _ => exit::FAILURE,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<csv::Error>().is_some() {
            return exit::IO;
        }
        if cause.downcast_ref::<toml::de::Error>().is_some() {
            return exit::USAGE;
        }
    }
    exit::FAILURE
}

fn out_path(dir: &Path, flag: Option<&PathBuf>, config: Option<&PathBuf>, default: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(flag.or(config).map(PathBuf::as_path).unwrap_or(Path::new(default))))
}

fn default_bob(seed: u64) -> BobConfig {
    BobConfig {
        kind: BobKind::GreedyCusp,
        seed,
        shrink: ratio(1, 2),
        target: Some(RationalDirection { p: 0, r: 0, q: 1 }),
        script: None,
        rng: "chacha8".into(),
    }
}

pub fn play(cfg: &RunConfig, args: &PlayArgs, out_dir: &Path) -> Result<u8> {
    let mode = args.mode.or(cfg.mode).unwrap_or(Mode::Demo);
    let beta = rational("beta", args.beta.as_ref().or(cfg.beta.as_ref()).map_or("1/2", |s| s))?;
    let gamma = rational("gamma", args.gamma.as_ref().or(cfg.gamma.as_ref()).map_or("1", |s| s))?;
    let rounds = args.rounds.or(cfg.rounds).unwrap_or(30);
    let initial = match cfg.initial_ball()? {
        Some(b) => b,
        None if mode == Mode::Certified => certified_initial(),
        None => demo_initial(),
    };
    let constants = match mode {
        Mode::Certified => setup_constants(&initial, &beta, &gamma, Mode::Certified)?,
        Mode::Demo => {
            let demo = cfg.demo.clone().unwrap_or_default();
            let r = opt_rational("demo.R", demo.r.as_ref())?.unwrap_or_else(|| int(16));
            let eps = opt_rational("demo.epsilon", demo.epsilon.as_ref())?.unwrap_or_else(|| ratio(1, 1 << 20));
            setup_demo_constants(&initial, &beta, &gamma, &r, &eps)?
        }
    };

    let seed = args.seed.or(cfg.seed);
    let mut bob = cfg.bob.clone().unwrap_or_else(|| default_bob(0));
    if let Some(s) = seed {
        bob.seed = s;
    }
    if let Some(kind) = args.bob {
        bob.kind = kind;
    }
    if let Some(path) = &args.replay {
        bob.kind = BobKind::Replay;
        bob.script = Some(path.clone());
    }
    let script = match bob.kind {
        BobKind::Replay => {
            let Some(path) = &bob.script else {
                bail!("replay needs a script transcript (bob.script or --replay)");
            };
            load_bob_script(path).with_context(|| format!("loading replay script {}", path.display()))?
        }
        _ => Vec::new(),
    };
    let budget = args
        .q_max
        .or_else(|| cfg.budget.as_ref().and_then(|b| b.q_max))
        .unwrap_or(DEFAULT_Q_BUDGET);

    let setup = PlaySetup {
        constants,
        bob,
        rounds,
        budget,
        script,
    };
    let out = play_game(&setup).context("play")?;

    let output = cfg.output();
    let transcript_path = out_path(out_dir, args.transcript.as_ref(), output.transcript.as_ref(), "transcript.jsonl")?;
    let audit_path = out_path(out_dir, args.audit.as_ref(), output.audit.as_ref(), "audit.jsonl")?;
    save_transcript(&transcript_path, &out.header, &out.transcript)
        .with_context(|| format!("writing {}", transcript_path.display()))?;
    write_audit(BufWriter::new(File::create(&audit_path)?), &out.audit)
        .with_context(|| format!("writing {}", audit_path.display()))?;

    let eps = setup.constants.epsilon.clone();
    let q_cap = budget.min(ADJUDICATION_Q_MAX);
    let verdict = adjudicate_potential(&out.transcript, |ball: &ProductBall| {
        covering_direction(&ball.lambda, &ball.center, q_cap, &eps)
            .ok()
            .map(|v| v.is_none())
    })?;
    let verdict_name = match verdict {
        Adjudication::AliceWins => "alice_wins",
        Adjudication::BobWinsSoFar => "bob_wins_so_far",
        Adjudication::Undetermined => "undetermined",
    };
    println!(
        "rounds {} adjudication {} transcript {} audit {}",
        out.transcript.bob_rounds(),
        verdict_name,
        transcript_path.display(),
        audit_path.display()
    );
    Ok(0)
}

pub fn verify(cfg: &RunConfig, args: &VerifyArgs, out_dir: &Path) -> Result<u8> {
    let vc = cfg.verify.clone().unwrap_or_default();
    let Some(suite) = args.suite.or(vc.suite) else {
        bail!(Error::InvalidInput("no suite given (--suite or verify.suite)".into()));
    };
    let trials = args.trials.or(vc.trials).unwrap_or_else(|| suite.default_trials());
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let report = run_suite(suite, trials, seed);
    let output = cfg.output();
    let path = out_path(out_dir, args.report.as_ref(), output.report.as_ref(), &format!("verify-{suite}.json"))?;
    let file = BufWriter::new(File::create(&path).with_context(|| format!("writing {}", path.display()))?);
    serde_json::to_writer_pretty(file, &report)?;
    println!(
        "suite {} trials {} passes {} failures {} report {}",
        suite,
        report.trials,
        report.passes,
        report.failures.len(),
        path.display()
    );
    Ok(if report.all_passed() { 0 } else { exit::FAILURE })
}

/// Largest double not above `x`.
fn f64_down(x: &Q) -> f64 {
    let f = to_f64(x);
    match BigRational::from_float(f) {
        Some(g) if &g > x => f.next_down(),
        _ => f,
    }
}

/// Smallest double not below `x`.
fn f64_up(x: &Q) -> f64 {
    let f = to_f64(x);
    match BigRational::from_float(f) {
        Some(g) if &g < x => f.next_up(),
        _ => f,
    }
}

#[derive(Serialize)]
struct SystoleRow {
    t: f64,
    length_lo: Option<f64>,
    length_hi: Option<f64>,
    c1: Option<i64>,
    c2: Option<i64>,
    c3: Option<i64>,
    status: String,
}

pub fn systole(cfg: &RunConfig, args: &SystoleArgs, out_dir: &Path) -> Result<u8> {
    let sc = cfg.systole.clone().unwrap_or_default();
    let lambda = rational("systole.lambda", args.lambda.as_ref().or(sc.lambda.as_ref()).map_or("3/4", |s| s))?;
    let point = match (&args.point, &sc.point) {
        (Some(p), _) => parse_triple("systole.point", p)?,
        (None, Some(p)) => p.clone(),
        (None, None) => ["0", "0", "0"].map(String::from),
    };
    let point = rational_triple("systole.point", &point)?;
    let t_max = rational("systole.t_max", args.t_max.as_ref().or(sc.t_max.as_ref()).map_or("5", |s| s))?;
    if t_max.is_negative() {
        bail!(Error::InvalidInput("systole.t_max must be non-negative".into()));
    }
    let steps = args.steps.or(sc.steps).unwrap_or(50);
    let bits = args.bits.or(sc.bits).unwrap_or(128);
    // a zero horizon has only the starting lattice
    let steps = if t_max.is_zero() { 0 } else { steps.max(1) };

    let rows: Vec<SystoleRow> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let t = if steps == 0 {
                Q::zero()
            } else {
                &t_max * Q::new(BigInt::from(i), BigInt::from(steps))
            };
            match systole_at(&lambda, &point, &FlowTime::rational(t.clone()), bits) {
                Ok(sv) => {
                    let len: &CertInterval = &sv.length;
                    SystoleRow {
                        t: to_f64(&t),
                        length_lo: Some(f64_down(len.lo())),
                        length_hi: Some(f64_up(len.hi())),
                        c1: Some(sv.coeffs[0]),
                        c2: Some(sv.coeffs[1]),
                        c3: Some(sv.coeffs[2]),
                        status: "ok".into(),
                    }
                }
                Err(e) => SystoleRow {
                    t: to_f64(&t),
                    length_lo: None,
                    length_hi: None,
                    c1: None,
                    c2: None,
                    c3: None,
                    status: e.to_string(),
                },
            }
        })
        .collect();

    let output = cfg.output();
    let path = out_path(out_dir, args.csv.as_ref(), output.csv.as_ref(), "systole.csv")?;
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    println!("rows {} failed {} csv {}", rows.len(), failed, path.display());
    Ok(if failed == 0 { 0 } else { exit::PRECISION })
}

#[derive(Serialize)]
struct ScanRow {
    i: u32,
    j: u32,
    x: f64,
    y: f64,
    covered: bool,
    p: Option<i64>,
    r: Option<i64>,
    q: Option<i64>,
}

fn grid_point(lo: &Q, hi: &Q, i: u32, n: u32) -> Q {
    if n <= 1 {
        lo.clone()
    } else {
        lo + (hi - lo) * Q::new(BigInt::from(i), BigInt::from(n - 1))
    }
}

fn range(field: &str, flag: Option<&String>, config: Option<&[String; 2]>) -> Result<(Q, Q)> {
    let pair = match (flag, config) {
        (Some(s), _) => parse_pair(field, s)?,
        (None, Some(p)) => p.clone(),
        (None, None) => ["0", "1"].map(String::from),
    };
    let (lo, hi) = (rational(field, &pair[0])?, rational(field, &pair[1])?);
    if lo > hi {
        bail!(Error::InvalidInput(format!("{field} range is empty")));
    }
    Ok((lo, hi))
}

pub fn scan(cfg: &RunConfig, args: &ScanArgs, out_dir: &Path) -> Result<u8> {
    let sc = cfg.scan.clone().unwrap_or_default();
    let lambda = rational("scan.lambda", args.lambda.as_ref().or(sc.lambda.as_ref()).map_or("3/4", |s| s))?;
    let z = rational("scan.z", args.z.as_ref().or(sc.z.as_ref()).map_or("0", |s| s))?;
    let (x0, x1) = range("scan.x", args.x.as_ref(), sc.x.as_ref())?;
    let (y0, y1) = range("scan.y", args.y.as_ref(), sc.y.as_ref())?;
    let nx = args.nx.or(sc.nx).unwrap_or(64);
    let ny = args.ny.or(sc.ny).unwrap_or(64);
    let q_max = args.q_max.or(sc.q_max).unwrap_or(50);
    let eps = rational("scan.epsilon", args.epsilon.as_ref().or(sc.epsilon.as_ref()).map_or("1/10", |s| s))?;
    let cell_budget = args.cell_budget.or(sc.cell_budget).unwrap_or(1_000_000);
    if eps.is_negative() {
        bail!(Error::InvalidInput("scan.epsilon must be non-negative".into()));
    }
    if nx == 0 || ny == 0 {
        bail!(Error::InvalidInput("scan grid needs at least one cell per axis".into()));
    }
    let cells = u64::from(nx) * u64::from(ny);
    if cells > cell_budget {
        bail!(Error::BudgetExceeded {
            requested: format!("{cells} scan cells"),
            budget: cell_budget,
        });
    }

    let rows: Vec<ScanRow> = (0..ny)
        .into_par_iter()
        .flat_map_iter(|j| {
            let y = grid_point(&y0, &y1, j, ny);
            (0..nx).map(move |i| (i, j, y.clone()))
        })
        .map(|(i, j, y)| {
            let x = grid_point(&x0, &x1, i, nx);
            // the tube inequalities are strict, so a zero width covers nothing
            let hit = if eps.is_zero() {
                None
            } else {
                covering_direction(&lambda, &[x.clone(), y.clone(), z.clone()], q_max, &eps)?
            };
            Ok(ScanRow {
                i,
                j,
                x: to_f64(&x),
                y: to_f64(&y),
                covered: hit.is_some(),
                p: hit.map(|v| v.p),
                r: hit.map(|v| v.r),
                q: hit.map(|v| v.q),
            })
        })
        .collect::<hpwin_core::Result<_>>()?;

    let output = cfg.output();
    let path = out_path(out_dir, args.csv.as_ref(), output.csv.as_ref(), "scan.csv")?;
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    for row in &rows {
        w.serialize(row)?;
    }
    w.flush()?;
    let covered = rows.iter().filter(|r| r.covered).count();
    println!("cells {} covered {} csv {}", rows.len(), covered, path.display());
    Ok(0)
}
