//! Randomized verification suites for the inequalities the strategy rests
//! on. Every trial draws its instance from a ChaCha8 stream indexed by the
//! trial number, so any single failure can be re-run from `(seed, trial)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::adversary::{BobAdversary, BobConfig, BobKind};
use crate::arith::{format_rational, int, pow_real, ratio, Precision};
use crate::error::{Error, Result};
use crate::game::{run_game, GameParams, ProductBall};
use crate::geometry::{
    candidate_directions, delta_ball_intersects, delta_membership, enumerate_dual_witnesses, height_with_witness, plane_from_dual, DualWitness, Intersection, RationalDirection,
};
use crate::lattice::{bridge_membership, flowed_direction_vector, shortest_vector, LatticeBasis};
use crate::strategy::{
    check_radius_log_bound, class_q_range_contains, classify_ball, setup_constants, setup_demo_constants, Mode,
    StrategyConstants, StrategyState,
};

type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Minkowski,
    Lq,
    Lrvalue,
    Linc,
    Linequ,
    Lconst,
    Lmain1,
    Dani,
    Svp,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Minkowski,
        Suite::Lq,
        Suite::Lrvalue,
        Suite::Linc,
        Suite::Linequ,
        Suite::Lconst,
        Suite::Lmain1,
        Suite::Dani,
        Suite::Svp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Minkowski => "minkowski",
            Suite::Lq => "lq",
            Suite::Lrvalue => "lrvalue",
            Suite::Linc => "linc",
            Suite::Linequ => "linequ",
            Suite::Lconst => "lconst",
            Suite::Lmain1 => "lmain1",
            Suite::Dani => "dani",
            Suite::Svp => "svp",
        }
    }

    /// Trial count used when none is given.
    pub fn default_trials(self) -> u64 {
        match self {
            Suite::Minkowski | Suite::Lq => 1000,
            Suite::Lrvalue => 400,
            Suite::Linc => 500,
            Suite::Linequ | Suite::Lconst => 40,
            Suite::Lmain1 => 12,
            Suite::Dani => 10_000,
            Suite::Svp => 500,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub instance: Value,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: u64,
    pub passes: u64,
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passes == self.trials
    }
}

/// Outcome of one trial: the instance that was checked and, on failure, why.
struct Trial {
    instance: Value,
    failure: Option<String>,
}

impl Trial {
    fn check(instance: Value, ok: bool, reason: impl FnOnce() -> String) -> Self {
        Trial {
            instance,
            failure: (!ok).then(reason),
        }
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_suite(suite: Suite, trials: u64, seed: u64) -> SuiteReport {
    let outcomes: Vec<(u64, Option<TrialFailure>)> = (0..trials)
        .into_par_iter()
        .map(|i| (i, run_trial(suite, seed, i).err()))
        .collect();
    let failures: Vec<TrialFailure> = outcomes.into_iter().filter_map(|(_, f)| f).collect();
    SuiteReport {
        suite,
        seed,
        trials,
        passes: trials - failures.len() as u64,
        failures,
    }
}

/// Runs trial `trial` of `suite` in isolation.
pub fn run_trial(suite: Suite, seed: u64, trial: u64) -> std::result::Result<Value, TrialFailure> {
    let mut rng = trial_rng(seed, trial);
    let out = match suite {
        Suite::Minkowski => minkowski_trial(&mut rng),
        Suite::Lq => lq_trial(&mut rng),
        Suite::Lrvalue => lrvalue_trial(&mut rng, trial),
        Suite::Linc => linc_trial(&mut rng),
        Suite::Linequ => linequ_trial(&mut rng),
        Suite::Lconst => lconst_trial(&mut rng),
        Suite::Lmain1 => lmain1_trial(&mut rng, seed ^ trial),
        Suite::Dani => dani_trial(&mut rng),
        Suite::Svp => svp_trial(&mut rng),
    };
    match out {
        Ok(Trial { instance, failure: None }) => Ok(instance),
        Ok(Trial {
            instance,
            failure: Some(reason),
        }) => Err(TrialFailure { trial, instance, reason }),
        Err(e) => Err(TrialFailure {
            trial,
            instance: json!({ "seed": seed }),
            reason: e.to_string(),
        }),
    }
}

fn rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Q {
    ratio(rng.gen_range(lo..=hi), den)
}

fn qs(x: &Q) -> String {
    format_rational(x)
}

fn ball_json(b: &ProductBall) -> Value {
    serde_json::to_value(b).expect("balls serialize")
}

fn primitive(p: i64, r: i64, q: i64) -> RationalDirection {
    let g = p.gcd(&r).gcd(&q).max(1);
    RationalDirection {
        p: p / g,
        r: r / g,
        q: q / g,
    }
}

/// Ball with `λ ∈ [51/100, 99/100]`, `ρ ≤ 1/4`, plus a primitive direction
/// with `q ≤ 10⁴`.
fn witness_instance(rng: &mut ChaCha8Rng) -> Result<(ProductBall, RationalDirection)> {
    let lambda = rat(rng, 51, 99, 100);
    let rho = rat(rng, 1, 250, 1000);
    let center = [rat(rng, -200, 200, 100), rat(rng, -200, 200, 100), rat(rng, -300, 300, 100)];
    let ball = ProductBall::new(lambda, center, rho)?;
    let q = rng.gen_range(1..=10_000i64);
    let v = primitive(rng.gen_range(-2 * q..=2 * q), rng.gen_range(-2 * q..=2 * q), q);
    Ok((ball, v))
}

fn minkowski_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let (ball, v) = witness_instance(rng)?;
    let ws = enumerate_dual_witnesses(&ball, &v)?;
    let ok = !ws.is_empty() && ws.iter().all(|w| w.annihilates(&v) && (w.a, w.b) != (0, 0));
    let instance = json!({ "ball": ball_json(&ball), "v": v, "witnesses": ws.len() });
    Ok(Trial::check(instance, ok, || "empty or invalid dual-witness set".into()))
}

fn lq_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let (ball, v) = witness_instance(rng)?;
    let (h, w) = height_with_witness(&ball, &v)?;
    let qq = int(v.q);
    let lower = qq <= h;
    let upper = Precision::default().le("height against q^(1+lambda)", &h, |bits| {
        pow_real(&qq, &(Q::one() + &ball.lambda), bits)
    })?;
    let instance = json!({ "ball": ball_json(&ball), "v": v, "witness": w, "height": qs(&h) });
    Ok(Trial::check(instance, lower && upper, || {
        format!("q <= H: {lower}, H <= q^(1+lambda): {upper}")
    }))
}

/// Initial ball used by the certified-constants suites.
pub fn certified_initial() -> ProductBall {
    ProductBall::new(ratio(3, 4), [int(0), int(0), int(0)], ratio(1, 10)).expect("valid ball")
}

/// Initial ball used by the demo-scale suites and the demo game.
pub fn demo_initial() -> ProductBall {
    ProductBall::new(ratio(3, 4), [ratio(1, 20), ratio(1, 30), ratio(1, 2)], ratio(1, 10)).expect("valid ball")
}

/// `R = 16`, `ε = 2⁻²⁰`, `β = 1/2`, `γ = 1` around [`demo_initial`].
pub fn demo_constants() -> StrategyConstants {
    let eps = Q::new(BigInt::one(), BigInt::one() << 20);
    setup_demo_constants(&demo_initial(), &ratio(1, 2), &int(1), &int(16), &eps).expect("valid demo constants")
}

fn lrvalue_trial(rng: &mut ChaCha8Rng, trial: u64) -> Result<Trial> {
    let c = setup_constants(&certified_initial(), &ratio(1, 2), &int(1), Mode::Certified)?;
    let n = 1 + (trial / 10 % 40) as u32;
    let top = c.window_top(n);
    // log-uniform below the top of the window, the top itself included
    let rho = if trial % 10 == 0 {
        top
    } else {
        let s = rng.gen_range(0..=200u32);
        let m = rng.gen_range(1..=1000i64);
        top * ratio(m, 1000) / Q::from_integer(BigInt::one() << s)
    };
    let ok = check_radius_log_bound(&c, n, &rho)?;
    let instance = json!({ "n": n, "rho": qs(&rho) });
    Ok(Trial::check(instance, ok, || "rho log H_{2n+2} <= sqrt(rho)/2 <= 1 fails".into()))
}

fn approx(x: f64) -> Q {
    Q::from_float(x).expect("finite")
}

fn linc_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let c = demo_constants();
    let beta = c.beta.clone();
    for _ in 0..1000 {
        let n = rng.gen_range(1..=3u32);
        let top = c.window_top(n);
        let rho = &top * (&beta + (Q::one() - &beta) * rat(rng, 1, 1000, 1000));
        let hmax = c.h(2 * n + 2).floor().to_integer().to_i64().unwrap_or(i64::MAX).max(1);
        let q = rng.gen_range(1..=hmax);
        let init = &c.initial;
        let jitter = |rng: &mut ChaCha8Rng| rat(rng, -60, 60, 1000);
        let target = [init.x() + jitter(rng), init.y() + jitter(rng), init.z() + jitter(rng)];
        let r = (&target[1] * int(q)).round().to_integer().to_i64().unwrap();
        let p = ((&target[0] + &target[2] * (ratio(r, q) - &target[1])) * int(q))
            .round()
            .to_integer()
            .to_i64()
            .unwrap();
        let v = primitive(p, r, q);
        let off = |rng: &mut ChaCha8Rng| &rho * rat(rng, -1, 1, 2) * rat(rng, 0, 1000, 1000);
        let center = [v.x_core() + off(rng), v.y_core() + off(rng), target[2].clone()];
        let lam = init.lambda.clone() + rat(rng, -50, 50, 1000);
        let ball = ProductBall::new(lam, center, rho.clone())?;
        if !init.contains_ball(&ball) || classify_ball(&ball, &c) != Some(n) {
            continue;
        }
        return linc_points(rng, &c, n, &ball, &v);
    }
    Err(Error::Invariant("could not place a window ball inside the initial ball".into()))
}

fn linc_points(
    rng: &mut ChaCha8Rng,
    c: &StrategyConstants,
    n: u32,
    ball: &ProductBall,
    v: &RationalDirection,
) -> Result<Trial> {
    let eps = &c.epsilon;
    let lam_c = ball.lambda.clone();
    let lf = crate::arith::to_f64(&lam_c);
    let qf = v.q as f64;
    let tx = crate::arith::to_f64(eps) * qf.powf(-(1.0 + lf));
    let ty = crate::arith::to_f64(eps) * qf.powf(-(2.0 - lf));
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 20 {
        attempts += 1;
        if attempts > 2000 {
            return Err(Error::Invariant("could not sample points inside the ball".into()));
        }
        let lam = &lam_c + &ball.radius * rat(rng, -1000, 1000, 1000);
        let s1 = rng.gen_range(-4.0..4.0);
        let s2 = rng.gen_range(-4.0..4.0);
        let z = ball.z() + &ball.radius * rat(rng, -500, 500, 1000);
        let y = v.y_core() + approx(s2 * ty);
        let x = v.x_core() + &z * (&y - v.y_core()) + approx(s1 * tx);
        let pt = [x, y, z];
        if !ball.contains_point(&lam, &pt) {
            continue;
        }
        checked += 1;
        let inner = delta_membership(&lam_c, &pt, v, &(eps / int(3)))?;
        let mid = delta_membership(&lam, &pt, v, eps)?;
        let outer = delta_membership(&lam_c, &pt, v, &(eps * int(3)))?;
        if (inner && !mid) || (mid && !outer) {
            let instance = json!({
                "n": n, "ball": ball_json(ball), "v": v,
                "lambda": qs(&lam), "point": pt.iter().map(qs).collect::<Vec<_>>(),
            });
            return Ok(Trial::check(instance, false, || {
                format!("inclusion fails: inner {inner}, actual {mid}, outer {outer}")
            }));
        }
    }
    let instance = json!({ "n": n, "ball": ball_json(ball), "v": v, "points": checked });
    Ok(Trial::check(instance, true, String::new))
}

/// Constants for the pair construction below: `R = 4`, `ε = 2⁻⁴⁷`, so that
/// `R²³ ε = 1/2 < 1`.
pub fn pair_constants() -> StrategyConstants {
    let init = ProductBall::new(ratio(61, 100), [int(0), int(0), int(0)], ratio(1, 10)).expect("valid ball");
    let eps = Q::new(BigInt::one(), BigInt::one() << 47);
    setup_demo_constants(&init, &ratio(1, 2), &int(1), &int(4), &eps).expect("valid constants")
}

/// Window of the outer ball in [`pair_constants`]; chosen so that two
/// independent tubes of admissible height can meet one ball.
pub const PAIR_WINDOW: u32 = 36;

/// Two directions with tubes meeting a common window-`n` ball `Ω` and
/// sub-balls `Ω_j ∈ 𝔅_{n+1}` with `v_j ∈ V_{Ω_j,1}`.
#[derive(Clone, Debug, Serialize)]
pub struct PairInstance {
    pub outer: ProductBall,
    pub balls: [ProductBall; 2],
    pub directions: [RationalDirection; 2],
    pub duals: [DualWitness; 2],
    #[serde(skip)]
    pub plane: [i64; 3],
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    e.x.rem_euclid(m)
}

/// Builds a pair satisfying every hypothesis of the pair lemma except
/// membership of the outer ball in the good family, which its proof does
/// not use. The directions lie on a common plane `a x + b y = 0`.
pub fn construct_pair(rng: &mut ChaCha8Rng, c: &StrategyConstants, n: u32) -> Result<PairInstance> {
    for _ in 0..200 {
        let a: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let b: i64 = rng.gen_range(-1..=1);
        // (p, r, q) = (−a b r, r, q) spans the lattice orthogonal to (a, b, 0)
        let lam = rat(rng, 520, 540, 1000);
        let z = rat(rng, -30, 30, 1000);
        let y_star = rat(rng, -30, 30, 1000);
        let h_lo = c.h(n + 1);
        let h_hi = int(3) * c.h(n + 2);
        let obj = Q::one().max((int(b) + &z * int(a)).abs());
        let q_lo = (&h_lo / &obj).ceil().to_integer().to_i64().unwrap();
        let q_hi = (&h_hi / &obj).floor().to_integer().to_i64().unwrap();
        // q2 below lands in [q1, 2 q1], so both stay in [q_lo, q_hi]
        let q1 = rng.gen_range(q_lo..=q_hi / 2);
        let r1 = (&y_star * int(q1)).round().to_integer().to_i64().unwrap();
        if r1.gcd(&q1) != 1 {
            continue;
        }
        // r1 q2 − r2 q1 = ±1
        let sign: i128 = if rng.gen_bool(0.5) { 1 } else { -1 };
        let q2_base = (sign * mod_inverse(i128::from(r1), i128::from(q1))).rem_euclid(i128::from(q1));
        let q2 = q2_base + i128::from(q1);
        let r2 = (i128::from(r1) * q2 - sign) / i128::from(q1);
        let (Some(q2), Some(r2)) = (q2.to_i64(), r2.to_i64()) else {
            continue;
        };
        let v1 = RationalDirection { p: -a * b * r1, r: r1, q: q1 };
        let v2 = RationalDirection { p: -a * b * r2, r: r2, q: q2 };
        let core = |v: &RationalDirection| [v.x_core(), v.y_core(), z.clone()];
        let (c1, c2) = (core(&v1), core(&v2));
        let mid: [Q; 3] = std::array::from_fn(|i| (&c1[i] + &c2[i]) / int(2));
        let outer = ProductBall::new(lam.clone(), mid, c.window_top(n))?;
        let inner = |cc: [Q; 3]| ProductBall::new(lam.clone(), cc, c.window_top(n + 1));
        let balls = [inner(c1)?, inner(c2)?];
        let dirs = [v1, v2];
        if !c.initial.contains_ball(&outer) || classify_ball(&outer, c) != Some(n) {
            continue;
        }
        let mut ok = true;
        let mut duals = Vec::new();
        for (ball, v) in balls.iter().zip(&dirs) {
            ok &= outer.contains_ball(ball) && classify_ball(ball, c) == Some(n + 1);
            ok &= class_q_range_contains(ball, n + 1, 1, v.q, c)?;
            ok &= matches!(delta_ball_intersects(&outer, v, &c.epsilon)?, Intersection::NonEmpty { .. });
            if !ok {
                break;
            }
            let (h, w) = height_with_witness(ball, v)?;
            ok &= c.h(n + 1) <= h && h <= int(3) * c.h(n + 2);
            duals.push(w);
        }
        if !ok {
            continue;
        }
        return Ok(PairInstance {
            outer,
            balls,
            directions: dirs,
            duals: [duals[0], duals[1]],
            plane: [a, b, 0],
        });
    }
    Err(Error::Invariant("pair construction did not converge".into()))
}

fn dot(v: &RationalDirection, w: &DualWitness) -> i128 {
    i128::from(v.p) * i128::from(w.a) + i128::from(v.r) * i128::from(w.b) + i128::from(v.q) * i128::from(w.c)
}

fn linequ_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let c = pair_constants();
    let pair = construct_pair(rng, &c, PAIR_WINDOW)?;
    let [v1, v2] = pair.directions;
    let [w1, w2] = pair.duals;
    let d12 = dot(&v1, &w2);
    let d21 = dot(&v2, &w1);
    // k = 1: bound R^{k+22} ε
    let bound = num_traits::Pow::pow(&c.r, 23u32) * &c.epsilon;
    let within = Q::from_integer(BigInt::from(d12.abs().max(d21.abs()))) <= bound;
    let zero = d12 == 0 && d21 == 0;
    let normal = v1.cross(&v2);
    let parallel = |w: &DualWitness| {
        let ww = [i128::from(w.a), i128::from(w.b), i128::from(w.c)];
        ww[0] * normal[1] - ww[1] * normal[0] == 0
            && ww[1] * normal[2] - ww[2] * normal[1] == 0
            && ww[0] * normal[2] - ww[2] * normal[0] == 0
    };
    let ok = bound < Q::one() && within && zero && parallel(&w1) && parallel(&w2);
    let instance = serde_json::to_value(&pair)?;
    Ok(Trial::check(instance, ok, || {
        format!("v1.w2 = {d12}, v2.w1 = {d21}, bound = {}", qs(&bound))
    }))
}

fn lconst_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let c = pair_constants();
    let pair = construct_pair(rng, &c, PAIR_WINDOW)?;
    let planes = [plane_from_dual(&pair.duals[0])?, plane_from_dual(&pair.duals[1])?];
    // the planes agree iff the normals and offsets are proportional
    let same = {
        let (p, q) = (&planes[0], &planes[1]);
        let k = if !p.normal[1].is_zero() {
            &q.normal[1] / &p.normal[1]
        } else {
            &q.normal[2] / &p.normal[2]
        };
        !k.is_zero() && (0..4).all(|i| q.normal[i] == &p.normal[i] * &k) && q.offset == &p.offset * &k
    };
    let [a, b, _] = pair.plane;
    let expected = pair.duals.iter().all(|w| w.a * b == w.b * a && w.c == 0);
    let instance = serde_json::to_value(&pair)?;
    Ok(Trial::check(instance, same && expected, || {
        format!("planes differ: {:?} vs {:?}", planes[0], planes[1])
    }))
}

fn lmain1_trial(rng: &mut ChaCha8Rng, game_seed: u64) -> Result<Trial> {
    let c = demo_constants();
    let shrink = ratio(rng.gen_range(50..=80), 100);
    let bob = BobConfig {
        kind: BobKind::Random,
        seed: game_seed,
        shrink: shrink.clone(),
        target: None,
        script: None,
        rng: "chacha8".into(),
    };
    let rounds = 10 + rng.gen_range(0..6usize);
    let params = GameParams::potential(c.beta.clone(), c.gamma.clone());
    let mut alice = StrategyState::new(c.clone());
    let mut bob = BobAdversary::new(bob, c.initial.clone(), c.beta.clone())?;
    run_game(&params, &mut alice, &mut bob, rounds)?;
    let mut checked = 0;
    for (&n, visits) in &alice.visits {
        for visit in visits.iter().filter(|v| v.good && n >= 1) {
            let ball = &visit.ball;
            let cap = int(3) * c.h(n + 1);
            let q_max = pow_real(&cap, &(Q::one() + &ball.lambda).recip(), 128)?.hi().ceil();
            for v in candidate_directions(ball, &Q::one(), &q_max, &c.epsilon, 1_000_000)? {
                let small = Precision::default().le("q^(1+lambda) against 3H_{n+1}", &Q::zero(), |bits| {
                    Ok(pow_real(&int(v.q), &(Q::one() + &ball.lambda), bits)?
                        .neg()
                        .add_rational(&cap))
                })?;
                if small {
                    let instance = json!({ "n": n, "ball": ball_json(ball), "v": v, "round": visit.round });
                    return Ok(Trial::check(instance, false, || {
                        "tube of a low-height direction meets a good ball".into()
                    }));
                }
            }
            checked += 1;
        }
    }
    let instance = json!({ "game_seed": game_seed, "shrink": qs(&shrink), "rounds": rounds, "good_balls": checked });
    Ok(Trial::check(instance, true, String::new))
}

fn dani_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let lam = rat(rng, 51, 99, 100);
    let q = rng.gen_range(1..=30i64);
    let v = primitive(rng.gen_range(-30..=30), rng.gen_range(-30..=30), q);
    let eps = rat(rng, 1, 200, 100);
    // points near the core so both verdicts occur
    let pt = [
        v.x_core() + rat(rng, -40, 40, 24_000),
        v.y_core() + rat(rng, -40, 40, 24_000),
        rat(rng, -40, 40, 12),
    ];
    let w = flowed_direction_vector(&lam, &pt, &v, 128)?;
    let unit = w[2].is_point() && w[2].lo().is_one();
    let bridge = bridge_membership(&lam, &pt, &v, &eps)?;
    let tube = delta_membership(&lam, &pt, &v, &eps)?;
    let instance = json!({
        "lambda": qs(&lam), "point": pt.iter().map(qs).collect::<Vec<_>>(), "v": v, "epsilon": qs(&eps),
        "tube": tube,
    });
    Ok(Trial::check(instance, unit && bridge == tube, || {
        format!("flowed verdict {bridge}, tube verdict {tube}, unit third coordinate {unit}")
    }))
}

/// Random unimodular integer matrix with entries bounded by 10.
pub fn random_unimodular(rng: &mut ChaCha8Rng) -> [[i64; 3]; 3] {
    let mut m = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..rng.gen_range(1..=12) {
        let (i, j) = (rng.gen_range(0..3), rng.gen_range(0..3));
        let k = rng.gen_range(-3..=3i64);
        if i == j {
            continue;
        }
        let next: [i64; 3] = std::array::from_fn(|col| m[i][col] + k * m[j][col]);
        if next.iter().all(|x| x.abs() <= 10) {
            m[i] = next;
        }
    }
    if rng.gen_bool(0.5) {
        m.swap(0, 1);
    }
    m
}

/// Smallest squared length over the coefficient box `[−20, 20]³`.
pub fn brute_force_min_sq(rows: &[[i64; 3]; 3]) -> i64 {
    let mut best = i64::MAX;
    for a in -20i64..=20 {
        for b in -20i64..=20 {
            for c in -20i64..=20 {
                if (a, b, c) == (0, 0, 0) {
                    continue;
                }
                let n: i64 = (0..3)
                    .map(|i| {
                        let x = rows[i][0] * a + rows[i][1] * b + rows[i][2] * c;
                        x * x
                    })
                    .sum();
                best = best.min(n);
            }
        }
    }
    best
}

fn svp_trial(rng: &mut ChaCha8Rng) -> Result<Trial> {
    let m = random_unimodular(rng);
    let sv = shortest_vector(&LatticeBasis::from_integer_rows(&m, 128))?;
    let best = brute_force_min_sq(&m);
    let found: i64 = (0..3)
        .map(|i| {
            let x: i64 = (0..3).map(|j| m[i][j] * sv.coeffs[j]).sum();
            x * x
        })
        .sum();
    let ok = found == best && sv.length.square().contains(&int(best));
    let instance = json!({ "basis_rows": m, "coeffs": sv.coeffs });
    Ok(Trial::check(instance, ok, || format!("found squared length {found}, brute force {best}")))
}
