//! Alice's winning strategy in the hyperplane potential game.
//!
//! Bob's balls are sorted into radius windows `𝔅ₙ`. The first time Bob
//! enters window `n` with a ball that avoids every tube of the right height
//! (a "good" ball), Alice covers the tubes that can show up at the next `n`
//! scales with one slab per scale. Everything else gets the empty family.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::arith::{self, format_rational, int, ln_real, pow_real, rational_str, CertInterval, Precision};
use crate::error::{Error, Result};
use crate::game::{legal_alice_potential, AliceMove, AliceStrategy, GameTranscript, HyperplaneNbhd, ProductBall};
use crate::geometry::{
    candidate_directions, height, plane_case_ii, AvoidancePlane, RationalDirection, DEFAULT_Q_BUDGET,
};

type Q = BigRational;

const BITS: u32 = 160;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Certified,
    Demo,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyConstants {
    #[serde(with = "rational_str")]
    pub kappa: Q,
    #[serde(rename = "R", with = "rational_str")]
    pub r: Q,
    #[serde(with = "rational_str")]
    pub epsilon: Q,
    #[serde(with = "rational_str")]
    pub rho0: Q,
    #[serde(with = "rational_str")]
    pub beta: Q,
    #[serde(with = "rational_str")]
    pub gamma: Q,
    pub mode: Mode,
    pub initial: ProductBall,
}

fn check_game_params(initial: &ProductBall, beta: &Q, gamma: &Q) -> Result<()> {
    if !(beta.is_positive() && beta < &Q::one()) {
        return Err(Error::invalid(format!("beta must lie in (0,1), got {}", format_rational(beta))));
    }
    if !gamma.is_positive() {
        return Err(Error::invalid("gamma must be positive"));
    }
    if initial.radius >= arith::ratio(1, 4) {
        return Err(Error::invalid(format!(
            "initial radius must be below 1/4, got {}",
            format_rational(&initial.radius)
        )));
    }
    if !initial.lambda_admissible() {
        return Err(Error::invalid("initial ball's lambda-interval must lie inside (1/2, 1)"));
    }
    Ok(())
}

/// Least integer `κ > 2` with every coordinate of the initial ball bounded
/// by `κ − 1` in absolute value.
pub fn kappa_for(initial: &ProductBall) -> Q {
    let m = initial
        .center
        .iter()
        .map(|c| c.abs())
        .max()
        .expect("three coordinates")
        + &initial.radius;
    let k = m.ceil() + Q::one();
    k.max(int(3))
}

fn decide_ge_one(prec: &Precision, what: &str, mut f: impl FnMut(u32) -> Result<CertInterval>) -> Result<bool> {
    prec.decide(what, |bits| {
        let v = f(bits)?;
        Ok(if v.lo() >= &Q::one() {
            Some(true)
        } else if v.hi() < &Q::one() {
            Some(false)
        } else {
            None
        })
    })
}

/// Certified constants: least admissible `κ`, least power of two `R`, and
/// `ε = R^{-24} ρ₀`.
pub fn setup_constants(initial: &ProductBall, beta: &Q, gamma: &Q, mode: Mode) -> Result<StrategyConstants> {
    if mode == Mode::Demo {
        return Err(Error::invalid("demo constants need explicit R and epsilon; use setup_demo_constants"));
    }
    check_game_params(initial, beta, gamma)?;
    let kappa = kappa_for(initial);
    let prec = Precision::default();
    let floor = (int(100) / beta).max(int(10_000) * Pow::pow(&kappa, 4u32));
    let half_beta_sq = beta * beta / int(2);
    for m in 1u32..=4096 {
        let r = Q::from_integer(BigInt::one() << m);
        if r < floor {
            continue;
        }
        // R^{-1/2} log R^4 = 4m ln2 · 2^{-m/2}, need ≤ 1
        let small = !decide_ge_one(&prec, "R log condition", |bits| {
            let v = ln_real(&int(2), bits)?
                .scale(&int(4 * m as i64))
                .mul(&pow_real(&int(2), &arith::ratio(-(m as i64), 2), bits)?);
            // strictly above one means failure; equality is impossible here
            Ok(v)
        })?;
        if !small {
            continue;
        }
        // (β²/2)^γ (R^γ − 1) ≥ 1
        let ok = decide_ge_one(&prec, "R gamma condition", |bits| {
            let rg = pow_real(&r, gamma, bits)?.add_rational(&int(-1));
            Ok(pow_real(&half_beta_sq, gamma, bits)?.mul(&rg))
        })?;
        if ok {
            let epsilon = initial.radius.clone() / Pow::pow(&r, 24u32);
            return Ok(StrategyConstants {
                kappa,
                r,
                epsilon,
                rho0: initial.radius.clone(),
                beta: beta.clone(),
                gamma: gamma.clone(),
                mode,
                initial: initial.clone(),
            });
        }
    }
    Err(Error::invalid("no power of two up to 2^4096 satisfies the constraints on R"))
}

/// Small constants for end-to-end play. Only `β ∈ (0,1)`, `γ > 0`, `R > 1/β`
/// and `ε > 0` are enforced; nothing is claimed about winning.
pub fn setup_demo_constants(initial: &ProductBall, beta: &Q, gamma: &Q, r: &Q, epsilon: &Q) -> Result<StrategyConstants> {
    check_game_params(initial, beta, gamma)?;
    if r <= &beta.recip() {
        return Err(Error::invalid("demo R must exceed 1/beta"));
    }
    if !epsilon.is_positive() {
        return Err(Error::invalid("demo epsilon must be positive"));
    }
    Ok(StrategyConstants {
        kappa: kappa_for(initial),
        r: r.clone(),
        epsilon: epsilon.clone(),
        rho0: initial.radius.clone(),
        beta: beta.clone(),
        gamma: gamma.clone(),
        mode: Mode::Demo,
        initial: initial.clone(),
    })
}

fn r_pow(r: &Q, n: i64) -> Q {
    if n >= 0 {
        Pow::pow(r, n as u64)
    } else {
        Pow::pow(r, (-n) as u64).recip()
    }
}

impl StrategyConstants {
    /// `H_n = 20 ε κ ρ₀⁻¹ Rⁿ`
    pub fn h(&self, n: u32) -> Q {
        int(20) * &self.epsilon * &self.kappa / &self.rho0 * r_pow(&self.r, n as i64)
    }

    /// Upper radius of window `n`: `R^{-n} ρ₀`.
    pub fn window_top(&self, n: u32) -> Q {
        r_pow(&self.r, -(n as i64)) * &self.rho0
    }

    /// Alice's slab width at scale `n + k`: `2 R^{-(n+k)} ρ₀`.
    pub fn slab_width(&self, n: u32, k: u32) -> Q {
        int(2) * self.window_top(n + k)
    }

    pub fn is_certified(&self) -> bool {
        self.mode == Mode::Certified
    }
}

/// Window index of `ball`: 0 for the initial ball, `n ≥ 1` when
/// `β R^{-n} ρ₀ < ρ ≤ R^{-n} ρ₀`, `None` in the gaps or outside `Ω₀`.
pub fn classify_ball(ball: &ProductBall, c: &StrategyConstants) -> Option<u32> {
    if *ball == c.initial {
        return Some(0);
    }
    if !c.initial.contains_ball(ball) {
        return None;
    }
    let rho = &ball.radius;
    if rho > &c.window_top(1) {
        return None;
    }
    // Largest n with ρ ≤ R^{-n} ρ₀.
    let mut n = 1u32;
    let mut top = c.window_top(1);
    loop {
        let next = &top / &c.r;
        if rho > &next {
            break;
        }
        top = next;
        n += 1;
    }
    (rho > &(&c.beta * &top)).then_some(n)
}

/// `H^{1/(1+λ)}`
fn height_root(h: &Q, lambda: &Q, bits: u32) -> Result<CertInterval> {
    if !h.is_positive() {
        return Err(Error::Invariant("H_n must be positive".into()));
    }
    pow_real(h, &(Q::one() + lambda).recip(), bits)
}

/// Multiplier on `H^{1/(1+λ)}` for the lower and upper end of class `k`.
fn class_exponents(k: u32) -> (i64, i64) {
    if k == 1 {
        (0, 20)
    } else {
        (2 * k as i64 + 16, 2 * k as i64 + 18)
    }
}

fn to_int_floor(x: &Q) -> Q {
    x.floor()
}

fn to_int_ceil(x: &Q) -> Q {
    x.ceil()
}

/// Certified `lo ≤ q ≤ hi` where the bounds are `scale · H^{1/(1+λ)}`.
fn q_in_range(q: i64, h: &Q, lambda: &Q, lo_scale: &Q, hi_scale: &Q) -> Result<bool> {
    let prec = Precision::default();
    let qq = int(q);
    // lo ≤ q
    let above = prec.decide("class lower end", |bits| {
        let lo = height_root(h, lambda, bits)?.scale(lo_scale);
        Ok(match lo.cmp_rational(&qq) {
            Some(std::cmp::Ordering::Less) | Some(std::cmp::Ordering::Equal) => Some(true),
            Some(std::cmp::Ordering::Greater) => Some(false),
            None => None,
        })
    })?;
    if !above {
        return Ok(false);
    }
    prec.le("class upper end", &qq, |bits| Ok(height_root(h, lambda, bits)?.scale(hi_scale)))
}

/// `V_{Ω,k}` restricted to directions whose tube is not certified disjoint
/// from `Ω` (the only ones that matter for the strategy).
pub fn candidate_class(
    ball: &ProductBall,
    n: u32,
    k: u32,
    c: &StrategyConstants,
    budget: u64,
) -> Result<Vec<RationalDirection>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let (e_lo, e_hi) = class_exponents(k);
    let (lo_scale, hi_scale) = (r_pow(&c.r, e_lo), r_pow(&c.r, e_hi));
    filtered_class(ball, n, c, budget, &lo_scale, &hi_scale)
}

/// Membership of `v` in `V_{Ω,k}` for a ball in window `n`.
pub fn in_candidate_class(
    ball: &ProductBall,
    n: u32,
    k: u32,
    v: &RationalDirection,
    c: &StrategyConstants,
) -> Result<bool> {
    if k == 0 {
        return Ok(false);
    }
    if !class_q_range_contains(ball, n, k, v.q, c)? {
        return Ok(false);
    }
    let h = height(ball, v)?;
    Ok(c.h(n) <= h && h <= int(3) * c.h(n + 1))
}

/// The `q`-range of `V_{Ω,k}` alone, without the height condition.
pub fn class_q_range_contains(ball: &ProductBall, n: u32, k: u32, q: i64, c: &StrategyConstants) -> Result<bool> {
    if k == 0 {
        return Ok(false);
    }
    let (e_lo, e_hi) = class_exponents(k);
    q_in_range(q, &c.h(n), &ball.lambda, &r_pow(&c.r, e_lo), &r_pow(&c.r, e_hi))
}

/// `V_Ω`, the union over all `k`.
pub fn candidate_union(ball: &ProductBall, n: u32, c: &StrategyConstants, budget: u64) -> Result<Vec<RationalDirection>> {
    let hi = int(3) * c.h(n + 1);
    let root = height_root(&c.h(n), &ball.lambda, BITS)?;
    let big = hi.clone() / root.lo();
    filtered_class(ball, n, c, budget, &Q::one(), &big.ceil())
}

fn filtered_class(
    ball: &ProductBall,
    n: u32,
    c: &StrategyConstants,
    budget: u64,
    lo_scale: &Q,
    hi_scale: &Q,
) -> Result<Vec<RationalDirection>> {
    let hn = c.h(n);
    let top = int(3) * c.h(n + 1);
    let root = height_root(&hn, &ball.lambda, BITS)?;
    let q_lo = to_int_floor(&(root.lo() * lo_scale)).max(Q::one());
    let q_hi = to_int_ceil(&(root.hi() * hi_scale)).min(to_int_floor(&top));
    if q_lo > q_hi {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for v in candidate_directions(ball, &q_lo, &q_hi, &c.epsilon, budget)? {
        if !q_in_range(v.q, &hn, &ball.lambda, lo_scale, hi_scale)? {
            continue;
        }
        let h = height(ball, &v)?;
        if hn <= h && h <= top {
            out.push(v);
        }
    }
    Ok(out)
}

/// How a plane was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaneSource {
    /// Common dual of two independent candidates.
    Cross,
    /// Single candidate direction; plane through its tube core at the
    /// ball's `z`.
    SingleDirection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneChoice {
    pub k: u32,
    pub plane: AvoidancePlane,
    pub source: PlaneSource,
    pub candidates: usize,
    pub basis: Vec<RationalDirection>,
}

fn det3(a: &RationalDirection, b: &RationalDirection, c: &RationalDirection) -> i128 {
    let x = a.cross(b);
    x[0] * i128::from(c.p) + x[1] * i128::from(c.r) + x[2] * i128::from(c.q)
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    num_integer::Integer::gcd(&a, &b)
}

/// Directions that may show up in window `n + k` below `ball`: `q` in the
/// widened class range capped at `3 H_{n+k+1}`, tube meeting `ball`.
pub fn plane_candidates(
    ball: &ProductBall,
    n: u32,
    k: u32,
    c: &StrategyConstants,
    budget: u64,
) -> Result<Vec<RationalDirection>> {
    let (e_lo, e_hi) = class_exponents(k);
    let root = height_root(&c.h(n + k), &ball.lambda, BITS)?;
    let lo = (root.lo() * r_pow(&c.r, e_lo) / int(3)).floor().max(Q::one());
    let cap = (int(3) * c.h(n + k + 1)).floor();
    let hi = (root.hi() * r_pow(&c.r, e_hi) * int(3)).ceil().min(cap);
    if lo > hi {
        return Ok(Vec::new());
    }
    candidate_directions(ball, &lo, &hi, &c.epsilon, budget)
}

/// The plane `L_k(Ω)`, or `None` if no tube at scale `n + k` can reach `Ω`.
///
/// Every genuine dual witness at that scale is orthogonal to every
/// candidate. Two independent candidates therefore fix the plane; three
/// independent ones rule out any genuine witness.
pub fn select_plane(
    ball: &ProductBall,
    n: u32,
    k: u32,
    c: &StrategyConstants,
    budget: u64,
) -> Result<Option<PlaneChoice>> {
    let cands = plane_candidates(ball, n, k, c, budget)?;
    let Some(v1) = cands.first().copied() else {
        return Ok(None);
    };
    let Some(v2) = cands.iter().copied().find(|v| v.cross(&v1) != [0, 0, 0]) else {
        return Ok(Some(PlaneChoice {
            k,
            plane: plane_case_ii(&v1, ball.z())?,
            source: PlaneSource::SingleDirection,
            candidates: cands.len(),
            basis: vec![v1],
        }));
    };
    if cands.iter().any(|v| det3(&v1, &v2, v) != 0) {
        return Ok(None);
    }
    let w = v1.cross(&v2);
    let g = gcd_i128(gcd_i128(w[0], w[1]), w[2]);
    let (a, b, cc) = (w[0] / g, w[1] / g, w[2] / g);
    if a == 0 && b == 0 {
        return Ok(None);
    }
    let to_q = |x: i128| Q::from_integer(BigInt::from(x));
    Ok(Some(PlaneChoice {
        k,
        plane: AvoidancePlane {
            normal: [Q::zero(), to_q(a), to_q(b), Q::zero()],
            offset: to_q(cc),
        },
        source: PlaneSource::Cross,
        candidates: cands.len(),
        basis: vec![v1, v2],
    }))
}

/// One ball of Bob's path seen in window `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowVisit {
    pub round: usize,
    pub ball: ProductBall,
    pub good: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub round: usize,
    pub n: Option<u32>,
    pub good: Option<bool>,
    pub first_entry: bool,
    pub acted: bool,
    pub candidates_per_k: Vec<usize>,
    pub planes: Vec<PlaneChoice>,
}

#[derive(Clone, Debug)]
pub struct StrategyState {
    pub constants: StrategyConstants,
    pub budget: u64,
    /// Path balls per window, in round order.
    pub visits: BTreeMap<u32, Vec<WindowVisit>>,
    /// Round at which Alice acted for window `n`.
    pub acted: BTreeMap<u32, usize>,
    pub audit: Vec<AuditRecord>,
}

impl StrategyState {
    pub fn new(constants: StrategyConstants) -> Self {
        StrategyState {
            constants,
            budget: DEFAULT_Q_BUDGET,
            visits: BTreeMap::new(),
            acted: BTreeMap::new(),
            audit: Vec::new(),
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    /// Whether window `n` was ever entered.
    pub fn entered(&self, n: u32) -> bool {
        self.visits.contains_key(&n)
    }

    /// Good-ball test: nested in a good ball of window `n−1` on the path and
    /// no tube of `V_Ω` can meet `ball`. Unknown intersections disqualify.
    pub fn update_b_prime(&mut self, ball: &ProductBall, n: u32) -> Result<bool> {
        if n == 0 {
            return Ok(*ball == self.constants.initial);
        }
        let parent_ok = self
            .visits
            .get(&(n - 1))
            .is_some_and(|vs| vs.iter().any(|v| v.good && v.ball.contains_ball(ball)));
        if !parent_ok {
            return Ok(false);
        }
        Ok(candidate_union(ball, n, &self.constants, self.budget)?.is_empty())
    }

    /// Alice's family for Bob's ball at `round`.
    pub fn alice_move(&mut self, round: usize, ball: &ProductBall) -> Result<(Vec<HyperplaneNbhd>, AuditRecord)> {
        let c = self.constants.clone();
        let n = classify_ball(ball, &c);
        let mut rec = AuditRecord {
            round,
            n,
            good: None,
            first_entry: false,
            acted: false,
            candidates_per_k: Vec::new(),
            planes: Vec::new(),
        };
        let Some(n) = n else {
            return Ok((Vec::new(), rec));
        };
        let first_entry = !self.entered(n);
        if first_entry {
            if let Some(missing) = (0..n).find(|m| !self.entered(*m)) {
                return Err(Error::Invariant(format!(
                    "ball at round {round} is in window {n} but window {missing} was never entered"
                )));
            }
        }
        let good = self.update_b_prime(ball, n)?;
        rec.good = Some(good);
        rec.first_entry = first_entry;
        self.visits.entry(n).or_default().push(WindowVisit {
            round,
            ball: ball.clone(),
            good,
        });
        if !(first_entry && good) {
            return Ok((Vec::new(), rec));
        }
        self.acted.insert(n, round);
        rec.acted = true;
        let mut family = Vec::new();
        for k in 1..=n {
            let choice = select_plane(ball, n, k, &c, self.budget)?;
            rec.candidates_per_k.push(choice.as_ref().map_or(0, |p| p.candidates));
            if let Some(p) = choice {
                family.push(p.plane.neighbourhood(c.slab_width(n, k))?);
                rec.planes.push(p);
            }
        }
        if !legal_alice_potential(ball, &family, &c.beta, &c.gamma)? {
            return Err(Error::Invariant(format!(
                "Alice's family at round {round} exceeds the potential budget"
            )));
        }
        Ok((family, rec))
    }
}

impl AliceStrategy for StrategyState {
    fn respond(&mut self, t: &GameTranscript, ball: &ProductBall) -> Result<(AliceMove, Option<serde_json::Value>)> {
        let round = t.bob_rounds().saturating_sub(1);
        let (family, rec) = self.alice_move(round, ball)?;
        let decision = json!({
            "n": rec.n,
            "good": rec.good,
            "acted": rec.acted,
            "planes": rec.planes.iter().map(|p| json!({
                "k": p.k,
                "source": p.source,
                "candidates": p.candidates,
            })).collect::<Vec<_>>(),
        });
        self.audit.push(rec);
        Ok((AliceMove::Family(family), Some(decision)))
    }
}

/// `ρ · log H_{2n+2} ≤ ½√ρ ≤ 1`, certified.
pub fn check_radius_log_bound(c: &StrategyConstants, n: u32, rho: &Q) -> Result<bool> {
    let h = c.h(2 * n + 2);
    let prec = Precision::default();
    let half_root_ok = prec.decide("sqrt(rho)/2 <= 1", |bits| {
        let s = CertInterval::point(rho.clone(), bits).sqrt()?.scale(&arith::ratio(1, 2));
        Ok(if s.hi() <= &Q::one() {
            Some(true)
        } else if s.lo() > &Q::one() {
            Some(false)
        } else {
            None
        })
    })?;
    if !half_root_ok {
        return Ok(false);
    }
    prec.decide("rho log H <= sqrt(rho)/2", |bits| {
        let lhs = ln_real(&h, bits)?.scale(rho);
        let rhs = CertInterval::point(rho.clone(), bits).sqrt()?.scale(&arith::ratio(1, 2));
        Ok(match arith::cert_compare(&lhs, &rhs) {
            arith::Comparison::Less => Some(true),
            arith::Comparison::Greater => Some(false),
            arith::Comparison::Undecided => None,
        })
    })
}

pub fn to_u64(x: &Q) -> Option<u64> {
    x.to_integer().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio as r;
    use crate::game::zero3;
    use crate::geometry::{delta_ball_intersects, plane_from_dual, DualWitness};

    fn ball(l: Q, c: [Q; 3], rad: Q) -> ProductBall {
        ProductBall::new(l, c, rad).unwrap()
    }

    fn demo() -> StrategyConstants {
        let b = ball(r(3, 4), [r(1, 2), r(1, 3), int(0)], r(1, 10));
        setup_demo_constants(&b, &r(1, 2), &int(1), &int(16), &r(1, 1 << 20)).unwrap()
    }

    #[test]
    fn certified_constants_example() {
        let b = ball(r(3, 4), zero3(), r(1, 10));
        let c = setup_constants(&b, &r(1, 2), &int(1), Mode::Certified).unwrap();
        assert_eq!(c.kappa, int(3));
        assert_eq!(c.r, Q::from_integer(BigInt::one() << 20));
        assert_eq!(c.epsilon, Q::new(BigInt::one(), BigInt::from(10) << 480));
        // every coordinate of the ball is within κ − 1
        assert!(b.center.iter().all(|x| x.abs() + &b.radius <= &c.kappa - int(1)));
    }

    #[test]
    fn constants_reject_bad_input() {
        let big = ball(r(3, 4), zero3(), r(1, 4));
        assert!(setup_constants(&big, &r(1, 2), &int(1), Mode::Certified).is_err());
        let edge = ball(r(11, 20), zero3(), r(1, 10));
        assert!(setup_constants(&edge, &r(1, 2), &int(1), Mode::Certified).is_err());
        let b = ball(r(3, 4), zero3(), r(1, 10));
        assert!(setup_demo_constants(&b, &r(1, 2), &int(1), &int(2), &r(1, 10)).is_err());
        let d = setup_demo_constants(&b, &r(1, 2), &int(1), &int(16), &r(1, 1 << 20)).unwrap();
        assert!(!d.is_certified());
    }

    #[test]
    fn kappa_tracks_coordinates() {
        let b = ball(r(3, 4), [r(5, 2), int(0), int(-1)], r(1, 10));
        // max |coord| + ρ = 2.6, so κ − 1 ≥ 2.6 gives κ = 4
        assert_eq!(kappa_for(&b), int(4));
    }

    #[test]
    fn classification_examples() {
        let c = demo();
        let mk = |rad: Q| ball(c.initial.lambda.clone(), c.initial.center.clone(), rad);
        assert_eq!(classify_ball(&c.initial, &c), Some(0));
        assert_eq!(classify_ball(&mk(c.window_top(1)), &c), Some(1));
        assert_eq!(classify_ball(&mk(&c.beta * c.window_top(1)), &c), None);
        assert_eq!(classify_ball(&mk(c.window_top(3)), &c), Some(3));
        assert_eq!(classify_ball(&mk(c.window_top(3) * r(3, 4)), &c), Some(3));
        assert_eq!(classify_ball(&mk(c.window_top(3) * r(1, 3)), &c), None);
    }

    #[test]
    fn windows_are_disjoint() {
        let c = demo();
        for n in 1..6 {
            assert!(c.beta.clone() * c.window_top(n) > c.window_top(n + 1));
        }
    }

    #[test]
    fn high_classes_are_empty_with_certified_constants() {
        let b = ball(r(3, 4), zero3(), r(1, 10));
        let c = setup_constants(&b, &r(1, 2), &int(1), Mode::Certified).unwrap();
        let inner = ball(r(3, 4), zero3(), c.window_top(3));
        for k in 2..5 {
            assert!(candidate_class(&inner, 3, k, &c, 1000).unwrap().is_empty());
        }
    }

    /// Oracle: every primitive direction with q ≤ 3H_{n+1} in a box around
    /// the ball, filtered by tube contact and height.
    fn brute_class(b: &ProductBall, n: u32, c: &StrategyConstants) -> Vec<RationalDirection> {
        let top = int(3) * c.h(n + 1);
        let qmax = to_u64(&top.floor()).unwrap() as i64;
        let mut out = vec![];
        for q in 1..=qmax {
            let (x, y) = (arith::to_f64(b.x()), arith::to_f64(b.y()));
            let qf = q as f64;
            for rr in (qf * (y - 0.5)).floor() as i64..=(qf * (y + 0.5)).ceil() as i64 {
                for p in (qf * (x - 0.5)).floor() as i64..=(qf * (x + 0.5)).ceil() as i64 {
                    let v = RationalDirection { p, r: rr, q };
                    if !v.is_primitive() || delta_ball_intersects(b, &v, &c.epsilon).unwrap().is_empty() {
                        continue;
                    }
                    let h = height(b, &v).unwrap();
                    if c.h(n) <= h && h <= top {
                        out.push(v);
                    }
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn demo_class_matches_exhaustive_scan() {
        let c = demo();
        // a window-3 ball sitting on the tube core of (1, 1, 3)
        let b = ball(r(3, 4), [r(1, 3), r(1, 3), int(0)], c.window_top(3));
        let mut got = candidate_union(&b, 3, &c, 10_000).unwrap();
        got.sort();
        assert_eq!(got, brute_class(&b, 3, &c));
        assert!(!got.is_empty());
        for v in &got {
            assert!(int(v.q) <= int(3) * c.h(4));
        }
        let mut by_k: Vec<_> = (1..=3).flat_map(|k| candidate_class(&b, 3, k, &c, 10_000).unwrap()).collect();
        by_k.sort();
        by_k.dedup();
        assert!(by_k.iter().all(|v| got.contains(v)));
    }

    #[test]
    fn plane_selection_examples() {
        let c = demo();
        // nothing near a generic point at tiny scale
        let b = ball(r(3, 4), [r(2, 7) + r(1, 1000), r(3, 11) + r(1, 999), int(0)], c.window_top(2));
        assert!(select_plane(&b, 2, 1, &c, 10_000).unwrap().is_none());

        let v0 = RationalDirection { p: 1, r: 1, q: 2 };
        let p = plane_case_ii(&v0, &int(0)).unwrap();
        assert!(p.contains(&r(3, 4), &[r(1, 2), int(7), int(0)]));

        // v1 × v2 for (1,0,2), (0,1,2) is (−2,−2,1): −2x − 2y + 1 = 0
        let v1 = RationalDirection { p: 1, r: 0, q: 2 };
        let v2 = RationalDirection { p: 0, r: 1, q: 2 };
        assert_eq!(v1.cross(&v2), [-2, -2, 1]);
        let pl = plane_from_dual(&DualWitness { a: -2, b: -2, c: 1 }).unwrap();
        assert!(pl.contains(&r(3, 4), &[r(1, 4), r(1, 4), int(5)]));
    }

    #[test]
    fn family_is_legal_and_sized() {
        let c = demo();
        let mut st = StrategyState::new(c.clone()).with_budget(100_000);
        let (f0, rec0) = st.alice_move(0, &c.initial).unwrap();
        assert!(f0.is_empty() && rec0.acted);
        let b1 = ball(c.initial.lambda.clone(), c.initial.center.clone(), c.window_top(1));
        let (f1, rec1) = st.alice_move(1, &b1).unwrap();
        assert_eq!(rec1.n, Some(1));
        for (h, p) in f1.iter().zip(&rec1.planes) {
            assert_eq!(h.width, c.slab_width(1, p.k));
        }
        assert!(legal_alice_potential(&b1, &f1, &c.beta, &c.gamma).unwrap());
        // a gap ball gets nothing
        let gap = ball(c.initial.lambda.clone(), c.initial.center.clone(), c.window_top(1) * r(1, 3));
        let (fg, recg) = st.alice_move(2, &gap).unwrap();
        assert!(fg.is_empty() && recg.n.is_none());
    }

    #[test]
    fn skipping_a_window_is_reported() {
        let c = demo();
        let mut st = StrategyState::new(c.clone());
        st.alice_move(0, &c.initial).unwrap();
        let b2 = ball(c.initial.lambda.clone(), c.initial.center.clone(), c.window_top(2));
        assert!(matches!(st.alice_move(1, &b2), Err(Error::Invariant(_))));
    }

    #[test]
    fn radius_log_bound_holds_for_certified_constants() {
        let b = ball(r(3, 4), zero3(), r(1, 10));
        let c = setup_constants(&b, &r(1, 2), &int(1), Mode::Certified).unwrap();
        for n in [1u32, 5, 20, 40] {
            let top = c.window_top(n);
            for frac in [Q::one(), r(1, 3), r(1, 1000)] {
                assert!(check_radius_log_bound(&c, n, &(&top * &frac)).unwrap(), "n={n}");
            }
        }
    }
}
