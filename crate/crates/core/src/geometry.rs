//! Tubes around rational directions, dual witnesses, heights and the planes
//! Alice uses to cover them.
//!
//! A direction `v = (p, r, q)` with `q ≥ 1` has the tube
//!
//! ```text
//! Δ_λ(v, ε) = { (x, y, z) : |x − p/q − z(y − r/q)| < ε q^{−(1+λ)},
//!                           |y − r/q| < ε q^{−(2−λ)} }
//! ```
//!
//! whose core is the vertical line `{(p/q, r/q, z)}`. Letting `λ` vary gives
//! the set `Δ(v, ε)` in the four-dimensional parameter space.

use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, exp_sqrt, int, pow_real, rational_seq, rational_str, to_f64, CertInterval, Precision};
use crate::error::{Error, Result};
use crate::game::{HyperplaneNbhd, ProductBall};

type Q = BigRational;

/// Default cap on enumerated denominators.
pub const DEFAULT_Q_BUDGET: u64 = 1_000_000;

const CHECK_BITS: u32 = 192;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalDirection {
    pub p: i64,
    pub r: i64,
    pub q: i64,
}

impl RationalDirection {
    pub fn new(p: i64, r: i64, q: i64) -> Result<Self> {
        if q < 1 {
            return Err(Error::invalid(format!("direction needs q >= 1, got {q}")));
        }
        Ok(RationalDirection { p, r, q })
    }

    pub fn is_primitive(&self) -> bool {
        self.p.gcd(&self.r).gcd(&self.q) == 1
    }

    pub fn x_core(&self) -> Q {
        arith::ratio(self.p, self.q)
    }

    pub fn y_core(&self) -> Q {
        arith::ratio(self.r, self.q)
    }

    pub fn as_array(&self) -> [i64; 3] {
        [self.p, self.r, self.q]
    }

    pub fn scaled(&self, t: i64) -> Self {
        RationalDirection {
            p: self.p * t,
            r: self.r * t,
            q: self.q * t,
        }
    }

    pub fn cross(&self, other: &Self) -> [i128; 3] {
        let (a, b) = (self.as_array().map(i128::from), other.as_array().map(i128::from));
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }
}

impl Serialize for RationalDirection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalDirection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [p, r, q] = <[i64; 3]>::deserialize(d)?;
        RationalDirection::new(p, r, q).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualWitness {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl DualWitness {
    pub fn annihilates(&self, v: &RationalDirection) -> bool {
        i128::from(self.a) * i128::from(v.p)
            + i128::from(self.b) * i128::from(v.r)
            + i128::from(self.c) * i128::from(v.q)
            == 0
    }

    /// `max(|a|, |b + z a|)`
    pub fn objective(&self, z: &Q) -> Q {
        let a = int(self.a);
        let t = (int(self.b) + z * &a).abs();
        a.abs().max(t)
    }
}

impl Serialize for DualWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a, self.b, self.c].serialize(s)
    }
}

impl<'de> Deserialize<'de> for DualWitness {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c] = <[i64; 3]>::deserialize(d)?;
        Ok(DualWitness { a, b, c })
    }
}

/// Plane `⟨normal, (λ, x, y, z)⟩ + offset = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidancePlane {
    #[serde(with = "rational_seq")]
    pub normal: [Q; 4],
    #[serde(with = "rational_str")]
    pub offset: Q,
}

impl AvoidancePlane {
    pub fn eval(&self, lambda: &Q, p: &[Q; 3]) -> Q {
        &self.normal[0] * lambda
            + &self.normal[1] * &p[0]
            + &self.normal[2] * &p[1]
            + &self.normal[3] * &p[2]
            + &self.offset
    }

    pub fn contains(&self, lambda: &Q, p: &[Q; 3]) -> bool {
        self.eval(lambda, p).is_zero()
    }

    pub fn neighbourhood(&self, width: Q) -> Result<HyperplaneNbhd> {
        HyperplaneNbhd::new(self.normal.clone(), self.offset.clone(), width)
    }
}

/// `ε q^{−(1+λ)}` and `ε q^{−(2−λ)}`.
pub fn tube_thresholds(q: i64, lambda: &Q, eps: &Q, bits: u32) -> Result<(CertInterval, CertInterval)> {
    let qq = int(q);
    let tx = pow_real(&qq, &(-(Q::one() + lambda)), bits)?.scale(eps);
    let ty = pow_real(&qq, &(lambda - int(2)), bits)?.scale(eps);
    Ok((tx, ty))
}

/// `(x − p/q − z(y − r/q), y − r/q)`
fn tube_offsets(point: &[Q; 3], v: &RationalDirection) -> (Q, Q) {
    let dy = &point[1] - v.y_core();
    let f = &point[0] - v.x_core() - &point[2] * &dy;
    (f, dy)
}

/// Certified membership of `point` in `Δ_λ(v, ε)`.
pub fn delta_membership(lambda: &Q, point: &[Q; 3], v: &RationalDirection, eps: &Q) -> Result<bool> {
    if v.q < 1 || !eps.is_positive() {
        return Err(Error::invalid("tube needs q >= 1 and epsilon > 0"));
    }
    let (f, dy) = tube_offsets(point, v);
    let qq = int(v.q);
    let prec = Precision::default();
    let y_ok = prec.lt("tube y-bound", &dy.abs(), |bits| {
        Ok(pow_real(&qq, &(lambda - int(2)), bits)?.scale(eps))
    })?;
    if !y_ok {
        return Ok(false);
    }
    prec.lt("tube x-bound", &f.abs(), |bits| {
        Ok(pow_real(&qq, &(-(Q::one() + lambda)), bits)?.scale(eps))
    })
}

/// Three-valued test of `Δ(v, ε) ∩ Ω ≠ ∅`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intersection {
    Empty,
    NonEmpty {
        #[serde(with = "rational_str")]
        lambda: Q,
        #[serde(with = "rational_seq")]
        point: [Q; 3],
    },
    Unknown,
}

impl Intersection {
    pub fn is_empty(&self) -> bool {
        matches!(self, Intersection::Empty)
    }
}

fn is_witness(ball: &ProductBall, lambda: &Q, point: &[Q; 3], v: &RationalDirection, eps: &Q) -> bool {
    ball.contains_point(lambda, point) && matches!(delta_membership(lambda, point, v, eps), Ok(true))
}

/// Empty is certified; NonEmpty carries a point of the intersection.
pub fn delta_ball_intersects(ball: &ProductBall, v: &RationalDirection, eps: &Q) -> Result<Intersection> {
    if v.q < 1 || !eps.is_positive() {
        return Err(Error::invalid("tube needs q >= 1 and epsilon > 0"));
    }
    let rho = &ball.radius;
    let (lmin, lmax) = ball.lambda_range();
    let (f0, dy0) = tube_offsets(&ball.center, v);
    let z0 = ball.z();

    // Cheap exact pass: both tube radii are at most ε/q.
    let coarse = eps / int(v.q);
    if &coarse + rho <= dy0.abs() {
        return Ok(Intersection::Empty);
    }
    let slope_hi = CertInterval::point(Q::one() + z0 * z0, 32).sqrt()?.hi().clone();
    if &coarse * (Q::one() + rho) + rho * &slope_hi <= f0.abs() {
        return Ok(Intersection::Empty);
    }

    // Largest tube radii over the λ-interval.
    let bits = CHECK_BITS;
    let tx = tube_thresholds(v.q, &lmin, eps, bits)?.0;
    let ty = tube_thresholds(v.q, &lmax, eps, bits)?.1;
    if ty.add_rational(rho).hi() <= &dy0.abs() {
        return Ok(Intersection::Empty);
    }
    // Inside the ball and the y-slab, |f − f0| ≤ ρ√(1+z0²) + ρ·Ty.
    let slope = CertInterval::point(Q::one() + z0 * z0, bits).sqrt()?.scale(rho);
    let reach = tx.add(&ty.scale(rho)).add(&slope);
    if reach.hi() <= &f0.abs() {
        return Ok(Intersection::Empty);
    }

    let lambdas = [ball.lambda.clone(), lmin, lmax];
    let core = [v.x_core(), v.y_core(), z0.clone()];
    if ball.contains_point(&ball.lambda, &core) {
        return Ok(Intersection::NonEmpty {
            lambda: ball.lambda.clone(),
            point: core,
        });
    }
    for l in &lambdas {
        if is_witness(ball, l, &ball.center, v, eps) {
            return Ok(Intersection::NonEmpty {
                lambda: l.clone(),
                point: ball.center.clone(),
            });
        }
    }
    // Step from the center toward the core as far as the ball allows.
    let d2 = ball.spatial_dist_sq(&core);
    let dist_hi = CertInterval::point(d2, 64).sqrt()?.hi().clone();
    for frac in [Q::one(), arith::ratio(1, 2)] {
        let t = rho * &frac / &dist_hi;
        let p: [Q; 3] = std::array::from_fn(|i| &ball.center[i] + &t * (&core[i] - &ball.center[i]));
        for l in &lambdas {
            if is_witness(ball, l, &p, v, eps) {
                return Ok(Intersection::NonEmpty {
                    lambda: l.clone(),
                    point: p,
                });
            }
        }
    }
    Ok(Intersection::Unknown)
}

/// `floor` of a rational as i128.
fn floor_i128(x: &Q) -> i128 {
    x.floor().to_integer().to_i128().expect("value out of i128 range")
}

/// Modular inverse of `a` mod `m` (`gcd(a, m) = 1`, `m ≥ 1`).
fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd.abs(), 1);
    (e.x * e.gcd).rem_euclid(m)
}

/// Upper/lower enclosures of `e^{√ρ} q^λ` and `e^{√ρ} q^{1−λ}`.
fn witness_bounds(ball: &ProductBall, q: i64, bits: u32) -> Result<(CertInterval, CertInterval)> {
    let e = exp_sqrt(&ball.radius, bits)?;
    let qq = int(q);
    let a = pow_real(&qq, &ball.lambda, bits)?.mul(&e);
    let b = pow_real(&qq, &(Q::one() - &ball.lambda), bits)?.mul(&e);
    Ok((a, b))
}

/// Certified `x ≤ bound`, using a cached enclosure first.
fn le_bound(x: &Q, cached: &CertInterval, what: &str, ball: &ProductBall, q: i64, first: bool) -> Result<bool> {
    if x <= cached.lo() {
        return Ok(true);
    }
    if x > cached.hi() {
        return Ok(false);
    }
    Precision::default().le(what, x, |bits| {
        let (a, b) = witness_bounds(ball, q, bits)?;
        Ok(if first { a } else { b })
    })
}

/// All `(a, b, c)` with `(a, b) ≠ 0`, `ap + br + cq = 0`,
/// `|a| ≤ e^{√ρ} q^λ` and `|b + z a| ≤ e^{√ρ} q^{1−λ}`, using the ball's
/// center `λ` and `z`.
///
/// Minkowski's theorem guarantees the list is nonempty; an empty result
/// means a bug and panics.
pub fn enumerate_dual_witnesses(ball: &ProductBall, v: &RationalDirection) -> Result<Vec<DualWitness>> {
    if !v.is_primitive() || v.q < 1 {
        return Err(Error::invalid(format!("direction {:?} is not primitive", v.as_array())));
    }
    let (abound, bbound) = witness_bounds(ball, v.q, CHECK_BITS)?;
    let (p, r, q) = (v.p, v.r, v.q);
    let z = ball.z();
    // q | ap + br forces g | a with g = gcd(r, q), since gcd(p, g) = 1.
    let g = r.gcd(&q);
    let (r1, q1) = (r / g, q / g);
    let inv = mod_inverse(i128::from(r1).rem_euclid(i128::from(q1)), i128::from(q1));
    let amax = floor_i128(abound.hi()) / i128::from(g) * i128::from(g);
    if amax >= 1 << 50 {
        return Err(Error::BudgetExceeded {
            requested: v.q.to_string(),
            budget: 1 << 50,
        });
    }
    let amax = amax as i64;
    let a_sure = floor_i128(abound.lo()).min(i128::from(amax)) as i64;
    let (zf, bf) = (to_f64(z), to_f64(bbound.hi()));
    let (b_lo, b_hi) = (to_f64(bbound.lo()) * (1.0 - 1e-12), to_f64(bbound.hi()) * (1.0 + 1e-12));

    let mut out = Vec::new();
    let mut a = -amax;
    // b ≡ −(a/g) p r1⁻¹ (mod q1), advanced by `step` each time a grows by g
    let step = ((-i128::from(p % q1) * inv).rem_euclid(i128::from(q1))) as i64;
    let mut residue = (i128::from((a / g) % q1) * i128::from(step)).rem_euclid(i128::from(q1)) as i64;
    while a <= amax {
        if a.abs() <= a_sure || le_bound(&int(a.abs()), &abound, "dual |a| bound", ball, v.q, true)? {
            let centre = -zf * a as f64;
            let lo = (centre - bf).floor() as i64 - 2;
            let hi = (centre + bf).ceil() as i64 + 2;
            let mut b = lo + (residue - lo).rem_euclid(q1);
            while b <= hi {
                if a != 0 || b != 0 {
                    // f64 screen with a margin far above its rounding error,
                    // exact comparison only near the bound
                    let tf = (b as f64 + zf * a as f64).abs();
                    let margin = 1e-9 * (b.abs() as f64 + (zf * a as f64).abs() + 1.0);
                    let small = b.abs() < 1 << 50;
                    let keep = if small && tf + margin < b_lo {
                        true
                    } else if small && tf - margin > b_hi {
                        false
                    } else {
                        let t = (int(b) + z * int(a)).abs();
                        le_bound(&t, &bbound, "dual |b+za| bound", ball, v.q, false)?
                    };
                    if keep {
                        let num = i128::from(a) * i128::from(p) + i128::from(b) * i128::from(r);
                        debug_assert_eq!(num % i128::from(q), 0);
                        out.push(DualWitness {
                            a,
                            b,
                            c: (-num / i128::from(q)) as i64,
                        });
                    }
                }
                b += q1;
            }
        }
        residue += step;
        if residue >= q1 {
            residue -= q1;
        }
        a += g;
    }
    if out.is_empty() {
        return Err(Error::Invariant(format!(
            "no dual witness for direction {:?} in ball {:?}; the Minkowski bound guarantees one",
            v.as_array(),
            ball
        )));
    }
    Ok(out)
}

fn tie_key(w: &DualWitness, z: &Q) -> (Q, i64, i64, Reverse<i64>, Reverse<i64>) {
    (w.objective(z), w.a.abs(), w.b.abs(), Reverse(w.a), Reverse(w.b))
}

/// The witness minimising `max(|a|, |b + z a|)`, ties broken by `|a|`,
/// `|b|`, then positive signs first.
pub fn minimal_dual(ball: &ProductBall, v: &RationalDirection) -> Result<DualWitness> {
    let z = ball.z();
    let ws = enumerate_dual_witnesses(ball, v)?;
    // dividing out a common factor lowers the objective, so the minimiser
    // is primitive
    Ok(ws
        .into_iter()
        .filter(|w| w.a.gcd(&w.b).gcd(&w.c) == 1)
        .min_by_key(|w| tie_key(w, z))
        .expect("nonempty by construction"))
}

/// `H = q · max(|a|, |b + z a|)` for the minimal witness.
pub fn height(ball: &ProductBall, v: &RationalDirection) -> Result<Q> {
    Ok(height_with_witness(ball, v)?.0)
}

pub fn height_with_witness(ball: &ProductBall, v: &RationalDirection) -> Result<(Q, DualWitness)> {
    let w = minimal_dual(ball, v)?;
    Ok((int(v.q) * w.objective(ball.z()), w))
}

/// `a x + b y + c = 0`
pub fn plane_from_dual(w: &DualWitness) -> Result<AvoidancePlane> {
    if w.a == 0 && w.b == 0 {
        return Err(Error::invalid("dual witness has a = b = 0"));
    }
    Ok(AvoidancePlane {
        normal: [int(0), int(w.a), int(w.b), int(0)],
        offset: int(w.c),
    })
}

/// `x − p₀/q₀ − z(y − r₀/q₀) = 0` with `z` frozen at the ball's center.
pub fn plane_case_ii(v0: &RationalDirection, z_center: &Q) -> Result<AvoidancePlane> {
    if v0.q < 1 {
        return Err(Error::invalid("direction needs q >= 1"));
    }
    Ok(AvoidancePlane {
        normal: [int(0), int(1), -z_center.clone(), int(0)],
        offset: z_center * v0.y_core() - v0.x_core(),
    })
}

/// Integer window `[floor(q·lo) − 2, ceil(q·hi) + 2]` computed in `f64`;
/// the margin absorbs rounding.
fn window(q: i64, lo: f64, hi: f64) -> (i64, i64) {
    let qf = q as f64;
    ((qf * lo).floor() as i64 - 2, (qf * hi).ceil() as i64 + 2)
}

/// Primitive directions with `q_lo ≤ q ≤ q_hi` whose tube is not certified
/// disjoint from `ball`, ordered by `(q, r, p)`.
pub fn candidate_directions(
    ball: &ProductBall,
    q_lo: &Q,
    q_hi: &Q,
    eps: &Q,
    budget: u64,
) -> Result<Vec<RationalDirection>> {
    if q_lo > q_hi {
        return Err(Error::invalid("candidate range has q_lo > q_hi"));
    }
    let lo = q_lo.ceil().to_integer().max(BigInt::one());
    let hi = q_hi.floor().to_integer();
    if hi < lo {
        return Ok(Vec::new());
    }
    if hi > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            requested: hi.to_string(),
            budget,
        });
    }
    let (lo, hi) = (lo.to_i64().unwrap(), hi.to_i64().unwrap());

    let (x0, y0, z0) = (to_f64(ball.x()), to_f64(ball.y()), to_f64(ball.z()));
    let rho = to_f64(&ball.radius);
    let epsf = to_f64(eps);
    let per_q: Vec<Result<Vec<RationalDirection>>> = (lo..=hi)
        .into_par_iter()
        .map(|q| {
            // Both tube radii are at most ε/q.
            let t = epsf / q as f64;
            let (rlo, rhi) = window(q, y0 - rho - t, y0 + rho + t);
            let spread = rho + (z0.abs() + rho) * t + t;
            let (plo, phi) = window(q, x0 - spread, x0 + spread);
            let mut found = Vec::new();
            for r in rlo..=rhi {
                for p in plo..=phi {
                    let v = RationalDirection { p, r, q };
                    if !v.is_primitive() {
                        continue;
                    }
                    if !delta_ball_intersects(ball, &v, eps)?.is_empty() {
                        found.push(v);
                    }
                }
            }
            Ok(found)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_q {
        out.extend(r?);
    }
    Ok(out)
}

/// Smallest-`q` primitive `v` with `point ∈ Δ_λ(v, ε)`, searching `q ≤ q_max`.
pub fn covering_direction(lambda: &Q, point: &[Q; 3], q_max: u64, eps: &Q) -> Result<Option<RationalDirection>> {
    let (x, y, z) = (to_f64(&point[0]), to_f64(&point[1]), to_f64(&point[2]));
    let epsf = to_f64(eps);
    let lf = to_f64(lambda);
    // loose enough to absorb every f64 rounding; the exact test decides
    let slack = 1e-9 * (1.0 + x.abs() + z.abs() * (1.0 + y.abs()));
    for q in 1..=q_max as i64 {
        let qf = q as f64;
        let t = epsf / qf;
        let (bx, by) = (epsf * qf.powf(-(1.0 + lf)) * 1.01 + slack, epsf * qf.powf(-(2.0 - lf)) * 1.01 + slack);
        let (rlo, rhi) = window(q, y - t, y + t);
        for r in rlo..=rhi {
            let yr = y - r as f64 / qf;
            if yr.abs() > by {
                continue;
            }
            let centre = x - z * yr;
            let (plo, phi) = window(q, centre - t, centre + t);
            for p in plo..=phi {
                if (centre - p as f64 / qf).abs() > bx {
                    continue;
                }
                let v = RationalDirection { p, r, q };
                if v.is_primitive() && delta_membership(lambda, point, &v, eps)? {
                    return Ok(Some(v));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio as r;
    use proptest::prelude::*;

    fn dir(p: i64, r: i64, q: i64) -> RationalDirection {
        RationalDirection::new(p, r, q).unwrap()
    }

    fn ball(l: Q, c: [Q; 3], rad: Q) -> ProductBall {
        ProductBall::new(l, c, rad).unwrap()
    }

    #[test]
    fn core_points_are_members() {
        let v = dir(3, -2, 7);
        for z in [int(0), r(5, 3), int(-40)] {
            let pt = [v.x_core(), v.y_core(), z];
            assert!(delta_membership(&r(3, 4), &pt, &v, &r(1, 1_000_000)).unwrap());
        }
    }

    #[test]
    fn boundary_is_excluded() {
        // q = 16, λ = 3/4: ε / q^{5/4} = ε/32 exactly
        let v = dir(0, 0, 16);
        let eps = r(1, 10);
        let pt = [int(0), &eps / int(32), int(0)];
        assert!(!delta_membership(&r(3, 4), &pt, &v, &eps).unwrap());
        let inside = [int(0), &eps / int(33), int(0)];
        assert!(delta_membership(&r(3, 4), &inside, &v, &eps).unwrap());
    }

    #[test]
    fn membership_example() {
        // thresholds ε/2^{7/4} ≈ 0.0297 and ε/2^{5/4} ≈ 0.0420
        let v = dir(0, 1, 2);
        let pt = [r(1, 100), r(51, 100), r(1, 5)];
        assert!(delta_membership(&r(3, 4), &pt, &v, &r(1, 10)).unwrap());
        // independent check in f64 with generous margins
        let (f, dy) = (0.01 - 0.2 * 0.01_f64, 0.01_f64);
        assert!(f < 0.1 / 2f64.powf(1.75) && dy < 0.1 / 2f64.powf(1.25));
    }

    #[test]
    fn intersection_examples() {
        let eps = r(1, 10);
        let v = dir(1, 1, 2);
        let b = ball(r(3, 4), [r(1, 2), r(1, 2), int(0)], r(1, 100));
        assert!(matches!(
            delta_ball_intersects(&b, &v, &eps).unwrap(),
            Intersection::NonEmpty { .. }
        ));
        // (0,1,2) has core (0, 1/2, z); the ball sits at x = 1/2, far from it
        let v = dir(0, 1, 2);
        assert_eq!(delta_ball_intersects(&b, &v, &eps).unwrap(), Intersection::Empty);
        // y separation
        let far = ball(r(3, 4), [int(0), r(9, 10), int(0)], r(1, 100));
        assert_eq!(delta_ball_intersects(&far, &v, &eps).unwrap(), Intersection::Empty);
    }

    #[test]
    fn nonempty_witness_is_genuine() {
        let eps = r(1, 10);
        let v = dir(1, 1, 3);
        let b = ball(r(3, 4), [r(1, 3) + r(1, 50), r(1, 3), r(1, 2)], r(1, 100));
        match delta_ball_intersects(&b, &v, &eps).unwrap() {
            Intersection::NonEmpty { lambda, point } => {
                assert!(b.contains_point(&lambda, &point));
                assert!(delta_membership(&lambda, &point, &v, &eps).unwrap());
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    /// Brute-force oracle: scan a box of (a, b) with f64 bounds widened by
    /// one, then filter with exact divisibility and a high-precision check.
    fn brute_witnesses(b: &ProductBall, v: &RationalDirection) -> Vec<DualWitness> {
        let lam = to_f64(&b.lambda);
        let e = to_f64(&b.radius).sqrt().exp();
        let amax = (e * (v.q as f64).powf(lam)).ceil() as i64 + 1;
        let bmax = (e * (v.q as f64).powf(1.0 - lam)).ceil() as i64 + 1;
        let z = b.z();
        let zf = to_f64(z);
        let (ab, bb) = witness_bounds(b, v.q, 400).unwrap();
        let mut out = vec![];
        for a in -amax..=amax {
            let centre = -(zf * a as f64);
            for bv in (centre.floor() as i64 - bmax)..=(centre.ceil() as i64 + bmax) {
                if (a, bv) == (0, 0) || (a * v.p + bv * v.r) % v.q != 0 {
                    continue;
                }
                let t = (int(bv) + z * int(a)).abs();
                if int(a).abs() <= *ab.lo() && t <= *bb.lo() {
                    out.push(DualWitness {
                        a,
                        b: bv,
                        c: -(a * v.p + bv * v.r) / v.q,
                    });
                }
            }
        }
        out
    }

    #[test]
    fn witness_examples() {
        let b = ball(r(3, 4), [int(0), int(0), int(0)], r(1, 100));
        let ws = enumerate_dual_witnesses(&b, &dir(0, 0, 1)).unwrap();
        for w in [(0, 1, 0), (0, -1, 0), (1, 0, 0), (-1, 0, 0)] {
            assert!(ws.contains(&DualWitness { a: w.0, b: w.1, c: w.2 }));
        }
        let ws = enumerate_dual_witnesses(&b, &dir(1, 0, 2)).unwrap();
        let mut got: Vec<_> = ws.iter().map(|w| (w.a, w.b, w.c)).collect();
        got.sort();
        assert_eq!(got, vec![(0, -1, 0), (0, 1, 0)]);
        let mut oracle = brute_witnesses(&b, &dir(1, 0, 2));
        oracle.sort_by_key(|w| (w.a, w.b));
        assert_eq!(oracle.len(), 2);
    }

    #[test]
    fn minimal_dual_and_height_examples() {
        let b = ball(r(3, 4), [int(0), int(0), int(0)], r(1, 100));
        let w = minimal_dual(&b, &dir(0, 0, 1)).unwrap();
        assert_eq!((w.a, w.b, w.c), (0, 1, 0));
        assert_eq!(height(&b, &dir(0, 0, 1)).unwrap(), int(1));
        let w = minimal_dual(&b, &dir(1, 0, 2)).unwrap();
        assert_eq!((w.a, w.b, w.c), (0, 1, 0));
        let h = height(&b, &dir(1, 0, 2)).unwrap();
        assert_eq!(h, int(2));
        let cap = pow_real(&int(2), &r(7, 4), 64).unwrap();
        assert!(&h <= cap.lo());
        // rational z gives a rational (non-integer) height
        let bz = ball(r(3, 4), [int(0), int(0), r(1, 3)], r(1, 100));
        let h = height(&bz, &dir(1, 1, 5)).unwrap();
        assert!(h.is_positive());
    }

    #[test]
    fn plane_examples() {
        let origin = [int(0), int(0), int(0)];
        let p = plane_from_dual(&DualWitness { a: 1, b: 0, c: 0 }).unwrap();
        assert!(p.contains(&r(3, 4), &origin));
        let p = plane_from_dual(&DualWitness { a: 0, b: 1, c: -1 }).unwrap();
        assert!(p.contains(&r(3, 4), &[int(5), int(1), int(7)]));
        let p = plane_from_dual(&DualWitness { a: 2, b: -3, c: 5 }).unwrap();
        assert!(p.contains(&r(2, 3), &[int(-1), int(1), int(9)]));
        assert!(plane_from_dual(&DualWitness { a: 0, b: 0, c: 1 }).is_err());

        let p = plane_case_ii(&dir(0, 0, 1), &int(0)).unwrap();
        assert_eq!(p.normal, [int(0), int(1), int(0), int(0)]);
        assert!(p.offset.is_zero());
        let p = plane_case_ii(&dir(1, 1, 2), &int(0)).unwrap();
        assert!(p.contains(&r(3, 4), &[r(1, 2), int(8), int(0)]));
        let p = plane_case_ii(&dir(1, 1, 2), &int(1)).unwrap();
        assert_eq!(p.normal, [int(0), int(1), int(-1), int(0)]);
        assert!(p.offset.is_zero());
    }

    #[test]
    fn candidate_examples() {
        let eps = r(1, 1000);
        let b = ball(r(3, 4), [r(1, 3), r(1, 5), int(0)], r(1, 100));
        // rationals r/q with q ∈ {2,3} are at distance ≥ 1/15 from 1/5
        assert!(candidate_directions(&b, &int(2), &int(3), &eps, 1000)
            .unwrap()
            .is_empty());
        let b = ball(r(3, 4), [r(1, 2), r(1, 2), int(0)], r(1, 100));
        let c = candidate_directions(&b, &int(2), &int(2), &eps, 1000).unwrap();
        assert!(c.contains(&dir(1, 1, 2)));
        assert!(matches!(
            candidate_directions(&b, &int(1), &int(2000), &eps, 1000),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn candidates_match_exhaustive_scan() {
        let eps = r(1, 50);
        let b = ball(r(3, 4), [r(2, 7), r(3, 11), r(1, 2)], r(1, 40));
        let got = candidate_directions(&b, &int(1), &int(30), &eps, 1000).unwrap();
        for v in &got {
            assert!(v.is_primitive());
            assert!(!delta_ball_intersects(&b, v, &eps).unwrap().is_empty());
        }
        // oracle: every primitive (p, r, q) in a generous box
        let mut oracle = vec![];
        for q in 1..=30i64 {
            for rr in -q..=2 * q {
                for p in -q..=2 * q {
                    let v = dir(p, rr, q);
                    if v.is_primitive() && !delta_ball_intersects(&b, &v, &eps).unwrap().is_empty() {
                        oracle.push(v);
                    }
                }
            }
        }
        let mut g = got.clone();
        g.sort();
        oracle.sort();
        assert_eq!(g, oracle);
    }

    #[test]
    fn covering_finds_smallest_denominator() {
        let eps = r(1, 100);
        let pt = [r(2, 5), r(1, 5), int(3)];
        let v = covering_direction(&r(3, 4), &pt, 100, &eps).unwrap().unwrap();
        assert_eq!(v, dir(2, 1, 5));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]
        #[test]
        fn covering_matches_exhaustive_scan(
            xn in -60i64..60, yn in -60i64..60, zn in -90i64..90,
            den in 30i64..60, ln in 51i64..99, en in 1i64..40,
        ) {
            let pt = [r(xn, den), r(yn, den), r(zn, 30)];
            let (lam, eps) = (r(ln, 100), r(en, 100));
            let got = covering_direction(&lam, &pt, 12, &eps).unwrap();
            // |x|, |y| <= 2 and |z| <= 3, so every hit has |r| <= 3q, |p| <= 7q
            let mut want = None;
            'outer: for q in 1..=12i64 {
                let coarse = &eps / int(q);
                for rr in -3 * q..=3 * q {
                    let dy = &pt[1] - r(rr, q);
                    if dy.abs() >= coarse {
                        continue;
                    }
                    for p in -7 * q..=7 * q {
                        let f = &pt[0] - r(p, q) - &pt[2] * &dy;
                        if f.abs() >= coarse {
                            continue;
                        }
                        let v = dir(p, rr, q);
                        if v.is_primitive() && delta_membership(&lam, &pt, &v, &eps).unwrap() {
                            want = Some(q);
                            break 'outer;
                        }
                    }
                }
            }
            prop_assert_eq!(got.map(|v| v.q), want);
            if let Some(v) = got {
                prop_assert!(delta_membership(&lam, &pt, &v, &eps).unwrap());
            }
        }
    }

    fn arb_case(qmax: i64) -> impl Strategy<Value = (ProductBall, RationalDirection)> {
        (
            1i64..=qmax,
            any::<i64>(),
            any::<i64>(),
            51i64..99,
            -40i64..40,
            1i64..=25,
        )
            .prop_filter_map("primitive", |(q, p, rr, lam, z, rho)| {
                let v = RationalDirection {
                    p: p.rem_euclid(3 * q) - q,
                    r: rr.rem_euclid(3 * q) - q,
                    q,
                };
                if !v.is_primitive() {
                    return None;
                }
                let b = ProductBall::new(r(lam, 100), [int(0), int(0), r(z, 7)], r(rho, 100)).ok()?;
                Some((b, v))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn witnesses_nonempty_and_heights_bounded((b, v) in arb_case(10_000)) {
            let ws = enumerate_dual_witnesses(&b, &v).unwrap();
            prop_assert!(!ws.is_empty());
            for w in &ws {
                prop_assert!(w.annihilates(&v));
                prop_assert!((w.a, w.b) != (0, 0));
            }
            let h = height(&b, &v).unwrap();
            prop_assert!(h >= int(v.q));
            let cap = pow_real(&int(v.q), &(Q::one() + &b.lambda), 128).unwrap();
            prop_assert!(&h <= cap.hi());
        }

        #[test]
        fn minimal_dual_matches_brute_force((b, v) in arb_case(200)) {
            let w = minimal_dual(&b, &v).unwrap();
            let z = b.z().clone();
            let oracle = brute_witnesses(&b, &v)
                .into_iter()
                .min_by_key(|w| tie_key(w, &z))
                .unwrap();
            prop_assert_eq!(w, oracle);
        }

        #[test]
        fn scaled_direction_tube_is_smaller(
            p in -20i64..20, rr in -20i64..20, q in 1i64..20, t in 2i64..5,
            dx in -100i64..100, dy in -100i64..100, z in -5i64..5,
        ) {
            let v = RationalDirection { p, r: rr, q };
            let eps = r(1, 10);
            let pt = [v.x_core() + r(dx, 10_000), v.y_core() + r(dy, 10_000), int(z)];
            if delta_membership(&r(3, 4), &pt, &v.scaled(t), &eps).unwrap() {
                prop_assert!(delta_membership(&r(3, 4), &pt, &v, &eps).unwrap());
            }
        }

        #[test]
        fn plane_zero_set_is_exact(a in -9i64..9, bb in -9i64..9, c in -9i64..9,
                                   x in -50i64..50, y in -50i64..50, lam in 51i64..99) {
            prop_assume!((a, bb) != (0, 0));
            let pl = plane_from_dual(&DualWitness { a, b: bb, c }).unwrap();
            let pt = [r(x, 7), r(y, 7), int(3)];
            let on = int(a) * &pt[0] + int(bb) * &pt[1] + int(c);
            prop_assert_eq!(pl.contains(&r(lam, 100), &pt), on.is_zero());
        }
    }
}
