//! Balls, hyperplane neighbourhoods, move legality and the game loop.
//!
//! Points of the parameter space are `(λ, x, y, z)`. Distances use the
//! product metric `max(|Δλ|, ‖Δ(x,y,z)‖₂)`, so a ball is an interval in `λ`
//! times a Euclidean ball in space, both with the same radius.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, format_rational, pow_real, rational_seq, rational_str, CertInterval, Precision};
use crate::error::{Error, Result};

type Q = BigRational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductBall {
    #[serde(with = "rational_str")]
    pub lambda: Q,
    #[serde(with = "rational_seq")]
    pub center: [Q; 3],
    #[serde(with = "rational_str")]
    pub radius: Q,
}

impl ProductBall {
    pub fn new(lambda: Q, center: [Q; 3], radius: Q) -> Result<Self> {
        if !radius.is_positive() {
            return Err(Error::invalid(format!(
                "ball radius must be positive, got {}",
                format_rational(&radius)
            )));
        }
        Ok(ProductBall {
            lambda,
            center,
            radius,
        })
    }

    pub fn x(&self) -> &Q {
        &self.center[0]
    }
    pub fn y(&self) -> &Q {
        &self.center[1]
    }
    pub fn z(&self) -> &Q {
        &self.center[2]
    }

    /// `[λ-ρ, λ+ρ]`
    pub fn lambda_range(&self) -> (Q, Q) {
        (&self.lambda - &self.radius, &self.lambda + &self.radius)
    }

    /// Whether the λ-interval lies inside the open interval `(1/2, 1)`.
    pub fn lambda_admissible(&self) -> bool {
        let (lo, hi) = self.lambda_range();
        lo > arith::ratio(1, 2) && hi < Q::one()
    }

    pub fn spatial_dist_sq(&self, p: &[Q; 3]) -> Q {
        dist_sq(&self.center, p)
    }

    /// Exact product-metric containment of a point.
    pub fn contains_point(&self, lambda: &Q, p: &[Q; 3]) -> bool {
        (lambda - &self.lambda).abs() <= self.radius
            && self.spatial_dist_sq(p) <= &self.radius * &self.radius
    }

    /// `other ⊆ self`, via center distance `≤ ρ_self − ρ_other`.
    pub fn contains_ball(&self, other: &ProductBall) -> bool {
        let d = &self.radius - &other.radius;
        if d.is_negative() {
            return false;
        }
        (&other.lambda - &self.lambda).abs() <= d
            && dist_sq(&self.center, &other.center) <= &d * &d
    }
}

pub(crate) fn dist_sq(a: &[Q; 3], b: &[Q; 3]) -> Q {
    a.iter()
        .zip(b)
        .map(|(u, v)| {
            let d = u - v;
            &d * &d
        })
        .fold(Q::zero(), |acc, t| acc + t)
}

/// Open slab `{P : |⟨normal, P⟩ + offset| / ‖normal‖ < width}` with
/// `normal` in `(λ, x, y, z)` order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperplaneNbhd {
    #[serde(with = "rational_seq")]
    pub normal: [Q; 4],
    #[serde(with = "rational_str")]
    pub offset: Q,
    #[serde(with = "rational_str")]
    pub width: Q,
}

impl HyperplaneNbhd {
    pub fn new(normal: [Q; 4], offset: Q, width: Q) -> Result<Self> {
        if normal.iter().all(Zero::is_zero) {
            return Err(Error::invalid("hyperplane normal is zero"));
        }
        if !width.is_positive() {
            return Err(Error::invalid(format!(
                "neighbourhood width must be positive, got {}",
                format_rational(&width)
            )));
        }
        Ok(HyperplaneNbhd {
            normal,
            offset,
            width,
        })
    }

    /// Signed value `⟨normal, P⟩ + offset`.
    pub fn eval(&self, lambda: &Q, p: &[Q; 3]) -> Q {
        &self.normal[0] * lambda
            + &self.normal[1] * &p[0]
            + &self.normal[2] * &p[1]
            + &self.normal[3] * &p[2]
            + &self.offset
    }

    fn norm_sq(&self) -> Q {
        self.normal.iter().fold(Q::zero(), |acc, n| acc + n * n)
    }

    fn spatial_norm_sq(&self) -> Q {
        self.normal[1..].iter().fold(Q::zero(), |acc, n| acc + n * n)
    }

    /// Certified: the point lies in the open slab.
    pub fn contains_point(&self, lambda: &Q, p: &[Q; 3]) -> bool {
        let f = self.eval(lambda, p);
        &f * &f < &self.width * &self.width * self.norm_sq()
    }

    /// Certified: the closed ball misses the open slab.
    pub fn disjoint_from(&self, ball: &ProductBall) -> Result<bool> {
        let f0 = self.eval(&ball.lambda, &ball.center).abs();
        let lhs = f0 - &ball.radius * self.normal[0].abs();
        if self.normal[0].is_zero() {
            // |f0| >= (ρ + w)‖n‖, squared.
            let s = &ball.radius + &self.width;
            return Ok(!lhs.is_negative() && &s * &s * self.norm_sq() <= &lhs * &lhs);
        }
        let (n2, ns2) = (self.norm_sq(), self.spatial_norm_sq());
        Precision::default().decide("slab disjointness", |bits| {
            let rhs = CertInterval::point(ns2.clone(), bits)
                .sqrt()?
                .scale(&ball.radius)
                .add(&CertInterval::point(n2.clone(), bits).sqrt()?.scale(&self.width));
            Ok(match rhs.cmp_rational(&lhs) {
                Some(Ordering::Less) | Some(Ordering::Equal) => Some(true),
                Some(Ordering::Greater) => Some(false),
                None => None,
            })
        })
    }

    /// Certified: the closed ball lies inside the open slab.
    pub fn contains_ball(&self, ball: &ProductBall) -> Result<bool> {
        let f0 = self.eval(&ball.lambda, &ball.center).abs();
        let lhs = f0 + &ball.radius * self.normal[0].abs();
        if self.normal[0].is_zero() {
            let s = &self.width - &ball.radius;
            return Ok(s.is_positive() && &lhs * &lhs < &s * &s * self.norm_sq());
        }
        let (n2, ns2) = (self.norm_sq(), self.spatial_norm_sq());
        Precision::default().decide("slab containment", |bits| {
            // w‖n‖ − ρ‖n_s‖ > lhs
            let rhs = CertInterval::point(n2.clone(), bits)
                .sqrt()?
                .scale(&self.width)
                .sub(&CertInterval::point(ns2.clone(), bits).sqrt()?.scale(&ball.radius));
            Ok(match rhs.cmp_rational(&lhs) {
                Some(Ordering::Greater) => Some(true),
                Some(Ordering::Less) | Some(Ordering::Equal) => Some(false),
                None => None,
            })
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    AlphaBeta,
    Absolute,
    Potential,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameParams {
    pub kind: GameKind,
    #[serde(with = "opt_rational", default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Q>,
    #[serde(with = "rational_str")]
    pub beta: Q,
    #[serde(with = "rational_str")]
    pub gamma: Q,
}

mod opt_rational {
    use super::*;
    use serde::de::Error as _;

    pub fn serialize<S: serde::Serializer>(x: &Option<Q>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match x {
            Some(x) => s.serialize_some(&format_rational(x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<Q>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| arith::parse_rational(&s).map_err(D::Error::custom))
            .transpose()
    }
}

impl GameParams {
    pub fn potential(beta: Q, gamma: Q) -> Self {
        GameParams {
            kind: GameKind::Potential,
            alpha: None,
            beta,
            gamma,
        }
    }

    pub fn absolute(beta: Q) -> Self {
        GameParams {
            kind: GameKind::Absolute,
            alpha: None,
            beta,
            gamma: Q::one(),
        }
    }

    pub fn alpha_beta(alpha: Q, beta: Q) -> Self {
        GameParams {
            kind: GameKind::AlphaBeta,
            alpha: Some(alpha),
            beta,
            gamma: Q::one(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: &Q| {
            if v.is_positive() && v < &Q::one() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must lie in (0,1), got {}", format_rational(v))))
            }
        };
        unit("beta", &self.beta)?;
        match self.kind {
            GameKind::Potential => {
                if !self.gamma.is_positive() {
                    return Err(Error::invalid("gamma must be positive"));
                }
            }
            GameKind::Absolute => {
                if self.beta >= arith::ratio(1, 3) {
                    return Err(Error::invalid("absolute game needs beta < 1/3"));
                }
            }
            GameKind::AlphaBeta => {
                let a = self.alpha.as_ref().ok_or_else(|| Error::invalid("alpha missing"))?;
                unit("alpha", a)?;
            }
        }
        Ok(())
    }
}

/// `Σ width^γ ≤ (β·ρ)^γ`. Empty families are legal.
pub fn legal_alice_potential(
    ball: &ProductBall,
    family: &[HyperplaneNbhd],
    beta: &Q,
    gamma: &Q,
) -> Result<bool> {
    if let Some(bad) = family.iter().find(|h| !h.width.is_positive()) {
        return Err(Error::invalid(format!(
            "non-positive width {}",
            format_rational(&bad.width)
        )));
    }
    if family.is_empty() {
        return Ok(true);
    }
    let budget = beta * &ball.radius;
    if family.len() == 1 {
        return Ok(family[0].width <= budget);
    }
    if gamma.is_integer() && gamma.is_positive() {
        let g: u32 = gamma
            .to_integer()
            .try_into()
            .map_err(|_| Error::invalid("gamma too large"))?;
        let sum = family
            .iter()
            .fold(Q::zero(), |acc, h| acc + num_traits::Pow::pow(&h.width, g));
        return Ok(sum <= num_traits::Pow::pow(&budget, g));
    }
    Precision::default().decide("potential budget", |bits| {
        let mut sum = CertInterval::point(Q::zero(), bits);
        for h in family {
            sum = sum.add(&pow_real(&h.width, gamma, bits)?);
        }
        let cap = pow_real(&budget, gamma, bits)?;
        Ok(if sum.hi() <= cap.lo() {
            Some(true)
        } else if sum.lo() > cap.hi() {
            Some(false)
        } else {
            None
        })
    })
}

/// Bob's potential-game move: nested and `ρ_next ≥ β ρ_prev`.
pub fn legal_bob_potential(prev: &ProductBall, next: &ProductBall, beta: &Q) -> bool {
    prev.contains_ball(next) && next.radius >= beta * &prev.radius
}

/// Absolute game: Alice's width `≤ βρ`, Bob's next ball inside the current
/// one, outside the slab, with `ρ_next ≥ βρ`.
pub fn legal_absolute_moves(
    ball: &ProductBall,
    nbhd: &HyperplaneNbhd,
    next: &ProductBall,
    beta: &Q,
) -> Result<bool> {
    let budget = beta * &ball.radius;
    if nbhd.width > budget || !legal_bob_potential(ball, next, beta) {
        return Ok(false);
    }
    nbhd.disjoint_from(next)
}

pub fn legal_absolute_alice(ball: &ProductBall, nbhd: &HyperplaneNbhd, beta: &Q) -> bool {
    nbhd.width <= beta * &ball.radius
}

/// Ball in a metric space with exact distance comparisons.
pub trait MetricBall {
    fn radius(&self) -> &Q;
    /// `dist(center(self), center(other)) ≤ d`
    fn center_dist_le(&self, other: &Self, d: &Q) -> bool;
}

impl MetricBall for ProductBall {
    fn radius(&self) -> &Q {
        &self.radius
    }
    fn center_dist_le(&self, other: &Self, d: &Q) -> bool {
        !d.is_negative()
            && (&self.lambda - &other.lambda).abs() <= *d
            && dist_sq(&self.center, &other.center) <= d * d
    }
}

/// Closed Euclidean ball in `ℝᵈ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EuclideanBall {
    #[serde(with = "rational_seq")]
    pub center: Vec<Q>,
    #[serde(with = "rational_str")]
    pub radius: Q,
}

impl MetricBall for EuclideanBall {
    fn radius(&self) -> &Q {
        &self.radius
    }
    fn center_dist_le(&self, other: &Self, d: &Q) -> bool {
        if d.is_negative() || self.center.len() != other.center.len() {
            return false;
        }
        let s = self
            .center
            .iter()
            .zip(&other.center)
            .fold(Q::zero(), |acc, (a, b)| acc + (a - b) * (a - b));
        s <= d * d
    }
}

/// `(α,β)`-game move: `ρ_next = ratio·ρ_prev`, shift `≤ (1−ratio)ρ_prev`.
/// The same rule applies to both players with their own ratio.
pub fn legal_alpha_beta_moves<B: MetricBall>(prev: &B, next: &B, ratio: &Q) -> bool {
    *next.radius() == ratio * prev.radius()
        && prev.center_dist_le(next, &((Q::one() - ratio) * prev.radius()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AliceMove {
    Ball(ProductBall),
    Nbhd(HyperplaneNbhd),
    Family(Vec<HyperplaneNbhd>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Move {
    Ball(ProductBall),
    Nbhd(HyperplaneNbhd),
    Family(Vec<HyperplaneNbhd>),
}

impl From<AliceMove> for Move {
    fn from(m: AliceMove) -> Self {
        match m {
            AliceMove::Ball(b) => Move::Ball(b),
            AliceMove::Nbhd(h) => Move::Nbhd(h),
            AliceMove::Family(f) => Move::Family(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Player {
    Bob,
    Alice,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub round: usize,
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Move,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub params: GameParams,
    pub moves: Vec<MoveRecord>,
}

impl GameTranscript {
    pub fn new(params: GameParams) -> Self {
        GameTranscript {
            params,
            moves: Vec::new(),
        }
    }

    pub fn bob_balls(&self) -> impl Iterator<Item = &ProductBall> {
        self.moves.iter().filter_map(|m| match (&m.player, &m.mv) {
            (Player::Bob, Move::Ball(b)) => Some(b),
            _ => None,
        })
    }

    pub fn last_bob_ball(&self) -> Option<&ProductBall> {
        self.bob_balls().last()
    }

    pub fn bob_rounds(&self) -> usize {
        self.bob_balls().count()
    }

    /// Every neighbourhood Alice has chosen so far.
    pub fn alice_nbhds(&self) -> impl Iterator<Item = &HyperplaneNbhd> {
        self.moves
            .iter()
            .filter(|m| m.player == Player::Alice)
            .flat_map(|m| match &m.mv {
                Move::Nbhd(h) => std::slice::from_ref(h),
                Move::Family(f) => f.as_slice(),
                Move::Ball(_) => &[],
            })
    }
}

pub trait BobStrategy {
    /// Next ball, or `None` to stop the game.
    fn next_ball(&mut self, transcript: &GameTranscript) -> Result<Option<ProductBall>>;
}

pub trait AliceStrategy {
    /// Response to Bob's latest ball plus an optional decision record.
    fn respond(
        &mut self,
        transcript: &GameTranscript,
        ball: &ProductBall,
    ) -> Result<(AliceMove, Option<serde_json::Value>)>;
}

fn illegal(round: usize, player: &str, reason: impl Into<String>) -> Error {
    Error::IllegalMove {
        round,
        player: player.to_string(),
        reason: reason.into(),
    }
}

/// Plays up to `rounds` Bob moves, each followed by Alice's reply, checking
/// every move.
pub fn run_game(
    params: &GameParams,
    alice: &mut dyn AliceStrategy,
    bob: &mut dyn BobStrategy,
    rounds: usize,
) -> Result<GameTranscript> {
    params.validate()?;
    let mut t = GameTranscript::new(params.clone());
    let mut last_alice: Option<AliceMove> = None;
    for round in 0..rounds {
        let Some(ball) = bob.next_ball(&t)? else {
            break;
        };
        if let Some(prev) = t.last_bob_ball() {
            match (params.kind, &last_alice) {
                (GameKind::Potential, _) => {
                    if !prev.contains_ball(&ball) {
                        return Err(illegal(round, "bob", "ball is not nested in the previous ball"));
                    }
                    if !legal_bob_potential(prev, &ball, &params.beta) {
                        return Err(illegal(round, "bob", "radius below beta times previous radius"));
                    }
                }
                (GameKind::Absolute, Some(AliceMove::Nbhd(h))) => {
                    if !legal_absolute_moves(prev, h, &ball, &params.beta)? {
                        return Err(illegal(
                            round,
                            "bob",
                            "ball not nested, too small, or meets Alice's neighbourhood",
                        ));
                    }
                }
                (GameKind::AlphaBeta, Some(AliceMove::Ball(a))) => {
                    if !legal_alpha_beta_moves(a, &ball, &params.beta) {
                        return Err(illegal(round, "bob", "radius or shift violates the beta rule"));
                    }
                }
                _ => return Err(Error::Invariant("missing Alice move".into())),
            }
        }
        t.moves.push(MoveRecord {
            round,
            player: Player::Bob,
            mv: Move::Ball(ball.clone()),
            decision: None,
        });

        let (reply, decision) = alice.respond(&t, &ball)?;
        let ok = match (params.kind, &reply) {
            (GameKind::Potential, AliceMove::Family(f)) => {
                legal_alice_potential(&ball, f, &params.beta, &params.gamma)?
            }
            (GameKind::Absolute, AliceMove::Nbhd(h)) => legal_absolute_alice(&ball, h, &params.beta),
            (GameKind::AlphaBeta, AliceMove::Ball(a)) => {
                legal_alpha_beta_moves(&ball, a, params.alpha.as_ref().expect("validated"))
            }
            _ => return Err(illegal(round, "alice", "move type does not match the game")),
        };
        if !ok {
            return Err(illegal(round, "alice", "move exceeds the allowed size"));
        }
        t.moves.push(MoveRecord {
            round,
            player: Player::Alice,
            mv: reply.clone().into(),
            decision,
        });
        last_alice = Some(reply);
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjudication {
    AliceWins,
    BobWinsSoFar,
    Undetermined,
}

/// Finite-horizon verdict. `target_test` reports whether the final ball's
/// center is in the (truncated) target set, `None` if it cannot tell.
pub fn adjudicate_potential<F>(transcript: &GameTranscript, mut target_test: F) -> Result<Adjudication>
where
    F: FnMut(&ProductBall) -> Option<bool>,
{
    let Some(last) = transcript.last_bob_ball() else {
        return Ok(Adjudication::Undetermined);
    };
    for h in transcript.alice_nbhds() {
        if h.contains_ball(last)? {
            return Ok(Adjudication::AliceWins);
        }
    }
    match target_test(last) {
        Some(true) => Ok(Adjudication::AliceWins),
        Some(false) => {
            let outside = transcript
                .alice_nbhds()
                .all(|h| !h.contains_point(&last.lambda, &last.center));
            Ok(if outside {
                Adjudication::BobWinsSoFar
            } else {
                Adjudication::Undetermined
            })
        }
        None => Ok(Adjudication::Undetermined),
    }
}

pub fn q(n: i64, d: i64) -> Q {
    arith::ratio(n, d)
}

#[cfg(test)]
pub(crate) fn zero3() -> [Q; 3] {
    [arith::int(0), arith::int(0), arith::int(0)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio as r;
    use crate::arith::int;
    use proptest::prelude::*;

    fn ball(l: Q, c: [Q; 3], rad: Q) -> ProductBall {
        ProductBall::new(l, c, rad).unwrap()
    }

    fn unit_ball(rad: Q) -> ProductBall {
        ball(r(3, 4), zero3(), rad)
    }

    fn slab_x(offset: Q, width: Q) -> HyperplaneNbhd {
        HyperplaneNbhd::new([int(0), int(1), int(0), int(0)], offset, width).unwrap()
    }

    #[test]
    fn potential_budget_examples() {
        let b = unit_ball(r(1, 8));
        assert!(legal_alice_potential(&b, &[], &r(1, 2), &int(1)).unwrap());
        let one = [slab_x(int(0), r(1, 16))];
        assert!(legal_alice_potential(&b, &one, &r(1, 2), &int(1)).unwrap());
        let three: Vec<_> = [r(1, 20), r(1, 40), r(1, 80)]
            .into_iter()
            .map(|w| slab_x(int(0), w))
            .collect();
        assert!(!legal_alice_potential(&b, &three, &r(1, 2), &int(1)).unwrap());
        // fractional gamma goes through the certified path
        let two = [slab_x(int(0), r(1, 64)), slab_x(int(0), r(1, 64))];
        // 2 * (1/64)^(1/2) = 1/4 <= (1/16)^(1/2) = 1/4: equality, exact roots
        assert!(legal_alice_potential(&b, &two, &r(1, 2), &r(1, 2)).unwrap());
        let bad = HyperplaneNbhd {
            width: int(0),
            ..slab_x(int(0), int(1))
        };
        assert!(legal_alice_potential(&b, &[bad], &r(1, 2), &int(1)).is_err());
    }

    #[test]
    fn bob_potential_examples() {
        let b = unit_ball(r(1, 8));
        assert!(legal_bob_potential(&b, &b, &r(1, 2)));
        assert!(legal_bob_potential(&b, &unit_ball(r(1, 16)), &r(1, 2)));
        let shifted = ball(r(3, 4), [r(1, 8), int(0), int(0)], r(1, 16));
        assert!(!legal_bob_potential(&b, &shifted, &r(1, 2)));
        assert!(!legal_bob_potential(&b, &unit_ball(r(1, 17)), &r(1, 2)));
    }

    #[test]
    fn absolute_examples() {
        let b = unit_ball(r(1, 10));
        let beta = r(1, 4);
        // plane x = -1/20, width 1/40; next ball on the far side
        let h = slab_x(r(1, 20), r(1, 40));
        let next = ball(r(3, 4), [r(1, 20), int(0), int(0)], r(1, 40));
        assert!(legal_absolute_moves(&b, &h, &next, &beta).unwrap());
        let touching = ball(r(3, 4), [r(-1, 40), int(0), int(0)], r(1, 40));
        assert!(!legal_absolute_moves(&b, &h, &touching, &beta).unwrap());
        assert!(legal_absolute_alice(&b, &slab_x(int(0), r(1, 40)), &beta));
        assert!(!legal_absolute_alice(&b, &slab_x(int(0), r(1, 39)), &beta));
    }

    #[test]
    fn alpha_beta_examples() {
        let prev = unit_ball(r(1, 4));
        let alpha = r(1, 3);
        assert!(legal_alpha_beta_moves(&prev, &unit_ball(r(1, 12)), &alpha));
        assert!(!legal_alpha_beta_moves(&prev, &unit_ball(r(1, 11)), &alpha));
        let edge = ball(r(3, 4), [int(0), r(1, 6), int(0)], r(1, 12));
        assert!(legal_alpha_beta_moves(&prev, &edge, &alpha));
        let over = ball(r(3, 4), [int(0), r(1, 5), int(0)], r(1, 12));
        assert!(!legal_alpha_beta_moves(&prev, &over, &alpha));
        let e = EuclideanBall {
            center: vec![int(0), int(0)],
            radius: int(1),
        };
        let f = EuclideanBall {
            center: vec![r(3, 10), r(4, 10)],
            radius: r(1, 2),
        };
        assert!(legal_alpha_beta_moves(&e, &f, &r(1, 2)));
    }

    #[test]
    fn slab_with_lambda_component_uses_certified_path() {
        // λ + x = 0 plane, ball at λ=3/4, x=-3/4: f0 = 0, inside
        let h = HyperplaneNbhd::new([int(1), int(1), int(0), int(0)], int(0), r(1, 2)).unwrap();
        let b = ball(r(3, 4), [r(-3, 4), int(0), int(0)], r(1, 100));
        assert!(h.contains_ball(&b).unwrap());
        assert!(!h.disjoint_from(&b).unwrap());
        let far = ball(r(3, 4), [int(3), int(0), int(0)], r(1, 100));
        assert!(h.disjoint_from(&far).unwrap());
        assert!(!h.contains_ball(&far).unwrap());
    }

    struct Recenter {
        ball: ProductBall,
        beta: Q,
    }

    impl BobStrategy for Recenter {
        fn next_ball(&mut self, t: &GameTranscript) -> Result<Option<ProductBall>> {
            if t.bob_rounds() > 0 {
                self.ball.radius = &self.ball.radius * &self.beta;
            }
            Ok(Some(self.ball.clone()))
        }
    }

    struct Script(Vec<ProductBall>);

    impl BobStrategy for Script {
        fn next_ball(&mut self, t: &GameTranscript) -> Result<Option<ProductBall>> {
            Ok(self.0.get(t.bob_rounds()).cloned())
        }
    }

    struct Idle;

    impl AliceStrategy for Idle {
        fn respond(&mut self, _: &GameTranscript, _: &ProductBall) -> Result<(AliceMove, Option<serde_json::Value>)> {
            Ok((AliceMove::Family(vec![]), None))
        }
    }

    #[test]
    fn trivial_game_runs_five_rounds() {
        let params = GameParams::potential(r(1, 2), int(1));
        let mut bob = Recenter {
            ball: unit_ball(r(1, 10)),
            beta: r(1, 2),
        };
        let t = run_game(&params, &mut Idle, &mut bob, 5).unwrap();
        assert_eq!(t.bob_rounds(), 5);
        assert_eq!(t.moves.len(), 10);
        let balls: Vec<_> = t.bob_balls().cloned().collect();
        for w in balls.windows(2) {
            assert!(legal_bob_potential(&w[0], &w[1], &r(1, 2)));
        }
        // replaying the balls gives the same transcript
        let t2 = run_game(&params, &mut Idle, &mut Script(balls), 10).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn nesting_violation_names_the_round() {
        let params = GameParams::potential(r(1, 2), int(1));
        let mut balls = vec![unit_ball(r(1, 10)), unit_ball(r(1, 20)), unit_ball(r(1, 40))];
        balls.push(ball(r(3, 4), [r(1, 10), int(0), int(0)], r(1, 80)));
        let err = run_game(&params, &mut Idle, &mut Script(balls), 10).unwrap_err();
        match err {
            Error::IllegalMove { round, player, .. } => {
                assert_eq!(round, 3);
                assert_eq!(player, "bob");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn adjudication_examples() {
        let params = GameParams::potential(r(1, 2), int(1));
        let mut t = GameTranscript::new(params);
        let b = unit_ball(r(1, 100));
        t.moves.push(MoveRecord {
            round: 0,
            player: Player::Bob,
            mv: Move::Ball(b.clone()),
            decision: None,
        });
        assert_eq!(adjudicate_potential(&t, |_| Some(false)).unwrap(), Adjudication::BobWinsSoFar);
        assert_eq!(adjudicate_potential(&t, |_| Some(true)).unwrap(), Adjudication::AliceWins);
        assert_eq!(adjudicate_potential(&t, |_| None).unwrap(), Adjudication::Undetermined);
        t.moves.push(MoveRecord {
            round: 0,
            player: Player::Alice,
            mv: Move::Family(vec![slab_x(int(0), r(1, 2))]),
            decision: None,
        });
        assert_eq!(adjudicate_potential(&t, |_| Some(false)).unwrap(), Adjudication::AliceWins);
    }

    proptest! {
        #[test]
        fn dropping_a_nbhd_keeps_family_legal(
            widths in proptest::collection::vec(1i64..100, 1..6),
            drop in 0usize..6,
            gnum in 1i64..4, gden in 1i64..3,
        ) {
            let b = unit_ball(r(1, 10));
            let fam: Vec<_> = widths.iter().map(|&w| slab_x(int(0), r(w, 10_000))).collect();
            let gamma = r(gnum, gden);
            if legal_alice_potential(&b, &fam, &r(1, 2), &gamma).unwrap() {
                let mut smaller = fam.clone();
                smaller.remove(drop % fam.len());
                prop_assert!(legal_alice_potential(&b, &smaller, &r(1, 2), &gamma).unwrap());
            }
        }

        #[test]
        fn slab_win_is_stable_under_shrinking(dx in -50i64..50, shrink in 1i64..8) {
            let h = slab_x(int(0), r(1, 2));
            let b = ball(r(3, 4), [r(dx, 1000), int(0), int(0)], r(1, 10));
            if h.contains_ball(&b).unwrap() {
                let inner = ball(r(3, 4), b.center.clone(), &b.radius / int(shrink + 1));
                prop_assert!(h.contains_ball(&inner).unwrap());
            }
        }
    }
}
