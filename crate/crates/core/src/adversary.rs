//! Legal Bob strategies for the potential game.
//!
//! Every move keeps Bob inside his previous ball with radius
//! `shrink · ρ_prev`, so the center may travel at most `(1 − shrink) ρ_prev`.

use std::path::PathBuf;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{format_rational, rational_str, CertInterval};
use crate::error::{Error, Result};
use crate::game::{legal_bob_potential, BobStrategy, GameTranscript, ProductBall};
use crate::geometry::RationalDirection;

type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BobKind {
    Random,
    GreedyCusp,
    Replay,
}

fn default_rng() -> String {
    "chacha8".to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BobConfig {
    pub kind: BobKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(with = "rational_str")]
    pub shrink: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<RationalDirection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<PathBuf>,
    /// Generator identifier; only `chacha8` (ChaCha with 8 rounds, stream =
    /// round index) is supported.
    #[serde(default = "default_rng")]
    pub rng: String,
}

impl BobConfig {
    pub fn validate(&self, beta: &Q) -> Result<()> {
        if self.shrink < *beta || self.shrink > Q::one() {
            return Err(Error::invalid(format!(
                "shrink must lie in [beta, 1], got {}",
                format_rational(&self.shrink)
            )));
        }
        if self.kind == BobKind::GreedyCusp && self.target.is_none() {
            return Err(Error::invalid("greedy_cusp needs a target direction"));
        }
        if self.rng != "chacha8" {
            return Err(Error::invalid(format!("unsupported generator {:?}", self.rng)));
        }
        Ok(())
    }
}

/// Round `x` to the grid `2^{-bits}` (toward zero).
fn dyadic(x: &Q, bits: u64) -> Q {
    let scale = BigInt::one() << bits;
    Q::new((x * Q::from_integer(scale.clone())).trunc().to_integer(), scale)
}

fn step_toward(prev: &ProductBall, target: &[Q; 3], shrink: &Q) -> Result<ProductBall> {
    let radius = &prev.radius * shrink;
    let reach = &prev.radius - &radius;
    let d2 = prev.spatial_dist_sq(target);
    if d2 <= &reach * &reach {
        return ProductBall::new(prev.lambda.clone(), target.clone(), radius);
    }
    // Move by reach/d_upper along the segment, then snap to a dyadic grid
    // fine enough to stay legal; fall back to the exact point otherwise.
    let d_hi = CertInterval::point(d2, 64).sqrt()?.hi().clone();
    let t = &reach / &d_hi;
    let exact: [Q; 3] = std::array::from_fn(|i| &prev.center[i] + &t * (&target[i] - &prev.center[i]));
    let grid = (reach.denom().bits() as i64 - reach.numer().bits() as i64 + 80).max(32) as u64;
    let snapped: [Q; 3] = std::array::from_fn(|i| dyadic(&exact[i], grid));
    for c in [snapped, exact] {
        let b = ProductBall::new(prev.lambda.clone(), c, radius.clone())?;
        if prev.contains_ball(&b) {
            return Ok(b);
        }
    }
    Ok(ProductBall::new(prev.lambda.clone(), prev.center.clone(), radius)?)
}

fn random_step(prev: &ProductBall, shrink: &Q, seed: u64, round: usize) -> Result<ProductBall> {
    let radius = &prev.radius * shrink;
    let reach = &prev.radius - &radius;
    if reach.is_zero() {
        return ProductBall::new(prev.lambda.clone(), prev.center.clone(), radius);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round as u64);
    const SCALE: i64 = 1 << 32;
    let unit = |rng: &mut ChaCha8Rng| rng.gen_range(-SCALE..=SCALE);
    let dl = unit(&mut rng);
    let spatial = loop {
        let u = [unit(&mut rng), unit(&mut rng), unit(&mut rng)];
        let n2: i128 = u.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
        if n2 <= i128::from(SCALE) * i128::from(SCALE) {
            break u;
        }
    };
    let step = |k: i64| &reach * Q::new(BigInt::from(k), BigInt::from(SCALE));
    let center: [Q; 3] = std::array::from_fn(|i| &prev.center[i] + step(spatial[i]));
    ProductBall::new(&prev.lambda + step(dl), center, radius)
}

/// Bob's next ball after `prev` at `round` (the index of the new ball).
pub fn bob_move(config: &BobConfig, prev: &ProductBall, round: usize) -> Result<ProductBall> {
    match config.kind {
        BobKind::GreedyCusp => {
            let v = config.target.as_ref().ok_or_else(|| Error::invalid("greedy_cusp needs a target"))?;
            let target = [v.x_core(), v.y_core(), prev.z().clone()];
            step_toward(prev, &target, &config.shrink)
        }
        BobKind::Random => random_step(prev, &config.shrink, config.seed, round),
        BobKind::Replay => Err(Error::invalid("replay moves come from the script")),
    }
}

/// Bob as a [`BobStrategy`]: opens with `initial`, then follows `config`.
#[derive(Clone, Debug)]
pub struct BobAdversary {
    pub config: BobConfig,
    pub initial: ProductBall,
    pub beta: Q,
    script: Vec<ProductBall>,
}

impl BobAdversary {
    pub fn new(config: BobConfig, initial: ProductBall, beta: Q) -> Result<Self> {
        config.validate(&beta)?;
        Ok(BobAdversary {
            config,
            initial,
            beta,
            script: Vec::new(),
        })
    }

    /// Scripted balls for replay; the first one must be the opening ball.
    pub fn with_script(mut self, balls: Vec<ProductBall>) -> Self {
        self.script = balls;
        self
    }
}

impl BobStrategy for BobAdversary {
    fn next_ball(&mut self, t: &GameTranscript) -> Result<Option<ProductBall>> {
        let round = t.bob_rounds();
        if self.config.kind == BobKind::Replay {
            let Some(next) = self.script.get(round).cloned() else {
                return Ok(None);
            };
            if let Some(prev) = t.last_bob_ball() {
                if !legal_bob_potential(prev, &next, &self.beta) {
                    return Err(Error::IllegalMove {
                        round,
                        player: "bob".into(),
                        reason: "scripted ball is not a legal potential-game move".into(),
                    });
                }
            }
            return Ok(Some(next));
        }
        match t.last_bob_ball() {
            None => Ok(Some(self.initial.clone())),
            Some(prev) => {
                let next = bob_move(&self.config, prev, round)?;
                debug_assert!(legal_bob_potential(prev, &next, &self.beta));
                Ok(Some(next))
            }
        }
    }
}

/// Spatial distance from the ball's center to the target's core, squared.
pub fn cusp_distance_sq(ball: &ProductBall, v: &RationalDirection) -> Q {
    let dx = ball.x() - v.x_core();
    let dy = ball.y() - v.y_core();
    &dx * &dx + &dy * &dy
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio as r};
    use crate::game::{run_game, AliceMove, AliceStrategy, GameParams};
    use proptest::prelude::*;

    struct Idle;
    impl AliceStrategy for Idle {
        fn respond(&mut self, _: &GameTranscript, _: &ProductBall) -> Result<(AliceMove, Option<serde_json::Value>)> {
            Ok((AliceMove::Family(vec![]), None))
        }
    }

    fn start() -> ProductBall {
        ProductBall::new(r(3, 4), [r(1, 2), r(1, 3), int(1)], r(1, 10)).unwrap()
    }

    fn cfg(kind: BobKind, shrink: Q) -> BobConfig {
        BobConfig {
            kind,
            seed: 42,
            shrink,
            target: Some(RationalDirection { p: 0, r: 0, q: 1 }),
            script: None,
            rng: default_rng(),
        }
    }

    #[test]
    fn shrink_one_stays_put() {
        let b = start();
        for kind in [BobKind::Random, BobKind::GreedyCusp] {
            assert_eq!(bob_move(&cfg(kind, int(1)), &b, 3).unwrap(), b);
        }
    }

    #[test]
    fn greedy_approaches_the_cusp() {
        let c = cfg(BobKind::GreedyCusp, r(3, 4));
        let v = c.target.unwrap();
        let mut b = start();
        let mut last = cusp_distance_sq(&b, &v);
        for i in 1..25 {
            let next = bob_move(&c, &b, i).unwrap();
            assert!(legal_bob_potential(&b, &next, &r(1, 2)));
            let d = cusp_distance_sq(&next, &v);
            assert!(d <= last);
            // progress is the full allowed step until the cusp is in reach
            let reach = &b.radius - &next.radius;
            if last > &reach * &reach {
                let (dl, dn) = (arith_sqrt(&last), arith_sqrt(&d));
                assert!(dl - dn > arith::to_f64(&reach) * (1.0 - 1e-9));
            }
            last = d;
            b = next;
        }
    }

    fn arith_sqrt(x: &Q) -> f64 {
        arith::to_f64(x).sqrt()
    }

    use crate::arith;

    #[test]
    fn seeded_games_are_reproducible() {
        let params = GameParams::potential(r(1, 2), int(1));
        let play = || {
            let mut bob = BobAdversary::new(cfg(BobKind::Random, r(2, 3)), start(), r(1, 2)).unwrap();
            run_game(&params, &mut Idle, &mut bob, 12).unwrap()
        };
        let (a, b) = (play(), play());
        assert_eq!(a, b);
        let balls: Vec<_> = a.bob_balls().cloned().collect();
        let mut replay = BobAdversary::new(cfg(BobKind::Replay, r(2, 3)), start(), r(1, 2))
            .unwrap()
            .with_script(balls);
        assert_eq!(run_game(&params, &mut Idle, &mut replay, 100).unwrap(), a);
    }

    #[test]
    fn bad_script_is_rejected() {
        let params = GameParams::potential(r(1, 2), int(1));
        let b0 = start();
        let far = ProductBall::new(r(3, 4), [int(5), int(0), int(0)], r(1, 20)).unwrap();
        let mut bob = BobAdversary::new(cfg(BobKind::Replay, r(1, 2)), b0.clone(), r(1, 2))
            .unwrap()
            .with_script(vec![b0, far]);
        assert!(matches!(
            run_game(&params, &mut Idle, &mut bob, 5),
            Err(Error::IllegalMove { round: 1, .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(cfg(BobKind::Random, r(1, 3)).validate(&r(1, 2)).is_err());
        assert!(cfg(BobKind::Random, r(3, 2)).validate(&r(1, 2)).is_err());
        let mut c = cfg(BobKind::GreedyCusp, r(3, 4));
        c.target = None;
        assert!(c.validate(&r(1, 2)).is_err());
        let toml_like = serde_json::json!({"kind": "greedy_cusp", "seed": 1, "shrink": "3/4", "target": [1, 1, 2]});
        let parsed: BobConfig = serde_json::from_value(toml_like).unwrap();
        assert_eq!(parsed.rng, "chacha8");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn every_move_is_legal(seed in any::<u64>(), sn in 1i64..=8, greedy in any::<bool>(),
                               p in -3i64..3, rr in -3i64..3, q in 1i64..5) {
            let kind = if greedy { BobKind::GreedyCusp } else { BobKind::Random };
            let mut c = cfg(kind, r(6 + sn, 14));
            c.seed = seed;
            c.target = Some(RationalDirection { p, r: rr, q });
            let mut b = start();
            for i in 1..10 {
                let next = bob_move(&c, &b, i).unwrap();
                prop_assert!(legal_bob_potential(&b, &next, &r(1, 2)));
                prop_assert_eq!(&next.radius, &(&b.radius * &c.shrink));
                b = next;
            }
        }
    }
}
