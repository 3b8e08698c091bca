//! Unipotent translates of ℤ³ under the weighted diagonal flow, systoles,
//! and the bridge between tube membership and short flowed vectors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{exp_real, int, pow_real, rational_str, CertInterval, Precision};
use crate::error::{Error, Result};
use crate::geometry::RationalDirection;

type Q = BigRational;

/// Default working precision for lattice computations.
pub const LATTICE_BITS: u32 = 160;
/// Largest coefficient box `shortest_vector` will enumerate.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// The matrix with rows `(1, z, x)`, `(0, 1, y)`, `(0, 0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperUnipotent {
    #[serde(with = "rational_str")]
    pub x: Q,
    #[serde(with = "rational_str")]
    pub y: Q,
    #[serde(with = "rational_str")]
    pub z: Q,
}

impl UpperUnipotent {
    pub fn new(point: &[Q; 3]) -> Self {
        let [x, y, z] = point.clone();
        UpperUnipotent { x, y, z }
    }

    pub fn matrix(&self) -> [[Q; 3]; 3] {
        let (o, l) = (Q::zero(), Q::one());
        [
            [l.clone(), self.z.clone(), self.x.clone()],
            [o.clone(), l.clone(), self.y.clone()],
            [o.clone(), o, l],
        ]
    }

    /// Rows `(1, −z, zy − x)`, `(0, 1, −y)`, `(0, 0, 1)`.
    pub fn inverse(&self) -> [[Q; 3]; 3] {
        let (o, l) = (Q::zero(), Q::one());
        [
            [l.clone(), -&self.z, &self.z * &self.y - &self.x],
            [o.clone(), l.clone(), -&self.y],
            [o.clone(), o, l],
        ]
    }
}

pub fn mat_mul(a: &[[Q; 3]; 3], b: &[[Q; 3]; 3]) -> [[Q; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..3).map(|k| &a[i][k] * &b[k][j]).sum()))
}

/// Flow time `t = ln(log_base) + shift`. Times of the form `ln q` keep the
/// flow entries algebraic, which is where tube membership lives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowTime {
    #[serde(with = "rational_str")]
    pub log_base: Q,
    #[serde(with = "rational_str")]
    pub shift: Q,
}

impl FlowTime {
    pub fn rational(t: Q) -> Self {
        FlowTime {
            log_base: Q::one(),
            shift: t,
        }
    }

    pub fn log_of(q: Q) -> Self {
        FlowTime {
            log_base: q,
            shift: Q::zero(),
        }
    }

    pub fn plus(&self, s: &Q) -> Self {
        FlowTime {
            log_base: self.log_base.clone(),
            shift: &self.shift + s,
        }
    }

    pub fn compose(&self, other: &FlowTime) -> Self {
        FlowTime {
            log_base: &self.log_base * &other.log_base,
            shift: &self.shift + &other.shift,
        }
    }

    /// Enclosure of `e^{a t}`.
    pub fn exp_scaled(&self, a: &Q, bits: u32) -> Result<CertInterval> {
        if !self.log_base.is_positive() {
            return Err(Error::invalid("flow time needs a positive log base"));
        }
        let algebraic = pow_real(&self.log_base, a, bits)?;
        if self.shift.is_zero() {
            return Ok(algebraic);
        }
        Ok(algebraic.mul(&exp_real(&(a * &self.shift), bits)))
    }
}

/// `diag(e^{λt}, e^{(1−λ)t}, e^{−t})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSpec {
    #[serde(with = "rational_str")]
    pub lambda: Q,
    pub t: FlowTime,
}

impl FlowSpec {
    pub fn new(lambda: Q, t: FlowTime) -> Result<Self> {
        if lambda <= crate::arith::ratio(1, 2) || lambda >= Q::one() {
            return Err(Error::invalid("flow weight must lie in (1/2, 1)"));
        }
        Ok(FlowSpec { lambda, t })
    }

    pub fn diagonal(&self, bits: u32) -> Result<[CertInterval; 3]> {
        Ok([
            self.t.exp_scaled(&self.lambda, bits)?,
            self.t.exp_scaled(&(Q::one() - &self.lambda), bits)?,
            self.t.exp_scaled(&-Q::one(), bits)?,
        ])
    }
}

/// A basis stored column by column; `cols[j][i]` is the `(i, j)` entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeBasis {
    pub cols: [[CertInterval; 3]; 3],
}

impl LatticeBasis {
    pub fn from_rows(rows: &[[Q; 3]; 3], bits: u32) -> Self {
        LatticeBasis {
            cols: std::array::from_fn(|j| std::array::from_fn(|i| CertInterval::point(rows[i][j].clone(), bits))),
        }
    }

    pub fn from_integer_rows(rows: &[[i64; 3]; 3], bits: u32) -> Self {
        Self::from_rows(&rows.map(|r| r.map(int)), bits)
    }

    pub fn entry(&self, i: usize, j: usize) -> &CertInterval {
        &self.cols[j][i]
    }

    pub fn det(&self) -> CertInterval {
        let e = |i, j| self.entry(i, j);
        let minor = |a: usize, b: usize, c: usize, d: usize| e(1, a).mul(e(2, b)).sub(&e(1, c).mul(e(2, d)));
        e(0, 0)
            .mul(&minor(1, 2, 2, 1))
            .sub(&e(0, 1).mul(&minor(0, 2, 2, 0)))
            .add(&e(0, 2).mul(&minor(0, 1, 1, 0)))
    }

    /// Rows scaled by the flow's diagonal.
    pub fn flowed(&self, diag: &[CertInterval; 3]) -> Self {
        LatticeBasis {
            cols: std::array::from_fn(|j| std::array::from_fn(|i| diag[i].mul(&self.cols[j][i]))),
        }
    }

    /// `Σ c_j · column_j`.
    pub fn combine(&self, c: &[i64; 3]) -> [CertInterval; 3] {
        std::array::from_fn(|i| {
            let bits = self.cols[0][i].bits();
            let mut acc = CertInterval::point(Q::zero(), bits);
            for j in 0..3 {
                if c[j] != 0 {
                    acc = acc.add(&self.cols[j][i].scale(&int(c[j])));
                }
            }
            acc
        })
    }

    /// Basis whose columns are `B · U e_j`.
    pub fn transformed(&self, u: &[[i64; 3]; 3]) -> Self {
        LatticeBasis {
            cols: std::array::from_fn(|j| self.combine(&[u[0][j], u[1][j], u[2][j]])),
        }
    }

    fn midpoints(&self) -> [[f64; 3]; 3] {
        self.cols.clone().map(|c| c.map(|x| x.to_f64_mid()))
    }
}

/// `g_t · u⁻¹`, whose columns span the flowed lattice.
pub fn flowed_basis(flow: &FlowSpec, point: &[Q; 3], bits: u32) -> Result<LatticeBasis> {
    let inv = UpperUnipotent::new(point).inverse();
    Ok(LatticeBasis::from_rows(&inv, bits).flowed(&flow.diagonal(bits)?))
}

fn offsets(point: &[Q; 3], v: &RationalDirection) -> (Q, Q) {
    let dy = &point[1] - v.y_core();
    let dx = &point[0] - v.x_core() - &point[2] * &dy;
    (dx, dy)
}

/// `g_{ln q} · u⁻¹ · (p, r, q)ᵀ`, which equals `(−q^{1+λ}δ₁, −q^{2−λ}δ₂, 1)`.
pub fn flowed_direction_vector(
    lambda: &Q,
    point: &[Q; 3],
    v: &RationalDirection,
    bits: u32,
) -> Result<[CertInterval; 3]> {
    if v.q < 1 {
        return Err(Error::invalid("direction needs q >= 1"));
    }
    let (dx, dy) = offsets(point, v);
    let qq = int(v.q);
    Ok([
        pow_real(&qq, &(Q::one() + lambda), bits)?.scale(&-dx),
        pow_real(&qq, &(int(2) - lambda), bits)?.scale(&-dy),
        CertInterval::point(Q::one(), bits),
    ])
}

/// Tube membership read off the flowed vector: both leading coordinates
/// strictly below `eps` in absolute value.
pub fn bridge_membership(lambda: &Q, point: &[Q; 3], v: &RationalDirection, eps: &Q) -> Result<bool> {
    Precision::default().decide("flowed vector against epsilon", |bits| {
        let w = flowed_direction_vector(lambda, point, v, bits)?;
        let (a, b) = (w[0].abs(), w[1].abs());
        if a.hi() < eps && b.hi() < eps {
            Ok(Some(true))
        } else if a.lo() >= eps || b.lo() >= eps {
            Ok(Some(false))
        } else {
            Ok(None)
        }
    })
}

/// Certified length of the flowed vector `g_t u⁻¹ (p, r, q)ᵀ`.
pub fn escape_certificate(
    lambda: &Q,
    point: &[Q; 3],
    v: &RationalDirection,
    t: &FlowTime,
    bits: u32,
) -> Result<CertInterval> {
    let flow = FlowSpec::new(lambda.clone(), t.clone())?;
    let diag = flow.diagonal(bits)?;
    let (dx, dy) = offsets(point, v);
    let qq = int(v.q);
    let raw = [-&qq * dx, -&qq * dy, qq];
    let sq = (0..3)
        .map(|i| diag[i].scale(&raw[i]).square())
        .reduce(|a, b| a.add(&b))
        .unwrap();
    sq.sqrt()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Floating-point LLL on the columns, returning the integer transform.
fn lll(mut b: [[f64; 3]; 3]) -> [[i64; 3]; 3] {
    let mut u = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let gs = |b: &[[f64; 3]; 3]| {
        let mut s = *b;
        for i in 0..3 {
            for j in 0..i {
                let m = dot(&b[i], &s[j]) / dot(&s[j], &s[j]);
                for k in 0..3 {
                    s[i][k] -= m * s[j][k];
                }
            }
        }
        s
    };
    let mut k = 1;
    let mut guard = 0;
    while k < 3 && guard < 10_000 {
        guard += 1;
        let s = gs(&b);
        for j in (0..k).rev() {
            let m = (dot(&b[k], &s[j]) / dot(&s[j], &s[j])).round();
            if m != 0.0 && m.is_finite() && m.abs() < 1e15 {
                for i in 0..3 {
                    b[k][i] -= m * b[j][i];
                    u[i][k] -= m as i64 * u[i][j];
                }
            }
        }
        let s = gs(&b);
        let mu = dot(&b[k], &s[k - 1]) / dot(&s[k - 1], &s[k - 1]);
        if dot(&s[k], &s[k]) < (0.99 - mu * mu) * dot(&s[k - 1], &s[k - 1]) {
            b.swap(k, k - 1);
            for row in u.iter_mut() {
                row.swap(k, k - 1);
            }
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    u
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShortVector {
    /// Integer coefficients with respect to the input basis.
    pub coeffs: [i64; 3],
    pub length: CertInterval,
}

fn sq_norm(v: &[CertInterval; 3]) -> CertInterval {
    v[0].square().add(&v[1].square()).add(&v[2].square())
}

fn floor_sqrt(x: &Q) -> BigInt {
    x.floor().to_integer().max(BigInt::zero()).sqrt()
}

/// Shortest nonzero lattice vector: LLL reduction, then exhaustive search of
/// a coefficient box that provably contains every minimizer.
pub fn shortest_vector(basis: &LatticeBasis) -> Result<ShortVector> {
    let det = basis.det();
    if det.contains(&Q::zero()) {
        return Err(Error::PrecisionExhausted {
            bits: basis.cols[0][0].bits(),
            what: "lattice determinant not separated from 0".into(),
        });
    }
    let u = lll(basis.midpoints());
    let red = basis.transformed(&u);
    let bound = red
        .cols
        .iter()
        .map(|c| sq_norm(c).hi().clone())
        .min()
        .expect("three columns");
    // |c_i| ≤ |v| · ‖row_i(B⁻¹)‖ for v = B c.
    let rdet = red.det();
    let e = |i: usize, j: usize| red.entry(i, j);
    let cof = |i: usize, j: usize| {
        let (r0, r1) = match i {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c0, c1) = match j {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        e(r0, c0).mul(e(r1, c1)).sub(&e(r0, c1).mul(e(r1, c0)))
    };
    let det_sq = rdet.square();
    let mut radii = [0i64; 3];
    let mut points: u64 = 1;
    for (i, radius) in radii.iter_mut().enumerate() {
        // row i of the inverse is the cofactor column i over det
        let row_sq = cof(0, i).square().add(&cof(1, i).square()).add(&cof(2, i).square()).div(&det_sq)?;
        let r = floor_sqrt(&(&bound * row_sq.hi()));
        let r = r.to_i64().filter(|&r| r < 1 << 20).ok_or(Error::BudgetExceeded {
            requested: format!("coefficient radius {r}"),
            budget: ENUMERATION_CAP,
        })?;
        *radius = r;
        points = points.saturating_mul(2 * r as u64 + 1);
    }
    if points > ENUMERATION_CAP {
        return Err(Error::BudgetExceeded {
            requested: format!("{points} enumeration points"),
            budget: ENUMERATION_CAP,
        });
    }
    let mut best: Option<([i64; 3], CertInterval)> = None;
    let mut floor_lo: Option<Q> = None;
    for a in -radii[0]..=radii[0] {
        for b in -radii[1]..=radii[1] {
            for c in -radii[2]..=radii[2] {
                if a == 0 && b == 0 && c == 0 {
                    continue;
                }
                let n = sq_norm(&red.combine(&[a, b, c]));
                if n.lo() > &bound {
                    continue;
                }
                if floor_lo.as_ref().is_none_or(|f| n.lo() < f) {
                    floor_lo = Some(n.lo().clone());
                }
                if best.as_ref().is_none_or(|(_, m)| n.hi() < m.hi()) {
                    best = Some(([a, b, c], n));
                }
            }
        }
    }
    let (c, n) = best.expect("reduced columns lie in the box");
    let coeffs = std::array::from_fn(|i| (0..3).map(|j| u[i][j] * c[j]).sum());
    let sq = CertInterval::enclose(&floor_lo.expect("nonempty"), n.hi(), n.bits());
    Ok(ShortVector {
        coeffs,
        length: sq.sqrt()?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SystolePoint {
    #[serde(with = "rational_str")]
    pub t: Q,
    pub length: CertInterval,
    pub coeffs: [i64; 3],
}

/// Shortest vector of `g_t u⁻¹ ℤ³` at one flow time.
pub fn systole_at(lambda: &Q, point: &[Q; 3], t: &FlowTime, bits: u32) -> Result<ShortVector> {
    let flow = FlowSpec::new(lambda.clone(), t.clone())?;
    shortest_vector(&flowed_basis(&flow, point, bits)?)
}

/// Systole of `g_t u⁻¹ ℤ³` at `steps + 1` equally spaced times in `[0, t_max]`.
pub fn systole_trajectory(
    lambda: &Q,
    point: &[Q; 3],
    t_max: &Q,
    steps: u32,
    bits: u32,
) -> Result<Vec<SystolePoint>> {
    if steps == 0 {
        return Err(Error::invalid("trajectory needs at least one step"));
    }
    if t_max.is_negative() {
        return Err(Error::invalid("flow time must be non-negative"));
    }
    (0..=steps)
        .into_par_iter()
        .map(|i| {
            let t = t_max * Q::new(BigInt::from(i), BigInt::from(steps));
            let flow = FlowSpec::new(lambda.clone(), FlowTime::rational(t.clone()))?;
            let sv = shortest_vector(&flowed_basis(&flow, point, bits)?)?;
            Ok(SystolePoint {
                t,
                length: sv.length,
                coeffs: sv.coeffs,
            })
        })
        .collect()
}
