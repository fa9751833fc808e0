//! Parametric monotone scalar functions on `[0, ∞)`.
//!
//! Gains, scalings and comparison functions all live in one closed family
//! (zero, linear, power, monotone piecewise-linear) so that every nonzero
//! member has an exact inverse.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Comparison-function class of a [`ScalarFn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    Zero,
    K,
    KInfinity,
}

impl ClassTag {
    /// `K∞ ⊂ K`, so both count as class K.
    pub fn is_class_k(self) -> bool {
        matches!(self, ClassTag::K | ClassTag::KInfinity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ScalarFn {
    Zero,
    /// `t ↦ a·t`
    Linear { a: f64 },
    /// `t ↦ a·t^p`
    Power { a: f64, p: f64 },
    PiecewiseLinear(PiecewiseLinear),
}

impl ScalarFn {
    pub fn zero() -> Self {
        ScalarFn::Zero
    }

    pub fn identity() -> Self {
        ScalarFn::Linear { a: 1.0 }
    }

    pub fn linear(a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidFunction(format!("linear slope must be positive, got {a}")));
        }
        Ok(ScalarFn::Linear { a })
    }

    pub fn power(a: f64, p: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && p.is_finite() && p > 0.0) {
            return Err(Error::InvalidFunction(format!(
                "power gain needs a > 0 and p > 0, got a = {a}, p = {p}"
            )));
        }
        Ok(ScalarFn::Power { a, p })
    }

    pub fn piecewise_linear(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        PiecewiseLinear::new(breakpoints).map(ScalarFn::PiecewiseLinear)
    }

    /// Re-checks parameter constraints; needed for values built by hand or
    /// deserialized through the enum directly.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ScalarFn::Zero => Ok(()),
            ScalarFn::Linear { a } => ScalarFn::linear(a).map(|_| ()),
            ScalarFn::Power { a, p } => ScalarFn::power(a, p).map(|_| ()),
            ScalarFn::PiecewiseLinear(ref pl) => PiecewiseLinear::new(pl.points.clone()).map(|_| ()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarFn::Zero)
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, ScalarFn::Linear { .. })
    }

    /// Slope of a linear function, `None` otherwise.
    pub fn linear_slope(&self) -> Option<f64> {
        match *self {
            ScalarFn::Linear { a } => Some(a),
            _ => None,
        }
    }

    /// All nonzero members of the family are unbounded, hence `K∞`.
    pub fn class_tag(&self) -> ClassTag {
        match self {
            ScalarFn::Zero => ClassTag::Zero,
            ScalarFn::Linear { .. } | ScalarFn::Power { .. } => ClassTag::KInfinity,
            ScalarFn::PiecewiseLinear(pl) => {
                if pl.tail_slope() > 0.0 {
                    ClassTag::KInfinity
                } else {
                    ClassTag::K
                }
            }
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ScalarFn::Zero => 0.0,
            ScalarFn::Linear { a } => a * t,
            ScalarFn::Power { a, p } => {
                if t == 0.0 {
                    0.0
                } else {
                    a * t.powf(p)
                }
            }
            ScalarFn::PiecewiseLinear(ref pl) => pl.eval(t),
        }
    }

    pub fn inverse(&self, v: f64) -> Result<f64> {
        if v < 0.0 || v.is_nan() {
            return Err(Error::Domain(format!("inverse evaluated at {v}")));
        }
        match *self {
            ScalarFn::Zero => Err(Error::InvalidFunction("the zero function has no inverse".into())),
            ScalarFn::Linear { a } => Ok(v / a),
            ScalarFn::Power { a, p } => {
                if v == 0.0 {
                    Ok(0.0)
                } else {
                    Ok((v / a).powf(1.0 / p))
                }
            }
            ScalarFn::PiecewiseLinear(ref pl) => Ok(pl.inverse(v)),
        }
    }

    /// Solves `x + f(x) = t`, i.e. evaluates `(id + f)⁻¹(t)`.
    pub fn id_plus_inverse(&self, t: f64) -> f64 {
        match *self {
            ScalarFn::Zero => t,
            ScalarFn::Linear { a } => t / (1.0 + a),
            _ => {
                if t <= 0.0 {
                    return 0.0;
                }
                // x + f(x) is strictly increasing and ≥ x, so the root lies in [0, t].
                let (mut lo, mut hi) = (0.0_f64, t);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if mid + self.eval(mid) > t {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                lo
            }
        }
    }

    /// Smallest derivative of `f` on `[a, b]`, exact for every kind.
    pub fn min_slope_on(&self, a: f64, b: f64) -> f64 {
        match *self {
            ScalarFn::Zero => 0.0,
            ScalarFn::Linear { a: k } => k,
            ScalarFn::Power { a: k, p } => {
                // k·p·t^(p-1) is monotone in t, so the minimum sits at an endpoint.
                k * p * a.powf(p - 1.0).min(b.powf(p - 1.0))
            }
            ScalarFn::PiecewiseLinear(ref pl) => pl.min_slope_on(a, b),
        }
    }

    /// Returns the first grid point where `f(t) ≥ t`, if any.
    pub fn first_point_not_below_identity(&self, grid: &[f64]) -> Option<f64> {
        grid.iter().copied().find(|&t| t > 0.0 && self.eval(t) >= t)
    }
}

impl fmt::Display for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Zero => write!(f, "zero"),
            ScalarFn::Linear { a } => write!(f, "linear:{a}"),
            ScalarFn::Power { a, p } => write!(f, "power:{a},{p}"),
            ScalarFn::PiecewiseLinear(pl) => {
                write!(f, "piecewise-linear:")?;
                for (k, (x, y)) in pl.points.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}/{y}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses the command-line form `kind:params`, e.g. `linear:0.5`,
/// `power:0.5,2` or `piecewise-linear:0/0,1/2,3/3.5`.
impl FromStr for ScalarFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, params) = match s.split_once(':') {
            Some((k, p)) => (k.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let nums = |p: &str| -> Result<Vec<f64>> {
            p.split(',')
                .filter(|x| !x.trim().is_empty())
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("bad number '{x}' in '{s}': {e}")))
                })
                .collect()
        };
        match kind {
            "zero" => Ok(ScalarFn::Zero),
            "identity" | "id" => Ok(ScalarFn::identity()),
            "linear" => match nums(params)?.as_slice() {
                [a] => ScalarFn::linear(*a),
                _ => Err(Error::Parse(format!("linear expects one parameter: '{s}'"))),
            },
            "power" => match nums(params)?.as_slice() {
                [a, p] => ScalarFn::power(*a, *p),
                _ => Err(Error::Parse(format!("power expects two parameters a,p: '{s}'"))),
            },
            "piecewise-linear" => {
                let mut points = Vec::new();
                for pair in params.split(',').filter(|x| !x.trim().is_empty()) {
                    let (x, y) = pair
                        .split_once('/')
                        .ok_or_else(|| Error::Parse(format!("breakpoint '{pair}' must be x/y")))?;
                    let x: f64 = x.trim().parse().map_err(|e| Error::Parse(format!("{pair}: {e}")))?;
                    let y: f64 = y.trim().parse().map_err(|e| Error::Parse(format!("{pair}: {e}")))?;
                    points.push((x, y));
                }
                ScalarFn::piecewise_linear(points)
            }
            other => Err(Error::Parse(format!("unknown function kind '{other}'"))),
        }
    }
}

/// Monotone piecewise-linear function through `(0,0) = p₀ < p₁ < … < pₘ`,
/// extended past the last breakpoint with the last segment's slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBreakpoints", into = "RawBreakpoints")]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct RawBreakpoints {
    breakpoints: Vec<[f64; 2]>,
}

impl TryFrom<RawBreakpoints> for PiecewiseLinear {
    type Error = Error;

    fn try_from(raw: RawBreakpoints) -> Result<Self> {
        PiecewiseLinear::new(raw.breakpoints.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

impl From<PiecewiseLinear> for RawBreakpoints {
    fn from(pl: PiecewiseLinear) -> Self {
        RawBreakpoints { breakpoints: pl.points.into_iter().map(|(x, y)| [x, y]).collect() }
    }
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidFunction("piecewise-linear needs at least two breakpoints".into()));
        }
        if points[0] != (0.0, 0.0) {
            return Err(Error::InvalidFunction(format!(
                "piecewise-linear must start at (0,0), got {:?}",
                points[0]
            )));
        }
        for w in points.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if !(x1.is_finite() && y1.is_finite() && x1 > x0 && y1 > y0) {
                return Err(Error::InvalidFunction(format!(
                    "breakpoints must increase strictly in both coordinates: ({x0},{y0}) -> ({x1},{y1})"
                )));
            }
        }
        Ok(PiecewiseLinear { points })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn tail_slope(&self) -> f64 {
        let m = self.points.len();
        let ((x0, y0), (x1, y1)) = (self.points[m - 2], self.points[m - 1]);
        (y1 - y0) / (x1 - x0)
    }

    fn segment_for_x(&self, t: f64) -> usize {
        // index k of the segment [p_k, p_{k+1}] containing t, last segment for the tail
        let k = self.points.partition_point(|&(x, _)| x <= t);
        k.clamp(1, self.points.len() - 1) - 1
    }

    fn segment_for_y(&self, v: f64) -> usize {
        let k = self.points.partition_point(|&(_, y)| y <= v);
        k.clamp(1, self.points.len() - 1) - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = self.segment_for_x(t);
        let ((x0, y0), (x1, y1)) = (self.points[k], self.points[k + 1]);
        if t == x0 {
            return y0;
        }
        if t == x1 {
            return y1;
        }
        y0 + (t - x0) * (y1 - y0) / (x1 - x0)
    }

    pub fn inverse(&self, v: f64) -> f64 {
        let k = self.segment_for_y(v);
        let ((x0, y0), (x1, y1)) = (self.points[k], self.points[k + 1]);
        if v == y0 {
            return x0;
        }
        if v == y1 {
            return x1;
        }
        x0 + (v - y0) * (x1 - x0) / (y1 - y0)
    }

    pub fn min_slope_on(&self, a: f64, b: f64) -> f64 {
        let (ka, kb) = (self.segment_for_x(a), self.segment_for_x(b));
        (ka..=kb)
            .map(|k| {
                let ((x0, y0), (x1, y1)) = (self.points[k], self.points[k + 1]);
                (y1 - y0) / (x1 - x0)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_origin_for_every_kind() {
        let fs = [
            ScalarFn::Zero,
            ScalarFn::linear(3.0).unwrap(),
            ScalarFn::power(0.5, 0.5).unwrap(),
            ScalarFn::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 2.5)]).unwrap(),
        ];
        for f in &fs {
            assert_eq!(f.eval(0.0), 0.0, "{f}");
        }
    }

    #[test]
    fn inverse_round_trip_over_wide_range() {
        let fs = [
            ScalarFn::linear(0.125).unwrap(),
            ScalarFn::power(0.5, 0.5).unwrap(),
            ScalarFn::power(3.0, 2.0).unwrap(),
            ScalarFn::piecewise_linear(vec![(0.0, 0.0), (1e-3, 5e-3), (2.0, 2.5), (50.0, 60.0)]).unwrap(),
        ];
        let mut t = 1e-8;
        while t <= 1e8 {
            for f in &fs {
                let back = f.inverse(f.eval(t)).unwrap();
                assert!(((back - t) / t).abs() <= 1e-12, "{f} at {t}: {back}");
            }
            t *= 1.7;
        }
    }

    #[test]
    fn class_tags() {
        assert_eq!(ScalarFn::Zero.class_tag(), ClassTag::Zero);
        assert_eq!(ScalarFn::identity().class_tag(), ClassTag::KInfinity);
        assert!(ScalarFn::power(1.0, 2.0).unwrap().class_tag().is_class_k());
        assert!(!ScalarFn::Zero.class_tag().is_class_k());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(ScalarFn::piecewise_linear(vec![(0.0, 0.0)]).is_err());
        assert!(ScalarFn::piecewise_linear(vec![(0.1, 0.0), (1.0, 1.0)]).is_err());
        assert!(ScalarFn::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ScalarFn::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn piecewise_tail_extends_last_slope() {
        let f = ScalarFn::piecewise_linear(vec![(0.0, 0.0), (1.0, 2.0), (3.0, 3.0)]).unwrap();
        assert_eq!(f.eval(5.0), 4.0);
        assert_eq!(f.inverse(4.0).unwrap(), 5.0);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.min_slope_on(0.5, 0.9), 2.0);
        assert_eq!(f.min_slope_on(0.5, 4.0), 0.5);
    }

    #[test]
    fn min_slope_of_square_root_gain() {
        let f = ScalarFn::power(0.5, 0.5).unwrap();
        assert!((f.min_slope_on(0.25, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn id_plus_inverse() {
        assert_eq!(ScalarFn::identity().id_plus_inverse(3.0), 1.5);
        let f = ScalarFn::power(1.0, 2.0).unwrap();
        // x + x² = 6 at x = 2
        assert!((f.id_plus_inverse(6.0) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn parse_cli_form() {
        assert_eq!("linear:0.5".parse::<ScalarFn>().unwrap(), ScalarFn::Linear { a: 0.5 });
        assert_eq!("power:0.5,2".parse::<ScalarFn>().unwrap(), ScalarFn::Power { a: 0.5, p: 2.0 });
        assert_eq!("zero".parse::<ScalarFn>().unwrap(), ScalarFn::Zero);
        let pl: ScalarFn = "piecewise-linear:0/0,1/2,3/3.5".parse().unwrap();
        assert_eq!(pl.eval(1.0), 2.0);
        assert!("cubic:1".parse::<ScalarFn>().is_err());
        assert!("linear:-1".parse::<ScalarFn>().is_err());
    }

    #[test]
    fn json_shape() {
        let f = ScalarFn::Linear { a: 2.0 };
        assert_eq!(serde_json::to_string(&f).unwrap(), r#"{"kind":"linear","params":{"a":2.0}}"#);
        let pl: ScalarFn =
            serde_json::from_str(r#"{"kind":"piecewise-linear","params":{"breakpoints":[[0,0],[1,2]]}}"#).unwrap();
        assert_eq!(pl.eval(0.5), 1.0);
        let bad = serde_json::from_str::<ScalarFn>(
            r#"{"kind":"piecewise-linear","params":{"breakpoints":[[0,0],[1,0]]}}"#,
        );
        assert!(bad.is_err());
        let zero: ScalarFn = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert!(zero.is_zero());
    }
}
