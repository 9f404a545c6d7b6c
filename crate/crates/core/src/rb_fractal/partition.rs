use serde::{Deserialize, Serialize};

use crate::compact_set::Interval;
use crate::error::{Error, Result};

/// Knots `u_1 < … < u_N` with `N >= 3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Partition {
    points: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Partition {
    type Error = Error;

    fn try_from(points: Vec<f64>) -> Result<Self> {
        Partition::new(points)
    }
}

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Self {
        p.points
    }
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a partition needs at least 3 knots, got {}",
                points.len()
            )));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidInput("partition knots must be finite".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "partition knots must be strictly increasing".into(),
            ));
        }
        Ok(Partition { points })
    }

    /// `n` equally spaced knots from `lo` to `hi`.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Partition::new(vec![lo]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        Partition::new(
            (0..n)
                .map(|k| if k + 1 == n { hi } else { lo + step * k as f64 })
                .collect(),
        )
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of knots `N`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn span(&self) -> Interval {
        Interval::new(self.first(), self.last())
    }

    /// Widest gap between consecutive knots.
    pub fn max_step(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Index `n` (0-based) of the piece `[u_n, u_{n+1})` containing `u`;
    /// the right end belongs to the last piece.
    pub fn piece_of(&self, u: f64) -> usize {
        let k = self.points.partition_point(|&p| p <= u);
        k.clamp(1, self.points.len() - 1) - 1
    }
}

/// The affine maps `L_n(u) = a_n u + b_n` sending `[u_1, u_N]` onto
/// `[u_n, u_{n+1}]`, increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMaps {
    a: Vec<f64>,
    b: Vec<f64>,
    knots: Vec<f64>,
}

impl AffineMaps {
    pub fn new(partition: &Partition) -> Self {
        let u = partition.points();
        let (u1, un) = (partition.first(), partition.last());
        let len = un - u1;
        let a = u.windows(2).map(|w| (w[1] - w[0]) / len).collect();
        let b = u.windows(2).map(|w| (w[0] * un - u1 * w[1]) / len).collect();
        AffineMaps {
            a,
            b,
            knots: u.to_vec(),
        }
    }

    /// Number of maps, `N - 1`.
    pub fn count(&self) -> usize {
        self.a.len()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.a
    }

    pub fn offsets(&self) -> &[f64] {
        &self.b
    }

    pub fn max_slope(&self) -> f64 {
        self.a.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_slope(&self) -> f64 {
        self.a.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `L_n(u)`, exact at the interval ends.
    #[inline]
    pub fn apply(&self, n: usize, u: f64) -> f64 {
        let last = self.knots.len() - 1;
        if u == self.knots[0] {
            self.knots[n]
        } else if u == self.knots[last] {
            self.knots[n + 1]
        } else {
            self.a[n] * u + self.b[n]
        }
    }

    /// `L_n^{-1}(x)`, clamped to `[u_1, u_N]`, exact at the piece ends.
    #[inline]
    pub fn invert(&self, n: usize, x: f64) -> f64 {
        let last = self.knots.len() - 1;
        if x == self.knots[n] {
            self.knots[0]
        } else if x == self.knots[n + 1] {
            self.knots[last]
        } else {
            ((x - self.b[n]) / self.a[n]).clamp(self.knots[0], self.knots[last])
        }
    }
}
