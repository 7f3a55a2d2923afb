use serde::{Deserialize, Serialize};

use isoshell_core::error::{Error, Result};

/// Relative tolerance used to merge nearly equal breakpoints.
pub const KNOT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KnotRepr")]
pub struct KnotVector {
    knots: Vec<f64>,
    degree: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KnotRepr {
    knots: Vec<f64>,
    degree: usize,
}

impl TryFrom<KnotRepr> for KnotVector {
    type Error = Error;
    fn try_from(r: KnotRepr) -> Result<Self> {
        KnotVector::new(r.knots, r.degree)
    }
}

impl KnotVector {
    pub fn new(knots: Vec<f64>, degree: usize) -> Result<Self> {
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(Error::KnotVector("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::KnotVector("knots must be non-decreasing".into()));
        }
        if knots.len() < 2 * (degree + 1) {
            return Err(Error::KnotVector(format!("{} knots cannot carry degree {degree}", knots.len())));
        }
        let n = knots.len() - degree - 1;
        if knots[degree] >= knots[n] {
            return Err(Error::KnotVector("zero-length parameter domain".into()));
        }
        for w in knots.chunk_by(|a, b| a == b) {
            if w.len() > degree + 1 {
                return Err(Error::KnotMultiplicity { knot: w[0], max: degree + 1 });
            }
        }
        Ok(Self { knots, degree })
    }

    /// Open knot vector over [0, 1] with `elements` uniform spans and maximal smoothness.
    pub fn uniform(degree: usize, elements: usize) -> Self {
        let breaks: Vec<f64> = (0..=elements).map(|i| i as f64 / elements as f64).collect();
        Self::from_breakpoints(degree, &breaks)
    }

    /// Open knot vector with maximal smoothness on the given strictly increasing breakpoints.
    pub fn from_breakpoints(degree: usize, breaks: &[f64]) -> Self {
        assert!(breaks.len() >= 2, "need at least two breakpoints");
        let mut knots = vec![breaks[0]; degree + 1];
        knots.extend_from_slice(&breaks[1..breaks.len() - 1]);
        knots.extend(std::iter::repeat_n(breaks[breaks.len() - 1], degree + 1));
        Self { knots, degree }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[self.degree], self.knots[self.num_basis()])
    }

    pub fn is_open(&self) -> bool {
        let p = self.degree;
        let n = self.knots.len();
        self.knots[..=p].iter().all(|&k| k == self.knots[0])
            && self.knots[n - p - 1..].iter().all(|&k| k == self.knots[n - 1])
    }

    /// Distinct knot values inside the domain, including both ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.domain();
        let mut out: Vec<f64> = Vec::new();
        for &k in &self.knots {
            if k < a || k > b {
                continue;
            }
            if out.last().is_none_or(|&l| k > l) {
                out.push(k);
            }
        }
        out
    }

    pub fn num_elements(&self) -> usize {
        self.breakpoints().len() - 1
    }

    pub fn multiplicity(&self, u: f64) -> usize {
        self.knots.iter().filter(|&&k| k == u).count()
    }

    /// Index `s` with `knots[s] <= u < knots[s+1]`, clamped so the last span is closed.
    pub fn find_span(&self, u: f64) -> usize {
        let p = self.degree;
        let n = self.num_basis();
        if u >= self.knots[n] {
            let mut s = n - 1;
            while s > p && self.knots[s] == self.knots[s + 1] {
                s -= 1;
            }
            return s;
        }
        if u <= self.knots[p] {
            let mut s = p;
            while s + 1 < n && self.knots[s + 1] <= u {
                s += 1;
            }
            return s;
        }
        let (mut lo, mut hi) = (p, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if u < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Checks `u` against the domain, snapping values within round-off of an end.
    pub fn check(&self, u: f64) -> Result<f64> {
        let (a, b) = self.domain();
        let tol = KNOT_TOL * (b - a).max(1.0);
        if u < a - tol || u > b + tol || !u.is_finite() {
            return Err(Error::Domain { value: u, lo: a, hi: b });
        }
        Ok(u.clamp(a, b))
    }

    /// Element index containing `u` (0-based among breakpoint intervals).
    pub fn element_of(&self, u: f64) -> usize {
        let br = self.breakpoints();
        let mut e = match br.binary_search_by(|x| x.partial_cmp(&u).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        if e >= br.len() - 1 {
            e = br.len() - 2;
        }
        e
    }

    /// Affinely maps the knots onto [a, b].
    pub fn rescaled(&self, a: f64, b: f64) -> Self {
        let (lo, hi) = self.domain();
        let knots = self.knots.iter().map(|&k| a + (k - lo) / (hi - lo) * (b - a)).collect();
        Self { knots, degree: self.degree }
    }

    /// Inserts the interior breakpoints of a dyadic subdivision `levels` times.
    pub fn dyadic_knots(&self, levels: usize) -> Vec<f64> {
        let mut br = self.breakpoints();
        for _ in 0..levels {
            let mut next = Vec::with_capacity(2 * br.len());
            for w in br.windows(2) {
                next.push(w[0]);
                next.push(0.5 * (w[0] + w[1]));
            }
            next.push(*br.last().unwrap());
            br = next;
        }
        let old = self.breakpoints();
        br.into_iter().filter(|b| !old.iter().any(|o| (o - b).abs() <= KNOT_TOL)).collect()
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        (0..self.num_basis())
            .map(|i| {
                if p == 0 {
                    0.5 * (self.knots[i] + self.knots[i + 1])
                } else {
                    self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_domain() {
        let kv = KnotVector::new(vec![0.0, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(kv.num_basis(), 4);
        assert_eq!(kv.domain(), (0.0, 1.0));
        assert_eq!(kv.breakpoints(), vec![0.0, 0.5, 1.0]);
        assert!(kv.is_open());
        assert_eq!(kv.find_span(0.0), 2);
        assert_eq!(kv.find_span(0.5), 3);
        assert_eq!(kv.find_span(1.0), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(KnotVector::new(vec![0.0, 1.0, 0.5, 1.0], 1).is_err());
        assert!(KnotVector::new(vec![0.0, 0.0, 0.0, 0.0], 1).is_err());
        assert!(KnotVector::new(vec![0.0, 1.0], 1).is_err());
        assert!(KnotVector::new(vec![0.0, 0.0, 0.5, 0.5, 0.5, 1.0, 1.0], 1).is_err());
    }

    #[test]
    fn dyadic_counts() {
        let kv = KnotVector::uniform(3, 4);
        assert_eq!(kv.dyadic_knots(4).len(), 64 - 4);
    }
}
