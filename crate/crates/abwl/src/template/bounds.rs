use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Template;
use crate::lattice::{IntMatrix, LatticeError};
use crate::words::Morphism;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Longest image length.
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// `⌊max ‖d_i‖₂⌋` over all members.
    pub delta: i64,
    /// Largest `|Σ_{r=i}^{j} d_r·(1,…,1)|` over all members.
    pub maxsum: i64,
    pub bound_original: i64,
    pub bound_improved: i64,
}

impl BoundReport {
    /// The same report with `Δ` replaced, for reproducing hand-computed bounds.
    pub fn with_delta(mut self, delta: i64) -> Self {
        self.delta = delta;
        self.bound_original = original_bound(self.n, self.k, self.m, delta);
        self
    }
}

pub fn original_bound(n: usize, k: usize, m: usize, delta: i64) -> i64 {
    let (n, k, m) = (n as i64, k as i64, m as i64);
    n + k - 1 + (k - 1) * (n - 2 + m * k * delta)
}

pub fn improved_bound(n: usize, k: usize, maxsum: i64) -> i64 {
    let (n, k) = (n as i64, k as i64);
    n + k - 1 + (k - 1) * (n - 2 + maxsum)
}

fn isqrt(x: i64) -> i64 {
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

/// `⌊max ‖d_i‖₂⌋`.
pub fn template_delta(t: &Template) -> i64 {
    t.diffs()
        .map(|d| isqrt(d.iter().map(|x| x * x).sum()))
        .max()
        .unwrap_or(0)
}

/// Spread of the partial sums of `d_r·(1,…,1)`, i.e. the largest absolute
/// sum over a contiguous run of differences.
pub fn template_maxsum(t: &Template) -> i64 {
    let (mut lo, mut hi, mut cur) = (0i64, 0i64, 0i64);
    for d in t.diffs() {
        cur += d.iter().sum::<i64>();
        lo = lo.min(cur);
        hi = hi.max(cur);
    }
    hi - lo
}

pub fn search_bounds<'a>(
    members: impl IntoIterator<Item = &'a Template>,
    h: &Morphism,
    k: usize,
) -> BoundReport {
    let (delta, maxsum) = members.into_iter().fold((0, 0), |(d, s), t| {
        (d.max(template_delta(t)), s.max(template_maxsum(t)))
    });
    let n = h.max_image_len();
    let m = h.m();
    BoundReport {
        n,
        k,
        m,
        delta,
        maxsum,
        bound_original: original_bound(n, k, m, delta),
        bound_improved: improved_bound(n, k, maxsum),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorNorm {
    pub value: f64,
    /// `value < 1` with a margin of `1e-9`.
    pub contracting: bool,
}

/// Spectral norm of `M^{-1}`.
///
/// For 2×2 matrices this is `σ_max(adj M)/|det M|` with
/// `σ_max(B)² = (S + √(S² − 4 det(B)²))/2` and `S` the squared Frobenius norm;
/// larger matrices go through an SVD.
pub fn operator_norm_inverse(m: &IntMatrix) -> Result<OperatorNorm, LatticeError> {
    let det = m.det()?;
    if det == 0 {
        return Err(LatticeError::SingularMatrix);
    }
    let value = if m.rows() == 2 {
        let adj = m.adjugate()?;
        let s: f64 = (0..2)
            .flat_map(|i| adj.row(i).to_vec())
            .map(|x| (x * x) as f64)
            .sum();
        let d = det as f64;
        let sigma2 = (s + (s * s - 4.0 * d * d).max(0.0).sqrt()) / 2.0;
        sigma2.sqrt() / d.abs()
    } else {
        let n = m.rows();
        let a = DMatrix::from_fn(n, n, |i, j| m.get(i, j) as f64);
        let inv = a.try_inverse().ok_or(LatticeError::SingularMatrix)?;
        inv.singular_values().max()
    };
    Ok(OperatorNorm {
        value,
        contracting: value < 1.0 - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn closed_form_norm() {
        let n = operator_norm_inverse(&mat(&[&[5, 2], &[2, 3]])).unwrap();
        assert!((n.value - (4.0 + 5f64.sqrt()) / 11.0).abs() < 1e-9);
        assert!(n.contracting);
        let id = operator_norm_inverse(&IntMatrix::identity(2)).unwrap();
        assert!((id.value - 1.0).abs() < 1e-12);
        assert!(!id.contracting);
    }

    #[test]
    fn svd_agrees_with_closed_form() {
        let m = mat(&[&[4, 1, 0], &[3, 3, 0], &[0, 0, 1]]);
        let two = operator_norm_inverse(&mat(&[&[4, 1], &[3, 3]]))
            .unwrap()
            .value;
        // The extra block has inverse norm 1, which dominates.
        assert!((operator_norm_inverse(&m).unwrap().value - two.max(1.0)).abs() < 1e-9);
        assert!(operator_norm_inverse(&mat(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(improved_bound(7, 8, 1), 56);
        assert_eq!(original_bound(7, 8, 2, 2), 273);
        assert_eq!(improved_bound(11, 14, 1), 154);
        assert_eq!(original_bound(11, 14, 2, 2), 869);
    }

    #[test]
    fn delta_and_maxsum() {
        let ab = Alphabet::binary();
        let t = Template::parse(
            &ab,
            "[a,a,b,a,ε,a,b,a,a,(0,-1),(1,0),(-1,1),(0,0),(1,-1),(-1,0),(0,1)]",
        )
        .unwrap();
        assert_eq!(template_delta(&t), 1);
        assert_eq!(template_maxsum(&t), 1);
        let u = Template::parse(&ab, "[ε,ε,ε,ε,(2,1),(1,1)]").unwrap();
        assert_eq!(template_delta(&u), 2);
        assert_eq!(template_maxsum(&u), 5);
    }
}
