use std::ops::RangeInclusive;

use serde::Serialize;

use crate::ffield::prime_power;

const SAFETY: f64 = 1e-12;

/// The Q-ary entropy H_Q(δ) for 0 ≤ δ ≤ 1.
pub fn entropy(qq: f64, d: f64) -> f64 {
    if d <= 0.0 {
        return 0.0;
    }
    let lq = qq.ln();
    let mut h = d * (qq - 1.0).ln() - d * d.ln();
    if d < 1.0 {
        h -= (1.0 - d) * (1.0 - d).ln();
    }
    h / lq
}

#[derive(Clone, Debug, Serialize)]
pub struct GvVerdict {
    pub q: u64,
    /// 1 − (kq+k−1)/(q²−q), the value of R + δ along the family.
    pub line: f64,
    pub beats: bool,
    pub best_delta: f64,
    /// max over δ of R(δ) − (1 − H_{q²}(δ)); positive means above GV.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GvReport {
    pub k: u64,
    pub verdicts: Vec<GvVerdict>,
    pub smallest: Option<u64>,
}

/// Whether the line R + δ = 1 − (kq+k−1)/(q²−q) rises strictly above the
/// Gilbert-Varshamov curve over F_{q²} somewhere with R ≥ 0.
pub fn gv_verdict(q: u64, k: u64, grid: usize) -> GvVerdict {
    let (qf, kf) = (q as f64, k as f64);
    let qq = qf * qf;
    let line = 1.0 - (kf * qf + kf - 1.0) / (qq - qf);
    let hi = line.min(1.0 - 1.0 / qq);
    if hi <= 0.0 {
        return GvVerdict { q, line, beats: false, best_delta: 0.0, margin: f64::NEG_INFINITY };
    }
    let gap = |d: f64| (line - d) - (1.0 - entropy(qq, d));
    let grid = grid.max(4);
    let step = hi / grid as f64;
    let (mut best_i, mut best) = (grid, gap(hi));
    for i in 1..grid {
        let g = gap(step * i as f64);
        if g > best {
            best = g;
            best_i = i;
        }
    }
    // The gap is concave in δ, so ternary search inside the neighbouring
    // cells finds the maximum.
    let mut a = step * best_i.saturating_sub(1) as f64;
    let mut b = (step * (best_i + 1) as f64).min(hi);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if gap(m1) < gap(m2) {
            a = m1;
        } else {
            b = m2;
        }
    }
    let d = 0.5 * (a + b);
    let g = gap(d).max(best);
    let best_delta = if gap(d) >= best { d } else { step * best_i as f64 };
    GvVerdict { q, line, beats: g > SAFETY, best_delta, margin: g }
}

/// Verdicts for every prime power in `qs`, and the smallest that beats GV.
pub fn gv_compare(k: u64, qs: RangeInclusive<u64>, grid: usize) -> GvReport {
    let verdicts: Vec<GvVerdict> = qs.filter(|&q| q >= 2 && prime_power(q).is_some()).map(|q| gv_verdict(q, k, grid)).collect();
    let smallest = verdicts.iter().find(|v| v.beats).map(|v| v.q);
    GvReport { k, verdicts, smallest }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_endpoints() {
        assert_eq!(entropy(16.0, 0.0), 0.0);
        assert!((entropy(16.0, 15.0 / 16.0) - 1.0).abs() < 1e-12);
        assert!((entropy(2.0, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_values() {
        assert_eq!(gv_compare(2, 2..=64, 2000).smallest, Some(19));
        assert_eq!(gv_compare(3, 2..=64, 2000).smallest, Some(32));
        assert!(!gv_verdict(4, 2, 2000).beats);
    }
}
