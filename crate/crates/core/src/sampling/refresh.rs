//! Refresh times and the next-tick interpolated designs built on them.

use crate::error::{Error, Result};

use super::SamplingTimes;

/// Refresh-time synchronization of two designs.
///
/// Index `k` runs over `0..=K`. Entries with `k = 0` are definitional edges:
/// `s_check`, `t_check`, `gamma`, `i_check`, `j_check` hold 0 there.
#[derive(Debug, Clone, PartialEq)]
pub struct RefreshData {
    pub r: Vec<f64>,
    pub s_hat: Vec<f64>,
    pub t_hat: Vec<f64>,
    /// Positions of `Ŝ^k` (resp. `T̂^k`) in the raw designs.
    pub s_idx: Vec<usize>,
    pub t_idx: Vec<usize>,
    /// Last raw epoch strictly before `Ŝ^k` (resp. `T̂^k`).
    pub s_check: Vec<f64>,
    pub t_check: Vec<f64>,
    /// `|Γ^k| = R^k − R^{k−1}`.
    pub gamma: Vec<f64>,
    /// `|Ǐ^k| = Ŝ^k − Š^k` and `|J̌^k| = T̂^k − Ť^k`.
    pub i_check: Vec<f64>,
    pub j_check: Vec<f64>,
    /// Length of `(Ǐ^k∩J̌^k) ∪ (Ǐ^{k+1}∩J̌^k) ∪ (Ǐ^k∩J̌^{k+1})`.
    pub star: Vec<f64>,
    pub horizon: f64,
    pub b_n: f64,
}

impl RefreshData {
    /// Number of refresh times `K + 1`.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `true` when `Ŝ^k = T̂^k`.
    pub fn coincide(&self, k: usize) -> bool {
        self.s_hat[k] == self.t_hat[k]
    }
}

/// Builds the refresh data of the two designs restricted to `[0, horizon]`.
pub fn refresh(s: &SamplingTimes, t: &SamplingTimes, horizon: f64) -> Result<RefreshData> {
    let st = &s.times[..s.times.partition_point(|&x| x <= horizon)];
    let tt = &t.times[..t.times.partition_point(|&x| x <= horizon)];
    if st.len() < 2 || tt.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "refresh needs at least two epochs per design within the horizon (got {} and {})",
            st.len(),
            tt.len()
        )));
    }
    let cap = st.len().min(tt.len());
    let mut d = RefreshData {
        r: Vec::with_capacity(cap),
        s_hat: Vec::with_capacity(cap),
        t_hat: Vec::with_capacity(cap),
        s_idx: Vec::with_capacity(cap),
        t_idx: Vec::with_capacity(cap),
        s_check: Vec::with_capacity(cap),
        t_check: Vec::with_capacity(cap),
        gamma: Vec::with_capacity(cap),
        i_check: Vec::with_capacity(cap),
        j_check: Vec::with_capacity(cap),
        star: Vec::with_capacity(cap),
        horizon,
        b_n: s.b_n.max(t.b_n),
    };
    d.r.push(st[0].max(tt[0]));
    d.s_hat.push(st[0]);
    d.t_hat.push(tt[0]);
    d.s_idx.push(0);
    d.t_idx.push(0);
    d.s_check.push(0.0);
    d.t_check.push(0.0);
    d.gamma.push(0.0);
    d.i_check.push(0.0);
    d.j_check.push(0.0);
    let (mut i, mut j) = (0usize, 0usize);
    loop {
        let prev = *d.r.last().unwrap();
        while i < st.len() && st[i] <= prev {
            i += 1;
        }
        while j < tt.len() && tt[j] <= prev {
            j += 1;
        }
        if i == st.len() || j == tt.len() {
            break;
        }
        let r = st[i].max(tt[j]);
        d.r.push(r);
        d.s_hat.push(st[i]);
        d.t_hat.push(tt[j]);
        d.s_idx.push(i);
        d.t_idx.push(j);
        d.s_check.push(st[i - 1]);
        d.t_check.push(tt[j - 1]);
        d.gamma.push(r - prev);
        d.i_check.push(st[i] - st[i - 1]);
        d.j_check.push(tt[j] - tt[j - 1]);
    }
    let n = d.r.len();
    d.star = (0..n).map(|k| star_length(&d, k)).collect();
    Ok(d)
}

fn interval(lo: f64, hi: f64) -> Option<(f64, f64)> {
    (hi > lo).then_some((lo, hi))
}

fn intersect(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (a, b) = (a?, b?);
    interval(a.0.max(b.0), a.1.min(b.1))
}

/// Length of the union of up to three half-open intervals.
fn union_length(mut parts: Vec<(f64, f64)>) -> f64 {
    parts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut cur: Option<(f64, f64)> = None;
    for (lo, hi) in parts {
        cur = match cur {
            Some((clo, chi)) if lo <= chi => Some((clo, chi.max(hi))),
            Some((clo, chi)) => {
                total += chi - clo;
                Some((lo, hi))
            }
            None => Some((lo, hi)),
        };
    }
    if let Some((lo, hi)) = cur {
        total += hi - lo;
    }
    total
}

fn star_length(d: &RefreshData, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let i_k = interval(d.s_check[k], d.s_hat[k]);
    let j_k = interval(d.t_check[k], d.t_hat[k]);
    let (i_n, j_n) = if k + 1 < d.r.len() {
        (
            interval(d.s_check[k + 1], d.s_hat[k + 1]),
            interval(d.t_check[k + 1], d.t_hat[k + 1]),
        )
    } else {
        (None, None)
    };
    let parts: Vec<(f64, f64)> = [intersect(i_k, j_k), intersect(i_n, j_k), intersect(i_k, j_n)]
        .into_iter()
        .flatten()
        .collect();
    union_length(parts)
}
