//! Quadratic-time reference implementations written straight from the
//! definitions, and a generator of small random designs.

#![allow(dead_code)]

use endophy::estimators::{self, Design, PreAvgConfig, WeightFn};
use endophy::noise::ObservationSeries;
use endophy::sampling::{refresh, SamplingTimes};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn tri(x: f64) -> f64 {
    x.min(1.0 - x)
}

pub fn quartic(x: f64) -> f64 {
    x * x * (1.0 - x) * (1.0 - x)
}

pub fn quartic_prime(x: f64) -> f64 {
    2.0 * x * (1.0 - x) * (1.0 - 2.0 * x)
}

/// `Σ_{p=1}^{k−1} w(p/k)(V_{i+p} − V_{i+p−1})` for one window.
pub fn bar(v: &[f64], i: usize, k: usize, w: fn(f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for p in 1..k {
        acc += w(p as f64 / k as f64) * (v[i + p] - v[i + p - 1]);
    }
    acc
}

pub fn psi_hy(k: usize) -> f64 {
    let mut s = 0.0;
    for p in 1..k {
        s += tri(p as f64 / k as f64);
    }
    s / k as f64
}

pub fn psi2(k: usize) -> f64 {
    let mut s = 0.0;
    for p in 1..k {
        s += tri(p as f64 / k as f64).powi(2);
    }
    s / k as f64
}

pub fn psi1(k: usize) -> f64 {
    let mut s = 0.0;
    for p in 1..=k {
        s += (tri(p as f64 / k as f64) - tri((p - 1) as f64 / k as f64)).powi(2);
    }
    s * k as f64
}

/// Double sum over all window pairs with overlapping spans
/// `[τ^i, τ^{i+k}]`, each pre-averaged window ending on an observed
/// `τ^{i+k}`.
pub fn phy_brute(st: &[f64], sv: &[f64], tt: &[f64], tv: &[f64], k: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..st.len() {
        for j in 0..tt.len() {
            if i + k >= st.len() || j + k >= tt.len() {
                continue;
            }
            if st[i] < tt[j + k] && tt[j] < st[i + k] {
                acc += bar(sv, i, k, tri) * bar(tv, j, k, tri);
            }
        }
    }
    acc * (psi_hy(k) * k as f64).powi(-2)
}

/// Refresh indices by exhaustive search: `Ŝ^k = min{S^i > R^{k−1}}`.
pub fn refresh_brute(s: &[f64], t: &[f64]) -> (Vec<f64>, Vec<usize>, Vec<usize>) {
    let mut r = vec![s[0].max(t[0])];
    let (mut si, mut ti) = (vec![0], vec![0]);
    loop {
        let prev = *r.last().unwrap();
        let a = (0..s.len()).filter(|&i| s[i] > prev).min_by(|&a, &b| s[a].total_cmp(&s[b]));
        let b = (0..t.len()).filter(|&j| t[j] > prev).min_by(|&a, &b| t[a].total_cmp(&t[b]));
        match (a, b) {
            (Some(a), Some(b)) => {
                r.push(s[a].max(t[b]));
                si.push(a);
                ti.push(b);
            }
            _ => return (r, si, ti),
        }
    }
}

/// Cumulative `(time, value)` path of `scale · Σ_{m ≤ idx} terms[m]`.
fn cumulate(terms: &[(f64, f64)], scale: f64) -> Vec<(f64, f64)> {
    let mut acc = 0.0;
    terms
        .iter()
        .map(|&(t, v)| {
            acc += v;
            (t, acc * scale)
        })
        .collect()
}

pub struct RefreshBrute {
    pub r: Vec<f64>,
    pub sh: Vec<f64>,
    pub th: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn refresh_designs(s: &[f64], sv: &[f64], t: &[f64], tv: &[f64]) -> RefreshBrute {
    let (r, si, ti) = refresh_brute(s, t);
    RefreshBrute {
        r,
        sh: si.iter().map(|&i| s[i]).collect(),
        th: ti.iter().map(|&j| t[j]).collect(),
        x: si.iter().map(|&i| sv[i]).collect(),
        y: ti.iter().map(|&j| tv[j]).collect(),
    }
}

/// `−(1/k²) Σ ΔX_m ΔX_{m+1}` stamped at the later tick.
pub fn gamma_own_brute(times: &[f64], v: &[f64], k: usize) -> Vec<(f64, f64)> {
    let terms: Vec<(f64, f64)> = (1..v.len() - 1)
        .map(|m| (times[m + 1], (v[m] - v[m - 1]) * (v[m + 1] - v[m])))
        .collect();
    cumulate(&terms, -1.0 / (k as f64).powi(2))
}

/// `−(1/(2k²)) Σ (ΔX_m ΔY_{m+1} + ΔX_{m+1} ΔY_m)` stamped at `R^{m+1}`.
pub fn gamma_cross_brute(b: &RefreshBrute, k: usize) -> Vec<(f64, f64)> {
    let dx = |m: usize| b.x[m] - b.x[m - 1];
    let dy = |m: usize| b.y[m] - b.y[m - 1];
    let terms: Vec<(f64, f64)> = (1..b.r.len() - 1)
        .map(|m| (b.r[m + 1], dx(m) * dy(m + 1) + dx(m + 1) * dy(m)))
        .collect();
    cumulate(&terms, 0.5 * (-1.0 / (k as f64).powi(2)))
}

/// `(1/k) Σ_i X̄_α^i Ȳ_β^i` stamped at `R^{i+k−1}`.
pub fn xi_brute(b: &RefreshBrute, k: usize, alpha: fn(f64) -> f64, beta: fn(f64) -> f64) -> Vec<(f64, f64)> {
    let terms: Vec<(f64, f64)> = (0..=b.r.len() - k)
        .map(|i| (b.r[i + k - 1], bar(&b.x, i, k, alpha) * bar(&b.y, i, k, beta)))
        .collect();
    cumulate(&terms, 1.0 / k as f64)
}

pub fn mrc_brute(b: &RefreshBrute, k: usize) -> f64 {
    let xi = xi_brute(b, k, tri, tri).last().unwrap().1;
    let g = gamma_cross_brute(b, k).last().unwrap().1;
    let (p1, p2) = (psi1(k), psi2(k));
    1.0 / p2 * xi + -p1 / p2 * g
}

pub fn msrv_brute(v: &[f64], m: usize) -> f64 {
    let mf = m as f64;
    let mut total = 0.0;
    for i in 1..=m {
        let x = i as f64;
        let alpha = 12.0 * x * x / (mf * mf * mf - mf) - 6.0 * x / (mf * mf - 1.0) - 6.0 * x / (mf * mf * mf - mf);
        let mut s = 0.0;
        for j in i..v.len() {
            s += (v[j] - v[j - i]).powi(2);
        }
        total += alpha / x * s;
    }
    total
}

/// A small random bivariate instance. Half of them live on a coarse grid so
/// that ties between the two designs occur.
pub struct Instance {
    pub s: Vec<f64>,
    pub sv: Vec<f64>,
    pub t: Vec<f64>,
    pub tv: Vec<f64>,
    pub k: usize,
}

fn design(rng: &mut ChaCha8Rng, n: usize, grid: bool) -> Vec<f64> {
    let mut times = vec![0.0];
    let mut t = 0.0;
    for _ in 1..n {
        t += if grid {
            rng.random_range(1..4) as f64 / 64.0
        } else {
            rng.random_range(0.001..0.05)
        };
        times.push(t);
    }
    times
}

pub fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = seed % 2 == 0;
    let k = rng.random_range(2..=6);
    let ns = rng.random_range(k + 4..=60);
    let nt = rng.random_range(k + 4..=60);
    let s = design(&mut rng, ns, grid);
    let t = design(&mut rng, nt, grid);
    let mut walk = |n: usize| {
        let mut x = 0.0;
        (0..n)
            .map(|_| {
                x += rng.random_range(-1.0..1.0);
                x
            })
            .collect::<Vec<f64>>()
    };
    let sv = walk(ns);
    let tv = walk(nt);
    Instance { s, sv, t, tv, k }
}

fn series(times: &[f64], values: &[f64]) -> ObservationSeries {
    ObservationSeries::from_values(times.to_vec(), values.to_vec(), 0.01).unwrap()
}

fn steps(s: &estimators::StepSeries) -> Vec<(f64, f64)> {
    s.times.iter().copied().zip(s.values.iter().copied()).collect()
}

/// Compares every estimator of one instance with its reference. Returns a
/// description of the first mismatch.
pub fn check_instance(seed: u64) -> Result<(), String> {
    let Instance { s, sv, t, tv, k } = instance(seed);
    let fail = |what: &str, a: f64, b: f64| Err(format!("seed {seed}, k {k}: {what} {a:e} != {b:e}"));
    let cfg = PreAvgConfig::with_k(k, 1.0, 0.01).unwrap();

    let raw = estimators::phy(
        &Design { times: s.clone(), values: sv.clone() },
        &Design { times: t.clone(), values: tv.clone() },
        &cfg,
    )
    .map_err(|e| e.to_string())?
    .value;
    let want = phy_brute(&s, &sv, &t, &tv, k);
    if raw != want {
        return fail("phy", raw, want);
    }

    let horizon = s.last().unwrap().min(*t.last().unwrap());
    let cut = |x: &[f64], v: &[f64]| {
        let n = x.partition_point(|&u| u <= horizon);
        (x[..n].to_vec(), v[..n].to_vec())
    };
    let (s2, sv2) = cut(&s, &sv);
    let (t2, tv2) = cut(&t, &tv);
    let b = refresh_designs(&s2, &sv2, &t2, &tv2);
    let st = SamplingTimes::new(s.clone(), 0.01, "s").unwrap();
    let tt = SamplingTimes::new(t.clone(), 0.01, "t").unwrap();
    let rd = refresh(&st, &tt, horizon).map_err(|e| e.to_string())?;
    if rd.r != b.r || rd.s_hat != b.sh || rd.t_hat != b.th {
        return Err(format!("seed {seed}: refresh times differ"));
    }
    let (xo, yo) = (series(&s, &sv), series(&t, &tv));
    if b.r.len() > k + 1 {
        let pr = estimators::phy_refresh(&xo, &yo, &rd, &cfg).map_err(|e| e.to_string())?.value;
        let want = phy_brute(&b.sh, &b.x, &b.th, &b.y, k);
        if pr != want {
            return fail("phy_refresh", pr, want);
        }
    }
    if b.r.len() >= k + 1 {
        let m = estimators::mrc(&xo, &yo, &rd, &cfg).map_err(|e| e.to_string())?.value;
        let want = mrc_brute(&b, k);
        if m != want {
            return fail("mrc", m, want);
        }
        let xs = Design::refresh_x(&xo, &rd);
        let ys = Design::refresh_y(&yo, &rd);
        let g = estimators::gamma1(&xs, &ys, &rd, k).map_err(|e| e.to_string())?;
        if steps(&g.g11) != gamma_own_brute(&b.sh, &b.x, k)
            || steps(&g.g22) != gamma_own_brute(&b.th, &b.y, k)
            || steps(&g.g12) != gamma_cross_brute(&b, k)
        {
            return Err(format!("seed {seed}: autocovariance paths differ"));
        }
        let f = WeightFn::quartic_f();
        let df = f.derivative().unwrap();
        let xi = estimators::xi(&xs, &ys, &rd, &df, &f, k).map_err(|e| e.to_string())?;
        if steps(&xi) != xi_brute(&b, k, quartic_prime, quartic) {
            return Err(format!("seed {seed}: Ξ paths differ"));
        }
    }
    let m = (2 + seed as usize % 8).min(sv.len() - 1);
    let got = estimators::msrv(&sv, m).map_err(|e| e.to_string())?;
    let want = msrv_brute(&sv, m);
    if got != want {
        return fail("msrv", got, want);
    }
    Ok(())
}
