//! First-exit detection of a two-sided band by a path known on a grid.
//!
//! Between grid points the driver is a Brownian bridge. A fine step is
//! bisected (by sampling the bridge midpoint) only while the band could
//! plausibly be crossed inside it; at the deepest level the crossing decision
//! is drawn from the exact bridge crossing probability. Crossings therefore
//! land exactly on the barrier, and the sampled increments have the two-point
//! law of the continuous-time scheme rather than the overshoot that a plain
//! grid scan would produce.

use rand::Rng;
use rand_distr::StandardNormal;

/// Tuning of the bridge refinement.
#[derive(Debug, Clone, Copy)]
pub struct Refinement {
    /// Maximum number of bisections per fine step.
    pub max_depth: u32,
    /// Segments whose crossing probability is below this are skipped.
    pub skip_prob: f64,
}

impl Default for Refinement {
    fn default() -> Self {
        Self {
            max_depth: 12,
            skip_prob: 1e-9,
        }
    }
}

/// One detected exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub time: f64,
    /// Driver value at the exit (exactly on the barrier).
    pub level: f64,
    /// `true` for an exit through the lower barrier.
    pub down: bool,
}

struct Band<'a, B> {
    reference: f64,
    lo: f64,
    hi: f64,
    next_band: &'a mut B,
    out: Vec<Crossing>,
}

impl<B: FnMut() -> Option<(f64, f64)>> Band<'_, B> {
    /// Moves the band to a new reference level. Returns `false` when the
    /// barrier source is exhausted.
    fn reset(&mut self, level: f64) -> bool {
        match (self.next_band)() {
            Some((down, up)) => {
                self.reference = level;
                self.lo = level - down;
                self.hi = level + up;
                true
            }
            None => false,
        }
    }
}

/// Scans `values` (driver on `times`, local variance rate `rate[k]` on step
/// `k`) and returns every exit of the moving band. `next_band` yields the
/// distances `(down, up)` of the next band below and above its reference;
/// returning `None` stops the scan.
pub fn scan<R: Rng, B: FnMut() -> Option<(f64, f64)>>(
    times: &[f64],
    values: &[f64],
    rate: &[f64],
    mut next_band: B,
    refinement: Refinement,
    rng: &mut R,
) -> Vec<Crossing> {
    let Some((d0, u0)) = next_band() else {
        return Vec::new();
    };
    let start = values[0];
    let mut band = Band {
        reference: start,
        lo: start - d0,
        hi: start + u0,
        next_band: &mut next_band,
        out: Vec::new(),
    };
    let mut live = true;
    for k in 0..times.len() - 1 {
        if !live {
            break;
        }
        live = walk(
            &mut band,
            (times[k], values[k]),
            (times[k + 1], values[k + 1]),
            rate[k],
            0,
            refinement,
            rng,
        );
    }
    band.out
}

fn crossing_probs(ma: f64, mb: f64, lo: f64, hi: f64, var: f64) -> (f64, f64) {
    if var <= 0.0 {
        return (0.0, 0.0);
    }
    let p_hi = (-2.0 * (hi - ma) * (hi - mb) / var).exp();
    let p_lo = (-2.0 * (ma - lo) * (mb - lo) / var).exp();
    (p_lo, p_hi)
}

/// Processes the bridge segment `a -> b`. Returns `false` once the band
/// source is exhausted.
fn walk<R: Rng, B: FnMut() -> Option<(f64, f64)>>(
    band: &mut Band<'_, B>,
    a: (f64, f64),
    b: (f64, f64),
    rate: f64,
    depth: u32,
    cfg: Refinement,
    rng: &mut R,
) -> bool {
    let (ta, ma) = a;
    let (tb, mb) = b;
    let dt = tb - ta;
    if dt <= 0.0 {
        return true;
    }
    let outside = mb <= band.lo || mb >= band.hi;
    let (p_lo, p_hi) = crossing_probs(ma, mb, band.lo, band.hi, rate * dt);
    if !outside && p_lo + p_hi < cfg.skip_prob {
        return true;
    }
    if depth < cfg.max_depth {
        let tm = 0.5 * (ta + tb);
        let z: f64 = rng.sample(StandardNormal);
        let mm = 0.5 * (ma + mb) + (rate * dt * 0.25).sqrt() * z;
        if !walk(band, a, (tm, mm), rate, depth + 1, cfg, rng) {
            return false;
        }
        return walk(band, (tm, mm), b, rate, depth + 1, cfg, rng);
    }
    // Leaf: decide the crossing inside this tiny segment.
    let hit = if outside {
        let down = mb <= band.lo;
        let level = if down { band.lo } else { band.hi };
        let w = ((level - ma) / (mb - ma)).clamp(0.0, 1.0);
        Some((ta + w * dt, level, down))
    } else {
        let p = (p_lo + p_hi).min(1.0);
        if rng.random::<f64>() < p {
            let down = rng.random::<f64>() * (p_lo + p_hi) < p_lo;
            let level = if down { band.lo } else { band.hi };
            Some((ta + 0.5 * dt, level, down))
        } else {
            None
        }
    };
    match hit {
        None => true,
        Some((t, level, down)) => {
            band.out.push(Crossing { time: t, level, down });
            if !band.reset(level) {
                return false;
            }
            if t < tb {
                walk(band, (t, level), b, rate, depth, cfg, rng)
            } else {
                true
            }
        }
    }
}
