//! Studentized statistics and their log and inverse transforms.

/// Why a statistic could not be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Undefined {
    NonPositiveVariance,
    NonPositiveEstimate,
    ZeroQuarticity,
}

impl Undefined {
    pub fn code(self) -> &'static str {
        match self {
            Undefined::NonPositiveVariance => "nonpositive_avar",
            Undefined::NonPositiveEstimate => "nonpositive_estimate",
            Undefined::ZeroQuarticity => "zero_rq",
        }
    }
}

type Stat = Result<f64, Undefined>;

fn sd(avar: f64) -> Result<f64, Undefined> {
    if avar > 0.0 {
        Ok(avar.sqrt())
    } else {
        Err(Undefined::NonPositiveVariance)
    }
}

/// `(est − target)/√avar`.
pub fn studentize(est: f64, target: f64, avar: f64) -> Stat {
    Ok((est - target) / sd(avar)?)
}

/// `(log est − log target)/(√avar/est)`.
pub fn log_stat(est: f64, target: f64, avar: f64) -> Stat {
    let s = sd(avar)?;
    if !(est > 0.0) {
        return Err(Undefined::NonPositiveEstimate);
    }
    Ok((est.ln() - target.ln()) * est / s)
}

/// `−est²(1/est − 1/target)/√avar`.
pub fn inv_stat(est: f64, target: f64, avar: f64) -> Stat {
    let s = sd(avar)?;
    if !(est > 0.0) {
        return Err(Undefined::NonPositiveEstimate);
    }
    Ok(-est * est * (est.recip() - target.recip()) / s)
}

/// `(RV − truth)/√((2/3)RQ)`.
pub fn studentize_rv(rv: f64, rq: f64, truth: f64) -> Stat {
    if !(rq > 0.0) {
        return Err(Undefined::ZeroQuarticity);
    }
    Ok((rv - truth) / (2.0 / 3.0 * rq).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_target() {
        assert_eq!(studentize(2.0, 2.0, 1.0), Ok(0.0));
        assert_eq!(log_stat(2.0, 2.0, 1.0), Ok(0.0));
        assert_eq!(inv_stat(2.0, 2.0, 1.0), Ok(0.0));
        assert_eq!(studentize_rv(2.0, 3.0, 2.0), Ok(0.0));
    }

    #[test]
    fn undefined_cases() {
        assert_eq!(studentize(1.0, 0.0, 0.0), Err(Undefined::NonPositiveVariance));
        assert_eq!(log_stat(-1.0, 1.0, 1.0), Err(Undefined::NonPositiveEstimate));
        assert_eq!(inv_stat(0.0, 1.0, 1.0), Err(Undefined::NonPositiveEstimate));
        assert_eq!(studentize_rv(1.0, 0.0, 1.0), Err(Undefined::ZeroQuarticity));
    }

    #[test]
    fn transforms_agree_to_first_order() {
        let (t, v) = (4e-4, 1e-10);
        for e in [1e-6, -2e-6, 5e-6] {
            let s = studentize(t + e, t, v).unwrap();
            let l = log_stat(t + e, t, v).unwrap();
            let i = inv_stat(t + e, t, v).unwrap();
            let bound = 2.0 * (e / t).abs() * s.abs();
            assert!((l - s).abs() <= bound, "log e={e}");
            assert!((i - s).abs() <= bound, "inv e={e}");
        }
    }
}
