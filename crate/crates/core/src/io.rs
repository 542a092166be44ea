//! CSV export of the crate's data products.

use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::estimators::StepSeries;
use crate::inference::{KernelConstants, SpotRecord};
use crate::noise::ObservationSeries;
use crate::paths::LatentPath;
use crate::sampling::{RefreshData, SamplingTimes};

/// Writes one CSV row per item, with a header taken from the field names.
pub fn write_rows<T: Serialize>(path: impl AsRef<Path>, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PathRow {
    t: f64,
    x: f64,
    y: f64,
    mx: f64,
    my: f64,
    qv_x: f64,
    qv_y: f64,
    qc_xy: f64,
}

pub fn write_path(path: impl AsRef<Path>, p: &LatentPath) -> Result<()> {
    write_rows(
        path,
        (0..p.len()).map(|k| PathRow {
            t: p.grid.time(k),
            x: p.x[k],
            y: p.y[k],
            mx: p.mx[k],
            my: p.my[k],
            qv_x: p.qv_x[k],
            qv_y: p.qv_y[k],
            qc_xy: p.qc_xy[k],
        }),
    )
}

pub fn write_sampling(path: impl AsRef<Path>, s: &SamplingTimes) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        time: f64,
    }
    write_rows(path, s.times.iter().enumerate().map(|(index, &time)| Row { index, time }))
}

pub fn write_refresh(path: impl AsRef<Path>, rd: &RefreshData) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        k: usize,
        r: f64,
        s_hat: f64,
        t_hat: f64,
        gamma: f64,
        i_check: f64,
        j_check: f64,
        star: f64,
    }
    write_rows(
        path,
        (0..rd.len()).map(|k| Row {
            k,
            r: rd.r[k],
            s_hat: rd.s_hat[k],
            t_hat: rd.t_hat[k],
            gamma: rd.gamma[k],
            i_check: rd.i_check[k],
            j_check: rd.j_check[k],
            star: rd.star[k],
        }),
    )
}

pub fn write_observations(path: impl AsRef<Path>, o: &ObservationSeries) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        index: usize,
        time: f64,
        value: f64,
        latent: f64,
    }
    write_rows(
        path,
        (0..o.len()).map(|i| Row {
            index: i,
            time: o.times[i],
            value: o.values[i],
            latent: o.latent[i],
        }),
    )
}

/// Reads a `time,value` (optionally `index,time,value,...`) CSV written by
/// [`write_observations`] or by hand.
pub fn read_observations(path: impl AsRef<Path>, b_n: f64) -> Result<ObservationSeries> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (ti, vi) = match (col("time"), col("value")) {
        (Some(t), Some(v)) => (t, v),
        _ => {
            return Err(crate::Error::param("csv", "expected `time` and `value` columns"));
        }
    };
    let (mut times, mut values) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| crate::Error::param("csv", format!("unparseable number in row {:?}", rec.position())))
        };
        times.push(parse(ti)?);
        values.push(parse(vi)?);
    }
    ObservationSeries::from_values(times, values, b_n)
}

pub fn write_step_series(path: impl AsRef<Path>, s: &StepSeries) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        t: f64,
        value: f64,
    }
    write_rows(path, s.times.iter().zip(&s.values).map(|(&t, &value)| Row { t, value }))
}

pub fn write_constants(path: impl AsRef<Path>, c: &KernelConstants) -> Result<()> {
    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        value: f64,
        quadrature_tolerance: f64,
    }
    write_rows(
        path,
        c.named().into_iter().map(|(name, value)| Row {
            name,
            value,
            quadrature_tolerance: c.tolerance,
        }),
    )
}

pub fn write_spot_records(path: impl AsRef<Path>, recs: &[SpotRecord]) -> Result<()> {
    write_rows(path, recs.iter())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observation_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("obs.csv");
        let o = ObservationSeries::from_values(vec![0.0, 0.5, 1.0], vec![1.0, -2.5, 3.25], 0.5).unwrap();
        write_observations(&p, &o).unwrap();
        let back = read_observations(&p, 0.5).unwrap();
        assert_eq!(back.times, o.times);
        assert_eq!(back.values, o.values);
    }
}
