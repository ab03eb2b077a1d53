//! Argument parsers that clap reports as usage errors (exit 2).

use hashfind_core::{Depth, ThresholdPercentile};

pub fn percentile(s: &str) -> Result<ThresholdPercentile, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    ThresholdPercentile::new(v).map_err(|e| e.to_string())
}

pub fn depth(s: &str) -> Result<Depth, String> {
    s.parse::<Depth>().map_err(|e| e.to_string())
}

pub fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("`{s}` is not a positive integer")),
    }
}

pub fn non_negative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("`{s}` must be a finite number >= 0")),
    }
}

#[derive(Debug, Clone)]
pub struct PercentileList(pub Vec<ThresholdPercentile>);

/// `a,b,c` or an inclusive range `start:stop:step`; the two forms can be
/// mixed (`0:20:5,50`).
pub fn percentile_list(s: &str) -> Result<PercentileList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [single] => out.push(percentile(single)?),
            [start, stop, step] => {
                let start = percentile(start)?.value();
                let stop = percentile(stop)?.value();
                let step: f64 = step
                    .parse()
                    .ok()
                    .filter(|v: &f64| v.is_finite() && *v > 0.0)
                    .ok_or_else(|| format!("step `{step}` must be a positive number"))?;
                if stop < start {
                    return Err(format!("empty range `{part}`"));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                for i in 0..=n {
                    let v = (start + i as f64 * step).min(100.0);
                    out.push(ThresholdPercentile::new(v).map_err(|e| e.to_string())?);
                }
            }
            _ => return Err(format!("`{part}` is neither a number nor start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err("no percentiles given".into());
    }
    Ok(PercentileList(out))
}
