use super::peaks::parabolic_vertex;

/// Settings for [`estimate_oscillation_period`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions {
    /// Only samples with `h` strictly above this are analysed.
    pub h_min: f64,
    /// Minimum swing between an extremum and its neighbouring opposite
    /// extremum in the detrended series.
    pub min_swing: f64,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        PeriodOptions {
            h_min: 1.0,
            min_swing: 1e-9,
        }
    }
}

/// Least-squares line through `(x, y)`; returns `(intercept, slope)`.
fn linear_trend(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

#[derive(Debug, Clone, Copy)]
struct Extremum {
    h: f64,
    value: f64,
    is_max: bool,
}

/// Alternating extrema of `y`; a candidate is dropped when it differs from
/// the previously kept opposite extremum by less than `min_swing`.
fn alternating_extrema(x: &[f64], y: &[f64], min_swing: f64) -> Vec<Extremum> {
    let mut out: Vec<Extremum> = Vec::new();
    for i in 1..y.len().saturating_sub(1) {
        let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
        let is_max = y1 > y0 && y1 >= y2;
        let is_min = y1 < y0 && y1 <= y2;
        if !(is_max || is_min) {
            continue;
        }
        let (offset, value) = parabolic_vertex(y0, y1, y2);
        let spacing = if offset >= 0.0 { x[i + 1] - x[i] } else { x[i] - x[i - 1] };
        let candidate = Extremum {
            h: x[i] + offset * spacing,
            value,
            is_max,
        };
        match out.last_mut() {
            Some(last) if last.is_max == is_max => {
                // Same kind twice in a row: keep the more extreme one.
                if (is_max && value > last.value) || (!is_max && value < last.value) {
                    *last = candidate;
                }
            }
            Some(last) if (value - last.value).abs() < min_swing => {}
            _ => out.push(candidate),
        }
    }
    out
}

/// Oscillation period in `h` of `values` beyond `options.h_min`.
///
/// The window is detrended by a straight line, fitted to `ln y` when every
/// value is positive (the oscillation rides on a decaying envelope) and to
/// `y` otherwise. The period is the mean spacing of successive maxima and
/// of successive minima; absent when neither kind occurs twice.
pub fn estimate_oscillation_period(
    fields: &[f64],
    values: &[f64],
    options: &PeriodOptions,
) -> Option<f64> {
    assert_eq!(fields.len(), values.len(), "fields and values differ in length");
    let start = fields.partition_point(|&h| h <= options.h_min);
    let x = &fields[start..];
    let raw = &values[start..];
    if x.len() < 3 {
        return None;
    }
    let y: Vec<f64> = if raw.iter().all(|&v| v > 0.0) {
        raw.iter().map(|v| v.ln()).collect()
    } else {
        raw.to_vec()
    };
    let (b0, b1) = linear_trend(x, &y);
    let detrended: Vec<f64> = x.iter().zip(&y).map(|(&h, &v)| v - b0 - b1 * h).collect();
    let extrema = alternating_extrema(x, &detrended, options.min_swing);

    let mut total = 0.0;
    let mut count = 0usize;
    for kind in [true, false] {
        let hs: Vec<f64> = extrema.iter().filter(|e| e.is_max == kind).map(|e| e.h).collect();
        if hs.len() >= 2 {
            total += hs[hs.len() - 1] - hs[0];
            count += hs.len() - 1;
        }
    }
    (count > 0).then(|| total / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect()
    }

    #[test]
    fn synthetic_damped_oscillation() {
        let h = grid(2000, -5.0, 5.0);
        let v: Vec<f64> = h
            .iter()
            .map(|x| (-x).exp() * (1.0 + 0.1 * (2.0 * PI * x / 0.5).cos()))
            .collect();
        let p = estimate_oscillation_period(&h, &v, &PeriodOptions::default()).unwrap();
        assert!((p / 0.5 - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn handles_sign_changes_in_linear_space() {
        let h = grid(1000, 0.0, 5.0);
        let v: Vec<f64> = h.iter().map(|x| 0.3 - 0.05 * x + 0.2 * (2.0 * PI * x / 0.8).sin()).collect();
        let p = estimate_oscillation_period(&h, &v, &PeriodOptions::default()).unwrap();
        assert!((p / 0.8 - 1.0).abs() < 0.01, "{p}");
    }

    #[test]
    fn monotone_decay_has_no_period() {
        let h = grid(400, -5.0, 5.0);
        let v: Vec<f64> = h.iter().map(|x| (-0.3 * x).exp()).collect();
        assert_eq!(estimate_oscillation_period(&h, &v, &PeriodOptions::default()), None);
    }

    #[test]
    fn single_wiggle_has_no_period() {
        let h = grid(400, 1.0, 3.0);
        let v: Vec<f64> = h.iter().map(|x| 1.0 + (PI * (x - 1.0)).sin()).collect();
        assert_eq!(estimate_oscillation_period(&h, &v, &PeriodOptions::default()), None);
    }
}
