use serde::Serialize;

/// Settings for [`detect_revival_peaks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakOptions {
    /// Open field window in which maxima count as revivals.
    pub window: (f64, f64),
    /// Minimum topographic prominence; suppresses roundoff ripples.
    pub min_prominence: f64,
}

impl Default for PeakOptions {
    fn default() -> Self {
        PeakOptions {
            window: (-1.0, 1.0),
            min_prominence: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Peak {
    /// Sample index of the discrete maximum.
    pub index: usize,
    /// Refined field position.
    pub h: f64,
    /// Refined height.
    pub value: f64,
    pub prominence: f64,
}

/// Revival maxima ordered by field, the first entry being the first revival
/// after the lower edge of the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakSet {
    pub peaks: Vec<Peak>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    /// `index`-th revival counted from the lower window edge, starting at 0.
    pub fn revival(&self, index: usize) -> Option<&Peak> {
        self.peaks.get(index)
    }

    pub fn highest(&self) -> Option<&Peak> {
        self.peaks
            .iter()
            .max_by(|a, b| a.value.total_cmp(&b.value))
    }

    /// Mean distance in `h` between successive peaks; absent with fewer
    /// than two peaks.
    pub fn mean_spacing(&self) -> Option<f64> {
        let n = self.peaks.len();
        (n >= 2).then(|| (self.peaks[n - 1].h - self.peaks[0].h) / (n - 1) as f64)
    }
}

/// Vertex of the parabola through three equally spaced points, as an offset
/// in units of the spacing and the height there.
pub(crate) fn parabolic_vertex(y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let curvature = y0 - 2.0 * y1 + y2;
    if curvature == 0.0 {
        return (0.0, y1);
    }
    let offset = (0.5 * (y0 - y2) / curvature).clamp(-0.5, 0.5);
    let height = y1 - 0.25 * (y0 - y2) * offset;
    (offset, height)
}

/// Prominence of the maximum at `i`: its height above the higher of the two
/// lowest points reached before climbing above it on either side.
fn prominence(values: &[f64], i: usize, lo: usize, hi: usize) -> f64 {
    let peak = values[i];
    let mut left_min = peak;
    for &v in values[lo..i].iter().rev() {
        if v > peak {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = peak;
    for &v in &values[i + 1..hi] {
        if v > peak {
            break;
        }
        right_min = right_min.min(v);
    }
    peak - left_min.max(right_min)
}

/// Local maxima of `values` (sampled at increasing `fields`) with the field
/// strictly inside `options.window`.
///
/// A sample is a maximum when it is strictly above its left neighbour and
/// not below its right one. Positions and heights are refined with a
/// three-point parabola (assuming locally uniform spacing); refined heights
/// never exceed the first sample of the series, which is the unperturbed
/// plateau for every trajectory produced by this crate.
pub fn detect_revival_peaks(fields: &[f64], values: &[f64], options: &PeakOptions) -> PeakSet {
    assert_eq!(fields.len(), values.len(), "fields and values differ in length");
    let (w_lo, w_hi) = options.window;
    let n = values.len();
    if n < 3 {
        return PeakSet { peaks: Vec::new() };
    }
    let lo = fields.partition_point(|&h| h <= w_lo);
    let hi = fields.partition_point(|&h| h < w_hi);
    let ceiling = values[0];

    let mut peaks = Vec::new();
    for i in lo.max(1)..hi.min(n - 1) {
        let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
        if !(y1 > y0 && y1 >= y2) {
            continue;
        }
        let prom = prominence(values, i, lo, hi);
        if prom < options.min_prominence {
            continue;
        }
        let (offset, height) = parabolic_vertex(y0, y1, y2);
        let spacing = if offset >= 0.0 {
            fields[i + 1] - fields[i]
        } else {
            fields[i] - fields[i - 1]
        };
        peaks.push(Peak {
            index: i,
            h: fields[i] + offset * spacing,
            value: height.min(ceiling.max(y1)),
            prominence: prom,
        });
    }
    PeakSet { peaks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect()
    }

    #[test]
    fn synthetic_cosine_spacing() {
        let (tau, delta) = (250.0, 0.01);
        let h = grid(2000, -5.0, 5.0);
        let c: Vec<f64> = h.iter().map(|x| (4.0 * tau * delta * x).cos().abs()).collect();
        let set = detect_revival_peaks(&h, &c, &PeakOptions::default());
        let expected = PI / (4.0 * tau * delta);
        let spacing = set.mean_spacing().unwrap();
        assert!((spacing / expected - 1.0).abs() < 1e-3, "{spacing}");
        assert!(set.peaks.windows(2).all(|w| w[1].h > w[0].h));
        assert!(set.peaks.iter().all(|p| p.h > -1.0 && p.h < 1.0));
    }

    #[test]
    fn parabola_is_exact_for_quadratics() {
        let h = grid(40, -1.2, 1.2);
        let v: Vec<f64> = h.iter().map(|x| 2.0 - (x - 0.1234).powi(2)).collect();
        let set = detect_revival_peaks(&h, &v, &PeakOptions { window: (-1.0, 1.0), min_prominence: 0.0 });
        assert_eq!(set.len(), 1);
        assert!((set.peaks[0].h - 0.1234).abs() < 1e-12);
    }

    #[test]
    fn monotone_series_has_no_peaks() {
        let h = grid(500, -5.0, 5.0);
        let v: Vec<f64> = h.iter().map(|x| (-x).exp()).collect();
        let set = detect_revival_peaks(&h, &v, &PeakOptions::default());
        assert!(set.is_empty());
        assert_eq!(set.mean_spacing(), None);
    }

    #[test]
    fn ripples_below_prominence_are_ignored() {
        let h = grid(1000, -2.0, 2.0);
        let v: Vec<f64> = h
            .iter()
            .enumerate()
            .map(|(j, x)| 0.5 - 0.01 * x + if j % 2 == 0 { 1e-9 } else { 0.0 })
            .collect();
        assert!(detect_revival_peaks(&h, &v, &PeakOptions::default()).is_empty());
    }

    #[test]
    fn heights_capped_by_plateau() {
        let h = grid(10, -1.5, 1.5);
        let v = vec![0.85, 0.85, 0.6, 0.7, 0.8, 0.85, 0.8, 0.7, 0.6, 0.5, 0.4];
        let set = detect_revival_peaks(&h, &v, &PeakOptions::default());
        assert_eq!(set.len(), 1);
        assert!(set.peaks[0].value <= 0.85);
        assert_eq!(set.revival(0).unwrap().index, 5);
        assert!(set.revival(1).is_none());
    }
}
