/// Strict interior local maxima of `(axis, value)` samples.
///
/// Samples are sorted by axis first. A flat top counts as one peak, reported
/// at its smallest axis value, when both neighbours of the plateau are lower.
pub fn locate_peaks(samples: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut s: Vec<(f64, f64)> = samples.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < s.len() {
        let mut j = i;
        while j + 1 < s.len() && s[j + 1].1 == s[i].1 {
            j += 1;
        }
        if j + 1 < s.len() && s[i - 1].1 < s[i].1 && s[j + 1].1 < s[i].1 {
            peaks.push(s[i]);
        }
        i = j + 1;
    }
    peaks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(ys: &[f64]) -> Vec<(f64, f64)> {
        ys.iter().enumerate().map(|(i, &y)| (i as f64 * 0.1, y)).collect()
    }

    #[test]
    fn monotone_has_no_peaks() {
        assert!(locate_peaks(&pts(&[1.0, 2.0, 3.0, 4.0])).is_empty());
        assert!(locate_peaks(&pts(&[4.0, 3.0, 2.0])).is_empty());
        assert!(locate_peaks(&pts(&[1.0, 5.0])).is_empty());
    }

    #[test]
    fn single_bump() {
        assert_eq!(locate_peaks(&pts(&[1.0, 3.0, 2.0, 1.0])), vec![(0.1, 3.0)]);
    }

    #[test]
    fn plateau_reports_left_edge() {
        let p = locate_peaks(&pts(&[1.0, 3.0, 3.0, 3.0, 2.0, 4.0, 4.0]));
        assert_eq!(p, vec![(0.1, 3.0)]);
    }

    #[test]
    fn order_of_input_is_irrelevant() {
        let mut s = pts(&[0.0, 1.0, 0.5, 2.0, 0.1, 0.2, 0.1]);
        let want = locate_peaks(&s);
        s.reverse();
        s.swap(1, 4);
        assert_eq!(locate_peaks(&s), want);
        assert_eq!(want.len(), 3);
    }
}
