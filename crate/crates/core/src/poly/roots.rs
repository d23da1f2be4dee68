//! Univariate root isolation by recursive splitting at critical points.

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1] == 0.0 {
        end -= 1;
    }
    &coeffs[..end]
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn bisect(coeffs: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = horner(coeffs, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(coeffs, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Real roots in `[a, b]` of the polynomial with ascending coefficients
/// `coeffs`. Roots of even multiplicity are reported when they coincide with
/// a critical point where the value is exactly zero. The zero polynomial has
/// no reported roots.
pub fn real_roots_in(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let c = trimmed(coeffs);
    if c.len() <= 1 || a > b {
        return Vec::new();
    }
    if c.len() == 2 {
        let r = -c[0] / c[1];
        return if (a..=b).contains(&r) { vec![r] } else { Vec::new() };
    }
    let mut knots = vec![a];
    knots.extend(real_roots_in(&derivative(c), a, b));
    knots.push(b);
    knots.sort_by(|x, y| x.total_cmp(y));
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (l, r) = (w[0], w[1]);
        let (fl, fr) = (horner(c, l), horner(c, r));
        if fl == 0.0 {
            roots.push(l);
        } else if fr != 0.0 && (fl < 0.0) != (fr < 0.0) {
            roots.push(bisect(c, l, r));
        }
    }
    if horner(c, b) == 0.0 {
        roots.push(b);
    }
    roots.sort_by(|x, y| x.total_cmp(y));
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + x.abs()));
    roots
}

/// Exact `max_{[-1,1]} |p|` and an argmax, from endpoints and critical points.
pub fn univariate_max_abs(coeffs: &[f64]) -> (f64, f64) {
    let mut candidates = vec![-1.0, 1.0];
    candidates.extend(real_roots_in(&derivative(coeffs), -1.0, 1.0));
    candidates
        .into_iter()
        .map(|t| (horner(coeffs, t).abs(), t))
        .fold((f64::NEG_INFINITY, 0.0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        // (t - 0.3)(t + 0.7)(t - 0.9)
        let c = [0.189, -0.57, -0.5, 1.0];
        let r = real_roots_in(&c, -1.0, 1.0);
        let expected = [-0.7, 0.3, 0.9];
        assert_eq!(r.len(), 3);
        for (x, y) in r.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(real_roots_in(&c, 0.4, 0.8), Vec::<f64>::new());
    }

    #[test]
    fn max_abs_of_chebyshev_cubic() {
        let (v, t) = univariate_max_abs(&[0.0, -3.0, 0.0, 4.0]);
        assert!((v - 1.0).abs() < 1e-12);
        assert!([-1.0, -0.5, 0.5, 1.0].iter().any(|w| (w - t).abs() < 1e-9));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(real_roots_in(&[], -1.0, 1.0).is_empty());
        assert!(real_roots_in(&[0.0, 0.0], -1.0, 1.0).is_empty());
        assert!(real_roots_in(&[2.0], -1.0, 1.0).is_empty());
        assert_eq!(real_roots_in(&[0.0, 1.0], -1.0, 1.0), vec![0.0]);
    }
}
