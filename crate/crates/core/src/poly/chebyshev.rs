/// `T_d(t)` through the three-term recurrence, valid for every real `t`.
pub fn chebyshev_value(d: usize, t: f64) -> f64 {
    match d {
        0 => 1.0,
        1 => t,
        _ => {
            let (mut prev, mut cur) = (1.0, t);
            for _ in 1..d {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
