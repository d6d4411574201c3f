//! The limiting zero-shift profile f(d) = int_0^1 2u(1-u) sin(2 pi u d) du
//! and its maximum.

/// Closed form via the antiderivative: with c = 2 pi d,
/// f(d) = (4 (1 - cos c) - 2 c sin c) / c^3.
/// The numerator cancels to O(c^4), so small c switches to the series.
pub fn landau_gonek_profile(d: f64) -> f64 {
    let c = 2.0 * std::f64::consts::PI * d;
    if c.abs() < 0.5 {
        let c2 = c * c;
        return c
            * (1.0 / 6.0
                + c2 * (-1.0 / 90.0
                    + c2 * (1.0 / 3360.0
                        + c2 * (-1.0 / 226_800.0 + c2 / 23_950_080.0))));
    }
    (4.0 * (1.0 - c.cos()) - 2.0 * c * c.sin()) / (c * c * c)
}

/// Golden-section maximum of the profile on [0, 1]: returns (d*, f(d*)).
pub fn landau_gonek_max() -> (f64, f64) {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (landau_gonek_profile(c), landau_gonek_profile(d));
    for _ in 0..200 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = landau_gonek_profile(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = landau_gonek_profile(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, landau_gonek_profile(x))
}
