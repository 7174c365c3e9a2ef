//! C-style `%.17g` formatting for report and mesh files.

/// Format with 17 significant digits, shortest of fixed/exponential as
/// `printf("%.17g", x)` would choose, trailing zeros stripped.
pub fn g17(x: f64) -> String {
    g_format(x, 17)
}

pub fn g_format(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sig = sig.max(1);
    // decimal exponent of the value after rounding to `sig` digits
    let e_repr = format!("{:.*e}", sig - 1, x);
    let exp: i32 = e_repr[e_repr.find('e').unwrap() + 1..].parse().unwrap();
    if exp >= -4 && exp < sig as i32 {
        let prec = (sig as i32 - 1 - exp).max(0) as usize;
        let mut s = format!("{:.*}", prec, x);
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        let (mantissa, _) = e_repr.split_at(e_repr.find('e').unwrap());
        let mut m = mantissa.to_string();
        if m.contains('.') {
            while m.ends_with('0') {
                m.pop();
            }
            if m.ends_with('.') {
                m.pop();
            }
        }
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}
