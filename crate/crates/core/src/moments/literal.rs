//! Moment formulas exactly as published, typos included.
//!
//! The only edits are the unambiguous slips listed in [`NORMALIZATIONS`].
//! Throughout, `N = n + β` and `u = x/(1+x)`, so that
//! `x^i/(1+x)^j = x^{i-j} u^j`.

use crate::basis::OperatorParams;
use crate::error::{Error, Result};

/// A typographical slip that literal evaluation silently repairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Normalization {
    pub location: &'static str,
    pub printed: &'static str,
    pub read_as: &'static str,
}

pub const NORMALIZATIONS: [Normalization; 4] = [
    Normalization {
        location: "raw L order 4, coefficient of x^4/(1+x)^4",
        printed: "a^4/(b+beta)^4",
        read_as: "a^4/(n+beta)^4",
    },
    Normalization {
        location: "raw T order 4, coefficient of x^4/(1+x)^4",
        printed: "a^4/(b+beta)^4",
        read_as: "a^4/(n+beta)^4",
    },
    Normalization {
        location: "raw T order 4, coefficient of x^4/(1+x)^2",
        printed: "x^4/(+x)^2",
        read_as: "x^4/(1+x)^2",
    },
    Normalization {
        location: "raw T order 4, n-coefficient of x^2",
        printed: "15+18alpha++6a",
        read_as: "15+18alpha+6a",
    },
];

struct Vars {
    n: f64,
    a: f64,
    al: f64,
    be: f64,
    x: f64,
    u: f64,
    big_n: f64,
}

impl Vars {
    fn new(params: &OperatorParams, x: f64) -> Self {
        Vars {
            n: f64::from(params.n),
            a: params.a,
            al: params.alpha,
            be: params.beta,
            x,
            u: x / (1.0 + x),
            big_n: params.denom(),
        }
    }
}

fn order_error(order: u32, allowed: &str) -> Error {
    Error::InvalidArgument(format!("published formula exists only for orders {allowed}, got {order}"))
}

/// Published `L(t^m; x)`, `m = 0..=4`.
pub fn raw_moment_l(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    let Vars { n, a, al, be: _, x, u, big_n } = Vars::new(params, x);
    let v = match order {
        0 => 1.0,
        1 => n / big_n * x + a / big_n * u + al / big_n,
        2 => {
            ((n * n + n) * x * x
                + n * (1.0 + 2.0 * al) * x
                + a * a * u * u
                + 2.0 * a * n * x * u
                + a * (1.0 + 2.0 * al) * u
                + al * al)
                / big_n.powi(2)
        }
        3 => {
            let s = (n.powi(3) + 3.0 * n * n + 2.0 * n) * x.powi(3)
                + (n * n * (3.0 + 3.0 * al) + n * (3.0 + 3.0 * al + 3.0 * a)) * x * x
                + n * (1.0 + 3.0 * al + 3.0 * al * al) * x
                + 3.0 * a * n * n * x * x * u
                + n * (3.0 * a * a * x * u * u + 3.0 * a * x * u + 6.0 * a * al * x * u)
                + (a * u + 3.0 * a * a * u * u + a.powi(3) * u.powi(3) + 3.0 * al * a * a * u * u + 3.0 * al * al * a * u + al.powi(3));
            s / big_n.powi(3)
        }
        4 => {
            let s = (n.powi(4) + 6.0 * n.powi(3) + 11.0 * n * n + 6.0 * n) * x.powi(4)
                + ((6.0 + 4.0 * al) * n.powi(3) + (18.0 + 12.0 * al) * n * n + (9.0 + 8.0 * al) * n) * x.powi(3)
                + ((7.0 + 12.0 * al + 6.0 * al * al) * n * n + (7.0 + 12.0 * al + 12.0 * al * a + 6.0 * al * al) * n) * x * x
                + (1.0 + 4.0 * al + 6.0 * al * al + 4.0 * al.powi(3)) * n * x
                + (4.0 * a * n.powi(3) + 12.0 * a * n * n + 8.0 * a * n) * x.powi(3) * u
                + (6.0 * a * a * n * n + 6.0 * a * a * n) * x * x * u * u
                + 4.0 * a.powi(3) * n * x * u.powi(3)
                + a.powi(4) * u.powi(4)
                + (18.0 * a * n * n + 18.0 * a * n) * x * x * u
                + (18.0 * a * a + 12.0 * a * a * al) * n * x * u * u
                + (6.0 * a.powi(3) + 4.0 * al * a.powi(3)) * u.powi(3)
                + (12.0 * a * al * al + 12.0 * a * al + 14.0 * a) * n * x * u
                + (7.0 * a * a + 12.0 * a * a * al + 6.0 * a * a * al * al) * u * u
                + (a + 4.0 * al * a + 6.0 * al * al * a + 4.0 * al.powi(3) * a) * u
                + al.powi(4);
            s / big_n.powi(4)
        }
        _ => return Err(order_error(order, "0..=4")),
    };
    Ok(v)
}

/// Published `T(t^m; x)`, `m = 0..=4`.
pub fn raw_moment_t(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    let Vars { n, a, al, be: _, x, u, big_n } = Vars::new(params, x);
    let v = match order {
        0 => 1.0,
        1 => n / big_n * x + a / big_n * u + (2.0 * al + 1.0) / (2.0 * big_n),
        2 => {
            ((n * n + n) * x * x
                + n * (2.0 + 2.0 * al) * x
                + a * a * u * u
                + 2.0 * a * n * x * u
                + a * (2.0 + 2.0 * al) * u
                + (3.0 * al * al + 1.0) / 3.0)
                / big_n.powi(2)
        }
        3 => {
            let s = (n.powi(3) + 3.0 * n * n + 2.0 * n) * x.powi(3)
                + (n * n * (4.5 + 3.0 * al) + n * (4.5 + 3.0 * al + 3.0 * a)) * x * x
                + n * (3.5 + 6.0 * al + 3.0 * al * al) * x
                + 3.0 * a * n * n * x * x * u
                + n * (3.0 * a * a * x * u * u + 6.0 * a * x * u + 6.0 * a * al * x * u)
                + (a * (3.5 + 3.0 * al + 3.0 * al * a * a) * u + (4.5 * a * a + 3.0 * al * a * a) * u * u + a.powi(3) * u.powi(3))
                + (al.powi(3) + 1.5 * al * al + al);
            s / big_n.powi(3)
        }
        4 => {
            let s = (n.powi(4) + 6.0 * n.powi(3) + 11.0 * n * n + 6.0 * n) * x.powi(4)
                + ((8.0 + 4.0 * al) * n.powi(3) + (24.0 + 12.0 * al) * n * n + (13.0 + 8.0 * al) * n) * x.powi(3)
                + ((15.0 + 18.0 * al + 6.0 * al * al) * n * n + (15.0 + 18.0 * al + 6.0 * a + 12.0 * al * a + 6.0 * al * al) * n) * x * x
                + (6.0 + 14.0 * al + 11.0 * al * al + 4.0 * al.powi(3)) * n * x
                + (4.0 * a * n.powi(3) + 12.0 * a * n * n + 8.0 * a * n) * x.powi(3) * u
                + (6.0 * a * a * n * n + 6.0 * a * a * n) * x * x * u * u
                + 4.0 * a.powi(3) * n * x * u.powi(3)
                + a.powi(4) * u.powi(4)
                + (24.0 * a * n * n + 18.0 * a * n) * x * x * u
                + (24.0 * a * a + 12.0 * a * a * al) * n * x * u * u
                + (8.0 * a.powi(3) + 4.0 * al * a.powi(3)) * u.powi(3)
                + (12.0 * a * al * al + 10.0 * a + 24.0 * a * al + 14.0 * a) * n * x * u
                + (15.0 * a * a + 18.0 * a * a * al + 6.0 * a * a * al * al) * u * u
                + (6.0 * a + 8.0 * al * a + 12.0 * al * al * a + 4.0 * al.powi(3) * a) * u
                + (al.powi(4) + 2.0 * al.powi(3) + 2.0 * al * al + al);
            s / big_n.powi(4)
        }
        _ => return Err(order_error(order, "0..=4")),
    };
    Ok(v)
}

/// Published `T((t-x)^m; x)` for `m ∈ {0, 1, 2, 4}`.
pub fn central_moment_t(params: &OperatorParams, order: u32, x: f64) -> Result<f64> {
    let Vars { n, a, al, be, x, u, big_n } = Vars::new(params, x);
    let v = match order {
        0 => 1.0,
        1 => (n / big_n - 1.0) * x + a / big_n * u + (2.0 * al + 1.0) / (2.0 * big_n),
        2 => {
            ((n + be * be) * x * x
                + (n - 2.0 * (al + 1.0) * be) * x
                + a * a * u * u
                - 2.0 * a * be * x * u
                + a * (2.0 + 2.0 * al) * u
                + (3.0 * al * al + 1.0) / 3.0)
                / big_n.powi(2)
        }
        4 => {
            let s = ((3.0 - 12.0 * be) * n * n + (6.0 + 4.0 * be + 2.0 * be * be + 4.0 * be.powi(3)) * n + be.powi(4)) * x.powi(4)
                + ((6.0 - 12.0 * a - 12.0 * be * al) * n * n
                    + (13.0 + 8.0 * al - 18.0 * be + 12.0 * a * be + 9.0 * be * be) * n
                    - 4.0 * be.powi(3) * al
                    - 2.0 * be * be)
                    * x.powi(3)
                + ((11.0 - 18.0 * al + 18.0 * al * al) * n * n
                    + (15.0 + 18.0 * al + 6.0 * a + 12.0 * al * a - 24.0 * al * be) * n
                    + 6.0 * al * al * be * be
                    + 2.0 * be * be)
                    * x
                    * x
                + ((6.0 + 10.0 * al + 5.0 * al * al) * n - 4.0 * be * (al.powi(3) + 1.5 * al * al + al)) * x
                + (12.0 * a * n * n + 8.0 * a * n - 4.0 * a * be.powi(3)) * x.powi(3) * u
                + (6.0 * a * a * n + 6.0 * a * a * be * be) * x * x * u * u
                - 4.0 * a.powi(3) * be * x * u.powi(3)
                + a.powi(4) * u.powi(4)
                + (12.0 * a * n * n + 18.0 * a * n + 6.0 * a * (1.0 + 2.0 * al) * be * be) * x * x * u
                + (6.0 * a * a * n - (12.0 * a * a + 12.0 * al * a * a) * be) * x * u * u
                + (6.0 * a.powi(3) + 4.0 * al * a.powi(3)) * u.powi(3)
                + ((12.0 * a * al + 8.0 * a - 6.0 * a * al * al) * n - (6.0 * a + 18.0 * al * al * a) * be) * x * u
                + (7.0 * a * a + 12.0 * a * a * al + 6.0 * a * a * al * al) * u * u
                + (a + 4.0 * al * a + 6.0 * al * al * a + 4.0 * al.powi(3) * a) * u
                + al.powi(4);
            s / big_n.powi(4)
        }
        _ => return Err(order_error(order, "0, 1, 2, 4")),
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32, a: f64, alpha: f64, beta: f64) -> OperatorParams {
        OperatorParams::new(n, a, alpha, beta).unwrap()
    }

    #[test]
    fn order_zero_is_one() {
        let params = p(3, 1.0, 1.0, 2.0);
        assert_eq!(raw_moment_l(&params, 0, 7.0).unwrap(), 1.0);
        assert_eq!(raw_moment_t(&params, 0, 1.0).unwrap(), 1.0);
        assert_eq!(central_moment_t(&params, 0, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn published_examples() {
        let v = raw_moment_l(&p(4, 2.0, 1.0, 3.0), 1, 2.0).unwrap();
        assert!((v - (8.0 / 7.0 + 4.0 / 21.0 + 1.0 / 7.0)).abs() < 1e-15);
        let v = raw_moment_l(&p(6, 0.0, 0.0, 0.0), 2, 1.0).unwrap();
        assert!((v - (42.0 / 36.0 + 6.0 / 36.0)).abs() < 1e-15);
        let v = raw_moment_t(&p(10, 0.0, 0.0, 0.0), 1, 1.0).unwrap();
        assert!((v - 1.05).abs() < 1e-15);
        let v = central_moment_t(&p(10, 0.0, 0.0, 0.0), 1, 1.0).unwrap();
        assert!((v - 0.05).abs() < 1e-15);
    }

    #[test]
    fn unsupported_orders_are_rejected() {
        let params = p(3, 0.0, 0.0, 0.0);
        assert!(raw_moment_l(&params, 5, 1.0).is_err());
        assert!(central_moment_t(&params, 3, 1.0).is_err());
    }
}
