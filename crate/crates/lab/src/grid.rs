//! `--rho-grid` specifications.
//!
//! * `a,b,c` explicit values
//! * `lin:A:B:N` `N` equally spaced values from `A` to `B`
//! * `log:A:B:N` `N` geometrically spaced values from `A` to `B`
//! * `int:A:B` every integer in `[A, B]`
//! * `pow2:A:B` every power of two in `[A, B]`
//! * `mixed:A:B` every integer and every integer plus the golden offset in `[A, B]`

use polydisc::discrepancy::mixed_rho_grid;

pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    let num = |s: &str| -> Result<f64, String> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("bad number {s:?} in rho grid {text:?}"))
    };
    let count = |s: &str| -> Result<usize, String> {
        s.trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| format!("bad count {s:?} in rho grid {text:?}"))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [""] => Vec::new(),
        [list] => list.split(',').map(num).collect::<Result<_, _>>()?,
        ["lin", a, b, n] => {
            let (a, b, n) = (num(a)?, num(b)?, count(n)?);
            if n == 1 {
                vec![a]
            } else {
                (0..n)
                    .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        }
        ["log", a, b, n] => {
            let (a, b, n) = (num(a)?, num(b)?, count(n)?);
            if !(a > 0.0 && b > 0.0) {
                return Err(format!("log grid needs positive bounds in {text:?}"));
            }
            if n == 1 {
                vec![a]
            } else {
                (0..n)
                    .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
                    .collect()
            }
        }
        ["int", a, b] => {
            let (a, b) = (num(a)?.ceil() as i64, num(b)?.floor() as i64);
            (a..=b).map(|x| x as f64).collect()
        }
        ["pow2", a, b] => {
            let (a, b) = (num(a)?, num(b)?);
            let mut out = Vec::new();
            let mut x = 1.0f64;
            while x <= b {
                if x >= a {
                    out.push(x);
                }
                x *= 2.0;
            }
            out
        }
        ["mixed", a, b] => mixed_rho_grid(num(a)?, num(b)?),
        _ => return Err(format!("unrecognized rho grid {text:?}")),
    };
    if grid.is_empty() {
        return Err(format!("rho grid {text:?} is empty"));
    }
    Ok(grid)
}
