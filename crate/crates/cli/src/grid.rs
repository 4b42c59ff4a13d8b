//! Grid literals: `a,b,c` lists and inclusive `start:stop:step` ranges.

use crate::config::Zoom;
use crate::error::CliError;

/// Smallest supported zoom window.
pub const MIN_ZOOM_WIDTH: f64 = 1e-7;

pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Config(format!("grid {s:?}: {what}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields.as_slice() {
            [x] => out.push(num(x)?),
            [a, b, step] => {
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) || b < a {
                    return Err(bad("range needs start <= stop and step > 0"));
                }
                let n = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=n).map(|i| a + i as f64 * step));
            }
            _ => return Err(bad("expected value or start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err(bad("empty"));
    }
    Ok(out)
}

/// `points` equally spaced values spanning `center +- width/2`.
pub fn zoom_grid(z: &Zoom) -> Result<Vec<f64>, CliError> {
    if !(z.width >= MIN_ZOOM_WIDTH) || z.points < 2 {
        return Err(CliError::Config(format!(
            "zoom needs width >= {MIN_ZOOM_WIDTH} and at least 2 points"
        )));
    }
    let lo = z.center - z.width / 2.0;
    let step = z.width / (z.points - 1) as f64;
    let grid: Vec<f64> = (0..z.points).map(|i| lo + i as f64 * step).collect();
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("zoom step below floating-point resolution".into()));
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_grid("0.5,1.2").unwrap(), vec![0.5, 1.2]);
        let r = parse_grid("0.1:1.6:0.05").unwrap();
        assert_eq!(r.len(), 31);
        assert!((r[30] - 1.6).abs() < 1e-12);
        assert_eq!(parse_grid("100, 1000,10000").unwrap().len(), 3);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a").is_err());
    }

    #[test]
    fn narrow_zoom() {
        let g = zoom_grid(&Zoom {
            center: 0.713,
            width: 1e-7,
            points: 21,
        })
        .unwrap();
        assert_eq!(g.len(), 21);
        assert!((g[20] - g[0] - 1e-7).abs() < 1e-15);
        assert!(zoom_grid(&Zoom {
            center: 0.7,
            width: 1e-9,
            points: 5
        })
        .is_err());
    }
}
