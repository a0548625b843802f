//! Parameter ranges: `start:stop:step` (inclusive) or comma lists.

use std::collections::BTreeMap;

pub fn parse_range(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Err("empty range".into());
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("not a number: `{s}`"));
    let values = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(format!("range `{spec}` must be start:stop:step"));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step.is_nan() || step <= 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(format!("range `{spec}` needs finite bounds and a positive step"));
        }
        let n = ((b - a) / step + 1e-9).floor();
        if n < 0.0 {
            return Err(format!("range `{spec}` is empty"));
        }
        (0..=n as usize).map(|k| a + step * k as f64).collect()
    } else {
        spec.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.iter().any(|v| !v.is_finite()) {
        return Err(format!("range `{spec}` has a non-finite value"));
    }
    Ok(values)
}

/// `snr_db=...;alpha=...;beta=...`, any subset of keys.
pub fn parse_grid(spec: &str) -> Result<BTreeMap<String, Vec<f64>>, String> {
    let mut out = BTreeMap::new();
    for part in spec.split(';').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("grid entry `{part}` must be key=range"))?;
        let k = k.trim();
        if !["snr_db", "alpha", "beta"].contains(&k) {
            return Err(format!("unknown grid key `{k}` (expected snr_db, alpha or beta)"));
        }
        out.insert(k.to_owned(), parse_range(v)?);
    }
    if out.is_empty() {
        return Err("empty grid spec".into());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("10:60:10").unwrap(), vec![10.0, 20.0, 30.0, 40.0, 50.0, 60.0]);
        assert_eq!(parse_range("0.05:1.95:0.1").unwrap().len(), 20);
        assert_eq!(parse_range("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_range("").is_err());
        assert!(parse_range("3:1:1").is_err());
        assert!(parse_range("0:1:0").is_err());
        assert!(parse_range("a").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("snr_db=40;alpha=0.1:0.3:0.1").unwrap();
        assert_eq!(g["snr_db"], vec![40.0]);
        assert_eq!(g["alpha"].len(), 3);
        assert!(parse_grid("").is_err());
        assert!(parse_grid(" ; ").is_err());
        assert!(parse_grid("gamma=1").is_err());
    }
}
