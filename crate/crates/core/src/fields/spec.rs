use std::path::Path;
use std::sync::Arc;

use super::{make_extension, FemField, HarmonicPolynomial, ScalarField};
use crate::error::{Error, Result};
use crate::spectral::{analytic_disk, analytic_rectangle, Solution};

/// Parses a one-line field description.
///
/// ```text
/// harmonic:<expr>        e.g. harmonic:Re(z^2), harmonic:y+0.5*Im(z^3)
/// rect:m,n[,a,b]         sin(mπx/a)·sin(nπy/b)
/// disk:k,j               Bessel mode of the unit disk
/// sine:m[,L]             sin(mπx/L) on (0, L)
/// fem:<file>#<index>     eigenfunction from a solution file
/// ext:<inner>[@lambda]   harmonic extension; λ defaults to the inner eigenvalue
/// ```
///
/// Relative file names resolve against `base`.
pub fn parse_field_spec(spec: &str, base: &Path) -> Result<ScalarField> {
    let spec = spec.trim();
    let (head, body) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("field spec {spec:?} lacks a kind prefix")))?;
    match head {
        "harmonic" => Ok(ScalarField::Harmonic(HarmonicPolynomial::parse(body)?)),
        "rect" => {
            let v = numbers(body)?;
            let (m, n, a, b) = match v.as_slice() {
                [m, n] => (*m, *n, 1.0, 1.0),
                [m, n, a, b] => (*m, *n, *a, *b),
                _ => return Err(Error::Parse(format!("rect expects m,n[,a,b], got {body:?}"))),
            };
            Ok(analytic_rectangle(as_index(m)?, as_index(n)?, a, b)?.0)
        }
        "disk" => match numbers(body)?.as_slice() {
            [k, j] => Ok(analytic_disk(as_index(*k)?, as_index(*j)?)?.0),
            _ => Err(Error::Parse(format!("disk expects k,j, got {body:?}"))),
        },
        "sine" => {
            let v = numbers(body)?;
            let (m, length) = match v.as_slice() {
                [m] => (*m, 1.0),
                [m, l] => (*m, *l),
                _ => return Err(Error::Parse(format!("sine expects m[,L], got {body:?}"))),
            };
            let m = as_index(m)?;
            if m == 0 || !(length > 0.0) {
                return Err(Error::Parse("sine needs m ≥ 1 and L > 0".into()));
            }
            Ok(ScalarField::Sine { m, length })
        }
        "fem" => {
            let (file, idx) = body.rsplit_once('#').ok_or_else(|| Error::Parse("fem expects <file>#<index>".into()))?;
            let idx: usize = idx.parse().map_err(|_| Error::Parse(format!("bad eigenpair index {idx:?}")))?;
            let path = base.join(file);
            let sol = Solution::load(&path)?;
            let mesh = sol.load_mesh(&path)?;
            let pair = sol
                .pairs
                .get(idx)
                .ok_or_else(|| Error::Parse(format!("solution has {} pairs, index {idx} requested", sol.pairs.len())))?;
            Ok(ScalarField::Fem(FemField::new(Arc::new(mesh), pair.coeffs.clone(), Some(pair.lambda))))
        }
        "ext" => {
            let (inner, lambda) = match body.rsplit_once('@') {
                Some((i, l)) => (i, Some(l.parse::<f64>().map_err(|_| Error::Parse(format!("bad eigenvalue {l:?}")))?)),
                None => (body, None),
            };
            let u = parse_field_spec(inner, base)?;
            let lambda = match lambda.or_else(|| u.eigenvalue()) {
                Some(l) => l,
                None => return Err(Error::Parse("ext of a field without eigenvalue needs @lambda".into())),
            };
            make_extension(u, lambda)
        }
        _ => Err(Error::Parse(format!("unknown field kind {head:?}"))),
    }
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
        .collect()
}

fn as_index(v: f64) -> Result<u32> {
    if v >= 0.0 && v.fract() == 0.0 && v < 1e6 {
        Ok(v as u32)
    } else {
        Err(Error::Parse(format!("expected a non-negative integer, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldKind;

    #[test]
    fn kinds() {
        let b = Path::new(".");
        assert_eq!(parse_field_spec("harmonic:Re(z^2)", b).unwrap().kind(), FieldKind::HarmonicPoly);
        assert_eq!(parse_field_spec("rect:3,2", b).unwrap().kind(), FieldKind::Rectangle);
        assert_eq!(parse_field_spec("disk:0,2", b).unwrap().kind(), FieldKind::Disk);
        let e = parse_field_spec("ext:sine:2", b).unwrap();
        assert_eq!(e.dim(), 2);
        let (_, l) = e.as_extension().unwrap();
        assert!((l - 4.0 * std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert_eq!(parse_field_spec("ext:rect:1,1@3.5", b).unwrap().as_extension().unwrap().1, 3.5);
        assert!(parse_field_spec("ext:harmonic:y", b).is_err());
        assert!(parse_field_spec("rect:0,1", b).is_err());
        assert!(parse_field_spec("nope:1", b).is_err());
        assert!(parse_field_spec("fem:missing.json#0", b).is_err());
    }
}
