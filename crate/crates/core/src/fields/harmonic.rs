use nalgebra::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::Vec2;

/// `h(z) = Σ_j re[j]·Re((z-a)^j) + im[j]·Im((z-a)^j)` for a fixed origin `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPolynomial {
    pub origin: Vec2,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl HarmonicPolynomial {
    pub fn zero() -> Self {
        Self { origin: Vec2::ZERO, re: vec![0.0], im: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self { origin: Vec2::ZERO, re: vec![c], im: vec![0.0] }
    }

    /// `Re(z^k)`.
    pub fn re_power(k: usize) -> Self {
        let mut p = Self::zero();
        p.set_re(k, 1.0);
        p
    }

    /// `Im(z^k)`; `Im(z) = y`.
    pub fn im_power(k: usize) -> Self {
        let mut p = Self::zero();
        p.set_im(k, 1.0);
        p
    }

    pub fn with_origin(mut self, origin: Vec2) -> Self {
        self.origin = origin;
        self
    }

    /// Coefficients `b_k` with `h(c + w) = Re Σ b_k w^k`.
    pub fn expand_about(&self, c: Vec2) -> Vec<Complex<f64>> {
        let d = Complex::new(c.x - self.origin.x, c.y - self.origin.y);
        let mut b = vec![Complex::new(0.0, 0.0); self.re.len()];
        for (j, (&re, &im)) in self.re.iter().zip(&self.im).enumerate() {
            let a = Complex::new(re, -im);
            if a == Complex::new(0.0, 0.0) {
                continue;
            }
            // (w + d)^j = Σ_k C(j, k) d^{j-k} w^k
            let mut dpow = vec![Complex::new(1.0, 0.0); j + 1];
            for e in 1..=j {
                dpow[e] = dpow[e - 1] * d;
            }
            let mut binom = 1.0;
            for k in 0..=j {
                b[k] += a * dpow[j - k] * binom;
                binom = binom * (j - k) as f64 / (k + 1) as f64;
            }
        }
        b
    }

    /// The same function written in powers of `z - origin`.
    pub fn recentered(&self, origin: Vec2) -> Self {
        let b = self.expand_about(origin);
        Self { origin, re: b.iter().map(|c| c.re).collect(), im: b.iter().map(|c| -c.im).collect() }
    }

    fn grow(&mut self, k: usize) {
        if self.re.len() <= k {
            self.re.resize(k + 1, 0.0);
            self.im.resize(k + 1, 0.0);
        }
    }

    pub fn set_re(&mut self, k: usize, c: f64) {
        self.grow(k);
        self.re[k] = c;
    }

    pub fn set_im(&mut self, k: usize, c: f64) {
        self.grow(k);
        self.im[k] = c;
    }

    /// Highest power with a nonzero coefficient.
    pub fn degree(&self) -> usize {
        (0..self.re.len()).rev().find(|&j| self.re[j] != 0.0 || self.im[j] != 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().chain(&self.im).all(|c| *c == 0.0)
    }

    /// Adds `s·other`; both must share the origin.
    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        assert_eq!(self.origin, other.origin, "harmonic polynomials with different origins");
        self.grow(other.re.len() - 1);
        for j in 0..other.re.len() {
            self.re[j] += s * other.re[j];
            self.im[j] += s * other.im[j];
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            origin: self.origin,
            re: self.re.iter().map(|c| c * s).collect(),
            im: self.im.iter().map(|c| c * s).collect(),
        }
    }

    /// Value and gradient at `p`.
    pub fn eval_grad(&self, p: Vec2) -> (f64, Vec2) {
        let w = Complex::new(p.x - self.origin.x, p.y - self.origin.y);
        let mut pw = Complex::new(1.0, 0.0);
        let mut prev = Complex::new(0.0, 0.0);
        let mut value = 0.0;
        // F(w) = Σ c_j w^j with c_j = re_j - i·im_j, h = Re F, ∇h = (Re F', -Im F')
        let mut dfz = Complex::new(0.0, 0.0);
        for j in 0..self.re.len() {
            value += self.re[j] * pw.re + self.im[j] * pw.im;
            if j > 0 {
                dfz += Complex::new(self.re[j], -self.im[j]) * prev * j as f64;
            }
            prev = pw;
            pw *= w;
        }
        (value, Vec2::new(dfz.re, -dfz.im))
    }

    pub fn eval(&self, p: Vec2) -> f64 {
        self.eval_grad(p).0
    }

    /// A random combination of degree `1..=degree` terms with coefficients in `[-1, 1]`.
    /// With `vanish_on_axis`, only `Im((z-a)^j)` terms with real `a` are used, so
    /// the polynomial vanishes on the line `y = origin.y`.
    pub fn random<R: Rng>(rng: &mut R, degree: usize, vanish_on_axis: bool) -> Self {
        let mut p = Self::zero();
        for j in 1..=degree {
            let b: f64 = rng.gen_range(-1.0..1.0);
            p.set_im(j, b);
            if !vanish_on_axis {
                let a: f64 = rng.gen_range(-1.0..1.0);
                p.set_re(j, a);
            }
        }
        if !vanish_on_axis {
            p.set_re(0, rng.gen_range(-1.0..1.0));
        }
        p
    }

    /// Parses a sum such as `y + 0.5*Im(z^2) - Re(z^3) + 2`.
    ///
    /// Terms: an optional numeric coefficient followed by `*`, then one of
    /// `Re(z^k)`, `Im(z^k)`, `Re(z)`, `Im(z)`, `x`, `y`; or a bare number.
    pub fn parse(src: &str) -> Result<Self> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty harmonic expression".into()));
        }
        let mut p = Self::zero();
        let bytes = s.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = 1.0;
            while i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                if bytes[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            let mut depth = 0;
            while i < bytes.len() {
                match bytes[i] {
                    b'(' => depth += 1,
                    b')' => depth -= 1,
                    b'+' | b'-' if depth == 0 && i > start && !matches!(bytes[i - 1], b'e' | b'E' | b'^') => break,
                    _ => {}
                }
                i += 1;
            }
            let term = &s[start..i];
            if term.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {src:?}")));
            }
            let (coef, atom) = match term.split_once('*') {
                Some((c, a)) => (parse_number(c)?, a),
                None => match parse_number(term) {
                    Ok(c) => {
                        p.re[0] += sign * c;
                        continue;
                    }
                    Err(_) => (1.0, term),
                },
            };
            let c = sign * coef;
            match atom {
                "x" => p.add_term(true, 1, c),
                "y" => p.add_term(false, 1, c),
                _ => {
                    let (is_re, rest) = if let Some(r) = atom.strip_prefix("Re(") {
                        (true, r)
                    } else if let Some(r) = atom.strip_prefix("Im(") {
                        (false, r)
                    } else {
                        return Err(Error::Parse(format!("unknown term {atom:?}")));
                    };
                    let inner = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unclosed term {atom:?}")))?;
                    let k = if inner == "z" {
                        1
                    } else if let Some(e) = inner.strip_prefix("z^") {
                        e.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent in {atom:?}")))?
                    } else {
                        return Err(Error::Parse(format!("expected z or z^k in {atom:?}")));
                    };
                    if k > 64 {
                        return Err(Error::Parse(format!("degree {k} is too large")));
                    }
                    p.add_term(is_re, k, c);
                }
            }
        }
        Ok(p)
    }

    fn add_term(&mut self, is_re: bool, k: usize, c: f64) {
        self.grow(k);
        if is_re {
            self.re[k] += c;
        } else {
            self.im[k] += c;
        }
    }
}

/// Renders in the grammar of [`HarmonicPolynomial::parse`]. The origin is not shown.
impl std::fmt::Display for HarmonicPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut terms = Vec::new();
        if self.re[0] != 0.0 {
            terms.push(format!("{:?}", self.re[0]));
        }
        for k in 1..self.re.len() {
            if self.re[k] != 0.0 {
                terms.push(format!("{:?}*Re(z^{k})", self.re[k]));
            }
            if self.im[k] != 0.0 {
                terms.push(format!("{:?}*Im(z^{k})", self.im[k]));
            }
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&terms.join(" + "))
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_reproduces_values() {
        let mut rng = crate::sampling::rng(5);
        let p = HarmonicPolynomial::random(&mut rng, 5, false).with_origin(Vec2::new(0.3, -0.1));
        let c = Vec2::new(-0.2, 0.4);
        let b = p.expand_about(c);
        let q = p.recentered(Vec2::ZERO);
        for w in [Vec2::new(0.1, 0.2), Vec2::new(-0.3, 0.05)] {
            let z = Complex::new(w.x, w.y);
            let v: f64 = b.iter().enumerate().map(|(k, bk)| (bk * z.powi(k as i32)).re).sum();
            assert!((v - p.eval(c + w)).abs() < 1e-13);
            assert!((q.eval(w) - p.eval(w)).abs() < 1e-13);
        }
    }

    #[test]
    fn display_round_trips() {
        let mut rng = crate::sampling::rng(3);
        for deg in 0..7 {
            let p = HarmonicPolynomial::random(&mut rng, deg, deg % 2 == 0);
            let q = HarmonicPolynomial::parse(&p.to_string()).unwrap();
            for pt in [Vec2::new(0.3, -0.2), Vec2::new(-0.7, 0.5)] {
                assert_eq!(p.eval(pt), q.eval(pt));
            }
        }
        assert_eq!(HarmonicPolynomial::zero().to_string(), "0");
    }

    #[test]
    fn powers() {
        let p = HarmonicPolynomial::re_power(2);
        assert!((p.eval(Vec2::new(3.0, 2.0)) - 5.0).abs() < 1e-14);
        let q = HarmonicPolynomial::im_power(2);
        assert!((q.eval(Vec2::new(3.0, 2.0)) - 12.0).abs() < 1e-14);
        let (_, g) = q.eval_grad(Vec2::new(3.0, 2.0));
        assert!((g.x - 4.0).abs() < 1e-14 && (g.y - 6.0).abs() < 1e-14);
    }

    #[test]
    fn origin_shift() {
        let p = HarmonicPolynomial::im_power(3).with_origin(Vec2::new(0.4, 0.0));
        for x in [-1.0, 0.0, 0.4, 2.0] {
            assert!(p.eval(Vec2::new(x, 0.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn gradient_matches_differences() {
        let mut rng = crate::sampling::rng(3);
        let p = HarmonicPolynomial::random(&mut rng, 5, false);
        let x = Vec2::new(0.3, -0.2);
        let (_, g) = p.eval_grad(x);
        let h = 1e-6;
        let gx = (p.eval(x + Vec2::new(h, 0.0)) - p.eval(x - Vec2::new(h, 0.0))) / (2.0 * h);
        let gy = (p.eval(x + Vec2::new(0.0, h)) - p.eval(x - Vec2::new(0.0, h))) / (2.0 * h);
        assert!((g.x - gx).abs() < 1e-7 && (g.y - gy).abs() < 1e-7);
    }

    #[test]
    fn discrete_laplacian_vanishes() {
        let mut rng = crate::sampling::rng(5);
        let p = HarmonicPolynomial::random(&mut rng, 6, false);
        let h = 1e-3;
        for &(x, y) in &[(0.1, 0.2), (-0.5, 0.3), (0.7, -0.6)] {
            let c = Vec2::new(x, y);
            let lap = (p.eval(c + Vec2::new(h, 0.0)) + p.eval(c - Vec2::new(h, 0.0)) + p.eval(c + Vec2::new(0.0, h))
                + p.eval(c - Vec2::new(0.0, h))
                - 4.0 * p.eval(c))
                / (h * h);
            // fourth-order truncation of the 5-point stencil is about 1e-5 here
            assert!(lap.abs() < 1e-4, "{lap}");
        }
    }

    #[test]
    fn parser() {
        let p = HarmonicPolynomial::parse("y + 0.5*Im(z^2) - Re(z^3) + 2").unwrap();
        let z = Vec2::new(0.3, 0.7);
        let expect = 0.7 + 0.5 * 2.0 * 0.3 * 0.7 - (0.027 - 3.0 * 0.3 * 0.49) + 2.0;
        assert!((p.eval(z) - expect).abs() < 1e-14);
        assert_eq!(HarmonicPolynomial::parse("Re(z^2)").unwrap(), HarmonicPolynomial::re_power(2));
        assert!(HarmonicPolynomial::parse("Re(w^2)").is_err());
        assert!(HarmonicPolynomial::parse("").is_err());
        assert!(HarmonicPolynomial::parse("1e-3*x").is_ok());
    }
}
