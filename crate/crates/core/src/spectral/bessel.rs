//! Bessel functions of the first kind and their positive zeros.

/// `J_k(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2·Σ J_{2m} = 1`.
pub fn bessel_j(k: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ax = x.abs();
    let sign = if x < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
    let big = (k as f64).max(ax);
    let mut start = (big + 30.0 + (60.0 * big).sqrt()) as usize;
    start += start % 2;
    let two_over_x = 2.0 / ax;
    let (mut next, mut cur) = (0.0_f64, 1e-30_f64);
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for n in (0..=start).rev() {
        // cur = J_n (unnormalized), next = J_{n+1}
        if n as u32 == k {
            wanted = cur;
        }
        if n == 0 {
            norm += cur;
        } else if n % 2 == 0 {
            norm += 2.0 * cur;
        }
        if n > 0 {
            let prev = n as f64 * two_over_x * cur - next;
            next = cur;
            cur = prev;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            wanted *= 1e-250;
        }
    }
    sign * wanted / norm
}

/// `J_k'(x) = (J_{k-1}(x) - J_{k+1}(x)) / 2`, with `J_0' = -J_1`.
pub fn bessel_j_prime(k: u32, x: f64) -> f64 {
    if k == 0 {
        -bessel_j(1, x)
    } else {
        0.5 * (bessel_j(k - 1, x) - bessel_j(k + 1, x))
    }
}

/// The `j`-th positive zero `j_{k,j}` of `J_k`, `j ≥ 1`.
pub fn bessel_zero(k: u32, j: u32) -> f64 {
    assert!(j >= 1, "zeros are counted from 1");
    // j_{k,1} > k, and consecutive zeros are more than 3 apart
    let step = 0.05;
    let mut a = (k as f64).max(step);
    let mut fa = bessel_j(k, a);
    let mut found = 0;
    loop {
        let b = a + step;
        let fb = bessel_j(k, b);
        if fa == 0.0 || fa * fb < 0.0 {
            found += 1;
            if found == j {
                return if fa == 0.0 { a } else { refine_zero(k, a, b, fa) };
            }
        }
        a = b;
        fa = fb;
    }
}

fn refine_zero(k: u32, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 4.0 * f64::EPSILON * b {
        let m = 0.5 * (a + b);
        let fm = bessel_j(k, m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(k: u32, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(k as i32) / (1..=k).map(f64::from).product::<f64>();
        let mut sum = term;
        for m in 1..200 {
            term *= -(0.25 * x * x) / (m as f64 * (m + k) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    #[test]
    fn matches_power_series() {
        for k in 0..8 {
            for i in 1..=80 {
                let x = 0.1 * i as f64;
                let (a, b) = (bessel_j(k, x), series(k, x));
                assert!((a - b).abs() < 1e-12, "k={k} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let h = 1e-6;
        for k in 0..4 {
            let x = 3.7;
            let fd = (bessel_j(k, x + h) - bessel_j(k, x - h)) / (2.0 * h);
            assert!((fd - bessel_j_prime(k, x)).abs() < 1e-8);
        }
    }

    #[test]
    fn first_zeros() {
        let j01 = bessel_zero(0, 1);
        let j02 = bessel_zero(0, 2);
        assert!(series(0, j01).abs() < 1e-14);
        assert!(series(0, j02).abs() < 1e-14);
        assert!((j01 - 2.404826).abs() < 1e-6);
        assert!((j02 - 5.520078).abs() < 1e-6);
        assert!((j01 / j02 - 0.43565).abs() < 1e-5);
        let j11 = bessel_zero(1, 1);
        assert!(series(1, j11).abs() < 1e-14 && j11 > 3.8 && j11 < 3.9);
    }

    #[test]
    fn odd_order_is_odd() {
        assert_eq!(bessel_j(3, -2.0), -bessel_j(3, 2.0));
        assert_eq!(bessel_j(2, -2.0), bessel_j(2, 2.0));
    }
}
