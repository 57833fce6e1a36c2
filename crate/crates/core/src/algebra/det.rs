use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::modp::{self, Crt};
use super::{AlgebraError, LambdaPoly, LaurentPoly, Poly, SqrtQScalar};

fn check_square<T>(rows: &[Vec<T>]) -> Result<usize, AlgebraError> {
    let n = rows.len();
    for (row, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(AlgebraError::NonSquare { row, len: r.len(), expected: n });
        }
    }
    Ok(n)
}

/// Exact determinant of a square matrix of Laurent polynomials.
///
/// Uses cofactor expansion up to 6x6 and fraction-free elimination beyond;
/// the two routes are exposed separately as [`laurent_det_cofactor`] and
/// [`laurent_det_bareiss`].
pub fn laurent_det(q: u64, rows: &[Vec<LaurentPoly>]) -> Result<LaurentPoly, AlgebraError> {
    let n = check_square(rows)?;
    if n <= 6 {
        laurent_det_cofactor(q, rows)
    } else {
        laurent_det_bareiss(q, rows)
    }
}

/// Determinant by Laplace expansion along the first row.
pub fn laurent_det_cofactor(q: u64, rows: &[Vec<LaurentPoly>]) -> Result<LaurentPoly, AlgebraError> {
    let n = check_square(rows)?;
    check_ring(q, rows)?;
    let cols: Vec<usize> = (0..n).collect();
    Ok(cofactor(q, rows, 0, &cols))
}

fn cofactor(q: u64, rows: &[Vec<LaurentPoly>], row: usize, cols: &[usize]) -> LaurentPoly {
    if cols.is_empty() {
        return LaurentPoly::one(q);
    }
    let mut acc = LaurentPoly::zero(q);
    for (i, &c) in cols.iter().enumerate() {
        let entry = &rows[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = cofactor(q, rows, row + 1, &rest);
        let term = entry * &minor;
        acc = if i % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Determinant by Bareiss fraction-free elimination with row pivoting.
pub fn laurent_det_bareiss(q: u64, rows: &[Vec<LaurentPoly>]) -> Result<LaurentPoly, AlgebraError> {
    let n = check_square(rows)?;
    check_ring(q, rows)?;
    let mut a: Vec<Vec<LaurentPoly>> = rows.to_vec();
    let mut prev = LaurentPoly::one(q);
    let mut negate = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(LaurentPoly::zero(q));
        };
        if piv != k {
            a.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss step divides exactly");
            }
            a[i][k] = LaurentPoly::zero(q);
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { LaurentPoly::one(q) } else { a[n - 1][n - 1].clone() };
    Ok(if negate { -det } else { det })
}

fn check_ring(q: u64, rows: &[Vec<LaurentPoly>]) -> Result<(), AlgebraError> {
    match rows.iter().flatten().find(|p| p.q() != q) {
        Some(p) => Err(AlgebraError::RingMismatch(q, p.q())),
        None => Ok(()),
    }
}

/// Rewrites a Laurent polynomial in `mu` as `mu^k * u * P(lambda)` with
/// `lambda = sqrt(q) mu`, a unit `u` and `P` normalised (integer, content
/// one, positive leading coefficient, `P(0) != 0`). Returns `(k, P)`.
///
/// Every coefficient of `mu^e` must be a rational multiple of a common
/// `sqrt(q)^(e + s)` for a fixed parity `s`; otherwise `sqrt(q)` does not
/// cancel and the input was not a scaled resonance determinant.
pub fn to_lambda(p: &LaurentPoly) -> Result<(i64, LambdaPoly), AlgebraError> {
    let q = p.q();
    let lo = p.min_exp().ok_or(AlgebraError::ZeroPolynomial)?;
    let hi = p.max_exp().unwrap();
    let q_rat = BigRational::from_integer(BigInt::from(q));
    // c_e mu^e = c_e sqrt(q)^{-e} lambda^e; collect d_e = c_e sqrt(q)^{-e}.
    let mut parity: Option<bool> = None; // true: every d_e is a multiple of sqrt(q)
    let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
    for e in lo..=hi {
        let c = p.coeff(e);
        if c.is_zero() {
            coeffs.push(BigRational::zero());
            continue;
        }
        // sqrt(q)^{-e} = q^{-floor(e/2)} * sqrt(q)^{-(e mod 2)} and
        // sqrt(q)^{-1} = sqrt(q) / q.
        let half = Integer::div_floor(&e, &2);
        let mut d = c.scale(&pow_rat(&q_rat, -half));
        if Integer::mod_floor(&e, &2) == 1 {
            d = (&d * &SqrtQScalar::sqrt_q(q)).scale(&q_rat.recip());
        }
        let (is_root, value) = match (d.a().is_zero(), d.b().is_zero()) {
            (false, true) => (false, d.a().clone()),
            (true, false) => (true, d.b().clone()),
            _ => return Err(AlgebraError::IrrationalResidue { exponent: e }),
        };
        match parity {
            None => parity = Some(is_root),
            Some(s) if s != is_root => return Err(AlgebraError::IrrationalResidue { exponent: e }),
            _ => {}
        }
        coeffs.push(value);
    }
    Ok((lo, LambdaPoly::normalize(&Poly::new(coeffs))?))
}

fn pow_rat(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    (0..e.unsigned_abs()).fold(BigRational::one(), |acc, _| acc * &base)
}

/// Exact determinant of a square matrix of rational polynomials.
///
/// Rows are scaled to integer polynomials; the integer determinant is then
/// recovered by evaluation at `0..=D` modulo several 62-bit primes,
/// interpolation, and Chinese remaindering until the modulus exceeds twice a
/// Hadamard-type coefficient bound.
pub fn poly_det(rows: &[Vec<Poly>]) -> Result<Poly, AlgebraError> {
    let n = check_square(rows)?;
    if n == 0 {
        return Ok(Poly::one());
    }
    // Clear denominators row by row.
    let mut scale = BigInt::one();
    let mut int_rows: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(n);
    for r in rows {
        let den = r
            .iter()
            .flat_map(|p| p.coeffs().iter())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let d = BigRational::from_integer(den.clone());
        int_rows.push(r.iter().map(|p| p.coeffs().iter().map(|c| (c * &d).to_integer()).collect()).collect());
        scale *= den;
    }
    let degree_bound: usize =
        int_rows.iter().map(|r| r.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0)).sum();
    // |coefficient| <= max_{|x|=1} |det| <= prod_i ||row_i||_2 (Hadamard).
    let mut log2_bound = 1.0;
    for r in &int_rows {
        let mut row_bits = 0.0f64;
        for p in r {
            let e = p.iter().map(modp::log2_bound).fold(0.0, f64::max) + libm::log2(p.len().max(1) as f64);
            row_bits = row_bits.max(e);
        }
        log2_bound += row_bits + 0.5 * libm::log2(n as f64);
    }
    let points = degree_bound + 1;
    let mut crt = Crt::new(points);
    let mut bits_have = 0.0;
    for p in modp::large_primes() {
        if bits_have > log2_bound + 2.0 {
            break;
        }
        let residues: Vec<Vec<Vec<u64>>> =
            int_rows.iter().map(|r| r.iter().map(|c| c.iter().map(|x| modp::reduce(x, p)).collect()).collect()).collect();
        let values: Vec<u64> = (0..points as u64)
            .map(|x| {
                let m: Vec<Vec<u64>> = residues
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|c| c.iter().rev().fold(0u64, |acc, &a| modp::add_mod(modp::mul_mod(acc, x, p), a, p)))
                            .collect()
                    })
                    .collect();
                modp::det_mod(m, p)
            })
            .collect();
        crt.push(&modp::interpolate_mod(&values, p), p);
        bits_have += libm::log2(p as f64);
    }
    let scale = BigRational::from_integer(scale);
    Ok(Poly::new(crt.symmetric().into_iter().map(|c| BigRational::from_integer(c) / &scale).collect()))
}

/// Exact determinant of a square matrix of rational polynomials by Bareiss
/// elimination in `Q[x]`. Slower than [`poly_det`]; kept as an independent
/// route for cross-checking.
pub fn poly_det_bareiss(rows: &[Vec<Poly>]) -> Result<Poly, AlgebraError> {
    let n = check_square(rows)?;
    let mut a: Vec<Vec<Poly>> = rows.to_vec();
    let mut prev = Poly::one();
    let mut negate = false;
    for k in 0..n {
        let Some(piv) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Poly::zero());
        };
        if piv != k {
            a.swap(piv, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                let (quot, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss step divides exactly");
                a[i][j] = quot;
            }
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = if n == 0 { Poly::one() } else { a[n - 1][n - 1].clone() };
    Ok(if negate { -&det } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use proptest::prelude::*;

    fn lp(q: u64, terms: &[(i64, i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(q, terms.iter().map(|&(e, a, b)| (e, SqrtQScalar::new(q, rat(a, 1), rat(b, 1)))))
    }

    #[test]
    fn one_by_one() {
        // (mu - 1/mu) / 2
        let h = LaurentPoly::from_terms(
            3,
            [(1, SqrtQScalar::from_rational(3, rat(1, 2))), (-1, SqrtQScalar::from_rational(3, rat(-1, 2)))],
        );
        let d = laurent_det(3, &[alloc::vec![h.clone()]]).unwrap();
        assert_eq!(d, h);
    }

    #[test]
    fn non_square_rejected() {
        let r = alloc::vec![alloc::vec![LaurentPoly::one(2), LaurentPoly::one(2)]];
        assert_eq!(laurent_det(2, &r), Err(AlgebraError::NonSquare { row: 0, len: 2, expected: 1 }));
        let p = alloc::vec![alloc::vec![Poly::one()], alloc::vec![Poly::one(), Poly::zero()]];
        assert!(matches!(poly_det(&p), Err(AlgebraError::NonSquare { row: 0, .. })));
    }

    #[test]
    fn lambda_form_of_tree_determinant() {
        // 2q mu H for the q = 2 tree: f - lambda^2 - q = 1 - lambda^2 = 1 - 2 mu^2.
        let p = lp(2, &[(0, 1, 0), (2, -2, 0)]);
        let (k, l) = to_lambda(&p).unwrap();
        assert_eq!(k, 0);
        assert_eq!(l, LambdaPoly::from_ints(&[-1, 0, 1]).unwrap());
    }

    #[test]
    fn lambda_form_with_odd_exponents() {
        // sqrt(2) mu^3 - 4 sqrt(2) mu = lambda^3 / 2 - 4 lambda
        let p = lp(2, &[(3, 0, 1), (1, 0, -4)]);
        let (k, l) = to_lambda(&p).unwrap();
        assert_eq!(k, 1);
        assert_eq!(l, LambdaPoly::from_ints(&[-8, 0, 1]).unwrap());
        // mu + 1 mixes parities
        assert!(matches!(to_lambda(&lp(2, &[(1, 1, 0), (0, 1, 0)])), Err(AlgebraError::IrrationalResidue { .. })));
        // for square q everything is rational
        assert!(to_lambda(&lp(4, &[(1, 1, 0), (0, 1, 0)])).is_ok());
    }

    #[test]
    fn modular_matches_bareiss_on_structured_matrix() {
        // lambda * J + diag(3 - lambda^2), 7x7
        let n = 7;
        let rows: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { Poly::from_ints(&[3, 0, -1]) } else { Poly::from_ints(&[0, (i + j) as i64 % 3]) })
                    .collect()
            })
            .collect();
        assert_eq!(poly_det(&rows).unwrap(), poly_det_bareiss(&rows).unwrap());
    }

    fn arb_laurent(q: u64) -> impl Strategy<Value = LaurentPoly> {
        proptest::collection::vec((-2i64..3, -4i64..5, -2i64..3), 0..3).prop_map(move |t| lp(q, &t))
    }

    fn arb_matrix(q: u64, n: usize) -> impl Strategy<Value = Vec<Vec<LaurentPoly>>> {
        proptest::collection::vec(proptest::collection::vec(arb_laurent(q), n), n)
    }

    fn arb_poly_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<Poly>>> {
        let entry = proptest::collection::vec((-9i64..10, 1i64..4), 0..4)
            .prop_map(|c| Poly::new(c.into_iter().map(|(a, b)| rat(a, b)).collect()));
        proptest::collection::vec(proptest::collection::vec(entry, n), n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn cofactor_and_bareiss_agree(m in (2u64..6).prop_flat_map(|q| arb_matrix(q, 4))) {
            let q = m[0][0].q();
            prop_assert_eq!(laurent_det_cofactor(q, &m).unwrap(), laurent_det_bareiss(q, &m).unwrap());
        }

        #[test]
        fn row_scaling_and_swaps(m in arb_matrix(3, 3), c in arb_laurent(3)) {
            let d = laurent_det(3, &m).unwrap();
            let mut scaled = m.clone();
            scaled[1] = scaled[1].iter().map(|x| x * &c).collect();
            prop_assert_eq!(laurent_det(3, &scaled).unwrap(), &d * &c);
            let mut swapped = m.clone();
            swapped.swap(0, 2);
            prop_assert_eq!(laurent_det(3, &swapped).unwrap(), -&d);
        }

        #[test]
        fn poly_routes_agree(m in (1usize..6).prop_flat_map(arb_poly_matrix)) {
            prop_assert_eq!(poly_det(&m).unwrap(), poly_det_bareiss(&m).unwrap());
        }
    }
}
