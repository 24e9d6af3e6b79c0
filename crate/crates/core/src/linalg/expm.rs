use num_complex::Complex64;

use super::{solve_linear, ComplexMatrix, LinalgError};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

/// `e^M` by scaling and squaring with the diagonal [13/13] Padé approximant.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows(), m.cols()));
    }
    if m.as_slice()
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(LinalgError::NonFinite);
    }
    let n = m.rows();
    let norm1 = m.norm_one();
    if norm1 == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(s));
    let id = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| Complex64::new(PADE13[k], 0.0);
    let lin = |terms: &[(&ComplexMatrix, usize)]| {
        let mut acc = ComplexMatrix::zeros(n, n);
        for (mat, k) in terms {
            acc += &mat.scale(b(*k));
        }
        acc
    };
    let u_inner = &(&a6 * &lin(&[(&a6, 13), (&a4, 11), (&a2, 9)]))
        + &lin(&[(&a6, 7), (&a4, 5), (&a2, 3), (&id, 1)]);
    let u = &a * &u_inner;
    let v = &(&a6 * &lin(&[(&a6, 12), (&a4, 10), (&a2, 8)]))
        + &lin(&[(&a6, 6), (&a4, 4), (&a2, 2), (&id, 0)]);
    let mut r = solve_linear(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}
