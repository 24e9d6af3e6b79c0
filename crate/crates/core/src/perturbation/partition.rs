//! Mixed partial derivatives of `e^{q(x)t}` through set partitions of the
//! derivative multi-index.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PerturbationError;

pub const MAX_PARTITION_ORDER: usize = 6;

/// Sparse multivariate polynomial, exponent vector to coefficient.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub vars: usize,
    pub terms: BTreeMap<Vec<u32>, Complex64>,
}

impl Polynomial {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn with_term(mut self, exponents: &[u32], coeff: impl Into<Complex64>) -> Self {
        assert_eq!(
            exponents.len(),
            self.vars,
            "exponent length must match variable count"
        );
        *self.terms.entry(exponents.to_vec()).or_default() += coeff.into();
        self
    }

    /// `-(x·Dx)` for a real square `D`.
    pub fn negative_quadratic_form(d: &[Vec<f64>]) -> Self {
        let n = d.len();
        let mut p = Self::new(n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                p = p.with_term(&e, -d[i][j]);
            }
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&k, &xi)| xi.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::new(self.vars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            *out.terms.entry(e2).or_default() += c * e[var] as f64;
        }
        out
    }
}

/// All set partitions of `{0, …, n-1}` in restricted-growth-string order.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        let n = rgs.len();
        if i == n {
            let blocks = if n == 0 { 0 } else { max + 1 };
            let mut parts = vec![Vec::new(); blocks];
            for (idx, &b) in rgs.iter().enumerate() {
                parts[b].push(idx);
            }
            out.push(parts);
            return;
        }
        let limit = if i == 0 { 0 } else { max + 1 };
        for b in 0..=limit {
            rgs[i] = b;
            rec(i + 1, max.max(b), rgs, out);
        }
    }
    rec(0, 0, &mut rgs, &mut out);
    out
}

/// `∂^α e^{q(x)t}` evaluated at `x`.
pub fn partition_derivative(
    alpha: &[u32],
    q: &Polynomial,
    x: &[f64],
    t: f64,
) -> Result<Complex64, PerturbationError> {
    let order: usize = alpha.iter().map(|&a| a as usize).sum();
    if order > MAX_PARTITION_ORDER {
        return Err(PerturbationError::OrderTooLarge {
            order,
            max: MAX_PARTITION_ORDER,
        });
    }
    if alpha.len() != q.vars || x.len() != q.vars {
        return Err(PerturbationError::ShapeMismatch);
    }
    let index: Vec<usize> = alpha
        .iter()
        .enumerate()
        .flat_map(|(v, &a)| std::iter::repeat_n(v, a as usize))
        .collect();
    let mut cache: HashMap<Vec<usize>, Complex64> = HashMap::new();
    let mut block_value = |vars: Vec<usize>| -> Complex64 {
        *cache.entry(vars.clone()).or_insert_with(|| {
            let mut p = q.clone();
            for &v in &vars {
                p = p.derivative(v);
            }
            p.eval(x) * t
        })
    };
    let mut sum = Complex64::new(0.0, 0.0);
    for partition in set_partitions(index.len()) {
        let mut prod = Complex64::new(1.0, 0.0);
        for blk in partition {
            let mut vars: Vec<usize> = blk.iter().map(|&i| index[i]).collect();
            vars.sort_unstable();
            prod *= block_value(vars);
        }
        sum += prod;
    }
    Ok(sum * (q.eval(x) * t).exp())
}
