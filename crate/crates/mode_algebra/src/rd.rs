//! Products of Dirichlet sine modes on `[0, pi]`.

use crate::coeff::CoeffVec;
use crate::mode::{Field, TrigMode};
use crate::span::SpanSet;
use crate::ModeError;

/// Sine expansion of `sin(k_1 x) ... sin(k_p x)` for odd `p`, as `(m, coefficient)` with `m >= 1`.
///
/// Writing each factor as `(e^{ikx} - e^{-ikx}) / 2i`, the coefficient of `sin(mx)` is
/// `(-1/4)^{(p-1)/2}` times the signed count of sign patterns with `sum s_i k_i = m`.
pub fn sine_product(ks: &[i32]) -> Vec<(i32, f64)> {
    let p = ks.len();
    assert!(p % 2 == 1, "sine products of even degree are not sine series");
    let pre = (-0.25f64).powi(((p - 1) / 2) as i32);
    let mut acc: std::collections::BTreeMap<i32, f64> = Default::default();
    for mask in 0u32..(1 << p) {
        let mut q = 0i32;
        let mut sign = 1.0;
        for (i, &k) in ks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                q -= k;
                sign = -sign;
            } else {
                q += k;
            }
        }
        if q > 0 {
            *acc.entry(q).or_insert(0.0) += sign;
        }
    }
    acc.into_iter().filter(|(_, c)| *c != 0.0).map(|(m, c)| (m, pre * c)).collect()
}

/// `lead * h_1 ... h_p` expanded in the sine basis (no truncation).
pub fn rd_multilinear(lead: f64, hs: &[&CoeffVec]) -> CoeffVec {
    let mut out = CoeffVec::new();
    if hs.is_empty() || hs.iter().any(|h| h.is_empty()) {
        return out;
    }
    let supports: Vec<Vec<(i32, f64)>> = hs.iter().map(|h| h.iter().map(|(m, c)| (m.k.coords()[0], *c)).collect()).collect();
    let mut idx = vec![0usize; hs.len()];
    let mut ks = vec![0i32; hs.len()];
    loop {
        let mut coef = lead;
        for (i, &j) in idx.iter().enumerate() {
            ks[i] = supports[i][j].0;
            coef *= supports[i][j].1;
        }
        if coef != 0.0 {
            for (m, c) in sine_product(&ks) {
                out.add(TrigMode::rd(m), coef * c);
            }
        }
        // advance the mixed-radix counter
        let mut d = 0;
        loop {
            if d == idx.len() {
                return out.cleaned(1e-15);
            }
            idx[d] += 1;
            if idx[d] < supports[d].len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

fn check_rd(inputs: &[TrigMode]) -> Result<(), ModeError> {
    match inputs.iter().find(|m| m.field != Field::RdScalar) {
        Some(m) => Err(ModeError::BadMode(format!("expected a Dirichlet sine mode, got {m}"))),
        None => Ok(()),
    }
}

/// Span of all products `h_1 ... h_degree` with every `h_i` drawn from `inputs`.
pub fn rd_product_span(inputs: &[TrigMode], degree: usize) -> Result<SpanSet, ModeError> {
    if degree % 2 == 0 {
        return Err(ModeError::EvenDegree(degree));
    }
    check_rd(inputs)?;
    let mut span = SpanSet::new();
    let units: Vec<CoeffVec> = inputs.iter().map(|m| CoeffVec::unit(*m)).collect();
    for combo in multisets(inputs.len(), degree) {
        let hs: Vec<&CoeffVec> = combo.iter().map(|&i| &units[i]).collect();
        span.insert(&rd_multilinear(1.0, &hs));
    }
    Ok(span)
}

/// Non-decreasing index tuples of length `r` over `0..n`.
pub fn multisets(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut cur = vec![0usize; r];
    loop {
        out.push(cur.clone());
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] + 1 < n {
                let v = cur[i] + 1;
                for x in &mut cur[i..] {
                    *x = v;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_cubed() {
        let p = sine_product(&[1, 1, 1]);
        assert_eq!(p, vec![(1, 0.75), (3, -0.25)]);
    }

    #[test]
    fn sin_squared_times_sin2() {
        let p = sine_product(&[1, 1, 2]);
        assert_eq!(p, vec![(2, 0.5), (4, -0.25)]);
    }

    #[test]
    fn degree_one_is_identity() {
        assert_eq!(sine_product(&[5]), vec![(5, 1.0)]);
    }

    #[test]
    fn even_degree_rejected() {
        assert!(matches!(rd_product_span(&[TrigMode::rd(1)], 2), Err(ModeError::EvenDegree(2))));
    }

    #[test]
    fn empty_inputs_give_empty_span() {
        assert_eq!(rd_product_span(&[], 3).unwrap().dim(), 0);
    }

    #[test]
    fn multiset_count() {
        // C(n + r - 1, r)
        assert_eq!(multisets(4, 3).len(), 20);
        assert_eq!(multisets(1, 3), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn multilinear_is_symmetric() {
        let a = CoeffVec::from_pairs([(TrigMode::rd(1), 0.3), (TrigMode::rd(4), -1.0)]);
        let b = CoeffVec::from_pairs([(TrigMode::rd(2), 2.0)]);
        let c = CoeffVec::from_pairs([(TrigMode::rd(3), 1.5), (TrigMode::rd(1), 0.2)]);
        let x = rd_multilinear(-1.0, &[&a, &b, &c]);
        let y = rd_multilinear(-1.0, &[&c, &a, &b]);
        let mut d = x.clone();
        d.add_scaled(-1.0, &y);
        assert!(d.norm_inf() < 1e-14);
    }
}
