//! The double-bracket escape from the three coordinate axes (3D Euler).

use mode_algebra::{canonical, euler_bilinear_vec, family, CoeffVec, SpanSet, WaveVector};

use crate::SaturationError;

const AXES: [[i32; 3]; 3] = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

/// Span of `B(B(e, e'), e'')` over `e, e', e''` in the three axis families.
pub fn axis_double_brackets() -> SpanSet {
    let axis: Vec<CoeffVec> = AXES.iter().flat_map(|k| family(*k)).map(CoeffVec::unit).collect();
    let mut out = SpanSet::new();
    for (i, a) in axis.iter().enumerate() {
        for b in &axis[i..] {
            let inner = euler_bilinear_vec(a, b);
            if inner.is_empty() {
                continue;
            }
            for c in &axis {
                out.insert(&euler_bilinear_vec(&inner, c));
            }
        }
    }
    out
}

/// Whether the double brackets of the axis families contain all of `F_{(1,1,1)}`.
///
/// Rejected unless `z` contains the three axis directions.
pub fn euler_axis_escape_check(z: &[WaveVector]) -> Result<bool, SaturationError> {
    let mut have = Vec::new();
    for k in z {
        have.push(canonical(*k)?.0);
    }
    for a in AXES {
        let k = WaveVector::d3(a[0], a[1], a[2]);
        if !have.contains(&k) {
            return Err(SaturationError::MissingAxis(k));
        }
    }
    let span = axis_double_brackets();
    Ok(family([1, 1, 1]).into_iter().all(|m| span.contains_mode(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_seed_escapes() {
        let z = [WaveVector::d3(1, 0, 0), WaveVector::d3(0, -1, 0), WaveVector::d3(0, 0, 1)];
        assert_eq!(euler_axis_escape_check(&z), Ok(true));
    }

    #[test]
    fn missing_axis_rejected() {
        let z = [WaveVector::d3(1, 0, 0), WaveVector::d3(0, 1, 0)];
        assert_eq!(euler_axis_escape_check(&z), Err(SaturationError::MissingAxis(WaveVector::d3(0, 0, 1))));
    }
}
