use rayon::prelude::*;

/// `I_c = A·I_b^γ` for a linear base layer in (0, 1].
pub fn compress_base(base_linear: &[f64], gamma: f64, scale: f64) -> Vec<f64> {
    base_linear
        .par_iter()
        .map(|&b| scale * b.powf(gamma))
        .collect()
}

/// `D_E = D_max·(|D|/D_max)^β·sign(D)` with `D_max = max |D|`.
pub fn enhance_detail(detail: &[f64], beta: f64) -> Vec<f64> {
    let d_max = detail.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    if d_max == 0.0 {
        return vec![0.0; detail.len()];
    }
    detail
        .par_iter()
        .map(|&d| {
            if d == 0.0 {
                0.0
            } else {
                d_max * (d.abs() / d_max).powf(beta) * d.signum()
            }
        })
        .collect()
}

/// `Q_c = Q_max·I_c·D_E` for a linear enhanced detail layer.
pub fn recombine(i_c: &[f64], d_e: &[f64], q_max: f64) -> Vec<f64> {
    i_c.par_iter()
        .zip(d_e.par_iter())
        .map(|(&i, &d)| q_max * i * d)
        .collect()
}

/// `10^v` for each value.
pub fn to_linear(log10: &[f64]) -> Vec<f64> {
    log10.par_iter().map(|&v| 10f64.powf(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress() {
        assert_eq!(compress_base(&[0.25, 1.0], 0.5, 1.0), vec![0.5, 1.0]);
        assert_eq!(compress_base(&[0.3, 0.7], 1.0, 1.0), vec![0.3, 0.7]);
        assert_eq!(compress_base(&[1.0], 0.37, 2.0), vec![2.0]);
    }

    #[test]
    fn detail_stretch() {
        let out = enhance_detail(&[-0.2, 0.1, 0.4], 1.1);
        // 0.4·0.5^1.1 and 0.4·0.25^1.1
        for (o, e) in out.iter().zip([-0.186607, 0.087055, 0.4]) {
            assert!((o - e).abs() < 1e-5, "{out:?}");
        }
        assert_eq!(out[2], 0.4);
        assert_eq!(enhance_detail(&[0.0, 0.0], 1.5), vec![0.0, 0.0]);
        let v = [-0.5, 0.25, 1.0, 0.0];
        for (o, d) in enhance_detail(&v, 1.0).iter().zip(v) {
            assert!((o - d).abs() < 1e-15);
        }
    }

    #[test]
    fn recombination() {
        assert_eq!(recombine(&[1.0, 1.0], &[1.0, 1.0], 7.0), vec![7.0, 7.0]);
        assert_eq!(recombine(&[0.5], &[1.0], 8.0), vec![4.0]);
        assert_eq!(to_linear(&[0.0, 1.0, -1.0]), vec![1.0, 10.0, 0.1]);
    }
}
