use crate::scalar::Real;

/// sup |F_n − F| for samples against a continuous CDF. Sorts `samples`.
pub fn ks_one_sample<T: Real, F: Fn(T) -> T>(samples: &mut [T], cdf: F) -> T {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = T::from_usize(samples.len()).unwrap();
    let mut d = T::zero();
    for (i, &x) in samples.iter().enumerate() {
        let f = cdf(x);
        let below = T::from_usize(i).unwrap() / n;
        let above = T::from_usize(i + 1).unwrap() / n;
        d = d.max((f - below).abs()).max((above - f).abs());
    }
    d
}

/// Two-sample Kolmogorov–Smirnov statistic. Sorts both inputs.
pub fn ks_two_sample<T: Real>(a: &mut [T], b: &mut [T]) -> T {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (T::from_usize(a.len()).unwrap(), T::from_usize(b.len()).unwrap());
    let (mut i, mut j) = (0, 0);
    let mut d = T::zero();
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        let fa = T::from_usize(i).unwrap() / na;
        let fb = T::from_usize(j).unwrap() / nb;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Σ |p_i − q_i| Δx_i for two densities on the same uniform-width bins.
pub fn l1_distance<T: Real>(p: &[T], q: &[T], width: T) -> T {
    p.iter().zip(q).map(|(&a, &b)| (a - b).abs()).sum::<T>() * width
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_identical_samples_is_zero() {
        let mut a = vec![0.3, 0.1, 0.2];
        let mut b = a.clone();
        assert_eq!(ks_two_sample(&mut a, &mut b), 0.0);
    }

    #[test]
    fn ks_of_disjoint_samples_is_one() {
        let mut a = vec![0.0, 0.1];
        let mut b = vec![1.0, 1.1, 1.2];
        assert_eq!(ks_two_sample(&mut a, &mut b), 1.0);
    }

    #[test]
    fn ks_one_sample_uniform_grid() {
        let mut s: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_one_sample(&mut s, |x| x);
        assert!((d - 0.005).abs() < 1e-12);
    }
}
