use super::Order;
use crate::error::{Error, Result};

/// Largest atom count accepted by [`brute_force_w1`] (8! = 40,320 couplings).
pub const MAX_BRUTE_FORCE_ATOMS: usize = 8;

/// Exact `W_p` between two unsorted equal-size measures by trying every
/// one-to-one coupling. Test oracle for the sorted closed form.
pub fn brute_force_w1(a: &[f64], b: &[f64], order: Order) -> Result<f64> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::Shape(format!("atom counts differ: {n} vs {}", b.len())));
    }
    if n == 0 {
        return Err(Error::Shape("measures have no atoms".into()));
    }
    if n > MAX_BRUTE_FORCE_ATOMS {
        return Err(Error::SizeGuard(format!(
            "brute force limited to {MAX_BRUTE_FORCE_ATOMS} atoms, got {n}"
        )));
    }

    let cost = |perm: &[usize]| -> f64 {
        a.iter()
            .zip(perm)
            .map(|(x, &j)| order.pow(x - b[j]))
            .sum::<f64>()
    };

    // Heap's algorithm, iterative form
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0usize; n];
    let mut best = cost(&perm);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            best = best.min(cost(&perm));
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
    Ok(order.root(best / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_multiset() {
        assert_eq!(brute_force_w1(&[0.0, 1.0], &[1.0, 0.0], Order::One).unwrap(), 0.0);
    }

    #[test]
    fn unit_shift() {
        assert_eq!(brute_force_w1(&[0.0, 2.0], &[1.0, 3.0], Order::One).unwrap(), 1.0);
    }

    #[test]
    fn visits_every_permutation() {
        // only the reversing coupling costs zero
        let a: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().rev().copied().collect();
        assert_eq!(brute_force_w1(&a, &b, Order::Two).unwrap(), 0.0);
    }

    #[test]
    fn guards() {
        let nine = [0.0; 9];
        assert!(matches!(
            brute_force_w1(&nine, &nine, Order::One),
            Err(Error::SizeGuard(_))
        ));
        assert!(matches!(
            brute_force_w1(&[0.0], &[0.0, 1.0], Order::One),
            Err(Error::Shape(_))
        ));
    }
}
