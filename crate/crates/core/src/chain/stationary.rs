use super::arborescence::{for_each_in_tree, MAX_ORACLE_STATES};
use super::kernel::TransitionMatrix;
use super::Distribution;
use crate::error::{Error, Result};

/// Stationary law by Grassmann-Taksar-Heyman state reduction. The
/// elimination only adds nonnegative numbers, so it stays accurate on
/// nearly decomposable chains where a plain linear solve loses digits.
pub fn stationary_linear(p: &TransitionMatrix) -> Result<Distribution> {
    let n = p.size();
    let mut a = vec![0.0; n * n];
    for z in 0..n {
        let (first, vals) = p.row(z);
        a[z * n + first..z * n + first + vals.len()].copy_from_slice(vals);
    }
    let mut pivots = vec![0.0; n];
    for k in (1..n).rev() {
        let (head, tail) = a.split_at_mut(k * n);
        let row_k = &mut tail[..k];
        let s: f64 = row_k.iter().sum();
        if !(s > 0.0) {
            return Err(Error::Singular(format!(
                "state {k} cannot reach any of states 0..{k} (pivot {s:e}); the chain is not irreducible"
            )));
        }
        pivots[k] = s;
        row_k.iter_mut().for_each(|x| *x /= s);
        for i in 0..k {
            let row_i = &mut head[i * n..i * n + n];
            let f = row_i[k];
            if f == 0.0 {
                continue;
            }
            for (x, &y) in row_i[..k].iter_mut().zip(row_k.iter()) {
                *x += f * y;
            }
        }
    }
    let mut pi = vec![0.0; n];
    pi[0] = 1.0;
    for k in 1..n {
        pi[k] = (0..k).map(|i| pi[i] * a[i * n + k]).sum::<f64>() / pivots[k];
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);

    let image = p.left_multiply(&pi);
    let residual: f64 = image.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
    if !(residual < 1e-10) {
        let smallest = pivots[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(Error::Singular(format!(
            "residual {residual:e} exceeds 1e-10 (smallest elimination pivot {smallest:e})"
        )));
    }
    Distribution::from_weights(pi)
}

/// Stationary law from the tree formula: the weight of z is the sum, over
/// all spanning trees directed into z, of the product of their edge
/// probabilities. Exhaustive, so limited to tiny chains.
pub fn stationary_tree(p: &TransitionMatrix) -> Result<Distribution> {
    let n = p.size();
    if n > MAX_ORACLE_STATES {
        return Err(Error::Infeasible { what: "tree enumeration", size: n.to_string(), cap: MAX_ORACLE_STATES });
    }
    let mut sigma = vec![0.0; n];
    for (root, s) in sigma.iter_mut().enumerate() {
        for_each_in_tree(n, root, |v, u| p.get(v, u) > 0.0, |parent| {
            *s += (0..n).filter(|&v| v != root).map(|v| p.get(v, parent[v])).product::<f64>();
        });
    }
    Distribution::from_weights(sigma).map_err(|_| Error::Singular("no spanning tree has positive weight".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chain(n: usize, rng: &mut ChaCha8Rng) -> TransitionMatrix {
        let rows = (0..n)
            .map(|_| {
                let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
            .collect();
        TransitionMatrix::from_dense(rows).unwrap()
    }

    #[test]
    fn symmetric_two_state() {
        let p = TransitionMatrix::from_dense(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        for pi in [stationary_linear(&p).unwrap(), stationary_tree(&p).unwrap()] {
            assert!((pi.get(0) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn birth_death_formula() {
        let (a, b) = (0.3, 0.05);
        let p = TransitionMatrix::from_dense(vec![vec![1.0 - a, a], vec![b, 1.0 - b]]).unwrap();
        let want = [b / (a + b), a / (a + b)];
        for pi in [stationary_linear(&p).unwrap(), stationary_tree(&p).unwrap()] {
            for k in 0..2 {
                assert!((pi.get(k) - want[k]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn doubly_stochastic_is_uniform() {
        let p = TransitionMatrix::from_dense(vec![
            vec![0.2, 0.5, 0.3],
            vec![0.3, 0.2, 0.5],
            vec![0.5, 0.3, 0.2],
        ])
        .unwrap();
        let pi = stationary_linear(&p).unwrap();
        for k in 0..3 {
            assert!((pi.get(k) - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn oracle_agreement_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [3, 4] {
            for _ in 0..20 {
                let p = random_chain(n, &mut rng);
                let a = stationary_linear(&p).unwrap();
                let b = stationary_tree(&p).unwrap();
                assert!(a.l1_distance(&b) < 1e-10);
            }
        }
    }

    #[test]
    fn transient_state_gets_zero_weight() {
        // State 2 is never entered: every tree rooted at 2 needs an edge into it.
        let p = TransitionMatrix::from_dense(vec![
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let pi = stationary_tree(&p).unwrap();
        assert_eq!(pi.get(2), 0.0);
        let lin = stationary_linear(&p).unwrap();
        assert!(lin.l1_distance(&pi) < 1e-12);
    }

    #[test]
    fn reducible_chain_is_singular() {
        let p = TransitionMatrix::from_dense(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(stationary_linear(&p), Err(Error::Singular(_))));
        let big = TransitionMatrix::from_dense(vec![vec![1.0 / 9.0; 9]; 9]).unwrap();
        assert!(matches!(stationary_tree(&big), Err(Error::Infeasible { .. })));
    }
}
