use ega_core::preprocess::{smote, standardize, stratified_split};
use ega_core::{Matrix, RngStream, TaskKind};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut r = RngStream::new(seed);
    Matrix::from_fn(rows, cols, |_, _| r.uniform_range(-3.0, 3.0))
}

proptest! {
    #[test]
    fn matmul_is_associative(seed in any::<u64>(), a in 1usize..6, b in 1usize..6, c in 1usize..6, d in 1usize..6) {
        let (x, y, z) = (matrix(a, b, seed), matrix(b, c, seed ^ 1), matrix(c, d, seed ^ 2));
        let left = x.matmul(&y).unwrap().matmul(&z).unwrap();
        let right = x.matmul(&y.matmul(&z).unwrap()).unwrap();
        for (l, r) in left.as_slice().iter().zip(right.as_slice()) {
            prop_assert!((l - r).abs() <= 1e-10 * l.abs().max(r.abs()).max(1.0));
        }
    }

    #[test]
    fn standardize_inverts(seed in any::<u64>(), n in 2usize..30) {
        let x = matrix(n, 3, seed);
        let (z, stats) = standardize(&x, &[0, 2], false).unwrap();
        let back = stats.inverse(&z).unwrap();
        for (a, b) in back.as_slice().iter().zip(x.as_slice()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        for j in [0, 2] {
            let c = z.column(j);
            let m = c.iter().sum::<f64>() / n as f64;
            let v = c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
            prop_assert!(m.abs() < 1e-9 && (v.sqrt() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn smote_rows_lie_on_segments(seed in any::<u64>(), m in 3usize..15, k in 1usize..3, count in 1usize..40) {
        let x = matrix(m, 2, seed);
        let out = smote(&x, k, count, &mut RngStream::new(seed)).unwrap().unwrap();
        prop_assert_eq!((out.rows(), out.cols()), (count, 2));
        for s in out.iter_rows() {
            prop_assert!(s.iter().all(|v| v.is_finite()));
            // Some pair (a, b) of minority rows has s on the segment between them.
            let on_segment = (0..m).any(|a| (0..m).any(|b| {
                let (pa, pb) = (x.row(a), x.row(b));
                let d = [pb[0] - pa[0], pb[1] - pa[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let t = if len2 == 0.0 { 0.0 } else { ((s[0] - pa[0]) * d[0] + (s[1] - pa[1]) * d[1]) / len2 };
                (-1e-9..=1.0 + 1e-9).contains(&t)
                    && (pa[0] + t * d[0] - s[0]).abs() < 1e-9
                    && (pa[1] + t * d[1] - s[1]).abs() < 1e-9
            }));
            prop_assert!(on_segment);
        }
    }

    #[test]
    fn stratified_split_partitions_and_balances(
        seed in any::<u64>(),
        pos in 2usize..40,
        neg in 2usize..40,
        frac in 0.2f64..0.9,
    ) {
        let mut y = vec![1.0; pos];
        y.extend(vec![0.0; neg]);
        RngStream::new(seed ^ 9).shuffle(&mut y);
        let (train, hold) = stratified_split(&y, TaskKind::Classification, frac, &mut RngStream::new(seed)).unwrap();
        let mut all: Vec<usize> = train.iter().chain(&hold).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        for (label, size) in [(1.0, pos), (0.0, neg)] {
            let in_train = train.iter().filter(|&&i| y[i] == label).count() as f64;
            prop_assert!((in_train - frac * size as f64).abs() <= 1.0);
        }
    }
}
