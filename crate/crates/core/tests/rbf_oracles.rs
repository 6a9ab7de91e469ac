use gpsrbf::rbf::{gaussian_activation, solve_output_weights, train, RbfNetwork, TrainConfig};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting on the normal equations.
fn normal_equations(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let p = a.ncols();
    let m = b.ncols();
    let mut aug = vec![vec![0.0; p + m]; p];
    for i in 0..p {
        for j in 0..p {
            aug[i][j] = (0..a.nrows()).map(|r| a[(r, i)] * a[(r, j)]).sum();
        }
        for c in 0..m {
            aug[i][p + c] = (0..a.nrows()).map(|r| a[(r, i)] * b[(r, c)]).sum();
        }
    }
    for col in 0..p {
        let piv = (col..p).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs())).unwrap();
        aug.swap(col, piv);
        for row in 0..p {
            if row != col {
                let f = aug[row][col] / aug[col][col];
                for k in col..p + m {
                    aug[row][k] -= f * aug[col][k];
                }
            }
        }
    }
    DMatrix::from_fn(p, m, |i, c| aug[i][p + c] / aug[i][i])
}

#[test]
fn forward_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (k, d, m) = (3, 2, 3);
    let centers = DMatrix::from_fn(k, d, |_, _| rng.random_range(-1.0..1.0));
    let weights = DMatrix::from_fn(k, m, |_, _| rng.random_range(-2.0..2.0));
    let bias = DVector::from_fn(m, |_, _| rng.random_range(-1.0..1.0));
    let spread = 0.7;
    let net = RbfNetwork::new(centers.clone(), spread, weights.clone(), bias.clone()).unwrap();
    for _ in 0..20 {
        let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let out = net.forward(&x).unwrap();
        for o in 0..m {
            let mut expected = bias[o];
            for j in 0..k {
                let mut r2 = 0.0;
                for q in 0..d {
                    r2 += (x[q] - centers[(j, q)]).powi(2);
                }
                expected += weights[(j, o)] * (-r2 / (spread * spread)).exp();
            }
            assert!((out[o] - expected).abs() <= 1e-12);
        }
    }
}

#[test]
fn least_squares_five_by_two_matches_normal_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let inputs: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
    let centers = [0.1, 0.8];
    let design = DMatrix::from_fn(5, 3, |i, j| {
        if j < 2 {
            gaussian_activation((inputs[i] - centers[j]).abs(), 0.4).unwrap()
        } else {
            1.0
        }
    });
    let targets = DMatrix::from_fn(5, 2, |_, _| rng.random_range(-1.0..1.0));
    let out = solve_output_weights(&design, &targets).unwrap();
    let oracle = normal_equations(&design, &targets);
    for c in 0..2 {
        assert!((out.weights[(0, c)] - oracle[(0, c)]).abs() < 1e-8);
        assert!((out.weights[(1, c)] - oracle[(1, c)]).abs() < 1e-8);
        assert!((out.bias[c] - oracle[(2, c)]).abs() < 1e-8);
    }
}

#[test]
fn residual_orthogonal_to_design() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let design = DMatrix::from_fn(15, 5, |_, j| if j == 4 { 1.0 } else { rng.random_range(0.0..1.0) });
    let targets = DMatrix::from_fn(15, 3, |_, _| rng.random_range(-10.0..10.0));
    let out = solve_output_weights(&design, &targets).unwrap();
    let mut params = DMatrix::zeros(5, 3);
    params.rows_mut(0, 4).copy_from(&out.weights);
    params.row_mut(4).copy_from(&out.bias.transpose());
    let grad = design.transpose() * (&design * &params - &targets);
    let scale = design.norm() * targets.norm();
    assert!(grad.amax() <= 1e-8 * scale);
}

#[test]
fn five_point_interpolation_matches_square_solve() {
    let inputs = DMatrix::from_column_slice(5, 1, &[0.0, 0.2, 0.45, 0.7, 1.0]);
    let targets = DMatrix::from_column_slice(5, 1, &[0.3, -1.0, 2.0, 0.5, -0.4]);
    let spread = 0.25;
    let (net, trace) = train(&inputs, &targets, &TrainConfig::new(0.0, 5, spread)).unwrap();
    assert!(trace.final_sse() <= 1e-10);

    // Square system with every input as a center and no bias.
    let phi = DMatrix::from_fn(5, 5, |i, j| gaussian_activation((inputs[i] - inputs[j]).abs(), spread).unwrap());
    let w = phi.clone().lu().solve(&targets).unwrap();
    assert!((&phi * &w - &targets).amax() < 1e-10);
    for i in 0..5 {
        let y = net.forward(&[inputs[i]]).unwrap()[0];
        assert!((y - targets[i]).abs() < 1e-8);
        assert!((y - (&phi * &w)[i]).abs() < 1e-8);
    }
}

#[test]
fn save_load_preserves_forward() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let inputs = DMatrix::from_fn(40, 2, |_, _| rng.random_range(0.0..1.0));
    let targets = DMatrix::from_fn(40, 3, |_, _| rng.random_range(-1.0..1.0));
    let (net, _) = train(&inputs, &targets, &TrainConfig::new(1e-3, 12, 0.3)).unwrap();
    let dir = std::env::temp_dir().join(format!("gpsrbf-net-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("net.txt");
    net.save(&path).unwrap();
    let back = RbfNetwork::load(&path).unwrap();
    for _ in 0..50 {
        let x = [rng.random_range(-1.0..2.0), rng.random_range(-1.0..2.0)];
        let (a, b) = (net.forward(&x).unwrap(), back.forward(&x).unwrap());
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() <= 1e-12);
        }
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn staged_networks_reproduce_sse_history() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let inputs = DMatrix::from_fn(60, 1, |i, _| i as f64 / 59.0);
    let targets = DMatrix::from_fn(60, 3, |i, c| ((i as f64) * 0.2 + c as f64).sin() + rng.random_range(-0.1..0.1));
    let (net, trace) = train(&inputs, &targets, &TrainConfig::new(1e-9, 15, 0.05)).unwrap();
    assert_eq!(trace.sse_history.len(), net.num_centers() + 1);
    for k in 0..trace.num_stages() {
        let staged = trace.network_at(&net, k).unwrap();
        let pred = staged.predict(&inputs).unwrap();
        let sse: f64 = (&pred - &targets).iter().map(|r| r * r).sum();
        assert!((sse - trace.sse_history[k]).abs() <= 1e-9 * trace.sse_history[0]);
    }
}

proptest! {
    #[test]
    fn activation_strictly_decreasing(a in 0.0f64..5.0, b in 0.0f64..5.0, s in 0.1f64..10.0) {
        prop_assume!((a - b).abs() > 1e-9);
        let (fa, fb) = (gaussian_activation(a, s).unwrap(), gaussian_activation(b, s).unwrap());
        prop_assert!((a < b) == (fa > fb) || fa == fb && fa == 0.0);
        prop_assert!(fa > 0.0 || a / s > 20.0);
        prop_assert!(fa <= 1.0);
    }

    #[test]
    fn training_is_deterministic(seed in any::<u64>(), n in 2usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = DMatrix::from_fn(n, 1, |_, _| rng.random_range(0.0..1.0));
        let targets = DMatrix::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
        let cfg = TrainConfig::new(1e-4, n, 0.2);
        let (n1, t1) = train(&inputs, &targets, &cfg).unwrap();
        let (n2, t2) = train(&inputs, &targets, &cfg).unwrap();
        prop_assert_eq!(n1, n2);
        prop_assert_eq!(t1, t2);
    }
}
