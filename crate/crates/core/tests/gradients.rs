//! Finite-difference checks for every differentiable primitive, on randomized
//! small shapes over five seeds.

use han_core::gradcheck::{check, noise, project};
use han_core::{Graph, Result, Tensor, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
const TOL: f64 = 1e-4;
const STEP: f64 = 1e-6;

fn assert_check<F>(label: &str, inputs: &[Tensor<f64>], f: F)
where
    F: Fn(&mut Graph<f64>, &[Var]) -> Result<Var>,
{
    let report = check(inputs, STEP, 400, f).unwrap();
    let err = report.max_relative_error();
    assert!(err < TOL, "{label}: relative error {err:e} ({:?})", report.relative_errors);
    assert!(report.coordinates_skipped * 20 <= report.coordinates_checked, "{label}: too many kinks {report:?}");
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn conv2d_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let (n, cin, cout) = (r.gen_range(1..=2), r.gen_range(1..=3), r.gen_range(1..=3));
        let k = [1, 3, 5][r.gen_range(0..3)];
        let pad = r.gen_range(0..=k / 2);
        let stride = r.gen_range(1..=2);
        let h = r.gen_range(k.max(3)..=6);
        let w = r.gen_range(k.max(3)..=6);
        let inputs = [
            noise(&[n, cin, h, w], seed),
            noise(&[cout, cin, k, k], seed + 10),
            noise(&[cout], seed + 20),
        ];
        assert_check("conv2d", &inputs, |g, v| {
            let y = g.conv2d(v[0], v[1], v[2], pad, stride)?;
            project(g, y, seed)
        });
    }
}

#[test]
fn conv3d_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let (n, cout) = (r.gen_range(1..=2), r.gen_range(1..=2));
        let (d, h, w) = (r.gen_range(2..=5), r.gen_range(2..=5), r.gen_range(2..=5));
        let inputs = [noise(&[n, 1, d, h, w], seed), noise(&[cout, 1, 3, 3, 3], seed + 1), noise(&[cout], seed + 2)];
        assert_check("conv3d", &inputs, |g, v| {
            let y = g.conv3d(v[0], v[1], v[2], 1)?;
            project(g, y, seed)
        });
    }
}

#[test]
fn matmul_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let (m, k, p) = (r.gen_range(1..=6), r.gen_range(1..=6), r.gen_range(1..=6));
        let inputs = [noise(&[m, k], seed), noise(&[k, p], seed + 3)];
        assert_check("matmul", &inputs, |g, v| {
            let y = g.matmul(v[0], v[1])?;
            project(g, y, seed)
        });
    }
}

#[test]
fn softmax_rows_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let (m, p) = (r.gen_range(1..=6), r.gen_range(2..=6));
        let x = noise(&[m, p], seed).map(|v| 2.0 * v);
        assert_check("softmax_rows", &[x], |g, v| {
            let y = g.softmax_rows(v[0])?;
            project(g, y, seed)
        });
    }
}

#[test]
fn sigmoid_gradients() {
    for seed in SEEDS {
        let len = rng(seed).gen_range(1..=6);
        let x = noise(&[len, 3], seed).map(|v| 4.0 * v);
        assert_check("sigmoid", &[x], |g, v| {
            let y = g.sigmoid(v[0])?;
            project(g, y, seed)
        });
    }
}

#[test]
fn relu_gradients_away_from_kink() {
    for seed in SEEDS {
        let len = rng(seed).gen_range(1..=6);
        // keep every element at least 0.1 from zero
        let x = noise(&[len, 4], seed).map(|v| if v >= 0.0 { v + 0.1 } else { v - 0.1 });
        assert_check("relu", &[x], |g, v| {
            let y = g.relu(v[0])?;
            project(g, y, seed)
        });
    }
}

#[test]
fn global_avg_pool_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let shape = [r.gen_range(1..=2), r.gen_range(1..=4), r.gen_range(1..=6), r.gen_range(1..=6)];
        assert_check("global_avg_pool", &[noise(&shape, seed)], |g, v| {
            let y = g.global_avg_pool(v[0])?;
            project(g, y, seed)
        });
    }
}

#[test]
fn global_avg_pool_gradient_is_uniform() {
    let mut g = Graph::<f64>::new();
    let x = g.param(noise(&[1, 2, 3, 4], 9));
    let y = g.global_avg_pool(x).unwrap();
    let s = g.sum_all(y).unwrap();
    g.backward(s).unwrap();
    assert!(g.grad(x).unwrap().data().iter().all(|&v| (v - 1.0 / 12.0).abs() < 1e-15));
}

#[test]
fn pixel_shuffle_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let s = r.gen_range(1..=3);
        let shape = [r.gen_range(1..=2), r.gen_range(1..=2) * s * s, r.gen_range(1..=3), r.gen_range(1..=3)];
        assert_check("pixel_shuffle", &[noise(&shape, seed)], |g, v| {
            let y = g.pixel_shuffle(v[0], s)?;
            project(g, y, seed)
        });
    }
}

#[test]
fn reshape_permute_chain_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let (n, h, w, c) = (r.gen_range(1..=3), r.gen_range(1..=4), r.gen_range(1..=4), r.gen_range(1..=4));
        assert_check("reshape/permute", &[noise(&[n, h, w, c], seed)], |g, v| {
            let nchw = g.permute(v[0], &[0, 3, 1, 2])?;
            let flat = g.reshape(nchw, &[n * c, h * w])?;
            let t = g.transpose(flat)?;
            let sq = g.mul(t, t)?;
            project(g, sq, seed)
        });
    }
}

#[test]
fn l1_loss_gradients_away_from_ties() {
    for seed in SEEDS {
        let len = rng(seed).gen_range(1..=6);
        let pred = noise(&[len, 2], seed);
        let target = pred.map(|v| if (seed as usize + (v * 1e6) as usize) % 2 == 0 { v + 0.3 } else { v - 0.3 });
        assert_check("l1_loss", &[pred, target], |g, v| g.l1_loss(v[0], v[1]));
    }
}

#[test]
fn elementwise_and_structural_gradients() {
    for seed in SEEDS {
        let mut r = rng(seed);
        let (n, c, h, w) = (r.gen_range(1..=2), r.gen_range(1..=3), r.gen_range(1..=4), r.gen_range(1..=4));
        let inputs = [
            noise(&[n, c, h, w], seed),
            noise(&[n, c, 1, 1], seed + 1),
            noise(&[1], seed + 2),
            noise(&[n, c, h, w], seed + 3),
        ];
        assert_check("mul_channel/scale/stack/select/sum_axis0", &inputs, |g, v| {
            let a = g.mul_channel(v[0], v[1])?;
            let b = g.scale(v[3], v[2])?;
            let prod = g.mul(a, b)?;
            let stacked = g.stack(&[a, prod, v[0]])?;
            let picked = g.select(stacked, 1)?;
            let total = g.sum_axis0(stacked)?;
            let both = g.add(picked, total)?;
            project(g, both, seed)
        });
    }
}
