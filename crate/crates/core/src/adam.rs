use crate::error::{Result, TensorError};
use crate::scalar::Real;
use crate::tensor::Tensor;

/// Adam hyperparameters. The default learning rate is the fine-tuning rate `1e-5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { lr: 1e-5, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// Per-parameter moment estimates for bias-corrected Adam.
#[derive(Debug, Clone)]
pub struct AdamState<T> {
    pub config: AdamConfig,
    m: Vec<Tensor<T>>,
    v: Vec<Tensor<T>>,
    t: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(config: AdamConfig, params: &[Tensor<T>]) -> Self {
        let zeros = || params.iter().map(|p| Tensor::zeros(p.shape())).collect();
        AdamState { config, m: zeros(), v: zeros(), t: 0 }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    pub fn first_moments(&self) -> &[Tensor<T>] {
        &self.m
    }

    pub fn second_moments(&self) -> &[Tensor<T>] {
        &self.v
    }

    pub fn step(&mut self, params: &mut [Tensor<T>], grads: &[Tensor<T>]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(TensorError::contract(
                "adam_step",
                format!("{} moments, {} params, {} grads", self.m.len(), params.len(), grads.len()),
            ));
        }
        for (i, (p, g)) in params.iter().zip(grads).enumerate() {
            if p.shape() != self.m[i].shape() || g.shape() != p.shape() {
                return Err(TensorError::dim(
                    "adam_step",
                    format!("param {i}: {:?}, grad {:?}, state {:?}", p.shape(), g.shape(), self.m[i].shape()),
                ));
            }
        }
        self.t += 1;
        let c = self.config;
        let b1 = T::of(c.beta1);
        let b2 = T::of(c.beta2);
        let one = T::one();
        let correction1 = T::of(1.0 - c.beta1.powi(self.t as i32));
        let correction2 = T::of(1.0 - c.beta2.powi(self.t as i32));
        let lr = T::of(c.lr);
        let eps = T::of(c.epsilon);
        for ((p, g), (m, v)) in params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            let it = p.data_mut().iter_mut().zip(g.data()).zip(m.data_mut().iter_mut().zip(v.data_mut()));
            for ((theta, &grad), (m1, m2)) in it {
                *m1 = b1 * *m1 + (one - b1) * grad;
                *m2 = b2 * *m2 + (one - b2) * grad * grad;
                let m_hat = *m1 / correction1;
                let v_hat = *m2 / correction2;
                *theta -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut params = vec![Tensor::<f64>::from_fn(&[3], |i| i as f64 - 1.0)];
        let before = params.clone();
        let mut adam = AdamState::new(AdamConfig::default(), &params);
        for _ in 0..3 {
            adam.step(&mut params, &[Tensor::zeros(&[3])]).unwrap();
        }
        assert_eq!(params, before);
        assert_eq!(adam.step_count(), 3);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        for g in [3.0, -0.25, 1e-3] {
            let mut params = vec![Tensor::<f64>::scalar(1.0)];
            let config = AdamConfig { lr: 1e-3, ..AdamConfig::default() };
            let mut adam = AdamState::new(config, &params);
            adam.step(&mut params, &[Tensor::scalar(g)]).unwrap();
            let delta = params[0].data()[0] - 1.0;
            let expected = -1e-3 * g / (g.abs() + 1e-8);
            assert!((delta - expected).abs() < 1e-15, "g={g}: {delta} vs {expected}");
            assert!((delta.abs() - 1e-3).abs() < 1e-7);
        }
    }

    #[test]
    fn two_steps_match_scalar_trace() {
        let (lr, b1, b2, eps, g) = (0.01f64, 0.9f64, 0.999f64, 1e-8f64, 0.7f64);
        // Hand-rolled reference.
        let (mut theta, mut m, mut v) = (0.5f64, 0.0f64, 0.0f64);
        for t in 1..=2 {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let m_hat = m / (1.0 - b1.powi(t));
            let v_hat = v / (1.0 - b2.powi(t));
            theta -= lr * m_hat / (v_hat.sqrt() + eps);
        }
        let mut params = vec![Tensor::<f64>::scalar(0.5)];
        let mut adam = AdamState::new(AdamConfig { lr, beta1: b1, beta2: b2, epsilon: eps }, &params);
        for _ in 0..2 {
            adam.step(&mut params, &[Tensor::scalar(g)]).unwrap();
        }
        assert!((params[0].data()[0] - theta).abs() < 1e-12);
    }

    #[test]
    fn rejects_shape_mismatch() {
        let mut params = vec![Tensor::<f32>::zeros(&[2])];
        let mut adam = AdamState::new(AdamConfig::default(), &params);
        assert!(adam.step(&mut params, &[Tensor::zeros(&[3])]).is_err());
    }
}
