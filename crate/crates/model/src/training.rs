use han_core::{AdamConfig, AdamState, Graph, Tensor, TensorError};

use crate::error::Result;
use crate::network::Han;

/// One `f32` model with its Adam state, trained on L1 loss.
#[derive(Debug, Clone)]
pub struct Trainer {
    model: Han<f32>,
    adam: AdamState<f32>,
}

impl Trainer {
    pub fn new(model: Han<f32>, config: AdamConfig) -> Self {
        let adam = AdamState::new(config, model.params().tensors());
        Trainer { model, adam }
    }

    pub fn model(&self) -> &Han<f32> {
        &self.model
    }

    pub fn into_model(self) -> Han<f32> {
        self.model
    }

    pub fn steps_taken(&self) -> u64 {
        self.adam.step_count()
    }

    /// L1 loss of the current parameters on a batch, without updating them.
    pub fn loss(&self, lr: &Tensor<f32>, hr: &Tensor<f32>) -> Result<f32> {
        let mut g = Graph::new();
        let bound = self.model.params().bind(&mut g, false);
        let (x, y) = (g.constant(lr.clone()), g.constant(hr.clone()));
        let out = self.model.forward(&mut g, &bound, x)?;
        let loss = g.l1_loss(out, y)?;
        Ok(g.value(loss).data()[0])
    }

    /// Forward, backward and one Adam update. Returns the loss before the update.
    pub fn step(&mut self, lr: &Tensor<f32>, hr: &Tensor<f32>) -> Result<f32> {
        let mut g = Graph::new();
        let bound = self.model.params().bind(&mut g, true);
        let (x, y) = (g.constant(lr.clone()), g.constant(hr.clone()));
        let out = self.model.forward(&mut g, &bound, x)?;
        let loss = g.l1_loss(out, y)?;
        let value = g.value(loss).data()[0];
        if !value.is_finite() {
            return Err(TensorError::NonFinite { op: "l1_loss" }.into());
        }
        g.backward(loss)?;
        let grads: Vec<Tensor<f32>> = bound
            .iter()
            .zip(self.model.params().tensors())
            .map(|(&v, p)| g.grad(v).cloned().unwrap_or_else(|| Tensor::zeros(p.shape())))
            .collect();
        self.adam.step(self.model.params_mut().tensors_mut(), &grads)?;
        Ok(value)
    }
}
