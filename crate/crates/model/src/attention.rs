//! Layer attention (LAM) and channel-spatial attention (CSAM).

use han_core::{Graph, Real, Result, TensorError, Var};

#[derive(Debug, Clone, Copy)]
pub struct LamOutput {
    /// Same shape as the input stack.
    pub out: Var,
    /// `[G, G]` row-softmaxed Gram matrix of the flattened groups.
    pub correlation: Var,
}

/// Layer attention over one stack of `G` feature groups, shape `[G, ...]`.
///
/// With `M` the `[G, L]` flattening, `W = softmax_rows(M·Mᵀ)` and
/// `out_j = α·Σ_i W[i,j]·M_i + M_j`, i.e. `out = α·(Wᵀ·M) + M`.
pub fn lam_forward<T: Real>(g: &mut Graph<T>, stack: Var, alpha: Var) -> Result<LamOutput> {
    let shape = g.shape(stack).to_vec();
    if shape.len() < 2 {
        return Err(TensorError::Dimension { op: "lam_forward", detail: format!("stack of groups expected, got {shape:?}") });
    }
    let groups = shape[0];
    let flat_len: usize = shape[1..].iter().product();
    let m = g.reshape(stack, &[groups, flat_len])?;
    let mt = g.transpose(m)?;
    let gram = g.matmul(m, mt)?;
    let correlation = g.softmax_rows(gram)?;
    let wt = g.transpose(correlation)?;
    let mixed = g.matmul(wt, m)?;
    let scaled = g.scale(mixed, alpha)?;
    let out = g.add(scaled, m)?;
    let out = g.reshape(out, &shape)?;
    Ok(LamOutput { out, correlation })
}

/// Reduce the per-layer LAM outputs to one `[B,C,H,W]` map by summing over the layer axis.
///
/// `alpha = None` replaces LAM with the identity, so the result is the plain sum of the groups
/// computed through the same reduction.
pub fn lam_fuse<T: Real>(g: &mut Graph<T>, groups: &[Var], alpha: Option<Var>) -> Result<Var> {
    let stacked = g.stack(groups)?;
    let per_item = g.permute(stacked, &[1, 0, 2, 3, 4])?;
    let batch = g.shape(per_item)[0];
    let mut fused = Vec::with_capacity(batch);
    for b in 0..batch {
        let stack = g.select(per_item, b)?;
        let weighted = match alpha {
            Some(a) => lam_forward(g, stack, a)?.out,
            None => stack,
        };
        fused.push(g.sum_axis0(weighted)?);
    }
    g.stack(&fused)
}

#[derive(Debug, Clone, Copy)]
pub struct CsamVars {
    pub beta: Var,
    /// `[1,1,3,3,3]`
    pub kernel: Var,
    /// `[1]`
    pub bias: Var,
}

#[derive(Debug, Clone, Copy)]
pub struct CsamOutput {
    pub out: Var,
    /// `σ(W_csa)`, same shape as the input.
    pub attention: Var,
}

/// `β·σ(conv3d(F))⊙F + F`, treating the `C` channels of `F [B,C,H,W]` as a depth axis.
pub fn csam_forward<T: Real>(g: &mut Graph<T>, features: Var, vars: &CsamVars) -> Result<CsamOutput> {
    let shape = g.shape(features).to_vec();
    if shape.len() != 4 {
        return Err(TensorError::Dimension { op: "csam_forward", detail: format!("[B,C,H,W] expected, got {shape:?}") });
    }
    let volume = g.reshape(features, &[shape[0], 1, shape[1], shape[2], shape[3]])?;
    let response = g.conv3d(volume, vars.kernel, vars.bias, 1)?;
    let response = g.reshape(response, &shape)?;
    let attention = g.sigmoid(response)?;
    let gated = g.mul(attention, features)?;
    let scaled = g.scale(gated, vars.beta)?;
    let out = g.add(scaled, features)?;
    Ok(CsamOutput { out, attention })
}
