//! RCAN backbone pieces: residual channel attention blocks and residual groups.

use han_core::{Graph, Real, Result, Var};

/// Weight `[Cout,Cin,k,k]` and bias `[Cout]` of a same-padded convolution.
#[derive(Debug, Clone, Copy)]
pub struct ConvVars {
    pub weight: Var,
    pub bias: Var,
}

impl ConvVars {
    pub fn apply<T: Real>(&self, g: &mut Graph<T>, x: Var) -> Result<Var> {
        let k = g.shape(self.weight)[2];
        g.conv2d(x, self.weight, self.bias, k / 2, 1)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RcabVars {
    pub conv1: ConvVars,
    pub conv2: ConvVars,
    /// 1x1, `C → C/r`
    pub squeeze: ConvVars,
    /// 1x1, `C/r → C`
    pub excite: ConvVars,
}

#[derive(Debug, Clone)]
pub struct GroupVars {
    pub blocks: Vec<RcabVars>,
    pub tail: ConvVars,
}

/// Per-channel gate in `(0, 1)`: pool → squeeze → relu → excite → sigmoid, shape `[N,C,1,1]`.
pub fn channel_gate<T: Real>(g: &mut Graph<T>, x: Var, block: &RcabVars) -> Result<Var> {
    let pooled = g.global_avg_pool(x)?;
    let squeezed = block.squeeze.apply(g, pooled)?;
    let squeezed = g.relu(squeezed)?;
    let excited = block.excite.apply(g, squeezed)?;
    g.sigmoid(excited)
}

/// conv → relu → conv → channel attention → add skip.
pub fn rcab_forward<T: Real>(g: &mut Graph<T>, x: Var, block: &RcabVars) -> Result<Var> {
    let h = block.conv1.apply(g, x)?;
    let h = g.relu(h)?;
    let h = block.conv2.apply(g, h)?;
    let gate = channel_gate(g, h, block)?;
    let h = g.mul_channel(h, gate)?;
    g.add(h, x)
}

/// B RCABs, a 3x3 conv, then the group-level skip.
pub fn residual_group_forward<T: Real>(g: &mut Graph<T>, x: Var, group: &GroupVars) -> Result<Var> {
    let mut h = x;
    for block in &group.blocks {
        h = rcab_forward(g, h, block)?;
    }
    let h = group.tail.apply(g, h)?;
    g.add(h, x)
}

/// Sub-pixel stages: each conv expands to `s²·C` channels and a pixel shuffle trades them for resolution.
pub fn upsample<T: Real>(g: &mut Graph<T>, x: Var, stages: &[(ConvVars, usize)]) -> Result<Var> {
    let mut h = x;
    for &(conv, s) in stages {
        let expanded = conv.apply(g, h)?;
        h = g.pixel_shuffle(expanded, s)?;
    }
    Ok(h)
}
