use han_core::{Graph, ParamSet, Real, Tensor, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attention::{csam_forward, lam_fuse, CsamVars};
use crate::config::ModelConfig;
use crate::error::{ModelError, Result};
use crate::layers::{residual_group_forward, upsample, ConvVars, GroupVars, RcabVars};

/// Smallest LR extent accepted by [`Han::forward`].
pub const MIN_INPUT_EXTENT: usize = 8;

#[derive(Debug, Clone, Copy)]
struct ConvIdx {
    weight: usize,
    bias: usize,
}

#[derive(Debug, Clone, Copy)]
struct RcabIdx {
    conv1: ConvIdx,
    conv2: ConvIdx,
    squeeze: ConvIdx,
    excite: ConvIdx,
}

#[derive(Debug, Clone)]
struct GroupIdx {
    blocks: Vec<RcabIdx>,
    tail: ConvIdx,
}

#[derive(Debug, Clone, Copy)]
struct CsamIdx {
    beta: usize,
    kernel: usize,
    bias: usize,
}

#[derive(Debug, Clone)]
struct Layout {
    head: ConvIdx,
    groups: Vec<GroupIdx>,
    alpha: Option<usize>,
    /// One per trailing group, in group order; the last one produces `F_CS`.
    csams: Vec<CsamIdx>,
    upsampler: Vec<(ConvIdx, usize)>,
    tail: ConvIdx,
}

struct Builder {
    params: ParamSet<f64>,
    rng: ChaCha8Rng,
}

impl Builder {
    fn uniform(&mut self, name: String, shape: &[usize], bound: f64) -> usize {
        let t = Tensor::from_fn(shape, |_| self.rng.gen_range(-bound..bound));
        self.params.push(name, t).expect("unique parameter names")
    }

    fn zero_scalar(&mut self, name: String) -> usize {
        self.params.push(name, Tensor::zeros(&[1])).expect("unique parameter names")
    }

    /// Fan-in scaled uniform init for weight and bias.
    fn conv(&mut self, name: &str, cout: usize, cin: usize, k: usize) -> ConvIdx {
        let bound = 1.0 / ((cin * k * k) as f64).sqrt();
        ConvIdx {
            weight: self.uniform(format!("{name}.weight"), &[cout, cin, k, k], bound),
            bias: self.uniform(format!("{name}.bias"), &[cout], bound),
        }
    }
}

fn build(config: &ModelConfig, seed: u64) -> (ParamSet<f64>, Layout) {
    let c = config.channels;
    let mut b = Builder { params: ParamSet::new(), rng: ChaCha8Rng::seed_from_u64(seed) };
    let head = b.conv("head", c, 3, 3);
    let groups = (0..config.n_groups)
        .map(|gi| {
            let blocks = (0..config.n_blocks)
                .map(|bi| {
                    let p = format!("groups.{gi}.blocks.{bi}");
                    RcabIdx {
                        conv1: b.conv(&format!("{p}.conv1"), c, c, 3),
                        conv2: b.conv(&format!("{p}.conv2"), c, c, 3),
                        squeeze: b.conv(&format!("{p}.ca.squeeze"), c / config.reduction, c, 1),
                        excite: b.conv(&format!("{p}.ca.excite"), c, c / config.reduction, 1),
                    }
                })
                .collect();
            GroupIdx { blocks, tail: b.conv(&format!("groups.{gi}.tail"), c, c, 3) }
        })
        .collect();
    let alpha = config.lam.then(|| b.zero_scalar("lam.alpha".into()));
    // CSAM draws from its own stream so ablated variants share every backbone weight.
    let mut attn_rng = ChaCha8Rng::seed_from_u64(seed);
    attn_rng.set_stream(1);
    std::mem::swap(&mut b.rng, &mut attn_rng);
    let csams = if config.csam {
        (0..config.csam_count)
            .map(|i| CsamIdx {
                beta: b.zero_scalar(format!("csam.{i}.beta")),
                kernel: b.uniform(format!("csam.{i}.kernel"), &[1, 1, 3, 3, 3], 1.0 / 27f64.sqrt()),
                bias: b.uniform(format!("csam.{i}.bias"), &[1], 1.0 / 27f64.sqrt()),
            })
            .collect()
    } else {
        Vec::new()
    };
    std::mem::swap(&mut b.rng, &mut attn_rng);
    let upsampler = config
        .upsample_stages()
        .into_iter()
        .enumerate()
        .map(|(i, s)| (b.conv(&format!("upsample.{i}"), c * s * s, c, 3), s))
        .collect();
    let tail = b.conv("tail", 3, c, 3);
    (b.params, Layout { head, groups, alpha, csams, upsampler, tail })
}

/// Replace LAM and/or CSAM by the identity at forward time, regardless of the parameters present.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Bypass {
    pub lam: bool,
    pub csam: bool,
}

/// Intermediate values of one forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub f0: Var,
    /// `F_1..F_N`
    pub groups: Vec<Var>,
    pub f_l: Var,
    pub f_cs: Var,
    pub fused: Var,
    pub output: Var,
}

/// HAN parameters plus the layout that maps them onto the network.
#[derive(Debug, Clone)]
pub struct Han<T> {
    config: ModelConfig,
    params: ParamSet<T>,
    layout: Layout,
}

impl<T: Real> Han<T> {
    /// Deterministic initialisation; `α = β = 0`.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let (params, layout) = build(&config, seed);
        Ok(Han { config, params: params.cast(), layout })
    }

    /// Adopt an existing parameter set, checking names, order and shapes against `config`.
    pub fn from_params(config: ModelConfig, params: ParamSet<T>) -> Result<Self> {
        config.validate()?;
        let (reference, layout) = build(&config, 0);
        if reference.len() != params.len() {
            return Err(ModelError::Params(format!("expected {} tensors, got {}", reference.len(), params.len())));
        }
        for ((name, want), (got_name, got)) in reference.iter().zip(params.iter()) {
            if name != got_name || want.shape() != got.shape() {
                return Err(ModelError::Params(format!(
                    "expected {name} {:?}, got {got_name} {:?}",
                    want.shape(),
                    got.shape()
                )));
            }
        }
        Ok(Han { config, params, layout })
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn params(&self) -> &ParamSet<T> {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamSet<T> {
        &mut self.params
    }

    pub fn into_params(self) -> ParamSet<T> {
        self.params
    }

    pub fn num_parameters(&self) -> usize {
        self.params.numel()
    }

    pub fn cast<U: Real>(&self) -> Han<U> {
        Han { config: self.config, params: self.params.cast(), layout: self.layout.clone() }
    }

    pub fn alpha(&self) -> Option<T> {
        self.layout.alpha.map(|i| self.params.tensor(i).data()[0])
    }

    pub fn betas(&self) -> Vec<T> {
        self.layout.csams.iter().map(|c| self.params.tensor(c.beta).data()[0]).collect()
    }

    fn check_input(&self, shape: &[usize]) -> Result<()> {
        if shape.len() != 4 || shape[1] != 3 {
            return Err(ModelError::Input(format!("expected [N,3,H,W], got {shape:?}")));
        }
        if shape[2] < MIN_INPUT_EXTENT || shape[3] < MIN_INPUT_EXTENT {
            return Err(ModelError::Input(format!(
                "spatial extent {}x{} below the minimum {MIN_INPUT_EXTENT}",
                shape[2], shape[3]
            )));
        }
        Ok(())
    }

    /// Forward pass over parameters previously inserted with `self.params().bind(..)`.
    pub fn forward_traced(&self, g: &mut Graph<T>, bound: &[Var], input: Var, bypass: Bypass) -> Result<ForwardTrace> {
        self.check_input(g.shape(input))?;
        if bound.len() != self.params.len() {
            return Err(ModelError::Params(format!("{} bound vars for {} parameters", bound.len(), self.params.len())));
        }
        let conv = |c: ConvIdx| ConvVars { weight: bound[c.weight], bias: bound[c.bias] };
        let csam_vars = |c: &CsamIdx| CsamVars { beta: bound[c.beta], kernel: bound[c.kernel], bias: bound[c.bias] };
        let layout = &self.layout;
        let use_lam = layout.alpha.is_some() && !bypass.lam;
        let use_csam = !layout.csams.is_empty() && !bypass.csam;

        let x = if self.config.rgb_range != 1.0 {
            let r = g.constant(Tensor::scalar(T::of(self.config.rgb_range)));
            g.scale(input, r)?
        } else {
            input
        };
        let f0 = conv(layout.head).apply(g, x)?;

        let n = layout.groups.len();
        let first_csam_group = n - layout.csams.len();
        let mut groups = Vec::with_capacity(n);
        let mut h = f0;
        for (i, group) in layout.groups.iter().enumerate() {
            let vars = GroupVars {
                blocks: group
                    .blocks
                    .iter()
                    .map(|b| RcabVars {
                        conv1: conv(b.conv1),
                        conv2: conv(b.conv2),
                        squeeze: conv(b.squeeze),
                        excite: conv(b.excite),
                    })
                    .collect(),
                tail: conv(group.tail),
            };
            h = residual_group_forward(g, h, &vars)?;
            // Intermediate trailing groups are modulated in place; F_N keeps its raw value for LAM.
            if use_csam && i >= first_csam_group && i + 1 < n {
                h = csam_forward(g, h, &csam_vars(&layout.csams[i - first_csam_group]))?.out;
            }
            groups.push(h);
        }

        let alpha = if use_lam { layout.alpha.map(|a| bound[a]) } else { None };
        let f_l = lam_fuse(g, &groups, alpha)?;
        let f_n = groups[n - 1];
        let f_cs = match layout.csams.last() {
            Some(last) if use_csam => csam_forward(g, f_n, &csam_vars(last))?.out,
            _ => f_n,
        };

        let fused = g.add(f0, f_l)?;
        let fused = g.add(fused, f_cs)?;
        let stages: Vec<(ConvVars, usize)> = layout.upsampler.iter().map(|&(c, s)| (conv(c), s)).collect();
        let up = upsample(g, fused, &stages)?;
        let mut output = conv(layout.tail).apply(g, up)?;
        if self.config.rgb_range != 1.0 {
            let r = g.constant(Tensor::scalar(T::of(1.0 / self.config.rgb_range)));
            output = g.scale(output, r)?;
        }
        Ok(ForwardTrace { f0, groups, f_l, f_cs, fused, output })
    }

    pub fn forward(&self, g: &mut Graph<T>, bound: &[Var], input: Var) -> Result<Var> {
        Ok(self.forward_traced(g, bound, input, Bypass::default())?.output)
    }

    /// Inference without gradient bookkeeping: `[N,3,H,W] → [N,3,sH,sW]`.
    pub fn predict(&self, input: &Tensor<T>) -> Result<Tensor<T>> {
        self.predict_with(input, Bypass::default())
    }

    pub fn predict_with(&self, input: &Tensor<T>, bypass: Bypass) -> Result<Tensor<T>> {
        let mut g = Graph::new();
        let bound = self.params.bind(&mut g, false);
        let x = g.constant(input.clone());
        let trace = self.forward_traced(&mut g, &bound, x, bypass)?;
        Ok(g.value(trace.output).clone())
    }
}
