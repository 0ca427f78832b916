//! Random interaction hypergraphs.
//!
//! [`sample_hyper_sbm`] draws each interaction class by class, uniformly
//! without replacement. [`weighted_draw_sequence`] is the general
//! non-uniform draw: repeated multinomial trials over the items not yet
//! chosen, with probabilities proportional to their weights.
//! [`generate_design`] builds the two-class simulation design (pure class-1,
//! pure class-2 and mixed interactions in thirds, Binomial sizes).

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::blockmodel::{BlockModelSpec, TypeMatrix};
use crate::error::{Error, Result};
use crate::hypergraph::InteractionHypergraph;
use crate::rng::RngStream;

/// Draws `k` distinct indices one at a time; each draw picks among the
/// remaining items with probability proportional to weight. Returns the
/// indices in draw order.
pub fn weighted_draw_sequence<R: Rng + ?Sized>(weights: &[f64], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidWeights("weights must be finite and nonnegative"));
    }
    let support = weights.iter().filter(|&&w| w > 0.0).count();
    if support == 0 {
        return Err(Error::InvalidWeights("all weights are zero"));
    }
    if k > support {
        return Err(Error::SupportTooSmall { k, support });
    }
    let mut remaining = weights.to_vec();
    let mut drawn = Vec::with_capacity(k);
    for _ in 0..k {
        // Recomputed each step so removals never accumulate rounding drift.
        let total: f64 = remaining.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        let mut last_positive = 0;
        for (i, &w) in remaining.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            last_positive = i;
            acc += w;
            if target < acc {
                pick = Some(i);
                break;
            }
        }
        let i = pick.unwrap_or(last_positive);
        remaining[i] = 0.0;
        drawn.push(i);
    }
    Ok(drawn)
}

/// The unordered outcome of [`weighted_draw_sequence`], sorted ascending.
pub fn sample_weighted_without_replacement<R: Rng + ?Sized>(
    weights: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    let mut set = weighted_draw_sequence(weights, k, rng)?;
    set.sort_unstable();
    Ok(set)
}

/// Samples one hypergraph given the type matrix: interaction `p` takes a
/// uniform `tau_rp`-subset of class `r`, independently over `r` and `p`.
///
/// The spec constructor already guarantees `tau_rp <= n_r`.
pub fn sample_hyper_sbm<R: Rng + ?Sized>(spec: &BlockModelSpec, rng: &mut R) -> InteractionHypergraph {
    let types = spec.types();
    let mut interactions = Vec::with_capacity(spec.m());
    for tau in types.columns() {
        let mut e = Vec::with_capacity(tau.iter().sum::<u32>() as usize);
        for (r, &t) in tau.iter().enumerate() {
            let members = spec.members(r);
            for j in index::sample(rng, members.len(), t as usize) {
                e.push(members[j] + 1);
            }
        }
        interactions.push(e);
    }
    InteractionHypergraph::new(spec.n(), interactions).expect("type vectors are validated by the block model")
}

/// `k_min + Binomial(k_max - k_min, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizeLaw {
    k_min: u32,
    k_max: u32,
    alpha: f64,
    binomial: Binomial,
}

pub const DEFAULT_ALPHA: f64 = 0.4;

impl SizeLaw {
    pub fn new(k_min: u32, k_max: u32, alpha: f64) -> Result<Self> {
        if k_min < 2 || k_min > k_max {
            return Err(Error::InvalidSizeLaw("need 2 <= k_min <= k_max"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidSizeLaw("alpha must lie in (0, 1)"));
        }
        let binomial = Binomial::new(u64::from(k_max - k_min), alpha)
            .map_err(|_| Error::InvalidSizeLaw("invalid binomial parameters"))?;
        Ok(Self {
            k_min,
            k_max,
            alpha,
            binomial,
        })
    }

    pub fn k_min(&self) -> u32 {
        self.k_min
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mean(&self) -> f64 {
        f64::from(self.k_min) + f64::from(self.k_max - self.k_min) * self.alpha
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        self.k_min + self.binomial.sample(rng) as u32
    }
}

pub fn sample_sizes<R: Rng + ?Sized>(law: &SizeLaw, m: usize, rng: &mut R) -> Vec<u32> {
    (0..m).map(|_| law.sample(rng)).collect()
}

/// Rule for the maximum interaction size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `k_max = n / d`.
    Growing,
    /// A constant `k_max`.
    Fixed(u32),
}

pub const DEFAULT_FIXED_KMAX: u32 = 5;

impl Regime {
    pub fn k_max(&self, n: usize, d: usize) -> u32 {
        match *self {
            Regime::Growing => (n / d) as u32,
            Regime::Fixed(k) => k,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Growing => "growing",
            Regime::Fixed(_) => "fixed",
        }
    }
}

/// How a mixed interaction of size `k` is split across the two classes:
/// `tau_1 = 1 + Binomial(k - 2, p)`, `tau_2 = k - tau_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedSplit {
    pub p: f64,
}

impl Default for MixedSplit {
    fn default() -> Self {
        Self { p: 0.5 }
    }
}

/// Basic type of an interaction in the two-class design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicType {
    /// Only nodes of the given 0-based class.
    Pure(usize),
    /// Nodes of both classes.
    Mixed,
}

/// Number of node classes in the simulation design.
pub const DESIGN_CLASSES: usize = 2;

/// The two-class simulation design: equal classes, interactions split into
/// thirds of basic types (1,0), (0,1), (1,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationDesign {
    pub n: usize,
    pub m: usize,
    pub regime: Regime,
    pub alpha: f64,
    pub mixed_split: MixedSplit,
    pub seed: u64,
}

impl SimulationDesign {
    pub fn new(n: usize, m: usize, regime: Regime, seed: u64) -> Self {
        Self {
            n,
            m,
            regime,
            alpha: DEFAULT_ALPHA,
            mixed_split: MixedSplit::default(),
            seed,
        }
    }

    pub fn k_max(&self) -> u32 {
        self.regime.k_max(self.n, DESIGN_CLASSES)
    }

    pub fn class_size(&self) -> usize {
        self.n / DESIGN_CLASSES
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !self.n.is_multiple_of(DESIGN_CLASSES) {
            return Err(Error::InvalidDesign("n must be a positive multiple of 2"));
        }
        if self.m == 0 || !self.m.is_multiple_of(3) {
            return Err(Error::InvalidDesign("m must be a positive multiple of 3"));
        }
        let k_max = self.k_max();
        if k_max < 2 {
            return Err(Error::InvalidDesign("k_max must be at least 2"));
        }
        if k_max as usize > self.class_size() {
            return Err(Error::InvalidDesign("k_max exceeds the class size"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidDesign("alpha must lie in (0, 1)"));
        }
        if !(0.0..=1.0).contains(&self.mixed_split.p) {
            return Err(Error::InvalidDesign("mixed split probability must lie in [0, 1]"));
        }
        Ok(())
    }

    pub fn basic_type(&self, p: usize) -> BasicType {
        let third = self.m / 3;
        if p < third {
            BasicType::Pure(0)
        } else if p < 2 * third {
            BasicType::Pure(1)
        } else {
            BasicType::Mixed
        }
    }

    /// Size law for a basic type: `k_min` is 2 for pure interactions and the
    /// number of represented classes for mixed ones.
    pub fn size_law(&self, basic: BasicType) -> Result<SizeLaw> {
        let k_min = match basic {
            BasicType::Pure(_) => 2,
            BasicType::Mixed => DESIGN_CLASSES as u32,
        };
        SizeLaw::new(k_min, self.k_max(), self.alpha)
    }

    /// Number of type vectors the design can produce.
    pub fn possible_type_count(&self) -> usize {
        let k_max = self.k_max() as usize;
        let pure = DESIGN_CLASSES * (k_max - 1);
        let mixed = if self.mixed_split.p > 0.0 && self.mixed_split.p < 1.0 {
            (2..=k_max).map(|k| k - 1).sum()
        } else {
            k_max - 1
        };
        pure + mixed
    }

    pub fn labels(&self) -> Vec<usize> {
        (0..self.n).map(|i| i / self.class_size() + 1).collect()
    }

    pub fn stream(&self) -> RngStream {
        RngStream::new(self.seed)
    }
}

/// Draws the type matrix of a design, then samples the hypergraph from it.
///
/// Types come from `stream.substream(&[0])` and memberships from
/// `stream.substream(&[1])`.
pub fn generate_design(
    design: &SimulationDesign,
    stream: &RngStream,
) -> Result<(BlockModelSpec, InteractionHypergraph)> {
    design.validate()?;
    let mut rng = stream.substream(&[0]).rng();
    let pure = design.size_law(BasicType::Pure(0))?;
    let mixed = design.size_law(BasicType::Mixed)?;
    let mut data = vec![0u32; DESIGN_CLASSES * design.m];
    for p in 0..design.m {
        let tau = &mut data[p * DESIGN_CLASSES..(p + 1) * DESIGN_CLASSES];
        match design.basic_type(p) {
            BasicType::Pure(r) => tau[r] = pure.sample(&mut rng),
            BasicType::Mixed => {
                let k = mixed.sample(&mut rng);
                let first = 1 + mixed_first_class(k, design.mixed_split, &mut rng)?;
                tau[0] = first;
                tau[1] = k - first;
            }
        }
    }
    let types = TypeMatrix::from_raw(DESIGN_CLASSES, data);
    let spec = BlockModelSpec::new(&design.labels(), types)?;
    let h = sample_hyper_sbm(&spec, &mut stream.substream(&[1]).rng());
    Ok((spec, h))
}

fn mixed_first_class<R: Rng + ?Sized>(k: u32, split: MixedSplit, rng: &mut R) -> Result<u32> {
    let b = Binomial::new(u64::from(k - 2), split.p).map_err(|_| Error::InvalidDesign("invalid mixed split"))?;
    Ok(b.sample(rng) as u32)
}
