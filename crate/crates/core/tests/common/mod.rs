#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use stbc_ccm::signal::{BlockAssembler, FadingKind};
use stbc_ccm::{CMat, CVec, Complex64, SpaceTimeChannel, SpreadingScheme, SpreadingSet, SymbolStream};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> CVec {
    CVec::from_fn(n, |_, _| gaussian(rng))
}

pub fn random_hpd(n: usize, rng: &mut ChaCha8Rng) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| gaussian(rng));
    &a * a.adjoint() + CMat::identity(n, n)
}

/// A small downlink: codes, shared static channel and random symbol streams.
pub struct Link {
    pub set: SpreadingSet,
    pub assembler: BlockAssembler,
    pub channel: SpaceTimeChannel,
    pub streams: Vec<SymbolStream>,
}

impl Link {
    pub fn new(users: usize, gain: usize, lp: usize, blocks: usize, rng: &mut ChaCha8Rng) -> Self {
        let set = SpreadingSet::random(users, gain, SpreadingScheme::ZeroPadded, rng).unwrap();
        let assembler = BlockAssembler::new(&set, lp).unwrap();
        let powers: Vec<f64> = (0..lp.min(3)).map(|l| -3.0 * l as f64).collect();
        let channel = SpaceTimeChannel::random(lp, &powers, 0.0, FadingKind::None, true, rng).unwrap();
        let streams = (0..users).map(|_| SymbolStream::random(blocks, 1.0, rng)).collect();
        Self {
            set,
            assembler,
            channel,
            streams,
        }
    }

    pub fn block(&self, block: usize, sigma2: f64, isi: bool, rng: &mut ChaCha8Rng) -> CVec {
        let chans = vec![&self.channel; self.streams.len()];
        self.assembler
            .assemble(&self.streams, &chans, block, sigma2, isi, rng)
            .unwrap()
            .y
    }
}
