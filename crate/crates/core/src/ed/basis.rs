use crate::error::{Error, Result};

/// Bits reserved per site in a packed configuration.
pub(crate) const BITS: u32 = 2;
const MASK: u64 = (1 << BITS) - 1;
pub const MAX_SITES: usize = 32;

/// Fixed-magnetization sector of a chain of `L` spins with `local_dim`
/// states per site (2 for spin-1/2, 3 for spin-1).
///
/// A configuration stores the local level `v ∈ 0..local_dim` of site `i` in
/// bits `2i..2i+2`; the magnetic quantum number is `m = v − s`. States are
/// ranked by their packed value.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    sites: usize,
    local_dim: u8,
    twice_sz: i32,
    states: Vec<u64>,
}

impl SectorBasis {
    /// `twice_sz` is `2 S^z_total`, so half-integer sectors stay integral.
    pub fn new(sites: usize, local_dim: u8, twice_sz: i32) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::Unsupported(format!(
                "chain length {sites} out of range 1..={MAX_SITES}"
            )));
        }
        if !(2..=3).contains(&local_dim) {
            return Err(Error::Unsupported(format!("local dimension {local_dim}")));
        }
        // Σ (2v − (d−1)) = 2 S^z  ⇒  Σ v = (2 S^z + L (d−1)) / 2
        let num = twice_sz + (sites as i32) * (local_dim as i32 - 1);
        if num < 0 || num % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "2S^z={twice_sz} is not reachable with {sites} sites of dimension {local_dim}"
            )));
        }
        let target = (num / 2) as usize;
        if target > sites * (local_dim as usize - 1) {
            return Err(Error::InvalidInput(format!(
                "2S^z={twice_sz} exceeds the maximum"
            )));
        }
        let mut states = Vec::new();
        enumerate(sites, local_dim as usize, target, 0, 0, &mut states);
        states.sort_unstable();
        Ok(SectorBasis {
            sites,
            local_dim,
            twice_sz,
            states,
        })
    }

    /// The `S^z = 0` sector, or `S^z = 1/2` for odd spin-1/2 chains.
    pub fn lowest_sz(sites: usize, local_dim: u8) -> Result<Self> {
        let twice = if local_dim == 2 && sites % 2 == 1 {
            1
        } else {
            0
        };
        SectorBasis::new(sites, local_dim, twice)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn local_dim(&self) -> u8 {
        self.local_dim
    }

    pub fn twice_sz(&self) -> i32 {
        self.twice_sz
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn unrank(&self, index: usize) -> u64 {
        self.states[index]
    }

    pub fn rank(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Twice the magnetic quantum number at a site.
    #[inline]
    pub fn twice_m(&self, state: u64, site: usize) -> i32 {
        2 * level(state, site) as i32 - (self.local_dim as i32 - 1)
    }

    /// All `2S^z` values allowed for this chain.
    pub fn twice_sz_values(sites: usize, local_dim: u8) -> Vec<i32> {
        let max = (sites as i32) * (local_dim as i32 - 1);
        (-max..=max).step_by(2).collect()
    }
}

#[inline]
pub(crate) fn level(state: u64, site: usize) -> u64 {
    (state >> (BITS as usize * site)) & MASK
}

#[inline]
pub(crate) fn with_level(state: u64, site: usize, v: u64) -> u64 {
    let shift = BITS as usize * site;
    (state & !(MASK << shift)) | (v << shift)
}

fn enumerate(sites: usize, d: usize, remaining: usize, site: usize, acc: u64, out: &mut Vec<u64>) {
    if site == sites {
        if remaining == 0 {
            out.push(acc);
        }
        return;
    }
    let left = sites - site - 1;
    for v in 0..d {
        if v > remaining {
            break;
        }
        if remaining - v > left * (d - 1) {
            continue;
        }
        enumerate(
            sites,
            d,
            remaining - v,
            site + 1,
            acc | ((v as u64) << (BITS as usize * site)),
            out,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn sector_dimensions() {
        assert_eq!(SectorBasis::new(16, 2, 0).unwrap().dim(), 12_870);
        assert_eq!(
            SectorBasis::new(20, 2, 0).unwrap().dim(),
            binomial(20, 10) as usize
        );
        assert_eq!(SectorBasis::new(12, 3, 0).unwrap().dim(), 73_789);
        assert_eq!(SectorBasis::new(2, 2, 0).unwrap().dim(), 2);
        assert!(SectorBasis::new(3, 2, 0).is_err());
        assert_eq!(SectorBasis::lowest_sz(3, 2).unwrap().dim(), 3);
    }

    #[test]
    fn sectors_partition_full_space() {
        for (l, d) in [(6usize, 2u8), (5, 3)] {
            let total: usize = SectorBasis::twice_sz_values(l, d)
                .into_iter()
                .map(|s| SectorBasis::new(l, d, s).unwrap().dim())
                .sum();
            assert_eq!(total, (d as usize).pow(l as u32));
        }
    }

    #[test]
    fn rank_unrank_and_magnetization() {
        for (l, d, sz) in [(8usize, 2u8, 0i32), (8, 2, 2), (6, 3, 0), (5, 3, -2)] {
            let b = SectorBasis::new(l, d, sz).unwrap();
            for i in 0..b.dim() {
                let s = b.unrank(i);
                assert_eq!(b.rank(s), Some(i));
                let m: i32 = (0..l).map(|site| b.twice_m(s, site)).sum();
                assert_eq!(m, sz);
            }
        }
    }
}
