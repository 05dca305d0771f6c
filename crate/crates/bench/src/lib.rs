//! Fixed regions shared by the benchmarks.

use zcorr::region::{canonical_shape, regular_region, Involution};
use zcorr::Region;

/// Regular `2n`-gon.
pub fn regular(n: usize) -> Region {
    regular_region(n).expect("regular polygons are valid")
}

/// A region with several crossings and no rotational symmetry.
pub fn irregular(n: usize) -> Region {
    // chord i joins 2i-1 to a partner chosen to interleave with its neighbours
    let len = 2 * n;
    let mut tau = vec![0; len];
    let mut free: Vec<usize> = (1..=len).collect();
    while let Some(a) = free.first().copied() {
        free.remove(0);
        let b = free[(free.len() / 2).min(free.len() - 1)];
        free.retain(|&x| x != b);
        tau[a - 1] = b;
        tau[b - 1] = a;
    }
    canonical_shape(&Involution::new(tau).expect("pairing is an involution"))
        .expect("canonical shapes always exist")
}
