//! Memory-bound amplitude kernels.
//!
//! Every kernel works in place on disjoint index ranges. The transverse-field
//! layer touches bit pairs `(b, b | 1 << k)`; bits below [`BLOCK_BITS`] are
//! handled together inside cache-sized blocks, higher bits one pass each.

use num_complex::Complex64;

use crate::par::{self, Exec};

/// Low bits processed per cache block (2^11 amplitudes = 32 KiB).
pub const BLOCK_BITS: usize = 11;
const BLOCK: usize = 1 << BLOCK_BITS;

#[inline(always)]
fn rotate_pair(a: &mut Complex64, b: &mut Complex64, c: f64, s: f64) {
    // (c + i s X) acting on (a, b)
    let (ar, ai, br, bi) = (a.re, a.im, b.re, b.im);
    a.re = c * ar - s * bi;
    a.im = c * ai + s * br;
    b.re = c * br - s * ai;
    b.im = c * bi + s * ar;
}

fn rotate_low_bits(block: &mut [Complex64], bits: usize, c: f64, s: f64) {
    let n = block.len();
    for k in 0..bits {
        let stride = 1usize << k;
        let mut base = 0;
        while base < n {
            let (lo, hi) = block[base..base + 2 * stride].split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                rotate_pair(a, b, c, s);
            }
            base += 2 * stride;
        }
    }
}

/// High bits handled together per memory pass.
pub const TILE_BITS: usize = 7;
/// Contiguous amplitudes per tile row (one 256-byte run).
const TILE_WIDTH: usize = 16;

#[inline(always)]
fn rotate_rows(x: &mut [Complex64], y: &mut [Complex64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        rotate_pair(a, b, c, s);
    }
}

/// Rotate bits `lo..lo + m` of every index in `amps`.
///
/// Each region of `2^(lo+m)` amplitudes is viewed as `2^m` rows of length
/// `2^lo`; the rows are cut into column tiles of [`TILE_WIDTH`], and every tile
/// (all `2^m` rows) is rotated on all `m` bits while it sits in L1.
fn rotate_high_group(amps: &mut [Complex64], lo: usize, m: usize, c: f64, s: f64, exec: Exec) {
    let row_len = 1usize << lo;
    let width = TILE_WIDTH.min(row_len);
    let rows_per_region = 1usize << m;
    let mut tiles: Vec<Vec<&mut [Complex64]>> = Vec::new();
    for region in amps.chunks_mut(row_len << m) {
        let first = tiles.len();
        tiles.extend((0..row_len / width).map(|_| Vec::with_capacity(rows_per_region)));
        for row in region.chunks_mut(row_len) {
            for (t, piece) in row.chunks_mut(width).enumerate() {
                tiles[first + t].push(piece);
            }
        }
    }
    let work = |tile: &mut Vec<&mut [Complex64]>| {
        for j in 0..m {
            let step = 1usize << j;
            let mut base = 0;
            while base < rows_per_region {
                for r in base..base + step {
                    let (head, tail) = tile.split_at_mut(r + step);
                    rotate_rows(head[r], tail[0], c, s);
                }
                base += 2 * step;
            }
        }
    };
    par::for_each_chunk_mut(&mut tiles, 8, exec, |_, group| group.iter_mut().for_each(work));
}

/// Apply `prod_j (c + i s X_j)` over all `n_sites` sites.
pub fn apply_x_layer(amps: &mut [Complex64], n_sites: usize, c: f64, s: f64, exec: Exec) {
    debug_assert_eq!(amps.len(), 1usize << n_sites);
    let low = n_sites.min(BLOCK_BITS);
    par::for_each_chunk_mut(amps, BLOCK, exec, |_, block| rotate_low_bits(block, low, c, s));
    let mut k = low;
    while k < n_sites {
        let m = TILE_BITS.min(n_sites - k);
        rotate_high_group(amps, k, m, c, s, exec);
        k += m;
    }
}

/// `amps[b] *= phases[b]`.
pub fn apply_diagonal(amps: &mut [Complex64], phases: &[Complex64], exec: Exec) {
    debug_assert_eq!(amps.len(), phases.len());
    par::for_each_chunk_mut(amps, BLOCK * 4, exec, |off, chunk| {
        let n = chunk.len();
        for (a, p) in chunk.iter_mut().zip(&phases[off..off + n]) {
            *a *= p;
        }
    });
}

/// `<bra|ket>` with a chunk-ordered deterministic reduction.
pub fn inner(bra: &[Complex64], ket: &[Complex64], exec: Exec) -> Complex64 {
    debug_assert_eq!(bra.len(), ket.len());
    par::map_reduce_ranges(
        bra.len(),
        BLOCK * 4,
        exec,
        Complex64::default(),
        |lo, hi| {
            let mut acc = Complex64::default();
            for (x, y) in bra[lo..hi].iter().zip(&ket[lo..hi]) {
                acc += x.conj() * y;
            }
            acc
        },
        |a, b| a + b,
    )
}

/// Return `<bra|ket>` and then apply `ket[b] *= phases[b]`, in one sweep.
pub fn overlap_then_diagonal(bra: &[Complex64], ket: &mut [Complex64], phases: &[Complex64], exec: Exec) -> Complex64 {
    debug_assert_eq!(bra.len(), ket.len());
    debug_assert_eq!(phases.len(), ket.len());
    par::map_reduce_chunks_mut(
        ket,
        BLOCK * 4,
        exec,
        Complex64::default(),
        |off, chunk| {
            let n = chunk.len();
            let mut acc = Complex64::default();
            for ((k, x), p) in chunk.iter_mut().zip(&bra[off..off + n]).zip(&phases[off..off + n]) {
                acc += x.conj() * *k;
                *k *= p;
            }
            acc
        },
        |a, b| a + b,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect()
    }

    fn naive_x_layer(amps: &mut [Complex64], n_sites: usize, c: f64, s: f64) {
        for k in 0..n_sites {
            for b in 0..amps.len() {
                if b & (1 << k) == 0 {
                    let (mut x, mut y) = (amps[b], amps[b | 1 << k]);
                    rotate_pair(&mut x, &mut y, c, s);
                    amps[b] = x;
                    amps[b | 1 << k] = y;
                }
            }
        }
    }

    #[test]
    fn blocked_layer_matches_naive() {
        for n_sites in [3usize, 11, 13, 20] {
            let mut a = sample(1 << n_sites);
            let mut b = a.clone();
            let (c, s) = (0.3f64.cos(), 0.3f64.sin());
            apply_x_layer(&mut a, n_sites, c, s, Exec::default());
            naive_x_layer(&mut b, n_sites, c, s);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let n_sites = 14;
        let base = sample(1 << n_sites);
        let phases: Vec<Complex64> = (0..base.len())
            .map(|i| Complex64::from_polar(1.0, i as f64 * 0.01))
            .collect();
        let run = |exec| {
            let mut a = base.clone();
            apply_x_layer(&mut a, n_sites, 0.8, 0.6, exec);
            let ov = overlap_then_diagonal(&base, &mut a, &phases, exec);
            (a, ov)
        };
        let (a, oa) = run(Exec::Sequential);
        let (b, ob) = run(Exec::Parallel);
        assert_eq!(oa, ob);
        assert!(a.iter().zip(&b).all(|(x, y)| x == y));
    }
}
