//! Owen-scrambled Sobol points with Joe–Kuo direction numbers.
//!
//! Points are index-addressable (Gray-code order), so any chunk of the
//! sequence can be generated independently. Scrambling uses the
//! Laine–Karras style hash applied to bit-reversed coordinates, which is a
//! fast approximation of nested uniform scrambling.

/// Highest supported dimension of the unit cube.
pub const MAX_DIMENSIONS: usize = 16;

// (degree s, polynomial a, initial m_1..m_s) for cube dimensions 2..=16.
const JOE_KUO: [(u32, u32, &[u32]); MAX_DIMENSIONS - 1] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
];

fn direction_numbers(dim: usize) -> [u32; 32] {
    let mut v = [0u32; 32];
    if dim == 0 {
        for (b, vb) in v.iter_mut().enumerate() {
            *vb = 1 << (31 - b);
        }
        return v;
    }
    let (s, a, m) = JOE_KUO[dim - 1];
    let s = s as usize;
    for b in 0..s {
        v[b] = m[b] << (31 - b);
    }
    for b in s..32 {
        let mut x = v[b - s] ^ (v[b - s] >> s);
        for k in 1..s {
            if (a >> (s - 1 - k)) & 1 == 1 {
                x ^= v[b - k];
            }
        }
        v[b] = x;
    }
    v
}

#[inline]
fn lk_hash(mut x: u32, seed: u32) -> u32 {
    x ^= x.wrapping_mul(0x3d20_adea);
    x = x.wrapping_add(seed);
    x = x.wrapping_mul((seed >> 16) | 1);
    x ^= x.wrapping_mul(0x0552_6c56);
    x ^= x.wrapping_mul(0x53a2_2864);
    x
}

#[inline]
fn owen_scramble(x: u32, seed: u32) -> u32 {
    lk_hash(x.reverse_bits(), seed).reverse_bits()
}

/// A randomized Sobol point set in `[0, 1)^dims`.
#[derive(Clone, Debug)]
pub struct ScrambledSobol {
    directions: Vec<[u32; 32]>,
    seeds: Vec<u32>,
    scrambled: bool,
}

impl ScrambledSobol {
    pub fn new(dims: usize, seed: u64) -> Self {
        assert!((1..=MAX_DIMENSIONS).contains(&dims), "sobol dimension {dims} unsupported");
        let seeds = (0..dims)
            .map(|j| (super::sampling::splitmix64(seed ^ (j as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)) >> 32) as u32)
            .collect();
        Self {
            directions: (0..dims).map(direction_numbers).collect(),
            seeds,
            scrambled: true,
        }
    }

    /// The plain (unrandomized) Sobol sequence.
    pub fn unscrambled(dims: usize) -> Self {
        let mut s = Self::new(dims, 0);
        s.scrambled = false;
        s
    }

    pub fn dims(&self) -> usize {
        self.directions.len()
    }

    /// Raw 32-bit coordinate `dim` of point `index`.
    #[inline]
    pub fn bits(&self, index: u32, dim: usize) -> u32 {
        self.finish(self.unscrambled_bits(index, dim), dim)
    }

    #[inline]
    fn finish(&self, x: u32, dim: usize) -> u32 {
        if self.scrambled {
            owen_scramble(x, self.seeds[dim])
        } else {
            x
        }
    }

    fn unscrambled_bits(&self, index: u32, dim: usize) -> u32 {
        let mut gray = index ^ (index >> 1);
        let v = &self.directions[dim];
        let mut x = 0u32;
        let mut b = 0;
        while gray != 0 {
            if gray & 1 == 1 {
                x ^= v[b];
            }
            gray >>= 1;
            b += 1;
        }
        x
    }

    /// Fills `out` with point `index`, each coordinate at the centre of its
    /// `2^-32` cell (never exactly 0 or 1).
    #[inline]
    pub fn point(&self, index: u32, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (self.bits(index, j) as f64 + 0.5) * (1.0 / 4_294_967_296.0);
        }
    }
}

/// Walks the sequence from a given index, updating one direction number per
/// step instead of rebuilding each point.
pub struct SobolCursor<'a> {
    sobol: &'a ScrambledSobol,
    index: u32,
    state: Vec<u32>,
}

impl<'a> SobolCursor<'a> {
    pub fn new(sobol: &'a ScrambledSobol, start: u32) -> Self {
        let state = (0..sobol.dims()).map(|j| sobol.unscrambled_bits(start, j)).collect();
        Self { sobol, index: start, state }
    }

    /// Writes the current point (as [`ScrambledSobol::point`]) and advances.
    #[inline]
    pub fn next_point(&mut self, out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = (self.sobol.finish(self.state[j], j) as f64 + 0.5) * (1.0 / 4_294_967_296.0);
        }
        self.index = self.index.wrapping_add(1);
        let b = self.index.trailing_zeros() as usize;
        if b < 32 {
            for (j, x) in self.state.iter_mut().enumerate() {
                *x ^= self.sobol.directions[j][b];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // First 32 points of the unscrambled 16-dimensional sequence, in units of
    // 1/1024, as produced by scipy.stats.qmc.Sobol(16, scramble=False)
    // (tests/oracles/sobol_reference.py).
    const REFERENCE: [[u32; 16]; 32] = [
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [512, 512, 512, 512, 512, 512, 512, 512, 512, 512, 512, 512, 512, 512, 512, 512],
        [768, 256, 256, 256, 768, 768, 256, 768, 768, 768, 768, 768, 256, 256, 768, 256],
        [256, 768, 768, 768, 256, 256, 768, 256, 256, 256, 256, 256, 768, 768, 256, 768],
        [384, 384, 640, 896, 384, 128, 384, 896, 896, 640, 896, 384, 384, 640, 384, 896],
        [896, 896, 128, 384, 896, 640, 896, 384, 384, 128, 384, 896, 896, 128, 896, 384],
        [640, 128, 896, 640, 640, 896, 128, 128, 128, 384, 128, 640, 128, 896, 640, 640],
        [128, 640, 384, 128, 128, 384, 640, 640, 640, 896, 640, 128, 640, 384, 128, 128],
        [192, 320, 960, 448, 576, 320, 448, 960, 960, 320, 704, 64, 960, 960, 832, 960],
        [704, 832, 448, 960, 64, 832, 960, 448, 448, 832, 192, 576, 448, 448, 320, 448],
        [960, 64, 704, 192, 320, 576, 192, 192, 192, 576, 448, 832, 704, 704, 64, 704],
        [448, 576, 192, 704, 832, 64, 704, 704, 704, 64, 960, 320, 192, 192, 576, 192],
        [320, 192, 320, 576, 960, 448, 64, 64, 64, 960, 320, 448, 576, 320, 704, 64],
        [832, 704, 832, 64, 448, 960, 576, 576, 576, 448, 832, 960, 64, 832, 192, 576],
        [576, 448, 64, 832, 192, 704, 320, 832, 832, 192, 576, 704, 832, 64, 448, 320],
        [64, 960, 576, 320, 704, 192, 832, 320, 320, 704, 64, 192, 320, 576, 960, 832],
        [96, 480, 480, 672, 288, 992, 544, 864, 480, 160, 96, 416, 672, 672, 352, 32],
        [608, 992, 992, 160, 800, 480, 32, 352, 992, 672, 608, 928, 160, 160, 864, 544],
        [864, 224, 224, 928, 544, 224, 800, 96, 736, 928, 864, 672, 928, 928, 608, 288],
        [352, 736, 736, 416, 32, 736, 288, 608, 224, 416, 352, 160, 416, 416, 96, 800],
        [480, 96, 864, 288, 160, 864, 928, 224, 608, 544, 992, 32, 800, 32, 224, 928],
        [992, 608, 352, 800, 672, 352, 416, 736, 96, 32, 480, 544, 288, 544, 736, 416],
        [736, 352, 608, 32, 928, 96, 672, 992, 352, 288, 224, 800, 544, 288, 992, 672],
        [224, 864, 96, 544, 416, 608, 160, 480, 864, 800, 736, 288, 32, 800, 480, 160],
        [160, 160, 544, 864, 864, 672, 992, 160, 544, 480, 672, 480, 352, 352, 544, 992],
        [672, 672, 32, 352, 352, 160, 480, 672, 32, 992, 160, 992, 864, 864, 32, 480],
        [928, 416, 800, 608, 96, 416, 736, 928, 288, 736, 416, 736, 96, 96, 288, 736],
        [416, 928, 288, 96, 608, 928, 224, 416, 800, 224, 928, 224, 608, 608, 800, 224],
        [288, 288, 160, 224, 736, 544, 608, 800, 416, 864, 288, 96, 224, 992, 928, 96],
        [800, 800, 672, 736, 224, 32, 96, 288, 928, 352, 800, 608, 736, 480, 416, 608],
        [544, 32, 416, 480, 480, 288, 864, 32, 672, 96, 544, 864, 480, 736, 160, 352],
        [32, 544, 928, 992, 992, 800, 352, 544, 160, 608, 32, 352, 992, 224, 672, 864],    ];

    #[test]
    fn unscrambled_matches_reference_sequence() {
        let s = ScrambledSobol::unscrambled(MAX_DIMENSIONS);
        for (i, row) in REFERENCE.iter().enumerate() {
            for (j, &expected) in row.iter().enumerate() {
                let got = s.bits(i as u32, j);
                assert_eq!(got >> 22, expected, "point {i}, dim {j}");
                assert_eq!(got & ((1 << 22) - 1), 0);
            }
        }
    }

    #[test]
    fn cursor_matches_random_access() {
        let s = ScrambledSobol::new(5, 9);
        let mut cursor = SobolCursor::new(&s, 1000);
        let (mut a, mut b) = ([0.0; 5], [0.0; 5]);
        for i in 1000..5000 {
            cursor.next_point(&mut a);
            s.point(i, &mut b);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn scrambling_preserves_stratification() {
        // Each dyadic interval of width 1/256 holds exactly one of the first
        // 256 points, scrambled or not.
        let s = ScrambledSobol::new(5, 1234);
        for j in 0..5 {
            let mut seen = [false; 256];
            for i in 0..256 {
                let cell = (s.bits(i, j) >> 24) as usize;
                assert!(!seen[cell]);
                seen[cell] = true;
            }
        }
    }

    #[test]
    fn different_seeds_give_different_points() {
        let a = ScrambledSobol::new(3, 1);
        let b = ScrambledSobol::new(3, 2);
        assert_ne!(a.bits(7, 0), b.bits(7, 0));
    }
}
