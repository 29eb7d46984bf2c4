//! The RLBSP operator.
//!
//! The 7×7 region around a pixel is split into 16 overlapping subregions:
//! g0..g7 are 2×2 blocks hugging the four corners, g8..g15 are 3×2 / 2×3
//! blocks along the four edges. Each subregion is listed by the indices of
//! the 48 non-center pixels, numbered r0..r47 row-major with the center
//! skipped, so the center never contributes to a mean:
//!
//! ```text
//!  r0  r1  r2  r3  r4  r5  r6
//!  r7  r8  r9 r10 r11 r12 r13
//! r14 r15 r16 r17 r18 r19 r20
//! r21 r22 r23  p  r24 r25 r26
//! r27 r28 r29 r30 r31 r32 r33
//! r34 r35 r36 r37 r38 r39 r40
//! r41 r42 r43 r44 r45 r46 r47
//! ```

use crate::imageio::Frame;

use super::padded::Padded;
use super::{Descriptor16, DescriptorImage, RelativeThreshold, RlbspParams};

/// Neighbor indices (r0..r47) of each subregion g0..g15.
pub const SUBREGION_NEIGHBOR_INDICES: [&[u8]; 16] = [
    &[0, 1, 7, 8],
    &[5, 6, 12, 13],
    &[7, 8, 14, 15],
    &[12, 13, 19, 20],
    &[27, 28, 34, 35],
    &[32, 33, 39, 40],
    &[34, 35, 41, 42],
    &[39, 40, 46, 47],
    &[2, 3, 4, 9, 10, 11],
    &[9, 10, 11, 16, 17, 18],
    &[14, 15, 21, 22, 27, 28],
    &[15, 16, 22, 23, 28, 29],
    &[18, 19, 24, 25, 31, 32],
    &[19, 20, 25, 26, 32, 33],
    &[29, 30, 31, 36, 37, 38],
    &[36, 37, 38, 43, 44, 45],
];

/// Row-major 7×7 neighborhood; index 24 is the center pixel.
pub type Patch = [u8; 49];

const CENTER: usize = 24;

/// One subregion, as positions in a row-major 7×7 [`Patch`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Subregion {
    cells: [u8; 6],
    len: u8,
}

impl Subregion {
    #[inline]
    pub fn cells(&self) -> &[u8] {
        &self.cells[..self.len as usize]
    }

    /// Pixel count, which is also the divisor of the mean.
    #[inline]
    pub fn divisor(&self) -> u32 {
        self.len as u32
    }

    /// `(dx, dy)` offsets from the patch's top-left corner.
    pub fn offsets(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells().iter().map(|&c| (c as usize % 7, c as usize / 7))
    }
}

const fn build_table() -> [Subregion; 16] {
    let mut table = [Subregion {
        cells: [0; 6],
        len: 0,
    }; 16];
    let mut g = 0;
    while g < 16 {
        let src = SUBREGION_NEIGHBOR_INDICES[g];
        let mut j = 0;
        while j < src.len() {
            let r = src[j];
            // Skip over the center when mapping r_k to a patch position.
            table[g].cells[j] = if (r as usize) < CENTER { r } else { r + 1 };
            j += 1;
        }
        table[g].len = src.len() as u8;
        g += 1;
    }
    table
}

/// Subregions g0..g15 in patch coordinates.
pub const SUBREGIONS: [Subregion; 16] = build_table();

/// Exact mean `sum / count` of a subregion.
#[derive(Clone, Copy, Debug, Eq)]
pub struct SubregionMean {
    pub sum: u32,
    pub count: u32,
}

impl SubregionMean {
    pub fn as_f64(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }
}

impl PartialEq for SubregionMean {
    fn eq(&self, other: &Self) -> bool {
        self.sum as u64 * other.count as u64 == other.sum as u64 * self.count as u64
    }
}

impl PartialEq<u32> for SubregionMean {
    fn eq(&self, other: &u32) -> bool {
        self.sum == other * self.count
    }
}

pub fn subregion_means(patch: &Patch) -> [SubregionMean; 16] {
    SUBREGIONS.map(|region| SubregionMean {
        sum: region.cells().iter().map(|&c| patch[c as usize] as u32).sum(),
        count: region.divisor(),
    })
}

/// The clamp-to-edge 7×7 neighborhood centered on (x, y).
pub fn extract_patch(frame: &Frame, x: usize, y: usize) -> Patch {
    let mut patch = [0u8; 49];
    for (i, v) in patch.iter_mut().enumerate() {
        let dx = (i % 7) as isize - 3;
        let dy = (i / 7) as isize - 3;
        *v = frame.get_clamped(x as isize + dx, y as isize + dy);
    }
    patch
}

pub fn rlbsp_patch(patch: &Patch, params: &RlbspParams) -> Descriptor16 {
    let tau = params.tau();
    let center = patch[CENTER] as u32;
    let mut bits = 0u16;
    for (i, mean) in subregion_means(patch).iter().enumerate() {
        if tau.within(mean.sum, mean.count, center) {
            bits |= 1 << (15 - i);
        }
    }
    Descriptor16(bits)
}

/// RLBSP descriptor of pixel (x, y), reading outside pixels clamp-to-edge.
pub fn rlbsp(frame: &Frame, x: usize, y: usize, params: &RlbspParams) -> Descriptor16 {
    rlbsp_patch(&extract_patch(frame, x, y), params)
}

/// Largest `|Σ − k·c|` that still counts as similar, for every center value.
/// `floor(num·k·c / den)` keeps the comparison exact in integers.
fn tolerance_table(tau: RelativeThreshold, count: u32) -> [i32; 256] {
    let mut table = [0i32; 256];
    for (c, t) in table.iter_mut().enumerate() {
        *t = (tau.numerator() as u64 * count as u64 * c as u64 / tau.denominator() as u64) as i32;
    }
    table
}

/// RLBSP descriptors for every pixel of `frame` (at least 7×7).
pub fn rlbsp_frame(frame: &Frame, params: &RlbspParams) -> DescriptorImage {
    let (w, h) = frame.dims();
    let padded = Padded::new(frame);
    let tol4 = tolerance_table(params.tau(), 4);
    let tol6 = tolerance_table(params.tau(), 6);

    // Relative buffer offsets of every subregion cell.
    let mut corners = [[0isize; 4]; 8];
    let mut edges = [[0isize; 6]; 8];
    for (g, region) in SUBREGIONS.iter().enumerate() {
        for (j, (dx, dy)) in region.offsets().enumerate() {
            let off = padded.offset(dx as isize - 3, dy as isize - 3);
            if g < 8 {
                corners[g][j] = off;
            } else {
                edges[g - 8][j] = off;
            }
        }
    }

    let src = &padded.data;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let at = padded.index(x, y) as isize;
            let c = src[at as usize] as usize;
            let read = |off: isize| src[(at + off) as usize] as i32;
            let mut bits = 0u16;
            let (k4, t4) = (4 * c as i32, tol4[c]);
            for (g, offs) in corners.iter().enumerate() {
                let sum: i32 = offs.iter().map(|&o| read(o)).sum();
                bits |= (((sum - k4).abs() <= t4) as u16) << (15 - g);
            }
            let (k6, t6) = (6 * c as i32, tol6[c]);
            for (g, offs) in edges.iter().enumerate() {
                let sum: i32 = offs.iter().map(|&o| read(o)).sum();
                bits |= (((sum - k6).abs() <= t6) as u16) << (7 - g);
            }
            out.push(Descriptor16(bits));
        }
    }
    DescriptorImage::new(w, h, out).expect("one descriptor per pixel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape() {
        for (g, region) in SUBREGIONS.iter().enumerate() {
            let expected = if g < 8 { 4 } else { 6 };
            assert_eq!(region.divisor(), expected, "g{g}");
            assert!(!region.cells().contains(&(CENTER as u8)), "g{g} touches the center");
        }
        // g0 = {r0, r1, r7, r8}, g8 = {r2, r3, r4, r9, r10, r11}
        assert_eq!(SUBREGIONS[0].cells(), &[0, 1, 7, 8]);
        assert_eq!(SUBREGIONS[8].cells(), &[2, 3, 4, 9, 10, 11]);
        // r24 is the pixel right of the center
        assert_eq!(SUBREGIONS[12].cells(), &[18, 19, 25, 26, 32, 33]);
    }

    #[test]
    fn subregions_are_axis_aligned_blocks() {
        for (g, region) in SUBREGIONS.iter().enumerate() {
            let xs: Vec<_> = region.offsets().map(|o| o.0).collect();
            let ys: Vec<_> = region.offsets().map(|o| o.1).collect();
            let bw = xs.iter().max().unwrap() - xs.iter().min().unwrap() + 1;
            let bh = ys.iter().max().unwrap() - ys.iter().min().unwrap() + 1;
            assert_eq!(bw * bh, region.cells().len(), "g{g} is not a solid block");
        }
    }

    #[test]
    fn every_non_center_pixel_is_covered() {
        let mut covered = [false; 49];
        for region in &SUBREGIONS {
            for &c in region.cells() {
                covered[c as usize] = true;
            }
        }
        let uncovered: Vec<usize> = (0..49).filter(|&i| !covered[i]).collect();
        assert_eq!(uncovered, vec![CENTER]);
    }

    #[test]
    fn constant_patch_means() {
        let means = subregion_means(&[10; 49]);
        assert!(means.iter().all(|m| *m == 10));
    }

    #[test]
    fn shared_cells_between_g0_and_g2() {
        let mut patch = [0u8; 49];
        for i in [0, 1, 7, 8] {
            patch[i] = 4;
        }
        let means = subregion_means(&patch);
        assert!(means[0] == 4);
        assert_eq!(means[2].as_f64(), 2.0);
        assert!(means[8] == 0);
    }

    #[test]
    fn constant_frame_is_all_similar() {
        for v in [0u8, 1, 7, 128, 255] {
            let f = Frame::filled(9, 8, v);
            let p = RlbspParams::default();
            assert_eq!(rlbsp(&f, 4, 4, &p), Descriptor16(0xFFFF));
            assert_eq!(rlbsp(&f, 0, 0, &p), Descriptor16(0xFFFF));
        }
    }

    #[test]
    fn zero_center_against_bright_surround() {
        let mut f = Frame::filled(7, 7, 255);
        f.set(3, 3, 0);
        assert_eq!(rlbsp(&f, 3, 3, &RlbspParams::default()), Descriptor16(0));
    }

    #[test]
    fn bit_order_is_g0_first() {
        // Darken only g0's cells: only bit 15 should clear.
        let mut patch = [100u8; 49];
        for &c in SUBREGIONS[0].cells() {
            patch[c as usize] = 0;
        }
        // g2 shares r7, r8 with g0 and drops too.
        let d = rlbsp_patch(&patch, &RlbspParams::default());
        assert_eq!(d, Descriptor16(!(1 << 15 | 1 << 13)));
    }

    #[test]
    fn threshold_boundary_is_inclusive() {
        // center 50, tau 0.14 -> mean may deviate by exactly 7
        let mut patch = [57u8; 49];
        patch[CENTER] = 50;
        assert_eq!(rlbsp_patch(&patch, &RlbspParams::default()), Descriptor16(0xFFFF));
        let mut patch = [58u8; 49];
        patch[CENTER] = 50;
        assert_eq!(rlbsp_patch(&patch, &RlbspParams::default()), Descriptor16(0));
    }

    #[test]
    fn tolerance_table_agrees_with_direct_comparison() {
        let tau = RelativeThreshold::from_f64(0.14).unwrap();
        for count in [4u32, 6] {
            let table = tolerance_table(tau, count);
            for c in 0..=255u32 {
                for sum in 0..=count * 255 {
                    let fast = (sum as i32 - (count * c) as i32).abs() <= table[c as usize];
                    assert_eq!(fast, tau.within(sum, count, c), "c={c} sum={sum} k={count}");
                }
            }
        }
    }
}
