//! LBP, SILTP and LBSP descriptors used as comparison operators.
//!
//! All three read pixels outside the frame clamp-to-edge, like RLBSP.

use crate::imageio::Frame;

use super::padded::Padded;
use super::{Descriptor16, DescriptorImage, RelativeThreshold};

/// 8-neighborhood, clockwise from the top-left pixel.
pub const LBP_NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (1, 0),
    (1, 1),
    (0, 1),
    (-1, 1),
    (-1, 0),
];

/// Sampled positions of the 5×5 LBSP pattern; position j sets bit 15 − j.
pub const LBSP_OFFSETS: [(isize, isize); 16] = [
    (-2, -2),
    (0, -2),
    (2, -2),
    (-1, -1),
    (0, -1),
    (1, -1),
    (-2, 0),
    (-1, 0),
    (1, 0),
    (2, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
    (-2, 2),
    (0, 2),
    (2, 2),
];

pub const DEFAULT_SILTP_TAU: f64 = 0.05;
pub const DEFAULT_LBSP_TAU: f64 = 0.3;

pub fn default_siltp_tau() -> RelativeThreshold {
    RelativeThreshold::from_ratio(1, 20).expect("nonzero denominator")
}

pub fn default_lbsp_tau() -> RelativeThreshold {
    RelativeThreshold::from_ratio(3, 10).expect("nonzero denominator")
}

#[inline]
fn lbp_bits(center: u8, neighbors: impl Iterator<Item = u8>) -> u8 {
    neighbors
        .enumerate()
        .fold(0u8, |acc, (k, v)| acc | (((v >= center) as u8) << k))
}

/// 2-bit SILTP code: `01` brighter than `(1+τ)·c`, `10` darker than `(1−τ)·c`.
#[inline]
fn siltp_code(center: u8, value: u8, tau: RelativeThreshold) -> u16 {
    let (num, den) = (tau.numerator() as i64, tau.denominator() as i64);
    let (c, v) = (center as i64, value as i64);
    if den * v > (den + num) * c {
        0b01
    } else if den * v < (den - num) * c {
        0b10
    } else {
        0b00
    }
}

#[inline]
fn siltp_bits(center: u8, neighbors: impl Iterator<Item = u8>, tau: RelativeThreshold) -> u16 {
    neighbors
        .enumerate()
        .fold(0u16, |acc, (k, v)| acc | (siltp_code(center, v, tau) << (2 * k)))
}

#[inline]
fn lbsp_bits(center: u8, samples: impl Iterator<Item = u8>, tau: RelativeThreshold) -> u16 {
    samples.enumerate().fold(0u16, |acc, (j, v)| {
        acc | ((tau.within(v as u32, 1, center as u32) as u16) << (15 - j))
    })
}

/// Local binary pattern: neighbor k sets bit k when it is at least as bright
/// as the center.
pub fn lbp8(frame: &Frame, x: usize, y: usize) -> u8 {
    let (x, y) = (x as isize, y as isize);
    lbp_bits(
        frame.get_clamped(x, y),
        LBP_NEIGHBORS
            .iter()
            .map(|&(dx, dy)| frame.get_clamped(x + dx, y + dy)),
    )
}

/// Scale-invariant local ternary pattern; neighbor k occupies bits 2k..2k+1.
pub fn siltp8(frame: &Frame, x: usize, y: usize, tau: RelativeThreshold) -> Descriptor16 {
    let (x, y) = (x as isize, y as isize);
    Descriptor16(siltp_bits(
        frame.get_clamped(x, y),
        LBP_NEIGHBORS
            .iter()
            .map(|&(dx, dy)| frame.get_clamped(x + dx, y + dy)),
        tau,
    ))
}

/// Intra-image local binary similarity pattern over [`LBSP_OFFSETS`]:
/// a bit is set when `|I_k − I_c| ≤ τ·I_c`.
pub fn lbsp16(frame: &Frame, x: usize, y: usize, tau: RelativeThreshold) -> Descriptor16 {
    let (x, y) = (x as isize, y as isize);
    Descriptor16(lbsp_bits(
        frame.get_clamped(x, y),
        LBSP_OFFSETS
            .iter()
            .map(|&(dx, dy)| frame.get_clamped(x + dx, y + dy)),
        tau,
    ))
}

fn map_padded<const K: usize>(
    frame: &Frame,
    offsets: &[(isize, isize); K],
    f: impl Fn(u8, &[u8; K]) -> u16,
) -> DescriptorImage {
    let (w, h) = frame.dims();
    let padded = Padded::new(frame);
    let rel = offsets.map(|(dx, dy)| padded.offset(dx, dy));
    let mut out = Vec::with_capacity(w * h);
    let mut samples = [0u8; K];
    for y in 0..h {
        for x in 0..w {
            let at = padded.index(x, y) as isize;
            for (s, &o) in samples.iter_mut().zip(&rel) {
                *s = padded.data[(at + o) as usize];
            }
            out.push(Descriptor16(f(padded.data[at as usize], &samples)));
        }
    }
    DescriptorImage::new(w, h, out).expect("one descriptor per pixel")
}

pub fn lbp8_frame(frame: &Frame) -> DescriptorImage {
    map_padded(frame, &LBP_NEIGHBORS, |c, s| lbp_bits(c, s.iter().copied()) as u16)
}

pub fn siltp8_frame(frame: &Frame, tau: RelativeThreshold) -> DescriptorImage {
    map_padded(frame, &LBP_NEIGHBORS, |c, s| siltp_bits(c, s.iter().copied(), tau))
}

pub fn lbsp16_frame(frame: &Frame, tau: RelativeThreshold) -> DescriptorImage {
    map_padded(frame, &LBSP_OFFSETS, |c, s| lbsp_bits(c, s.iter().copied(), tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn center_on(surround: u8, center: u8) -> Frame {
        let mut f = Frame::filled(7, 7, surround);
        f.set(3, 3, center);
        f
    }

    #[test]
    fn lbp_constant_and_dark_surround() {
        assert_eq!(lbp8(&Frame::filled(7, 7, 90), 3, 3), 0xFF);
        assert_eq!(lbp8(&center_on(0, 255), 3, 3), 0x00);
    }

    #[test]
    fn lbp_neighbor_order() {
        // Brighten only the right-hand neighbor (index 3).
        let mut f = Frame::filled(7, 7, 10);
        f.set(3, 3, 50);
        f.set(4, 3, 60);
        assert_eq!(lbp8(&f, 3, 3), 1 << 3);
    }

    #[test]
    fn siltp_codes() {
        let tau = default_siltp_tau();
        assert_eq!(siltp8(&Frame::filled(7, 7, 80), 3, 3, tau), Descriptor16(0));
        // zero center: any positive neighbor is "brighter"
        let mut f = Frame::filled(7, 7, 0);
        f.set(4, 3, 1);
        assert_eq!(siltp8(&f, 3, 3, tau), Descriptor16(0b01 << 6));
        // 100 vs center 100: tolerance band is (95, 105)
        assert_eq!(siltp_code(100, 105, tau), 0b00);
        assert_eq!(siltp_code(100, 106, tau), 0b01);
        assert_eq!(siltp_code(100, 95, tau), 0b00);
        assert_eq!(siltp_code(100, 94, tau), 0b10);
    }

    #[test]
    fn lbsp_constant_and_zero_center() {
        let tau = default_lbsp_tau();
        assert_eq!(lbsp16(&Frame::filled(7, 7, 33), 3, 3, tau), Descriptor16(0xFFFF));
        assert_eq!(lbsp16(&center_on(255, 0), 3, 3, tau), Descriptor16(0));
    }

    #[test]
    fn lbsp_offsets_are_distinct_and_exclude_center() {
        let mut seen = std::collections::HashSet::new();
        for &o in &LBSP_OFFSETS {
            assert_ne!(o, (0, 0));
            assert!(o.0.abs() <= 2 && o.1.abs() <= 2);
            assert!(seen.insert(o));
        }
    }
}
