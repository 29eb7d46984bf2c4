//! Binary texture descriptors.
//!
//! [`rlbsp`] compares a pixel against the means of 16 overlapping
//! subregions of its 7×7 neighborhood under a threshold relative to the
//! pixel's own intensity. The LBP, SILTP and LBSP baselines in [`baseline`]
//! share the same border policy (clamp-to-edge) and descriptor image layout so
//! that any of them can drive the background model.
//!
//! All thresholds are evaluated in exact integer arithmetic: a relative
//! threshold τ is stored as a reduced fraction, and `|m − c| ≤ τ·c` is checked
//! as `den·|Σ − k·c| ≤ num·k·c` for a subregion sum `Σ` over `k` pixels.

pub mod baseline;
mod padded;
pub mod rlbsp;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imageio::Frame;

pub use baseline::{lbp8, lbsp16, siltp8, LBSP_OFFSETS, LBP_NEIGHBORS};
pub use rlbsp::{
    extract_patch, rlbsp, rlbsp_frame, rlbsp_patch, subregion_means, Patch, Subregion,
    SubregionMean, SUBREGIONS, SUBREGION_NEIGHBOR_INDICES,
};

/// 16-bit binary similarity string.
///
/// For RLBSP, bit 15 holds subregion g0's comparison and bit 0 holds g15's.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Descriptor16(pub u16);

impl Descriptor16 {
    pub const ALL_SIMILAR: Descriptor16 = Descriptor16(0xFFFF);

    #[inline]
    pub fn bits(self) -> u16 {
        self.0
    }

    /// Number of differing bit positions.
    #[inline]
    pub fn hamming(self, other: Descriptor16) -> u32 {
        (self.0 ^ other.0).count_ones()
    }
}

impl fmt::Binary for Descriptor16 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Binary::fmt(&self.0, f)
    }
}

#[inline]
pub fn hamming(a: Descriptor16, b: Descriptor16) -> u32 {
    a.hamming(b)
}

/// Largest denominator used when converting a real threshold to a fraction.
pub const MAX_THRESHOLD_DENOMINATOR: u32 = 10_000;

/// Non-negative threshold held as an exact reduced fraction `num / den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RelativeThreshold {
    num: u32,
    den: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RelativeThreshold {
    pub fn from_ratio(num: u32, den: u32) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParams("threshold denominator is zero".into()));
        }
        let g = gcd(num, den).max(1);
        Ok(RelativeThreshold {
            num: num / g,
            den: den / g,
        })
    }

    /// Rounds `value` to the nearest multiple of 1/10000 and reduces it,
    /// so 0.14 becomes exactly 7/50.
    pub fn from_f64(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1e5).contains(&value) {
            return Err(Error::InvalidParams(format!(
                "threshold {value} must be a finite non-negative number"
            )));
        }
        let num = (value * MAX_THRESHOLD_DENOMINATOR as f64).round() as u32;
        Self::from_ratio(num, MAX_THRESHOLD_DENOMINATOR)
    }

    #[inline]
    pub fn numerator(self) -> u32 {
        self.num
    }

    #[inline]
    pub fn denominator(self) -> u32 {
        self.den
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `|sum / count − center| ≤ τ·center`, exactly.
    #[inline]
    pub fn within(self, sum: u32, count: u32, center: u32) -> bool {
        let scaled_center = count as i64 * center as i64;
        let diff = (sum as i64 - scaled_center).unsigned_abs();
        diff * self.den as u64 <= self.num as u64 * scaled_center as u64
    }
}

impl fmt::Display for RelativeThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_f64())
    }
}

/// Parameters of the RLBSP operator. Region size (7) and subregion count
/// (16) are fixed by the subregion table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RlbspParams {
    tau: RelativeThreshold,
}

impl RlbspParams {
    pub const REGION_SIZE: usize = 7;
    pub const POINT_COUNT: usize = 16;
    pub const DEFAULT_TAU: f64 = 0.14;

    pub fn new(tau: RelativeThreshold) -> Result<Self> {
        if tau.num >= tau.den {
            return Err(Error::InvalidParams(format!(
                "RLBSP tau must lie in [0, 1), got {tau}"
            )));
        }
        Ok(RlbspParams { tau })
    }

    pub fn with_tau(tau: f64) -> Result<Self> {
        Self::new(RelativeThreshold::from_f64(tau)?)
    }

    pub fn tau(&self) -> RelativeThreshold {
        self.tau
    }
}

impl Default for RlbspParams {
    fn default() -> Self {
        RlbspParams {
            tau: RelativeThreshold { num: 7, den: 50 },
        }
    }
}

/// Per-pixel descriptors, row-major with the same indexing as [`Frame`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescriptorImage {
    width: usize,
    height: usize,
    data: Vec<Descriptor16>,
}

impl DescriptorImage {
    pub fn new(width: usize, height: usize, data: Vec<Descriptor16>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidParams(format!(
                "descriptor buffer holds {} values, {width}x{height} needs {}",
                data.len(),
                width * height
            )));
        }
        Ok(DescriptorImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[Descriptor16] {
        &self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Descriptor16 {
        self.data[y * self.width + x]
    }
}

/// Descriptor family selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Rlbsp,
    Lbsp,
    Siltp,
    Lbp,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::Rlbsp,
        OperatorKind::Lbsp,
        OperatorKind::Siltp,
        OperatorKind::Lbp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Rlbsp => "rlbsp",
            OperatorKind::Lbsp => "lbsp",
            OperatorKind::Siltp => "siltp",
            OperatorKind::Lbp => "lbp",
        }
    }

    pub fn with_defaults(self) -> Operator {
        match self {
            OperatorKind::Rlbsp => Operator::Rlbsp(RlbspParams::default()),
            OperatorKind::Lbsp => Operator::Lbsp(baseline::default_lbsp_tau()),
            OperatorKind::Siltp => Operator::Siltp(baseline::default_siltp_tau()),
            OperatorKind::Lbp => Operator::Lbp,
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParams(format!(
                    "unknown operator {s:?} (expected rlbsp, lbsp, siltp or lbp)"
                ))
            })
    }
}

/// A configured texture operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operator {
    Rlbsp(RlbspParams),
    Lbsp(RelativeThreshold),
    Siltp(RelativeThreshold),
    Lbp,
}

impl Default for Operator {
    fn default() -> Self {
        Operator::Rlbsp(RlbspParams::default())
    }
}

impl Operator {
    pub fn kind(&self) -> OperatorKind {
        match self {
            Operator::Rlbsp(_) => OperatorKind::Rlbsp,
            Operator::Lbsp(_) => OperatorKind::Lbsp,
            Operator::Siltp(_) => OperatorKind::Siltp,
            Operator::Lbp => OperatorKind::Lbp,
        }
    }

    /// Descriptor of a single pixel.
    pub fn describe(&self, frame: &Frame, x: usize, y: usize) -> Descriptor16 {
        match *self {
            Operator::Rlbsp(params) => rlbsp(frame, x, y, &params),
            Operator::Lbsp(tau) => lbsp16(frame, x, y, tau),
            Operator::Siltp(tau) => siltp8(frame, x, y, tau),
            Operator::Lbp => Descriptor16(lbp8(frame, x, y) as u16),
        }
    }

    /// Descriptors of every pixel; identical to calling [`Operator::describe`]
    /// pointwise.
    pub fn describe_frame(&self, frame: &Frame) -> Result<DescriptorImage> {
        frame.ensure_operator_support()?;
        Ok(match *self {
            Operator::Rlbsp(params) => rlbsp_frame(frame, &params),
            Operator::Lbsp(tau) => baseline::lbsp16_frame(frame, tau),
            Operator::Siltp(tau) => baseline::siltp8_frame(frame, tau),
            Operator::Lbp => baseline::lbp8_frame(frame),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_examples() {
        assert_eq!(hamming(Descriptor16(0xFFFF), Descriptor16(0xFFFF)), 0);
        assert_eq!(hamming(Descriptor16(0xFFFF), Descriptor16(0x0000)), 16);
        assert_eq!(
            hamming(
                Descriptor16(0b1010_0000_0000_0001),
                Descriptor16(0b0010_0000_0000_0000)
            ),
            2
        );
        assert_eq!(
            hamming(
                Descriptor16(0b1010_0000_0000_0001),
                Descriptor16(0b0000_0000_0000_0000)
            ),
            3
        );
    }

    #[test]
    fn threshold_reduces_to_exact_fraction() {
        let t = RelativeThreshold::from_f64(0.14).unwrap();
        assert_eq!((t.numerator(), t.denominator()), (7, 50));
        let t = RelativeThreshold::from_f64(0.3).unwrap();
        assert_eq!((t.numerator(), t.denominator()), (3, 10));
        let t = RelativeThreshold::from_f64(0.0).unwrap();
        assert_eq!((t.numerator(), t.denominator()), (0, 1));
        assert!(RelativeThreshold::from_f64(-0.1).is_err());
        assert!(RelativeThreshold::from_f64(f64::NAN).is_err());
    }

    #[test]
    fn rlbsp_params_reject_tau_outside_unit_interval() {
        assert!(RlbspParams::with_tau(1.0).is_err());
        assert!(RlbspParams::with_tau(0.9999).is_ok());
        assert_eq!(RlbspParams::default(), RlbspParams::with_tau(0.14).unwrap());
    }

    #[test]
    fn within_is_inclusive() {
        let t = RelativeThreshold::from_ratio(7, 50).unwrap();
        // center 50, one-pixel group: allowed |d| <= 7
        assert!(t.within(57, 1, 50));
        assert!(t.within(43, 1, 50));
        assert!(!t.within(58, 1, 50));
        // zero center only tolerates an exact zero mean
        assert!(t.within(0, 4, 0));
        assert!(!t.within(1, 4, 0));
    }

    #[test]
    fn operator_names_round_trip() {
        for kind in OperatorKind::ALL {
            assert_eq!(kind.name().parse::<OperatorKind>().unwrap(), kind);
            assert_eq!(kind.with_defaults().kind(), kind);
        }
        assert!("sift".parse::<OperatorKind>().is_err());
    }
}
