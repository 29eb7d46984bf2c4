//! Frames, ground truth and CDnet-style dataset ingestion.
//!
//! Binary PGM (P5) and PPM (P6) are always available. With the `codecs`
//! feature, PNG, JPEG and BMP files are decoded too, which is what the CDnet
//! distribution ships. Color inputs are reduced to a single luminance channel
//! with `Y = round(0.299 R + 0.587 G + 0.114 B)`.

mod netpbm;
mod sequence;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use netpbm::{decode_netpbm, encode_pgm};
pub use sequence::{list_numbered, load_sequence, FrameEntry, SequenceSource, TemporalWindow};

/// Smallest width and height the texture operators accept.
pub const MIN_OPERATOR_SIZE: usize = 7;

/// Single-channel 8-bit image, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl Frame {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidParams(format!(
                "pixel buffer holds {} values, {width}x{height} needs {}",
                data.len(),
                width * height
            )));
        }
        Ok(Frame {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Frame {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds a frame by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Frame {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: u8) {
        self.data[y * self.width + x] = value;
    }

    /// Reads a pixel with clamp-to-edge addressing.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> u8 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    pub fn ensure_operator_support(&self) -> Result<()> {
        if self.width < MIN_OPERATOR_SIZE || self.height < MIN_OPERATOR_SIZE {
            return Err(Error::FrameTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    pub fn ensure_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::dimension_mismatch(dims, self.dims()));
        }
        Ok(())
    }
}

/// CDnet 2012 ground-truth label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Label {
    Static,
    HardShadow,
    OutsideRoi,
    Unknown,
    Motion,
}

impl Label {
    pub const STATIC: u8 = 0;
    pub const HARD_SHADOW: u8 = 50;
    pub const OUTSIDE_ROI: u8 = 85;
    pub const UNKNOWN: u8 = 170;
    pub const MOTION: u8 = 255;

    pub fn from_code(code: u8) -> Option<Label> {
        match code {
            Self::STATIC => Some(Label::Static),
            Self::HARD_SHADOW => Some(Label::HardShadow),
            Self::OUTSIDE_ROI => Some(Label::OutsideRoi),
            Self::UNKNOWN => Some(Label::Unknown),
            Self::MOTION => Some(Label::Motion),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            Label::Static => Self::STATIC,
            Label::HardShadow => Self::HARD_SHADOW,
            Label::OutsideRoi => Self::OUTSIDE_ROI,
            Label::Unknown => Self::UNKNOWN,
            Label::Motion => Self::MOTION,
        }
    }
}

/// Per-pixel ground-truth labels; every value is a valid [`Label`] code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruthFrame {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl GroundTruthFrame {
    pub fn new(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        Self::from_frame(Frame::new(width, height, labels)?)
    }

    pub fn from_frame(frame: Frame) -> Result<Self> {
        if let Some(&bad) = frame.data().iter().find(|&&v| Label::from_code(v).is_none()) {
            return Err(Error::InvalidLabel(bad));
        }
        let (width, height) = frame.dims();
        Ok(GroundTruthFrame {
            width,
            height,
            labels: frame.into_data(),
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> Label {
        // Validated on construction.
        Label::from_code(self.labels[i]).expect("validated label")
    }
}

/// `round(0.299 R + 0.587 G + 0.114 B)`, evaluated exactly in integers.
#[inline]
pub fn luminance(r: u8, g: u8, b: u8) -> u8 {
    let weighted = 299 * r as u32 + 587 * g as u32 + 114 * b as u32;
    ((weighted + 500) / 1000).min(255) as u8
}

/// Decodes an image file into a luminance frame.
pub fn load_frame(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::unreadable(path, e))?;
    decode_frame(&bytes, path)
}

fn decode_frame(bytes: &[u8], path: &Path) -> Result<Frame> {
    if netpbm::is_netpbm(bytes) {
        return decode_netpbm(bytes).map_err(|e| match e {
            Error::Unreadable { reason, .. } => Error::unreadable(path, reason),
            other => other,
        });
    }
    decode_other(bytes, path)
}

#[cfg(feature = "codecs")]
fn decode_other(bytes: &[u8], path: &Path) -> Result<Frame> {
    use image::{ColorType, ImageError};

    let format = image::guess_format(bytes).map_err(|_| {
        Error::UnsupportedFormat(format!("{}: unrecognized image signature", path.display()))
    })?;
    let img = image::load_from_memory_with_format(bytes, format).map_err(|e| match e {
        ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        other => Error::unreadable(path, other),
    })?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    let data = match img.color() {
        ColorType::L8 | ColorType::La8 => img.into_luma8().into_raw(),
        _ => img
            .into_rgb8()
            .pixels()
            .map(|p| luminance(p[0], p[1], p[2]))
            .collect(),
    };
    Frame::new(width, height, data)
}

#[cfg(not(feature = "codecs"))]
fn decode_other(_bytes: &[u8], path: &Path) -> Result<Frame> {
    Err(Error::UnsupportedFormat(format!(
        "{}: only binary PGM/PPM are supported in this build",
        path.display()
    )))
}

/// Reads image width and height without decoding the raster.
pub fn probe_dimensions(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let mut head = Vec::with_capacity(512);
    {
        use std::io::Read;
        let file = fs::File::open(path).map_err(|e| Error::unreadable(path, e))?;
        file.take(512)
            .read_to_end(&mut head)
            .map_err(|e| Error::unreadable(path, e))?;
    }
    if netpbm::is_netpbm(&head) {
        let header = netpbm::parse_header(&head).map_err(|e| match e {
            Error::Unreadable { reason, .. } => Error::unreadable(path, reason),
            other => other,
        })?;
        return Ok((header.width, header.height));
    }
    probe_other(path)
}

#[cfg(feature = "codecs")]
fn probe_other(path: &Path) -> Result<(usize, usize)> {
    let (w, h) = image::image_dimensions(path).map_err(|e| match e {
        image::ImageError::Unsupported(u) => Error::UnsupportedFormat(u.to_string()),
        other => Error::unreadable(path, other),
    })?;
    Ok((w as usize, h as usize))
}

#[cfg(not(feature = "codecs"))]
fn probe_other(path: &Path) -> Result<(usize, usize)> {
    Err(Error::UnsupportedFormat(format!(
        "{}: only binary PGM/PPM are supported in this build",
        path.display()
    )))
}

pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruthFrame> {
    GroundTruthFrame::from_frame(load_frame(path)?)
}

/// Writes any frame as a binary PGM.
pub fn write_pgm(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(frame))?;
    Ok(())
}

/// Writes a binary foreground mask (values 0 and 255 only) as PGM.
pub fn write_mask(mask: &Frame, path: impl AsRef<Path>) -> Result<()> {
    if let Some(&bad) = mask.data().iter().find(|&&v| v != 0 && v != 255) {
        return Err(Error::InvalidMaskValue(bad));
    }
    write_pgm(mask, path)
}
