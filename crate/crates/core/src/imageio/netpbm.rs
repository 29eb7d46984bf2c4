//! Binary PGM (P5) and PPM (P6) rasters with maxval up to 255.

use crate::error::{Error, Result};

use super::{luminance, Frame};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Gray,
    Rgb,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Header {
    pub kind: Kind,
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    /// Byte offset of the first raster byte.
    pub data_offset: usize,
}

pub(crate) fn is_netpbm(bytes: &[u8]) -> bool {
    bytes.len() >= 2 && bytes[0] == b'P' && (b'1'..=b'7').contains(&bytes[1])
}

fn truncated(what: &str) -> Error {
    Error::Unreadable {
        path: Default::default(),
        reason: format!("truncated netpbm {what}"),
    }
}

pub(crate) fn parse_header(bytes: &[u8]) -> Result<Header> {
    let kind = match bytes.get(..2) {
        Some(b"P5") => Kind::Gray,
        Some(b"P6") => Kind::Rgb,
        Some([b'P', d]) => {
            return Err(Error::UnsupportedFormat(format!(
                "netpbm P{} (only binary P5/P6 are supported)",
                *d as char
            )))
        }
        _ => return Err(Error::UnsupportedFormat("not a netpbm file".into())),
    };

    let mut pos = 2;
    let mut fields = [0u32; 3];
    for field in fields.iter_mut() {
        // Whitespace and `#` comments may separate header tokens.
        loop {
            match bytes.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while !matches!(bytes.get(pos), Some(b'\n') | Some(b'\r') | None) {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(truncated("header")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::unreadable("", "malformed netpbm header"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::unreadable("", "netpbm header value out of range"))?;
    }
    // Exactly one whitespace byte separates maxval from the raster.
    match bytes.get(pos) {
        Some(c) if c.is_ascii_whitespace() => pos += 1,
        Some(_) => return Err(Error::unreadable("", "malformed netpbm header")),
        None => return Err(truncated("header")),
    }

    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::unreadable("", "netpbm image has zero size"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::UnsupportedFormat(format!(
            "netpbm maxval {maxval} (only 8-bit rasters are supported)"
        )));
    }
    Ok(Header {
        kind,
        width: width as usize,
        height: height as usize,
        maxval,
        data_offset: pos,
    })
}

/// Decodes P5 or P6 bytes. RGB rasters are converted to luminance.
pub fn decode_netpbm(bytes: &[u8]) -> Result<Frame> {
    let header = parse_header(bytes)?;
    let pixels = header.width * header.height;
    let channels = match header.kind {
        Kind::Gray => 1,
        Kind::Rgb => 3,
    };
    let raster = bytes
        .get(header.data_offset..header.data_offset + pixels * channels)
        .ok_or_else(|| truncated("raster"))?;

    let maxval = header.maxval;
    let scale = |v: u8| -> Result<u8> {
        let v = v as u32;
        if v > maxval {
            return Err(Error::unreadable("", format!("sample {v} exceeds maxval {maxval}")));
        }
        Ok(if maxval == 255 {
            v as u8
        } else {
            ((v * 255 + maxval / 2) / maxval) as u8
        })
    };

    let data = match header.kind {
        Kind::Gray => raster.iter().map(|&v| scale(v)).collect::<Result<Vec<_>>>()?,
        Kind::Rgb => raster
            .chunks_exact(3)
            .map(|px| Ok(luminance(scale(px[0])?, scale(px[1])?, scale(px[2])?)))
            .collect::<Result<Vec<_>>>()?,
    };
    Frame::new(header.width, header.height, data)
}

/// Encodes a frame as binary PGM with maxval 255.
pub fn encode_pgm(frame: &Frame) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", frame.width(), frame.height());
    let mut out = Vec::with_capacity(header.len() + frame.data().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(frame.data());
    out
}
