//! CDnet directory layout:
//!
//! ```text
//! <seq>/input/in000001.jpg ...
//! <seq>/groundtruth/gt000001.png ...   (optional)
//! <seq>/temporalROI.txt                (optional, "first last")
//! <seq>/ROI.bmp                        (optional, nonzero = evaluate)
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::{load_frame, load_ground_truth, probe_dimensions, Frame, GroundTruthFrame};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameEntry {
    pub index: u32,
    pub path: PathBuf,
}

/// Inclusive range of frame indices that are scored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemporalWindow {
    pub first: u32,
    pub last: u32,
}

impl TemporalWindow {
    pub fn new(first: u32, last: u32) -> Result<Self> {
        if first > last {
            return Err(Error::InvalidSequence(format!(
                "temporal window {first}..{last} is empty"
            )));
        }
        Ok(TemporalWindow { first, last })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut it = text.split_whitespace().map(str::parse::<u32>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(first)), Some(Ok(last)), None) => Self::new(first, last),
            _ => Err(Error::InvalidSequence(format!(
                "temporal ROI must be two integers, got {text:?}"
            ))),
        }
    }

    #[inline]
    pub fn contains(&self, index: u32) -> bool {
        (self.first..=self.last).contains(&index)
    }
}

/// An ingested sequence directory. Immutable once built.
#[derive(Clone, Debug)]
pub struct SequenceSource {
    root: PathBuf,
    width: usize,
    height: usize,
    frames: Vec<FrameEntry>,
    ground_truth: Option<BTreeMap<u32, PathBuf>>,
    window: Option<TemporalWindow>,
    roi: Option<Frame>,
}

impl SequenceSource {
    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn frames(&self) -> &[FrameEntry] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn window(&self) -> Option<TemporalWindow> {
        self.window
    }

    pub fn roi(&self) -> Option<&Frame> {
        self.roi.as_ref()
    }

    pub fn has_ground_truth(&self) -> bool {
        self.ground_truth.is_some()
    }

    pub fn ground_truth_path(&self, index: u32) -> Option<&Path> {
        self.ground_truth.as_ref()?.get(&index).map(PathBuf::as_path)
    }

    pub fn load_ground_truth(&self, index: u32) -> Result<Option<GroundTruthFrame>> {
        match self.ground_truth_path(index) {
            None => Ok(None),
            Some(path) => {
                let gt = load_ground_truth(path)?;
                if gt.dims() != self.dims() {
                    return Err(Error::dimension_mismatch(self.dims(), gt.dims()));
                }
                Ok(Some(gt))
            }
        }
    }

    /// Decodes the frames in order, checking each against the sequence size.
    pub fn decode(&self) -> impl Iterator<Item = Result<(u32, Frame)>> + '_ {
        self.frames.iter().map(move |entry| {
            let frame = load_frame(&entry.path)?;
            frame.ensure_dims(self.dims())?;
            Ok((entry.index, frame))
        })
    }
}

/// Splits `in000123.jpg` into (`in`, 123). Returns `None` for other names.
fn numbered_file(path: &Path, prefix: &str) -> Option<u32> {
    let stem = path.file_stem()?.to_str()?;
    let digits = stem.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Files in `dir` named `<prefix><digits>.<ext>`, sorted by index.
pub fn list_numbered(dir: &Path, prefix: &str) -> Result<Vec<FrameEntry>> {
    let mut entries = Vec::new();
    for item in fs::read_dir(dir).map_err(|e| Error::unreadable(dir, e))? {
        let path = item?.path();
        if !path.is_file() {
            continue;
        }
        if let Some(index) = numbered_file(&path, prefix) {
            entries.push(FrameEntry { index, path });
        }
    }
    entries.sort_by_key(|e| e.index);
    if let Some(pair) = entries.windows(2).find(|w| w[0].index == w[1].index) {
        return Err(Error::InvalidSequence(format!(
            "duplicate frame index {} ({} and {})",
            pair[0].index,
            pair[0].path.display(),
            pair[1].path.display()
        )));
    }
    Ok(entries)
}

fn find_roi(root: &Path) -> Result<Option<PathBuf>> {
    let mut found = None;
    for item in fs::read_dir(root).map_err(|e| Error::unreadable(root, e))? {
        let path = item?.path();
        if path.is_file() && path.file_stem().and_then(|s| s.to_str()) == Some("ROI") {
            // Prefer lossless encodings when several copies exist.
            let lossless = matches!(
                path.extension().and_then(|e| e.to_str()),
                Some("bmp" | "png" | "pgm")
            );
            if found.is_none() || lossless {
                found = Some(path);
            }
        }
    }
    Ok(found)
}

/// Ingests a CDnet-style sequence directory.
pub fn load_sequence(root: impl AsRef<Path>) -> Result<SequenceSource> {
    let root = root.as_ref();
    let input = root.join("input");
    if !input.is_dir() {
        return Err(Error::unreadable(&input, "missing input/ directory"));
    }
    let frames = list_numbered(&input, "in")?;
    let first = frames.first().ok_or_else(|| Error::EmptySequence(input.clone()))?;
    let (width, height) = probe_dimensions(&first.path)?;
    for entry in &frames[1..] {
        let dims = probe_dimensions(&entry.path)?;
        if dims != (width, height) {
            return Err(Error::dimension_mismatch((width, height), dims));
        }
    }

    let gt_dir = root.join("groundtruth");
    let ground_truth = if gt_dir.is_dir() {
        Some(
            list_numbered(&gt_dir, "gt")?
                .into_iter()
                .map(|e| (e.index, e.path))
                .collect(),
        )
    } else {
        None
    };

    let window = match fs::read_to_string(root.join("temporalROI.txt")) {
        Ok(text) => {
            let window = TemporalWindow::parse(&text)?;
            let lo = frames[0].index;
            let hi = frames[frames.len() - 1].index;
            if window.first < lo || window.last > hi {
                return Err(Error::InvalidSequence(format!(
                    "temporal ROI {}..{} lies outside frames {lo}..{hi}",
                    window.first, window.last
                )));
            }
            Some(window)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(Error::unreadable(root.join("temporalROI.txt"), e)),
    };

    let roi = match find_roi(root)? {
        Some(path) => {
            let roi = load_frame(&path)?;
            roi.ensure_dims((width, height))?;
            Some(roi)
        }
        None => None,
    };

    Ok(SequenceSource {
        root: root.to_path_buf(),
        width,
        height,
        frames,
        ground_truth,
        window,
        roi,
    })
}
