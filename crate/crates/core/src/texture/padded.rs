use crate::imageio::Frame;

/// Copy of a frame with `PAD` edge-replicated pixels on every side, so the
/// whole-frame operators can index neighbors without bounds checks.
pub(crate) struct Padded {
    pub stride: usize,
    pub data: Vec<u8>,
}

pub(crate) const PAD: usize = 3;

impl Padded {
    pub fn new(frame: &Frame) -> Self {
        let (w, h) = frame.dims();
        let stride = w + 2 * PAD;
        let mut data = Vec::with_capacity(stride * (h + 2 * PAD));
        for py in 0..h + 2 * PAD {
            let y = py.saturating_sub(PAD).min(h - 1);
            let row = &frame.data()[y * w..(y + 1) * w];
            data.extend(std::iter::repeat_n(row[0], PAD));
            data.extend_from_slice(row);
            data.extend(std::iter::repeat_n(row[w - 1], PAD));
        }
        Padded { stride, data }
    }

    /// Buffer index of frame pixel (x, y).
    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        (y + PAD) * self.stride + x + PAD
    }

    /// Relative buffer offset of a (dx, dy) displacement.
    #[inline]
    pub fn offset(&self, dx: isize, dy: isize) -> isize {
        dy * self.stride as isize + dx
    }
}
