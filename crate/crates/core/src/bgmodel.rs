//! Sample-consensus background model over (intensity, descriptor) samples.
//!
//! Every pixel keeps a bank of `N` samples. A pixel is background when at
//! least `#min` samples are within `Rc` in intensity and within `Rt` in
//! descriptor Hamming distance, both strictly. Background pixels feed their
//! current sample back into their own bank and into a random neighbor's bank,
//! each with probability `1/φ`; foreground pixels never touch the model.
//!
//! Randomness comes from ChaCha8 seeded with [`rand_chacha::ChaCha8Rng::seed_from_u64`],
//! so a `(sequence, params, seed)` triple reproduces masks on every platform.
//! Uniform draws use `random_range`; "`rand() % φ == 0`" is a draw on
//! `[0, φ)` compared to zero.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imageio::{Frame, SequenceSource};
use crate::texture::{Descriptor16, DescriptorImage, Operator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelParams {
    /// Samples per pixel, `N`.
    pub samples: usize,
    /// Matches needed to call a pixel background, `#min`.
    pub min_matches: usize,
    /// Intensity L1 radius `Rc`; a match needs a distance strictly below it.
    pub color_radius: u32,
    /// Descriptor Hamming radius `Rt`; a match needs a distance strictly below it.
    pub texture_radius: u32,
    /// Update subsampling factor `φ`.
    pub subsampling: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            samples: 50,
            min_matches: 2,
            color_radius: 15,
            texture_radius: 5,
            subsampling: 16,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.min_matches < 1 {
            return fail("min_matches must be at least 1".into());
        }
        if self.samples < self.min_matches {
            return fail(format!(
                "samples ({}) must be at least min_matches ({})",
                self.samples, self.min_matches
            ));
        }
        if self.samples > u32::MAX as usize {
            return fail(format!("samples ({}) is too large", self.samples));
        }
        if self.color_radius > 255 {
            return fail(format!("color radius {} exceeds 255", self.color_radius));
        }
        if self.texture_radius > 16 {
            return fail(format!("texture radius {} exceeds 16", self.texture_radius));
        }
        if self.subsampling < 1 {
            return fail("subsampling factor must be at least 1".into());
        }
        Ok(())
    }
}

/// One background sample `F = (I, descriptor)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PixelSample {
    pub intensity: u8,
    pub descriptor: Descriptor16,
}

impl PixelSample {
    /// Intensity distance below `Rc` and descriptor distance below `Rt`.
    #[inline]
    pub fn matches(&self, observed: &PixelSample, params: &ModelParams) -> bool {
        (self.intensity.abs_diff(observed.intensity) as u32) < params.color_radius
            && self.descriptor.hamming(observed.descriptor) < params.texture_radius
    }
}

pub fn matches(sample: &PixelSample, observed: &PixelSample, params: &ModelParams) -> bool {
    sample.matches(observed, params)
}

/// Binary segmentation: 0 = background, 255 = foreground.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mask(Frame);

impl Mask {
    pub const BACKGROUND: u8 = 0;
    pub const FOREGROUND: u8 = 255;

    pub fn all_background(width: usize, height: usize) -> Self {
        Mask(Frame::filled(width, height, Self::BACKGROUND))
    }

    pub fn from_frame(frame: Frame) -> Result<Self> {
        if let Some(&bad) = frame.data().iter().find(|&&v| v != 0 && v != 255) {
            return Err(Error::InvalidMaskValue(bad));
        }
        Ok(Mask(frame))
    }

    pub fn as_frame(&self) -> &Frame {
        &self.0
    }

    pub fn into_frame(self) -> Frame {
        self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    #[inline]
    pub fn is_foreground(&self, index: usize) -> bool {
        self.0.data()[index] == Self::FOREGROUND
    }

    pub fn foreground_count(&self) -> usize {
        self.0.data().iter().filter(|&&v| v == Self::FOREGROUND).count()
    }
}

/// Neighbor update targets: the 8-neighborhood without the pixel itself.
const NEIGHBORS8: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

const SNAPSHOT_MAGIC: &[u8; 8] = b"RLBSPBGM";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct BackgroundModel {
    width: usize,
    height: usize,
    samples_per_pixel: usize,
    seed: u64,
    /// `samples_per_pixel` consecutive samples per pixel, pixels row-major.
    bank: Vec<PixelSample>,
    rng: ChaCha8Rng,
}

impl PartialEq for BackgroundModel {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.samples_per_pixel == other.samples_per_pixel
            && self.seed == other.seed
            && self.bank == other.bank
            && self.rng == other.rng
    }
}

impl Eq for BackgroundModel {}

fn ensure_dims(expected: (usize, usize), got: (usize, usize)) -> Result<()> {
    if expected != got {
        return Err(Error::dimension_mismatch(expected, got));
    }
    Ok(())
}

#[inline]
fn clamp_step(v: usize, step: isize, len: usize) -> usize {
    (v as isize + step).clamp(0, len as isize - 1) as usize
}

impl BackgroundModel {
    /// Fills every bank with samples copied from uniformly drawn positions of
    /// the pixel's 3×3 neighborhood (itself included, clamped at borders).
    pub fn init(
        frame: &Frame,
        descriptors: &DescriptorImage,
        params: &ModelParams,
        seed: u64,
    ) -> Result<Self> {
        params.validate()?;
        frame.ensure_operator_support()?;
        ensure_dims(frame.dims(), descriptors.dims())?;

        let (w, h) = frame.dims();
        let n = params.samples;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut bank = Vec::with_capacity(w * h * n);
        for y in 0..h {
            for x in 0..w {
                for _ in 0..n {
                    let sx = clamp_step(x, rng.random_range(0..3i32) as isize - 1, w);
                    let sy = clamp_step(y, rng.random_range(0..3i32) as isize - 1, h);
                    bank.push(PixelSample {
                        intensity: frame.get(sx, sy),
                        descriptor: descriptors.get(sx, sy),
                    });
                }
            }
        }
        Ok(BackgroundModel {
            width: w,
            height: h,
            samples_per_pixel: n,
            seed,
            bank,
            rng,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn samples_per_pixel(&self) -> usize {
        self.samples_per_pixel
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The sample bank of pixel (x, y).
    pub fn samples(&self, x: usize, y: usize) -> &[PixelSample] {
        let start = (y * self.width + x) * self.samples_per_pixel;
        &self.bank[start..start + self.samples_per_pixel]
    }

    fn check_inputs(
        &self,
        frame: &Frame,
        descriptors: &DescriptorImage,
        params: &ModelParams,
    ) -> Result<()> {
        params.validate()?;
        if params.samples != self.samples_per_pixel {
            return Err(Error::InvalidParams(format!(
                "model holds {} samples per pixel, params say {}",
                self.samples_per_pixel, params.samples
            )));
        }
        ensure_dims(self.dims(), frame.dims())?;
        ensure_dims(self.dims(), descriptors.dims())
    }

    /// Labels each pixel, scanning its samples in index order and stopping as
    /// soon as `#min` of them match. Does not modify the model.
    pub fn classify(
        &self,
        frame: &Frame,
        descriptors: &DescriptorImage,
        params: &ModelParams,
    ) -> Result<Mask> {
        self.check_inputs(frame, descriptors, params)?;
        let n = self.samples_per_pixel;
        let labels = frame
            .data()
            .iter()
            .zip(descriptors.data())
            .zip(self.bank.chunks_exact(n))
            .map(|((&intensity, &descriptor), bank)| {
                let observed = PixelSample {
                    intensity,
                    descriptor,
                };
                let mut found = 0;
                for sample in bank {
                    if sample.matches(&observed, params) {
                        found += 1;
                        if found >= params.min_matches {
                            return Mask::BACKGROUND;
                        }
                    }
                }
                Mask::FOREGROUND
            })
            .collect();
        Ok(Mask(Frame::new(self.width, self.height, labels)?))
    }

    /// Stochastic conservative update, applied in row-major pixel order.
    ///
    /// Per background pixel: with probability `1/φ` a random slot of its own
    /// bank takes the current sample; independently, with probability `1/φ`,
    /// a random slot of a random 8-neighbor's bank (clamped at borders) does.
    pub fn update(
        &mut self,
        frame: &Frame,
        descriptors: &DescriptorImage,
        mask: &Mask,
        params: &ModelParams,
    ) -> Result<()> {
        self.check_inputs(frame, descriptors, params)?;
        ensure_dims(self.dims(), mask.dims())?;
        let (w, h) = self.dims();
        let n = self.samples_per_pixel;
        let phi = params.subsampling;
        for y in 0..h {
            for x in 0..w {
                let p = y * w + x;
                if mask.is_foreground(p) {
                    continue;
                }
                let current = PixelSample {
                    intensity: frame.data()[p],
                    descriptor: descriptors.data()[p],
                };
                if self.rng.random_range(0..phi) == 0 {
                    let slot = self.rng.random_range(0..n);
                    self.bank[p * n + slot] = current;
                }
                if self.rng.random_range(0..phi) == 0 {
                    let (dx, dy) = NEIGHBORS8[self.rng.random_range(0..8)];
                    let q = clamp_step(y, dy, h) * w + clamp_step(x, dx, w);
                    let slot = self.rng.random_range(0..n);
                    self.bank[q * n + slot] = current;
                }
            }
        }
        Ok(())
    }

    /// Serializes the model and its generator state.
    ///
    /// Layout (little-endian): magic `RLBSPBGM`, version u32, width u32,
    /// height u32, samples u32, seed u64; then per pixel (row-major) and per
    /// sample one intensity byte and a u16 descriptor; then the generator's
    /// 32-byte key, stream u64 and word position u128.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(SNAPSHOT_MAGIC)?;
        out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        for v in [self.width, self.height, self.samples_per_pixel] {
            out.write_all(&(v as u32).to_le_bytes())?;
        }
        out.write_all(&self.seed.to_le_bytes())?;
        let mut records = Vec::with_capacity(self.bank.len() * 3);
        for s in &self.bank {
            records.push(s.intensity);
            records.extend_from_slice(&s.descriptor.0.to_le_bytes());
        }
        out.write_all(&records)?;
        out.write_all(&self.rng.get_seed())?;
        out.write_all(&self.rng.get_stream().to_le_bytes())?;
        out.write_all(&self.rng.get_word_pos().to_le_bytes())?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut input: R) -> Result<Self> {
        fn take<const K: usize>(r: &mut impl Read) -> Result<[u8; K]> {
            let mut buf = [0u8; K];
            r.read_exact(&mut buf)
                .map_err(|e| Error::Snapshot(format!("truncated snapshot: {e}")))?;
            Ok(buf)
        }

        if &take::<8>(&mut input)? != SNAPSHOT_MAGIC {
            return Err(Error::Snapshot("bad magic".into()));
        }
        let version = u32::from_le_bytes(take(&mut input)?);
        if version != SNAPSHOT_VERSION {
            return Err(Error::Snapshot(format!("unsupported version {version}")));
        }
        let width = u32::from_le_bytes(take(&mut input)?) as usize;
        let height = u32::from_le_bytes(take(&mut input)?) as usize;
        let samples = u32::from_le_bytes(take(&mut input)?) as usize;
        let seed = u64::from_le_bytes(take(&mut input)?);
        if width == 0 || height == 0 || samples == 0 {
            return Err(Error::Snapshot("zero-sized model".into()));
        }
        let count = width
            .checked_mul(height)
            .and_then(|v| v.checked_mul(samples))
            .ok_or_else(|| Error::Snapshot("model size overflows".into()))?;

        let mut records = vec![0u8; count * 3];
        input
            .read_exact(&mut records)
            .map_err(|e| Error::Snapshot(format!("truncated sample records: {e}")))?;
        let bank = records
            .chunks_exact(3)
            .map(|r| PixelSample {
                intensity: r[0],
                descriptor: Descriptor16(u16::from_le_bytes([r[1], r[2]])),
            })
            .collect();

        let mut rng = ChaCha8Rng::from_seed(take(&mut input)?);
        rng.set_stream(u64::from_le_bytes(take(&mut input)?));
        rng.set_word_pos(u128::from_le_bytes(take(&mut input)?));

        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(Error::Snapshot("trailing bytes".into()));
        }
        Ok(BackgroundModel {
            width,
            height,
            samples_per_pixel: samples,
            seed,
            bank,
            rng,
        })
    }
}

/// Descriptor extraction plus the model, driven one frame at a time.
///
/// The first frame initializes the model and yields an all-background mask;
/// every later frame is classified and then used to update the model.
#[derive(Clone, Debug)]
pub struct Subtractor {
    operator: Operator,
    params: ModelParams,
    seed: u64,
    model: Option<BackgroundModel>,
}

impl Subtractor {
    pub fn new(operator: Operator, params: ModelParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Subtractor {
            operator,
            params,
            seed,
            model: None,
        })
    }

    /// Resumes from a saved model.
    pub fn with_model(operator: Operator, params: ModelParams, model: BackgroundModel) -> Result<Self> {
        params.validate()?;
        if params.samples != model.samples_per_pixel() {
            return Err(Error::InvalidParams(format!(
                "model holds {} samples per pixel, params say {}",
                model.samples_per_pixel(),
                params.samples
            )));
        }
        Ok(Subtractor {
            operator,
            params,
            seed: model.seed(),
            model: Some(model),
        })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn model(&self) -> Option<&BackgroundModel> {
        self.model.as_ref()
    }

    pub fn process(&mut self, frame: &Frame) -> Result<Mask> {
        let descriptors = self.operator.describe_frame(frame)?;
        match &mut self.model {
            None => {
                self.model = Some(BackgroundModel::init(
                    frame,
                    &descriptors,
                    &self.params,
                    self.seed,
                )?);
                Ok(Mask::all_background(frame.width(), frame.height()))
            }
            Some(model) => {
                let mask = model.classify(frame, &descriptors, &self.params)?;
                model.update(frame, &descriptors, &mask, &self.params)?;
                Ok(mask)
            }
        }
    }
}

/// Runs a subtractor over every frame of `source`, yielding `(index, mask)`.
pub fn process_sequence<'a>(
    source: &'a SequenceSource,
    operator: Operator,
    params: ModelParams,
    seed: u64,
) -> Result<impl Iterator<Item = Result<(u32, Mask)>> + 'a> {
    let mut subtractor = Subtractor::new(operator, params, seed)?;
    Ok(source.decode().map(move |item| {
        let (index, frame) = item?;
        Ok((index, subtractor.process(&frame)?))
    }))
}
