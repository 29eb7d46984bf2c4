//! Seeded synthetic scenes: a uniform background, optionally modulated by a
//! multiplicative sinusoid and corrupted by Gaussian noise, with a moving
//! square as the only foreground. Ground truth is exact by construction.

use std::f64::consts::TAU;
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::imageio::{write_pgm, Frame, GroundTruthFrame, Label};
use crate::keyvalue;

/// Multiplicative modulation `I·(1 + amplitude·sin(2π(t/period + x/wavelength)))`.
/// A zero wavelength makes the whole frame flicker in phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flicker {
    pub amplitude: f64,
    /// Frames per cycle.
    pub period: f64,
    /// Pixels per spatial cycle along x; 0 for global flicker.
    pub wavelength: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Square {
    pub side: usize,
    /// Top-left corner in the frame the square first appears.
    pub x: i64,
    pub y: i64,
    /// Displacement per frame.
    pub vx: i64,
    pub vy: i64,
    pub intensity: u8,
    /// First frame (0-based) showing the square; earlier frames are empty.
    pub appear_at: usize,
}

impl Square {
    /// Top-left corner at frame `t`, or `None` before the square appears.
    pub fn position(&self, t: usize) -> Option<(i64, i64)> {
        let dt = t.checked_sub(self.appear_at)? as i64;
        Some((self.x + self.vx * dt, self.y + self.vy * dt))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSceneSpec {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    pub background: u8,
    pub flicker: Option<Flicker>,
    /// Standard deviation of additive per-pixel noise, in intensity units.
    pub noise_sigma: f64,
    pub square: Option<Square>,
    /// First scored frame (0-based); written as the temporal ROI.
    pub eval_from: usize,
}

impl Default for SyntheticSceneSpec {
    fn default() -> Self {
        SyntheticSceneSpec {
            width: 160,
            height: 120,
            frames: 100,
            seed: 1,
            background: 80,
            flicker: None,
            noise_sigma: 0.0,
            square: None,
            eval_from: 0,
        }
    }
}

impl SyntheticSceneSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if self.width == 0 || self.height == 0 || self.frames == 0 {
            return fail("scene needs a non-zero width, height and frame count".into());
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return fail(format!("noise sigma {} must be >= 0", self.noise_sigma));
        }
        if self.eval_from >= self.frames {
            return fail(format!(
                "eval_from {} is past the last frame {}",
                self.eval_from,
                self.frames - 1
            ));
        }
        if let Some(f) = &self.flicker {
            if !(f.amplitude.is_finite() && (0.0..=1.0).contains(&f.amplitude)) {
                return fail(format!("flicker amplitude {} must lie in [0, 1]", f.amplitude));
            }
            if !(f.period.is_finite() && f.period > 0.0) {
                return fail(format!("flicker period {} must be > 0", f.period));
            }
            if !(f.wavelength.is_finite() && f.wavelength >= 0.0) {
                return fail(format!("flicker wavelength {} must be >= 0", f.wavelength));
            }
        }
        if let Some(sq) = &self.square {
            if sq.side == 0 {
                return fail("square side must be positive".into());
            }
            // Straight-line motion: checking the first and last frames suffices.
            if sq.appear_at < self.frames {
                for t in [sq.appear_at, self.frames - 1] {
                    let (x, y) = sq.position(t).expect("t >= appear_at");
                    let inside = x >= 0
                        && y >= 0
                        && x + sq.side as i64 <= self.width as i64
                        && y + sq.side as i64 <= self.height as i64;
                    if !inside {
                        return fail(format!(
                            "square leaves the {}x{} frame at frame {t} (top-left {x},{y})",
                            self.width, self.height
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Noise-free, unclipped background intensity at frame `t`, column `x`.
    pub fn background_level(&self, t: usize, x: usize) -> f64 {
        let base = self.background as f64;
        match &self.flicker {
            None => base,
            Some(f) => {
                let spatial = if f.wavelength > 0.0 {
                    x as f64 / f.wavelength
                } else {
                    0.0
                };
                base * (1.0 + f.amplitude * (TAU * (t as f64 / f.period + spatial)).sin())
            }
        }
    }

    /// Parses the `key=value` scene format; unspecified keys keep defaults.
    ///
    /// Keys: `width height frames seed background noise_sigma eval_from`,
    /// `flicker_amplitude flicker_period flicker_wavelength` (flicker is on
    /// when an amplitude is given), and `square_side square_x square_y
    /// square_vx square_vy square_intensity square_appear` (the square is on
    /// when a side is given).
    pub fn from_key_values(text: &str) -> Result<Self> {
        use keyvalue::parse_value as val;

        let mut spec = SyntheticSceneSpec::default();
        let mut flicker = Flicker {
            amplitude: 0.0,
            period: 25.0,
            wavelength: 0.0,
        };
        let mut has_flicker = false;
        let mut square = Square {
            side: 0,
            x: 0,
            y: 0,
            vx: 0,
            vy: 0,
            intensity: 255,
            appear_at: 0,
        };
        let mut has_square = false;
        for (k, v) in keyvalue::parse(text)? {
            let k = k.as_str();
            match k {
                "width" => spec.width = val(k, &v)?,
                "height" => spec.height = val(k, &v)?,
                "frames" => spec.frames = val(k, &v)?,
                "seed" => spec.seed = val(k, &v)?,
                "background" => spec.background = val(k, &v)?,
                "noise_sigma" => spec.noise_sigma = val(k, &v)?,
                "eval_from" => spec.eval_from = val(k, &v)?,
                "flicker_amplitude" => {
                    flicker.amplitude = val(k, &v)?;
                    has_flicker = true;
                }
                "flicker_period" => flicker.period = val(k, &v)?,
                "flicker_wavelength" => flicker.wavelength = val(k, &v)?,
                "square_side" => {
                    square.side = val(k, &v)?;
                    has_square = true;
                }
                "square_x" => square.x = val(k, &v)?,
                "square_y" => square.y = val(k, &v)?,
                "square_vx" => square.vx = val(k, &v)?,
                "square_vy" => square.vy = val(k, &v)?,
                "square_intensity" => square.intensity = val(k, &v)?,
                "square_appear" => square.appear_at = val(k, &v)?,
                other => {
                    return Err(Error::InvalidParams(format!("unknown scene key {other:?}")))
                }
            }
        }
        spec.flicker = has_flicker.then_some(flicker);
        spec.square = has_square.then_some(square);
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_key_values(&self) -> String {
        let mut out = format!(
            "width={}\nheight={}\nframes={}\nseed={}\nbackground={}\nnoise_sigma={}\neval_from={}\n",
            self.width,
            self.height,
            self.frames,
            self.seed,
            self.background,
            self.noise_sigma,
            self.eval_from
        );
        if let Some(f) = &self.flicker {
            out += &format!(
                "flicker_amplitude={}\nflicker_period={}\nflicker_wavelength={}\n",
                f.amplitude, f.period, f.wavelength
            );
        }
        if let Some(s) = &self.square {
            out += &format!(
                "square_side={}\nsquare_x={}\nsquare_y={}\nsquare_vx={}\nsquare_vy={}\nsquare_intensity={}\nsquare_appear={}\n",
                s.side, s.x, s.y, s.vx, s.vy, s.intensity, s.appear_at
            );
        }
        out
    }

    /// Frame generator for this scene.
    pub fn generate(&self) -> Result<SyntheticScene<'_>> {
        self.validate()?;
        Ok(SyntheticScene {
            spec: self,
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            noise: Normal::new(0.0, self.noise_sigma)
                .map_err(|e| Error::InvalidParams(e.to_string()))?,
            t: 0,
        })
    }
}

/// Yields `(frame, ground truth)` for each frame of a scene.
pub struct SyntheticScene<'a> {
    spec: &'a SyntheticSceneSpec,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
    t: usize,
}

impl Iterator for SyntheticScene<'_> {
    type Item = (Frame, GroundTruthFrame);

    fn next(&mut self) -> Option<Self::Item> {
        let spec = self.spec;
        if self.t >= spec.frames {
            return None;
        }
        let t = self.t;
        self.t += 1;

        let (w, h) = (spec.width, spec.height);
        let square = spec.square.and_then(|sq| sq.position(t).map(|p| (sq, p)));
        let inside = |x: usize, y: usize| {
            square.is_some_and(|(sq, (sx, sy))| {
                let (x, y) = (x as i64, y as i64);
                x >= sx && x < sx + sq.side as i64 && y >= sy && y < sy + sq.side as i64
            })
        };

        let mut data = Vec::with_capacity(w * h);
        let mut labels = Vec::with_capacity(w * h);
        for y in 0..h {
            for x in 0..w {
                let (clean, label) = match square {
                    Some((sq, _)) if inside(x, y) => (sq.intensity as f64, Label::MOTION),
                    _ => (spec.background_level(t, x), Label::STATIC),
                };
                let noisy = if spec.noise_sigma > 0.0 {
                    clean + self.noise.sample(&mut self.rng)
                } else {
                    clean
                };
                data.push(noisy.round().clamp(0.0, 255.0) as u8);
                labels.push(label);
            }
        }
        let frame = Frame::new(w, h, data).expect("sized buffer");
        let gt = GroundTruthFrame::new(w, h, labels).expect("valid labels");
        Some((frame, gt))
    }
}

/// Writes the scene in CDnet layout: `input/in%06d.pgm`,
/// `groundtruth/gt%06d.pgm` (1-based) and `temporalROI.txt`.
pub fn write_sequence(spec: &SyntheticSceneSpec, out: impl AsRef<Path>) -> Result<()> {
    let out = out.as_ref();
    let input = out.join("input");
    let gt_dir = out.join("groundtruth");
    fs::create_dir_all(&input)?;
    fs::create_dir_all(&gt_dir)?;
    for (t, (frame, gt)) in spec.generate()?.enumerate() {
        let id = t + 1;
        write_pgm(&frame, input.join(format!("in{id:06}.pgm")))?;
        let (gw, gh) = gt.dims();
        let gt_frame = Frame::new(gw, gh, gt.labels().to_vec())?;
        write_pgm(&gt_frame, gt_dir.join(format!("gt{id:06}.pgm")))?;
    }
    fs::write(
        out.join("temporalROI.txt"),
        format!("{} {}\n", spec.eval_from + 1, spec.frames),
    )?;
    Ok(())
}
