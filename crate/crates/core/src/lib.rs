//! Background subtraction built on the robust local binary similarity
//! pattern (RLBSP) texture operator.
//!
//! The crate is split along the processing chain:
//!
//! * [`imageio`]: frames, netpbm codecs and CDnet-style sequence layouts.
//! * [`texture`]: the RLBSP operator and the LBP / SILTP / LBSP baselines.
//! * [`bgmodel`]: the per-pixel sample-consensus model combining intensity
//!   and texture samples.
//! * [`metrics`]: confusion counting against ground truth and the usual
//!   change-detection scores.
//! * [`synth`]: seeded synthetic scenes with exact ground truth.

pub mod bgmodel;
pub mod error;
pub mod imageio;
pub mod keyvalue;
pub mod metrics;
pub mod synth;
pub mod texture;

pub use bgmodel::{BackgroundModel, Mask, ModelParams, PixelSample, Subtractor};
pub use error::{Error, Result};
pub use imageio::{Frame, GroundTruthFrame, SequenceSource};
pub use metrics::{ConfusionCounts, MetricsReport};
pub use texture::{Descriptor16, DescriptorImage, Operator, RelativeThreshold, RlbspParams};
