//! Hand-gesture rock-paper-scissors engine.
//!
//! Webcam frames flow through a fixed pipeline:
//!
//! 1. **imaging** – background subtraction, grayscale, Otsu binarization,
//!    Sobel edges.
//! 2. **geometry** – gift-wrapping hull of the edge points, shoelace area,
//!    white-pixel count inside the hull, hull extent.
//! 3. **recognition** – white/total ratio and calibrated extent decide
//!    rock, paper or scissors.
//! 4. **game** – rounds, respect points, weighted opponent selection.
//!
//! [`session::Session`] ties the stages to one player's ordered stream of
//! frames and commands; [`i18n`] supplies localized text.

pub mod config;
pub mod game;
pub mod geometry;
pub mod i18n;
pub mod imaging;
pub mod pipeline;
pub mod pnm;
pub mod recognition;
pub mod session;
pub mod synthetic;
pub mod wire;

pub use geometry::{Hull, HullFeatures, Point};
pub use imaging::{BinaryImage, Frame, GrayImage, Histogram, Plane};
pub use recognition::{Gesture, GestureReading};
pub use session::{Command, FrameResult, FrameRole, GameSnapshot, Session, SessionOptions};
