//! Frame upload message formats.
//!
//! Binary messages carry a 9-byte header followed by raw RGBA bytes:
//!
//! ```text
//! offset 0  u32 LE  width
//! offset 4  u32 LE  height
//! offset 8  u8      role (0 = background, 1 = live)
//! offset 9  width * height * 4 bytes, row-major RGBA
//! ```
//!
//! Text messages are JSON objects
//! `{"role": "live", "width": w, "height": h, "rgba": "<base64>"}`.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::imaging::Frame;
use crate::session::FrameRole;

pub const HEADER_LEN: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("message shorter than the {HEADER_LEN}-byte header")]
    ShortHeader,
    #[error("unknown frame role byte {0}")]
    BadRole(u8),
    #[error("payload is {actual} bytes, header announces {expected}")]
    PayloadSize { expected: usize, actual: usize },
    #[error("invalid JSON frame message: {0}")]
    Json(String),
    #[error("invalid base64 payload: {0}")]
    Base64(String),
}

pub fn encode_binary(frame: &Frame, role: FrameRole) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + frame.as_rgba().len());
    out.extend((frame.width() as u32).to_le_bytes());
    out.extend((frame.height() as u32).to_le_bytes());
    out.push(match role {
        FrameRole::Background => 0,
        FrameRole::Live => 1,
    });
    out.extend_from_slice(frame.as_rgba());
    out
}

pub fn decode_binary(bytes: &[u8]) -> Result<(Frame, FrameRole), WireError> {
    if bytes.len() < HEADER_LEN {
        return Err(WireError::ShortHeader);
    }
    let width = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let role = match bytes[8] {
        0 => FrameRole::Background,
        1 => FrameRole::Live,
        b => return Err(WireError::BadRole(b)),
    };
    let payload = &bytes[HEADER_LEN..];
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(4))
        .unwrap_or(usize::MAX);
    if payload.len() != expected {
        return Err(WireError::PayloadSize {
            expected,
            actual: payload.len(),
        });
    }
    let frame = Frame::from_rgba(width, height, payload.to_vec()).expect("size checked");
    Ok((frame, role))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonFrame {
    pub role: FrameRole,
    pub width: usize,
    pub height: usize,
    pub rgba: String,
}

pub fn encode_json(frame: &Frame, role: FrameRole) -> String {
    serde_json::to_string(&JsonFrame {
        role,
        width: frame.width(),
        height: frame.height(),
        rgba: STANDARD.encode(frame.as_rgba()),
    })
    .expect("frame message serializes")
}

pub fn decode_json(text: &str) -> Result<(Frame, FrameRole), WireError> {
    let msg: JsonFrame = serde_json::from_str(text).map_err(|e| WireError::Json(e.to_string()))?;
    let rgba = STANDARD
        .decode(msg.rgba.as_bytes())
        .map_err(|e| WireError::Base64(e.to_string()))?;
    let expected = msg.width * msg.height * 4;
    if rgba.len() != expected {
        return Err(WireError::PayloadSize {
            expected,
            actual: rgba.len(),
        });
    }
    let frame = Frame::from_rgba(msg.width, msg.height, rgba).expect("size checked");
    Ok((frame, msg.role))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_layout() {
        let frame = Frame::from_rgba(2, 1, vec![1, 2, 3, 4, 5, 6, 7, 8]).unwrap();
        let bytes = encode_binary(&frame, FrameRole::Live);
        assert_eq!(&bytes[..HEADER_LEN], &[2, 0, 0, 0, 1, 0, 0, 0, 1]);
        assert_eq!(&bytes[HEADER_LEN..], &[1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn binary_errors() {
        assert_eq!(decode_binary(&[0; 4]), Err(WireError::ShortHeader));
        assert_eq!(
            decode_binary(&[1, 0, 0, 0, 1, 0, 0, 0, 7, 0, 0, 0, 0]),
            Err(WireError::BadRole(7))
        );
        assert_eq!(
            decode_binary(&[1, 0, 0, 0, 1, 0, 0, 0, 0, 9]),
            Err(WireError::PayloadSize {
                expected: 4,
                actual: 1
            })
        );
    }

    #[test]
    fn json_errors() {
        assert!(matches!(decode_json("{}"), Err(WireError::Json(_))));
        let bad = r#"{"role":"live","width":1,"height":1,"rgba":"AAA"}"#;
        assert!(matches!(decode_json(bad), Err(WireError::Base64(_))));
        let short = r#"{"role":"background","width":2,"height":1,"rgba":"AAAAAA=="}"#;
        assert!(matches!(
            decode_json(short),
            Err(WireError::PayloadSize { .. })
        ));
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(
            w in 1usize..6,
            h in 1usize..6,
            live in any::<bool>(),
            fill in any::<u8>(),
        ) {
            let rgba: Vec<u8> = (0..w * h * 4).map(|i| fill.wrapping_add(i as u8)).collect();
            let frame = Frame::from_rgba(w, h, rgba).unwrap();
            let role = if live { FrameRole::Live } else { FrameRole::Background };
            prop_assert_eq!(decode_binary(&encode_binary(&frame, role)).unwrap(), (frame.clone(), role));
            prop_assert_eq!(decode_json(&encode_json(&frame, role)).unwrap(), (frame, role));
        }
    }
}
