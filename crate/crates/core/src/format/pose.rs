use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{from_line, Lines};
use crate::error::{Error, Result};
use crate::model::{body18, BoundingBox, Keypoint, PersonDetection, PoseFrame, PoseTrack};

const FORMAT_TAG: &str = "pose18";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    fps: f64,
    width: u32,
    height: u32,
    source_id: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WirePerson {
    bbox: Vec<f64>,
    kp: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireFrame {
    i: u64,
    persons: Vec<WirePerson>,
}

pub fn parse_pose_track(bytes: &[u8]) -> Result<PoseTrack> {
    read_pose_track(bytes)
}

/// Reads a pose track from JSONL: a header line followed by one line per frame.
pub fn read_pose_track<R: BufRead>(reader: R) -> Result<PoseTrack> {
    let mut lines = Lines::new(reader);
    let (line, text) = lines
        .next()
        .ok_or_else(|| Error::schema(1, "missing pose18 header line"))??;
    let header: Header = from_line(line, &text).map_err(|e| match e {
        Error::Parse { line, message } => Error::schema(line, format!("invalid header: {message}")),
        other => other,
    })?;
    if header.format != FORMAT_TAG {
        return Err(Error::schema(line, format!("expected format {FORMAT_TAG:?}, found {:?}", header.format)));
    }
    if !header.fps.is_finite() || header.fps <= 0.0 {
        return Err(Error::value(line, format!("fps must be positive, got {}", header.fps)));
    }
    if header.width == 0 || header.height == 0 {
        return Err(Error::value(line, "image dimensions must be positive"));
    }

    let mut frames: Vec<PoseFrame> = Vec::new();
    for item in lines {
        let (line, text) = item?;
        let wire: WireFrame = from_line(line, &text)?;
        if let Some(prev) = frames.last() {
            if wire.i <= prev.index {
                return Err(Error::ordering(
                    line,
                    format!("frame index {} does not follow {}", wire.i, prev.index),
                ));
            }
        }
        let persons = wire
            .persons
            .into_iter()
            .map(|p| person_from_wire(line, p))
            .collect::<Result<Vec<_>>>()?;
        for p in &persons {
            let outside = p.keypoints_outside_bbox();
            if outside > 0 {
                log::warn!(
                    "{}: line {line}: {outside} visible keypoint(s) outside the bounding box",
                    header.source_id
                );
            }
        }
        frames.push(PoseFrame { index: wire.i, persons });
    }

    PoseTrack::new(frames, header.fps, header.width, header.height, header.source_id)
}

fn person_from_wire(line: usize, p: WirePerson) -> Result<PersonDetection> {
    if p.kp.len() != body18::COUNT {
        return Err(Error::schema(
            line,
            format!("expected {} keypoints, found {}", body18::COUNT, p.kp.len()),
        ));
    }
    let &[x0, y0, x1, y1] = p.bbox.as_slice() else {
        return Err(Error::schema(line, format!("bbox needs 4 values, found {}", p.bbox.len())));
    };
    let bbox = BoundingBox::new(x0, y0, x1, y1).map_err(|e| Error::value(line, e.to_string()))?;

    let mut keypoints = [Keypoint { x: 0.0, y: 0.0, confidence: 0.0 }; body18::COUNT];
    for (slot, raw) in keypoints.iter_mut().zip(&p.kp) {
        let &[x, y, c] = raw.as_slice() else {
            return Err(Error::schema(line, format!("keypoint needs [x, y, c], found {} values", raw.len())));
        };
        *slot = Keypoint::new(x, y, c).map_err(|e| Error::value(line, e.to_string()))?;
    }
    Ok(PersonDetection::new(keypoints, bbox))
}

/// Writes the canonical JSONL form of a track.
pub fn write_pose_track<W: Write>(track: &PoseTrack, mut out: W) -> Result<()> {
    let header = Header {
        format: FORMAT_TAG.to_string(),
        fps: track.fps,
        width: track.image_width,
        height: track.image_height,
        source_id: track.source_id.clone(),
    };
    serde_json::to_writer(&mut out, &header).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    for frame in &track.frames {
        let wire = WireFrame {
            i: frame.index,
            persons: frame
                .persons
                .iter()
                .map(|p| WirePerson {
                    bbox: vec![p.bbox.x_min, p.bbox.y_min, p.bbox.x_max, p.bbox.y_max],
                    kp: p.keypoints.iter().map(|k| vec![k.x, k.y, k.confidence]).collect(),
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &wire).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
