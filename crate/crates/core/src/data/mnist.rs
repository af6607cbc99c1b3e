//! MNIST IDX ingestion: big-endian headers, raw pixel payloads, strict
//! length checks with byte offsets in every error.

use std::io::Cursor;
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

/// One labelled image with pixels scaled to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct MnistImage {
    pub pixels: Vec<f64>,
    pub label: u8,
}

fn parse_error(offset: u64, message: impl Into<String>) -> Error {
    Error::ParseError {
        offset,
        message: message.into(),
    }
}

fn read_u32(cursor: &mut Cursor<&[u8]>, what: &str) -> Result<u32> {
    let offset = cursor.position();
    cursor
        .read_u32::<BigEndian>()
        .map_err(|_| parse_error(offset, format!("file truncated while reading {what}")))
}

/// Parses an IDX image file (`magic 0x00000803`, counts and dimensions
/// big-endian, one byte per pixel). Trailing bytes are rejected.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(Vec<Vec<f64>>, usize, usize)> {
    let mut cursor = Cursor::new(bytes);
    let magic = read_u32(&mut cursor, "image magic number")?;
    if magic != IMAGES_MAGIC {
        return Err(parse_error(
            0,
            format!("bad image magic number {magic:#010x}, expected {IMAGES_MAGIC:#010x}"),
        ));
    }
    let count = read_u32(&mut cursor, "image count")? as usize;
    let rows = read_u32(&mut cursor, "row count")? as usize;
    let cols = read_u32(&mut cursor, "column count")? as usize;
    let pixel_count = rows
        .checked_mul(cols)
        .and_then(|p| p.checked_mul(count))
        .ok_or_else(|| parse_error(4, "image dimensions overflow".to_string()))?;
    let payload_start = cursor.position() as usize;
    let available = bytes.len() - payload_start;
    if available < pixel_count {
        return Err(parse_error(
            (payload_start + available) as u64,
            format!("file truncated: expected {pixel_count} pixel bytes, found {available}"),
        ));
    }
    if available > pixel_count {
        return Err(parse_error(
            (payload_start + pixel_count) as u64,
            format!(
                "{} trailing bytes after pixel payload",
                available - pixel_count
            ),
        ));
    }
    let mut images = Vec::with_capacity(count);
    for i in 0..count {
        let start = payload_start + i * rows * cols;
        let image = bytes[start..start + rows * cols]
            .iter()
            .map(|&b| b as f64 / 255.0)
            .collect();
        images.push(image);
    }
    Ok((images, rows, cols))
}

/// Parses an IDX label file (`magic 0x00000801`).
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut cursor = Cursor::new(bytes);
    let magic = read_u32(&mut cursor, "label magic number")?;
    if magic != LABELS_MAGIC {
        return Err(parse_error(
            0,
            format!("bad label magic number {magic:#010x}, expected {LABELS_MAGIC:#010x}"),
        ));
    }
    let count = read_u32(&mut cursor, "label count")? as usize;
    let payload_start = cursor.position() as usize;
    let available = bytes.len() - payload_start;
    if available < count {
        return Err(parse_error(
            (payload_start + available) as u64,
            format!("file truncated: expected {count} label bytes, found {available}"),
        ));
    }
    if available > count {
        return Err(parse_error(
            (payload_start + count) as u64,
            format!("{} trailing bytes after label payload", available - count),
        ));
    }
    Ok(bytes[payload_start..payload_start + count].to_vec())
}

/// Loads an image/label IDX pair, checking that the counts match.
pub fn load_mnist_idx(images_path: &Path, labels_path: &Path) -> Result<Vec<MnistImage>> {
    let image_bytes = std::fs::read(images_path)?;
    let (images, _, _) = parse_idx_images(&image_bytes)?;
    let label_bytes = std::fs::read(labels_path)?;
    let labels = parse_idx_labels(&label_bytes)?;
    if images.len() != labels.len() {
        return Err(parse_error(
            4,
            format!(
                "image count {} does not match label count {}",
                images.len(),
                labels.len()
            ),
        ));
    }
    Ok(images
        .into_iter()
        .zip(labels)
        .map(|(pixels, label)| MnistImage { pixels, label })
        .collect())
}

/// Writes images (pixels in `[0, 1]`) as an IDX file.
pub fn write_idx_images(path: &Path, images: &[Vec<f64>], rows: usize, cols: usize) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + images.len() * rows * cols);
    bytes
        .write_u32::<BigEndian>(IMAGES_MAGIC)
        .expect("vec write");
    bytes
        .write_u32::<BigEndian>(images.len() as u32)
        .expect("vec write");
    bytes
        .write_u32::<BigEndian>(rows as u32)
        .expect("vec write");
    bytes
        .write_u32::<BigEndian>(cols as u32)
        .expect("vec write");
    for image in images {
        if image.len() != rows * cols {
            return Err(Error::shape(format!(
                "image has {} pixels, expected {}",
                image.len(),
                rows * cols
            )));
        }
        bytes.extend(
            image
                .iter()
                .map(|&p| (p.clamp(0.0, 1.0) * 255.0).round() as u8),
        );
    }
    std::fs::write(path, bytes)?;
    Ok(())
}

/// Writes labels as an IDX file.
pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + labels.len());
    bytes
        .write_u32::<BigEndian>(LABELS_MAGIC)
        .expect("vec write");
    bytes
        .write_u32::<BigEndian>(labels.len() as u32)
        .expect("vec write");
    bytes.extend_from_slice(labels);
    std::fs::write(path, bytes)?;
    Ok(())
}
