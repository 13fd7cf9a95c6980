use std::fs::File;
use std::io::{BufReader, BufWriter, Seek, Write};
use std::path::Path;

use tiff::decoder::{Decoder, DecodingResult, Limits};
use tiff::encoder::colortype::{Gray32Float, RGB32Float, RGBA32Float};
use tiff::encoder::TiffEncoder;
use tiff::tags::ExtraSamples;
use tiff::ColorType;

use super::{flip_rows, IoError};
use crate::types::ImageBuffer;

pub(super) fn write(image: &ImageBuffer, path: &Path) -> Result<(), IoError> {
    let mut out = BufWriter::new(File::create(path)?);
    encode(image, &mut out)?;
    out.flush()?;
    Ok(())
}

fn encode<W: Write + Seek>(image: &ImageBuffer, out: &mut W) -> Result<(), IoError> {
    let (w, h) = (image.width() as u32, image.height() as u32);
    let data = flip_rows(image);
    let mut enc = TiffEncoder::new(out)?;
    match image.channels() {
        1 => enc.write_image::<Gray32Float>(w, h, &data)?,
        2 => {
            let mut img = enc.new_image::<Gray32Float>(w, h)?;
            img.extra_samples(&[ExtraSamples::Unspecified])?;
            img.write_data(&data)?;
        }
        3 => enc.write_image::<RGB32Float>(w, h, &data)?,
        _ => enc.write_image::<RGBA32Float>(w, h, &data)?,
    }
    Ok(())
}

pub(super) fn read(path: &Path) -> Result<ImageBuffer, IoError> {
    let mut dec = Decoder::new(BufReader::new(File::open(path)?))?.with_limits(Limits::unlimited());
    let (w, h) = dec.dimensions()?;
    let (channels, depth) = match dec.colortype()? {
        ColorType::Gray(d) => (1, d),
        ColorType::GrayA(d) => (2, d),
        ColorType::RGB(d) => (3, d),
        ColorType::RGBA(d) => (4, d),
        ColorType::Multiband { bit_depth, num_samples } => (num_samples as usize, bit_depth),
        other => return Err(IoError::UnsupportedLayout(format!("TIFF color type {other:?}"))),
    };
    if depth != 32 {
        return Err(IoError::UnsupportedDepth(format!("{depth}-bit TIFF samples")));
    }
    if !(1..=4).contains(&channels) {
        return Err(IoError::UnsupportedLayout(format!("{channels} TIFF samples per pixel")));
    }
    let data = match dec.read_image()? {
        DecodingResult::F32(v) => v,
        _ => return Err(IoError::UnsupportedDepth("32-bit integer TIFF samples".into())),
    };
    let top_down = ImageBuffer::from_vec(w as usize, h as usize, channels, data)?;
    Ok(ImageBuffer::from_vec(w as usize, h as usize, channels, flip_rows(&top_down))?)
}
