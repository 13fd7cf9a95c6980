use std::path::Path;

use exr::prelude::*;

use super::{flip_rows, IoError};
use crate::types::ImageBuffer;

const LAYOUTS: [&[&str]; 4] = [&["Y"], &["R", "G"], &["R", "G", "B"], &["R", "G", "B", "A"]];

pub(super) fn write(image: &ImageBuffer, path: &Path) -> std::result::Result<(), IoError> {
    let (w, h, c) = (image.width(), image.height(), image.channels());
    let top_down = flip_rows(image);
    let channels: SmallVec<[AnyChannel<FlatSamples>; 4]> = LAYOUTS[c - 1]
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let plane: Vec<f32> = top_down.iter().skip(i).step_by(c).copied().collect();
            AnyChannel::new(*name, FlatSamples::F32(plane))
        })
        .collect();
    let layer = Layer::new((w, h), LayerAttributes::default(), Encoding::SMALL_LOSSLESS, AnyChannels::sort(channels));
    Image::from_layer(layer).write().to_file(path)?;
    Ok(())
}

pub(super) fn read(path: &Path) -> std::result::Result<ImageBuffer, IoError> {
    let image = read_first_flat_layer_from_file(path)?;
    let layer = image.layer_data;
    let (w, h) = (layer.size.width(), layer.size.height());
    let mut names: Vec<String> = layer.channel_data.list.iter().map(|ch| ch.name.to_string()).collect();
    names.sort();
    let layout = LAYOUTS
        .iter()
        .find(|l| {
            let mut want: Vec<&str> = l.to_vec();
            want.sort();
            want == names
        })
        .ok_or_else(|| IoError::UnsupportedLayout(format!("EXR channels {names:?}")))?;
    let c = layout.len();
    let mut data = vec![0.0f32; w * h * c];
    for (i, name) in layout.iter().enumerate() {
        let ch = layer.channel_data.list.iter().find(|ch| ch.name.to_string() == *name).expect("layout matched");
        let FlatSamples::F32(plane) = &ch.sample_data else {
            return Err(IoError::UnsupportedDepth(format!("EXR channel {name} is not 32-bit float")));
        };
        for (p, v) in plane.iter().enumerate() {
            data[p * c + i] = *v;
        }
    }
    let top_down = ImageBuffer::from_vec(w, h, c, data)?;
    Ok(ImageBuffer::from_vec(w, h, c, flip_rows(&top_down))?)
}
