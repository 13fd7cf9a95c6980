use anyhow::{bail, Context, Result};

/// Opacity specification for `blend`: one value or linearly interpolated
/// keyframes.
#[derive(Debug, Clone, PartialEq)]
pub enum Opacity {
    Constant(f64),
    Keyframes(Vec<(u32, f64)>),
}

fn opacity_value(text: &str) -> Result<f64> {
    let x: f64 = text.trim().parse().with_context(|| format!("`{text}` is not a number"))?;
    if !(0.0..=1.0).contains(&x) {
        bail!("opacity {x} outside [0, 1]");
    }
    Ok(x)
}

impl Opacity {
    pub fn parse(text: &str) -> Result<Self> {
        if !text.contains(':') {
            return Ok(Opacity::Constant(opacity_value(text)?));
        }
        let mut keys = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (frame, value) = item.split_once(':').with_context(|| format!("keyframe `{item}` is not `frame:opacity`"))?;
            let frame: u32 = frame.trim().parse().with_context(|| format!("keyframe frame `{frame}` is not a whole number"))?;
            keys.push((frame, opacity_value(value)?));
        }
        keys.sort_by_key(|k| k.0);
        if keys.len() < 2 {
            bail!("a keyframe list needs at least two keyframes");
        }
        if keys.windows(2).any(|w| w[0].0 == w[1].0) {
            bail!("duplicate keyframe frame numbers");
        }
        Ok(Opacity::Keyframes(keys))
    }

    /// `(frame, opacity)` for every frame of the sequence; `None` as frame
    /// for a constant opacity.
    pub fn frames(&self) -> Vec<(Option<u32>, f64)> {
        match self {
            Opacity::Constant(x) => vec![(None, *x)],
            Opacity::Keyframes(keys) => {
                let (first, last) = (keys[0].0, keys[keys.len() - 1].0);
                (first..=last)
                    .map(|f| {
                        let i = keys.partition_point(|k| k.0 <= f).clamp(1, keys.len() - 1);
                        let ((f0, a), (f1, b)) = (keys[i - 1], keys[i]);
                        let t = (f - f0) as f64 / (f1 - f0) as f64;
                        (Some(f), a + (b - a) * t)
                    })
                    .collect()
            }
        }
    }
}
