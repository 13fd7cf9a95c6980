use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ldes_core::calibrate::{self, FitConfig};
use ldes_core::io::{self, Extension, LdesFilename, LdesMap, MapType};
use ldes_core::mapgen::{default_footage_size, derive_footage_map, generate_footage_map, generate_view_map};
use ldes_core::resample::{self, EdgeRule, FilterKind, SampleFilter};
use ldes_core::transform::{self, exceeds_unit_square};
use ldes_core::{FovAngle, ParamsDocument};

use crate::keyframes::Opacity;
use crate::{Command, Filter, Format, Output};

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::GenView { params, size, vignette, desc, output } => gen_view(&params, &size, vignette, desc, &output),
        Command::GenFootage { params, from_view, size, desc, output } => {
            gen_footage(params.as_deref(), from_view.as_deref(), size, desc, &output)
        }
        Command::Blend { a, b, opacity, common_fov, desc, output } => blend(&a, &b, &opacity, common_fov, &desc, &output),
        Command::Bake { view_map, footage_map, filter, supersample, out } => {
            bake(&view_map, &footage_map, filter, supersample, &out)
        }
        Command::Apply { footage, stmap, filter, flip_t, mark_outside, out } => {
            apply(&footage, &stmap, filter, flip_t, mark_outside, &out)
        }
        Command::Rays { view_map, out } => rays(&view_map, &out),
        Command::Rotate { view_map, pan, tilt, roll, desc, output } => rotate(&view_map, [pan, tilt, roll], desc, &output),
        Command::Vignette { footage, view_map, divide, multiply: _, out } => vignette(&footage, &view_map, divide, &out),
        Command::Fit { correspondences, seed, free, max_iterations, out, report } => {
            fit(&correspondences, &seed, &free, max_iterations, out.as_deref(), report.as_deref())
        }
        Command::Info { path } => info(&path),
    }
}

fn extension(format: Format) -> Extension {
    match format {
        Format::Exr => Extension::Exr,
        Format::Tif => Extension::Tif,
    }
}

fn filter(kind: Filter, edge: EdgeRule) -> SampleFilter {
    let kind = match kind {
        Filter::Bilinear => FilterKind::Bilinear,
        Filter::CatmullRom => FilterKind::CatmullRom,
    };
    SampleFilter::new(kind, edge)
}

/// `--out` as given, or the auto name inside it when it is a directory, or
/// the auto name in the working directory when absent.
fn resolve_out(output: &Output, auto: &LdesFilename) -> PathBuf {
    match &output.out {
        Some(p) if p.is_dir() => p.join(auto.to_string()),
        Some(p) => p.clone(),
        None => PathBuf::from(auto.to_string()),
    }
}

fn read_params(path: &Path) -> Result<ParamsDocument> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ParamsDocument::parse(&text).with_context(|| format!("params file {}", path.display()))
}

fn description(explicit: Option<String>, doc: Option<&ParamsDocument>, fallback: &Path) -> String {
    explicit
        .or_else(|| doc.and_then(|d| d.description.clone()))
        .or_else(|| fallback.file_stem().and_then(|s| s.to_str()).map(str::to_string))
        .unwrap_or_else(|| "Lens".into())
}

fn parse_size(text: &str) -> Result<(usize, usize)> {
    let (w, h) = text.split_once(['x', 'X']).with_context(|| format!("size `{text}` is not WIDTHxHEIGHT"))?;
    let w = w.trim().parse().with_context(|| format!("size `{text}`: bad width"))?;
    let h = h.trim().parse().with_context(|| format!("size `{text}`: bad height"))?;
    Ok((w, h))
}

fn gen_view(params: &Path, size: &str, vignette: bool, desc: Option<String>, output: &Output) -> Result<()> {
    let doc = read_params(params)?;
    let (w, h) = parse_size(size)?;
    let map = generate_view_map(&doc.params, w, h, vignette)?;
    let name = LdesFilename::new(MapType::ViewMap, description(desc, Some(&doc), params), map.fov(), false, extension(output.format));
    let path = resolve_out(output, &name);
    io::write_view_map(&map, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn gen_footage(
    params: Option<&Path>,
    from_view: Option<&Path>,
    size: Option<usize>,
    desc: Option<String>,
    output: &Output,
) -> Result<()> {
    let (map, desc) = match (params, from_view) {
        (Some(p), _) => {
            let doc = read_params(p)?;
            let map = generate_footage_map(&doc.params, size.unwrap_or(1024))?;
            (map, description(desc, Some(&doc), p))
        }
        (None, Some(v)) => {
            let vmap = io::read_view_map(v).with_context(|| format!("reading {}", v.display()))?;
            let size = size.unwrap_or_else(|| default_footage_size(vmap.width(), vmap.height()));
            let map = derive_footage_map(&vmap, size)?;
            let desc = desc.unwrap_or_else(|| {
                LdesFilename::from_path(v).map(|n| n.description).unwrap_or_else(|_| "Derived".into())
            });
            (map, desc)
        }
        (None, None) => bail!("give a params file or --from-view"),
    };
    let name = LdesFilename::new(MapType::FootageMap, desc, map.fov(), false, extension(output.format));
    let path = resolve_out(output, &name);
    io::write_footage_map(&map, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn read_view(path: &Path) -> Result<ldes_core::ViewMap> {
    io::read_view_map(path).with_context(|| format!("reading view map {}", path.display()))
}

fn blend(a: &Path, b: &Path, opacity: &str, common_fov: Option<u32>, desc: &str, output: &Output) -> Result<()> {
    let opacity = Opacity::parse(opacity).context("--opacity")?;
    let (va, vb) = (read_view(a)?, read_view(b)?);
    let common = match common_fov {
        Some(d) => FovAngle::from_noted(d)?,
        None => FovAngle::from_noted(va.fov().noted_degrees().max(vb.fov().noted_degrees()))?,
    };
    let (na, nb) = (transform::normalize_fov(&va, common)?, transform::normalize_fov(&vb, common)?);
    for (m, p) in [(&na, a), (&nb, b)] {
        if exceeds_unit_square(m) {
            eprintln!("ldes: warning: {} encodes directions beyond the common FOV {}°", p.display(), common.noted_degrees());
        }
    }
    let frames = opacity.frames();
    let multi = frames.len() > 1;
    if multi && output.out.as_ref().is_some_and(|p| !p.is_dir()) {
        bail!("a keyframe sequence needs --out to be an existing directory");
    }
    for (frame, x) in frames {
        let map = transform::blend_view_maps(&na, &nb, x)?;
        let d = match frame {
            Some(f) => format!("{desc}_{f:04}"),
            None => desc.to_string(),
        };
        let name = LdesFilename::new(MapType::ViewMap, d, common, true, extension(output.format));
        let path = resolve_out(output, &name);
        io::write_view_map(&map, &path).with_context(|| format!("writing {}", path.display()))?;
        println!("{}", path.display());
    }
    Ok(())
}

fn bake(view_map: &Path, footage_map: &Path, kind: Filter, supersample: usize, out: &Path) -> Result<()> {
    let vmap = read_view(view_map)?;
    let fmap = io::read_footage_map(footage_map).with_context(|| format!("reading footage map {}", footage_map.display()))?;
    let stmap = resample::bake(&vmap, &fmap, filter(kind, EdgeRule::Clamp), supersample)?;
    io::write_image(&stmap, out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", out.display());
    Ok(())
}

fn apply(footage: &Path, stmap: &Path, kind: Filter, flip_t: bool, mark_outside: bool, out: &Path) -> Result<()> {
    let img = io::read_image(footage).with_context(|| format!("reading {}", footage.display()))?;
    let mut st = io::read_image(stmap).with_context(|| format!("reading {}", stmap.display()))?;
    if flip_t {
        st = resample::flip_t(&st)?;
    }
    let edge = if mark_outside { EdgeRule::MarkOutside } else { EdgeRule::Clamp };
    let result = resample::apply_stmap(&img, &st, filter(kind, edge))?;
    io::write_image(&result, out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", out.display());
    Ok(())
}

fn rays(view_map: &Path, out: &Path) -> Result<()> {
    let rays = transform::view_map_to_rays(&read_view(view_map)?)?;
    io::write_image(&rays, out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", out.display());
    Ok(())
}

fn rotate(view_map: &Path, [pan, tilt, roll]: [f64; 3], desc: Option<String>, output: &Output) -> Result<()> {
    let vmap = read_view(view_map)?;
    let rotated = transform::rotate_view_map(&vmap, pan.to_radians(), tilt.to_radians(), roll.to_radians())?;
    let desc = desc.unwrap_or_else(|| {
        let base = LdesFilename::from_path(view_map).map(|n| n.description).unwrap_or_else(|_| "View".into());
        format!("{base}_Rotated")
    });
    let name = LdesFilename::new(MapType::ViewMap, desc, rotated.fov(), rotated.is_normalized(), extension(output.format));
    let path = resolve_out(output, &name);
    io::write_view_map(&rotated, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("{}", path.display());
    Ok(())
}

fn vignette(footage: &Path, view_map: &Path, divide: bool, out: &Path) -> Result<()> {
    let img = io::read_image(footage).with_context(|| format!("reading {}", footage.display()))?;
    let vmap = read_view(view_map)?;
    let result = if divide { resample::vignette_divide(&img, &vmap)? } else { resample::vignette_multiply(&img, &vmap)? };
    io::write_image(&result, out).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", out.display());
    Ok(())
}

fn fit(
    correspondences: &Path,
    seed: &Path,
    free: &str,
    max_iterations: usize,
    out: Option<&Path>,
    report_path: Option<&Path>,
) -> Result<()> {
    let data = calibrate::read_correspondences(correspondences)
        .with_context(|| format!("correspondences {}", correspondences.display()))?;
    let doc = read_params(seed)?;
    let mut config = FitConfig::new(calibrate::parse_parameter_list(free)?);
    config.max_iterations = max_iterations;
    let report = calibrate::fit(&data, &doc.params, &config)?;
    let text = report.to_kv_string();
    print!("{text}");
    if let Some(p) = report_path {
        std::fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(p) = out {
        let fitted = report.params_document(doc.description.clone());
        std::fs::write(p, fitted.to_kv_string()).with_context(|| format!("writing {}", p.display()))?;
    }
    if !report.converged {
        eprintln!("ldes: warning: fit did not converge within {max_iterations} iterations");
    }
    Ok(())
}

fn info(path: &Path) -> Result<()> {
    let name = LdesFilename::from_path(path)?;
    println!("type = {}", name.map_type);
    println!("description = {}", name.description);
    println!("fov_deg = {}", name.fov_degrees);
    println!("normalized = {}", name.normalized);
    println!("format = {}", name.extension.as_str());
    if path.exists() {
        let map = io::read_map(path)?;
        let img = map.image();
        println!("size = {}x{}", img.width(), img.height());
        println!("channels = {}", img.channels());
        match &map {
            LdesMap::View(v) => println!("vignette = {}", v.has_vignette()),
            LdesMap::Footage(f) => println!("coverage = {:.6}", f.coverage()),
        }
    }
    Ok(())
}
