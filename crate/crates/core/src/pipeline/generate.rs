use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Flight, SceneConfig};
use super::manifest::{DatasetManifest, ManifestEntry, Origin};
use super::PipelineError;
use crate::crack::{generate_damage_state, CrackInstance, DamageState, SkippedCrack};
use crate::geometry::TriangleMesh;
use crate::label::{mask_to_boxes, render_debug_overlay, write_voc_xml, ImageAnnotation};
use crate::render::io::{save_color_png, save_id_map, save_id_png, IdMap};
use crate::render::{interpolate_camera, render_frame};

/// Present in the output directory while a run is in progress or after it failed.
pub const INCOMPLETE_MARKER: &str = ".incomplete";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Command-line overrides of the scene file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenerateOptions {
    pub levels: Option<Vec<u32>>,
    pub overlays: Option<bool>,
}

#[derive(Serialize)]
struct LevelRecord<'a> {
    level: u32,
    seed: u64,
    instances: &'a [CrackInstance<f64>],
    skipped: &'a [SkippedCrack],
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create_dir(path: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Clears output from an earlier run; refuses to touch unrelated directories.
fn prepare_output(out: &Path) -> Result<(), PipelineError> {
    if out.exists() {
        let ours = out.join(MANIFEST_FILE).exists() || out.join(INCOMPLETE_MARKER).exists();
        let empty = fs::read_dir(out).map_err(io_err(out))?.next().is_none();
        if !ours && !empty {
            return Err(PipelineError::OutputNotEmpty(out.to_path_buf()));
        }
        for entry in fs::read_dir(out).map_err(io_err(out))? {
            let entry = entry.map_err(io_err(out))?;
            let name = entry.file_name();
            let name = name.to_string_lossy();
            let p = entry.path();
            if name.starts_with("level_") && p.is_dir() {
                fs::remove_dir_all(&p).map_err(io_err(&p))?;
            } else if name == MANIFEST_FILE {
                fs::remove_file(&p).map_err(io_err(&p))?;
            }
        }
    }
    create_dir(out)?;
    let marker = out.join(INCOMPLETE_MARKER);
    fs::write(&marker, b"generation in progress or failed\n").map_err(io_err(&marker))
}

fn slash_path(parts: &[&str]) -> PathBuf {
    PathBuf::from(parts.join("/"))
}

/// Renders every configured damage level along every flight and writes
/// images, id buffers, VOC files, optional overlays and a manifest.
/// Output depends only on the configuration and its seed.
pub fn generate_dataset(config: &SceneConfig, options: &GenerateOptions) -> Result<DatasetManifest, PipelineError> {
    let out = config.output_path();
    prepare_output(&out)?;
    let scene = config.build()?;
    let levels = match &options.levels {
        Some(l) => {
            let mut l = l.clone();
            l.sort_unstable();
            l.dedup();
            l
        }
        None => config.render_levels(),
    };
    let overlays = options.overlays.unwrap_or(config.overlays);

    let mut entries = Vec::new();
    for level in levels {
        let state = generate_damage_state(&scene.mesh, &scene.damage, level, config.seed)?;
        let level_name = format!("level_{level}");
        let level_dir = out.join(&level_name);
        create_dir(&level_dir)?;
        write_level_record(&level_dir, &state, config.seed)?;
        log::info!(
            "level {level}: {} cracks carved, {} skipped",
            state.instances.len(),
            state.skipped.len()
        );
        for flight in &scene.flights {
            let frames = render_flight_to_disk(&out, &level_name, flight, &state.mesh, config, overlays)?;
            entries.extend(frames);
        }
    }
    let manifest = DatasetManifest::new(entries);
    manifest.check_unique()?;
    manifest.save(&out.join(MANIFEST_FILE))?;
    let marker = out.join(INCOMPLETE_MARKER);
    fs::remove_file(&marker).map_err(io_err(&marker))?;
    Ok(manifest)
}

fn write_level_record(level_dir: &Path, state: &DamageState<f64>, seed: u64) -> Result<(), PipelineError> {
    let record = LevelRecord {
        level: state.level,
        seed,
        instances: &state.instances,
        skipped: &state.skipped,
    };
    let p = level_dir.join("instances.json");
    let text = serde_json::to_string_pretty(&record).expect("instances serialize") + "\n";
    fs::write(&p, text).map_err(io_err(&p))?;
    let map: IdMap = state.instances.iter().map(|c| (c.id, c.name.clone())).collect();
    save_id_map(&map, &level_dir.join("ids.json"))?;
    Ok(())
}

fn render_flight_to_disk(
    out: &Path,
    level_name: &str,
    flight: &Flight,
    mesh: &TriangleMesh<f64>,
    config: &SceneConfig,
    overlays: bool,
) -> Result<Vec<ManifestEntry>, PipelineError> {
    let mut sub = vec!["images", "ids", "annotations"];
    if overlays {
        sub.push("overlays");
    }
    for s in &sub {
        create_dir(&out.join(level_name).join(&flight.name).join(s))?;
    }
    (0..flight.path.frame_count())
        .into_par_iter()
        .map(|i| {
            let pose = interpolate_camera(&flight.path, i)?;
            let frame = render_frame(mesh, &pose, &flight.lighting, flight.resolution)?;
            let stem = format!("frame_{i:05}");
            let image_rel = slash_path(&[level_name, &flight.name, "images", &format!("{stem}.png")]);
            let ids_rel = slash_path(&[level_name, &flight.name, "ids", &format!("{stem}.png")]);
            let ann_rel = slash_path(&[level_name, &flight.name, "annotations", &format!("{stem}.xml")]);
            save_color_png(&frame.color, &out.join(&image_rel))?;
            save_id_png(&frame.ids, &out.join(&ids_rel))?;
            let mut ann = ImageAnnotation::new(image_rel.clone(), frame.color.width(), frame.color.height());
            ann.boxes = mask_to_boxes(&frame.ids, config.merge_distance);
            write_voc_xml(&ann, &out.join(&ann_rel))?;
            if overlays {
                let overlay_rel = slash_path(&[level_name, &flight.name, "overlays", &format!("{stem}.png")]);
                let img = render_debug_overlay(&frame.color, &ann)?;
                save_color_png(&img, &out.join(overlay_rel))?;
            }
            Ok(ManifestEntry {
                image: out.join(image_rel),
                annotation: out.join(ann_rel),
                damaged: frame.ids.nonzero_count() > 0,
                origin: Origin::Synthetic,
            })
        })
        .collect()
}
