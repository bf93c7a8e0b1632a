use std::collections::HashMap;
use std::path::Path;

use super::manifest::DatasetManifest;
use super::PipelineError;
use crate::eval::{average_precision, pr_curve, EvaluationPair, EvaluationReport, MetricMode, PrCurve, PredictionRecord};
use crate::label::{expand_boxes, read_voc_xml};

/// Keys under which an image can be referenced from a predictions file:
/// every trailing run of path components, with and without the extension.
fn image_keys(path: &Path) -> Vec<String> {
    let parts: Vec<String> = path.iter().map(|c| c.to_string_lossy().into_owned()).collect();
    let mut keys = Vec::new();
    for start in 0..parts.len() {
        let joined = parts[start..].join("/");
        if let Some(stripped) = Path::new(&joined).with_extension("").to_str() {
            keys.push(stripped.to_string());
        }
        keys.push(joined);
    }
    keys
}

/// Scores predictions against the manifest's VOC ground truth, after
/// growing every ground-truth box by `expand` pixels.
pub fn evaluate_dataset(
    ground_truth: &DatasetManifest,
    predictions: &[PredictionRecord],
    mode: MetricMode,
    expand: u32,
) -> Result<(EvaluationReport, PrCurve), PipelineError> {
    let mut index: HashMap<String, Option<usize>> = HashMap::new();
    for (i, e) in ground_truth.entries().iter().enumerate() {
        for k in image_keys(&e.image) {
            index
                .entry(k)
                .and_modify(|v| {
                    if *v != Some(i) {
                        *v = None
                    }
                })
                .or_insert(Some(i));
        }
    }
    let mut pairs = Vec::with_capacity(ground_truth.len());
    let mut sizes = Vec::with_capacity(ground_truth.len());
    for e in ground_truth.entries() {
        let ann = read_voc_xml(&e.annotation).map_err(|err| PipelineError::Annotation {
            path: e.annotation.clone(),
            message: err.to_string(),
        })?;
        sizes.push((ann.width, ann.height));
        pairs.push(EvaluationPair {
            ground_truth: expand_boxes(&ann, expand).boxes,
            predictions: Vec::new(),
        });
    }
    for p in predictions {
        let i = match index.get(p.image_id.trim_start_matches("./")) {
            Some(Some(i)) => *i,
            Some(None) => return Err(PipelineError::AmbiguousImage(p.image_id.clone())),
            None => return Err(PipelineError::UnknownImage(p.image_id.clone())),
        };
        let (w, h) = sizes[i];
        pairs[i].predictions.push(p.to_box(w, h)?);
    }
    let curve = pr_curve(&pairs, mode);
    let ap = average_precision(&curve);
    let gt = pairs.iter().map(|p| p.ground_truth.len()).sum();
    let report = EvaluationReport::new(&curve, &ap, expand, pairs.len(), gt, predictions.len());
    Ok((report, curve))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_cover_suffixes() {
        let k = image_keys(Path::new("/data/out/level_0/orbit/images/frame_00001.png"));
        assert!(k.contains(&"frame_00001".to_string()));
        assert!(k.contains(&"frame_00001.png".to_string()));
        assert!(k.contains(&"level_0/orbit/images/frame_00001.png".to_string()));
        assert!(k.contains(&"level_0/orbit/images/frame_00001".to_string()));
    }
}
