use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::DetectError;

/// Stage-structured boosted classifier over Haar features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarCascade {
    pub window_width: usize,
    pub window_height: usize,
    pub stages: Vec<Stage>,
    pub features: Vec<HaarFeature>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub threshold: f64,
    pub classifiers: Vec<WeakClassifier>,
}

/// A stump (one node, two leaves) or a shallow tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakClassifier {
    pub nodes: Vec<TreeNode>,
    pub leaves: Vec<f64>,
}

/// Goes `left` when the normalized feature value is below `threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub feature: usize,
    pub threshold: f64,
    pub left: Child,
    pub right: Child,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Child {
    Node(usize),
    Leaf(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarFeature {
    pub rects: Vec<WeightedRect>,
    pub tilted: bool,
}

/// Rectangle in base-window coordinates with its weight, taken verbatim
/// from the cascade file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedRect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
    pub weight: f64,
}

impl WeightedRect {
    pub fn new(x: usize, y: usize, width: usize, height: usize, weight: f64) -> Self {
        Self { x, y, width, height, weight }
    }

    /// Upright rects must fit the window; tilted rects extend `width` steps
    /// down-right and `height` steps down-left from `(x, y)`.
    fn fits(&self, tilted: bool, win_w: usize, win_h: usize) -> bool {
        if self.width == 0 || self.height == 0 {
            return false;
        }
        if tilted {
            self.x >= self.height && self.x + self.width <= win_w && self.y + self.width + self.height <= win_h
        } else {
            self.x + self.width <= win_w && self.y + self.height <= win_h
        }
    }
}

impl HaarCascade {
    pub fn uses_tilted(&self) -> bool {
        self.features.iter().any(|f| f.tilted)
    }

    /// Structural checks: non-empty stages, in-range node references and
    /// every feature rectangle inside the base window.
    pub fn validate(&self) -> Result<(), DetectError> {
        let bad = |m: String| Err(DetectError::InvalidCascade(m));
        if self.window_width == 0 || self.window_height == 0 {
            return bad("base window must be non-empty".into());
        }
        if self.stages.is_empty() {
            return bad("cascade has no stages".into());
        }
        for (fi, f) in self.features.iter().enumerate() {
            if f.rects.is_empty() {
                return bad(format!("feature {fi} has no rectangles"));
            }
            for r in &f.rects {
                if !r.fits(f.tilted, self.window_width, self.window_height) {
                    return bad(format!(
                        "feature {fi} rectangle {r:?} exceeds the {}x{} window",
                        self.window_width, self.window_height
                    ));
                }
            }
        }
        for (si, stage) in self.stages.iter().enumerate() {
            if stage.classifiers.is_empty() {
                return bad(format!("stage {si} has no weak classifiers"));
            }
            for (wi, weak) in stage.classifiers.iter().enumerate() {
                if weak.nodes.is_empty() {
                    return bad(format!("stage {si} classifier {wi} has no nodes"));
                }
                for node in &weak.nodes {
                    if node.feature >= self.features.len() {
                        return bad(format!("stage {si} classifier {wi} references missing feature {}", node.feature));
                    }
                    for child in [node.left, node.right] {
                        let ok = match child {
                            // Node 0 is the root and can never be a child.
                            Child::Node(i) => i > 0 && i < weak.nodes.len(),
                            Child::Leaf(i) => i < weak.leaves.len(),
                        };
                        if !ok {
                            return bad(format!("stage {si} classifier {wi} has dangling child {child:?}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Writes the cascade in the same XML schema [`parse_cascade`] reads.
    pub fn to_xml(&self) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\"?>\n<opencv_storage>\n");
        s.push_str("<cascade type_id=\"opencv-cascade-classifier\"><stageType>BOOST</stageType>\n");
        s.push_str("  <featureType>HAAR</featureType>\n");
        let _ = writeln!(s, "  <height>{}</height>\n  <width>{}</width>", self.window_height, self.window_width);
        let max_weak = self.stages.iter().map(|st| st.classifiers.len()).max().unwrap_or(0);
        let _ = writeln!(s, "  <stageParams>\n    <maxWeakCount>{max_weak}</maxWeakCount></stageParams>");
        s.push_str("  <featureParams>\n    <maxCatCount>0</maxCatCount></featureParams>\n");
        let _ = writeln!(s, "  <stageNum>{}</stageNum>\n  <stages>", self.stages.len());
        for stage in &self.stages {
            let _ = writeln!(s, "    <_>\n      <maxWeakCount>{}</maxWeakCount>", stage.classifiers.len());
            let _ = writeln!(s, "      <stageThreshold>{:e}</stageThreshold>\n      <weakClassifiers>", stage.threshold);
            for weak in &stage.classifiers {
                s.push_str("        <_>\n          <internalNodes>\n           ");
                for n in &weak.nodes {
                    let _ = write!(s, " {} {} {} {:e}", encode_child(n.left), encode_child(n.right), n.feature, n.threshold);
                }
                s.push_str("</internalNodes>\n          <leafValues>\n           ");
                for v in &weak.leaves {
                    let _ = write!(s, " {v:e}");
                }
                s.push_str("</leafValues></_>\n");
            }
            s.push_str("      </weakClassifiers></_>\n");
        }
        s.push_str("  </stages>\n  <features>\n");
        for f in &self.features {
            s.push_str("    <_>\n      <rects>\n");
            for r in &f.rects {
                let _ = writeln!(s, "        <_>\n          {} {} {} {} {:e}</_>", r.x, r.y, r.width, r.height, r.weight);
            }
            s.push_str("      </rects>\n");
            if f.tilted {
                s.push_str("      <tilted>1</tilted>");
            }
            s.push_str("</_>\n");
        }
        s.push_str("  </features>\n</cascade>\n</opencv_storage>\n");
        s
    }
}

fn encode_child(c: Child) -> i64 {
    match c {
        Child::Node(i) => i as i64,
        Child::Leaf(i) => -(i as i64),
    }
}

fn decode_child(v: i64) -> Child {
    if v > 0 {
        Child::Node(v as usize)
    } else {
        Child::Leaf((-v) as usize)
    }
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|c| c.is_element() && c.has_tag_name(name))
}

fn items<'a, 'i>(node: roxmltree::Node<'a, 'i>) -> impl Iterator<Item = roxmltree::Node<'a, 'i>> {
    node.children().filter(|c| c.is_element() && c.has_tag_name("_"))
}

fn text_of(node: roxmltree::Node<'_, '_>) -> String {
    node.descendants().filter(|n| n.is_text()).map(|n| n.text().unwrap_or("")).collect()
}

fn numbers(node: roxmltree::Node<'_, '_>, what: &str) -> Result<Vec<f64>, DetectError> {
    text_of(node)
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| DetectError::InvalidCascade(format!("non-numeric {what} token {t:?}")))
        })
        .collect()
}

fn required<'a, 'i>(node: roxmltree::Node<'a, 'i>, name: &str) -> Result<roxmltree::Node<'a, 'i>, DetectError> {
    child(node, name).ok_or_else(|| DetectError::InvalidCascade(format!("missing <{name}>")))
}

fn as_index(v: f64, what: &str) -> Result<usize, DetectError> {
    if v >= 0.0 && v.fract() == 0.0 {
        Ok(v as usize)
    } else {
        Err(DetectError::InvalidCascade(format!("{what} must be a non-negative integer, got {v}")))
    }
}

/// Parses a stage-cascade XML document (stump or shallow-tree weak
/// classifiers, upright or tilted Haar features).
pub fn parse_cascade(xml: &str) -> Result<HaarCascade, DetectError> {
    let doc = roxmltree::Document::parse(xml)?;
    let root = doc.root_element();
    let cascade = if root.has_tag_name("cascade") {
        root
    } else {
        root.children()
            .find(|c| c.is_element() && c.has_tag_name("cascade"))
            .ok_or_else(|| DetectError::InvalidCascade("no <cascade> element (legacy format is not supported)".into()))?
    };
    if let Some(ft) = child(cascade, "featureType") {
        let ft = text_of(ft);
        if ft.trim() != "HAAR" {
            return Err(DetectError::InvalidCascade(format!("unsupported feature type {}", ft.trim())));
        }
    }
    let dim = |name: &str| -> Result<usize, DetectError> {
        let v = numbers(required(cascade, name)?, name)?;
        as_index(*v.first().unwrap_or(&-1.0), name)
    };
    let window_width = dim("width")?;
    let window_height = dim("height")?;

    let mut stages = Vec::new();
    for st in items(required(cascade, "stages")?) {
        let threshold = *numbers(required(st, "stageThreshold")?, "stageThreshold")?
            .first()
            .ok_or_else(|| DetectError::InvalidCascade("empty stageThreshold".into()))?;
        let mut classifiers = Vec::new();
        for wc in items(required(st, "weakClassifiers")?) {
            let raw = numbers(required(wc, "internalNodes")?, "internalNodes")?;
            if raw.is_empty() || raw.len() % 4 != 0 {
                return Err(DetectError::InvalidCascade(format!(
                    "internalNodes must hold groups of 4 values, got {}",
                    raw.len()
                )));
            }
            let nodes = raw
                .chunks(4)
                .map(|c| {
                    Ok(TreeNode {
                        left: decode_child(c[0] as i64),
                        right: decode_child(c[1] as i64),
                        feature: as_index(c[2], "feature index")?,
                        threshold: c[3],
                    })
                })
                .collect::<Result<Vec<_>, DetectError>>()?;
            let leaves = numbers(required(wc, "leafValues")?, "leafValues")?;
            classifiers.push(WeakClassifier { nodes, leaves });
        }
        stages.push(Stage { threshold, classifiers });
    }

    let mut features = Vec::new();
    for f in items(required(cascade, "features")?) {
        let mut rects = Vec::new();
        for r in items(required(f, "rects")?) {
            let v = numbers(r, "rect")?;
            if v.len() != 5 {
                return Err(DetectError::InvalidCascade(format!("rect needs 5 values, got {}", v.len())));
            }
            rects.push(WeightedRect {
                x: as_index(v[0], "rect x")?,
                y: as_index(v[1], "rect y")?,
                width: as_index(v[2], "rect width")?,
                height: as_index(v[3], "rect height")?,
                weight: v[4],
            });
        }
        let tilted = match child(f, "tilted") {
            Some(t) => text_of(t).trim() == "1",
            None => false,
        };
        features.push(HaarFeature { rects, tilted });
    }

    let cascade = HaarCascade { window_width, window_height, stages, features };
    cascade.validate()?;
    Ok(cascade)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"<?xml version="1.0"?>
<opencv_storage>
<cascade type_id="opencv-cascade-classifier">
  <stageType>BOOST</stageType>
  <featureType>HAAR</featureType>
  <height>4</height>
  <width>4</width>
  <stageNum>1</stageNum>
  <stages>
    <_>
      <maxWeakCount>1</maxWeakCount>
      <stageThreshold>0.</stageThreshold>
      <weakClassifiers>
        <_>
          <internalNodes>0 -1 0 1.5e-01</internalNodes>
          <leafValues>-1. 1.</leafValues></_></weakClassifiers></_></stages>
  <features>
    <_>
      <rects>
        <_>0 0 2 4 -1.</_>
        <_>2 0 2 4 1.</_></rects></_></features></cascade>
</opencv_storage>
"#;

    #[test]
    fn minimal_document() {
        let c = parse_cascade(MINIMAL).unwrap();
        assert_eq!((c.window_width, c.window_height), (4, 4));
        assert_eq!(c.stages.len(), 1);
        assert_eq!(c.stages[0].classifiers.len(), 1);
        let node = &c.stages[0].classifiers[0].nodes[0];
        assert_eq!((node.left, node.right), (Child::Leaf(0), Child::Leaf(1)));
        assert_eq!(node.threshold, 0.15);
        assert_eq!(c.features[0].rects[1], WeightedRect::new(2, 0, 2, 4, 1.0));
    }

    #[test]
    fn out_of_window_rect_rejected() {
        let xml = MINIMAL.replace("<_>2 0 2 4 1.</_>", "<_>3 0 2 4 1.</_>");
        assert!(matches!(parse_cascade(&xml), Err(DetectError::InvalidCascade(_))));
    }

    #[test]
    fn empty_stage_list_rejected() {
        let start = MINIMAL.find("<stages>").unwrap();
        let end = MINIMAL.find("</stages>").unwrap() + "</stages>".len();
        let xml = format!("{}<stages></stages>{}", &MINIMAL[..start], &MINIMAL[end..]);
        assert!(matches!(parse_cascade(&xml), Err(DetectError::InvalidCascade(_))));
    }

    #[test]
    fn malformed_xml_rejected() {
        assert!(matches!(parse_cascade("<opencv_storage><cascade>"), Err(DetectError::Xml(_))));
    }

    #[test]
    fn dangling_feature_index_rejected() {
        let xml = MINIMAL.replace("0 -1 0 1.5e-01", "0 -1 3 1.5e-01");
        assert!(parse_cascade(&xml).is_err());
    }

    #[test]
    fn serialize_round_trip() {
        let c = parse_cascade(MINIMAL).unwrap();
        let again = parse_cascade(&c.to_xml()).unwrap();
        assert_eq!(c, again);
    }
}
