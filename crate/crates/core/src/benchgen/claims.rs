//! Machine-checkable option claims. Every benchmark option is the
//! deterministic rendering of one claim; the answer-key oracle re-evaluates
//! claims directly against the scene graph, so an item can be re-verified
//! from the serialized files alone.

use serde::{Deserialize, Serialize};

use crate::geometry::max_ray_in_box;
use crate::rtsd::{AudioObject, DistanceBand, ReverbDescriptor, SceneGraph, Sector};
use crate::sampler::SizeCategory;

use super::rules::RuleTable;
use super::GenContext;

/// Four exclusive, exhaustive elevation answer ranges. They refine the
/// coarse bands so an elevation question has four distinct options.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElevRange {
    SteepAbove,
    Above,
    EyeLevel,
    Below,
}

impl ElevRange {
    pub const ALL: [ElevRange; 4] =
        [ElevRange::SteepAbove, ElevRange::Above, ElevRange::EyeLevel, ElevRange::Below];

    pub fn of(elevation_deg: f64) -> ElevRange {
        if elevation_deg > 45.0 {
            ElevRange::SteepAbove
        } else if elevation_deg > 15.0 {
            ElevRange::Above
        } else if elevation_deg >= -15.0 {
            ElevRange::EyeLevel
        } else {
            ElevRange::Below
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ElevRange::SteepAbove => "steeply above (more than 45° up)",
            ElevRange::Above => "above ear level (15° to 45° up)",
            ElevRange::EyeLevel => "near ear level (within ±15°)",
            ElevRange::Below => "below ear level (more than 15° down)",
        }
    }
}

fn display_class(class: &str) -> String {
    class.replace('_', " ")
}

fn title_class(class: &str) -> String {
    let d = display_class(class);
    let mut chars = d.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().collect::<String>() + chars.as_str(),
        None => d,
    }
}

fn band_phrase(band: DistanceBand) -> &'static str {
    band.label()
}

/// One assertable statement about a scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Claim {
    CountIs { n: usize },
    ClassPresent { class: String },
    BothAbsent { a: String, b: String },
    ClassInSector { class: String, sector: Sector },
    ElevationIs { class: String, range: ElevRange },
    DistanceWithin { class: String, lo_m: f64, hi_m: f64 },
    RoomIs { size: SizeCategory, reverb: ReverbDescriptor },
    Binding { class: String, sector: Sector, band: DistanceBand },
    LocatedAt { class: String, sector: Sector, band: DistanceBand },
    ClassAtPlace { class: String, sector: Sector, lo_m: f64, hi_m: f64 },
    CloserThan { closer: String, farther: String },
    EqualDistance { a: String, b: String },
    IsLeftOf { a: String, b: String },
    IsRightOf { a: String, b: String },
    SameDirection { a: String, b: String },
    OppositeDirection { a: String, b: String },
    SectorAfterRotation { class: String, rotation_deg: f64, sector: Sector },
    RemainingCount { removed: String, n: usize },
    RemainingClosest { removed: String, class: String },
    StillAudible { removed: String, class: String },
    FarthestIs { class: String, sector: Sector },
    ImpossibleDistance { distance_m: f64 },
    SceneLabelIs { label: String },
    ActivityLabelIs { label: String },
    TranscriptIs { text: String },
}

/// Exactly one node carries this class, or the claim is ill-posed.
fn unique_by_class<'a>(graph: &'a SceneGraph, class: &str) -> Option<&'a AudioObject> {
    let mut found = None;
    for n in &graph.nodes {
        if n.class_label == class {
            if found.is_some() {
                return None;
            }
            found = Some(n);
        }
    }
    found
}

fn present(graph: &SceneGraph, class: &str) -> bool {
    graph.nodes.iter().any(|n| n.class_label == class)
}

/// Strict extremum by distance; `None` when the top two are tied.
fn strict_extreme(graph: &SceneGraph, farthest: bool) -> Option<&AudioObject> {
    if graph.nodes.is_empty() {
        return None;
    }
    let mut best = &graph.nodes[0];
    for n in &graph.nodes[1..] {
        let beats = if farthest { n.distance_m > best.distance_m } else { n.distance_m < best.distance_m };
        if beats {
            best = n;
        }
    }
    let ties = graph
        .nodes
        .iter()
        .filter(|n| (n.distance_m - best.distance_m).abs() < 1e-9)
        .count();
    if ties == 1 {
        Some(best)
    } else {
        None
    }
}

fn without_class(graph: &SceneGraph, class: &str) -> Option<SceneGraph> {
    let node = unique_by_class(graph, class)?;
    let id = node.object_id;
    let nodes: Vec<AudioObject> =
        graph.nodes.iter().filter(|n| n.object_id != id).cloned().collect();
    let edges = crate::rtsd::edges_for(&nodes);
    Some(SceneGraph { nodes, edges, ..graph.clone() })
}

impl Claim {
    /// Re-derives the truth of the claim from the raw graph. `None` marks
    /// an ill-posed claim (ambiguous class reference, tie, missing rule),
    /// which the validator treats as a failed item.
    pub fn holds(&self, graph: &SceneGraph, ctx: &GenContext) -> Option<bool> {
        let rules: &RuleTable = ctx.rules;
        match self {
            Claim::CountIs { n } => Some(graph.nodes.len() == *n),
            Claim::ClassPresent { class } => Some(present(graph, class)),
            Claim::BothAbsent { a, b } => Some(!present(graph, a) && !present(graph, b)),
            Claim::ClassInSector { class, sector } => {
                unique_by_class(graph, class).map(|n| n.sector == *sector)
            }
            Claim::ElevationIs { class, range } => {
                unique_by_class(graph, class).map(|n| ElevRange::of(n.elevation_deg) == *range)
            }
            Claim::DistanceWithin { class, lo_m, hi_m } => unique_by_class(graph, class)
                .map(|n| n.distance_m >= *lo_m && n.distance_m <= *hi_m),
            Claim::RoomIs { size, reverb } => Some(
                graph.room.spec.size_category == *size
                    && ReverbDescriptor::from_absorption(graph.room.acoustics.mean_absorption)
                        == *reverb,
            ),
            Claim::Binding { class, sector, band } | Claim::LocatedAt { class, sector, band } => {
                Some(graph.nodes.iter().any(|n| {
                    n.class_label == *class && n.sector == *sector && n.distance_band == *band
                }))
            }
            Claim::ClassAtPlace { class, sector, lo_m, hi_m } => {
                let at_place: Vec<_> = graph
                    .nodes
                    .iter()
                    .filter(|n| {
                        n.sector == *sector && n.distance_m >= *lo_m && n.distance_m <= *hi_m
                    })
                    .collect();
                match at_place.as_slice() {
                    [one] => Some(one.class_label == *class),
                    _ => Some(false),
                }
            }
            Claim::CloserThan { closer, farther } => {
                let c = unique_by_class(graph, closer)?;
                let f = unique_by_class(graph, farther)?;
                Some(c.distance_m < f.distance_m)
            }
            Claim::EqualDistance { a, b } => {
                let na = unique_by_class(graph, a)?;
                let nb = unique_by_class(graph, b)?;
                Some((na.distance_m - nb.distance_m).abs() < 0.005)
            }
            Claim::IsLeftOf { a, b } => {
                let (pa, pb) =
                    (unique_by_class(graph, a)?.listener_frame(), unique_by_class(graph, b)?.listener_frame());
                Some(pa.y > pb.y)
            }
            Claim::IsRightOf { a, b } => {
                let (pa, pb) =
                    (unique_by_class(graph, a)?.listener_frame(), unique_by_class(graph, b)?.listener_frame());
                Some(pa.y < pb.y)
            }
            Claim::SameDirection { a, b } => {
                let na = unique_by_class(graph, a)?;
                let nb = unique_by_class(graph, b)?;
                Some(crate::rtsd::angular_separation(na, nb) < 1.0)
            }
            Claim::OppositeDirection { a, b } => {
                let na = unique_by_class(graph, a)?;
                let nb = unique_by_class(graph, b)?;
                Some(crate::rtsd::angular_separation(na, nb) > 179.0)
            }
            Claim::SectorAfterRotation { class, rotation_deg, sector } => {
                let n = unique_by_class(graph, class)?;
                let rotated = crate::geometry::wrap_deg(n.azimuth_deg - rotation_deg);
                Some(Sector::from_azimuth(rotated) == *sector)
            }
            Claim::RemainingCount { removed, n } => {
                let g = without_class(graph, removed)?;
                Some(g.nodes.len() == *n)
            }
            Claim::RemainingClosest { removed, class } => {
                let g = without_class(graph, removed)?;
                let closest = strict_extreme(&g, false)?;
                Some(closest.class_label == *class)
            }
            Claim::StillAudible { removed, class } => {
                let g = without_class(graph, removed)?;
                Some(present(&g, class))
            }
            Claim::FarthestIs { class, sector } => {
                let far = strict_extreme(graph, true)?;
                Some(far.class_label == *class && far.sector == *sector)
            }
            Claim::ImpossibleDistance { distance_m } => {
                let max_ray = max_ray_in_box(&graph.listener.position, &graph.room.spec.dims);
                Some(*distance_m > max_ray)
            }
            Claim::SceneLabelIs { label } => {
                rules.scene_label(graph).map(|l| l == *label)
            }
            Claim::ActivityLabelIs { label } => {
                rules.activity_label(graph).map(|l| l == *label)
            }
            Claim::TranscriptIs { text } => {
                let with: Vec<_> = graph.nodes.iter().filter(|n| n.transcript.is_some()).collect();
                match with.as_slice() {
                    [one] => Some(one.transcript.as_deref() == Some(text.as_str())),
                    _ => None,
                }
            }
        }
    }

    /// Deterministic option rendering; the validator checks options against
    /// this text so that claims and visible options cannot drift apart.
    pub fn option_text(&self) -> String {
        match self {
            Claim::CountIs { n } => n.to_string(),
            Claim::ClassPresent { class } => title_class(class),
            Claim::BothAbsent { .. } => "Neither sound is present in the scene".to_string(),
            Claim::ClassInSector { sector, .. } => sector.label().to_string(),
            Claim::ElevationIs { range, .. } => range.label().to_string(),
            Claim::DistanceWithin { lo_m, hi_m, .. } => {
                format!("about {:.1} m away", 0.5 * (lo_m + hi_m))
            }
            Claim::RoomIs { size, reverb } => {
                format!("a {} room, {}", size.label(), reverb.label())
            }
            Claim::Binding { class, sector, band } => format!(
                "The {} is in the {} sector, {}",
                display_class(class),
                sector.label(),
                band_phrase(*band)
            ),
            Claim::LocatedAt { sector, band, .. } => {
                format!("In the {} sector, {}", sector.label(), band_phrase(*band))
            }
            Claim::ClassAtPlace { class, .. } => title_class(class),
            Claim::CloserThan { closer, .. } => format!("The {}", display_class(closer)),
            Claim::EqualDistance { .. } => "They are equally distant".to_string(),
            Claim::IsLeftOf { .. } => "To the left".to_string(),
            Claim::IsRightOf { .. } => "To the right".to_string(),
            Claim::SameDirection { .. } => "In exactly the same direction".to_string(),
            Claim::OppositeDirection { .. } => "In exactly the opposite direction".to_string(),
            Claim::SectorAfterRotation { sector, .. } => sector.label().to_string(),
            Claim::RemainingCount { n, .. } => {
                format!("Exactly {} sound source{} remain{}", n, if *n == 1 { "" } else { "s" }, if *n == 1 { "s" } else { "" })
            }
            Claim::RemainingClosest { class, .. } => {
                format!("The closest remaining sound is the {}", display_class(class))
            }
            Claim::StillAudible { class, .. } => {
                format!("The {} is still audible", display_class(class))
            }
            Claim::FarthestIs { class, sector } => {
                format!("The {}, to the {}", display_class(class), sector.label())
            }
            Claim::ImpossibleDistance { distance_m } => {
                format!("A sound source {distance_m:.1} m away from the listener")
            }
            Claim::SceneLabelIs { label } => title_class(label),
            Claim::ActivityLabelIs { label } => title_class(label),
            Claim::TranscriptIs { text } => format!("\u{201c}{text}\u{201d}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elev_ranges_partition_the_interval() {
        for el in [-90.0, -15.0001, -15.0, 0.0, 15.0, 15.001, 45.0, 45.001, 90.0] {
            let hits = ElevRange::ALL
                .iter()
                .filter(|r| ElevRange::of(el) == **r)
                .count();
            assert_eq!(hits, 1, "el {el}");
        }
        assert_eq!(ElevRange::of(-13.0), ElevRange::EyeLevel);
        assert_eq!(ElevRange::of(50.0), ElevRange::SteepAbove);
    }

    #[test]
    fn distance_option_text_reports_the_midpoint() {
        let c = Claim::DistanceWithin { class: "tone".into(), lo_m: 0.75 * 17.4, hi_m: 1.25 * 17.4 };
        assert_eq!(c.option_text(), "about 17.4 m away");
    }

    #[test]
    fn claims_serialize_with_a_kind_tag() {
        let c = Claim::CountIs { n: 2 };
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"kind\":\"count_is\""), "{s}");
        let back: Claim = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
