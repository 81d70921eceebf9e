//! Scene graph construction and the hidden rich-text scene description.
//!
//! Nodes are auditory objects (class + listener-relative spherical
//! coordinates plus derived sector/band labels); edges are the pairwise
//! relations used as ground truth for question generation. The rendered
//! description exists in two forms: canonical JSON with exact numerics and
//! deterministic template prose.

use serde::{Deserialize, Serialize};

use crate::acoustics::{RoomAcoustics, ANECHOIC_ALPHA};
use crate::geometry::{self, unit_from_angles, Vec3};
use crate::sampler::{Domain, ListenerSpec, RoomSpec, SceneSpec, SourcePalette};

/// Current RTSD JSON schema version.
pub const RTSD_SCHEMA_VERSION: u32 = 1;

/// 45-degree horizontal sectors centered on the cardinal/intercardinal
/// listener directions (counterclockwise-positive azimuth).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    Front,
    FrontLeft,
    Left,
    RearLeft,
    Rear,
    RearRight,
    Right,
    FrontRight,
}

impl Sector {
    pub const ALL: [Sector; 8] = [
        Sector::Front,
        Sector::FrontLeft,
        Sector::Left,
        Sector::RearLeft,
        Sector::Rear,
        Sector::RearRight,
        Sector::Right,
        Sector::FrontRight,
    ];

    pub fn from_azimuth(azimuth_deg: f64) -> Sector {
        let az = geometry::wrap_deg(azimuth_deg);
        let idx = (((az + 22.5) / 45.0).floor() as usize) % 8;
        Sector::ALL[idx]
    }

    /// Center azimuth of the sector in degrees.
    pub fn center_deg(&self) -> f64 {
        45.0 * Sector::ALL.iter().position(|s| s == self).unwrap() as f64
    }

    pub fn label(&self) -> &'static str {
        match self {
            Sector::Front => "front",
            Sector::FrontLeft => "front-left",
            Sector::Left => "left",
            Sector::RearLeft => "rear-left",
            Sector::Rear => "rear",
            Sector::RearRight => "rear-right",
            Sector::Right => "right",
            Sector::FrontRight => "front-right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElevationBand {
    Above,
    EyeLevel,
    Below,
}

impl ElevationBand {
    pub fn label(&self) -> &'static str {
        match self {
            ElevationBand::Above => "above eye level",
            ElevationBand::EyeLevel => "at eye level",
            ElevationBand::Below => "below eye level",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceBand {
    Near,
    Mid,
    Far,
}

impl DistanceBand {
    pub fn label(&self) -> &'static str {
        match self {
            DistanceBand::Near => "nearby",
            DistanceBand::Mid => "at medium range",
            DistanceBand::Far => "far away",
        }
    }
}

/// Verbal reverberation bucket derived from the mean absorption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReverbDescriptor {
    Anechoic,
    HighReverb,
    ModerateReverb,
    Dry,
}

impl ReverbDescriptor {
    pub fn from_absorption(alpha: f64) -> ReverbDescriptor {
        if alpha >= ANECHOIC_ALPHA {
            ReverbDescriptor::Anechoic
        } else if alpha < 0.25 {
            ReverbDescriptor::HighReverb
        } else if alpha < 0.5 {
            ReverbDescriptor::ModerateReverb
        } else {
            ReverbDescriptor::Dry
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ReverbDescriptor::Anechoic => "anechoic",
            ReverbDescriptor::HighReverb => "strongly reverberant",
            ReverbDescriptor::ModerateReverb => "moderately reverberant",
            ReverbDescriptor::Dry => "acoustically dry",
        }
    }
}

/// Band thresholds; the defaults are what the prose and the question
/// generator assume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RtsdConfig {
    pub elevation_above_deg: f64,
    pub elevation_below_deg: f64,
    pub near_max_m: f64,
    pub far_min_m: f64,
}

impl Default for RtsdConfig {
    fn default() -> Self {
        RtsdConfig {
            elevation_above_deg: 15.0,
            elevation_below_deg: -15.0,
            near_max_m: 2.0,
            far_min_m: 6.0,
        }
    }
}

impl RtsdConfig {
    pub fn elevation_band(&self, elevation_deg: f64) -> ElevationBand {
        if elevation_deg > self.elevation_above_deg {
            ElevationBand::Above
        } else if elevation_deg < self.elevation_below_deg {
            ElevationBand::Below
        } else {
            ElevationBand::EyeLevel
        }
    }

    pub fn distance_band(&self, distance_m: f64) -> DistanceBand {
        if distance_m < self.near_max_m {
            DistanceBand::Near
        } else if distance_m > self.far_min_m {
            DistanceBand::Far
        } else {
            DistanceBand::Mid
        }
    }
}

/// One auditory object: class plus exact and banded spatial attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioObject {
    pub object_id: usize,
    pub class_label: String,
    pub domain: Domain,
    pub azimuth_deg: f64,
    pub elevation_deg: f64,
    pub distance_m: f64,
    pub sector: Sector,
    pub elevation_band: ElevationBand,
    pub distance_band: DistanceBand,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
}

impl AudioObject {
    /// Listener-frame cartesian position (x front, y left, z up).
    pub fn listener_frame(&self) -> Vec3 {
        unit_from_angles(self.azimuth_deg, self.elevation_deg).scale(self.distance_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    CloserThan,
    LeftOf,
    RightOf,
    Above,
    Below,
    AngularSeparation,
}

/// A directed edge `subject -> object`; `value` carries degrees for
/// angular separation and is absent otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub subject_id: usize,
    pub object_id: usize,
    pub kind: RelationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

/// Room block of the scene graph: the sampled spec plus derived acoustics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomInfo {
    pub spec: RoomSpec,
    pub acoustics: RoomAcoustics,
}

/// The validated ground-truth graph for one scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGraph {
    pub scene_id: String,
    pub nodes: Vec<AudioObject>,
    pub edges: Vec<Relation>,
    pub room: RoomInfo,
    pub listener: ListenerSpec,
}

/// Distance ties at or below this margin suppress order-dependent edges.
const TIE_EPS_M: f64 = 1e-9;

/// Materializes all pairwise relations among `nodes`. Angular separation is
/// emitted once per unordered pair; directional and distance edges are
/// emitted in their true orientation and omitted on exact ties.
pub fn edges_for(nodes: &[AudioObject]) -> Vec<Relation> {
    let mut edges = Vec::new();
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let (a, b) = (&nodes[i], &nodes[j]);
            let sep = angular_separation(a, b);
            edges.push(Relation {
                subject_id: a.object_id,
                object_id: b.object_id,
                kind: RelationKind::AngularSeparation,
                value: Some(sep),
            });
            if (a.distance_m - b.distance_m).abs() > TIE_EPS_M {
                let (closer, farther) = if a.distance_m < b.distance_m { (a, b) } else { (b, a) };
                edges.push(Relation {
                    subject_id: closer.object_id,
                    object_id: farther.object_id,
                    kind: RelationKind::CloserThan,
                    value: None,
                });
            }
            let (pa, pb) = (a.listener_frame(), b.listener_frame());
            if (pa.y - pb.y).abs() > TIE_EPS_M {
                let kind = if pa.y > pb.y { RelationKind::LeftOf } else { RelationKind::RightOf };
                edges.push(Relation {
                    subject_id: a.object_id,
                    object_id: b.object_id,
                    kind,
                    value: None,
                });
            }
            if (pa.z - pb.z).abs() > TIE_EPS_M {
                let kind = if pa.z > pb.z { RelationKind::Above } else { RelationKind::Below };
                edges.push(Relation {
                    subject_id: a.object_id,
                    object_id: b.object_id,
                    kind,
                    value: None,
                });
            }
        }
    }
    edges
}

/// Angle in degrees between the two objects' arrival directions.
pub fn angular_separation(a: &AudioObject, b: &AudioObject) -> f64 {
    geometry::angular_separation_deg(
        &unit_from_angles(a.azimuth_deg, a.elevation_deg),
        &unit_from_angles(b.azimuth_deg, b.elevation_deg),
    )
}

/// Builds the graph for a scene: one node per source with derived
/// sector/band labels, all pairwise relations, room and listener context.
/// A palette provides transcripts for dry references that have them.
pub fn build_scene_graph(
    scene: &SceneSpec,
    acoustics: &RoomAcoustics,
    cfg: &RtsdConfig,
    palette: Option<&SourcePalette>,
) -> SceneGraph {
    let nodes: Vec<AudioObject> = scene
        .sources
        .iter()
        .map(|s| AudioObject {
            object_id: s.source_id,
            class_label: s.class_label.clone(),
            domain: s.domain,
            azimuth_deg: s.azimuth,
            elevation_deg: s.elevation,
            distance_m: s.distance,
            sector: Sector::from_azimuth(s.azimuth),
            elevation_band: cfg.elevation_band(s.elevation),
            distance_band: cfg.distance_band(s.distance),
            transcript: palette.and_then(|p| {
                p.entries
                    .iter()
                    .find(|e| e.dry_ref == s.dry_ref)
                    .and_then(|e| e.transcript.clone())
            }),
        })
        .collect();
    let edges = edges_for(&nodes);
    SceneGraph {
        scene_id: scene.scene_id.clone(),
        nodes,
        edges,
        room: RoomInfo {
            spec: scene.room.clone(),
            acoustics: acoustics.clone(),
        },
        listener: scene.listener.clone(),
    }
}

/// The hidden scene description: graph plus its two serial forms.
#[derive(Debug, Clone)]
pub struct Rtsd {
    pub scene_id: String,
    pub graph: SceneGraph,
    pub text: String,
    pub json: String,
}

/// Serialized wrapper for the RTSD JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtsdDoc {
    pub schema_version: u32,
    #[serde(flatten)]
    pub graph: SceneGraph,
}

fn describe_relations(graph: &SceneGraph) -> String {
    let name = |id: usize| {
        graph
            .nodes
            .iter()
            .position(|n| n.object_id == id)
            .map(|idx| format!("source {}", idx + 1))
            .unwrap_or_else(|| format!("object {id}"))
    };
    let mut parts = Vec::new();
    for e in &graph.edges {
        match e.kind {
            RelationKind::CloserThan => {
                parts.push(format!("{} is closer than {}", name(e.subject_id), name(e.object_id)))
            }
            RelationKind::AngularSeparation => parts.push(format!(
                "{} and {} are {:.0}° apart",
                name(e.subject_id),
                name(e.object_id),
                e.value.unwrap_or(0.0)
            )),
            _ => {}
        }
    }
    parts.join("; ")
}

/// Renders the deterministic prose + canonical JSON forms of a graph.
pub fn render_rtsd(graph: &SceneGraph) -> Rtsd {
    let doc = RtsdDoc { schema_version: RTSD_SCHEMA_VERSION, graph: graph.clone() };
    let json = serde_json::to_string_pretty(&doc).expect("rtsd serialization");

    let room = &graph.room;
    let reverb = ReverbDescriptor::from_absorption(room.acoustics.mean_absorption);
    let mut text = String::new();
    text.push_str(&format!(
        "Room: a {} {:.1} m x {:.1} m x {:.1} m space, {} (mean absorption {:.2}, RT60 {:.2} s).\n",
        room.spec.size_category.label(),
        room.spec.dims.x,
        room.spec.dims.y,
        room.spec.dims.z,
        reverb.label(),
        room.acoustics.mean_absorption,
        room.acoustics.rt60_s,
    ));
    text.push_str(&format!(
        "Listener: at ({:.2}, {:.2}, {:.2}) m, facing the +x direction.\n",
        graph.listener.position.x, graph.listener.position.y, graph.listener.position.z,
    ));
    let n = graph.nodes.len();
    text.push_str(&format!(
        "The scene contains {n} sound source{}.\n",
        if n == 1 { "" } else { "s" }
    ));
    for (idx, node) in graph.nodes.iter().enumerate() {
        text.push_str(&format!(
            "Source {}: {} at azimuth {:.0}°, elevation {:.0}°, distance {:.1} m ({} sector, {}, {}).\n",
            idx + 1,
            node.class_label.replace('_', " "),
            node.azimuth_deg,
            node.elevation_deg,
            node.distance_m,
            node.sector.label(),
            node.elevation_band.label(),
            node.distance_band.label(),
        ));
    }
    let relations = describe_relations(graph);
    if !relations.is_empty() {
        text.push_str(&format!("Relations: {relations}.\n"));
    }
    Rtsd { scene_id: graph.scene_id.clone(), graph: graph.clone(), text, json }
}
