//! Rule tables mapping scene signatures to abduction/intent labels.
//! Shipped as a data file so the labels stay oracle-checkable; the first
//! matching rule wins, and a trailing catch-all keeps the lookup total.

use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::rtsd::{ReverbDescriptor, SceneGraph};
use crate::sampler::{Domain, SizeCategory};

/// Scene-level rule: any unset field is a wildcard.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<SizeCategory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reverb: Option<ReverbDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    pub label: String,
}

/// Intent rule keyed on the most salient (closest) source class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActivityRule {
    pub class: String,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleTable {
    pub scene_rules: Vec<SceneRule>,
    pub activity_rules: Vec<ActivityRule>,
}

static BUILTIN: LazyLock<RuleTable> = LazyLock::new(|| {
    serde_json::from_str(include_str!("../../assets/abduction_rules.json"))
        .expect("bundled rule table parses")
});

/// The domain most sources belong to; ties resolve toward the closest
/// source, then by enum order.
fn dominant_domain(graph: &SceneGraph) -> Option<Domain> {
    if graph.nodes.is_empty() {
        return None;
    }
    let order = [Domain::Environmental, Domain::Speech, Domain::Music];
    let counts: Vec<usize> = order
        .iter()
        .map(|d| graph.nodes.iter().filter(|n| n.domain == *d).count())
        .collect();
    let best = *counts.iter().max().unwrap();
    let tied: Vec<Domain> = order
        .iter()
        .zip(&counts)
        .filter(|(_, c)| **c == best)
        .map(|(d, _)| *d)
        .collect();
    if tied.len() == 1 {
        return Some(tied[0]);
    }
    let mut by_distance: Vec<_> = graph.nodes.iter().collect();
    by_distance.sort_by(|a, b| {
        a.distance_m
            .partial_cmp(&b.distance_m)
            .unwrap()
            .then(a.object_id.cmp(&b.object_id))
    });
    by_distance
        .iter()
        .map(|n| n.domain)
        .find(|d| tied.contains(d))
        .or(Some(tied[0]))
}

impl RuleTable {
    /// Bundled default table.
    pub fn builtin() -> &'static RuleTable {
        &BUILTIN
    }

    pub fn from_json(json: &str) -> Result<RuleTable, serde_json::Error> {
        serde_json::from_str(json)
    }

    /// Most plausible scene label for the graph's (size, reverb, domain)
    /// signature.
    pub fn scene_label(&self, graph: &SceneGraph) -> Option<String> {
        let size = graph.room.spec.size_category;
        let reverb = ReverbDescriptor::from_absorption(graph.room.acoustics.mean_absorption);
        let domain = dominant_domain(graph)?;
        self.scene_rules
            .iter()
            .find(|r| {
                r.size.is_none_or(|s| s == size)
                    && r.reverb.is_none_or(|v| v == reverb)
                    && r.domain.is_none_or(|d| d == domain)
            })
            .map(|r| r.label.clone())
    }

    /// Activity implied by the closest source's class, when a rule exists.
    pub fn activity_label(&self, graph: &SceneGraph) -> Option<String> {
        let mut nodes: Vec<_> = graph.nodes.iter().collect();
        nodes.sort_by(|a, b| {
            a.distance_m
                .partial_cmp(&b.distance_m)
                .unwrap()
                .then(a.object_id.cmp(&b.object_id))
        });
        let closest = nodes.first()?;
        self.activity_rules
            .iter()
            .find(|r| r.class == closest.class_label)
            .map(|r| r.label.clone())
    }

    /// Distinct scene labels, for distractor pools.
    pub fn scene_label_pool(&self) -> Vec<String> {
        let mut v: Vec<String> = self.scene_rules.iter().map(|r| r.label.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Distinct activity labels, for distractor pools.
    pub fn activity_label_pool(&self) -> Vec<String> {
        let mut v: Vec<String> = self.activity_rules.iter().map(|r| r.label.clone()).collect();
        v.sort();
        v.dedup();
        v
    }
}
