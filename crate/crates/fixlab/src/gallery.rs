//! Built-in scenarios with expected outcomes.

use crate::scenario::{self, Scenario};

const SOURCES: [(&str, &str); 8] = [
    ("banach-half", include_str!("../gallery/banach-half.toml")),
    ("meir-keeler", include_str!("../gallery/meir-keeler.toml")),
    ("translation", include_str!("../gallery/translation.toml")),
    ("periodic", include_str!("../gallery/periodic.toml")),
    ("cyclic-line", include_str!("../gallery/cyclic-line.toml")),
    ("alternating-45", include_str!("../gallery/alternating-45.toml")),
    ("composed-G", include_str!("../gallery/composed-G.toml")),
    ("harmonic-divergent", include_str!("../gallery/harmonic-divergent.toml")),
];

#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub scenario: Scenario,
}

impl GalleryEntry {
    pub fn description(&self) -> &str {
        &self.scenario.description
    }
}

/// All entries in a fixed order.
pub fn list_gallery() -> Vec<GalleryEntry> {
    SOURCES
        .iter()
        .map(|(name, source)| GalleryEntry {
            name,
            source,
            scenario: scenario::parse(source)
                .unwrap_or_else(|d| panic!("gallery entry {} does not parse: {:?}", name, d)),
        })
        .collect()
}

pub fn find(name: &str) -> Option<GalleryEntry> {
    list_gallery().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn entries_are_valid_and_unique() {
        let g = list_gallery();
        assert!(g.len() >= 8);
        let names: HashSet<&str> = g.iter().map(|e| e.name).collect();
        assert_eq!(names.len(), g.len());
        for e in &g {
            assert_eq!(e.scenario.name, e.name);
            assert!(!e.description().is_empty());
            let d = scenario::validate(&e.scenario);
            assert!(d.is_empty(), "{}: {:?}", e.name, d);
            assert!(find(e.name).is_some());
        }
    }
}
