//! The bundled example systems.

use crate::document::SystemDocument;

const FILES: [(&str, &str); 5] = [
    ("example1", include_str!("../corpus/example1.json")),
    ("example2", include_str!("../corpus/example2.json")),
    ("example3", include_str!("../corpus/example3.json")),
    ("example4", include_str!("../corpus/example4.json")),
    ("example5", include_str!("../corpus/example5.json")),
];

/// Raw JSON of every bundled example, keyed by file stem.
pub fn sources() -> &'static [(&'static str, &'static str)] {
    &FILES
}

pub fn documents() -> Vec<SystemDocument> {
    FILES
        .iter()
        .map(|(name, text)| {
            SystemDocument::parse(text).unwrap_or_else(|e| panic!("bundled {name}: {e}"))
        })
        .collect()
}

pub fn document(name: &str) -> Option<SystemDocument> {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| SystemDocument::parse(text).expect("bundled documents are valid"))
}
