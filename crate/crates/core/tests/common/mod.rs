#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use ie_core::text::Document;
use ie_core::{Pipeline, PipelineConfig};

pub fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

pub fn read(rel: &str) -> String {
    std::fs::read_to_string(repo_path(rel)).unwrap()
}

pub fn pipeline() -> Pipeline {
    Pipeline::load(&PipelineConfig::load(&repo_path("resources/default.conf")).unwrap()).unwrap()
}

pub fn fixture() -> Document {
    Document::new("extended_example", read("fixtures/extended_example.txt"))
}
