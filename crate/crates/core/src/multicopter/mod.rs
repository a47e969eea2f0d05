//! Multicopter failsafe case study: event catalog, plant, specifications
//! and the synthesis pipeline.

pub mod catalog;
pub mod pipeline;
pub mod plant;
pub mod policy;
pub mod specs;

pub use catalog::{build_event_catalog, catalog_alphabet, EventCatalog, ExclusiveGroup, FlightMode, HealthGroup};
pub use pipeline::{accepting_modes, build_full_specification, compose_specs, synthesize_failsafe, synthesize_with};
pub use plant::build_plant;
pub use policy::{decide, Health, Stick, Switch};
pub use specs::{build_example, build_spec, spec_manifest};
