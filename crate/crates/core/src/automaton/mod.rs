//! The piecewise mother group, its random walk and ray trees.

mod boundary;
mod exhaustive;
mod group;
mod perm;
mod raytree;
mod walk;

pub use boundary::BoundaryPoint;
pub use exhaustive::{exhaustive_analysis, step_atoms, ExhaustiveReport, RayCountRow, SIGNATURE_DEPTH};
pub use group::{Automorphism, MotherGroup, Node, Section};
pub use perm::Perm;
pub use raytree::{
    build_ray_tree, count_small_ray_trees, lone_sections_propagating, RayTree, RayTreeCount, Vertex,
};
pub use walk::{
    forward_orbit, inverted_orbit, inverted_orbit_reference, sample_step, AssemblyLine, Generator, InvertedOrbit,
    InvertedWalker, OccupationMeasure, WalkWord,
};
