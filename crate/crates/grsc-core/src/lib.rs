//! Verification toolkit for graphical small cancellation theory.
//!
//! The crate works on finite labelled graphs: it decides C(n), C'(λ), Gr(n)
//! and Gr'(λ), extracts presentations, solves bounded word problems, checks
//! van Kampen diagrams against the curvature formulas and evaluates the
//! embedding and lacunarity criteria.

pub mod alphabet;
pub mod conditions;
pub mod corpus;
pub mod cycles;
pub mod diagram;
pub mod format;
pub mod geometry;
pub mod graph;
pub mod pieces;
pub mod presentation;
pub mod quotients;
pub mod solver;
pub mod word;
