//! Interfaces: periodic graphs `y = η(x)` and arc-length curves in `T × R`.

pub mod curve;
pub mod graph;
pub mod tubular;

pub use curve::{
    chord_arc_constant, chord_arc_of_nodes, epsilon_from_parts, epsilon_of_state, length_curvature_bound,
    ArcCurve, ChordArc, LengthBound, Orientation,
};
pub use graph::GraphInterface;
pub use tubular::{tubular_map_check, TubularGrid, TubularMap, TubularReport, DEFAULT_N0};

use crate::error::Result;

/// Either kind of interface, for operations defined on both.
#[derive(Debug, Clone, Copy)]
pub enum Interface<'a> {
    Graph(&'a GraphInterface),
    Curve(&'a ArcCurve),
}

impl<'a> From<&'a GraphInterface> for Interface<'a> {
    fn from(g: &'a GraphInterface) -> Self {
        Interface::Graph(g)
    }
}

impl<'a> From<&'a ArcCurve> for Interface<'a> {
    fn from(c: &'a ArcCurve) -> Self {
        Interface::Curve(c)
    }
}

pub fn curvature<'a>(interface: impl Into<Interface<'a>>) -> Result<Vec<f64>> {
    match interface.into() {
        Interface::Graph(g) => g.curvature(),
        Interface::Curve(c) => c.curvature(),
    }
}
