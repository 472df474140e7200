pub mod group;
pub mod number_field;
pub mod polyhedron;
pub mod quotient_cw;
pub mod homology;
pub mod borel_serre;
pub mod figures;
pub mod report;
