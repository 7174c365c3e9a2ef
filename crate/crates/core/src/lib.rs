//! Solvers and verifiers for the first Robin-Neumann eigenvalue of the
//! p-Laplacian and the p-torsional rigidity on domains with a convex
//! hole, together with the convex-geometry machinery (quermassintegrals,
//! Steiner formulas, Aleksandrov-Fenchel margins) needed to certify the
//! shell bounds λ(β,Σ) ≤ λ(β,A) and T(β,Σ) ≥ T(β,A) numerically.

pub mod fem;
pub mod geometry;
pub mod gfmt;
pub mod mesh;
pub mod quad;
pub mod radial;
pub mod web;

pub use fem::{
    assemble_quotient, beta_derivative, maximize_torsion, minimize_eigen,
    minimize_eigen_dirichlet, torsion_quotient, trivial_bounds, FemError, MeshEigen, MeshTorsion,
    ScalarField,
};
pub use geometry::{
    af_check, ball_quermass, match_shell, match_shell_by_perimeter, unit_ball_volume, AfReport,
    ConvexBody, ConvexBody3D, ConvexPolygon, GeomError, Point2, QuermassVector, ShellSpec,
    SimplePolygon,
};
pub use mesh::{
    delaunay_violations, triangulate, triangulate_seeded, BoundaryTag, DomainSpec, Mesh, MeshError,
    MeshQuality,
};
pub use radial::{
    eigen_beta_derivative, level_speed, radial_dirichlet_neumann, solve_radial_eigen,
    solve_radial_torsion, BoundDirection, EigenResult, RadialError, RadialProfile, TorsionResult,
};
pub use web::{
    build_web_field, g_inverse_width, verify_eigen_chain, verify_torsion_chain, ChainCheck,
    WebChainReport, WebError, LEVEL_SLACK_COEFF, SLACK_COEFF,
};
