//! Spin-1/2 transport along curves embedded in curved surfaces.
//!
//! The crate evaluates the Darboux geometry of a channel curve on a host
//! surface, assembles the emergent SU(2) gauge field `β = (τ_g, κ_g, -κ_n)`
//! and the scalar potentials, and propagates spin states with path-ordered
//! SU(2) products. Topological flux relations and a two-arm ring
//! interferometer are built on top.
//!
//! All numerics are generic over [`Real`] (`f32`, `f64`); the aliases at the
//! crate root fix `f64`, which is what the CLI and the tolerances assume.
//! Units: `ħ = 1`, `2m = 1`.

pub mod catalog;
pub mod conventions;
pub mod curve;
pub mod error;
pub mod fermi;
pub mod frames;
pub mod hamiltonian;
pub mod interferometer;
pub mod quadrature;
pub mod reference;
pub mod scalar;
pub mod su2;
pub mod surface;
pub mod topology;
pub mod transport;
pub mod vec3;

pub use catalog::{build_curve, default_curve, CurveId, CurveParams};
pub use curve::{ChartPath, CurveOnSurface};
pub use error::{Error, ErrorClass, Result};
pub use conventions::{convention_report, ConventionReport};
pub use fermi::{FermiPoint, GeodesicEnd};
pub use frames::{DarbouxSample, FrenetSample};
pub use hamiltonian::{BetaSample, PotentialSample};
pub use interferometer::{conductance_sweep, transmission_matrix, InterferometerSpec, Transmission};
pub use reference::{closed_form_reference, ClosedFormReference};
pub use scalar::{Jet, Real, Smooth};
pub use su2::{su2_exp, wilson_loop, SU2Operator, Spinor};
pub use surface::{Chart, CurvatureReport, DerivativeMode, Orientation, PoleAxis, SurfacePatch};
pub use topology::{boundary_rotation_angle, gauss_bonnet_and_flux, region_curvature_integral, FluxReport, Region};
pub use transport::{
    adiabatic_propagator, evolve_spin_texture, ode_propagator_oracle, path_ordered_propagator, FieldCoupling, FieldOptions,
    SpinTexture,
};
pub use vec3::{Frame, Vec3};

pub type Vector3 = Vec3<f64>;
pub type Surface = SurfacePatch<f64>;
pub type Curve = CurveOnSurface<f64>;
pub type Operator = SU2Operator<f64>;
pub type Flux = FluxReport<f64>;
