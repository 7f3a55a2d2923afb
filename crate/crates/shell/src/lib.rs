//! Linear Kirchhoff-Love shell: materials, strain operators, assembly, and norms.

pub mod assembly;
pub mod bcs;
pub mod exact;
pub mod material;
pub mod norms;
pub mod patch;
pub mod strain;

pub use assembly::{invert_point, Assembler, ElementData};
pub use bcs::{apply_dirichlet, BoundaryData, DirichletBc};
pub use exact::{CartesianDerivs, CartesianField, ExactSolution, NormalField, ParametricField, ScalarJet, Zero};
pub use material::{constitutive_isotropic, laminate_abd, Abd, Material, Ply, Voigt};
pub use norms::{error_norms, ErrorNorms};
pub use patch::{DofMap, Patch, Solution};
pub use strain::{jet_strains, normal_rotation, normal_variation, strain_ops, Jet, StrainOps};
