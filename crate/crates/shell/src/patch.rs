use crate::material::Material;
use crate::strain::{eval_jet, Jet};
use isoshell_core::error::{Error, Result};
use isoshell_core::math::Vec3;
use isoshell_geometry::{SurfaceFrame, SurfaceMap};
use isoshell_spline::SplineSpace;
use isoshell_trimming::{classify_elements, TrimCurve, TrimmedDomain};

/// Shell patch: geometry map, discretization space, trimmed domain, and material.
#[derive(Clone, Debug)]
pub struct Patch {
    pub name: String,
    pub geometry: SurfaceMap,
    /// Polynomial tensor-product space of the displacement components.
    pub space: SplineSpace,
    pub domain: TrimmedDomain,
    pub material: Material,
}

fn merged_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    all.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
    all
}

impl Patch {
    pub fn new(
        name: impl Into<String>,
        geometry: SurfaceMap,
        space: SplineSpace,
        trims: Vec<TrimCurve>,
        material: Material,
    ) -> Result<Self> {
        material.validate()?;
        if space.dim() != 2 || space.is_rational() {
            return Err(Error::Invalid("discretization spaces must be polynomial surfaces".into()));
        }
        for d in 0..2 {
            let dom = space.dir(d).domain();
            let gdom = geometry.space().dir(d).domain();
            if dom != (0.0, 1.0) || gdom != (0.0, 1.0) {
                return Err(Error::Invalid("patches are parametrized over the unit square".into()));
            }
        }
        let ub = merged_breaks(&space.dir(0).breakpoints(), &geometry.space().dir(0).breakpoints());
        let vb = merged_breaks(&space.dir(1).breakpoints(), &geometry.space().dir(1).breakpoints());
        let domain = classify_elements(&ub, &vb, &trims)?;
        Ok(Self { name: name.into(), geometry, space, domain, material })
    }

    pub fn degree(&self) -> usize {
        self.space.dir(0).degree().max(self.space.dir(1).degree())
    }

    pub fn frame(&self, uv: [f64; 2], k: usize) -> Result<SurfaceFrame> {
        self.geometry.frame(uv, k)
    }

    pub fn active_functions(&self) -> Vec<bool> {
        self.domain.active_functions(&self.space)
    }
}

/// Global numbering: dof = offset(patch) + 3 * active_index + component.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub offsets: Vec<usize>,
    pub local: Vec<Vec<Option<usize>>>,
    pub n_dofs: usize,
}

impl DofMap {
    pub fn new(patches: &[Patch]) -> Self {
        let mut offsets = Vec::new();
        let mut local = Vec::new();
        let mut n = 0;
        for p in patches {
            offsets.push(n);
            let mut count = 0;
            let map: Vec<Option<usize>> = p
                .active_functions()
                .into_iter()
                .map(|a| {
                    a.then(|| {
                        count += 1;
                        count - 1
                    })
                })
                .collect();
            n += 3 * count;
            local.push(map);
        }
        Self { offsets, local, n_dofs: n }
    }

    pub fn dof(&self, patch: usize, function: usize, comp: usize) -> Option<usize> {
        self.local[patch][function].map(|a| self.offsets[patch] + 3 * a + comp)
    }

    /// Global dofs of the listed functions (three per function; inactive ones panic).
    pub fn dofs_of(&self, patch: usize, functions: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(3 * functions.len());
        for &f in functions {
            let base = self.dof(patch, f, 0).expect("function is active");
            out.extend([base, base + 1, base + 2]);
        }
        out
    }

    pub fn n_patch_dofs(&self, patch: usize) -> usize {
        let end = self.offsets.get(patch + 1).copied().unwrap_or(self.n_dofs);
        end - self.offsets[patch]
    }
}

/// Solved displacement coefficients.
#[derive(Clone, Debug)]
pub struct Solution {
    pub dofs: DofMap,
    pub coeffs: Vec<f64>,
}

impl Solution {
    pub fn coefficient(&self, patch: usize, function: usize) -> Option<Vec3> {
        let b = self.dofs.dof(patch, function, 0)?;
        Some([self.coeffs[b], self.coeffs[b + 1], self.coeffs[b + 2]])
    }

    /// Displacement jet (derivatives up to `order`, at most 2) at a parameter point.
    pub fn jet(&self, patches: &[Patch], patch: usize, uv: [f64; 2], order: usize) -> Result<Jet> {
        let basis = patches[patch].space.eval(&uv, order)?;
        Ok(eval_jet(&basis, |f| self.coefficient(patch, f)))
    }

    pub fn displacement(&self, patches: &[Patch], patch: usize, uv: [f64; 2]) -> Result<Vec3> {
        Ok(self.jet(patches, patch, uv, 0)?.u)
    }
}
