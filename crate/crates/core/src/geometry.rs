//! Toric Kähler data on the sphere and plane polytopes.
//!
//! Points of the polytope are moment-map values `x`. The polytope always
//! starts at `a = -1/2`; the sphere ends at `N - 1/2`, the plane is
//! unbounded. The imaginary-time deformation by `H(x) = x²/2` adds
//! `s·x²/2` to the symplectic potential, and every derived quantity below
//! is an analytic closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower end of every polytope.
pub const BOUNDARY_OFFSET: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Sphere,
    Plane,
}

impl SurfaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Plane => "plane",
        }
    }
}

impl std::str::FromStr for SurfaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sphere" => Ok(SurfaceKind::Sphere),
            "plane" => Ok(SurfaceKind::Plane),
            other => Err(Error::Config(format!("unknown surface `{other}`"))),
        }
    }
}

/// A surface together with its orbital count `N`.
///
/// For the sphere `N` fixes the polytope `[-1/2, N - 1/2]` and hence the
/// number of lowest-Landau-level orbitals. For the plane the polytope is
/// `[-1/2, ∞)` and `N` only caps orbital enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    pub orbital_count: u32,
}

impl SurfaceSpec {
    pub fn new(kind: SurfaceKind, orbital_count: u32) -> Result<Self> {
        if orbital_count == 0 {
            return Err(Error::Domain("orbital count must be positive".into()));
        }
        Ok(SurfaceSpec {
            kind,
            orbital_count,
        })
    }

    pub fn sphere(orbital_count: u32) -> Result<Self> {
        Self::new(SurfaceKind::Sphere, orbital_count)
    }

    pub fn plane(orbital_count: u32) -> Result<Self> {
        Self::new(SurfaceKind::Plane, orbital_count)
    }

    pub fn lower(&self) -> f64 {
        BOUNDARY_OFFSET
    }

    /// Upper end of the polytope, `None` for the plane.
    pub fn upper(&self) -> Option<f64> {
        match self.kind {
            SurfaceKind::Sphere => Some(f64::from(self.orbital_count) + BOUNDARY_OFFSET),
            SurfaceKind::Plane => None,
        }
    }

    pub fn is_interior(&self, x: f64) -> bool {
        x.is_finite() && x > self.lower() && self.upper().is_none_or(|b| x < b)
    }

    /// Whether `m` labels an orbital of this surface.
    pub fn has_level(&self, m: u32) -> bool {
        m < self.orbital_count
    }

    fn outside(&self, x: f64) -> Error {
        Error::Domain(format!(
            "x = {x} is not inside the {} polytope with N = {}",
            self.kind.name(),
            self.orbital_count
        ))
    }

    /// The interior point `x`.
    pub fn point(&self, x: f64) -> Result<PolytopePoint> {
        if !self.is_interior(x) {
            return Err(self.outside(x));
        }
        Ok(PolytopePoint {
            x,
            lower_gap: x - BOUNDARY_OFFSET,
            upper_gap: self.upper().map_or(f64::INFINITY, |b| b - x),
        })
    }

    /// The point at distance `d` above the lower facet.
    pub fn point_from_lower(&self, d: f64) -> Result<PolytopePoint> {
        let x = BOUNDARY_OFFSET + d;
        let upper_gap = match self.upper() {
            Some(_) => f64::from(self.orbital_count) - d,
            None => f64::INFINITY,
        };
        if !(d > 0.0 && upper_gap > 0.0) {
            return Err(self.outside(x));
        }
        Ok(PolytopePoint { x, lower_gap: d, upper_gap })
    }

    /// The point at distance `d` below the upper facet (sphere only).
    pub fn point_from_upper(&self, d: f64) -> Result<PolytopePoint> {
        let b = self
            .upper()
            .ok_or_else(|| Error::Domain("the plane has no upper facet".into()))?;
        let lower_gap = f64::from(self.orbital_count) - d;
        if !(d > 0.0 && lower_gap > 0.0) {
            return Err(self.outside(b - d));
        }
        Ok(PolytopePoint { x: b - d, lower_gap, upper_gap: d })
    }

    /// Canonical symplectic potential. The plane uses the shifted potential
    /// `½(x+½)log 2(x+½) − x/2`, which differs from the canonical one by a
    /// linear term only.
    pub fn canonical_potential(&self, x: f64) -> Result<f64> {
        Ok(self.canonical_potential_at(&self.point(x)?))
    }

    pub fn canonical_potential_at(&self, p: &PolytopePoint) -> f64 {
        let (u, v) = (p.lower_gap, p.upper_gap);
        match self.kind {
            SurfaceKind::Sphere => 0.5 * (u * u.ln() + v * v.ln()),
            SurfaceKind::Plane => 0.5 * u * (2.0 * u).ln() - 0.5 * p.x,
        }
    }

    /// First derivative of the canonical potential.
    pub fn canonical_gradient(&self, x: f64) -> Result<f64> {
        Ok(self.canonical_gradient_at(&self.point(x)?))
    }

    pub fn canonical_gradient_at(&self, p: &PolytopePoint) -> f64 {
        let (u, v) = (p.lower_gap, p.upper_gap);
        match self.kind {
            SurfaceKind::Sphere => 0.5 * (u.ln() - v.ln()),
            SurfaceKind::Plane => 0.5 * (2.0 * u).ln(),
        }
    }

    /// Second derivative of the canonical potential.
    pub fn canonical_hessian(&self, x: f64) -> Result<f64> {
        Ok(self.canonical_hessian_at(&self.point(x)?))
    }

    pub fn canonical_hessian_at(&self, p: &PolytopePoint) -> f64 {
        let (u, v) = (p.lower_gap, p.upper_gap);
        match self.kind {
            SurfaceKind::Sphere => 0.5 * (1.0 / u + 1.0 / v),
            SurfaceKind::Plane => 0.5 / u,
        }
    }
}

/// An interior point of a polytope together with its distances to the two
/// facets. Near a facet the distance is carried exactly even when `x`
/// rounds onto the facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolytopePoint {
    pub x: f64,
    /// `x − a`
    pub lower_gap: f64,
    /// `N + a − x`, infinite on the plane.
    pub upper_gap: f64,
}

/// A surface deformed by imaginary time `s` along the flow of `x²/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformedGeometry {
    pub surface: SurfaceSpec,
    pub s: f64,
}

impl DeformedGeometry {
    pub fn new(surface: SurfaceSpec, s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return Err(Error::Domain(format!(
                "deformation time must be finite and non-negative, got {s}"
            )));
        }
        Ok(DeformedGeometry { surface, s })
    }

    /// `g_s(x) = g_P(x) + s·x²/2`.
    pub fn potential(&self, x: f64) -> Result<f64> {
        Ok(self.potential_at(&self.surface.point(x)?))
    }

    pub fn potential_at(&self, p: &PolytopePoint) -> f64 {
        self.surface.canonical_potential_at(p) + 0.5 * self.s * p.x * p.x
    }

    /// `y_s(x) = g_s'(x)`, the real part of the log-holomorphic coordinate.
    pub fn moment_to_log(&self, x: f64) -> Result<f64> {
        Ok(self.moment_to_log_at(&self.surface.point(x)?))
    }

    pub fn moment_to_log_at(&self, p: &PolytopePoint) -> f64 {
        self.surface.canonical_gradient_at(p) + self.s * p.x
    }

    /// Kähler potential `κ_s = x·y_s − g_s`.
    pub fn kahler_potential(&self, x: f64) -> Result<f64> {
        Ok(self.kahler_potential_at(&self.surface.point(x)?))
    }

    pub fn kahler_potential_at(&self, p: &PolytopePoint) -> f64 {
        p.x * self.moment_to_log_at(p) - self.potential_at(p)
    }

    /// Metric coefficient `g_s''(x)`; the metric is `g_s'' dx² + dθ²/g_s''`.
    pub fn metric_coeff(&self, x: f64) -> Result<f64> {
        Ok(self.metric_coeff_at(&self.surface.point(x)?))
    }

    pub fn metric_coeff_at(&self, p: &PolytopePoint) -> f64 {
        self.surface.canonical_hessian_at(p) + self.s
    }

    /// Scalar curvature `−(1/g_s'')''` from Abreu's formula.
    pub fn scalar_curvature(&self, x: f64) -> Result<f64> {
        let p = self.surface.point(x)?;
        let s = self.s;
        let (u, v) = (p.lower_gap, p.upper_gap);
        Ok(match self.surface.kind {
            // 1/g'' = 2u / (1 + 2su)
            SurfaceKind::Plane => {
                let d = 1.0 + 2.0 * s * u;
                8.0 * s / (d * d * d)
            }
            // 1/g'' = 2q / (N + 2sq) with q = uv, q' = v - u, q'' = -2
            SurfaceKind::Sphere => {
                let n = f64::from(self.surface.orbital_count);
                let q = u * v;
                let d = n + 2.0 * s * q;
                let dq = v - u;
                4.0 * n / (d * d) + 8.0 * s * n * dq * dq / (d * d * d)
            }
        })
    }
}
