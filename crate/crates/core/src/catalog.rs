//! Named measures and bodies, built-in or loaded from a JSON catalog file of
//! `{variant, dimension, parameters}` descriptors.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bodies::ConvexBody;
use crate::densities::{AffineMap, LogConcaveDensity};
use crate::error::{LcError, Result};

/// Built-in measure keys, all isotropic.
pub const MEASURE_KEYS: [&str; 9] = ["gaussian", "cube-exp", "radial-exp", "radial-p4", "pexp-1", "pexp-4", "hyperbolic", "uniform-cube", "centered-exp"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyDescriptor {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub parameters: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineDescriptor {
    pub center: Vec<f64>,
    pub linear: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDescriptor {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub parameters: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub affine: Option<AffineDescriptor>,
}

fn param<T: serde::de::DeserializeOwned>(params: &Value, key: &str) -> Result<T> {
    let v = params.get(key).ok_or_else(|| LcError::InvalidParameter(format!("missing parameter {key:?}")))?;
    serde_json::from_value(v.clone()).map_err(|e| LcError::InvalidParameter(format!("parameter {key:?}: {e}")))
}

fn param_or<T: serde::de::DeserializeOwned>(params: &Value, key: &str, default: T) -> Result<T> {
    if params.get(key).is_some() {
        param(params, key)
    } else {
        Ok(default)
    }
}

fn resolve_dim(given: Option<usize>, n: usize) -> Result<usize> {
    let d = given.unwrap_or(n);
    if d == 0 {
        return Err(LcError::InvalidParameter("dimension must be positive".into()));
    }
    Ok(d)
}

impl BodyDescriptor {
    pub fn new(variant: &str, parameters: Value) -> Self {
        BodyDescriptor { variant: variant.into(), dimension: None, parameters }
    }

    /// Builds the body; `n` is used when the descriptor has no dimension.
    pub fn build(&self, n: usize) -> Result<ConvexBody<f64>> {
        let d = resolve_dim(self.dimension, n)?;
        let p = &self.parameters;
        match self.variant.as_str() {
            "ball" => ConvexBody::ball(d, param_or(p, "radius", 1.0)?),
            "cube" => ConvexBody::cube(d, param_or(p, "half_width", 1.0)?),
            "unit-cube" => ConvexBody::cube(d, 0.5),
            "box" => ConvexBody::boxed(param(p, "half_widths")?),
            "lp-ball" => ConvexBody::lp_ball(d, param(p, "p")?, param_or(p, "radius", 1.0)?),
            "cross-polytope" => ConvexBody::lp_ball(d, 1.0, param_or(p, "radius", 1.0)?),
            "v-polytope" => ConvexBody::v_polytope(&param::<Vec<Vec<f64>>>(p, "vertices")?),
            "symmetric-polytope" => ConvexBody::v_polytope_symmetric(&param::<Vec<Vec<f64>>>(p, "half")?),
            "h-polytope" => ConvexBody::h_polytope(&param::<Vec<Vec<f64>>>(p, "normals")?, &param::<Vec<f64>>(p, "offsets")?),
            other => Err(LcError::UnsupportedVariant(format!("body variant {other:?}"))),
        }
    }
}

impl MeasureDescriptor {
    pub fn new(variant: &str, parameters: Value) -> Self {
        MeasureDescriptor { variant: variant.into(), dimension: None, parameters, affine: None }
    }

    pub fn build(&self, n: usize) -> Result<LogConcaveDensity> {
        let d = resolve_dim(self.dimension, n)?;
        let p = &self.parameters;
        let body = |key: &str| -> Result<ConvexBody<f64>> { param::<BodyDescriptor>(p, key)?.build(d) };
        let base = match self.variant.as_str() {
            "gaussian" => LogConcaveDensity::gaussian_scaled(d, param_or(p, "variance", 1.0)?)?,
            "cube-exp" => LogConcaveDensity::isotropic_cube_exp(d),
            "norm-exponential" => LogConcaveDensity::norm_exponential(body("body")?)?,
            "radial-power" => LogConcaveDensity::radial_power(d, param(p, "p")?)?,
            "product-pexp" => LogConcaveDensity::product_pexp(d, param(p, "p")?)?,
            "hyperbolic" => match p.get("a") {
                Some(_) => LogConcaveDensity::product_hyperbolic(d, param(p, "a")?)?,
                None => LogConcaveDensity::isotropic_hyperbolic(d),
            },
            "uniform" => LogConcaveDensity::uniform(body("body")?)?,
            "uniform-cube" => LogConcaveDensity::isotropic_uniform_cube(d),
            "centered-exp" => LogConcaveDensity::product_centered_exp(d),
            other => return Err(LcError::UnsupportedVariant(format!("measure variant {other:?}"))),
        };
        match &self.affine {
            None => Ok(base),
            Some(a) => LogConcaveDensity::pushforward(Arc::new(base), AffineMap::new(a.center.clone(), a.linear.clone())?),
        }
    }
}

/// Descriptor of a built-in measure key.
pub fn builtin_measure(key: &str) -> Option<MeasureDescriptor> {
    let m = |variant: &str, params: Value| Some(MeasureDescriptor::new(variant, params));
    match key {
        "gaussian" => m("gaussian", Value::Null),
        "cube-exp" => m("cube-exp", Value::Null),
        "radial-exp" => m("radial-power", serde_json::json!({"p": 1.0})),
        "radial-p4" => m("radial-power", serde_json::json!({"p": 4.0})),
        "pexp-1" => m("product-pexp", serde_json::json!({"p": 1.0})),
        "pexp-4" => m("product-pexp", serde_json::json!({"p": 4.0})),
        "hyperbolic" => m("hyperbolic", Value::Null),
        "uniform-cube" => m("uniform-cube", Value::Null),
        "centered-exp" => m("centered-exp", Value::Null),
        _ => None,
    }
}

/// Descriptor of a built-in body key.
pub fn builtin_body(key: &str) -> Option<BodyDescriptor> {
    match key {
        "ball" | "cube" | "unit-cube" | "cross-polytope" => Some(BodyDescriptor::new(key, Value::Null)),
        _ => None,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    #[serde(default)]
    pub measures: BTreeMap<String, MeasureDescriptor>,
    #[serde(default)]
    pub bodies: BTreeMap<String, BodyDescriptor>,
}

impl Catalog {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LcError::InvalidParameter(format!("catalog {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LcError::InvalidParameter(format!("catalog: {e}")))
    }

    /// Resolves a catalog key, a built-in key or an inline JSON descriptor.
    pub fn measure_descriptor(&self, spec: &str) -> Result<MeasureDescriptor> {
        if spec.trim_start().starts_with('{') {
            return serde_json::from_str(spec).map_err(|e| LcError::InvalidParameter(format!("measure descriptor: {e}")));
        }
        self.measures
            .get(spec)
            .cloned()
            .or_else(|| builtin_measure(spec))
            .ok_or_else(|| LcError::UnsupportedVariant(format!("unknown measure {spec:?}")))
    }

    pub fn body_descriptor(&self, spec: &str) -> Result<BodyDescriptor> {
        if spec.trim_start().starts_with('{') {
            return serde_json::from_str(spec).map_err(|e| LcError::InvalidParameter(format!("body descriptor: {e}")));
        }
        self.bodies
            .get(spec)
            .cloned()
            .or_else(|| builtin_body(spec))
            .ok_or_else(|| LcError::UnsupportedVariant(format!("unknown body {spec:?}")))
    }

    pub fn measure(&self, spec: &str, n: usize) -> Result<LogConcaveDensity> {
        self.measure_descriptor(spec)?.build(n)
    }

    pub fn body(&self, spec: &str, n: usize) -> Result<ConvexBody<f64>> {
        self.body_descriptor(spec)?.build(n)
    }
}

/// Built-in measure at dimension `n`.
pub fn measure(key: &str, n: usize) -> Result<LogConcaveDensity> {
    Catalog::default().measure(key, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_keys_are_isotropic() {
        for key in MEASURE_KEYS {
            let mu = measure(key, 3).unwrap();
            assert!(mu.is_isotropic(), "{key}");
            assert_eq!(mu.dim(), 3);
        }
        assert!(!measure("centered-exp", 2).unwrap().is_even());
        assert!(measure("nope", 2).is_err());
    }

    #[test]
    fn file_catalog_and_inline_descriptors() {
        let text = r#"{
            "measures": {
                "wide": {"variant": "gaussian", "dimension": 2, "parameters": {"variance": 4.0}},
                "nu-box": {"variant": "norm-exponential", "parameters": {"body": {"variant": "box", "parameters": {"half_widths": [1.0, 2.0]}}}},
                "shifted": {"variant": "gaussian", "affine": {"center": [1.0, 0.0], "linear": [[2.0, 0.0], [0.0, 1.0]]}}
            },
            "bodies": {"tri": {"variant": "symmetric-polytope", "parameters": {"half": [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]}}}
        }"#;
        let cat = Catalog::parse(text).unwrap();
        assert_eq!(cat.measure("wide", 7).unwrap().dim(), 2);
        // f(0) = 1/(2!·vol K) with vol K = 8
        assert!((cat.measure("nu-box", 2).unwrap().f0() - 1.0 / 16.0).abs() < 1e-15);
        assert!(!cat.measure("shifted", 2).unwrap().is_even());
        assert_eq!(cat.body("tri", 2).unwrap().variant_name(), "VPolytope");
        let b = cat.body(r#"{"variant": "lp-ball", "parameters": {"p": 3.0, "radius": 2.0}}"#, 4).unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!(cat.measure("gaussian", 5).unwrap().dim(), 5);
        assert!(cat.body(r#"{"variant": "box"}"#, 2).is_err());
    }
}
