use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::ScalarFn;
use crate::sv_map::{MapFamily, SetValuedMap};

/// How to derive the base function `S` from the seed `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BaseFunctionSpec {
    /// `S(u) = F(t(u)) + (u - u_1)(F(u_1) - F(u_1)) + (u_N - u)(F(u_N) - F(u_N))`
    /// with `t(u_1) = u_1`, `t(u_N) = u_N`.
    TypeI { t: ScalarFn },
    /// `S(u) = t(u) F(u) + (same tails)` with `t(u_1) = t(u_N) = 1`.
    TypeII { t: ScalarFn },
    /// An explicit map on the domain of `F`.
    Custom { map: MapFamily },
    /// `S = F`.
    Same,
}

impl BaseFunctionSpec {
    pub fn identity_reparam() -> Self {
        BaseFunctionSpec::TypeI {
            t: ScalarFn::identity(),
        }
    }
}

/// `H_d(S(u_1) - F(u_1), S(u_N) - F(u_N))` over the domain ends of `F`.
pub fn check_compatibility(f: &SetValuedMap, s: &SetValuedMap) -> Result<f64> {
    let (u1, un) = (f.domain().lo(), f.domain().hi());
    let left = s.evaluate(u1)?.minkowski_sub(&f.evaluate(u1)?);
    let right = s.evaluate(un)?.minkowski_sub(&f.evaluate(un)?);
    Ok(left.hausdorff(&right))
}

/// Builds `S` from `spec` and checks the endpoint conditions and the
/// compatibility defect against `tol`.
pub fn build_base(f: &SetValuedMap, spec: &BaseFunctionSpec, tol: f64) -> Result<SetValuedMap> {
    let domain = f.domain();
    let (u1, un) = (domain.lo(), domain.hi());
    let tails = || -> Result<MapFamily> {
        let d1 = f.evaluate(u1)?.minkowski_sub(&f.evaluate(u1)?);
        let dn = f.evaluate(un)?.minkowski_sub(&f.evaluate(un)?);
        Ok(MapFamily::sum(
            MapFamily::scaled(ScalarFn::poly([-u1, 1.0]), MapFamily::constant(d1)),
            MapFamily::scaled(ScalarFn::poly([un, -1.0]), MapFamily::constant(dn)),
        ))
    };
    let family = match spec {
        BaseFunctionSpec::TypeI { t } => {
            let defect = (t.eval(u1) - u1).abs().max((t.eval(un) - un).abs());
            if defect > tol {
                return Err(Error::IncompatibleBase { defect, tol });
            }
            MapFamily::sum(MapFamily::reparam(f.family().clone(), t.clone()), tails()?)
        }
        BaseFunctionSpec::TypeII { t } => {
            let defect = (t.eval(u1) - 1.0).abs().max((t.eval(un) - 1.0).abs());
            if defect > tol {
                return Err(Error::IncompatibleBase { defect, tol });
            }
            MapFamily::sum(MapFamily::scaled(t.clone(), f.family().clone()), tails()?)
        }
        BaseFunctionSpec::Custom { map } => map.clone(),
        BaseFunctionSpec::Same => f.family().clone(),
    };
    let s = SetValuedMap::new(domain, family)?;
    let defect = check_compatibility(f, &s)?;
    if defect > tol {
        return Err(Error::IncompatibleBase { defect, tol });
    }
    Ok(s)
}
