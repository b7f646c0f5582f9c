//! Self-describing analysis reports for finite systems.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::ModelError;
use crate::relation::{
    fixed_points, omega_obs, periodic_level_report, sigma_star, OrbitDistanceTable,
};
use crate::scalar::{format_scalar, parse_scalar, ExactScalar, Extended};
use crate::system::{mesh, FiniteSystem, Observable};

pub const TOOL_NAME: &str = "expobs";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MAX_PERIOD: u32 = 6;

/// Inputs of an analysis; observables keep their names in the given order.
#[derive(Clone, Debug)]
pub struct AnalysisRequest {
    pub system: FiniteSystem,
    pub observables: Vec<(String, Observable)>,
    /// Defaults to the mesh.
    pub resolution: Option<ExactScalar>,
    /// Quotient thresholds; defaults to `[resolution]`.
    pub thresholds: Vec<ExactScalar>,
    pub seed: Option<u64>,
}

impl AnalysisRequest {
    pub fn new(system: FiniteSystem) -> Self {
        Self {
            system,
            observables: Vec::new(),
            resolution: None,
            thresholds: Vec::new(),
            seed: None,
        }
    }
}

fn ext(value: &Extended) -> Value {
    json!(value.to_string())
}

fn text(value: &ExactScalar) -> Value {
    json!(format_scalar(value))
}

/// Builds the report. Identical requests give byte-identical JSON.
pub fn analyze(request: &AnalysisRequest) -> Result<Value, ModelError> {
    let system = &request.system;
    for (_, phi) in &request.observables {
        phi.check_domain(system)?;
    }
    let h = match &request.resolution {
        Some(h) if *h > ExactScalar::from_integer(0.into()) => h.clone(),
        Some(_) => {
            return Err(ModelError::InvalidArgument(
                "resolution must be positive".into(),
            ))
        }
        None => mesh(system)?,
    };
    let thresholds = if request.thresholds.is_empty() {
        vec![h.clone()]
    } else {
        request.thresholds.clone()
    };
    let table = OrbitDistanceTable::new(system);
    let e_star = table.e_star()?;
    let pointwise = table.pointwise_constants()?;
    let at_h = table.quotient(&h);

    let observables = request
        .observables
        .par_iter()
        .map(|(name, phi)| -> Result<Value, ModelError> {
            let delta = table.delta_star(phi)?;
            Ok(json!({
                "name": name,
                "delta_star": ext(&delta),
                "sigma_star_sq": ext(&sigma_star(system, phi)?),
                "expansive_at_h": delta.exceeds(&h),
                "constant_on_h_blocks": at_h.is_constant_on_blocks(phi),
                "omega_sq_at_h": text(&omega_obs(system, phi, &h)?),
                "distinct_values": phi.distinct_values().len(),
            }))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let quotients: Vec<Value> = thresholds
        .iter()
        .map(|t| {
            let q = table.quotient(t);
            json!({
                "threshold": text(t),
                "block_count": q.blocks.len(),
                "single_block": q.is_single_block(),
                "discrete": q.is_discrete(),
                "blocks": q.labelled(system),
            })
        })
        .collect();

    let omega_table: Vec<Value> = table
        .omega_table()
        .iter()
        .map(|(t, w)| json!([format_scalar(t), format_scalar(w)]))
        .collect();

    let periodic = (1..=MAX_PERIOD)
        .map(|k| -> Result<Value, ModelError> {
            let fixed = fixed_points(system, k);
            let per_observable = request
                .observables
                .iter()
                .map(|(name, phi)| -> Result<Value, ModelError> {
                    let r = periodic_level_report(system, phi, k)?;
                    Ok(json!({
                        "name": name,
                        "distinct_values": r.distinct_values.len(),
                        "delta_star_power": ext(&r.delta_star_power),
                        "checked_pairs": r.checked_pairs,
                        "flag_holds": r.flag_holds,
                    }))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(json!({ "k": k, "fixed_points": fixed.len(), "observables": per_observable }))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let inputs = json!({
        "system": system.to_value(),
        "observables": request
            .observables
            .iter()
            .map(|(name, phi)| json!({ "name": name, "observable": phi.to_value(system, None) }))
            .collect::<Vec<_>>(),
    });

    Ok(json!({
        "provenance": { "tool": TOOL_NAME, "version": TOOL_VERSION, "seed": request.seed },
        "summary": {
            "points": system.len(),
            "identity_map": system.is_identity(),
            "fixed_points": fixed_points(system, 1).len(),
            "realized_distances": system.realized_distances().len(),
        },
        "resolution": text(&h),
        "e_star": text(&e_star),
        "flags": {
            "expansive_at_h": e_star > h,
            "pointwise_expansive_at_h": pointwise.iter().all(|c| *c > h),
            "omega_at_h": text(&table.omega_map(&h)),
            "separating_at_h": at_h.is_discrete(),
            "constants_only_at_h": at_h.is_single_block(),
        },
        "pointwise_constants": system
            .points()
            .iter()
            .zip(&pointwise)
            .map(|(p, c)| json!([p, format_scalar(c)]))
            .collect::<Vec<_>>(),
        "observables": observables,
        "quotients": quotients,
        "omega_table": omega_table,
        "periodic": periodic,
        "inputs": inputs,
    }))
}

/// Recovers the request embedded in a report.
pub fn request_from_report(report: &Value) -> Result<AnalysisRequest, ModelError> {
    let malformed = |what: &str| ModelError::Malformed(format!("report lacks {what}"));
    let inputs = report.get("inputs").ok_or_else(|| malformed("inputs"))?;
    let system_doc = inputs
        .get("system")
        .ok_or_else(|| malformed("inputs.system"))?;
    let system = FiniteSystem::parse(&system_doc.to_string())?;
    let mut observables = Vec::new();
    for entry in inputs
        .get("observables")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("inputs.observables"))?
    {
        let name = entry
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("observable name"))?;
        let doc = entry
            .get("observable")
            .cloned()
            .ok_or_else(|| malformed("observable values"))?;
        observables.push((name.to_string(), Observable::from_value(&system, doc)?));
    }
    let resolution = report
        .get("resolution")
        .and_then(Value::as_str)
        .map(parse_scalar)
        .transpose()?;
    let thresholds = report
        .get("quotients")
        .and_then(Value::as_array)
        .map(|qs| {
            qs.iter()
                .filter_map(|q| q.get("threshold").and_then(Value::as_str))
                .map(parse_scalar)
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?
        .unwrap_or_default();
    let seed = report.pointer("/provenance/seed").and_then(Value::as_u64);
    Ok(AnalysisRequest {
        system,
        observables,
        resolution,
        thresholds,
        seed,
    })
}
