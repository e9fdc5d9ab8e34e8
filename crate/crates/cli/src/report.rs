//! Structured reports and their deterministic JSON rendering.

use serde::Serialize;
use serde_json::Value;

use stochan::{CptpReport, DiamondResult};

/// Significant digits kept for every floating-point field.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Serialize)]
pub struct AnalysisReport {
    pub channel_id: String,
    pub dim: usize,
    pub cptp: CptpReport,
    pub stochastic_lambda: Option<f64>,
    pub process_fidelity: f64,
    pub process_infidelity: f64,
    pub is_unital: bool,
    pub diamond: Option<DiamondResult>,
    pub notes: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TwirlReport {
    pub channel_id: String,
    pub design: String,
    pub design_size: usize,
    pub method: String,
    pub dim: usize,
    pub input_process_fidelity: f64,
    pub stochastic_lambda: Option<f64>,
    pub unitality_residual: f64,
    pub route_deviation: Option<f64>,
    pub output: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DiamondReport {
    pub channel_id: String,
    pub dim: usize,
    pub process_infidelity: f64,
    #[serde(flatten)]
    pub result: DiamondResult,
}

#[derive(Debug, Serialize)]
pub struct SearchReport {
    pub dim: usize,
    pub lambda: f64,
    pub best_nonunitality: f64,
    pub tp_residual: f64,
    pub per_restart: Vec<f64>,
    pub output: Option<String>,
}

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with fields in declaration order and floats at 12 significant digits.
pub fn render<T: Serialize>(report: &T) -> String {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    round_value(&mut value);
    serde_json::to_string_pretty(&value).expect("values serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_significant(0.1 + 0.2), 0.3);
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_significant(-0.0), 0.0);
        assert_eq!(round_significant(1.234_567_890_123_456e-20), 1.23456789012e-20);
    }

    #[test]
    fn render_keeps_field_order() {
        #[derive(Serialize)]
        struct R {
            z: f64,
            a: Option<f64>,
        }
        let s = render(&R { z: 2.0 / 3.0, a: None });
        assert!(s.find("\"z\"").unwrap() < s.find("\"a\"").unwrap());
        assert!(s.contains("0.666666666667"));
    }
}
