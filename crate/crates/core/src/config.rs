//! JSON descriptions of Young functions: `{"family": ..., "params": {...}}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::young::{Custom, Density, Family, YoungFunction};

/// A Young function as written in a config file.
///
/// | family              | params                          |
/// |---------------------|---------------------------------|
/// | `power`             | `p`                             |
/// | `sum_of_powers`     | `p`, `q`                        |
/// | `power_log`         | `p`, `k`, `r`                   |
/// | `exp_minus_poly`    | `n`                             |
/// | `exp_neg_inv_power` | `k`                             |
/// | `double_exp`        |                                 |
/// | `custom`            | `table`: `[[t, a(t)], ...]`, optional `name` |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YoungSpec {
    pub family: String,
    #[serde(default)]
    pub params: Map<String, Value>,
}

fn bad(msg: String) -> Error {
    Error::InvalidYoung(msg)
}

impl YoungSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn build(&self) -> Result<YoungFunction> {
        let family = self.family.as_str();
        let allowed: &[&str] = match family {
            "power" => &["p"],
            "sum_of_powers" => &["p", "q"],
            "power_log" => &["p", "k", "r"],
            "exp_minus_poly" => &["n"],
            "exp_neg_inv_power" => &["k"],
            "double_exp" => &[],
            "custom" => &["table", "name"],
            other => {
                return Err(bad(format!(
                    "unknown family `{other}` (expected power, sum_of_powers, power_log, exp_minus_poly, \
                     exp_neg_inv_power, double_exp or custom)"
                )))
            }
        };
        if let Some(key) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(bad(format!("unknown parameter `params.{key}` for family `{family}`")));
        }
        let num = |key: &str| -> Result<f64> {
            match self.params.get(key) {
                Some(v) => v.as_f64().ok_or_else(|| bad(format!("`params.{key}` must be a number"))),
                None => Err(bad(format!("missing parameter `params.{key}` for family `{family}`"))),
            }
        };
        match family {
            "power" => YoungFunction::power(num("p")?),
            "sum_of_powers" => YoungFunction::sum_of_powers(num("p")?, num("q")?),
            "power_log" => YoungFunction::power_log(num("p")?, num("k")?, num("r")?),
            "exp_minus_poly" => {
                let n = self.params.get("n").and_then(Value::as_u64);
                let n = n.ok_or_else(|| bad("`params.n` must be a nonnegative integer".into()))?;
                YoungFunction::exp_minus_poly(u32::try_from(n).map_err(|_| bad("`params.n` is too large".into()))?)
            }
            "exp_neg_inv_power" => YoungFunction::exp_neg_inv_power(num("k")?),
            "double_exp" => Ok(YoungFunction::double_exp()),
            _ => {
                let table = self.params.get("table").ok_or_else(|| bad("missing parameter `params.table`".into()))?;
                let knots: Vec<(f64, f64)> = serde_json::from_value(table.clone())
                    .map_err(|e| bad(format!("`params.table` must be a list of [t, a] pairs: {e}")))?;
                let name = match self.params.get("name") {
                    None => "table".to_string(),
                    Some(Value::String(s)) => s.clone(),
                    Some(_) => return Err(bad("`params.name` must be a string".into())),
                };
                Ok(YoungFunction::from_custom(Custom::new(name, Density::table(knots)?, None)))
            }
        }
    }

    /// The spec of a built-in family. Closure-based custom functions have no
    /// JSON form.
    pub fn of(f: &YoungFunction) -> Option<Self> {
        let mut params = Map::new();
        let mut put = |k: &str, v: f64| {
            params.insert(k.into(), Value::from(v));
        };
        match f.family() {
            Family::Power { p } => put("p", *p),
            Family::SumOfPowers { p, q } => {
                put("p", *p);
                put("q", *q);
            }
            Family::PowerLog { p, k, r } => {
                put("p", *p);
                put("k", *k);
                put("r", *r);
            }
            Family::ExpMinusPoly { n } => {
                params.insert("n".into(), Value::from(*n));
            }
            Family::ExpNegInvPower { k } => put("k", *k),
            Family::DoubleExp => {}
            Family::Custom(c) => {
                params.insert("table".into(), serde_json::to_value(c.density_table()?).ok()?);
                params.insert("name".into(), Value::from(c.name()));
            }
        }
        Some(YoungSpec { family: f.family_name().into(), params })
    }
}
