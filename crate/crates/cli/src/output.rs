//! JSON and file helpers shared by the subcommands.

use std::path::{Path, PathBuf};

use lipsharp::numeric::Scaled;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::config::SCHEMA_VERSION;
use crate::CliError;

/// A plain number, or `{"mantissa", "exp2"}` once `|log2| > 900`.
pub fn scaled_json(s: Scaled) -> Value {
    if s.needs_exponent_form() {
        json!({ "mantissa": s.mantissa, "exp2": s.exponent })
    } else {
        json!(s.to_f64())
    }
}

/// `r` as mantissa and exponent, for `r >= 0`.
pub fn rational_scaled(r: &BigRational) -> Scaled {
    if r.is_zero() {
        return Scaled::zero();
    }
    let e = r.numer().bits() as i64 - r.denom().bits() as i64;
    let one = BigInt::from(1);
    let normalized = if e >= 0 {
        r / BigRational::from_integer(one << e as usize)
    } else {
        r * BigRational::from_integer(one << (-e) as usize)
    };
    Scaled::from_f64(normalized.to_f64().unwrap_or(f64::NAN)).mul_pow2(e)
}

pub fn envelope(kind: &str, body: Value) -> Value {
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "kind": kind });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    v
}

pub fn out_file(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("{}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = out_file(dir, name)?;
    std::fs::write(&path, text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, v: &Value) -> Result<PathBuf, CliError> {
    write_text(dir, name, &(serde_json::to_string_pretty(v).expect("json values serialize") + "\n"))
}
