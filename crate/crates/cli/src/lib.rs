//! Channel parsing, bound evaluation, parameter sweeps and report output
//! behind the `capbound` binary.

pub mod svg;
pub mod sweep;

use std::fmt;
use std::str::FromStr;

use capbound::bounds::{
    beta, c_beta, upsilon_geo, upsilon_geo_covariant, upsilon_geo_symmetric, BoundResult, DEFAULT_ELL,
};
use capbound::channels::{make, ChannelFamily, ChoiOperator};
use capbound::sdp::SolveStatus;
use capbound::symmetry::{check_bicovariant, SymmetryGroup};
use capbound::{Error, Result};
use serde::Serialize;

pub use sweep::{Grid, Preset, Row, SweepConfig};

/// Measures a sweep or a single bound can report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    #[value(name = "beta")]
    Beta,
    #[value(name = "c_beta")]
    CBeta,
    #[value(name = "upsilon_geo")]
    UpsilonGeo,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Beta => "beta",
            Measure::CBeta => "c_beta",
            Measure::UpsilonGeo => "upsilon_geo",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Measure as clap::ValueEnum>::from_str(s, false)
    }
}

/// What one evaluation asks for.
#[derive(Clone, Debug, PartialEq)]
pub struct Request {
    pub measure: Measure,
    pub ell: u32,
    pub symmetric: bool,
}

impl Default for Request {
    fn default() -> Self {
        Request { measure: Measure::CBeta, ell: DEFAULT_ELL, symmetric: false }
    }
}

/// Inline JSON, or `@path` to read it from a file.
pub fn parse_channel(arg: &str) -> std::result::Result<ChannelFamily, String> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| format!("malformed channel spec: {e}"))
}

/// The built-in group under which `choi` is covariant, tried in the order
/// one-design groups first.
pub fn symmetry_for(choi: &ChoiOperator) -> Result<SymmetryGroup> {
    let [da, dap, db, dbp] = choi.bipartite_dims()?;
    let mut candidates = Vec::new();
    if dap == 1 && db == 1 && da == dbp {
        candidates.push(SymmetryGroup::pauli_covariance(da)?);
    } else if [dap, db, dbp].iter().all(|&d| d == da) {
        candidates.push(SymmetryGroup::pauli_bicovariance(da)?);
        if da == 2 {
            candidates.push(SymmetryGroup::uu_design(2)?);
        }
    }
    for g in candidates {
        if check_bicovariant(choi, &g)? {
            return Ok(g);
        }
    }
    Err(Error::SymmetryViolation("no built-in group leaves the channel invariant".into()))
}

/// Υ̂ through the cheapest reduction the channel's symmetry allows.
pub fn symmetric_upsilon(choi: &ChoiOperator, ell: u32) -> Result<BoundResult> {
    let g = symmetry_for(choi)?;
    if g.input_is_one_design() {
        upsilon_geo_symmetric(choi, ell, &g)
    } else {
        upsilon_geo_covariant(choi, ell, &g)
    }
}

pub fn evaluate(family: &ChannelFamily, req: &Request) -> Result<BoundResult> {
    if req.symmetric && req.measure != Measure::UpsilonGeo {
        return Err(Error::InvalidParameter("--symmetric applies to upsilon_geo only".into()));
    }
    let choi = make(family)?;
    let r = match req.measure {
        Measure::Beta => beta(&choi)?,
        Measure::CBeta => c_beta(&choi)?,
        Measure::UpsilonGeo if req.symmetric => symmetric_upsilon(&choi, req.ell)?,
        Measure::UpsilonGeo => upsilon_geo(&choi, req.ell)?,
    };
    Ok(r.with_desc(family.describe()))
}

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::NearOptimal => "near_optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::SolverError => "solver_error",
    }
}

/// C's `%.10e`: ten fraction digits and a signed, two-digit exponent.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.10e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

/// Parses decimal or `0x`-prefixed hexadecimal.
pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    }
    .map_err(|e| format!("bad seed {s}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printf_style_exponents() {
        assert_eq!(fmt_e(1.0), "1.0000000000e+00");
        assert_eq!(fmt_e(-0.00012345), "-1.2345000000e-04");
        assert_eq!(fmt_e(0.0), "0.0000000000e+00");
        assert_eq!(fmt_e(6.02e123), "6.0200000000e+123");
        assert_eq!(fmt_e(f64::NAN), "nan");
    }

    #[test]
    fn seeds_and_measures_parse() {
        assert_eq!(parse_seed("0xC0FFEE").unwrap(), 0xC0FFEE);
        assert_eq!(parse_seed("7").unwrap(), 7);
        assert!(parse_seed("x").is_err());
        assert_eq!("c_beta".parse::<Measure>().unwrap(), Measure::CBeta);
        assert!("upsilon".parse::<Measure>().is_err());
    }

    #[test]
    fn channel_specs_parse_inline_and_from_file() {
        let f = parse_channel(r#"{"kind":"swap","d":2}"#).unwrap();
        assert_eq!(f, ChannelFamily::Swap { d: 2 });
        let dir = std::env::temp_dir().join(format!("capbound-spec-{}", std::process::id()));
        std::fs::write(&dir, r#"{"kind":"depolarizing","d":2,"p":0.5}"#).unwrap();
        let g = parse_channel(&format!("@{}", dir.display())).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(g.parameter(), Some(0.5));
        assert!(parse_channel("{").is_err());
        assert!(parse_channel(r#"{"kind":"warp","d":2}"#).is_err());
    }

    #[test]
    fn symmetry_is_detected_per_family() {
        let groups = |f: ChannelFamily| symmetry_for(&make(&f).unwrap()).map(|g| g.kind);
        use capbound::symmetry::GroupKind;
        assert_eq!(groups(ChannelFamily::NoisyCnot { d: 2, p: 0.2 }).unwrap(), GroupKind::PauliBicovariance);
        assert_eq!(groups(ChannelFamily::PartialSwap { d: 2, p: 0.2 }).unwrap(), GroupKind::UuDesign);
        assert!(groups(ChannelFamily::Depolarizing { d: 2, p: 0.2 }).is_ok());
        assert!(groups(ChannelFamily::Erasure { d: 2, p: 0.2 }).is_err());
    }

    #[test]
    fn symmetric_flag_is_rejected_for_beta() {
        let req = Request { measure: Measure::Beta, ell: 4, symmetric: true };
        assert!(evaluate(&ChannelFamily::Swap { d: 2 }, &req).is_err());
    }
}
