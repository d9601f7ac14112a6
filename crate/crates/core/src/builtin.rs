//! Tables addressable by name as `@name`.

use crate::error::{Error, Result};
use crate::funcspec::{parse_function_file, FunctionSpec};

pub const NAMES: [&str; 3] = ["ot", "counterexample", "neq3"];

pub fn source(name: &str) -> Option<&'static str> {
    match name.trim_start_matches('@') {
        "ot" => Some(include_str!("../data/ot.txt")),
        "counterexample" => Some(include_str!("../data/counterexample.txt")),
        "neq3" => Some(include_str!("../data/neq3.txt")),
        _ => None,
    }
}

pub fn lookup(name: &str) -> Result<FunctionSpec> {
    let text = source(name).ok_or_else(|| {
        Error::invalid(format!("unknown built-in `{name}` (have @{})", NAMES.join(", @")))
    })?;
    parse_function_file(text)
}

pub fn ot() -> FunctionSpec {
    lookup("ot").expect("built-in table parses")
}

pub fn counterexample() -> FunctionSpec {
    lookup("counterexample").expect("built-in table parses")
}

pub fn neq3() -> FunctionSpec {
    lookup("neq3").expect("built-in table parses")
}
