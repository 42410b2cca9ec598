use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::vocab::grel;

/// One evaluated function parameter: its IRI and every value its term map
/// produced for the current node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionArgument {
    pub parameter: String,
    pub values: Vec<String>,
}

pub type FunctionImpl = Arc<dyn Fn(&[FunctionArgument]) -> Result<Vec<String>, String> + Send + Sync>;

/// Named mapping functions, keyed by function IRI.
#[derive(Clone, Default)]
pub struct FunctionRegistry {
    functions: HashMap<String, FunctionImpl>,
}

impl fmt::Debug for FunctionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<_> = self.functions.keys().collect();
        names.sort();
        f.debug_struct("FunctionRegistry").field("functions", &names).finish()
    }
}

impl FunctionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry preloaded with the GREL string functions `toUpperCase`,
    /// `toLowerCase` and `string_trim`, applied to each `valueParameter` value.
    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(grel::TO_UPPER_CASE, |args| Ok(map_value(args, str::to_uppercase)));
        r.register(grel::TO_LOWER_CASE, |args| Ok(map_value(args, str::to_lowercase)));
        r.register(grel::STRING_TRIM, |args| Ok(map_value(args, |s| s.trim().to_owned())));
        r
    }

    pub fn register<F>(&mut self, iri: impl Into<String>, f: F) -> &mut Self
    where
        F: Fn(&[FunctionArgument]) -> Result<Vec<String>, String> + Send + Sync + 'static,
    {
        self.functions.insert(iri.into(), Arc::new(f));
        self
    }

    pub fn get(&self, iri: &str) -> Option<&FunctionImpl> {
        self.functions.get(iri)
    }

    pub fn contains(&self, iri: &str) -> bool {
        self.functions.contains_key(iri)
    }
}

fn map_value(args: &[FunctionArgument], f: impl Fn(&str) -> String) -> Vec<String> {
    args.iter()
        .filter(|a| a.parameter == grel::VALUE_PARAMETER)
        .flat_map(|a| a.values.iter().map(|v| f(v)))
        .collect()
}
