use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

/// Outcome of the `--verify` re-check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verification {
    Passed,
    Failed(Value),
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub verdict: Value,
    pub verification: Verification,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

/// A failed command: exit code 2 for input errors, 3 for budget errors.
#[derive(Debug)]
pub enum CliError {
    UnknownCommand { message: String },
    MalformedInput { file: String, pointer: String, message: String },
    InvalidInput { detail: Value },
    BudgetExceeded { detail: Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::BudgetExceeded { .. } => 3,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::UnknownCommand { message } => json!({"kind": "UnknownCommand", "message": message}),
            CliError::MalformedInput { file, pointer, message } => json!({
                "kind": "MalformedInput",
                "file": file,
                "pointer": pointer,
                "message": message,
            }),
            CliError::InvalidInput { detail } => json!({"kind": "InvalidInput", "detail": detail}),
            CliError::BudgetExceeded { detail } => json!({"kind": "BudgetExceeded", "detail": detail}),
        }
    }

    pub fn invalid(e: impl Serialize) -> Self {
        CliError::InvalidInput { detail: to_value(e) }
    }

    pub fn budget(e: impl Serialize) -> Self {
        CliError::BudgetExceeded { detail: to_value(e) }
    }
}

pub fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        CliError::MalformedInput {
            file: origin.to_string(),
            pointer,
            message: e.into_inner().to_string(),
        }
    })
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Reads and parses a JSON file, reporting the JSON pointer of any error.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let origin = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::MalformedInput {
        file: origin.clone(),
        pointer: String::new(),
        message: e.to_string(),
    })?;
    parse(&text, &origin)
}

/// Parses a JSON flag value.
pub fn parse_arg<T: DeserializeOwned>(text: &str, flag: &str) -> Result<T, CliError> {
    parse(text, flag)
}

/// Reads an order term. Tagged terms hide the path of a nested error, so the
/// pointer is found by descending into the deepest subterm that fails alone.
pub fn load_term(path: &Path) -> Result<ordtree::OrderTerm, CliError> {
    let v: Value = load(path)?;
    match serde_json::from_value::<ordtree::OrderTerm>(v.clone()) {
        Ok(t) => Ok(t),
        Err(e) => {
            let (pointer, message) = locate_term_error(&v, String::new(), e.to_string());
            Err(CliError::MalformedInput {
                file: path.display().to_string(),
                pointer,
                message,
            })
        }
    }
}

fn locate_term_error(v: &Value, at: String, message: String) -> (String, String) {
    let mut children: Vec<(String, &Value)> = Vec::new();
    for key in ["arg", "repeat"] {
        if let Some(c) = v.get(key) {
            children.push((format!("{at}/{key}"), c));
        }
    }
    for key in ["args", "prefix"] {
        if let Some(Value::Array(items)) = v.get(key) {
            children.extend(items.iter().enumerate().map(|(i, c)| (format!("{at}/{key}/{i}"), c)));
        }
    }
    for (p, c) in children {
        if let Err(e) = serde_json::from_value::<ordtree::OrderTerm>(c.clone()) {
            return locate_term_error(c, p, e.to_string());
        }
    }
    (at, message)
}
