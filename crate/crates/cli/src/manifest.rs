use serde::Serialize;
use serde_json::Value;

/// One per run: what was asked for, when, and where the outputs went.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub outputs: Vec<String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn start<T: Serialize>(command: &str, config: &T, seed: u64, threads: usize) -> Self {
        Self {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            threads,
            started_at: now(),
            finished_at: None,
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self, outputs: Vec<String>) {
        self.finished_at = Some(now());
        self.outputs = outputs;
    }
}
