use serde::Serialize;

#[derive(Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

/// Envelope around every JSON report. The timestamp is the only field that
/// differs between reruns and is kept last.
#[derive(Serialize)]
pub struct Report<'a, C: Serialize, R: Serialize> {
    pub tool: Tool,
    pub command: &'a str,
    pub config: &'a C,
    pub result: R,
    pub timestamp: String,
}

impl<'a, C: Serialize, R: Serialize> Report<'a, C, R> {
    pub fn new(command: &'a str, config: &'a C, result: R) -> Self {
        Self {
            tool: Tool {
                name: "repeval",
                version: repeval_core::VERSION,
            },
            command,
            config,
            result,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}
