use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violated,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violated => 1,
            Status::Inconclusive => 3,
        }
    }

    /// The worse of two outcomes.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Violated, _) | (_, Status::Violated) => Status::Violated,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Ok,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub status: Status,
    pub summary: String,
    pub details: Value,
}

impl Report {
    pub fn render_text(&self) -> String {
        let mut out = format!("command: {}\nseed: {}\n", self.command, self.seed);
        for i in &self.inputs {
            out.push_str(&format!("input: {} sha256={}\n", i.path, i.sha256));
        }
        out.push_str(&format!("status: {}\n{}\n", serde_json::to_value(self.status).unwrap().as_str().unwrap(), self.summary));
        out.push_str(&serde_json::to_string_pretty(&self.details).unwrap());
        out.push('\n');
        out
    }
}
