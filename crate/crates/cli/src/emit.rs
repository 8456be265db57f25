use serde::Serialize;

use crate::config::ExperimentConfig;

pub const CONFIG_PREFIX: &str = "# config: ";

/// 17 significant digits, '.' decimal, independent of locale.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One output file; `ext` is appended to the `--out` prefix.
#[derive(Debug)]
pub struct Artifact {
    pub ext: &'static str,
    pub body: String,
}

/// CSV with the resolved config as its first line.
pub struct Csv {
    body: String,
}

impl Csv {
    pub fn new(config: &ExperimentConfig, header: &[&str]) -> Self {
        let mut body = String::new();
        body.push_str(CONFIG_PREFIX);
        body.push_str(&serde_json::to_string(config).expect("config serializes"));
        body.push('\n');
        body.push_str(&header.join(","));
        body.push('\n');
        Csv { body }
    }

    pub fn comment(&mut self, key: &str, value: f64) {
        // comments go before the header
        let at = self.body.find('\n').expect("config line") + 1;
        self.body.insert_str(at, &format!("# {key}: {}\n", float(value)));
    }

    pub fn row(&mut self, cells: &[String]) {
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn finish(self) -> Artifact {
        Artifact { ext: "csv", body: self.body }
    }
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    result: T,
}

/// JSON object holding the resolved config next to the result fields.
pub fn json<T: Serialize>(config: &ExperimentConfig, result: T) -> Artifact {
    let mut body = serde_json::to_string_pretty(&Report { config, result }).expect("result serializes");
    body.push('\n');
    Artifact { ext: "json", body }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.7853981633974483] {
            assert_eq!(float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(float(0.1), "1.0000000000000001e-1");
    }
}
