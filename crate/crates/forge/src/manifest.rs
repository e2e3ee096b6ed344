//! Run manifests: a `key=value` sidecar written next to every output
//! file, recording the resolved invocation so a run can be replayed
//! bit for bit.

use std::path::{Path, PathBuf};

/// Everything needed to reproduce one subcommand run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    /// Subcommand name.
    pub command: String,
    /// Tool version that produced the outputs.
    pub version: String,
    /// Seed the run resolved to.
    pub seed: u64,
    /// `(role, path)` pairs for every input file.
    pub inputs: Vec<(String, String)>,
    /// `(role, path)` pairs for every output file.
    pub outputs: Vec<(String, String)>,
    /// Resolved parameters, configuration included.
    pub params: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            inputs: Vec::new(),
            outputs: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn input(mut self, role: &str, path: &Path) -> RunManifest {
        self.inputs.push((role.to_string(), path.display().to_string()));
        self
    }

    pub fn output(mut self, role: &str, path: &Path) -> RunManifest {
        self.outputs.push((role.to_string(), path.display().to_string()));
        self
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> RunManifest {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn params(mut self, entries: &[(&str, String)]) -> RunManifest {
        for (key, value) in entries {
            self.params.push((key.to_string(), value.clone()));
        }
        self
    }

    /// Renders the manifest in its fixed line order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command={}\n", self.command));
        out.push_str(&format!("version={}\n", self.version));
        out.push_str(&format!("seed={}\n", self.seed));
        for (role, path) in &self.inputs {
            out.push_str(&format!("input.{role}={path}\n"));
        }
        for (role, path) in &self.outputs {
            out.push_str(&format!("output.{role}={path}\n"));
        }
        for (key, value) in &self.params {
            out.push_str(&format!("param.{key}={value}\n"));
        }
        out
    }
}

/// The sidecar path for an output file: the same name with
/// `.manifest` appended.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest");
    output.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_order_is_fixed() {
        let m = RunManifest::new("annotate", 7)
            .input("mesh", Path::new("cube.obj"))
            .input("config", Path::new("run.cfg"))
            .output("records", Path::new("out.jsonl"))
            .param("gamma", "0.5");
        let text = m.to_text();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "command=annotate");
        assert_eq!(lines[1], format!("version={}", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[2], "seed=7");
        assert_eq!(lines[3], "input.mesh=cube.obj");
        assert_eq!(lines[4], "input.config=run.cfg");
        assert_eq!(lines[5], "output.records=out.jsonl");
        assert_eq!(lines[6], "param.gamma=0.5");
    }

    #[test]
    fn sidecar_path_appends_suffix() {
        assert_eq!(
            manifest_path(Path::new("/tmp/run/out.jsonl")),
            PathBuf::from("/tmp/run/out.jsonl.manifest")
        );
        assert_eq!(manifest_path(Path::new("report.json")), PathBuf::from("report.json.manifest"));
    }

    #[test]
    fn identical_runs_render_identical_manifests() {
        let build = || {
            RunManifest::new("render", 3)
                .input("mesh", Path::new("m.obj"))
                .output("cloud", Path::new("c.xyz"))
                .param("views", 4)
        };
        assert_eq!(build().to_text(), build().to_text());
    }
}
