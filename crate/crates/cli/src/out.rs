//! Tiny ordered JSON emitter. Keys appear in insertion order and floats go
//! through the shared 12-significant-digit formatter, so identical inputs
//! produce byte-identical output.

use twistline_core::lattice::fmt_sig12;

#[derive(Default)]
pub struct Json {
    parts: Vec<String>,
}

impl Json {
    pub fn new() -> Self {
        Json::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.parts.push(format!("\"{key}\":{}", fmt_sig12(v)));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.parts.push(format!("\"{key}\":{v}"));
        self
    }

    pub fn str(mut self, key: &str, v: &str) -> Self {
        self.parts
            .push(format!("\"{key}\":\"{}\"", v.replace('"', "\\\"")));
        self
    }

    pub fn bool(mut self, key: &str, v: bool) -> Self {
        self.parts.push(format!("\"{key}\":{v}"));
        self
    }

    pub fn opt_num(self, key: &str, v: Option<f64>) -> Self {
        match v {
            Some(x) => self.num(key, x),
            None => self.null(key),
        }
    }

    pub fn opt_bool(self, key: &str, v: Option<bool>) -> Self {
        match v {
            Some(x) => self.bool(key, x),
            None => self.null(key),
        }
    }

    pub fn null(mut self, key: &str) -> Self {
        self.parts.push(format!("\"{key}\":null"));
        self
    }

    pub fn finish(self) -> String {
        format!("{{{}}}", self.parts.join(","))
    }
}
