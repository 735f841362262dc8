//! Self-describing CSV output: a `#` header echoing the canonical command
//! line and every resolved input, then a plain CSV table.

use std::io::Write;

use crate::error::CliError;

/// Value that can appear in a canonical command line.
pub trait ArgValue {
    fn arg(&self) -> String;
}

impl ArgValue for f64 {
    fn arg(&self) -> String {
        num(*self)
    }
}

impl ArgValue for &str {
    fn arg(&self) -> String {
        self.to_string()
    }
}

impl ArgValue for String {
    fn arg(&self) -> String {
        self.clone()
    }
}

impl ArgValue for &String {
    fn arg(&self) -> String {
        self.to_string()
    }
}

impl ArgValue for raman_qkd::Direction {
    fn arg(&self) -> String {
        self.to_string()
    }
}

impl ArgValue for raman_qkd::Modulation {
    fn arg(&self) -> String {
        self.to_string()
    }
}

/// Round-trip formatting of a plain number: positional for moderate magnitudes, scientific otherwise.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(1e-4..1e15).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Canonical argument list, used both for the header echo and for reproducing a run.
#[derive(Debug, Default, Clone)]
pub struct Argv(Vec<String>);

impl Argv {
    pub fn new(subcommand: &str) -> Self {
        Argv(vec![subcommand.to_string()])
    }

    pub fn flag(&mut self, name: &str, value: impl ArgValue) -> &mut Self {
        self.0.push(format!("--{name}"));
        self.0.push(value.arg());
        self
    }

    pub fn opt_flag<V: ArgValue>(&mut self, name: &str, value: Option<V>) -> &mut Self {
        if let Some(v) = value {
            self.flag(name, v);
        }
        self
    }

    pub fn switch(&mut self, name: &str, on: bool) -> &mut Self {
        if on {
            self.0.push(format!("--{name}"));
        }
        self
    }

    pub fn args(&self) -> &[String] {
        &self.0
    }

    pub fn shell_line(&self) -> String {
        std::iter::once(crate::PROGRAM.to_string())
            .chain(self.0.iter().map(|a| shell_quote(a)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn shell_quote(s: &str) -> String {
    let safe = !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "-_./:,=+@%".contains(c));
    if safe {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', r"'\''"))
    }
}

/// Formats a computed quantity: shortest round-trip scientific notation.
pub fn sci(x: f64) -> String {
    format!("{x:e}")
}

#[derive(Debug)]
pub struct Table {
    pub argv: Argv,
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_to(&self, w: &mut dyn Write) -> Result<(), CliError> {
        writeln!(w, "# {}", self.argv.shell_line())?;
        for (k, v) in &self.metadata {
            writeln!(w, "# {k} = {v}")?;
        }
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        out.write_record(&self.columns)?;
        for row in &self.rows {
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }
}
