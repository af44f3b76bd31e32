use std::io::Write;

use kneadlab_core::table::{Table, Verdict};
use serde_json::{json, Value};

use crate::args::Format;

pub const SCHEMA: &str = "kneadlab/1";

/// What a command produced: tables for CSV, a JSON value for JSON, and the
/// verdicts that decide the exit code.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub results: Value,
    pub verdicts: Vec<Verdict>,
}

impl Outcome {
    pub fn new(tables: Vec<Table>, results: Value) -> Self {
        Outcome {
            tables,
            results,
            verdicts: Vec::new(),
        }
    }

    pub fn with_verdicts(mut self, verdicts: Vec<Verdict>) -> Self {
        self.verdicts = verdicts;
        self
    }

    pub fn negative(&self) -> bool {
        self.verdicts.iter().any(Verdict::failed)
    }
}

pub fn verdict_table(verdicts: &[Verdict]) -> Table {
    let mut t = Table::new("verdicts", &["name", "verdict", "witness"]);
    for v in verdicts {
        t.push(vec![
            v.name.clone(),
            match (v.verdict, v.descriptive) {
                (true, false) => "pass",
                (false, false) => "fail",
                (true, true) => "yes",
                (false, true) => "no",
            }
            .into(),
            v.witness.clone(),
        ]);
    }
    t
}

/// Tables back to back; with more than one, each is introduced by `# name`.
pub fn write_csv(out: &mut dyn Write, tables: &[Table]) -> std::io::Result<()> {
    let multi = tables.len() > 1;
    for (i, t) in tables.iter().enumerate() {
        if multi {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "# {}", t.name)?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut *out);
        w.write_record(&t.header)?;
        for row in &t.rows {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(())
}

pub fn write_json(out: &mut dyn Write, inputs: &Value, results: &Value) -> std::io::Result<()> {
    let doc = json!({ "schema": SCHEMA, "inputs": inputs, "results": results });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

pub fn emit(
    out: &mut dyn Write,
    format: Format,
    inputs: &Value,
    outcome: &Outcome,
) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(out, &outcome.tables),
        Format::Json => write_json(out, inputs, &outcome.results),
    }
}
