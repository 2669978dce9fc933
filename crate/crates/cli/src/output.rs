use crate::CliError;

/// Rendered command output plus anything worth telling the user on stderr.
#[derive(Debug, Default)]
pub struct Report {
    pub text: String,
    pub warnings: Vec<String>,
}

/// 12 significant digits in scientific notation, with −0 printed as 0.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// `# key=value` preamble lines followed by a CSV table with LF endings.
pub struct Table {
    comments: Vec<String>,
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(config_hash: &str, header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).map_err(io)?;
        Ok(Self { comments: vec![format!("config_hash={config_hash}")], writer })
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row(&mut self, values: &[f64]) -> Result<(), CliError> {
        self.writer.write_record(values.iter().map(|&v| num(v))).map_err(io)
    }

    pub fn finish(self) -> Result<String, CliError> {
        let body = self.writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        let mut out = String::new();
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?);
        Ok(out)
    }
}

fn io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(num(0.5), "5.00000000000e-1");
        assert_eq!(num(-0.0), "0.00000000000e0");
        assert_eq!(num(1.7), "1.70000000000e0");
        assert_eq!(num(-1234.5), "-1.23450000000e3");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("abc", &["x", "y"]).unwrap();
        t.comment("tau1=1");
        t.row(&[1.0, 2.0]).unwrap();
        assert_eq!(t.finish().unwrap(), "# config_hash=abc\n# tau1=1\nx,y\n1.00000000000e0,2.00000000000e0\n");
    }
}
