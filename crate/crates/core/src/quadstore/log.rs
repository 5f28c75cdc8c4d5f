// Append-only write log: one `+ <statement>` or `- <statement>` per line.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::nquads;
use super::term::Quad;

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("store log I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("store log line {line}: {message}")]
    Corrupt { line: usize, message: String },
}

pub(super) struct LogWriter {
    file: File,
}

impl LogWriter {
    pub(super) fn open(path: &Path) -> Result<(Self, Vec<(bool, Quad)>), LogError> {
        let mut ops = Vec::new();
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let corrupt = |message: String| LogError::Corrupt {
                    line: idx + 1,
                    message,
                };
                let (insert, rest) = match line.split_at_checked(2) {
                    Some(("+ ", rest)) => (true, rest),
                    Some(("- ", rest)) => (false, rest),
                    _ => return Err(corrupt("expected '+ ' or '- ' prefix".into())),
                };
                let quad = nquads::parse_line(rest)
                    .map_err(corrupt)?
                    .ok_or_else(|| corrupt("missing statement".into()))?;
                ops.push((insert, quad));
            }
        }
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok((LogWriter { file }, ops))
    }

    pub(super) fn append(&mut self, insert: bool, quad: &Quad) -> Result<(), LogError> {
        let sign = if insert { '+' } else { '-' };
        writeln!(self.file, "{sign} {}", quad.to_nquads())?;
        Ok(())
    }
}
