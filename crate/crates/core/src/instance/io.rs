//! Line-oriented instance text format:
//!
//! ```text
//! p 3r3x <k> <seed>
//! c <i> <j> <k> <+1|-1>      (one per clause, 1-based variables)
//! s <+1|-1> ...              (optional planted assignment)
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::XorsatInstance;
use crate::error::{Error, Result};

pub fn format_instance(inst: &XorsatInstance) -> String {
    let mut out = String::with_capacity(16 * (inst.num_clauses() + 2));
    writeln!(out, "p 3r3x {} {}", inst.num_vars, inst.seed).unwrap();
    for (c, &p) in inst.clauses.iter().zip(&inst.parities) {
        writeln!(out, "c {} {} {} {}", c[0] + 1, c[1] + 1, c[2] + 1, sign(p)).unwrap();
    }
    if let Some(planted) = &inst.planted {
        out.push('s');
        for &m in planted {
            out.push(' ');
            out.push_str(sign(m));
        }
        out.push('\n');
    }
    out
}

fn sign(v: i8) -> &'static str {
    if v > 0 {
        "+1"
    } else {
        "-1"
    }
}

pub fn write_instance(inst: &XorsatInstance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_instance(inst))?;
    Ok(())
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<XorsatInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text, path)
}

struct Cursor<'a> {
    path: &'a Path,
    line: usize,
    text: &'a str,
    tokens: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(path: &'a Path, line: usize, text: &'a str) -> Self {
        let tokens = text
            .split(' ')
            .scan(0usize, |col, tok| {
                let start = *col;
                *col += tok.len() + 1;
                Some((start + 1, tok))
            })
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Cursor { path, line, text, tokens, pos: 0 }
    }

    fn error(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.error(self.text.len() + 1, format!("expected {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let (col, tok) = self.next(what)?;
        tok.parse()
            .map_err(|_| self.error(col, format!("invalid {what} `{tok}`")))
    }

    fn spin(&mut self, what: &str) -> Result<i8> {
        let (col, tok) = self.next(what)?;
        match tok {
            "+1" | "1" => Ok(1),
            "-1" => Ok(-1),
            _ => Err(self.error(col, format!("invalid {what} `{tok}`, expected +1 or -1"))),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.tokens.get(self.pos) {
            Some(&(col, tok)) => Err(self.error(col, format!("unexpected token `{tok}`"))),
            None => Ok(()),
        }
    }
}

pub fn parse_instance(text: &str, path: &Path) -> Result<XorsatInstance> {
    let path: PathBuf = path.to_path_buf();
    let mut header: Option<(usize, u64)> = None;
    let mut clauses = Vec::new();
    let mut parities = Vec::new();
    let mut planted = None;

    for (idx, line) in text.split('\n').enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let mut cur = Cursor::new(&path, lineno, line);
        let (col, tag) = cur.next("line tag")?;
        match (tag, header) {
            ("p", None) => {
                let (fcol, format) = cur.next("format name")?;
                if format != "3r3x" {
                    return Err(cur.error(fcol, format!("unknown format `{format}`")));
                }
                let k = cur.number::<usize>("variable count")?;
                let seed = cur.number::<u64>("seed")?;
                cur.finish()?;
                header = Some((k, seed));
            }
            ("p", Some(_)) => return Err(cur.error(col, "duplicate header")),
            (_, None) => return Err(cur.error(col, "expected `p 3r3x <k> <seed>` header")),
            ("c", Some((k, _))) => {
                let mut clause = [0usize; 3];
                for slot in &mut clause {
                    let (vcol, tok) = cur.next("variable")?;
                    let v: usize = tok
                        .parse()
                        .map_err(|_| cur.error(vcol, format!("invalid variable `{tok}`")))?;
                    if v == 0 || v > k {
                        return Err(cur.error(vcol, format!("variable {v} outside 1..={k}")));
                    }
                    *slot = v - 1;
                }
                parities.push(cur.spin("parity")?);
                cur.finish()?;
                clauses.push(clause);
            }
            ("s", Some((k, _))) => {
                if planted.is_some() {
                    return Err(cur.error(col, "duplicate planted assignment"));
                }
                let mut spins = Vec::with_capacity(k);
                for _ in 0..k {
                    spins.push(cur.spin("spin")?);
                }
                cur.finish()?;
                planted = Some(spins);
            }
            (other, Some(_)) => return Err(cur.error(col, format!("unknown line tag `{other}`"))),
        }
    }
    let Some((num_vars, seed)) = header else {
        return Err(Error::Parse {
            path,
            line: 1,
            column: 1,
            message: "missing header".into(),
        });
    };
    let inst = XorsatInstance { num_vars, clauses, parities, planted, seed };
    inst.validate()?;
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate_3r3x;

    #[test]
    fn round_trip_preserves_instance_and_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("i.txt");
        let inst = generate_3r3x(12, 9).unwrap();
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(back, inst);
        assert_eq!(format_instance(&back), std::fs::read_to_string(&path).unwrap());
    }

    #[test]
    fn four_occurrences_is_regularity_error() {
        // Variable 1 in four clauses, variable 6 in two.
        let text = "p 3r3x 6 0\nc 1 2 3 +1\nc 1 4 5 +1\nc 1 2 6 -1\nc 1 3 4 +1\nc 2 5 6 +1\nc 3 4 5 -1\n";
        let err = parse_instance(text, Path::new("x")).unwrap_err();
        assert!(matches!(err, Error::Regularity(_)), "{err}");
    }

    #[test]
    fn duplicated_clause_is_validation_error() {
        let inst = generate_3r3x(6, 1).unwrap();
        let mut text = format_instance(&XorsatInstance { planted: None, ..inst.clone() });
        let first = text.lines().nth(1).unwrap().to_string();
        let second = text.lines().nth(2).unwrap().to_string();
        text = text.replace(&second, &first);
        let err = parse_instance(&text, Path::new("x")).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_instance("p 3r3x 4 0\nc 1 2 x +1\n", Path::new("f")).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 7)),
            other => panic!("{other}"),
        }
    }
}
