//! Text serialization of triangle meshes.
//!
//! The format is line-oriented and diff-friendly:
//!
//! ```text
//! ellipse 1.5000000000000000e0 5.0000000000000000e-1
//! vertices 9
//! 0.0000000000000000e0 0.0000000000000000e0
//! …
//! triangles 8
//! 0 1 2
//! …
//! boundary 8
//! 1
//! …
//! ```
//!
//! Coordinates carry 17 significant digits, so a write–read round trip
//! reproduces every `f64` bit-exactly. Reading re-validates the mesh
//! (indices, orientation, boundary residuals) through the core
//! constructor.

use std::io::{self, BufRead, Write};

use ellipstat_core::mesh::{MeshError, TriangleMesh};
use ellipstat_core::Ellipse;

use crate::report::fmt_sig17;

/// Failures when reading or writing a mesh file.
#[derive(Debug)]
pub enum MeshIoError {
    /// Underlying stream failure.
    Io(io::Error),
    /// Malformed file; `line` is 1-based.
    Parse {
        /// Line at which parsing failed.
        line: usize,
        /// What was expected or found.
        message: String,
    },
    /// The file parsed but describes an invalid mesh.
    Invalid(MeshError),
}

impl std::fmt::Display for MeshIoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Io(e) => write!(f, "i/o error: {e}"),
            Self::Parse { line, message } => write!(f, "line {line}: {message}"),
            Self::Invalid(e) => write!(f, "invalid mesh: {e}"),
        }
    }
}

impl std::error::Error for MeshIoError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Self::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<io::Error> for MeshIoError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

/// Writes a mesh in the text format.
pub fn write_mesh<W: Write>(m: &TriangleMesh, w: &mut W) -> io::Result<()> {
    let e = m.ellipse();
    writeln!(w, "ellipse {} {}", fmt_sig17(e.a()), fmt_sig17(e.b()))?;
    writeln!(w, "vertices {}", m.nodes().len())?;
    for p in m.nodes() {
        writeln!(w, "{} {}", fmt_sig17(p[0]), fmt_sig17(p[1]))?;
    }
    writeln!(w, "triangles {}", m.triangles().len())?;
    for t in m.triangles() {
        writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
    }
    let boundary: Vec<usize> =
        (0..m.nodes().len()).filter(|&i| m.is_boundary(i)).collect();
    writeln!(w, "boundary {}", boundary.len())?;
    for i in boundary {
        writeln!(w, "{i}")?;
    }
    Ok(())
}

/// Reads a mesh written by [`write_mesh`], re-validating it.
pub fn read_mesh<R: BufRead>(r: &mut R) -> Result<TriangleMesh, MeshIoError> {
    let mut lines = Lines::new(r);

    let header = lines.next_tokens()?;
    let (a, b) = match header.tokens.as_slice() {
        [kw, a, b] if kw == "ellipse" => {
            (lines.parse_f64(a, header.number)?, lines.parse_f64(b, header.number)?)
        }
        _ => return Err(parse(header.number, "expected 'ellipse a b'")),
    };
    let ellipse = Ellipse::new(a, b)
        .map_err(|e| parse(header.number, &format!("bad ellipse: {e}")))?;

    let n = lines.count_line("vertices")?;
    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next_tokens()?;
        match line.tokens.as_slice() {
            [x, y] => nodes.push([
                lines.parse_f64(x, line.number)?,
                lines.parse_f64(y, line.number)?,
            ]),
            _ => return Err(parse(line.number, "expected 'x1 x2'")),
        }
    }

    let m = lines.count_line("triangles")?;
    let mut triangles = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next_tokens()?;
        match line.tokens.as_slice() {
            [i, j, k] => triangles.push([
                lines.parse_usize(i, line.number)?,
                lines.parse_usize(j, line.number)?,
                lines.parse_usize(k, line.number)?,
            ]),
            _ => return Err(parse(line.number, "expected three node indices")),
        }
    }

    let k = lines.count_line("boundary")?;
    let mut boundary = vec![false; nodes.len()];
    for _ in 0..k {
        let line = lines.next_tokens()?;
        match line.tokens.as_slice() {
            [i] => {
                let idx = lines.parse_usize(i, line.number)?;
                if idx >= nodes.len() {
                    return Err(parse(line.number, "boundary index out of range"));
                }
                boundary[idx] = true;
            }
            _ => return Err(parse(line.number, "expected one node index")),
        }
    }

    TriangleMesh::from_parts(ellipse, nodes, triangles, boundary)
        .map_err(MeshIoError::Invalid)
}

fn parse(line: usize, message: &str) -> MeshIoError {
    MeshIoError::Parse { line, message: message.to_string() }
}

struct NumberedLine {
    number: usize,
    tokens: Vec<String>,
}

/// Line reader that skips blanks and tracks 1-based line numbers.
struct Lines<'a, R: BufRead> {
    reader: &'a mut R,
    number: usize,
}

impl<'a, R: BufRead> Lines<'a, R> {
    fn new(reader: &'a mut R) -> Self {
        Self { reader, number: 0 }
    }

    fn next_tokens(&mut self) -> Result<NumberedLine, MeshIoError> {
        loop {
            let mut buf = String::new();
            let read = self.reader.read_line(&mut buf)?;
            if read == 0 {
                return Err(parse(self.number + 1, "unexpected end of file"));
            }
            self.number += 1;
            let tokens: Vec<String> =
                buf.split_whitespace().map(|s| s.to_string()).collect();
            if !tokens.is_empty() {
                return Ok(NumberedLine { number: self.number, tokens });
            }
        }
    }

    fn count_line(&mut self, keyword: &str) -> Result<usize, MeshIoError> {
        let line = self.next_tokens()?;
        match line.tokens.as_slice() {
            [kw, n] if kw == keyword => self.parse_usize(n, line.number),
            _ => Err(parse(line.number, &format!("expected '{keyword} N'"))),
        }
    }

    fn parse_f64(&self, token: &str, line: usize) -> Result<f64, MeshIoError> {
        token.parse().map_err(|_| parse(line, &format!("not a number: '{token}'")))
    }

    fn parse_usize(&self, token: &str, line: usize) -> Result<usize, MeshIoError> {
        token.parse().map_err(|_| parse(line, &format!("not an index: '{token}'")))
    }
}
