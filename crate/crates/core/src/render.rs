//! PBM images of spacetime diagrams and CSV export of metric series.

use std::io::{self, Write};

use thiserror::Error;

use crate::evolve::{ObserverError, RowObserver, SpacetimeDiagram};
use crate::metrics::{MetricSeries, MetricsReport};
use crate::tape::Tape;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot render an empty diagram")]
    EmptyDiagram,
    #[error("no series to write")]
    NoSeries,
    #[error("series {label:?} does not share the iteration axis of {first:?}")]
    AxisMismatch { label: String, first: String },
    #[error("malformed PBM: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PbmFormat {
    /// ASCII.
    P1,
    /// Binary, 8 pixels per byte.
    P4,
}

impl std::str::FromStr for PbmFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "p1" => Ok(PbmFormat::P1),
            "p4" => Ok(PbmFormat::P4),
            other => Err(format!("unknown image format {other:?}, expected p1 or p4")),
        }
    }
}

/// Format and pixel dimensions of an image about to be written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageSpec {
    pub format: PbmFormat,
    pub width: usize,
    pub height: usize,
}

struct Counting<'a, W: Write + ?Sized> {
    inner: &'a mut W,
    count: usize,
}

impl<W: Write + ?Sized> Write for Counting<'_, W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.count += n;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

/// Writes rows one at a time into a PBM whose geometry is fixed up front.
///
/// Each row is placed by absolute position: pixel `x` shows position
/// `left + x`, with positions the row does not cover drawn as 0.
pub struct PbmRowWriter<W: Write> {
    sink: W,
    spec: ImageSpec,
    left: isize,
    rows_written: usize,
    bytes: usize,
    line: Vec<u8>,
}

impl<W: Write> PbmRowWriter<W> {
    pub fn new(mut sink: W, spec: ImageSpec, left: isize) -> Result<Self, RenderError> {
        if spec.width == 0 || spec.height == 0 {
            return Err(RenderError::EmptyDiagram);
        }
        let magic = match spec.format {
            PbmFormat::P1 => "P1",
            PbmFormat::P4 => "P4",
        };
        let header = format!("{magic}\n{} {}\n", spec.width, spec.height);
        sink.write_all(header.as_bytes())?;
        Ok(PbmRowWriter {
            sink,
            spec,
            left,
            rows_written: 0,
            bytes: header.len(),
            line: Vec::new(),
        })
    }

    pub fn spec(&self) -> ImageSpec {
        self.spec
    }

    pub fn write_row(&mut self, row: &Tape) -> Result<(), RenderError> {
        let width = self.spec.width;
        self.line.clear();
        match self.spec.format {
            PbmFormat::P1 => {
                for x in 0..width {
                    if x > 0 {
                        self.line.push(b' ');
                    }
                    let on = row.get_abs(self.left + x as isize);
                    self.line.push(if on { b'1' } else { b'0' });
                }
                self.line.push(b'\n');
            }
            PbmFormat::P4 => {
                self.line.resize(width.div_ceil(8), 0);
                for x in 0..width {
                    if row.get_abs(self.left + x as isize) {
                        self.line[x / 8] |= 0x80 >> (x % 8);
                    }
                }
            }
        }
        self.sink.write_all(&self.line)?;
        self.bytes += self.line.len();
        self.rows_written += 1;
        Ok(())
    }

    /// Flushes and returns the total byte count and the sink.
    pub fn finish(mut self) -> Result<(usize, W), RenderError> {
        if self.rows_written != self.spec.height {
            return Err(RenderError::Malformed(format!(
                "wrote {} rows into an image of height {}",
                self.rows_written, self.spec.height
            )));
        }
        self.sink.flush()?;
        Ok((self.bytes, self.sink))
    }
}

impl<W: Write> RowObserver for PbmRowWriter<W> {
    fn observe(&mut self, _t: usize, row: &Tape) -> Result<(), ObserverError> {
        self.write_row(row).map_err(Into::into)
    }
}

/// Writes the whole diagram, rows aligned by absolute position.
pub fn write_pbm<W: Write + ?Sized>(
    diagram: &SpacetimeDiagram,
    format: PbmFormat,
    sink: &mut W,
) -> Result<usize, RenderError> {
    let (lo, hi) = diagram.span().ok_or(RenderError::EmptyDiagram)?;
    let spec = ImageSpec {
        format,
        width: (hi - lo + 1) as usize,
        height: diagram.len(),
    };
    let mut writer = PbmRowWriter::new(io::BufWriter::new(sink), spec, lo)?;
    for row in diagram.rows() {
        writer.write_row(row)?;
    }
    Ok(writer.finish()?.0)
}

/// Decoded image, row-major, `true` = black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMatrix {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<bool>,
}

impl PixelMatrix {
    pub fn from_diagram(diagram: &SpacetimeDiagram) -> Option<Self> {
        let (lo, hi) = diagram.span()?;
        let width = (hi - lo + 1) as usize;
        let pixels = diagram
            .rows()
            .iter()
            .flat_map(|r| (lo..=hi).map(move |p| r.get_abs(p)))
            .collect();
        Some(PixelMatrix {
            width,
            height: diagram.len(),
            pixels,
        })
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[bool] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }
}

/// Parses P1 or P4 data, skipping `#` comments in the header.
pub fn read_pbm(data: &[u8]) -> Result<PixelMatrix, RenderError> {
    let bad = |m: &str| RenderError::Malformed(m.to_string());
    let mut pos = 0;
    let mut token = || -> Option<String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        (pos > start).then(|| String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    let magic = token().ok_or_else(|| bad("missing magic number"))?;
    let width: usize = token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad width"))?;
    let height: usize = token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad height"))?;
    let mut pixels = Vec::with_capacity(width * height);
    match magic.as_str() {
        "P1" => {
            for &b in &data[pos..] {
                match b {
                    b'0' => pixels.push(false),
                    b'1' => pixels.push(true),
                    b if b.is_ascii_whitespace() => {}
                    _ => return Err(bad("unexpected byte in P1 raster")),
                }
            }
        }
        "P4" => {
            // Exactly one whitespace byte separates the header from the raster.
            let raster = data.get(pos + 1..).ok_or_else(|| bad("missing raster"))?;
            let stride = width.div_ceil(8);
            if raster.len() != stride * height {
                return Err(bad("P4 raster has the wrong size"));
            }
            for row in raster.chunks(stride.max(1)).take(height) {
                for x in 0..width {
                    pixels.push(row[x / 8] & (0x80 >> (x % 8)) != 0);
                }
            }
        }
        _ => return Err(bad("unsupported magic number")),
    }
    if pixels.len() != width * height {
        return Err(bad("raster size does not match header"));
    }
    Ok(PixelMatrix {
        width,
        height,
        pixels,
    })
}

/// `v` with 12 significant digits in the style of C's `%#.12g`.
pub fn format_sig12(v: f64) -> String {
    const SIG: i32 = 12;
    if v == 0.0 {
        return format!("{:.*}", (SIG - 1) as usize, 0.0);
    }
    let sci = format!("{:.*e}", (SIG - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..SIG).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        format!("{:.*}", (SIG - 1 - exp) as usize, v)
    }
}

/// Writes labelled series as columns sharing one iteration axis.
///
/// The `bits` column is twice the iteration, the width of a light cone row
/// less one.
pub fn write_csv<W: Write + ?Sized>(
    series: &[(&str, &MetricSeries)],
    sink: &mut W,
) -> Result<usize, RenderError> {
    let (first_label, first) = series.first().ok_or(RenderError::NoSeries)?;
    for (label, s) in &series[1..] {
        if s.len() != first.len() || s.iterations().ne(first.iterations()) {
            return Err(RenderError::AxisMismatch {
                label: label.to_string(),
                first: first_label.to_string(),
            });
        }
    }
    let mut out = Counting {
        inner: sink,
        count: 0,
    };
    let mut buf = io::BufWriter::new(&mut out);
    write!(buf, "iteration,bits")?;
    for (label, _) in series {
        write!(buf, ",{label}")?;
    }
    writeln!(buf)?;
    for (row, (t, _)) in first.entries().iter().enumerate() {
        write!(buf, "{t},{}", 2 * t)?;
        for (_, s) in series {
            write!(buf, ",{}", format_sig12(s.entries()[row].1))?;
        }
        writeln!(buf)?;
    }
    buf.flush()?;
    drop(buf);
    Ok(out.count)
}

/// Randomness count and zeros/ones ratio columns, then a trailing
/// `# pearson=<value>` line (`undefined` when either series is constant).
pub fn write_report_csv<W: Write + ?Sized>(
    report: &MetricsReport,
    sink: &mut W,
) -> Result<usize, RenderError> {
    let mut n = write_csv(
        &[
            ("randomness_count", &report.randomness),
            ("zeros_ones_ratio", &report.ratio),
        ],
        sink,
    )?;
    let trailer = match report.pearson {
        Some(r) => format!("# pearson={}\n", format_sig12(r)),
        None => "# pearson=undefined\n".to_string(),
    };
    sink.write_all(trailer.as_bytes())?;
    n += trailer.len();
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::evolve;
    use crate::rule::RULE_30;
    use crate::tape::{single_seed, WindowPolicy};

    fn render(d: &SpacetimeDiagram, f: PbmFormat) -> Vec<u8> {
        let mut out = Vec::new();
        let n = write_pbm(d, f, &mut out).unwrap();
        assert_eq!(n, out.len());
        out
    }

    #[test]
    fn single_row_p1() {
        let d = SpacetimeDiagram::from_rows(vec![Tape::parse("101", 1).unwrap()]);
        assert_eq!(render(&d, PbmFormat::P1), b"P1\n3 1\n1 0 1\n");
    }

    #[test]
    fn rule_30_two_steps_p1() {
        let lc = WindowPolicy::LightCone;
        let d = evolve(single_seed(lc).unwrap(), RULE_30, lc, 2, &mut []).unwrap();
        assert_eq!(
            String::from_utf8(render(&d, PbmFormat::P1)).unwrap(),
            "P1\n5 3\n0 0 1 0 0\n0 1 1 1 0\n1 1 0 0 1\n"
        );
        // 5 pixels pack into one byte per row, MSB leftmost.
        assert_eq!(
            render(&d, PbmFormat::P4),
            [
                b"P4\n5 3\n".as_slice(),
                &[0b0010_0000, 0b0111_0000, 0b1100_1000]
            ]
            .concat()
        );
    }

    #[test]
    fn empty_diagram_rejected() {
        let d = SpacetimeDiagram::from_rows(vec![]);
        assert!(matches!(
            write_pbm(&d, PbmFormat::P1, &mut Vec::new()),
            Err(RenderError::EmptyDiagram)
        ));
    }

    #[test]
    fn p1_p4_decode_identically() {
        let lc = WindowPolicy::LightCone;
        let d = evolve(single_seed(lc).unwrap(), RULE_30, lc, 37, &mut []).unwrap();
        let p1 = read_pbm(&render(&d, PbmFormat::P1)).unwrap();
        let p4 = read_pbm(&render(&d, PbmFormat::P4)).unwrap();
        assert_eq!(p1, p4);
        assert_eq!(p1, PixelMatrix::from_diagram(&d).unwrap());
        assert_eq!((p1.width, p1.height), (75, 38));
    }

    #[test]
    fn sink_errors_propagate() {
        struct Broken;
        impl Write for Broken {
            fn write(&mut self, _: &[u8]) -> io::Result<usize> {
                Err(io::Error::other("nope"))
            }
            fn flush(&mut self) -> io::Result<()> {
                Ok(())
            }
        }
        let d = SpacetimeDiagram::from_rows(vec![Tape::parse("1", 0).unwrap()]);
        assert!(matches!(
            write_pbm(&d, PbmFormat::P1, &mut Broken),
            Err(RenderError::Io(_))
        ));
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.0), "0.00000000000");
        assert_eq!(format_sig12(0.25), "0.250000000000");
        assert_eq!(format_sig12(1.0), "1.00000000000");
        assert_eq!(format_sig12(0.1424688324926165), "0.142468832493");
        assert_eq!(format_sig12(-2.5), "-2.50000000000");
        assert_eq!(format_sig12(123456.75), "123456.750000");
        assert_eq!(format_sig12(1.5e-7), "1.50000000000e-07");
        assert_eq!(format_sig12(0.00012), "0.000120000000000");
        assert_eq!(format_sig12(9.9999999999999e11), "1.00000000000e+12");
    }

    #[test]
    fn csv_examples() {
        let s = MetricSeries::new(vec![(1, 0.0)]).unwrap();
        let mut out = Vec::new();
        let n = write_csv(&[("rc", &s)], &mut out).unwrap();
        assert_eq!(out, b"iteration,bits,rc\n1,2,0.00000000000\n");
        assert_eq!(n, out.len());

        let a = MetricSeries::new(vec![(1, 0.5), (2, 0.25)]).unwrap();
        let b = MetricSeries::new(vec![(1, 2.0), (2, 3.0)]).unwrap();
        let mut out = Vec::new();
        write_csv(&[("a", &a), ("b", &b)], &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "iteration,bits,a,b\n1,2,0.500000000000,2.00000000000\n2,4,0.250000000000,3.00000000000\n"
        );

        let c = MetricSeries::new(vec![(1, 2.0), (3, 3.0)]).unwrap();
        assert!(matches!(
            write_csv(&[("a", &a), ("c", &c)], &mut Vec::new()),
            Err(RenderError::AxisMismatch { .. })
        ));
        assert!(matches!(
            write_csv(&[], &mut Vec::new()),
            Err(RenderError::NoSeries)
        ));
    }
}
