//! CSV and Wavefront OBJ reading and writing.
//!
//! Floats are written with 17 significant digits so that values round-trip
//! exactly and repeated runs produce identical files.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::estimates::{BoundReport, Threshold, ThresholdKind};
use crate::graph::{GraphSolution, NodeKind};
use crate::mesh::{Point, TriMesh, VertexField, VertexRole};
use crate::profiles::{GraphSample, WingSample};

/// Float formatted with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(w)
}

pub const PROFILE_HEADER: [&str; 3] = ["x", "f", "fp"];

pub fn write_profile_csv<W: Write>(w: W, samples: &[GraphSample]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(PROFILE_HEADER)?;
    for s in samples {
        out.write_record([fmt_f64(s.x), fmt_f64(s.f), fmt_f64(s.fp)])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a profile table written by [`write_profile_csv`]. Abscissas must
/// be finite and strictly increasing, heights positive.
pub fn read_profile_csv<R: std::io::Read>(r: R) -> Result<Vec<GraphSample>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let header = rdr.headers().map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;
    if header.iter().map(str::trim).ne(PROFILE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: format!(
                "expected header x,f,fp, got {}",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out: Vec<GraphSample> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse {
            line,
            msg: e.to_string(),
        })?;
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 3 fields, got {}", rec.len()),
            });
        }
        let mut v = [0.0; 3];
        for (k, field) in rec.iter().enumerate() {
            v[k] = field.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("field {}: {e}", k + 1),
            })?;
            if !v[k].is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: "non-finite value".into(),
                });
            }
        }
        if !(v[1] > 0.0) {
            return Err(Error::Parse {
                line,
                msg: "height must be positive".into(),
            });
        }
        if let Some(prev) = out.last() {
            if !(v[0] > prev.x) {
                return Err(Error::Parse {
                    line,
                    msg: "x must increase strictly".into(),
                });
            }
        }
        out.push(GraphSample {
            x: v[0],
            f: v[1],
            fp: v[2],
        });
    }
    Ok(out)
}

pub fn write_winglike_csv<W: Write>(w: W, samples: &[WingSample]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["s", "x", "z", "theta"])?;
    for s in samples {
        out.write_record([fmt_f64(s.s), fmt_f64(s.x), fmt_f64(s.z), fmt_f64(s.theta)])?;
    }
    out.flush()?;
    Ok(())
}

/// `x,y,u` for every node inside the domain, boundary nodes at their
/// snapped positions.
pub fn write_graph_csv<W: Write>(w: W, solution: &GraphSolution) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["x", "y", "u"])?;
    let grid = solution.grid();
    let values = solution.node_values();
    for n in 0..grid.node_count() {
        if grid.kind(n) != NodeKind::Outside {
            let (x, y) = grid.position(n);
            out.write_record([fmt_f64(x), fmt_f64(y), fmt_f64(values[n])])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_vertex_field_csv<W: Write>(w: W, mesh: &TriMesh, field: &VertexField) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["vertex", "x", "y", "z", "value", "role"])?;
    for (i, (v, role)) in field.values.iter().zip(&field.roles).enumerate() {
        let p = mesh.vertices()[i];
        let role = match role {
            VertexRole::Interior => "interior",
            VertexRole::Boundary => "boundary",
            VertexRole::Apex => "apex",
        };
        out.write_record([
            i.to_string(),
            fmt_f64(p.x),
            fmt_f64(p.y),
            fmt_f64(p.z),
            fmt_f64(*v),
            role.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn params_field(inputs: &[(String, f64)]) -> String {
    inputs
        .iter()
        .map(|(k, v)| format!("{k}={}", fmt_f64(*v)))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_reports_csv<W: Write>(w: W, reports: &[BoundReport]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["name", "lhs", "rhs", "margin", "slack", "passed", "params"])?;
    for r in reports {
        out.write_record([
            r.name.clone(),
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            fmt_f64(r.slack),
            r.passed.to_string(),
            params_field(&r.inputs),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Aligned plain-text table of reports.
pub fn reports_table(reports: &[BoundReport]) -> String {
    let mut s = format!(
        "{:<18} {:>24} {:>24} {:>24} {:>6}\n",
        "check", "lhs", "rhs", "margin", "pass"
    );
    for r in reports {
        s.push_str(&format!(
            "{:<18} {:>24} {:>24} {:>24} {:>6}\n",
            r.name,
            fmt_f64(r.lhs),
            fmt_f64(r.rhs),
            fmt_f64(r.margin),
            if r.passed { "yes" } else { "NO" }
        ));
    }
    s
}

pub fn threshold_kind_name(kind: ThresholdKind) -> &'static str {
    match kind {
        ThresholdKind::H0 => "h0",
        ThresholdKind::D0 => "d0",
    }
}

/// Sweep of a threshold as `parameter,observable`; absent observables are
/// left empty.
pub fn write_sweep_csv<W: Write>(w: W, threshold: &Threshold) -> Result<()> {
    let mut out = csv_writer(w);
    let (p, o) = match threshold.kind {
        ThresholdKind::H0 => ("z0", "observable"),
        ThresholdKind::D0 => ("lambda", "exit_height"),
    };
    out.write_record([p, o])?;
    for (x, v) in &threshold.sweep {
        out.write_record([fmt_f64(*x), v.map(fmt_f64).unwrap_or_default()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_obj<W: Write>(mut w: W, mesh: &TriMesh) -> Result<()> {
    let mut buf = String::new();
    for p in mesh.vertices() {
        buf.push_str(&format!("v {} {} {}\n", fmt_f64(p.x), fmt_f64(p.y), fmt_f64(p.z)));
    }
    for t in mesh.triangles() {
        buf.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    w.write_all(buf.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Reads vertices and faces from OBJ text. Texture and normal indices are
/// ignored, negative indices count back from the latest vertex, and
/// polygons are fan-triangulated. Other statements are skipped.
pub fn read_obj<R: BufRead>(r: R) -> Result<TriMesh> {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.split('#').next().unwrap_or("");
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let mut c = [0.0; 3];
                for slot in &mut c {
                    let t = tok.next().ok_or(Error::Parse {
                        line: line_no,
                        msg: "vertex needs three coordinates".into(),
                    })?;
                    *slot = t.parse::<f64>().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("bad coordinate {t:?}: {e}"),
                    })?;
                }
                vertices.push(Point::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for t in tok {
                    let head = t.split('/').next().unwrap_or("");
                    let k: i64 = head.parse().map_err(|e| Error::Parse {
                        line: line_no,
                        msg: format!("bad face index {t:?}: {e}"),
                    })?;
                    let n = vertices.len() as i64;
                    let resolved = if k > 0 { k - 1 } else { n + k };
                    if k == 0 || resolved < 0 || resolved >= n {
                        return Err(Error::Parse {
                            line: line_no,
                            msg: format!("face index {k} out of range"),
                        });
                    }
                    idx.push(resolved as usize);
                }
                if idx.len() < 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "face needs at least three vertices".into(),
                    });
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_round_trip() {
        let samples = vec![
            GraphSample {
                x: 0.0,
                f: 1.0,
                fp: 0.0,
            },
            GraphSample {
                x: 0.1,
                f: 1.005_004_168_055_804,
                fp: 0.100_166_750_019_844,
            },
        ];
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &samples).unwrap();
        let back = read_profile_csv(buf.as_slice()).unwrap();
        assert_eq!(back, samples);
    }

    #[test]
    fn profile_reader_rejects_garbage() {
        assert!(read_profile_csv("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_profile_csv("x,f,fp\n1,1,0\n0,1,0\n".as_bytes()).is_err());
        assert!(read_profile_csv("x,f,fp\n1,-1,0\n".as_bytes()).is_err());
        assert!(read_profile_csv("x,f,fp\n1,nan,0\n".as_bytes()).is_err());
    }

    #[test]
    fn obj_round_trip_and_quads() {
        let text = "# square\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n";
        let m = read_obj(text.as_bytes()).unwrap();
        assert_eq!(m.triangles().len(), 2);
        let mut buf = Vec::new();
        write_obj(&mut buf, &m).unwrap();
        let again = read_obj(buf.as_slice()).unwrap();
        assert_eq!(again.vertices(), m.vertices());
        assert_eq!(again.triangles(), m.triangles());
        assert!(read_obj("v 0 0 1\nf 1 2 3\n".as_bytes()).is_err());
        assert!(read_obj("v 0 0 1\nv 1 0 1\nv 0 1 1\nf -3 -2 -1\n".as_bytes()).is_ok());
    }
}
