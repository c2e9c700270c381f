use std::io::{Read, Write};

use crate::error::{Error, Result};

pub const COLUMNS: [&str; 15] = [
    "axis",
    "value_units",
    "mean_n",
    "g2",
    "g3",
    "g32",
    "c2",
    "p0",
    "p1",
    "p2",
    "p3",
    "residual",
    "n_cav",
    "n_mech",
    "converged",
];

/// Extra coordinate columns of a two-axis scan, inserted after `value_units`.
pub const HEATMAP_COLUMNS: [&str; 2] = ["axis2", "value2_units"];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis: String,
    pub value: f64,
    pub inner: Option<(String, f64)>,
    pub mean_n: Option<f64>,
    pub g2: Option<f64>,
    pub g3: Option<f64>,
    pub g32: Option<f64>,
    pub c2: Option<f64>,
    pub p: [Option<f64>; 4],
    pub residual: Option<f64>,
    pub n_cav: usize,
    pub n_mech: usize,
    pub converged: bool,
}

impl SweepRow {
    pub fn column(&self, name: &str) -> Option<f64> {
        match name {
            "value_units" => Some(self.value),
            "value2_units" => self.inner.as_ref().map(|(_, v)| *v),
            "mean_n" => self.mean_n,
            "g2" => self.g2,
            "g3" => self.g3,
            "g32" => self.g32,
            "c2" => self.c2,
            "p0" => self.p[0],
            "p1" => self.p[1],
            "p2" => self.p[2],
            "p3" => self.p[3],
            "residual" => self.residual,
            "n_cav" => Some(self.n_cav as f64),
            "n_mech" => Some(self.n_mech as f64),
            _ => None,
        }
    }
}

/// 12 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn cell(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn is_heatmap(&self) -> bool {
        self.rows.iter().any(|r| r.inner.is_some())
    }

    pub fn header(&self) -> Vec<&'static str> {
        let mut cols: Vec<&str> = COLUMNS.to_vec();
        if self.is_heatmap() {
            cols.splice(2..2, HEATMAP_COLUMNS);
        }
        cols
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let heatmap = self.is_heatmap();
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        w.write_record(self.header()).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![r.axis.clone(), format_float(r.value)];
            if heatmap {
                let (name, v) = r.inner.clone().unwrap_or_default();
                rec.push(name);
                rec.push(format_float(v));
            }
            rec.extend([r.mean_n, r.g2, r.g3, r.g32, r.c2].map(cell));
            rec.extend(r.p.map(cell));
            rec.push(cell(r.residual));
            rec.push(r.n_cav.to_string());
            rec.push(r.n_mech.to_string());
            rec.push(r.converged.to_string());
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let csv_err = |e: csv::Error| Error::Csv(e.to_string());
        let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        let heatmap = header.iter().any(|h| h == HEATMAP_COLUMNS[0]);
        let expected: Vec<String> = {
            let t = SweepTable {
                rows: if heatmap {
                    vec![SweepRow {
                        inner: Some((String::new(), 0.0)),
                        ..empty_row()
                    }]
                } else {
                    vec![]
                },
            };
            t.header().iter().map(|s| s.to_string()).collect()
        };
        if header != expected {
            return Err(Error::Csv(format!("unexpected header {}", header.join(","))));
        }

        let mut rows = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let get = |name: &str| -> &str { rec.get(header.iter().position(|h| h == name).unwrap()).unwrap_or("") };
            let num = |name: &str| -> Result<Option<f64>> {
                let s = get(name);
                if s.is_empty() {
                    return Ok(None);
                }
                s.parse()
                    .map(Some)
                    .map_err(|_| Error::Csv(format!("row {}: bad {name} value {s:?}", line + 1)))
            };
            let int = |name: &str| -> Result<usize> {
                get(name)
                    .parse()
                    .map_err(|_| Error::Csv(format!("row {}: bad {name}", line + 1)))
            };
            rows.push(SweepRow {
                axis: get("axis").to_string(),
                value: num("value_units")?.ok_or_else(|| Error::Csv(format!("row {}: missing value", line + 1)))?,
                inner: if heatmap {
                    Some((get("axis2").to_string(), num("value2_units")?.unwrap_or(f64::NAN)))
                } else {
                    None
                },
                mean_n: num("mean_n")?,
                g2: num("g2")?,
                g3: num("g3")?,
                g32: num("g32")?,
                c2: num("c2")?,
                p: [num("p0")?, num("p1")?, num("p2")?, num("p3")?],
                residual: num("residual")?,
                n_cav: int("n_cav")?,
                n_mech: int("n_mech")?,
                converged: get("converged") == "true",
            });
        }
        Ok(SweepTable { rows })
    }
}

pub(crate) fn empty_row() -> SweepRow {
    SweepRow {
        axis: String::new(),
        value: 0.0,
        inner: None,
        mean_n: None,
        g2: None,
        g3: None,
        g32: None,
        c2: None,
        p: [None; 4],
        residual: None,
        n_cav: 0,
        n_mech: 0,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64) -> SweepRow {
        SweepRow {
            axis: "delta".into(),
            value,
            g2: Some(0.006359300476947536),
            mean_n: Some(0.04),
            p: [Some(0.96), Some(0.04), None, None],
            n_cav: 5,
            n_mech: 12,
            converged: true,
            ..empty_row()
        }
    }

    #[test]
    fn header_and_float_format() {
        let t = SweepTable { rows: vec![row(1.0)] };
        let text = t.to_csv_string();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
        assert_eq!(
            lines.next().unwrap(),
            "delta,1.00000000000e0,4.00000000000e-2,6.35930047695e-3,,,,9.60000000000e-1,4.00000000000e-2,,,,5,12,true"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn round_trip() {
        let mut t = SweepTable {
            rows: vec![row(0.5), row(1.5)],
        };
        t.rows[1].converged = false;
        let back = SweepTable::read_csv(t.to_csv_string().as_bytes()).unwrap();
        assert_eq!(back.to_csv_string(), t.to_csv_string());

        let mut h = t.clone();
        for r in &mut h.rows {
            r.inner = Some(("g".into(), 0.25));
        }
        let text = h.to_csv_string();
        assert!(text.starts_with("axis,value_units,axis2,value2_units,mean_n"));
        assert_eq!(SweepTable::read_csv(text.as_bytes()).unwrap().to_csv_string(), text);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(SweepTable::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    }
}
